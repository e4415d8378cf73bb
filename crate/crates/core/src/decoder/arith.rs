//! Arithmetic back-ends for the decoder: double precision and saturating
//! fixed point.

use std::fmt::Debug;

use crate::llr::{max_magnitude, saturate, MAX_WIDTH, MIN_WIDTH};

use super::parallel_min::parallel_min_mask;

/// LLR arithmetic used by the tree traversal and the node decoders.
pub trait Arithmetic: Clone + Send + Sync {
    type Llr: Copy + Default + Debug + PartialEq + Send + Sync;

    /// Min-sum check-node update.
    fn f(&self, a: Self::Llr, b: Self::Llr) -> Self::Llr;

    /// Variable-node update `b + (1 - 2u) a`.
    fn g(&self, a: Self::Llr, b: Self::Llr, bit: u8) -> Self::Llr;

    /// 0 when `a >= 0`, else 1.
    fn hard(&self, a: Self::Llr) -> u8;

    /// Sum with a wide accumulator, saturated once at the end.
    fn sum(&self, values: &[Self::Llr]) -> Self::Llr;

    /// |a| as a double (exact for fixed-point values).
    fn magnitude(&self, a: Self::Llr) -> f64;

    /// Position of the smallest magnitude; the lowest index wins ties.
    fn argmin_magnitude(&self, values: &[Self::Llr]) -> usize;
}

/// Reference double-precision arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Float;

impl Arithmetic for Float {
    type Llr = f64;

    #[inline]
    fn f(&self, a: f64, b: f64) -> f64 {
        let m = a.abs().min(b.abs());
        if (a < 0.0) != (b < 0.0) {
            -m
        } else {
            m
        }
    }

    #[inline]
    fn g(&self, a: f64, b: f64, bit: u8) -> f64 {
        if bit == 0 {
            b + a
        } else {
            b - a
        }
    }

    #[inline]
    fn hard(&self, a: f64) -> u8 {
        (a < 0.0) as u8
    }

    fn sum(&self, values: &[f64]) -> f64 {
        values.iter().sum()
    }

    #[inline]
    fn magnitude(&self, a: f64) -> f64 {
        a.abs()
    }

    fn argmin_magnitude(&self, values: &[f64]) -> usize {
        let mut best = 0;
        for (i, v) in values.iter().enumerate().skip(1) {
            if v.abs() < values[best].abs() {
                best = i;
            }
        }
        best
    }
}

/// Saturating fixed-point arithmetic on `width`-bit symmetric words.
///
/// Minimum searches go through the bit-plane mask of
/// [`parallel_min_mask`] and resolve duplicate minima to the lowest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixed {
    width: u8,
}

impl Fixed {
    pub fn new(width: u8) -> Self {
        assert!(
            (MIN_WIDTH..=MAX_WIDTH).contains(&width),
            "fixed-point width {width} outside {MIN_WIDTH}..={MAX_WIDTH}"
        );
        Self { width }
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn max(&self) -> i32 {
        max_magnitude(self.width)
    }
}

impl Arithmetic for Fixed {
    type Llr = i32;

    #[inline]
    fn f(&self, a: i32, b: i32) -> i32 {
        let m = a.abs().min(b.abs());
        if (a < 0) != (b < 0) {
            -m
        } else {
            m
        }
    }

    #[inline]
    fn g(&self, a: i32, b: i32, bit: u8) -> i32 {
        let v = if bit == 0 {
            b as i64 + a as i64
        } else {
            b as i64 - a as i64
        };
        saturate(v, self.width)
    }

    #[inline]
    fn hard(&self, a: i32) -> u8 {
        (a < 0) as u8
    }

    fn sum(&self, values: &[i32]) -> i32 {
        saturate(values.iter().map(|&v| v as i64).sum(), self.width)
    }

    #[inline]
    fn magnitude(&self, a: i32) -> f64 {
        a.abs() as f64
    }

    fn argmin_magnitude(&self, values: &[i32]) -> usize {
        if values.len() == 1 {
            return 0;
        }
        if values.len() > 128 {
            let mut best = 0;
            for (i, v) in values.iter().enumerate().skip(1) {
                if v.abs() < values[best].abs() {
                    best = i;
                }
            }
            return best;
        }
        let mut amps = [0u32; 128];
        for (a, v) in amps.iter_mut().zip(values) {
            *a = v.unsigned_abs();
        }
        let mask = parallel_min_mask(&amps[..values.len()], self.width as u32 - 1);
        mask.trailing_zeros() as usize
    }
}
