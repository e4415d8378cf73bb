//! Log-likelihood ratios: hard decisions and saturating fixed-point values.
//!
//! Positive LLRs favour bit 0. Fixed-point values use two's-complement
//! storage with symmetric saturation, so the most negative code of a
//! `q`-bit word is never produced and every magnitude fits in `q - 1` bits.

use serde::{Deserialize, Serialize};

/// Smallest supported fixed-point width.
pub const MIN_WIDTH: u8 = 4;
/// Largest supported fixed-point width.
pub const MAX_WIDTH: u8 = 8;

/// Anything carrying an LLR sign.
pub trait SoftValue: Copy {
    fn is_negative(self) -> bool;
}

impl SoftValue for f64 {
    #[inline]
    fn is_negative(self) -> bool {
        self < 0.0
    }
}

impl SoftValue for i32 {
    #[inline]
    fn is_negative(self) -> bool {
        self < 0
    }
}

impl SoftValue for QuantizedLlr {
    #[inline]
    fn is_negative(self) -> bool {
        self.value < 0
    }
}

/// Hard decision: 0 when `alpha >= 0`, 1 otherwise.
#[inline]
pub fn hard_decision<T: SoftValue>(alpha: T) -> u8 {
    alpha.is_negative() as u8
}

/// Largest representable magnitude of a `width`-bit symmetric word.
#[inline]
pub const fn max_magnitude(width: u8) -> i32 {
    (1 << (width - 1)) - 1
}

/// Clamp a wide value into the symmetric `width`-bit range.
#[inline]
pub fn saturate(value: i64, width: u8) -> i32 {
    let m = max_magnitude(width) as i64;
    value.clamp(-m, m) as i32
}

fn check_width(width: u8) {
    assert!(
        (MIN_WIDTH..=MAX_WIDTH).contains(&width),
        "fixed-point width {width} outside {MIN_WIDTH}..={MAX_WIDTH}"
    );
}

/// A saturating fixed-point LLR of configurable width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizedLlr {
    value: i16,
    width: u8,
}

impl QuantizedLlr {
    /// Returns `None` when `value` lies outside the symmetric range.
    pub fn new(value: i32, width: u8) -> Option<Self> {
        check_width(width);
        let m = max_magnitude(width);
        (-m..=m).contains(&value).then_some(Self {
            value: value as i16,
            width,
        })
    }

    /// Builds a value, clamping into range.
    pub fn saturating(value: i64, width: u8) -> Self {
        check_width(width);
        Self {
            value: saturate(value, width) as i16,
            width,
        }
    }

    pub fn value(self) -> i32 {
        self.value as i32
    }

    pub fn width(self) -> u8 {
        self.width
    }

    /// Magnitude as an unsigned `width - 1` bit amplitude.
    pub fn magnitude(self) -> u32 {
        self.value.unsigned_abs() as u32
    }

    /// Sum clamped into the shared range.
    ///
    /// Panics when the operands have different widths.
    pub fn saturating_add(self, other: Self) -> Self {
        assert_eq!(self.width, other.width, "fixed-point width mismatch");
        Self::saturating(self.value as i64 + other.value as i64, self.width)
    }

    /// Difference clamped into the shared range.
    pub fn saturating_sub(self, other: Self) -> Self {
        assert_eq!(self.width, other.width, "fixed-point width mismatch");
        Self::saturating(self.value as i64 - other.value as i64, self.width)
    }

    /// Sums many values in a wide accumulator and saturates once.
    pub fn saturating_sum<I: IntoIterator<Item = Self>>(values: I, width: u8) -> Self {
        let acc = values.into_iter().fold(0i64, |acc, v| {
            assert_eq!(v.width, width, "fixed-point width mismatch");
            acc + v.value as i64
        });
        Self::saturating(acc, width)
    }
}
