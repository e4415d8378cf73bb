//! Bit-plane minimum search.
//!
//! The amplitudes are laid out as columns of a `bits x M` binary matrix and
//! each row (bit plane) becomes an `M`-bit word. Scanning planes from the
//! most significant down, a position is eliminated as soon as it carries a 1
//! in a plane where some other surviving position carries a 0. A plane that
//! would eliminate every survivor is skipped. The survivors are exactly the
//! positions attaining the minimum.

/// Largest number of amplitudes handled by one mask word.
pub const MAX_LANES: usize = 128;

/// Returns an `M`-bit mask whose set bits mark every position attaining the
/// minimum of `amplitudes`, each an unsigned `bits`-bit value.
///
/// Panics when `amplitudes` is empty or longer than [`MAX_LANES`].
pub fn parallel_min_mask(amplitudes: &[u32], bits: u32) -> u128 {
    let m = amplitudes.len();
    assert!((1..=MAX_LANES).contains(&m), "unsupported lane count {m}");
    let full: u128 = if m == MAX_LANES { u128::MAX } else { (1u128 << m) - 1 };

    let mut eliminated: u128 = 0;
    for plane in (0..bits).rev() {
        let mut row: u128 = 0;
        for (i, &a) in amplitudes.iter().enumerate() {
            row |= (((a >> plane) & 1) as u128) << i;
        }
        let candidate = eliminated | row;
        if candidate != full {
            eliminated = candidate;
        }
    }
    !eliminated & full
}

/// Lowest set position of a minimum mask: the duplicate-minima rule.
pub fn first_minimum(mask: u128) -> Option<usize> {
    (mask != 0).then(|| mask.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_traced_example() {
        // MSB plane [1,0,1,0] is accepted, the LSB plane [0,1,1,1] would
        // saturate the mask and is skipped.
        assert_eq!(parallel_min_mask(&[2, 1, 3, 1], 2), 0b1010);
    }

    #[test]
    fn all_equal_keeps_every_position() {
        assert_eq!(parallel_min_mask(&[5; 8], 3), 0xff);
        assert_eq!(parallel_min_mask(&[7; 128], 3), u128::MAX);
    }

    #[test]
    fn unique_minimum_and_tie_rule() {
        assert_eq!(parallel_min_mask(&[7, 6, 0, 5], 3), 0b0100);
        assert_eq!(first_minimum(parallel_min_mask(&[4, 2, 9, 2], 4)), Some(1));
    }
}
