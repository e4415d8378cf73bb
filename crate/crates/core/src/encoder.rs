//! Polar transform and fast-polar encoding.

use crate::bch::bch_encode;
use crate::code::{Layout, SEGMENT_LEN};
use crate::error::{Error, Result};

/// In-place `x = u F^{(x)n}` over GF(2), natural index order.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let len = bits.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

/// `u F^{(x)n}`; the transform is its own inverse.
pub fn polar_transform(u: &[u8]) -> Vec<u8> {
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x);
    x
}

/// Builds the u-domain vector for a layout and an information vector.
///
/// Non-BCH segments take the information bits at their information
/// positions (frozen bits are zero). A BCH segment's information bits, in
/// ascending index order, form the BCH message; the segment's u-block is the
/// extended codeword times `G_16`, so that the transform reproduces the
/// codeword as the segment's node-level code bits.
pub fn assemble_u(layout: &Layout, info: &[u8]) -> Result<Vec<u8>> {
    let spec = layout.spec();
    if info.len() != spec.k() {
        return Err(Error::LengthMismatch {
            expected: spec.k(),
            actual: info.len(),
        });
    }
    let mut u = vec![0u8; spec.len()];
    let mut next = 0;
    let mut i = 0;
    while i < spec.len() {
        let segment = i / SEGMENT_LEN;
        if let Some(variant) = layout.bch_variant(segment) {
            let range = i..i + SEGMENT_LEN;
            let count = range.clone().filter(|&j| spec.is_info(j)).count();
            let mut block = bch_encode(&info[next..next + count], variant)?;
            polar_transform_in_place(&mut block);
            u[range].copy_from_slice(&block);
            next += count;
            i += SEGMENT_LEN;
        } else {
            if spec.is_info(i) {
                u[i] = info[next] & 1;
                next += 1;
            }
            i += 1;
        }
    }
    Ok(u)
}

/// Encodes `info` (K bits) into an N-bit codeword.
pub fn encode(layout: &Layout, info: &[u8]) -> Result<Vec<u8>> {
    let mut x = assemble_u(layout, info)?;
    polar_transform_in_place(&mut x);
    Ok(x)
}
