//! Brute-force references for the test suites.
//!
//! Nothing here is tuned for speed: codebooks are enumerated explicitly and
//! the baseline SC decoder allocates freely.

use crate::bch::{self, BchVariant};
use crate::code::Layout;
use crate::decoder::arith::Arithmetic;
use crate::encoder::polar_transform;
use crate::error::{Error, Result};
use crate::pattern::PatternTag;

/// Largest node size enumerated explicitly.
pub const MAX_ENUM_SIZE: usize = 16;

/// Every codeword of one node kind at one size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCodebook {
    pub kind: PatternTag,
    pub size: usize,
    pub codewords: Vec<Vec<u8>>,
}

/// Information positions of a node kind at size `m` (u-domain, local).
pub fn node_info_positions(kind: PatternTag, m: usize) -> Option<Vec<usize>> {
    let top = |k: usize| (m - k..m).collect::<Vec<_>>();
    let k = match kind {
        PatternTag::Rate0 => 0,
        PatternTag::Rate1 => m,
        PatternTag::Rep => 1,
        PatternTag::Rep2 => 2,
        PatternTag::Pcr => 3,
        PatternTag::Spc => m.checked_sub(1)?,
        PatternTag::Spc2 => m.checked_sub(2)?,
        PatternTag::Rpc => m.checked_sub(3)?,
        PatternTag::BchT1 | PatternTag::BchT2 | PatternTag::Slow => return None,
    };
    (k <= m).then(|| top(k))
}

/// Enumerates a node codebook by sweeping the information bits through `G_M`.
pub fn enumerate_codebook(kind: PatternTag, m: usize) -> Result<NodeCodebook> {
    if m > MAX_ENUM_SIZE {
        return Err(Error::NodeTooLarge(m));
    }
    if let Some(variant) = BchVariant::from_tag(kind) {
        if m != bch::EXTENDED_LEN {
            return Err(Error::InvalidLayout(format!("BCH nodes have size 16, not {m}")));
        }
        return Ok(NodeCodebook {
            kind,
            size: m,
            codewords: bch::codebook(variant).into_iter().map(|c| c.to_vec()).collect(),
        });
    }
    if !m.is_power_of_two() {
        return Err(Error::InvalidLength(m));
    }
    let info =
        node_info_positions(kind, m).ok_or_else(|| Error::InvalidLayout(format!("no {kind} node of size {m}")))?;
    let mut codewords = Vec::with_capacity(1 << info.len());
    for value in 0u32..1 << info.len() {
        let mut u = vec![0u8; m];
        for (b, &p) in info.iter().enumerate() {
            u[p] = (value >> b & 1) as u8;
        }
        codewords.push(polar_transform(&u));
    }
    Ok(NodeCodebook {
        kind,
        size: m,
        codewords,
    })
}

/// Correlation metric `sum (1 - 2 x_i) alpha_i`.
pub fn correlation(word: &[u8], alpha: &[f64]) -> f64 {
    word.iter().zip(alpha).map(|(&x, &a)| if x == 0 { a } else { -a }).sum()
}

/// Maximum-likelihood word; ties go to the lexicographically smallest.
pub fn ml_decode(codebook: &NodeCodebook, alpha: &[f64]) -> Vec<u8> {
    let mut best: Option<(&Vec<u8>, f64)> = None;
    for w in &codebook.codewords {
        let c = correlation(w, alpha);
        best = match best {
            None => Some((w, c)),
            Some((bw, bc)) if c > bc || (c == bc && w < bw) => Some((w, c)),
            keep => keep,
        };
    }
    best.expect("non-empty codebook").0.clone()
}

/// Best achievable correlation over a codebook.
pub fn ml_metric(codebook: &NodeCodebook, alpha: &[f64]) -> f64 {
    codebook
        .codewords
        .iter()
        .map(|w| correlation(w, alpha))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Classic leaf-by-leaf successive cancellation; returns the information bits.
pub fn sc_decode_baseline<A: Arithmetic>(layout: &Layout, alpha: &[A::Llr], arith: &A) -> Result<Vec<u8>> {
    if layout.has_bch() {
        return Err(Error::BchLayout);
    }
    if alpha.len() != layout.len() {
        return Err(Error::LengthMismatch {
            expected: layout.len(),
            actual: alpha.len(),
        });
    }
    let mask = layout.spec().info_mask();
    let mut u = vec![0u8; layout.len()];
    sc_node(arith, mask, alpha, 0, &mut u);
    Ok((0..u.len()).filter(|&i| mask[i]).map(|i| u[i]).collect())
}

/// Decodes the node covering `u[offset..offset + alpha.len()]` and returns its
/// code bits.
fn sc_node<A: Arithmetic>(arith: &A, mask: &[bool], alpha: &[A::Llr], offset: usize, u: &mut [u8]) -> Vec<u8> {
    let m = alpha.len();
    if m == 1 {
        let bit = if mask[offset] { arith.hard(alpha[0]) } else { 0 };
        u[offset] = bit;
        return vec![bit];
    }
    let half = m / 2;
    let left_alpha: Vec<_> = (0..half).map(|i| arith.f(alpha[i], alpha[i + half])).collect();
    let left = sc_node(arith, mask, &left_alpha, offset, u);
    let right_alpha: Vec<_> = (0..half).map(|i| arith.g(alpha[i], alpha[i + half], left[i])).collect();
    let right = sc_node(arith, mask, &right_alpha, offset + half, u);
    let mut x: Vec<u8> = left.iter().zip(&right).map(|(a, b)| a ^ b).collect();
    x.extend(right);
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;
    use crate::decoder::arith::Float;

    #[test]
    fn small_codebooks() {
        let rep = enumerate_codebook(PatternTag::Rep, 4).unwrap();
        assert_eq!(rep.codewords, vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1]]);
        let spc = enumerate_codebook(PatternTag::Spc, 4).unwrap();
        assert_eq!(spc.codewords.len(), 8);
        assert!(spc.codewords.iter().all(|w| w.iter().sum::<u8>() % 2 == 0));
    }

    #[test]
    fn rpc_codebook_has_equal_group_parities() {
        let cb = enumerate_codebook(PatternTag::Rpc, 8).unwrap();
        assert_eq!(cb.codewords.len(), 32);
        let mut distinct = cb.codewords.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 32);
        for w in &cb.codewords {
            let p: Vec<u8> = (0..4).map(|i| w[i] ^ w[i + 4]).collect();
            assert!(p.iter().all(|&x| x == p[0]));
        }
    }

    #[test]
    fn too_large_is_rejected() {
        assert_eq!(enumerate_codebook(PatternTag::Spc, 32), Err(Error::NodeTooLarge(32)));
    }

    #[test]
    fn ml_examples() {
        let spc = enumerate_codebook(PatternTag::Spc, 4).unwrap();
        assert_eq!(ml_decode(&spc, &[1.0, -2.0, 3.0, 4.0]), vec![1, 1, 0, 0]);
        let rep = enumerate_codebook(PatternTag::Rep, 4).unwrap();
        assert_eq!(ml_decode(&rep, &[1.0, 1.0, -3.0, 0.0]), vec![1, 1, 1, 1]);
        let w = &spc.codewords[5];
        let alpha: Vec<f64> = w.iter().map(|&b| if b == 0 { 3.0 } else { -3.0 }).collect();
        assert_eq!(&ml_decode(&spc, &alpha), w);
    }

    #[test]
    fn baseline_examples() {
        let spec = CodeSpec::from_info_mask(vec![true, true]).unwrap();
        let out = sc_decode_baseline(&Layout::from(&spec), &[5.0, 5.0], &Float).unwrap();
        assert_eq!(out, vec![0, 0]);
    }
}
