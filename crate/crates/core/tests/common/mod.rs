#![allow(dead_code)]

use fastpolar::pattern::PatternTag;
use fastpolar::{CodeSpec, FastPolarCode, SegmentPattern, SEGMENT_LEN};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Segment information counts that have a fast pattern.
pub const FAST_COUNTS: [usize; 10] = [0, 1, 2, 3, 7, 11, 13, 14, 15, 16];

/// Fast code with a random supported count in every segment. Non-BCH
/// segments carry information at their top local indices; BCH segments at
/// random positions.
pub fn random_fast_code<R: Rng>(len: usize, rng: &mut R) -> FastPolarCode {
    let mut info = vec![false; len];
    let mut segments = Vec::new();
    for s in 0..len / SEGMENT_LEN {
        let k = FAST_COUNTS[rng.random_range(0..FAST_COUNTS.len())];
        let tag = PatternTag::for_segment_k(k);
        let base = s * SEGMENT_LEN;
        if tag.is_bch() {
            for p in sample(rng, SEGMENT_LEN, k) {
                info[base + p] = true;
            }
        } else {
            for p in SEGMENT_LEN - k..SEGMENT_LEN {
                info[base + p] = true;
            }
        }
        segments.push(SegmentPattern::new(tag, k));
    }
    FastPolarCode::new(CodeSpec::from_info_mask(info).unwrap(), segments).unwrap()
}

/// Plain layout with a uniformly random information set of random size.
pub fn random_plain_spec<R: Rng>(len: usize, rng: &mut R) -> CodeSpec {
    let k = rng.random_range(0..=len);
    let set: Vec<usize> = sample(rng, len, k).into_vec();
    CodeSpec::from_info_set(len, &set).unwrap()
}

pub fn random_bits<R: Rng>(k: usize, rng: &mut R) -> Vec<u8> {
    (0..k).map(|_| rng.random::<bool>() as u8).collect()
}

/// BPSK over AWGN with unit amplitude, as LLRs.
pub fn noisy_llrs<R: Rng>(codeword: &[u8], sigma: f64, rng: &mut R) -> Vec<f64> {
    codeword
        .iter()
        .map(|&b| {
            let n: f64 = StandardNormal.sample(rng);
            2.0 * (1.0 - 2.0 * b as f64 + sigma * n) / (sigma * sigma)
        })
        .collect()
}

pub fn noiseless_llrs(codeword: &[u8], magnitude: f64) -> Vec<f64> {
    codeword
        .iter()
        .map(|&b| if b == 0 { magnitude } else { -magnitude })
        .collect()
}
