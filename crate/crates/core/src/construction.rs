//! Reliability orders, segment classification and rate re-allocation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::code::{CodeSpec, FastPolarCode, MAX_LEN, SEGMENT_LEN};
use crate::error::{Error, Result};
use crate::pattern::{PatternTag, SegmentPattern};

/// Base of the polarization-weight expansion, 2^(1/4).
pub const PW_BETA: f64 = 1.189_207_115_002_721;

/// Default design SNR (dB, Es/N0 of BPSK) for Gaussian approximation.
pub const DEFAULT_DESIGN_SNR_DB: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReliabilityMethod {
    /// Gaussian approximation of density evolution.
    Ga,
    /// Polarization weight (beta expansion).
    Pw,
}

impl std::str::FromStr for ReliabilityMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(ReliabilityMethod::Ga),
            "pw" => Ok(ReliabilityMethod::Pw),
            other => Err(Error::InvalidConfig(format!("unknown construction method `{other}`"))),
        }
    }
}

/// Permutation of the u-domain indices from least to most reliable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityOrder {
    pub len: usize,
    pub order: Vec<usize>,
    pub method: ReliabilityMethod,
    pub design_snr_db: Option<f64>,
}

impl ReliabilityOrder {
    /// `rank[i]` is the position of index `i` in `order`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.len];
        for (r, &i) in self.order.iter().enumerate() {
            rank[i] = r;
        }
        rank
    }

    /// The `k` most reliable indices.
    pub fn top(&self, k: usize) -> &[usize] {
        &self.order[self.len - k..]
    }
}

fn check_len(len: usize) -> Result<()> {
    if len.is_power_of_two() && (2..=MAX_LEN).contains(&len) {
        Ok(())
    } else {
        Err(Error::InvalidLength(len))
    }
}

/// Polarization weight of every index.
pub fn pw_weights(len: usize) -> Vec<f64> {
    let bits = len.trailing_zeros();
    (0..len)
        .map(|i| {
            (0..bits)
                .filter(|&j| i >> j & 1 == 1)
                .map(|j| PW_BETA.powi(j as i32))
                .sum()
        })
        .collect()
}

/// ln of Chung's phi approximation of `1 - E[tanh(L/2)]` for `L ~ N(m, 2m)`.
fn ln_phi(m: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else if m <= 10.0 {
        (-0.4527 * m.powf(0.86) + 0.0218).min(0.0)
    } else {
        0.5 * (std::f64::consts::PI / m).ln() - m / 4.0 + (1.0 - 10.0 / (7.0 * m)).ln()
    }
}

const SMALL_MEAN: f64 = 0.05;

/// Mean of the check-node output, solving `phi(m') = 1 - (1 - phi(m))^2` in
/// the log domain so that large means do not underflow.
fn ga_check(m: f64) -> f64 {
    // phi(m) ~ 1 - m/2 near zero, where the fitted curve saturates
    if m < SMALL_MEAN {
        return 0.5 * m * m;
    }
    let lp = ln_phi(m);
    let target = lp + (2.0 - lp.exp()).ln();
    if target >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, m.max(1e-12));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of every synthesized channel under Gaussian approximation.
///
/// Index bits are consumed from the most significant one: a 0 selects the
/// check-node (worse) transform, a 1 the variable-node (better) one.
pub fn ga_means(len: usize, design_snr_db: f64) -> Vec<f64> {
    let bits = len.trailing_zeros();
    let m0 = 4.0 * 10f64.powf(design_snr_db / 10.0);
    let mut level = vec![m0];
    for _ in 0..bits {
        let mut next = Vec::with_capacity(level.len() * 2);
        for &m in &level {
            next.push(ga_check(m));
            next.push(2.0 * m);
        }
        level = next;
    }
    level
}

fn order_by(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // Ascending reliability; ties put the lower index first (less reliable).
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}

/// Reliability order of a length-`len` polar code.
pub fn reliability_sequence(len: usize, method: ReliabilityMethod, design_snr_db: f64) -> Result<ReliabilityOrder> {
    check_len(len)?;
    let (values, snr) = match method {
        ReliabilityMethod::Pw => (pw_weights(len), None),
        ReliabilityMethod::Ga => (ga_means(len, design_snr_db), Some(design_snr_db)),
    };
    Ok(ReliabilityOrder {
        len,
        order: order_by(&values),
        method,
        design_snr_db: snr,
    })
}

/// Plain polar code: the `k` most reliable indices carry information.
pub fn construct_polar(len: usize, k: usize, method: ReliabilityMethod, design_snr_db: f64) -> Result<CodeSpec> {
    check_len(len)?;
    if k > len {
        return Err(Error::InvalidInfoCount { n: len, k });
    }
    let order = reliability_sequence(len, method, design_snr_db)?;
    CodeSpec::from_info_set(len, order.top(k))
}

/// Classifies a length-16 segment from its frozen local positions.
///
/// Counts 7 and 11 map to the BCH patterns regardless of positions. All
/// other fast patterns require the frozen positions to be the smallest local
/// indices (equivalently, information at the largest).
pub fn classify_segment(frozen: &[usize]) -> SegmentPattern {
    let mut mask = 0u32;
    for &p in frozen {
        assert!(p < SEGMENT_LEN, "local index {p} outside segment");
        mask |= 1 << p;
    }
    classify_frozen_mask(mask as u16)
}

/// As [`classify_segment`], from a 16-bit frozen mask (bit `p` = local index `p`).
pub fn classify_frozen_mask(frozen: u16) -> SegmentPattern {
    let k = SEGMENT_LEN - frozen.count_ones() as usize;
    let tag = PatternTag::for_segment_k(k);
    let tag = match tag {
        PatternTag::BchT1 | PatternTag::BchT2 | PatternTag::Slow => tag,
        _ if frozen == canonical_frozen_mask(k) => tag,
        _ => PatternTag::Slow,
    };
    SegmentPattern::new(tag, k)
}

/// Frozen mask with the `16 - k` smallest local indices frozen.
pub fn canonical_frozen_mask(k: usize) -> u16 {
    let frozen = SEGMENT_LEN - k;
    if frozen == SEGMENT_LEN {
        u16::MAX
    } else {
        ((1u32 << frozen) - 1) as u16
    }
}

fn segment_frozen_mask(info: &[bool], s: usize) -> u16 {
    info[s * SEGMENT_LEN..(s + 1) * SEGMENT_LEN]
        .iter()
        .enumerate()
        .fold(0u16, |m, (p, &b)| if b { m } else { m | (1 << p) })
}

/// Classification of every segment of a plain layout.
pub fn classify_segments(spec: &CodeSpec) -> Vec<SegmentPattern> {
    (0..spec.len() / SEGMENT_LEN)
        .map(|s| classify_frozen_mask(segment_frozen_mask(spec.info_mask(), s)))
        .collect()
}

fn receiving_gate(k: usize) -> bool {
    (11..16).contains(&k) || k < 3
}

/// Outcome of rate re-allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Reallocation {
    pub code: FastPolarCode,
    /// Information bits moved between segments.
    pub moves: usize,
    /// Frozen positions that ended up inactive.
    pub deactivated: usize,
}

/// Rate re-allocation over an existing plain layout.
///
/// Segments are visited in order. While a segment's information count is not
/// one of the supported counts, its least reliable information bit is frozen
/// and the most reliable *active* frozen bit of a later segment becomes
/// information, provided that segment currently holds 11..=15 or fewer than 3
/// information bits; otherwise that frozen bit is made inactive for the rest
/// of the run. Finally every non-BCH segment is reset to its canonical layout.
pub fn reallocate(spec: &CodeSpec, order: &ReliabilityOrder) -> Result<Reallocation> {
    let len = spec.len();
    if len < 2 * SEGMENT_LEN || order.len != len {
        return Err(Error::InvalidLength(len));
    }
    let rank = order.ranks();
    let segments = len / SEGMENT_LEN;
    let mut info = spec.info_mask().to_vec();
    let mut active = vec![true; len];
    let mut seg_k: Vec<usize> = (0..segments).map(|s| spec.segment_k(s)).collect();
    let mut moves = 0;
    let mut deactivated = 0;

    for t in 0..segments {
        while !PatternTag::for_segment_k(seg_k[t]).is_fast() {
            let seg = t * SEGMENT_LEN..(t + 1) * SEGMENT_LEN;
            let i = seg
                .filter(|&i| info[i])
                .min_by_key(|&i| (rank[i], i))
                .expect("slow segment has information bits");
            let j = ((t + 1) * SEGMENT_LEN..len)
                .filter(|&j| !info[j] && active[j])
                .max_by_key(|&j| (rank[j], std::cmp::Reverse(j)))
                .ok_or(Error::Infeasible {
                    segment: t,
                    k: seg_k[t],
                })?;
            let sj = j / SEGMENT_LEN;
            if receiving_gate(seg_k[sj]) {
                info[i] = false;
                info[j] = true;
                seg_k[t] -= 1;
                seg_k[sj] += 1;
                moves += 1;
            } else {
                active[j] = false;
                deactivated += 1;
            }
        }
    }

    let mut patterns = Vec::with_capacity(segments);
    for (s, &k) in seg_k.iter().enumerate() {
        let tag = PatternTag::for_segment_k(k);
        if !tag.is_bch() {
            let frozen = canonical_frozen_mask(k);
            for p in 0..SEGMENT_LEN {
                info[s * SEGMENT_LEN + p] = frozen >> p & 1 == 0;
            }
        }
        patterns.push(SegmentPattern::new(tag, k));
    }
    let code = FastPolarCode::new(CodeSpec::from_info_mask(info)?, patterns)?;
    Ok(Reallocation {
        code,
        moves,
        deactivated,
    })
}

/// Fast polar code: plain construction followed by rate re-allocation.
pub fn construct_fast_polar(
    len: usize,
    k: usize,
    method: ReliabilityMethod,
    design_snr_db: f64,
) -> Result<FastPolarCode> {
    if len < 2 * SEGMENT_LEN {
        return Err(Error::InvalidLength(len));
    }
    let order = reliability_sequence(len, method, design_snr_db)?;
    if k > len {
        return Err(Error::InvalidInfoCount { n: len, k });
    }
    let spec = CodeSpec::from_info_set(len, order.top(k))?;
    Ok(reallocate(&spec, &order)?.code)
}

/// Serialized code layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub n: usize,
    pub k: usize,
    pub method: ReliabilityMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_snr_db: Option<f64>,
    /// Whether rate re-allocation was applied.
    pub fast: bool,
    /// One tag per length-16 segment.
    pub segments: Vec<PatternTag>,
    pub info_set: Vec<usize>,
}

/// A layout read back from a document.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedLayout {
    Plain(CodeSpec),
    Fast(FastPolarCode),
}

impl LoadedLayout {
    pub fn spec(&self) -> &CodeSpec {
        match self {
            LoadedLayout::Plain(s) => s,
            LoadedLayout::Fast(c) => c.spec(),
        }
    }

    pub fn layout(&self) -> crate::code::Layout {
        match self {
            LoadedLayout::Plain(s) => s.into(),
            LoadedLayout::Fast(c) => c.into(),
        }
    }
}

impl LayoutDocument {
    pub fn from_plain(spec: &CodeSpec, method: ReliabilityMethod, design_snr_db: Option<f64>) -> Self {
        let segments = if spec.len() >= SEGMENT_LEN {
            classify_segments(spec).into_iter().map(|p| p.tag).collect()
        } else {
            Vec::new()
        };
        Self {
            n: spec.len(),
            k: spec.k(),
            method,
            design_snr_db,
            fast: false,
            segments,
            info_set: spec.info_set(),
        }
    }

    pub fn from_fast(code: &FastPolarCode, method: ReliabilityMethod, design_snr_db: Option<f64>) -> Self {
        Self {
            n: code.len(),
            k: code.k(),
            method,
            design_snr_db,
            fast: true,
            segments: code.segments().iter().map(|p| p.tag).collect(),
            info_set: code.spec().info_set(),
        }
    }

    /// Rebuilds and validates the layout.
    pub fn load(&self) -> Result<LoadedLayout> {
        let spec = CodeSpec::from_info_set(self.n, &self.info_set)?;
        if spec.k() != self.k {
            return Err(Error::InvalidLayout(format!(
                "k = {} but info_set has {} entries",
                self.k,
                spec.k()
            )));
        }
        if !self.fast {
            return Ok(LoadedLayout::Plain(spec));
        }
        let patterns = self
            .segments
            .iter()
            .enumerate()
            .map(|(s, &tag)| SegmentPattern::new(tag, spec.segment_k(s)))
            .collect();
        Ok(LoadedLayout::Fast(FastPolarCode::new(spec, patterns)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidLayout(e.to_string()))
    }
}

/// Tag counts of a segment list.
pub fn segment_histogram(segments: &[SegmentPattern]) -> BTreeMap<PatternTag, usize> {
    let mut h = BTreeMap::new();
    for s in segments {
        *h.entry(s.tag).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pw_small_orders() {
        let o = reliability_sequence(2, ReliabilityMethod::Pw, 0.0).unwrap();
        assert_eq!(o.order, vec![0, 1]);
        let w = pw_weights(4);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1], 1.0);
        assert!((w[2] - PW_BETA).abs() < 1e-12);
        assert!((w[3] - 1.0 - PW_BETA).abs() < 1e-12);
        let o = reliability_sequence(4, ReliabilityMethod::Pw, 0.0).unwrap();
        assert_eq!(o.order, vec![0, 1, 2, 3]);
        assert_eq!(o.design_snr_db, None);
    }

    #[test]
    fn ga_most_reliable_is_all_ones_index() {
        let o = reliability_sequence(32, ReliabilityMethod::Ga, 2.0).unwrap();
        assert_eq!(*o.order.last().unwrap(), 31);
        assert_eq!(o.order[0], 0);
    }

    #[test]
    fn orders_are_permutations() {
        for len in [2, 32, 256, 1024] {
            for method in [ReliabilityMethod::Ga, ReliabilityMethod::Pw] {
                let mut o = reliability_sequence(len, method, 2.0).unwrap().order;
                o.sort();
                assert_eq!(o, (0..len).collect::<Vec<_>>());
            }
        }
        assert!(reliability_sequence(48, ReliabilityMethod::Pw, 0.0).is_err());
        assert!(reliability_sequence(2048, ReliabilityMethod::Pw, 0.0).is_err());
    }

    #[test]
    fn ga_check_is_below_input() {
        for m in [0.01, 0.5, 3.0, 9.9, 10.1, 50.0, 500.0, 5000.0] {
            let c = ga_check(m);
            assert!(c > 0.0 && c < m, "m = {m}, check = {c}");
        }
    }

    #[test]
    fn construct_polar_extremes() {
        let s = construct_polar(16, 16, ReliabilityMethod::Ga, 2.0).unwrap();
        assert_eq!(s.info_set(), (0..16).collect::<Vec<_>>());
        let s = construct_polar(16, 0, ReliabilityMethod::Ga, 2.0).unwrap();
        assert!(s.info_set().is_empty());
        let s = construct_polar(1024, 896, ReliabilityMethod::Ga, 2.0).unwrap();
        assert_eq!(s.frozen_set().len(), 128);
        assert!(matches!(
            construct_polar(32, 33, ReliabilityMethod::Pw, 0.0),
            Err(Error::InvalidInfoCount { .. })
        ));
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(classify_segment(&[0, 1]), SegmentPattern::new(PatternTag::Spc2, 14));
        let f: Vec<usize> = (0..14).collect();
        assert_eq!(classify_segment(&f), SegmentPattern::new(PatternTag::Rep2, 2));
        let f: Vec<usize> = (0..12).collect();
        assert_eq!(classify_segment(&f).tag, PatternTag::Slow);
        assert_eq!(classify_segment(&[0, 2]).tag, PatternTag::Slow);
        assert_eq!(classify_segment(&[]).tag, PatternTag::Rate1);
        let f: Vec<usize> = (0..16).collect();
        assert_eq!(classify_segment(&f).tag, PatternTag::Rate0);
        // BCH counts ignore positions.
        assert_eq!(classify_segment(&[1, 3, 5, 7, 9]).tag, PatternTag::BchT1);
    }

    #[test]
    fn classifier_is_total_over_all_masks() {
        for mask in 0..=u16::MAX {
            let p = classify_frozen_mask(mask);
            let k = 16 - mask.count_ones() as usize;
            assert_eq!(p.k, k);
            let expect_slow = match k {
                4 | 5 | 6 | 8 | 9 | 10 | 12 => true,
                7 | 11 => false,
                _ => mask != canonical_frozen_mask(k),
            };
            assert_eq!(p.tag == PatternTag::Slow, expect_slow, "mask {mask:#06x}");
        }
    }

    #[test]
    fn rate_one_needs_no_moves() {
        let spec = construct_polar(32, 32, ReliabilityMethod::Pw, 0.0).unwrap();
        let order = reliability_sequence(32, ReliabilityMethod::Pw, 0.0).unwrap();
        let r = reallocate(&spec, &order).unwrap();
        assert_eq!(r.moves, 0);
        assert!(r.code.segments().iter().all(|s| s.tag == PatternTag::Rate1));
    }

    #[test]
    fn infeasible_when_last_segment_is_slow() {
        // Eight information bits in the last segment: nothing follows it.
        let mut info = vec![false; 32];
        info[24..].fill(true);
        let spec = CodeSpec::from_info_mask(info).unwrap();
        let order = reliability_sequence(32, ReliabilityMethod::Pw, 0.0).unwrap();
        assert_eq!(
            reallocate(&spec, &order).unwrap_err(),
            Error::Infeasible { segment: 1, k: 8 }
        );
    }

    #[test]
    fn layout_document_round_trip() {
        let code = construct_fast_polar(64, 40, ReliabilityMethod::Pw, 0.0).unwrap();
        let doc = LayoutDocument::from_fast(&code, ReliabilityMethod::Pw, None);
        let back = LayoutDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back.load().unwrap(), LoadedLayout::Fast(code));
        assert!(LayoutDocument::from_json("{\"n\": 32}").is_err());
    }
}
