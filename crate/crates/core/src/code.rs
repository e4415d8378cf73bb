//! Code layouts: plain polar [`CodeSpec`] and segment-annotated [`FastPolarCode`].

use serde::{Deserialize, Serialize};

use crate::bch::BchVariant;
use crate::error::{Error, Result};
use crate::pattern::{PatternTag, SegmentPattern};

/// Segment size of the fast construction.
pub const SEGMENT_LEN: usize = 16;

/// Largest supported mother code length.
pub const MAX_LEN: usize = 1024;

/// Polar code layout in the u-domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    n: u32,
    k: usize,
    info_mask: Vec<bool>,
}

impl CodeSpec {
    /// Builds a layout from a mask where `true` marks an information bit.
    pub fn from_info_mask(info_mask: Vec<bool>) -> Result<Self> {
        let len = info_mask.len();
        if !len.is_power_of_two() || !(2..=MAX_LEN).contains(&len) {
            return Err(Error::InvalidLength(len));
        }
        let k = info_mask.iter().filter(|&&b| b).count();
        Ok(Self {
            n: len.trailing_zeros(),
            k,
            info_mask,
        })
    }

    pub fn from_info_set(len: usize, info_set: &[usize]) -> Result<Self> {
        let mut mask = vec![false; len];
        for &i in info_set {
            if i >= len {
                return Err(Error::InvalidLayout(format!("index {i} outside length {len}")));
            }
            if mask[i] {
                return Err(Error::InvalidLayout(format!("duplicate index {i}")));
            }
            mask[i] = true;
        }
        Self::from_info_mask(mask)
    }

    /// log2 of the mother length.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Mother code length.
    pub fn len(&self) -> usize {
        self.info_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.info_mask.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.info_mask[i]
    }

    pub fn info_mask(&self) -> &[bool] {
        &self.info_mask
    }

    /// Information positions in ascending order.
    pub fn info_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.info_mask[i]).collect()
    }

    /// Frozen positions in ascending order.
    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.info_mask[i]).collect()
    }

    /// Information count of segment `s` (length [`SEGMENT_LEN`]).
    pub fn segment_k(&self, s: usize) -> usize {
        self.info_mask[s * SEGMENT_LEN..(s + 1) * SEGMENT_LEN]
            .iter()
            .filter(|&&b| b)
            .count()
    }
}

/// A polar code whose every length-16 segment matches a fast pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FastPolarCode {
    spec: CodeSpec,
    segments: Vec<SegmentPattern>,
}

impl FastPolarCode {
    /// Validates that segments tile the code, none is slow and the counts agree.
    pub fn new(spec: CodeSpec, segments: Vec<SegmentPattern>) -> Result<Self> {
        if spec.len() < 2 * SEGMENT_LEN {
            return Err(Error::InvalidLength(spec.len()));
        }
        if segments.len() != spec.len() / SEGMENT_LEN {
            return Err(Error::InvalidLayout(format!(
                "{} segment descriptors for length {}",
                segments.len(),
                spec.len()
            )));
        }
        for (s, seg) in segments.iter().enumerate() {
            if !seg.tag.is_fast() {
                return Err(Error::InvalidLayout(format!("segment {s} is slow")));
            }
            if seg.tag.segment_k() != Some(seg.k) || spec.segment_k(s) != seg.k {
                return Err(Error::InvalidLayout(format!(
                    "segment {s}: tag {} inconsistent with {} information bits",
                    seg.tag,
                    spec.segment_k(s)
                )));
            }
        }
        Ok(Self { spec, segments })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn segments(&self) -> &[SegmentPattern] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty()
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    /// BCH marker of segment `s`, if it is grafted.
    pub fn bch_variant(&self, s: usize) -> Option<BchVariant> {
        BchVariant::from_tag(self.segments[s].tag)
    }

    /// Segment indices and variants of all BCH segments.
    pub fn bch_segments(&self) -> Vec<(usize, BchVariant)> {
        (0..self.segments.len())
            .filter_map(|s| self.bch_variant(s).map(|v| (s, v)))
            .collect()
    }

    /// Count of segments per tag.
    pub fn histogram(&self) -> std::collections::BTreeMap<PatternTag, usize> {
        let mut h = std::collections::BTreeMap::new();
        for seg in &self.segments {
            *h.entry(seg.tag).or_insert(0) += 1;
        }
        h
    }

    pub fn layout(&self) -> Layout {
        Layout {
            spec: self.spec.clone(),
            bch: (0..self.segments.len()).map(|s| self.bch_variant(s)).collect(),
        }
    }
}

/// Decoder-facing view of a code: the u-domain mask plus BCH segment markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    spec: CodeSpec,
    /// One entry per length-16 segment; empty when the code is shorter.
    bch: Vec<Option<BchVariant>>,
}

impl Layout {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty()
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn bch_variant(&self, segment: usize) -> Option<BchVariant> {
        self.bch.get(segment).copied().flatten()
    }

    pub fn has_bch(&self) -> bool {
        self.bch.iter().any(Option::is_some)
    }

    /// Whether any segment overlapping `[offset, offset + size)` is grafted.
    pub fn range_has_bch(&self, offset: usize, size: usize) -> bool {
        if self.bch.is_empty() {
            return false;
        }
        let first = offset / SEGMENT_LEN;
        let last = (offset + size).div_ceil(SEGMENT_LEN);
        self.bch[first..last.min(self.bch.len())].iter().any(Option::is_some)
    }
}

impl From<&CodeSpec> for Layout {
    fn from(spec: &CodeSpec) -> Self {
        Layout {
            spec: spec.clone(),
            bch: Vec::new(),
        }
    }
}

impl From<CodeSpec> for Layout {
    fn from(spec: CodeSpec) -> Self {
        Layout { spec, bch: Vec::new() }
    }
}

impl From<&FastPolarCode> for Layout {
    fn from(code: &FastPolarCode) -> Self {
        code.layout()
    }
}
