//! Segment and node pattern taxonomy.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Decodable node patterns, plus `Slow` for layouts that match none.
///
/// The declaration order doubles as the information-count order of the ten
/// fast patterns for a length-16 segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternTag {
    Rate0,
    Rep,
    Rep2,
    Pcr,
    BchT2,
    BchT1,
    Rpc,
    Spc2,
    Spc,
    Rate1,
    Slow,
}

impl PatternTag {
    /// The ten fast tags, in increasing information count.
    pub const FAST: [PatternTag; 10] = [
        PatternTag::Rate0,
        PatternTag::Rep,
        PatternTag::Rep2,
        PatternTag::Pcr,
        PatternTag::BchT2,
        PatternTag::BchT1,
        PatternTag::Rpc,
        PatternTag::Spc2,
        PatternTag::Spc,
        PatternTag::Rate1,
    ];

    /// Information bits carried by a length-16 segment of this pattern.
    pub fn segment_k(self) -> Option<usize> {
        Some(match self {
            PatternTag::Rate0 => 0,
            PatternTag::Rep => 1,
            PatternTag::Rep2 => 2,
            PatternTag::Pcr => 3,
            PatternTag::BchT2 => 7,
            PatternTag::BchT1 => 11,
            PatternTag::Rpc => 13,
            PatternTag::Spc2 => 14,
            PatternTag::Spc => 15,
            PatternTag::Rate1 => 16,
            PatternTag::Slow => return None,
        })
    }

    /// Inverse of [`segment_k`](Self::segment_k); `Slow` for unsupported counts.
    pub fn for_segment_k(k: usize) -> PatternTag {
        Self::FAST
            .into_iter()
            .find(|t| t.segment_k() == Some(k))
            .unwrap_or(PatternTag::Slow)
    }

    pub fn is_fast(self) -> bool {
        self != PatternTag::Slow
    }

    pub fn is_bch(self) -> bool {
        matches!(self, PatternTag::BchT1 | PatternTag::BchT2)
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternTag::Rate0 => "Rate-0",
            PatternTag::Rep => "REP",
            PatternTag::Rep2 => "REP-2",
            PatternTag::Pcr => "PCR",
            PatternTag::BchT2 => "BCH t=2",
            PatternTag::BchT1 => "BCH t=1",
            PatternTag::Rpc => "RPC",
            PatternTag::Spc2 => "SPC-2",
            PatternTag::Spc => "SPC",
            PatternTag::Rate1 => "Rate-1",
            PatternTag::Slow => "slow",
        }
    }
}

impl fmt::Display for PatternTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pattern of one length-16 segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentPattern {
    pub tag: PatternTag,
    /// Information bits in the segment.
    pub k: usize,
}

impl SegmentPattern {
    pub fn new(tag: PatternTag, k: usize) -> Self {
        Self { tag, k }
    }
}
