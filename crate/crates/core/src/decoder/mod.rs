//! Pattern-based fast successive-cancellation decoding.
//!
//! A [`Plan`] is the pruned decoding tree of a layout: the traversal stops at
//! every node whose frozen layout matches an enabled pattern within its size
//! limit. The plan is built once per layout and reused for every frame; its
//! shape alone determines the [`TraversalStats`].

pub mod arith;
pub mod nodes;
pub mod parallel_min;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bch::{bch_message, bch_node_decode, BchVariant};
use crate::code::{Layout, SEGMENT_LEN};
use crate::encoder::polar_transform_in_place;
use crate::error::{Error, Result};
use crate::pattern::PatternTag;

pub use arith::{Arithmetic, Fixed, Float};
pub use nodes::{decode_pcr, decode_rep2, decode_rpc, decode_spc, decode_spc2};
pub use parallel_min::parallel_min_mask;

/// Largest node size at which each pattern may terminate the traversal;
/// 0 disables a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispatchPolicy {
    pub rate0: usize,
    pub rate1: usize,
    pub rep: usize,
    pub spc: usize,
    pub spc2: usize,
    pub rep2: usize,
    pub rpc: usize,
    pub pcr: usize,
    pub bch: bool,
}

impl DispatchPolicy {
    /// Degrees of parallelism of the reference hardware: SPC and SPC-2 up to
    /// 128, Rate-1 up to 256, the remaining patterns up to 16. Rate-0 nodes
    /// are skipped outright and so have no limit.
    pub const fn hardware() -> Self {
        Self {
            rate0: usize::MAX,
            rate1: 256,
            rep: 16,
            spc: 128,
            spc2: 128,
            rep2: 16,
            rpc: 16,
            pcr: 16,
            bch: true,
        }
    }

    /// Rate-0, Rate-1, REP and SPC at any size. These node decoders give the
    /// same decisions as bit-by-bit SC with min-sum arithmetic.
    pub const fn classic() -> Self {
        Self {
            rate0: usize::MAX,
            rate1: usize::MAX,
            rep: usize::MAX,
            spc: usize::MAX,
            spc2: 0,
            rep2: 0,
            rpc: 0,
            pcr: 0,
            bch: false,
        }
    }

    /// Leaves only: plain successive cancellation.
    pub const fn leaves_only() -> Self {
        Self {
            rate0: 1,
            rate1: 1,
            rep: 0,
            spc: 0,
            spc2: 0,
            rep2: 0,
            rpc: 0,
            pcr: 0,
            bch: false,
        }
    }
}

impl Default for DispatchPolicy {
    fn default() -> Self {
        Self::hardware()
    }
}

/// Pattern matched by a node of `size` leaves with the given information mask.
///
/// Precedence: Rate-0, Rate-1, REP, SPC, SPC-2, REP-2, RPC, PCR.
pub fn match_pattern(info: &[bool], policy: &DispatchPolicy) -> Option<PatternTag> {
    let size = info.len();
    let k = info.iter().filter(|&&b| b).count();
    // Information exactly at the `k` largest indices.
    let top = |k: usize| k <= size && info[..size - k].iter().all(|&b| !b) && info[size - k..].iter().all(|&b| b);
    let ok = |limit: usize, min: usize| size >= min && size <= limit;

    if k == 0 && ok(policy.rate0, 1) {
        return Some(PatternTag::Rate0);
    }
    if k == size && ok(policy.rate1, 1) {
        return Some(PatternTag::Rate1);
    }
    if k == 1 && top(1) && ok(policy.rep, 2) {
        return Some(PatternTag::Rep);
    }
    if k + 1 == size && top(k) && ok(policy.spc, 2) {
        return Some(PatternTag::Spc);
    }
    if k + 2 == size && top(k) && ok(policy.spc2, 4) {
        return Some(PatternTag::Spc2);
    }
    if k == 2 && top(2) && ok(policy.rep2, 4) {
        return Some(PatternTag::Rep2);
    }
    if k + 3 == size && top(k) && ok(policy.rpc, 4) {
        return Some(PatternTag::Rpc);
    }
    if k == 3 && top(3) && ok(policy.pcr, 4) {
        return Some(PatternTag::Pcr);
    }
    None
}

/// Counters of one pruned traversal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalStats {
    /// Pattern-matched nodes where the traversal stops.
    pub terminal_nodes: usize,
    /// All visited nodes, internal ones included.
    pub visited_nodes: usize,
    /// Parent-to-child edges entered, each counted once.
    pub edges: usize,
    /// Edges counted in both directions (down and back up).
    pub directed_edges: usize,
    /// Scalar f and g evaluations.
    pub f_ops: usize,
    /// Terminal nodes per pattern.
    pub histogram: BTreeMap<PatternTag, usize>,
}

impl TraversalStats {
    pub fn count(&self, tag: PatternTag) -> usize {
        self.histogram.get(&tag).copied().unwrap_or(0)
    }
}

/// One node of the pruned tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanNode {
    Internal {
        offset: usize,
        stage: u32,
        left: usize,
        right: usize,
    },
    Terminal {
        offset: usize,
        stage: u32,
        tag: PatternTag,
    },
}

impl PlanNode {
    pub fn offset(&self) -> usize {
        match *self {
            PlanNode::Internal { offset, .. } | PlanNode::Terminal { offset, .. } => offset,
        }
    }

    pub fn stage(&self) -> u32 {
        match *self {
            PlanNode::Internal { stage, .. } | PlanNode::Terminal { stage, .. } => stage,
        }
    }

    pub fn size(&self) -> usize {
        1 << self.stage()
    }
}

/// The pruned decoding tree of a layout; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    nodes: Vec<PlanNode>,
}

impl Plan {
    pub fn build(layout: &Layout, policy: &DispatchPolicy) -> Self {
        let mut nodes = Vec::new();
        Self::visit(layout, policy, 0, layout.len().trailing_zeros(), &mut nodes);
        Plan { nodes }
    }

    fn visit(layout: &Layout, policy: &DispatchPolicy, offset: usize, stage: u32, nodes: &mut Vec<PlanNode>) -> usize {
        let size = 1usize << stage;
        let id = nodes.len();
        let tag = if layout.range_has_bch(offset, size) {
            (policy.bch && size == SEGMENT_LEN)
                .then(|| layout.bch_variant(offset / SEGMENT_LEN))
                .flatten()
                .map(BchVariant::tag)
        } else {
            match_pattern(&layout.spec().info_mask()[offset..offset + size], policy)
        };
        match tag {
            Some(tag) => nodes.push(PlanNode::Terminal { offset, stage, tag }),
            None => {
                assert!(stage > 0, "leaf without pattern");
                nodes.push(PlanNode::Internal {
                    offset,
                    stage,
                    left: 0,
                    right: 0,
                });
                let left = Self::visit(layout, policy, offset, stage - 1, nodes);
                let right = Self::visit(layout, policy, offset + size / 2, stage - 1, nodes);
                nodes[id] = PlanNode::Internal {
                    offset,
                    stage,
                    left,
                    right,
                };
            }
        }
        id
    }

    pub fn nodes(&self) -> &[PlanNode] {
        &self.nodes
    }

    pub fn root(&self) -> &PlanNode {
        &self.nodes[0]
    }

    pub fn stats(&self) -> TraversalStats {
        let mut s = TraversalStats::default();
        for node in &self.nodes {
            s.visited_nodes += 1;
            match *node {
                PlanNode::Internal { stage, .. } => {
                    s.edges += 2;
                    s.f_ops += 1 << stage;
                }
                PlanNode::Terminal { tag, .. } => {
                    s.terminal_nodes += 1;
                    *s.histogram.entry(tag).or_insert(0) += 1;
                }
            }
        }
        s.directed_edges = 2 * s.edges;
        s
    }
}

/// Output of one decoded frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub info_bits: Vec<u8>,
    pub codeword_estimate: Vec<u8>,
    pub stats: TraversalStats,
}

/// Reusable fast SC decoder for one layout.
///
/// Holds per-frame scratch buffers, so one instance decodes one frame at a
/// time; run separate instances for concurrent frames.
#[derive(Debug, Clone)]
pub struct FastScDecoder<A: Arithmetic> {
    arith: A,
    layout: Layout,
    plan: Plan,
    stats: TraversalStats,
    /// `llr[s]` holds the soft inputs of the current node at stage `s`.
    llr: Vec<Vec<A::Llr>>,
    /// Partial sums, in place by leaf offset.
    beta: Vec<u8>,
    u: Vec<u8>,
}

impl<A: Arithmetic> FastScDecoder<A> {
    pub fn new(layout: impl Into<Layout>, arith: A) -> Self {
        Self::with_policy(layout, arith, DispatchPolicy::default())
    }

    pub fn with_policy(layout: impl Into<Layout>, arith: A, policy: DispatchPolicy) -> Self {
        let layout = layout.into();
        let plan = Plan::build(&layout, &policy);
        let stats = plan.stats();
        let stages = layout.len().trailing_zeros() as usize;
        let llr = (0..=stages).map(|s| vec![A::Llr::default(); 1 << s]).collect();
        let len = layout.len();
        Self {
            arith,
            layout,
            plan,
            stats,
            llr,
            beta: vec![0; len],
            u: vec![0; len],
        }
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    pub fn stats(&self) -> &TraversalStats {
        &self.stats
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Decodes one frame and writes the K information bits to `info`.
    pub fn decode_into(&mut self, alpha: &[A::Llr], info: &mut Vec<u8>) -> Result<()> {
        let len = self.layout.len();
        if alpha.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: alpha.len(),
            });
        }
        let top = self.llr.len() - 1;
        self.llr[top].copy_from_slice(alpha);
        self.run(0);
        self.extract(info);
        Ok(())
    }

    /// Decodes one frame.
    pub fn decode(&mut self, alpha: &[A::Llr]) -> Result<DecodeResult> {
        let mut info = Vec::with_capacity(self.layout.k());
        self.decode_into(alpha, &mut info)?;
        Ok(DecodeResult {
            info_bits: info,
            codeword_estimate: self.beta.clone(),
            stats: self.stats.clone(),
        })
    }

    fn run(&mut self, id: usize) {
        match self.plan.nodes[id] {
            PlanNode::Terminal { offset, stage, tag } => {
                let size = 1usize << stage;
                let alpha = &self.llr[stage as usize][..size];
                let out = &mut self.beta[offset..offset + size];
                let a = &self.arith;
                match tag {
                    PatternTag::Rate0 => nodes::rate0_into(out),
                    PatternTag::Rate1 => nodes::rate1_into(a, alpha, out),
                    PatternTag::Rep => nodes::rep_into(a, alpha, out),
                    PatternTag::Spc => nodes::spc_into(a, alpha, out),
                    PatternTag::Spc2 => nodes::spc2_into(a, alpha, out),
                    PatternTag::Rep2 => nodes::rep2_into(a, alpha, out),
                    PatternTag::Rpc => nodes::rpc_into(a, alpha, out),
                    PatternTag::Pcr => nodes::pcr_into(a, alpha, out),
                    PatternTag::BchT1 | PatternTag::BchT2 => {
                        let variant = BchVariant::from_tag(tag).expect("bch tag");
                        out.copy_from_slice(&bch_node_decode(a, alpha, variant));
                    }
                    PatternTag::Slow => unreachable!("slow nodes are never terminal"),
                }
            }
            PlanNode::Internal {
                offset,
                stage,
                left,
                right,
            } => {
                let s = stage as usize;
                let half = 1usize << (s - 1);
                {
                    let (lower, upper) = self.llr.split_at_mut(s);
                    let parent = &upper[0];
                    let child = &mut lower[s - 1];
                    for i in 0..half {
                        child[i] = self.arith.f(parent[i], parent[i + half]);
                    }
                }
                self.run(left);
                {
                    let (lower, upper) = self.llr.split_at_mut(s);
                    let parent = &upper[0];
                    let child = &mut lower[s - 1];
                    let bits = &self.beta[offset..offset + half];
                    for i in 0..half {
                        child[i] = self.arith.g(parent[i], parent[i + half], bits[i]);
                    }
                }
                self.run(right);
                let (l, r) = self.beta[offset..offset + 2 * half].split_at_mut(half);
                for (a, b) in l.iter_mut().zip(r.iter()) {
                    *a ^= *b;
                }
            }
        }
    }

    fn extract(&mut self, info: &mut Vec<u8>) {
        info.clear();
        self.u.copy_from_slice(&self.beta);
        polar_transform_in_place(&mut self.u);
        let spec = self.layout.spec();
        let mut i = 0;
        while i < spec.len() {
            if let Some(variant) = self.layout.bch_variant(i / SEGMENT_LEN) {
                let mut x = [0u8; SEGMENT_LEN];
                x.copy_from_slice(&self.u[i..i + SEGMENT_LEN]);
                polar_transform_in_place(&mut x);
                info.extend(bch_message(&x, variant));
                i += SEGMENT_LEN;
            } else {
                if spec.is_info(i) {
                    info.push(self.u[i]);
                }
                i += 1;
            }
        }
    }
}

/// One-shot convenience wrapper around [`FastScDecoder`].
pub fn fast_sc_decode<A: Arithmetic>(layout: impl Into<Layout>, alpha: &[A::Llr], arith: A) -> Result<DecodeResult> {
    FastScDecoder::new(layout, arith).decode(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;

    fn mask(size: usize, info: &[usize]) -> Vec<bool> {
        let mut m = vec![false; size];
        for &i in info {
            m[i] = true;
        }
        m
    }

    #[test]
    fn pattern_precedence_and_limits() {
        let p = DispatchPolicy::hardware();
        assert_eq!(match_pattern(&mask(4, &[]), &p), Some(PatternTag::Rate0));
        assert_eq!(match_pattern(&mask(4, &[3]), &p), Some(PatternTag::Rep));
        assert_eq!(match_pattern(&mask(4, &[1, 2, 3]), &p), Some(PatternTag::Spc));
        // {2,3} is both SPC-2 and REP-2 at size 4; SPC-2 wins.
        assert_eq!(match_pattern(&mask(4, &[2, 3]), &p), Some(PatternTag::Spc2));
        assert_eq!(match_pattern(&mask(8, &[6, 7]), &p), Some(PatternTag::Rep2));
        assert_eq!(match_pattern(&mask(8, &[3, 4, 5, 6, 7]), &p), Some(PatternTag::Rpc));
        assert_eq!(match_pattern(&mask(8, &[5, 6, 7]), &p), Some(PatternTag::Pcr));
        assert_eq!(match_pattern(&mask(8, &[4, 5, 6, 7]), &p), None);
        // Rate-1 stops at 256, REP at 16.
        assert_eq!(match_pattern(&vec![true; 512], &p), None);
        assert_eq!(match_pattern(&vec![true; 256], &p), Some(PatternTag::Rate1));
        assert_eq!(match_pattern(&mask(32, &[31]), &p), None);
        assert_eq!(match_pattern(&vec![false; 1024], &p), Some(PatternTag::Rate0));
    }

    #[test]
    fn rate_one_root_is_fully_pruned() {
        let spec = CodeSpec::from_info_mask(vec![true; 32]).unwrap();
        let stats = Plan::build(&Layout::from(&spec), &DispatchPolicy::hardware()).stats();
        assert_eq!(stats.terminal_nodes, 1);
        assert_eq!(stats.edges, 0);
        assert_eq!(stats.f_ops, 0);
        assert_eq!(stats.count(PatternTag::Rate1), 1);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let spec = CodeSpec::from_info_mask(vec![true; 32]).unwrap();
        let mut dec = FastScDecoder::new(&spec, Float);
        assert!(matches!(
            dec.decode(&[1.0; 31]),
            Err(Error::LengthMismatch {
                expected: 32,
                actual: 31
            })
        ));
    }

    #[test]
    fn n2_rate_one_baseline() {
        let spec = CodeSpec::from_info_mask(vec![true, true]).unwrap();
        let r = fast_sc_decode(&spec, &[5.0, 5.0], Float).unwrap();
        assert_eq!(r.info_bits, vec![0, 0]);
    }
}
