//! Static traversal-cost accounting and pruned-tree export.

use serde::{Deserialize, Serialize};

use crate::code::Layout;
use crate::decoder::{DispatchPolicy, Plan, PlanNode, TraversalStats};
use crate::pattern::PatternTag;

/// Runs the decoder's dispatch symbolically and returns its counters.
pub fn traversal_stats(layout: &Layout, policy: &DispatchPolicy) -> TraversalStats {
    Plan::build(layout, policy).stats()
}

/// Node of an exported pruned tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub stage: u32,
    /// First leaf index covered by the node.
    pub offset: usize,
    pub size: usize,
    /// Matched pattern, absent for internal nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<PatternTag>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    /// Terminal nodes in left-to-right order.
    pub fn leaves(&self) -> Vec<&TreeNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(TreeNode::leaves).collect()
        }
    }
}

/// Hierarchical view of the pruned tree.
pub fn export_pruned_tree(layout: &Layout, policy: &DispatchPolicy) -> TreeNode {
    let plan = Plan::build(layout, policy);
    build_tree(&plan, 0)
}

fn build_tree(plan: &Plan, id: usize) -> TreeNode {
    let node = plan.nodes()[id];
    let (tag, children) = match node {
        PlanNode::Terminal { tag, .. } => (Some(tag), Vec::new()),
        PlanNode::Internal { left, right, .. } => (None, vec![build_tree(plan, left), build_tree(plan, right)]),
    };
    TreeNode {
        stage: node.stage(),
        offset: node.offset(),
        size: node.size(),
        tag,
        children,
    }
}

/// Column names of [`stats_csv_row`].
pub const STATS_CSV_HEADER: &str = "label,terminal_nodes,visited_nodes,edges,directed_edges,f_ops";

pub fn stats_csv_row(label: &str, s: &TraversalStats) -> String {
    format!(
        "{label},{},{},{},{},{}",
        s.terminal_nodes, s.visited_nodes, s.edges, s.directed_edges, s.f_ops
    )
}

/// Relative reductions (fractions) of a layout against a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub nodes: f64,
    pub edges: f64,
    pub f_ops: f64,
}

pub fn reduction(baseline: &TraversalStats, candidate: &TraversalStats) -> Reduction {
    let r = |b: usize, c: usize| if b == 0 { 0.0 } else { 1.0 - c as f64 / b as f64 };
    Reduction {
        nodes: r(baseline.terminal_nodes, candidate.terminal_nodes),
        edges: r(baseline.edges, candidate.edges),
        f_ops: r(baseline.f_ops, candidate.f_ops),
    }
}
