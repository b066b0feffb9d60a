//! Fanin-limited homogeneous pattern reduction.
//!
//! Each pass walks the fanin cone of every PO (shallowest PO first) in
//! topological order. An active node whose fanin size reaches the limit is
//! preserved; otherwise it is removed when all of its fanouts share one
//! effective status, and its fanins are wired to its fanouts. Passes repeat
//! until one removes nothing.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::depgraph::{DepGraph, DepGraphError, InverterMode, NodeStatus, SkeletonGraph};
use crate::netcore::{BooleanNetwork, Diagnostic, NodeId};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("node {0} has no fanouts; only primary outputs may be sinks")]
    Dangling(NodeId),
    #[error("node {0} is dead")]
    DeadNode(NodeId),
    #[error("node {node} cannot be reduced: {reason}")]
    Precondition { node: NodeId, reason: &'static str },
    #[error("invalid network: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetwork(Vec<Diagnostic>),
    #[error(transparent)]
    Graph(#[from] DepGraphError),
}

/// Fanin size at which an active node is preserved outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaninLimit {
    Bounded(NonZeroUsize),
    Unlimited,
}

impl FaninLimit {
    pub fn bounded(k: usize) -> Option<Self> {
        NonZeroUsize::new(k).map(FaninLimit::Bounded)
    }

    pub fn preserves(self, fanin_size: usize) -> bool {
        match self {
            FaninLimit::Bounded(k) => fanin_size >= k.get(),
            FaninLimit::Unlimited => false,
        }
    }
}

impl fmt::Display for FaninLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaninLimit::Bounded(k) => write!(f, "{k}"),
            FaninLimit::Unlimited => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fanin limit must be a positive integer or `inf`, got `{0}`")]
pub struct BadFaninLimit(pub String);

impl FromStr for FaninLimit {
    type Err = BadFaninLimit;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "unlimited" | "∞" => Ok(FaninLimit::Unlimited),
            t => t
                .parse::<usize>()
                .ok()
                .and_then(FaninLimit::bounded)
                .ok_or_else(|| BadFaninLimit(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionConfig {
    pub k: FaninLimit,
    /// Visit fanins in ascending id order. When false, descending order is used,
    /// which is an equally valid topological traversal.
    pub deterministic_order: bool,
    pub inverters: InverterMode,
}

impl ReductionConfig {
    pub fn new(k: FaninLimit) -> Self {
        ReductionConfig { k, deterministic_order: true, inverters: InverterMode::default() }
    }

    pub fn with_k(k: usize) -> Self {
        Self::new(FaninLimit::bounded(k).expect("k >= 1"))
    }

    pub fn unlimited() -> Self {
        Self::new(FaninLimit::Unlimited)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionReport {
    pub iterations: usize,
    pub reduced_per_iteration: Vec<usize>,
    pub preserved_by_fanin_limit: usize,
    pub final_node_count: usize,
    pub final_edge_count: usize,
    /// Dangling internal nodes removed before reduction. Not part of the JSON document.
    #[serde(skip)]
    pub pruned_dangling: usize,
}

impl ReductionReport {
    pub fn total_reduced(&self) -> usize {
        self.reduced_per_iteration.iter().sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternClass {
    Homogeneous,
    Heterogeneous,
}

/// A node with its direct fanins and fanouts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub center: NodeId,
    pub fanins: Vec<NodeId>,
    pub fanouts: Vec<NodeId>,
}

impl Pattern {
    pub fn at(g: &DepGraph, v: NodeId) -> Self {
        Pattern { center: v, fanins: g.fanins(v).to_vec(), fanouts: g.fanouts(v).to_vec() }
    }

    /// Keep and Preserved count as one class, opposed to Active.
    pub fn classify(&self, g: &DepGraph) -> Result<PatternClass, ReductionError> {
        let mut classes = self.fanouts.iter().map(|&w| g.status(w).is_retained());
        let first = classes.next().ok_or(ReductionError::Dangling(self.center))?;
        if classes.all(|c| c == first) {
            Ok(PatternClass::Homogeneous)
        } else {
            Ok(PatternClass::Heterogeneous)
        }
    }
}

pub fn classify_pattern(g: &DepGraph, v: NodeId) -> Result<PatternClass, ReductionError> {
    if !g.is_live(v) {
        return Err(ReductionError::DeadNode(v));
    }
    Pattern::at(g, v).classify(g)
}

/// Removes an active homogeneous node and bridges its fanins to its fanouts.
///
/// A fanout `vo` receives bridge edges only when none of its other fanins is
/// reachable from `v`; otherwise `vo` is still reached through that fanin.
pub fn pattern_reduce(g: &mut DepGraph, v: NodeId) -> Result<(), ReductionError> {
    if g.status(v) != NodeStatus::Active {
        return Err(ReductionError::Precondition { node: v, reason: "node is not active" });
    }
    let pattern = Pattern::at(g, v);
    if pattern.classify(g)? != PatternClass::Homogeneous {
        return Err(ReductionError::Precondition { node: v, reason: "pattern is heterogeneous" });
    }

    let mut bridges = Vec::new();
    for &vo in &pattern.fanouts {
        let covered = g.fanins(vo).iter().any(|&f| f != v && g.reaches(v, f));
        if covered {
            continue;
        }
        for &vi in &pattern.fanins {
            if !g.has_edge(vi, vo) {
                bridges.push((vi, vo));
            }
        }
    }

    g.set_status(v, NodeStatus::Dead)?;
    for (vi, vo) in bridges {
        g.add_edge(vi, vo);
        debug_assert!(g.reaches(vi, vo));
    }
    Ok(())
}

/// Returns 1 when `v` was removed. Active nodes that do not match are preserved.
pub fn try_reduce(g: &mut DepGraph, v: NodeId) -> usize {
    if g.status(v) != NodeStatus::Active {
        return 0;
    }
    match classify_pattern(g, v) {
        Ok(PatternClass::Homogeneous) => {
            pattern_reduce(g, v).expect("preconditions checked");
            1
        }
        Ok(PatternClass::Heterogeneous) | Err(_) => {
            g.set_status(v, NodeStatus::Preserved).expect("active -> preserved is legal");
            0
        }
    }
}

/// Fanin cone of `root` in DFS post-order (sources first), skipping nodes
/// already claimed in this pass.
fn fanin_cone(g: &DepGraph, root: NodeId, claimed: &mut [bool], ascending: bool) -> Vec<NodeId> {
    let mut order = Vec::new();
    if claimed[root] {
        return order;
    }
    claimed[root] = true;
    let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        let fanins = g.fanins(v);
        if next < fanins.len() {
            top.1 += 1;
            let u = if ascending { fanins[next] } else { fanins[fanins.len() - 1 - next] };
            if !claimed[u] {
                claimed[u] = true;
                stack.push((u, 0));
            }
        } else {
            order.push(v);
            stack.pop();
        }
    }
    order
}

/// Recovers the dependency graph, levelizes it, assigns initial statuses and
/// prunes dangling gates. Returns the graph and the pruned ids.
pub fn prepare(net: &BooleanNetwork, mode: InverterMode) -> (DepGraph, Vec<NodeId>) {
    let mut g = DepGraph::recover_with(net, mode);
    g.levelize();
    g.init_status();
    let pruned = g.prune_dangling();
    if !pruned.is_empty() {
        log::warn!("{} dangling internal node(s) marked dead before reduction", pruned.len());
        g.levelize();
    }
    (g, pruned)
}

/// Runs reduction passes on a prepared graph until a pass removes nothing.
pub fn reduce_to_fixpoint(g: &mut DepGraph, cfg: &ReductionConfig) -> ReductionReport {
    let mut pos = g.pos().to_vec();
    if cfg.deterministic_order {
        pos.sort_by_key(|&p| (g.level(p), p));
    } else {
        pos.sort_by_key(|&p| g.level(p));
    }

    let mut report = ReductionReport::default();
    loop {
        let mut count = 0;
        let mut claimed = vec![false; g.len()];
        for &po in &pos {
            for v in fanin_cone(g, po, &mut claimed, cfg.deterministic_order) {
                if g.status(v) == NodeStatus::Active && cfg.k.preserves(g.fanin_size(v)) {
                    g.set_status(v, NodeStatus::Preserved).expect("active -> preserved is legal");
                    report.preserved_by_fanin_limit += 1;
                    continue;
                }
                count += try_reduce(g, v);
            }
        }
        report.iterations += 1;
        report.reduced_per_iteration.push(count);
        log::debug!("pass {}: {count} node(s) reduced", report.iterations);
        if count == 0 {
            break;
        }
    }
    g.levelize();
    report
}

/// Everything produced by one skeletonization run.
#[derive(Debug, Clone)]
pub struct Skeletonization {
    /// The prepared dependency graph before any reduction.
    pub initial: DepGraph,
    /// The same graph at the fixpoint.
    pub reduced: DepGraph,
    pub skeleton: SkeletonGraph,
    pub report: ReductionReport,
    pub pruned: Vec<NodeId>,
}

pub fn run(net: &BooleanNetwork, cfg: &ReductionConfig) -> Result<Skeletonization, ReductionError> {
    let diags = net.validate();
    if !diags.is_empty() {
        return Err(ReductionError::InvalidNetwork(diags));
    }
    let (initial, pruned) = prepare(net, cfg.inverters);
    let mut reduced = initial.clone();
    let mut report = reduce_to_fixpoint(&mut reduced, cfg);
    let skeleton = reduced.collect_skeleton()?;
    report.final_node_count = skeleton.len();
    report.final_edge_count = skeleton.edge_count();
    report.pruned_dangling = pruned.len();
    Ok(Skeletonization { initial, reduced, skeleton, report, pruned })
}

pub fn skeletonize(net: &BooleanNetwork, cfg: &ReductionConfig) -> Result<(SkeletonGraph, ReductionReport), ReductionError> {
    run(net, cfg).map(|s| (s.skeleton, s.report))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub iterations: usize,
    pub reduced: usize,
    pub preserved_by_fanin_limit: usize,
    pub final_node_count: usize,
    pub final_edge_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BatchSummary {
    pub designs: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub total_reduced: usize,
    pub total_preserved_by_fanin_limit: usize,
    pub rows: Vec<SummaryRow>,
}

pub fn reduce_fixpoint_stats(reports: &[ReductionReport]) -> BatchSummary {
    let rows: Vec<SummaryRow> = reports
        .iter()
        .map(|r| SummaryRow {
            iterations: r.iterations,
            reduced: r.total_reduced(),
            preserved_by_fanin_limit: r.preserved_by_fanin_limit,
            final_node_count: r.final_node_count,
            final_edge_count: r.final_edge_count,
        })
        .collect();
    BatchSummary {
        designs: rows.len(),
        total_iterations: rows.iter().map(|r| r.iterations).sum(),
        max_iterations: rows.iter().map(|r| r.iterations).max().unwrap_or(0),
        total_reduced: rows.iter().map(|r| r.reduced).sum(),
        total_preserved_by_fanin_limit: rows.iter().map(|r| r.preserved_by_fanin_limit).sum(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Fanin, GateKind, NetworkBuilder};

    fn single_and() -> BooleanNetwork {
        let mut b = NetworkBuilder::new();
        let x = b.pi("x");
        let y = b.pi("y");
        let g = b.and(Fanin::plain(x), Fanin::plain(y));
        b.po("o", Fanin::plain(g));
        b.build().unwrap()
    }

    fn prepared(net: &BooleanNetwork) -> DepGraph {
        prepare(net, InverterMode::PerEdge).0
    }

    #[test]
    fn fanin_limit_parsing() {
        assert_eq!("inf".parse::<FaninLimit>().unwrap(), FaninLimit::Unlimited);
        assert_eq!("4".parse::<FaninLimit>().unwrap(), FaninLimit::bounded(4).unwrap());
        assert!("0".parse::<FaninLimit>().is_err());
        assert!("-1".parse::<FaninLimit>().is_err());
        assert!(FaninLimit::bounded(2).unwrap().preserves(2));
        assert!(!FaninLimit::bounded(3).unwrap().preserves(2));
    }

    /// a -> v -> b as PI -> BUF -> PO.
    fn chain() -> DepGraph {
        let mut b = NetworkBuilder::new();
        let a = b.pi("a");
        let v = b.gate(GateKind::Buf, &[Fanin::plain(a)]);
        b.po("b", Fanin::plain(v));
        prepared(&b.build().unwrap())
    }

    #[test]
    fn minimal_chain_reduction() {
        let mut g = chain();
        assert_eq!(classify_pattern(&g, 1).unwrap(), PatternClass::Homogeneous);
        pattern_reduce(&mut g, 1).unwrap();
        assert_eq!(g.status(1), NodeStatus::Dead);
        assert!(g.has_edge(0, 2));
        assert!(g.reaches(0, 2));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn try_reduce_outcomes() {
        let mut g = chain();
        assert_eq!(try_reduce(&mut g, 0), 0);
        assert_eq!(g.status(0), NodeStatus::Keep);
        assert_eq!(try_reduce(&mut g, 1), 1);
        assert_eq!(g.status(1), NodeStatus::Dead);
        assert_eq!(try_reduce(&mut g, 1), 0);
    }

    /// x feeds PO directly and also an active gate: heterogeneous at the gate feeding both.
    #[test]
    fn heterogeneous_fanouts_are_preserved() {
        let mut b = NetworkBuilder::new();
        let x = b.pi("x");
        let y = b.pi("y");
        let h = b.and(Fanin::plain(x), Fanin::plain(y));
        let g2 = b.and(Fanin::plain(h), Fanin::plain(y));
        b.po("o1", Fanin::plain(h));
        b.po("o2", Fanin::plain(g2));
        let mut g = prepared(&b.build().unwrap());
        assert_eq!(classify_pattern(&g, h).unwrap(), PatternClass::Heterogeneous);
        assert!(matches!(pattern_reduce(&mut g, h), Err(ReductionError::Precondition { .. })));
        assert_eq!(try_reduce(&mut g, h), 0);
        assert_eq!(g.status(h), NodeStatus::Preserved);
    }

    #[test]
    fn dangling_node_is_an_error_for_classification() {
        let mut b = NetworkBuilder::new();
        let x = b.pi("x");
        let _ = b.gate(GateKind::Buf, &[Fanin::plain(x)]);
        b.po("o", Fanin::plain(x));
        let net = b.build().unwrap();
        let mut g = DepGraph::recover(&net);
        g.init_status();
        assert!(matches!(classify_pattern(&g, 1), Err(ReductionError::Dangling(1))));
        assert!(matches!(classify_pattern(&g, 2), Err(ReductionError::Dangling(2))));
    }

    /// a -> v -> c and a -> w -> c with v, w both buffers into an AND.
    #[test]
    fn diamond_bridge_is_added_once() {
        let mut b = NetworkBuilder::new();
        let a = b.pi("a");
        let v = b.gate(GateKind::Buf, &[Fanin::plain(a)]);
        let w = b.gate(GateKind::Inv, &[Fanin::plain(a)]);
        let c = b.and(Fanin::plain(v), Fanin::plain(w));
        b.po("o", Fanin::plain(c));
        let mut g = prepared(&b.build().unwrap());
        assert!(!g.reaches(v, w) && !g.has_edge(a, c));
        pattern_reduce(&mut g, v).unwrap();
        assert!(g.has_edge(a, c));
        let before = g.edge_count();
        pattern_reduce(&mut g, w).unwrap();
        assert_eq!(g.fanins(c), &[a]);
        assert_eq!(g.edge_count(), before - 2);
    }

    /// v feeds x and y where y also reads x: y is covered through x.
    #[test]
    fn guard_skips_fanout_reached_through_sibling() {
        let mut b = NetworkBuilder::new();
        let p = b.pi("p");
        let q = b.pi("q");
        let v = b.and(Fanin::plain(p), Fanin::plain(q));
        let x = b.gate(GateKind::Buf, &[Fanin::plain(v)]);
        let y = b.and(Fanin::plain(v), Fanin::plain(x));
        b.po("o", Fanin::plain(y));
        let mut g = prepared(&b.build().unwrap());
        pattern_reduce(&mut g, v).unwrap();
        assert_eq!(g.fanins(x), &[p, q]);
        assert_eq!(g.fanins(y), &[x]);
        assert!(g.reaches(p, y) && g.reaches(q, y));
    }

    #[test]
    fn single_and_unlimited() {
        let (skel, report) = skeletonize(&single_and(), &ReductionConfig::unlimited()).unwrap();
        assert_eq!(skel.len(), 3);
        assert_eq!(skel.edges(), vec![(0, 2), (1, 2)]);
        assert_eq!(report.reduced_per_iteration, vec![1, 0]);
        assert_eq!(report.iterations, 2);
        assert_eq!(report.final_node_count, 3);
        assert_eq!(report.final_edge_count, 2);
    }

    #[test]
    fn single_and_bounded_by_fanin() {
        let (skel, report) = skeletonize(&single_and(), &ReductionConfig::with_k(2)).unwrap();
        assert_eq!(skel.len(), 4);
        assert_eq!(report.preserved_by_fanin_limit, 1);
        assert_eq!(report.reduced_per_iteration, vec![0]);
        let (skel3, _) = skeletonize(&single_and(), &ReductionConfig::with_k(3)).unwrap();
        assert_eq!(skel3.len(), 3);
    }

    #[test]
    fn report_json_keys() {
        let (_, report) = skeletonize(&single_and(), &ReductionConfig::unlimited()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            vec!["final_edge_count", "final_node_count", "iterations", "preserved_by_fanin_limit", "reduced_per_iteration"]
        );
    }

    #[test]
    fn batch_summary() {
        assert_eq!(reduce_fixpoint_stats(&[]), BatchSummary::default());
        let (_, r) = skeletonize(&single_and(), &ReductionConfig::unlimited()).unwrap();
        let s = reduce_fixpoint_stats(std::slice::from_ref(&r));
        assert_eq!(s.designs, 1);
        assert_eq!(s.total_iterations, r.iterations);
        assert_eq!(s.total_reduced, r.total_reduced());
        assert_eq!(s.rows[0].final_node_count, r.final_node_count);
    }
}
