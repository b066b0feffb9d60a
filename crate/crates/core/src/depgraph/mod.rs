//! Boolean dependency graph: the network with inverters materialized as nodes,
//! plus per-node status, unit-delay levels, and adjacency/reachability bit
//! matrices that are kept consistent through every mutation.

pub mod export;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitmatrix::BitMatrix;
use crate::graph::Dag;
use crate::netcore::{BooleanNetwork, GateKind, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    Keep,
    Active,
    Preserved,
    Dead,
}

impl NodeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeStatus::Keep => "keep",
            NodeStatus::Active => "active",
            NodeStatus::Preserved => "preserved",
            NodeStatus::Dead => "dead",
        }
    }

    /// Keep and Preserved both end up in the skeleton.
    pub fn is_retained(self) -> bool {
        matches!(self, NodeStatus::Keep | NodeStatus::Preserved)
    }

    pub fn can_become(self, next: NodeStatus) -> bool {
        use NodeStatus::*;
        self == next || matches!((self, next), (Keep, Preserved) | (Active, Preserved) | (Active, Dead))
    }
}

impl fmt::Display for NodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DepGraphError {
    #[error("node {node}: illegal status transition {from} -> {to}")]
    IllegalTransition { node: NodeId, from: NodeStatus, to: NodeStatus },
    #[error("node {0} is still active; the reduction has not reached its fixpoint")]
    ActiveRemaining(NodeId),
    #[error("expected {expected} input values, got {found}")]
    InputWidth { expected: usize, found: usize },
}

/// How complemented edges are turned into inverter nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverterMode {
    /// One INV node per complemented edge.
    #[default]
    PerEdge,
    /// One INV node per complemented driver, shared by all of its inverted sinks.
    Shared,
}

#[derive(Clone)]
pub struct DepGraph {
    kinds: Vec<GateKind>,
    status: Vec<NodeStatus>,
    level: Vec<usize>,
    /// Network node each dependency node stands for; an inverter maps to its driver.
    origin: Vec<NodeId>,
    names: Vec<Option<String>>,
    /// Functional wiring at recovery time, with multiplicity. Untouched by reduction.
    operands: Vec<Vec<NodeId>>,
    fanins: Vec<Vec<NodeId>>,
    fanouts: Vec<Vec<NodeId>>,
    adj: BitMatrix,
    reach: BitMatrix,
    pis: Vec<NodeId>,
    pos: Vec<NodeId>,
    network_len: usize,
}

impl fmt::Debug for DepGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DepGraph")
            .field("nodes", &self.len())
            .field("live", &self.live_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl DepGraph {
    /// Recovers the dependency graph with one inverter node per complemented edge.
    pub fn recover(net: &BooleanNetwork) -> Self {
        Self::recover_with(net, InverterMode::PerEdge)
    }

    /// Ids `0..net.len()` coincide with the network; inverter nodes follow in
    /// order of first use (sink id, then fanin position).
    pub fn recover_with(net: &BooleanNetwork, mode: InverterMode) -> Self {
        let mut kinds: Vec<GateKind> = net.nodes().iter().map(|n| n.kind).collect();
        let mut origin: Vec<NodeId> = (0..net.len()).collect();
        let mut names: Vec<Option<String>> = net.nodes().iter().map(|n| n.name.clone()).collect();
        let mut operands: Vec<Vec<NodeId>> = vec![Vec::new(); net.len()];
        let mut shared: HashMap<NodeId, NodeId> = HashMap::new();

        for (id, node) in net.nodes().iter().enumerate() {
            for f in &node.fanins {
                let src = if !f.complemented {
                    f.node
                } else {
                    let existing = match mode {
                        InverterMode::Shared => shared.get(&f.node).copied(),
                        InverterMode::PerEdge => None,
                    };
                    existing.unwrap_or_else(|| {
                        let inv = kinds.len();
                        kinds.push(GateKind::Inv);
                        origin.push(f.node);
                        names.push(None);
                        operands.push(vec![f.node]);
                        shared.insert(f.node, inv);
                        inv
                    })
                };
                operands[id].push(src);
            }
        }

        let n = kinds.len();
        let mut g = DepGraph {
            status: vec![NodeStatus::Active; n],
            level: vec![0; n],
            origin,
            names,
            fanins: vec![Vec::new(); n],
            fanouts: vec![Vec::new(); n],
            adj: BitMatrix::new(n),
            reach: BitMatrix::new(n),
            pis: net.pis().to_vec(),
            pos: net.pos().to_vec(),
            network_len: net.len(),
            kinds,
            operands,
        };
        for v in 0..n {
            for i in 0..g.operands[v].len() {
                let u = g.operands[v][i];
                g.add_edge(u, v);
            }
        }
        g.levelize();
        g.compute_reachability();
        g
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn network_len(&self) -> usize {
        self.network_len
    }

    pub fn kind(&self, v: NodeId) -> GateKind {
        self.kinds[v]
    }

    pub fn status(&self, v: NodeId) -> NodeStatus {
        self.status[v]
    }

    pub fn level(&self, v: NodeId) -> usize {
        self.level[v]
    }

    pub fn levels(&self) -> &[usize] {
        &self.level
    }

    pub fn origin(&self, v: NodeId) -> NodeId {
        self.origin[v]
    }

    pub fn name(&self, v: NodeId) -> Option<&str> {
        self.names[v].as_deref()
    }

    pub fn operands(&self, v: NodeId) -> &[NodeId] {
        &self.operands[v]
    }

    pub fn fanins(&self, v: NodeId) -> &[NodeId] {
        &self.fanins[v]
    }

    pub fn fanouts(&self, v: NodeId) -> &[NodeId] {
        &self.fanouts[v]
    }

    pub fn fanin_size(&self, v: NodeId) -> usize {
        self.fanins[v].len()
    }

    pub fn pis(&self) -> &[NodeId] {
        &self.pis
    }

    pub fn pos(&self) -> &[NodeId] {
        &self.pos
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    pub fn reachability(&self) -> &BitMatrix {
        &self.reach
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj.get(u, v)
    }

    pub fn reaches(&self, u: NodeId, v: NodeId) -> bool {
        self.reach.get(u, v)
    }

    pub fn is_live(&self, v: NodeId) -> bool {
        self.status[v] != NodeStatus::Dead
    }

    pub fn live_count(&self) -> usize {
        self.status.iter().filter(|&&s| s != NodeStatus::Dead).count()
    }

    pub fn edge_count(&self) -> usize {
        self.fanins.iter().map(Vec::len).sum()
    }

    pub fn count_status(&self, status: NodeStatus) -> usize {
        self.status.iter().filter(|&&s| s == status).count()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        (0..self.len()).filter(|&v| self.is_live(v) && self.kinds[v] == kind).count()
    }

    pub fn depth(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_live(v)).map(|v| self.level[v]).max().unwrap_or(0)
    }

    /// Marks PIs, POs and the constant Keep and every other live node Active.
    pub fn init_status(&mut self) {
        for v in 0..self.len() {
            if self.status[v] == NodeStatus::Dead {
                continue;
            }
            self.status[v] = match self.kinds[v] {
                GateKind::Pi | GateKind::Po | GateKind::Const0 => NodeStatus::Keep,
                _ => NodeStatus::Active,
            };
        }
    }

    pub fn set_status(&mut self, v: NodeId, next: NodeStatus) -> Result<(), DepGraphError> {
        let from = self.status[v];
        if !from.can_become(next) {
            return Err(DepGraphError::IllegalTransition { node: v, from, to: next });
        }
        if next == NodeStatus::Dead {
            self.detach(v);
        }
        self.status[v] = next;
        Ok(())
    }

    /// Live nodes with every fanin before its sinks; ties go to the smaller id.
    pub fn topological_order(&self) -> Vec<NodeId> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let mut indegree: Vec<usize> = self.fanins.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<NodeId>> =
            (0..self.len()).filter(|&v| self.is_live(v) && indegree[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.live_count());
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &self.fanouts[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        order
    }

    /// Unit-delay levels over live nodes. Dead nodes are left at 0.
    pub fn levelize(&mut self) {
        self.level.fill(0);
        for v in self.topological_order() {
            self.level[v] = self.fanins[v].iter().map(|&u| self.level[u] + 1).max().unwrap_or(0);
        }
    }

    /// Recomputes R as the transitive closure of A, in reverse topological order.
    pub fn compute_reachability(&mut self) {
        self.reach = BitMatrix::new(self.len());
        for &v in self.topological_order().iter().rev() {
            for i in 0..self.fanouts[v].len() {
                let w = self.fanouts[v][i];
                self.reach.set(v, w);
                self.reach.union_row(v, w);
            }
        }
    }

    /// Kills internal nodes without fanouts until none remain. Keep nodes are never pruned.
    pub fn prune_dangling(&mut self) -> Vec<NodeId> {
        let mut pruned = Vec::new();
        let mut work: Vec<NodeId> = (0..self.len()).rev().collect();
        while let Some(v) = work.pop() {
            if self.status[v] == NodeStatus::Active && self.fanouts[v].is_empty() {
                let fanins = self.fanins[v].clone();
                self.detach(v);
                self.status[v] = NodeStatus::Dead;
                pruned.push(v);
                work.extend(fanins);
            }
        }
        pruned.sort_unstable();
        pruned
    }

    /// Collects Keep and Preserved nodes with the induced edges.
    pub fn collect_skeleton(&self) -> Result<SkeletonGraph, DepGraphError> {
        if let Some(v) = (0..self.len()).find(|&v| self.status[v] == NodeStatus::Active) {
            return Err(DepGraphError::ActiveRemaining(v));
        }
        Ok(SkeletonGraph::from_dependency_graph(self))
    }

    /// Evaluates the recovered functional wiring; `inputs` follows `pis()`, result follows `pos()`.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>, DepGraphError> {
        if inputs.len() != self.pis.len() {
            return Err(DepGraphError::InputWidth { expected: self.pis.len(), found: inputs.len() });
        }
        let n = self.len();
        let mut value: Vec<Option<bool>> = vec![None; n];
        for (&pi, &bit) in self.pis.iter().zip(inputs) {
            value[pi] = Some(bit);
        }
        let mut stack: Vec<NodeId> = self.pos.clone();
        while let Some(&v) = stack.last() {
            if value[v].is_some() {
                stack.pop();
                continue;
            }
            let pending: Vec<NodeId> = self.operands[v].iter().copied().filter(|&u| value[u].is_none()).collect();
            if !pending.is_empty() {
                stack.extend(pending);
                continue;
            }
            let ops: Vec<bool> = self.operands[v].iter().map(|&u| value[u].unwrap_or(false)).collect();
            value[v] = Some(match self.kinds[v] {
                GateKind::Pi | GateKind::Const0 => false,
                GateKind::Po | GateKind::Buf => ops[0],
                GateKind::Inv => !ops[0],
                GateKind::And2 => ops.iter().all(|&b| b),
                GateKind::Or2 => ops.iter().any(|&b| b),
                GateKind::Xor2 => ops.iter().fold(false, |acc, &b| acc ^ b),
            });
            stack.pop();
        }
        Ok(self.pos.iter().map(|&po| value[po].unwrap_or(false)).collect())
    }

    pub(crate) fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        if u == v || self.adj.get(u, v) {
            return false;
        }
        self.adj.set(u, v);
        insert_sorted(&mut self.fanouts[u], v);
        insert_sorted(&mut self.fanins[v], u);
        true
    }

    /// Drops every edge of `v` and clears its row and column of R.
    fn detach(&mut self, v: NodeId) {
        let ancestors = self.ancestors(v);
        for u in ancestors {
            self.reach.clear(u, v);
        }
        self.reach.clear_row(v);
        for u in std::mem::take(&mut self.fanins[v]) {
            self.adj.clear(u, v);
            remove_sorted(&mut self.fanouts[u], v);
        }
        for w in std::mem::take(&mut self.fanouts[v]) {
            self.adj.clear(v, w);
            remove_sorted(&mut self.fanins[w], v);
        }
    }

    fn ancestors(&self, v: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.len()];
        let mut stack = self.fanins[v].clone();
        let mut out = Vec::new();
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            out.push(u);
            stack.extend_from_slice(&self.fanins[u]);
        }
        out
    }
}

fn insert_sorted(list: &mut Vec<NodeId>, x: NodeId) {
    if let Err(pos) = list.binary_search(&x) {
        list.insert(pos, x);
    }
}

fn remove_sorted(list: &mut Vec<NodeId>, x: NodeId) {
    if let Ok(pos) = list.binary_search(&x) {
        list.remove(pos);
    }
}

impl Dag for DepGraph {
    fn id_bound(&self) -> usize {
        self.len()
    }

    fn contains(&self, v: NodeId) -> bool {
        self.is_live(v)
    }

    fn kind(&self, v: NodeId) -> GateKind {
        self.kinds[v]
    }

    fn fanin_ids(&self, v: NodeId) -> Vec<NodeId> {
        self.fanins[v].clone()
    }

    fn fanout_ids(&self, v: NodeId) -> Vec<NodeId> {
        self.fanouts[v].clone()
    }

    fn level(&self, v: NodeId) -> usize {
        self.level[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkeletonNode {
    pub kind: GateKind,
    pub status: NodeStatus,
    pub level: usize,
    /// Dependency-graph id.
    pub orig_id: NodeId,
    /// Network id (an inverter maps to its driver).
    pub net_id: NodeId,
}

/// The reduced graph: retained nodes, renumbered densely in ascending
/// dependency-graph id order, with the induced edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    nodes: Vec<SkeletonNode>,
    fanins: Vec<Vec<NodeId>>,
    fanouts: Vec<Vec<NodeId>>,
    pis: Vec<NodeId>,
    pos: Vec<NodeId>,
}

impl SkeletonGraph {
    fn from_dependency_graph(g: &DepGraph) -> Self {
        let mut index = vec![usize::MAX; g.len()];
        let mut nodes = Vec::new();
        for (v, slot) in index.iter_mut().enumerate() {
            if g.status(v).is_retained() {
                *slot = nodes.len();
                nodes.push(SkeletonNode {
                    kind: g.kind(v),
                    status: g.status(v),
                    level: 0,
                    orig_id: v,
                    net_id: g.origin(v),
                });
            }
        }
        let mut fanins = vec![Vec::new(); nodes.len()];
        let mut fanouts = vec![Vec::new(); nodes.len()];
        for (s, node) in nodes.iter().enumerate() {
            for &w in g.fanouts(node.orig_id) {
                if index[w] != usize::MAX {
                    fanouts[s].push(index[w]);
                    fanins[index[w]].push(s);
                }
            }
        }
        for list in &mut fanins {
            list.sort_unstable();
        }
        let map = |ids: &[NodeId]| ids.iter().map(|&v| index[v]).filter(|&s| s != usize::MAX).collect();
        let mut skel = SkeletonGraph { pis: map(g.pis()), pos: map(g.pos()), nodes, fanins, fanouts };
        skel.relevel();
        skel
    }

    fn relevel(&mut self) {
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = self.fanins.iter().map(Vec::len).collect();
        let mut ready: Vec<NodeId> = (0..n).filter(|&v| indegree[v] == 0).collect();
        while let Some(v) = ready.pop() {
            self.nodes[v].level = self.fanins[v].iter().map(|&u| self.nodes[u].level + 1).max().unwrap_or(0);
            for i in 0..self.fanouts[v].len() {
                let w = self.fanouts[v][i];
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SkeletonNode] {
        &self.nodes
    }

    pub fn node(&self, s: NodeId) -> &SkeletonNode {
        &self.nodes[s]
    }

    pub fn fanins(&self, s: NodeId) -> &[NodeId] {
        &self.fanins[s]
    }

    pub fn fanouts(&self, s: NodeId) -> &[NodeId] {
        &self.fanouts[s]
    }

    pub fn pis(&self) -> &[NodeId] {
        &self.pis
    }

    pub fn pos(&self) -> &[NodeId] {
        &self.pos
    }

    pub fn edge_count(&self) -> usize {
        self.fanins.iter().map(Vec::len).sum()
    }

    /// Edges as (source, target) pairs in skeleton ids, sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut e: Vec<_> = (0..self.len()).flat_map(|s| self.fanouts[s].iter().map(move |&t| (s, t))).collect();
        e.sort_unstable();
        e
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    /// Skeleton id → dependency-graph id.
    pub fn provenance(&self) -> Vec<NodeId> {
        self.nodes.iter().map(|n| n.orig_id).collect()
    }

    pub fn find_orig(&self, orig: NodeId) -> Option<NodeId> {
        self.nodes.binary_search_by_key(&orig, |n| n.orig_id).ok()
    }
}

impl Dag for SkeletonGraph {
    fn id_bound(&self) -> usize {
        self.len()
    }

    fn contains(&self, v: NodeId) -> bool {
        v < self.len()
    }

    fn kind(&self, v: NodeId) -> GateKind {
        self.nodes[v].kind
    }

    fn fanin_ids(&self, v: NodeId) -> Vec<NodeId> {
        self.fanins[v].clone()
    }

    fn fanout_ids(&self, v: NodeId) -> Vec<NodeId> {
        self.fanouts[v].clone()
    }

    fn level(&self, v: NodeId) -> usize {
        self.nodes[v].level
    }
}
