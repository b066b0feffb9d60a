//! Brute-force reference implementations.
//!
//! Nothing here reuses the reachability, levelization or evaluation code it
//! checks: closures come from per-source BFS over plain edge lists, longest
//! paths from memoized DFS, and network evaluation from a demand-driven walk.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::depgraph::{DepGraph, NodeStatus, SkeletonGraph};
use crate::netcore::{BooleanNetwork, GateKind, NodeId};
use crate::reduction::Skeletonization;

/// Seed used for sampled equivalence when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_B001;

/// Largest PI count checked exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("edge relation has a cycle through node {0}")]
    Cycle(usize),
    #[error("primary input mismatch: {0} vs {1}")]
    PiMismatch(usize, usize),
    #[error("primary output mismatch: {0} vs {1}")]
    PoMismatch(usize, usize),
    #[error("{0} primary inputs exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}")]
    TooManyInputs(usize),
}

/// Irreflexive transitive closure as a dense boolean table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureMatrix {
    n: usize,
    cells: Vec<bool>,
}

impl ClosureMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Sub-matrix over `ids`, renumbered `0..ids.len()` in the given order.
    pub fn restrict(&self, ids: &[usize]) -> ClosureMatrix {
        let m = ids.len();
        let mut cells = vec![false; m * m];
        for (a, &i) in ids.iter().enumerate() {
            for (b, &j) in ids.iter().enumerate() {
                cells[a * m + b] = self.get(i, j);
            }
        }
        ClosureMatrix { n: m, cells }
    }
}

fn successors(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); n];
    for &(u, v) in edges {
        succ[u].push(v);
    }
    succ
}

/// Per-source BFS closure.
pub fn bfs_closure(n: usize, edges: &[(usize, usize)]) -> Result<ClosureMatrix, OracleError> {
    let succ = successors(n, edges);
    let mut cells = vec![false; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        queue.clear();
        queue.extend(succ[s].iter().copied());
        while let Some(v) = queue.pop_front() {
            if v == s {
                return Err(OracleError::Cycle(s));
            }
            if !cells[s * n + v] {
                cells[s * n + v] = true;
                queue.extend(succ[v].iter().copied());
            }
        }
    }
    Ok(ClosureMatrix { n, cells })
}

/// Longest path by edge count, with one witness path from a source.
pub fn longest_path(n: usize, edges: &[(usize, usize)]) -> Result<(usize, Vec<usize>), OracleError> {
    let succ = successors(n, edges);
    // best[v] = (length of longest path starting at v, next node on it)
    let mut best: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    let mut on_stack = vec![false; n];

    fn visit(
        v: usize,
        succ: &[Vec<usize>],
        best: &mut [Option<(usize, Option<usize>)>],
        on_stack: &mut [bool],
    ) -> Result<usize, OracleError> {
        if let Some((len, _)) = best[v] {
            return Ok(len);
        }
        if on_stack[v] {
            return Err(OracleError::Cycle(v));
        }
        on_stack[v] = true;
        let mut top = (0, None);
        for &w in &succ[v] {
            let len = visit(w, succ, best, on_stack)? + 1;
            if len > top.0 {
                top = (len, Some(w));
            }
        }
        on_stack[v] = false;
        best[v] = Some(top);
        Ok(top.0)
    }

    let mut start = None;
    let mut length = 0;
    for v in 0..n {
        let len = visit(v, &succ, &mut best, &mut on_stack)?;
        if start.is_none() || len > length {
            start = Some(v);
            length = len;
        }
    }
    let mut path = Vec::new();
    let mut cur = start;
    while let Some(v) = cur {
        path.push(v);
        cur = best[v].and_then(|(_, next)| next);
    }
    Ok((length, path))
}

/// Demand-driven evaluation of the network from its outputs.
fn eval_outputs(net: &BooleanNetwork, inputs: &[bool]) -> Vec<bool> {
    let mut memo: Vec<Option<bool>> = vec![None; net.len()];
    for (i, &pi) in net.pis().iter().enumerate() {
        memo[pi] = Some(inputs[i]);
    }
    let mut out = Vec::with_capacity(net.pos().len());
    for &po in net.pos() {
        let mut stack = vec![po];
        while let Some(&v) = stack.last() {
            if memo[v].is_some() {
                stack.pop();
                continue;
            }
            let node = net.node(v);
            let missing: Vec<NodeId> = node.fanins.iter().map(|f| f.node).filter(|&u| memo[u].is_none()).collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let lit = |i: usize| memo[node.fanins[i].node].unwrap_or(false) != node.fanins[i].complemented;
            let value = match node.kind {
                GateKind::Const0 | GateKind::Pi => false,
                GateKind::Po | GateKind::Buf => lit(0),
                GateKind::Inv => !lit(0),
                GateKind::And2 => lit(0) && lit(1),
                GateKind::Or2 => lit(0) || lit(1),
                GateKind::Xor2 => lit(0) != lit(1),
            };
            memo[v] = Some(value);
            stack.pop();
        }
        out.push(memo[po].unwrap_or(false));
    }
    out
}

fn check_interfaces(a: &BooleanNetwork, b: &BooleanNetwork) -> Result<(), OracleError> {
    if a.pis().len() != b.pis().len() {
        return Err(OracleError::PiMismatch(a.pis().len(), b.pis().len()));
    }
    if a.pos().len() != b.pos().len() {
        return Err(OracleError::PoMismatch(a.pos().len(), b.pos().len()));
    }
    Ok(())
}

fn word_to_bits(word: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| (word >> i) & 1 == 1).collect()
}

/// Functional equivalence over all input assignments (PI count at most 16).
pub fn exhaustive_equiv(a: &BooleanNetwork, b: &BooleanNetwork) -> Result<bool, OracleError> {
    check_interfaces(a, b)?;
    let width = a.pis().len();
    if width > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooManyInputs(width));
    }
    Ok((0..1u64 << width).all(|w| {
        let bits = word_to_bits(w, width);
        eval_outputs(a, &bits) == eval_outputs(b, &bits)
    }))
}

/// Equivalence on `samples` seeded random assignments.
pub fn sampled_equiv(a: &BooleanNetwork, b: &BooleanNetwork, samples: usize, seed: u64) -> Result<bool, OracleError> {
    check_interfaces(a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = a.pis().len();
    Ok((0..samples).all(|_| {
        let bits: Vec<bool> = (0..width).map(|_| rng.gen()).collect();
        eval_outputs(a, &bits) == eval_outputs(b, &bits)
    }))
}

/// Input assignments for a fidelity check: exhaustive up to 16 PIs, otherwise seeded samples.
pub fn assignments(width: usize, samples: usize, seed: u64) -> Box<dyn Iterator<Item = Vec<bool>>> {
    if width <= EXHAUSTIVE_LIMIT {
        Box::new((0..1u64 << width).map(move |w| word_to_bits(w, width)))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Box::new((0..samples).map(move |_| (0..width).map(|_| rng.gen()).collect()))
    }
}

/// Compares the network against its recovered dependency graph; returns the first
/// disagreeing assignment.
pub fn recovery_mismatch(net: &BooleanNetwork, g: &DepGraph, samples: usize, seed: u64) -> Option<Vec<bool>> {
    assignments(net.pis().len(), samples, seed).find(|bits| {
        let expect = eval_outputs(net, bits);
        g.evaluate(bits).map_or(true, |got| got != expect)
    })
}

/// Edge list of the live part of a dependency graph, in dependency ids.
pub fn dep_edges(g: &DepGraph) -> Vec<(usize, usize)> {
    (0..g.len()).flat_map(|u| g.fanouts(u).iter().map(move |&w| (u, w))).collect()
}

/// One failed property from [`verify_skeletonization`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

fn violation(check: &'static str, detail: impl Into<String>) -> Violation {
    Violation { check, detail: detail.into() }
}

/// Closure, topology, status and termination checks on a finished run.
pub fn verify_skeletonization(run: &Skeletonization) -> Vec<Violation> {
    let mut out = Vec::new();
    let before = &run.initial;
    let after = &run.reduced;
    let skel = &run.skeleton;

    let original = match bfs_closure(before.len(), &dep_edges(before)) {
        Ok(c) => c,
        Err(e) => return vec![violation("acyclic", e.to_string())],
    };
    let survivors = skel.provenance();
    let skel_closure = match bfs_closure(skel.len(), &skel.edges()) {
        Ok(c) => c,
        Err(e) => return vec![violation("acyclic", e.to_string())],
    };

    let orig_restricted = original.restrict(&survivors);
    if orig_restricted != skel_closure {
        out.push(violation("reachability", "skeleton closure differs from original closure on survivors"));
    }
    for (a, &u) in survivors.iter().enumerate() {
        for (b, &w) in survivors.iter().enumerate() {
            if after.reaches(u, w) != skel_closure.get(a, b) {
                out.push(violation("reachability", format!("maintained R[{u}][{w}] disagrees with BFS closure")));
            }
        }
    }
    for (s, t) in skel.edges() {
        let (u, w) = (survivors[s], survivors[t]);
        if !original.get(u, w) || original.get(w, u) {
            out.push(violation("topology", format!("skeleton edge {u}->{w} is not forward in the original order")));
        }
    }

    for v in 0..after.len() {
        match after.status(v) {
            NodeStatus::Active => out.push(violation("status", format!("node {v} still active"))),
            NodeStatus::Dead => {
                if !after.fanins(v).is_empty() || !after.fanouts(v).is_empty() {
                    out.push(violation("dead", format!("dead node {v} has edges")));
                }
                if after.reachability().row_count(v) > 0 || (0..after.len()).any(|u| after.reaches(u, v)) {
                    out.push(violation("dead", format!("dead node {v} has reachability entries")));
                }
            }
            _ => {}
        }
    }
    if before.count_status(NodeStatus::Keep) != after.count_status(NodeStatus::Keep) {
        out.push(violation("status", "keep count changed during reduction"));
    }

    let report = &run.report;
    let initial_active = before.count_status(NodeStatus::Active);
    if report.reduced_per_iteration.last() != Some(&0) {
        out.push(violation("termination", "last pass reduced nodes"));
    }
    if report.iterations > initial_active + 1 {
        out.push(violation("termination", format!("{} passes for {initial_active} active nodes", report.iterations)));
    }
    let killed = after.count_status(NodeStatus::Dead) - before.count_status(NodeStatus::Dead);
    if report.total_reduced() != killed {
        out.push(violation("report", format!("report counts {} reductions, graph has {killed}", report.total_reduced())));
    }
    out
}

/// PO pairs whose original level order is inverted in the skeleton.
pub fn po_rank_violations(initial: &DepGraph, skel: &SkeletonGraph) -> Vec<(NodeId, NodeId)> {
    let levels: Vec<(NodeId, usize, usize)> = skel
        .pos()
        .iter()
        .map(|&s| {
            let orig = skel.node(s).orig_id;
            (orig, initial.level(orig), skel.node(s).level)
        })
        .collect();
    let mut bad = Vec::new();
    for &(p, lp, sp) in &levels {
        for &(q, lq, sq) in &levels {
            if lp < lq && sp > sq {
                bad.push((p, q));
            }
        }
    }
    bad
}

/// True when two outputs depend on disjoint sets of primary inputs.
pub fn has_disjoint_support_outputs(net: &BooleanNetwork) -> bool {
    let supports: Vec<Vec<bool>> = net
        .pos()
        .iter()
        .map(|&po| {
            let mut seen = vec![false; net.len()];
            let mut stack = vec![po];
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut seen[v], true) {
                    continue;
                }
                stack.extend(net.node(v).fanins.iter().map(|f| f.node));
            }
            net.pis().iter().map(|&pi| seen[pi]).collect()
        })
        .collect();
    (0..supports.len()).any(|i| {
        (i + 1..supports.len()).any(|j| !supports[i].iter().zip(&supports[j]).any(|(&a, &b)| a && b))
    })
}
