//! Compression statistics, unit-delay critical paths, critical regions and
//! region similarity.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::depgraph::{DepGraph, SkeletonGraph};
use crate::graph::Dag;
use crate::netcore::{BooleanNetwork, NodeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionStats {
    pub design: String,
    pub k: String,
    pub original_nodes: usize,
    pub final_nodes: usize,
    pub original_edges: usize,
    pub final_edges: usize,
    pub original_depth: usize,
    pub final_depth: usize,
    pub size_ratio: f64,
    pub depth_ratio: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compression_stats(before: &DepGraph, s: &SkeletonGraph) -> CompressionStats {
    let (original_nodes, original_depth) = (before.live_count(), before.depth());
    CompressionStats {
        design: String::new(),
        k: String::new(),
        original_nodes,
        final_nodes: s.len(),
        original_edges: before.edge_count(),
        final_edges: s.edge_count(),
        original_depth,
        final_depth: s.depth(),
        size_ratio: ratio(s.len(), original_nodes),
        depth_ratio: ratio(s.depth(), original_depth),
    }
}

impl CompressionStats {
    pub fn labeled(mut self, design: impl Into<String>, k: impl fmt::Display) -> Self {
        self.design = design.into();
        self.k = k.to_string();
        self
    }

    pub const TSV_HEADER: &'static str =
        "design\tk\torig_nodes\tfinal_nodes\torig_edges\tfinal_edges\torig_depth\tfinal_depth\tsize_ratio\tdepth_ratio";

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            self.design,
            self.k,
            self.original_nodes,
            self.final_nodes,
            self.original_edges,
            self.final_edges,
            self.original_depth,
            self.final_depth,
            self.size_ratio,
            self.depth_ratio
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }
}

/// Ordered node list from a source to a sink.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TimingPath {
    pub nodes: Vec<NodeId>,
}

impl TimingPath {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        TimingPath { nodes }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A maximum-level path. The endpoint is the smallest-id node of maximum
/// level, and each backward step takes the smallest-id fanin one level down.
pub fn critical_path<G: Dag>(g: &G) -> Result<TimingPath, AnalysisError> {
    let live = g.live_nodes();
    let mut end = *live.first().ok_or(AnalysisError::EmptyGraph)?;
    for &v in &live {
        if g.level(v) > g.level(end) {
            end = v;
        }
    }
    let mut nodes = vec![end];
    let mut cur = end;
    while g.level(cur) > 0 {
        let want = g.level(cur) - 1;
        let next = g.fanin_ids(cur).into_iter().filter(|&u| g.level(u) == want).min();
        match next {
            Some(u) => {
                nodes.push(u);
                cur = u;
            }
            None => break,
        }
    }
    nodes.reverse();
    Ok(TimingPath { nodes })
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CriticalRegion {
    pub members: BTreeSet<NodeId>,
}

impl CriticalRegion {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.contains(&v)
    }
}

impl FromIterator<NodeId> for CriticalRegion {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        CriticalRegion { members: iter.into_iter().collect() }
    }
}

/// Two-stage labeling: label `a` spreads forward from the path nodes, label
/// `b` spreads backward from the POs through `a` nodes only.
pub fn extract_critical_region(net: &BooleanNetwork, paths: &[TimingPath]) -> Result<CriticalRegion, AnalysisError> {
    let n = net.len();
    let mut a = vec![false; n];
    let mut stack = Vec::new();
    for path in paths {
        for &v in &path.nodes {
            if v >= n {
                return Err(AnalysisError::UnknownNode(v.to_string()));
            }
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut a[v], true) {
            continue;
        }
        stack.extend_from_slice(net.fanouts(v));
    }

    let mut b = vec![false; n];
    stack.extend(net.pos().iter().copied().filter(|&po| a[po]));
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut b[v], true) {
            continue;
        }
        stack.extend(net.node(v).fanins.iter().map(|f| f.node).filter(|&u| a[u]));
    }
    Ok((0..n).filter(|&v| a[v] && b[v]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// |r1 ∩ r2| / |r1 ∪ r2|
    #[default]
    Jaccard,
    /// |r1 ∩ r2| / min(|r1|, |r2|)
    Overlap,
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "jaccard" | "iou" => Ok(Metric::Jaccard),
            "overlap" => Ok(Metric::Overlap),
            other => Err(format!("unknown similarity metric `{other}`")),
        }
    }
}

pub fn similarity(r1: &CriticalRegion, r2: &CriticalRegion) -> f64 {
    similarity_with(r1, r2, Metric::Jaccard)
}

/// Defined as 1 when both regions are empty.
pub fn similarity_with(r1: &CriticalRegion, r2: &CriticalRegion, metric: Metric) -> f64 {
    if r1.is_empty() && r2.is_empty() {
        return 1.0;
    }
    let common = r1.members.intersection(&r2.members).count();
    let den = match metric {
        Metric::Jaccard => r1.len() + r2.len() - common,
        Metric::Overlap => r1.len().min(r2.len()),
    };
    if den == 0 {
        0.0
    } else {
        common as f64 / den as f64
    }
}

/// Total degree of every live node, largest first.
pub fn degree_histogram<G: Dag>(g: &G) -> Vec<usize> {
    let mut degrees: Vec<usize> = g
        .live_nodes()
        .into_iter()
        .map(|v| g.fanin_ids(v).len() + g.fanout_ids(v).len())
        .collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    degrees
}

/// One path per line; tokens are node names or numeric ids, `#` starts a comment.
pub fn parse_path_file(text: &str, net: &BooleanNetwork) -> Result<Vec<TimingPath>, AnalysisError> {
    let mut paths = Vec::new();
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        let nodes = body
            .split_whitespace()
            .map(|tok| resolve(tok, net))
            .collect::<Result<Vec<_>, _>>()?;
        if !nodes.is_empty() {
            paths.push(TimingPath { nodes });
        }
    }
    Ok(paths)
}

fn resolve(tok: &str, net: &BooleanNetwork) -> Result<NodeId, AnalysisError> {
    if let Some(v) = net.find_name(tok) {
        return Ok(v);
    }
    match tok.parse::<NodeId>() {
        Ok(v) if v < net.len() => Ok(v),
        _ => Err(AnalysisError::UnknownNode(tok.to_string())),
    }
}

/// Network ids along a skeleton path. Inverter nodes map to the gate they
/// complement; consecutive repeats collapse.
pub fn skeleton_path_to_network(skel: &SkeletonGraph, path: &TimingPath) -> TimingPath {
    let mut nodes: Vec<NodeId> = Vec::with_capacity(path.nodes.len());
    for &s in &path.nodes {
        let v = skel.node(s).net_id;
        if nodes.last() != Some(&v) {
            nodes.push(v);
        }
    }
    TimingPath { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Fanin, NetworkBuilder};
    use crate::reduction::{run, ReductionConfig};

    fn region(ids: &[NodeId]) -> CriticalRegion {
        ids.iter().copied().collect()
    }

    #[test]
    fn similarity_examples() {
        let r = region(&[1, 2, 3]);
        assert_eq!(similarity(&r, &r), 1.0);
        assert_eq!(similarity(&region(&[1, 2]), &region(&[3, 4])), 0.0);
        assert_eq!(similarity(&region(&[0, 1, 2, 3, 4, 5]), &region(&[2, 3, 4, 5, 6, 7])), 0.5);
        assert_eq!(similarity(&region(&[]), &region(&[])), 1.0);
        assert_eq!(similarity(&region(&[]), &region(&[1])), 0.0);
        assert_eq!(similarity_with(&region(&[1, 2]), &region(&[1, 2, 3, 4]), Metric::Overlap), 1.0);
    }

    fn chain_with_branch() -> BooleanNetwork {
        // a -> g1 -> g2 -> g3 -> o1, with a short branch b -> o2
        let mut b = NetworkBuilder::new();
        let a = b.pi("a");
        let x = b.pi("b");
        let g1 = b.gate(crate::netcore::GateKind::Buf, &[Fanin::plain(a)]);
        let g2 = b.gate(crate::netcore::GateKind::Inv, &[Fanin::plain(g1)]);
        let g3 = b.gate(crate::netcore::GateKind::Buf, &[Fanin::plain(g2)]);
        b.po("o1", Fanin::plain(g3));
        b.po("o2", Fanin::plain(x));
        b.build().unwrap()
    }

    #[test]
    fn critical_path_takes_longest_chain() {
        let net = chain_with_branch();
        let p = critical_path(&net).unwrap();
        assert_eq!(p.nodes, vec![0, 2, 3, 4, 5]);
        assert_eq!(p.len(), net.depth());
    }

    #[test]
    fn critical_path_of_empty_graph() {
        let net = NetworkBuilder::new().build().unwrap();
        assert_eq!(critical_path(&net), Err(AnalysisError::EmptyGraph));
    }

    #[test]
    fn region_of_chain_is_whole_chain() {
        let mut b = NetworkBuilder::new();
        let a = b.pi("a");
        let g = b.gate(crate::netcore::GateKind::Buf, &[Fanin::plain(a)]);
        b.po("o", Fanin::inverted(g));
        let net = b.build().unwrap();
        let r = extract_critical_region(&net, &[TimingPath::new(vec![0, 1, 2])]).unwrap();
        assert_eq!(r, region(&[0, 1, 2]));
        assert!(extract_critical_region(&net, &[]).unwrap().is_empty());
        assert_eq!(
            extract_critical_region(&net, &[TimingPath::new(vec![7])]),
            Err(AnalysisError::UnknownNode("7".into()))
        );
    }

    #[test]
    fn region_excludes_other_diamond_arm() {
        // a -> x, b -> y, (x, y) -> j -> o
        let mut b = NetworkBuilder::new();
        let pa = b.pi("a");
        let pb = b.pi("b");
        let x = b.gate(crate::netcore::GateKind::Buf, &[Fanin::plain(pa)]);
        let y = b.gate(crate::netcore::GateKind::Buf, &[Fanin::plain(pb)]);
        let j = b.and(Fanin::plain(x), Fanin::plain(y));
        let o = b.po("o", Fanin::plain(j));
        let net = b.build().unwrap();
        let r = extract_critical_region(&net, &[TimingPath::new(vec![pa, x, j, o])]).unwrap();
        assert_eq!(r, region(&[pa, x, j, o]));
        assert!(!r.contains(pb) && !r.contains(y));
    }

    #[test]
    fn path_file_accepts_names_ids_and_comments() {
        let net = chain_with_branch();
        let paths = parse_path_file("# top paths\na 2 3 4 o1\n\nb o2 # short\n", &net).unwrap();
        assert_eq!(paths, vec![TimingPath::new(vec![0, 2, 3, 4, 5]), TimingPath::new(vec![1, 6])]);
        assert_eq!(parse_path_file("a nope", &net), Err(AnalysisError::UnknownNode("nope".into())));
    }

    #[test]
    fn degree_histogram_of_chain() {
        let mut b = NetworkBuilder::new();
        let a = b.pi("a");
        let g = b.gate(crate::netcore::GateKind::Buf, &[Fanin::plain(a)]);
        b.po("o", Fanin::plain(g));
        assert_eq!(degree_histogram(&b.build().unwrap()), vec![2, 1, 1]);
        assert!(degree_histogram(&NetworkBuilder::new().build().unwrap()).is_empty());
    }

    #[test]
    fn single_and_compresses_to_three_quarters() {
        let mut b = NetworkBuilder::new();
        let x = b.pi("x");
        let y = b.pi("y");
        let g = b.and(Fanin::plain(x), Fanin::plain(y));
        b.po("o", Fanin::plain(g));
        let net = b.build().unwrap();
        let run1 = run(&net, &ReductionConfig::with_k(1)).unwrap();
        let s1 = compression_stats(&run1.initial, &run1.skeleton);
        assert_eq!((s1.size_ratio, s1.depth_ratio), (1.0, 1.0));
        let inf = run(&net, &ReductionConfig::unlimited()).unwrap();
        let s = compression_stats(&inf.initial, &inf.skeleton).labeled("and", "inf");
        assert_eq!(s.size_ratio, 0.75);
        assert!(s.tsv_row().starts_with("and\tinf\t4\t3\t3\t2\t2\t1\t0.750000"));
    }

    #[test]
    fn skeleton_paths_map_through_inverters() {
        let mut b = NetworkBuilder::new();
        let x = b.pi("x");
        let y = b.pi("y");
        let g = b.and(Fanin::inverted(x), Fanin::plain(y));
        b.po("o", Fanin::plain(g));
        let net = b.build().unwrap();
        let run1 = run(&net, &ReductionConfig::with_k(1)).unwrap();
        let p = critical_path(&run1.skeleton).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(skeleton_path_to_network(&run1.skeleton, &p).nodes, vec![x, g, 3]);
    }
}
