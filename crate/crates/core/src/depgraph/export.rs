//! GraphML, DOT and JSON writers. Nodes are emitted in ascending id order and
//! edges sorted by (source, target), so equal graphs give equal bytes.

use std::fmt::Write as _;

use serde::Serialize;

use super::{DepGraph, NodeStatus, SkeletonGraph};
use crate::netcore::{GateKind, NodeId};

struct Row {
    id: NodeId,
    kind: GateKind,
    status: NodeStatus,
    level: usize,
    orig_id: Option<NodeId>,
}

fn dep_rows(g: &DepGraph) -> (Vec<Row>, Vec<(NodeId, NodeId)>) {
    let rows = (0..g.len())
        .filter(|&v| g.is_live(v))
        .map(|v| Row { id: v, kind: g.kind(v), status: g.status(v), level: g.level(v), orig_id: None })
        .collect();
    let edges = (0..g.len()).flat_map(|u| g.fanouts(u).iter().map(move |&w| (u, w))).collect();
    (rows, edges)
}

fn skel_rows(s: &SkeletonGraph) -> (Vec<Row>, Vec<(NodeId, NodeId)>) {
    let rows = s
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| Row { id: i, kind: n.kind, status: n.status, level: n.level, orig_id: Some(n.orig_id) })
        .collect();
    (rows, s.edges())
}

fn graphml(rows: &[Row], edges: &[(NodeId, NodeId)], with_orig: bool) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"status\" for=\"node\" attr.name=\"status\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"level\" for=\"node\" attr.name=\"level\" attr.type=\"int\"/>\n");
    if with_orig {
        out.push_str("  <key id=\"orig_id\" for=\"node\" attr.name=\"orig_id\" attr.type=\"int\"/>\n");
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    for r in rows {
        let _ = write!(
            out,
            "    <node id=\"n{}\"><data key=\"kind\">{}</data><data key=\"status\">{}</data><data key=\"level\">{}</data>",
            r.id, r.kind, r.status, r.level
        );
        if let (true, Some(orig)) = (with_orig, r.orig_id) {
            let _ = write!(out, "<data key=\"orig_id\">{orig}</data>");
        }
        out.push_str("</node>\n");
    }
    for (u, w) in edges {
        let _ = writeln!(out, "    <edge source=\"n{u}\" target=\"n{w}\"/>");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn dot(rows: &[Row], edges: &[(NodeId, NodeId)]) -> String {
    let mut out = String::from("digraph skeleton {\n  rankdir=TB;\n");
    for r in rows {
        let shape = match r.kind {
            GateKind::Pi | GateKind::Const0 => "invtriangle",
            GateKind::Po => "triangle",
            _ => "ellipse",
        };
        let style = match r.status {
            NodeStatus::Keep => ",style=filled,fillcolor=lightgrey",
            NodeStatus::Preserved => ",style=filled,fillcolor=lightblue",
            _ => "",
        };
        let _ = writeln!(out, "  n{} [label=\"{}\\n{}\\nL{}\",shape={shape}{style}];", r.id, r.id, r.kind, r.level);
    }
    for (u, w) in edges {
        let _ = writeln!(out, "  n{u} -> n{w};");
    }
    out.push_str("}\n");
    out
}

pub fn dep_graph_graphml(g: &DepGraph) -> String {
    let (rows, mut edges) = dep_rows(g);
    edges.sort_unstable();
    graphml(&rows, &edges, false)
}

pub fn skeleton_graphml(s: &SkeletonGraph) -> String {
    let (rows, edges) = skel_rows(s);
    graphml(&rows, &edges, true)
}

pub fn dep_graph_dot(g: &DepGraph) -> String {
    let (rows, mut edges) = dep_rows(g);
    edges.sort_unstable();
    dot(&rows, &edges)
}

pub fn skeleton_dot(s: &SkeletonGraph) -> String {
    let (rows, edges) = skel_rows(s);
    dot(&rows, &edges)
}

#[derive(Serialize)]
struct JsonNode {
    id: NodeId,
    kind: &'static str,
    status: NodeStatus,
    level: usize,
    orig_id: NodeId,
}

#[derive(Serialize)]
struct JsonSkeleton {
    nodes: Vec<JsonNode>,
    edges: Vec<(NodeId, NodeId)>,
}

pub fn skeleton_json(s: &SkeletonGraph) -> String {
    let doc = JsonSkeleton {
        nodes: s
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, n)| JsonNode { id, kind: n.kind.as_str(), status: n.status, level: n.level, orig_id: n.orig_id })
            .collect(),
        edges: s.edges(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("skeleton serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Fanin, NetworkBuilder};

    fn skeleton() -> SkeletonGraph {
        let mut b = NetworkBuilder::new();
        let x = b.pi("x");
        let y = b.pi("y");
        let g = b.and(Fanin::plain(x), Fanin::inverted(y));
        b.po("o", Fanin::plain(g));
        let mut dep = DepGraph::recover(&b.build().unwrap());
        dep.init_status();
        for v in 0..dep.len() {
            if dep.status(v) == NodeStatus::Active {
                dep.set_status(v, NodeStatus::Preserved).unwrap();
            }
        }
        dep.collect_skeleton().unwrap()
    }

    #[test]
    fn graphml_carries_required_keys() {
        let text = skeleton_graphml(&skeleton());
        let doc = roxmltree::Document::parse(&text).unwrap();
        let keys: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("key")).filter_map(|n| n.attribute("attr.name")).collect();
        assert_eq!(keys, vec!["kind", "status", "level", "orig_id"]);
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("node")).count(), 5);
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("edge")).count(), 4);
        assert!(text.contains("<data key=\"status\">preserved</data>"));
        assert!(text.contains("<data key=\"kind\">INV</data>"));
    }

    #[test]
    fn dot_and_json_are_stable() {
        let s = skeleton();
        assert_eq!(skeleton_dot(&s), skeleton_dot(&s.clone()));
        let v: serde_json::Value = serde_json::from_str(&skeleton_json(&s)).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 5);
        assert_eq!(v["nodes"][4]["kind"], "INV");
        assert!(skeleton_dot(&s).starts_with("digraph"));
    }
}
