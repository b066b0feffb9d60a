//! GraphML reader for typed networks.
//!
//! Nodes carry a `kind` data attribute (one of the [`GateKind`] tags) and an
//! optional `name`. Directed edges run fanin → node; the document order of a
//! node's incoming edges is its fanin order. An optional boolean edge attribute
//! `complemented` marks inverted fanins.

use std::collections::HashMap;

use thiserror::Error;

use super::{BooleanNetwork, Diagnostic, Fanin, GateKind, Node, NetworkError};

#[derive(Debug, Error)]
pub enum GraphmlError {
    #[error("xml: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("no <graph> element")]
    NoGraph,
    #[error("node `{0}` has no `kind` attribute")]
    MissingKind(String),
    #[error("node `{node}`: unknown kind `{kind}`")]
    UnknownKind { node: String, kind: String },
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("edge references unknown node `{0}`")]
    UnknownNode(String),
    #[error("element <{0}> is missing attribute `{1}`")]
    MissingAttribute(&'static str, &'static str),
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

pub fn parse_graphml_network(bytes: &[u8]) -> Result<BooleanNetwork, GraphmlError> {
    let text = String::from_utf8_lossy(bytes);
    let doc = roxmltree::Document::parse(&text)?;

    // key id -> attribute name, for node and edge domains
    let mut keys: HashMap<&str, &str> = HashMap::new();
    for key in doc.descendants().filter(|n| n.has_tag_name("key")) {
        if let (Some(id), Some(name)) = (key.attribute("id"), key.attribute("attr.name")) {
            keys.insert(id, name);
        }
    }
    let data = |el: roxmltree::Node, wanted: &str| -> Option<String> {
        el.children()
            .filter(|c| c.has_tag_name("data"))
            .find(|c| c.attribute("key").map(|k| keys.get(k).copied().unwrap_or(k)) == Some(wanted))
            .map(|c| c.text().unwrap_or("").trim().to_string())
    };

    let graph = doc.descendants().find(|n| n.has_tag_name("graph")).ok_or(GraphmlError::NoGraph)?;

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut nodes = Vec::new();
    for el in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = el.attribute("id").ok_or(GraphmlError::MissingAttribute("node", "id"))?.to_string();
        let kind_text = data(el, "kind").ok_or_else(|| GraphmlError::MissingKind(id.clone()))?;
        let kind: GateKind = kind_text
            .parse()
            .map_err(|_| GraphmlError::UnknownKind { node: id.clone(), kind: kind_text.clone() })?;
        let name = data(el, "name").or_else(|| Some(id.clone()));
        if index.insert(id.clone(), nodes.len()).is_some() {
            return Err(GraphmlError::DuplicateNode(id));
        }
        nodes.push(Node { kind, fanins: Vec::new(), name });
    }

    for el in graph.children().filter(|n| n.has_tag_name("edge")) {
        let src = el.attribute("source").ok_or(GraphmlError::MissingAttribute("edge", "source"))?;
        let dst = el.attribute("target").ok_or(GraphmlError::MissingAttribute("edge", "target"))?;
        let s = *index.get(src).ok_or_else(|| GraphmlError::UnknownNode(src.to_string()))?;
        let d = *index.get(dst).ok_or_else(|| GraphmlError::UnknownNode(dst.to_string()))?;
        let complemented = matches!(data(el, "complemented").as_deref(), Some("true" | "1"));
        nodes[d].fanins.push(Fanin { node: s, complemented });
    }

    let pis = (0..nodes.len()).filter(|&i| nodes[i].kind == GateKind::Pi).collect();
    let pos = (0..nodes.len()).filter(|&i| nodes[i].kind == GateKind::Po).collect();
    BooleanNetwork::new(nodes, pis, pos).map_err(|e| match e {
        NetworkError::Invalid(d) => GraphmlError::Invalid(d),
        other => unreachable!("construction only reports invalid networks: {other}"),
    })
}
