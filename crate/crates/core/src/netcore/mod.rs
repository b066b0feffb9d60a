//! Typed gate-level Boolean networks.
//!
//! A [`BooleanNetwork`] is an immutable DAG of primary inputs, internal gates
//! and explicit primary-output nodes. Complemented AIGER literals are kept as a
//! flag on the fanin edge; inverter nodes are only materialized when the
//! dependency graph is recovered.

pub mod aiger;
pub mod graphml;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use aiger::{parse_aiger, write_aiger_ascii, write_aiger_binary, AigerError};
pub use graphml::{parse_graphml_network, GraphmlError};

/// Dense node index. Ids are `0..n` and index bit matrices directly.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Pi,
    Po,
    Const0,
    And2,
    Or2,
    Xor2,
    Inv,
    Buf,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::Pi,
        GateKind::Po,
        GateKind::Const0,
        GateKind::And2,
        GateKind::Or2,
        GateKind::Xor2,
        GateKind::Inv,
        GateKind::Buf,
    ];

    /// Number of fanins a well-formed node of this kind has.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Pi | GateKind::Const0 => 0,
            GateKind::Inv | GateKind::Buf | GateKind::Po => 1,
            GateKind::And2 | GateKind::Or2 | GateKind::Xor2 => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Pi => "PI",
            GateKind::Po => "PO",
            GateKind::Const0 => "CONST0",
            GateKind::And2 => "AND2",
            GateKind::Or2 => "OR2",
            GateKind::Xor2 => "XOR2",
            GateKind::Inv => "INV",
            GateKind::Buf => "BUF",
        }
    }

    /// Boundary signals (PIs and the constant) have no fanins and are never reduced.
    pub fn is_source(self) -> bool {
        matches!(self, GateKind::Pi | GateKind::Const0)
    }
}

impl serde::Serialize for GateKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown gate kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for GateKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// One fanin edge of a node. The signal flows from `node` into the owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fanin {
    pub node: NodeId,
    pub complemented: bool,
}

impl Fanin {
    pub fn plain(node: NodeId) -> Self {
        Fanin { node, complemented: false }
    }

    pub fn inverted(node: NodeId) -> Self {
        Fanin { node, complemented: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: GateKind,
    pub fanins: Vec<Fanin>,
    pub name: Option<String>,
}

/// A single violated network invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub node: Option<NodeId>,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Arity { kind: GateKind, expected: usize, found: usize },
    FaninOutOfRange { fanin: NodeId },
    Cycle,
    PoHasFanout { sink: NodeId },
    PiOrder,
    PoOrder,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Arity { kind, expected, found } => {
                write!(f, "arity violation: {kind} expects {expected} fanins, found {found}")?
            }
            Rule::FaninOutOfRange { fanin } => write!(f, "fanin {fanin} does not exist")?,
            Rule::Cycle => f.write_str("cycle detected")?,
            Rule::PoHasFanout { sink } => write!(f, "primary output drives node {sink}")?,
            Rule::PiOrder => f.write_str("pi_order does not list exactly the PI nodes")?,
            Rule::PoOrder => f.write_str("po_order does not list exactly the PO nodes")?,
        }
        if let Some(id) = self.node {
            write!(f, " @ {id}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid network: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("assignment does not cover primary input {0}")]
    MissingInput(NodeId),
    #[error("expected {expected} input values, got {found}")]
    InputWidth { expected: usize, found: usize },
}

/// Values for every primary input, keyed by PI node id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputAssignment {
    pub bits: BTreeMap<NodeId, bool>,
}

impl InputAssignment {
    /// Bit `i` of `word` drives the `i`-th PI in `pi_order`.
    pub fn from_word(net: &BooleanNetwork, word: u64) -> Self {
        let bits = net
            .pis()
            .iter()
            .enumerate()
            .map(|(i, &pi)| (pi, i < 64 && (word >> i) & 1 == 1))
            .collect();
        InputAssignment { bits }
    }

    pub fn from_values(net: &BooleanNetwork, values: &[bool]) -> Self {
        InputAssignment { bits: net.pis().iter().copied().zip(values.iter().copied()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanNetwork {
    nodes: Vec<Node>,
    pis: Vec<NodeId>,
    pos: Vec<NodeId>,
    topo: Vec<NodeId>,
    fanouts: Vec<Vec<NodeId>>,
    levels: Vec<usize>,
}

impl BooleanNetwork {
    /// Builds and validates a network. `pis`/`pos` fix the interface order.
    pub fn new(nodes: Vec<Node>, pis: Vec<NodeId>, pos: Vec<NodeId>) -> Result<Self, NetworkError> {
        let net = Self::from_parts_unchecked(nodes, pis, pos);
        let diags = net.validate();
        if diags.is_empty() {
            Ok(net)
        } else {
            Err(NetworkError::Invalid(diags))
        }
    }

    /// Builds a network without checking invariants, so [`validate`](Self::validate)
    /// can report on it. Evaluation of an invalid network is unspecified.
    pub fn from_parts_unchecked(nodes: Vec<Node>, pis: Vec<NodeId>, pos: Vec<NodeId>) -> Self {
        let n = nodes.len();
        let mut fanouts = vec![Vec::new(); n];
        for (id, node) in nodes.iter().enumerate() {
            for f in &node.fanins {
                if f.node < n {
                    fanouts[f.node].push(id);
                }
            }
        }
        let topo = topological_order(&nodes).unwrap_or_default();
        let mut levels = vec![0usize; n];
        for &id in &topo {
            levels[id] = nodes[id].fanins.iter().map(|f| levels[f.node] + 1).max().unwrap_or(0);
        }
        BooleanNetwork { nodes, pis, pos, topo, fanouts, levels }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn kind(&self, id: NodeId) -> GateKind {
        self.nodes[id].kind
    }

    pub fn pis(&self) -> &[NodeId] {
        &self.pis
    }

    pub fn pos(&self) -> &[NodeId] {
        &self.pos
    }

    /// Sink nodes of `id`, one entry per edge.
    pub fn fanouts(&self, id: NodeId) -> &[NodeId] {
        &self.fanouts[id]
    }

    /// Nodes in an order where every fanin precedes its sinks.
    pub fn topological_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.fanins.len()).sum()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Number of fanin edges carrying a complement flag.
    pub fn complemented_edge_count(&self) -> usize {
        self.nodes.iter().flat_map(|n| &n.fanins).filter(|f| f.complemented).count()
    }

    /// Looks a node up by its symbolic name.
    pub fn find_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name.as_deref() == Some(name))
    }

    /// Checks every structural invariant; an empty result means the network is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let n = self.nodes.len();
        let mut diags = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let expected = node.kind.arity();
            if node.fanins.len() != expected {
                diags.push(Diagnostic {
                    node: Some(id),
                    rule: Rule::Arity { kind: node.kind, expected, found: node.fanins.len() },
                });
            }
            for f in &node.fanins {
                if f.node >= n {
                    diags.push(Diagnostic { node: Some(id), rule: Rule::FaninOutOfRange { fanin: f.node } });
                } else if self.nodes[f.node].kind == GateKind::Po {
                    diags.push(Diagnostic { node: Some(f.node), rule: Rule::PoHasFanout { sink: id } });
                }
            }
        }

        let mut pis: Vec<_> = self.pis.clone();
        pis.sort_unstable();
        let expected_pis: Vec<_> = (0..n).filter(|&i| self.nodes[i].kind == GateKind::Pi).collect();
        if pis != expected_pis {
            diags.push(Diagnostic { node: None, rule: Rule::PiOrder });
        }
        let mut pos: Vec<_> = self.pos.clone();
        pos.sort_unstable();
        let expected_pos: Vec<_> = (0..n).filter(|&i| self.nodes[i].kind == GateKind::Po).collect();
        if pos != expected_pos {
            diags.push(Diagnostic { node: None, rule: Rule::PoOrder });
        }

        if let Err(at) = topological_order(&self.nodes) {
            diags.push(Diagnostic { node: Some(at), rule: Rule::Cycle });
        }
        diags
    }

    /// Evaluates every primary output under `assignment`.
    pub fn evaluate(&self, assignment: &InputAssignment) -> Result<BTreeMap<NodeId, bool>, NetworkError> {
        let mut inputs = Vec::with_capacity(self.pis.len());
        for &pi in &self.pis {
            let bit = assignment.bits.get(&pi).copied().ok_or(NetworkError::MissingInput(pi))?;
            inputs.push(bit);
        }
        let outs = self.evaluate_values(&inputs)?;
        Ok(self.pos.iter().copied().zip(outs).collect())
    }

    /// Positional evaluation: `inputs[i]` drives `pis()[i]`; outputs follow `pos()`.
    pub fn evaluate_values(&self, inputs: &[bool]) -> Result<Vec<bool>, NetworkError> {
        if inputs.len() != self.pis.len() {
            return Err(NetworkError::InputWidth { expected: self.pis.len(), found: inputs.len() });
        }
        let mut value = vec![false; self.nodes.len()];
        for (&pi, &bit) in self.pis.iter().zip(inputs) {
            value[pi] = bit;
        }
        let read = |value: &[bool], f: &Fanin| value[f.node] ^ f.complemented;
        for &id in &self.topo {
            let node = &self.nodes[id];
            value[id] = match node.kind {
                GateKind::Pi => value[id],
                GateKind::Const0 => false,
                GateKind::Po | GateKind::Buf => read(&value, &node.fanins[0]),
                GateKind::Inv => !read(&value, &node.fanins[0]),
                GateKind::And2 => read(&value, &node.fanins[0]) & read(&value, &node.fanins[1]),
                GateKind::Or2 => read(&value, &node.fanins[0]) | read(&value, &node.fanins[1]),
                GateKind::Xor2 => read(&value, &node.fanins[0]) ^ read(&value, &node.fanins[1]),
            };
        }
        Ok(self.pos.iter().map(|&po| value[po]).collect())
    }

    /// Unit-delay level of every node: sources at 0, otherwise one more than the deepest fanin.
    pub fn depth_map(&self) -> Vec<usize> {
        self.levels.clone()
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }
}

/// Kahn's algorithm over fanin lists, smallest ready id first.
/// On failure returns a node that lies on or behind a cycle.
fn topological_order(nodes: &[Node]) -> Result<Vec<NodeId>, NodeId> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = nodes.len();
    let mut indegree = vec![0usize; n];
    let mut sinks = vec![Vec::new(); n];
    for (id, node) in nodes.iter().enumerate() {
        for f in node.fanins.iter().filter(|f| f.node < n) {
            indegree[id] += 1;
            sinks[f.node].push(id);
        }
    }
    let mut ready: BinaryHeap<Reverse<NodeId>> =
        (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(id)) = ready.pop() {
        order.push(id);
        for &s in &sinks[id] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                ready.push(Reverse(s));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&i| indegree[i] > 0).unwrap_or(0))
    }
}

/// Incremental construction of networks in topological order.
#[derive(Debug, Default, Clone)]
pub struct NetworkBuilder {
    nodes: Vec<Node>,
    pis: Vec<NodeId>,
    pos: Vec<NodeId>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pi(&mut self, name: impl Into<String>) -> NodeId {
        let id = self.push(GateKind::Pi, Vec::new(), Some(name.into()));
        self.pis.push(id);
        id
    }

    pub fn const0(&mut self) -> NodeId {
        self.push(GateKind::Const0, Vec::new(), None)
    }

    pub fn gate(&mut self, kind: GateKind, fanins: &[Fanin]) -> NodeId {
        self.push(kind, fanins.to_vec(), None)
    }

    pub fn and(&mut self, a: Fanin, b: Fanin) -> NodeId {
        self.gate(GateKind::And2, &[a, b])
    }

    pub fn or(&mut self, a: Fanin, b: Fanin) -> NodeId {
        self.gate(GateKind::Or2, &[a, b])
    }

    pub fn xor(&mut self, a: Fanin, b: Fanin) -> NodeId {
        self.gate(GateKind::Xor2, &[a, b])
    }

    pub fn po(&mut self, name: impl Into<String>, driver: Fanin) -> NodeId {
        let id = self.push(GateKind::Po, vec![driver], Some(name.into()));
        self.pos.push(id);
        id
    }

    pub fn name(&mut self, id: NodeId, name: impl Into<String>) {
        self.nodes[id].name = Some(name.into());
    }

    fn push(&mut self, kind: GateKind, fanins: Vec<Fanin>, name: Option<String>) -> NodeId {
        self.nodes.push(Node { kind, fanins, name });
        self.nodes.len() - 1
    }

    pub fn build(self) -> Result<BooleanNetwork, NetworkError> {
        BooleanNetwork::new(self.nodes, self.pis, self.pos)
    }
}
