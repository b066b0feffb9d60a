//! Read-only DAG view shared by the analysis routines.

use crate::netcore::{BooleanNetwork, GateKind, NodeId};

pub trait Dag {
    /// Size of the id space; some ids may be absent (see [`Dag::contains`]).
    fn id_bound(&self) -> usize;
    fn contains(&self, v: NodeId) -> bool;
    fn kind(&self, v: NodeId) -> GateKind;
    fn fanin_ids(&self, v: NodeId) -> Vec<NodeId>;
    fn fanout_ids(&self, v: NodeId) -> Vec<NodeId>;
    /// Unit-delay level.
    fn level(&self, v: NodeId) -> usize;

    fn live_nodes(&self) -> Vec<NodeId> {
        (0..self.id_bound()).filter(|&v| self.contains(v)).collect()
    }
}

impl Dag for BooleanNetwork {
    fn id_bound(&self) -> usize {
        self.len()
    }

    fn contains(&self, v: NodeId) -> bool {
        v < self.len()
    }

    fn kind(&self, v: NodeId) -> GateKind {
        BooleanNetwork::kind(self, v)
    }

    fn fanin_ids(&self, v: NodeId) -> Vec<NodeId> {
        self.node(v).fanins.iter().map(|f| f.node).collect()
    }

    fn fanout_ids(&self, v: NodeId) -> Vec<NodeId> {
        self.fanouts(v).to_vec()
    }

    fn level(&self, v: NodeId) -> usize {
        self.levels()[v]
    }
}
