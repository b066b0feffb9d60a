//! Boolean network skeletonization: recover a dependency graph from a
//! combinational netlist, coarsen it by homogeneous pattern reduction under a
//! fanin limit, and analyze what survives.

pub mod bitmatrix;
pub mod depgraph;
pub mod graph;
pub mod netcore;
pub mod oracle;
pub mod reduction;
pub mod analysis;
pub mod circuits;
pub mod cli;
