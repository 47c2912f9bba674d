//! Ligand design by particle swarm optimization over variable-length
//! functional-group trees, scored by a 2D Van der Waals plus electrostatic
//! docking energy.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod catalog;
pub mod cli;
pub mod energy;
pub mod geometry;
pub mod harness;
pub mod pso;
pub mod render;
pub mod site;
pub mod tree;
