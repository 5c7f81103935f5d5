//! Balanced loads of graphs and their use for recovering the hidden
//! matching between two correlated random graphs.

pub mod balance;
pub mod flow;
pub mod graph;
pub mod intersect;
pub mod limitdist;
pub mod model;
pub mod moments;
pub mod oracles;
pub mod orbits;
pub mod rational;
pub mod recovery;

pub use balance::{balanced_loads, Allocation, Block, LoadProfile};
pub use graph::{Graph, GraphError, VertexSet};
pub use intersect::{Matching, PartialMatching};
pub use model::{CorrelatedPair, ModelParams};
pub use rational::Rational;
