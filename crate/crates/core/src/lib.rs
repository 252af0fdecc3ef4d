//! Broadcast in wireless networks modeled as hypergraphs: topology
//! generators, IREN/IRON rate assignment, hypergraph min-cuts, cost metrics,
//! and a random linear network coding simulator.

pub mod cli;
pub mod error;
pub mod metrics;
pub mod mincut;
pub mod rates;
pub mod rlnc;
pub mod topology;

pub use error::{Error, Result};
