//! Random linear network coding over GF(2^8), simulated at the level of
//! coefficient vectors.

mod buffer;
pub mod gf256;
mod sim;

pub use buffer::{rank_update, NodeBuffer};
pub use gf256::Gf256;
pub use sim::{run_broadcast, RoundTrace, SimParams, SimReport};
