//! Seedable Monte-Carlo simulator of route-request (RREQ) flooding in noisy
//! mobile ad hoc networks.
//!
//! The world model is a set of nodes placed uniformly in a rectangle, moving
//! in straight steps between mobility epochs. Radio links are sampled per
//! ordered node pair: an in-range transmission is received with probability
//! `p_c`, so links may be asymmetric whenever `p_c < 1`. On top of that model
//! four route-discovery disciplines are implemented:
//!
//! * `pure` - every node rebroadcasts once upon first reception,
//! * `prob` - every node rebroadcasts with a fixed probability `p_r`,
//! * `greedy-mpr` - only multipoint relays selected by a greedy set-cover
//!   heuristic rebroadcast,
//! * `ompr` - like `greedy-mpr`, but the selection branches on every greedy
//!   tie and keeps the smallest resulting relay set.
//!
//! The harness measures reachability (RCH, fraction of nodes that receive a
//! flood) and retransmission cost (RET, fraction of nodes that forward it)
//! averaged over mobility loops and sources, and sweeps them over a grid of
//! `p_c` values. All randomness flows through named, independently derived
//! ChaCha streams, so every result is reproducible byte for byte, including
//! under parallel execution.

pub mod bitset;
pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod fixture;
pub mod flood;
pub mod geometry;
pub mod harness;
pub mod mpr;
pub mod rng;

pub use config::{Algorithm, RelayKnowledge, RunSetup, SimConfig};
pub use error::{ConfigError, SimError};
pub use flood::FloodOutcome;
pub use geometry::{NeighborTables, NetworkSnapshot, NodePosition};
pub use harness::{SweepResult, SweepRow};
pub use mpr::{CoverInstance, RelayAssignment, RelaySet};
