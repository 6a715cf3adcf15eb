//! Version age of information in gossip networks under link jamming.
//!
//! A source pushes fresh versions of a file to `n` nodes, which gossip
//! among themselves over Poisson-timed links. Jammers permanently cut
//! inter-node links. This crate computes the long-run expected version age
//! exactly (subset recursion, interval recursions, closed forms), generates
//! jammer placements for rings and fully connected networks, simulates the
//! process, and runs the scaling sweeps.

pub mod error;
pub mod experiments;
pub mod network;
pub mod placement;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use network::{Component, ComponentDecomposition, GossipNetwork, JammerSet, LinkDenominator, LinkRates, Shape};
pub use solver::AgeReport;
