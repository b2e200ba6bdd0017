//! QoS satisfaction games for spectrum sharing.
//!
//! Each player (an unlicensed wireless user) either picks one of `C` channels
//! or stays dormant (strategy `0`). A player on channel `c` is *satisfied*
//! (utility `+1`) when the channel's congestion level does not exceed the
//! player's interference threshold `T[n][c]`, *suffering* (utility `-1`)
//! otherwise, and neutral (utility `0`) when dormant.
//!
//! The crate provides:
//!
//! - [`game`]: game construction from physical rate models, the
//!   interference-threshold transformation, utilities, and welfare;
//! - [`spatial`]: interference graphs and games on them (the non-spatial
//!   game is the complete-graph special case);
//! - [`dynamics`]: better/best-response machinery, the doubled potential
//!   function, and instrumented asynchronous update runs;
//! - [`solvers`]: the greedy social-optimum construction for homogeneous
//!   channels, round-robin assignment, exact brute-force oracles
//!   (social optimum, equilibrium enumeration), and price-of-anarchy reports;
//! - [`hardness`]: the reduction from 3-dimensional matching used as a
//!   structured test-instance generator, plus an independent matching oracle;
//! - [`simkit`]: a time-slotted simulation of the distributed channel-update
//!   protocol on random geometric topologies;
//! - [`io`]: the JSON document formats shared with the `qsg` command-line
//!   front end.

pub mod dynamics;
pub mod game;
pub mod hardness;
pub mod io;
pub mod simkit;
pub mod solvers;
pub mod spatial;

pub use game::{shannon_capacity, Contention, DemandSpec, Game, GameError, Profile, RateSpec};
pub use spatial::{InterferenceGraph, SpatialGame};
