//! Corruption-tolerant distributed gradient descent.
//!
//! A parameter server broadcasts the model to m workers over a noisy
//! downlink; workers return shard gradients over a noisy uplink after an
//! adversary, constrained by an l2 budget over the horizon, corrupts them.
//! The crate implements the vanilla DGD baseline and the mirror
//! descent-based robust algorithms (RDGD, its strongly convex variant, and
//! the restart scheme that switches stepsize schedules at an analytic
//! transition time), together with the losses, channels, schedules, bound
//! evaluators, and the experiment CLI used to reproduce the convergence and
//! classification studies at desk scale.

pub mod bounds;
pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod io;
pub mod losses;
pub mod mirror;
pub mod numerics;
pub mod schedule;

pub use error::{Error, Result};
