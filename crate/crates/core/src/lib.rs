//! Model of the three-stage feedforward displacement receiver for weak
//! 3-PSK and 4-PSK coherent-state signals.
//!
//! The crate evaluates the receiver's channel matrix exactly by walking its
//! decision tree, cross-checks it with a seeded Monte-Carlo simulator, and
//! optimizes the input prior for mutual information and for the cutoff rate.
//! Heterodyne (standard quantum limit) and Helstrom baselines are provided
//! for comparison, and [`sweep`] turns all of it into figure-ready rows.

// `!(x > 0.0)` also rejects NaN; matrix loops read better indexed
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod error;
pub mod info;
pub mod receiver;
pub mod simulator;
pub mod sweep;

pub use error::{Error, Result};
pub use info::{OptimizationReport, PriorDistribution};
pub use receiver::{ChannelMatrix, DecisionTree, ReceiverConfig};
