//! Signal geometry, detector model, feedforward decision tree and the exact
//! channel matrix of the displacement receiver.

pub mod appendix;
mod channel;
mod config;
mod geometry;
mod tree;

pub use channel::{exact_channel_matrix, path_terms, ChannelMatrix, PathTerm, StageFactor};
pub use config::{ReceiverConfig, DEFAULT_ETA, DEFAULT_GAMMA, DEFAULT_R1, DEFAULT_R2, STAGES};
pub use geometry::{off_probability, residual_distance_sq};
pub use tree::{build_decision_tree, DecisionTree, LeafDecision, Outcome};
