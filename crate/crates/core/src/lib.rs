//! Sigma-max hybrid inference for state estimation and recognition.
//!
//! * [`uncertainty`]: finite probability/possibility distributions, hybrid
//!   joints, Klir transforms, compositions and updates.
//! * [`gaussian`]: Kalman filtering and the possibilistic Gaussian recursion.
//! * [`jump_markov`]: transition matrices, kinematic models, model banks.
//! * [`multi_model`]: the IMM and hybrid IMM (HIMM) filter cycles.
//! * [`classifier`]: sequential sigma/max pattern classifiers.

// `!(x >= 0.0)` style checks deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod error;
pub mod gaussian;
pub mod jump_markov;
pub mod multi_model;
pub mod uncertainty;

pub use error::{Error, Result};
pub use gaussian::{LinearGaussianModel, StateEstimate};
pub use jump_markov::{ModelBank, StateLayout, TransitionPossibilityMatrix, TransitionProbabilityMatrix};
pub use multi_model::{CycleOutput, HimmOptions, HimmState, ImmState};
