//! Stochastic momentum optimizers with measurable convergence diagnostics.
//!
//! The crate implements the unified momentum update (one recursion covering
//! SGD, heavy ball, and Nesterov via a single parameter s), a perturbed Adam
//! variant with provably sandwiched stepsizes, stochastic gradient oracles
//! with certifiable noise assumptions, and the auxiliary sequences
//! (p_t, v_t, z_t, running sums, upcrossings) that make the convergence
//! argument's intermediate objects observable at run time.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod oracles;
pub mod optim;
pub mod policy;
pub mod rng;
pub mod schedules;
mod stats;
pub mod vec;
pub mod verify;

pub use error::{Error, Result};
pub use policy::NumericPolicy;
pub use rng::{split_stream, RngStream};
pub use vec::{vec_axpy, PointVec};
