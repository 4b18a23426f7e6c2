//! Dynamical decoupling under stochastic pulse imperfections.
//!
//! Each ideal pulse `u` is replaced by the solution of the Ito equation
//! `du = (−γ/2 B² dt − i√γ B dW) u`, with one Wiener variable shared by every
//! pulse of a run. The crate provides
//!
//! * finite-pulse noisy propagation ([`dynamics::propagate_finite_pulses`]),
//! * the continuous-control limit operators ℋ and ℬ through the ergodic
//!   projector onto the commutant of the cycle unitary ([`scheme`]),
//! * single-realization and averaged limit dynamics ([`dynamics`]),
//! * closed-form convergence bounds and their Monte Carlo counterparts ([`bounds`]).
//!
//! Trajectory ensembles run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; results are bit-identical either way.

pub mod bounds;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod operators;
pub mod scheme;
pub mod stochastic;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64 as C64;
