//! Coherence of bosonic states in truncated Fock spaces.
//!
//! The crate quantifies how much quantum coherence (off-diagonal content in
//! the photon-number basis) the standard quantum-optics states carry, under
//! energy constraints that make the infinite-dimensional problem well posed:
//!
//! - [`special`]: log-space factorials, binomials, Hermite polynomials and
//!   the Li₋₁/₂ polylogarithm;
//! - [`fock`]: truncated pure states, number distributions, dense density
//!   matrices and sparse two-mode states, all carrying certified tail bounds;
//! - [`states`]: constructors for the geometric-amplitude maximal coherent
//!   state, coherent / squeezed / thermal states, multi-mode maximal
//!   distributions, two-mode squeezed vacuum and a block-exact 50:50 beam
//!   splitter;
//! - [`measures`]: relative entropy of coherence, l1 norm of coherence,
//!   g²(0), and the closed-form coherence maxima;
//! - [`gaussian`]: quadrature covariance matrices and the det γ purity
//!   diagnostic;
//! - [`optimize`]: entropy and √P maximization under moment constraints
//!   with KKT residual certificates.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod measures;
pub mod optimize;
pub mod special;
pub mod states;
mod sum;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, NumberDistribution, PureFockState, TwoModePureState};
pub use measures::LogBase;
pub use states::{PhaseRule, TruncationPolicy};
