//! A numerical laboratory for Sonine subspaces of the cosine transform.
//!
//! The crate discretizes K = L^2((0,infinity), dt) on reciprocal-symmetric
//! log grids and builds, at desk scale, the chain of objects that ties the
//! cosine transform to the Riemann zeta function:
//!
//! * [`specfun`] - log-Gamma, zeta, the multiplier gamma_plus, the completed
//!   Mellin factor, and a critical-line zero oracle.
//! * [`transforms`] - grids, the cosine transform F+, the inversion I, the
//!   unitary G = I F+ I, dilations, bilinear pairing, Mellin evaluation.
//! * [`kernels`] - the truncated-cosine kernels C_a/S_a/D_a with independent
//!   series and oscillatory-quadrature evaluation routes, Cauchy-circle
//!   w-derivatives, and the analytic-continuation identity check.
//! * [`spaces`] - discretized Sonine subspaces K_{a,b} and H_Lambda,
//!   G-eigenspace splitting, evaluation functionals, Riesz representers,
//!   and common-zero scans.
//! * [`zeta_lab`] - smooth bump test functions, the operator D = u d^2/du^2 u,
//!   the arithmetic map E, the subspace W_Lambda, and the obstruction
//!   functional whose critical-line minima recover nontrivial zeta zeros.
//! * [`config`], [`report`], [`verify`] - CLI plumbing: run profiles,
//!   machine-readable reports, per-module invariant suites.

pub mod config;
pub mod error;
pub mod kernels;
pub mod quad;
pub mod report;
pub mod spaces;
pub mod specfun;
pub mod transforms;
pub mod verify;
pub mod zeta_lab;

pub use error::{Error, Result};
