//! Constructive sampling recovery for functions of mixed smoothness on ℝ^d
//! under Freud-type weights.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! * [`weight`]: weights, norm indices, rate exponents, Condition C.
//! * [`ortho`]: orthonormal polynomials for Freud densities (recurrence,
//!   zeros, scaled evaluation, Gauss rules, MRS numbers).
//! * [`interp`]: truncated Lagrange interpolation `I_m` and dyadic details.
//! * [`sparse`]: tensor samplers, the Smolyak operator `P_m`, the grid `H(m)`.
//! * [`fooling`]: bump functions vanishing on a given node set.
//! * [`bspline`]: cardinal B-splines, quasi-interpolation, periodic Smolyak `R_m`.
//! * [`assemble`]: partition of unity, budget allocation, assembled operators,
//!   hyperbolic cross Fourier projection.
//! * [`spectral`]: spectral coefficients, RKHS norm, kernel, λ=4 identities.
//! * [`metrics`], [`probe`]: weighted norms and empirical inequality probes.
//! * [`rate`]: log-log rate fitting.
#![no_std]

extern crate alloc;

pub mod assemble;
pub mod bspline;
mod error;
pub mod fooling;
pub mod func;
pub mod interp;
pub mod jet;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod ortho;
pub mod probe;
pub mod quad;
pub mod rate;
pub mod scaled;
pub mod sparse;
pub mod spectral;
pub mod weight;

pub use error::{Error, Result};
pub use weight::{NormIndex, RateExponents, WeightSpec};
