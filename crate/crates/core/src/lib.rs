//! Truncated power-series construction of torsion-free connections with a
//! prescribed radially transported curvature map.
//!
//! Given a polynomial map `S: V → K(gl(V))`, the [`solver`] builds the
//! tautological form `θ`, the connection form `ω`, the gauge `g`, the
//! Christoffel series `Γ` and its curvature, and reports how far the
//! consistency relation `dω + ω∧ω = S(θ,θ)` is from holding at each degree.
//! [`curvature_algebra`] holds the Bianchi-type membership tests and the
//! holonomy span, [`verify`] an independent parallel-transport integrator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curvature_algebra;
pub mod error;
pub mod jets;
pub mod linalg;
pub mod multilinear;
mod num;
pub mod solver;
pub mod verify;

pub use curvature_algebra::{CurvatureMap, HolonomyBasis};
pub use error::{Error, Result};
pub use jets::{FormSeries, Pairing, Validity};
pub use linalg::MatrixElement;
pub use multilinear::{GradedCoefficient, ValueSpace};
pub use solver::{RadiusEstimate, SolveConfig, SolveResult};
pub use verify::{TransportConfig, TransportResult};


