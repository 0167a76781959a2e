//! Dense tensor blocks `Symᵐ V* ⊗ Λᵏ V* ⊗ W` over `V = ℝⁿ`.

mod coefficient;
pub mod index;
mod ops;

pub use coefficient::{GradedCoefficient, ValueSpace};
pub use ops::{rho_apply, rho_star, sphere_samples, sym_eval, sym_norm, NormEstimate};
