//! Discrete (η, T)-divergence-form elliptic operators.
//!
//! The operator is `𝓛u = e^η div(e^{-η} T ∇u) = div(T∇u) - ⟨∇η, T∇u⟩`, self-adjoint in
//! the weighted space `L²(e^{-η} dx)`. This crate assembles finite-difference pencils for
//!
//! * the scalar problem `-𝓛u = σu` with Dirichlet conditions,
//! * the coupled system `𝓛u + α∇(div_η u) = -σu`,
//! * the clamped fourth-order problem `𝓛²u = Γu`, `u = ∂u/∂ν_T = 0`,
//!
//! computes their low spectra with residual certificates, and evaluates the universal
//! eigenvalue inequalities these spectra must satisfy, reporting slack margins.
//!
//! Data-parallel inner loops (assembly rows, multi-RHS solves, configuration grids) use
//! rayon when the `parallel` feature is on; [`Exec`] selects the path at runtime.

pub mod assembly;
pub mod bounds;
pub mod constants;
pub mod domain;
pub mod eigen;
mod error;
pub mod exec;
pub mod functionals;
pub mod oracles;
pub mod pipeline;
pub mod sparse;

pub use assembly::{Pencil, ProblemKind};
pub use constants::OperatorConstants;
pub use domain::{DiscreteDomain, DomainSpec, EtaPreset, GridScalarField, GridTensorField, TensorPreset};
pub use eigen::{smallest_eigenpairs, Spectrum};
pub use error::{Error, Result};
pub use exec::Exec;
