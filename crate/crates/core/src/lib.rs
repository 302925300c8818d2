//! Symmetry breaking kernels on H-type nilradicals `n̄ = F^n ⊕ Im F`.
//!
//! The crate is split into exact layers (rational hypercomplex arithmetic,
//! Gamma-factor bookkeeping, sparse polynomials and differential operators)
//! and numeric layers (pointwise kernel checks, quadrature).  Everything that
//! can be decided exactly is decided over `Q`.

pub mod error;
pub mod exec;
pub mod rat;
pub mod linalg;
pub mod combinatorics;

pub mod hypercomplex;
pub mod pair_config;
pub mod gamma_expr;
pub mod poly_algebra;
pub mod fourier_verifier;
pub mod kernel_families;
pub mod quadrature_lab;

pub use error::{Error, Result};
pub use rat::Q;
