//! Exact polynomials and differential operators on `n̄`, invariant
//! generators, harmonic polynomials and rational `M′` sampling.

pub mod diffop;
pub mod invariants;
pub mod ops;
pub mod poly;

pub use diffop::DiffOp;
pub use invariants::{
    harmonic_basis, invariant_generators, m_prime_invariance_check, m_prime_samples, p_polys, substitute_p,
    GeneratorCase, InvariantGenerators, LinearMap,
};
pub use ops::{Ops, Variant};
pub use poly::{Mono, Poly};
