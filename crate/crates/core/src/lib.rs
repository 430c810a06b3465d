//! Exact implicitization engine for almost-toric hypersurfaces.
//!
//! An almost-toric hypersurface is parameterized by monomials in torus
//! variables multiplied by univariate polynomials in one extra variable:
//! `u_i = t^{a_i} f_i(x)`. Given the integer exponent matrix `A` and the
//! vector of polynomials `f`, this crate computes the Newton polygon of the
//! hypersurface from the product of a Plücker matrix and a valuation matrix,
//! enumerates its lattice points, and recovers the implicit polynomial by
//! exact interpolation. Three independent degree computations serve as
//! cross-checks.
//!
//! All arithmetic is exact: arbitrary-precision integers and rationals,
//! no floating point anywhere.

pub mod degree;
pub mod exactmath;
pub mod implicitize;
pub mod instance;
pub mod pluecker;
pub mod polygon;
pub mod unipoly;
pub mod valuation;

pub use degree::{degree_from_polygon, degree_ps, degree_tropical, initial_monomial, ps_context, PsContext, PsDegree};
pub use exactmath::{IntMatrix, IntScalar, RatMatrix, RatScalar};
pub use implicitize::{
    assert_common_t_monomial, implicitize, interpolate, verify_vanishing, ImplicitPolynomial,
    Pipeline, VerifyReport,
};
pub use instance::{generate_instance, GenParams, InstanceFile};
pub use pluecker::{build_pluecker, validate_input, PlueckerData, ToricInput};
pub use polygon::{assemble_polygon, edge_matrix, lattice_points, Classification, EdgeMatrix, NewtonPolygon};
pub use unipoly::{coprime_basis, CoprimeBasis, UPoly};
pub use valuation::{build_valuation, ValuationMatrix};

/// Errors produced by the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or rejected problem input (bad matrix, zero polynomial, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Syntax error in a polynomial expression, with byte position.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// The instance defines a variety of codimension two or more.
    #[error("not a hypersurface")]
    NotHypersurface,
    /// The interpolation system only admits the zero solution; drives the
    /// orientation-fallback retry.
    #[error("interpolation nullspace is zero-dimensional")]
    NullspaceEmpty,
    /// A consistency check that should be unreachable failed; indicates a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
    /// The vanishing oracle found a nonzero residue.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
