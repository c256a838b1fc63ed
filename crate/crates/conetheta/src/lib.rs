//! Theta series on symmetric cones.
//!
//! The crate evaluates lattice theta series attached to a positive bilinear
//! form and a Jordan-algebra representation on a tube domain, with certified
//! truncation error, and verifies the transformation identities these series
//! satisfy (periodicities, linear substitution, the Poisson-summation
//! transformation, and the full transformation formula) as numerical checks.
//!
//! Floating-point kernels are generic over the scalar type via
//! [`scalar::Real`] (`f32` or `f64`); lattice arithmetic is exact rational.
//! Concrete `f64` aliases live at the crate root.
//!
//! Only special Jordan kinds ship (the real line, real symmetric and complex
//! Hermitian matrices, spin factors, and direct sums): the exceptional
//! 27-dimensional algebra admits no theta series of this type.

// Index-based loops are the house style for the small dense kernels here.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod jordan;
pub mod lattice;
pub mod linalg;
pub mod rational;
pub mod report;
pub mod representation;
pub mod sampling;
pub mod scalar;
pub mod suite;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use jordan::{AlgebraDescriptor, AlgebraElement, AlgebraKind};
pub use lattice::{Lattice, PeriodLattice};
pub use report::{EvaluationReport, VerificationReport};
pub use representation::{RawRepresentation, RepresentationConfig};
pub use scalar::Real;
pub use suite::{CheckKind, SuiteSpec, ToleranceSet};
pub use theta::{theta_eval, ThetaEvaluation};

/// Algebra element with `f64` scalars.
pub type Element64 = jordan::AlgebraElement<f64>;
/// Representation configuration with `f64` scalars.
pub type Config64 = representation::RepresentationConfig<f64>;
/// Theta evaluation with `f64` scalars.
pub type Evaluation64 = theta::ThetaEvaluation<f64>;
/// Complex scalar over `f64`.
pub type Complex64 = scalar::C<f64>;
