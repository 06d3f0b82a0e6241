//! Generalized F- and V-iteration of maps `A^n -> A^m` (`m <= n`), with tools
//! to locate fixed points, classify attractors, find bifurcation and
//! trifurcation parameter values, estimate Feigenbaum ratios, order periods
//! and rasterize basins and escape-time sets.
//!
//! The numerical core is generic over [`Scalar`] (real or complex) and, where
//! an ordering is needed, [`Real`]. The aliases below fix the common
//! double-precision instantiations.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod engine;
pub mod error;
pub mod expr;
pub mod families;
pub mod raster;
pub mod scalar;
pub mod scan;

pub use engine::{iterate, IterState, MapSpec, Scheme, SequenceRecord};
pub use error::{Error, Result};
pub use families::{make_family, FamilyId, FamilyKind};
pub use scalar::{Real, Scalar};

pub use num_complex::Complex64;

/// Real double-precision map.
pub type RealMap = MapSpec<f64>;
/// Complex double-precision map.
pub type ComplexMap = MapSpec<Complex64>;
pub type RealSequence = SequenceRecord<f64>;
pub type ComplexSequence = SequenceRecord<Complex64>;
pub type RealReport = analysis::AttractorReport<f64>;
pub type ComplexReport = analysis::AttractorReport<Complex64>;
