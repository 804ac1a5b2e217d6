//! Cavity model of annular-sector microstrip patches: eigenmodes, driven
//! fields, far-field patterns, multiport superposition and antenna metrics.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32`, `f64`); the
//! aliases below fix the scalar for the common cases.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod error;
pub mod metrics;
pub mod quadrature;
pub mod radiator;
pub mod scalar;
pub mod specfun;
pub mod synthesis;

pub use error::{Error, Result};

pub type SectorGeometry64 = cavity::SectorGeometry<f64>;
pub type SectorGeometry32 = cavity::SectorGeometry<f32>;
pub type Mode64 = cavity::Mode<f64>;
pub type Mode32 = cavity::Mode<f32>;
pub type DrivenField64 = cavity::DrivenField<f64>;
pub type DrivenField32 = cavity::DrivenField<f32>;
pub type PatternGrid64 = radiator::PatternGrid<f64>;
pub type PatternGrid32 = radiator::PatternGrid<f32>;
pub type FieldSample64 = radiator::FieldSample<f64>;
pub type ExcitationSet64 = synthesis::ExcitationSet<f64>;
pub type ExcitationSet32 = synthesis::ExcitationSet<f32>;
