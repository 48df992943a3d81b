//! Exact numerical invariants of geometric stability conditions on smooth
//! projective surfaces.
//!
//! Every algorithm is generic over [`Scalar`]; the crate root fixes the
//! usual instantiations. Decisions (signatures, definiteness, chamber
//! membership) are exact for [`Rational`] and [`Rational64`] and use a
//! small tolerance for floats.

pub mod chamber;
pub mod charges;
pub mod chern;
pub mod config;
pub mod equivariant;
pub mod error;
pub mod lattice;
pub mod lepotier;
pub mod linalg;
pub mod quadforms;
pub mod scalar;

#[cfg(test)]
pub(crate) mod testing;

pub use chamber::{Blocking, ChamberVerdict, HeartSide, SweepRow, WallSegment};
pub use charges::{Kernel, LinearCharge, StabilityParams, TiltParams};
pub use chern::{ChernCharacter, EnumerationBounds};
pub use config::{load_quotient, load_surface};
pub use equivariant::QuotientDatum;
pub use error::{Error, Result};
pub use lattice::{SurfaceClass, SurfaceData, SurfaceModel};
pub use lepotier::{CharacterSource, Interpolation, LePotierProvider, WitnessBounds};
pub use linalg::Matrix;
pub use quadforms::{ConeConstant, QuadForm, SupportData};
pub use scalar::{ExactScalar, Extended, Scalar, Slope};

pub use num_rational::{BigRational, Rational64};

/// Arbitrary-precision rationals; the default scalar everywhere.
pub type Rational = BigRational;

pub type Surface = SurfaceModel<Rational>;
pub type Character = ChernCharacter<Rational>;
pub type Params = StabilityParams<Rational>;
pub type Quotient = QuotientDatum<Rational>;

pub type SurfaceF64 = SurfaceModel<f64>;
pub type CharacterF64 = ChernCharacter<f64>;
pub type ParamsF64 = StabilityParams<f64>;

pub type Surface64 = SurfaceModel<Rational64>;
pub type Character64 = ChernCharacter<Rational64>;
pub type Params64 = StabilityParams<Rational64>;
