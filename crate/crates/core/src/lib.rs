//! Dyadic complexes, Federer–Fleming projections, cubical homology with
//! finitely generated coefficients, and competitor gluing near the boundary
//! of a dyadic domain, all on polyhedral sets.

pub mod competitor;
pub mod dyadic;
pub mod error;
pub mod ffproj;
pub mod geom;
pub mod geomset;
pub mod homology;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};

pub type Point64 = geom::Point<f64>;
pub type Aabb64 = geom::Aabb<f64>;
pub type PolySet64 = geomset::PolySet<f64>;
pub type Region64 = geomset::Region<f64>;
pub type SetSequence64 = geomset::SetSequence<f64>;
pub type GlueOutput64 = competitor::GlueOutput<f64>;
