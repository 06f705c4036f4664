//! Dyadic cubes, cubical complexes and star-shaped dyadic domains.

mod complex;
mod cube;
mod domain;
mod neighborhood;

pub use complex::DyadicComplex;
pub use cube::{splitmix, DyadicCube};
pub use domain::Domain;
pub(crate) use neighborhood::simplex_near_box;
pub use neighborhood::{cubes_meeting, cubes_near, neighborhood_complexes, neighborhood_complexes_checked, Neighborhoods, RegimeCheck};
