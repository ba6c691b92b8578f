//! Computational kernel for finite groupoids, crossed modules and crossed
//! complexes: homotopy groups, Postnikov towers, 2-extensions and 2-torsors,
//! and the simplicial classifying functors with Eilenberg–MacLane objects.

pub mod abelian;
pub mod cli;
pub mod coefficients;
pub mod crs;
pub mod error;
pub mod ext_torsor;
pub mod fixtures;
pub mod group;
pub mod groupoid;
pub mod internal_gpd;
pub mod io;
pub mod simplicial;
pub mod linalg;
pub mod xmod;

pub use error::{Error, Result};
