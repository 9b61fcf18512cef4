//! Simple quasi-states on discretized closed surfaces.
//!
//! The crate builds equal-area sphere and flat torus grids, samples scalar
//! fields on them, and evaluates the median quasi-state machinery on top:
//! contour trees with measure-weighted branches, solid-set quasi-measures,
//! the non-additivity defect `Π`, numerical Poisson brackets, moment-map
//! rasterization, and perturbation probes for the `C⁰` rigidity of the
//! bracket sup norm.

pub mod corpus;
pub mod error;
pub mod expr;
mod geom;
pub mod mesh;
pub mod momentmap;
pub mod quasi;
pub mod rigidity;
pub mod symplectic;
pub mod topology;

pub use geom::RasterGrid;

pub use error::{Error, Result};
pub use mesh::{ScalarField, SurfaceMesh, Topology};
pub use quasi::{QuasiState, SimpleQuasiMeasure};
pub use topology::ContourTree;
