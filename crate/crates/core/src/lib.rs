//! Exact incidence geometry for lines in three-space.

pub mod cluster;
pub mod error;
pub mod es;
pub mod geometry;
pub mod harness;
pub mod incidence;
pub mod io;
pub mod linalg;
pub mod partition;
pub mod poly;
pub mod rational;
pub mod surfaces;

pub use error::{Error, Result};
pub use geometry::{classify_pair, dist_sq, Line3, PairClass, Point2, Point3};
pub use poly::{SignVector, TriPoly, UniPoly};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-geometry.md")]
    mod exact_geometry {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/line-families.md")]
    mod line_families {}
    #[doc = include_str!("../../../book/src/rich-points.md")]
    mod rich_points {}
    #[doc = include_str!("../../../book/src/partitioning.md")]
    mod partitioning {}
    #[doc = include_str!("../../../book/src/surface-clusters.md")]
    mod surface_clusters {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
