//! Goldman brackets, intersection angles and Fenchel–Nielsen twist flows for
//! closed geodesics on explicit hyperbolic surfaces.
//!
//! Surfaces are given as discrete faithful representations of a free group
//! into PSL(2, R) acting on the upper half-plane. Free homotopy classes of
//! closed curves are conjugacy classes of words; their geodesic
//! representatives lift to axes of the corresponding Möbius maps.

pub mod angles;
pub mod cli;
pub mod error;
pub mod goldman;
pub mod group;
pub mod hypgeom;
pub mod surface;
pub mod svg;
pub mod tol;
pub mod twist;

pub use error::{Error, Result};
pub use goldman::{BracketSum, IntersectionRecord};
pub use group::{ConjClass, Letter, Word};
pub use hypgeom::{BoundaryPoint, Geodesic, HPoint, IsometryClass, MoebiusMap};
pub use surface::{MetricSampler, SurfaceKind, SurfaceRep};
pub use tol::Tolerances;
