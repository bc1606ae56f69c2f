//! Scanner placement for illuminating circular stems.
//!
//! Given nonoverlapping discs (stem cross-sections), the planner triangulates
//! them with the Laguerre Delaunay triangulation, intersects the three slabs
//! of every triangle into a feasible region, merges overlapping regions of
//! neighboring triangles, and puts one scan point in each merged region. The
//! [`visibility`] module measures how much of every boundary the resulting
//! scan points actually illuminate.

pub mod error;
pub mod geom;
pub mod io;
pub mod laguerre;
pub mod plan;
pub mod scenario;
pub mod slab;
pub mod svg;
pub mod visibility;

pub use error::{GeomError, RegionError, ScenarioError, TriangulationError, VisibilityError};
pub use geom::{ConvexPolygon, Disc, HalfPlane, Point, Segment, EPS, EPS_AREA};
pub use laguerre::{laguerre_delaunay, TriangulationMesh};
pub use plan::{plan_scans, PlanOutcome};
pub use slab::{FeasibleRegion, ScanGroup, ScanPlan};
pub use visibility::{coverage, ArcSet, CoverageReport};
