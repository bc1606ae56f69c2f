//! End-to-end scan planning: triangulate, build feasible regions, merge, and
//! place one scan point per group.

use serde::{Deserialize, Serialize};

use crate::error::TriangulationError;
use crate::geom::{curvilinear_hull, ConvexPolygon, Disc, DiscGrid, Point};
use crate::laguerre::{laguerre_delaunay, TriangulationMesh};
use crate::slab::{classify_shape, feasible_region, merge_regions, scan_point_of, FeasibleRegion, ScanPlan};

/// A triangle left out of the plan, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleIssue {
    pub triangle_id: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutcome {
    pub mesh: TriangulationMesh,
    /// Regions for every triangle that has one, ascending triangle id.
    pub regions: Vec<FeasibleRegion>,
    /// Triangles whose region was empty or degenerate, or whose group had
    /// no valid scan point.
    pub issues: Vec<TriangleIssue>,
    /// Triangles whose region had a vertex count outside 4..=6.
    pub shape_violations: Vec<usize>,
    pub plan: ScanPlan,
}

impl PlanOutcome {
    pub fn is_complete(&self) -> bool {
        self.plan.uncovered_triangles.is_empty()
    }
}

pub fn plan_scans(discs: &[Disc]) -> Result<PlanOutcome, TriangulationError> {
    let mesh = laguerre_delaunay(discs)?;
    let mut regions = Vec::with_capacity(mesh.triangles.len());
    let mut issues = Vec::new();
    let mut shape_violations = Vec::new();
    for (id, &tri) in mesh.triangles.iter().enumerate() {
        match feasible_region(id, tri, discs) {
            Ok(r) => {
                if classify_shape(&r).is_err() {
                    shape_violations.push(id);
                }
                regions.push(r);
            }
            Err(e) => issues.push(TriangleIssue { triangle_id: id, message: e.to_string() }),
        }
    }
    // Scan points stay inside the curvilinear hull of the stems.
    let hull = curvilinear_hull(discs, HULL_SAMPLES);
    let mut placement = Vec::with_capacity(regions.len());
    for r in &regions {
        match hull.as_ref().map_or(Some(r.polygon.clone()), |h| clip_to_hull(&r.polygon, h)) {
            Some(polygon) => placement.push(FeasibleRegion { polygon, ..r.clone() }),
            None => issues.push(TriangleIssue {
                triangle_id: r.triangle_id,
                message: "feasible region lies outside the curvilinear convex hull".into(),
            }),
        }
    }
    let mut plan = merge_regions(&placement, &mesh.adjacency);

    let grid = DiscGrid::new(discs);
    let mut dropped = Vec::new();
    for (gi, group) in plan.groups.iter_mut().enumerate() {
        let (lo, hi) = bounds(group.region.vertices());
        let local: Vec<Disc> = grid.near_box(lo, hi).into_iter().map(|i| discs[i]).collect();
        match scan_point_of(&group.region, &local) {
            Ok(p) => group.scan_point = p,
            Err(e) => {
                for &m in &group.members {
                    issues.push(TriangleIssue { triangle_id: m, message: e.to_string() });
                }
                dropped.push(gi);
            }
        }
    }
    for gi in dropped.into_iter().rev() {
        let g = plan.groups.remove(gi);
        plan.uncovered_triangles.extend(g.members);
    }
    plan.uncovered_triangles.sort_unstable();
    issues.sort_by_key(|i| i.triangle_id);
    Ok(PlanOutcome { mesh, regions, issues, shape_violations, plan })
}

/// Boundary samples per disc for the hull polygon (1° spacing).
pub const HULL_SAMPLES: usize = 360;

fn clip_to_hull(region: &ConvexPolygon, hull: &ConvexPolygon) -> Option<ConvexPolygon> {
    if region.vertices().iter().all(|&v| hull.contains(v)) {
        return Some(region.clone());
    }
    region.intersect(hull)
}

fn bounds(points: &[Point]) -> (Point, Point) {
    points.iter().fold(
        (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN)),
        |(lo, hi), p| (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y))),
    )
}
