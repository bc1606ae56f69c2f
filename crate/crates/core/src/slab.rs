//! Slabs, objective arcs, feasible regions and the greedy region merge.
//!
//! For two disjoint discs the slab is the strip between the tangents at the
//! points where the center segment leaves each disc. Every point of the strip
//! sees both of those points. Three slabs over a triangle of the
//! triangulation cut out a convex 4- to 6-gon, the feasible region, from which
//! the three objective arcs (the short arcs between the triangle-edge exits on
//! each disc) are fully visible. Adjacent triangles whose regions overlap can
//! share one scan point placed in the overlap.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::RegionError;
use crate::geom::{
    intersect_halfplanes, orient, polygon_centroid, tangent_line_at, Clipped, ConvexPolygon, Disc,
    HalfPlane, Point, EPS, EPS_AREA,
};
use crate::laguerre::power_distance;
use crate::visibility::{normalize_angle, AngularInterval};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub disc_i: usize,
    pub disc_j: usize,
    /// Exit point of the center segment on disc `i`.
    pub p_i: Point,
    pub p_j: Point,
    /// Tangent half-plane at `p_i` excluding disc `i`.
    pub hp_i: HalfPlane,
    pub hp_j: HalfPlane,
}

impl Slab {
    pub fn width(&self) -> f64 {
        self.p_i.dist(self.p_j)
    }

    pub fn halfplanes(&self) -> [HalfPlane; 2] {
        [self.hp_i, self.hp_j]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.hp_i.contains(p) && self.hp_j.contains(p)
    }
}

pub fn build_slab(discs: &[Disc], i: usize, j: usize) -> Result<Slab, RegionError> {
    let (di, dj) = (&discs[i], &discs[j]);
    let width = di.gap(dj);
    if width <= EPS {
        return Err(RegionError::OverlappingDiscs { i, j, width });
    }
    let u = (dj.center - di.center) * (1.0 / di.center.dist(dj.center));
    let p_i = di.center + u * di.radius;
    let p_j = dj.center - u * dj.radius;
    // Both points are on their boundaries by construction.
    let hp_i = tangent_line_at(di, p_i).expect("exit point on boundary");
    let hp_j = tangent_line_at(dj, p_j).expect("exit point on boundary");
    Ok(Slab { disc_i: i, disc_j: j, p_i, p_j, hp_i, hp_j })
}

/// The short boundary arc of one triangle vertex disc between its two edge exits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveArc {
    pub disc_id: usize,
    pub interval: AngularInterval,
}

pub fn objective_arcs(triangle: [usize; 3], discs: &[Disc]) -> Result<[ObjectiveArc; 3], RegionError> {
    check_triangle(triangle, discs)?;
    let arc = |k: usize| -> Result<ObjectiveArc, RegionError> {
        let i = triangle[k];
        let c = discs[i].center;
        let a = (discs[triangle[(k + 1) % 3]].center - c).angle();
        let b = (discs[triangle[(k + 2) % 3]].center - c).angle();
        let ab = normalize_angle(b - a);
        if (ab - std::f64::consts::PI).abs() <= 1e-12 {
            return Err(RegionError::DegenerateTriangle(triangle));
        }
        let interval = if ab < std::f64::consts::PI {
            AngularInterval::new(a, ab)
        } else {
            AngularInterval::new(b, std::f64::consts::TAU - ab)
        };
        Ok(ObjectiveArc { disc_id: i, interval })
    };
    Ok([arc(0)?, arc(1)?, arc(2)?])
}

fn check_triangle(triangle: [usize; 3], discs: &[Disc]) -> Result<(), RegionError> {
    let [a, b, c] = triangle.map(|i| discs[i].center);
    if a == b || b == c || a == c || orient(a, b, c).abs() <= 2.0 * EPS_AREA {
        return Err(RegionError::DegenerateTriangle(triangle));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    pub triangle_id: usize,
    pub triangle: [usize; 3],
    pub polygon: ConvexPolygon,
    /// Vertex count of `polygon`.
    pub shape: usize,
    pub objective_arcs: [ObjectiveArc; 3],
}

/// Slabs of the three edges of `triangle`, in edge order (0,1), (1,2), (2,0).
pub fn triangle_slabs(triangle: [usize; 3], discs: &[Disc]) -> Result<[Slab; 3], RegionError> {
    let [a, b, c] = triangle;
    Ok([build_slab(discs, a, b)?, build_slab(discs, b, c)?, build_slab(discs, c, a)?])
}

pub fn feasible_region(
    triangle_id: usize,
    triangle: [usize; 3],
    discs: &[Disc],
) -> Result<FeasibleRegion, RegionError> {
    check_triangle(triangle, discs)?;
    let slabs = triangle_slabs(triangle, discs)?;
    let planes: Vec<HalfPlane> = slabs.iter().flat_map(Slab::halfplanes).collect();
    let polygon = match intersect_halfplanes(&planes) {
        Clipped::Bounded(p) => p,
        Clipped::Empty => return Err(RegionError::EmptyRegion(triangle)),
        Clipped::Unbounded => return Err(RegionError::DegenerateTriangle(triangle)),
    };
    let objective_arcs = objective_arcs(triangle, discs)?;
    Ok(FeasibleRegion { triangle_id, triangle, shape: polygon.len(), polygon, objective_arcs })
}

/// Vertex count of the region, which must be 4, 5 or 6.
pub fn classify_shape(region: &FeasibleRegion) -> Result<usize, RegionError> {
    let n = region.polygon.len();
    if (4..=6).contains(&n) {
        Ok(n)
    } else {
        Err(RegionError::ShapeViolation { triangle: region.triangle, vertices: n })
    }
}

/// One scan position serving a set of triangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanGroup {
    /// Triangle ids, ascending.
    pub members: Vec<usize>,
    pub region: ConvexPolygon,
    pub scan_point: Point,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan {
    pub groups: Vec<ScanGroup>,
    /// Triangles without a usable feasible region.
    pub uncovered_triangles: Vec<usize>,
}

impl ScanPlan {
    pub fn scan_points(&self) -> Vec<Point> {
        self.groups.iter().map(|g| g.scan_point).collect()
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    members: Vec<usize>,
    region: ConvexPolygon,
}

/// Greedy grouping of overlapping feasible regions.
///
/// Each unassigned triangle proposes itself plus every unassigned neighbor
/// (ascending id) that keeps the running intersection nonempty. The largest
/// proposal wins, ties going to the lowest seed id; its members are assigned
/// and the loop repeats. Scan points are region centroids.
pub fn merge_regions(regions: &[FeasibleRegion], adjacency: &[Vec<usize>]) -> ScanPlan {
    let n = adjacency.len();
    let mut polys: Vec<Option<&ConvexPolygon>> = vec![None; n];
    for r in regions {
        if r.triangle_id < n {
            polys[r.triangle_id] = Some(&r.polygon);
        }
    }
    let uncovered_triangles: Vec<usize> = (0..n).filter(|&t| polys[t].is_none()).collect();
    let mut assigned: Vec<bool> = polys.iter().map(Option::is_none).collect();

    let candidate = |t: usize, assigned: &[bool]| -> Candidate {
        let mut region = polys[t].unwrap().clone();
        let mut members = vec![t];
        for &nb in &adjacency[t] {
            if assigned[nb] {
                continue;
            }
            if let Some(next) = region.intersect(polys[nb].unwrap()) {
                region = next;
                members.push(nb);
            }
        }
        members.sort_unstable();
        Candidate { members, region }
    };

    let mut cache: Vec<Option<Candidate>> = vec![None; n];
    // Ordered by (descending size, ascending seed).
    let mut queue: BTreeSet<(std::cmp::Reverse<usize>, usize)> = BTreeSet::new();
    for t in 0..n {
        if !assigned[t] {
            let c = candidate(t, &assigned);
            queue.insert((std::cmp::Reverse(c.members.len()), t));
            cache[t] = Some(c);
        }
    }

    let mut groups = Vec::new();
    while let Some((_, seed)) = queue.pop_first() {
        let chosen = cache[seed].take().expect("queued candidate");
        for &m in &chosen.members {
            assigned[m] = true;
            if let Some(c) = cache[m].take() {
                queue.remove(&(std::cmp::Reverse(c.members.len()), m));
            }
        }
        // Only proposals next to the new group can change.
        let mut stale: Vec<usize> = chosen
            .members
            .iter()
            .flat_map(|&m| adjacency[m].iter().copied())
            .filter(|&t| !assigned[t])
            .collect();
        stale.sort_unstable();
        stale.dedup();
        for t in stale {
            if let Some(old) = cache[t].take() {
                queue.remove(&(std::cmp::Reverse(old.members.len()), t));
            }
            let c = candidate(t, &assigned);
            queue.insert((std::cmp::Reverse(c.members.len()), t));
            cache[t] = Some(c);
        }
        let region = group_intersection(&chosen.members, &polys).unwrap_or(chosen.region);
        let scan_point = polygon_centroid(&region).expect("nonempty region has positive area");
        groups.push(ScanGroup { members: chosen.members, region, scan_point });
    }
    ScanPlan { groups, uncovered_triangles }
}

/// Intersection of member regions clipped in ascending triangle id.
fn group_intersection(members: &[usize], polys: &[Option<&ConvexPolygon>]) -> Option<ConvexPolygon> {
    let mut it = members.iter();
    let first = polys[*it.next()?]?.clone();
    it.try_fold(first, |acc, &m| acc.intersect(polys[m]?))
}

/// The region centroid when it is clear of every disc, else the region
/// vertex with the largest minimum power distance.
pub fn scan_point_of(region: &ConvexPolygon, discs: &[Disc]) -> Result<Point, RegionError> {
    let clearance = |p: Point| {
        discs.iter().map(|d| power_distance(p, d)).fold(f64::INFINITY, f64::min)
    };
    let c = polygon_centroid(region).map_err(|_| RegionError::NoValidPoint)?;
    if clearance(c) > EPS {
        return Ok(c);
    }
    let (best, score) = region
        .vertices()
        .iter()
        .map(|&v| (v, clearance(v)))
        .fold((c, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if score > EPS {
        Ok(best)
    } else {
        Err(RegionError::NoValidPoint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disc(x: f64, y: f64, r: f64) -> Disc {
        Disc::new(Point::new(x, y), r).unwrap()
    }

    fn equilateral() -> Vec<Disc> {
        vec![disc(0.0, 0.0, 1.0), disc(4.0, 0.0, 1.0), disc(2.0, 2.0 * 3f64.sqrt(), 1.0)]
    }

    #[test]
    fn axis_slab() {
        let d = [disc(0.0, 0.0, 1.0), disc(4.0, 0.0, 1.0)];
        let s = build_slab(&d, 0, 1).unwrap();
        assert!(s.p_i.approx_eq(Point::new(1.0, 0.0), 1e-15));
        assert!(s.p_j.approx_eq(Point::new(3.0, 0.0), 1e-15));
        assert!(s.contains(Point::new(2.0, 7.0)));
        assert!(s.contains(Point::new(1.0, -3.0)));
        assert!(!s.contains(Point::new(0.9, 0.0)));
        assert!(!s.contains(Point::new(3.1, 0.0)));
    }

    #[test]
    fn unequal_slab() {
        let d = [disc(0.0, 0.0, 2.0), disc(6.0, 0.0, 1.0)];
        let s = build_slab(&d, 0, 1).unwrap();
        assert!(s.p_i.approx_eq(Point::new(2.0, 0.0), 1e-15));
        assert!(s.p_j.approx_eq(Point::new(5.0, 0.0), 1e-15));
        assert!((s.width() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn oblique_slab() {
        let d = [disc(0.0, 0.0, 1.0), disc(3.0, 3.0 * 3f64.sqrt(), 1.0)];
        let s = build_slab(&d, 0, 1).unwrap();
        assert!((s.width() - 4.0).abs() < 1e-12);
        let dir = Point::from_angle(PI / 3.0);
        assert!(s.hp_i.direction().dot(dir).abs() < 1e-12);
        assert!(s.hp_j.direction().dot(dir).abs() < 1e-12);
        assert!((s.p_i.dist(d[0].center) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn touching_discs_have_no_slab() {
        let d = [disc(0.0, 0.0, 1.0), disc(2.0, 0.0, 1.0)];
        assert!(matches!(build_slab(&d, 0, 1), Err(RegionError::OverlappingDiscs { .. })));
    }

    #[test]
    fn equilateral_arcs() {
        let arcs = objective_arcs([0, 1, 2], &equilateral()).unwrap();
        for a in &arcs {
            assert!((a.interval.measure - PI / 3.0).abs() < 1e-12);
        }
        assert!(arcs[0].interval.start.abs() < 1e-12);
    }

    #[test]
    fn equilateral_region_is_hexagon() {
        let r = feasible_region(0, [0, 1, 2], &equilateral()).unwrap();
        assert_eq!(classify_shape(&r), Ok(6));
        assert!((r.polygon.area() - 2.0 * 3f64.sqrt()).abs() < 1e-9);
        let c = polygon_centroid(&r.polygon).unwrap();
        assert!(c.approx_eq(Point::new(2.0, 2.0 * 3f64.sqrt() / 3.0), 1e-12));
    }

    #[test]
    fn collinear_triangle_rejected() {
        let d = [disc(0.0, 0.0, 1.0), disc(4.0, 0.0, 1.0), disc(8.0, 0.0, 1.0)];
        assert!(matches!(
            feasible_region(0, [0, 1, 2], &d),
            Err(RegionError::DegenerateTriangle(_))
        ));
    }

    #[test]
    fn merge_single_triangle() {
        let r = feasible_region(0, [0, 1, 2], &equilateral()).unwrap();
        let plan = merge_regions(std::slice::from_ref(&r), &[vec![]]);
        assert_eq!(plan.groups.len(), 1);
        assert_eq!(plan.groups[0].members, vec![0]);
        assert_eq!(plan.groups[0].scan_point, polygon_centroid(&r.polygon).unwrap());
        assert!(plan.uncovered_triangles.is_empty());
    }

    #[test]
    fn merge_disjoint_neighbors_split() {
        let square = |x: f64| ConvexPolygon::rect(Point::new(x, 0.0), Point::new(x + 1.0, 1.0)).unwrap();
        let arcs = objective_arcs([0, 1, 2], &equilateral()).unwrap();
        let mk = |id: usize, p: ConvexPolygon| FeasibleRegion {
            triangle_id: id,
            triangle: [0, 1, 2],
            shape: 4,
            polygon: p,
            objective_arcs: arcs,
        };
        let plan = merge_regions(&[mk(0, square(0.0)), mk(1, square(5.0))], &[vec![1], vec![0]]);
        assert_eq!(plan.groups.len(), 2);
        let plan = merge_regions(&[mk(0, square(0.0)), mk(1, square(0.5))], &[vec![1], vec![0]]);
        assert_eq!(plan.groups.len(), 1);
        assert_eq!(plan.groups[0].members, vec![0, 1]);
        assert!((plan.groups[0].region.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn missing_region_is_uncovered() {
        let r = feasible_region(1, [0, 1, 2], &equilateral()).unwrap();
        let plan = merge_regions(&[r], &[vec![1], vec![0]]);
        assert_eq!(plan.uncovered_triangles, vec![0]);
        assert_eq!(plan.groups.len(), 1);
        assert_eq!(plan.groups[0].members, vec![1]);
    }

    #[test]
    fn scan_point_passthrough_and_fallback() {
        let d = equilateral();
        let r = feasible_region(0, [0, 1, 2], &d).unwrap();
        let c = polygon_centroid(&r.polygon).unwrap();
        assert_eq!(scan_point_of(&r.polygon, &d), Ok(c));
        let mut blocked = d.clone();
        blocked.push(disc(c.x, c.y, 0.2));
        let p = scan_point_of(&r.polygon, &blocked).unwrap();
        assert!(blocked.iter().all(|d| power_distance(p, d) > 0.0));
        assert!(r.polygon.vertices().contains(&p));
        blocked.push(disc(c.x, c.y, 5.0));
        assert_eq!(scan_point_of(&r.polygon, &blocked), Err(RegionError::NoValidPoint));
    }
}
