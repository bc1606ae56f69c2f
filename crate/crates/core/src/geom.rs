//! Planar primitives: points, discs, half-planes, segments and convex polygons.
//!
//! Every comparison goes through one absolute tolerance, [`EPS`], in meters.
//! Squared and area quantities use [`EPS_AREA`]. Sets are closed: a point on a
//! half-plane line or polygon edge belongs to it.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Absolute coordinate tolerance (meters).
pub const EPS: f64 = 1e-9;
/// Tolerance for squared lengths and areas (square meters).
pub const EPS_AREA: f64 = 1e-12;
/// Half-width of the seed box used by [`intersect_halfplanes`]. Any result
/// touching it is reported as unbounded.
pub const BOUNDING_BOX: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta`.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    /// Angle of the vector in `[0, 2π)`.
    #[inline]
    pub fn angle(self) -> f64 {
        crate::visibility::normalize_angle(self.y.atan2(self.x))
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn approx_eq(self, other: Point, tol: f64) -> bool {
        (self.x - other.x).abs() <= tol && (self.y - other.y).abs() <= tol
    }

    /// Rotate about the origin.
    pub fn rotated(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Twice the signed area of triangle `abc` (positive when counter-clockwise).
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// A closed circular disc, the cross-section of one stem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Point,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeomError> {
        if !center.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeomError::NonPositiveRadius { radius });
        }
        Ok(Self { center, radius })
    }

    pub fn boundary_point(&self, theta: f64) -> Point {
        self.center + Point::from_angle(theta) * self.radius
    }

    /// Distance between the two boundaries along the center line. Positive
    /// when the discs are disjoint.
    pub fn gap(&self, other: &Disc) -> f64 {
        self.center.dist(other.center) - self.radius - other.radius
    }

    /// True when `p` lies in the open interior.
    pub fn contains_strictly(&self, p: Point) -> bool {
        p.dist(self.center) < self.radius - EPS
    }

    pub fn translated(&self, by: Point) -> Disc {
        Disc { center: self.center + by, radius: self.radius }
    }
}

/// Checks that every pair of discs is separated by more than [`EPS`].
///
/// Uses a uniform grid keyed on the largest diameter, so typical plot-scale
/// inputs are checked in near-linear time.
pub fn check_nonoverlapping(discs: &[Disc]) -> Result<(), GeomError> {
    if discs.len() < 2 {
        return Ok(());
    }
    let max_r = discs.iter().map(|d| d.radius).fold(0.0, f64::max);
    let cell = (2.0 * max_r + EPS).max(1e-6);
    let key = |p: Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    for (i, d) in discs.iter().enumerate() {
        grid.entry(key(d.center)).or_default().push(i);
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    for (i, d) in discs.iter().enumerate() {
        let (cx, cy) = key(d.center);
        for gx in cx - 1..=cx + 1 {
            for gy in cy - 1..=cy + 1 {
                let Some(bucket) = grid.get(&(gx, gy)) else { continue };
                for &j in bucket {
                    if j <= i {
                        continue;
                    }
                    let gap = d.gap(&discs[j]);
                    if gap <= EPS {
                        let better = match worst {
                            None => true,
                            Some((wi, wj, _)) => (i, j) < (wi, wj),
                        };
                        if better {
                            worst = Some((i, j, gap));
                        }
                    }
                }
            }
        }
    }
    match worst {
        None => Ok(()),
        Some((i, j, gap)) => Err(GeomError::Overlap { i, j, deficit: EPS - gap }),
    }
}

/// Uniform bucket grid over disc centers for local queries.
pub struct DiscGrid<'a> {
    discs: &'a [Disc],
    cell: f64,
    max_radius: f64,
    buckets: std::collections::HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> DiscGrid<'a> {
    pub fn new(discs: &'a [Disc]) -> Self {
        let max_radius = discs.iter().map(|d| d.radius).fold(0.0, f64::max);
        // Roughly one disc per cell for plot-like layouts.
        let (mut lo, mut hi) = (Point::new(f64::MAX, f64::MAX), Point::new(f64::MIN, f64::MIN));
        for d in discs {
            lo = Point::new(lo.x.min(d.center.x), lo.y.min(d.center.y));
            hi = Point::new(hi.x.max(d.center.x), hi.y.max(d.center.y));
        }
        let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(0.0);
        let cell = (area / discs.len().max(1) as f64).sqrt().max(2.0 * max_radius).max(1e-6);
        let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
        for (i, d) in discs.iter().enumerate() {
            buckets.entry(Self::key_of(cell, d.center)).or_default().push(i);
        }
        Self { discs, cell, max_radius, buckets }
    }

    fn key_of(cell: f64, p: Point) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Ids of discs that may intersect the box `[lo, hi]`, ascending.
    pub fn near_box(&self, lo: Point, hi: Point) -> Vec<usize> {
        let pad = Point::new(self.max_radius, self.max_radius);
        let (kx0, ky0) = Self::key_of(self.cell, lo - pad);
        let (kx1, ky1) = Self::key_of(self.cell, hi + pad);
        let mut out = Vec::new();
        if (kx1 - kx0 + 1).saturating_mul(ky1 - ky0 + 1) as usize > self.buckets.len() {
            out.extend(0..self.discs.len());
            return out;
        }
        for kx in kx0..=kx1 {
            for ky in ky0..=ky1 {
                if let Some(b) = self.buckets.get(&(kx, ky)) {
                    out.extend_from_slice(b);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Closed half-plane `{ p : normal · p <= offset }` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// Normalizes `normal` (and scales `offset` to match).
    pub fn new(normal: Point, offset: f64) -> Option<Self> {
        let n = normal.norm();
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return None;
        }
        Some(Self { normal: normal * (1.0 / n), offset: offset / n })
    }

    /// Half-plane whose boundary passes through `point`, with outward
    /// direction `-normal` excluded, i.e. `normal · (p - point) <= 0`.
    pub fn through(point: Point, normal: Point) -> Option<Self> {
        let n = normal.normalized()?;
        Some(Self { normal: n, offset: n.dot(point) })
    }

    /// Signed distance from the boundary line; negative inside.
    #[inline]
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.signed_distance(p) <= EPS
    }

    /// Any point on the boundary line.
    pub fn anchor(&self) -> Point {
        self.normal * self.offset
    }

    /// Direction along the boundary line.
    pub fn direction(&self) -> Point {
        self.normal.perp()
    }
}

/// The half-plane bounded by the tangent at `boundary_point` that excludes the disc.
pub fn tangent_line_at(disc: &Disc, boundary_point: Point) -> Result<HalfPlane, GeomError> {
    let radial = boundary_point - disc.center;
    let off = (radial.norm() - disc.radius).abs();
    if off > EPS * disc.radius {
        return Err(GeomError::NotOnBoundary { distance: off });
    }
    let inward = -(radial * (1.0 / radial.norm()));
    Ok(HalfPlane { normal: inward, offset: inward.dot(boundary_point) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeomError> {
        if a.approx_eq(b, EPS) {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    /// Closest point of the closed segment to `p`.
    pub fn closest_point(&self, p: Point) -> Point {
        let ab = self.b - self.a;
        let len_sq = ab.norm_sq();
        if len_sq == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(ab) / len_sq).clamp(0.0, 1.0);
        self.a + ab * t
    }
}

/// True iff the segment passes through the open interior of the disc.
/// Touching the boundary does not count.
pub fn segment_intersects_disc(seg: &Segment, disc: &Disc) -> bool {
    let c = seg.closest_point(disc.center);
    c.dist(disc.center) < disc.radius - EPS
}

/// A convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Builds a polygon from counter-clockwise vertices, dropping near
    /// duplicates and collinear middle vertices. Returns `None` when fewer
    /// than three vertices survive, the area is at most [`EPS_AREA`], or the
    /// ring is not convex.
    pub fn from_ccw(vertices: Vec<Point>) -> Option<Self> {
        let cleaned = simplify_ring(vertices);
        if cleaned.len() < 3 {
            return None;
        }
        let poly = Self { vertices: cleaned };
        if poly.area() <= EPS_AREA || !poly.is_convex() {
            return None;
        }
        Some(poly)
    }

    /// Axis-aligned rectangle.
    pub fn rect(min: Point, max: Point) -> Option<Self> {
        Self::from_ccw(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area()
    }

    fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            orient(a, b, c) >= -EPS_AREA
        })
    }

    /// Closed membership with tolerance [`EPS`] (distance to each edge line).
    pub fn contains(&self, p: Point) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) / e.norm() >= -EPS
        })
    }

    /// Clips against one half-plane (Sutherland–Hodgman step).
    pub fn clip(&self, hp: &HalfPlane) -> Option<ConvexPolygon> {
        Self::from_ccw(clip_ring(&self.vertices, hp))
    }

    /// Intersection of two convex polygons, `None` when empty or degenerate.
    pub fn intersect(&self, other: &ConvexPolygon) -> Option<ConvexPolygon> {
        let mut ring = self.vertices.clone();
        for (a, b) in other.edges() {
            let hp = HalfPlane::new(-(b - a).perp(), -(b - a).perp().dot(a))?;
            ring = clip_ring(&ring, &hp);
            if ring.len() < 3 {
                return None;
            }
        }
        Self::from_ccw(ring)
    }

    /// The half-planes whose intersection is this polygon.
    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        self.edges()
            .filter_map(|(a, b)| {
                let n = -(b - a).perp();
                HalfPlane::new(n, n.dot(a))
            })
            .collect()
    }
}

fn clip_ring(ring: &[Point], hp: &HalfPlane) -> Vec<Point> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 1);
    if n == 0 {
        return out;
    }
    for i in 0..n {
        let cur = ring[i];
        let next = ring[(i + 1) % n];
        let dc = hp.signed_distance(cur);
        let dn = hp.signed_distance(next);
        if dc <= EPS {
            out.push(cur);
        }
        // Proper crossings only; a vertex inside the tolerance band is
        // emitted as itself.
        if (dc < -EPS && dn > EPS) || (dc > EPS && dn < -EPS) {
            let t = dc / (dc - dn);
            out.push(cur + (next - cur) * t);
        }
    }
    out
}

fn simplify_ring(mut pts: Vec<Point>) -> Vec<Point> {
    pts.dedup_by(|b, a| a.approx_eq(*b, EPS));
    while pts.len() > 1 && pts[0].approx_eq(*pts.last().unwrap(), EPS) {
        pts.pop();
    }
    // Drop middle vertices lying on the chord of their neighbors.
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let a = pts[(i + n - 1) % n];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            let base = c - a;
            let len = base.norm();
            let h = if len > 0.0 { base.cross(b - a).abs() / len } else { 0.0 };
            if h <= EPS {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Result of a half-plane intersection.
#[derive(Clone, Debug, PartialEq)]
pub enum Clipped {
    Bounded(ConvexPolygon),
    Empty,
    Unbounded,
}

impl Clipped {
    pub fn polygon(self) -> Option<ConvexPolygon> {
        match self {
            Clipped::Bounded(p) => Some(p),
            _ => None,
        }
    }
}

/// Intersects half-planes by clipping a seed box of half-width
/// [`BOUNDING_BOX`]. A result reaching the box is unbounded.
///
/// Each ring vertex remembers the two boundary lines it lies on, so a new
/// crossing is computed as a line–line intersection rather than by
/// interpolating along the (possibly huge) edge.
pub fn intersect_halfplanes(planes: &[HalfPlane]) -> Clipped {
    let b = BOUNDING_BOX;
    let mut lines = vec![
        HalfPlane { normal: Point::new(0.0, -1.0), offset: b },
        HalfPlane { normal: Point::new(1.0, 0.0), offset: b },
        HalfPlane { normal: Point::new(0.0, 1.0), offset: b },
        HalfPlane { normal: Point::new(-1.0, 0.0), offset: b },
    ];
    // Vertex k lies on lines k-1 and k (mod 4).
    let mut ring: Vec<(Point, [usize; 2])> = vec![
        (Point::new(-b, -b), [3, 0]),
        (Point::new(b, -b), [0, 1]),
        (Point::new(b, b), [1, 2]),
        (Point::new(-b, b), [2, 3]),
    ];
    for hp in planes {
        let id = lines.len();
        lines.push(*hp);
        let n = ring.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (cur, lc) = ring[i];
            let (next, ln) = ring[(i + 1) % n];
            let dc = hp.signed_distance(cur);
            let dn = hp.signed_distance(next);
            if dc <= EPS {
                out.push((cur, lc));
            }
            if (dc < -EPS && dn > EPS) || (dc > EPS && dn < -EPS) {
                let shared = lc.iter().copied().find(|l| ln.contains(l));
                let p = shared
                    .and_then(|l| line_intersection(&lines[l], hp))
                    .unwrap_or_else(|| cur + (next - cur) * (dc / (dc - dn)));
                out.push((p, [shared.unwrap_or(id), id]));
            }
        }
        ring = out;
        if ring.len() < 3 {
            return Clipped::Empty;
        }
    }
    let touches_box = ring.iter().any(|(_, l)| l[0] < 4 || l[1] < 4);
    match ConvexPolygon::from_ccw(ring.into_iter().map(|(p, _)| p).collect()) {
        None => Clipped::Empty,
        Some(_) if touches_box => Clipped::Unbounded,
        Some(p) => Clipped::Bounded(p),
    }
}

/// Intersection point of two boundary lines, `None` when parallel.
pub fn line_intersection(a: &HalfPlane, b: &HalfPlane) -> Option<Point> {
    let det = a.normal.cross(b.normal);
    if det.abs() <= 1e-15 {
        return None;
    }
    Some(Point::new(
        (a.offset * b.normal.y - b.offset * a.normal.y) / det,
        (a.normal.x * b.offset - b.normal.x * a.offset) / det,
    ))
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Polygon inscribed in the curvilinear convex hull of the discs: the hull
/// of `samples_per_disc` boundary points of every disc that reaches past the
/// hull of the centers.
pub fn curvilinear_hull(discs: &[Disc], samples_per_disc: usize) -> Option<ConvexPolygon> {
    let centers: Vec<Point> = discs.iter().map(|d| d.center).collect();
    let core = convex_hull(&centers);
    let sticks_out = |d: &Disc| {
        if core.len() < 3 {
            return true;
        }
        let n = core.len();
        let depth = (0..n)
            .map(|i| {
                let (a, b) = (core[i], core[(i + 1) % n]);
                (b - a).cross(d.center - a) / (b - a).norm()
            })
            .fold(f64::INFINITY, f64::min);
        depth < d.radius
    };
    let step = std::f64::consts::TAU / samples_per_disc.max(3) as f64;
    let samples: Vec<Point> = discs
        .iter()
        .filter(|d| sticks_out(d))
        .flat_map(|d| (0..samples_per_disc.max(3)).map(move |k| d.boundary_point(k as f64 * step)))
        .collect();
    ConvexPolygon::from_ccw(convex_hull(&samples))
}

/// Area-weighted centroid.
pub fn polygon_centroid(poly: &ConvexPolygon) -> Result<Point, GeomError> {
    let area = poly.signed_area();
    if area <= EPS_AREA {
        return Err(GeomError::DegeneratePolygon { area });
    }
    // Shift to the first vertex to keep products small.
    let o = poly.vertices()[0];
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for (p, q) in poly.edges() {
        let (p, q) = (p - o, q - o);
        let w = p.cross(q);
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Ok(Point::new(o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)))
}

pub fn point_in_polygon(p: Point, poly: &ConvexPolygon) -> bool {
    poly.contains(p)
}
