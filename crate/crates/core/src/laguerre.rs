//! Laguerre (power) Delaunay triangulation of a disc set.
//!
//! Each disc `(x, y, r)` is lifted to `(x, y, x² + y² − r²)`; the triangulation
//! is the projection of the lower convex hull of the lifted points.
//!
//! The hull is built incrementally. Points are inserted in Hilbert-curve order
//! and located by a visibility walk from the most recent triangle. Triangles
//! outside the hull are kept as "infinite" triangles sharing a symbolic vertex
//! at vertical infinity, so an insertion outside the current hull is the same
//! cavity retriangulation as one inside it. A finite triangle conflicts with a
//! new point when the lifted point lies below the triangle's plane; an
//! infinite triangle conflicts when the point lies strictly beyond its hull
//! edge. Cocircular ties are not conflicts. After construction, edges whose
//! quadrilateral is coplanar in the lift are flipped to the lowest-index
//! diagonal and the mesh is flagged as degenerate.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::TriangulationError;
use crate::geom::{check_nonoverlapping, orient, Disc, Point, EPS};

/// Power distance `|p − c|² − r²`; negative exactly inside the disc.
pub fn power_distance(p: Point, disc: &Disc) -> f64 {
    p.dist_sq(disc.center) - disc.radius * disc.radius
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn lift(disc: &Disc) -> LiftedPoint {
    let Point { x, y } = disc.center;
    LiftedPoint { x, y, z: x * x + y * y - disc.radius * disc.radius }
}

/// The point with equal power distance to all three discs, if the centers
/// are not collinear.
pub fn power_center(a: &Disc, b: &Disc, c: &Disc) -> Option<Point> {
    // Relative to a's center: 2 (cb − ca)·q = |cb − ca|² − rb² + ra², same for c.
    let o = a.center;
    let (pb, pc) = (b.center - o, c.center - o);
    let ra2 = a.radius * a.radius;
    let hb = 0.5 * (pb.norm_sq() - b.radius * b.radius + ra2);
    let hc = 0.5 * (pc.norm_sq() - c.radius * c.radius + ra2);
    let det = pb.cross(pc);
    if det.abs() <= f64::EPSILON * pb.norm_sq().max(pc.norm_sq()) {
        return None;
    }
    let x = (hb * pc.y - hc * pb.y) / det;
    let y = (pb.x * hc - pc.x * hb) / det;
    Some(o + Point::new(x, y))
}

/// A triangulation over the input disc indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationMesh {
    /// Disc indices that appear as vertices, ascending.
    pub disc_ids: Vec<usize>,
    /// Discs whose lifted point lies above the lower hull (empty power cell).
    pub unrepresented: Vec<usize>,
    /// Counter-clockwise index triples, smallest index first, sorted.
    pub triangles: Vec<[usize; 3]>,
    /// `adjacency[t]` lists the triangles sharing a full edge with `t`, ascending.
    pub adjacency: Vec<Vec<usize>>,
    /// Set when some interior edge had a coplanar lifted quadrilateral.
    pub degenerate: bool,
    /// Edges (as sorted index pairs) chosen by the lowest-index tie-break.
    pub degenerate_edges: Vec<[usize; 2]>,
}

impl TriangulationMesh {
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Every undirected edge with the number of triangles using it.
    pub fn edge_counts(&self) -> HashMap<[usize; 2], usize> {
        let mut m = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *m.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
            }
        }
        m
    }

    /// Sorted list of undirected edges.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut e: Vec<_> = self.edge_counts().into_keys().collect();
        e.sort_unstable();
        e
    }

    /// Hull edges (used by exactly one triangle), sorted.
    pub fn hull_edges(&self) -> Vec<[usize; 2]> {
        let mut e: Vec<_> =
            self.edge_counts().into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
        e.sort_unstable();
        e
    }
}

/// Two triangles are adjacent iff they share two vertex ids.
pub fn triangle_adjacency(triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut by_edge: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            by_edge.entry([a.min(b), a.max(b)]).or_default().push(ti);
        }
    }
    let mut adj = vec![Vec::new(); triangles.len()];
    for owners in by_edge.values() {
        for &a in owners {
            for &b in owners {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

pub fn laguerre_delaunay(discs: &[Disc]) -> Result<TriangulationMesh, TriangulationError> {
    if discs.len() < 3 {
        return Err(TriangulationError::TooFewDiscs(discs.len()));
    }
    check_nonoverlapping(discs)?;
    let mut builder = Builder::new(discs);
    builder.run()?;
    Ok(builder.finish())
}

const INF: usize = usize::MAX;
const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [usize; 3],
    /// `n[k]` is the triangle across the edge opposite `v[k]`.
    n: [usize; 3],
    alive: bool,
}

impl Tri {
    fn is_infinite(&self) -> bool {
        self.v.contains(&INF)
    }

    fn index_of(&self, v: usize) -> Option<usize> {
        self.v.iter().position(|&x| x == v)
    }

    fn neighbor_slot(&self, t: usize) -> Option<usize> {
        self.n.iter().position(|&x| x == t)
    }
}

struct Builder<'a> {
    discs: &'a [Disc],
    tris: Vec<Tri>,
    free: Vec<usize>,
    last: usize,
    unrepresented: Vec<usize>,
    inserted: Vec<bool>,
    degenerate_edges: Vec<[usize; 2]>,
    rng: u64,
    scale: f64,
}

impl<'a> Builder<'a> {
    fn new(discs: &'a [Disc]) -> Self {
        let (mut lo, mut hi) = (discs[0].center, discs[0].center);
        for d in discs {
            lo = Point::new(lo.x.min(d.center.x), lo.y.min(d.center.y));
            hi = Point::new(hi.x.max(d.center.x), hi.y.max(d.center.y));
        }
        let scale = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
        Self {
            discs,
            tris: Vec::with_capacity(2 * discs.len() + 8),
            free: Vec::new(),
            last: 0,
            unrepresented: Vec::new(),
            inserted: vec![false; discs.len()],
            degenerate_edges: Vec::new(),
            rng: 0x9E37_79B9_7F4A_7C15,
            scale,
        }
    }

    fn pt(&self, i: usize) -> Point {
        self.discs[i].center
    }

    fn next_rand(&mut self) -> u64 {
        // xorshift64; only used to vary walk edge order.
        let mut x = self.rng;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.rng = x;
        x
    }

    /// Orientation with a scale-aware zero band.
    fn orient_sign(&self, a: Point, b: Point, c: Point) -> i8 {
        let o = orient(a, b, c);
        let tol = EPS * self.scale;
        if o > tol {
            1
        } else if o < -tol {
            -1
        } else {
            0
        }
    }

    /// Sign of the lifted orientation of `p` against CCW triangle `abc`:
    /// positive when `p` lies below the plane (strictly inside the power circle).
    fn power_test(&self, a: usize, b: usize, c: usize, p: usize) -> (f64, f64) {
        let dp = &self.discs[p];
        let row = |i: usize| {
            let d = &self.discs[i];
            let r = d.center - dp.center;
            (r.x, r.y, r.norm_sq() - d.radius * d.radius + dp.radius * dp.radius)
        };
        let (ax, ay, az) = row(a);
        let (bx, by, bz) = row(b);
        let (cx, cy, cz) = row(c);
        let det = ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx);
        let m = [ax, ay, bx, by, cx, cy].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let z = [az, bz, cz].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        (det, 1e-11 * m * m * z)
    }

    fn in_conflict(&self, t: usize, p: usize) -> bool {
        let tri = &self.tris[t];
        if let Some(k) = tri.index_of(INF) {
            let a = tri.v[(k + 1) % 3];
            let b = tri.v[(k + 2) % 3];
            match self.orient_sign(self.pt(a), self.pt(b), self.pt(p)) {
                1 => true,
                -1 => false,
                _ => {
                    // On the hull line: conflicts iff strictly inside the edge
                    // and the finite neighbor conflicts.
                    let (pa, pb, pp) = (self.pt(a), self.pt(b), self.pt(p));
                    let t_ab = (pp - pa).dot(pb - pa) / (pb - pa).norm_sq();
                    if !(0.0..=1.0).contains(&t_ab) {
                        return false;
                    }
                    let f = tri.n[k];
                    let ft = &self.tris[f];
                    let (det, tol) = self.power_test(ft.v[0], ft.v[1], ft.v[2], p);
                    det > tol
                }
            }
        } else {
            let (det, tol) = self.power_test(tri.v[0], tri.v[1], tri.v[2], p);
            det > tol
        }
    }

    fn alloc(&mut self, tri: Tri) -> usize {
        if let Some(i) = self.free.pop() {
            self.tris[i] = tri;
            i
        } else {
            self.tris.push(tri);
            self.tris.len() - 1
        }
    }

    fn run(&mut self) -> Result<(), TriangulationError> {
        let order = hilbert_order(self.discs);
        // Seed triangle: first two points in order plus the first point not
        // collinear with them.
        let (a, b) = (order[0], order[1]);
        let Some(ci) = order[2..]
            .iter()
            .position(|&c| self.orient_sign(self.pt(a), self.pt(b), self.pt(c)) != 0)
        else {
            return Err(TriangulationError::AllCollinear);
        };
        let c = order[2 + ci];
        let (a, b) = if orient(self.pt(a), self.pt(b), self.pt(c)) > 0.0 { (a, b) } else { (b, a) };
        self.seed(a, b, c);
        for &p in order.iter() {
            if !self.inserted[p] {
                self.insert(p);
            }
        }
        self.resolve_ties();
        debug_assert!(self.check_links());
        Ok(())
    }

    fn seed(&mut self, a: usize, b: usize, c: usize) {
        let blank = Tri { v: [0; 3], n: [NONE; 3], alive: true };
        self.tris = vec![blank; 4];
        // 0: finite, 1..3: infinite across each finite edge.
        self.tris[0].v = [a, b, c];
        self.tris[1].v = [c, b, INF]; // across edge bc (opposite a)
        self.tris[2].v = [a, c, INF]; // across edge ca (opposite b)
        self.tris[3].v = [b, a, INF]; // across edge ab (opposite c)
        self.tris[0].n = [1, 2, 3];
        // Infinite triangles: opposite INF is the finite one; the others
        // chain around the hull.
        self.tris[1].n = [3, 2, 0];
        self.tris[2].n = [1, 3, 0];
        self.tris[3].n = [2, 1, 0];
        for v in [a, b, c] {
            self.inserted[v] = true;
        }
        self.last = 0;
        debug_assert!(self.check_links());
    }

    fn locate(&mut self, p: usize) -> usize {
        let pp = self.pt(p);
        let mut t = self.last;
        if !self.tris[t].alive {
            t = self.tris.iter().position(|t| t.alive).expect("live triangle");
        }
        if self.tris[t].is_infinite() {
            let k = self.tris[t].index_of(INF).unwrap();
            t = self.tris[t].n[k];
        }
        let limit = 4 * self.tris.len() + 64;
        let mut prev = NONE;
        for _ in 0..limit {
            let tri = self.tris[t];
            if tri.is_infinite() {
                return t;
            }
            let start = (self.next_rand() % 3) as usize;
            let mut moved = false;
            for s in 0..3 {
                let k = (start + s) % 3;
                let nb = tri.n[k];
                if nb == prev {
                    continue;
                }
                let a = self.pt(tri.v[(k + 1) % 3]);
                let b = self.pt(tri.v[(k + 2) % 3]);
                if orient(a, b, pp) < 0.0 {
                    prev = t;
                    t = nb;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return t;
            }
        }
        // Walk failed to settle; scan for any conflicting triangle.
        (0..self.tris.len())
            .find(|&i| self.tris[i].alive && self.in_conflict(i, p))
            .unwrap_or(t)
    }

    fn insert(&mut self, p: usize) {
        let start = self.locate(p);
        let seed = if self.in_conflict(start, p) {
            Some(start)
        } else {
            // Neighbors cover points on a shared edge or hull line.
            let n = self.tris[start].n;
            n.into_iter().find(|&nb| self.in_conflict(nb, p)).or_else(|| {
                (0..self.tris.len()).find(|&i| self.tris[i].alive && self.in_conflict(i, p))
            })
        };
        let Some(seed) = seed else {
            self.unrepresented.push(p);
            self.inserted[p] = true;
            return;
        };

        // Grow the conflict region.
        let mut cavity = vec![seed];
        let mut in_cavity: HashSet<usize> = HashSet::from([seed]);
        let mut i = 0;
        while i < cavity.len() {
            let t = cavity[i];
            i += 1;
            for nb in self.tris[t].n {
                if !in_cavity.contains(&nb) && self.in_conflict(nb, p) {
                    in_cavity.insert(nb);
                    cavity.push(nb);
                }
            }
        }

        // Boundary edges (u, v) in CCW order of the cavity triangle, with the
        // outer triangle across them.
        let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
        for &t in &cavity {
            let tri = self.tris[t];
            for k in 0..3 {
                let nb = tri.n[k];
                if !in_cavity.contains(&nb) {
                    boundary.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb));
                }
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
            self.free.push(t);
        }
        let mut created: Vec<(usize, usize, usize)> = Vec::with_capacity(boundary.len());
        for &(u, v, outer) in &boundary {
            let id = self.alloc(Tri { v: [u, v, p], n: [NONE, NONE, outer], alive: true });
            let slot = self.tris[outer]
                .neighbor_slot_of_edge(u, v)
                .expect("outer triangle shares the cavity edge");
            self.tris[outer].n[slot] = id;
            created.push((u, v, id));
        }
        for &(u, v, id) in &created {
            // Opposite u: edge (v, p), shared with the triangle starting at v.
            let next = created.iter().find(|c| c.0 == v).expect("closed cavity").2;
            // Opposite v: edge (p, u), shared with the triangle ending at u.
            let prev = created.iter().find(|c| c.1 == u).expect("closed cavity").2;
            self.tris[id].n[0] = next;
            self.tris[id].n[1] = prev;
        }
        self.inserted[p] = true;
        self.last = created
            .iter()
            .map(|c| c.2)
            .find(|&t| !self.tris[t].is_infinite())
            .unwrap_or(created[0].2);
        debug_assert!(self.links_ok(created.iter().map(|c| c.2)));
    }

    /// Flips coplanar-lift edges to their lowest-index diagonal.
    fn resolve_ties(&mut self) {
        let mut budget = 16 * self.discs.len() + 64;
        loop {
            let mut flipped = false;
            for t in 0..self.tris.len() {
                if !self.tris[t].alive || self.tris[t].is_infinite() {
                    continue;
                }
                for k in 0..3 {
                    let nb = self.tris[t].n[k];
                    if self.tris[nb].is_infinite() {
                        continue;
                    }
                    let tri = self.tris[t];
                    let (c, a, b) = (tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                    let other = self.tris[nb];
                    let kd = other.neighbor_slot(t).unwrap();
                    let d = other.v[kd];
                    let (det, tol) = self.power_test(a, b, c, d);
                    if det.abs() > tol {
                        continue;
                    }
                    let cur = [a.min(b), a.max(b)];
                    let alt = [c.min(d), c.max(d)];
                    let convex = self.orient_sign(self.pt(c), self.pt(a), self.pt(d)) > 0
                        && self.orient_sign(self.pt(d), self.pt(b), self.pt(c)) > 0;
                    if alt < cur && convex && budget > 0 {
                        budget -= 1;
                        self.flip(t, k);
                        flipped = true;
                        break;
                    }
                }
            }
            if !flipped {
                break;
            }
        }
        // Record the surviving tie edges.
        let mut ties = Vec::new();
        for t in 0..self.tris.len() {
            let tri = self.tris[t];
            if !tri.alive || tri.is_infinite() {
                continue;
            }
            for k in 0..3 {
                let nb = tri.n[k];
                if nb < t || self.tris[nb].is_infinite() {
                    continue;
                }
                let (c, a, b) = (tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                let d = self.tris[nb].v[self.tris[nb].neighbor_slot(t).unwrap()];
                let (det, tol) = self.power_test(a, b, c, d);
                if det.abs() <= tol {
                    ties.push([a.min(b), a.max(b)]);
                }
            }
        }
        ties.sort_unstable();
        self.degenerate_edges = ties;
    }

    /// Flips the edge opposite `v[k]` of triangle `t`.
    fn flip(&mut self, t: usize, k: usize) {
        let nb = self.tris[t].n[k];
        let tri = self.tris[t];
        let other = self.tris[nb];
        let kd = other.neighbor_slot(t).unwrap();
        let (c, a, b) = (tri.v[k], tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
        let d = other.v[kd];
        // Outer neighbors.
        let n_ca = tri.n[(k + 2) % 3]; // opposite b: edge (c, a)
        let n_bc = tri.n[(k + 1) % 3]; // opposite a: edge (b, c)
        let n_ad = other.n[other.index_of(b).unwrap()]; // edge (a, d)
        let n_db = other.n[other.index_of(a).unwrap()]; // edge (d, b)
        // t becomes (c, a, d), nb becomes (d, b, c).
        self.tris[t].v = [c, a, d];
        self.tris[t].n = [n_ad, nb, n_ca];
        self.tris[nb].v = [d, b, c];
        self.tris[nb].n = [n_bc, t, n_db];
        let relink = |tris: &mut Vec<Tri>, outer: usize, old: usize, new: usize| {
            if let Some(s) = tris[outer].neighbor_slot(old) {
                tris[outer].n[s] = new;
            }
        };
        relink(&mut self.tris, n_ad, nb, t);
        relink(&mut self.tris, n_bc, t, nb);
        debug_assert!(self.links_ok([t, nb, n_ad, n_bc]));
    }

    fn check_links(&self) -> bool {
        self.links_ok(0..self.tris.len())
    }

    fn links_ok(&self, ids: impl IntoIterator<Item = usize>) -> bool {
        ids.into_iter().filter(|&i| self.tris[i].alive).all(|i| {
            self.tris[i].n.iter().all(|&nb| nb != NONE && self.tris[nb].alive && self.tris[nb].n.contains(&i))
        })
    }

    fn finish(self) -> TriangulationMesh {
        let mut triangles: Vec<[usize; 3]> = self
            .tris
            .iter()
            .filter(|t| t.alive && !t.is_infinite())
            .map(|t| {
                let k = (0..3).min_by_key(|&k| t.v[k]).unwrap();
                [t.v[k], t.v[(k + 1) % 3], t.v[(k + 2) % 3]]
            })
            .collect();
        triangles.sort_unstable();
        let adjacency = triangle_adjacency(&triangles);
        let mut disc_ids: Vec<usize> = triangles.iter().flatten().copied().collect();
        disc_ids.sort_unstable();
        disc_ids.dedup();
        let mut unrepresented = self.unrepresented;
        unrepresented.sort_unstable();
        TriangulationMesh {
            disc_ids,
            unrepresented,
            triangles,
            adjacency,
            degenerate: !self.degenerate_edges.is_empty(),
            degenerate_edges: self.degenerate_edges,
        }
    }
}

impl Tri {
    /// Slot of the neighbor across edge `{u, v}`.
    fn neighbor_slot_of_edge(&self, u: usize, v: usize) -> Option<usize> {
        (0..3).find(|&k| {
            let (a, b) = (self.v[(k + 1) % 3], self.v[(k + 2) % 3]);
            (a == u && b == v) || (a == v && b == u)
        })
    }
}

/// Indices sorted along a Hilbert curve over the bounding box of centers.
fn hilbert_order(discs: &[Disc]) -> Vec<usize> {
    let (mut lo, mut hi) = (discs[0].center, discs[0].center);
    for d in discs {
        lo = Point::new(lo.x.min(d.center.x), lo.y.min(d.center.y));
        hi = Point::new(hi.x.max(d.center.x), hi.y.max(d.center.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    const SIDE: u32 = 1 << 16;
    let mut keyed: Vec<(u64, usize)> = discs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let gx = (((d.center.x - lo.x) / span) * (SIDE - 1) as f64) as u32;
            let gy = (((d.center.y - lo.y) / span) * (SIDE - 1) as f64) as u32;
            (hilbert_index(SIDE, gx, gy), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn hilbert_index(side: u32, mut x: u32, mut y: u32) -> u64 {
    let mut d: u64 = 0;
    let mut s = side / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = side - 1 - x;
                y = side - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}
