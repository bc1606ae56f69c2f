#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stemlight::geom::{Disc, Point};
use stemlight::visibility::AngularInterval;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` pairwise-separated discs with radii in `radii`, centers in `[0, side]²`.
pub fn random_discs(rng: &mut ChaCha8Rng, n: usize, side: f64, radii: (f64, f64)) -> Vec<Disc> {
    let mut out: Vec<Disc> = Vec::with_capacity(n);
    let cell = 2.0 * radii.1 + 1e-6;
    let dim = (side / cell).ceil() as usize + 1;
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); dim * dim];
    let key = |p: Point| ((p.x / cell) as usize).min(dim - 1) * dim + ((p.y / cell) as usize).min(dim - 1);
    while out.len() < n {
        let r = if radii.0 == radii.1 { radii.0 } else { rng.gen_range(radii.0..radii.1) };
        let c = Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        let (gx, gy) = ((c.x / cell) as i64, (c.y / cell) as i64);
        let mut ok = true;
        'scan: for dx in -1..=1 {
            for dy in -1..=1 {
                let (x, y) = (gx + dx, gy + dy);
                if x < 0 || y < 0 || x >= dim as i64 || y >= dim as i64 {
                    continue;
                }
                for &k in &grid[x as usize * dim + y as usize] {
                    if out[k].center.dist(c) <= out[k].radius + r + 1e-6 {
                        ok = false;
                        break 'scan;
                    }
                }
            }
        }
        if ok {
            grid[key(c)].push(out.len());
            out.push(Disc { center: c, radius: r });
        }
    }
    out
}

/// Three separated discs with non-collinear centers.
pub fn random_triple(rng: &mut ChaCha8Rng) -> Vec<Disc> {
    loop {
        let d = random_discs(rng, 3, 5.0, (0.05, 0.3));
        let (a, b, c) = (d[0].center, d[1].center, d[2].center);
        if ((b - a).cross(c - a)).abs() > 1e-3 {
            return d;
        }
    }
}

/// Boundary point of `own` at `theta` is reachable from `q` without crossing
/// any disc interior.
pub fn sees(q: Point, own: &Disc, theta: f64, others: &[Disc]) -> bool {
    let b = own.center + Point::new(theta.cos(), theta.sin()) * own.radius;
    let outward = b - own.center;
    if (q - b).dot(outward) <= -1e-12 * own.radius {
        return false;
    }
    others.iter().all(|o| {
        let d = b - q;
        let t = ((o.center - q).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        (q + d * t).dist(o.center) >= o.radius - 1e-9
    })
}

/// Sample angles covering a closed interval at `step` spacing, endpoints included.
pub fn arc_samples(arc: &AngularInterval, step: f64) -> Vec<f64> {
    let k = (arc.measure / step).ceil().max(1.0) as usize;
    (0..=k).map(|i| arc.start + arc.measure * i as f64 / k as f64).collect()
}

/// Edges of the empty-circumcircle Delaunay triangulation, by brute force.
pub fn brute_delaunay_edges(points: &[Point]) -> Vec<[usize; 2]> {
    let n = points.len();
    let mut edges = std::collections::BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (points[i], points[j], points[k]);
                let det = 2.0 * (b - a).cross(c - a);
                if det.abs() < 1e-12 {
                    continue;
                }
                let (ba, ca) = (b - a, c - a);
                let ux = (ca.y * ba.norm_sq() - ba.y * ca.norm_sq()) / det;
                let uy = (ba.x * ca.norm_sq() - ca.x * ba.norm_sq()) / det;
                let center = a + Point::new(ux, uy);
                let r2 = center.dist_sq(a);
                let empty = (0..n)
                    .filter(|&m| m != i && m != j && m != k)
                    .all(|m| points[m].dist_sq(center) > r2 * (1.0 + 1e-12));
                if empty {
                    edges.extend([[i, j], [j, k], [i, k]]);
                }
            }
        }
    }
    edges.into_iter().collect()
}

/// Triangle circumcenter.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let det = 2.0 * (b - a).cross(c - a);
    let (ba, ca) = (b - a, c - a);
    a + Point::new((ca.y * ba.norm_sq() - ba.y * ca.norm_sq()) / det, (ba.x * ca.norm_sq() - ca.x * ba.norm_sq()) / det)
}
