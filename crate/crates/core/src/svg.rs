//! SVG drawings of plan documents.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::geom::{Disc, Point};
use crate::io::PlanDocument;
use crate::slab::build_slab;
use crate::visibility::{illuminated_arcsets, resolution_rad, AngularInterval};

/// Optional layers; discs are always drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Layers {
    pub triangulation: bool,
    pub slabs: bool,
    pub regions: bool,
    pub groups: bool,
    pub scans: bool,
    pub arcs: bool,
}

pub const LAYER_NAMES: [&str; 6] = ["triangulation", "slabs", "regions", "groups", "scans", "arcs"];

impl Layers {
    pub fn all() -> Self {
        Self { triangulation: true, slabs: true, regions: true, groups: true, scans: true, arcs: true }
    }

    /// Comma-separated layer names, `all`, or `none`/empty.
    pub fn parse(list: &str) -> Result<Self, String> {
        let mut l = Self::default();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "all" => l = Self::all(),
                "none" | "discs" => {}
                "triangulation" => l.triangulation = true,
                "slabs" => l.slabs = true,
                "regions" => l.regions = true,
                "groups" => l.groups = true,
                "scans" => l.scans = true,
                "arcs" => l.arcs = true,
                other => return Err(format!("unknown layer `{other}`; expected one of {}", LAYER_NAMES.join(", "))),
            }
        }
        Ok(l)
    }
}

/// Fixed six-decimal formatting with negative zero folded to zero.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

struct View {
    lo: Point,
    hi: Point,
}

impl View {
    // y grows downward in SVG.
    fn xy(&self, p: Point) -> String {
        format!("{} {}", num(p.x), num(-p.y))
    }

    /// Portion of the line through `p` along `d` inside the view (Liang-Barsky).
    fn clip_line(&self, p: Point, d: Point) -> Option<(Point, Point)> {
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (pc, dc, lo, hi) in [(p.x, d.x, self.lo.x, self.hi.x), (p.y, d.y, self.lo.y, self.hi.y)] {
            if dc.abs() < 1e-15 {
                if pc < lo || pc > hi {
                    return None;
                }
                continue;
            }
            let (a, b) = ((lo - pc) / dc, (hi - pc) / dc);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
        (t0 < t1).then(|| (p + d * t0, p + d * t1))
    }
}

fn view_of(discs: &[Disc], scans: &[Point]) -> View {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |p: Point, r: f64| {
        lo = Point::new(lo.x.min(p.x - r), lo.y.min(p.y - r));
        hi = Point::new(hi.x.max(p.x + r), hi.y.max(p.y + r));
    };
    discs.iter().for_each(|d| grow(d.center, d.radius));
    scans.iter().for_each(|&p| grow(p, 0.0));
    if !lo.is_finite() {
        return View { lo: Point::new(-1.0, -1.0), hi: Point::new(1.0, 1.0) };
    }
    let margin = 0.1 * (hi.x - lo.x).max(hi.y - lo.y).max(1e-3);
    View { lo: lo - Point::new(margin, margin), hi: hi + Point::new(margin, margin) }
}

fn polygon(out: &mut String, class: &str, pts: &[Point], view: &View) {
    let coords: Vec<String> = pts.iter().map(|&p| view.xy(p).replace(' ', ",")).collect();
    let _ = writeln!(out, r#"  <polygon class="{class}" points="{}"/>"#, coords.join(" "));
}

fn line(out: &mut String, class: &str, a: Point, b: Point) {
    let _ = writeln!(
        out,
        r#"  <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        num(a.x),
        num(-a.y),
        num(b.x),
        num(-b.y)
    );
}

/// Arc path in pieces of at most a half turn so every piece is unambiguous.
fn arc_path(disc: &Disc, iv: &AngularInterval, view: &View) -> String {
    let pieces = (iv.measure / std::f64::consts::PI).ceil().max(1.0) as usize;
    let step = iv.measure / pieces as f64;
    let mut d = format!("M {}", view.xy(disc.boundary_point(iv.start)));
    for k in 1..=pieces {
        let end = disc.boundary_point(iv.start + step * k as f64);
        // Counter-clockwise in the plane is clockwise on screen, hence sweep 0.
        let _ = write!(d, " A {r} {r} 0 0 0 {}", view.xy(end), r = num(disc.radius));
    }
    d
}

/// Renders a plan document; element order follows ids so output is deterministic.
pub fn render_svg(doc: &PlanDocument, layers: &Layers) -> String {
    let discs: Vec<Disc> =
        doc.discs.iter().map(|r| Disc { center: Point::new(r.x, r.y), radius: r.r }).collect();
    let scans = doc.plan.scan_points();
    let view = view_of(&discs, &scans);
    let (w, h) = (view.hi.x - view.lo.x, view.hi.y - view.lo.y);
    let stroke = 0.002 * w.max(h);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        num(view.lo.x),
        num(-view.hi.y),
        num(w),
        num(h)
    );
    let _ = writeln!(
        out,
        "<style>\n  .disc {{ fill: #8b5a2b; stroke: #3e2412; stroke-width: {s}; }}\n  .edge {{ stroke: #555555; stroke-width: {s}; }}\n  .slab {{ stroke: #1f77b4; stroke-width: {s}; stroke-dasharray: {d}; }}\n  .region {{ fill: #2ca02c; fill-opacity: 0.3; stroke: #2ca02c; stroke-width: {s}; }}\n  .group {{ fill: none; stroke: #d62728; stroke-width: {s2}; }}\n  .scan {{ stroke: #000000; stroke-width: {s2}; fill: none; }}\n  .arc {{ stroke: #ff7f0e; stroke-width: {s4}; fill: none; }}\n</style>",
        s = num(stroke),
        s2 = num(2.0 * stroke),
        s4 = num(4.0 * stroke),
        d = num(4.0 * stroke),
    );

    if layers.regions {
        out += "<g id=\"regions\">\n";
        for r in &doc.regions {
            polygon(&mut out, "region", r.polygon.vertices(), &view);
        }
        out += "</g>\n";
    }
    if layers.slabs {
        out += "<g id=\"slabs\">\n";
        let pairs: BTreeSet<[usize; 2]> = doc
            .mesh
            .triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]])
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        for [i, j] in pairs {
            let Ok(slab) = build_slab(&discs, i, j) else { continue };
            for (p, hp) in [(slab.p_i, slab.hp_i), (slab.p_j, slab.hp_j)] {
                if let Some((a, b)) = view.clip_line(p, hp.direction()) {
                    line(&mut out, "slab", a, b);
                }
            }
        }
        out += "</g>\n";
    }
    if layers.triangulation {
        out += "<g id=\"triangulation\">\n";
        let edges: BTreeSet<[usize; 2]> = doc
            .mesh
            .triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]])
            .map(|[a, b]| [a.min(b), a.max(b)])
            .collect();
        for [a, b] in edges {
            line(&mut out, "edge", discs[a].center, discs[b].center);
        }
        out += "</g>\n";
    }
    out += "<g id=\"discs\">\n";
    for d in &discs {
        let _ = writeln!(
            out,
            r#"  <circle class="disc" cx="{}" cy="{}" r="{}"/>"#,
            num(d.center.x),
            num(-d.center.y),
            num(d.radius)
        );
    }
    out += "</g>\n";
    if layers.arcs && !scans.is_empty() {
        let res = resolution_rad(doc.metadata.resolution_deg);
        if let Ok(sets) = illuminated_arcsets(&scans, &discs, res) {
            out += "<g id=\"arcs\">\n";
            for set in &sets {
                for iv in &set.intervals {
                    let _ = writeln!(out, r#"  <path class="arc" d="{}"/>"#, arc_path(&discs[set.disc_id], iv, &view));
                }
            }
            out += "</g>\n";
        }
    }
    if layers.groups {
        out += "<g id=\"groups\">\n";
        for g in &doc.plan.groups {
            polygon(&mut out, "group", g.region.vertices(), &view);
        }
        out += "</g>\n";
    }
    if layers.scans {
        out += "<g id=\"scans\">\n";
        let a = 6.0 * stroke;
        for p in &scans {
            let _ = writeln!(
                out,
                r#"  <path class="scan" d="M {} L {} M {} L {}"/>"#,
                view.xy(*p + Point::new(-a, -a)),
                view.xy(*p + Point::new(a, a)),
                view.xy(*p + Point::new(-a, a)),
                view.xy(*p + Point::new(a, -a)),
            );
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    out
}
