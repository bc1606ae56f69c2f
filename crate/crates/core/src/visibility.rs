//! Illumination of disc boundaries from scan points under mutual occlusion.
//!
//! Visibility is sampled: the part of a target boundary facing the scan point
//! (the unobstructed interval) is split into equal cells no wider than the
//! requested resolution, the cell midpoints are tested for a clear line of
//! sight, and visible cells are merged into an [`ArcSet`]. Without occluders
//! the result is exactly the unobstructed interval.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::VisibilityError;
use crate::geom::{segment_intersects_disc, Disc, Point, Segment, EPS};
use crate::laguerre::power_distance;

/// Default sampling resolution in degrees.
pub const DEFAULT_RESOLUTION_DEG: f64 = 0.05;
/// Angular slack (radians) for interval membership.
pub const ANGLE_EPS: f64 = 1e-9;

pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counter-clockwise angular interval `[start, start + measure]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularInterval {
    pub start: f64,
    pub measure: f64,
}

impl AngularInterval {
    pub fn new(start: f64, measure: f64) -> Self {
        Self { start: normalize_angle(start), measure: measure.clamp(0.0, TAU) }
    }

    /// Interval running counter-clockwise from `from` to `to`.
    pub fn between(from: f64, to: f64) -> Self {
        let from = normalize_angle(from);
        Self::new(from, normalize_angle(to - from))
    }

    pub fn end(&self) -> f64 {
        self.start + self.measure
    }

    pub fn mid(&self) -> f64 {
        normalize_angle(self.start + 0.5 * self.measure)
    }

    /// Closed membership with [`ANGLE_EPS`] slack.
    pub fn contains(&self, theta: f64) -> bool {
        let off = normalize_angle(theta - self.start);
        off <= self.measure + ANGLE_EPS || off >= TAU - ANGLE_EPS
    }

    /// Non-wrapping pieces within `[0, 2π]`.
    fn pieces(&self) -> impl Iterator<Item = (f64, f64)> {
        let end = self.start + self.measure;
        let first = (self.start, end.min(TAU));
        let second = (end > TAU).then_some((0.0, end - TAU));
        std::iter::once(first).chain(second)
    }
}

/// Disjoint union of arcs on one disc boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSet {
    pub disc_id: usize,
    /// Sorted by start; only the last interval may wrap past 2π.
    pub intervals: Vec<AngularInterval>,
}

impl ArcSet {
    pub fn empty(disc_id: usize) -> Self {
        Self { disc_id, intervals: Vec::new() }
    }

    pub fn from_intervals(disc_id: usize, intervals: impl IntoIterator<Item = AngularInterval>) -> Self {
        let mut s = Self::empty(disc_id);
        s.intervals = canonical(intervals.into_iter().flat_map(|i| i.pieces()).collect());
        s
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|i| i.measure).sum::<f64>().min(TAU)
    }

    pub fn fraction(&self) -> f64 {
        self.measure() / TAU
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let pieces = self.linear().into_iter().chain(other.linear()).collect();
        ArcSet { disc_id: self.disc_id, intervals: canonical(pieces) }
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(theta))
    }

    /// Lengths of the parts of `arc` not covered by this set.
    pub fn gaps_within(&self, arc: &AngularInterval) -> Vec<f64> {
        let covered = self.linear();
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in arc.pieces() {
            let mut cursor = lo;
            for &(a, b) in &covered {
                if b <= cursor || a >= hi {
                    continue;
                }
                if a > cursor {
                    spans.push((cursor, a));
                }
                cursor = cursor.max(b);
                if cursor >= hi {
                    break;
                }
            }
            if cursor < hi {
                spans.push((cursor, hi));
            }
        }
        // A gap ending at 2π continues from 0 when the arc wraps.
        if arc.end() > TAU && spans.len() >= 2 {
            let ends_at_seam = spans.iter().position(|s| s.1 >= TAU);
            let starts_at_seam = spans.iter().position(|s| s.0 <= 0.0);
            if let (Some(i), Some(j)) = (ends_at_seam, starts_at_seam) {
                if i != j {
                    let extra = spans[j].1 - spans[j].0;
                    spans[i].1 += extra;
                    spans.remove(j);
                }
            }
        }
        spans.into_iter().map(|(a, b)| b - a).collect()
    }

    /// True when every uncovered part of `arc` is at most `slack` radians long.
    pub fn covers(&self, arc: &AngularInterval, slack: f64) -> bool {
        self.gaps_within(arc).iter().all(|&g| g <= slack)
    }

    fn linear(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().flat_map(|i| i.pieces()).collect()
    }
}

/// Sorts and merges linear pieces, joining the 0/2π seam into one wrapping interval.
fn canonical(mut pieces: Vec<(f64, f64)>) -> Vec<AngularInterval> {
    pieces.retain(|&(a, b)| b > a);
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (a, b) in pieces {
        match merged.last_mut() {
            Some(last) if a <= last.1 + ANGLE_EPS => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    if merged.len() == 1 && merged[0].0 <= ANGLE_EPS && merged[0].1 >= TAU - ANGLE_EPS {
        return vec![AngularInterval { start: 0.0, measure: TAU }];
    }
    if merged.len() >= 2 && merged[0].0 <= ANGLE_EPS && merged.last().unwrap().1 >= TAU - ANGLE_EPS {
        let head = merged.remove(0);
        let tail = merged.last_mut().unwrap();
        tail.1 = TAU + head.1;
    }
    merged
        .into_iter()
        .map(|(a, b)| AngularInterval { start: a, measure: (b - a).min(TAU) })
        .collect()
}

/// The boundary arc facing `q`: centered on the direction to `q`, with
/// half-width `acos(r / d)`.
pub fn unobstructed_interval(q: Point, disc: &Disc) -> Result<AngularInterval, VisibilityError> {
    if power_distance(q, disc) <= EPS {
        return Err(VisibilityError::InsideDisc { x: q.x, y: q.y });
    }
    let to_q = q - disc.center;
    let half = (disc.radius / to_q.norm()).clamp(-1.0, 1.0).acos();
    Ok(AngularInterval::new(to_q.angle() - half, 2.0 * half))
}

/// Whether the boundary point of `target` at angle `theta` is seen from `q`.
pub fn is_visible(q: Point, theta: f64, target: &Disc, occluders: &[Disc]) -> bool {
    let Ok(facing) = unobstructed_interval(q, target) else {
        return false;
    };
    if !facing.contains(theta) {
        return false;
    }
    let p = target.boundary_point(theta);
    let Ok(seg) = Segment::new(q, p) else {
        return true;
    };
    !segment_intersects_disc(&seg, target)
        && occluders.iter().all(|o| !segment_intersects_disc(&seg, o))
}

/// Resolution in radians from degrees.
pub fn resolution_rad(degrees: f64) -> f64 {
    degrees.to_radians()
}

fn check_outside(q: Point, discs: &[Disc]) -> Result<(), VisibilityError> {
    match discs.iter().position(|d| power_distance(q, d) <= EPS) {
        Some(i) => Err(VisibilityError::PointInsideDisc { disc: i, x: q.x, y: q.y }),
        None => Ok(()),
    }
}

/// Discs other than `target_id` whose silhouette from `q` overlaps the
/// target's and which are near enough to stand in front of it.
fn candidate_occluders(q: Point, target_id: usize, discs: &[Disc]) -> Vec<Disc> {
    let target = &discs[target_id];
    let to_t = target.center - q;
    let dt = to_t.norm();
    let at = to_t.y.atan2(to_t.x);
    let ht = (target.radius / dt).min(1.0).asin();
    discs
        .iter()
        .enumerate()
        .filter(|&(j, o)| {
            if j == target_id {
                return false;
            }
            let to_o = o.center - q;
            let dj = to_o.norm();
            if dj - o.radius > dt {
                return false;
            }
            let hj = (o.radius / dj).min(1.0).asin();
            let diff = (to_o.y.atan2(to_o.x) - at).rem_euclid(TAU);
            let diff = diff.min(TAU - diff);
            diff <= ht + hj + 1e-12
        })
        .map(|(_, o)| *o)
        .collect()
}

/// Sampled illuminated part of disc `target_id` as seen from `q`.
pub fn illuminated_arcset(
    q: Point,
    target_id: usize,
    discs: &[Disc],
    resolution: f64,
) -> Result<ArcSet, VisibilityError> {
    check_outside(q, discs)?;
    let target = &discs[target_id];
    let facing = unobstructed_interval(q, target).map_err(|_| VisibilityError::PointInsideDisc {
        disc: target_id,
        x: q.x,
        y: q.y,
    })?;
    let occluders = candidate_occluders(q, target_id, discs);
    if occluders.is_empty() {
        return Ok(ArcSet::from_intervals(target_id, [facing]));
    }
    let cells = ((facing.measure / resolution).ceil() as usize).max(1);
    let step = facing.measure / cells as f64;
    let mut runs = Vec::new();
    let mut run_start: Option<usize> = None;
    for k in 0..=cells {
        let visible = k < cells && {
            let theta = facing.start + (k as f64 + 0.5) * step;
            let p = target.boundary_point(theta);
            match Segment::new(q, p) {
                Ok(seg) => occluders.iter().all(|o| !segment_intersects_disc(&seg, o)),
                Err(_) => true,
            }
        };
        match (visible, run_start) {
            (true, None) => run_start = Some(k),
            (false, Some(s)) => {
                runs.push(AngularInterval::new(
                    facing.start + s as f64 * step,
                    (k - s) as f64 * step,
                ));
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(ArcSet::from_intervals(target_id, runs))
}

/// Illumination statistics over a disc set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Illuminated fraction of each disc boundary, indexed by disc id.
    pub per_disc: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    /// Discs with fraction above `detection_threshold`.
    pub detected: usize,
    /// Mean and SD restricted to detected discs.
    pub detected_mean: f64,
    pub detected_sd: f64,
    pub detection_threshold: f64,
    /// Sampling resolution in radians.
    pub resolution: f64,
}

impl CoverageReport {
    pub fn from_fractions(per_disc: Vec<f64>, detection_threshold: f64, resolution: f64) -> Self {
        let (mean, sd) = mean_sd(&per_disc);
        let detected: Vec<f64> = per_disc.iter().copied().filter(|&f| f > detection_threshold).collect();
        let (detected_mean, detected_sd) = mean_sd(&detected);
        Self {
            per_disc,
            mean,
            sd,
            detected: detected.len(),
            detected_mean,
            detected_sd,
            detection_threshold,
            resolution,
        }
    }
}

/// Mean and population standard deviation; zeros for an empty slice.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-disc arc sets united over all scan points.
pub fn illuminated_arcsets(
    scan_points: &[Point],
    discs: &[Disc],
    resolution: f64,
) -> Result<Vec<ArcSet>, VisibilityError> {
    for &q in scan_points {
        check_outside(q, discs)?;
    }
    (0..discs.len())
        .map(|i| {
            scan_points.iter().try_fold(ArcSet::empty(i), |acc, &q| {
                Ok(acc.union(&illuminated_arcset(q, i, discs, resolution)?))
            })
        })
        .collect()
}

pub fn coverage(
    scan_points: &[Point],
    discs: &[Disc],
    resolution: f64,
    detection_threshold: f64,
) -> Result<CoverageReport, VisibilityError> {
    let sets = illuminated_arcsets(scan_points, discs, resolution)?;
    let fractions = sets.iter().map(ArcSet::fraction).collect();
    Ok(CoverageReport::from_fractions(fractions, detection_threshold, resolution))
}

/// Boundary fraction seen from distance `d` without occlusion: `acos(r/d)/π`.
pub fn closed_form_fraction(radius: f64, distance: f64) -> f64 {
    (radius / distance).acos() / PI
}
