//! Synthetic stem layouts: regular grids, optionally jittered, with one or
//! more stem diameters.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::geom::{Disc, Point, EPS};

/// PVC pipe diameter (m).
pub const PVC_DIAMETER: f64 = 0.1524;
/// Paper tube diameter (m).
pub const PAPER_TUBE_DIAMETER: f64 = 0.0762;
/// Grid spacing assumed when none is given (m).
pub const DEFAULT_SPACING: f64 = 2.0;
/// Placement attempts per disc before giving up.
pub const MAX_ATTEMPTS: usize = 1000;
/// Identifier of the generator behind every seeded draw.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    OnGrid,
    Jittered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterAssignment {
    /// Every disc uses the first diameter.
    AllSame,
    /// Disc `k` uses `diameters[k % len]`.
    Alternating,
    /// Equal shares of each diameter, shuffled by the seed.
    RandomSplit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestSpec {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub layout: Layout,
    /// Radius of the jitter disc around each grid point.
    pub jitter_radius: f64,
    pub diameters: Vec<f64>,
    pub assignment: DiameterAssignment,
    pub seed: u64,
}

impl ForestSpec {
    pub fn on_grid(rows: usize, cols: usize, spacing: f64, diameters: Vec<f64>) -> Self {
        let assignment =
            if diameters.len() > 1 { DiameterAssignment::Alternating } else { DiameterAssignment::AllSame };
        Self {
            rows,
            cols,
            spacing,
            layout: Layout::OnGrid,
            jitter_radius: 0.0,
            diameters,
            assignment,
            seed: 0,
        }
    }

    pub fn jittered(mut self, seed: u64) -> Self {
        self.layout = Layout::Jittered;
        self.jitter_radius = self.spacing / 2.0;
        self.seed = seed;
        self
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing;
        if self.layout == Layout::Jittered {
            self.jitter_radius = spacing / 2.0;
        }
        self
    }

    pub fn count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: &str| Err(ScenarioError::InvalidSpec(m.to_string()));
        if self.rows == 0 || self.cols == 0 {
            return bad("rows and cols must be positive");
        }
        if self.diameters.is_empty() || self.diameters.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return bad("diameters must be a nonempty list of positive values");
        }
        let max_d = self.diameters.iter().copied().fold(0.0, f64::max);
        if !(self.spacing.is_finite() && self.spacing > max_d) {
            return bad("spacing must exceed the largest diameter");
        }
        if self.layout == Layout::Jittered
            && !(self.jitter_radius >= 0.0 && self.jitter_radius <= self.spacing / 2.0 + EPS)
        {
            return bad("jitter radius must lie in [0, spacing / 2]");
        }
        Ok(())
    }
}

fn radii(spec: &ForestSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = spec.count();
    match spec.assignment {
        DiameterAssignment::AllSame => vec![spec.diameters[0] / 2.0; n],
        DiameterAssignment::Alternating => {
            (0..n).map(|k| spec.diameters[k % spec.diameters.len()] / 2.0).collect()
        }
        DiameterAssignment::RandomSplit => {
            let mut r: Vec<f64> = (0..n).map(|k| spec.diameters[k % spec.diameters.len()] / 2.0).collect();
            r.shuffle(rng);
            r
        }
    }
}

/// Row-major discs; grid point `(i, j)` sits at `(i·spacing, j·spacing)`.
pub fn generate(spec: &ForestSpec) -> Result<Vec<Disc>, ScenarioError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let radii = radii(spec, &mut rng);
    let mut discs: Vec<Disc> = Vec::with_capacity(spec.count());
    for i in 0..spec.rows {
        for j in 0..spec.cols {
            let k = discs.len();
            let grid_pt = Point::new(i as f64 * spec.spacing, j as f64 * spec.spacing);
            let r = radii[k];
            let disc = match spec.layout {
                Layout::OnGrid => Disc { center: grid_pt, radius: r },
                Layout::Jittered => {
                    let mut placed = None;
                    for _ in 0..MAX_ATTEMPTS {
                        // Area-uniform point in the jitter disc.
                        let rho = spec.jitter_radius * rng.gen::<f64>().sqrt();
                        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                        let c = grid_pt + Point::from_angle(theta) * rho;
                        let cand = Disc { center: c, radius: r };
                        if discs.iter().all(|d| d.gap(&cand) > EPS) {
                            placed = Some(cand);
                            break;
                        }
                    }
                    placed.ok_or(ScenarioError::CannotPlace { index: k, attempts: MAX_ATTEMPTS })?
                }
            };
            discs.push(disc);
        }
    }
    Ok(discs)
}

/// The five reference experiments, all on a `spacing` grid.
pub fn experiment_presets_with_spacing(spacing: f64) -> BTreeMap<u32, ForestSpec> {
    let pvc = vec![PVC_DIAMETER];
    let mixed = vec![PVC_DIAMETER, PAPER_TUBE_DIAMETER];
    BTreeMap::from([
        (1, ForestSpec::on_grid(3, 4, spacing, pvc.clone())),
        (2, ForestSpec::on_grid(3, 4, spacing, pvc).jittered(2)),
        (3, ForestSpec::on_grid(3, 4, spacing, mixed.clone())),
        (4, ForestSpec::on_grid(3, 4, spacing, mixed.clone()).jittered(4)),
        (5, ForestSpec::on_grid(3, 4, spacing, mixed).jittered(5)),
    ])
}

pub fn experiment_presets() -> BTreeMap<u32, ForestSpec> {
    experiment_presets_with_spacing(DEFAULT_SPACING)
}

pub fn preset(number: u32, spacing: f64) -> Result<ForestSpec, ScenarioError> {
    experiment_presets_with_spacing(spacing).remove(&number).ok_or(ScenarioError::UnknownPreset(number))
}

/// Whether a preset's reference setup includes single-scan evaluation.
pub fn preset_has_single_scan(number: u32) -> bool {
    matches!(number, 1 | 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::check_nonoverlapping;

    #[test]
    fn on_grid_positions() {
        let spec = ForestSpec::on_grid(3, 4, 2.0, vec![PVC_DIAMETER]);
        let d = generate(&spec).unwrap();
        assert_eq!(d.len(), 12);
        for (k, disc) in d.iter().enumerate() {
            let (i, j) = (k / 4, k % 4);
            assert_eq!(disc.center, Point::new(2.0 * i as f64, 2.0 * j as f64));
            assert_eq!(disc.radius, 0.0762);
        }
    }

    #[test]
    fn jittered_within_bounds() {
        let spec = ForestSpec::on_grid(3, 4, 2.0, vec![PVC_DIAMETER]).jittered(42);
        let d = generate(&spec).unwrap();
        assert_eq!(d.len(), 12);
        for (k, disc) in d.iter().enumerate() {
            let g = Point::new(2.0 * (k / 4) as f64, 2.0 * (k % 4) as f64);
            assert!(disc.center.dist(g) <= 1.0 + 1e-12);
        }
        check_nonoverlapping(&d).unwrap();
        assert_eq!(generate(&spec).unwrap(), d);
        assert_ne!(generate(&spec.clone().jittered(43)).unwrap(), d);
    }

    #[test]
    fn alternating_radii() {
        let d = generate(&ForestSpec::on_grid(3, 4, 2.0, vec![PVC_DIAMETER, PAPER_TUBE_DIAMETER])).unwrap();
        for (k, disc) in d.iter().enumerate() {
            let want = if k % 2 == 0 { 0.0762 } else { 0.0381 };
            assert_eq!(disc.radius, want);
        }
    }

    #[test]
    fn random_split_keeps_shares() {
        let mut spec = ForestSpec::on_grid(3, 4, 2.0, vec![PVC_DIAMETER, PAPER_TUBE_DIAMETER]);
        spec.assignment = DiameterAssignment::RandomSplit;
        spec.seed = 9;
        let d = generate(&spec).unwrap();
        assert_eq!(d.iter().filter(|d| d.radius == 0.0762).count(), 6);
    }

    #[test]
    fn presets_match_reference_table() {
        let p = experiment_presets();
        assert_eq!(p.len(), 5);
        assert_eq!(p[&1].count(), 12);
        assert_eq!(p[&1].layout, Layout::OnGrid);
        assert_eq!(p[&1].diameters, vec![PVC_DIAMETER]);
        assert_eq!(p[&2].layout, Layout::Jittered);
        assert_eq!(p[&3].diameters, vec![PVC_DIAMETER, PAPER_TUBE_DIAMETER]);
        assert_eq!(p[&3].layout, Layout::OnGrid);
        let d3 = generate(&p[&3]).unwrap();
        assert_eq!(d3.iter().filter(|d| d.radius == PVC_DIAMETER / 2.0).count(), 6);
        assert_eq!(p[&5].layout, Layout::Jittered);
        assert_ne!(p[&4].seed, p[&5].seed);
        assert!(preset(6, 2.0).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&ForestSpec::on_grid(3, 4, 0.1, vec![PVC_DIAMETER])).is_err());
        let mut s = ForestSpec::on_grid(2, 2, 2.0, vec![PVC_DIAMETER]).jittered(1);
        s.jitter_radius = 1.5;
        assert!(matches!(generate(&s), Err(ScenarioError::InvalidSpec(_))));
    }

    #[test]
    fn impossible_placement_reported() {
        // Huge stems barely fitting the grid cannot all be jittered apart.
        let spec = ForestSpec::on_grid(6, 6, 1.0, vec![0.999]).jittered(3);
        assert!(matches!(generate(&spec), Err(ScenarioError::CannotPlace { .. })));
    }
}
