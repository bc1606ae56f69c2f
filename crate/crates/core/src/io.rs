//! Disc files, plan/coverage/experiment documents and the command bodies
//! behind the binary.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IoError, RunError, VisibilityError};
use crate::geom::{check_nonoverlapping, Disc, Point, EPS, EPS_AREA};
use crate::laguerre::TriangulationMesh;
use crate::plan::{plan_scans, TriangleIssue, HULL_SAMPLES};
use crate::scenario::{self, ForestSpec, RNG_NAME};
use crate::slab::{FeasibleRegion, ScanPlan};
use crate::visibility::{coverage, mean_sd, resolution_rad, CoverageReport, DEFAULT_RESOLUTION_DEG};

pub const PLAN_SCHEMA: &str = "stemlight.plan/1";
pub const COVERAGE_SCHEMA: &str = "stemlight.coverage/1";
pub const EXPERIMENT_SCHEMA: &str = "stemlight.experiment/1";
pub const TOOL_NAME: &str = "stemlight";

/// Exit code for a plan that covers every triangle.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
/// Exit code for a plan that leaves triangles uncovered.
pub const EXIT_INCOMPLETE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscRecord {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl From<&Disc> for DiscRecord {
    fn from(d: &Disc) -> Self {
        Self { x: d.center.x, y: d.center.y, r: d.radius }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscFile {
    pub discs: Vec<DiscRecord>,
}

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path)
        .map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })
}

fn json_error(e: serde_json::Error) -> IoError {
    IoError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Rows of a headed CSV table, each parsed to floats, tagged with their line.
fn parse_csv_rows(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(1, |p| p.line() as usize);
        IoError::Parse { line, column: 1, message: e.to_string() }
    };
    let got: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_lowercase).collect();
    if got != header {
        return Err(IoError::Parse {
            line: 1,
            column: 1,
            message: format!("expected header `{}`, found `{}`", header.join(","), got.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let mut column = 1;
        let mut row = Vec::with_capacity(header.len());
        for field in rec.iter() {
            let v = field.parse::<f64>().map_err(|_| IoError::Parse {
                line,
                column,
                message: format!("`{field}` is not a number"),
            })?;
            row.push(v);
            column += field.len() + 1;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parses and validates a disc table: JSON `{"discs": [{x, y, r}, …]}` or CSV
/// with header `x,y,r`.
pub fn parse_discs(text: &str) -> Result<Vec<Disc>, IoError> {
    let records: Vec<DiscRecord> = if is_json(text) {
        serde_json::from_str::<DiscFile>(text).map_err(json_error)?.discs
    } else {
        parse_csv_rows(text, &["x", "y", "r"])?
            .into_iter()
            .map(|v| DiscRecord { x: v[0], y: v[1], r: v[2] })
            .collect()
    };
    discs_from_records(&records)
}

pub fn discs_from_records(records: &[DiscRecord]) -> Result<Vec<Disc>, IoError> {
    let discs = records
        .iter()
        .enumerate()
        .map(|(index, r)| {
            Disc::new(Point::new(r.x, r.y), r.r).map_err(|source| IoError::InvalidDisc { index, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_nonoverlapping(&discs)?;
    Ok(discs)
}

pub fn load_discs(path: impl AsRef<Path>) -> Result<Vec<Disc>, IoError> {
    parse_discs(&read_text(path.as_ref())?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct PointFile {
    points: Vec<Point>,
}

/// Scan points from JSON `{"points": [{x, y}, …]}` or CSV with header `x,y`.
pub fn parse_points(text: &str) -> Result<Vec<Point>, IoError> {
    let pts = if is_json(text) {
        serde_json::from_str::<PointFile>(text).map_err(json_error)?.points
    } else {
        parse_csv_rows(text, &["x", "y"])?.into_iter().map(|v| Point::new(v[0], v[1])).collect()
    };
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(IoError::Schema("scan points must be finite".into()));
    }
    Ok(pts)
}

pub fn load_points(path: impl AsRef<Path>) -> Result<Vec<Point>, IoError> {
    parse_points(&read_text(path.as_ref())?)
}

/// Settings recorded in every document so a run can be repeated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub eps: f64,
    pub eps_area: f64,
    /// Visibility sampling resolution (degrees).
    pub resolution_deg: f64,
    pub detection_threshold: f64,
    pub seed: Option<u64>,
    pub rng: String,
    /// Grid spacing of a generated forest; absent for loaded files.
    pub spacing: Option<f64>,
    pub hull_samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub resolution_deg: f64,
    pub detection_threshold: f64,
    pub seed: Option<u64>,
    pub spacing: Option<f64>,
    /// Skip the coverage evaluation in plan documents.
    pub skip_coverage: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            resolution_deg: DEFAULT_RESOLUTION_DEG,
            detection_threshold: 0.0,
            seed: None,
            spacing: None,
            skip_coverage: false,
        }
    }
}

impl RunOptions {
    pub fn metadata(&self) -> Metadata {
        Metadata {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            eps: EPS,
            eps_area: EPS_AREA,
            resolution_deg: self.resolution_deg,
            detection_threshold: self.detection_threshold,
            seed: self.seed,
            rng: RNG_NAME.into(),
            spacing: self.spacing,
            hull_samples: HULL_SAMPLES,
        }
    }

    fn resolution(&self) -> f64 {
        resolution_rad(self.resolution_deg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub disc_count: usize,
    pub triangle_count: usize,
    pub edge_count: usize,
    pub triangles: Vec<[usize; 3]>,
    pub unrepresented: Vec<usize>,
    pub degenerate: bool,
    pub degenerate_edges: Vec<[usize; 2]>,
}

impl From<&TriangulationMesh> for MeshSummary {
    fn from(m: &TriangulationMesh) -> Self {
        Self {
            disc_count: m.disc_ids.len(),
            triangle_count: m.triangles.len(),
            edge_count: m.edges().len(),
            triangles: m.triangles.clone(),
            unrepresented: m.unrepresented.clone(),
            degenerate: m.degenerate,
            degenerate_edges: m.degenerate_edges.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub schema: String,
    pub metadata: Metadata,
    pub discs: Vec<DiscRecord>,
    pub mesh: MeshSummary,
    pub regions: Vec<FeasibleRegion>,
    pub plan: ScanPlan,
    pub issues: Vec<TriangleIssue>,
    pub shape_violations: Vec<usize>,
    /// Joint coverage of all scan points.
    pub coverage: Option<CoverageReport>,
}

impl PlanDocument {
    pub fn disc_list(&self) -> Result<Vec<Disc>, IoError> {
        discs_from_records(&self.discs)
    }

    pub fn exit_code(&self) -> i32 {
        if self.plan.uncovered_triangles.is_empty() {
            EXIT_OK
        } else {
            EXIT_INCOMPLETE
        }
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            resolution_deg: self.metadata.resolution_deg,
            detection_threshold: self.metadata.detection_threshold,
            seed: self.metadata.seed,
            spacing: self.metadata.spacing,
            skip_coverage: self.coverage.is_none(),
        }
    }

    /// Coverage of the document's scan points over its discs, with its own settings.
    pub fn recompute_coverage(&self) -> Result<CoverageReport, RunError> {
        let discs = self.disc_list()?;
        let opts = self.options();
        Ok(coverage(&self.plan.scan_points(), &discs, opts.resolution(), opts.detection_threshold)?)
    }

    /// Structural checks: schema tag, triangle partition, shapes, report arithmetic.
    pub fn validate(&self) -> Result<(), IoError> {
        let fail = |m: String| Err(IoError::Schema(m));
        if self.schema != PLAN_SCHEMA {
            return fail(format!("schema `{}`, expected `{PLAN_SCHEMA}`", self.schema));
        }
        let n = self.discs.len();
        if self.mesh.disc_count != n {
            return fail(format!("mesh counts {} discs, document has {n}", self.mesh.disc_count));
        }
        let t = self.mesh.triangle_count;
        if self.mesh.triangles.len() != t || self.mesh.triangles.iter().flatten().any(|&v| v >= n) {
            return fail("mesh triangles inconsistent with disc list".into());
        }
        let mut seen = vec![0u32; t];
        for &m in self.plan.groups.iter().flat_map(|g| g.members.iter()).chain(&self.plan.uncovered_triangles) {
            if m >= t {
                return fail(format!("triangle id {m} out of range"));
            }
            seen[m] += 1;
        }
        if let Some(id) = seen.iter().position(|&c| c != 1) {
            return fail(format!("triangle {id} appears {} times in the plan", seen[id]));
        }
        for r in &self.regions {
            if r.triangle_id >= t || self.mesh.triangles[r.triangle_id] != r.triangle {
                return fail(format!("region for triangle {} does not match the mesh", r.triangle_id));
            }
            if r.shape != r.polygon.len() {
                return fail(format!("region {} shape {} but {} vertices", r.triangle_id, r.shape, r.polygon.len()));
            }
        }
        for g in &self.plan.groups {
            if g.region.len() < 3 || !g.scan_point.is_finite() {
                return fail(format!("group {:?} has no usable region or scan point", g.members));
            }
        }
        if let Some(c) = &self.coverage {
            if c.per_disc.len() != n {
                return fail(format!("coverage lists {} discs, document has {n}", c.per_disc.len()));
            }
            if c.per_disc.iter().any(|f| !(0.0..=1.0).contains(f)) {
                return fail("coverage fraction outside [0, 1]".into());
            }
            let again = CoverageReport::from_fractions(c.per_disc.clone(), c.detection_threshold, c.resolution);
            if again != *c {
                return fail("coverage summary does not match its per-disc values".into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let doc: Self = serde_json::from_str(text).map_err(json_error)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        Self::from_json(&read_text(path.as_ref())?)
    }
}

/// Plans scan points for `discs` and packages the result.
pub fn cmd_plan(discs: &[Disc], opts: &RunOptions) -> Result<PlanDocument, RunError> {
    let out = plan_scans(discs)?;
    let cov = if opts.skip_coverage {
        None
    } else {
        Some(coverage(&out.plan.scan_points(), discs, opts.resolution(), opts.detection_threshold)?)
    };
    Ok(PlanDocument {
        schema: PLAN_SCHEMA.into(),
        metadata: opts.metadata(),
        discs: discs.iter().map(DiscRecord::from).collect(),
        mesh: MeshSummary::from(&out.mesh),
        regions: out.regions,
        plan: out.plan,
        issues: out.issues,
        shape_violations: out.shape_violations,
        coverage: cov,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// All scan points together.
    Multi,
    /// One report per scan point.
    Single,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleScan {
    pub index: usize,
    pub scan_point: Point,
    pub report: CoverageReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageDocument {
    pub schema: String,
    pub metadata: Metadata,
    pub mode: CoverageMode,
    pub scan_points: Vec<Point>,
    pub multi: Option<CoverageReport>,
    pub single: Vec<SingleScan>,
}

impl CoverageDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("coverage documents always serialize")
    }

    /// One line per report, `mean ± sd` in percent.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        if let Some(m) = &self.multi {
            s += &format!("multi ({} points): {}\n", self.scan_points.len(), format_pct(m.mean, m.sd));
        }
        for sc in &self.single {
            s += &format!(
                "scan {} ({:.3}, {:.3}): {} over {} detected, {} over all\n",
                sc.index,
                sc.scan_point.x,
                sc.scan_point.y,
                format_pct(sc.report.detected_mean, sc.report.detected_sd),
                sc.report.detected,
                format_pct(sc.report.mean, sc.report.sd),
            );
        }
        s
    }
}

pub fn single_scans(
    points: &[Point],
    discs: &[Disc],
    opts: &RunOptions,
) -> Result<Vec<SingleScan>, VisibilityError> {
    points
        .iter()
        .enumerate()
        .map(|(index, &q)| {
            let report = coverage(&[q], discs, opts.resolution(), opts.detection_threshold)?;
            Ok(SingleScan { index, scan_point: q, report })
        })
        .collect()
}

pub fn cmd_coverage(
    points: &[Point],
    discs: &[Disc],
    mode: CoverageMode,
    opts: &RunOptions,
) -> Result<CoverageDocument, RunError> {
    let (multi, single) = match mode {
        CoverageMode::Multi => {
            (Some(coverage(points, discs, opts.resolution(), opts.detection_threshold)?), Vec::new())
        }
        CoverageMode::Single => (None, single_scans(points, discs, opts)?),
    };
    Ok(CoverageDocument {
        schema: COVERAGE_SCHEMA.into(),
        metadata: opts.metadata(),
        mode,
        scan_points: points.to_vec(),
        multi,
        single,
    })
}

/// Percentages to two decimals, `mean ± sd`.
pub fn format_pct(mean: f64, sd: f64) -> String {
    format!("{:.2} ± {:.2}", 100.0 * mean, 100.0 * sd)
}

/// Spacings evaluated alongside every experiment.
pub const SWEEP_SPACINGS: [f64; 3] = [1.5, 2.0, 2.5];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spacing: f64,
    pub groups: usize,
    pub uncovered: usize,
    pub multi_mean: f64,
    pub multi_sd: f64,
    /// Mean over scan points of the single-scan detected mean.
    pub single_detected_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub preset: u32,
    pub spec: ForestSpec,
    /// Grid spacing is not known for the reference plots; this records the
    /// value assumed here.
    pub spacing_note: String,
    pub plan: PlanDocument,
    pub multi: CoverageReport,
    pub single: Vec<SingleScan>,
    pub spacing_sweep: Vec<SweepRow>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let rep: Self = serde_json::from_str(text).map_err(json_error)?;
        if rep.schema != EXPERIMENT_SCHEMA {
            return Err(IoError::Schema(format!("schema `{}`, expected `{EXPERIMENT_SCHEMA}`", rep.schema)));
        }
        rep.plan.validate()?;
        Ok(rep)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "preset {}: {} discs, {} triangles, {} scan points, {} uncovered\nmulti: {}\n",
            self.preset,
            self.plan.discs.len(),
            self.plan.mesh.triangle_count,
            self.plan.plan.groups.len(),
            self.plan.plan.uncovered_triangles.len(),
            format_pct(self.multi.mean, self.multi.sd),
        );
        for sc in &self.single {
            s += &format!(
                "single {}: {} ({}/{} detected)\n",
                sc.index,
                format_pct(sc.report.detected_mean, sc.report.detected_sd),
                sc.report.detected,
                sc.report.per_disc.len()
            );
        }
        for row in &self.spacing_sweep {
            s += &format!("spacing {:.1} m: multi {}", row.spacing, format_pct(row.multi_mean, row.multi_sd));
            if let Some(m) = row.single_detected_mean {
                s += &format!(", single {:.2}", 100.0 * m);
            }
            s += "\n";
        }
        s
    }
}

fn preset_spec(preset: u32, spacing: f64, seed: Option<u64>) -> Result<ForestSpec, RunError> {
    let mut spec = scenario::preset(preset, spacing)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    Ok(spec)
}

/// Generates a preset forest, plans it and evaluates coverage.
/// `seed` overrides the preset's own seed; `opts.spacing` defaults to 2 m.
pub fn cmd_experiment(preset: u32, seed: Option<u64>, opts: &RunOptions) -> Result<ExperimentReport, RunError> {
    let spacing = opts.spacing.unwrap_or(scenario::DEFAULT_SPACING);
    let spec = preset_spec(preset, spacing, seed)?;
    let discs = scenario::generate(&spec)?;
    let run = RunOptions { seed: Some(spec.seed), spacing: Some(spacing), skip_coverage: false, ..*opts };
    let plan = cmd_plan(&discs, &run)?;
    let multi = plan.coverage.clone().expect("coverage requested");
    let with_single = scenario::preset_has_single_scan(preset);
    let single = if with_single { single_scans(&plan.plan.scan_points(), &discs, &run)? } else { Vec::new() };

    let mut spacing_sweep = Vec::with_capacity(SWEEP_SPACINGS.len());
    for s in SWEEP_SPACINGS {
        let d = scenario::generate(&preset_spec(preset, s, seed)?)?;
        let p = cmd_plan(&d, &RunOptions { spacing: Some(s), ..run })?;
        let c = p.coverage.as_ref().expect("coverage requested");
        let single_detected_mean = if with_single {
            let per = single_scans(&p.plan.scan_points(), &d, &run)?;
            let means: Vec<f64> = per.iter().map(|x| x.report.detected_mean).collect();
            Some(mean_sd(&means).0)
        } else {
            None
        };
        spacing_sweep.push(SweepRow {
            spacing: s,
            groups: p.plan.groups.len(),
            uncovered: p.plan.uncovered_triangles.len(),
            multi_mean: c.mean,
            multi_sd: c.sd,
            single_detected_mean,
        });
    }
    Ok(ExperimentReport {
        schema: EXPERIMENT_SCHEMA.into(),
        preset,
        spec,
        spacing_note: format!("grid spacing {spacing} m is assumed; the reference plot dimensions are unknown"),
        plan,
        multi,
        single,
        spacing_sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GeomError;

    #[test]
    fn csv_two_discs() {
        let d = parse_discs("x,y,r\n0,0,1\n4,0,1").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].center, Point::new(4.0, 0.0));
    }

    #[test]
    fn json_zero_radius_rejected() {
        let err = parse_discs(r#"{"discs":[{"x":0,"y":0,"r":1},{"x":5,"y":0,"r":0}]}"#).unwrap_err();
        assert!(matches!(err, IoError::InvalidDisc { index: 1, .. }));
        assert!(err.to_string().contains("radius must be positive"));
    }

    #[test]
    fn overlap_names_pair() {
        let err = parse_discs("x,y,r\n0,0,1\n1.9,0,1\n").unwrap_err();
        match err {
            IoError::Validation(GeomError::Overlap { i, j, deficit }) => {
                assert_eq!((i, j), (0, 1));
                assert!((deficit - (0.1 + EPS)).abs() < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn parse_errors_have_positions() {
        match parse_discs("x,y,r\n0,0,1\n4,abc,1\n").unwrap_err() {
            IoError::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            e => panic!("unexpected {e:?}"),
        }
        match parse_discs("{\"discs\": [\n  {\"x\": 0, \"y\": }\n]}").unwrap_err() {
            IoError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse_discs("a,b,c\n1,2,3\n"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn points_both_formats() {
        let a = parse_points("x,y\n1,2\n").unwrap();
        let b = parse_points(r#"{"points":[{"x":1,"y":2}]}"#).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pct_format() {
        assert_eq!(format_pct(0.77834, 0.12157), "77.83 ± 12.16");
    }

    #[test]
    fn two_discs_is_input_error() {
        let d = parse_discs("x,y,r\n0,0,1\n4,0,1").unwrap();
        let err = cmd_plan(&d, &RunOptions::default()).unwrap_err();
        assert!(err.to_string().contains("need ≥ 3 non-collinear centers"));
    }

    #[test]
    fn equilateral_document() {
        let s3 = 3f64.sqrt();
        let d = parse_discs(&format!("x,y,r\n0,0,1\n4,0,1\n2,{},1\n", 2.0 * s3)).unwrap();
        let doc = cmd_plan(&d, &RunOptions::default()).unwrap();
        assert_eq!(doc.exit_code(), EXIT_OK);
        assert_eq!(doc.plan.groups.len(), 1);
        assert!(doc.plan.groups[0].scan_point.approx_eq(Point::new(2.0, 2.0 * s3 / 3.0), 1e-12));
        let back = PlanDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn tampered_document_fails_validation() {
        let doc = cmd_plan(&scenario::generate(&scenario::preset(1, 2.0).unwrap()).unwrap(), &RunOptions {
            skip_coverage: true,
            ..RunOptions::default()
        })
        .unwrap();
        doc.validate().unwrap();
        let mut bad = doc.clone();
        let stolen = bad.plan.groups[1].members[0];
        bad.plan.groups[0].members.push(stolen);
        assert!(bad.validate().is_err());
        let mut bad = doc;
        bad.schema = "other/9".into();
        assert!(bad.validate().is_err());
    }
}
