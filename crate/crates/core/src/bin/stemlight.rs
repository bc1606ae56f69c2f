use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use stemlight::io::{
    cmd_coverage, cmd_experiment, cmd_plan, load_discs, load_points, CoverageMode, DiscRecord, PlanDocument,
    RunOptions, EXIT_INPUT,
};
use stemlight::scenario;
use stemlight::svg::{render_svg, Layers};
use stemlight::visibility::DEFAULT_RESOLUTION_DEG;

#[derive(Parser)]
#[command(name = "stemlight", version, about = "Plan scanner positions that illuminate circular stems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Sampling {
    /// Visibility sampling resolution in degrees.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION_DEG)]
    resolution: f64,
    /// A disc counts as detected when its illuminated fraction exceeds this.
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a disc file and place scan points.
    Plan {
        /// Disc file: CSV `x,y,r` or JSON `{"discs": [...]}`.
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write an SVG drawing.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        layers: String,
        /// Skip the coverage evaluation.
        #[arg(long)]
        no_coverage: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Evaluate illuminated boundary fractions.
    Coverage {
        /// Plan document whose discs and scan points are used.
        plan: Option<PathBuf>,
        /// Disc file, when no plan is given.
        #[arg(long, requires = "points", conflicts_with = "plan")]
        discs: Option<PathBuf>,
        /// Scan points: CSV `x,y` or JSON `{"points": [...]}`.
        #[arg(long)]
        points: Option<PathBuf>,
        /// One report per scan point.
        #[arg(long, conflicts_with = "multi")]
        single: bool,
        /// All scan points together (default).
        #[arg(long)]
        multi: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run a reference experiment preset end to end.
    Experiment {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5))]
        preset: u32,
        /// Overrides the preset's jitter seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Grid spacing in meters.
        #[arg(long, default_value_t = scenario::DEFAULT_SPACING)]
        spacing: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value = "all")]
        layers: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Write the discs of a preset forest.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5))]
        preset: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = scenario::DEFAULT_SPACING)]
        spacing: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a plan document as SVG.
    Render {
        plan: PathBuf,
        #[arg(long, default_value = "all")]
        layers: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(s: &Sampling) -> RunOptions {
    RunOptions { resolution_deg: s.resolution, detection_threshold: s.threshold, ..RunOptions::default() }
}

fn layers(list: &str) -> Result<Layers> {
    Layers::parse(list).map_err(anyhow::Error::msg)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Plan { input, output, svg, layers: l, no_coverage, sampling } => {
            let discs = load_discs(&input)?;
            let doc = cmd_plan(&discs, &RunOptions { skip_coverage: no_coverage, ..options(&sampling) })?;
            emit(output.as_deref(), &doc.to_json())?;
            if let Some(p) = svg {
                emit(Some(&p), &render_svg(&doc, &layers(&l)?))?;
            }
            for issue in &doc.issues {
                eprintln!("triangle {}: {}", issue.triangle_id, issue.message);
            }
            if let Some(c) = &doc.coverage {
                eprintln!(
                    "{} scan points, coverage {}",
                    doc.plan.groups.len(),
                    stemlight::io::format_pct(c.mean, c.sd)
                );
            }
            Ok(doc.exit_code() as u8)
        }
        Command::Coverage { plan, discs, points, single, multi: _, output, sampling } => {
            let mut opts = options(&sampling);
            let (disc_list, pts) = match (plan, discs, points) {
                (Some(p), None, extra) => {
                    let doc = PlanDocument::load(&p)?;
                    opts.seed = doc.metadata.seed;
                    opts.spacing = doc.metadata.spacing;
                    let pts = match extra {
                        Some(pp) => load_points(&pp)?,
                        None => doc.plan.scan_points(),
                    };
                    (doc.disc_list()?, pts)
                }
                (None, Some(d), Some(pp)) => (load_discs(&d)?, load_points(&pp)?),
                _ => anyhow::bail!("give a plan document, or --discs with --points"),
            };
            let mode = if single { CoverageMode::Single } else { CoverageMode::Multi };
            let doc = cmd_coverage(&pts, &disc_list, mode, &opts)?;
            eprint!("{}", doc.summary());
            emit(output.as_deref(), &doc.to_json())?;
            Ok(0)
        }
        Command::Experiment { preset, seed, spacing, out_dir, layers: l, sampling } => {
            let opts = RunOptions { spacing: Some(spacing), ..options(&sampling) };
            let report = cmd_experiment(preset, seed, &opts)?;
            std::fs::create_dir_all(&out_dir)?;
            let stem = out_dir.join(format!("experiment_{preset}"));
            emit(Some(&stem.with_extension("json")), &report.to_json())?;
            emit(Some(&stem.with_extension("svg")), &render_svg(&report.plan, &layers(&l)?))?;
            print!("{}", report.summary());
            Ok(report.plan.exit_code() as u8)
        }
        Command::Generate { preset, seed, spacing, output } => {
            let mut spec = scenario::preset(preset, spacing)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let discs = scenario::generate(&spec)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for d in &discs {
                w.serialize(DiscRecord::from(d))?;
            }
            emit(output.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
            Ok(0)
        }
        Command::Render { plan, layers: l, output } => {
            let doc = PlanDocument::load(&plan)?;
            emit(output.as_deref(), &render_svg(&doc, &layers(&l)?))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
