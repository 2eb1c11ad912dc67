//! Command-line experiment runner.
//!
//! One subcommand per library operation; every run resolves its full
//! parameter set (defaults, then flags, then config file — the config
//! file wins) and embeds the resolved configuration in the output
//! artifact, so re-running with that embedded configuration reproduces
//! the artifact byte for byte. Outputs are written atomically; exit codes
//! are 0 (success), 2 (validation), 3 (precision insufficient),
//! 4 (internal invariant violation).

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diophantine::{self, RealInput};
use crate::error::{Error, Result};
use crate::geometry::{BallList, BoxRegion, Interval, Point, Scalar};
use crate::measure;
use crate::systems::{self, BadWitness, BallSystem, SurvivorParams, SystemSpec};
use crate::vitali;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0;
/// Samples used when none are given.
pub const DEFAULT_SAMPLES: u64 = 100_000;

/// Fully resolved experiment description. Every run embeds one of these
/// in its artifact; feeding it back through `--config` reproduces the
/// artifact exactly. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Vec<(String, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balls: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    /// Shrink denominator M of the survivor set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Tail start index N of the survivor set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Pigeonhole bound Q.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qmax: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_q_lo: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_q_hi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_center: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_radius: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<(String, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_factor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_box: Option<Vec<(String, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),+ $(,)?) => {
        $(if $src.$field.is_some() { $dst.$field = $src.$field.clone(); })+
    };
}

impl ExperimentConfig {
    /// Applies a config file on top: file values win over flag values.
    fn apply_file(&mut self, file: &ExperimentConfig) -> Result<()> {
        if !file.subcommand.is_empty() && file.subcommand != self.subcommand {
            return Err(Error::invalid(format!(
                "config is for subcommand {:?}, not {:?}",
                file.subcommand, self.subcommand
            )));
        }
        overlay!(
            self, file, system, dim, window, balls, delta, kappa, epsilon, m, n, q, depth,
            bound, qmax, resolution, samples, x, alpha, y, r, tail_q_lo, tail_q_hi, start,
            probe_center, probe_radius, region, sweep, verify_factor, sample_box, seed,
            threads, format,
        );
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "badapprox",
    version,
    about = "Exact and Monte Carlo measure experiments for ball unions, greedy covers, and badly approximable points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// JSON config file; its values override flags.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Seed for stochastic experiments (recorded in every output).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sampling; results are thread-count independent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path; stdout when omitted. Writes are atomic.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format: json or csv (csv only for sweep outputs).
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Args, Debug, Default, Clone)]
struct SystemArgs {
    /// System kind (classical | z2) or path to a system-spec JSON file.
    #[arg(long)]
    system: Option<String>,
    /// Dimension of the classical system.
    #[arg(long)]
    dim: Option<u32>,
    /// Window of the classical system as JSON, e.g. [["0","1"]].
    #[arg(long)]
    window: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scaled-union measure bound: exact ratio in 1-D, certificate above.
    Lemma1 {
        #[command(flatten)]
        common: CommonArgs,
        /// Ball-list JSON file.
        #[arg(long)]
        balls: Option<String>,
        /// Scale factor in (0, 1], as p/q.
        #[arg(long)]
        delta: Option<String>,
        /// Expected dimension; cross-checked against the ball file.
        #[arg(long)]
        dim: Option<u32>,
    },
    /// Greedy disjoint subfamily with verified enlargement cover.
    Vitali {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        balls: Option<String>,
        /// Enlargement factor to verify (default 3).
        #[arg(long)]
        verify_factor: Option<String>,
    },
    /// Pigeonhole search for a simultaneous approximation witness.
    Dirichlet {
        #[command(flatten)]
        common: CommonArgs,
        /// Coordinates of alpha (repeatable): p/q, surd(a,b,n,c), approx(v,e).
        #[arg(long)]
        alpha: Vec<String>,
        /// Pigeonhole bound Q >= 2.
        #[arg(long = "Q")]
        q: Option<u64>,
    },
    /// Continued-fraction expansion with convergents.
    Cf {
        #[command(flatten)]
        common: CommonArgs,
        /// The real input literal.
        #[arg(long)]
        x: Option<String>,
        /// Number of partial quotients after the integer part.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Bounded-partial-quotient evidence report.
    #[command(name = "bad-report")]
    BadReport {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Cube-vs-ball badly-approximable bridge over the classical family.
    Bridge {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        alpha: Vec<String>,
        #[arg(long)]
        kappa: Option<String>,
        /// Index bound of the scan.
        #[arg(long)]
        bound: Option<u64>,
        /// Window as JSON, e.g. [["0","1"]].
        #[arg(long)]
        window: Option<String>,
    },
    /// Count of large-radius balls intersecting a probe ball.
    Shrinking {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// Probe centre coordinates, comma-separated rationals.
        #[arg(long)]
        probe_center: Option<String>,
        #[arg(long)]
        probe_radius: Option<String>,
        /// Radius threshold.
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
        /// Denominator cutoff alternative to --bound (classical systems).
        #[arg(long)]
        qmax: Option<u64>,
    },
    /// How many scaled balls of the system contain a point.
    Hits {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// Point coordinates, comma-separated rationals.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
    },
    /// Exact grid survivor fractions of the shrunk-tail avoidance set.
    Survivors {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// Shrink denominator.
        #[arg(long = "M")]
        m: Option<u64>,
        /// Tail start index.
        #[arg(long = "N")]
        n: Option<u64>,
        /// Denominator cutoff (classical systems): sweeps q = 1..=qmax.
        #[arg(long)]
        qmax: Option<u64>,
        /// Raw index bound (alternative to --qmax).
        #[arg(long)]
        bound: Option<u64>,
        /// Grid points per axis.
        #[arg(long)]
        resolution: Option<u64>,
        /// Grid region as JSON, e.g. [["0","1"]]; defaults to the window.
        #[arg(long)]
        region: Option<String>,
    },
    /// Exact covered fraction of a region by the scaled tail.
    Coverage {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        kappa: Option<String>,
        /// Tail start index.
        #[arg(long)]
        start: Option<u64>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        qmax: Option<u64>,
        /// Denominator cutoffs to sweep (classical), e.g. --sweep 10 --sweep 100.
        #[arg(long)]
        sweep: Vec<u64>,
        #[arg(long)]
        region: Option<String>,
    },
    /// Per-scale density experiment around a probe ball.
    Density {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "M")]
        m: Option<u64>,
        #[arg(long = "N")]
        n: Option<u64>,
        /// Probe centre coordinates, comma-separated rationals.
        #[arg(long)]
        y: Option<String>,
        /// Probe radius.
        #[arg(long)]
        r: Option<String>,
        /// First tail denominator (classical systems).
        #[arg(long)]
        tail_q_lo: Option<u64>,
        /// Last tail denominator (classical systems).
        #[arg(long)]
        tail_q_hi: Option<u64>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Monte Carlo measure of a finite ball union.
    Mc {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        balls: Option<String>,
        /// Sampling box as JSON, e.g. [["-1","1"],["-1","1"]].
        #[arg(long)]
        sample_box: Option<String>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Catalogue of experiments and their flags.
    List {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Entry point used by the binary: parses, runs, reports, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let kind = match e.exit_code() {
                3 => "precision-insufficient",
                4 => "internal",
                _ => "validation",
            };
            eprintln!("error: exit={} kind={} msg={:?}", e.exit_code(), kind, e.to_string());
            e.exit_code()
        }
    }
}

fn parse_axes(label: &str, s: &str) -> Result<Vec<(String, String)>> {
    serde_json::from_str(s)
        .map_err(|e| Error::invalid(format!("{label} must be JSON like [[\"0\",\"1\"]]: {e}")))
}

fn parse_coords(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).collect()
}

fn execute(command: Command) -> Result<()> {
    let (mut cfg, common) = build_config(command)?;
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)?;
        let file: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.apply_file(&file)?;
    }
    let doc = if cfg.subcommand == "list" { run_list(&cfg)? } else { dispatch(&mut cfg)? };
    emit(&common.out, &doc)
}

/// Lowers the parsed command line into a partially-resolved config.
fn build_config(command: Command) -> Result<(ExperimentConfig, CommonArgs)> {
    let mut cfg = ExperimentConfig::default();
    let common = match command {
        Command::Lemma1 { common, balls, delta, dim } => {
            cfg.subcommand = "lemma1".into();
            cfg.balls = balls;
            cfg.delta = delta;
            cfg.dim = dim;
            common
        }
        Command::Vitali { common, balls, verify_factor } => {
            cfg.subcommand = "vitali".into();
            cfg.balls = balls;
            cfg.verify_factor = verify_factor;
            common
        }
        Command::Dirichlet { common, alpha, q } => {
            cfg.subcommand = "dirichlet".into();
            if !alpha.is_empty() {
                cfg.alpha = Some(alpha);
            }
            cfg.q = q;
            common
        }
        Command::Cf { common, x, depth } => {
            cfg.subcommand = "cf".into();
            cfg.x = x;
            cfg.depth = depth;
            common
        }
        Command::BadReport { common, x, depth } => {
            cfg.subcommand = "bad-report".into();
            cfg.x = x;
            cfg.depth = depth;
            common
        }
        Command::Bridge { common, alpha, kappa, bound, window } => {
            cfg.subcommand = "bridge".into();
            if !alpha.is_empty() {
                cfg.alpha = Some(alpha);
            }
            cfg.kappa = kappa;
            cfg.bound = bound;
            cfg.window = window.as_deref().map(|w| parse_axes("window", w)).transpose()?;
            common
        }
        Command::Shrinking { common, system, probe_center, probe_radius, epsilon, bound, qmax } => {
            cfg.subcommand = "shrinking".into();
            apply_system_args(&mut cfg, system)?;
            cfg.probe_center = probe_center.as_deref().map(parse_coords);
            cfg.probe_radius = probe_radius;
            cfg.epsilon = epsilon;
            cfg.bound = bound;
            cfg.qmax = qmax;
            common
        }
        Command::Hits { common, system, alpha, kappa, bound, qmax } => {
            cfg.subcommand = "hits".into();
            apply_system_args(&mut cfg, system)?;
            cfg.alpha = alpha.as_deref().map(parse_coords);
            cfg.kappa = kappa;
            cfg.bound = bound;
            cfg.qmax = qmax;
            common
        }
        Command::Survivors { common, system, m, n, qmax, bound, resolution, region } => {
            cfg.subcommand = "survivors".into();
            apply_system_args(&mut cfg, system)?;
            cfg.m = m;
            cfg.n = n;
            cfg.qmax = qmax;
            cfg.bound = bound;
            cfg.resolution = resolution;
            cfg.region = region.as_deref().map(|w| parse_axes("region", w)).transpose()?;
            common
        }
        Command::Coverage { common, system, kappa, start, bound, qmax, sweep, region } => {
            cfg.subcommand = "coverage".into();
            apply_system_args(&mut cfg, system)?;
            cfg.kappa = kappa;
            cfg.start = start;
            cfg.bound = bound;
            cfg.qmax = qmax;
            if !sweep.is_empty() {
                cfg.sweep = Some(sweep);
            }
            cfg.region = region.as_deref().map(|w| parse_axes("region", w)).transpose()?;
            common
        }
        Command::Density {
            common,
            system,
            m,
            n,
            y,
            r,
            tail_q_lo,
            tail_q_hi,
            bound,
            samples,
        } => {
            cfg.subcommand = "density".into();
            apply_system_args(&mut cfg, system)?;
            cfg.m = m;
            cfg.n = n;
            cfg.y = y.as_deref().map(parse_coords);
            cfg.r = r;
            cfg.tail_q_lo = tail_q_lo;
            cfg.tail_q_hi = tail_q_hi;
            cfg.bound = bound;
            cfg.samples = samples;
            common
        }
        Command::Mc { common, balls, sample_box, samples } => {
            cfg.subcommand = "mc".into();
            cfg.balls = balls;
            cfg.sample_box =
                sample_box.as_deref().map(|w| parse_axes("sample-box", w)).transpose()?;
            cfg.samples = samples;
            common
        }
        Command::List { common } => {
            cfg.subcommand = "list".into();
            common
        }
    };
    cfg.seed = common.seed.or(cfg.seed);
    cfg.threads = common.threads.or(cfg.threads);
    cfg.format = common.format.clone().or(cfg.format.take());
    Ok((cfg, common))
}

fn apply_system_args(cfg: &mut ExperimentConfig, args: SystemArgs) -> Result<()> {
    cfg.system = args.system;
    cfg.dim = args.dim;
    cfg.window = args.window.as_deref().map(|w| parse_axes("window", w)).transpose()?;
    Ok(())
}

/// Output artifact: either a JSON document or CSV text. Both embed the
/// resolved configuration.
enum OutputDoc {
    Json(Value),
    Csv(String),
}

fn emit(out: &Option<String>, doc: &OutputDoc) -> Result<()> {
    let text = match doc {
        OutputDoc::Json(v) => {
            let mut t = serde_json::to_string_pretty(v)?;
            t.push('\n');
            t
        }
        OutputDoc::Csv(t) => t.clone(),
    };
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => write_atomic(Path::new(path), text.as_bytes()),
    }
}

/// Writes through a temp file in the destination directory plus rename,
/// so failed runs never leave partial artifacts.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn scalar_of(label: &str, field: &Option<String>) -> Result<Scalar> {
    field
        .as_deref()
        .ok_or_else(|| Error::invalid(format!("missing required parameter --{label}")))?
        .parse()
}

fn required<T: Copy>(label: &str, field: &Option<T>) -> Result<T> {
    field.ok_or_else(|| Error::invalid(format!("missing required parameter --{label}")))
}

fn point_of(label: &str, coords: &Option<Vec<String>>) -> Result<Point> {
    let coords = coords
        .as_ref()
        .ok_or_else(|| Error::invalid(format!("missing required parameter --{label}")))?;
    Ok(Point::new(coords.iter().map(|c| c.parse()).collect::<Result<_>>()?))
}

fn real_inputs_of(label: &str, lits: &Option<Vec<String>>) -> Result<Vec<RealInput>> {
    let lits = lits
        .as_ref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| Error::invalid(format!("missing required parameter --{label}")))?;
    lits.iter().map(|l| RealInput::from_str(l)).collect()
}

fn axes_to_box(axes: &[(String, String)]) -> Result<BoxRegion> {
    let mut parsed = Vec::with_capacity(axes.len());
    for (lo, hi) in axes {
        parsed.push((lo.parse::<Scalar>()?, hi.parse::<Scalar>()?));
    }
    BoxRegion::from_axes(parsed)
}

fn box_to_axes(b: &BoxRegion) -> Vec<(String, String)> {
    (0..b.dim())
        .map(|a| {
            let (lo, hi) = b.axis(a);
            (lo.to_string(), hi.to_string())
        })
        .collect()
}

fn load_balls(cfg: &ExperimentConfig) -> Result<BallList> {
    let path = cfg
        .balls
        .as_deref()
        .ok_or_else(|| Error::invalid("missing required parameter --balls"))?;
    BallList::from_json(&std::fs::read_to_string(path)?)
}

/// Builds the ball system described by the config, filling defaulted
/// fields back into it so the embedded config is complete.
fn build_system(cfg: &mut ExperimentConfig) -> Result<BallSystem> {
    let kind = cfg.system.get_or_insert_with(|| "classical".to_string()).clone();
    match kind.as_str() {
        "classical" => {
            let dim = *cfg.dim.get_or_insert(1);
            let window = match &cfg.window {
                Some(axes) => axes_to_box(axes)?,
                None => {
                    let w = BoxRegion::unit(dim as usize);
                    cfg.window = Some(box_to_axes(&w));
                    w
                }
            };
            systems::classical_system(dim, window)
        }
        "z2" => Ok(systems::z2_example_system()),
        path => {
            let spec = SystemSpec::from_json(&std::fs::read_to_string(path)?)?;
            spec.build()
        }
    }
}

/// Translates a denominator cutoff into an index bound for classical
/// systems; other systems must give a raw bound.
fn resolve_bound(cfg: &mut ExperimentConfig, system: &BallSystem) -> Result<u64> {
    match (cfg.bound, cfg.qmax) {
        (Some(b), None) => Ok(b),
        (None, Some(q)) => match system {
            BallSystem::Classical(c) => {
                let b = c.count_through_q(q);
                cfg.bound = Some(b);
                Ok(b)
            }
            _ => Err(Error::invalid("--qmax applies only to classical systems")),
        },
        (Some(_), Some(_)) => Err(Error::invalid("give either --bound or --qmax, not both")),
        (None, None) => Err(Error::invalid("missing required parameter --bound (or --qmax)")),
    }
}

fn json_doc(cfg: &ExperimentConfig, result: Value) -> Result<OutputDoc> {
    if cfg.format.as_deref().unwrap_or("json") != "json" {
        return Err(Error::invalid(format!(
            "subcommand {:?} only emits json output",
            cfg.subcommand
        )));
    }
    Ok(OutputDoc::Json(json!({
        "config": serde_json::to_value(cfg)?,
        "result": result,
    })))
}

/// CSV artifact with the pinned columns and the resolved config embedded
/// in a leading comment line.
fn csv_doc(cfg: &ExperimentConfig, rows: &[(String, String, String, String)]) -> Result<OutputDoc> {
    let mut out = String::new();
    out.push_str("# config: ");
    out.push_str(&serde_json::to_string(cfg)?);
    out.push('\n');
    out.push_str("parameter,value,ci,samples,seed\n");
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    for (parameter, value, ci, samples) in rows {
        out.push_str(&format!("{parameter},{value},{ci},{samples},{seed}\n"));
    }
    Ok(OutputDoc::Csv(out))
}

fn dispatch(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    match cfg.subcommand.clone().as_str() {
        "lemma1" => run_lemma1(cfg),
        "vitali" => run_vitali(cfg),
        "dirichlet" => run_dirichlet(cfg),
        "cf" => run_cf(cfg),
        "bad-report" => run_bad_report(cfg),
        "bridge" => run_bridge(cfg),
        "shrinking" => run_shrinking(cfg),
        "hits" => run_hits(cfg),
        "survivors" => run_survivors(cfg),
        "coverage" => run_coverage(cfg),
        "density" => run_density(cfg),
        "mc" => run_mc(cfg),
        other => Err(Error::invalid(format!("unknown subcommand {other:?}"))),
    }
}

fn run_lemma1(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let list = load_balls(cfg)?;
    if let Some(dim) = cfg.dim {
        if dim as usize != list.dim {
            return Err(Error::invalid(format!(
                "--dim {dim} does not match the ball file dimension {}",
                list.dim
            )));
        }
    }
    let delta = scalar_of("delta", &cfg.delta)?;
    let cert = vitali::lemma1_certificate(&list.balls, &delta)?;
    let (exact_ratio, holds) = if list.dim == 1 {
        let bound = vitali::lemma1_ratio_1d(&list.balls, &delta)?;
        let ratio = bound.exact_ratio.expect("1-D path");
        let holds = ratio >= delta;
        (Some(ratio), holds)
    } else {
        (None, true)
    };
    let result = json!({
        "delta": delta.to_string(),
        "dim": list.dim,
        "exact_ratio": exact_ratio.as_ref().map(Scalar::to_string),
        "certified_lower_bound": cert.bound.certified_lower_bound.to_string(),
        "holds": holds,
        "picked_indices": cert.greedy.picked_indices,
        "scaled_volume_sum": cert.scaled_volume_sum.to_string(),
        "enlarged_volume_sum": cert.enlarged_volume_sum.to_string(),
    });
    json_doc(cfg, result)
}

fn run_vitali(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let list = load_balls(cfg)?;
    let factor: Scalar = cfg.verify_factor.get_or_insert_with(|| "3".to_string()).parse()?;
    let greedy = vitali::greedy_disjoint_subfamily(&list.balls)?;
    let factor_verified = vitali::verify_enlarged_cover(&list.balls, &greedy, &factor)?;
    let mut result = serde_json::to_value(&greedy)?;
    result["verify_factor"] = json!(factor.to_string());
    result["factor_cover_verified"] = json!(factor_verified);
    json_doc(cfg, result)
}

fn run_dirichlet(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let alpha = real_inputs_of("alpha", &cfg.alpha)?;
    let q_limit = required("Q", &cfg.q)?;
    let witness = diophantine::dirichlet_search(&alpha, q_limit)?;
    json_doc(cfg, serde_json::to_value(&witness)?)
}

fn run_cf(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let x: RealInput = cfg
        .x
        .as_deref()
        .ok_or_else(|| Error::invalid("missing required parameter --x"))?
        .parse()?;
    let depth = *cfg.depth.get_or_insert(40);
    let cf = diophantine::cf_expand(&x, depth)?;
    let convs = diophantine::convergents(&cf);
    let result = json!({
        "cf": serde_json::to_value(&cf)?,
        "convergents": serde_json::to_value(&convs)?,
    });
    json_doc(cfg, result)
}

fn run_bad_report(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let x: RealInput = cfg
        .x
        .as_deref()
        .ok_or_else(|| Error::invalid("missing required parameter --x"))?
        .parse()?;
    let depth = *cfg.depth.get_or_insert(100);
    let report = diophantine::bad_report(&x, depth)?;
    json_doc(cfg, serde_json::to_value(&report)?)
}

fn run_bridge(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let alpha = real_inputs_of("alpha", &cfg.alpha)?;
    let kappa = scalar_of("kappa", &cfg.kappa)?;
    let bound = required("bound", &cfg.bound)?;
    let window = match &cfg.window {
        Some(axes) => axes_to_box(axes)?,
        None => {
            let w = BoxRegion::unit(alpha.len());
            cfg.window = Some(box_to_axes(&w));
            w
        }
    };
    let report = diophantine::classical_bad_bridge(&alpha, &kappa, bound, window)?;
    json_doc(cfg, serde_json::to_value(&report)?)
}

fn run_shrinking(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let system = build_system(cfg)?;
    let center = point_of("probe-center", &cfg.probe_center)?;
    let radius = scalar_of("probe-radius", &cfg.probe_radius)?;
    let probe = crate::geometry::Ball::new(center, radius)?;
    let epsilon = scalar_of("epsilon", &cfg.epsilon)?;
    let bound = resolve_bound(cfg, &system)?;
    let report = systems::shrinking_locally_report(&system, &probe, &epsilon, bound)?;
    json_doc(cfg, serde_json::to_value(&report)?)
}

fn run_hits(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let system = build_system(cfg)?;
    let alpha = point_of("alpha", &cfg.alpha)?;
    let kappa = scalar_of("kappa", &cfg.kappa)?;
    let bound = resolve_bound(cfg, &system)?;
    let count = systems::hit_count(&system, &alpha, bound, &kappa)?;
    // Survival over the same range is the complementary semi-decision.
    let witness = BadWitness::new(kappa.clone(), 1, bound)?;
    let survives = systems::tail_survives(&system, &alpha, &witness)?;
    let result = json!({
        "count": count,
        "index_bound": bound,
        "kappa": kappa.to_string(),
        "tail_survives_from_1": survives,
        "semi_decision": "verified up to index_bound only",
    });
    json_doc(cfg, result)
}

fn run_survivors(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let system = build_system(cfg)?;
    let m = required("M", &cfg.m)?;
    let n = *cfg.n.get_or_insert(1);
    let resolution = required("resolution", &cfg.resolution)?;
    let region = match &cfg.region {
        Some(axes) => axes_to_box(axes)?,
        None => {
            let w = match (&system, &cfg.window) {
                (_, Some(axes)) => axes_to_box(axes)?,
                (s, None) => BoxRegion::unit(s.dimension()),
            };
            cfg.region = Some(box_to_axes(&w));
            w
        }
    };
    let params = SurvivorParams::new(n, m)?;

    let format = cfg.format.get_or_insert_with(|| "csv".to_string()).clone();
    if format == "csv" {
        // Per-denominator sweep (classical systems, tail start 1).
        let qmax = required("qmax", &cfg.qmax)?;
        let classical = match &system {
            BallSystem::Classical(c) if c.dim() == 1 && n == 1 => c,
            _ => {
                return Err(Error::invalid(
                    "csv sweep needs a one-dimensional classical system with N = 1; \
                     use --format json for a single report",
                ))
            }
        };
        let sweep = measure::survivor_sweep_classical_1d(classical, m, qmax, resolution, &region)?;
        let rows: Vec<(String, String, String, String)> = sweep
            .iter()
            .map(|(q, fraction)| {
                (
                    q.to_string(),
                    fraction.to_f64().to_string(),
                    String::new(),
                    resolution.to_string(),
                )
            })
            .collect();
        csv_doc(cfg, &rows)
    } else {
        let bound = resolve_bound(cfg, &system)?;
        let report = measure::survivor_fraction(&system, &params, bound, resolution, &region)?;
        let mut result = serde_json::to_value(&report)?;
        result["surviving_fraction_f64"] = json!(report.surviving_fraction.to_f64());
        json_doc(cfg, result)
    }
}

fn run_coverage(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let system = build_system(cfg)?;
    let kappa = scalar_of("kappa", &cfg.kappa)?;
    let start = *cfg.start.get_or_insert(1);
    let region = match &cfg.region {
        Some(axes) => axes_to_box(axes)?,
        None => {
            let w = match &cfg.window {
                Some(axes) => axes_to_box(axes)?,
                None => BoxRegion::unit(1),
            };
            cfg.region = Some(box_to_axes(&w));
            w
        }
    };
    if region.dim() != 1 {
        return Err(Error::invalid("coverage is exact in one dimension only"));
    }
    let (rlo, rhi) = region.axis(0);
    let interval = Interval::new(rlo.clone(), rhi.clone())?;

    if let Some(sweep) = cfg.sweep.clone() {
        let classical = match &system {
            BallSystem::Classical(c) => c,
            _ => return Err(Error::invalid("--sweep applies only to classical systems")),
        };
        let mut rows = Vec::with_capacity(sweep.len());
        for q in &sweep {
            let bound = classical.count_through_q(*q);
            let fraction =
                measure::coverage_fraction_1d_exact(&system, &kappa, start, bound, &interval)?;
            rows.push((
                q.to_string(),
                fraction.to_f64().to_string(),
                String::new(),
                String::new(),
            ));
        }
        if cfg.format.get_or_insert_with(|| "csv".to_string()) == "csv" {
            return csv_doc(cfg, &rows);
        }
        let entries: Vec<Value> =
            rows.iter().map(|(q, v, _, _)| json!({"qmax": q, "fraction": v})).collect();
        return json_doc(cfg, json!(entries));
    }

    let bound = resolve_bound(cfg, &system)?;
    let fraction = measure::coverage_fraction_1d_exact(&system, &kappa, start, bound, &interval)?;
    let result = json!({
        "fraction": fraction.to_string(),
        "fraction_f64": fraction.to_f64(),
        "kappa": kappa.to_string(),
        "start": start,
        "index_bound": bound,
    });
    json_doc(cfg, result)
}

fn run_density(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let system = build_system(cfg)?;
    let m = required("M", &cfg.m)?;
    let n = *cfg.n.get_or_insert(1);
    let center = point_of("y", &cfg.y)?;
    let radius = scalar_of("r", &cfg.r)?;
    let (tail_start, bound) = match (&system, cfg.tail_q_lo, cfg.tail_q_hi) {
        (BallSystem::Classical(c), Some(qlo), Some(qhi)) => {
            (c.first_index_of_q(qlo), c.count_through_q(qhi))
        }
        (_, None, None) => {
            let b = resolve_bound(cfg, &system)?;
            (n, b)
        }
        _ => {
            return Err(Error::invalid(
                "give both --tail-q-lo and --tail-q-hi (classical) or --bound",
            ))
        }
    };
    let samples = *cfg.samples.get_or_insert(DEFAULT_SAMPLES);
    let seed = *cfg.seed.get_or_insert(DEFAULT_SEED);
    let params = SurvivorParams::new(n, m)?;
    let report = measure::local_density_experiment(
        &system, &params, &center, &radius, tail_start, bound, samples, seed,
    )?;
    json_doc(cfg, serde_json::to_value(&report)?)
}

fn run_mc(cfg: &mut ExperimentConfig) -> Result<OutputDoc> {
    let list = load_balls(cfg)?;
    let sample_box = match &cfg.sample_box {
        Some(axes) => axes_to_box(axes)?,
        None => return Err(Error::invalid("missing required parameter --sample-box")),
    };
    let samples = *cfg.samples.get_or_insert(DEFAULT_SAMPLES);
    let seed = *cfg.seed.get_or_insert(DEFAULT_SEED);
    let threads = *cfg.threads.get_or_insert(1);
    let est = measure::mc_union_measure_threaded(&list.balls, &sample_box, samples, seed, threads)?;
    json_doc(cfg, serde_json::to_value(&est)?)
}

fn run_list(cfg: &ExperimentConfig) -> Result<OutputDoc> {
    let entries = catalog();
    match cfg.format.as_deref().unwrap_or("text") {
        "json" => Ok(OutputDoc::Json(serde_json::to_value(&entries)?)),
        _ => {
            let mut out = String::new();
            for e in &entries {
                out.push_str(&format!("{:<11} {}\n", e.name, e.summary));
                out.push_str(&format!("{:<11}   required: {}\n", "", e.required));
            }
            Ok(OutputDoc::Csv(out))
        }
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    name: &'static str,
    summary: &'static str,
    required: &'static str,
}

fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "lemma1",
            summary: "scaled-union measure bound: exact 1-D ratio and general certificate",
            required: "--balls, --delta",
        },
        CatalogEntry {
            name: "vitali",
            summary: "greedy disjoint subfamily with verified enlargement cover",
            required: "--balls [--verify-factor]",
        },
        CatalogEntry {
            name: "dirichlet",
            summary: "pigeonhole search for a simultaneous approximation witness",
            required: "--alpha (repeatable), --Q",
        },
        CatalogEntry {
            name: "cf",
            summary: "continued-fraction expansion with convergents",
            required: "--x [--depth]",
        },
        CatalogEntry {
            name: "bad-report",
            summary: "bounded-partial-quotient evidence for one real number",
            required: "--x [--depth]",
        },
        CatalogEntry {
            name: "bridge",
            summary: "cube vs ball badly-approximable conditions over the lattice family",
            required: "--alpha, --kappa, --bound [--window]",
        },
        CatalogEntry {
            name: "shrinking",
            summary: "count of large-radius balls meeting a probe, with cutoff certificate",
            required: "--system, --probe-center, --probe-radius, --epsilon, --bound|--qmax",
        },
        CatalogEntry {
            name: "hits",
            summary: "how many scaled balls of a system contain a point",
            required: "--system, --alpha, --kappa, --bound|--qmax",
        },
        CatalogEntry {
            name: "survivors",
            summary: "exact grid fractions avoiding the shrunk tail (csv sweep or json)",
            required: "--system, --M, --resolution, --qmax|--bound",
        },
        CatalogEntry {
            name: "coverage",
            summary: "exact covered fraction of a region by the scaled tail (1-D)",
            required: "--system, --kappa, --bound|--qmax|--sweep",
        },
        CatalogEntry {
            name: "density",
            summary: "per-scale coverage inequality around a probe ball",
            required: "--system, --M, --y, --r, --tail-q-lo/--tail-q-hi|--bound",
        },
        CatalogEntry {
            name: "mc",
            summary: "Monte Carlo measure of a finite ball union with Hoeffding CI",
            required: "--balls, --sample-box [--samples --seed --threads]",
        },
        CatalogEntry {
            name: "list",
            summary: "this catalogue",
            required: "[--format json]",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_overlay_prefers_file() {
        let mut base = ExperimentConfig {
            subcommand: "cf".into(),
            x: Some("1/2".into()),
            depth: Some(5),
            ..Default::default()
        };
        let file = ExperimentConfig {
            subcommand: "cf".into(),
            x: Some("355/113".into()),
            ..Default::default()
        };
        base.apply_file(&file).unwrap();
        assert_eq!(base.x.as_deref(), Some("355/113"));
        assert_eq!(base.depth, Some(5));
    }

    #[test]
    fn config_subcommand_mismatch_rejected() {
        let mut base = ExperimentConfig { subcommand: "cf".into(), ..Default::default() };
        let file = ExperimentConfig { subcommand: "vitali".into(), ..Default::default() };
        assert!(base.apply_file(&file).is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"subcommand":"cf","bogus":1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn catalog_covers_every_pinned_subcommand() {
        let names: Vec<&str> = catalog().iter().map(|e| e.name).collect();
        for pinned in [
            "lemma1",
            "vitali",
            "dirichlet",
            "cf",
            "bad-report",
            "bridge",
            "shrinking",
            "hits",
            "survivors",
            "coverage",
            "density",
            "list",
        ] {
            assert!(names.contains(&pinned), "missing {pinned}");
        }
    }
}
