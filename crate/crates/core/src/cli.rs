//! Command-line scenario runner.
//!
//! Each subcommand reads its inputs as file paths or inline JSON, runs one
//! computation and prints a result document that echoes the scenario. Output is
//! byte-identical across runs unless `--timing` asks for the wall time.
//!
//! Parameters resolve as command-line flag, then `--config` file (TOML with the
//! flag names in snake case), then the built-in default.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 when an iteration fails
//! to converge. Failures print `{"error": {...}}` on standard error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{capacity, CompactRegion};
use crate::convexfun::{self, default_schedule, is_model, rooftop, singularity_envelope, Obstacle, PLConvexFunction};
use crate::error::Error;
use crate::geometry::{body_from_subgradients, ConvexBody};
use crate::ma_measure::{full_mass, ma};
use crate::mixedvol::{brunn_minkowski_check, log_concavity_check, mixed_volume, volume_polynomial};
use crate::solver::{
    default_box_radius, solve_aubin_yau_with, solve_ma_with, uniform_bound_diagnostic, AubinYauOptions, DensitySpec,
    DiscreteMeasure, Method, SolveOptions,
};

const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(
    name = "toric-ma",
    version,
    about = "Monge-Ampère measures, solvers, envelopes, capacities and mixed volumes for convex functions with polytope asymptotics",
    after_help = "Inputs are file paths or inline JSON.\n\
                  Parameter precedence: command-line flags > --config file > defaults.\n\
                  Exit status: 0 success, 1 invalid input, 2 non-convergence.\n\
                  TORIC_MA_THREADS caps the parallelism of `batch`."
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Solver / stabilization tolerance [default: 1e-8]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Half-width of the node box
    #[arg(long, global = true)]
    pub box_radius: Option<f64>,
    /// Nodes per axis, e.g. 9x9
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Exponent λ of the Aubin–Yau equation [default: 1]
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Reference simplex scale r
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    pub out: Option<OutFormat>,
    /// Seed for randomized scenarios [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with default parameters
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add the wall time to the result document
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeKind {
    /// Largest convex minorant of min(u, v)
    Rooftop,
    /// Limit of rooftop(u + C, v) as C grows
    Singularity,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Newton,
    Lowering,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monge-Ampère masses of a function, or the mass identity on random polygons
    Mass {
        #[arg(long, required_unless_present = "random")]
        function: Option<String>,
        /// Check the mass identity of h_P on this many random polygons
        #[arg(long)]
        random: Option<usize>,
    },
    /// Solve MA(h) = μ
    Solve {
        #[arg(long)]
        body: String,
        #[arg(long)]
        measure: String,
        #[arg(long, value_enum, default_value = "newton")]
        method: MethodArg,
    },
    /// Solve MA(h) = e^{λh}μ
    AubinYau {
        #[arg(long)]
        body: String,
        #[arg(long)]
        measure: String,
    },
    /// Mixed volume and volume polynomial of n bodies
    MixedVolume {
        #[arg(long, num_args = 1.., required = true)]
        bodies: Vec<String>,
    },
    /// Brunn–Minkowski inequality MV ≥ Π Vol^{1/n}
    BmCheck {
        #[arg(long, num_args = 1.., required_unless_present = "random")]
        bodies: Vec<String>,
        /// Check this many random polygon pairs instead
        #[arg(long)]
        random: Option<usize>,
    },
    /// Brunn–Minkowski along a segment of bodies and log-concavity of the volume
    LogConcavity {
        #[arg(long, required_unless_present = "random")]
        p0: Option<String>,
        #[arg(long, required_unless_present = "random")]
        p1: Option<String>,
        /// Sample points in [0, 1] [default: 0.1,0.2,…,0.9]
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// Check this many random polygon pairs instead
        #[arg(long)]
        random: Option<usize>,
    },
    /// Relative extremal function and capacity of a union of boxes
    Capacity {
        #[arg(long)]
        body: String,
        #[arg(long)]
        region: String,
    },
    /// Rooftop or singularity envelope of two functions on a shared grid
    Envelope {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, value_enum, default_value = "rooftop")]
        kind: EnvelopeKind,
    },
    /// Recover the body from the subgradients of a function
    RecoverBody {
        #[arg(long)]
        function: String,
    },
    /// Whether a function has model type singularity
    IsModel {
        #[arg(long)]
        function: String,
    },
    /// Deviation sup(h_P − h) of solutions for refined discretizations of a density
    UniformBound {
        #[arg(long)]
        body: String,
        #[arg(long)]
        density: String,
        /// Refinement levels, 2^k atoms per axis
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        levels: Vec<u32>,
    },
    /// Run a JSON array of argument vectors, in parallel
    Batch {
        #[arg(long)]
        file: String,
    },
}

/// Parameters after merging flags, config file and defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub tol: Option<f64>,
    pub box_radius: Option<f64>,
    pub grid: Option<String>,
    pub lambda: Option<f64>,
    pub r: Option<f64>,
    pub out: Option<OutFormat>,
    pub seed: Option<u64>,
}

impl Params {
    fn resolve(common: &Common) -> Result<Self, Failure> {
        let file = match &common.config {
            None => Params::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| Failure::input(format!("bad config {}: {e}", path.display())))?
            }
        };
        let p = Params {
            tol: common.tol.or(file.tol).or(Some(DEFAULT_TOL)),
            box_radius: common.box_radius.or(file.box_radius),
            grid: common.grid.clone().or(file.grid),
            lambda: common.lambda.or(file.lambda).or(Some(1.0)),
            r: common.r.or(file.r),
            out: common.out.or(file.out).or(Some(OutFormat::Json)),
            seed: common.seed.or(file.seed).or(Some(DEFAULT_SEED)),
        };
        if !p.tol.is_some_and(|t| t > 0.0 && t.is_finite()) {
            return Err(Failure::input("--tol must be positive".into()));
        }
        Ok(p)
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn grid_counts(&self, dim: usize) -> Result<Option<Vec<usize>>, Failure> {
        let Some(g) = &self.grid else { return Ok(None) };
        let counts = g
            .split(['x', 'X'])
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Failure::input(format!("bad --grid {g:?}, expected e.g. 9x9")))?;
        match counts.len() {
            1 => Ok(Some(vec![counts[0]; dim])),
            l if l == dim => Ok(Some(counts)),
            l => Err(Failure::from(Error::DimensionMismatch { expected: dim, found: l })),
        }
    }
}

/// A failed scenario: exit status plus a machine-readable error.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    fn input(message: String) -> Self {
        Failure {
            code: 1,
            kind: "invalid-input".into(),
            message,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind, "message": self.message, "exit_code": self.code}})
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NonConvergence { .. } => (2, "non-convergence"),
            Error::NoStabilization { .. } => (2, "no-stabilization"),
            Error::FitResidual { .. } => (2, "fit-residual"),
            Error::MassMismatch { .. } => (1, "mass-mismatch"),
            Error::NonConvex { .. } => (1, "non-convex"),
            Error::DimensionMismatch { .. } => (1, "dimension-mismatch"),
            Error::GridDoesNotCover => (1, "grid-does-not-cover"),
            _ => (1, "invalid-input"),
        };
        Failure {
            code,
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

/// Exit status and the text for standard output and standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One long-form CSV row.
struct Row {
    series: &'static str,
    index: usize,
    coords: Vec<f64>,
    value: f64,
}

struct Output {
    result: Value,
    rows: Vec<Row>,
}

fn read_input<T: serde::de::DeserializeOwned>(what: &str, arg: &str) -> Result<T, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::input(format!("cannot read {what} {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| {
        // validation errors from the domain types surface through serde
        Failure::input(format!("bad {what}: {e}"))
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn function_rows(rows: &mut Vec<Row>, series: &'static str, h: &PLConvexFunction) {
    for (i, (x, &v)) in h.nodes().zip(h.values()).enumerate() {
        rows.push(Row {
            series,
            index: i,
            coords: x.to_vec(),
            value: v,
        });
    }
}

fn scalar(rows: &mut Vec<Row>, series: &'static str, value: f64) {
    rows.push(Row {
        series,
        index: 0,
        coords: Vec::new(),
        value,
    });
}

/// Polygon with 3 to 10 random vertices in `[0, 10]²` and positive area.
pub fn random_polygon(rng: &mut impl Rng) -> ConvexBody {
    loop {
        let k = rng.gen_range(3..=10);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
        if let Ok(p) = ConvexBody::new(2, &pts) {
            if p.volume() > 1e-3 {
                return p;
            }
        }
    }
}

fn node_grid(params: &Params, dim: usize, radius: f64) -> Result<Vec<Vec<f64>>, Failure> {
    let counts = params
        .grid_counts(dim)?
        .unwrap_or_else(|| vec![2 * radius.ceil() as usize + 1; dim]);
    let lo = vec![-radius; dim];
    let hi = vec![radius; dim];
    Ok(convexfun::grid(&lo, &hi, &counts)?)
}

fn default_samples() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

fn execute(cmd: &Command, params: &Params) -> Result<Output, Failure> {
    let mut rows = Vec::new();
    let tol = params.tol();
    let seed = params.seed.unwrap_or(DEFAULT_SEED);
    let result = match cmd {
        Command::Mass { function, random } => match random {
            Some(trials) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let radius = params.box_radius.unwrap_or(2.0);
                let mut max_error = 0.0f64;
                for i in 0..*trials {
                    let p = random_polygon(&mut rng);
                    let nodes = node_grid(params, 2, radius)?;
                    let h = PLConvexFunction::support_function(p.clone(), &nodes)?;
                    let err = (ma(&h).total - full_mass(&p)).abs();
                    max_error = max_error.max(err);
                    rows.push(Row {
                        series: "mass-error",
                        index: i,
                        coords: Vec::new(),
                        value: err,
                    });
                }
                json!({"trials": trials, "max_error": max_error, "holds": max_error <= 1e-9})
            }
            None => {
                let h: PLConvexFunction = read_input("function", function.as_deref().unwrap_or_default())?;
                let r = ma(&h);
                for (i, (x, &m)) in h.nodes().zip(&r.masses).enumerate() {
                    rows.push(Row {
                        series: "mass",
                        index: i,
                        coords: x.to_vec(),
                        value: m,
                    });
                }
                scalar(&mut rows, "total", r.total);
                scalar(&mut rows, "boundary_remainder", r.boundary_remainder);
                to_value(&r)
            }
        },
        Command::Solve { body, measure, method } => {
            let body: ConvexBody = read_input("body", body)?;
            let mu: DiscreteMeasure = read_input("measure", measure)?;
            let opts = SolveOptions {
                box_radius: params.box_radius,
                tol,
                method: match method {
                    MethodArg::Newton => Method::Newton,
                    MethodArg::Lowering => Method::Lowering,
                },
                ..SolveOptions::default()
            };
            let report = solve_ma_with(&body, &mu, &opts)?;
            function_rows(&mut rows, "solution", &report.solution);
            scalar(&mut rows, "residual", report.residual);
            to_value(&report)
        }
        Command::AubinYau { body, measure } => {
            let body: ConvexBody = read_input("body", body)?;
            let mu: DiscreteMeasure = read_input("measure", measure)?;
            let opts = AubinYauOptions {
                solve: SolveOptions {
                    box_radius: params.box_radius,
                    tol,
                    ..SolveOptions::default()
                },
                ..AubinYauOptions::default()
            };
            let report = solve_aubin_yau_with(&body, &mu, params.lambda.unwrap_or(1.0), &opts)?;
            function_rows(&mut rows, "solution", &report.solution);
            scalar(&mut rows, "residual", report.residual);
            to_value(&report)
        }
        Command::MixedVolume { bodies } => {
            let bodies = bodies
                .iter()
                .map(|b| read_input::<ConvexBody>("body", b))
                .collect::<Result<Vec<_>, _>>()?;
            let poly = volume_polynomial(&bodies)?;
            let mv = mixed_volume(&bodies)?;
            for (i, (d, c)) in poly.terms().iter().enumerate() {
                rows.push(Row {
                    series: "coefficient",
                    index: i,
                    coords: d.iter().map(|&e| e as f64).collect(),
                    value: *c,
                });
            }
            scalar(&mut rows, "mv", mv);
            json!({"mv": mv, "polynomial": poly})
        }
        Command::BmCheck { bodies, random } => match random {
            Some(trials) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut failures = 0;
                for i in 0..*trials {
                    let pair = [random_polygon(&mut rng), random_polygon(&mut rng)];
                    let r = brunn_minkowski_check(&pair)?;
                    failures += usize::from(!r.holds);
                    rows.push(Row {
                        series: "margin",
                        index: i,
                        coords: Vec::new(),
                        value: r.lhs - r.rhs,
                    });
                }
                json!({"trials": trials, "failures": failures, "holds": failures == 0})
            }
            None => {
                let bodies = bodies
                    .iter()
                    .map(|b| read_input::<ConvexBody>("body", b))
                    .collect::<Result<Vec<_>, _>>()?;
                let r = brunn_minkowski_check(&bodies)?;
                scalar(&mut rows, "lhs", r.lhs);
                scalar(&mut rows, "rhs", r.rhs);
                to_value(&r)
            }
        },
        Command::LogConcavity { p0, p1, t, random } => {
            let ts = if t.is_empty() { default_samples() } else { t.clone() };
            match random {
                Some(trials) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut failures = 0;
                    for i in 0..*trials {
                        let (a, b) = (random_polygon(&mut rng), random_polygon(&mut rng));
                        let r = log_concavity_check(&a, &b, &ts)?;
                        failures += usize::from(!r.holds);
                        rows.push(Row {
                            series: "concavity_defect",
                            index: i,
                            coords: Vec::new(),
                            value: r.concavity_defect,
                        });
                    }
                    json!({"trials": trials, "failures": failures, "holds": failures == 0})
                }
                None => {
                    let a: ConvexBody = read_input("body", p0.as_deref().unwrap_or_default())?;
                    let b: ConvexBody = read_input("body", p1.as_deref().unwrap_or_default())?;
                    let r = log_concavity_check(&a, &b, &ts)?;
                    for (i, s) in r.samples.iter().enumerate() {
                        rows.push(Row {
                            series: "volume",
                            index: i,
                            coords: vec![s.t],
                            value: s.volume,
                        });
                    }
                    to_value(&r)
                }
            }
        }
        Command::Capacity { body, region } => {
            let body: ConvexBody = read_input("body", body)?;
            let k: CompactRegion = read_input("region", region)?;
            let extent = k
                .boxes
                .iter()
                .flat_map(|b| b.lo.iter().chain(&b.hi))
                .fold(0.0f64, |m, c| m.max(c.abs()));
            let radius = params.box_radius.unwrap_or_else(|| default_box_radius(extent + 1.0));
            let nodes = node_grid(params, body.dim(), radius)?;
            let r = capacity(&k, &body, &nodes)?;
            function_rows(&mut rows, "extremal", &r.extremal);
            scalar(&mut rows, "cap_mass", r.cap_mass);
            scalar(&mut rows, "cap_energy", r.cap_energy);
            to_value(&r)
        }
        Command::Envelope { u, v, kind } => {
            let h = match kind {
                EnvelopeKind::Rooftop => {
                    // rooftop accepts arbitrary node data: take envelopes first
                    let u: Obstacle = read_input("function", u)?;
                    let v: Obstacle = read_input("function", v)?;
                    rooftop(&u.envelope(), &v.envelope())?
                }
                EnvelopeKind::Singularity => {
                    let u: PLConvexFunction = read_input("function", u)?;
                    let v: PLConvexFunction = read_input("function", v)?;
                    singularity_envelope(&u, &v, tol)?
                }
            };
            function_rows(&mut rows, "envelope", &h);
            json!({"kind": kind, "envelope": h})
        }
        Command::RecoverBody { function } => {
            let h: PLConvexFunction = read_input("function", function)?;
            let radius = params.box_radius.unwrap_or(f64::INFINITY);
            let body = body_from_subgradients(&h, radius)?;
            for (i, v) in body.vertices().enumerate() {
                rows.push(Row {
                    series: "vertex",
                    index: i,
                    coords: v.to_vec(),
                    value: 0.0,
                });
            }
            json!({"body": body, "volume": body.volume()})
        }
        Command::IsModel { function } => {
            let h: PLConvexFunction = read_input("function", function)?;
            let r = match params.r {
                Some(r) => r,
                None => h.body().enclosing_simplex_radius()?.max(f64::MIN_POSITIVE),
            };
            let check = is_model(&h, r, &default_schedule(h.dim()))?;
            for (i, l) in check.levels.iter().enumerate() {
                rows.push(Row {
                    series: "oscillation",
                    index: i,
                    coords: vec![l.radius, l.mesh],
                    value: l.oscillation,
                });
            }
            json!({"r": r, "check": check})
        }
        Command::UniformBound { body, density, levels } => {
            let body: ConvexBody = read_input("body", body)?;
            let density: DensitySpec = read_input("density", density)?;
            let opts = SolveOptions {
                box_radius: params.box_radius,
                tol,
                ..SolveOptions::default()
            };
            let out = uniform_bound_diagnostic(&body, &density, levels, &opts)?;
            for l in &out {
                rows.push(Row {
                    series: "deviation",
                    index: l.level as usize,
                    coords: Vec::new(),
                    value: l.deviation,
                });
            }
            json!({"levels": out})
        }
        Command::Batch { file } => {
            let scenarios: Vec<Vec<String>> = read_input("batch", file)?;
            let threads = std::env::var("TORIC_MA_THREADS")
                .ok()
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .unwrap_or(0);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Failure::input(format!("thread pool: {e}")))?;
            let results: Vec<Value> = pool.install(|| {
                scenarios
                    .par_iter()
                    .map(|args| {
                        let argv = std::iter::once("toric-ma".to_string()).chain(args.iter().cloned());
                        match Cli::try_parse_from(argv) {
                            Err(e) => Failure::input(e.to_string()).to_json(),
                            Ok(Cli {
                                command: Command::Batch { .. },
                                ..
                            }) => Failure::input("nested batch".into()).to_json(),
                            Ok(cli) => match run_parsed(&cli) {
                                Ok((doc, ..)) => doc,
                                Err(f) => f.to_json(),
                            },
                        }
                    })
                    .collect()
            });
            json!({"results": results})
        }
    };
    Ok(Output { result, rows })
}

fn kind_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Mass { .. } => "mass",
        Command::Solve { .. } => "solve",
        Command::AubinYau { .. } => "aubin-yau",
        Command::MixedVolume { .. } => "mixed-volume",
        Command::BmCheck { .. } => "bm-check",
        Command::LogConcavity { .. } => "log-concavity",
        Command::Capacity { .. } => "capacity",
        Command::Envelope { .. } => "envelope",
        Command::RecoverBody { .. } => "recover-body",
        Command::IsModel { .. } => "is-model",
        Command::UniformBound { .. } => "uniform-bound",
        Command::Batch { .. } => "batch",
    }
}

fn inputs(cmd: &Command) -> Value {
    match cmd {
        Command::Mass { function, random } => json!({"function": function, "random": random}),
        Command::Solve { body, measure, method } => json!({"body": body, "measure": measure, "method": method}),
        Command::AubinYau { body, measure } => json!({"body": body, "measure": measure}),
        Command::MixedVolume { bodies } => json!({"bodies": bodies}),
        Command::BmCheck { bodies, random } => json!({"bodies": bodies, "random": random}),
        Command::LogConcavity { p0, p1, t, random } => json!({"p0": p0, "p1": p1, "t": t, "random": random}),
        Command::Capacity { body, region } => json!({"body": body, "region": region}),
        Command::Envelope { u, v, kind } => json!({"u": u, "v": v, "kind": kind}),
        Command::RecoverBody { function } => json!({"function": function}),
        Command::IsModel { function } => json!({"function": function}),
        Command::UniformBound { body, density, levels } => json!({"body": body, "density": density, "levels": levels}),
        Command::Batch { file } => json!({"file": file}),
    }
}

/// Runs a parsed command line; returns the result document, the CSV rows and
/// the requested format.
fn run_parsed(cli: &Cli) -> Result<(Value, String, OutFormat), Failure> {
    let params = Params::resolve(&cli.common)?;
    let start = Instant::now();
    let out = execute(&cli.command, &params)?;
    let mut doc = json!({
        "scenario": {"kind": kind_name(&cli.command), "inputs": inputs(&cli.command), "params": params},
        "result": out.result,
    });
    if cli.common.timing {
        doc["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    }
    Ok((doc, csv_text(&out.rows)?, params.out.unwrap_or(OutFormat::Json)))
}

fn csv_text(rows: &[Row]) -> Result<String, Failure> {
    let width = rows.iter().map(|r| r.coords.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::input(format!("csv: {e}"));
    let mut header = vec!["series".to_string(), "index".to_string()];
    header.extend((0..width).map(|d| format!("x{d}")));
    header.push("value".into());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![r.series.to_string(), r.index.to_string()];
        rec.extend((0..width).map(|d| r.coords.get(d).map_or(String::new(), |c| c.to_string())));
        rec.push(r.value.to_string());
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

/// Parses and runs a command line (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => failure(Failure {
                    code: 1,
                    kind: "usage".into(),
                    message: e.to_string().trim_end().to_string(),
                }),
            };
        }
    };
    match run_parsed(&cli) {
        Ok((doc, csv, format)) => {
            let stdout = match format {
                OutFormat::Json => serde_json::to_string_pretty(&doc).expect("json") + "\n",
                OutFormat::Csv => csv,
            };
            Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> Outcome {
    let mut stderr = serde_json::to_string(&f.to_json()).expect("json");
    stderr.push('\n');
    Outcome {
        code: f.code,
        stdout: String::new(),
        stderr,
    }
}
