//! Command-line front end: subcommands, `key=value` configuration files and
//! report output.
//!
//! Exit codes: 0 when every check passes, 1 when one fails, 2 on usage or
//! input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde_json::Value;

use crate::error::Error;
use crate::flats::{ConvexBody, Isometry, PointCloud};
use crate::flow::{integrate_with_policy, ChartPolicy, PhaseState, DEFAULT_STEP};
use crate::geometry::{ChartKind, MetricChart};
use crate::profiles::WarpingProfile;
use crate::report::{Check, VerificationReport};
use crate::suite::{self, Outcome};

pub const THREADS_ENV: &str = "FATFLAT_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "fatflat",
    version,
    about = "Verify warped metrics, twisted cylinders, finite-field holonomy and flat boxes"
)]
struct Cli {
    /// Flat `key=value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall-clock time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ProfileFlags {
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the seven profile inequalities on a radial grid.
    VerifyProfile {
        #[command(flatten)]
        profile: ProfileFlags,
        #[arg(long)]
        grid_max: Option<f64>,
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Random sectional-curvature scan plus closed-form and finite-difference cross-checks.
    VerifyCurvature {
        #[command(flatten)]
        profile: ProfileFlags,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        fd_points: Option<usize>,
    },
    /// Integrate one geodesic and write it as CSV.
    Geodesic {
        #[command(flatten)]
        profile: ProfileFlags,
        #[arg(long)]
        n: Option<usize>,
        /// polar, cartesian or four-d.
        #[arg(long)]
        chart: Option<String>,
        /// Start position, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Start velocity, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// fixed or switching.
        #[arg(long)]
        policy: Option<String>,
        /// Write every `stride`-th sample.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Holonomy of the core geodesic of a twisted cylinder.
    Holonomy {
        #[command(flatten)]
        profile: ProfileFlags,
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        #[arg(long)]
        length: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Distances from a start point to its deck translates.
    ClosingScan {
        #[command(flatten)]
        profile: ProfileFlags,
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        #[arg(long)]
        length: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        periods: Option<u64>,
        #[arg(long)]
        close_tol: Option<f64>,
    },
    /// Periods at which a twist power has eigenvalue one.
    EigenObstruction {
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        #[arg(long)]
        periods: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Orthogonal-group holonomy elements over prime fields.
    FfLemma {
        /// Comma-separated odd primes.
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        reduction_primes: Option<String>,
        #[arg(long)]
        reductions: Option<usize>,
    },
    /// Metric axioms of the Hausdorff distance, optionally the distance between two CSV clouds.
    FlatsHausdorff {
        #[arg(long)]
        triples: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
    },
    /// Volume of a convex body united with an isometric copy.
    FlatsTranslation {
        /// square or disk.
        #[arg(long)]
        body: Option<String>,
        /// CSV vertex list; overrides --body.
        #[arg(long)]
        polytope: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        /// Planar rotation angle about --center, applied before the shift.
        #[arg(long, allow_hyphen_values = true)]
        rotation: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Thicken two crossing strips into a wider box.
    FlatsThicken {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        thetas: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Every check with default parameters.
    ReportAll {
        #[arg(long)]
        orbits: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Input(e)
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Input(e) => write!(f, "{e}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Resolves each setting as flag, then config file, then default, and
/// records what was used.
struct Settings {
    config: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Settings {
    fn new(config: BTreeMap<String, String>) -> Self {
        Self {
            config,
            used: BTreeMap::new(),
        }
    }

    fn raw(&mut self, key: &str, flag: Option<String>, default: &str) -> String {
        let v = flag
            .or_else(|| self.config.get(key).cloned())
            .unwrap_or_else(|| default.to_string());
        self.used.insert(key.to_string(), v.clone());
        v
    }

    fn get<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> CliResult<T> {
        let value = match flag {
            Some(v) => v,
            None => match self.config.get(key) {
                Some(text) => text.parse().map_err(|_| {
                    CliError::Usage(format!("config value for {key} is not valid: {text}"))
                })?,
                None => default,
            },
        };
        self.used.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    fn list<T: FromStr>(
        &mut self,
        key: &str,
        flag: Option<String>,
        default: &str,
    ) -> CliResult<Vec<T>> {
        parse_list(&self.raw(key, flag, default), key)
    }

    fn optional_path(&mut self, key: &str, flag: Option<PathBuf>) -> Option<PathBuf> {
        let p = flag.or_else(|| self.config.get(key).map(PathBuf::from))?;
        self.used.insert(key.to_string(), p.display().to_string());
        Some(p)
    }
}

fn parse_list<T: FromStr>(text: &str, key: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad entry {s:?} in --{key}")))
        })
        .collect()
}

/// Parses a flat `key=value` file; `#` starts a comment line.
pub fn parse_config(text: &str) -> crate::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: missing '='", n + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    let body = ConvexBody::from_csv(&read(path)?);
    match body {
        Ok(b) => Ok(PointCloud::new(b.vertices)?),
        // clouds need not span their ambient space
        Err(Error::DegenerateBody(_)) | Err(Error::InvalidParameter(_)) => {
            let mut points = vec![];
            for line in read(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
            {
                points.push(parse_list::<f64>(line, "points")?);
            }
            Ok(PointCloud::new(points)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool built earlier in this process stays in place
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fatflat: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("run `fatflat help` for the subcommand grammar");
            }
            2
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    let config = match &cli.config {
        Some(p) => parse_config(&read(p)?)?,
        None => BTreeMap::new(),
    };
    let mut s = Settings::new(config);
    let out = cli
        .out
        .clone()
        .or_else(|| s.config.get("out").map(PathBuf::from));
    let start = Instant::now();
    let (name, seed, outcome) = match cli.command {
        Command::Geodesic {
            profile,
            n,
            chart,
            x,
            v,
            t_end,
            step,
            policy,
            stride,
        } => {
            let csv = geodesic_csv(&mut s, profile, n, chart, x, v, t_end, step, policy, stride)?;
            write_output(out.as_deref(), &csv)?;
            return Ok(0);
        }
        other => dispatch(&mut s, cli.seed, other)?,
    };
    let mut report = VerificationReport::new(name, s.used, seed, outcome.checks, outcome.data);
    if cli.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    write_output(out.as_deref(), &report.to_json())?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn k_of(s: &mut Settings, p: ProfileFlags) -> CliResult<f64> {
    s.get("k", p.k, 19.0)
}

fn dispatch(
    s: &mut Settings,
    seed_flag: Option<u64>,
    command: Command,
) -> CliResult<(&'static str, u64, Outcome)> {
    let seed = |s: &mut Settings| s.get("seed", seed_flag, 42u64);
    Ok(match command {
        Command::VerifyProfile {
            profile,
            grid_max,
            grid_step,
        } => {
            let d = suite::ProfileParams::default();
            let p = suite::ProfileParams {
                k: k_of(s, profile)?,
                grid_max: s.get("grid-max", grid_max, d.grid_max)?,
                grid_step: s.get("grid-step", grid_step, d.grid_step)?,
            };
            ("verify-profile", 0, suite::profile_checks(&p)?)
        }
        Command::VerifyCurvature {
            profile,
            samples,
            r_min,
            r_max,
            grid_points,
            fd_points,
        } => {
            let d = suite::CurvatureParams::default();
            let p = suite::CurvatureParams {
                k: k_of(s, profile)?,
                samples: s.get("samples", samples, d.samples)?,
                seed: seed(s)?,
                r_min: s.get("r-min", r_min, d.r_min)?,
                r_max: s.get("r-max", r_max, d.r_max)?,
                grid_points: s.get("grid-points", grid_points, d.grid_points)?,
                fd_points: s.get("fd-points", fd_points, d.fd_points)?,
            };
            ("verify-curvature", p.seed, suite::curvature_checks(&p)?)
        }
        Command::Holonomy {
            profile,
            angles,
            length,
            step,
        } => {
            let p = suite::HolonomyParams {
                k: k_of(s, profile)?,
                angles: s.list("angles", angles, "1.0")?,
                length: s.get("length", length, 1.0)?,
                step: s.get("step", step, DEFAULT_STEP)?,
            };
            ("holonomy", 0, suite::holonomy_checks(&p)?)
        }
        Command::ClosingScan {
            profile,
            angles,
            length,
            radius,
            periods,
            close_tol,
        } => {
            let d = suite::ClosingParams::default();
            let p = suite::ClosingParams {
                k: k_of(s, profile)?,
                angles: s.list("angles", angles, "1.0")?,
                length: s.get("length", length, d.length)?,
                radius: s.get("radius", radius, d.radius)?,
                periods: s.get("periods", periods, d.periods)?,
                close_tol: s.get("close-tol", close_tol, d.close_tol)?,
            };
            ("closing-scan", 0, suite::closing_checks(&p)?)
        }
        Command::EigenObstruction {
            angles,
            periods,
            tol,
        } => {
            let d = suite::EigenParams::default();
            let p = suite::EigenParams {
                angles: s.list("angles", angles, "1.0")?,
                periods: s.get("periods", periods, d.periods)?,
                tol: s.get("tol", tol, d.tol)?,
            };
            ("eigen-obstruction", 0, suite::eigen_checks(&p)?)
        }
        Command::FfLemma {
            q,
            n,
            reduction_primes,
            reductions,
        } => {
            let d = suite::FieldParams::default();
            let p = suite::FieldParams {
                primes: s.list("q", q, "3,5,7,11,13,17,19,23")?,
                n: s.get("n", n, d.n)?,
                reduction_primes: s.list("reduction-primes", reduction_primes, "5,7,11,13")?,
                reductions: s.get("reductions", reductions, d.reductions)?,
                seed: seed(s)?,
            };
            ("ff-lemma", p.seed, suite::field_checks(&p)?)
        }
        Command::FlatsHausdorff {
            triples,
            points,
            a,
            b,
        } => {
            let d = suite::HausdorffParams::default();
            let pair = match (s.optional_path("a", a), s.optional_path("b", b)) {
                (Some(a), Some(b)) => Some((read_cloud(&a)?, read_cloud(&b)?)),
                (None, None) => None,
                _ => return Err(CliError::Usage("--a and --b must be given together".into())),
            };
            let p = suite::HausdorffParams {
                triples: s.get("triples", triples, d.triples)?,
                points: s.get("points", points, d.points)?,
                seed: seed(s)?,
                pair,
            };
            ("flats-hausdorff", p.seed, suite::hausdorff_checks(&p)?)
        }
        Command::FlatsTranslation {
            body,
            polytope,
            shift,
            rotation,
            center,
            samples,
        } => {
            let (label, body) = match s.optional_path("polytope", polytope) {
                Some(path) => (
                    path.display().to_string(),
                    ConvexBody::from_csv(&read(&path)?)?,
                ),
                None => match s.raw("body", body, "square").as_str() {
                    "square" => ("square".to_string(), ConvexBody::square(1.0)?),
                    "disk" => ("disk".to_string(), ConvexBody::polygonized_disk(1.0, 256)?),
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown body {other:?}; use square, disk or --polytope"
                        )))
                    }
                },
            };
            let angle = s.get("rotation", rotation, 0.0)?;
            let default_shift = match (label.as_str(), body.dim) {
                _ if angle != 0.0 => vec!["0"; body.dim].join(","),
                ("disk", _) => "0,0.01".to_string(),
                (_, d) => std::iter::once("0.5")
                    .chain(std::iter::repeat_n("0", d - 1))
                    .collect::<Vec<_>>()
                    .join(","),
            };
            let shift: Vec<f64> = s.list("shift", shift, &default_shift)?;
            if shift.len() != body.dim {
                return Err(Error::DimensionMismatch(shift.len(), body.dim).into());
            }
            let isometry = if angle == 0.0 {
                Isometry::translation(&shift)
            } else {
                if body.dim != 2 {
                    return Err(CliError::Usage("--rotation needs a planar body".into()));
                }
                let bbox = body.bounding_box();
                let mid = format!(
                    "{},{}",
                    0.5 * (bbox[0].0 + bbox[0].1),
                    0.5 * (bbox[1].0 + bbox[1].1)
                );
                let c: Vec<f64> = s.list("center", center, &mid)?;
                let r = Isometry::rotation_about(angle, [c[0], c[1]]);
                Isometry::new(r.linear, r.translation + DVector::from_column_slice(&shift))?
            };
            let p = suite::TranslationParams {
                cases: vec![suite::TranslationCase {
                    label,
                    body,
                    isometry,
                }],
                samples: s.get("samples", samples, crate::flats::DEFAULT_MC_SAMPLES)?,
                seed: seed(s)?,
            };
            ("flats-translation", p.seed, suite::translation_checks(&p)?)
        }
        Command::FlatsThicken {
            delta,
            thetas,
            grid,
        } => {
            let d = suite::ThickenParams::default();
            let p = suite::ThickenParams {
                delta: s.get("delta", delta, d.delta)?,
                thetas: s.list("thetas", thetas, "0.1,0.05,0.02,0.01,0.005")?,
                grid: s.get("grid", grid, d.grid)?,
            };
            ("flats-thicken", 0, suite::thicken_checks(&p)?)
        }
        Command::ReportAll { orbits, samples } => {
            let seed = seed(s)?;
            let orbits = s.get("orbits", orbits, suite::FlowParams::default().orbits)?;
            let samples = s.get("samples", samples, crate::flats::DEFAULT_MC_SAMPLES)?;
            ("report-all", seed, report_all(seed, orbits, samples)?)
        }
        Command::Geodesic { .. } => unreachable!("handled before dispatch"),
    })
}

/// Every capability's checks under one report, prefixed by section.
fn report_all(seed: u64, orbits: usize, samples: usize) -> crate::Result<Outcome> {
    let mut checks: Vec<Check> = vec![];
    let mut data = serde_json::Map::new();
    let mut add = |label: &str, o: Outcome| {
        checks.extend(o.checks.into_iter().map(|c| c.prefixed(label)));
        data.insert(label.to_string(), o.data);
    };
    add(
        "verify-profile",
        suite::profile_checks(&Default::default())?,
    );
    add(
        "verify-curvature",
        suite::curvature_checks(&suite::CurvatureParams {
            seed,
            ..Default::default()
        })?,
    );
    add(
        "geodesic",
        suite::flow_checks(&suite::FlowParams {
            seed,
            orbits,
            ..Default::default()
        })?,
    );
    add("holonomy", suite::holonomy_checks(&Default::default())?);
    add("singular-set", suite::singular_checks(&Default::default())?);
    add(
        "closing-scan/quarter-turn",
        suite::closing_checks(&suite::ClosingParams {
            angles: vec![std::f64::consts::FRAC_PI_2],
            periods: 10,
            ..Default::default()
        })?,
    );
    add(
        "closing-scan/one-radian",
        suite::closing_checks(&suite::ClosingParams {
            close_tol: 1e-9,
            ..Default::default()
        })?,
    );
    add(
        "eigen-obstruction",
        suite::eigen_checks(&Default::default())?,
    );
    add(
        "ff-lemma",
        suite::field_checks(&suite::FieldParams {
            seed,
            ..Default::default()
        })?,
    );
    add(
        "flats-hausdorff",
        suite::hausdorff_checks(&suite::HausdorffParams {
            seed,
            ..Default::default()
        })?,
    );
    add(
        "flats-translation",
        suite::translation_checks(&suite::TranslationParams::standard(samples, seed)?)?,
    );
    add("flats-thicken", suite::thicken_checks(&Default::default())?);
    Ok(Outcome {
        checks,
        data: Value::Object(data),
    })
}

#[allow(clippy::too_many_arguments)]
fn geodesic_csv(
    s: &mut Settings,
    profile: ProfileFlags,
    n: Option<usize>,
    chart: Option<String>,
    x: Option<String>,
    v: Option<String>,
    t_end: Option<f64>,
    step: Option<f64>,
    policy: Option<String>,
    stride: Option<usize>,
) -> CliResult<String> {
    let k = k_of(s, profile)?;
    let n = s.get("n", n, 1)?;
    let kind = match s.raw("chart", chart, "polar").as_str() {
        "polar" => ChartKind::Polar,
        "cartesian" => ChartKind::Cartesian,
        "four-d" => ChartKind::FourDModel,
        other => return Err(CliError::Usage(format!("unknown chart {other:?}"))),
    };
    let chart = MetricChart::new(kind, n, WarpingProfile::interpolated(k)?)?;
    let d = chart.dim();
    let default_x = match kind {
        ChartKind::FourDModel => "2,1,0,0".to_string(),
        _ => std::iter::once("2")
            .chain(std::iter::repeat_n("0.5", d - 2))
            .chain(["0"])
            .collect::<Vec<_>>()
            .join(","),
    };
    let default_v = std::iter::once("0.3")
        .chain(std::iter::repeat_n("0.1", d - 2))
        .chain(["0.5"])
        .collect::<Vec<_>>()
        .join(",");
    let x: Vec<f64> = s.list("x", x, &default_x)?;
    let v: Vec<f64> = s.list("v", v, &default_v)?;
    let t_end = s.get("t-end", t_end, 10.0)?;
    let step = s.get("step", step, DEFAULT_STEP)?;
    let policy = match s.raw("policy", policy, "switching").as_str() {
        "fixed" => ChartPolicy::Fixed,
        "switching" => ChartPolicy::Switching,
        other => return Err(CliError::Usage(format!("unknown policy {other:?}"))),
    };
    let stride = s.get("stride", stride, 1usize)?.max(1);
    let mut path = integrate_with_policy(&chart, &PhaseState::new(x, v), t_end, step, policy)?;
    let last = path.samples.len() - 1;
    path.samples = path
        .samples
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, p)| p)
        .collect();
    Ok(path.to_csv()?)
}
