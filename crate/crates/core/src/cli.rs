//! Batch command-line front end.
//!
//! Every computing subcommand writes one CSV and a JSON sidecar (`<out>.json`)
//! holding the resolved configuration and library version. `replay` reruns a
//! sidecar and reproduces the CSV byte for byte.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::experiments::{
    default_window, fidelity_curve, peak_scaling, resource_counts, FidelityCurve, ModelFamily,
    NumericConfig, PeakRecord, Scenario, TimeGrid,
};
use crate::noise::{NoiseSpec, DEFAULT_HERMITE_NODES, DEFAULT_PHASE_GRID, DEFAULT_REALIZATIONS};

pub const CURVE_HEADER: &str = "t,mean_fidelity,stderr,n,model,sigma_eff,seed";
pub const SCALING_HEADER: &str = "sigma_eff,n,t_peak,f_peak,model,seed";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Parser)]
#[command(
    name = "lily-router",
    version,
    about = "Noise studies of the Lily-graph quantum router"
)]
struct Cli {
    /// Worker threads for the parallel sections (default: all cores).
    #[arg(long, global = true, env = "LILY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Number of outputs.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = FOUR_PI)]
    t_max: f64,
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// CSV destination; the sidecar goes to `<out>.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OuArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    theta: f64,
    /// OU volatility.
    #[arg(long, allow_negative_numbers = true)]
    sigma_vol: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = crate::dynamics::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    StaticPhase,
    StaticWeight,
    OuPhase,
    OuWeight,
}

impl From<FamilyArg> for ModelFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::StaticPhase => ModelFamily::StaticPhase,
            FamilyArg::StaticWeight => ModelFamily::StaticWeight,
            FamilyArg::OuPhase => ModelFamily::OuPhase,
            FamilyArg::OuWeight => ModelFamily::OuWeight,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Noiseless fidelity curve at the optimal parameters.
    Noiseless(CurveArgs),
    /// Static von Mises noise on both effective phases.
    StaticPhase {
        #[command(flatten)]
        curve: CurveArgs,
        /// Von Mises concentration.
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        /// Trapezoid points per phase axis (odd).
        #[arg(long, default_value_t = DEFAULT_PHASE_GRID)]
        grid: usize,
    },
    /// Static Gaussian noise on the coupling weight.
    StaticWeight {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_HERMITE_NODES)]
        hermite_nodes: usize,
    },
    /// Ornstein-Uhlenbeck noise on both effective phases.
    OuPhase {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        ou: OuArgs,
    },
    /// Ornstein-Uhlenbeck noise on the coupling weight.
    OuWeight {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        ou: OuArgs,
    },
    /// Peak fidelity and time over a grid of noise strengths and output counts.
    PeakScaling {
        #[arg(long, value_enum)]
        model: FamilyArg,
        /// Comma-separated effective standard deviations.
        #[arg(
            long,
            allow_negative_numbers = true,
            value_delimiter = ',',
            required = true
        )]
        sigmas: Vec<f64>,
        /// Comma-separated output counts.
        #[arg(long = "ns", value_delimiter = ',', default_value = "2,10,30")]
        n_list: Vec<usize>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = FOUR_PI)]
        t_max: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long, allow_negative_numbers = true)]
        window_lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        window_hi: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_PHASE_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_HERMITE_NODES)]
        hermite_nodes: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = crate::dynamics::DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
        realizations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Resource counts for multiple state transfer versus routing.
    Resources {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
    },
    /// Rerun a JSON sidecar.
    Replay {
        /// Sidecar written by a previous run.
        #[arg(long)]
        config: PathBuf,
        /// Override the recorded CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Resolved, validated run description; this is what the sidecar stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    Curve {
        scenario: Scenario,
    },
    PeakScaling {
        family: ModelFamily,
        sigma_grid: Vec<f64>,
        n_list: Vec<usize>,
        time_grid: TimeGrid,
        numerics: NumericConfig,
        window: (f64, f64),
    },
}

/// JSON sidecar contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub version: String,
    pub output: PathBuf,
    pub config: RunConfig,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl RunConfig {
    pub fn validate(&self) -> crate::Result<()> {
        match self {
            RunConfig::Curve { scenario } => scenario.validate(),
            RunConfig::PeakScaling {
                family,
                sigma_grid,
                n_list,
                time_grid,
                numerics,
                window,
            } => {
                if sigma_grid.is_empty() || n_list.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "grid",
                        reason: "sigma and n lists must be non-empty".into(),
                    });
                }
                if !(window.0.is_finite() && window.1.is_finite() && window.0 <= window.1) {
                    return Err(Error::InvalidParameter {
                        name: "window",
                        reason: "needs finite bounds with lo <= hi".into(),
                    });
                }
                for &s in sigma_grid {
                    for &n in n_list {
                        let spec = family.spec(s)?;
                        Scenario {
                            noise: Some(spec),
                            n,
                            time_grid: *time_grid,
                            numerics: *numerics,
                        }
                        .validate()?;
                    }
                }
                Ok(())
            }
        }
    }

    /// Runs the configuration and renders the CSV text.
    pub fn execute(&self) -> crate::Result<String> {
        match self {
            RunConfig::Curve { scenario } => Ok(curve_csv(&fidelity_curve(scenario)?)),
            RunConfig::PeakScaling {
                family,
                sigma_grid,
                n_list,
                time_grid,
                numerics,
                window,
            } => {
                let base = Scenario {
                    noise: None,
                    n: 2,
                    time_grid: *time_grid,
                    numerics: *numerics,
                };
                let table = peak_scaling(*family, sigma_grid, n_list, &base, *window)?;
                let seed = matches!(family, ModelFamily::OuPhase | ModelFamily::OuWeight)
                    .then_some(numerics.master_seed);
                Ok(scaling_csv(&table, family.name(), seed))
            }
        }
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Curve CSV; `stderr` and `seed` are empty for deterministic models.
pub fn curve_csv(curve: &FidelityCurve) -> String {
    let s = &curve.scenario;
    let seed = if s.is_stochastic() {
        s.numerics.master_seed.to_string()
    } else {
        String::new()
    };
    let mut out = String::with_capacity(curve.len() * 96);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for i in 0..curve.len() {
        let stderr = curve
            .stderr
            .as_ref()
            .map(|e| float(e[i]))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            float(curve.times[i]),
            float(curve.mean_fidelity[i]),
            stderr,
            s.n,
            s.model_name(),
            float(s.sigma_eff()),
            seed
        );
    }
    out
}

pub fn scaling_csv(table: &[PeakRecord], model: &str, seed: Option<u64>) -> String {
    let seed = seed.map(|s| s.to_string()).unwrap_or_default();
    let mut out = String::from(SCALING_HEADER);
    out.push('\n');
    for r in table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            float(r.sigma_eff),
            r.n,
            float(r.t_peak),
            float(r.f_peak),
            model,
            seed
        );
    }
    out
}

/// Sidecar location for a CSV path: the same path with `.json` appended.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes via a temporary file in the destination directory and renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> crate::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn curve_config(
    curve: &CurveArgs,
    noise: Option<NoiseSpec>,
    numerics: NumericConfig,
) -> (RunConfig, PathBuf) {
    let scenario = Scenario {
        noise,
        n: curve.n,
        time_grid: TimeGrid {
            t_min: curve.t_min,
            t_max: curve.t_max,
            points: curve.points,
        },
        numerics,
    };
    (RunConfig::Curve { scenario }, curve.out.clone())
}

fn ou_numerics(ou: &OuArgs) -> NumericConfig {
    NumericConfig {
        dt: ou.dt,
        realizations: ou.realizations,
        master_seed: ou.seed,
        ..NumericConfig::default()
    }
}

fn resolve(
    command: Command,
    stdout: &mut dyn Write,
) -> Result<Option<(RunConfig, PathBuf)>, Failure> {
    let resolved = match command {
        Command::Noiseless(curve) => curve_config(&curve, None, NumericConfig::default()),
        Command::StaticPhase { curve, k, grid } => curve_config(
            &curve,
            Some(NoiseSpec::StaticPhase { k }),
            NumericConfig {
                phase_grid: grid,
                ..NumericConfig::default()
            },
        ),
        Command::StaticWeight {
            curve,
            sigma,
            hermite_nodes,
        } => curve_config(
            &curve,
            Some(NoiseSpec::StaticWeight { sigma }),
            NumericConfig {
                hermite_nodes,
                ..NumericConfig::default()
            },
        ),
        Command::OuPhase { curve, ou } => curve_config(
            &curve,
            Some(NoiseSpec::OuPhase {
                theta: ou.theta,
                volatility: ou.sigma_vol,
            }),
            ou_numerics(&ou),
        ),
        Command::OuWeight { curve, ou } => curve_config(
            &curve,
            Some(NoiseSpec::OuWeight {
                theta: ou.theta,
                volatility: ou.sigma_vol,
            }),
            ou_numerics(&ou),
        ),
        Command::PeakScaling {
            model,
            sigmas,
            n_list,
            t_min,
            t_max,
            points,
            window_lo,
            window_hi,
            grid,
            hermite_nodes,
            dt,
            realizations,
            seed,
            out,
        } => {
            let (lo, hi) = default_window();
            let config = RunConfig::PeakScaling {
                family: model.into(),
                sigma_grid: sigmas,
                n_list,
                time_grid: TimeGrid {
                    t_min,
                    t_max,
                    points,
                },
                numerics: NumericConfig {
                    phase_grid: grid,
                    hermite_nodes,
                    dt,
                    realizations,
                    master_seed: seed,
                },
                window: (window_lo.unwrap_or(lo), window_hi.unwrap_or(hi)),
            };
            (config, out)
        }
        Command::Resources { n, d } => {
            let (qst, qr) = resource_counts(n, d).map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(stdout, "R_QST={qst} R_QR={qr}").map_err(|e| Failure::Numeric(e.into()))?;
            return Ok(None);
        }
        Command::Replay { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", config.display())))?;
            let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| {
                Failure::Usage(format!("invalid sidecar {}: {e}", config.display()))
            })?;
            (sidecar.config, out.unwrap_or(sidecar.output))
        }
    };
    Ok(Some(resolved))
}

fn execute(
    command: Command,
    pool: Option<&rayon::ThreadPool>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let Some((config, out)) = resolve(command, stdout)? else {
        return Ok(());
    };
    config
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let csv = match pool {
        Some(pool) => pool.install(|| config.execute())?,
        None => config.execute()?,
    };
    let sidecar = Sidecar {
        version: VERSION.to_string(),
        output: out.clone(),
        config,
    };
    let mut json = serde_json::to_string_pretty(&sidecar).map_err(Error::from)?;
    json.push('\n');
    write_atomic(&out, csv.as_bytes())?;
    write_atomic(&sidecar_path(&out), json.as_bytes())?;
    Ok(())
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => execute(cli.command, Some(&pool), stdout),
            Err(e) => Err(Failure::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => execute(cli.command, None, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_NUMERIC
        }
    }
}

/// Entry point used by the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
