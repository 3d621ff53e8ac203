//! Command-line front end.
//!
//! Every setting can come from a flag, from a `key = value` config file given
//! with `--config`, or from a built-in default, in that order of precedence.
//! Outputs start with `#` lines echoing the resolved settings.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::coloring::{coverage_of, rasterize, write_matrix, write_ppm, write_svg};
use crate::diagnostics::{bad_components, boundary_visible_tail, pair_count_stats, PairCountStats, TailReport};
use crate::error::Error;
use crate::experiments::{
    critical_scan, estimate_crossing, estimate_theta_proxy, fkg_check, fkg_independent, rsw_check, rsw_nested,
    theta_profile, CrossingParams, DominationSetup, Estimate, SWEEP_CSV_HEADER,
};
use crate::geometry::{Rect, WindowSpec};
use crate::process::{
    economical_horizon, mesh_params, read_binary, read_text, write_binary, write_text, EconomicalVariant, Horizon,
    LeafProcess, SampleStatus, Sampler,
};
use crate::rng::TrialKey;

/// Environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "CONFETTI_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "confetti", version, about = "Confetti percolation simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to $CONFETTI_WORKERS, then all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json for tabular outputs.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug, Default)]
struct Field {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Pixel size.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a leaf process and write it as a leaf file.
    Sample {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        /// rect or torus.
        #[arg(long)]
        window: Option<String>,
        /// Torus period (defaults to s).
        #[arg(long)]
        period: Option<f64>,
        /// adaptive or fixed.
        #[arg(long)]
        horizon: Option<String>,
        /// Time horizon for fixed sampling, cap for adaptive sampling.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Rasterize a sampled or loaded process to ppm, svg or a text matrix.
    Render {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        /// Leaf file (text or binary) to render instead of sampling.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Estimate one crossing probability of [0, rho s] x [0, s].
    Cross {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
    },
    /// Square crossing probabilities over a grid of p and s.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        s_list: Option<Vec<f64>>,
        /// Also write two-column plot data here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Probability that the origin's black cluster reaches the boundary of Q_m.
    Theta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        #[arg(long, value_delimiter = ',')]
        m_list: Option<Vec<f64>>,
    },
    /// Crossings of long rectangles at p = 1/2.
    Rsw {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        #[arg(long, value_delimiter = ',')]
        s_list: Option<Vec<f64>>,
    },
    /// Correlation of two increasing crossing events.
    Fkg {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        /// overlap or independent.
        #[arg(long)]
        variant: Option<String>,
    },
    /// Instability diagnostics: pairs, tail, bad or domination.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        side: Option<f64>,
        /// Time horizon.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        delta0: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        configs: Option<u64>,
        #[arg(long)]
        points: Option<u64>,
        #[arg(long)]
        period: Option<f64>,
    },
    /// Coverage of the torus of period 10 s by unit leaves before lambda.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: Field,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run the built-in table of quick checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(Error::InvalidParameter(_) | Error::GridMismatch(_) | Error::Parse { .. }) => 2,
            CliError::Lib(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Values that can be read from a config file and echoed back.
trait Setting: Sized {
    fn parse(s: &str) -> Option<Self>;
    fn show(&self) -> String;
}

macro_rules! scalar_setting {
    ($($t:ty),*) => {$(
        impl Setting for $t {
            fn parse(s: &str) -> Option<Self> {
                s.parse().ok()
            }
            fn show(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
scalar_setting!(f64, u64, usize, String);

impl Setting for Vec<f64> {
    fn parse(s: &str) -> Option<Self> {
        s.split(',').map(|x| x.trim().parse().ok()).collect()
    }
    fn show(&self) -> String {
        self.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Resolves settings and records them for the output header.
struct Resolver {
    file: BTreeMap<String, String>,
    echo: Vec<(String, String)>,
}

impl Resolver {
    fn new(command: &str, config: Option<&Path>) -> CliResult<Self> {
        let file = match config {
            Some(path) => parse_config(
                &std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?,
            )?,
            None => BTreeMap::new(),
        };
        Ok(Resolver { file, echo: vec![("command".into(), command.into())] })
    }

    fn get<T: Setting>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        let value = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(raw) => T::parse(raw)
                    .ok_or_else(|| CliError::Usage(format!("config key {key}: cannot parse {raw:?}")))?,
                None => default,
            },
        };
        self.echo.push((key.into(), value.show()));
        Ok(value)
    }

    fn optional<T: Setting>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        match (flag, self.file.get(key)) {
            (Some(v), _) => Ok(Some(self.record(key, v))),
            (None, Some(raw)) => {
                let v = T::parse(raw)
                    .ok_or_else(|| CliError::Usage(format!("config key {key}: cannot parse {raw:?}")))?;
                Ok(Some(self.record(key, v)))
            }
            (None, None) => Ok(None),
        }
    }

    fn record<T: Setting>(&mut self, key: &str, v: T) -> T {
        self.echo.push((key.into(), v.show()));
        v
    }

    /// Derived quantity shown in the header only.
    fn derived(&mut self, key: &str, value: impl ToString) {
        self.echo.push((key.into(), value.to_string()));
    }

    /// Worker count: flag, then file, then the environment. Not echoed, so
    /// outputs do not depend on it.
    fn workers(&self, flag: Option<usize>) -> CliResult<Option<usize>> {
        let raw = match flag {
            Some(w) => return Ok(Some(w)),
            None => self.file.get("workers").cloned().or_else(|| std::env::var(WORKERS_ENV).ok()),
        };
        match raw {
            None => Ok(None),
            Some(r) => r
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("workers: cannot parse {r:?}"))),
        }
    }

    fn header(&self) -> String {
        self.echo.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }

    fn json_config(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.echo.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect(),
        )
    }
}

fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

enum Format {
    Csv,
    Json,
}

fn format_of(r: &mut Resolver, flag: Option<String>) -> CliResult<Format> {
    match r.get("format", flag, "csv".to_string())?.as_str() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::Usage(format!("unknown format {other:?} (csv or json)"))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_table(r: &Resolver, format: Format, out: Option<&Path>, csv: String, json: serde_json::Value) -> CliResult<()> {
    let text = match format {
        Format::Csv => format!("{}{csv}", r.header()),
        Format::Json => {
            let doc = serde_json::json!({ "config": r.json_config(), "result": json });
            serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n"
        }
    };
    emit(out, &text)
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<serde_json::Value> {
    Ok(serde_json::to_value(v).map_err(Error::from)?)
}

fn estimate_row(e: &Estimate, p: f64, s: f64, rho: f64, h: f64) -> String {
    format!(
        "{p},{s},{rho},{h},{},{},{},{},{},{},{}\n",
        e.trials, e.successes, e.p_hat, e.ci_low, e.ci_high, e.seed, e.uncovered
    )
}

fn dispatch(command: Command) -> CliResult<i32> {
    match command {
        Command::Sample { common, field, window, period, horizon, lambda } => {
            let mut r = Resolver::new("sample", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let p = r.get("p", field.p, 0.5)?;
            let s = r.get("s", field.s, 8.0)?;
            let window = match r.get("window", window, "rect".to_string())?.as_str() {
                "rect" => {
                    let rho = r.get("rho", field.rho, 1.0)?;
                    WindowSpec::rectangle(Rect::sized(rho * s, s)?)
                }
                "torus" => WindowSpec::torus(r.get("period", period, s)?)?,
                other => return Err(CliError::Usage(format!("unknown window {other:?} (rect or torus)"))),
            };
            let horizon = match r.get("horizon", horizon, "adaptive".to_string())?.as_str() {
                "adaptive" => Horizon::Adaptive {
                    cap: r.get("lambda", lambda, crate::experiments::DEFAULT_CAP)?,
                    resolution: r.get("h", field.h, 1.0 / 16.0)?,
                },
                "fixed" => {
                    let default = economical_horizon(s.max(1.0), EconomicalVariant::Torus)?;
                    Horizon::fixed(r.get("lambda", lambda, default)?)
                }
                other => return Err(CliError::Usage(format!("unknown horizon {other:?} (adaptive or fixed)"))),
            };
            let proc = Sampler::new(window, horizon, TrialKey::new(seed, 0)).sample(p)?;
            match common.out.as_deref() {
                Some(path) if path.extension().is_some_and(|e| e == "bin") => {
                    write_binary(&proc, BufWriter::new(File::create(path)?))?
                }
                Some(path) => write_text(&proc, BufWriter::new(File::create(path)?))?,
                None => write_text(&proc, std::io::stdout().lock())?,
            }
            eprintln!("sampled {} leaves ({:?})", proc.len(), proc.status);
            Ok(0)
        }
        Command::Render { common, field, input } => {
            let mut r = Resolver::new("render", common.config.as_deref())?;
            let h = r.get("h", field.h, 1.0 / 16.0)?;
            let proc = match r.optional("input", input.map(|p| p.display().to_string()))? {
                Some(path) => load_process(Path::new(&path))?,
                None => {
                    let seed = r.get("seed", common.seed, 1)?;
                    let p = r.get("p", field.p, 0.5)?;
                    let s = r.get("s", field.s, 8.0)?;
                    let rho = r.get("rho", field.rho, 1.0)?;
                    let window = WindowSpec::rectangle(Rect::sized(rho * s, s)?);
                    let horizon = Horizon::Adaptive { cap: crate::experiments::DEFAULT_CAP, resolution: h };
                    Sampler::new(window, horizon, TrialKey::new(seed, 0)).sample(p)?
                }
            };
            let out = common.out.ok_or_else(|| CliError::Usage("render needs --out".into()))?;
            let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("").to_string();
            let field = rasterize(&proc, proc.window.bounds(), h)?;
            let w = BufWriter::new(File::create(&out)?);
            match ext.as_str() {
                "ppm" => write_ppm(&field, w)?,
                "svg" => write_svg(&proc, w)?,
                _ => {
                    let mut w = w;
                    w.write_all(r.header().as_bytes())?;
                    write_matrix(&field, w)?
                }
            }
            let cov = coverage_of(&field);
            eprintln!(
                "rendered {}x{} pixels from {} leaves, {} uncovered",
                field.nx,
                field.ny,
                proc.len(),
                cov.uncovered_pixel_count
            );
            Ok(0)
        }
        Command::Cross { common, field } => {
            let mut r = Resolver::new("cross", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let params = CrossingParams::new(
                r.get("p", field.p, 0.5)?,
                r.get("rho", field.rho, 1.0)?,
                r.get("s", field.s, 16.0)?,
                r.get("trials", field.trials, 1000)?,
                seed,
            )
            .with_resolution(r.get("h", field.h, 1.0 / 16.0)?);
            let format = format_of(&mut r, common.format)?;
            let workers = r.workers(common.workers)?;
            let e = estimate_crossing(&params, workers)?;
            let csv = format!("{SWEEP_CSV_HEADER}\n{}", estimate_row(&e, params.p, params.s, params.rho, params.h));
            emit_table(&r, format, common.out.as_deref(), csv, to_json(&e)?)?;
            eprintln!(
                "crossing p={} rho={} s={}: p_hat={:.4} [{:.4}, {:.4}] over {} trials",
                params.p, params.rho, params.s, e.p_hat, e.ci_low, e.ci_high, e.trials
            );
            Ok(0)
        }
        Command::Sweep { common, field, p_list, s_list, plot } => {
            let mut r = Resolver::new("sweep", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let default_p: Vec<f64> = (0..=10).map(|k| (40 + 2 * k) as f64 / 100.0).collect();
            let p_list = r.get("p_list", p_list, default_p)?;
            let s_list = r.get("s_list", s_list, vec![8.0, 16.0])?;
            let trials = r.get("trials", field.trials, 200)?;
            let h = r.get("h", field.h, 1.0 / 16.0)?;
            let plot = r.optional("plot", plot.map(|p| p.display().to_string()))?;
            let format = format_of(&mut r, common.format)?;
            let workers = r.workers(common.workers)?;
            let sweep = critical_scan(&p_list, &s_list, trials, h, seed, workers)?;
            let json = to_json(&sweep)?;
            emit_table(&r, format, common.out.as_deref(), sweep.to_csv(), json)?;
            if let Some(path) = plot {
                std::fs::write(path, format!("{}{}", r.header(), sweep.plot_data()))?;
            }
            let points: Vec<String> = sweep
                .crossing_points
                .iter()
                .map(|c| c.map_or("none".into(), |v| format!("{v:.4}")))
                .collect();
            eprintln!("sweep over {} p x {} s; crossing points {}", p_list.len(), s_list.len(), points.join(" "));
            Ok(0)
        }
        Command::Theta { common, field, m_list } => {
            let mut r = Resolver::new("theta", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let p = r.get("p", field.p, 0.5)?;
            let m_list = r.get("m_list", m_list, vec![4.0, 8.0, 16.0])?;
            let trials = r.get("trials", field.trials, 200)?;
            let h = r.get("h", field.h, 1.0 / 16.0)?;
            let format = format_of(&mut r, common.format)?;
            let workers = r.workers(common.workers)?;
            let (estimates, violations) = if m_list.len() == 1 {
                (vec![estimate_theta_proxy(p, m_list[0], trials, h, seed, workers)?], 0)
            } else {
                let prof = theta_profile(p, &m_list, trials, h, seed, workers)?;
                (prof.estimates, prof.violations)
            };
            r.derived("nesting_violations", violations);
            let mut csv = String::from("p,m,h,trials,successes,p_hat,ci_low,ci_high,seed\n");
            for (m, e) in m_list.iter().zip(&estimates) {
                let _ = writeln!(
                    csv,
                    "{p},{m},{h},{},{},{},{},{},{}",
                    e.trials, e.successes, e.p_hat, e.ci_low, e.ci_high, e.seed
                );
            }
            emit_table(&r, format, common.out.as_deref(), csv, to_json(&estimates)?)?;
            let fs: Vec<String> = estimates.iter().map(|e| format!("{:.4}", e.p_hat)).collect();
            eprintln!("theta proxy at p={p}: {}", fs.join(" "));
            Ok(0)
        }
        Command::Rsw { common, field, s_list } => {
            let mut r = Resolver::new("rsw", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let rho = r.get("rho", field.rho, 3.0)?;
            let s_list = r.get("s_list", s_list, vec![8.0, 16.0, 32.0])?;
            let trials = r.get("trials", field.trials, 500)?;
            let h = r.get("h", field.h, 1.0 / 16.0)?;
            let format = format_of(&mut r, common.format)?;
            let workers = r.workers(common.workers)?;
            let report = rsw_check(rho, &s_list, trials, h, seed, workers)?;
            let nested = rsw_nested(0.5, &[1.0, rho], s_list[0], trials, h, seed, workers)?;
            r.derived("flagged", report.flagged);
            r.derived("nesting_violations", nested.violations);
            let mut csv = format!("{SWEEP_CSV_HEADER}\n");
            for (s, e) in s_list.iter().zip(&report.estimates) {
                csv += &estimate_row(e, 0.5, *s, rho, h);
            }
            emit_table(&r, format, common.out.as_deref(), csv, to_json(&report)?)?;
            let min = report.estimates.iter().map(|e| e.p_hat).fold(1.0, f64::min);
            eprintln!("rsw rho={rho}: smallest estimate {min:.4}, flagged={}", report.flagged);
            Ok(0)
        }
        Command::Fkg { common, field, variant } => {
            let mut r = Resolver::new("fkg", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let p = r.get("p", field.p, 0.5)?;
            let s = r.get("s", field.s, 16.0)?;
            let trials = r.get("trials", field.trials, 5000)?;
            let h = r.get("h", field.h, 1.0 / 16.0)?;
            let variant = r.get("variant", variant, "overlap".to_string())?;
            let format = format_of(&mut r, common.format)?;
            let workers = r.workers(common.workers)?;
            let rep = match variant.as_str() {
                "overlap" => fkg_check(p, s, trials, h, seed, workers)?,
                "independent" => fkg_independent(p, s, trials, h, seed, workers)?,
                other => return Err(CliError::Usage(format!("unknown variant {other:?} (overlap or independent)"))),
            };
            let csv = format!(
                "p_ab,p_a,p_b,product,sigma,trials\n{},{},{},{},{},{}\n",
                rep.p_ab, rep.p_a, rep.p_b, rep.product, rep.sigma, rep.trials
            );
            emit_table(&r, format, common.out.as_deref(), csv, to_json(&rep)?)?;
            eprintln!(
                "P(A∩B)={:.4} P(A)P(B)={:.4} excess={:+.4} sigma={:.4}",
                rep.p_ab,
                rep.product,
                rep.excess(),
                rep.sigma
            );
            Ok(0)
        }
        Command::Diagnose { common, field, check, side, lambda, delta0, n_max, gamma, configs, points, period } => {
            let mut r = Resolver::new("diagnose", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let check = r.get("check", check, "pairs".to_string())?;
            let format = match check.as_str() {
                "pairs" | "tail" | "bad" | "domination" => format_of(&mut r, common.format.clone())?,
                other => {
                    return Err(CliError::Usage(format!("unknown check {other:?} (pairs, tail, bad or domination)")))
                }
            };
            match check.as_str() {
                "pairs" => {
                    let side = r.get("side", side, 4.0)?;
                    let horizon = r.get("lambda", lambda, 2.0)?;
                    let delta0 = r.get("delta0", delta0, 0.05)?;
                    let trials = r.get("trials", field.trials, 1000)?;
                    let workers = r.workers(common.workers)?;
                    let st = pair_count_stats(side, horizon, delta0, trials, seed, workers)?;
                    let csv = format!("{}\n{}\n", PairCountStats::CSV_HEADER, st.csv_row());
                    emit_table(&r, format, common.out.as_deref(), csv, to_json(&st)?)?;
                    eprintln!(
                        "mean unstable pairs {:.4} ± {:.4}, first moment {:.4}",
                        st.empirical_mean, st.std_error, st.analytic
                    );
                }
                "tail" => {
                    let lambda = r.get("lambda", lambda, 1.0)?;
                    let trials = r.get("trials", field.trials, 10_000)?;
                    let n_max = r.get("n_max", n_max, 10)?;
                    let workers = r.workers(common.workers)?;
                    let rep: TailReport = boundary_visible_tail(lambda, trials, seed, n_max, workers)?;
                    emit_table(&r, format, common.out.as_deref(), rep.to_csv(), to_json(&rep)?)?;
                    let exceed = (0..rep.n_values.len())
                        .filter(|&k| rep.empirical_tail[k] > rep.analytic_bound[k] + 3.0 * rep.sigma(k))
                        .count();
                    eprintln!("tail over {} trials: {exceed} values of n exceed the bound by 3 sigma", rep.trials);
                }
                "bad" => {
                    let p = r.get("p", field.p, 0.5)?;
                    let period = r.get("period", period, 6.0)?;
                    let lambda = r.get("lambda", lambda, 2.0)?;
                    let delta0 = r.get("delta0", delta0, 0.125)?;
                    let window = WindowSpec::torus(period)?;
                    let proc = Sampler::new(window, Horizon::fixed(lambda), TrialKey::new(seed, 0)).sample(p)?;
                    let rep = bad_components(&proc, delta0);
                    r.derived("leaves", proc.len());
                    r.derived("pair_edges", rep.pair_edges);
                    r.derived("triple_edges", rep.triple_edges);
                    let mut csv = String::from("component,size,members\n");
                    for (k, c) in rep.components.iter().enumerate() {
                        let members: Vec<String> = c.iter().map(u32::to_string).collect();
                        let _ = writeln!(csv, "{k},{},{}", c.len(), members.join(" "));
                    }
                    emit_table(&r, format, common.out.as_deref(), csv, to_json(&rep)?)?;
                    eprintln!(
                        "{} leaves, {} components, largest {}",
                        proc.len(),
                        rep.components.len(),
                        rep.max_size
                    );
                }
                _ => {
                    let s = r.get("s", field.s, 8.0)?;
                    if s.fract() != 0.0 || s < 2.0 {
                        return Err(CliError::Usage(format!("domination needs an integer s >= 2, got {s}")));
                    }
                    let gamma = r.get("gamma", gamma, 0.5)?;
                    let p = r.get("p", field.p, 0.5)?;
                    let configs = r.get("configs", configs, 5)?;
                    let points = r.get("points", points, 10_000)?;
                    let setup = DominationSetup::standard(s as u64, gamma, p, configs, points, seed)?;
                    r.derived("period", setup.period);
                    r.derived("lambda", setup.lambda);
                    r.derived("delta", setup.mesh.delta);
                    r.derived("delta1", setup.mesh.delta1);
                    r.derived("delta2", setup.mesh.delta2);
                    let workers = r.workers(common.workers)?;
                    let rep = crate::experiments::domination_check_with(&setup, workers)?;
                    let csv = format!(
                        "configs_checked,skipped_uncovered,points_checked,points_skipped,violations_upper,violations_lower\n{},{},{},{},{},{}\n",
                        rep.configs_checked, rep.skipped_uncovered, rep.points_checked, rep.points_skipped,
                        rep.violations_upper, rep.violations_lower
                    );
                    emit_table(&r, format, common.out.as_deref(), csv, to_json(&rep)?)?;
                    eprintln!(
                        "domination chain: {} configs, {} points, {} violations",
                        rep.configs_checked,
                        rep.points_checked,
                        rep.violations_upper + rep.violations_lower
                    );
                }
            }
            Ok(0)
        }
        Command::Coverage { common, field, seeds, lambda } => {
            let mut r = Resolver::new("coverage", common.config.as_deref())?;
            let seed = r.get("seed", common.seed, 1)?;
            let s = r.get("s", field.s, 16.0)?;
            let seeds = r.get("seeds", seeds, 100)?;
            let h = r.get("h", field.h, 1.0 / 16.0)?;
            let lambda = r.get("lambda", lambda, economical_horizon(s, EconomicalVariant::Torus)?)?;
            r.derived("period", 10.0 * s);
            let format = format_of(&mut r, common.format)?;
            let window = WindowSpec::torus(10.0 * s)?;
            let workers = r.workers(common.workers)?;
            let rows = crate::trials::try_run_trials(workers, seeds, |k| {
                let horizon = Horizon::Adaptive { cap: lambda, resolution: h };
                let sample = Sampler::new(window, horizon, TrialKey::new(seed, k)).sample_sites()?;
                Ok((sample.status == SampleStatus::Complete, sample.horizon_reached, sample.sites.len()))
            })?;
            let mut csv = String::from("trial,covered,time_reached,leaves\n");
            for (k, (c, t, n)) in rows.iter().enumerate() {
                let _ = writeln!(csv, "{k},{c},{t},{n}");
            }
            let covered = rows.iter().filter(|r| r.0).count();
            let json = serde_json::json!({ "covered": covered, "trials": seeds, "rows": rows });
            emit_table(&r, format, common.out.as_deref(), csv, json)?;
            eprintln!("{covered}/{seeds} tori of period {} covered by time {lambda}", 10.0 * s);
            Ok(0)
        }
        Command::Selftest { common } => {
            let _ = common;
            let results = selftest();
            let mut failed = 0;
            for (name, ok) in &results {
                println!("[{}] {name}", if *ok { "PASS" } else { "FAIL" });
                failed += usize::from(!ok);
            }
            eprintln!("selftest: {}/{} passed", results.len() - failed, results.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

fn load_process(path: &Path) -> CliResult<LeafProcess> {
    let file = File::open(path)?;
    Ok(if path.extension().is_some_and(|e| e == "bin") {
        read_binary(BufReader::new(file))?
    } else {
        read_text(BufReader::new(file))?
    })
}

/// Quick deterministic checks of basic behavior across modules.
pub fn selftest() -> Vec<(&'static str, bool)> {
    use crate::coloring::{color_at, height_at};
    use crate::connectivity::{crossing_report, label_components, Adjacency};
    use crate::geometry::Point2;
    use crate::process::{state_probabilities, Color, Leaf};

    let w = WindowSpec::rectangle(Rect::sized(4.0, 4.0).expect("valid rect"));
    let single = LeafProcess::from_leaves(w, vec![Leaf::new(0, Point2::new(2.0, 2.0), 0.7, Color::Black)]);
    let two = LeafProcess::from_leaves(
        w,
        vec![
            Leaf::new(0, Point2::new(2.0, 2.0), 0.1, Color::White),
            Leaf::new(1, Point2::new(2.2, 2.0), 0.3, Color::Black),
        ],
    );
    let empty = LeafProcess::from_leaves(w, Vec::new());
    let tiny = Rect::new(1.9, 2.1, 1.9, 2.1).expect("valid rect");
    let probs = state_probabilities(0.3, 0.25);
    let field = rasterize(&single, tiny, 0.05).ok();
    let sampled = Sampler::new(w, Horizon::adaptive(100.0), TrialKey::new(1, 0)).sample(1.0).ok();
    vec![
        ("height of a single leaf at its center", height_at(&single, Point2::new(2.0, 2.0)) == 0.7),
        ("uncovered point has height -2", height_at(&single, Point2::new(0.1, 0.1)) == -2.0),
        ("earlier leaf wins", color_at(&two, Point2::new(2.1, 2.0)) == -1),
        ("empty process rasterizes to 0", rasterize(&empty, w.bounds(), 0.5).is_ok_and(|f| f.count(0) == 64)),
        ("region inside one black leaf is black", field.as_ref().is_some_and(|f| f.count(1) == f.values.len())),
        (
            "covered black field crosses",
            sampled
                .as_ref()
                .and_then(|p| rasterize(p, w.bounds(), 0.125).ok())
                .is_some_and(|f| crossing_report(&f).black_horizontal),
        ),
        (
            "checkerboard has singleton 4-components",
            {
                let mut f = rasterize(&empty, Rect::sized(2.0, 2.0).expect("valid rect"), 0.5).expect("valid grid");
                f.values = (0..16).map(|k| if (k % 4 + k / 4) % 2 == 0 { 1 } else { -1 }).collect();
                label_components(&f, 1, Adjacency::Four).count() == 8
            },
        ),
        ("cube state probabilities sum to one", (probs.white + probs.black + probs.neutral - 1.0).abs() < 1e-12),
        ("mesh at s=16, gamma=1", mesh_params(16, 1.0).is_ok_and(|m| m.delta == 1.0 / 16.0 && m.delta1 == 0.25)),
        ("torus horizon at s=16 is 100", economical_horizon(16.0, EconomicalVariant::Torus).is_ok_and(|l| l == 100.0)),
        ("p out of range is rejected", estimate_crossing(&CrossingParams::new(1.5, 1.0, 4.0, 1, 0), Some(1)).is_err()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_precedence() {
        let mut r = Resolver {
            file: parse_config("# comment\np = 0.3\ntrials=50\ns-list = 4, 8\n").unwrap(),
            echo: Vec::new(),
        };
        assert_eq!(r.get("p", Some(0.7), 0.5).unwrap(), 0.7);
        assert_eq!(r.get("p", None, 0.5).unwrap(), 0.3);
        assert_eq!(r.get("trials", None::<u64>, 1).unwrap(), 50);
        assert_eq!(r.get("seed", None::<u64>, 9).unwrap(), 9);
        assert_eq!(r.get("s_list", None, vec![1.0]).unwrap(), vec![4.0, 8.0]);
        assert!(r.header().contains("# p=0.3\n"));
        assert!(parse_config("novalue").is_err());
        r.file.insert("h".into(), "abc".into());
        assert!(r.get("h", None, 0.1).is_err());
    }

    #[test]
    fn selftest_passes() {
        for (name, ok) in selftest() {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["confetti", "bogus"]), 2);
        assert_eq!(run(["confetti", "cross", "--no-such-flag"]), 2);
        assert_eq!(run(["confetti", "cross", "--p", "2", "--trials", "1", "--s", "4"]), 2);
        assert_eq!(run(["confetti", "--help"]), 0);
    }
}
