//! Command-line front end. The binary is a thin wrapper over [`run`], which
//! returns the process exit code so tests can drive it in-process.

use crate::blockage::BlockageResult;
use crate::config::{load_config, RunConfig};
use crate::detector::{
    fit_me_lambda, roc_curve, regime_map, BlockageSource, RegimePoint, RocPoint,
};
use crate::error::Error;
use crate::mcsim::{simulate_received_power, validate_suite, Blocking, ValidationReport};
use crate::system::SystemConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

pub const REGIME_MAP_HEADER: &str = "rho,n_interferers,blockage,v0_m,p_b,mean_y_w,lambda,eta_prime_w,p_d,lrt_area,ln_lrt_area,verdict,error";
pub const ROC_HEADER: &str = "rho,n_interferers,beta,p_f,p_d";
pub const SIMULATE_HEADER: &str = "trial,y_watts";

#[derive(Debug, Parser)]
#[command(name = "mmwave-regime", version, about = "Noise- vs interference-limited regime detection for finite mmWave networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for the output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `simulation.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `simulation.trials`.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 0 lets the pool choose.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BlockingArg {
    /// Independent blocking with the closed-form probability.
    Analytic,
    /// Cone-shadow rule against sampled obstacles.
    Geometric,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Blockage probability at the configured receiver location.
    Blockage(Common),
    /// Detector outcome over the v0 grid for every (ρ, N), with and without blockage.
    RegimeMap(Common),
    /// ROC points over the β grid for every (ρ, N).
    Roc(Common),
    /// Monte-Carlo validation suite; exits 3 when a check fails.
    Validate(Common),
    /// Received-power samples.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = BlockingArg::Analytic)]
        blocking: BlockingArg,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Blockage(c)
            | Command::RegimeMap(c)
            | Command::Roc(c)
            | Command::Validate(c)
            | Command::Simulate { common: c, .. } => c,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Blockage(_) => "blockage",
            Command::RegimeMap(_) => "regime-map",
            Command::Roc(_) => "roc",
            Command::Validate(_) => "validate",
            Command::Simulate { .. } => "simulate",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config_sha256: &'a str,
    seed: u64,
    trials: u64,
    defaulted: &'a [String],
}

/// Failure of a command with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } | Error::Io(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cmd: &Command) -> Result<i32, Failure> {
    let common = cmd.common();
    let mut cfg = load_config(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        if trials == 0 {
            return Err(Failure::usage("--trials must be >= 1"));
        }
        cfg.trials = trials;
    }
    let format = match (cmd, common.format) {
        (Command::Blockage(_) | Command::Validate(_), None | Some(Format::Json)) => Format::Json,
        (Command::Blockage(_) | Command::Validate(_), Some(Format::Csv)) => {
            return Err(Failure::usage(format!("{} emits JSON only", cmd.name())))
        }
        (_, f) => f.unwrap_or(Format::Csv),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| Failure::usage(format!("--threads: {e}")))?;

    let (body, code) = pool.install(|| -> Result<(String, i32), Failure> {
        let prov = Provenance {
            tool: "mmwave-regime",
            version: env!("CARGO_PKG_VERSION"),
            command: cmd.name(),
            config_sha256: &cfg.sha256,
            seed: cfg.seed,
            trials: cfg.trials,
            defaulted: &cfg.defaulted,
        };
        match cmd {
            Command::Blockage(_) => {
                let r = cfg.system.blockage_result()?;
                Ok((json_doc(&prov, "blockage", &r), EXIT_OK))
            }
            Command::RegimeMap(_) => {
                let rows = regime_rows(&cfg);
                let code = if rows.iter().all(|r| r.point.error.is_some()) {
                    EXIT_NUMERICAL
                } else {
                    EXIT_OK
                };
                let body = match format {
                    Format::Csv => regime_csv(&prov, &rows),
                    Format::Json => json_doc(&prov, "rows", &rows),
                };
                Ok((body, code))
            }
            Command::Roc(_) => {
                let rows = roc_rows(&cfg)?;
                let body = match format {
                    Format::Csv => roc_csv(&prov, &rows),
                    Format::Json => json_doc(&prov, "rows", &rows),
                };
                Ok((body, EXIT_OK))
            }
            Command::Validate(_) => {
                let report = validate_suite(&cfg.system, cfg.beta_th, cfg.trials, cfg.seed)?;
                let code = if report.pass { EXIT_OK } else { EXIT_VALIDATION };
                Ok((json_doc::<ValidationReport>(&prov, "report", &report), code))
            }
            Command::Simulate { blocking, .. } => {
                let blocking = match blocking {
                    BlockingArg::Analytic => Blocking::Bernoulli(cfg.system.blockage_result()?.p_b),
                    BlockingArg::Geometric => Blocking::Geometric,
                };
                let y = simulate_received_power(&cfg.system, blocking, cfg.trials, cfg.seed)?;
                let body = match format {
                    Format::Csv => {
                        let mut s = csv_preamble(&prov, SIMULATE_HEADER);
                        for (t, v) in y.iter().enumerate() {
                            let _ = writeln!(s, "{t},{v:e}");
                        }
                        s
                    }
                    Format::Json => json_doc(&prov, "y_watts", &y),
                };
                Ok((body, EXIT_OK))
            }
        }
    })?;

    emit(common, cmd.name(), format, &body)?;
    Ok(code)
}

fn emit(common: &Common, name: &str, format: Format, body: &str) -> Result<(), Failure> {
    match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, body).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn json_doc<T: Serialize + ?Sized>(prov: &Provenance, key: &str, value: &T) -> String {
    let mut map = serde_json::Map::new();
    map.insert("provenance".into(), serde_json::to_value(prov).expect("provenance serializes"));
    map.insert(key.into(), serde_json::to_value(value).expect("output serializes"));
    let mut s = serde_json::to_string_pretty(&map).expect("map serializes");
    s.push('\n');
    s
}

fn csv_preamble(prov: &Provenance, header: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} {} {}", prov.tool, prov.version, prov.command);
    let _ = writeln!(s, "# config_sha256: {}", prov.config_sha256);
    let _ = writeln!(s, "# seed: {}", prov.seed);
    let _ = writeln!(s, "# trials: {}", prov.trials);
    let _ = writeln!(s, "# defaulted: {}", prov.defaulted.join(" "));
    s.push_str(header);
    s.push('\n');
    s
}

/// One regime-map row: the point plus the sweep coordinates that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeRow {
    pub rho: f64,
    pub n_interferers: u64,
    /// "model" or "none".
    pub blockage: &'static str,
    pub point: RegimePoint,
}

fn sweep_system(cfg: &RunConfig, rho: f64, n: u64) -> SystemConfig {
    let mut sys = cfg.system;
    sys.blockage.rho = rho;
    sys.channel.n_interferers = n;
    sys
}

/// Every (ρ, N, blockage variant) family over the v0 grid, in sweep order.
pub fn regime_rows(cfg: &RunConfig) -> Vec<RegimeRow> {
    let mut rows = Vec::new();
    for &rho in &cfg.sweep.rho_list {
        for &n in &cfg.sweep.n_list {
            let sys = sweep_system(cfg, rho, n);
            for (label, source) in [("model", BlockageSource::Model), ("none", BlockageSource::Fixed(0.0))] {
                for point in regime_map(&sys, &cfg.sweep.v0_grid, cfg.beta_th, source) {
                    rows.push(RegimeRow {
                        rho,
                        n_interferers: n,
                        blockage: label,
                        point,
                    });
                }
            }
        }
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn regime_csv(prov: &Provenance, rows: &[RegimeRow]) -> String {
    let mut s = csv_preamble(prov, REGIME_MAP_HEADER);
    for r in rows {
        let p = &r.point;
        let det = p.detection.as_ref();
        // commas and newlines would break the row
        let error = p.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.rho,
            r.n_interferers,
            r.blockage,
            p.v0,
            opt(p.p_b),
            opt(p.mean_y),
            opt(p.fit.map(|f| f.lambda)),
            opt(det.map(|d| d.eta_prime)),
            opt(det.map(|d| d.p_d)),
            opt(det.map(|d| d.lrt_area)),
            opt(det.map(|d| d.ln_lrt_area)),
            p.verdict().map(|v| v.as_str()).unwrap_or(""),
            error,
        );
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct RocRow {
    pub rho: f64,
    pub n_interferers: u64,
    #[serde(flatten)]
    pub point: RocPoint,
}

/// ROC points at the configured receiver for every (ρ, N) with the model blockage.
pub fn roc_rows(cfg: &RunConfig) -> crate::Result<Vec<RocRow>> {
    let mut rows = Vec::new();
    for &rho in &cfg.sweep.rho_list {
        for &n in &cfg.sweep.n_list {
            let sys = sweep_system(cfg, rho, n);
            let BlockageResult { p_b, .. } = sys.blockage_result()?;
            let model = sys.interference_model()?;
            let mean_y = model.mean_received_power(sys.noise.phi, p_b)?;
            let fit = fit_me_lambda(mean_y, sys.noise.phi, sys.fit_mode)?;
            for point in roc_curve(&fit, &sys.noise, &cfg.sweep.beta_grid)? {
                rows.push(RocRow {
                    rho,
                    n_interferers: n,
                    point,
                });
            }
        }
    }
    Ok(rows)
}

fn roc_csv(prov: &Provenance, rows: &[RocRow]) -> String {
    let mut s = csv_preamble(prov, ROC_HEADER);
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.rho, r.n_interferers, r.point.beta, r.point.p_f, r.point.p_d);
    }
    s
}
