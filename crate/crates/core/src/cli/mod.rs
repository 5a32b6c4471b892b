//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! or configuration errors. Reports carry no timestamps, so a fixed
//! configuration and seed give byte-identical output.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use commands::Outcome;
pub use config::RunConfig;

use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SHOOT_HELP: &str = "CSV columns: s, r, theta, phi, kappa_p, kappa_o, u, f, p, residual";
const SCAN_HELP: &str = "CSV columns: start_r, closed, classification, closure_defect, max_residual, \
                         r_min, r_max, p_spread, length, samples, error";

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Checks and shooting experiments for self-similar curvature flow solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the random samplers; echoed in the report.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exponent of the speed in the soliton equation.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Slack allowed in the structural inequalities.
    #[arg(long = "tol-condition", global = true)]
    tol_condition: Option<f64>,
    /// Largest accepted relative residual of the surface identities.
    #[arg(long = "tol-identity", global = true)]
    tol_identity: Option<f64>,
    /// Largest accepted relative residual of the P-operator decomposition.
    #[arg(long = "tol-lp", global = true)]
    tol_lp: Option<f64>,
    /// Accepted distance of a slice root from the expected one.
    #[arg(long = "tol-slice", global = true)]
    tol_slice: Option<f64>,
    /// Accepted angle defect when a profile reaches the axis.
    #[arg(long = "tol-closure", global = true)]
    tol_closure: Option<f64>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Membership of curvature vectors in the Gårding-type cones.
    CheckCone {
        /// Comma-separated curvature vector; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        kappa: Vec<String>,
    },
    /// Structural inequalities of the configured speed.
    CheckCondition {
        #[arg(long, allow_hyphen_values = true)]
        kappa: Vec<String>,
    },
    /// Geometry identities on a profile, and the P-operator decomposition on a trace.
    VerifyIdentities,
    /// Radii of the slices solving the soliton equation.
    Slice,
    /// Shoot one profile from the axis.
    #[command(after_help = SHOOT_HELP)]
    Shoot {
        #[arg(long)]
        start_r: Option<f64>,
    },
    /// Shoot from a grid of start radii.
    #[command(after_help = SCAN_HELP)]
    Scan,
    /// Run every section of the configuration.
    Report,
}

fn parse_kappa(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidKappa(format!("cannot parse '{t}' in '{text}'")))
        })
        .collect()
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0) => Err(Error::InvalidParameter(format!("{name} must be positive, got {x}"))),
        other => Ok(other),
    }
}

/// Loads the configuration and applies flag overrides.
fn configure(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(a) = positive("--alpha", c.alpha)? {
        cfg.alpha = a;
    }
    if let Some(t) = positive("--tol-condition", c.tol_condition)? {
        cfg.check_condition.get_or_insert_with(Default::default).tol = t;
    }
    if let Some(t) = positive("--tol-identity", c.tol_identity)? {
        if let Some(v) = cfg.verify.as_mut() {
            v.tol = t;
        }
    }
    if let Some(t) = positive("--tol-lp", c.tol_lp)? {
        if let Some(tc) = cfg.verify.as_mut().and_then(|v| v.trace.as_mut()) {
            tc.tol = t;
        }
    }
    if let Some(t) = positive("--tol-slice", c.tol_slice)? {
        if let Some(s) = cfg.slice.as_mut() {
            s.tol = t;
        }
    }
    if let Some(t) = positive("--tol-closure", c.tol_closure)? {
        if let Some(s) = cfg.shoot.as_mut() {
            s.control.phi_tol = t;
        }
        if let Some(s) = cfg.scan.as_mut() {
            s.control.phi_tol = t;
        }
        if let Some(tc) = cfg.verify.as_mut().and_then(|v| v.trace.as_mut()) {
            tc.control.phi_tol = t;
        }
    }
    match &cli.command {
        Command::CheckCone { kappa } if !kappa.is_empty() => {
            let pts = kappa.iter().map(|k| parse_kappa(k)).collect::<Result<Vec<_>>>()?;
            cfg.check_cone.get_or_insert_with(Default::default).kappa = pts;
        }
        Command::CheckCondition { kappa } if !kappa.is_empty() => {
            let pts = kappa.iter().map(|k| parse_kappa(k)).collect::<Result<Vec<_>>>()?;
            cfg.check_condition.get_or_insert_with(Default::default).kappa = pts;
        }
        Command::Shoot { start_r: Some(r) } => match cfg.shoot.as_mut() {
            Some(s) => s.start_r = *r,
            None => {
                cfg.shoot = Some(config::ShootConfig { start_r: *r, expect_closed: None, control: Default::default() })
            }
        },
        _ => {}
    }
    Ok(cfg)
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::CheckCone { .. } => commands::check_cone(cfg),
        Command::CheckCondition { .. } => commands::check_condition(cfg),
        Command::VerifyIdentities => commands::verify_identities(cfg),
        Command::Slice => commands::slice(cfg),
        Command::Shoot { .. } => commands::shoot_cmd(cfg),
        Command::Scan => commands::scan_cmd(cfg),
        Command::Report => commands::report(cfg),
    }
}

/// Full JSON report for an outcome.
pub fn render_json(cfg: &RunConfig, outcome: &Outcome) -> Result<Vec<u8>> {
    let doc = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": outcome.command,
        "check": outcome.check,
        "seed": cfg.seed,
        "pass": outcome.pass,
        "config": cfg,
        "result": outcome.result,
    });
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("output path {} has no file name", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let cfg = match configure(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = match execute(&cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let bytes = match cli.common.format {
        Format::Json => render_json(&cfg, &outcome),
        Format::Csv => Ok(outcome.csv.clone()),
    };
    let written = bytes.and_then(|b| match &cli.common.out {
        Some(p) => write_atomic(p, &b),
        None => Ok(std::io::stdout().lock().write_all(&b)?),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    eprintln!("{}: {}", outcome.command, if outcome.pass { "pass" } else { "FAIL" });
    if outcome.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
