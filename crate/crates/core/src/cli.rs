//! Command dispatch for the `roughpath` binary.
//!
//! Exit status: 0 on success, 1 when a `check-*` command finds a violation,
//! 2 on any input or usage error. Nothing is written to standard output when
//! the exit status is 2.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grouplike::is_grouplike;
use crate::io::{
    format_number, read_csv, read_tensor_json, write_tensor_json, CsvPath, TensorMeta,
};
use crate::rough::{
    holder_norm, holder_report, is_multiplicative, minimal_depth, young_integral, YoungOptions,
};
use crate::signature::{levy_area, path_signature, signature_path};
use crate::tensor::{count_entries, set_entry_cap, TruncatedTensor, DEFAULT_ENTRY_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "roughpath",
    version,
    about = "Path signatures and rough path analytics for CSV time series"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Truncation depth N
    #[arg(long, global = true, default_value_t = 2)]
    pub depth: usize,
    /// Window [S, T] in normalised time
    #[arg(long, global = true, num_args = 2, value_names = ["S", "T"], allow_negative_numbers = true)]
    pub interval: Option<Vec<f64>>,
    /// Hölder exponent α
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Relative tolerance for checks
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Refuse Young integrals whose declared exponents violate α + β > 1
    #[arg(long, global = true)]
    pub strict: bool,
    /// Maximum number of coefficients per tensor
    #[arg(long, global = true, default_value_t = DEFAULT_ENTRY_CAP)]
    pub cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated signature as JSON
    Sig { file: Option<String> },
    /// Log-signature as JSON
    Logsig { file: Option<String> },
    /// ρ_N distance between the signatures of two inputs (CSV or tensor JSON)
    Dist { first: String, second: String },
    /// Lévy area matrix
    Levy { file: Option<String> },
    /// Young integral ∫ Y dX
    Young {
        integrand: String,
        integrator: String,
        /// Uniform refinement steps
        #[arg(long, default_value_t = 10_000)]
        refine: usize,
        /// Declared Hölder exponent of the integrand (paired with --alpha)
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Chen's relation over all grid triples
    CheckChen { file: Option<String> },
    /// Shuffle identity of the signature
    CheckShuffle { file: Option<String> },
    /// Hölder constants per level and for ρ_N
    Holder { file: Option<String> },
    /// Minimal truncation depth ⌊1/α⌋
    DepthForAlpha,
}

/// Validated run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub depth: usize,
    pub interval: Option<(f64, f64)>,
    pub alpha: Option<f64>,
    pub tol: f64,
    pub cap: usize,
    pub strict: bool,
}

impl RunConfig {
    pub fn from_opts(o: &GlobalOpts) -> Result<Self> {
        if o.depth < 1 {
            return Err(Error::TooFewSamples("--depth must be at least 1"));
        }
        let tol_ok = o.tol > 0.0 && o.tol.is_finite();
        if !tol_ok {
            return Err(Error::InvalidPath(format!(
                "--tol must be positive, got {}",
                o.tol
            )));
        }
        let interval = match o.interval.as_deref() {
            Some([s, t]) => {
                if s.is_nan() || t.is_nan() || s > t || *s < 0.0 || *t > 1.0 {
                    return Err(Error::InvalidInterval { s: *s, t: *t });
                }
                Some((*s, *t))
            }
            _ => None,
        };
        Ok(Self {
            depth: o.depth,
            interval,
            alpha: o.alpha,
            tol: o.tol,
            cap: o.cap,
            strict: o.strict,
        })
    }

    fn window(&self) -> (f64, f64) {
        self.interval.unwrap_or((0.0, 1.0))
    }

    fn alpha(&self) -> Result<f64> {
        self.alpha
            .ok_or_else(|| Error::Regularity("--alpha is required".into()))
    }
}

enum Outcome {
    Ok(String),
    CheckFailed(String),
}

fn read_source(file: Option<&str>, stdin: &mut dyn Read) -> Result<String> {
    match file {
        None | Some("-") => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Error::Io(e.to_string()))?;
            Ok(s)
        }
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}"))),
    }
}

fn load_csv(file: Option<&str>, stdin: &mut dyn Read) -> Result<CsvPath> {
    let text = read_source(file, stdin)?;
    read_csv(text.as_bytes())
}

fn window_signature(p: &CsvPath, cfg: &RunConfig) -> Result<TruncatedTensor<f64>> {
    count_entries(p.path.d(), cfg.depth, cfg.cap, "tensor")?;
    let (s, t) = cfg.window();
    path_signature(&p.path, cfg.depth, &s, &t)
}

fn meta(p: &CsvPath, cfg: &RunConfig) -> TensorMeta {
    TensorMeta {
        interval: cfg.window(),
        time_span: Some(p.time_span),
    }
}

/// Either a CSV path (signed over the configured window) or a stored tensor.
fn load_signature(
    file: &str,
    cfg: &RunConfig,
    stdin: &mut dyn Read,
) -> Result<TruncatedTensor<f64>> {
    let text = read_source(Some(file), stdin)?;
    if text.trim_start().starts_with('{') {
        let (t, _) = read_tensor_json(&text)?;
        if t.depth() < cfg.depth {
            return Err(Error::DepthExceeded {
                requested: cfg.depth,
                depth: t.depth(),
            });
        }
        t.project(cfg.depth)
    } else {
        window_signature(&read_csv(text.as_bytes())?, cfg)
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome> {
    let cfg = RunConfig::from_opts(&cli.opts)?;
    set_entry_cap(cfg.cap);
    match &cli.command {
        Command::Sig { file } => {
            let p = load_csv(file.as_deref(), stdin)?;
            let sig = window_signature(&p, &cfg)?;
            Ok(Outcome::Ok(write_tensor_json(&sig, &meta(&p, &cfg))))
        }
        Command::Logsig { file } => {
            let p = load_csv(file.as_deref(), stdin)?;
            let log = window_signature(&p, &cfg)?.log()?;
            Ok(Outcome::Ok(write_tensor_json(&log, &meta(&p, &cfg))))
        }
        Command::Dist { first, second } => {
            let a = load_signature(first, &cfg, stdin)?;
            let b = load_signature(second, &cfg, stdin)?;
            let rho = a.rho_metric(&b)?;
            Ok(Outcome::Ok(format!(
                "{{\"depth\":{},\"rho\":{}}}",
                cfg.depth,
                format_number(rho)
            )))
        }
        Command::Levy { file } => {
            let p = load_csv(file.as_deref(), stdin)?;
            let area = match cfg.interval {
                None => levy_area(&p.path)?,
                Some((s, t)) => {
                    let d = p.path.d();
                    if d < 2 {
                        return Err(Error::DimensionMismatch("Lévy area needs d ≥ 2".into()));
                    }
                    let sig = path_signature(&p.path, 2, &s, &t)?;
                    let l = sig.level(2);
                    (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|j| (l[i * d + j] - l[j * d + i]) / 2.0)
                                .collect()
                        })
                        .collect()
                }
            };
            Ok(Outcome::Ok(json!({ "levy_area": area }).to_string()))
        }
        Command::Young {
            integrand,
            integrator,
            refine,
            beta,
        } => {
            let y = load_csv(Some(integrand), stdin)?;
            let x = load_csv(Some(integrator), stdin)?;
            let exponents = match (cfg.alpha, *beta) {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => return Err(Error::Regularity("declare both --alpha and --beta".into())),
            };
            let opts = YoungOptions {
                refine: *refine,
                exponents,
                strict: cfg.strict,
            };
            let r = young_integral(&y.path, &x.path, &opts)?;
            Ok(Outcome::Ok(
                json!({
                    "value": r.value,
                    "refine": refine,
                    "condition_met": r.condition_met,
                })
                .to_string(),
            ))
        }
        Command::CheckChen { file } => {
            let p = load_csv(file.as_deref(), stdin)?;
            count_entries(p.path.d(), cfg.depth, cfg.cap, "tensor")?;
            let sp = signature_path(&p.path, cfg.depth)?;
            let r = is_multiplicative(&sp, cfg.tol)?;
            let body = json!({
                "check": "chen",
                "pass": r.passed,
                "triples_checked": r.triples_checked,
                "worst": r.worst.map(|w| json!({ "triple": [w.triple.0, w.triple.1, w.triple.2], "residual": w.residual })),
            })
            .to_string();
            Ok(if r.passed {
                Outcome::Ok(body)
            } else {
                Outcome::CheckFailed(body)
            })
        }
        Command::CheckShuffle { file } => {
            let p = load_csv(file.as_deref(), stdin)?;
            let sig = window_signature(&p, &cfg)?;
            let r = is_grouplike(&sig, cfg.tol)?;
            let body = json!({
                "check": "shuffle",
                "pass": r.passed,
                "pairs_checked": r.pairs_checked,
                "worst": r.worst.map(|w| w.triple()),
            })
            .to_string();
            Ok(if r.passed {
                Outcome::Ok(body)
            } else {
                Outcome::CheckFailed(body)
            })
        }
        Command::Holder { file } => {
            let alpha = cfg.alpha()?;
            let p = load_csv(file.as_deref(), stdin)?;
            count_entries(p.path.d(), cfg.depth, cfg.cap, "tensor")?;
            let norm = holder_norm(&p.path, alpha)?;
            let sp = signature_path(&p.path, cfg.depth)?;
            let report = holder_report(&sp, alpha, cfg.tol)?;
            Ok(Outcome::Ok(
                json!({
                    "alpha": alpha,
                    "holder_norm": norm,
                    "report": report,
                    "time_span": [p.time_span.0, p.time_span.1],
                })
                .to_string(),
            ))
        }
        Command::DepthForAlpha => Ok(Outcome::Ok(minimal_depth(cfg.alpha()?)?.to_string())),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(Outcome::Ok(body)) => {
            let _ = writeln!(stdout, "{body}");
            EXIT_OK
        }
        Ok(Outcome::CheckFailed(body)) => {
            let _ = writeln!(stdout, "{body}");
            let _ = writeln!(stderr, "check failed");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}
