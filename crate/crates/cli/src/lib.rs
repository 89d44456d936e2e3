//! Command-line front end: expression evaluation, dimension tables,
//! verification suites and the coefficient cache.

pub mod cache;
pub mod expr;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use c2bordism_core::context::C2Context;
use c2bordism_core::equivariant::{
    dim_image, dim_presented, gamma_underlying_series, homotopy_fixed,
};
use c2bordism_core::extended::{ext_phi, ext_restrict};
use c2bordism_core::formal_group::{CheckReport, FglContext};
use c2bordism_core::kernel::ESeries;
use c2bordism_core::omega::thom_dimension;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cache::CacheError;
use crate::expr::{EvalError, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "c2bordism",
    version,
    about = "Exact computations in C2-equivariant unoriented cobordism"
)]
pub struct Cli {
    /// Truncation degree N.
    #[arg(long, global = true, default_value_t = 10)]
    pub truncation: u32,
    /// e-window K for fixed-point series (default N + 2).
    #[arg(long, global = true)]
    pub window: Option<u32>,
    /// Coefficient cache to read, or to create when missing.
    #[arg(long, global = true, env = "C2BORDISM_CACHE")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ring {
    Omega,
    Phi,
    C2,
    Ext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Fgl,
    Omega,
    Tate,
    Relations,
    Completeness,
    Extended,
    Sw,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Per-degree dimensions of a ring.
    Table {
        #[arg(long, value_enum)]
        ring: Ring,
        #[arg(long)]
        max_degree: u32,
        /// Power of sigma for the extended ring.
        #[arg(long, default_value_t = 0)]
        sigma_weight: u32,
    },
    /// Evaluates a class expression.
    Eval {
        expr: String,
        /// normal | phi | restrict | hfp [K] | gamma-series [K]
        #[arg(long, num_args = 1..=2, value_names = ["VIEW", "K"], default_values = ["normal"])]
        show: Vec<String>,
    },
    /// Runs verification suites; exits 2 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Writes or reads a coefficient cache file.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    Save { path: PathBuf },
    Load { path: PathBuf },
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<c2bordism_core::Error> for Failure {
    fn from(e: c2bordism_core::Error) -> Self {
        use c2bordism_core::Error as E;
        let code = match e {
            E::TruncationExceeded(_) | E::WindowInsufficient { .. } => EXIT_TRUNCATION,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Core(c) => c.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Core(c) => c.into(),
            EvalError::Type(m) => Failure::input(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

struct Session<'a, W: Write> {
    cli: &'a Cli,
    window: u32,
    out: &'a mut W,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code; reports go to `out`, errors to `err`.
pub fn run<I, S, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_INPUT,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let window = cli.window.unwrap_or(cli.truncation + 2);
    let mut session = Session {
        cli: &cli,
        window,
        out,
    };
    match session.dispatch() {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Builds the tables for truncation `n` and window `window`.
pub fn build_fgl(n: u32, window: u32) -> c2bordism_core::Result<FglContext> {
    FglContext::build_fgl(n)?.with_c_table(window as i32)
}

impl<W: Write> Session<'_, W> {
    fn dispatch(&mut self) -> Result<i32, Failure> {
        match &self.cli.command {
            Command::Table {
                ring,
                max_degree,
                sigma_weight,
            } => self.table(*ring, *max_degree, *sigma_weight),
            Command::Eval { expr, show } => self.eval(expr, show),
            Command::Verify { suite, max_degree } => self.verify(*suite, *max_degree),
            Command::Cache { action } => self.cache(action),
        }
    }

    /// Tables from the cache when it covers the truncation, otherwise a fresh build
    /// (written back when the cache was missing or smaller). `validated = false` keeps
    /// invalid cached tables so that `verify` can report on them.
    fn fgl(&mut self, validated: bool) -> Result<FglContext, Failure> {
        let n = self.cli.truncation;
        let Some(path) = self.cli.cache.clone() else {
            return Ok(build_fgl(n, self.window)?);
        };
        if path.exists() {
            let cached = if validated {
                cache::load(&path)?
            } else {
                cache::load_unchecked(&path)?
            };
            if cached.n() == n && cached.c_window().unwrap_or(0) >= self.window as i32 {
                return Ok(cached);
            }
            let fresh = build_fgl(n, self.window)?;
            if cached.n() < n {
                cache::save(&fresh, &path)?;
            }
            return Ok(fresh);
        }
        let fresh = build_fgl(n, self.window)?;
        cache::save(&fresh, &path)?;
        Ok(fresh)
    }

    fn context(&mut self) -> Result<C2Context, Failure> {
        Ok(C2Context::new(self.fgl(true)?)?)
    }

    fn check_degree(&self, max_degree: u32) -> Result<(), Failure> {
        if max_degree > self.cli.truncation {
            return Err(Failure {
                code: EXIT_TRUNCATION,
                message: format!(
                    "max degree {max_degree} exceeds the truncation {}",
                    self.cli.truncation
                ),
            });
        }
        Ok(())
    }

    fn json(&mut self, v: serde_json::Value) -> Result<(), Failure> {
        writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(&v).expect("serializable")
        )?;
        Ok(())
    }

    fn table(&mut self, ring: Ring, max_degree: u32, s: u32) -> Result<i32, Failure> {
        self.check_degree(max_degree)?;
        let ctx = self.context()?;
        let om = ctx.omega();
        let mut rows = Vec::new();
        for n in 0..=max_degree {
            let row = match ring {
                Ring::Omega => json!({"degree": n, "dim": om.dim(n)}),
                Ring::Phi => {
                    // Omega_a times monomials in d0, d1, ... of degree n - a (|d_i| = i + 1).
                    let dim: u64 = (0..=n)
                        .map(|a| {
                            thom_dimension(a)
                                * c2bordism_core::omega::partition_count(n - a, |_| false)
                        })
                        .sum();
                    json!({"degree": n, "dim": dim})
                }
                Ring::C2 => {
                    let p = dim_presented(&ctx, n as i64)?;
                    let i = dim_image(&ctx, n as i64)?;
                    json!({"degree": n, "presented": p, "image": i, "match": p == i})
                }
                Ring::Ext => {
                    let mut dim = dim_image(&ctx, n as i64)?;
                    for j in 0..s {
                        let d = n as i64 - (s - j) as i64;
                        if d >= 0 {
                            dim += om.dim(d as u32);
                        }
                    }
                    json!({"degree": n, "sigma_weight": s, "dim": dim})
                }
            };
            rows.push(row);
        }
        if self.cli.format == Format::Json {
            self.json(json!({"ring": format!("{ring:?}").to_lowercase(), "rows": rows}))?;
            return Ok(EXIT_OK);
        }
        for row in &rows {
            let line = match ring {
                Ring::C2 => format!(
                    "{} {} {} match={}",
                    row["degree"], row["presented"], row["image"], row["match"]
                ),
                _ => format!("{} {}", row["degree"], row["dim"]),
            };
            writeln!(self.out, "{line}")?;
        }
        Ok(EXIT_OK)
    }

    fn eval(&mut self, text: &str, show: &[String]) -> Result<i32, Failure> {
        let ast = expr::parse(text)
            .map_err(|e| Failure::input(format!("{e}\n  {text}\n  {}^", " ".repeat(e.pos))))?;
        let view = show.first().map(String::as_str).unwrap_or("normal");
        let k = match show.get(1) {
            Some(s) => s.parse::<u32>().map_err(|_| {
                Failure::input(format!("window `{s}` is not a nonnegative integer"))
            })?,
            None => self.window,
        };
        if show.len() > 1 && !matches!(view, "hfp" | "gamma-series") {
            return Err(Failure::input(format!("view `{view}` takes no window")));
        }
        let ctx = self.context()?;
        let value = expr::evaluate(&ctx, &ast)?;
        let bare = |v: &Value| -> Result<Option<c2bordism_core::equivariant::EqClass>, Failure> {
            match v {
                Value::Zero => Ok(None),
                Value::Class(c) if c.sigma_weight() == 0 => Ok(Some(c.m().clone())),
                Value::Class(_) => Err(Failure::input(format!(
                    "view `{view}` needs a class without a or u"
                ))),
            }
        };
        let lines: Vec<String> = match view {
            "normal" => vec![value.render()],
            "phi" => vec![match &value {
                Value::Zero => "0".into(),
                Value::Class(c) => ext_phi(&ctx, c)?.to_string(),
            }],
            "restrict" => vec![match &value {
                Value::Zero => "0".into(),
                Value::Class(c) => {
                    let (p, s) = ext_restrict(&ctx, c)?;
                    match s {
                        _ if p.is_zero() => "0".into(),
                        0 => p.to_string(),
                        _ => {
                            let u = if s == 1 {
                                "u".to_string()
                            } else {
                                format!("u^{s}")
                            };
                            if p.is_one() {
                                u
                            } else if p.len() > 1 {
                                format!("({p})*{u}")
                            } else {
                                format!("{p}*{u}")
                            }
                        }
                    }
                }
            }],
            "hfp" => vec![match bare(&value)? {
                None => "0".into(),
                Some(m) => render_series(&homotopy_fixed(&ctx, &m, k)?),
            }],
            "gamma-series" => match bare(&value)? {
                None => vec!["0: 0".into()],
                Some(m) => gamma_underlying_series(&ctx, &m, k)?
                    .iter()
                    .enumerate()
                    .map(|(n, p)| format!("{n}: {p}"))
                    .collect(),
            },
            other => {
                return Err(Failure::input(format!(
                    "unknown view `{other}` (normal, phi, restrict, hfp, gamma-series)"
                )))
            }
        };
        if self.cli.format == Format::Json {
            self.json(json!({"expr": ast.to_string(), "view": view, "result": lines}))?;
        } else {
            for l in lines {
                writeln!(self.out, "{l}")?;
            }
        }
        Ok(EXIT_OK)
    }

    fn verify(&mut self, suite: Suite, max_degree: Option<u32>) -> Result<i32, Failure> {
        let max = max_degree.unwrap_or(self.cli.truncation);
        self.check_degree(max)?;
        let fgl = self.fgl(false)?;
        let mut reports: Vec<(&str, CheckReport)> = Vec::new();
        let all = suite == Suite::All;
        if all || suite == Suite::Fgl {
            reports.push(("fgl", verify::fgl(&fgl, max)?));
        }
        if all || suite == Suite::Omega {
            reports.push(("omega", verify::omega(&fgl, max)));
        }
        let needs_ctx = all || !matches!(suite, Suite::Fgl | Suite::Omega);
        if needs_ctx {
            let ctx = match C2Context::new(fgl) {
                Ok(c) => c,
                Err(e) => {
                    let mut r = CheckReport::default();
                    r.push("equivariant context", false, e.to_string());
                    reports.push(("context", r));
                    return self.report(&reports);
                }
            };
            if all || suite == Suite::Tate {
                reports.push(("tate", verify::tate(&ctx, max.min(8), self.window)?));
                reports.push(("tate", verify::e_regular(&ctx, max.min(8), self.window)?));
            }
            if all || suite == Suite::Relations {
                reports.push(("relations", verify::relations_killed(&ctx)?));
            }
            if all || suite == Suite::Completeness {
                reports.push(("completeness", verify::completeness(&ctx, max)?));
            }
            if all || suite == Suite::Extended {
                reports.push(("extended", verify::extended(&ctx, max, 1)?));
            }
            if all || suite == Suite::Sw {
                reports.push(("sw", verify::stiefel_whitney(&ctx)?));
            }
        }
        self.report(&reports)
    }

    fn report(&mut self, reports: &[(&str, CheckReport)]) -> Result<i32, Failure> {
        let passed = reports.iter().all(|(_, r)| r.passed());
        if self.cli.format == Format::Json {
            let checks: Vec<_> = reports
                .iter()
                .flat_map(|(suite, r)| {
                    r.checks.iter().map(move |c| {
                        json!({"suite": suite, "check": c.name, "passed": c.passed, "detail": c.detail})
                    })
                })
                .collect();
            self.json(json!({"passed": passed, "checks": checks}))?;
        } else {
            for (suite, r) in reports {
                for c in &r.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    if c.detail.is_empty() {
                        writeln!(self.out, "[{tag}] {suite}: {}", c.name)?;
                    } else {
                        writeln!(self.out, "[{tag}] {suite}: {} ({})", c.name, c.detail)?;
                    }
                }
            }
        }
        Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
    }

    fn cache(&mut self, action: &CacheAction) -> Result<i32, Failure> {
        match action {
            CacheAction::Save { path } => {
                let fgl = build_fgl(self.cli.truncation, self.window)?;
                cache::save(&fgl, path)?;
                writeln!(
                    self.out,
                    "saved N={} window={} to {}",
                    fgl.n(),
                    self.window,
                    path.display()
                )?;
            }
            CacheAction::Load { path } => {
                let fgl = cache::load(path)?;
                writeln!(
                    self.out,
                    "loaded N={} window={}: {} a-records, {} c-records",
                    fgl.n(),
                    fgl.c_window().unwrap_or(0),
                    fgl.a_table().len(),
                    fgl.c_table().len()
                )?;
            }
        }
        Ok(EXIT_OK)
    }
}

fn render_series(s: &ESeries) -> String {
    let mut parts = Vec::new();
    for (j, c) in s.terms() {
        let coeff = if c.len() > 1 {
            format!("({c})")
        } else {
            c.to_string()
        };
        parts.push(match (j, coeff.as_str()) {
            (0, _) => coeff.clone(),
            (1, "1") => "e".into(),
            (_, "1") => format!("e^{j}"),
            (1, _) => format!("{coeff}*e"),
            _ => format!("{coeff}*e^{j}"),
        });
    }
    let body = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    };
    format!("{body} + O(e^{})", s.window().1 + 1)
}
