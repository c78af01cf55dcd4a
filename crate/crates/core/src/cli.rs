//! Command-line front end: argument parsing, table assembly and exit codes.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Rational};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::painleve::{beta_half_closed_form, dp2_reduce, PrecisionPolicy};
use crate::params::{parse_mix, parse_rational, FamilyParams, Lattice, Mix};
use crate::precision::{pow10, to_decimal, PrecisionContext, Real};
use crate::verify::{
    b0_scan, check_monotone, cross_pipeline, divergence_index, oracle_basis, verify_suite, Check, AGREEMENT_EXP,
};

#[derive(Debug, Parser)]
#[command(name = "bilattice", version, about = "Recurrence coefficients of generalized Charlier and Meixner polynomials on ℕ, ℕ+1-β and their union")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table from both pipelines with their differences.
    Coeffs(CommonArgs),
    /// Every applicable identity and cross-check, one row per check.
    Verify(VerifyArgs),
    /// b0(t) on a grid of mixing parameters, checked for monotonicity.
    #[command(name = "b0-scan")]
    B0Scan(ScanArgs),
    /// β = 1/2 closed form or β = 1 dP-II reduction tables.
    Special(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Charlier,
    Meixner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    Plain,
    Shifted,
    Bi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Exact rational or decimal, e.g. 3 or 0.5.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Exact rational or decimal, e.g. 1/3.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,
    /// Meixner only.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Defaults to plain (bi with t = 1 for the β = 1/2 table).
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeArg>,
    /// Mixing parameter of the bi-lattice; `inf` selects the shifted measure alone.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Highest index N.
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Decimal digits for the oracle; the iteration uses at least this many.
    #[arg(long, default_value_t = 60)]
    pub digits: u32,
    /// Relative series and truncation tolerance.
    #[arg(long)]
    pub tail_eps: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits printed per number.
    #[arg(long, default_value_t = 40)]
    pub print_digits: usize,
    /// Iteration precision is base + per-index · N digits.
    #[arg(long, default_value_t = 60)]
    pub base_digits: u32,
    #[arg(long, default_value_t = 12)]
    pub digits_per_index: u32,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Shift b0 by this amount and report where the iteration leaves the oracle.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb_b0: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated mixing parameters.
    #[arg(long, default_value = "0,0.1,1,10,100,inf")]
    pub t_grid: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical breakdown, 1 for failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Validity(_) | Error::Parse { .. } | Error::Pole(_) | Error::Length { .. } => 2,
                Error::Singularity { .. }
                | Error::Rank { .. }
                | Error::ZeroCount { .. }
                | Error::Precision(_)
                | Error::Degenerate(_) => 3,
                Error::Monotonicity { .. } => 1,
            },
        }
    }
}

/// Parsed and validated inputs shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: FamilyParams,
    pub lattice: Lattice,
    pub n: usize,
    pub ctx: PrecisionContext,
    pub policy: PrecisionPolicy,
    pub format: Format,
    pub print_digits: usize,
    echo: ConfigEcho,
}

#[derive(Debug, Clone, Serialize)]
struct ConfigEcho {
    family: String,
    a: String,
    beta: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<String>,
    lattice: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    n: usize,
    digits: u32,
    tail_eps: String,
    base_digits: u32,
    digits_per_index: u32,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs, default_lattice: Lattice) -> Result<Self, CliError> {
        let a = parse_rational(&args.a)?;
        let beta = parse_rational(&args.beta)?;
        let params = match (args.family, &args.gamma) {
            (FamilyArg::Charlier, None) => FamilyParams::charlier(a, beta),
            (FamilyArg::Charlier, Some(_)) => return Err(CliError::Usage("--gamma applies only to --family meixner".into())),
            (FamilyArg::Meixner, Some(g)) => FamilyParams::meixner(a, beta, parse_rational(g)?),
            (FamilyArg::Meixner, None) => return Err(CliError::Usage("--family meixner needs --gamma".into())),
        };
        let lattice = match (args.lattice, &args.t) {
            (None, None) => default_lattice,
            (None, Some(_)) | (Some(LatticeArg::Plain), Some(_)) | (Some(LatticeArg::Shifted), Some(_)) => {
                return Err(CliError::Usage("--t applies only to --lattice bi".into()))
            }
            (Some(LatticeArg::Plain), None) => Lattice::Plain,
            (Some(LatticeArg::Shifted), None) => Lattice::Shifted,
            (Some(LatticeArg::Bi), None) => return Err(CliError::Usage("--lattice bi needs --t".into())),
            (Some(LatticeArg::Bi), Some(t)) => Lattice::Bi(parse_mix(t)?),
        };
        params.validate(&lattice)?;
        if args.n == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        let mut ctx = PrecisionContext::new(args.digits)?;
        if let Some(eps) = &args.tail_eps {
            let q = parse_rational(eps)?;
            ctx = ctx.clone().with_tail_eps(ctx.rational(&q))?;
        }
        let policy = PrecisionPolicy {
            base_digits: args.base_digits,
            digits_per_index: args.digits_per_index,
        };
        let echo = ConfigEcho {
            family: params.family.to_string(),
            a: params.a.to_string(),
            beta: params.beta.to_string(),
            gamma: params.gamma.as_ref().map(|g| g.to_string()),
            lattice: lattice.kind().to_string(),
            t: match &lattice {
                Lattice::Bi(t) => Some(t.to_string()),
                _ => None,
            },
            n: args.n,
            digits: args.digits,
            tail_eps: to_decimal(ctx.tail_eps(), 6),
            base_digits: args.base_digits,
            digits_per_index: args.digits_per_index,
        };
        Ok(RunConfig {
            params,
            lattice,
            n: args.n,
            ctx,
            policy,
            format: args.format,
            print_digits: args.print_digits,
            echo,
        })
    }

    fn num(&self, x: &Real) -> String {
        to_decimal(x, self.print_digits)
    }
}

/// What a subcommand produced: the document to write, whether every check
/// passed, and a one-line summary for standard error.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: String,
    pub passed: bool,
    pub summary: String,
}

/// Column-oriented table rendered as CSV or as JSON arrays next to the config echo.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn json_columns(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut m = serde_json::Map::new();
        for (i, c) in self.columns.iter().enumerate() {
            let col: Vec<serde_json::Value> = self.rows.iter().map(|r| json!(r[i])).collect();
            m.insert((*c).to_string(), serde_json::Value::Array(col));
        }
        m
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn render(cfg: &RunConfig, table: &Table, extra: serde_json::Value) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => table.csv(),
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("config".into(), serde_json::to_value(&cfg.echo).expect("echo serializes"));
            if let serde_json::Value::Object(m) = extra {
                doc.extend(m);
            }
            doc.insert("columns".into(), serde_json::Value::Object(table.json_columns()));
            let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json serializes");
            s.push('\n');
            Ok(s)
        }
    }
}

fn abs_diff(x: &Real, y: &Real) -> Real {
    Float::with_val(x.prec().max(y.prec()), x - y).abs()
}

pub fn cmd_coeffs(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cross = cross_pipeline(&cfg.params, &cfg.lattice, cfg.n, None, cfg.policy, &cfg.ctx)?;
    let p = &cross.painleve.run.coeffs;
    let o = &cross.oracle.coeffs;
    let mut t = Table::new(vec![
        "n",
        "a_sq_painleve",
        "b_painleve",
        "a_sq_oracle",
        "b_oracle",
        "abs_diff_a_sq",
        "abs_diff_b",
    ]);
    for k in 0..=cfg.n {
        t.push(vec![
            k.to_string(),
            cfg.num(&p.a_sq[k]),
            cfg.num(&p.b[k]),
            cfg.num(&o.a_sq[k]),
            cfg.num(&o.b[k]),
            to_decimal(&abs_diff(&p.a_sq[k], &o.a_sq[k]), 6),
            to_decimal(&abs_diff(&p.b[k], &o.b[k]), 6),
        ]);
    }
    let certified = cross.painleve.certified_through;
    let within = |k: usize| certified.is_some_and(|c| k <= c);
    let bad = cross.first_divergence.filter(|&k| within(k));
    let passed = bad.is_none() && cross.painleve.is_fully_certified();
    let certified_str = certified.map_or_else(|| "none".to_string(), |c| c.to_string());
    let extra = json!({
        "painleve_digits": cross.painleve.digits,
        "certified_through": certified,
        "first_divergence": cross.first_divergence,
        "b0": cfg.num(&cross.painleve.run.b0),
        "passed": passed,
    });
    let summary = match bad {
        Some(k) => format!("FAIL: pipelines differ by more than 1e{AGREEMENT_EXP} at n = {k}"),
        None if passed => format!(
            "ok: pipelines agree to 1e{AGREEMENT_EXP} for n ≤ {}, iteration at {} digits",
            cfg.n, cross.painleve.digits
        ),
        None => format!("FAIL: iteration certified only through n = {certified_str}"),
    };
    Ok(Outcome {
        document: render(cfg, &t, extra)?,
        passed,
        summary,
    })
}

fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec!["check", "passed", "residual", "tolerance", "note"]);
    for c in checks {
        t.push(vec![
            c.name.clone(),
            c.passed.to_string(),
            c.residual.clone(),
            c.tolerance.clone(),
            c.note.clone().unwrap_or_default(),
        ]);
    }
    t
}

pub fn cmd_verify(cfg: &RunConfig, perturb: Option<&Rational>) -> Result<Outcome, CliError> {
    if let Some(shift) = perturb {
        let cross = cross_pipeline(&cfg.params, &cfg.lattice, cfg.n, Some(shift), cfg.policy, &cfg.ctx)?;
        let rounded = cross.painleve.run.coeffs.rounded(&cfg.ctx);
        let gross = divergence_index(&rounded, &cross.oracle.coeffs, &cfg.ctx.one());
        let fmt = |k: Option<usize>| k.map_or_else(|| "none".to_string(), |k| k.to_string());
        let check = Check {
            name: format!("Painlevé (b0 + {shift}) = Stieltjes oracle"),
            passed: cross.first_divergence.is_none(),
            residual: to_decimal(&cross.diff.max(), 6),
            tolerance: to_decimal(&pow10(cfg.ctx.bits(), AGREEMENT_EXP), 3),
            note: Some(format!(
                "first |Δ| > 1e{AGREEMENT_EXP} at n = {}; first |Δ| ≥ 1 at n = {}",
                fmt(cross.first_divergence),
                fmt(gross)
            )),
        };
        let passed = check.passed;
        let summary = format!(
            "{}: perturbed b0 diverges at n = {}, grossly at n = {}",
            if passed { "ok" } else { "FAIL" },
            fmt(cross.first_divergence),
            fmt(gross)
        );
        let extra = json!({
            "passed": passed,
            "first_divergence": cross.first_divergence,
            "gross_divergence": gross,
        });
        return Ok(Outcome {
            document: render(cfg, &checks_table(&[check]), extra)?,
            passed,
            summary,
        });
    }
    let report = verify_suite(&cfg.params, &cfg.lattice, cfg.n, cfg.policy, &cfg.ctx)?;
    let passed = report.passed();
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let summary = if passed {
        format!("ok: {} checks passed", report.checks.len())
    } else {
        format!("FAIL: {}", failed.join("; "))
    };
    let extra = json!({ "passed": passed, "painleve_digits": report.painleve_digits });
    Ok(Outcome {
        document: render(cfg, &checks_table(&report.checks), extra)?,
        passed,
        summary,
    })
}

pub fn parse_grid(s: &str) -> Result<Vec<Mix>, CliError> {
    let grid: Vec<Mix> = s.split(',').map(|t| parse_mix(t.trim())).collect::<Result<_, _>>()?;
    if grid.len() < 2 {
        return Err(CliError::Usage("--t-grid needs at least two values".into()));
    }
    Ok(grid)
}

pub fn cmd_b0_scan(cfg: &RunConfig, grid: &[Mix]) -> Result<Outcome, CliError> {
    let values = b0_scan(&cfg.params, grid, &cfg.ctx)?;
    let mut t = Table::new(vec!["t", "b0"]);
    for (m, v) in grid.iter().zip(&values) {
        t.push(vec![m.to_string(), cfg.num(v)]);
    }
    let verdict = check_monotone(&cfg.params.beta, grid, &values);
    let passed = verdict.is_ok();
    let direction = if cfg.params.beta == 1 {
        "constant"
    } else if cfg.params.beta < 1 {
        "increasing"
    } else {
        "decreasing"
    };
    let summary = match &verdict {
        Ok(()) => format!("ok: b0(t) {direction} on the grid"),
        Err(e) => format!("FAIL: {e}"),
    };
    let extra = json!({ "passed": passed, "direction": direction });
    Ok(Outcome {
        document: render(cfg, &t, extra)?,
        passed,
        summary,
    })
}

pub fn cmd_special(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.params.is_meixner() {
        return Err(CliError::Usage("special tables exist for --family charlier only".into()));
    }
    let half = Rational::from((1, 2));
    let tol = pow10(cfg.ctx.bits(), AGREEMENT_EXP);
    if cfg.params.beta == half {
        if cfg.lattice != Lattice::Bi(Mix::Finite(Rational::from(1))) {
            return Err(CliError::Usage("the β = 1/2 closed form holds on --lattice bi --t 1".into()));
        }
        let cross = cross_pipeline(&cfg.params, &cfg.lattice, cfg.n, None, cfg.policy, &cfg.ctx)?;
        let a = cfg.params.a_real(&cfg.ctx);
        let mut t = Table::new(vec![
            "n",
            "a_sq_closed",
            "b_closed",
            "a_sq_painleve",
            "b_painleve",
            "a_sq_oracle",
            "b_oracle",
        ]);
        let mut worst = cfg.ctx.zero();
        for k in 0..=cfg.n {
            let (s, b) = beta_half_closed_form(&a, k);
            let p = &cross.painleve.run.coeffs;
            let o = &cross.oracle.coeffs;
            for d in [
                abs_diff(&p.a_sq[k], &s),
                abs_diff(&p.b[k], &b),
                abs_diff(&o.a_sq[k], &s),
                abs_diff(&o.b[k], &b),
            ] {
                worst.max_mut(&d);
            }
            t.push(vec![
                k.to_string(),
                cfg.num(&s),
                cfg.num(&b),
                cfg.num(&p.a_sq[k]),
                cfg.num(&p.b[k]),
                cfg.num(&o.a_sq[k]),
                cfg.num(&o.b[k]),
            ]);
        }
        let passed = worst < tol && cross.painleve.is_fully_certified();
        let summary = format!(
            "{}: both pipelines within {} of the closed form",
            if passed { "ok" } else { "FAIL" },
            to_decimal(&worst, 3)
        );
        let extra = json!({ "passed": passed, "max_abs_diff": to_decimal(&worst, 6) });
        return Ok(Outcome {
            document: render(cfg, &t, extra)?,
            passed,
            summary,
        });
    }
    if cfg.params.beta == 1 {
        let digits = cfg.policy.digits_for(cfg.n, cfg.ctx.digits());
        let pctx = cfg.ctx.with_digits(digits)?;
        let b0 = crate::measures::b0_initial(&cfg.params, &cfg.lattice, &pctx)?;
        let a = cfg.params.a_real(&pctx);
        let dp2 = dp2_reduce(&a, &b0, cfg.n, &pctx)?;
        let mut t = Table::new(vec!["n", "c", "dp2_residual", "b_residual"]);
        let mut worst = cfg.ctx.zero();
        for k in 0..=cfg.n {
            let res = if k >= 1 && k < cfg.n { Some(&dp2.residuals[k - 1]) } else { None };
            let bres = dp2.b_residuals.get(k);
            for r in res.into_iter().chain(bres) {
                worst.max_mut(&Float::with_val(r.prec(), r.abs_ref()));
            }
            t.push(vec![
                k.to_string(),
                cfg.num(&dp2.c[k]),
                res.map(|r| to_decimal(r, 6)).unwrap_or_default(),
                bres.map(|r| to_decimal(r, 6)).unwrap_or_default(),
            ]);
        }
        let inside = dp2.c[1..].iter().all(|c| Float::with_val(c.prec(), c.abs_ref()) < 1);
        let mut passed = worst < tol && inside;
        let mut notes = vec![format!("max residual {}", to_decimal(&worst, 3))];
        if let Lattice::Bi(_) = cfg.lattice {
            let (_, bi) = oracle_basis(&cfg.params, &cfg.lattice, cfg.n, &cfg.ctx)?;
            let (_, plain) = oracle_basis(&cfg.params, &Lattice::Plain, cfg.n, &cfg.ctx)?;
            let d = crate::painleve::compare_coeffs(&bi.coeffs, &plain.coeffs)?.max();
            passed &= d < tol;
            notes.push(format!("bi-lattice vs plain oracle {}", to_decimal(&d, 3)));
        }
        let summary = format!("{}: dP-II reduction, {}", if passed { "ok" } else { "FAIL" }, notes.join(", "));
        let extra = json!({ "passed": passed, "painleve_digits": digits });
        return Ok(Outcome {
            document: render(cfg, &t, extra)?,
            passed,
            summary,
        });
    }
    Err(CliError::Usage("special tables need β = 1/2 (closed form) or β = 1 (dP-II)".into()))
}

/// Runs a parsed command line and returns its outcome with the output path.
pub fn execute(cli: &Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    match &cli.command {
        Command::Coeffs(args) => {
            let cfg = RunConfig::from_args(args, Lattice::Plain)?;
            Ok((cmd_coeffs(&cfg)?, args.out.clone()))
        }
        Command::Verify(v) => {
            let cfg = RunConfig::from_args(&v.common, Lattice::Plain)?;
            let shift = v.perturb_b0.as_deref().map(parse_rational).transpose()?;
            Ok((cmd_verify(&cfg, shift.as_ref())?, v.common.out.clone()))
        }
        Command::B0Scan(s) => {
            if s.common.lattice.is_some_and(|l| l != LatticeArg::Bi) || s.common.t.is_some() {
                return Err(CliError::Usage("b0-scan always uses the bi-lattice; give --t-grid instead of --lattice/--t".into()));
            }
            let grid = parse_grid(&s.t_grid)?;
            let mut cfg = None;
            for t in &grid {
                cfg = Some(RunConfig::from_args(&s.common, Lattice::Bi(t.clone()))?);
            }
            let mut cfg = cfg.expect("grid is nonempty");
            cfg.echo.t = Some(s.t_grid.clone());
            Ok((cmd_b0_scan(&cfg, &grid)?, s.common.out.clone()))
        }
        Command::Special(args) => {
            let default = match parse_rational(&args.beta) {
                Ok(b) if b == Rational::from((1, 2)) => Lattice::Bi(Mix::Finite(Rational::from(1))),
                _ => Lattice::Plain,
            };
            let cfg = RunConfig::from_args(args, default)?;
            Ok((cmd_special(&cfg)?, args.out.clone()))
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok((outcome, out)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, outcome.document.as_bytes()),
                None => std::io::stdout().write_all(outcome.document.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            eprintln!("{}", outcome.summary);
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
