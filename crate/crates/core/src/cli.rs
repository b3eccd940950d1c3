//! Command-line front end. Every subcommand builds a full table first and only
//! then writes it, so a failure never leaves a partial row behind.

use std::io::{self, Write};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::asymptotics::{
    dlogq_ds_asymptotic, dlogq_dt_asymptotic, kpz_tail_bracket, log_q_asymptotic,
    log_q_expansion_fixed_t, naive_estimate, tw_tail_expansion, AsymptoticBreakdown,
};
use crate::equilibrium::{lambda0_asymptotic, psi, solve_lambda0};
use crate::error::{Error, Result};
use crate::fredholm::{
    convergence_scan, default_step, dlog_q_ds, dlog_q_dt, log_q, log_q_value, tracy_widom_log_cdf,
    FredholmResult, MIN_ORDER,
};
use crate::kernels::{KernelRep, Params};
use crate::numerics::Precision;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const ENDPOINT_TOL: f64 = 1e-14;
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// log Q(s,T) from the Fredholm determinant
    Q,
    /// log F_TW(-s) and its tail expansion
    Tw,
    /// endpoint lambda0 against its closed form
    Endpoint,
    /// equilibrium density psi on a lambda grid
    Density,
    /// closed-form asymptotics, term by term, with numeric derivatives
    Asym,
    /// numeric log Q against the six-term expansion over an s grid
    Compare,
    /// log Q at increasing orders
    Scan,
    /// lower-tail bracket A <= log P <= B
    Tail,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Command::Q => "q",
            Command::Tw => "tw",
            Command::Endpoint => "endpoint",
            Command::Density => "density",
            Command::Asym => "asym",
            Command::Compare => "compare",
            Command::Scan => "scan",
            Command::Tail => "tail",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum RepChoice {
    #[default]
    Sigma,
    #[value(name = "finite-t")]
    FiniteT,
    Both,
}

impl RepChoice {
    fn reps(self) -> Vec<KernelRep> {
        match self {
            RepChoice::Sigma => vec![KernelRep::SigmaWeighted],
            RepChoice::FiniteT => vec![KernelRep::FiniteTemperature],
            RepChoice::Both => vec![KernelRep::SigmaWeighted, KernelRep::FiniteTemperature],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum PrecisionChoice {
    #[default]
    Standard,
    Extended,
}

impl From<PrecisionChoice> for Precision {
    fn from(p: PrecisionChoice) -> Self {
        match p {
            PrecisionChoice::Standard => Precision::Standard,
            PrecisionChoice::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Evenly spaced points min..=max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

fn parse_grid(text: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected min,max,count, got '{text}'"));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid min '{}'", parts[0]))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid max '{}'", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if !min.is_finite() || !max.is_finite() {
        return Err("grid bounds must be finite".into());
    }
    if count < 2 {
        return Err(format!("grid count must be >= 2, got {count}"));
    }
    if !(min < max) {
        return Err(format!("grid needs min < max, got {min} >= {max}"));
    }
    Ok(Grid { min, max, count })
}

#[derive(Debug, Parser)]
#[command(
    name = "kpztail",
    version,
    about = "Lower-tail numerics for the finite-temperature KPZ one-point law"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long = "T", global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Nystrom order
    #[arg(long, global = true, default_value_t = 80)]
    pub order: usize,
    #[arg(long, global = true, value_enum, default_value_t = RepChoice::Sigma)]
    pub rep: RepChoice,
    #[arg(long, global = true, value_enum, default_value_t = PrecisionChoice::Standard)]
    pub precision: PrecisionChoice,
    /// min,max,count
    #[arg(long, global = true, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// tail bracket exponent slack (default 0.1)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// finite-difference step
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h: Option<f64>,
}

/// Everything a run needs, validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub order: usize,
    pub rep: RepChoice,
    pub precision: PrecisionChoice,
    pub grid: Option<Grid>,
    /// None means the default 0.1
    pub epsilon: Option<f64>,
    pub output_format: OutputFormat,
    pub h: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            s: None,
            t: None,
            order: 80,
            rep: RepChoice::Sigma,
            precision: PrecisionChoice::Standard,
            grid: None,
            epsilon: None,
            output_format: OutputFormat::Csv,
            h: None,
        }
    }

    /// Parse argv (program name first). Help and version come back as clap errors too.
    pub fn from_args<I, A>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = A>,
        A: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args).map(Into::into)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        use Command::*;
        let cmd = self.command.as_str();
        for (name, value) in [("s", self.s), ("T", self.t), ("h", self.h)] {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(format!("--{name} must be finite"));
                }
            }
        }
        if let Some(t) = self.t {
            if !(t > 0.0) {
                return Err(format!("--T must be > 0, got {t}"));
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0) {
                return Err(format!("--h must be > 0, got {h}"));
            }
        }
        if self.order < MIN_ORDER {
            return Err(format!(
                "--order must be >= {MIN_ORDER}, got {}",
                self.order
            ));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(format!("--epsilon must be > 0, got {eps}"));
            }
        }

        let needs_s = matches!(self.command, Q | Endpoint | Density | Asym | Scan | Tail)
            || (self.command == Tw && self.grid.is_none());
        let needs_t = !matches!(self.command, Tw);
        if needs_s && self.s.is_none() {
            return Err(format!("{cmd} requires --s"));
        }
        if needs_t && self.t.is_none() {
            return Err(format!("{cmd} requires --T"));
        }
        if self.command == Compare && self.grid.is_none() {
            return Err("compare requires --grid".into());
        }
        if self.command == Tw && self.t.is_some() {
            return Err("tw does not take --T".into());
        }
        if self.command == Compare && self.s.is_some() {
            return Err("compare takes its s values from --grid, not --s".into());
        }
        if self.command == Tw && self.s.is_some() && self.grid.is_some() {
            return Err("tw takes either --s or --grid, not both".into());
        }
        if self.grid.is_some() && !matches!(self.command, Tw | Density | Compare | Scan) {
            return Err(format!("{cmd} does not take --grid"));
        }
        if self.h.is_some() && self.command != Asym {
            return Err(format!("{cmd} does not take --h"));
        }
        if self.epsilon.is_some() && self.command != Tail {
            return Err(format!("{cmd} does not take --epsilon"));
        }
        if self.rep == RepChoice::Both && matches!(self.command, Compare | Tail | Asym) {
            return Err(format!("{cmd} needs a single --rep"));
        }
        if let Some(s) = self.s {
            if matches!(self.command, Endpoint | Density | Asym) && !(s > 0.0) {
                return Err(format!("{cmd} requires --s > 0, got {s}"));
            }
            if self.command == Tail && !(s > 1.0) {
                return Err(format!("tail requires --s > 1, got {s}"));
            }
        }
        if self.command == Compare {
            if let Some(g) = self.grid {
                if !(g.min > 0.0) {
                    return Err("compare needs a grid of s > 0".into());
                }
            }
        }
        if self.command == Scan {
            if let Some(g) = self.grid {
                let orders = scan_orders(g);
                if orders.iter().any(|&o| o < MIN_ORDER) || orders.windows(2).any(|w| w[1] <= w[0])
                {
                    return Err(format!(
                        "scan grid must give strictly ascending integer orders >= {MIN_ORDER}"
                    ));
                }
            }
        }
        if let (Some(h), Some(t)) = (self.h, self.t) {
            if self.command == Asym && h >= t {
                return Err(format!("--h must be smaller than T = {t}"));
            }
        }
        Ok(())
    }
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            command: c.command,
            s: c.s,
            t: c.t,
            order: c.order,
            rep: c.rep,
            precision: c.precision,
            grid: c.grid,
            epsilon: c.epsilon,
            output_format: c.format,
            h: c.h,
        }
    }
}

fn scan_orders(g: Grid) -> Vec<usize> {
    g.points()
        .iter()
        .map(|x| x.round().max(0.0) as usize)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Text(String),
    Num(f64),
    Int(usize),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Num(x) if x.is_finite() => fmt_num(*x),
            Cell::Num(_) => "null".into(),
            Cell::Int(n) => n.to_string(),
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn text(s: &str) -> Cell {
    Cell::Text(s.to_string())
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        match format {
            OutputFormat::Csv => {
                out.push_str(&self.header.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            OutputFormat::Json => {
                out.push('[');
                for (i, row) in self.rows.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str("\n  {");
                    for (j, (key, cell)) in self.header.iter().zip(row).enumerate() {
                        if j > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&format!("\"{key}\": {}", cell.json()));
                    }
                    out.push('}');
                }
                out.push_str("\n]\n");
            }
        }
        out
    }
}

/// Standard precision first; one retry in extended precision if the spectrum guard trips.
fn with_retry<T, F>(precision: Precision, f: F) -> Result<T>
where
    F: Fn(Precision) -> Result<T>,
{
    match f(precision) {
        Err(Error::SpectrumOutOfRange { .. }) if precision == Precision::Standard => {
            f(Precision::Extended)
        }
        other => other,
    }
}

fn params(s: f64, t: f64) -> Result<Params> {
    Params::new(s, t)
}

fn breakdown_rows(table: &mut Table, formula: &str, b: &AsymptoticBreakdown) {
    for (name, value) in &b.terms {
        table
            .rows
            .push(vec![text(formula), text(name), Cell::Num(*value)]);
    }
    table
        .rows
        .push(vec![text(formula), text("total"), Cell::Num(b.total)]);
}

fn build(cfg: &RunConfig) -> Result<Table> {
    let prec: Precision = cfg.precision.into();
    let order = cfg.order;
    let s = cfg.s.unwrap_or(f64::NAN);
    let t = cfg.t.unwrap_or(f64::NAN);
    match cfg.command {
        Command::Q => {
            let p = params(s, t)?;
            let mut table = Table::new(vec!["rep", "log_q", "order", "error_estimate"]);
            for rep in cfg.rep.reps() {
                let r: FredholmResult = with_retry(prec, |pr| log_q(p, rep, order, pr))?;
                table.rows.push(vec![
                    text(rep.as_str()),
                    Cell::Num(r.log_det),
                    Cell::Int(r.order),
                    Cell::Num(r.error_estimate),
                ]);
            }
            Ok(table)
        }
        Command::Tw => {
            let points = match cfg.grid {
                Some(g) => g.points(),
                None => vec![s],
            };
            let rows: Result<Vec<Vec<Cell>>> = points
                .par_iter()
                .map(|&s| {
                    let value = with_retry(prec, |pr| tracy_widom_log_cdf(-s, order, pr))?;
                    let tail = if s > 0.0 {
                        Cell::Num(tw_tail_expansion(s)?.total)
                    } else {
                        Cell::Num(f64::NAN)
                    };
                    Ok(vec![Cell::Num(s), Cell::Num(value), tail, Cell::Int(order)])
                })
                .collect();
            let mut table = Table::new(vec!["s", "log_f_tw", "tail_expansion", "order"]);
            table.rows = rows?;
            Ok(table)
        }
        Command::Endpoint => {
            let p = params(s, t)?;
            let eq = solve_lambda0(p, ENDPOINT_TOL)?;
            let asym = lambda0_asymptotic(p)?;
            let mut table = Table::new(vec!["lambda0", "residual", "asymptotic", "scaled_error"]);
            table.rows.push(vec![
                Cell::Num(eq.lambda0),
                Cell::Num(eq.residual),
                Cell::Num(asym),
                Cell::Num((eq.lambda0 - asym).abs() * s.powf(2.5)),
            ]);
            Ok(table)
        }
        Command::Density => {
            let p = params(s, t)?;
            let eq = solve_lambda0(p, ENDPOINT_TOL)?;
            let grid = cfg.grid.unwrap_or(Grid {
                min: eq.lambda0 - 4.0,
                max: eq.lambda0 - 0.04,
                count: 50,
            });
            if grid.max >= eq.lambda0 {
                return Err(Error::InvalidInput(format!(
                    "density grid must stay below lambda0 = {}",
                    eq.lambda0
                )));
            }
            let rows: Result<Vec<Vec<Cell>>> = grid
                .points()
                .par_iter()
                .map(|&lambda| {
                    let value = psi(lambda, &eq)?;
                    let bound = 2.0 * (eq.lambda0 - lambda).sqrt();
                    Ok(vec![Cell::Num(lambda), Cell::Num(value), Cell::Num(bound)])
                })
                .collect();
            let mut table = Table::new(vec!["lambda", "psi", "lower_bound"]);
            table.rows = rows?;
            Ok(table)
        }
        Command::Asym => {
            let p = params(s, t)?;
            let rep = cfg.rep.reps()[0];
            let mut table = Table::new(vec!["formula", "term", "value"]);
            breakdown_rows(&mut table, "uniform", &log_q_asymptotic(p)?);
            breakdown_rows(&mut table, "fixed_t", &log_q_expansion_fixed_t(p)?);
            breakdown_rows(&mut table, "tw_tail", &tw_tail_expansion(s)?);
            table.rows.push(vec![
                text("naive"),
                text("total"),
                Cell::Num(naive_estimate(p)?),
            ]);
            breakdown_rows(&mut table, "ds", &dlogq_ds_asymptotic(p)?);
            breakdown_rows(&mut table, "dT", &dlogq_dt_asymptotic(p)?);
            let hs = cfg.h.unwrap_or_else(|| default_step(s));
            let ht = cfg.h.unwrap_or(1e-2 * t);
            let ds = with_retry(prec, |pr| dlog_q_ds(p, hs, rep, order, pr))?;
            let dt = with_retry(prec, |pr| dlog_q_dt(p, ht, rep, order, pr))?;
            table
                .rows
                .push(vec![text("ds"), text("numeric"), Cell::Num(ds)]);
            table
                .rows
                .push(vec![text("dT"), text("numeric"), Cell::Num(dt)]);
            Ok(table)
        }
        Command::Compare => {
            let rep = cfg.rep.reps()[0];
            let grid = cfg.grid.expect("validated");
            let rows: Result<Vec<Vec<Cell>>> = grid
                .points()
                .par_iter()
                .map(|&s| {
                    let p = params(s, t)?;
                    let numeric = with_retry(prec, |pr| log_q_value(p, rep, order, pr))?;
                    let expansion = log_q_expansion_fixed_t(p)?.total;
                    let delta = (numeric - expansion).abs();
                    let log2 = s.ln() * s.ln();
                    Ok(vec![
                        Cell::Num(s),
                        Cell::Num(numeric),
                        Cell::Num(expansion),
                        Cell::Num(delta),
                        Cell::Num(delta / log2),
                    ])
                })
                .collect();
            let mut table = Table::new(vec![
                "s",
                "log_q_numeric",
                "expansion_total",
                "delta",
                "delta_over_log2s",
            ]);
            table.rows = rows?;
            Ok(table)
        }
        Command::Scan => {
            let p = params(s, t)?;
            let orders = match cfg.grid {
                Some(g) => scan_orders(g),
                None => {
                    let mut o = vec![
                        (order / 4).max(MIN_ORDER),
                        (order / 2).max(MIN_ORDER),
                        order,
                    ];
                    o.dedup();
                    o
                }
            };
            let mut table = Table::new(vec!["rep", "order", "log_q", "error_estimate"]);
            for rep in cfg.rep.reps() {
                let rows = with_retry(prec, |pr| convergence_scan(p, rep, &orders, pr))?;
                for r in rows {
                    table.rows.push(vec![
                        text(rep.as_str()),
                        Cell::Int(r.order),
                        Cell::Num(r.log_det),
                        Cell::Num(r.error_estimate),
                    ]);
                }
            }
            Ok(table)
        }
        Command::Tail => {
            let p = params(s, t)?;
            let rep = cfg.rep.reps()[0];
            let epsilon = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
            let asym = kpz_tail_bracket(p, epsilon, |p| log_q_asymptotic(p).map(|b| b.total))?;
            let numeric = kpz_tail_bracket(p, epsilon, |p| {
                with_retry(prec, |pr| log_q_value(p, rep, order, pr))
            })?;
            let mut table = Table::new(vec!["q_eval", "lower_a", "upper_b", "s_tilde", "epsilon"]);
            for (name, b) in [("asymptotic", asym), ("numeric", numeric)] {
                table.rows.push(vec![
                    text(name),
                    Cell::Num(b.lower_a),
                    Cell::Num(b.upper_b),
                    Cell::Num(b.s_tilde),
                    Cell::Num(b.epsilon),
                ]);
            }
            Ok(table)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::DomainError(_) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

/// Run with diagnostics on stderr.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> i32 {
    run_with_diagnostics(config, out, &mut io::stderr())
}

pub fn run_with_diagnostics(config: &RunConfig, out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    if let Err(reason) = config.validate() {
        let _ = writeln!(diag, "error: {reason}");
        return EXIT_VALIDATION;
    }
    match build(config) {
        Ok(table) => {
            if let Err(e) = out.write_all(table.render(config.output_format).as_bytes()) {
                let _ = writeln!(diag, "error: write failed: {e}");
                return EXIT_NUMERICAL;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(diag, "{}: {e}", e.name());
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        let mut argv = vec!["kpztail"];
        argv.extend_from_slice(args);
        RunConfig::from_args(argv).unwrap()
    }

    fn run_str(c: &RunConfig) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut diag = Vec::new();
        let code = run_with_diagnostics(c, &mut out, &mut diag);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(diag).unwrap(),
        )
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("3,8,6").unwrap();
        assert_eq!(g.points(), vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert!(parse_grid("3,8,1").is_err());
        assert!(parse_grid("8,3,4").is_err());
        assert!(parse_grid("1,2").is_err());
        assert!(parse_grid("-4,-1,4").is_ok());
    }

    #[test]
    fn defaults() {
        let c = cfg(&["q", "--s", "2", "--T", "1"]);
        assert_eq!(c.order, 80);
        assert_eq!(c.rep, RepChoice::Sigma);
        assert_eq!(c.precision, PrecisionChoice::Standard);
        assert_eq!(c.epsilon, None);
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn validation_rejects() {
        for args in [
            &["q", "--s", "2"][..],
            &["q", "--s", "2", "--T", "-1"],
            &["q", "--s", "2", "--T", "1", "--order", "4"],
            &["q", "--s", "2", "--T", "1", "--grid", "1,2,3"],
            &["compare", "--T", "1"],
            &["compare", "--T", "1", "--grid", "3,8,4", "--rep", "both"],
            &["tail", "--s", "0.5", "--T", "1"],
            &["q", "--s", "2", "--T", "1", "--epsilon", "0.2"],
            &["q", "--s", "2", "--T", "1", "--epsilon", "0.1"],
            &["endpoint", "--s", "-1", "--T", "1"],
            &["tw", "--s", "2", "--T", "1"],
            &["scan", "--s", "2", "--T", "1", "--grid", "4,10,3"],
        ] {
            let c = cfg(args);
            let (code, out, diag) = run_str(&c);
            assert_eq!(code, EXIT_VALIDATION, "{args:?}");
            assert!(out.is_empty());
            assert_eq!(diag.lines().count(), 1, "{diag}");
        }
    }

    #[test]
    fn endpoint_table() {
        let (code, out, _) = run_str(&cfg(&["endpoint", "--s", "100", "--T", "1"]));
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "lambda0,residual,asymptotic,scaled_error");
        let residual: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert!(residual.abs() <= 1e-10);
    }

    #[test]
    fn json_mirrors_csv() {
        let (_, csv, _) = run_str(&cfg(&["endpoint", "--s", "10", "--T", "1"]));
        let (_, json, _) = run_str(&cfg(&[
            "endpoint", "--s", "10", "--T", "1", "--format", "json",
        ]));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let row = &v[0];
        let first: f64 = csv
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(row["lambda0"].as_f64().unwrap(), first);
    }

    #[test]
    fn numerical_failure_exit() {
        let c = cfg(&["q", "--s=-300", "--T", "1"]);
        let (code, out, diag) = run_str(&c);
        if code != 0 {
            assert_eq!(code, EXIT_NUMERICAL);
            assert!(out.is_empty());
            assert!(!diag.is_empty());
        }
    }
}
