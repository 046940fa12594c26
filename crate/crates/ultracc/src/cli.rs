use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ultracc_core::asymptotics::{fixed_j_report, ray_params, ray_report, FixedJConstant};
use ultracc_core::coeffs::{build_grid, f_closed_auto, f_mixed_table_extended, EntryFlag, Method};
use ultracc_core::orthopoly::UltraParam;

use crate::error::{CliError, EXIT_FLAGGED, EXIT_OK, EXIT_USAGE};
use crate::figures::{self, Figure};
use crate::format::{grid_records, write_records, AgreementRecord, AsymRecord, CheckRecord, Format, GridRecord, Record};
use crate::suites::{self, rel_gap, Suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "ultracc", version, about = "Connection coefficients of ultraspherical polynomials with doubled argument")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file; stdout when absent. A directory for `simulate --figure`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate f_{i,j} on a grid.
    Coeff(CoeffArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// March the wave equation from a first row.
    Simulate(SimulateArgs),
    /// Compare coefficients with their leading asymptotic terms.
    Asym(AsymArgs),
}

/// `λ > -1/2, λ ≠ 0`, checked before anything runs.
fn parse_lambda(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    UltraParam::new(x).map(|l| l.value()).map_err(|e| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 => Ok(x),
        Ok(x) => Err(format!("{x} must be positive")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quadrature,
    Closed,
    ClosedAlt,
    RecurrenceI,
    RecurrenceJ,
    WaveStep,
    /// Closed form with the quadrature value and their relative gap.
    Both,
}

impl MethodArg {
    fn method(self) -> Option<Method> {
        Some(match self {
            MethodArg::Quadrature => Method::Quadrature,
            MethodArg::Closed => Method::Closed,
            MethodArg::ClosedAlt => Method::ClosedAlt,
            MethodArg::RecurrenceI => Method::RecurrenceI,
            MethodArg::RecurrenceJ => Method::RecurrenceJ,
            MethodArg::WaveStep => Method::WaveStep,
            MethodArg::Both => return None,
        })
    }
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, allow_negative_numbers = true, value_parser = parse_lambda)]
    pub lambda: f64,
    /// Second parameter; tabulates f^{(λ,μ)} by quadrature.
    #[arg(long, allow_negative_numbers = true, value_parser = parse_lambda)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub imax: usize,
    /// Defaults to imax.
    #[arg(long)]
    pub jmax: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    pub method: MethodArg,
    /// Relative gap above which `both` flags an entry.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_positive)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Restrict to one λ; each suite has its own set otherwise.
    #[arg(long, allow_negative_numbers = true, value_parser = parse_lambda)]
    pub lambda: Option<f64>,
    /// Grid size (or depth, for `recurrence`).
    #[arg(long)]
    pub imax: Option<usize>,
    /// Also write the residual report here.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    /// Also write the identity report here.
    #[arg(long)]
    pub identities: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Ultraspherical,
    Mixed,
    Geronimus,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SimMode::Ultraspherical)]
    pub mode: SimMode,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5, value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_lambda)]
    pub mu: Option<f64>,
    /// Length of the first row.
    #[arg(long, default_value_t = figures::ROW_LEN)]
    pub n: usize,
    /// Number of rows to march.
    #[arg(long, default_value_t = figures::ROWS)]
    pub rows: usize,
    /// Emit only these rows, e.g. `15,20`.
    #[arg(long, value_delimiter = ',')]
    pub select: Vec<usize>,
    /// Regenerate the data files of figure 1, 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub figure: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AsymMode {
    FixedJ,
    Ray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstantArg {
    Fitted,
    Calibrated,
    Uncorrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl IndexRange {
    fn values(self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

/// `a`, `a:b` or `a:b:step`.
fn parse_range(s: &str) -> Result<IndexRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    let r = match parts.as_slice() {
        [a] => IndexRange { start: num(a)?, end: num(a)?, step: 1 },
        [a, b] => IndexRange { start: num(a)?, end: num(b)?, step: 1 },
        [a, b, c] => IndexRange { start: num(a)?, end: num(b)?, step: num(c)? },
        _ => return Err("expected a, a:b or a:b:step".to_string()),
    };
    if r.start == 0 || r.start > r.end || r.step == 0 {
        return Err("need 1 <= start <= end and step >= 1".to_string());
    }
    Ok(r)
}

#[derive(Debug, Args)]
pub struct AsymArgs {
    #[arg(long, value_enum)]
    pub mode: AsymMode,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5, value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub j: usize,
    #[arg(long, default_value = "50:800", value_parser = parse_range)]
    pub i: IndexRange,
    #[arg(long, value_enum, default_value_t = ConstantArg::Fitted)]
    pub constant: ConstantArg,
    #[arg(long)]
    pub k1: Option<u32>,
    #[arg(long)]
    pub k2: Option<u32>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub t: Vec<u32>,
}

/// Parse `args`, run the command and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Coeff(a) => coeff(cli, a, stdout),
        Command::Verify(a) => verify(cli, a, stdout, stderr),
        Command::Simulate(a) => simulate(cli, a, stdout, stderr),
        Command::Asym(a) => asym(cli, a, stdout),
    }
}

fn emit<R: Record>(records: &[R], format: Format, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_records(records, format, &mut w)?;
            w.flush()?;
        }
        None => write_records(records, format, stdout)?,
    }
    Ok(())
}

fn lam(x: f64) -> Result<UltraParam, CliError> {
    Ok(UltraParam::new(x)?)
}

fn coeff(cli: &Cli, a: &CoeffArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let l = lam(a.lambda)?;
    let jmax = a.jmax.unwrap_or(a.imax);
    if let Some(mu) = a.mu {
        if a.method != MethodArg::Quadrature {
            return Err(CliError::Usage("--mu is only available with --method quadrature".to_string()));
        }
        let table = f_mixed_table_extended(l, lam(mu)?, a.imax, jmax)?;
        let mut recs = Vec::new();
        for i in 0..=a.imax {
            for j in 0..=jmax {
                let value = if j <= i { table[i][j].to_f64() } else { 0.0 };
                recs.push(GridRecord { i, j, lambda: a.lambda, value, method: "quadrature".into(), flag: "ok".into() });
            }
        }
        emit(&recs, cli.format, cli.out.as_deref(), stdout)?;
        return Ok(EXIT_OK);
    }
    match a.method.method() {
        Some(m) => {
            let g = build_grid(l, a.imax, jmax, m)?;
            emit(&grid_records(&g), cli.format, cli.out.as_deref(), stdout)?;
            Ok(if g.unreliable_count() > 0 { EXIT_FLAGGED } else { EXIT_OK })
        }
        None => {
            let q = build_grid(l, a.imax, jmax, Method::Quadrature)?;
            let mut recs = Vec::new();
            let mut flagged = false;
            for (i, j, fq, _) in q.entries() {
                let (value, reliable) = if j <= i {
                    let c = f_closed_auto(l, i, j)?;
                    (c.to_real(), c.reliable)
                } else {
                    (0.0, true)
                };
                let gap = rel_gap(value, fq);
                let flag = if !reliable {
                    EntryFlag::Unreliable.name()
                } else if gap > a.tol {
                    "disagree"
                } else {
                    EntryFlag::Ok.name()
                };
                flagged |= flag != "ok";
                recs.push(AgreementRecord {
                    i,
                    j,
                    lambda: a.lambda,
                    value,
                    method: "both".into(),
                    flag: flag.into(),
                    quadrature: fq,
                    rel_gap: gap,
                });
            }
            emit(&recs, cli.format, cli.out.as_deref(), stdout)?;
            Ok(if flagged { EXIT_FLAGGED } else { EXIT_OK })
        }
    }
}

fn verify(cli: &Cli, a: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = VerifyConfig { lambdas: a.lambda.into_iter().collect(), imax: a.imax };
    let out = suites::run(a.suite, &cfg)?;
    for c in &out.checks {
        let status = if c.pass { "pass" } else { "FAIL" };
        writeln!(stderr, "{status} {}: {} (measured {:.3e}, bound {:.3e})", c.suite, c.name, c.measured, c.threshold)?;
    }
    for n in &out.notes {
        writeln!(stderr, "note: {n}")?;
    }
    let recs: Vec<CheckRecord> = out.checks.iter().map(|c| c.record()).collect();
    emit(&recs, cli.format, cli.out.as_deref(), stdout)?;
    if let Some(p) = &a.residuals {
        emit(&out.residuals, cli.format, Some(p), stdout)?;
    }
    if let Some(p) = &a.identities {
        emit(&out.identities, cli.format, Some(p), stdout)?;
    }
    match out.first_failure() {
        Some(c) => Err(CliError::VerifyFailed { check: format!("{}: {}", c.suite, c.name) }),
        None => Ok(EXIT_OK),
    }
}

fn simulate(cli: &Cli, a: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(n) = a.figure {
        let fig = Figure::from_number(n).expect("range checked by the parser");
        let files = figures::render(fig)?;
        match &cli.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                for (name, bytes) in &files {
                    std::fs::write(dir.join(name), bytes)?;
                    writeln!(stderr, "wrote {}", dir.join(name).display())?;
                }
            }
            None => {
                // one header for the concatenation; every file shares it
                for (k, (_, bytes)) in files.iter().enumerate() {
                    let text = std::str::from_utf8(bytes).expect("csv is utf-8");
                    let body = if k == 0 { text } else { text.split_once('\n').map_or("", |p| p.1) };
                    stdout.write_all(body.as_bytes())?;
                }
            }
        }
        return Ok(EXIT_OK);
    }
    if a.rows + 1 > a.n {
        return Err(CliError::Usage(format!("--rows {} needs a first row longer than {}", a.rows, a.rows)));
    }
    let grid = match a.mode {
        SimMode::Ultraspherical => figures::ultraspherical_simulation(lam(a.lambda)?, a.n, a.rows)?,
        SimMode::Mixed => {
            let mu = a.mu.ok_or_else(|| CliError::Usage("--mode mixed needs --mu".to_string()))?;
            figures::mixed_simulation(lam(a.lambda)?, lam(mu)?, a.n, a.rows)?
        }
        SimMode::Geronimus => figures::geronimus_simulation_with(a.n, a.rows)?,
    };
    let recs = figures::sim_records(&grid, &a.select);
    emit(&recs, cli.format, cli.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn asym(cli: &Cli, a: &AsymArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let l = lam(a.lambda)?;
    let rows = match a.mode {
        AsymMode::FixedJ => {
            let constant = match a.constant {
                ConstantArg::Fitted => FixedJConstant::Fitted,
                ConstantArg::Calibrated => FixedJConstant::Calibrated,
                ConstantArg::Uncorrected => FixedJConstant::Uncorrected,
            };
            fixed_j_report(l, a.j, &a.i.values(), constant)?
        }
        AsymMode::Ray => {
            let (Some(k1), Some(k2)) = (a.k1, a.k2) else {
                return Err(CliError::Usage("--mode ray needs --k1 and --k2".to_string()));
            };
            if !(k1 > k2 && k2 > 0) {
                return Err(CliError::Usage(format!("need k1 > k2 > 0, got ({k1}, {k2})")));
            }
            if a.t.contains(&0) {
                return Err(CliError::Usage("t values must be positive".to_string()));
            }
            let p = ray_params(k1, k2, l)?;
            ray_report(l, &p, &a.t)?
        }
    };
    let recs: Vec<AsymRecord> = rows.iter().map(AsymRecord::from).collect();
    emit(&recs, cli.format, cli.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ultracc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("50:800").unwrap().values().len(), 751);
        assert_eq!(parse_range("10:20:5").unwrap().values(), [10, 15, 20]);
        assert!(parse_range("0:5").is_err());
        assert!(parse_range("9:5").is_err());
    }

    #[test]
    fn lambda_checked_at_parse() {
        let (code, _, err) = call(&["coeff", "--lambda", "-0.7", "--imax", "3"]);
        assert_eq!(code, 1);
        assert!(err.contains("lambda > -1/2"), "{err}");
        assert_eq!(call(&["verify", "--suite", "all", "--lambda", "0"]).0, 1);
    }

    #[test]
    fn coeff_row_count() {
        let (code, out, _) = call(&["coeff", "--lambda", "0.5", "--imax", "20", "--jmax", "20", "--method", "closed"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1 + 441);
    }

    #[test]
    fn ray_regime_exit() {
        let (code, _, err) = call(&["asym", "--mode", "ray", "--k1", "2", "--k2", "1"]);
        assert_eq!(code, 5);
        assert!(err.contains("sqrt(2)*k2/k1 > 1"), "{err}");
        assert_eq!(call(&["asym", "--mode", "ray", "--k1", "3", "--k2", "3"]).0, 1);
    }

    #[test]
    fn help_is_not_an_error() {
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["frobnicate"]).0, 1);
    }
}
