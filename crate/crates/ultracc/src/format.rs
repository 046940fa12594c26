//! CSV and JSON record types. Reals go to CSV with 17 significant digits so
//! that reading a file back reproduces the in-memory values bit for bit.

use std::io::{Read, Write};

use clap::ValueEnum;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use ultracc_core::asymptotics::AsymRow;
use ultracc_core::coeffs::CoefficientGrid;
use ultracc_core::identities::IdentityRow;
use ultracc_core::specfun::SignedLog;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `d.dddddddddddddddde±x`, 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A flat record with a fixed CSV header.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
    pub value: f64,
    pub method: String,
    pub flag: String,
}

impl Record for GridRecord {
    const HEADER: &'static [&'static str] = &["i", "j", "lambda", "value", "method", "flag"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.i.to_string(),
            self.j.to_string(),
            sig17(self.lambda),
            sig17(self.value),
            self.method.clone(),
            self.flag.clone(),
        ]
    }
}

/// Every `(i, j)` of a grid, row-major.
pub fn grid_records(grid: &CoefficientGrid) -> Vec<GridRecord> {
    let lambda = grid.family.lambda().unwrap_or(f64::NAN);
    grid.entries()
        .map(|(i, j, v, flag)| GridRecord {
            i,
            j,
            lambda,
            value: v,
            method: grid.method.name().to_string(),
            flag: flag.name().to_string(),
        })
        .collect()
}

/// Grid record plus the second method's value and the relative gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRecord {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
    pub value: f64,
    pub method: String,
    pub flag: String,
    pub quadrature: f64,
    pub rel_gap: f64,
}

impl Record for AgreementRecord {
    const HEADER: &'static [&'static str] = &["i", "j", "lambda", "value", "method", "flag", "quadrature", "rel_gap"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.i.to_string(),
            self.j.to_string(),
            sig17(self.lambda),
            sig17(self.value),
            self.method.clone(),
            self.flag.clone(),
            sig17(self.quadrature),
            sig17(self.rel_gap),
        ]
    }
}

/// A simulated entry with its row energy `Σ_i u_{i,j}²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
    pub value: f64,
    pub method: String,
    pub flag: String,
    pub energy: f64,
}

impl Record for SimRecord {
    const HEADER: &'static [&'static str] = &["i", "j", "lambda", "value", "method", "flag", "energy"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.i.to_string(),
            self.j.to_string(),
            sig17(self.lambda),
            sig17(self.value),
            self.method.clone(),
            self.flag.clone(),
            sig17(self.energy),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub i: usize,
    pub j: usize,
    pub kind: String,
    pub residual: f64,
    pub scale: f64,
}

impl Record for ResidualRecord {
    const HEADER: &'static [&'static str] = &["i", "j", "kind", "residual", "scale"];
    fn fields(&self) -> Vec<String> {
        vec![self.i.to_string(), self.j.to_string(), self.kind.clone(), sig17(self.residual), sig17(self.scale)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymRecord {
    pub i_or_t: usize,
    pub exact_log: f64,
    pub exact_sign: i8,
    pub leading_log: f64,
    pub leading_sign: i8,
    pub rel_err: f64,
}

impl From<&AsymRow> for AsymRecord {
    fn from(r: &AsymRow) -> Self {
        AsymRecord {
            i_or_t: r.index,
            exact_log: r.exact.log_mag,
            exact_sign: r.exact.sign,
            leading_log: r.leading.log_mag,
            leading_sign: r.leading.sign,
            rel_err: r.rel_err,
        }
    }
}

impl AsymRecord {
    pub fn exact(&self) -> SignedLog {
        SignedLog { sign: self.exact_sign, log_mag: self.exact_log }
    }
}

impl Record for AsymRecord {
    const HEADER: &'static [&'static str] =
        &["i_or_t", "exact_log", "exact_sign", "leading_log", "leading_sign", "rel_err"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.i_or_t.to_string(),
            sig17(self.exact_log),
            self.exact_sign.to_string(),
            sig17(self.leading_log),
            self.leading_sign.to_string(),
            sig17(self.rel_err),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub identity: String,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub flag: String,
}

impl From<&IdentityRow> for IdentityRecord {
    fn from(r: &IdentityRow) -> Self {
        IdentityRecord {
            identity: r.identity.to_string(),
            params: r.params.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
            gap: r.gap,
            flag: if r.flagged { "flagged" } else { "ok" }.to_string(),
        }
    }
}

impl Record for IdentityRecord {
    const HEADER: &'static [&'static str] = &["identity", "params", "lhs", "rhs", "gap", "flag"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.identity.clone(),
            self.params.clone(),
            sig17(self.lhs),
            sig17(self.rhs),
            sig17(self.gap),
            self.flag.clone(),
        ]
    }
}

/// One verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub measured: f64,
    pub threshold: f64,
    pub status: String,
}

impl Record for CheckRecord {
    const HEADER: &'static [&'static str] = &["suite", "check", "measured", "threshold", "status"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.suite.clone(),
            self.check.clone(),
            sig17(self.measured),
            sig17(self.threshold),
            self.status.clone(),
        ]
    }
}

pub fn write_records<R: Record, W: Write>(records: &[R], format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(R::HEADER)?;
            for r in records {
                w.write_record(r.fields())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn read_csv<R: DeserializeOwned, T: Read>(input: T) -> Result<Vec<R>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<R>, _>>()?)
}
