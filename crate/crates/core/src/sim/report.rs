//! CSV rows for coverage and rate results.

use crate::error::Result;
use std::io::Write;

/// `gamma_db,coverage,stderr,trials,mode,alpha,n_abs`
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub gamma_db: f64,
    pub coverage: f64,
    pub stderr: f64,
    pub trials: u64,
    pub mode: String,
    pub alpha: f64,
    pub n_abs: usize,
}

/// `alpha,n_abs,mode,rate_nats,stderr,trials`
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub alpha: f64,
    pub n_abs: usize,
    pub mode: String,
    pub rate_nats: f64,
    pub stderr: f64,
    pub trials: u64,
}

pub fn write_coverage_csv<W: Write>(rows: &[CoverageRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["gamma_db", "coverage", "stderr", "trials", "mode", "alpha", "n_abs"])?;
    for r in rows {
        out.write_record([
            r.gamma_db.to_string(),
            r.coverage.to_string(),
            r.stderr.to_string(),
            r.trials.to_string(),
            r.mode.clone(),
            r.alpha.to_string(),
            r.n_abs.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_rate_csv<W: Write>(rows: &[RateRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["alpha", "n_abs", "mode", "rate_nats", "stderr", "trials"])?;
    for r in rows {
        out.write_record([
            r.alpha.to_string(),
            r.n_abs.to_string(),
            r.mode.clone(),
            r.rate_nats.to_string(),
            r.stderr.to_string(),
            r.trials.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
