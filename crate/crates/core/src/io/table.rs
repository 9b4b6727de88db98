//! CSV output. Floats are written with 17 significant digits so that
//! parsing them back recovers the exact `f64`.

use std::io::Write;

use crate::diagnostics::{DiagnosticsConfig, DiagnosticsRecord, HolderFit};
use crate::error::{Error, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Columns of `timeseries.csv` for a given diagnostics configuration.
pub fn timeseries_header(cfg: &DiagnosticsConfig) -> Vec<String> {
    let mut h: Vec<String> = vec!["t".into(), "energy".into(), "enstrophy".into()];
    h.extend(cfg.r_list.iter().map(|r| format!("omega_norm_r{r}")));
    h.extend(cfg.alpha_eps.iter().map(|(a, e)| format!("gen_enstrophy_a{a}_e{e}")));
    h.extend(cfg.alpha_eps.iter().map(|(a, e)| format!("grad_term_a{a}_e{e}")));
    h.push("kernel_linf".into());
    h.push("riesz_const".into());
    h.extend(cfg.alpha_eps.iter().map(|(a, e)| format!("balance_residual_a{a}_e{e}")));
    h.extend(cfg.alpha_eps.iter().map(|(a, e)| format!("balance_slack_a{a}_e{e}")));
    h
}

pub fn timeseries_row(rec: &DiagnosticsRecord) -> Vec<String> {
    let mut row = vec![fmt_f64(rec.t), fmt_f64(rec.energy), fmt_f64(rec.enstrophy)];
    row.extend(rec.omega_norms.iter().map(|(_, v)| fmt_f64(*v)));
    row.extend(rec.weighted.iter().map(|w| fmt_f64(w.gen_enstrophy)));
    row.extend(rec.weighted.iter().map(|w| fmt_f64(w.grad_term)));
    row.push(fmt_f64(rec.kernel_linf));
    row.push(fmt_f64(rec.riesz_const));
    row.extend(rec.weighted.iter().map(|w| fmt_f64(w.balance_residual)));
    row.extend(rec.weighted.iter().map(|w| fmt_f64(w.slack)));
    row
}

/// Streams diagnostic records to CSV.
pub struct TimeseriesWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TimeseriesWriter<W> {
    pub fn new(w: W, cfg: &DiagnosticsConfig) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(timeseries_header(cfg)).map_err(csv_err)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        self.inner.write_record(timeseries_row(rec)).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Per-record Hölder fits of a simulation.
pub fn write_holder_series(w: impl Write, rows: &[(f64, HolderFit)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "beta_hat", "c_hat", "n_pairs", "fit_residual", "degenerate", "clipped"])
        .map_err(csv_err)?;
    for (t, fit) in rows {
        out.write_record([
            fmt_f64(*t),
            fit.beta_hat.map(fmt_f64).unwrap_or_default(),
            fit.c_hat.map(fmt_f64).unwrap_or_default(),
            fit.n_pairs.to_string(),
            fmt_f64(fit.fit_residual),
            fit.degenerate.to_string(),
            fit.clipped.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Bin centres, per-bin quantiles and the fitted power law.
pub fn write_holder_bins(w: impl Write, fit: &HolderFit) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["separation", "quantile_value", "fit_value"]).map_err(csv_err)?;
    for (s, v) in fit.separations.iter().zip(&fit.bin_values) {
        out.write_record([
            fmt_f64(*s),
            fmt_f64(*v),
            fit.fit_value(*s).map(fmt_f64).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}
