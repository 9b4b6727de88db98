use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use vortlab::diagnostics::{estimate_holder, riesz_bound_constant, HolderFit, HolderOptions};
use vortlab::io::{write_holder_bins, Checkpoint};
use vortlab::{linf_norm, lp_norm, Error, Spectral};

use crate::CliResult;

#[derive(Debug, Clone)]
pub struct DiagnoseOptions {
    pub holder: HolderOptions,
    pub riesz_beta: f64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            holder: HolderOptions::default(),
            riesz_beta: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub t: f64,
    pub n: usize,
    pub energy: f64,
    pub enstrophy: f64,
    pub omega_l1_5: f64,
    pub omega_l2: f64,
    pub omega_linf: f64,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<f64>,
    pub clipped: bool,
    pub n_pairs: usize,
    /// Absent when the vorticity vanishes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz_const: Option<f64>,
}

/// Loads a checkpoint, fits the Hölder exponent of the vorticity direction
/// and evaluates the Riesz bound constant. Writes `holder.csv` and
/// `summary.toml` when `out_dir` is given.
pub fn diagnose(checkpoint: &Path, opts: &DiagnoseOptions, out_dir: Option<&Path>) -> CliResult<(Summary, HolderFit)> {
    let cp = Checkpoint::load(checkpoint)?;
    let grid = *cp.grid();
    let spectral = Spectral::new(grid);
    let u = &cp.velocity;
    let omega = spectral.curl(u)?;
    let mag = omega.magnitude();
    let fit = estimate_holder(&omega, &opts.holder)?;
    let riesz_const = match riesz_bound_constant(&spectral, u, &omega, opts.riesz_beta) {
        Ok(c) => Some(c),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = Summary {
        t: cp.t,
        n: grid.n(),
        energy: 0.5 * u.inner(u)?,
        enstrophy: 0.5 * omega.inner(&omega)?,
        omega_l1_5: lp_norm(&mag, 1.5)?,
        omega_l2: lp_norm(&mag, 2.0)?,
        omega_linf: linf_norm(&mag)?,
        degenerate: fit.degenerate,
        beta_hat: fit.beta_hat,
        c_hat: fit.c_hat,
        clipped: fit.clipped,
        n_pairs: fit.n_pairs,
        riesz_const,
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_holder_bins(BufWriter::new(File::create(dir.join("holder.csv"))?), &fit)?;
        let text = toml::to_string(&summary).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(dir.join("summary.toml"), text)?;
    }
    Ok((summary, fit))
}
