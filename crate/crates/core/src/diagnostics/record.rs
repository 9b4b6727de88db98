//! Per-output diagnostic records assembled from solver windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{linf_norm, lp_norm, GridSpec};
use crate::riesz::RieszKernel;
use crate::solver::Window;
use crate::spectral::Spectral;

use super::balance::{balance_residual, generalized_enstrophy, grad_term};
use super::holder::{estimate_holder, HolderFit, HolderOptions};
use super::kernel::{kernel_K, riesz_bound_constant_with};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    /// Exponents `r ∈ (1, 2]` for the `‖ω‖_r` columns.
    pub r_list: Vec<f64>,
    /// `(α, ε)` pairs for the weighted-enstrophy columns.
    pub alpha_eps: Vec<(f64, f64)>,
    /// Riesz order used for the bound constant.
    pub riesz_beta: f64,
    pub riesz_images: u32,
    /// Run the Hölder estimator on every `holder_every`-th record; 0 disables.
    pub holder_every: usize,
    pub holder: HolderOptions,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            r_list: vec![1.5, 2.0],
            alpha_eps: vec![(0.0, 0.0), (0.25, 1e-6)],
            riesz_beta: 0.5,
            riesz_images: 1,
            holder_every: 0,
            holder: HolderOptions::default(),
        }
    }
}

impl DiagnosticsConfig {
    pub fn validate(&self) -> Result<()> {
        for &r in &self.r_list {
            if !(r > 1.0 && r <= 2.0) {
                return Err(Error::Config(format!("r_list entries must lie in (1, 2], got {r}")));
            }
        }
        for &(a, e) in &self.alpha_eps {
            if !(0.0..=0.5).contains(&a) || !(e >= 0.0 && e.is_finite()) {
                return Err(Error::Config(format!("invalid (alpha, epsilon) = ({a}, {e})")));
            }
        }
        if !(self.riesz_beta > 0.0 && self.riesz_beta < 3.0) {
            return Err(Error::Config(format!("riesz_beta must lie in (0, 3), got {}", self.riesz_beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTerms {
    pub alpha: f64,
    pub epsilon: f64,
    pub gen_enstrophy: f64,
    pub grad_term: f64,
    pub balance_residual: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step_index: u64,
    pub energy: f64,
    /// `½‖ω‖₂²`.
    pub enstrophy: f64,
    pub omega_norms: Vec<(f64, f64)>,
    pub weighted: Vec<WeightedTerms>,
    pub kernel_linf: f64,
    /// 0 when `ω ≡ 0`, where the bound holds with any constant.
    pub riesz_const: f64,
    pub holder: Option<HolderFit>,
}

/// Stateful record builder; caches the Riesz kernel and counts records
/// for the Hölder cadence.
pub struct Diagnostics {
    config: DiagnosticsConfig,
    kernel: RieszKernel,
    count: usize,
}

impl Diagnostics {
    pub fn new(grid: GridSpec, config: DiagnosticsConfig) -> Result<Self> {
        config.validate()?;
        let kernel = RieszKernel::new(grid, config.riesz_beta, config.riesz_images)?;
        Ok(Self { config, kernel, count: 0 })
    }

    pub fn config(&self) -> &DiagnosticsConfig {
        &self.config
    }

    pub fn record(&mut self, spectral: &Spectral, window: &Window, nu: f64) -> Result<DiagnosticsRecord> {
        let state = window.current();
        let u = spectral.inverse(&state.uhat);
        let omega = spectral.inverse(&spectral.curl_hat(&state.uhat));
        let mag = omega.magnitude();

        let omega_norms = self
            .config
            .r_list
            .iter()
            .map(|&r| Ok((r, lp_norm(&mag, r)?)))
            .collect::<Result<Vec<_>>>()?;

        let mut weighted = Vec::with_capacity(self.config.alpha_eps.len());
        for &(alpha, eps) in &self.config.alpha_eps {
            let bal = balance_residual(spectral, &window.states, window.center, nu, alpha, eps)?;
            weighted.push(WeightedTerms {
                alpha,
                epsilon: eps,
                gen_enstrophy: generalized_enstrophy(&omega, alpha, eps)?,
                grad_term: grad_term(spectral, &omega, alpha)?,
                balance_residual: bal.residual,
                slack: bal.slack,
            });
        }

        let kernel_linf = linf_norm(&kernel_K(spectral, &u, &omega)?)?;
        let riesz_const = match riesz_bound_constant_with(spectral, &self.kernel, &u, &omega) {
            Ok(c) => c,
            Err(Error::Degenerate(_)) => 0.0,
            Err(e) => return Err(e),
        };

        let every = self.config.holder_every;
        let holder = if every > 0 && self.count % every == 0 {
            match estimate_holder(&omega, &self.config.holder) {
                Ok(fit) => Some(fit),
                Err(Error::InsufficientData(msg)) => {
                    log::warn!("hölder fit skipped at t = {}: {msg}", state.t);
                    None
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        self.count += 1;

        Ok(DiagnosticsRecord {
            t: state.t,
            step_index: state.step_index,
            energy: state.energy(),
            enstrophy: 0.5 * omega.inner(&omega)?,
            omega_norms,
            weighted,
            kernel_linf,
            riesz_const,
            holder,
        })
    }
}
