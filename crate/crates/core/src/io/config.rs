//! TOML run configuration. Every key is optional; unknown keys are errors.
//!
//! ```toml
//! [grid]
//! n = 16                 # points per side
//! l = 6.283185307179586  # box side, default 2π
//!
//! [solver]
//! nu = 1.0
//! dt = 1e-3              # shortened so that t_end is hit exactly
//! t_end = 0.1
//! dealias = true
//! cfl_safety = 0.5
//! nonlinear = true
//! seed = 0
//! init = { kind = "abc", a = 1.0, b = 1.0, c = 1.0 }
//! # or { kind = "taylor-green" }, { kind = "random", slope = -1.67, energy = 0.5, seed = 1 }
//!
//! [diagnostics]
//! every = 10             # record every 10th step (and the last)
//! r_list = [1.5, 2.0]
//! alpha_eps = [[0.0, 0.0], [0.25, 1e-6]]
//! riesz_beta = 0.5
//! riesz_images = 1
//! holder_every = 0       # Hölder fit on every k-th record, 0 = never
//! holder = { n_pairs = 200000, quantile = 0.95, n_bins = 12, seed = 0 }
//!
//! [output]
//! checkpoint_every = 0   # checkpoint every k-th record, 0 = final only
//! checkpoints = true
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsConfig, HolderOptions};
use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::solver::{InitialCondition, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub l: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 16, l: 2.0 * PI }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub cfl_safety: f64,
    pub nonlinear: bool,
    pub seed: u64,
    pub init: InitialCondition,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            nu: 1.0,
            dt: 1e-3,
            t_end: 0.1,
            dealias: true,
            cfl_safety: 0.5,
            nonlinear: true,
            seed: 0,
            init: InitialCondition::TaylorGreen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub every: u64,
    pub r_list: Vec<f64>,
    pub alpha_eps: Vec<(f64, f64)>,
    pub riesz_beta: f64,
    pub riesz_images: u32,
    pub holder_every: usize,
    pub holder: HolderOptions,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        let d = DiagnosticsConfig::default();
        Self {
            every: 1,
            r_list: d.r_list,
            alpha_eps: d.alpha_eps,
            riesz_beta: d.riesz_beta,
            riesz_images: d.riesz_images,
            holder_every: d.holder_every,
            holder: d.holder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub checkpoint_every: u64,
    pub checkpoints: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            checkpoint_every: 0,
            checkpoints: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub solver: SolverSection,
    pub diagnostics: DiagnosticsSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_config()?.validate()?;
        self.diagnostics_config().validate()
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let grid = GridSpec::new(self.grid.n, self.grid.l).map_err(|e| Error::Config(e.to_string()))?;
        let s = &self.solver;
        Ok(SimConfig {
            grid,
            nu: s.nu,
            dt: s.dt,
            t_end: s.t_end,
            init: s.init,
            dealias: s.dealias,
            output_every: self.diagnostics.every,
            seed: s.seed,
            cfl_safety: s.cfl_safety,
            nonlinear: s.nonlinear,
        })
    }

    pub fn diagnostics_config(&self) -> DiagnosticsConfig {
        let d = &self.diagnostics;
        DiagnosticsConfig {
            r_list: d.r_list.clone(),
            alpha_eps: d.alpha_eps.clone(),
            riesz_beta: d.riesz_beta,
            riesz_images: d.riesz_images,
            holder_every: d.holder_every,
            holder: d.holder.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.sim_config().unwrap().grid.n(), 16);
    }

    #[test]
    fn documented_example_parses() {
        let doc = include_str!("config.rs")
            .lines()
            .take_while(|l| l.starts_with("//!"))
            .filter_map(|l| l.strip_prefix("//! "))
            .skip_while(|l| !l.starts_with("```toml"))
            .skip(1)
            .take_while(|l| !l.starts_with("```"))
            .collect::<Vec<_>>()
            .join("\n");
        let c = RunConfig::from_toml_str(&doc).unwrap();
        assert_eq!(c.solver.init, InitialCondition::Abc { a: 1.0, b: 1.0, c: 1.0 });
        assert_eq!(c.diagnostics.every, 10);
        assert_eq!(c.diagnostics.alpha_eps, vec![(0.0, 0.0), (0.25, 1e-6)]);
        assert_eq!(c.diagnostics.holder.n_pairs, 200_000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for doc in [
            "[grid]\nsize = 8",
            "[solver]\nviscosity = 1.0",
            "[extra]\na = 1",
            "[diagnostics.holder]\nbins = 3",
            "[solver]\ninit = { kind = \"abc\", a = 1.0, b = 1.0, c = 1.0, d = 2.0 }",
        ] {
            assert!(matches!(RunConfig::from_toml_str(doc), Err(Error::Config(_))), "{doc}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        for doc in [
            "[grid]\nn = 2",
            "[solver]\ndt = -1.0",
            "[diagnostics]\nevery = 0",
            "[diagnostics]\nr_list = [2.5]",
            "[diagnostics]\nalpha_eps = [[0.7, 0.0]]",
        ] {
            assert!(RunConfig::from_toml_str(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut c = RunConfig::default();
        c.solver.init = InitialCondition::Random { slope: -5.0 / 3.0, energy: 0.5, seed: 7 };
        c.diagnostics.holder.k_threshold = Some(0.25);
        let text = c.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
    }
}
