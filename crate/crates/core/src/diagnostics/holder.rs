//! Vorticity-direction angles and an empirical Hölder exponent for
//! `sin θ(x, y) <= c |x - y|^β`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::VectorField;

/// Reported exponents are clipped to `[0, BETA_CAP]`.
pub const BETA_CAP: f64 = 2.0;

/// Sines below this count as exactly parallel.
const PARALLEL_TOL: f64 = 1e-14;

/// `|ω(i) × ω(j)| / (|ω(i)| |ω(j)|)`, clamped to `[0, 1]`.
pub fn sin_theta(omega: &VectorField, i: usize, j: usize) -> Result<f64> {
    let a = omega.at(i);
    let b = omega.at(j);
    sin_between(a, b, i, j)
}

fn sin_between(a: [f64; 3], b: [f64; 3], i: usize, j: usize) -> Result<f64> {
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if na == 0.0 {
        return Err(Error::UndefinedAngle(i));
    }
    if nb == 0.0 {
        return Err(Error::UndefinedAngle(j));
    }
    let cx = a[1] * b[2] - a[2] * b[1];
    let cy = a[2] * b[0] - a[0] * b[2];
    let cz = a[0] * b[1] - a[1] * b[0];
    let s = (cx * cx + cy * cy + cz * cz).sqrt() / (na * nb);
    Ok(s.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePairSample {
    pub x_index: usize,
    pub y_index: usize,
    pub separation: f64,
    pub sin_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolderOptions {
    /// Minimum `|ω|` at both endpoints; `None` means `0.5 · max|ω|`.
    pub k_threshold: Option<f64>,
    /// Largest pair separation; `None` means `l / 4`.
    pub delta_max: Option<f64>,
    pub n_pairs: usize,
    pub quantile: f64,
    pub n_bins: usize,
    pub seed: u64,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            k_threshold: None,
            delta_max: None,
            n_pairs: 200_000,
            quantile: 0.95,
            n_bins: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    /// `None` when the direction field is constant.
    pub beta_hat: Option<f64>,
    pub c_hat: Option<f64>,
    pub n_pairs: usize,
    pub quantile: f64,
    /// Geometric centre of each fitted bin.
    pub separations: Vec<f64>,
    pub bin_values: Vec<f64>,
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
    pub degenerate: bool,
    /// The unclipped slope fell outside `[0, BETA_CAP]`.
    pub clipped: bool,
}

impl HolderFit {
    /// Fitted power law at separation `s`.
    pub fn fit_value(&self, s: f64) -> Option<f64> {
        Some(self.c_hat? * s.powf(self.beta_hat?))
    }
}

/// Empirical `q`-quantile with linear interpolation between order
/// statistics. Sorts `v`.
pub fn quantile(v: &mut [f64], q: f64) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    v[lo] * (1.0 - w) + v[hi] * w
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (intercept, slope, (ss / n).sqrt())
}

/// Log-spaced separation bins on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct LogBins {
    log_lo: f64,
    log_hi: f64,
    n: usize,
}

impl LogBins {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self {
            log_lo: (lo * (1.0 - 1e-9)).ln(),
            log_hi: (hi * (1.0 + 1e-9)).ln(),
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Geometric centre of bin `b`.
    pub fn center(&self, b: usize) -> f64 {
        let w = (self.log_hi - self.log_lo) / self.n as f64;
        (self.log_lo + (b as f64 + 0.5) * w).exp()
    }

    pub fn index(&self, s: f64) -> Option<usize> {
        let t = (s.ln() - self.log_lo) / (self.log_hi - self.log_lo);
        if !(0.0..1.0).contains(&t) {
            return None;
        }
        Some(((t * self.n as f64) as usize).min(self.n - 1))
    }
}

/// Fits `log v = log c + β log s` over per-bin statistics. `bins` holds the
/// bin centre, the number of samples and the statistic for every bin.
pub(crate) fn fit_bins(
    bins: impl IntoIterator<Item = (f64, usize, f64)>,
    n_pairs: usize,
    q: f64,
) -> Result<HolderFit> {
    let mut separations = Vec::new();
    let mut bin_values = Vec::new();
    for (center, count, value) in bins {
        if count == 0 || value <= PARALLEL_TOL {
            continue;
        }
        separations.push(center);
        bin_values.push(value);
    }
    if separations.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable separation bins, need at least 3",
            separations.len()
        )));
    }
    let lx: Vec<f64> = separations.iter().map(|s| s.ln()).collect();
    let ly: Vec<f64> = bin_values.iter().map(|v| v.ln()).collect();
    let (intercept, slope, rms) = linear_fit(&lx, &ly);
    let clipped = !(0.0..=BETA_CAP).contains(&slope);
    Ok(HolderFit {
        beta_hat: Some(slope.clamp(0.0, BETA_CAP)),
        c_hat: Some(intercept.exp()),
        n_pairs,
        quantile: q,
        separations,
        bin_values,
        fit_residual: rms,
        degenerate: false,
        clipped,
    })
}

/// Draws random point pairs that pass the magnitude threshold and the
/// separation cutoff.
pub fn sample_pairs(omega: &VectorField, opts: &HolderOptions) -> Result<Vec<AnglePairSample>> {
    let grid = *omega.grid();
    let mag = omega.magnitude();
    let k = opts.k_threshold.unwrap_or(0.5 * mag.max());
    let delta = opts.delta_max.unwrap_or(grid.l() / 4.0);
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("k_threshold must be >= 0, got {k}")));
    }
    if !(delta > 0.0 && delta <= grid.l() / 2.0 * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("delta_max must lie in (0, l/2], got {delta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let total = grid.len();
    let max_attempts = opts.n_pairs.saturating_mul(200).max(10_000);
    let mut out = Vec::with_capacity(opts.n_pairs);
    let mut attempts = 0usize;
    while out.len() < opts.n_pairs && attempts < max_attempts {
        attempts += 1;
        let i = rng.random_range(0..total);
        let j = rng.random_range(0..total);
        if i == j {
            continue;
        }
        let (mi, mj) = (mag[i], mag[j]);
        if mi < k || mj < k || mi == 0.0 || mj == 0.0 {
            continue;
        }
        let s = grid.separation(i, j);
        if s > delta {
            continue;
        }
        out.push(AnglePairSample {
            x_index: i,
            y_index: j,
            separation: s,
            sin_theta: sin_theta(omega, i, j)?,
        });
    }
    Ok(out)
}

/// Log-log fit of the binned high quantile of `sin θ` against separation.
pub fn estimate_holder(omega: &VectorField, opts: &HolderOptions) -> Result<HolderFit> {
    if !(opts.quantile > 0.0 && opts.quantile <= 1.0) {
        return Err(Error::Domain(format!("quantile must lie in (0, 1], got {}", opts.quantile)));
    }
    if opts.n_bins < 3 {
        return Err(Error::Domain("at least 3 bins are required".into()));
    }
    let mag = omega.magnitude();
    if mag.max() == 0.0 {
        return Err(Error::InsufficientData("vorticity vanishes identically".into()));
    }
    let samples = sample_pairs(omega, opts)?;
    if samples.is_empty() {
        return Err(Error::InsufficientData("no pair passed the threshold and cutoff".into()));
    }
    if samples.iter().all(|p| p.sin_theta <= PARALLEL_TOL) {
        return Ok(HolderFit {
            beta_hat: None,
            c_hat: None,
            n_pairs: samples.len(),
            quantile: opts.quantile,
            separations: Vec::new(),
            bin_values: Vec::new(),
            fit_residual: 0.0,
            degenerate: true,
            clipped: false,
        });
    }
    let grid = omega.grid();
    let delta = opts.delta_max.unwrap_or(grid.l() / 4.0);
    let bins = LogBins::new(grid.spacing(), delta, opts.n_bins);
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); bins.len()];
    for p in &samples {
        if let Some(b) = bins.index(p.separation) {
            values[b].push(p.sin_theta);
        }
    }
    let stats: Vec<(f64, usize, f64)> = values
        .iter_mut()
        .enumerate()
        .map(|(b, v)| {
            if v.is_empty() {
                (bins.center(b), 0, 0.0)
            } else {
                (bins.center(b), v.len(), quantile(v, opts.quantile))
            }
        })
        .collect();
    fit_bins(stats, samples.len(), opts.quantile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;

    fn field_of(vs: &[[f64; 3]]) -> VectorField {
        // place the vectors at the first grid points of a tiny grid
        let g = GridSpec::periodic(4).unwrap();
        let mut f = VectorField::zeros(g);
        for (idx, v) in vs.iter().enumerate() {
            for c in 0..3 {
                f.component_mut(c)[idx] = v[c];
            }
        }
        f
    }

    #[test]
    fn sin_theta_examples() {
        let f = field_of(&[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]);
        assert_eq!(sin_theta(&f, 0, 1).unwrap(), 0.0);
        assert_eq!(sin_theta(&f, 0, 2).unwrap(), 1.0);
        assert!((sin_theta(&f, 0, 3).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(sin_theta(&f, 0, 7), Err(Error::UndefinedAngle(7))));
    }

    #[test]
    fn sin_theta_symmetry_and_diagonal() {
        let g = GridSpec::periodic(4).unwrap();
        let f = VectorField::from_fn(g, |x, y, z| [x.sin() + 1.1, (y + z).cos(), x * y - z]);
        for i in 0..g.len() {
            assert_eq!(sin_theta(&f, i, i).unwrap(), 0.0);
            for j in (0..g.len()).step_by(7) {
                assert_eq!(sin_theta(&f, i, j).unwrap(), sin_theta(&f, j, i).unwrap());
            }
        }
    }

    #[test]
    fn quantile_interpolates() {
        let mut v = vec![4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&mut v, 1.0), 4.0);
        assert_eq!(quantile(&mut v, 0.0), 1.0);
        assert!((quantile(&mut v, 0.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 - 2.0 * v).collect();
        let (a, b, r) = linear_fit(&x, &y);
        assert!((a - 0.5).abs() < 1e-14 && (b + 2.0).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn constant_direction_is_degenerate() {
        let g = GridSpec::periodic(16).unwrap();
        let f = VectorField::from_fn(g, |x, y, _| [0.0, 0.0, 1.5 + x.sin() * y.cos()]);
        let fit = estimate_holder(&f, &HolderOptions { n_pairs: 5_000, ..Default::default() }).unwrap();
        assert!(fit.degenerate);
        assert!(fit.beta_hat.is_none());
    }

    #[test]
    fn too_few_bins_is_an_error() {
        let g = GridSpec::periodic(16).unwrap();
        let f = VectorField::from_fn(g, |x, _, _| [x.cos(), x.sin(), 0.0]);
        // cutoff below two grid spacings leaves at most two distinct separations
        let opts = HolderOptions {
            delta_max: Some(1.5 * g.spacing()),
            n_pairs: 2_000,
            k_threshold: Some(0.0),
            ..Default::default()
        };
        assert!(matches!(estimate_holder(&f, &opts), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn invariant_under_magnitude_rescaling() {
        let g = GridSpec::periodic(16).unwrap();
        let f = VectorField::from_fn(g, |x, y, z| [(x + 0.3 * y).cos(), (x - z).sin(), 0.4]);
        let scale = crate::fields::ScalarField::from_fn(g, |x, y, z| 0.5 + (x * y + z).sin().powi(2));
        let mut scaled = f.clone();
        for c in 0..3 {
            for idx in 0..g.len() {
                scaled.component_mut(c)[idx] *= scale[idx];
            }
        }
        let opts = HolderOptions {
            k_threshold: Some(0.0),
            n_pairs: 20_000,
            ..Default::default()
        };
        let a = estimate_holder(&f, &opts).unwrap();
        let b = estimate_holder(&scaled, &opts).unwrap();
        assert_eq!(a.n_pairs, b.n_pairs);
        assert!((a.beta_hat.unwrap() - b.beta_hat.unwrap()).abs() < 1e-12);
        for (x, y) in a.bin_values.iter().zip(&b.bin_values) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn option_validation() {
        let g = GridSpec::periodic(8).unwrap();
        let f = VectorField::from_fn(g, |x, _, _| [x.cos(), x.sin(), 0.0]);
        let bad_q = HolderOptions { quantile: 0.0, ..Default::default() };
        assert!(estimate_holder(&f, &bad_q).is_err());
        let bad_delta = HolderOptions { delta_max: Some(g.l()), ..Default::default() };
        assert!(estimate_holder(&f, &bad_delta).is_err());
        assert!(estimate_holder(&VectorField::zeros(g), &HolderOptions::default()).is_err());
    }
}
