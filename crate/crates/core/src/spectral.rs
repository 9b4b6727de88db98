//! Fourier-space differential operators on the periodic box.
//!
//! Forward transforms are unnormalized; inverse transforms divide by `n³`
//! and keep the real part. Integer mode index `m` maps to the signed
//! wavenumber in `(-n/2, n/2]`, scaled by `2π/l`.
//!
//! First derivatives use a wavenumber that is zero on the Nyquist plane
//! (`m = n/2`), since `i·k` there would break Hermitian symmetry. Every
//! operator here (including the Laplacian) is built from that same
//! derivative symbol, so discrete identities such as `div∘curl = 0` and
//! `curl∘biot_savart = id` hold to rounding.

use std::sync::Arc;

use log::debug;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::fields::{GridSpec, ScalarField, VectorField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Vector field in Fourier space, one mode array per component, in FFT
/// index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    modes: [Vec<Complex64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            modes: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); grid.len()]),
        }
    }

    pub fn from_modes(grid: GridSpec, modes: [Vec<Complex64>; 3]) -> Result<Self> {
        if modes.iter().any(|m| m.len() != grid.len()) {
            return Err(crate::Error::InvalidField("mode array length mismatch".into()));
        }
        Ok(Self { grid, modes })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn modes(&self) -> &[Vec<Complex64>; 3] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.modes
    }

    pub fn is_finite(&self) -> bool {
        self.modes
            .iter()
            .all(|m| m.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    /// `½ ∫|u|² dx` by Parseval.
    pub fn energy(&self) -> f64 {
        let n3 = self.grid.len() as f64;
        let s: f64 = self
            .modes
            .iter()
            .flat_map(|m| m.iter())
            .map(|c| c.norm_sqr())
            .sum();
        0.5 * s * self.grid.cell_volume() / n3
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            modes: std::array::from_fn(|i| self.modes[i].iter().map(|z| z * c).collect()),
        }
    }

    /// `self + c * other`, componentwise.
    pub fn axpy(&self, c: f64, other: &SpectralField) -> Self {
        Self {
            grid: self.grid,
            modes: std::array::from_fn(|i| {
                self.modes[i]
                    .iter()
                    .zip(&other.modes[i])
                    .map(|(a, b)| a + b * c)
                    .collect()
            }),
        }
    }

    /// Largest mode amplitude over all components.
    pub fn max_abs(&self) -> f64 {
        self.modes
            .iter()
            .flat_map(|m| m.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// FFT plans plus wavenumber tables for one grid.
pub struct Spectral {
    grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    index: Vec<i64>,
    wave: Vec<f64>,
    deriv: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scale = 2.0 * std::f64::consts::PI / grid.l();
        let index: Vec<i64> = (0..n)
            .map(|m| {
                let m = m as i64;
                if m <= n as i64 / 2 {
                    m
                } else {
                    m - n as i64
                }
            })
            .collect();
        let wave: Vec<f64> = index.iter().map(|&m| m as f64 * scale).collect();
        let deriv = index
            .iter()
            .map(|&m| {
                if 2 * m == n as i64 {
                    0.0
                } else {
                    m as f64 * scale
                }
            })
            .collect();
        Self {
            grid,
            fwd,
            inv,
            index,
            wave,
            deriv,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Signed integer mode indices of flat spectral index `idx`.
    #[inline]
    pub fn mode_index(&self, idx: usize) -> [i64; 3] {
        let [a, b, c] = self.grid.unflat(idx);
        [self.index[a], self.index[b], self.index[c]]
    }

    /// Physical wavenumber vector (Nyquist kept).
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.grid.unflat(idx);
        [self.wave[a], self.wave[b], self.wave[c]]
    }

    /// Wavenumber used for first derivatives (Nyquist zeroed).
    #[inline]
    pub fn deriv_vector(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.grid.unflat(idx);
        [self.deriv[a], self.deriv[b], self.deriv[c]]
    }

    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    #[inline]
    fn deriv_squared(&self, idx: usize) -> f64 {
        let k = self.deriv_vector(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // z lines are contiguous
        plan.process_with_scratch(buf, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    line[j] = buf[self.grid.flat(i, j, k)];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    buf[self.grid.flat(i, j, k)] = line[j];
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    line[i] = buf[self.grid.flat(i, j, k)];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for i in 0..n {
                    buf[self.grid.flat(i, j, k)] = line[i];
                }
            }
        }
    }

    pub fn fft_scalar(&self, f: &ScalarField) -> Vec<Complex64> {
        debug_assert_eq!(f.grid(), &self.grid);
        let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.fwd);
        buf
    }

    pub fn ifft_scalar(&self, mut modes: Vec<Complex64>) -> ScalarField {
        self.transform(&mut modes, &self.inv);
        let norm = 1.0 / self.grid.len() as f64;
        let values = modes.into_iter().map(|c| c.re * norm).collect();
        ScalarField::from_values(self.grid, values).expect("length preserved by transform")
    }

    pub fn forward(&self, v: &VectorField) -> SpectralField {
        SpectralField {
            grid: self.grid,
            modes: std::array::from_fn(|c| self.fft_scalar(v.component(c))),
        }
    }

    pub fn inverse(&self, v: &SpectralField) -> VectorField {
        let comps = std::array::from_fn(|c| self.ifft_scalar(v.modes[c].clone()));
        VectorField::new(comps).expect("components share the grid")
    }

    pub fn curl_hat(&self, v: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        for idx in 0..self.grid.len() {
            let k = self.deriv_vector(idx);
            let a = [v.modes[0][idx], v.modes[1][idx], v.modes[2][idx]];
            out.modes[0][idx] = I * (a[2] * k[1] - a[1] * k[2]);
            out.modes[1][idx] = I * (a[0] * k[2] - a[2] * k[0]);
            out.modes[2][idx] = I * (a[1] * k[0] - a[0] * k[1]);
        }
        out
    }

    pub fn divergence_hat(&self, v: &SpectralField) -> Vec<Complex64> {
        (0..self.grid.len())
            .map(|idx| {
                let k = self.deriv_vector(idx);
                I * (v.modes[0][idx] * k[0] + v.modes[1][idx] * k[1] + v.modes[2][idx] * k[2])
            })
            .collect()
    }

    pub fn gradient_hat(&self, f: &[Complex64]) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        for (idx, &fh) in f.iter().enumerate() {
            let k = self.deriv_vector(idx);
            for c in 0..3 {
                out.modes[c][idx] = I * k[c] * fh;
            }
        }
        out
    }

    /// Removes the longitudinal part: `v̂ - k (k·v̂)/|k|²`.
    pub fn leray_hat(&self, v: &SpectralField) -> SpectralField {
        let mut out = v.clone();
        for idx in 0..self.grid.len() {
            let k = self.deriv_vector(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                continue;
            }
            let kv = (v.modes[0][idx] * k[0] + v.modes[1][idx] * k[1] + v.modes[2][idx] * k[2]) / k2;
            for c in 0..3 {
                out.modes[c][idx] -= kv * k[c];
            }
        }
        out
    }

    /// Solves `-Δu = ∇×ω` for mean-free `u`.
    pub fn biot_savart_hat(&self, omega: &SpectralField) -> SpectralField {
        let mut out = self.curl_hat(omega);
        for idx in 0..self.grid.len() {
            let k2 = self.deriv_squared(idx);
            for c in 0..3 {
                out.modes[c][idx] = if k2 == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    out.modes[c][idx] / k2
                };
            }
        }
        out
    }

    /// Two-thirds rule: true for modes that survive dealiasing.
    #[inline]
    pub fn keeps_mode(&self, idx: usize) -> bool {
        let n = self.grid.n() as i64;
        self.mode_index(idx).iter().all(|&m| 3 * m.abs() <= n)
    }

    pub fn dealias_scalar(&self, f: &mut [Complex64]) {
        for (idx, c) in f.iter_mut().enumerate() {
            if !self.keeps_mode(idx) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Zeroes every mode with some `|m_i| > n/3`.
    pub fn dealias(&self, v: &SpectralField) -> SpectralField {
        let mut out = v.clone();
        for m in out.modes.iter_mut() {
            self.dealias_scalar(m);
        }
        out
    }

    pub fn curl(&self, v: &VectorField) -> Result<VectorField> {
        v.grid().ensure_same(&self.grid)?;
        Ok(self.inverse(&self.curl_hat(&self.forward(v))))
    }

    pub fn divergence(&self, v: &VectorField) -> Result<ScalarField> {
        v.grid().ensure_same(&self.grid)?;
        Ok(self.ifft_scalar(self.divergence_hat(&self.forward(v))))
    }

    pub fn gradient(&self, f: &ScalarField) -> Result<VectorField> {
        f.grid().ensure_same(&self.grid)?;
        Ok(self.inverse(&self.gradient_hat(&self.fft_scalar(f))))
    }

    /// `∇·∇ f`, built from the same derivative symbol as `gradient`.
    pub fn laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        f.grid().ensure_same(&self.grid)?;
        let mut fh = self.fft_scalar(f);
        for (idx, c) in fh.iter_mut().enumerate() {
            *c *= -self.deriv_squared(idx);
        }
        Ok(self.ifft_scalar(fh))
    }

    pub fn vector_laplacian(&self, v: &VectorField) -> Result<VectorField> {
        let comps = [
            self.laplacian(v.component(0))?,
            self.laplacian(v.component(1))?,
            self.laplacian(v.component(2))?,
        ];
        VectorField::new(comps)
    }

    pub fn leray_project(&self, v: &VectorField) -> Result<VectorField> {
        v.grid().ensure_same(&self.grid)?;
        Ok(self.inverse(&self.leray_hat(&self.forward(v))))
    }

    pub fn biot_savart(&self, omega: &VectorField) -> Result<VectorField> {
        omega.grid().ensure_same(&self.grid)?;
        let oh = self.forward(omega);
        let tol = 1e-12 * oh.max_abs().max(f64::MIN_POSITIVE);
        if oh.modes.iter().any(|m| m[0].norm() > tol) {
            debug!("biot_savart: dropping nonzero mean of the vorticity");
        }
        Ok(self.inverse(&self.biot_savart_hat(&oh)))
    }

    /// `∂_i v_j` as `grad[i][j]`.
    pub fn velocity_gradient(&self, v: &VectorField) -> Result<[[ScalarField; 3]; 3]> {
        v.grid().ensure_same(&self.grid)?;
        let vh = self.forward(v);
        let mut out: [[Option<ScalarField>; 3]; 3] = Default::default();
        for (j, comp) in vh.modes.iter().enumerate() {
            let g = self.gradient_hat(comp);
            for (i, row) in out.iter_mut().enumerate() {
                row[j] = Some(self.ifft_scalar(g.modes[i].clone()));
            }
        }
        Ok(out.map(|row| row.map(|f| f.expect("filled above"))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{linf_norm, GridSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn abc(grid: GridSpec, a: f64, b: f64, c: f64) -> VectorField {
        VectorField::from_fn(grid, |x, y, z| {
            [
                a * z.sin() + c * y.cos(),
                b * x.sin() + a * z.cos(),
                c * y.sin() + b * x.cos(),
            ]
        })
    }

    fn random_field(grid: GridSpec, seed: u64) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps = std::array::from_fn(|_| {
            let vals = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            ScalarField::from_values(grid, vals).unwrap()
        });
        VectorField::new(comps).unwrap()
    }

    fn rel_max(a: &VectorField, scale: f64) -> f64 {
        linf_norm(a).unwrap() / scale
    }

    #[test]
    fn curl_of_constant_is_zero() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let v = VectorField::from_fn(g, |_, _, _| [1.0, -2.0, 0.5]);
        assert!(linf_norm(&sp.curl(&v).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn curl_of_shear() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let v = VectorField::from_fn(g, |x, _, _| [0.0, 0.0, x.sin()]);
        let w = sp.curl(&v).unwrap();
        let expect = VectorField::from_fn(g, |x, _, _| [0.0, -x.cos(), 0.0]);
        // (∇×v)_y = ∂_z v_x - ∂_x v_z = -cos x
        assert!(linf_norm(&w.axpy(-1.0, &expect).unwrap()).unwrap() < 1e-13);
    }

    #[test]
    fn abc_is_beltrami() {
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        let u = abc(g, 1.0, 0.7, 0.3);
        let w = sp.curl(&u).unwrap();
        assert!(linf_norm(&w.axpy(-1.0, &u).unwrap()).unwrap() < 1e-13);
    }

    #[test]
    fn divergence_and_gradient_basics() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let v = VectorField::from_fn(g, |x, _, _| [x.sin(), 0.0, 0.0]);
        let d = sp.divergence(&v).unwrap();
        let expect = ScalarField::from_fn(g, |x, _, _| x.cos());
        let err = d.values().iter().zip(expect.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13);
        let grad = sp.gradient(&ScalarField::constant(g, 4.0)).unwrap();
        assert!(linf_norm(&grad).unwrap() < 1e-14);
    }

    #[test]
    fn vector_calculus_identities_on_random_fields() {
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        for seed in 0..3 {
            let v = random_field(g, seed);
            let curl = sp.curl(&v).unwrap();
            let scale = linf_norm(&curl).unwrap();
            let dc = sp.divergence(&curl).unwrap();
            assert!(linf_norm(&dc).unwrap() / scale < 1e-12);

            let phi = v.component(0).clone();
            let grad = sp.gradient(&phi).unwrap();
            let cg = sp.curl(&grad).unwrap();
            assert!(rel_max(&cg, linf_norm(&grad).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn leray_kills_gradients_and_is_idempotent() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let grad = VectorField::from_fn(g, |x, _, _| [x.cos(), 0.0, 0.0]);
        assert!(linf_norm(&sp.leray_project(&grad).unwrap()).unwrap() < 1e-14);

        let u = abc(g, 1.0, 1.0, 1.0);
        let pu = sp.leray_project(&u).unwrap();
        assert!(linf_norm(&pu.axpy(-1.0, &u).unwrap()).unwrap() < 1e-13);

        let v = random_field(GridSpec::periodic(16).unwrap(), 9);
        let sp16 = Spectral::new(*v.grid());
        let p = sp16.leray_project(&v).unwrap();
        let div = sp16.divergence(&p).unwrap();
        assert!(linf_norm(&div).unwrap() / linf_norm(&p).unwrap() < 1e-12);
        let pp = sp16.leray_project(&p).unwrap();
        assert!(linf_norm(&pp.axpy(-1.0, &p).unwrap()).unwrap() / linf_norm(&p).unwrap() < 1e-13);
    }

    #[test]
    fn biot_savart_of_abc_is_abc() {
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        let w = abc(g, 1.0, 1.0, 1.0);
        let u = sp.biot_savart(&w).unwrap();
        assert!(linf_norm(&u.axpy(-1.0, &w).unwrap()).unwrap() < 1e-13);
        let z = sp.biot_savart(&VectorField::zeros(g)).unwrap();
        assert_eq!(linf_norm(&z).unwrap(), 0.0);
    }

    #[test]
    fn biot_savart_residual_on_random_solenoidal() {
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        let w = sp.curl(&random_field(g, 3)).unwrap();
        let u = sp.biot_savart(&w).unwrap();
        let div = sp.divergence(&u).unwrap();
        assert!(linf_norm(&div).unwrap() / linf_norm(&u).unwrap() < 1e-11);
        let lap = sp.vector_laplacian(&u).unwrap();
        let cw = sp.curl(&w).unwrap();
        // -Δu - ∇×ω
        let res = lap.scaled(-1.0).axpy(-1.0, &cw).unwrap();
        assert!(linf_norm(&res).unwrap() / linf_norm(&cw).unwrap() < 1e-11);
        // curl(u) = ω
        let back = sp.curl(&u).unwrap();
        assert!(linf_norm(&back.axpy(-1.0, &w).unwrap()).unwrap() / linf_norm(&w).unwrap() < 1e-11);
    }

    #[test]
    fn dealias_rules() {
        let g = GridSpec::periodic(12).unwrap();
        let sp = Spectral::new(g);
        let low = VectorField::from_fn(g, |x, y, _| [(4.0 * x).sin(), (2.0 * y).cos(), 0.0]);
        let lh = sp.forward(&low);
        let kept = sp.dealias(&lh);
        assert!(kept.axpy(-1.0, &lh).max_abs() < 1e-12 * lh.max_abs());
        let high = VectorField::from_fn(g, |x, _, _| [(5.0 * x).cos(), 0.0, 0.0]);
        let hh = sp.dealias(&sp.forward(&high));
        assert!(hh.max_abs() < 1e-12);

        let v = random_field(g, 1);
        let vh = sp.forward(&v);
        assert!(sp.dealias(&vh).energy() <= vh.energy());
    }

    #[test]
    fn parseval_energy_matches_quadrature() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let v = random_field(g, 5);
        let direct = 0.5 * v.inner(&v).unwrap();
        assert!((sp.forward(&v).energy() - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let sp = Spectral::new(GridSpec::periodic(8).unwrap());
        let v = VectorField::zeros(GridSpec::periodic(4).unwrap());
        assert!(matches!(sp.curl(&v), Err(crate::Error::GridMismatch { .. })));
    }
}
