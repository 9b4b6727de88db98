//! Generalized enstrophy `∫(ε+|ω|²)^{1−α}` and the terms of its evolution
//! identity
//!
//! ```text
//! ½ d/dt ∫F + ν[∫f|∇ω|² + 2∫f′(|ω|²)|ω|²|∇|ω||²] = ∫f K,
//! f(s) = (ε+s)^{−α},  F′ = f.
//! ```

use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};
use crate::solver::SimState;
use crate::spectral::Spectral;

use super::kernel::contract;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1/2], got {alpha}")));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be finite and >= 0, got {eps}")));
    }
    Ok(())
}

fn squared_magnitude(omega: &VectorField) -> Vec<f64> {
    (0..omega.grid().len())
        .map(|idx| {
            let w = omega.at(idx);
            w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
        })
        .collect()
}

/// `Σ (ε+|ω|²)^{1−α} · cell volume`.
pub fn generalized_enstrophy(omega: &VectorField, alpha: f64, eps: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_eps(eps)?;
    let p = 1.0 - alpha;
    let sum: f64 = squared_magnitude(omega).iter().map(|s| (eps + s).powf(p)).sum();
    Ok(sum * omega.grid().cell_volume())
}

/// `|ω|` smoothed as `sqrt(|ω|² + ε_mag²)`, `ε_mag = 1e−12 · max|ω|`, so
/// that its spectral gradient does not see the kink at zeros.
pub fn smoothed_magnitude(omega: &VectorField) -> ScalarField {
    let s2 = squared_magnitude(omega);
    let top = s2.iter().cloned().fold(0.0, f64::max).sqrt();
    let e2 = (1e-12 * top).powi(2);
    ScalarField::from_values(*omega.grid(), s2.iter().map(|s| (s + e2).sqrt()).collect())
        .expect("length matches grid")
}

/// `‖∇(|ω|^{1−α})‖₂²`.
pub fn grad_term(spectral: &Spectral, omega: &VectorField, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let g = smoothed_magnitude(omega).map(|m| m.powf(1.0 - alpha));
    let grad = spectral.gradient(&g)?;
    grad.inner(&grad)
}

/// Terms of the balance evaluated at one state of a trajectory. All terms
/// are signed as they appear in the identity above; `dissipation` and both
/// weight terms already carry the factor `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceReport {
    pub t: f64,
    /// `1/(2(1−α)) d/dt ∫(ε+|ω|²)^{1−α}`.
    pub time_derivative: f64,
    /// `ν ∫ f |∇ω|²`.
    pub dissipation: f64,
    /// `2ν ∫ f′(|ω|²) |ω|² |∇|ω||²`.
    pub weight_term: f64,
    /// The same with `|∇ω|²` in place of `|∇|ω||²`.
    pub weight_term_full_gradient: f64,
    /// `∫ f K`.
    pub production: f64,
    /// `|time + dissipation + weight − production|` over the largest term.
    pub residual: f64,
    /// Residual of the identity written with `weight_term_full_gradient`.
    pub residual_full_gradient: f64,
    /// `∫ f|K| − [time + ν(1−2α) ∫ f|∇ω|²]`; nonnegative whenever the
    /// inequality form of the balance holds.
    pub slack: f64,
}

struct Pointwise {
    energy_like: f64,
    dissipation: f64,
    weight: f64,
    weight_full: f64,
    production: f64,
    production_abs: f64,
}

fn pointwise_terms(spectral: &Spectral, state: &SimState, alpha: f64, eps: f64) -> Result<Pointwise> {
    let grid = *spectral.grid();
    let omega_hat = spectral.curl_hat(&state.uhat);
    let omega = spectral.inverse(&omega_hat);
    let u = spectral.inverse(&state.uhat);
    let grad_u = spectral.velocity_gradient(&u)?;
    let k = contract(&grad_u, &omega);
    let grad_w = spectral.velocity_gradient(&omega)?;
    let mag = smoothed_magnitude(&omega);
    let grad_mag = spectral.gradient(&mag)?;
    let s2 = squared_magnitude(&omega);
    let dv = grid.cell_volume();

    let mut out = Pointwise {
        energy_like: 0.0,
        dissipation: 0.0,
        weight: 0.0,
        weight_full: 0.0,
        production: 0.0,
        production_abs: 0.0,
    };
    for idx in 0..grid.len() {
        let s = s2[idx];
        let base = eps + s;
        // f and f' vanish-safe: at α = 0 the weight is 1 and f' = 0 even
        // where ε + s = 0.
        let (f, fp) = if alpha == 0.0 {
            (1.0, 0.0)
        } else if base > 0.0 {
            (base.powf(-alpha), -alpha * base.powf(-alpha - 1.0))
        } else {
            (0.0, 0.0)
        };
        let mut gw2 = 0.0;
        for row in &grad_w {
            for c in row {
                gw2 += c[idx] * c[idx];
            }
        }
        let gm = grad_mag.at(idx);
        let gm2 = gm[0] * gm[0] + gm[1] * gm[1] + gm[2] * gm[2];
        out.energy_like += base.powf(1.0 - alpha);
        out.dissipation += f * gw2;
        out.weight += 2.0 * fp * s * gm2;
        out.weight_full += 2.0 * fp * s * gw2;
        out.production += f * k[idx];
        out.production_abs += f * k[idx].abs();
    }
    out.energy_like *= dv;
    out.dissipation *= dv;
    out.weight *= dv;
    out.weight_full *= dv;
    out.production *= dv;
    out.production_abs *= dv;
    Ok(out)
}

fn normalized(terms: [f64; 4], lhs: f64, rhs: f64) -> f64 {
    let scale = terms.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Balance terms at `samples[center]`. Samples must be equally spaced in
/// time. With three samples the time derivative is second order (centred,
/// or one-sided at the ends of the stencil); two samples give a first-order
/// difference.
pub fn balance_residual(
    spectral: &Spectral,
    samples: &[&SimState],
    center: usize,
    nu: f64,
    alpha: f64,
    eps: f64,
) -> Result<BalanceReport> {
    check_alpha(alpha)?;
    check_eps(eps)?;
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "balance needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if center >= samples.len() {
        return Err(Error::Domain(format!("center {center} outside {} samples", samples.len())));
    }
    // use at most three samples around the centre
    let lo = center.saturating_sub(1).min(samples.len().saturating_sub(3));
    let window = &samples[lo..samples.len().min(lo + 3)];
    let c = center - lo;
    let dt = window[1].t - window[0].t;
    for pair in window.windows(2) {
        let d = pair[1].t - pair[0].t;
        if !(d > 0.0) || (d - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
            return Err(Error::Domain("balance samples must be strictly increasing and equally spaced".into()));
        }
    }
    for s in window {
        s.uhat.grid().ensure_same(spectral.grid())?;
    }

    let here = pointwise_terms(spectral, window[c], alpha, eps)?;
    let energies: Vec<f64> = window
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i == c {
                Ok(here.energy_like)
            } else {
                Ok(pointwise_terms(spectral, s, alpha, eps)?.energy_like)
            }
        })
        .collect::<Result<_>>()?;
    let de = match (energies.len(), c) {
        (2, _) => (energies[1] - energies[0]) / dt,
        (_, 0) => (-3.0 * energies[0] + 4.0 * energies[1] - energies[2]) / (2.0 * dt),
        (_, 1) => (energies[2] - energies[0]) / (2.0 * dt),
        _ => (energies[0] - 4.0 * energies[1] + 3.0 * energies[2]) / (2.0 * dt),
    };
    let time_derivative = de / (2.0 * (1.0 - alpha));
    let dissipation = nu * here.dissipation;
    let weight_term = nu * here.weight;
    let weight_term_full_gradient = nu * here.weight_full;
    let production = here.production;

    let residual = normalized(
        [time_derivative, dissipation, weight_term, production],
        time_derivative + dissipation + weight_term,
        production,
    );
    let residual_full_gradient = normalized(
        [time_derivative, dissipation, weight_term_full_gradient, production],
        time_derivative + dissipation + weight_term_full_gradient,
        production,
    );
    let slack = here.production_abs - (time_derivative + nu * (1.0 - 2.0 * alpha) * here.dissipation);
    Ok(BalanceReport {
        t: window[c].t,
        time_derivative,
        dissipation,
        weight_term,
        weight_term_full_gradient,
        production,
        residual,
        residual_full_gradient,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{lp_norm, GridSpec};
    use proptest::prelude::*;

    fn sample_field(g: GridSpec, shift: f64) -> VectorField {
        VectorField::from_fn(g, |x, y, z| {
            [(x + shift).sin() + 0.2 * y.cos(), (y - z).cos(), 0.5 * (z + x).sin() + shift]
        })
    }

    #[test]
    fn reduces_to_enstrophy_at_alpha_zero() {
        let g = GridSpec::periodic(8).unwrap();
        let w = sample_field(g, 0.3);
        let e = generalized_enstrophy(&w, 0.0, 0.0).unwrap();
        assert!((e - w.inner(&w).unwrap()).abs() <= 1e-12 * e);
    }

    #[test]
    fn zero_field_with_eps() {
        let g = GridSpec::new(4, 3.0).unwrap();
        let e = generalized_enstrophy(&VectorField::zeros(g), 0.25, 0.5).unwrap();
        assert!((e - 0.5_f64.powf(0.75) * 27.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_alpha_matches_three_halves_norm() {
        let g = GridSpec::periodic(8).unwrap();
        let w = sample_field(g, 1.1);
        let e = generalized_enstrophy(&w, 0.25, 0.0).unwrap();
        let n = lp_norm(&w.magnitude(), 1.5).unwrap().powf(1.5);
        assert!((e - n).abs() <= 1e-12 * n);
    }

    #[test]
    fn alpha_domain() {
        let g = GridSpec::periodic(4).unwrap();
        let w = VectorField::zeros(g);
        assert!(matches!(generalized_enstrophy(&w, 0.6, 0.0), Err(Error::Domain(_))));
        assert!(matches!(generalized_enstrophy(&w, -0.1, 0.0), Err(Error::Domain(_))));
        assert!(generalized_enstrophy(&w, 0.5, 0.0).is_ok());
    }

    #[test]
    fn continuous_as_eps_vanishes() {
        let g = GridSpec::periodic(8).unwrap();
        let w = sample_field(g, 0.7);
        for alpha in [0.0, 0.2, 0.5] {
            let e0 = generalized_enstrophy(&w, alpha, 0.0).unwrap();
            let e = generalized_enstrophy(&w, alpha, 1e-12).unwrap();
            assert!((e - e0).abs() <= 1e-8 * e0, "alpha {alpha}");
        }
    }

    proptest! {
        #[test]
        fn non_increasing_in_alpha_above_one(a1 in 0.0..0.5f64, a2 in 0.0..0.5f64, shift in 0.0..3.0f64, eps in 0.0..2.0f64) {
            let g = GridSpec::periodic(4).unwrap();
            // |ω| >= 1 everywhere
            let w = VectorField::from_fn(g, |x, y, _| [1.5 + (x + shift).sin() * 0.4, y.cos(), 0.0]);
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let e_lo = generalized_enstrophy(&w, lo, eps).unwrap();
            let e_hi = generalized_enstrophy(&w, hi, eps).unwrap();
            prop_assert!(e_hi <= e_lo * (1.0 + 1e-14));
        }
    }

    #[test]
    fn grad_term_at_alpha_zero_is_gradient_of_magnitude() {
        // |ω| = 2 + sin x along a fixed direction
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        let w = VectorField::from_fn(g, |x, _, _| [0.0, 2.0 + x.sin(), 0.0]);
        let v = grad_term(&sp, &w, 0.0).unwrap();
        // ∫cos²x over the box = 4π³
        let expected = 4.0 * std::f64::consts::PI.powi(3);
        assert!((v - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn zero_field_balances_trivially() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let mut s = SimState::from_velocity(&sp, &VectorField::zeros(g), 0.0);
        let s0 = s.clone();
        s.t = 0.1;
        let s1 = s.clone();
        s.t = 0.2;
        let r = balance_residual(&sp, &[&s0, &s1, &s], 1, 1.0, 0.25, 0.0).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.time_derivative, 0.0);
    }

    #[test]
    fn frozen_field_has_no_time_derivative() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let u = crate::solver::taylor_green_velocity(g);
        let a = SimState::from_velocity(&sp, &u, 0.0);
        let b = SimState::from_velocity(&sp, &u, 0.01);
        let r = balance_residual(&sp, &[&a, &b], 0, 1.0, 0.25, 0.1).unwrap();
        assert_eq!(r.time_derivative, 0.0);
        assert!(r.residual.is_finite() && r.residual > 0.0);
    }

    #[test]
    fn sample_checks() {
        let g = GridSpec::periodic(4).unwrap();
        let sp = Spectral::new(g);
        let a = SimState::from_velocity(&sp, &VectorField::zeros(g), 0.0);
        assert!(matches!(
            balance_residual(&sp, &[&a], 0, 1.0, 0.0, 0.0),
            Err(Error::InsufficientData(_))
        ));
        // repeated times are not a valid stencil
        assert!(balance_residual(&sp, &[&a, &a, &a], 1, 1.0, 0.0, 0.0).is_err());
    }
}
