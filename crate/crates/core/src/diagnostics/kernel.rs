//! Vortex-stretching kernel and the Riesz-potential bounds built on it.

use crate::error::{Error, Result};
use crate::fields::{lp_norm, ScalarField, VectorField};
use crate::riesz::{riesz_potential, RieszBackend, RieszKernel};
use crate::spectral::Spectral;

/// `K = ((ω·∇)u)·ω = Σ_ij ω_i ∂_i u_j ω_j`, with `∇u` taken spectrally.
#[allow(non_snake_case)]
pub fn kernel_K(spectral: &Spectral, u: &VectorField, omega: &VectorField) -> Result<ScalarField> {
    u.grid().ensure_same(omega.grid())?;
    let grad = spectral.velocity_gradient(u)?;
    Ok(contract(&grad, omega))
}

pub(crate) fn contract(grad: &[[ScalarField; 3]; 3], omega: &VectorField) -> ScalarField {
    let grid = *omega.grid();
    let mut k = ScalarField::zeros(grid);
    for idx in 0..grid.len() {
        let w = omega.at(idx);
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += w[i] * grad[i][j][idx] * w[j];
            }
        }
        k[idx] = acc;
    }
    k
}

/// Smallest `c` with `|K| <= c |ω|² I` on the grid, where `I` is the
/// direct-sum Riesz potential of `|ω|`.
pub fn riesz_bound_constant(
    spectral: &Spectral,
    u: &VectorField,
    omega: &VectorField,
    beta: f64,
) -> Result<f64> {
    let kernel = RieszKernel::new(*spectral.grid(), beta, 1)?;
    riesz_bound_constant_with(spectral, &kernel, u, omega)
}

/// As [`riesz_bound_constant`] with a prebuilt kernel.
pub fn riesz_bound_constant_with(
    spectral: &Spectral,
    kernel: &RieszKernel,
    u: &VectorField,
    omega: &VectorField,
) -> Result<f64> {
    u.grid().ensure_same(omega.grid())?;
    kernel.grid().ensure_same(omega.grid())?;
    let mag = omega.magnitude();
    if mag.max() == 0.0 {
        return Err(Error::Degenerate("vorticity vanishes identically".into()));
    }
    let i_field = kernel.apply(spectral, &mag);
    let k = kernel_K(spectral, u, omega)?;
    let denom: Vec<f64> = mag
        .values()
        .iter()
        .zip(i_field.values())
        .map(|(m, i)| m * m * i)
        .collect();
    let top = denom.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = 1e-12 * top;
    let mut c = f64::NEG_INFINITY;
    for (kv, d) in k.values().iter().zip(&denom) {
        if *d > floor {
            c = c.max(kv.abs() / d);
        }
    }
    if !(top > 0.0) || c == f64::NEG_INFINITY {
        return Err(Error::Degenerate("every point lies below the floor".into()));
    }
    Ok(c)
}

/// `‖I_β|ω|‖_q / ‖ω‖_r̂` with `1/q = 1/r̂ − β/3`. Returns 0 for `ω = 0`.
pub fn riesz_mapping_ratio(spectral: &Spectral, omega: &VectorField, beta: f64, r_hat: f64) -> Result<f64> {
    if !(r_hat > 1.0 && r_hat < 3.0) {
        return Err(Error::Domain(format!("r_hat must lie in (1, 3), got {r_hat}")));
    }
    if !(beta > 0.0 && beta < 3.0) {
        return Err(Error::Domain(format!("beta must lie in (0, 3), got {beta}")));
    }
    let inv_q = 1.0 / r_hat - beta / 3.0;
    if !(inv_q > 0.0) {
        return Err(Error::Domain(format!(
            "1/r_hat - beta/3 = {inv_q} leaves no finite target exponent"
        )));
    }
    let mag = omega.magnitude();
    let denom = lp_norm(&mag, r_hat)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    let i_field = riesz_potential(spectral, &mag, beta, RieszBackend::DirectSum { images: 1 })?;
    Ok(lp_norm(&i_field, 1.0 / inv_q)? / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use crate::solver::abc_velocity;

    #[test]
    fn zero_velocity_gives_zero_kernel_and_constant() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let omega = VectorField::from_fn(g, |x, y, _| [x.sin() + 2.0, y.cos(), 0.3]);
        let u = VectorField::zeros(g);
        let k = kernel_K(&sp, &u, &omega).unwrap();
        assert!(k.values().iter().all(|v| *v == 0.0));
        assert_eq!(riesz_bound_constant(&sp, &u, &omega, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn structural_zero() {
        // ω ∥ e1 and u independent of x1: only ∂1 u1 could contribute.
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let omega = VectorField::from_fn(g, |x, y, z| [1.0 + (x + y).sin().powi(2) + z.cos(), 0.0, 0.0]);
        let u = VectorField::from_fn(g, |_, y, z| [y.sin() * z.cos(), (2.0 * z).cos(), y.cos()]);
        let k = kernel_K(&sp, &u, &omega).unwrap();
        assert!(k.values().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = GridSpec::periodic(8).unwrap();
        let b = GridSpec::periodic(4).unwrap();
        let sp = Spectral::new(a);
        let r = kernel_K(&sp, &VectorField::zeros(a), &VectorField::zeros(b));
        assert!(matches!(r, Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn bound_constant_scale_invariant() {
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        let u = abc_velocity(g, 1.0, 0.8, 0.6);
        let omega = sp.curl(&u).unwrap();
        let c1 = riesz_bound_constant(&sp, &u, &omega, 0.5).unwrap();
        let c2 = riesz_bound_constant(&sp, &u.scaled(2.0), &omega.scaled(2.0), 0.5).unwrap();
        assert!(c1.is_finite() && c1 > 0.0);
        assert!((c1 - c2).abs() <= 1e-12 * c1);
    }

    #[test]
    fn zero_vorticity_is_degenerate() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        let z = VectorField::zeros(g);
        assert!(matches!(riesz_bound_constant(&sp, &z, &z, 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn mapping_ratio_conventions() {
        let g = GridSpec::periodic(8).unwrap();
        let sp = Spectral::new(g);
        assert_eq!(riesz_mapping_ratio(&sp, &VectorField::zeros(g), 0.5, 2.0).unwrap(), 0.0);
        let w = VectorField::from_fn(g, |x, y, z| [x.sin(), (y + z).cos(), 0.5]);
        let a = riesz_mapping_ratio(&sp, &w, 0.5, 2.0).unwrap();
        let b = riesz_mapping_ratio(&sp, &w.scaled(3.5), 0.5, 2.0).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        assert!(riesz_mapping_ratio(&sp, &w, 0.5, 3.0).is_err());
        assert!(riesz_mapping_ratio(&sp, &w, 0.0, 2.0).is_err());
    }
}
