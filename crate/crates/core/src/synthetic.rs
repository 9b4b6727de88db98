//! Synthetic vorticity fields with prescribed direction regularity, used to
//! calibrate the Hölder estimator.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::spectral::Spectral;

/// Unit-magnitude field `(cos g, sin g, 0)` scaled pointwise by `amp`.
pub fn planar_direction_field(g: &ScalarField, amp: impl Fn(f64, f64, f64) -> f64) -> VectorField {
    let grid = *g.grid();
    let mut out = VectorField::zeros(grid);
    for idx in 0..grid.len() {
        let [x, y, z] = grid.position(idx);
        let a = amp(x, y, z);
        out.component_mut(0)[idx] = a * g[idx].cos();
        out.component_mut(1)[idx] = a * g[idx].sin();
    }
    out
}

/// Direction angle `g = sin x`: a Lipschitz direction field.
pub fn smooth_direction_field(grid: GridSpec) -> VectorField {
    let g = ScalarField::from_fn(grid, |x, _, _| x.sin());
    planar_direction_field(&g, |_, _, _| 1.0)
}

/// Lacunary cosine series `Σ_{j=0}^{J} 2^{−j/2} cos(2^j x)`. As `J → ∞` it is
/// Hölder of order exactly 1/2; on a grid, `J = log2(n) − 1` keeps every
/// term resolved.
pub fn weierstrass(x: f64, levels: u32) -> f64 {
    (0..=levels)
        .map(|j| 2f64.powf(-0.5 * j as f64) * (2f64.powi(j as i32) * x).cos())
        .sum()
}

/// Number of resolved octaves on a grid with `n` points per side.
pub fn weierstrass_levels(n: usize) -> u32 {
    (n as f64).log2().floor() as u32 - 1
}

/// Angle profile `0.2 (W(x) + W(y) + W(z))` built from [`weierstrass`].
pub fn half_holder_angle(grid: GridSpec) -> ScalarField {
    let levels = weierstrass_levels(grid.n());
    ScalarField::from_fn(grid, |x, y, z| {
        0.2 * (weierstrass(x, levels) + weierstrass(y, levels) + weierstrass(z, levels))
    })
}

/// Direction field whose angle profile is [`half_holder_angle`], with a
/// smooth positive magnitude.
pub fn half_holder_direction_field(grid: GridSpec) -> VectorField {
    planar_direction_field(&half_holder_angle(grid), |x, y, _| 1.5 + 0.5 * (x + y).sin())
}

/// Everything parallel to `e3`, magnitude varying.
pub fn constant_direction_field(grid: GridSpec) -> VectorField {
    VectorField::from_fn(grid, |x, y, z| [0.0, 0.0, 2.0 + x.sin() * y.cos() + 0.5 * z.sin()])
}

/// Real part of Gaussian random modes with `max |m_i| <= kmax`.
pub fn band_limited_scalar(spectral: &Spectral, kmax: i64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<Complex64> = (0..spectral.grid().len())
        .map(|idx| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if spectral.mode_index(idx).iter().all(|m| m.abs() <= kmax) {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    spectral.ifft_scalar(modes)
}

/// Band-limited random field shifted to have minimum zero.
pub fn band_limited_nonnegative(spectral: &Spectral, kmax: i64, seed: u64) -> ScalarField {
    let f = band_limited_scalar(spectral, kmax, seed);
    let m = f.min();
    f.map(|v| v - m)
}

/// Three independent [`band_limited_scalar`] components.
pub fn band_limited_vector(spectral: &Spectral, kmax: i64, seed: u64) -> VectorField {
    VectorField::new(std::array::from_fn(|c| {
        band_limited_scalar(spectral, kmax, seed.wrapping_mul(3).wrapping_add(c as u64))
    }))
    .expect("components share the grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_have_expected_magnitudes() {
        let g = GridSpec::periodic(8).unwrap();
        let s = smooth_direction_field(g);
        assert!(s.magnitude().values().iter().all(|m| (m - 1.0).abs() < 1e-15));
        let h = half_holder_direction_field(g);
        assert!(h.magnitude().min() >= 1.0 - 1e-15);
        assert!(h.component(2).values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn weierstrass_levels_by_grid() {
        assert_eq!(weierstrass_levels(32), 4);
        assert_eq!(weierstrass_levels(64), 5);
        assert!((weierstrass(0.0, 3) - (1.0 + 2f64.powf(-0.5) + 0.5 + 2f64.powf(-1.5))).abs() < 1e-15);
    }
}
