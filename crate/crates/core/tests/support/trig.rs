//! Band-limited random vector fields as explicit trigonometric sums, so
//! that values and derivatives can be evaluated off-grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone)]
pub struct TrigField {
    // (wavevector, cos amplitude, sin amplitude) per term
    terms: Vec<([f64; 3], [f64; 3], [f64; 3])>,
}

impl TrigField {
    pub fn random(seed: u64, kmax: i32, n_terms: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        while terms.len() < n_terms {
            let k = [
                rng.random_range(-kmax..=kmax) as f64,
                rng.random_range(-kmax..=kmax) as f64,
                rng.random_range(-kmax..=kmax) as f64,
            ];
            if k == [0.0; 3] {
                continue;
            }
            let a = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let b = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            terms.push((k, a, b));
        }
        Self { terms }
    }

    pub fn eval(&self, p: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, a, b) in &self.terms {
            let ph = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
            let (s, c) = ph.sin_cos();
            for i in 0..3 {
                out[i] += a[i] * c + b[i] * s;
            }
        }
        out
    }

    /// `∂_dir v` by the five-point stencil with step `h`.
    pub fn fd_derivative(&self, p: [f64; 3], dir: usize, h: f64) -> [f64; 3] {
        let at = |m: f64| {
            let mut q = p;
            q[dir] += m * h;
            self.eval(q)
        };
        let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
        }
        out
    }
}
