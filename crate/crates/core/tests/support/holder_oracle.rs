//! Exhaustive pair scan for planar direction fields `(cos g, sin g, 0)`:
//! every ordered pair with separation in `[h, delta]` contributes
//! `|sin(g(x) − g(y))|`; per-bin quantiles come from fine histograms.

pub struct ScanResult {
    pub beta: f64,
    pub centers: Vec<f64>,
    pub values: Vec<f64>,
    pub pairs: u64,
}

const HIST: usize = 1 << 16;

pub fn exhaustive_holder(angle: &[f64], n: usize, l: f64, delta: f64, n_bins: usize, q: f64) -> ScanResult {
    let h = l / n as f64;
    let lo = (h * (1.0 - 1e-9)).ln();
    let hi = (delta * (1.0 + 1e-9)).ln();
    let width = (hi - lo) / n_bins as f64;
    let reach = (delta / h).floor() as i64;
    let mut hist = vec![vec![0u64; HIST]; n_bins];
    let mut pairs = 0u64;
    let wrap = |i: usize, d: i64| ((i as i64 + d).rem_euclid(n as i64)) as usize;
    for dx in -reach..=reach {
        for dy in -reach..=reach {
            for dz in -reach..=reach {
                let s = h * ((dx * dx + dy * dy + dz * dz) as f64).sqrt();
                if s == 0.0 || s > delta {
                    continue;
                }
                let b = (((s.ln() - lo) / width) as usize).min(n_bins - 1);
                let bin = &mut hist[b];
                for i in 0..n {
                    let i2 = wrap(i, dx);
                    for j in 0..n {
                        let j2 = wrap(j, dy);
                        for k in 0..n {
                            let k2 = wrap(k, dz);
                            let a = angle[(i * n + j) * n + k];
                            let c = angle[(i2 * n + j2) * n + k2];
                            let v = (a - c).sin().abs().min(1.0);
                            bin[((v * HIST as f64) as usize).min(HIST - 1)] += 1;
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    let mut centers = Vec::new();
    let mut values = Vec::new();
    for (b, counts) in hist.iter().enumerate() {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            continue;
        }
        // quantile by order statistic, interpolated within the histogram cell
        let target = q * (total - 1) as f64;
        let mut acc = 0u64;
        let mut value = 0.0;
        for (c, &m) in counts.iter().enumerate() {
            if m > 0 && (acc + m) as f64 > target {
                let frac = (target - acc as f64 + 0.5) / m as f64;
                value = (c as f64 + frac.clamp(0.0, 1.0)) / HIST as f64;
                break;
            }
            acc += m;
        }
        if value > 0.0 {
            centers.push((lo + (b as f64 + 0.5) * width).exp());
            values.push(value);
        }
    }
    let xs: Vec<f64> = centers.iter().map(|c| c.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let beta = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    ScanResult { beta, centers, values, pairs }
}
