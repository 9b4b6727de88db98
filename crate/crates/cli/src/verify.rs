//! Oracle suites run by `vortlab verify`.

use std::fmt;

use clap::ValueEnum;
use vortlab::diagnostics::balance_residual;
use vortlab::exponents::{
    beta_of, classify_open_problem, format_rational, feasibility_scan, feasible_set, vorticity_region, Exponent, ExponentTuple,
    InterpolationWeights, Q,
};
use vortlab::solver::{abc_velocity, init_random, InitialCondition, SimConfig, SimState, Solver};
use vortlab::synthetic::{band_limited_nonnegative, band_limited_scalar};
use vortlab::{linf_norm, riesz_potential, GridSpec, Result, RieszBackend, ScalarField, Spectral, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Riesz,
    Beltrami,
    Balance,
    Identities,
    Exponents,
    All,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub n: usize,
    pub images: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n: 16, images: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: String,
    pub tolerance: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: measured {} (required {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

fn check(suite: &'static str, name: &str, measured: String, tolerance: String, pass: bool) -> Check {
    Check {
        suite,
        name: name.into(),
        measured,
        tolerance,
        pass,
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Riesz => riesz_suite(opts)?,
        Suite::Beltrami => beltrami_suite(opts)?,
        Suite::Balance => balance_suite(opts)?,
        Suite::Identities => identities_suite(opts)?,
        Suite::Exponents => exponents_suite()?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Riesz, Suite::Beltrami, Suite::Balance, Suite::Identities, Suite::Exponents] {
                all.extend(run_suite(s, opts)?);
            }
            all
        }
    })
}

fn mean_free_rel_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    let (ma, mb) = (a.mean(), b.mean());
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        num += ((x - ma) - (y - mb)).powi(2);
        den += (y - mb).powi(2);
    }
    (num / den).sqrt()
}

/// Relative `L²` gap between the two Riesz backends on mean-free parts.
pub fn riesz_backend_discrepancy(spectral: &Spectral, f: &ScalarField, beta: f64, images: u32) -> Result<f64> {
    let m = riesz_potential(spectral, f, beta, RieszBackend::Multiplier)?;
    let d = riesz_potential(spectral, f, beta, RieszBackend::DirectSum { images })?;
    Ok(mean_free_rel_l2(&d, &m))
}

fn riesz_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let grid = GridSpec::periodic(opts.n)?;
    let sp = Spectral::new(grid);
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let f = band_limited_nonnegative(&sp, 2, seed);
        worst = worst.max(riesz_backend_discrepancy(&sp, &f, 0.5, opts.images)?);
    }
    Ok(vec![check(
        "riesz",
        &format!("multiplier vs direct sum (n={}, images={}, 5 seeds)", opts.n, opts.images),
        format!("{worst:.3e}"),
        "<= 1e-2".into(),
        worst <= 1e-2,
    )])
}

fn max_rel_err(a: &VectorField, b: &VectorField) -> Result<f64> {
    Ok(linf_norm(&a.axpy(-1.0, b)?)? / linf_norm(b)?)
}

/// Max-norm relative error of the ABC run against `e^{−ν(2π/l)²t} u₀`.
pub fn beltrami_error(n: usize, dt: f64, t_end: f64) -> Result<f64> {
    let grid = GridSpec::periodic(n)?;
    let mut cfg = SimConfig::new(grid, InitialCondition::Abc { a: 1.0, b: 1.0, c: 1.0 });
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.output_every = u64::MAX;
    let solver = Solver::new(cfg)?;
    let last = solver.run(|w| Ok(w.current().clone()))?.pop().expect("final record");
    let u = solver.velocity(&last);
    let lambda2 = (2.0 * std::f64::consts::PI / grid.l()).powi(2);
    let exact = abc_velocity(grid, 1.0, 1.0, 1.0).scaled((-lambda2 * last.t).exp());
    max_rel_err(&u, &exact)
}

fn final_state(cfg: SimConfig) -> Result<(Solver, SimState)> {
    let solver = Solver::new(cfg)?;
    let mut s = solver.initial_state()?;
    for _ in 0..solver.steps() {
        s = solver.step(&s)?;
    }
    Ok((solver, s))
}

/// Observed temporal order on a Taylor–Green run: errors at `dt` and
/// `dt/2` against a `dt/8` reference.
pub fn taylor_green_order(n: usize, dt: f64) -> Result<(f64, f64, f64)> {
    let grid = GridSpec::periodic(n)?;
    let run = |step: f64| {
        let mut cfg = SimConfig::new(grid, InitialCondition::TaylorGreen);
        cfg.nu = 0.01;
        cfg.t_end = 0.8;
        cfg.dt = step;
        final_state(cfg).map(|(solver, s)| solver.velocity(&s))
    };
    let reference = run(dt / 8.0)?;
    let e1 = max_rel_err(&run(dt)?, &reference)?;
    let e2 = max_rel_err(&run(dt / 2.0)?, &reference)?;
    Ok((e1, e2, (e1 / e2).log2()))
}

fn beltrami_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let err = beltrami_error(opts.n, 1e-3, 0.1)?;
    let (e1, e2, order) = taylor_green_order(opts.n, 0.1)?;
    Ok(vec![
        check(
            "beltrami",
            &format!("ABC decay error (n={}, dt=1e-3, t=0.1)", opts.n),
            format!("{err:.3e}"),
            "<= 1e-7".into(),
            err <= 1e-7,
        ),
        check(
            "beltrami",
            "Taylor-Green temporal order (dt=0.1 vs 0.05)",
            format!("{order:.3} (errors {e1:.3e}, {e2:.3e})"),
            "in [3.5, 4.5]".into(),
            (3.5..=4.5).contains(&order),
        ),
    ])
}

/// Largest classical-balance residual over an ABC run.
pub fn abc_balance_residual(n: usize, dt: f64, t_end: f64) -> Result<f64> {
    let mut cfg = SimConfig::new(GridSpec::periodic(n)?, InitialCondition::Abc { a: 1.0, b: 1.0, c: 1.0 });
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.output_every = ((t_end / 5.0) / dt).round().max(1.0) as u64;
    let solver = Solver::new(cfg)?;
    let res = solver.run(|w| balance_residual(solver.spectral(), &w.states, w.center, 1.0, 0.0, 0.0))?;
    Ok(res.iter().map(|b| b.residual).fold(0.0, f64::max))
}

fn balance_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let coarse = abc_balance_residual(opts.n, 1e-3, 0.1)?;
    let fine = abc_balance_residual(opts.n, 5e-4, 0.1)?;
    let ratio = coarse / fine;
    Ok(vec![
        check(
            "balance",
            "ABC enstrophy balance residual (dt=1e-3)",
            format!("{coarse:.3e}"),
            "<= 1e-4".into(),
            coarse <= 1e-4,
        ),
        check(
            "balance",
            "residual ratio under dt halving",
            format!("{ratio:.3}"),
            "in [3, 5] (second order)".into(),
            (3.0..=5.0).contains(&ratio),
        ),
    ])
}

fn identities_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let grid = GridSpec::periodic(opts.n)?;
    let sp = Spectral::new(grid);
    let u = sp.inverse(&init_random(grid, -5.0 / 3.0, 0.5, 1)?.uhat);
    let f = band_limited_scalar(&sp, 3, 2);
    let scale_u = linf_norm(&u)?;
    let omega = sp.curl(&u)?;
    let div_curl = linf_norm(&sp.divergence(&omega)?)? / linf_norm(&omega)?;
    let grad = sp.gradient(&f)?;
    let curl_grad = linf_norm(&sp.curl(&grad)?)? / linf_norm(&grad)?;
    let leray_grad = linf_norm(&sp.leray_project(&grad)?)? / linf_norm(&grad)?;
    let div_u = linf_norm(&sp.divergence(&u)?)? / scale_u;
    let bs = max_rel_err(&sp.biot_savart(&omega)?, &u)?;
    let tol = 1e-12;
    Ok([
        ("div curl u = 0", div_curl),
        ("curl grad f = 0", curl_grad),
        ("leray(grad f) = 0", leray_grad),
        ("div u = 0 (random initial data)", div_u),
        ("biot_savart(curl u) = u", bs),
    ]
    .into_iter()
    .map(|(name, v)| check("identities", name, format!("{v:.3e}"), format!("<= {tol:e}"), v <= tol))
    .collect())
}

fn exponents_suite() -> Result<Vec<Check>> {
    let q = Q::new;
    let grid = [q(5, 4), q(4, 3), q(3, 2), q(7, 4), q(2, 1)];
    let rep = feasibility_scan(&grid, 12, false)?;
    let set = rep.attainable_beta();
    let half = q(1, 2);
    let mut checks = vec![check(
        "exponents",
        "attainable beta under constraints, denominators <= 12",
        format!("{{{}}}", set.iter().map(format_rational).collect::<Vec<_>>().join(", ")),
        "{1/2}".into(),
        set.len() == 1 && set.contains(&half),
    )];
    let t = ExponentTuple::from_weights(q(2, 1), &InterpolationWeights::natural())?;
    checks.push(check(
        "exponents",
        "Hilbertian tuple",
        t.to_string(),
        "(2,1/2,2,3,3/2)".into(),
        t.to_string() == "(2,1/2,2,3,3/2)" && t.is_consistent(),
    ));
    let mut bad = 0;
    let mut total = 0;
    for k in 13..=24 {
        let r = q(k, 12);
        let fs = feasible_set(r)?;
        for w in fs.sample(84, k as u64) {
            total += 1;
            if !fs.contains(&w) || beta_of(r, &w) != half {
                bad += 1;
            }
        }
    }
    checks.push(check(
        "exponents",
        &format!("chain over {total} sampled weights"),
        format!("{bad} violations"),
        "0".into(),
        bad == 0,
    ));
    let e = |s: &str| s.parse::<Exponent>();
    let labels = [
        classify_open_problem(e("inf")?, e("3")?).to_string() == "strong",
        classify_open_problem(e("2")?, e("6")?).to_string() == "weak-known",
        vorticity_region(e("inf")?, e("3/2")?).to_string() == "strong",
        vorticity_region(e("2")?, e("2")?).to_string() == "weak-known",
    ];
    let ok = labels.iter().filter(|b| **b).count();
    checks.push(check(
        "exponents",
        "labelled regions",
        format!("{ok}/{}", labels.len()),
        "all".into(),
        ok == labels.len(),
    ));
    Ok(checks)
}
