//! Incompressible Navier–Stokes in velocity form on the periodic box.
//!
//! The state is the Fourier transform of the velocity. The nonlinear term
//! is evaluated in rotational form, `P[u × ω]`, with the gradient part
//! (pressure plus `|u|²/2`) removed by the Leray projector `P`. Viscosity is
//! integrated exactly with the factor `exp(-ν|k|²τ)` inside a classical
//! RK4 (Lawson) step.

use log::debug;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{linf_norm, GridSpec, VectorField};
use crate::spectral::{Spectral, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    TaylorGreen,
    Abc { a: f64, b: f64, c: f64 },
    Random { slope: f64, energy: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub init: InitialCondition,
    pub dealias: bool,
    pub output_every: u64,
    pub seed: u64,
    pub cfl_safety: f64,
    /// Switches the advection term off (pure heat flow); for testing.
    pub nonlinear: bool,
}

impl SimConfig {
    pub fn new(grid: GridSpec, init: InitialCondition) -> Self {
        Self {
            grid,
            nu: 1.0,
            dt: 1e-3,
            t_end: 0.1,
            init,
            dealias: true,
            output_every: 1,
            seed: 0,
            cfl_safety: 0.5,
            nonlinear: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        pos("nu", self.nu)?;
        pos("dt", self.dt)?;
        pos("cfl_safety", self.cfl_safety)?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if self.output_every == 0 {
            return Err(Error::Config("output_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub uhat: SpectralField,
    pub step_index: u64,
}

impl SimState {
    pub fn from_velocity(spectral: &Spectral, u: &VectorField, t: f64) -> Self {
        let mut uhat = spectral.forward(u);
        for m in uhat.modes_mut().iter_mut() {
            m[0] = Complex64::new(0.0, 0.0);
        }
        Self { t, uhat, step_index: 0 }
    }

    pub fn energy(&self) -> f64 {
        self.uhat.energy()
    }
}

fn unit_scale(grid: &GridSpec) -> f64 {
    2.0 * std::f64::consts::PI / grid.l()
}

pub fn taylor_green_velocity(grid: GridSpec) -> VectorField {
    let s = unit_scale(&grid);
    VectorField::from_fn(grid, |x, y, z| {
        let (x, y, z) = (s * x, s * y, s * z);
        [x.sin() * y.cos() * z.cos(), -x.cos() * y.sin() * z.cos(), 0.0]
    })
}

/// Arnold–Beltrami–Childress field; `∇×u = (2π/l) u`.
pub fn abc_velocity(grid: GridSpec, a: f64, b: f64, c: f64) -> VectorField {
    let s = unit_scale(&grid);
    VectorField::from_fn(grid, |x, y, z| {
        let (x, y, z) = (s * x, s * y, s * z);
        [
            a * z.sin() + c * y.cos(),
            b * x.sin() + a * z.cos(),
            c * y.sin() + b * x.cos(),
        ]
    })
}

pub fn init_taylor_green(grid: GridSpec) -> SimState {
    SimState::from_velocity(&Spectral::new(grid), &taylor_green_velocity(grid), 0.0)
}

pub fn init_abc(grid: GridSpec, a: f64, b: f64, c: f64) -> SimState {
    SimState::from_velocity(&Spectral::new(grid), &abc_velocity(grid, a, b, c), 0.0)
}

/// Random solenoidal field with shell spectrum `E(k) ∝ k^slope` on the
/// modes kept by the two-thirds rule, scaled to kinetic energy `energy`.
pub fn init_random(grid: GridSpec, slope: f64, energy: f64, seed: u64) -> Result<SimState> {
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(Error::Config(format!("energy must be >= 0, got {energy}")));
    }
    let sp = Spectral::new(grid);
    if energy == 0.0 {
        return Ok(SimState {
            t: 0.0,
            uhat: SpectralField::zeros(grid),
            step_index: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let k2 = sp.k_squared(idx);
        let keep = k2 > 0.0 && sp.keeps_mode(idx);
        // Draw for every mode so the stream does not depend on the mask.
        let draws: [f64; 6] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        if !keep {
            continue;
        }
        // Shell energy k² |û|² ∝ k^slope.
        let amp = k2.powf((slope - 2.0) / 4.0);
        for c in 0..3 {
            raw.modes_mut()[c][idx] = Complex64::new(draws[2 * c], draws[2 * c + 1]) * amp;
        }
    }
    // Real part restores Hermitian symmetry.
    let real = sp.inverse(&raw);
    let uhat = sp.dealias(&sp.leray_hat(&sp.forward(&real)));
    let mut state = SimState::from_velocity(&sp, &sp.inverse(&uhat), 0.0);
    let e = state.energy();
    if e == 0.0 {
        return Err(Error::Degenerate("random spectrum produced a zero field".into()));
    }
    state.uhat = state.uhat.scaled((energy / e).sqrt());
    Ok(state)
}

/// Three consecutive, equally spaced states handed to run hooks.
/// `center` is the index of the state being reported.
#[derive(Debug)]
pub struct Window<'a> {
    pub states: [&'a SimState; 3],
    pub center: usize,
}

impl Window<'_> {
    pub fn current(&self) -> &SimState {
        self.states[self.center]
    }
}

pub struct Solver {
    config: SimConfig,
    spectral: Spectral,
    dt: f64,
    steps: u64,
}

impl Solver {
    /// Validates the config; `dt` is shortened (if needed) so that an
    /// integer number of steps lands exactly on `t_end`.
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let spectral = Spectral::new(config.grid);
        let ratio = config.t_end / config.dt;
        let steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
            ratio.round() as u64
        } else {
            ratio.ceil() as u64
        };
        let dt = if steps == 0 { config.dt } else { config.t_end / steps as f64 };
        Ok(Self {
            config,
            spectral,
            dt,
            steps,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn initial_state(&self) -> Result<SimState> {
        let g = self.config.grid;
        let state = match self.config.init {
            InitialCondition::TaylorGreen => init_taylor_green(g),
            InitialCondition::Abc { a, b, c } => init_abc(g, a, b, c),
            InitialCondition::Random { slope, energy, seed } => init_random(g, slope, energy, seed)?,
        };
        self.check_cfl(&state, linf_norm(&self.velocity(&state))?)?;
        Ok(state)
    }

    pub fn velocity(&self, state: &SimState) -> VectorField {
        self.spectral.inverse(&state.uhat)
    }

    pub fn vorticity(&self, state: &SimState) -> VectorField {
        self.spectral.inverse(&self.spectral.curl_hat(&state.uhat))
    }

    fn check_cfl(&self, state: &SimState, umax: f64) -> Result<()> {
        if umax == 0.0 {
            return Ok(());
        }
        let limit = self.config.cfl_safety * self.config.grid.spacing() / umax;
        if self.dt > limit {
            return Err(Error::Cfl {
                t: state.t,
                dt: self.dt,
                limit,
                umax,
            });
        }
        Ok(())
    }

    /// `P[u × ω]`, dealiased if configured; also returns `max|u|`.
    fn nonlinear(&self, uhat: &SpectralField) -> (SpectralField, f64) {
        let sp = &self.spectral;
        let u = sp.inverse(uhat);
        let umax = linf_norm(&u).unwrap_or(f64::INFINITY);
        if !self.config.nonlinear {
            return (SpectralField::zeros(self.config.grid), umax);
        }
        let w = sp.inverse(&sp.curl_hat(uhat));
        let g = self.config.grid;
        let mut cross = VectorField::zeros(g);
        for idx in 0..g.len() {
            let a = u.at(idx);
            let b = w.at(idx);
            cross.component_mut(0)[idx] = a[1] * b[2] - a[2] * b[1];
            cross.component_mut(1)[idx] = a[2] * b[0] - a[0] * b[2];
            cross.component_mut(2)[idx] = a[0] * b[1] - a[1] * b[0];
        }
        let mut nh = sp.forward(&cross);
        if self.config.dealias {
            nh = sp.dealias(&nh);
        }
        (sp.leray_hat(&nh), umax)
    }

    fn decay(&self, v: &SpectralField, tau: f64) -> SpectralField {
        let mut out = v.clone();
        let nu = self.config.nu;
        for m in out.modes_mut().iter_mut() {
            for (idx, c) in m.iter_mut().enumerate() {
                *c *= (-nu * self.spectral.k_squared(idx) * tau).exp();
            }
        }
        out
    }

    pub fn step(&self, state: &SimState) -> Result<SimState> {
        let dt = self.dt;
        let u = &state.uhat;
        let (k1, umax) = self.nonlinear(u);
        if !umax.is_finite() {
            return Err(self.blow_up(state, "non-finite velocity"));
        }
        self.check_cfl(state, umax)?;

        let eu_half = self.decay(u, 0.5 * dt);
        let a = self.decay(&u.axpy(0.5 * dt, &k1), 0.5 * dt);
        let (k2, _) = self.nonlinear(&a);
        let b = eu_half.axpy(0.5 * dt, &k2);
        let (k3, _) = self.nonlinear(&b);
        let c = self.decay(u, dt).axpy(dt, &self.decay(&k3, 0.5 * dt));
        let (k4, _) = self.nonlinear(&c);

        let k23 = self.decay(&k2.axpy(1.0, &k3), 0.5 * dt);
        let mut next = self.decay(u, dt).axpy(dt / 6.0, &self.decay(&k1, dt));
        next = next.axpy(dt / 3.0, &k23).axpy(dt / 6.0, &k4);
        for m in next.modes_mut().iter_mut() {
            m[0] = Complex64::new(0.0, 0.0);
        }

        let out = SimState {
            t: state.t + dt,
            uhat: next,
            step_index: state.step_index + 1,
        };
        if !out.uhat.is_finite() {
            return Err(self.blow_up(&out, "non-finite spectral coefficients"));
        }
        Ok(out)
    }

    fn blow_up(&self, state: &SimState, what: &str) -> Error {
        Error::BlowUp {
            t: state.t,
            step: state.step_index,
            detail: format!("{what}; energy={:e}", state.energy()),
        }
    }

    /// Integrates to `t_end`, calling `hook` at every `output_every`-th step
    /// and at the final step. The first record uses forward probe steps for
    /// its window, the final one the two preceding states when available.
    pub fn run<R, F>(&self, mut hook: F) -> Result<Vec<R>>
    where
        F: FnMut(&Window) -> Result<R>,
    {
        let mut records = Vec::new();
        let mut cur = self.initial_state()?;
        let mut prev: Option<SimState> = None;
        let mut prev2: Option<SimState> = None;
        loop {
            let last = cur.step_index == self.steps;
            let output = last || cur.step_index % self.config.output_every == 0;
            if last {
                if output {
                    let rec = match (&prev2, &prev) {
                        (Some(p2), Some(p1)) => hook(&Window {
                            states: [p2, p1, &cur],
                            center: 2,
                        })?,
                        _ => {
                            let n1 = self.step(&cur)?;
                            let n2 = self.step(&n1)?;
                            hook(&Window {
                                states: [&cur, &n1, &n2],
                                center: 0,
                            })?
                        }
                    };
                    records.push(rec);
                }
                break;
            }
            let next = self.step(&cur)?;
            if output {
                let rec = match &prev {
                    Some(p) => hook(&Window {
                        states: [p, &cur, &next],
                        center: 1,
                    })?,
                    None => {
                        let n2 = self.step(&next)?;
                        hook(&Window {
                            states: [&cur, &next, &n2],
                            center: 0,
                        })?
                    }
                };
                records.push(rec);
            }
            debug!("step {} t={:.6}", next.step_index, next.t);
            prev2 = prev.take();
            prev = Some(cur);
            cur = next;
        }
        Ok(records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_rel_err(a: &VectorField, b: &VectorField) -> f64 {
        linf_norm(&a.axpy(-1.0, b).unwrap()).unwrap() / linf_norm(b).unwrap()
    }

    #[test]
    fn initial_data_is_solenoidal() {
        let g = GridSpec::periodic(16).unwrap();
        let sp = Spectral::new(g);
        for st in [
            init_taylor_green(g),
            init_abc(g, 1.0, 1.0, 1.0),
            init_random(g, -5.0 / 3.0, 0.5, 7).unwrap(),
        ] {
            let u = sp.inverse(&st.uhat);
            let div = sp.divergence(&u).unwrap();
            assert!(linf_norm(&div).unwrap() <= 1e-12 * linf_norm(&u).unwrap().max(1.0));
            assert_eq!(st.uhat.modes()[0][0].norm(), 0.0);
        }
        let abc = init_abc(g, 1.0, 1.0, 1.0);
        let u = sp.inverse(&abc.uhat);
        let w = sp.curl(&u).unwrap();
        assert!(max_rel_err(&w, &u) < 1e-13);
    }

    #[test]
    fn random_init_is_deterministic_and_scaled() {
        let g = GridSpec::periodic(16).unwrap();
        let a = init_random(g, -2.0, 0.3, 11).unwrap();
        let b = init_random(g, -2.0, 0.3, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.energy() - 0.3).abs() < 1e-12);
        let c = init_random(g, -2.0, 0.3, 12).unwrap();
        assert_ne!(a, c);
        let z = init_random(g, -2.0, 0.0, 11).unwrap();
        assert_eq!(z.uhat.max_abs(), 0.0);
        let sp = Spectral::new(g);
        for idx in 0..g.len() {
            if !sp.keeps_mode(idx) {
                assert!(a.uhat.modes().iter().all(|m| m[idx].norm() < 1e-12));
            }
        }
    }

    #[test]
    fn beltrami_decays_exactly() {
        let g = GridSpec::periodic(16).unwrap();
        let mut cfg = SimConfig::new(g, InitialCondition::Abc { a: 1.0, b: 1.0, c: 1.0 });
        cfg.dt = 1e-3;
        cfg.t_end = 0.1;
        let solver = Solver::new(cfg).unwrap();
        let mut st = solver.initial_state().unwrap();
        let u0 = solver.velocity(&st);
        for _ in 0..solver.steps() {
            st = solver.step(&st).unwrap();
        }
        assert!((st.t - 0.1).abs() < 1e-14);
        let exact = u0.scaled((-st.t).exp());
        assert!(max_rel_err(&solver.velocity(&st), &exact) < 1e-8);
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = GridSpec::periodic(8).unwrap();
        let mut cfg = SimConfig::new(g, InitialCondition::Random { slope: -2.0, energy: 0.0, seed: 0 });
        cfg.t_end = 0.01;
        let solver = Solver::new(cfg).unwrap();
        let mut st = solver.initial_state().unwrap();
        for _ in 0..5 {
            st = solver.step(&st).unwrap();
        }
        assert_eq!(st.uhat.max_abs(), 0.0);
    }

    #[test]
    fn heat_flow_single_mode() {
        let g = GridSpec::periodic(8).unwrap();
        let mut cfg = SimConfig::new(g, InitialCondition::TaylorGreen);
        cfg.nonlinear = false;
        cfg.nu = 0.7;
        cfg.dt = 0.01;
        let solver = Solver::new(cfg).unwrap();
        let sp = solver.spectral();
        let u = VectorField::from_fn(g, |x, _, _| [0.0, x.sin(), 0.0]);
        let mut st = SimState::from_velocity(sp, &u, 0.0);
        let factor = (-0.7f64 * 0.01).exp();
        for step in 1..=10 {
            st = solver.step(&st).unwrap();
            let expect = u.scaled(factor.powi(step));
            assert!(max_rel_err(&solver.velocity(&st), &expect) <= 1e-12);
        }
    }

    #[test]
    fn cfl_violation_is_refused() {
        let g = GridSpec::periodic(16).unwrap();
        let mut cfg = SimConfig::new(g, InitialCondition::Abc { a: 1.0, b: 1.0, c: 1.0 });
        cfg.dt = 0.5;
        cfg.t_end = 1.0;
        let solver = Solver::new(cfg).unwrap();
        assert!(matches!(solver.initial_state(), Err(Error::Cfl { .. })));
    }

    #[test]
    fn blow_up_is_reported() {
        let g = GridSpec::periodic(8).unwrap();
        let solver = Solver::new(SimConfig::new(g, InitialCondition::TaylorGreen)).unwrap();
        let mut st = init_taylor_green(g);
        st.uhat.modes_mut()[0][5] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(solver.step(&st), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn run_windows_and_cadence() {
        let g = GridSpec::periodic(8).unwrap();
        let mut cfg = SimConfig::new(g, InitialCondition::TaylorGreen);
        cfg.dt = 0.01;
        cfg.t_end = 0.1;
        cfg.output_every = 3;
        let solver = Solver::new(cfg.clone()).unwrap();
        let recs = solver
            .run(|w| {
                let ts: Vec<f64> = w.states.iter().map(|s| s.t).collect();
                Ok((w.current().step_index, w.center, ts))
            })
            .unwrap();
        let idx: Vec<u64> = recs.iter().map(|r| r.0).collect();
        assert_eq!(idx, vec![0, 3, 6, 9, 10]);
        assert_eq!(recs[0].1, 0);
        assert_eq!(recs[1].1, 1);
        assert_eq!(recs[4].1, 2);
        for (_, _, ts) in &recs {
            assert!(((ts[1] - ts[0]) - (ts[2] - ts[1])).abs() < 1e-14);
        }

        cfg.t_end = 0.0;
        let solver = Solver::new(cfg).unwrap();
        let recs = solver.run(|w| Ok(w.current().t)).unwrap();
        assert_eq!(recs, vec![0.0]);
    }

    #[test]
    fn taylor_green_energy_decreases() {
        let g = GridSpec::periodic(16).unwrap();
        let mut cfg = SimConfig::new(g, InitialCondition::TaylorGreen);
        cfg.dt = 0.01;
        cfg.t_end = 0.5;
        cfg.output_every = 5;
        let solver = Solver::new(cfg).unwrap();
        let e = solver.run(|w| Ok(w.current().energy())).unwrap();
        assert!(e.windows(2).all(|p| p[1] < p[0]));
    }
}
