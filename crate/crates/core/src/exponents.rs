//! Exact rational calculus over Lebesgue exponents: Serrin-type
//! classifications, the Riesz and Sobolev relations, and the interpolation
//! system that fixes the Hölder exponent of the vorticity direction.
//!
//! Exponents `p ∈ (0, ∞]` are stored by their reciprocal, so `∞` is just
//! `1/p = 0` and every relation below is linear in the stored value.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn half() -> Q {
    q(1, 2)
}

/// Parses `"3/2"`, `"2"`, `"-1/3"`. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational number: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(q(num, den))
}

pub fn format_rational(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// A Lebesgue exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    recip: Q,
}

impl Exponent {
    pub fn new(p: Q) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::Domain(format!("exponent must be positive, got {}", format_rational(&p))));
        }
        Ok(Self { recip: p.recip() })
    }

    pub fn infinity() -> Self {
        Self { recip: Q::zero() }
    }

    pub fn from_recip(recip: Q) -> Result<Self> {
        if recip.is_negative() {
            return Err(Error::Domain("reciprocal exponent must be >= 0".into()));
        }
        Ok(Self { recip })
    }

    pub fn recip(&self) -> Q {
        self.recip
    }

    /// `None` for `∞`.
    pub fn value(&self) -> Option<Q> {
        (!self.recip.is_zero()).then(|| self.recip.recip())
    }

    pub fn is_infinite(&self) -> bool {
        self.recip.is_zero()
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::infinity()),
            other => Self::new(parse_rational(other)?),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => f.write_str("inf"),
            Some(v) => f.write_str(&format_rational(&v)),
        }
    }
}

/// `λ(s, q) = 2/s + 3/q`.
pub fn lambda_sq(s: Exponent, q: Exponent) -> Q {
    s.recip * 2 + q.recip * 3
}

/// Velocity in `L^s(L^q)` with `λ(s, q) <= 1`.
pub fn is_strong(s: Exponent, q: Exponent) -> bool {
    lambda_sq(s, q) <= Q::one()
}

/// Sobolev exponent of the velocity for vorticity in `L^r`: `1/q = 1/r − 1/3`.
pub fn sobolev_q_of_r(r: Q) -> Result<Q> {
    if !(r > Q::one() && r < q(3, 1)) {
        return Err(Error::Domain(format!("r must lie in (1, 3), got {}", format_rational(&r))));
    }
    Ok((r.recip() - q(1, 3)).recip())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongCriterion {
    Strong,
    NotImplied,
}

/// Vorticity criterion `2/s + 3/r <= 2`.
pub fn strong_by_vorticity(s: Exponent, r: Exponent) -> StrongCriterion {
    if s.recip * 2 + r.recip * 3 <= q(2, 1) {
        StrongCriterion::Strong
    } else {
        StrongCriterion::NotImplied
    }
}

fn check_r_hat(r_hat: Q) -> Result<()> {
    if !(r_hat > Q::one() && r_hat < q(3, 1)) {
        return Err(Error::Domain(format!("r_hat must lie in (1, 3), got {}", format_rational(&r_hat))));
    }
    Ok(())
}

fn check_beta(beta: Q) -> Result<()> {
    if beta.is_negative() || beta >= q(3, 1) {
        return Err(Error::Domain(format!("beta must lie in [0, 3), got {}", format_rational(&beta))));
    }
    Ok(())
}

/// `1/q′ = 1 − 1/r̂ + β/3`.
pub fn q_prime_of(r_hat: Q, beta: Q) -> Result<Q> {
    check_r_hat(r_hat)?;
    check_beta(beta)?;
    let inv = Q::one() - r_hat.recip() + beta / 3;
    if !inv.is_positive() {
        return Err(Error::Domain("1/q' must be positive".into()));
    }
    Ok(inv.recip())
}

/// Target exponent of the Riesz potential: `1/q = 1/r̂ − β/3`.
pub fn riesz_q_of(r_hat: Q, beta: Q) -> Result<Q> {
    check_r_hat(r_hat)?;
    check_beta(beta)?;
    let inv = r_hat.recip() - beta / 3;
    if !inv.is_positive() {
        return Err(Error::Domain(format!(
            "1/r_hat - beta/3 = {} leaves no finite target exponent",
            format_rational(&inv)
        )));
    }
    Ok(inv.recip())
}

/// `r = 3/(β + 1)`: the vorticity integrability matched to direction
/// regularity `β`.
pub fn olga_r_of_beta(beta: Q) -> Result<Q> {
    if beta.is_negative() {
        return Err(Error::Domain(format!("beta must be >= 0, got {}", format_rational(&beta))));
    }
    Ok(q(3, 1) / (beta + 1))
}

/// Convex weights on the anchor norms `L^r`, `L²`, `L^{3r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InterpolationWeights {
    pub alpha: Q,
    pub theta: Q,
    pub gamma: Q,
    pub alpha_p: Q,
    pub theta_p: Q,
    pub gamma_p: Q,
}

fn in_unit(v: Q) -> bool {
    !v.is_negative() && v <= Q::one()
}

impl InterpolationWeights {
    /// Completes both simplices with `γ = 1 − α − θ`, `γ′ = 1 − α′ − θ′`.
    pub fn new(alpha: Q, theta: Q, alpha_p: Q, theta_p: Q) -> Result<Self> {
        let w = Self {
            alpha,
            theta,
            gamma: Q::one() - alpha - theta,
            alpha_p,
            theta_p,
            gamma_p: Q::one() - alpha_p - theta_p,
        };
        w.validate()?;
        Ok(w)
    }

    /// The weights used in the Hilbertian argument.
    pub fn natural() -> Self {
        Self::new(half(), Q::zero(), Q::zero(), Q::one()).expect("valid")
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.theta, self.gamma, self.alpha_p, self.theta_p, self.gamma_p];
        if !all.iter().all(|v| in_unit(*v)) {
            return Err(Error::Domain("interpolation weights must lie in [0, 1]".into()));
        }
        if self.alpha + self.theta + self.gamma != Q::one() || self.alpha_p + self.theta_p + self.gamma_p != Q::one() {
            return Err(Error::Domain("interpolation weights must sum to 1".into()));
        }
        Ok(())
    }
}

fn check_r(r: Q) -> Result<()> {
    if !(r > Q::one() && r <= q(2, 1)) {
        return Err(Error::Domain(format!("r must lie in (1, 2], got {}", format_rational(&r))));
    }
    Ok(())
}

/// `(q′r, r̂)` from
/// `1/(q′r) = α/r + θ/2 + γ/(3r)` and `1/r̂ = α′/r + θ′/2 + γ′/(3r)`.
pub fn interpolation_exponents(r: Q, w: &InterpolationWeights) -> Result<(Q, Q)> {
    if !r.is_positive() {
        return Err(Error::Domain("r must be positive".into()));
    }
    w.validate()?;
    let inv_qr = w.alpha / r + w.theta / 2 + w.gamma / (r * 3);
    let inv_rh = w.alpha_p / r + w.theta_p / 2 + w.gamma_p / (r * 3);
    Ok((inv_qr.recip(), inv_rh.recip()))
}

/// `β = (2/r)(α′+αr) + (3/2 − 1/r)(θ′+θr) − 2 + 1/r`.
pub fn beta_of(r: Q, w: &InterpolationWeights) -> Q {
    let a = w.alpha_p + w.alpha * r;
    let t = w.theta_p + w.theta * r;
    a * 2 / r + (q(3, 2) - r.recip()) * t - 2 + r.recip()
}

/// `β` read off the chain directly: the interpolated `q′` and `r̂` must
/// satisfy `1/q′ = 1 − 1/r̂ + β/3`.
pub fn chain_beta(r: Q, w: &InterpolationWeights) -> Result<Q> {
    let (qr, r_hat) = interpolation_exponents(r, w)?;
    let q_prime = qr / r;
    Ok((q_prime.recip() - 1 + r_hat.recip()) * 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentTuple {
    pub r: Q,
    pub beta: Q,
    pub r_hat: Q,
    pub q: Q,
    pub q_prime: Q,
}

impl ExponentTuple {
    /// Runs the chain: interpolation gives `r̂` and `q′`, the Hölder
    /// exponent follows, and the Riesz relation gives `q`. Fails when `r̂`
    /// leaves `(1, 3)`, where the Riesz mapping does not apply.
    pub fn from_weights(r: Q, w: &InterpolationWeights) -> Result<Self> {
        check_r(r)?;
        let (qr, r_hat) = interpolation_exponents(r, w)?;
        let beta = beta_of(r, w);
        let q = riesz_q_of(r_hat, beta)?;
        let q_prime = q_prime_of(r_hat, beta)?;
        let t = Self { r, beta, r_hat, q, q_prime };
        if qr / r != q_prime {
            return Err(Error::Infeasible("interpolated q' disagrees with the Riesz dual".into()));
        }
        Ok(t)
    }

    /// Riesz mapping `1/q = 1/r̂ − β/3`, the dual `1/q′ = 1 − 1/r̂ + β/3`
    /// (hence `1/q + 1/q′ = 1`), and `r ∈ (1, 2]`, `1 < r̂ < 3`.
    pub fn is_consistent(&self) -> bool {
        let r_ok = self.r > Q::one() && self.r <= q(2, 1);
        let rh_ok = self.r_hat > Q::one() && self.r_hat < q(3, 1);
        r_ok && rh_ok
            && self.q.is_positive()
            && self.q_prime.is_positive()
            && self.q.recip() == self.r_hat.recip() - self.beta / 3
            && self.q_prime.recip() == Q::one() - self.r_hat.recip() + self.beta / 3
            && self.q.recip() + self.q_prime.recip() == Q::one()
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{})",
            format_rational(&self.r),
            format_rational(&self.beta),
            format_rational(&self.r_hat),
            format_rational(&self.q),
            format_rational(&self.q_prime)
        )
    }
}

/// Half-plane `a α + b θ <= c`.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    a: Q,
    b: Q,
    c: Q,
}

impl HalfPlane {
    fn holds(&self, p: (Q, Q)) -> bool {
        self.a * p.0 + self.b * p.1 <= self.c
    }
}

/// Weights solving `θ′ + θr = 1`, `α′ + αr = r/2`, parameterized by
/// `(α, θ)`; a convex polygon in that plane.
#[derive(Debug, Clone)]
pub struct FeasibleSet {
    r: Q,
    constraints: Vec<HalfPlane>,
    vertices: Vec<(Q, Q)>,
}

/// The `(α, θ)` polygon of the constrained system for `r ∈ (1, 2]`.
pub fn feasible_set(r: Q) -> Result<FeasibleSet> {
    check_r(r)?;
    let zero = Q::zero();
    let one = Q::one();
    // Every box constraint on the six weights, written in (α, θ).
    // α′ = r/2 − αr, θ′ = 1 − θr, γ = 1 − α − θ, γ′ = r(α + θ − 1/2).
    let constraints = vec![
        HalfPlane { a: -one, b: zero, c: zero },                  // α >= 0
        HalfPlane { a: one, b: zero, c: one },                    // α <= 1
        HalfPlane { a: zero, b: -one, c: zero },                  // θ >= 0
        HalfPlane { a: zero, b: one, c: one },                    // θ <= 1
        HalfPlane { a: r, b: zero, c: r / 2 },                    // α′ >= 0
        HalfPlane { a: -r, b: zero, c: one - r / 2 },             // α′ <= 1
        HalfPlane { a: zero, b: r, c: one },                      // θ′ >= 0
        HalfPlane { a: zero, b: -r, c: zero },                    // θ′ <= 1
        HalfPlane { a: one, b: one, c: one },                     // γ >= 0
        HalfPlane { a: -one, b: -one, c: zero },                  // γ <= 1
        HalfPlane { a: -r, b: -r, c: -r / 2 },                    // γ′ >= 0
        HalfPlane { a: r, b: r, c: one + r / 2 },                 // γ′ <= 1
    ];
    let mut points = BTreeSet::new();
    for (i, p) in constraints.iter().enumerate() {
        for s in &constraints[i + 1..] {
            let det = p.a * s.b - p.b * s.a;
            if det.is_zero() {
                continue;
            }
            let x = (p.c * s.b - p.b * s.c) / det;
            let y = (p.a * s.c - p.c * s.a) / det;
            if constraints.iter().all(|h| h.holds((x, y))) {
                points.insert((x, y));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Infeasible(format!("no weights satisfy the system at r = {}", format_rational(&r))));
    }
    let vertices = convex_hull(points.into_iter().collect());
    Ok(FeasibleSet { r, constraints, vertices })
}

fn cross(o: (Q, Q), a: (Q, Q), b: (Q, Q)) -> Q {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone chain; input sorted and deduplicated, output counterclockwise
/// without collinear points.
fn convex_hull(pts: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(Q, Q)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && !cross(lower[lower.len() - 2], lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(Q, Q)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(upper[upper.len() - 2], upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl FeasibleSet {
    pub fn r(&self) -> Q {
        self.r
    }

    /// Polygon corners `(α, θ)`, counterclockwise.
    pub fn vertices(&self) -> &[(Q, Q)] {
        &self.vertices
    }

    /// Full weights at `(α, θ)`, or `None` outside the polygon.
    pub fn weights_at(&self, alpha: Q, theta: Q) -> Option<InterpolationWeights> {
        if !self.constraints.iter().all(|h| h.holds((alpha, theta))) {
            return None;
        }
        InterpolationWeights::new(alpha, theta, self.r / 2 - alpha * self.r, Q::one() - theta * self.r).ok()
    }

    pub fn contains(&self, w: &InterpolationWeights) -> bool {
        w.validate().is_ok()
            && w.theta_p + w.theta * self.r == Q::one()
            && w.alpha_p + w.alpha * self.r == self.r / 2
    }

    pub fn vertex_weights(&self) -> Vec<InterpolationWeights> {
        self.vertices
            .iter()
            .map(|&(a, t)| self.weights_at(a, t).expect("vertex is feasible"))
            .collect()
    }

    /// `count` points of the polygon: a seeded fan triangle and rational
    /// barycentric coordinates with denominator 64.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<InterpolationWeights> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = &self.vertices;
        (0..count)
            .map(|_| {
                let (a, b, c) = match v.len() {
                    1 => (v[0], v[0], v[0]),
                    2 => (v[0], v[1], v[1]),
                    n => {
                        let t = rng.random_range(1..n - 1);
                        (v[0], v[t], v[t + 1])
                    }
                };
                let i: i64 = rng.random_range(0..=64);
                let j: i64 = rng.random_range(0..=64 - i);
                let (wa, wb, wc) = (q(i, 64), q(j, 64), q(64 - i - j, 64));
                let alpha = a.0 * wa + b.0 * wb + c.0 * wc;
                let theta = a.1 * wa + b.1 * wb + c.1 * wc;
                self.weights_at(alpha, theta).expect("convex combination stays inside")
            })
            .collect()
    }

    /// Every feasible tuple whose four free weights have denominators
    /// `<= denom`.
    pub fn enumerate(&self, denom: i64) -> Vec<InterpolationWeights> {
        let grid = farey(denom);
        let mut out = Vec::new();
        for &alpha in &grid {
            for &theta in &grid {
                if let Some(w) = self.weights_at(alpha, theta) {
                    if *w.alpha_p.denom() <= denom && *w.theta_p.denom() <= denom {
                        out.push(w);
                    }
                }
            }
        }
        out
    }
}

/// Rationals in `[0, 1]` with denominator `<= denom`, ascending.
pub fn farey(denom: i64) -> Vec<Q> {
    let mut set = BTreeSet::new();
    for d in 1..=denom.max(1) {
        for n in 0..=d {
            set.insert(q(n, d));
        }
    }
    set.into_iter().collect()
}

/// Summary of `β` over all weight tuples without the constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaRange {
    pub min: Q,
    pub max: Q,
    pub contains_zero: bool,
    pub contains_half: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanEntry {
    pub r: Q,
    /// Feasible tuples found at this denominator bound.
    pub tuples: usize,
    /// Distinct `β` over the constrained tuples.
    pub attainable_beta: BTreeSet<Q>,
    /// Distinct `β` read off the chain itself (interpolation exponents
    /// inserted into the dual Riesz relation).
    pub chain_beta: BTreeSet<Q>,
    /// Tuples whose `r̂` lies in `(1, 3)`, where the Riesz mapping applies.
    pub riesz_admissible: usize,
    pub unconstrained: Option<BetaRange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanReport {
    pub denominator_bound: i64,
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    /// Union of the attainable sets over all `r`.
    pub fn attainable_beta(&self) -> BTreeSet<Q> {
        self.entries.iter().flat_map(|e| e.attainable_beta.iter().copied()).collect()
    }
}

/// `β` values over tuples in the constrained system for each `r`, and
/// optionally the range without the constraints.
pub fn feasibility_scan(r_grid: &[Q], denom: i64, unconstrained: bool) -> Result<ScanReport> {
    if denom < 1 {
        return Err(Error::Domain("denominator bound must be >= 1".into()));
    }
    let mut entries = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let set = feasible_set(r)?;
        let tuples = set.enumerate(denom);
        let mut attainable = BTreeSet::new();
        let mut chain = BTreeSet::new();
        let mut admissible = 0;
        for w in &tuples {
            attainable.insert(beta_of(r, w));
            chain.insert(chain_beta(r, w)?);
            if ExponentTuple::from_weights(r, w).map(|t| t.is_consistent()).unwrap_or(false) {
                admissible += 1;
            }
        }
        entries.push(ScanEntry {
            r,
            tuples: tuples.len(),
            attainable_beta: attainable,
            chain_beta: chain,
            riesz_admissible: admissible,
            unconstrained: if unconstrained { Some(unconstrained_range(r, denom)?) } else { None },
        });
    }
    Ok(ScanReport { denominator_bound: denom, entries })
}

/// `β` is separable: `A(α, θ) + B(α′, θ′) + const`, so the attainable set
/// is a sumset of two planar enumerations.
fn unconstrained_range(r: Q, denom: i64) -> Result<BetaRange> {
    check_r(r)?;
    let grid = farey(denom);
    let mut left = BTreeSet::new();
    let mut right = BTreeSet::new();
    for &a in &grid {
        for &t in &grid {
            if a + t > Q::one() {
                continue;
            }
            left.insert(a * 2 + t * (r * 3 / 2 - 1));
            right.insert(a * 2 / r + t * (q(3, 2) - r.recip()));
        }
    }
    let c = r.recip() - 2;
    let min = *left.first().expect("nonempty") + *right.first().expect("nonempty") + c;
    let max = *left.last().expect("nonempty") + *right.last().expect("nonempty") + c;
    let attains = |target: Q| left.iter().any(|a| right.contains(&(target - c - *a)));
    Ok(BetaRange {
        min,
        max,
        contains_zero: attains(Q::zero()),
        contains_half: attains(half()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Region {
    Strong,
    TargetZone,
    WeakKnown,
    Unknown,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Strong => "strong",
            Region::TargetZone => "target-zone",
            Region::WeakKnown => "weak-known",
            Region::Unknown => "unknown",
        })
    }
}

fn region(value: Q, strong: Q, weak: Q) -> Region {
    if value <= strong {
        Region::Strong
    } else if value < weak {
        Region::TargetZone
    } else if value == weak {
        Region::WeakKnown
    } else {
        Region::Unknown
    }
}

/// Velocity in `L^s(L^q)` by `λ(s, q)`: strong at `<= 1`, the known
/// weak-solution level at `3/2`.
pub fn classify_open_problem(s: Exponent, q_exp: Exponent) -> Region {
    region(lambda_sq(s, q_exp), Q::one(), q(3, 2))
}

/// Vorticity in `L^s(L^r)` by `2/s + 3/r`: strong at `<= 2`, weak-known
/// at `5/2`.
pub fn vorticity_region(s: Exponent, r: Exponent) -> Region {
    region(s.recip() * 2 + r.recip() * 3, q(2, 1), q(5, 2))
}

/// Both classifications of a velocity class `L^s(L^q)`: directly, and via
/// the vorticity class `L^s(L^r)` that the Sobolev relation pairs with it.
/// The vorticity assumption is the stronger one, so the two are reported
/// without being identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideBySide {
    pub velocity: Region,
    /// `None` when no `r ∈ (1, 3]` pairs with `q` (that is, `q < 3/2`).
    pub vorticity_r: Option<Exponent>,
    pub vorticity: Option<Region>,
}

pub fn classify_side_by_side(s: Exponent, q_exp: Exponent) -> SideBySide {
    let velocity = classify_open_problem(s, q_exp);
    let inv_r = q_exp.recip() + q(1, 3);
    if inv_r >= Q::one() {
        return SideBySide { velocity, vorticity_r: None, vorticity: None };
    }
    let r = Exponent::from_recip(inv_r).expect("positive");
    SideBySide {
        velocity,
        vorticity_r: Some(r),
        vorticity: Some(vorticity_region(s, r)),
    }
}
