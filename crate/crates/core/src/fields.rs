//! Periodic grid geometry, real-space fields and discrete Lebesgue norms.
//!
//! Layout is row-major with axis order `x, y, z`: the flat index of grid
//! point `(i, j, k)` is `(i * n + j) * n + k`, so `z` is contiguous. The
//! checkpoint format relies on this ordering.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid with `n` points per axis on a cube of side `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    l: f64,
}

impl GridSpec {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::Domain(format!("grid needs n >= 4, got {n}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Domain(format!("box side must be positive, got {l}")));
        }
        Ok(Self { n, l })
    }

    /// `n` points per axis on the 2π box.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Total number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.l.powi(3)
    }

    #[inline]
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Coordinates of grid point `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let [i, j, k] = self.unflat(idx);
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    /// Signed nearest-image index offset from `a` to `b` along one axis.
    #[inline]
    pub fn image_offset(&self, a: usize, b: usize) -> i64 {
        let n = self.n as i64;
        let mut d = (b as i64 - a as i64).rem_euclid(n);
        if d > n / 2 {
            d -= n;
        }
        d
    }

    /// Nearest-image distance between two grid points.
    pub fn separation(&self, a: usize, b: usize) -> f64 {
        let pa = self.unflat(a);
        let pb = self.unflat(b);
        let h = self.spacing();
        let mut s2 = 0.0;
        for ax in 0..3 {
            let d = self.image_offset(pa[ax], pb[ax]) as f64 * h;
            s2 += d * d;
        }
        s2.sqrt()
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: *self,
                right: *other,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y, z)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let [x, y, z] = grid.position(idx);
                f(x, y, z)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Midpoint-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, idx: usize) -> &f64 {
        &self.values[idx]
    }
}

impl IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, idx: usize) -> &mut f64 {
        &mut self.values[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(components: [ScalarField; 3]) -> Result<Self> {
        let g = components[0].grid;
        components[1].grid.ensure_same(&g)?;
        components[2].grid.ensure_same(&g)?;
        Ok(Self { components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            components: std::array::from_fn(|_| ScalarField::zeros(grid)),
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let [x, y, z] = grid.position(idx);
            let v = f(x, y, z);
            for (c, comp) in out.components.iter_mut().enumerate() {
                comp.values[idx] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.components[0].grid
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &ScalarField {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut ScalarField {
        &mut self.components[c]
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.components[0].values[idx],
            self.components[1].values[idx],
            self.components[2].values[idx],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let grid = *self.grid();
        let values = (0..grid.len())
            .map(|idx| {
                let [a, b, c] = self.at(idx);
                (a * a + b * b + c * c).sqrt()
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            components: std::array::from_fn(|i| self.components[i].scaled(c)),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &VectorField) -> Result<Self> {
        self.grid().ensure_same(other.grid())?;
        let components = std::array::from_fn(|i| {
            let values = self.components[i]
                .values
                .iter()
                .zip(&other.components[i].values)
                .map(|(a, b)| a + c * b)
                .collect();
            ScalarField {
                grid: *self.grid(),
                values,
            }
        });
        Ok(Self { components })
    }

    /// Midpoint-rule `∫ a·b dx`.
    pub fn inner(&self, other: &VectorField) -> Result<f64> {
        self.grid().ensure_same(other.grid())?;
        let mut acc = 0.0;
        for c in 0..3 {
            for (a, b) in self.components[c]
                .values
                .iter()
                .zip(&other.components[c].values)
            {
                acc += a * b;
            }
        }
        Ok(acc * self.grid().cell_volume())
    }
}

/// Anything whose pointwise magnitude can be integrated.
pub trait Magnitudes {
    fn grid_spec(&self) -> &GridSpec;
    fn pointwise_magnitude(&self, idx: usize) -> f64;
    fn all_finite(&self) -> bool;
}

impl Magnitudes for ScalarField {
    fn grid_spec(&self) -> &GridSpec {
        &self.grid
    }
    fn pointwise_magnitude(&self, idx: usize) -> f64 {
        self.values[idx].abs()
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl Magnitudes for VectorField {
    fn grid_spec(&self) -> &GridSpec {
        self.grid()
    }
    fn pointwise_magnitude(&self, idx: usize) -> f64 {
        let [a, b, c] = self.at(idx);
        (a * a + b * b + c * c).sqrt()
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

/// `(Σ |f|^r · cellvol)^{1/r}`.
pub fn lp_norm<F: Magnitudes + ?Sized>(f: &F, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("Lebesgue exponent must be in (0, inf), got {r}")));
    }
    if !f.all_finite() {
        return Err(Error::InvalidField("non-finite entries".into()));
    }
    let grid = f.grid_spec();
    // Scale by the max first so large r cannot overflow.
    let m = linf_norm(f)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = (0..grid.len())
        .map(|idx| (f.pointwise_magnitude(idx) / m).powf(r))
        .sum();
    Ok(m * (sum * grid.cell_volume()).powf(1.0 / r))
}

pub fn linf_norm<F: Magnitudes + ?Sized>(f: &F) -> Result<f64> {
    if !f.all_finite() {
        return Err(Error::InvalidField("non-finite entries".into()));
    }
    Ok((0..f.grid_spec().len())
        .map(|idx| f.pointwise_magnitude(idx))
        .fold(0.0, f64::max))
}
