use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Square periodic lattice `[0, L)²` with `n` points per side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    n: usize,
    length: f64,
}

impl Grid2D {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, length: f64) -> Result<Self> {
        let mut errs = Vec::new();
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            errs.push(format!(
                "grid.n: {n} must be a power of two ≥ {}",
                Self::MIN_POINTS
            ));
        }
        if !(length > 0.0 && length.is_finite()) {
            errs.push(format!("grid.length: {length} must be positive"));
        }
        if errs.is_empty() {
            Ok(Grid2D { n, length })
        } else {
            Err(Error::Configuration(errs))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.n * self.n
    }

    /// Grid spacing `h = L/n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight of one grid point.
    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest resolved wavenumber `(n/2)·2π/L`.
    pub fn k_max(&self) -> f64 {
        (self.n / 2) as f64 * self.k0()
    }

    /// Flat index of `(ix, iy)`; x varies fastest.
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    /// Physical coordinates of a flat index.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    /// Signed integer mode number of an FFT index; the Nyquist index maps to `+n/2`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }
}

/// Real samples of a `C`-component field on a [`Grid2D`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field<const C: usize> {
    grid: Grid2D,
    comps: [Vec<f64>; C],
}

pub type ScalarField = Field<1>;
pub type Vec2Field = Field<2>;
pub type Vec3Field = Field<3>;
/// Row-major 3×3 tensor field: component `(i, j)` lives at `3i + j`.
pub type Tensor33Field = Field<9>;

impl<const C: usize> Field<C> {
    pub fn zeros(grid: Grid2D) -> Self {
        Field {
            grid,
            comps: std::array::from_fn(|_| vec![0.0; grid.points()]),
        }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> [f64; C]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.points() {
            let (x, y) = grid.coords(idx);
            let v = f(x, y);
            for (c, vc) in v.into_iter().enumerate() {
                out.comps[c][idx] = vc;
            }
        }
        out
    }

    pub fn from_comps(grid: Grid2D, comps: [Vec<f64>; C]) -> Result<Self> {
        for (c, v) in comps.iter().enumerate() {
            if v.len() != grid.points() {
                return Err(Error::Dimension(format!(
                    "component {c} has {} samples, grid has {}",
                    v.len(),
                    grid.points()
                )));
            }
        }
        Ok(Field { grid, comps })
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn comps(&self) -> &[Vec<f64>; C] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [Vec<f64>; C] {
        &mut self.comps
    }

    pub fn into_comps(self) -> [Vec<f64>; C] {
        self.comps
    }

    /// Pointwise value of all components.
    #[inline]
    pub fn at(&self, idx: usize) -> [f64; C] {
        std::array::from_fn(|c| self.comps[c][idx])
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [f64; C]) {
        for (c, vc) in v.into_iter().enumerate() {
            self.comps[c][idx] = vc;
        }
    }

    pub fn ensure_same_grid<const D: usize>(&self, other: &Field<D>) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Dimension(format!(
                "grid {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (s, o) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in s.iter_mut().zip(o) {
                *x += a * y;
            }
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for s in out.comps.iter_mut() {
            s.iter_mut().for_each(|x| *x *= a);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Grid quadrature of `Σ_c f_c g_c`.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        s * self.grid.cell_area()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.is_finite()))
    }
}

impl<const C: usize> Index<usize> for Field<C> {
    type Output = Vec<f64>;

    fn index(&self, c: usize) -> &Vec<f64> {
        &self.comps[c]
    }
}

impl<const C: usize> IndexMut<usize> for Field<C> {
    fn index_mut(&mut self, c: usize) -> &mut Vec<f64> {
        &mut self.comps[c]
    }
}
