//! Frame fields on the periodic grid.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frame::{Frame, Triple};
use crate::spectral::{Field, Grid2D, Spectral};

/// Nine components per grid point: `n_α` component `k` is stored at `3α + k`.
pub type FrameComponents = Field<9>;

#[inline]
pub fn comp(alpha: usize, k: usize) -> usize {
    3 * alpha + k
}

/// A field of orthonormal frames `p(x) = (n1, n2, n3)(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    data: FrameComponents,
}

impl FrameField {
    pub fn uniform(grid: Grid2D, f: &Frame) -> Self {
        Self::from_fn(grid, |_, _| *f)
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Frame) -> Self {
        let data = Field::from_fn(grid, |x, y| {
            let fr = f(x, y);
            std::array::from_fn(|c| fr.n[c / 3][c % 3])
        });
        FrameField { data }
    }

    /// Wraps raw components; orthonormality is not checked here.
    pub fn from_components(data: FrameComponents) -> Self {
        FrameField { data }
    }

    pub fn grid(&self) -> Grid2D {
        self.data.grid()
    }

    pub fn components(&self) -> &FrameComponents {
        &self.data
    }

    pub fn components_mut(&mut self) -> &mut FrameComponents {
        &mut self.data
    }

    pub fn into_components(self) -> FrameComponents {
        self.data
    }

    #[inline]
    pub fn triple_at(&self, idx: usize) -> Triple {
        let d = &self.data;
        std::array::from_fn(|a| {
            Vector3::new(d[comp(a, 0)][idx], d[comp(a, 1)][idx], d[comp(a, 2)][idx])
        })
    }

    #[inline]
    pub fn frame_at(&self, idx: usize) -> Frame {
        Frame::from_triple_unchecked(self.triple_at(idx))
    }

    #[inline]
    pub fn set_triple(&mut self, idx: usize, t: &Triple) {
        for (a, v) in t.iter().enumerate() {
            for k in 0..3 {
                self.data[comp(a, k)][idx] = v[k];
            }
        }
    }

    /// Largest `|F Fᵀ − I|` entry over the grid.
    pub fn orthonormality_error(&self) -> f64 {
        (0..self.grid().points())
            .map(|i| self.frame_at(i).orthonormality_error())
            .fold(0.0, f64::max)
    }

    /// Checks every grid point against the frame invariants.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.grid().points() {
            self.frame_at(i).validate().map_err(|e| match e {
                Error::InvalidFrame(m) => Error::InvalidFrame(format!("grid point {i}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }
}

/// First derivatives `∂x n_αk` and `∂y n_αk` of a frame field (∂z ≡ 0).
#[derive(Clone, Debug)]
pub struct FrameGradients {
    pub dx: FrameComponents,
    pub dy: FrameComponents,
}

impl FrameGradients {
    pub fn compute(sp: &Spectral, f: &FrameComponents) -> Self {
        Self::from_spectra(sp, f.grid(), &frame_spectra(sp, f))
    }

    pub(crate) fn from_spectra(
        sp: &Spectral,
        grid: Grid2D,
        hats: &[Vec<num_complex::Complex64>],
    ) -> Self {
        let mut d = Vec::with_capacity(18);
        for h in hats {
            d.push(sp.deriv_hat(h, 0));
            d.push(sp.deriv_hat(h, 1));
        }
        let mut real = sp.inverse_many(&d).into_iter();
        let mut dx: [Vec<f64>; 9] = Default::default();
        let mut dy: [Vec<f64>; 9] = Default::default();
        for c in 0..9 {
            dx[c] = real.next().expect("18 fields");
            dy[c] = real.next().expect("18 fields");
        }
        FrameGradients {
            dx: Field::from_comps(grid, dx).expect("grid-sized"),
            dy: Field::from_comps(grid, dy).expect("grid-sized"),
        }
    }

    /// `d[α][j] = ∂_j n_α` for `j ∈ {x, y}` at one grid point.
    #[inline]
    pub fn at(&self, idx: usize) -> [[Vector3<f64>; 2]; 3] {
        std::array::from_fn(|a| {
            [
                Vector3::new(
                    self.dx[comp(a, 0)][idx],
                    self.dx[comp(a, 1)][idx],
                    self.dx[comp(a, 2)][idx],
                ),
                Vector3::new(
                    self.dy[comp(a, 0)][idx],
                    self.dy[comp(a, 1)][idx],
                    self.dy[comp(a, 2)][idx],
                ),
            ]
        })
    }
}

pub(crate) fn frame_spectra(
    sp: &Spectral,
    f: &FrameComponents,
) -> Vec<Vec<num_complex::Complex64>> {
    let refs: Vec<&[f64]> = f.comps().iter().map(|c| c.as_slice()).collect();
    sp.forward_many(&refs)
}
