//! Periodic-grid fields and Fourier-space calculus.
//!
//! Conventions:
//! - forward transforms are unnormalized, inverse transforms divide by `n²`;
//! - the first-derivative multiplier `i k` is zero on the Nyquist index, so
//!   every derivative of a real field is real and skew-adjoint in the grid
//!   inner product;
//! - the Laplacian is the composition of those derivatives, `Δ = ∂x∂x + ∂y∂y`,
//!   which keeps every variational derivative an exact gradient of the
//!   quadrature energy.

mod field;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub use field::{Field, Grid2D, ScalarField, Tensor33Field, Vec2Field, Vec3Field};

use crate::error::Result;

/// Fraction of `k_max` retained by the dealiasing filter.
pub const DEALIAS_FRACTION: f64 = 2.0 / 3.0;

const ROWS_PER_TASK: usize = 8;

/// Transform plans and wavenumber tables for one grid. Cheap to clone; plans
/// are shared.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid2D,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Derivative wavenumber per 1D index (zero at Nyquist).
    k_deriv: Arc<Vec<f64>>,
    /// Signed wavenumber per 1D index (Nyquist kept as `+k_max`).
    k_signed: Arc<Vec<f64>>,
    retained: Arc<Vec<bool>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid2D) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let k0 = grid.k0();
        let k_signed: Vec<f64> = (0..n).map(|i| grid.mode(i) as f64 * k0).collect();
        let k_deriv: Vec<f64> = (0..n)
            .map(|i| if i == n / 2 { 0.0 } else { k_signed[i] })
            .collect();
        let cutoff = DEALIAS_FRACTION * grid.k_max();
        let retained = (0..grid.points())
            .map(|idx| {
                let (kx, ky) = (k_signed[idx % n], k_signed[idx / n]);
                (kx * kx + ky * ky).sqrt() <= cutoff * (1.0 + 1e-12)
            })
            .collect();
        Spectral {
            grid,
            fwd,
            inv,
            k_deriv: Arc::new(k_deriv),
            k_signed: Arc::new(k_signed),
            retained: Arc::new(retained),
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// Derivative wavenumbers `(kx, ky)` of a flat spectral index.
    #[inline]
    pub fn k_deriv(&self, idx: usize) -> (f64, f64) {
        let n = self.grid.n();
        (self.k_deriv[idx % n], self.k_deriv[idx / n])
    }

    /// Physical wavenumber magnitude `|k|` of a flat spectral index.
    #[inline]
    pub fn k_abs(&self, idx: usize) -> f64 {
        let n = self.grid.n();
        self.k_signed[idx % n].hypot(self.k_signed[idx / n])
    }

    /// Whether the mode survives the 2/3 dealiasing filter.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        self.retained[idx]
    }

    /// Flat index of the mode `−k`.
    #[inline]
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.grid.n();
        let (ix, iy) = (idx % n, idx / n);
        ((n - iy) % n) * n + (n - ix) % n
    }

    fn fft2(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let scratch_len = plan.get_inplace_scratch_len();
        let run_rows = |buf: &mut [Complex64]| {
            buf.par_chunks_mut(n * ROWS_PER_TASK).for_each_init(
                || vec![Complex64::default(); scratch_len],
                |scratch, rows| plan.process_with_scratch(rows, scratch),
            );
        };
        run_rows(data);
        let mut t = transpose(data, n);
        run_rows(&mut t);
        transpose_into(&t, data, n);
    }

    fn fft_complex(&self, mut data: Vec<Complex64>) -> Vec<Complex64> {
        self.fft2(&mut data, &self.fwd);
        data
    }

    /// Forward transform of one real field.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        self.fft_complex(f.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Forward transforms of two real fields with a single complex FFT.
    pub fn forward_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let z = self.fft_complex(
            a.iter()
                .zip(b)
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
        );
        let mut fa = vec![Complex64::default(); z.len()];
        let mut fb = vec![Complex64::default(); z.len()];
        for idx in 0..z.len() {
            let zc = z[self.conj_index(idx)].conj();
            fa[idx] = (z[idx] + zc) * 0.5;
            fb[idx] = (z[idx] - zc) * Complex64::new(0.0, -0.5);
        }
        (fa, fb)
    }

    /// Forward transforms of many real fields, pairing them internally.
    pub fn forward_many(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(fields.len());
        for chunk in fields.chunks(2) {
            match chunk {
                [a, b] => {
                    let (fa, fb) = self.forward_pair(a, b);
                    out.push(fa);
                    out.push(fb);
                }
                [a] => out.push(self.forward(a)),
                _ => unreachable!(),
            }
        }
        out
    }

    /// Inverse transform of a Hermitian spectrum; returns the real part.
    pub fn inverse(&self, fh: &[Complex64]) -> Vec<f64> {
        let mut data = fh.to_vec();
        self.fft2(&mut data, &self.inv);
        let norm = 1.0 / self.grid.points() as f64;
        data.iter().map(|z| z.re * norm).collect()
    }

    /// Inverse transforms of two Hermitian spectra with a single complex FFT.
    pub fn inverse_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut data: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(x, y)| x + Complex64::new(-y.im, y.re))
            .collect();
        self.fft2(&mut data, &self.inv);
        let norm = 1.0 / self.grid.points() as f64;
        (
            data.iter().map(|z| z.re * norm).collect(),
            data.iter().map(|z| z.im * norm).collect(),
        )
    }

    /// Inverse transforms of many Hermitian spectra, pairing them internally.
    pub fn inverse_many(&self, spectra: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(spectra.len());
        for chunk in spectra.chunks(2) {
            match chunk {
                [a, b] => {
                    let (fa, fb) = self.inverse_pair(a, b);
                    out.push(fa);
                    out.push(fb);
                }
                [a] => out.push(self.inverse(a)),
                _ => unreachable!(),
            }
        }
        out
    }

    /// Spectrum of `∂x f` (axis 0) or `∂y f` (axis 1).
    pub fn deriv_hat(&self, fh: &[Complex64], axis: usize) -> Vec<Complex64> {
        fh.iter()
            .enumerate()
            .map(|(idx, z)| {
                let (kx, ky) = self.k_deriv(idx);
                let k = if axis == 0 { kx } else { ky };
                z * Complex64::new(0.0, k)
            })
            .collect()
    }

    /// Spectrum of `Δ f = ∂x∂x f + ∂y∂y f`.
    pub fn laplacian_hat(&self, fh: &[Complex64]) -> Vec<Complex64> {
        fh.iter()
            .enumerate()
            .map(|(idx, z)| {
                let (kx, ky) = self.k_deriv(idx);
                z * -(kx * kx + ky * ky)
            })
            .collect()
    }

    /// Zeroes every mode outside the 2/3 band, in place.
    pub fn dealias_hat(&self, fh: &mut [Complex64]) {
        for (idx, z) in fh.iter_mut().enumerate() {
            if !self.retained[idx] {
                *z = Complex64::default();
            }
        }
    }

    /// Leray projection of an in-plane vector spectrum, in place.
    pub fn leray_hat(&self, ux: &mut [Complex64], uy: &mut [Complex64]) {
        for idx in 0..ux.len() {
            let (kx, ky) = self.k_deriv(idx);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let kdotu = (ux[idx] * kx + uy[idx] * ky) / k2;
            ux[idx] -= kdotu * kx;
            uy[idx] -= kdotu * ky;
        }
    }

    pub fn grad(&self, f: &ScalarField) -> Vec2Field {
        let fh = self.forward(&f[0]);
        let (dx, dy) = self.inverse_pair(&self.deriv_hat(&fh, 0), &self.deriv_hat(&fh, 1));
        Vec2Field::from_comps(f.grid(), [dx, dy]).expect("grid-sized")
    }

    /// In-plane divergence `∂x u_x + ∂y u_y` of the first two components.
    pub fn div<const C: usize>(&self, u: &Field<C>) -> ScalarField {
        let hats = self.forward_many(&[&u[0], &u[1]]);
        let dx = self.deriv_hat(&hats[0], 0);
        let dy = self.deriv_hat(&hats[1], 1);
        let sum: Vec<Complex64> = dx.iter().zip(&dy).map(|(a, b)| a + b).collect();
        ScalarField::from_comps(u.grid(), [self.inverse(&sum)]).expect("grid-sized")
    }

    /// Curl of a 3-vector field depending on `(x, y)` only.
    pub fn curl3(&self, u: &Vec3Field) -> Vec3Field {
        let hats = self.forward_many(&[&u[0], &u[1], &u[2]]);
        let cx = self.deriv_hat(&hats[2], 1);
        let cy: Vec<Complex64> = self.deriv_hat(&hats[2], 0).iter().map(|z| -z).collect();
        let cz: Vec<Complex64> = self
            .deriv_hat(&hats[1], 0)
            .iter()
            .zip(self.deriv_hat(&hats[0], 1))
            .map(|(a, b)| a - b)
            .collect();
        let [x, y, z]: [Vec<f64>; 3] = self
            .inverse_many(&[cx, cy, cz])
            .try_into()
            .expect("three components");
        Vec3Field::from_comps(u.grid(), [x, y, z]).expect("grid-sized")
    }

    pub fn laplacian<const C: usize>(&self, f: &Field<C>) -> Field<C> {
        self.map_spectra(f, |sp, h| sp.laplacian_hat(h))
    }

    pub fn leray_project(&self, u: &Vec2Field) -> Vec2Field {
        let mut hats = self.forward_many(&[&u[0], &u[1]]);
        let (a, b) = hats.split_at_mut(1);
        self.leray_hat(&mut a[0], &mut b[0]);
        let [x, y]: [Vec<f64>; 2] = self.inverse_many(&hats).try_into().expect("two");
        Vec2Field::from_comps(u.grid(), [x, y]).expect("grid-sized")
    }

    pub fn dealias<const C: usize>(&self, f: &Field<C>) -> Field<C> {
        self.map_spectra(f, |sp, h| {
            let mut h = h.to_vec();
            sp.dealias_hat(&mut h);
            h
        })
    }

    fn map_spectra<const C: usize>(
        &self,
        f: &Field<C>,
        op: impl Fn(&Spectral, &[Complex64]) -> Vec<Complex64>,
    ) -> Field<C> {
        let refs: Vec<&[f64]> = f.comps().iter().map(|c| c.as_slice()).collect();
        let hats: Vec<Vec<Complex64>> = self
            .forward_many(&refs)
            .iter()
            .map(|h| op(self, h))
            .collect();
        let comps: [Vec<f64>; C] = self
            .inverse_many(&hats)
            .try_into()
            .expect("component count preserved");
        Field::from_comps(f.grid(), comps).expect("grid-sized")
    }

    /// Grid quadrature `∫|f|²` evaluated from an unnormalized spectrum.
    pub fn parseval_norm_sq(&self, fh: &[Complex64]) -> f64 {
        let np = self.grid.points() as f64;
        fh.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area() / np
    }
}

fn transpose(src: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::default(); src.len()];
    transpose_into(src, &mut dst, n);
    dst
}

fn transpose_into(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 16;
    for by in (0..n).step_by(B) {
        for bx in (0..n).step_by(B) {
            for y in by..(by + B).min(n) {
                for x in bx..(bx + B).min(n) {
                    dst[x * n + y] = src[y * n + x];
                }
            }
        }
    }
}

/// Shared error for mismatched grids.
pub(crate) fn same_grid(a: Grid2D, b: Grid2D) -> Result<()> {
    if a != b {
        return Err(crate::error::Error::Dimension(format!("grid {a:?} vs {b:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(n: usize, l: f64) -> Spectral {
        Spectral::new(Grid2D::new(n, l).unwrap())
    }

    #[test]
    fn derivative_of_single_mode() {
        let sp = setup(32, 3.0);
        let q = 2.0 * PI / 3.0;
        let f = ScalarField::from_fn(sp.grid(), |x, _| [(q * x).sin()]);
        let g = sp.grad(&f);
        let expect = ScalarField::from_fn(sp.grid(), |x, _| [q * (q * x).cos()]);
        let err = g[0]
            .iter()
            .zip(&expect[0])
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
        assert!(g[1].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let sp = setup(16, 1.0);
        let f = ScalarField::from_fn(sp.grid(), |_, _| [3.5]);
        assert!(sp.laplacian(&f).max_abs() < 1e-13);
    }

    #[test]
    fn pair_transforms_match_single() {
        let sp = setup(16, 2.0 * PI);
        let a = ScalarField::from_fn(sp.grid(), |x, y| [(x + 2.0 * y).sin() + 0.3]);
        let b = ScalarField::from_fn(sp.grid(), |x, y| [(3.0 * x).cos() * y.sin()]);
        let (fa, fb) = sp.forward_pair(&a[0], &b[0]);
        let sa = sp.forward(&a[0]);
        let sb = sp.forward(&b[0]);
        for i in 0..fa.len() {
            assert!((fa[i] - sa[i]).norm() < 1e-11);
            assert!((fb[i] - sb[i]).norm() < 1e-11);
        }
        let (ra, rb) = sp.inverse_pair(&sa, &sb);
        for i in 0..ra.len() {
            assert!((ra[i] - a[0][i]).abs() < 1e-13);
            assert!((rb[i] - b[0][i]).abs() < 1e-13);
        }
    }

    #[test]
    fn dealias_cuts_high_mode() {
        let sp = setup(32, 2.0 * PI);
        let low = ScalarField::from_fn(sp.grid(), |x, y| [(3.0 * x - 2.0 * y).cos()]);
        let high = ScalarField::from_fn(sp.grid(), |x, _| [(14.0 * x).sin()]);
        let d = sp.dealias(&low);
        assert!(d.sub(&low).max_abs() < 1e-13);
        assert!(sp.dealias(&high).max_abs() < 1e-13);
    }
}
