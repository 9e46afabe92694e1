//! Biaxial orientational elasticity: the twelve-modulus energy density, its
//! split into a one-constant part plus nonnegative corrections, the
//! variational forces, the distortion stress and the body force.
//!
//! All fields depend on `(x, y)` only, so every `∂z` vanishes. The moduli are
//! indexed as follows (zero-based `K[m]`):
//!
//! | `m`    | term                       |
//! |--------|----------------------------|
//! | 0..3   | `(div n_i)²`               |
//! | 3..6   | `(n_i·curl n_i)²`          |
//! | 6, 7, 8 | `(n3·curl n1)²`, `(n1·curl n2)²`, `(n2·curl n3)²` |
//! | 9, 10, 11 | `(n2·curl n1)²`, `(n3·curl n2)²`, `(n1·curl n3)²` |

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frame::Triple;
use crate::frame_field::{comp, frame_spectra, FrameField, FrameGradients};
use crate::spectral::{same_grid, Field, ScalarField, Spectral, Tensor33Field, Vec2Field, Vec3Field};
use num_complex::Complex64;

/// `CURL_MODULUS[i][j]` is the index into `K` of the `(n_i·curl n_j)²` term.
pub const CURL_MODULUS: [[usize; 3]; 3] = [[3, 7, 11], [9, 4, 8], [6, 10, 5]];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticParams {
    moduli: [f64; 12],
    /// `γ_i`: coefficient of the one-constant part `½γ_i|∇n_i|²`.
    pub gamma: [f64; 3],
    /// `k_i`: coefficient of `½(div n_i)²`.
    pub k: [f64; 3],
    /// `kk[i][j]`: coefficient of `½(n_i·curl n_j)²`.
    pub kk: [[f64; 3]; 3],
}

/// Splits the moduli into `γ_j = min` over the terms involving `n_j`'s
/// derivatives and the nonnegative excesses.
pub fn split_constants(moduli: [f64; 12]) -> Result<ElasticParams> {
    let bad: Vec<String> = moduli
        .iter()
        .enumerate()
        .filter(|(_, &x)| !(x > 0.0 && x.is_finite()))
        .map(|(m, x)| format!("K{} = {x}", m + 1))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Parameter(format!(
            "elastic moduli must all be positive: {}",
            bad.join(", ")
        )));
    }
    let gamma: [f64; 3] = std::array::from_fn(|j| {
        (0..3)
            .map(|i| moduli[CURL_MODULUS[i][j]])
            .fold(moduli[j], f64::min)
    });
    Ok(ElasticParams {
        moduli,
        gamma,
        k: std::array::from_fn(|i| moduli[i] - gamma[i]),
        kk: std::array::from_fn(|i| std::array::from_fn(|j| moduli[CURL_MODULUS[i][j]] - gamma[j])),
    })
}

impl ElasticParams {
    pub fn from_moduli(moduli: [f64; 12]) -> Result<Self> {
        split_constants(moduli)
    }

    /// Every modulus equal to `k`.
    pub fn one_constant(k: f64) -> Result<Self> {
        split_constants([k; 12])
    }

    pub fn moduli(&self) -> &[f64; 12] {
        &self.moduli
    }

    pub fn gamma_min(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma.iter().copied().fold(0.0, f64::max)
    }

    /// Largest modulus. Bounds the symbol of the linearized elastic operator
    /// on each `n_j` by `K_max |k|²`, since `(div u)² + |curl u|² = |k|²|u|²`
    /// mode by mode.
    pub fn max_modulus(&self) -> f64 {
        self.moduli.iter().copied().fold(0.0, f64::max)
    }
}

#[inline]
fn curl(d: &[Vector3<f64>; 2]) -> Vector3<f64> {
    Vector3::new(d[1].z, -d[0].z, d[0].y - d[1].x)
}

#[inline]
fn div(d: &[Vector3<f64>; 2]) -> f64 {
    d[0].x + d[1].y
}

fn check(sp_grid: crate::spectral::Grid2D, f: &FrameField, g: &FrameGradients) -> Result<()> {
    same_grid(sp_grid, f.grid())?;
    same_grid(f.grid(), g.dx.grid())
}

/// The fifteen-term density: twelve bulk terms with the moduli `K`, plus the
/// surface terms `γ_i(tr(∇n_i)² − (div n_i)²)` written in their expanded
/// two-dimensional form `2(∂x n_y ∂y n_x − ∂x n_x ∂y n_y)`.
pub fn elastic_density_direct(
    f: &FrameField,
    grads: &FrameGradients,
    p: &ElasticParams,
) -> Result<ScalarField> {
    check(f.grid(), f, grads)?;
    let km = &p.moduli;
    let mut out = ScalarField::zeros(f.grid());
    for idx in 0..f.grid().points() {
        let n = f.triple_at(idx);
        let d = grads.at(idx);
        let c: [Vector3<f64>; 3] = std::array::from_fn(|a| curl(&d[a]));
        let mut s = 0.0;
        for i in 0..3 {
            s += km[i] * div(&d[i]).powi(2);
            for j in 0..3 {
                s += km[CURL_MODULUS[i][j]] * n[i].dot(&c[j]).powi(2);
            }
            s += p.gamma[i] * 2.0 * (d[i][0].y * d[i][1].x - d[i][0].x * d[i][1].y);
        }
        out[0][idx] = 0.5 * s;
    }
    Ok(out)
}

/// `½Σγ_i|∇n_i|² + ½(Σk_i(div n_i)² + Σk_ij(n_i·curl n_j)²)`.
pub fn elastic_density_split(
    f: &FrameField,
    grads: &FrameGradients,
    p: &ElasticParams,
) -> Result<ScalarField> {
    check(f.grid(), f, grads)?;
    let mut out = ScalarField::zeros(f.grid());
    for idx in 0..f.grid().points() {
        out[0][idx] = density_split_at(&f.triple_at(idx), &grads.at(idx), p);
    }
    Ok(out)
}

#[inline]
fn density_split_at(n: &Triple, d: &[[Vector3<f64>; 2]; 3], p: &ElasticParams) -> f64 {
    let c: [Vector3<f64>; 3] = std::array::from_fn(|a| curl(&d[a]));
    let mut s = 0.0;
    for i in 0..3 {
        s += p.gamma[i] * (d[i][0].norm_squared() + d[i][1].norm_squared());
        s += p.k[i] * div(&d[i]).powi(2);
        for j in 0..3 {
            if p.kk[i][j] != 0.0 {
                s += p.kk[i][j] * n[i].dot(&c[j]).powi(2);
            }
        }
    }
    0.5 * s
}

/// Quadrature of the split density.
pub fn elastic_energy(f: &FrameField, grads: &FrameGradients, p: &ElasticParams) -> Result<f64> {
    check(f.grid(), f, grads)?;
    let s: f64 = (0..f.grid().points())
        .map(|idx| density_split_at(&f.triple_at(idx), &grads.at(idx), p))
        .sum();
    Ok(s * f.grid().cell_area())
}

/// `h_α = −δF/δn_α` (unconstrained) and the rotational derivatives
/// `ml_k = ℒ_k F` of the elastic energy.
#[derive(Clone, Debug)]
pub struct VariationalForces {
    /// `h_α` component `k` at `3α + k`.
    pub h: Field<9>,
    pub ml: Vec3Field,
}

impl VariationalForces {
    pub fn h_at(&self, idx: usize) -> Triple {
        std::array::from_fn(|a| {
            Vector3::new(
                self.h[comp(a, 0)][idx],
                self.h[comp(a, 1)][idx],
                self.h[comp(a, 2)][idx],
            )
        })
    }
}

/// `h_i = γ_iΔn_i + k_i∇div n_i − Σ_j k_ji curl((n_j·curl n_i) n_j)
/// − Σ_j k_ij (n_i·curl n_j) curl n_j`, with `ml1 = n2·h3 − n3·h2` and cyclic.
///
/// Every derivative is the spectral one, so `h` is the exact gradient of the
/// quadrature of the split density with respect to the grid values.
pub fn variational_forces(sp: &Spectral, f: &FrameField, p: &ElasticParams) -> Result<VariationalForces> {
    Ok(evaluate(sp, f, p)?.1)
}

/// Gradients and variational forces in one pass over the frame spectra.
pub fn evaluate(
    sp: &Spectral,
    f: &FrameField,
    p: &ElasticParams,
) -> Result<(FrameGradients, VariationalForces)> {
    let grid = f.grid();
    same_grid(sp.grid(), grid)?;
    let hats = frame_spectra(sp, f.components());
    let grads = FrameGradients::from_spectra(sp, grid, &hats);
    let np = grid.points();

    let mut curls = Field::<9>::zeros(grid);
    let mut w = Field::<9>::zeros(grid);
    for idx in 0..np {
        let n = f.triple_at(idx);
        let d = grads.at(idx);
        let c: [Vector3<f64>; 3] = std::array::from_fn(|a| curl(&d[a]));
        for i in 0..3 {
            let mut wi = Vector3::zeros();
            for j in 0..3 {
                let kji = p.kk[j][i];
                if kji != 0.0 {
                    wi += n[j] * (kji * n[j].dot(&c[i]));
                }
            }
            for k in 0..3 {
                curls[comp(i, k)][idx] = c[i][k];
                w[comp(i, k)][idx] = wi[k];
            }
        }
    }
    let w_refs: Vec<&[f64]> = w.comps().iter().map(|c| c.as_slice()).collect();
    let w_hats = sp.forward_many(&w_refs);

    let mut lin_hats: Vec<Vec<Complex64>> = Vec::with_capacity(9);
    for i in 0..3 {
        let (g, ki) = (p.gamma[i], p.k[i]);
        let mut hx = vec![Complex64::default(); np];
        let mut hy = vec![Complex64::default(); np];
        let mut hz = vec![Complex64::default(); np];
        let (nx, ny, nz) = (&hats[comp(i, 0)], &hats[comp(i, 1)], &hats[comp(i, 2)]);
        let (wx, wy, wz) = (&w_hats[comp(i, 0)], &w_hats[comp(i, 1)], &w_hats[comp(i, 2)]);
        for m in 0..np {
            let (kx, ky) = sp.k_deriv(m);
            let lap = -(kx * kx + ky * ky);
            let ikx = Complex64::new(0.0, kx);
            let iky = Complex64::new(0.0, ky);
            let dv = ikx * nx[m] + iky * ny[m];
            hx[m] = nx[m] * (g * lap) + ikx * dv * ki - iky * wz[m];
            hy[m] = ny[m] * (g * lap) + iky * dv * ki + ikx * wz[m];
            hz[m] = nz[m] * (g * lap) - (ikx * wy[m] - iky * wx[m]);
        }
        lin_hats.push(hx);
        lin_hats.push(hy);
        lin_hats.push(hz);
    }
    let lin = sp.inverse_many(&lin_hats);

    let mut h = Field::<9>::zeros(grid);
    let mut ml = Vec3Field::zeros(grid);
    for idx in 0..np {
        let n = f.triple_at(idx);
        let c: [Vector3<f64>; 3] = std::array::from_fn(|a| {
            Vector3::new(curls[comp(a, 0)][idx], curls[comp(a, 1)][idx], curls[comp(a, 2)][idx])
        });
        let mut hv: Triple = std::array::from_fn(|i| {
            Vector3::new(lin[comp(i, 0)][idx], lin[comp(i, 1)][idx], lin[comp(i, 2)][idx])
        });
        for i in 0..3 {
            for j in 0..3 {
                let kij = p.kk[i][j];
                if kij != 0.0 {
                    hv[i] -= c[j] * (kij * n[i].dot(&c[j]));
                }
            }
            for k in 0..3 {
                h[comp(i, k)][idx] = hv[i][k];
            }
        }
        let m = rotational_forces(&n, &hv);
        ml.set(idx, m);
    }
    Ok((grads, VariationalForces { h, ml }))
}

/// `(n2·h3 − n3·h2, n3·h1 − n1·h3, n1·h2 − n2·h1)`.
#[inline]
pub fn rotational_forces(n: &Triple, h: &Triple) -> [f64; 3] {
    [
        n[1].dot(&h[2]) - n[2].dot(&h[1]),
        n[2].dot(&h[0]) - n[0].dot(&h[2]),
        n[0].dot(&h[1]) - n[1].dot(&h[0]),
    ]
}

/// Distortion stress `σ^d_ij = −Σ_α ∂f/∂(∂_j n_α)·∂_i n_α` of the split
/// density. With `u_α = Σ_β k_βα (n_β·curl n_α) n_β`,
///
/// `σ^d_ij = −Σ_α [γ_α ∂_j n_α·∂_i n_α + k_α (div n_α) ∂_i n_αj − (u_α × ∂_i n_α)_j]`.
///
/// Rows `i = x, y` are filled; the `z` row is left zero.
pub fn distortion_stress(
    f: &FrameField,
    grads: &FrameGradients,
    p: &ElasticParams,
) -> Result<Tensor33Field> {
    check(f.grid(), f, grads)?;
    let mut out = Tensor33Field::zeros(f.grid());
    for idx in 0..f.grid().points() {
        let n = f.triple_at(idx);
        let d = grads.at(idx);
        let mut row = [[0.0; 3]; 2];
        for a in 0..3 {
            let c = curl(&d[a]);
            let mut u = Vector3::zeros();
            for b in 0..3 {
                let kba = p.kk[b][a];
                if kba != 0.0 {
                    u += n[b] * (kba * n[b].dot(&c));
                }
            }
            let dv = div(&d[a]);
            for i in 0..2 {
                let ui = u.cross(&d[a][i]);
                for j in 0..3 {
                    let grad = if j < 2 { p.gamma[a] * d[a][j].dot(&d[a][i]) } else { 0.0 };
                    row[i][j] -= grad + p.k[a] * dv * d[a][i][j] - ui[j];
                }
            }
        }
        for i in 0..2 {
            for j in 0..3 {
                out[3 * i + j][idx] = row[i][j];
            }
        }
    }
    Ok(out)
}

/// `𝔉_i = ∂_i n1·n2 ml3 + ∂_i n3·n1 ml2 + ∂_i n2·n3 ml1`.
pub fn body_force(
    f: &FrameField,
    grads: &FrameGradients,
    vf: &VariationalForces,
) -> Result<Vec2Field> {
    same_grid(f.grid(), grads.dx.grid())?;
    same_grid(f.grid(), vf.ml.grid())?;
    let mut out = Vec2Field::zeros(f.grid());
    for idx in 0..f.grid().points() {
        let n = f.triple_at(idx);
        let d = grads.at(idx);
        let ml = vf.ml.at(idx);
        for i in 0..2 {
            out[i][idx] =
                d[0][i].dot(&n[1]) * ml[2] + d[2][i].dot(&n[0]) * ml[1] + d[1][i].dot(&n[2]) * ml[0];
        }
    }
    Ok(out)
}
