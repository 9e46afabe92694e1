//! Littlewood–Paley analysis on the periodic grid.
//!
//! Frequencies are measured in mode units `ξ = k L / 2π`, so the dyadic
//! annuli are those of the whole-plane theory applied to integer lattice
//! points. The partition is built from a smooth radial step `χ` (equal to 1 on
//! `|ξ| ≤ 3/4`, 0 on `|ξ| ≥ 4/3`) and `φ(ξ) = χ(ξ/2) − χ(ξ)`, so
//! `χ(ξ) + Σ_{j<J} φ(2^{−j}ξ) = χ(2^{−J}ξ)` telescopes exactly.
//!
//! Blocks run over `j = −1..=j_max` with `j_max = log₂(n/2) − 1`; together
//! they reconstruct every mode with `|ξ| ≤ 3n/8`, which contains the
//! dealiased band.

use num_complex::Complex64;

use crate::elasticity::{rotational_forces, ElasticParams, VariationalForces};
use crate::error::{Error, Result};
use crate::frame::Triple;
use crate::frame_field::{comp, frame_spectra, FrameComponents, FrameField, FrameGradients};
use crate::spectral::{same_grid, Field, Grid2D, ScalarField, Spectral, Vec2Field};
use nalgebra::Vector3;

const CHI_INNER: f64 = 3.0 / 4.0;
const CHI_OUTER: f64 = 4.0 / 3.0;

fn bump_tail(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth radial low-pass profile: 1 for `r ≤ 3/4`, 0 for `r ≥ 4/3`,
/// nonincreasing in between.
pub fn chi(r: f64) -> f64 {
    if r <= CHI_INNER {
        1.0
    } else if r >= CHI_OUTER {
        0.0
    } else {
        let t = (CHI_OUTER - r) / (CHI_OUTER - CHI_INNER);
        let a = bump_tail(t);
        a / (a + bump_tail(1.0 - t))
    }
}

/// Annulus profile `φ(r) = χ(r/2) − χ(r)`, supported in `3/4 ≤ r ≤ 8/3`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Block multipliers of the dyadic partition on one grid.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid2D,
    j_max: i32,
    /// `blocks[j + 1][m]` is the multiplier of `Δ_j` at spectral index `m`.
    blocks: Vec<Vec<f64>>,
    /// `|ξ|` per spectral index.
    xi: Vec<f64>,
}

pub fn build_partition(grid: Grid2D) -> Result<DyadicPartition> {
    let j_max = (grid.n() / 2).ilog2() as i32 - 1;
    if j_max < 1 {
        return Err(Error::config(format!(
            "grid.n: {} too small for a dyadic partition with j_max ≥ 1",
            grid.n()
        )));
    }
    let n = grid.n();
    let xi: Vec<f64> = (0..grid.points())
        .map(|m| (grid.mode(m % n) as f64).hypot(grid.mode(m / n) as f64))
        .collect();
    let blocks = (-1..=j_max)
        .map(|j| {
            xi.iter()
                .map(|&r| {
                    if j < 0 {
                        chi(r)
                    } else {
                        phi(r / f64::powi(2.0, j))
                    }
                })
                .collect()
        })
        .collect();
    Ok(DyadicPartition {
        grid,
        j_max,
        blocks,
        xi,
    })
}

impl DyadicPartition {
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// All block indices `−1..=j_max`.
    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.j_max
    }

    /// `|ξ|` of a spectral index, in mode units.
    pub fn xi(&self, m: usize) -> f64 {
        self.xi[m]
    }

    /// Multiplier of `Δ_j`.
    pub fn block(&self, j: i32) -> Result<&[f64]> {
        if !self.j_range().contains(&j) {
            return Err(Error::Index {
                index: j as i64,
                range: format!("[-1, {}]", self.j_max),
            });
        }
        Ok(&self.blocks[(j + 1) as usize])
    }

    /// Multiplier of `S_j = Σ_{k ≤ j−1} Δ_k`, `j ∈ [0, j_max + 1]`.
    pub fn low_pass(&self, j: i32) -> Result<Vec<f64>> {
        if !(0..=self.j_max + 1).contains(&j) {
            return Err(Error::Index {
                index: j as i64,
                range: format!("[0, {}]", self.j_max + 1),
            });
        }
        let scale = f64::powi(2.0, j);
        Ok(self.xi.iter().map(|&r| chi(r / scale)).collect())
    }

    /// `χ(ξ) + Σ_j φ(2^{−j}ξ)` at spectral index `m`.
    pub fn partition_sum(&self, m: usize) -> f64 {
        self.blocks.iter().map(|b| b[m]).sum()
    }
}

/// Dyadic blocks and the norms built on them, for one grid.
#[derive(Clone, Debug)]
pub struct LittlewoodPaley {
    sp: Spectral,
    part: DyadicPartition,
}

/// Fine index `q` of a Besov norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BesovQ {
    Two,
    Infinity,
}

impl BesovQ {
    pub fn from_f64(q: f64) -> Result<Self> {
        if q == 2.0 {
            Ok(BesovQ::Two)
        } else if q == f64::INFINITY {
            Ok(BesovQ::Infinity)
        } else {
            Err(Error::config(format!("besov q = {q}: only 2 and ∞ are supported")))
        }
    }
}

impl LittlewoodPaley {
    pub fn new(sp: Spectral) -> Result<Self> {
        let part = build_partition(sp.grid())?;
        Ok(LittlewoodPaley { sp, part })
    }

    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.part
    }

    pub fn j_max(&self) -> i32 {
        self.part.j_max
    }

    fn apply<const C: usize>(&self, f: &Field<C>, mult: &[f64]) -> Result<Field<C>> {
        same_grid(self.sp.grid(), f.grid())?;
        let refs: Vec<&[f64]> = f.comps().iter().map(|c| c.as_slice()).collect();
        let hats: Vec<Vec<Complex64>> = self
            .sp
            .forward_many(&refs)
            .into_iter()
            .map(|h| h.iter().zip(mult).map(|(z, w)| z * w).collect())
            .collect();
        let comps: [Vec<f64>; C] = self.sp.inverse_many(&hats).try_into().expect("count");
        Field::from_comps(f.grid(), comps)
    }

    pub fn delta_j<const C: usize>(&self, f: &Field<C>, j: i32) -> Result<Field<C>> {
        let b = self.part.block(j)?.to_vec();
        self.apply(f, &b)
    }

    pub fn s_j<const C: usize>(&self, f: &Field<C>, j: i32) -> Result<Field<C>> {
        let b = self.part.low_pass(j)?;
        self.apply(f, &b)
    }

    /// `‖Δ_j f‖²` for every block, summed over components, from spectra.
    pub fn block_norms_sq_hat(&self, hats: &[Vec<Complex64>]) -> Vec<f64> {
        let scale = self.sp.grid().cell_area() / self.sp.grid().points() as f64;
        self.part
            .blocks
            .iter()
            .map(|b| {
                hats.iter()
                    .map(|h| {
                        h.iter()
                            .zip(b)
                            .map(|(z, w)| z.norm_sqr() * w * w)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
                    * scale
            })
            .collect()
    }

    pub fn block_norms_sq<const C: usize>(&self, f: &Field<C>) -> Result<Vec<f64>> {
        same_grid(self.sp.grid(), f.grid())?;
        Ok(self.block_norms_sq_hat(&spectra(&self.sp, f)))
    }

    /// `‖f‖_{B^s_{2,q}}` for `q ∈ {2, ∞}`.
    pub fn besov_norm<const C: usize>(&self, f: &Field<C>, s: f64, q: f64) -> Result<f64> {
        let q = BesovQ::from_f64(q)?;
        if !s.is_finite() {
            return Err(Error::config(format!("besov s = {s} must be finite")));
        }
        let norms = self.block_norms_sq(f)?;
        let weighted = self
            .part
            .j_range()
            .zip(norms)
            .map(|(j, n2)| f64::powi(2.0, 2 * j).powf(s) * n2);
        Ok(match q {
            BesovQ::Two => weighted.sum::<f64>().sqrt(),
            BesovQ::Infinity => weighted.fold(0.0, f64::max).sqrt(),
        })
    }

    /// `‖f‖_{H^s}` with the weight `(1 + |ξ|²)^{s/2}`.
    pub fn sobolev_norm<const C: usize>(&self, f: &Field<C>, s: f64) -> Result<f64> {
        same_grid(self.sp.grid(), f.grid())?;
        let scale = self.sp.grid().cell_area() / self.sp.grid().points() as f64;
        let total: f64 = spectra(&self.sp, f)
            .iter()
            .map(|h| {
                h.iter()
                    .enumerate()
                    .map(|(m, z)| z.norm_sqr() * (1.0 + self.part.xi[m].powi(2)).powf(s))
                    .sum::<f64>()
            })
            .sum();
        Ok((total * scale).sqrt())
    }

    /// `2^{−j}‖∇Δ_j f‖ / ‖Δ_j f‖` with `∇` in mode units, i.e. divided by `2π/L`.
    pub fn bernstein_ratio(&self, f: &ScalarField, j: i32) -> Result<f64> {
        same_grid(self.sp.grid(), f.grid())?;
        let b = self.part.block(j)?;
        let fh = self.sp.forward(&f[0]);
        let k0 = self.sp.grid().k0();
        let (mut num, mut den, mut total) = (0.0, 0.0, 0.0);
        for (m, z) in fh.iter().enumerate() {
            let (kx, ky) = self.sp.k_deriv(m);
            let e = z.norm_sqr();
            let w = b[m] * b[m] * e;
            den += w;
            num += w * (kx * kx + ky * ky) / (k0 * k0);
            total += e;
        }
        if den == 0.0 || den <= 1e-28 * total {
            return Err(Error::UndefinedRatio(format!("block {j} of the field is empty")));
        }
        Ok(f64::powi(2.0, -j) * (num / den).sqrt())
    }
}

fn spectra<const C: usize>(sp: &Spectral, f: &Field<C>) -> Vec<Vec<Complex64>> {
    let refs: Vec<&[f64]> = f.comps().iter().map(|c| c.as_slice()).collect();
    sp.forward_many(&refs)
}

/// Besov index of the weak metrics, `0 < s < 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakMetricConfig {
    s: f64,
}

impl WeakMetricConfig {
    pub const DEFAULT_S: f64 = 0.25;

    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 0.5) {
            return Err(Error::config(format!("besov_s: {s} must lie in (0, 1/2)")));
        }
        Ok(WeakMetricConfig { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl Default for WeakMetricConfig {
    fn default() -> Self {
        WeakMetricConfig { s: Self::DEFAULT_S }
    }
}

/// Difference of two states `(p1 − p2, v1 − v2)` with cached spectra.
#[derive(Clone, Debug)]
pub struct TwinDiff {
    pub dv: Vec2Field,
    pub dframe: FrameComponents,
    dv_hat: Vec<Vec<Complex64>>,
    dframe_hat: Vec<Vec<Complex64>>,
}

impl TwinDiff {
    pub fn new(
        sp: &Spectral,
        f1: &FrameField,
        v1: &Vec2Field,
        f2: &FrameField,
        v2: &Vec2Field,
    ) -> Result<Self> {
        for g in [f1.grid(), v1.grid(), f2.grid(), v2.grid()] {
            same_grid(sp.grid(), g)?;
        }
        Ok(Self::from_fields(
            sp,
            v1.sub(v2),
            f1.components().sub(f2.components()),
        ))
    }

    pub fn from_fields(sp: &Spectral, dv: Vec2Field, dframe: FrameComponents) -> Self {
        let dv_hat = spectra(sp, &dv);
        let dframe_hat = frame_spectra(sp, &dframe);
        TwinDiff {
            dv,
            dframe,
            dv_hat,
            dframe_hat,
        }
    }

    pub fn dframe_hat(&self) -> &[Vec<Complex64>] {
        &self.dframe_hat
    }

    pub fn dv_hat(&self) -> &[Vec<Complex64>] {
        &self.dv_hat
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakMetrics {
    /// `sup_j 2^{−2sj}‖Δ_j δv‖²`.
    pub v: f64,
    /// `sup_j 2^{2(1−s)j}‖Δ_j δp‖²`.
    pub u: f64,
    pub phi: f64,
}

impl LittlewoodPaley {
    pub fn weak_metrics(&self, d: &TwinDiff, cfg: &WeakMetricConfig) -> WeakMetrics {
        let s = cfg.s();
        let sup = |norms: Vec<f64>, w: &dyn Fn(i32) -> f64| {
            self.part
                .j_range()
                .zip(norms)
                .map(|(j, n2)| w(j) * n2)
                .fold(0.0, f64::max)
        };
        let v = sup(self.block_norms_sq_hat(&d.dv_hat), &|j| {
            f64::powf(2.0, -2.0 * s * j as f64)
        });
        let u = sup(self.block_norms_sq_hat(&d.dframe_hat), &|j| {
            f64::powf(2.0, 2.0 * (1.0 - s) * j as f64)
        });
        WeakMetrics { v, u, phi: v + u }
    }

    fn block_spectra(&self, hats: &[Vec<Complex64>], j: i32) -> Result<Vec<Vec<Complex64>>> {
        let b = self.part.block(j)?;
        Ok(hats
            .iter()
            .map(|h| h.iter().zip(b).map(|(z, w)| z * w).collect())
            .collect())
    }

    /// `∫W^j = ½(Σγ_i‖∇Δ_jδn_i‖² + Σk_i‖div Δ_jδn_i‖² + Σk_ij‖n_i⁽¹⁾·curl Δ_jδn_j‖²)`.
    pub fn wj_functional(
        &self,
        d: &TwinDiff,
        f1: &FrameField,
        p: &ElasticParams,
        j: i32,
    ) -> Result<f64> {
        same_grid(self.sp.grid(), f1.grid())?;
        let sp = &self.sp;
        let hats = self.block_spectra(&d.dframe_hat, j)?;
        let scale = sp.grid().cell_area() / sp.grid().points() as f64;
        let mut total = 0.0;
        for i in 0..3 {
            let (mut grad2, mut div2) = (0.0, 0.0);
            for m in 0..hats[0].len() {
                let (kx, ky) = sp.k_deriv(m);
                let k2 = kx * kx + ky * ky;
                for c in 0..3 {
                    grad2 += k2 * hats[comp(i, c)][m].norm_sqr();
                }
                div2 += (hats[comp(i, 0)][m] * kx + hats[comp(i, 1)][m] * ky).norm_sqr();
            }
            total += p.gamma[i] * grad2 * scale + p.k[i] * div2 * scale;
        }
        if p.kk.iter().flatten().any(|&x| x != 0.0) {
            let grads = FrameGradients::from_spectra(sp, sp.grid(), &hats);
            let w = sp.grid().cell_area();
            for idx in 0..sp.grid().points() {
                let n = f1.triple_at(idx);
                let dd = grads.at(idx);
                for jj in 0..3 {
                    let c = Vector3::new(dd[jj][1].z, -dd[jj][0].z, dd[jj][0].y - dd[jj][1].x);
                    for i in 0..3 {
                        let kij = p.kk[i][jj];
                        if kij != 0.0 {
                            total += kij * n[i].dot(&c).powi(2) * w;
                        }
                    }
                }
            }
        }
        Ok(0.5 * total)
    }

    /// `c` in `∫W^j + ‖Δ_{−1}δp‖² ≥ c 2^{2j}‖Δ_jδp‖²`, from the smallest
    /// `|k|²/2^{2j}` over the nonempty, non-Nyquist modes of each block `j ≥ 0`,
    /// times `γ_min/2`, capped at 1 so that `𝒲 ≥ c𝒰` also covers `j = −1`.
    pub fn wj_relation_constant(&self, p: &ElasticParams) -> f64 {
        let sp = &self.sp;
        let n = sp.grid().n();
        let mut kmin = f64::INFINITY;
        for j in 0..=self.part.j_max {
            let b = &self.part.blocks[(j + 1) as usize];
            for (m, &w) in b.iter().enumerate() {
                if w == 0.0 || m % n == n / 2 || m / n == n / 2 {
                    continue;
                }
                let (kx, ky) = sp.k_deriv(m);
                kmin = kmin.min((kx * kx + ky * ky) / f64::powi(4.0, j));
            }
        }
        (0.5 * p.gamma_min() * kmin).min(1.0)
    }

    /// `𝒲 = sup_j 2^{−2sj}∫W^j + ‖Δ_{−1}δp‖²`.
    pub fn w_functional(
        &self,
        d: &TwinDiff,
        f1: &FrameField,
        p: &ElasticParams,
        cfg: &WeakMetricConfig,
    ) -> Result<f64> {
        let mut sup = 0.0_f64;
        for j in self.part.j_range() {
            let wj = self.wj_functional(d, f1, p, j)?;
            sup = sup.max(f64::powf(2.0, -2.0 * cfg.s() * j as f64) * wj);
        }
        Ok(sup + self.block_norms_sq_hat(&d.dframe_hat)[0])
    }

    /// `‖ℋ_k^{Δ_j}‖` for `k = 1, 2, 3`, with `ℋ_1 = n2⁽¹⁾·Δ_jδh3 − n3⁽¹⁾·Δ_jδh2`
    /// and cyclic.
    pub fn h_delta_diag(
        &self,
        f1: &FrameField,
        vf1: &VariationalForces,
        vf2: &VariationalForces,
        j: i32,
    ) -> Result<[f64; 3]> {
        same_grid(self.sp.grid(), f1.grid())?;
        same_grid(f1.grid(), vf1.h.grid())?;
        same_grid(f1.grid(), vf2.h.grid())?;
        let dh = vf1.h.sub(&vf2.h);
        let blocked = self.delta_j(&dh, j)?;
        let mut sums = [0.0; 3];
        for idx in 0..f1.grid().points() {
            let hv: Triple = std::array::from_fn(|a| {
                Vector3::new(
                    blocked[comp(a, 0)][idx],
                    blocked[comp(a, 1)][idx],
                    blocked[comp(a, 2)][idx],
                )
            });
            let r = rotational_forces(&f1.triple_at(idx), &hv);
            for k in 0..3 {
                sums[k] += r[k] * r[k];
            }
        }
        let w = f1.grid().cell_area();
        Ok(sums.map(|s| (s * w).sqrt()))
    }
}

/// Norms of one state entering the regularity functional.
fn state_norms(sp: &Spectral, f: &FrameField, v: &Vec2Field) -> f64 {
    let grid = f.grid();
    let w = grid.cell_area();
    let hats = frame_spectra(sp, f.components());
    let mut second = Vec::with_capacity(27);
    for h in &hats {
        let dx = sp.deriv_hat(h, 0);
        let dy = sp.deriv_hat(h, 1);
        second.push(sp.deriv_hat(&dx, 0));
        second.push(sp.deriv_hat(&dx, 1));
        second.push(sp.deriv_hat(&dy, 1));
    }
    let sec = sp.inverse_many(&second);
    let grads = FrameGradients::from_spectra(sp, grid, &hats);
    let vh = spectra(sp, v);
    let mut vgrad = Vec::with_capacity(4);
    for h in &vh {
        vgrad.push(sp.deriv_hat(h, 0));
        vgrad.push(sp.deriv_hat(h, 1));
    }
    let vg = sp.inverse_many(&vgrad);

    let mut acc = 0.0;
    for idx in 0..grid.points() {
        let v2 = v[0][idx].powi(2) + v[1][idx].powi(2);
        let gv2: f64 = vg.iter().map(|c| c[idx].powi(2)).sum();
        let gp2: f64 = (0..9)
            .map(|c| grads.dx[c][idx].powi(2) + grads.dy[c][idx].powi(2))
            .sum();
        let hp2: f64 = (0..9)
            .map(|c| sec[3 * c][idx].powi(2) + 2.0 * sec[3 * c + 1][idx].powi(2) + sec[3 * c + 2][idx].powi(2))
            .sum();
        // ‖∇v‖² + ‖v‖⁴_{L⁴} + ‖∇p‖⁴_{L⁴} + ‖∇p‖²_{H¹} + ‖∇²p‖²
        acc += gv2 + v2 * v2 + gp2 * gp2 + gp2 + 2.0 * hp2;
    }
    acc * w
}

/// `F(t) = 1 + Σ_{a=1,2}(‖∇v_a‖² + ‖v_a‖⁴_{L⁴} + ‖∇p_a‖⁴_{L⁴} + ‖∇p_a‖²_{H¹}
/// + ‖∇²p_a‖²) + ‖∂_t p_1‖²`, with `∂_t p_1` supplied by the caller.
pub fn regularity_functional(
    sp: &Spectral,
    f1: &FrameField,
    v1: &Vec2Field,
    f2: &FrameField,
    v2: &Vec2Field,
    dt_frame1: &FrameComponents,
) -> Result<f64> {
    for g in [f1.grid(), v1.grid(), f2.grid(), v2.grid(), dt_frame1.grid()] {
        same_grid(sp.grid(), g)?;
    }
    let dt2 = dt_frame1.inner(dt_frame1);
    Ok(1.0 + state_norms(sp, f1, v1) + state_norms(sp, f2, v2) + dt2)
}
