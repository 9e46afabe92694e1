//! Flow coupling: viscous coefficients, velocity-gradient kinematics, the frame
//! and momentum right-hand sides, and the energy ledger.
//!
//! Rotation channel `k` (about `n_k`) pairs the antisymmetric tensor
//! `a_k = n_{k+1}⊗n_{k+2} − n_{k+2}⊗n_{k+1}` with the symmetric tensor
//! `s'_k`, where `s'_1 = s5 = n2n3`, `s'_2 = s4 = n1n3`, `s'_3 = s3 = n1n2`, and
//! with the coefficients `χ_k`, `η_k`. The co-rotational rates are
//!
//! `N_k = −½Ω·a_k + (η_k/χ_k) A·s'_k − (1/χ_k) ℒ_k F`,
//!
//! which equal `ṅ2·n3`, `ṅ3·n1`, `ṅ1·n2` for `k = 1, 2, 3`. A rigidly rotating
//! flow with no elastic torque therefore carries every frame along with `Ω`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::elasticity::{self, ElasticParams, VariationalForces};
use crate::error::{Error, Result};
use crate::frame::local_basis_of;
use crate::frame_field::{comp, FrameComponents, FrameField, FrameGradients};
use crate::spectral::{same_grid, Field, Spectral, Tensor33Field, Vec2Field, Vec3Field};

/// Index of `s'_k` in the local basis `s[0..5]` for channels `k = 0, 1, 2`.
pub const CHANNEL_S: [usize; 3] = [4, 3, 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HydroParams {
    pub eta: f64,
    /// `β0..β5`.
    pub beta: [f64; 6],
    pub chi: [f64; 3],
    pub eta_rot: [f64; 3],
}

/// One violated coefficient condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// Configuration key of the offending coefficient.
    pub key: String,
    pub inequality: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} violated ({} vs {})",
            self.key, self.inequality, self.lhs, self.rhs
        )
    }
}

/// A checked condition, `lhs ≤ rhs` (or `lhs > rhs` for strict positivity).
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub key: String,
    pub inequality: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl HydroParams {
    /// Every coefficient condition, in a fixed order.
    pub fn conditions(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        let mut push = |key: String, inequality, lhs: f64, rhs: f64, holds: bool| {
            out.push(Condition { key, inequality, lhs, rhs, holds });
        };
        push("hydro.eta".into(), "η > 0", self.eta, 0.0, self.eta > 0.0);
        const BETA_GE: [&str; 6] = ["", "β₁ ≥ 0", "β₂ ≥ 0", "β₃ ≥ 0", "β₄ ≥ 0", "β₅ ≥ 0"];
        for i in 1..6 {
            let b = self.beta[i];
            push(format!("hydro.beta{i}"), BETA_GE[i], b, 0.0, b >= 0.0);
        }
        const CHI_GT: [&str; 3] = ["χ₁ > 0", "χ₂ > 0", "χ₃ > 0"];
        for j in 0..3 {
            let c = self.chi[j];
            push(format!("hydro.chi[{j}]"), CHI_GT[j], c, 0.0, c > 0.0);
        }
        let (b0, b1, b2) = (self.beta[0], self.beta[1], self.beta[2]);
        push("hydro.beta0".into(), "β₀² ≤ β₁β₂", b0 * b0, b1 * b2, b0 * b0 <= b1 * b2);
        const ROT: [&str; 3] = ["η₁² ≤ β₅χ₁", "η₂² ≤ β₄χ₂", "η₃² ≤ β₃χ₃"];
        for k in 0..3 {
            let e2 = self.eta_rot[k] * self.eta_rot[k];
            let bound = self.beta[5 - k] * self.chi[k];
            push(format!("hydro.eta_rot[{k}]"), ROT[k], e2, bound, e2 <= bound);
        }
        for c in out.iter_mut() {
            if !(c.lhs.is_finite() && c.rhs.is_finite()) {
                c.holds = false;
            }
        }
        out
    }

    /// Ok when every coefficient condition holds, otherwise the list of
    /// violations.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let bad: Vec<Violation> = self
            .conditions()
            .into_iter()
            .filter(|c| !c.holds)
            .map(|c| Violation {
                key: c.key,
                inequality: c.inequality,
                lhs: c.lhs,
                rhs: c.rhs,
            })
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    /// [`validate`](Self::validate) as a configuration error.
    pub fn check(&self) -> Result<()> {
        self.validate()
            .map_err(|v| Error::Configuration(v.iter().map(|x| x.to_string()).collect()))
    }

    pub fn chi_min(&self) -> f64 {
        self.chi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `η` plus the largest eigenvalue of the β-part of the viscous stress,
    /// `max(λ_max[[β1, β0], [β0, β2]], β3, β4, β5)`. Bounds the momentum
    /// diffusion rate per unit `|k|²`.
    pub fn effective_viscosity(&self) -> f64 {
        let [b0, b1, b2, b3, b4, b5] = self.beta;
        let lam = 0.5 * (b1 + b2) + (0.25 * (b1 - b2).powi(2) + b0 * b0).sqrt();
        self.eta + lam.max(b3).max(b4).max(b5).max(0.0)
    }
}

/// Velocity gradient `κ_ij = ∂_j v_i` of an in-plane flow.
#[derive(Clone, Debug)]
pub struct Kinematics {
    /// `(κ_xx, κ_xy, κ_yx, κ_yy)`.
    pub kappa: Field<4>,
}

impl Kinematics {
    pub fn from_kappa(kappa: Field<4>) -> Self {
        Kinematics { kappa }
    }

    /// `κ` embedded in 3×3 with zero third row and column.
    #[inline]
    pub fn kappa_at(&self, idx: usize) -> Matrix3<f64> {
        let [xx, xy, yx, yy] = self.kappa.at(idx);
        Matrix3::new(xx, xy, 0.0, yx, yy, 0.0, 0.0, 0.0, 0.0)
    }

    /// `A = (κ + κᵀ)/2`.
    #[inline]
    pub fn a_at(&self, idx: usize) -> Matrix3<f64> {
        let k = self.kappa_at(idx);
        (k + k.transpose()) * 0.5
    }

    /// `Ω = (κ − κᵀ)/2`.
    #[inline]
    pub fn omega_at(&self, idx: usize) -> Matrix3<f64> {
        let k = self.kappa_at(idx);
        (k - k.transpose()) * 0.5
    }

    pub fn a_field(&self) -> Tensor33Field {
        tensor_field(self.kappa.grid(), |i| self.a_at(i))
    }

    pub fn omega_field(&self) -> Tensor33Field {
        tensor_field(self.kappa.grid(), |i| self.omega_at(i))
    }
}

fn tensor_field(grid: crate::Grid2D, f: impl Fn(usize) -> Matrix3<f64>) -> Tensor33Field {
    let mut out = Tensor33Field::zeros(grid);
    for idx in 0..grid.points() {
        let m = f(idx);
        for c in 0..9 {
            out[c][idx] = m[(c / 3, c % 3)];
        }
    }
    out
}

pub fn kinematics(sp: &Spectral, v: &Vec2Field) -> Result<Kinematics> {
    same_grid(sp.grid(), v.grid())?;
    let (vx, vy) = sp.forward_pair(&v[0], &v[1]);
    let d = sp.inverse_many(&[
        sp.deriv_hat(&vx, 0),
        sp.deriv_hat(&vx, 1),
        sp.deriv_hat(&vy, 0),
        sp.deriv_hat(&vy, 1),
    ]);
    let [a, b, c, e]: [Vec<f64>; 4] = d.try_into().expect("four components");
    Ok(Kinematics {
        kappa: Field::from_comps(v.grid(), [a, b, c, e])?,
    })
}

#[inline]
fn dot(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Co-rotational rates `N_1, N_2, N_3`.
pub fn corotational_rates(
    f: &FrameField,
    kin: &Kinematics,
    vf: &VariationalForces,
    p: &HydroParams,
) -> Result<Vec3Field> {
    same_grid(f.grid(), kin.kappa.grid())?;
    same_grid(f.grid(), vf.ml.grid())?;
    let mut out = Vec3Field::zeros(f.grid());
    for idx in 0..f.grid().points() {
        let lb = local_basis_of(&f.triple_at(idx));
        let a = kin.a_at(idx);
        let om = kin.omega_at(idx);
        let ml = vf.ml.at(idx);
        for k in 0..3 {
            out[k][idx] = -0.5 * dot(&om, &lb.a[k])
                + p.eta_rot[k] / p.chi[k] * dot(&a, &lb.s[CHANNEL_S[k]])
                - ml[k] / p.chi[k];
        }
    }
    Ok(out)
}

/// `∂_t n1 = N3 n2 − N2 n3 − v·∇n1`, `∂_t n2 = N1 n3 − N3 n1 − v·∇n2`,
/// `∂_t n3 = N2 n1 − N1 n2 − v·∇n3`.
pub fn frame_rhs(
    f: &FrameField,
    grads: &FrameGradients,
    rates: &Vec3Field,
    v: &Vec2Field,
) -> Result<FrameComponents> {
    let grid = f.grid();
    same_grid(grid, grads.dx.grid())?;
    same_grid(grid, rates.grid())?;
    same_grid(grid, v.grid())?;
    let mut out = FrameComponents::zeros(grid);
    for idx in 0..grid.points() {
        let n = f.triple_at(idx);
        let [r1, r2, r3] = rates.at(idx);
        let rot = [
            n[1] * r3 - n[2] * r2,
            n[2] * r1 - n[0] * r3,
            n[0] * r2 - n[1] * r1,
        ];
        let (vx, vy) = (v[0][idx], v[1][idx]);
        for a in 0..3 {
            for k in 0..3 {
                let c = comp(a, k);
                out[c][idx] = rot[a][k] - (vx * grads.dx[c][idx] + vy * grads.dy[c][idx]);
            }
        }
    }
    Ok(out)
}

/// Removes the part of `rate` that would stretch or shear the frame,
/// `ṅ_α ← ṅ_α − Σ_β sym(n_α·ṅ_β) n_β`, so that `d/dt(n_α·n_β) = 0` again
/// after spectral filtering has broken it.
pub fn project_tangent(f: &FrameField, rate: &mut FrameComponents) -> Result<()> {
    same_grid(f.grid(), rate.grid())?;
    for idx in 0..f.grid().points() {
        let n = f.triple_at(idx);
        let r: [Vector3<f64>; 3] =
            std::array::from_fn(|a| Vector3::new(rate[comp(a, 0)][idx], rate[comp(a, 1)][idx], rate[comp(a, 2)][idx]));
        for a in 0..3 {
            let mut fixed = r[a];
            for b in 0..3 {
                let m = 0.5 * (n[a].dot(&r[b]) + n[b].dot(&r[a]));
                fixed -= m * n[b];
            }
            for k in 0..3 {
                rate[comp(a, k)][idx] = fixed[k];
            }
        }
    }
    Ok(())
}

/// Viscous stress. With `B_k = N_k + ½Ω·a_k`,
///
/// `σ = β1(A·s1)s1 + β0(A·s2)s1 + β0(A·s1)s2 + β2(A·s2)s2
///    + Σ_k [β'_k(A·s'_k) − η_k B_k] s'_k + Σ_k [½χ_k B_k − ½η_k A·s'_k] a_k`,
///
/// where `β'_k = β5, β4, β3`.
pub fn viscous_stress(
    f: &FrameField,
    kin: &Kinematics,
    rates: &Vec3Field,
    p: &HydroParams,
) -> Result<Tensor33Field> {
    let grid = f.grid();
    same_grid(grid, kin.kappa.grid())?;
    same_grid(grid, rates.grid())?;
    let b = &p.beta;
    let mut out = Tensor33Field::zeros(grid);
    for idx in 0..grid.points() {
        let lb = local_basis_of(&f.triple_at(idx));
        let a = kin.a_at(idx);
        let om = kin.omega_at(idx);
        let n = rates.at(idx);
        let as1 = dot(&a, &lb.s[0]);
        let as2 = dot(&a, &lb.s[1]);
        let mut s = lb.s[0] * (b[1] * as1 + b[0] * as2) + lb.s[1] * (b[0] * as1 + b[2] * as2);
        for k in 0..3 {
            let sk = &lb.s[CHANNEL_S[k]];
            let ask = dot(&a, sk);
            let bk = n[k] + 0.5 * dot(&om, &lb.a[k]);
            s += sk * (b[5 - k] * ask - p.eta_rot[k] * bk);
            s += lb.a[k] * (0.5 * p.chi[k] * bk - 0.5 * p.eta_rot[k] * ask);
        }
        for c in 0..9 {
            out[c][idx] = s[(c / 3, c % 3)];
        }
    }
    Ok(out)
}

/// `−P[v·∇v] + ηΔv + P[∇·(σ + σ^d)]`, dealiased, with `P` the Leray projector.
/// Only the in-plane block of the stresses enters.
pub fn momentum_rhs(
    sp: &Spectral,
    v: &Vec2Field,
    kin: &Kinematics,
    sigma: &Tensor33Field,
    sigma_d: &Tensor33Field,
    p: &HydroParams,
) -> Result<Vec2Field> {
    let grid = v.grid();
    same_grid(sp.grid(), grid)?;
    same_grid(grid, kin.kappa.grid())?;
    same_grid(grid, sigma.grid())?;
    same_grid(grid, sigma_d.grid())?;
    let np = grid.points();
    let mut adv = [vec![0.0; np], vec![0.0; np]];
    let mut st: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; np]);
    for idx in 0..np {
        let [xx, xy, yx, yy] = kin.kappa.at(idx);
        let (vx, vy) = (v[0][idx], v[1][idx]);
        adv[0][idx] = vx * xx + vy * xy;
        adv[1][idx] = vx * yx + vy * yy;
        for (c, src) in [0, 1, 3, 4].into_iter().enumerate() {
            st[c][idx] = sigma[src][idx] + sigma_d[src][idx];
        }
    }
    let hats = sp.forward_many(&[&adv[0], &adv[1], &st[0], &st[1], &st[2], &st[3], &v[0], &v[1]]);
    let mut rx = vec![Complex64::default(); np];
    let mut ry = vec![Complex64::default(); np];
    for m in 0..np {
        let (kx, ky) = sp.k_deriv(m);
        let ikx = Complex64::new(0.0, kx);
        let iky = Complex64::new(0.0, ky);
        let lap = -(kx * kx + ky * ky) * p.eta;
        rx[m] = -hats[0][m] + ikx * hats[2][m] + iky * hats[3][m] + hats[6][m] * lap;
        ry[m] = -hats[1][m] + ikx * hats[4][m] + iky * hats[5][m] + hats[7][m] * lap;
    }
    sp.dealias_hat(&mut rx);
    sp.dealias_hat(&mut ry);
    sp.leray_hat(&mut rx, &mut ry);
    let (x, y) = sp.inverse_pair(&rx, &ry);
    Vec2Field::from_comps(grid, [x, y])
}

/// Energies and every dissipation channel of the energy law at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub t: f64,
    pub step: u64,
    /// `½∫|v|²`.
    pub kinetic: f64,
    pub elastic: f64,
    /// `η‖∇v‖²`.
    pub d_visc: f64,
    /// `(1/χ_k)‖ℒ_k F‖²`.
    pub d_rot: [f64; 3],
    /// `β1‖A·s1‖² + 2β0∫(A·s1)(A·s2) + β2‖A·s2‖²`.
    pub d_beta12: f64,
    /// `(β3 − η3²/χ3)‖A·s3‖²`.
    pub d_s3: f64,
    /// `(β4 − η2²/χ2)‖A·s4‖²`.
    pub d_s4: f64,
    /// `(β5 − η1²/χ1)‖A·s5‖²`.
    pub d_s5: f64,
    /// `dE/dt + D`, with `dE/dt` from finite differences across steps; NaN
    /// until set.
    pub residual: f64,
}

impl EnergyLedger {
    pub fn energy(&self) -> f64 {
        self.kinetic + self.elastic
    }

    pub fn dissipation(&self) -> f64 {
        self.d_visc + self.d_rot.iter().sum::<f64>() + self.d_beta12 + self.d_s3 + self.d_s4 + self.d_s5
    }

    /// Channels in the order `d_visc, d_rot1..3, d_beta12, d_s3, d_s4, d_s5`.
    pub fn channels(&self) -> [f64; 8] {
        [
            self.d_visc,
            self.d_rot[0],
            self.d_rot[1],
            self.d_rot[2],
            self.d_beta12,
            self.d_s3,
            self.d_s4,
            self.d_s5,
        ]
    }

    /// `|dE/dt + D| / max(|dE/dt|, |D|, floor)`.
    pub fn relative_residual(&self, de_dt: f64, floor: f64) -> f64 {
        (de_dt + self.dissipation()).abs() / de_dt.abs().max(self.dissipation().abs()).max(floor)
    }
}

/// Evaluates the ledger by quadrature; `residual` is left as NaN.
pub fn energy_report(
    sp: &Spectral,
    f: &FrameField,
    v: &Vec2Field,
    ep: &ElasticParams,
    hp: &HydroParams,
) -> Result<EnergyLedger> {
    let (grads, vf) = elasticity::evaluate(sp, f, ep)?;
    let kin = kinematics(sp, v)?;
    ledger_from_parts(f, v, &grads, &vf, &kin, ep, hp)
}

pub(crate) fn ledger_from_parts(
    f: &FrameField,
    v: &Vec2Field,
    grads: &FrameGradients,
    vf: &VariationalForces,
    kin: &Kinematics,
    ep: &ElasticParams,
    hp: &HydroParams,
) -> Result<EnergyLedger> {
    let grid = f.grid();
    same_grid(grid, v.grid())?;
    let w = grid.cell_area();
    let mut sums = [0.0; 10];
    for idx in 0..grid.points() {
        let lb = local_basis_of(&f.triple_at(idx));
        let a = kin.a_at(idx);
        let kap = kin.kappa.at(idx);
        let ml = vf.ml.at(idx);
        let as_: [f64; 5] = std::array::from_fn(|i| dot(&a, &lb.s[i]));
        sums[0] += 0.5 * (v[0][idx].powi(2) + v[1][idx].powi(2));
        sums[1] += kap.iter().map(|x| x * x).sum::<f64>();
        for k in 0..3 {
            sums[2 + k] += ml[k] * ml[k];
        }
        sums[5] += hp.beta[1] * as_[0] * as_[0]
            + 2.0 * hp.beta[0] * as_[0] * as_[1]
            + hp.beta[2] * as_[1] * as_[1];
        for k in 0..3 {
            sums[6 + k] += as_[2 + k] * as_[2 + k];
        }
    }
    let ch = |k: usize| hp.beta[5 - k] - hp.eta_rot[k].powi(2) / hp.chi[k];
    Ok(EnergyLedger {
        t: 0.0,
        step: 0,
        kinetic: sums[0] * w,
        elastic: elasticity::elastic_energy(f, grads, ep)?,
        d_visc: hp.eta * sums[1] * w,
        d_rot: std::array::from_fn(|k| sums[2 + k] * w / hp.chi[k]),
        d_beta12: sums[5] * w,
        d_s3: ch(2) * sums[6] * w,
        d_s4: ch(1) * sums[7] * w,
        d_s5: ch(0) * sums[8] * w,
        residual: f64::NAN,
    })
}
