//! Time integration: classical RK4 on the coupled frame/velocity system with
//! dealiased right-hand sides, followed by a pointwise polar projection of
//! the frames back onto SO(3).

pub mod init;
mod run;

use nalgebra::Matrix3;

use crate::elasticity::{self, ElasticParams};
use crate::error::{Error, Result};
use crate::frame::{matrix_to_triple, triple_to_matrix};
use crate::frame_field::{FrameComponents, FrameField};
use crate::hydro::{self, EnergyLedger, HydroParams};
use crate::spectral::{same_grid, Grid2D, Spectral, Vec2Field};

pub use run::{
    gronwall_constant, run, twin_run, DtPolicy, MetricRow, RunOptions, RunOutput, TwinRun,
};

/// Default fraction of the stability bound used by [`Model::cfl_dt`].
pub const DEFAULT_SAFETY: f64 = 0.4;

/// Largest distance from SO(3) accepted by [`reorthonormalize`].
pub const MAX_PROJECTION_DISTANCE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub frame: FrameField,
    pub velocity: Vec2Field,
    pub t: f64,
    pub step: u64,
}

impl SimState {
    pub fn new(frame: FrameField, velocity: Vec2Field) -> Result<Self> {
        same_grid(frame.grid(), velocity.grid())?;
        Ok(SimState {
            frame,
            velocity,
            t: 0.0,
            step: 0,
        })
    }

    pub fn grid(&self) -> Grid2D {
        self.frame.grid()
    }
}

/// Time derivatives of a state.
#[derive(Clone, Debug)]
pub struct Rates {
    pub frame: FrameComponents,
    pub velocity: Vec2Field,
}

/// Orthonormality before and after the projection of one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub drift_before: f64,
    pub drift_after: f64,
}

/// Grid, parameters and transform plans of one simulation.
#[derive(Clone, Debug)]
pub struct Model {
    sp: Spectral,
    elastic: ElasticParams,
    hydro: HydroParams,
    safety: f64,
}

impl Model {
    pub fn new(grid: Grid2D, elastic: ElasticParams, hydro: HydroParams) -> Result<Self> {
        hydro.check()?;
        Ok(Model {
            sp: Spectral::new(grid),
            elastic,
            hydro,
            safety: DEFAULT_SAFETY,
        })
    }

    pub fn with_safety(mut self, safety: f64) -> Result<Self> {
        if !(safety > 0.0 && safety <= 1.0) {
            return Err(Error::config(format!(
                "stepper.safety: {safety} must lie in (0, 1]"
            )));
        }
        self.safety = safety;
        Ok(self)
    }

    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }

    pub fn grid(&self) -> Grid2D {
        self.sp.grid()
    }

    pub fn elastic(&self) -> &ElasticParams {
        &self.elastic
    }

    pub fn hydro(&self) -> &HydroParams {
        &self.hydro
    }

    pub fn safety(&self) -> f64 {
        self.safety
    }

    /// `safety · min(h/|v|max, h²/D)` with the diffusion rate
    /// `D = max(η_eff, 2K_max/χ_min)`: `η_eff` is
    /// [`HydroParams::effective_viscosity`], and a rotation angle `θ` of the
    /// frame relaxes as `χ ∂_t θ ≈ 2K Δθ` because the tangent directions have
    /// squared norm 2.
    pub fn cfl_dt(&self, s: &SimState) -> f64 {
        let h = self.grid().spacing();
        let vmax = (0..self.grid().points())
            .map(|i| s.velocity[0][i].hypot(s.velocity[1][i]))
            .fold(0.0, f64::max);
        let diff = self
            .hydro
            .effective_viscosity()
            .max(2.0 * self.elastic.max_modulus() / self.hydro.chi_min());
        let mut bound = h * h / diff;
        if vmax > 0.0 {
            bound = bound.min(h / vmax);
        }
        self.safety * bound
    }

    /// Right-hand side with the frame rate left unfiltered, plus the ledger of
    /// the evaluated state when asked for.
    fn evaluate(&self, frame: &FrameField, v: &Vec2Field, ledger: bool) -> Result<(Rates, Option<EnergyLedger>)> {
        let (grads, vf) = elasticity::evaluate(&self.sp, frame, &self.elastic)?;
        let kin = hydro::kinematics(&self.sp, v)?;
        let rates = hydro::corotational_rates(frame, &kin, &vf, &self.hydro)?;
        let dframe = hydro::frame_rhs(frame, &grads, &rates, v)?;
        let sigma = hydro::viscous_stress(frame, &kin, &rates, &self.hydro)?;
        let sigma_d = elasticity::distortion_stress(frame, &grads, &self.elastic)?;
        let dv = hydro::momentum_rhs(&self.sp, v, &kin, &sigma, &sigma_d, &self.hydro)?;
        let ledger = if ledger {
            Some(hydro::ledger_from_parts(frame, v, &grads, &vf, &kin, &self.elastic, &self.hydro)?)
        } else {
            None
        };
        Ok((
            Rates {
                frame: dframe,
                velocity: dv,
            },
            ledger,
        ))
    }

    /// Exact right-hand side of the semi-discrete system: the frame rate as
    /// assembled pointwise, the velocity rate dealiased and projected.
    pub fn rhs(&self, frame: &FrameField, v: &Vec2Field) -> Result<Rates> {
        Ok(self.evaluate(frame, v, false)?.0)
    }

    /// Right-hand side used by the integrator: both rates dealiased, the
    /// frame rate then made tangent to the rotation group again.
    fn stage(&self, frame: &FrameField, v: &Vec2Field, ledger: bool) -> Result<(Rates, Option<EnergyLedger>)> {
        let (mut r, ledger) = self.evaluate(frame, v, ledger)?;
        r.frame = self.sp.dealias(&r.frame);
        hydro::project_tangent(frame, &mut r.frame)?;
        Ok((r, ledger))
    }

    /// Energy ledger of a state (residual left as NaN).
    pub fn energy_report(&self, s: &SimState) -> Result<EnergyLedger> {
        let mut l = hydro::energy_report(&self.sp, &s.frame, &s.velocity, &self.elastic, &self.hydro)?;
        l.t = s.t;
        l.step = s.step;
        Ok(l)
    }

    /// One RK4 update without the stability check or the projection.
    pub fn rk4_update(&self, s: &SimState, dt: f64) -> Result<SimState> {
        Ok(self.rk4(s, dt)?.0)
    }

    fn rk4(&self, s: &SimState, dt: f64) -> Result<(SimState, EnergyLedger)> {
        let (k1, ledger) = self.stage(&s.frame, &s.velocity, true)?;
        let mut ledger = ledger.expect("ledger requested");
        ledger.t = s.t;
        ledger.step = s.step;
        let shifted = |r: &Rates, a: f64| {
            let mut f = s.frame.components().clone();
            f.axpy(a, &r.frame);
            let mut v = s.velocity.clone();
            v.axpy(a, &r.velocity);
            (FrameField::from_components(f), v)
        };
        let (f2, v2) = shifted(&k1, 0.5 * dt);
        let (k2, _) = self.stage(&f2, &v2, false)?;
        let (f3, v3) = shifted(&k2, 0.5 * dt);
        let (k3, _) = self.stage(&f3, &v3, false)?;
        let (f4, v4) = shifted(&k3, dt);
        let (k4, _) = self.stage(&f4, &v4, false)?;

        let mut f = s.frame.components().clone();
        let mut v = s.velocity.clone();
        for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
            f.axpy(dt * w / 6.0, &k.frame);
            v.axpy(dt * w / 6.0, &k.velocity);
        }
        let next = SimState {
            frame: FrameField::from_components(f),
            velocity: v,
            t: s.t + dt,
            step: s.step + 1,
        };
        if !next.frame.components().is_finite() || !next.velocity.is_finite() {
            return Err(Error::Divergence {
                step: next.step,
                t: next.t,
                what: "non-finite values after the update".into(),
            });
        }
        Ok((next, ledger))
    }

    /// One checked step: CFL test, RK4 update, projection onto SO(3).
    pub fn step(&self, s: &SimState, dt: f64) -> Result<(SimState, StepReport)> {
        let (next, report, _) = self.step_with_ledger(s, dt)?;
        Ok((next, report))
    }

    /// [`step`](Self::step), also returning the ledger of the input state.
    pub fn step_with_ledger(
        &self,
        s: &SimState,
        dt: f64,
    ) -> Result<(SimState, StepReport, EnergyLedger)> {
        let bound = self.cfl_dt(s);
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(Error::Stability { dt, bound });
        }
        let (mut next, ledger) = self.rk4(s, dt)?;
        let drift_before = next.frame.orthonormality_error();
        next.frame = reorthonormalize(&next.frame).map_err(|e| match e {
            Error::Degeneracy { index, what } => Error::Divergence {
                step: next.step,
                t: next.t,
                what: format!("frame degenerate at grid point {index}: {what}"),
            },
            other => other,
        })?;
        let drift_after = next.frame.orthonormality_error();
        Ok((
            next,
            StepReport {
                drift_before,
                drift_after,
            },
            ledger,
        ))
    }

    /// `F(t)` of two states, with `∂_t p` of the first from the integrator's
    /// frame rate.
    pub fn regularity_functional(&self, a: &SimState, b: &SimState) -> Result<f64> {
        let (r, _) = self.stage(&a.frame, &a.velocity, false)?;
        crate::lp::regularity_functional(
            &self.sp,
            &a.frame,
            &a.velocity,
            &b.frame,
            &b.velocity,
            &r.frame,
        )
    }
}

/// Nearest rotation (polar factor) of a 3×3 matrix by the Newton iteration
/// `X ← (X + X⁻ᵀ)/2`.
pub fn polar_factor(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let mut x = *m;
    for _ in 0..40 {
        let next = (x + x.try_inverse()?.transpose()) * 0.5;
        let delta = (next - x).abs().max();
        x = next;
        if delta <= 1e-15 {
            break;
        }
    }
    Some(x)
}

/// Replaces every frame by its polar factor.
pub fn reorthonormalize(f: &FrameField) -> Result<FrameField> {
    let mut out = f.clone();
    for idx in 0..f.grid().points() {
        let m = triple_to_matrix(&f.triple_at(idx));
        let det = m.determinant();
        if !(det > 0.0) {
            return Err(Error::Degeneracy {
                index: idx,
                what: format!("det = {det}"),
            });
        }
        let q = polar_factor(&m).ok_or_else(|| Error::Degeneracy {
            index: idx,
            what: "singular matrix".into(),
        })?;
        let dist = (m - q).norm();
        if dist > MAX_PROJECTION_DISTANCE {
            return Err(Error::Degeneracy {
                index: idx,
                what: format!("distance {dist:e} to SO(3) exceeds {MAX_PROJECTION_DISTANCE}"),
            });
        }
        out.set_triple(idx, &matrix_to_triple(&q));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    fn hydro() -> HydroParams {
        HydroParams {
            eta: 1.0,
            beta: [0.0; 6],
            chi: [1.0; 3],
            eta_rot: [0.0; 3],
        }
    }

    #[test]
    fn cfl_formula() {
        let grid = Grid2D::new(64, 2.0 * PI).unwrap();
        let m = Model::new(grid, ElasticParams::one_constant(1.0).unwrap(), hydro()).unwrap();
        let s = SimState::new(
            FrameField::uniform(grid, &Frame::identity()),
            Vec2Field::zeros(grid),
        )
        .unwrap();
        let h = 2.0 * PI / 64.0;
        // Elastic rotation rate 2K/χ = 2 dominates η = 1.
        assert!((m.cfl_dt(&s) - 0.2 * h * h).abs() < 1e-15);
        let weak = Model::new(grid, ElasticParams::one_constant(0.5).unwrap(), hydro()).unwrap();
        assert!((weak.cfl_dt(&s) - 0.4 * h * h).abs() < 1e-15);

        let fine = Grid2D::new(128, 2.0 * PI).unwrap();
        let mf = Model::new(fine, ElasticParams::one_constant(1.0).unwrap(), hydro()).unwrap();
        let sf = SimState::new(FrameField::uniform(fine, &Frame::identity()), Vec2Field::zeros(fine)).unwrap();
        assert!((mf.cfl_dt(&sf) / m.cfl_dt(&s) - 0.25).abs() < 1e-12);

        let fast = SimState::new(
            FrameField::uniform(grid, &Frame::identity()),
            Vec2Field::from_fn(grid, |_, _| [1e6, 0.0]),
        )
        .unwrap();
        assert!((m.cfl_dt(&fast) - 0.4 * h / 1e6).abs() < 1e-18);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let grid = Grid2D::new(16, 1.0).unwrap();
        let m = Model::new(grid, ElasticParams::one_constant(1.0).unwrap(), hydro()).unwrap();
        let f = FrameField::uniform(grid, &Frame::rotated(&Frame::identity(), &Vector3::new(0.2, 0.1, -0.4)));
        let s = SimState::new(f, Vec2Field::zeros(grid)).unwrap();
        let dt = m.cfl_dt(&s);
        let (next, rep) = m.step(&s, dt).unwrap();
        assert!(next.frame.components().sub(s.frame.components()).max_abs() < 1e-14);
        assert_eq!(next.velocity.max_abs(), 0.0);
        assert!(rep.drift_after < 1e-14);
    }

    #[test]
    fn oversized_step_rejected() {
        let grid = Grid2D::new(16, 1.0).unwrap();
        let m = Model::new(grid, ElasticParams::one_constant(1.0).unwrap(), hydro()).unwrap();
        let s = SimState::new(FrameField::uniform(grid, &Frame::identity()), Vec2Field::zeros(grid)).unwrap();
        let dt = m.cfl_dt(&s) * 10.0;
        assert!(matches!(m.step(&s, dt), Err(Error::Stability { .. })));
    }

    #[test]
    fn reflection_is_degenerate() {
        let grid = Grid2D::new(16, 1.0).unwrap();
        let refl = Frame::from_triple_unchecked([Vector3::x(), Vector3::y(), -Vector3::z()]);
        let f = FrameField::uniform(grid, &refl);
        assert!(matches!(reorthonormalize(&f), Err(Error::Degeneracy { .. })));
    }
}
