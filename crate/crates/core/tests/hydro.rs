mod common;

use biaxframe::elasticity::{ElasticParams, VariationalForces};
use biaxframe::frame::local_basis_of;
use biaxframe::frame_field::{comp, FrameGradients};
use biaxframe::hydro::{
    corotational_rates, energy_report, frame_rhs, kinematics, momentum_rhs, viscous_stress, HydroParams, Kinematics,
    CHANNEL_S,
};
use biaxframe::sim::init;
use biaxframe::spectral::{Field, Tensor33Field, Vec2Field, Vec3Field};
use biaxframe::{Frame, FrameField, Spectral};
use common::*;
use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand::Rng;

fn no_forces(g: biaxframe::Grid2D) -> VariationalForces {
    VariationalForces {
        h: Field::zeros(g),
        ml: Vec3Field::zeros(g),
    }
}

fn dot(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    a.component_mul(b).sum()
}

#[test]
fn taylor_green_kinematics() {
    let g = grid(32);
    let sp = Spectral::new(g);
    let v = init::taylor_green(g, 0.8);
    let kin = kinematics(&sp, &v).unwrap();
    for idx in 0..g.points() {
        let a = kin.a_at(idx);
        assert!(a.trace().abs() < 1e-13);
        assert!((a + kin.omega_at(idx) - kin.kappa_at(idx)).abs().max() < 1e-13);
    }
    let rest = kinematics(&sp, &Vec2Field::zeros(g)).unwrap();
    assert_eq!(rest.kappa.max_abs(), 0.0);
}

#[test]
fn frame_aligned_with_strain_does_not_rotate() {
    let g = grid(16);
    // Pure strain along x/y with the identity frame: A·s3 = A·s4 = A·s5 = 0.
    let kin = Kinematics::from_kappa(Field::from_fn(g, |_, _| [0.4, 0.0, 0.0, -0.4]));
    let f = FrameField::uniform(g, &Frame::identity());
    let rates = corotational_rates(&f, &kin, &no_forces(g), &hydro()).unwrap();
    assert_eq!(rates.max_abs(), 0.0);
    let still = Kinematics::from_kappa(Field::zeros(g));
    let r2 = corotational_rates(&random_frame(&mut rng(1), g, 1.0, 2), &still, &no_forces(g), &hydro()).unwrap();
    assert_eq!(r2.max_abs(), 0.0);
}

#[test]
fn identity_frame_shear_contraction() {
    let g = grid(16);
    let shear = 0.6;
    let kin = Kinematics::from_kappa(Field::from_fn(g, |_, _| [0.0, shear, 0.0, 0.0]));
    let lb = local_basis_of(&Frame::identity().n);
    assert!((dot(&kin.a_at(0), &lb.s[2]) - shear / 2.0).abs() < 1e-15);
    let rates = Vec3Field::zeros(g);
    let zero_kin = Kinematics::from_kappa(Field::zeros(g));
    let f = random_frame(&mut rng(2), g, 1.0, 2);
    assert_eq!(viscous_stress(&f, &zero_kin, &rates, &hydro()).unwrap().max_abs(), 0.0);
}

#[test]
fn frame_rate_is_skew_after_removing_advection() {
    let g = grid(32);
    let sp = Spectral::new(g);
    let mut r = rng(3);
    let s = random_state(&mut r, g, 0.9, 1.0, 3);
    let p = random_elastic(&mut r);
    let (grads, vf) = biaxframe::elasticity::evaluate(&sp, &s.frame, &p).unwrap();
    let kin = kinematics(&sp, &s.velocity).unwrap();
    let rates = corotational_rates(&s.frame, &kin, &vf, &hydro()).unwrap();
    let rhs = frame_rhs(&s.frame, &grads, &rates, &s.velocity).unwrap();
    for idx in 0..g.points() {
        let n = s.frame.triple_at(idx);
        let gvec: [Vector3<f64>; 3] = std::array::from_fn(|a| {
            Vector3::from_fn(|k, _| {
                let c = comp(a, k);
                rhs[c][idx] + s.velocity[0][idx] * grads.dx[c][idx] + s.velocity[1][idx] * grads.dy[c][idx]
            })
        });
        for a in 0..3 {
            for b in 0..3 {
                assert!((n[a].dot(&gvec[b]) + n[b].dot(&gvec[a])).abs() < 1e-12);
            }
        }
        // ṅ2·n3 = N1, ṅ3·n1 = N2, ṅ1·n2 = N3.
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            assert!((gvec[i].dot(&n[j]) - rates[k][idx]).abs() < 1e-12);
        }
    }
    let still = frame_rhs(&s.frame, &grads, &Vec3Field::zeros(g), &Vec2Field::zeros(g)).unwrap();
    assert_eq!(still.max_abs(), 0.0);
}

/// Pointwise power balance: the stress power plus the elastic torque power
/// equals minus the non-viscous dissipation density.
fn power_balance_residual(seed: u64) -> f64 {
    let g = grid(16);
    let mut r = rng(seed);
    let f = random_frame(&mut r, g, 1.0, 2);
    let kin = Kinematics::from_kappa(Field::from_fn(g, |_, _| std::array::from_fn(|_| r.random_range(-1.0..1.0))));
    let vf = VariationalForces {
        h: Field::zeros(g),
        ml: Field::from_fn(g, |_, _| std::array::from_fn(|_| r.random_range(-1.0..1.0))),
    };
    let p = hydro();
    let rates = corotational_rates(&f, &kin, &vf, &p).unwrap();
    let sigma = viscous_stress(&f, &kin, &rates, &p).unwrap();
    let mut worst = 0.0_f64;
    for idx in 0..g.points() {
        let lb = local_basis_of(&f.triple_at(idx));
        let a = kin.a_at(idx);
        let kap = kin.kappa_at(idx);
        let sig = Matrix3::from_fn(|i, j| sigma[3 * i + j][idx]);
        let ml = vf.ml.at(idx);
        let as_: Vec<f64> = (0..5).map(|i| dot(&a, &lb.s[i])).collect();
        let mut diss = p.beta[1] * as_[0] * as_[0] + 2.0 * p.beta[0] * as_[0] * as_[1] + p.beta[2] * as_[1] * as_[1];
        let mut torque = 0.0;
        for k in 0..3 {
            let ask = as_[CHANNEL_S[k]];
            diss += (p.beta[5 - k] - p.eta_rot[k].powi(2) / p.chi[k]) * ask * ask + ml[k] * ml[k] / p.chi[k];
            torque += ml[k] * rates[k][idx];
        }
        let residual = -dot(&sig, &kap) + torque + diss;
        worst = worst.max(residual.abs() / diss.max(1e-300));
    }
    worst
}

#[test]
fn stress_power_balances_dissipation() {
    for seed in 0..5 {
        assert!(power_balance_residual(seed) < 1e-12, "seed {seed}");
    }
}

#[test]
fn momentum_rate_is_solenoidal() {
    let g = grid(32);
    let sp = Spectral::new(g);
    let mut r = rng(4);
    let s = random_state(&mut r, g, 0.8, 1.0, 3);
    let p = random_elastic(&mut r);
    let (grads, vf) = biaxframe::elasticity::evaluate(&sp, &s.frame, &p).unwrap();
    let kin = kinematics(&sp, &s.velocity).unwrap();
    let rates = corotational_rates(&s.frame, &kin, &vf, &hydro()).unwrap();
    let sigma = viscous_stress(&s.frame, &kin, &rates, &hydro()).unwrap();
    let sd = biaxframe::elasticity::distortion_stress(&s.frame, &grads, &p).unwrap();
    let dv = momentum_rhs(&sp, &s.velocity, &kin, &sigma, &sd, &hydro()).unwrap();
    assert!(sp.div(&dv).max_abs() <= 1e-12 * dv.max_abs());
    let zero = Tensor33Field::zeros(g);
    let rest = Vec2Field::zeros(g);
    let still = momentum_rhs(&sp, &rest, &kinematics(&sp, &rest).unwrap(), &zero, &zero, &hydro()).unwrap();
    assert_eq!(still.max_abs(), 0.0);
}

#[test]
fn taylor_green_momentum_rate() {
    let g = grid(32);
    let sp = Spectral::new(g);
    let eta = 0.3;
    let p = HydroParams {
        eta,
        beta: [0.0; 6],
        chi: [1.0; 3],
        eta_rot: [0.0; 3],
    };
    let v = init::taylor_green(g, 0.7);
    let f = FrameField::uniform(g, &Frame::identity());
    let kin = kinematics(&sp, &v).unwrap();
    let vf = no_forces(g);
    let rates = corotational_rates(&f, &kin, &vf, &p).unwrap();
    let sigma = viscous_stress(&f, &kin, &rates, &p).unwrap();
    let zero = Tensor33Field::zeros(g);
    let dv = momentum_rhs(&sp, &v, &kin, &sigma, &zero, &p).unwrap();
    // Taylor–Green is a steady Euler flow, so only diffusion remains, and
    // ∫v·∂_t v = −2ηk²·E with k² = 2.
    let expect = sp.laplacian(&v).scaled(eta);
    assert!(dv.sub(&expect).max_abs() <= 1e-12 * expect.max_abs());
    let e = 0.5 * v.inner(&v);
    assert!((v.inner(&dv) + 2.0 * eta * 2.0 * e).abs() <= 1e-12 * e);
}

#[test]
fn ledger_channels() {
    let g = grid(16);
    let sp = Spectral::new(g);
    let ep = ElasticParams::one_constant(1.0).unwrap();
    let f = FrameField::uniform(g, &Frame::rotated(&Frame::identity(), &Vector3::new(0.2, 0.1, -0.4)));
    let eq = energy_report(&sp, &f, &Vec2Field::zeros(g), &ep, &hydro()).unwrap();
    assert_eq!(eq.channels(), [0.0; 8]);
    assert_eq!(eq.energy(), 0.0);

    let fluid = HydroParams {
        eta: 0.5,
        beta: [0.0; 6],
        chi: [1.0; 3],
        eta_rot: [0.0; 3],
    };
    let l = energy_report(&sp, &f, &init::taylor_green(g, 1.0), &ep, &fluid).unwrap();
    assert!(l.d_visc > 0.0);
    assert_eq!(&l.channels()[1..], &[0.0; 7]);
}

#[test]
fn coefficient_examples() {
    let ok = HydroParams {
        eta: 1.0,
        beta: [1.0; 6],
        chi: [1.0; 3],
        eta_rot: [0.5; 3],
    };
    assert!(ok.validate().is_ok());
    let mut bad = ok.clone();
    bad.beta[0] = 2.0;
    let v = bad.validate().unwrap_err();
    assert!(v.iter().any(|x| x.inequality == "β₀² ≤ β₁β₂"));
    let mut bad = ok.clone();
    bad.eta_rot[0] = 2.0;
    let v = bad.validate().unwrap_err();
    assert!(v.iter().any(|x| x.inequality == "η₁² ≤ β₅χ₁"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dissipation_is_nonnegative(seed in any::<u64>()) {
        let g = grid(16);
        let sp = Spectral::new(g);
        let mut r = rng(seed);
        let s = random_state(&mut r, g, 1.0, 1.0, 3);
        let ep = random_elastic(&mut r);
        let l = energy_report(&sp, &s.frame, &s.velocity, &ep, &hydro()).unwrap();
        for c in l.channels() {
            prop_assert!(c >= -1e-12);
        }
        let grads = FrameGradients::compute(&sp, s.frame.components());
        prop_assert!((l.elastic - biaxframe::elasticity::elastic_energy(&s.frame, &grads, &ep).unwrap()).abs() < 1e-12 * l.elastic);
    }

    #[test]
    fn power_balance_holds(seed in any::<u64>()) {
        prop_assert!(power_balance_residual(seed) < 1e-12);
    }
}
