mod common;

use biaxframe::elasticity::{
    body_force, distortion_stress, elastic_density_direct, elastic_density_split, elastic_energy, evaluate,
    rotational_forces, ElasticParams,
};
use biaxframe::frame_field::{comp, FrameGradients};
use biaxframe::spectral::{ScalarField, Tensor33Field, Vec2Field};
use biaxframe::{Frame, FrameField, Grid2D, Spectral};
use common::*;
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

fn twist(grid: Grid2D, q: f64) -> FrameField {
    FrameField::from_fn(grid, |x, _| {
        let (s, c) = (q * x).sin_cos();
        Frame::new(Vector3::new(c, s, 0.0), Vector3::new(-s, c, 0.0), Vector3::z()).unwrap()
    })
}

fn div_rows(sp: &Spectral, sigma: &Tensor33Field) -> Vec2Field {
    let g = sp.grid();
    let mut out = Vec2Field::zeros(g);
    for i in 0..2 {
        let sx = ScalarField::from_comps(g, [sigma[3 * i].clone()]).unwrap();
        let sy = ScalarField::from_comps(g, [sigma[3 * i + 1].clone()]).unwrap();
        out.comps_mut()[i] = sp.grad(&sx)[0].iter().zip(&sp.grad(&sy)[1]).map(|(a, b)| a + b).collect();
    }
    out
}

#[test]
fn compact_stress_matches_index_sums() {
    let mut r = rng(11);
    let g = grid(16);
    let sp = Spectral::new(g);
    for _ in 0..3 {
        let f = random_frame(&mut r, g, 0.8, 2);
        let p = random_elastic(&mut r);
        let grads = FrameGradients::compute(&sp, f.components());
        let fast = distortion_stress(&f, &grads, &p).unwrap();
        let slow = distortion_stress_literal(&f, &grads, &p);
        let scale = slow.max_abs();
        assert!(fast.sub(&slow).max_abs() <= 1e-13 * scale, "{}", fast.sub(&slow).max_abs() / scale);
    }
}

#[test]
fn constant_frame_is_stress_free() {
    let g = grid(16);
    let sp = Spectral::new(g);
    let f = FrameField::uniform(g, &Frame::rotated(&Frame::identity(), &Vector3::new(0.3, -1.0, 0.4)));
    let p = ElasticParams::from_moduli(random_moduli(&mut rng(3))).unwrap();
    let (grads, vf) = evaluate(&sp, &f, &p).unwrap();
    assert_eq!(elastic_density_direct(&f, &grads, &p).unwrap().max_abs(), 0.0);
    assert_eq!(elastic_density_split(&f, &grads, &p).unwrap().max_abs(), 0.0);
    assert_eq!(vf.h.max_abs(), 0.0);
    assert_eq!(vf.ml.max_abs(), 0.0);
    assert_eq!(distortion_stress(&f, &grads, &p).unwrap().max_abs(), 0.0);
    assert_eq!(body_force(&f, &grads, &vf).unwrap().max_abs(), 0.0);
}

#[test]
fn twist_density_and_stress() {
    let g = grid(32);
    let sp = Spectral::new(g);
    let (k, q) = (1.3, 2.0);
    let f = twist(g, q);
    let p = ElasticParams::one_constant(k).unwrap();
    let grads = FrameGradients::compute(&sp, f.components());
    let direct = elastic_density_direct(&f, &grads, &p).unwrap();
    let split = elastic_density_split(&f, &grads, &p).unwrap();
    for idx in 0..g.points() {
        assert!((direct[0][idx] - k * q * q).abs() < 1e-12);
        assert!((split[0][idx] - k * q * q).abs() < 1e-12);
    }
    let sigma = distortion_stress(&f, &grads, &p).unwrap();
    for idx in 0..g.points() {
        assert!((sigma[0][idx] + 2.0 * k * q * q).abs() < 1e-11);
        for c in [1, 3, 4] {
            assert!(sigma[c][idx].abs() < 1e-11);
        }
    }
}

#[test]
fn twist_density_against_finite_differences() {
    // Independent of the spectral derivative: second-order differences of the
    // analytic field on a fine 1-D sampling.
    let (k, q, h) = (0.7, 3.0, 1e-5);
    let n = |x: f64| {
        let (s, c) = (q * x).sin_cos();
        [Vector3::new(c, s, 0.0), Vector3::new(-s, c, 0.0), Vector3::z()]
    };
    for x in [0.0, 0.4, 1.7] {
        let (a, b) = (n(x + h), n(x - h));
        let grad2: f64 = (0..3).map(|i| ((a[i] - b[i]) / (2.0 * h)).norm_squared()).sum();
        assert!((0.5 * k * grad2 - k * q * q).abs() < 1e-8);
    }
}

#[test]
fn one_constant_forces_are_laplacians() {
    let g = grid(32);
    let sp = Spectral::new(g);
    let f = random_frame(&mut rng(12), g, 0.7, 3);
    let p = ElasticParams::one_constant(0.9).unwrap();
    let (_, vf) = evaluate(&sp, &f, &p).unwrap();
    let lap = sp.laplacian(f.components());
    let diff = vf.h.sub(&lap.scaled(0.9)).max_abs();
    assert!(diff <= 1e-12 * lap.max_abs(), "{diff}");
}

#[test]
fn h_is_the_negative_energy_gradient() {
    // Unconstrained perturbations of the grid values: dE/dε = −∫ h·δ.
    let g = grid(32);
    let sp = Spectral::new(g);
    let mut r = rng(13);
    let f = random_frame(&mut r, g, 0.8, 2);
    let p = random_elastic(&mut r);
    let delta = random_field::<9>(&mut r, g, 3);
    let (_, vf) = evaluate(&sp, &f, &p).unwrap();
    let analytic = -vf.h.inner(&delta);
    let energy = |e: f64| {
        let mut c = f.components().clone();
        c.axpy(e, &delta);
        let grads = FrameGradients::compute(&sp, &c);
        elastic_energy(&FrameField::from_components(c), &grads, &p).unwrap()
    };
    let mut errs = Vec::new();
    for e in [2e-4, 1e-4] {
        let fd = (energy(e) - energy(-e)) / (2.0 * e);
        errs.push((fd - analytic).abs() / analytic.abs());
    }
    assert!(errs[1] < 1e-5, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
}

#[test]
fn rotational_forces_match_h() {
    let g = grid(16);
    let sp = Spectral::new(g);
    let mut r = rng(14);
    let f = random_frame(&mut r, g, 0.8, 2);
    let p = random_elastic(&mut r);
    let (_, vf) = evaluate(&sp, &f, &p).unwrap();
    for idx in 0..g.points() {
        let ml = rotational_forces(&f.triple_at(idx), &vf.h_at(idx));
        for k in 0..3 {
            assert!((vf.ml[k][idx] - ml[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn energy_is_invariant_under_relabelled_moduli_when_equal() {
    // Permuting moduli that share a value must not change anything.
    let g = grid(16);
    let sp = Spectral::new(g);
    let f = random_frame(&mut rng(15), g, 0.9, 2);
    let grads = FrameGradients::compute(&sp, f.components());
    let a = ElasticParams::one_constant(1.1).unwrap();
    let b = ElasticParams::from_moduli([1.1; 12]).unwrap();
    assert_eq!(elastic_energy(&f, &grads, &a).unwrap(), elastic_energy(&f, &grads, &b).unwrap());
}

#[test]
fn body_force_matches_stress_divergence_after_projection() {
    // The identity is pointwise; only the resolution of the frame limits it.
    let g = grid(64);
    let sp = Spectral::new(g);
    let mut r = rng(16);
    for _ in 0..2 {
        let f = random_frame(&mut r, g, 0.6, 2);
        let p = random_elastic(&mut r);
        let (grads, vf) = evaluate(&sp, &f, &p).unwrap();
        let force = sp.leray_project(&body_force(&f, &grads, &vf).unwrap());
        let div = sp.leray_project(&div_rows(&sp, &distortion_stress(&f, &grads, &p).unwrap()));
        assert!(force.sub(&div).norm_l2() <= 1e-8 * div.norm_l2());
    }
}

#[test]
fn example_split() {
    // K1 = 2, K4 = 1, K7 = 3, K10 = 1.5, others 1.
    let mut m = [1.0; 12];
    m[0] = 2.0;
    m[3] = 1.0;
    m[6] = 3.0;
    m[9] = 1.5;
    let p = ElasticParams::from_moduli(m).unwrap();
    assert_eq!(p.gamma[0], 1.0);
    assert_eq!(p.k[0], 1.0);
    assert_eq!(p.kk[0][0], 0.0);
    assert_eq!(p.kk[2][0], 2.0);
    assert_eq!(p.kk[1][0], 0.5);
    m[1] = 0.0;
    assert!(ElasticParams::from_moduli(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn split_recovers_moduli(m in proptest::array::uniform12(0.1f64..5.0)) {
        let p = ElasticParams::from_moduli(m).unwrap();
        for j in 0..3 {
            prop_assert!(p.gamma[j] > 0.0);
            prop_assert!(p.k[j] >= 0.0);
            prop_assert!((p.gamma[j] + p.k[j] - m[j]).abs() < 1e-15);
            for i in 0..3 {
                prop_assert!(p.kk[i][j] >= 0.0);
                prop_assert!((p.gamma[j] + p.kk[i][j] - m[biaxframe::elasticity::CURL_MODULUS[i][j]]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn density_forms_agree(seed in any::<u64>(), amp in 0.1f64..1.5) {
        let g = grid(16);
        let sp = Spectral::new(g);
        let mut r = rng(seed);
        let f = random_frame(&mut r, g, amp, 2);
        let p = random_elastic(&mut r);
        let grads = FrameGradients::compute(&sp, f.components());
        let d = elastic_density_direct(&f, &grads, &p).unwrap();
        let s = elastic_density_split(&f, &grads, &p).unwrap();
        prop_assert!(d.sub(&s).max_abs() <= 1e-12 * d.max_abs().max(1e-300));
    }

    #[test]
    fn energy_is_rotation_covariant_for_one_constant(seed in any::<u64>(), axis in proptest::array::uniform3(-2.0f64..2.0)) {
        // With a single constant the density is ½K Σ|∇n_i|², unchanged when
        // every frame vector is rotated by the same target-space rotation.
        let g = grid(16);
        let sp = Spectral::new(g);
        let f = random_frame(&mut rng(seed), g, 0.8, 2);
        let rot = Rotation3::new(Vector3::from(axis));
        let mut turned = f.clone();
        for idx in 0..g.points() {
            let n = f.triple_at(idx);
            turned.set_triple(idx, &[rot * n[0], rot * n[1], rot * n[2]]);
        }
        let p = ElasticParams::one_constant(0.8).unwrap();
        let e0 = elastic_energy(&f, &FrameGradients::compute(&sp, f.components()), &p).unwrap();
        let e1 = elastic_energy(&turned, &FrameGradients::compute(&sp, turned.components()), &p).unwrap();
        prop_assert!((e0 - e1).abs() <= 1e-12 * e0);
    }
}

#[test]
fn component_layout() {
    assert_eq!(comp(0, 0), 0);
    assert_eq!(comp(1, 2), 5);
    assert_eq!(comp(2, 1), 7);
}
