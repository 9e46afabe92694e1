#![allow(dead_code)]

use biaxframe::elasticity::ElasticParams;
use biaxframe::frame_field::FrameGradients;
use biaxframe::hydro::HydroParams;
use biaxframe::sim::{init, SimState};
use biaxframe::spectral::{Field, Grid2D, Tensor33Field};
use biaxframe::{Frame, FrameField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAU: f64 = std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(n: usize) -> Grid2D {
    Grid2D::new(n, TAU).unwrap()
}

pub fn random_moduli(rng: &mut impl Rng) -> [f64; 12] {
    std::array::from_fn(|_| rng.random_range(0.5..2.0))
}

pub fn random_elastic(rng: &mut impl Rng) -> ElasticParams {
    ElasticParams::from_moduli(random_moduli(rng)).unwrap()
}

/// A valid coefficient set with every coupling switched on.
pub fn hydro() -> HydroParams {
    HydroParams {
        eta: 1.0,
        beta: [0.2, 1.0, 0.8, 0.6, 0.7, 0.9],
        chi: [1.0, 1.2, 0.8],
        eta_rot: [0.3, 0.2, 0.25],
    }
}

pub fn random_frame(rng: &mut impl Rng, grid: Grid2D, amplitude: f64, modes: u32) -> FrameField {
    let base = Frame::rotated(
        &Frame::identity(),
        &nalgebra::Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
    );
    init::random_rotation_field(rng, grid, &base, amplitude, modes)
}

pub fn random_state(rng: &mut impl Rng, grid: Grid2D, frame_amp: f64, vel_amp: f64, modes: u32) -> SimState {
    let f = random_frame(rng, grid, frame_amp, modes);
    let v = init::random_velocity(rng, grid, vel_amp, modes);
    SimState::new(f, v).unwrap()
}

/// Random band-limited field with all modes `|m|_∞ ≤ modes` (mean removed).
pub fn random_field<const C: usize>(rng: &mut impl Rng, grid: Grid2D, modes: u32) -> Field<C> {
    let parts: [init::RandomTrig; C] = std::array::from_fn(|_| init::RandomTrig::sample(rng, modes));
    let k0 = grid.k0();
    Field::from_fn(grid, |x, y| std::array::from_fn(|c| parts[c].value(k0, x, y)))
}

fn eps3(i: usize, j: usize, k: usize) -> f64 {
    ((i as f64 - j as f64) * (j as f64 - k as f64) * (k as f64 - i as f64)) / 2.0
}

/// Distortion stress by brute-force index sums over the split density,
/// `σ^d_ij = −Σ_α Σ_k ∂f/∂(∂_j n_αk) ∂_i n_αk`, using
/// `∂(n_β·curl n_α)/∂(∂_j n_αk) = ε_ljk n_βl`.
pub fn distortion_stress_literal(f: &FrameField, grads: &FrameGradients, p: &ElasticParams) -> Tensor33Field {
    let mut out = Tensor33Field::zeros(f.grid());
    for idx in 0..f.grid().points() {
        let n = f.triple_at(idx);
        let d = grads.at(idx);
        let g = |a: usize, j: usize, k: usize| if j == 2 { 0.0 } else { d[a][j][k] };
        let div = |a: usize| g(a, 0, 0) + g(a, 1, 1) + g(a, 2, 2);
        let ncurl = |b: usize, a: usize| {
            let mut c = 0.0;
            for l in 0..3 {
                for q in 0..3 {
                    for k in 0..3 {
                        c += n[b][l] * eps3(l, q, k) * g(a, q, k);
                    }
                }
            }
            c
        };
        for i in 0..2 {
            for j in 0..3 {
                let mut s = 0.0;
                for a in 0..3 {
                    for k in 0..3 {
                        let mut dfd = p.gamma[a] * g(a, j, k);
                        if j == k {
                            dfd += p.k[a] * div(a);
                        }
                        for b in 0..3 {
                            let mut e = 0.0;
                            for l in 0..3 {
                                e += eps3(l, j, k) * n[b][l];
                            }
                            dfd += p.kk[b][a] * ncurl(b, a) * e;
                        }
                        s -= dfd * g(a, i, k);
                    }
                }
                out[3 * i + j][idx] = s;
            }
        }
    }
    out
}
