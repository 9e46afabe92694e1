//! Initial-data generators. Every field is sampled from a closed-form
//! trigonometric expression, so it is exactly band-limited before any
//! nonlinear map is applied.

use nalgebra::{Rotation3, Vector3};
use rand::Rng;

use crate::frame::Frame;
use crate::frame_field::FrameField;
use crate::spectral::{Grid2D, Vec2Field};

use super::SimState;

/// Random real trigonometric polynomial with modes `|m|_∞ ≤ max_mode`,
/// excluding the mean.
#[derive(Clone, Debug)]
pub struct RandomTrig {
    terms: Vec<(f64, f64, f64, f64)>,
}

impl RandomTrig {
    pub fn sample(rng: &mut impl Rng, max_mode: u32) -> Self {
        let m = max_mode as i32;
        let mut terms = Vec::new();
        for my in 0..=m {
            for mx in -m..=m {
                if my == 0 && mx <= 0 {
                    continue;
                }
                let a = rng.random_range(-1.0..1.0);
                let b = rng.random_range(-1.0..1.0);
                terms.push((mx as f64, my as f64, a, b));
            }
        }
        RandomTrig { terms }
    }

    /// Value at `(x, y)` for fundamental wavenumber `k0`.
    pub fn value(&self, k0: f64, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(mx, my, a, b)| {
                let (s, c) = (k0 * (mx * x + my * y)).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    /// Gradient at `(x, y)`.
    pub fn gradient(&self, k0: f64, x: f64, y: f64) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(gx, gy), &(mx, my, a, b)| {
            let (s, c) = (k0 * (mx * x + my * y)).sin_cos();
            let d = -a * s + b * c;
            (gx + k0 * mx * d, gy + k0 * my * d)
        })
    }
}

fn max_over_grid(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> f64 {
    (0..grid.points())
        .map(|i| {
            let (x, y) = grid.coords(i);
            f(x, y)
        })
        .fold(0.0, f64::max)
}

/// Smooth random rotation-vector field `θ(x)` with `max|θ| = amplitude`.
#[derive(Clone, Debug)]
pub struct RotationField {
    comps: [RandomTrig; 3],
    scale: f64,
    k0: f64,
}

impl RotationField {
    pub fn sample(rng: &mut impl Rng, grid: Grid2D, amplitude: f64, max_mode: u32) -> Self {
        let comps = std::array::from_fn(|_| RandomTrig::sample(rng, max_mode));
        let mut out = RotationField {
            comps,
            scale: 1.0,
            k0: grid.k0(),
        };
        let peak = max_over_grid(grid, |x, y| out.at(x, y).norm());
        out.scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
        out
    }

    pub fn at(&self, x: f64, y: f64) -> Vector3<f64> {
        Vector3::from_fn(|c, _| self.scale * self.comps[c].value(self.k0, x, y))
    }
}

/// Uniform `base` frame rotated pointwise by `exp([θ(x)]×)`.
pub fn random_rotation_field(
    rng: &mut impl Rng,
    grid: Grid2D,
    base: &Frame,
    amplitude: f64,
    max_mode: u32,
) -> FrameField {
    let theta = RotationField::sample(rng, grid, amplitude, max_mode);
    FrameField::from_fn(grid, |x, y| Frame::rotated(base, &theta.at(x, y)))
}

/// Divergence-free velocity `(∂yψ, −∂xψ)` from a random stream function,
/// scaled so that `max|v| = amplitude`.
pub fn random_velocity(rng: &mut impl Rng, grid: Grid2D, amplitude: f64, max_mode: u32) -> Vec2Field {
    let psi = RandomTrig::sample(rng, max_mode);
    let k0 = grid.k0();
    let raw = Vec2Field::from_fn(grid, |x, y| {
        let (gx, gy) = psi.gradient(k0, x, y);
        [gy, -gx]
    });
    let peak = (0..grid.points())
        .map(|i| raw[0][i].hypot(raw[1][i]))
        .fold(0.0, f64::max);
    if peak > 0.0 {
        raw.scaled(amplitude / peak)
    } else {
        raw
    }
}

/// `U (sin k0x cos k0y, −cos k0x sin k0y)`.
pub fn taylor_green(grid: Grid2D, amplitude: f64) -> Vec2Field {
    let k = grid.k0();
    Vec2Field::from_fn(grid, |x, y| {
        let (sx, cx) = (k * x).sin_cos();
        let (sy, cy) = (k * y).sin_cos();
        [amplitude * sx * cy, -amplitude * cx * sy]
    })
}

/// Twin of `base` with frames rotated by `exp(ε[θ(x)]×)` and velocity shifted
/// by `ε w(x)`, where `θ` and `w` are smooth random fields of unit peak size.
/// `ε = 0` returns an exact copy.
pub fn perturbed_twin(rng: &mut impl Rng, base: &SimState, eps: f64, max_mode: u32) -> SimState {
    if eps == 0.0 {
        return base.clone();
    }
    let grid = base.frame.grid();
    let theta = RotationField::sample(rng, grid, 1.0, max_mode);
    let w = random_velocity(rng, grid, 1.0, max_mode);
    let mut frame = base.frame.clone();
    for idx in 0..grid.points() {
        let (x, y) = grid.coords(idx);
        let r = Rotation3::new(theta.at(x, y) * eps);
        let n = base.frame.triple_at(idx);
        frame.set_triple(idx, &[r * n[0], r * n[1], r * n[2]]);
    }
    let mut velocity = base.velocity.clone();
    velocity.axpy(eps, &w);
    SimState {
        frame,
        velocity,
        t: base.t,
        step: base.step,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Spectral;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_velocity_is_solenoidal_and_scaled() {
        let grid = Grid2D::new(32, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_velocity(&mut rng, grid, 0.7, 2);
        let sp = Spectral::new(grid);
        assert!(sp.div(&v).max_abs() < 1e-12);
        let peak = (0..grid.points()).map(|i| v[0][i].hypot(v[1][i])).fold(0.0, f64::max);
        assert!((peak - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rotation_field_is_orthonormal() {
        let grid = Grid2D::new(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_rotation_field(&mut rng, grid, &Frame::identity(), 0.5, 2);
        f.validate().unwrap();
    }

    #[test]
    fn zero_perturbation_is_a_copy() {
        let grid = Grid2D::new(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = SimState::new(
            random_rotation_field(&mut rng, grid, &Frame::identity(), 0.5, 1),
            taylor_green(grid, 1.0),
        )
        .unwrap();
        assert_eq!(perturbed_twin(&mut rng, &s, 0.0, 1), s);
    }
}
