//! Twin experiment: two runs started a tiny perturbation apart, compared with
//! the weak difference metric Φ = U + V and a fitted Gronwall constant.

use biaxframe::elasticity::ElasticParams;
use biaxframe::hydro::HydroParams;
use biaxframe::lp::WeakMetricConfig;
use biaxframe::sim::{gronwall_constant, init, twin_run, DtPolicy, Model, RunOptions, SimState};
use biaxframe::{Frame, Grid2D, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let grid = Grid2D::new(32, std::f64::consts::TAU)?;
    let hydro = HydroParams {
        eta: 1.0,
        beta: [0.2, 1.0, 0.8, 0.6, 0.7, 0.9],
        chi: [1.0, 1.2, 0.8],
        eta_rot: [0.3, 0.2, 0.25],
    };
    let model = Model::new(grid, ElasticParams::one_constant(0.5)?, hydro)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = SimState::new(
        init::random_rotation_field(&mut rng, grid, &Frame::identity(), 0.5, 2),
        init::random_velocity(&mut rng, grid, 0.5, 2),
    )?;
    let opts = RunOptions {
        t_end: 0.1,
        dt: DtPolicy::CflFraction(0.5),
        sample_every: 10,
    };
    let cfg = WeakMetricConfig::default();
    for eps in [1e-6, 1e-7] {
        let b = init::perturbed_twin(&mut rng, &a, eps, 2);
        let tw = twin_run(&model, a.clone(), b, &opts, &cfg, &mut |_, _| Ok(()))?;
        println!("eps = {eps:e}");
        for r in &tw.rows {
            println!("  t = {:.4}  phi = {:.6e}  phi/phi0 = {:.6}  F = {:.4}", r.t, r.phi, r.phi / tw.rows[0].phi, r.f);
        }
        println!("  Gronwall constant C = {:.4e}", gronwall_constant(&tw.rows)?);
    }
    Ok(())
}
