//! Elastic energy of a random frame field: the fifteen-term density against
//! the split form, and the forces that drive relaxation.

use biaxframe::elasticity::{elastic_density_direct, elastic_density_split, evaluate, ElasticParams};
use biaxframe::sim::init;
use biaxframe::{Frame, FrameGradients, Grid2D, Result, Spectral};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let grid = Grid2D::new(32, std::f64::consts::TAU)?;
    let sp = Spectral::new(grid);
    let moduli = [1.0, 1.2, 0.9, 1.1, 0.8, 1.3, 1.0, 0.95, 1.05, 1.15, 0.85, 1.25];
    let p = ElasticParams::from_moduli(moduli)?;
    println!("gamma = {:?}\nk = {:?}", p.gamma, p.k);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = init::random_rotation_field(&mut rng, grid, &Frame::identity(), 0.6, 2);
    let grads = FrameGradients::compute(&sp, f.components());
    let direct = elastic_density_direct(&f, &grads, &p)?;
    let split = elastic_density_split(&f, &grads, &p)?;
    let area = grid.cell_area();
    println!("energy (direct) {:.12}", area * direct[0].iter().sum::<f64>());
    println!("energy (split)  {:.12}", area * split[0].iter().sum::<f64>());
    println!("max density difference {:.2e}", direct.sub(&split).max_abs());

    let (_, forces) = evaluate(&sp, &f, &p)?;
    println!("max |h| {:.4}, max |ml| {:.4}", forces.h.max_abs(), forces.ml.max_abs());
    Ok(())
}
