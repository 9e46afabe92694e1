//! Dyadic decomposition of a field with power-law spectrum: block energies,
//! exact reconstruction from the blocks, and Besov/Sobolev norms.

use biaxframe::lp::LittlewoodPaley;
use biaxframe::spectral::ScalarField;
use biaxframe::{Grid2D, Result, Spectral};

fn main() -> Result<()> {
    let grid = Grid2D::new(64, std::f64::consts::TAU)?;
    let lp = LittlewoodPaley::new(Spectral::new(grid))?;
    // Diagonal modes with amplitude k^(-3/2), all inside the resolved band.
    let f = ScalarField::from_fn(grid, |x, y| {
        let s: f64 = (1..=16).map(|k| (k as f64).powf(-1.5) * (k as f64 * (x + y)).cos()).sum();
        [s]
    });

    let blocks = lp.block_norms_sq(&f)?;
    for (j, e) in lp.partition().j_range().zip(&blocks) {
        println!("j = {j:>2}: |Delta_j f|^2 = {e:.6e}");
    }
    let mut sum = ScalarField::zeros(grid);
    for j in lp.partition().j_range() {
        sum.axpy(1.0, &lp.delta_j(&f, j)?);
    }
    println!("reconstruction error {:.2e}", sum.sub(&f).max_abs());
    for s in [0.0, 0.5, 1.0] {
        println!(
            "s = {s}: B^s_(2,2) = {:.6}, H^s = {:.6}, B^s_(2,inf) = {:.6}",
            lp.besov_norm(&f, s, 2.0)?,
            lp.sobolev_norm(&f, s)?,
            lp.besov_norm(&f, s, f64::INFINITY)?
        );
    }
    Ok(())
}
