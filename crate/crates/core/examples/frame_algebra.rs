//! Pointwise frame algebra: rotation generators, the tangent/complement
//! decomposition of a frame perturbation, and the local symmetric basis.

use biaxframe::frame::{decompose, lk_apply, local_basis, tangent_bases, triple_dot};
use biaxframe::{Frame, Result};
use nalgebra::Vector3;

fn main() -> Result<()> {
    let f = Frame::rotated(&Frame::identity(), &Vector3::new(0.3, -0.7, 1.1));
    println!("frame orthonormality error {:.2e}", f.orthonormality_error());

    let bases = tangent_bases(&f)?;
    for k in 1..=3 {
        let l = lk_apply(k, &f)?;
        println!("|L{k} n|^2 = {:.6}", triple_dot(&l, &l));
    }

    // A perturbation that mixes a rotation with a stretch of n1.
    let mut p = bases.v[0];
    p[0] += 0.25 * f.n[0];
    let d = decompose(&p, &f)?;
    println!("tangent coordinates    {:?}", d.tangent);
    println!("complement coordinates {:?}", d.complement);

    let lb = local_basis(&f)?;
    for (i, s) in lb.s.iter().enumerate() {
        println!("s{}: trace {:+.1e}, |s|^2 = {:.4}", i + 1, s.trace(), s.component_mul(s).sum());
    }
    Ok(())
}
