//! Pointwise SO(3) calculus for orthonormal frames.
//!
//! A frame is stored as three row vectors `(n1, n2, n3)`; the matrix view of a
//! frame has `n_α` as its rows. A "triple" is any element of ℝ^{3×3} written in
//! the same row-per-vector layout, so the tangent-space basis elements and the
//! derivatives of a frame are triples as well.

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{Error, Result};

/// Tolerance for unit length and mutual orthogonality of a constructed frame.
pub const ORTHONORMAL_TOL: f64 = 1e-12;
/// Tolerance on `det = +1` of a constructed frame.
pub const DETERMINANT_TOL: f64 = 1e-10;
/// Orthonormality drift tolerated in a running simulation.
pub const DRIFT_TOL: f64 = 1e-8;

/// Three 3-vectors in row-per-vector layout; a view of ℝ^{3×3}.
pub type Triple = [Vector3<f64>; 3];

/// Component-wise inner product `A·B = Σ_α a_α·b_α`.
pub fn triple_dot(a: &Triple, b: &Triple) -> f64 {
    a[0].dot(&b[0]) + a[1].dot(&b[1]) + a[2].dot(&b[2])
}

pub fn triple_to_matrix(t: &Triple) -> Matrix3<f64> {
    Matrix3::from_rows(&[t[0].transpose(), t[1].transpose(), t[2].transpose()])
}

pub fn matrix_to_triple(m: &Matrix3<f64>) -> Triple {
    [
        m.row(0).transpose(),
        m.row(1).transpose(),
        m.row(2).transpose(),
    ]
}

/// Levi-Civita symbol on zero-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Symmetrized tensor product `ab = (a⊗b + b⊗a)/2`.
pub fn sym_product(a: &Vector3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    (a * b.transpose() + b * a.transpose()) * 0.5
}

/// An orthonormal, right-handed frame `(n1, n2, n3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub n: Triple,
}

impl Frame {
    /// Builds a frame and checks that it lies on SO(3).
    pub fn new(n1: Vector3<f64>, n2: Vector3<f64>, n3: Vector3<f64>) -> Result<Self> {
        let f = Frame { n: [n1, n2, n3] };
        f.validate()?;
        Ok(f)
    }

    /// Builds a frame without validation. Used for fields whose orthonormality
    /// is monitored separately.
    pub fn from_triple_unchecked(n: Triple) -> Self {
        Frame { n }
    }

    pub fn identity() -> Self {
        Frame {
            n: [Vector3::x(), Vector3::y(), Vector3::z()],
        }
    }

    /// Frame whose rows are the rows of a rotation matrix.
    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        let f = Frame {
            n: matrix_to_triple(m),
        };
        f.validate()?;
        Ok(f)
    }

    /// Frame obtained by rotating the rows of `base` with `exp([θ]×)`.
    pub fn rotated(base: &Frame, theta: &Vector3<f64>) -> Self {
        let r = Rotation3::new(*theta);
        Frame {
            n: [r * base.n[0], r * base.n[1], r * base.n[2]],
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        triple_to_matrix(&self.n)
    }

    /// Largest entry of `|F Fᵀ − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let m = self.matrix();
        (m * m.transpose() - Matrix3::identity()).abs().max()
    }

    pub fn validate(&self) -> Result<()> {
        for (a, na) in self.n.iter().enumerate() {
            if !na.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidFrame(format!("n{} is not finite", a + 1)));
            }
            if (na.norm_squared() - 1.0).abs() > ORTHONORMAL_TOL {
                return Err(Error::InvalidFrame(format!(
                    "|n{}|² = {} is not 1",
                    a + 1,
                    na.norm_squared()
                )));
            }
            for b in (a + 1)..3 {
                let d = na.dot(&self.n[b]);
                if d.abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidFrame(format!(
                        "n{}·n{} = {d:e}",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        let det = self.matrix().determinant();
        if (det - 1.0).abs() > DETERMINANT_TOL {
            return Err(Error::InvalidFrame(format!("det = {det}")));
        }
        Ok(())
    }
}

/// Orthogonal basis of the tangent space `T_p SO(3)` (`v`) and of its
/// orthogonal complement (`w`).
#[derive(Clone, Copy, Debug)]
pub struct TangentBases {
    pub v: [Triple; 3],
    pub w: [Triple; 6],
}

impl TangentBases {
    /// `|V_k|²` and `|W_k|²` for any frame.
    pub const V_NORM_SQ: [f64; 3] = [2.0, 2.0, 2.0];
    pub const W_NORM_SQ: [f64; 6] = [2.0, 2.0, 2.0, 1.0, 1.0, 1.0];

    pub fn all(&self) -> [Triple; 9] {
        [
            self.v[0], self.v[1], self.v[2], self.w[0], self.w[1], self.w[2], self.w[3],
            self.w[4], self.w[5],
        ]
    }
}

fn tangent_bases_of(n: &Triple) -> TangentBases {
    let [n1, n2, n3] = *n;
    let z = Vector3::zeros();
    TangentBases {
        v: [[z, n3, -n2], [-n3, z, n1], [n2, -n1, z]],
        w: [
            [z, n3, n2],
            [n3, z, n1],
            [n2, n1, z],
            [n1, z, z],
            [z, n2, z],
            [z, z, n3],
        ],
    }
}

pub fn tangent_bases(f: &Frame) -> Result<TangentBases> {
    f.validate()?;
    Ok(tangent_bases_of(&f.n))
}

/// `(ℒ_k n1, ℒ_k n2, ℒ_k n3)` for the rotation generator about `n_k`,
/// `k ∈ {1, 2, 3}`.
pub fn lk_apply(k: usize, f: &Frame) -> Result<Triple> {
    if !(1..=3).contains(&k) {
        return Err(Error::Index {
            index: k as i64,
            range: "1..=3".into(),
        });
    }
    let k0 = k - 1;
    let mut out = [Vector3::zeros(); 3];
    for (l, o) in out.iter_mut().enumerate() {
        for p in 0..3 {
            let e = levi_civita(k0, l, p);
            if e != 0.0 {
                *o += f.n[p] * e;
            }
        }
    }
    Ok(out)
}

/// Second-order tensor basis attached to a frame: five symmetric traceless
/// tensors and three antisymmetric ones.
#[derive(Clone, Copy, Debug)]
pub struct LocalBasis {
    pub s: [Matrix3<f64>; 5],
    pub a: [Matrix3<f64>; 3],
}

/// Same as [`local_basis`] without validating the frame; the hot loops call
/// this on fields whose orthonormality is already monitored.
pub fn local_basis_of(n: &Triple) -> LocalBasis {
    let [n1, n2, n3] = n;
    let outer = |a: &Vector3<f64>, b: &Vector3<f64>| a * b.transpose();
    LocalBasis {
        s: [
            outer(n1, n1) - Matrix3::identity() / 3.0,
            outer(n2, n2) - outer(n3, n3),
            sym_product(n1, n2),
            sym_product(n1, n3),
            sym_product(n2, n3),
        ],
        a: [
            outer(n2, n3) - outer(n3, n2),
            outer(n3, n1) - outer(n1, n3),
            outer(n1, n2) - outer(n2, n1),
        ],
    }
}

pub fn local_basis(f: &Frame) -> Result<LocalBasis> {
    f.validate()?;
    Ok(local_basis_of(&f.n))
}

/// Coefficients of a matrix in the tangent/complement basis of a frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    pub tangent: [f64; 3],
    pub complement: [f64; 6],
}

/// Splits `a` into its tangent and complement components at `f`.
pub fn decompose(a: &Triple, f: &Frame) -> Result<Decomposition> {
    let b = tangent_bases(f)?;
    let mut d = Decomposition {
        tangent: [0.0; 3],
        complement: [0.0; 6],
    };
    for k in 0..3 {
        d.tangent[k] = triple_dot(a, &b.v[k]) / TangentBases::V_NORM_SQ[k];
    }
    for k in 0..6 {
        d.complement[k] = triple_dot(a, &b.w[k]) / TangentBases::W_NORM_SQ[k];
    }
    Ok(d)
}

impl Decomposition {
    /// `Σ c_k V_k + Σ d_k W_k`.
    pub fn reconstruct(&self, f: &Frame) -> Triple {
        let b = tangent_bases_of(&f.n);
        let mut out = [Vector3::zeros(); 3];
        for (c, v) in self.tangent.iter().zip(&b.v) {
            for r in 0..3 {
                out[r] += v[r] * *c;
            }
        }
        for (c, w) in self.complement.iter().zip(&b.w) {
            for r in 0..3 {
                out[r] += w[r] * *c;
            }
        }
        out
    }

    /// Inner product with another decomposition at the same frame, using the
    /// basis norms.
    pub fn inner(&self, other: &Decomposition) -> f64 {
        let t: f64 = (0..3)
            .map(|k| self.tangent[k] * other.tangent[k] * TangentBases::V_NORM_SQ[k])
            .sum();
        let c: f64 = (0..6)
            .map(|k| self.complement[k] * other.complement[k] * TangentBases::W_NORM_SQ[k])
            .sum();
        t + c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tilted() -> Frame {
        Frame::rotated(&Frame::identity(), &Vector3::new(0.3, -0.7, 1.1))
    }

    #[test]
    fn identity_v2() {
        let b = tangent_bases(&Frame::identity()).unwrap();
        assert_eq!(b.v[1], [-Vector3::z(), Vector3::zeros(), Vector3::x()]);
    }

    #[test]
    fn basis_norms() {
        let b = tangent_bases(&tilted()).unwrap();
        for (k, v) in b.v.iter().enumerate() {
            assert!((triple_dot(v, v) - TangentBases::V_NORM_SQ[k]).abs() < 1e-14);
        }
        for (k, w) in b.w.iter().enumerate() {
            assert!((triple_dot(w, w) - TangentBases::W_NORM_SQ[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let bad = Frame::from_triple_unchecked([Vector3::x(), Vector3::x(), Vector3::z()]);
        assert!(matches!(tangent_bases(&bad), Err(Error::InvalidFrame(_))));
        let reflected = Frame::from_triple_unchecked([Vector3::x(), Vector3::y(), -Vector3::z()]);
        assert!(reflected.validate().is_err());
    }

    #[test]
    fn lk_levi_civita() {
        let f = tilted();
        let l1 = lk_apply(1, &f).unwrap();
        assert_eq!(l1, [Vector3::zeros(), f.n[2], -f.n[1]]);
        let l2 = lk_apply(2, &f).unwrap();
        assert_eq!(l2[1], Vector3::zeros());
        let l3 = lk_apply(3, &Frame::identity()).unwrap();
        assert_eq!(l3[0], Vector3::y());
        assert!(matches!(lk_apply(0, &f), Err(Error::Index { .. })));
        assert!(matches!(lk_apply(4, &f), Err(Error::Index { .. })));
    }

    #[test]
    fn lk_matches_tangent_basis() {
        // ℒ_k = V_k · ∂/∂p, so ℒ_k acting on the frame is V_k itself.
        let f = tilted();
        let b = tangent_bases(&f).unwrap();
        for k in 0..3 {
            assert_eq!(lk_apply(k + 1, &f).unwrap(), b.v[k]);
        }
    }

    #[test]
    fn local_basis_identity_frame() {
        let lb = local_basis(&Frame::identity()).unwrap();
        let s1 = Matrix3::from_diagonal(&Vector3::new(2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0));
        assert!((lb.s[0] - s1).abs().max() < 1e-15);
        assert_eq!(lb.s[1], Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, -1.0)));
    }

    #[test]
    fn decompose_basis_element() {
        let f = Frame::identity();
        let b = tangent_bases(&f).unwrap();
        let d = decompose(&b.v[0], &f).unwrap();
        assert_eq!(d.tangent, [1.0, 0.0, 0.0]);
        assert_eq!(d.complement, [0.0; 6]);
        let zero = decompose(&[Vector3::zeros(); 3], &f).unwrap();
        assert_eq!(zero.tangent, [0.0; 3]);
        assert_eq!(zero.complement, [0.0; 6]);
    }
}
