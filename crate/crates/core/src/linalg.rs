//! Dense complex linear algebra shared by the physics modules.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type Mat2 = Matrix2<C64>;

/// Relative singular-value cutoff used for every null-space computation.
pub const NULL_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Orthonormal basis (as columns) of `{v : |Mv| <= tol * sigma_max * |v|}`.
///
/// Wide matrices are zero-padded to square so that the SVD returns a complete
/// right-singular basis.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    let square = if rows < cols {
        let mut padded = CMat::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = rel_tol * sigma_max;
    let picked: alloc::vec::Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| i)
        .collect();
    let mut out = CMat::zeros(cols, picked.len());
    for (j, &i) in picked.iter().enumerate() {
        for r in 0..cols {
            out[(r, j)] = v_t[(i, r)].conj();
        }
    }
    out
}

/// Unitary factor of the polar decomposition `M = W P`.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested U") * svd.v_t.expect("requested V^T")
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let ph = C64::from_polar(1.0, -lam * t);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= ph;
        }
    }
    scaled * v.adjoint()
}

/// Frobenius distance minimised over a global phase:
/// `min_a |U - e^{ia} V|`.
pub fn projective_distance(u: &CMat, v: &CMat) -> f64 {
    let phase = best_phase((v.adjoint() * u).trace());
    (u - v * phase).norm()
}

fn best_phase(overlap: C64) -> C64 {
    let r = overlap.norm();
    if r > 0.0 {
        overlap / r
    } else {
        re(1.0)
    }
}

pub fn projective_distance2(u: &Mat2, v: &Mat2) -> f64 {
    let phase = best_phase((v.adjoint() * u).trace());
    (u - v * phase).norm()
}

/// `|U^dagger U - I|_F`.
pub fn unitarity_deviation(u: &CMat) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMat::identity(n, n)).norm()
}

pub fn hermiticity_deviation(h: &CMat) -> f64 {
    (h - h.adjoint()).norm()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn to_mat2(m: &CMat) -> Mat2 {
    assert_eq!(m.shape(), (2, 2), "expected a 2x2 matrix");
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

pub fn from_mat2(m: &Mat2) -> CMat {
    CMat::from_fn(2, 2, |i, j| m[(i, j)])
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(re(0.0), re(1.0), re(1.0), re(0.0))
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0))
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(re(1.0), re(0.0), re(0.0), re(-1.0))
}

/// `exp(i (v_x sx + v_y sy + v_z sz))`.
pub fn su2_exp(vx: f64, vy: f64, vz: f64) -> Mat2 {
    let r = (vx * vx + vy * vy + vz * vz).sqrt();
    if r == 0.0 {
        return Mat2::identity();
    }
    let (s, cs) = r.sin_cos();
    let k = s / r;
    // cos r I + i sin r (n . sigma)
    Mat2::new(
        c(cs, k * vz),
        c(k * vy, k * vx),
        c(-k * vy, k * vx),
        c(cs, -k * vz),
    )
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| c(standard_normal(rng), standard_normal(rng)));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            re(1.0)
        };
        for i in 0..d {
            out[(i, j)] *= ph;
        }
    }
    out
}

pub fn normalized(v: &CVec) -> Option<CVec> {
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        None
    } else {
        Some(v.unscale(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_identity_is_empty() {
        let m = CMat::identity(4, 4);
        assert_eq!(null_space(&m, NULL_TOL).ncols(), 0);
    }

    #[test]
    fn null_space_of_zero_is_everything() {
        let m = CMat::zeros(5, 5);
        let ns = null_space(&m, NULL_TOL);
        assert_eq!(ns.ncols(), 5);
        assert!(unitarity_deviation(&ns) < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // 1x3 row (1, 1, 0): null space is 2-dimensional
        let m = CMat::from_row_slice(1, 3, &[re(1.0), re(1.0), re(0.0)]);
        let ns = null_space(&m, NULL_TOL);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
    }

    #[test]
    fn polar_factor_is_unitary_and_idempotent_on_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 3);
        assert!(unitarity_deviation(&u) < 1e-12);
        assert!((polar_unitary(&u) - &u).norm() < 1e-12);
    }

    #[test]
    fn su2_exp_matches_generic_exponential() {
        let (vx, vy, vz) = (0.3, -0.7, 1.1);
        let gen = (sigma_x() * re(vx) + sigma_y() * re(vy) + sigma_z() * re(vz)) * re(-1.0);
        // exp(i v.s) = exp(-i H t) with H = -v.s, t = 1
        let h = from_mat2(&gen);
        let expect = expm_hermitian(&h, 1.0);
        assert!((from_mat2(&su2_exp(vx, vy, vz)) - expect).norm() < 1e-12);
    }

    #[test]
    fn projective_distance_ignores_global_phase() {
        let z = from_mat2(&sigma_z());
        let phased = &z * C64::from_polar(1.0, 0.77);
        assert!(projective_distance(&z, &phased) < 1e-12);
        let x = from_mat2(&sigma_x());
        assert!((projective_distance(&z, &x) - 2.0).abs() < 1e-12);
    }
}
