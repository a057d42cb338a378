//! Small dense linear-algebra helpers over complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest entrywise modulus of `M - M†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Eigenvalues of the Hermitian part of `m`.
pub fn eigvalsh(m: &CMatrix) -> DVector<f64> {
    hermitize(m).symmetric_eigenvalues()
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let scaled = CMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| {
        vecs[(i, j)] * f(vals[j])
    });
    scaled * vecs.adjoint()
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh(h);
    let scaled = CMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, j| {
        vecs[(i, j)] * C64::from_polar(1.0, -t * vals[j])
    });
    scaled * vecs.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Flat offsets of every multi-index over the given `(dim, stride)` factors,
/// enumerated lexicographically (first factor slowest).
pub(crate) fn offsets(factors: &[(usize, usize)]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &(dim, stride) in factors {
        let mut next = Vec::with_capacity(out.len() * dim);
        for &base in &out {
            for k in 0..dim {
                next.push(base + k * stride);
            }
        }
        out = next;
    }
    out
}

/// Row-major strides for a list of dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_enumerate_row_major() {
        // dims [2,3], keep the second factor only
        let st = strides(&[2, 3]);
        assert_eq!(st, vec![3, 1]);
        assert_eq!(offsets(&[(3, st[1])]), vec![0, 1, 2]);
        assert_eq!(offsets(&[(2, st[0])]), vec![0, 3]);
        assert_eq!(offsets(&[(2, 3), (3, 1)]), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn unitary_from_pauli_x() {
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let u = unitary_from_hamiltonian(&x, std::f64::consts::FRAC_PI_2);
        // exp(-i pi/2 X) = -i X
        assert!((u[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(u[(0, 0)].norm() < 1e-12);
    }
}
