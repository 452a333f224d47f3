//! Pauli matrices, their tensor products and closed-form exponentials.

use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix2, Matrix4, Schur, SymmetricEigen};
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;
pub type Mat4 = Matrix4<Complex64>;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `exp(−iαG) = cos α − i sin α G` for an involutory Hermitian generator (`G² = I`).
pub fn exp_involution2(generator: &Mat2, angle: f64) -> Mat2 {
    identity2() * c(libm::cos(angle), 0.0) - generator * c(0.0, libm::sin(angle))
}

pub fn exp_involution4(generator: &Mat4, angle: f64) -> Mat4 {
    Mat4::identity() * c(libm::cos(angle), 0.0) - generator * c(0.0, libm::sin(angle))
}

/// `‖U†U − I‖_F`.
pub fn unitarity_defect2(u: &Mat2) -> f64 {
    (u.adjoint() * u - identity2()).norm()
}

pub fn unitarity_defect4(u: &Mat4) -> f64 {
    (u.adjoint() * u - Mat4::identity()).norm()
}

pub fn unitarity_defect_dense(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).norm()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let hermitian = (h + h.adjoint()) * c(0.5, 0.0);
    let mut values: Vec<f64> = SymmetricEigen::new(hermitian).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of a general complex matrix (diagonal of its Schur form).
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenphases of a unitary matrix, each in `(−π, π]`.
pub fn eigenphases(u: &DMatrix<Complex64>) -> Vec<f64> {
    eigenvalues(u).into_iter().map(|z| z.arg()).collect()
}
