//! Three-dimensional four-component walk in momentum space and the scalar
//! three-dimensional continuous-time walk.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{check_even, site_index, site_position, Evolved, MomentumGrid, RingDft, WindowGuard, I};
use crate::pauli::{exp_involution4, identity2, kron, sigma_x, sigma_y, sigma_z, unitarity_defect4, Mat4};

/// Defect above which an ordering is reported as having no continuous-time limit.
pub const DEFECT_THRESHOLD: f64 = 0.1;
/// Eigenphases of `−U²` closer than this to `±π` are rejected by the logarithm.
pub const BRANCH_TOLERANCE: f64 = 1e-8;

pub type Momentum3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `e^{−ik_x σ_z⊗σ_x} e^{−ik_y σ_z⊗σ_y} e^{−ik_z σ_z⊗σ_z} e^{−iθ σ_x⊗I}`.
    Naive,
    /// Half-angle x and y factors placed palindromically around the z factor.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumOperator4 {
    pub k: Momentum3,
    pub matrix: Mat4,
}

impl MomentumOperator4 {
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect4(&self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.matrix - self.matrix.adjoint()).norm()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_iterator(4, 4, self.matrix.iter().copied())
    }
}

fn shift_generators() -> [Mat4; 3] {
    let z = sigma_z();
    [kron(&z, &sigma_x()), kron(&z, &sigma_y()), kron(&z, &z)]
}

fn coin_generator() -> Mat4 {
    kron(&sigma_x(), &identity2())
}

pub fn propagator_3d(k: Momentum3, theta: f64, ordering: Ordering) -> MomentumOperator4 {
    let [gx, gy, gz] = shift_generators();
    let coin = exp_involution4(&coin_generator(), theta);
    let shift = match ordering {
        Ordering::Naive => exp_involution4(&gx, k[0]) * exp_involution4(&gy, k[1]) * exp_involution4(&gz, k[2]),
        Ordering::Symmetric => {
            let hx = exp_involution4(&gx, 0.5 * k[0]);
            let hy = exp_involution4(&gy, 0.5 * k[1]);
            hx * hy * exp_involution4(&gz, k[2]) * hy * hx
        }
    };
    MomentumOperator4 { k, matrix: shift * coin }
}

/// `‖U(k, π/2)² + I‖_F`.
pub fn zeroth_order_defect(k: Momentum3, ordering: Ordering) -> f64 {
    let u = propagator_3d(k, FRAC_PI_2, ordering).matrix;
    (u * u + Mat4::identity()).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootnoteHamiltonian3D {
    pub k: Momentum3,
    pub a: f64,
    pub b: [f64; 3],
    pub gamma: f64,
}

impl FootnoteHamiltonian3D {
    pub fn new(k: Momentum3, gamma: f64) -> Self {
        let [cx, cy, cz] = k.map(libm::cos);
        let [sx, sy, sz] = k.map(libm::sin);
        let a = cx * cx * cy * cy * cz * cz;
        let b = [sx * cx * cy * cy * cz * cz, cx * sy * cy * cz * cz, cx * cy * sz * cz];
        Self { k, a, b, gamma }
    }

    /// `√(a² + |b|²)`.
    pub fn magnitude(&self) -> f64 {
        libm::sqrt(self.a * self.a + self.b.iter().map(|v| v * v).sum::<f64>())
    }

    /// Positive eigenvalue `2γ|Π cos k_j|`.
    pub fn energy(&self) -> f64 {
        2.0 * self.gamma * self.magnitude()
    }

    pub fn operator(&self) -> MomentumOperator4 {
        let y = sigma_y();
        let matrix = (kron(&sigma_x(), &identity2()) * Complex64::from(self.a)
            + kron(&y, &sigma_x()) * Complex64::from(self.b[0])
            + kron(&y, &sigma_y()) * Complex64::from(self.b[1])
            + kron(&y, &sigma_z()) * Complex64::from(self.b[2]))
            * Complex64::from(-2.0 * self.gamma);
        MomentumOperator4 { k: self.k, matrix }
    }
}

/// `H = −2γ(a σ_x⊗I + b·σ_y⊗σ)`.
pub fn footnote_hamiltonian_3d(k: Momentum3, gamma: f64) -> MomentumOperator4 {
    FootnoteHamiltonian3D::new(k, gamma).operator()
}

/// Principal logarithm of a unitary matrix, from its Schur form.
fn unitary_log(u: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (q, t) = Schur::new(u.clone()).unpack();
    let n = u.nrows();
    let mut diag = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let z = t[(i, i)];
        let phase = z.arg();
        if PI - libm::fabs(phase) < BRANCH_TOLERANCE {
            return Err(Error::BranchCut { phase });
        }
        diag[(i, i)] = Complex64::new(libm::log(z.norm()), phase);
    }
    Ok(&q * diag * q.adjoint())
}

/// `H_eff = (iγ/δ) log(−U(k, π/2 − δ)²)` with the principal logarithm.
pub fn effective_generator_3d(k: Momentum3, delta: f64, gamma: f64, ordering: Ordering) -> Result<MomentumOperator4> {
    if !(delta > 0.0 && delta <= 0.3) {
        return Err(Error::OutOfDomain { name: "delta", value: delta });
    }
    if !gamma.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if ordering == Ordering::Naive {
        let defect = zeroth_order_defect(k, ordering);
        if defect > DEFECT_THRESHOLD {
            return Err(Error::NoContinuousLimit { defect, threshold: DEFECT_THRESHOLD });
        }
    }
    let u = propagator_3d(k, FRAC_PI_2 - delta, ordering).to_dense();
    let log = unitary_log(&(-(&u * &u)))?;
    let h = log * (I * (gamma / delta));
    let h = (&h + h.adjoint()) * Complex64::from(0.5);
    let mut matrix = Mat4::zeros();
    matrix.copy_from(&h);
    Ok(MomentumOperator4 { k, matrix })
}

/// Complex amplitudes on an `N_x × N_y × N_z` periodic lattice, z fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar3DField {
    dims: [usize; 3],
    amplitudes: Vec<Complex64>,
}

impl Scalar3DField {
    pub fn zeros(dims: [usize; 3]) -> Result<Self> {
        for n in dims {
            check_even(n)?;
        }
        Ok(Self { dims, amplitudes: vec![Complex64::new(0.0, 0.0); dims.iter().product()] })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut([i64; 3]) -> Complex64) -> Result<Self> {
        let mut field = Self::zeros(dims)?;
        for ix in 0..dims[0] {
            for iy in 0..dims[1] {
                for iz in 0..dims[2] {
                    let pos = [site_position(dims[0], ix), site_position(dims[1], iy), site_position(dims[2], iz)];
                    let value = f(pos);
                    if !(value.re.is_finite() && value.im.is_finite()) {
                        return Err(Error::NonFinite("amplitude"));
                    }
                    field.amplitudes[(ix * dims[1] + iy) * dims[2] + iz] = value;
                }
            }
        }
        Ok(field)
    }

    pub fn delta(dims: [usize; 3], at: [i64; 3]) -> Result<Self> {
        Self::from_fn(dims, |n| if n == at { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn at(&self, n: [i64; 3]) -> Complex64 {
        let d = self.dims;
        let idx = (site_index(d[0], n[0]) * d[1] + site_index(d[1], n[1])) * d[2] + site_index(d[2], n[2]);
        self.amplitudes[idx]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::SizeMismatch { left: self.amplitudes.len(), right: other.amplitudes.len() });
        }
        Ok(libm::sqrt(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum()))
    }
}

/// `E(k) = −2γ cos k_x cos k_y cos k_z`.
pub fn ctqw3d_energy(k: Momentum3, gamma: f64) -> f64 {
    -2.0 * gamma * libm::cos(k[0]) * libm::cos(k[1]) * libm::cos(k[2])
}

// Applies a 1D transform along `axis` of a z-fastest array.
fn transform_axis(data: &mut [Complex64], dims: [usize; 3], axis: usize, dft: &RingDft, inverse: bool) {
    let stride = match axis {
        0 => dims[1] * dims[2],
        1 => dims[2],
        _ => 1,
    };
    let len = dims[axis];
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for start in 0..data.len() {
        // a line starts wherever the axis coordinate is zero
        if (start / stride) % len != 0 {
            continue;
        }
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = data[start + j * stride];
        }
        let out = if inverse { dft.inverse(&line) } else { dft.forward(&line) };
        for (j, v) in out.into_iter().enumerate() {
            data[start + j * stride] = v;
        }
    }
}

/// Spectral evolution of `i∂_tΨ = −(γ/4) Σ_{d_j=±1} Ψ(n + d)`.
pub fn ctqw3d_evolve(state: &Scalar3DField, gamma: f64, time: f64) -> Result<Evolved<Scalar3DField>> {
    if !(gamma.is_finite() && time.is_finite()) {
        return Err(Error::NonFinite("gamma or time"));
    }
    let dims = state.dims;
    let dfts = [RingDft::new(dims[0])?, RingDft::new(dims[1])?, RingDft::new(dims[2])?];
    let grids = [MomentumGrid::new(dims[0])?, MomentumGrid::new(dims[1])?, MomentumGrid::new(dims[2])?];
    let mut data = state.amplitudes.clone();
    for (axis, dft) in dfts.iter().enumerate() {
        transform_axis(&mut data, dims, axis, dft, false);
    }
    let cos: [Vec<f64>; 3] = [0, 1, 2].map(|a| grids[a].values().map(libm::cos).collect());
    for mx in 0..dims[0] {
        for my in 0..dims[1] {
            for mz in 0..dims[2] {
                let energy = -2.0 * gamma * cos[0][mx] * cos[1][my] * cos[2][mz];
                let phase = -energy * time;
                data[(mx * dims[1] + my) * dims[2] + mz] *= Complex64::new(libm::cos(phase), libm::sin(phase));
            }
        }
    }
    for (axis, dft) in dfts.iter().enumerate() {
        transform_axis(&mut data, dims, axis, dft, true);
    }
    let smallest = *dims.iter().min().expect("three axes");
    let guard = WindowGuard::new(smallest, 2.0 * gamma, time);
    Ok(Evolved { field: Scalar3DField { dims, amplitudes: data }, guard })
}
