//! Field types on a periodic ring, the unitary ring DFT and small metrics
//! shared by every engine.
//!
//! Sites are stored by index `i ∈ 0..N` and interpreted as lattice positions
//! `n = i − N/2`, so index `N/2` is the origin. All sizes are even.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Storage index of lattice position `n` on a ring of `n_sites`.
pub fn site_index(n_sites: usize, n: i64) -> usize {
    let len = n_sites as i64;
    (n + len / 2).rem_euclid(len) as usize
}

/// Lattice position held at storage index `index`.
pub fn site_position(n_sites: usize, index: usize) -> i64 {
    index as i64 - (n_sites / 2) as i64
}

pub(crate) fn check_even(n_sites: usize) -> Result<()> {
    if n_sites == 0 || !n_sites.is_multiple_of(2) {
        return Err(Error::OddLattice(n_sites));
    }
    Ok(())
}

fn check_finite(values: &[Complex64], what: &'static str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn norm_sqr(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).sum()
}

/// Two chirality amplitudes (ψ_R, ψ_L) per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    right: Vec<Complex64>,
    left: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(n_sites: usize) -> Result<Self> {
        check_even(n_sites)?;
        Ok(Self {
            right: vec![Complex64::new(0.0, 0.0); n_sites],
            left: vec![Complex64::new(0.0, 0.0); n_sites],
        })
    }

    pub fn from_components(right: Vec<Complex64>, left: Vec<Complex64>) -> Result<Self> {
        if right.len() != left.len() {
            return Err(Error::SizeMismatch { left: right.len(), right: left.len() });
        }
        check_even(right.len())?;
        check_finite(&right, "spinor field")?;
        check_finite(&left, "spinor field")?;
        Ok(Self { right, left })
    }

    /// Builds a field from a function of lattice position returning `(ψ_R, ψ_L)`.
    pub fn from_fn(n_sites: usize, mut f: impl FnMut(i64) -> (Complex64, Complex64)) -> Result<Self> {
        check_even(n_sites)?;
        let (right, left) = (0..n_sites).map(|i| f(site_position(n_sites, i))).unzip();
        Self::from_components(right, left)
    }

    pub fn n_sites(&self) -> usize {
        self.right.len()
    }

    pub fn right(&self) -> &[Complex64] {
        &self.right
    }

    pub fn left(&self) -> &[Complex64] {
        &self.left
    }

    pub fn right_at(&self, n: i64) -> Complex64 {
        self.right[site_index(self.n_sites(), n)]
    }

    pub fn left_at(&self, n: i64) -> Complex64 {
        self.left[site_index(self.n_sites(), n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.right) + norm_sqr(&self.left)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            right: self.right.iter().map(|z| z * factor).collect(),
            left: self.left.iter().map(|z| z * factor).collect(),
        }
    }

    /// Euclidean distance between two states of the same size.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::SizeMismatch { left: self.n_sites(), right: other.n_sites() });
        }
        let d: f64 = self
            .right
            .iter()
            .zip(&other.right)
            .chain(self.left.iter().zip(&other.left))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(libm::sqrt(d))
    }

    /// Spatial inversion `n → −n` with the chiralities exchanged.
    pub fn mirror(&self) -> Self {
        let n_sites = self.n_sites();
        let mut right = vec![Complex64::new(0.0, 0.0); n_sites];
        let mut left = right.clone();
        for i in 0..n_sites {
            let n = site_position(n_sites, i);
            right[i] = self.left_at(-n);
            left[i] = self.right_at(-n);
        }
        Self { right, left }
    }

    pub fn density(&self) -> ProbabilityField {
        density(self)
    }
}

/// One complex amplitude per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarWaveField {
    amps: Vec<Complex64>,
}

impl ScalarWaveField {
    pub fn zeros(n_sites: usize) -> Result<Self> {
        check_even(n_sites)?;
        Ok(Self { amps: vec![Complex64::new(0.0, 0.0); n_sites] })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        check_even(amps.len())?;
        check_finite(&amps, "scalar field")?;
        Ok(Self { amps })
    }

    pub fn from_fn(n_sites: usize, mut f: impl FnMut(i64) -> Complex64) -> Result<Self> {
        check_even(n_sites)?;
        Self::from_amplitudes((0..n_sites).map(|i| f(site_position(n_sites, i))).collect())
    }

    /// Unit amplitude at lattice position `n`.
    pub fn delta(n_sites: usize, n: i64) -> Result<Self> {
        let mut field = Self::zeros(n_sites)?;
        field.amps[site_index(n_sites, n)] = Complex64::new(1.0, 0.0);
        Ok(field)
    }

    pub fn n_sites(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn at(&self, n: i64) -> Complex64 {
        self.amps[site_index(self.n_sites(), n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::SizeMismatch { left: self.n_sites(), right: other.n_sites() });
        }
        let d: f64 = self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(libm::sqrt(d))
    }

    pub fn density(&self) -> ProbabilityField {
        density(self)
    }
}

/// Nonnegative weight per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    values: Vec<f64>,
}

impl ProbabilityField {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        check_even(values.len())?;
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("probability field"));
        }
        Ok(Self { values })
    }

    pub fn delta(n_sites: usize, n: i64) -> Result<Self> {
        check_even(n_sites)?;
        let mut values = vec![0.0; n_sites];
        values[site_index(n_sites, n)] = 1.0;
        Ok(Self { values })
    }

    pub fn n_sites(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, n: i64) -> f64 {
        self.values[site_index(self.n_sites(), n)]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Roundoff-level negative entries replaced by zero.
    pub fn clamped(&self) -> Self {
        Self { values: self.values.iter().map(|v| v.max(0.0)).collect() }
    }

    /// Pointwise mean of two fields of equal size.
    pub fn averaged_with(&self, other: &Self) -> Result<Self> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::SizeMismatch { left: self.n_sites(), right: other.n_sites() });
        }
        Ok(Self { values: self.values.iter().zip(&other.values).map(|(a, b)| 0.5 * (a + b)).collect() })
    }

    pub fn mean_position(&self) -> f64 {
        let n_sites = self.n_sites();
        let total = self.total();
        self.values.iter().enumerate().map(|(i, p)| site_position(n_sites, i) as f64 * p).sum::<f64>() / total
    }

    pub fn variance(&self) -> f64 {
        let n_sites = self.n_sites();
        let mean = self.mean_position();
        let total = self.total();
        self.values
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = site_position(n_sites, i) as f64 - mean;
                d * d * p
            })
            .sum::<f64>()
            / total
    }
}

/// Chirality-resolved probabilities `(p_R, p_L)` per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralProbability {
    right: Vec<f64>,
    left: Vec<f64>,
}

impl ChiralProbability {
    pub fn from_components(right: Vec<f64>, left: Vec<f64>) -> Result<Self> {
        if right.len() != left.len() {
            return Err(Error::SizeMismatch { left: right.len(), right: left.len() });
        }
        check_even(right.len())?;
        if !right.iter().chain(&left).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("chiral probability field"));
        }
        Ok(Self { right, left })
    }

    pub fn from_fn(n_sites: usize, mut f: impl FnMut(i64) -> (f64, f64)) -> Result<Self> {
        check_even(n_sites)?;
        let (right, left) = (0..n_sites).map(|i| f(site_position(n_sites, i))).unzip();
        Self::from_components(right, left)
    }

    /// All weight on the right-mover at position `n`.
    pub fn delta_right(n_sites: usize, n: i64) -> Result<Self> {
        Self::from_fn(n_sites, |m| if m == n { (1.0, 0.0) } else { (0.0, 0.0) })
    }

    pub fn uniform(n_sites: usize) -> Result<Self> {
        check_even(n_sites)?;
        let w = 1.0 / (2 * n_sites) as f64;
        Ok(Self { right: vec![w; n_sites], left: vec![w; n_sites] })
    }

    pub fn n_sites(&self) -> usize {
        self.right.len()
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right_at(&self, n: i64) -> f64 {
        self.right[site_index(self.n_sites(), n)]
    }

    pub fn left_at(&self, n: i64) -> f64 {
        self.left[site_index(self.n_sites(), n)]
    }

    pub fn total(&self) -> f64 {
        self.right.iter().chain(&self.left).sum()
    }

    pub fn min_value(&self) -> f64 {
        self.right.iter().chain(&self.left).copied().fold(f64::INFINITY, f64::min)
    }

    /// `p_R(n) + p_L(n)`.
    pub fn marginal(&self) -> ProbabilityField {
        ProbabilityField { values: self.right.iter().zip(&self.left).map(|(r, l)| r + l).collect() }
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::SizeMismatch { left: self.n_sites(), right: other.n_sites() });
        }
        Ok(self
            .right
            .iter()
            .zip(&other.right)
            .chain(self.left.iter().zip(&other.left))
            .map(|(a, b)| libm::fabs(a - b))
            .sum())
    }
}

/// Dual grid `k_m = 2πm/N − π`, `m ∈ 0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumGrid {
    n: usize,
}

impl MomentumGrid {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.n as f64 - PI
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |m| self.k(m))
    }
}

/// Unitary DFT on a centered ring (plain O(N²) with an exact integer phase table).
///
/// Forward: `φ(k_m) = N^{-1/2} Σ_n ψ(n) e^{−i k_m n}`; inverse conjugates the phase.
#[derive(Debug, Clone)]
pub struct RingDft {
    n: usize,
    twiddle: Vec<Complex64>,
    scale: f64,
}

impl RingDft {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        let twiddle = (0..n)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / n as f64;
                Complex64::new(libm::cos(a), -libm::sin(a))
            })
            .collect();
        Ok(Self { n, twiddle, scale: 1.0 / libm::sqrt(n as f64) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    // e^{∓i k_m n} = (−1)^n · e^{∓2πi m n / N}; n taken mod N for the table.
    fn transform(&self, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = self.n;
        let half = n / 2;
        debug_assert_eq!(input.len(), n);
        // Input sites carry the (−1)^n factor in the forward direction.
        let signed: Vec<Complex64> = if inverse {
            input.to_vec()
        } else {
            input.iter().enumerate().map(|(i, z)| if (i + half).is_multiple_of(2) { *z } else { -z }).collect()
        };
        let mut out = Vec::with_capacity(n);
        for row in 0..n {
            // forward: row = m, column = site i with reduced position p_i = (i − N/2) mod N
            // inverse: row = site i, column = m
            let mut acc = Complex64::new(0.0, 0.0);
            if inverse {
                let p = (row + n - half) % n;
                let mut j = 0usize;
                for z in signed.iter() {
                    acc += z * self.twiddle[j].conj();
                    j += p;
                    if j >= n {
                        j -= n;
                    }
                }
                if (row + half) % 2 == 1 {
                    acc = -acc;
                }
            } else {
                // site 0 sits at reduced position N/2
                let mut j = (row * half) % n;
                for z in signed.iter() {
                    acc += z * self.twiddle[j];
                    j += row;
                    if j >= n {
                        j -= n;
                    }
                }
            }
            out.push(acc * self.scale);
        }
        out
    }

    pub fn forward(&self, input: &[Complex64]) -> Vec<Complex64> {
        self.transform(input, false)
    }

    pub fn inverse(&self, input: &[Complex64]) -> Vec<Complex64> {
        self.transform(input, true)
    }
}

/// Fields living on the ring that can be moved to momentum space component by component.
pub trait RingField: Sized {
    fn n_sites(&self) -> usize;
    fn components(&self) -> Vec<&[Complex64]>;
    fn from_component_vecs(components: Vec<Vec<Complex64>>) -> Result<Self>;
}

impl RingField for SpinorField {
    fn n_sites(&self) -> usize {
        SpinorField::n_sites(self)
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![&self.right, &self.left]
    }

    fn from_component_vecs(mut components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.len() != 2 {
            return Err(Error::Invalid("a spinor field needs exactly two components"));
        }
        let left = components.pop().unwrap_or_default();
        let right = components.pop().unwrap_or_default();
        Self::from_components(right, left)
    }
}

impl RingField for ScalarWaveField {
    fn n_sites(&self) -> usize {
        ScalarWaveField::n_sites(self)
    }

    fn components(&self) -> Vec<&[Complex64]> {
        vec![&self.amps]
    }

    fn from_component_vecs(mut components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.len() != 1 {
            return Err(Error::Invalid("a scalar field has exactly one component"));
        }
        Self::from_amplitudes(components.pop().unwrap_or_default())
    }
}

/// Momentum-space amplitudes, one vector per internal component, indexed by the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField {
    pub grid: MomentumGrid,
    pub components: Vec<Vec<Complex64>>,
}

impl MomentumField {
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| norm_sqr(c)).sum()
    }
}

pub fn dft_ring<F: RingField>(field: &F) -> Result<MomentumField> {
    let dft = RingDft::new(field.n_sites())?;
    Ok(MomentumField {
        grid: MomentumGrid::new(field.n_sites())?,
        components: field.components().into_iter().map(|c| dft.forward(c)).collect(),
    })
}

pub fn idft_ring<F: RingField>(field: &MomentumField) -> Result<F> {
    let dft = RingDft::new(field.grid.len())?;
    F::from_component_vecs(field.components.iter().map(|c| dft.inverse(c)).collect())
}

/// `ρ(n) = Σ_c |ψ_c(n)|²`.
pub fn density<F: RingField>(state: &F) -> ProbabilityField {
    let mut values = vec![0.0; state.n_sites()];
    for component in state.components() {
        for (v, z) in values.iter_mut().zip(component) {
            *v += z.norm_sqr();
        }
    }
    ProbabilityField { values }
}

pub fn l1_distance(p: &ProbabilityField, q: &ProbabilityField) -> Result<f64> {
    if p.n_sites() != q.n_sites() {
        return Err(Error::SizeMismatch { left: p.n_sites(), right: q.n_sites() });
    }
    Ok(p.values.iter().zip(&q.values).map(|(a, b)| libm::fabs(a - b)).sum())
}

/// Ring-size check for a run that spreads at `speed` sites per unit time for `duration`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowGuard {
    pub n_sites: usize,
    pub required_sites: usize,
}

impl WindowGuard {
    pub const MARGIN: usize = 80;

    pub fn new(n_sites: usize, speed: f64, duration: f64) -> Self {
        let reach = libm::ceil(libm::fabs(speed * duration)) as usize;
        Self { n_sites, required_sites: 2 * reach + Self::MARGIN }
    }

    pub fn wraparound_risk(&self) -> bool {
        self.n_sites < self.required_sites
    }
}

/// An evolved field together with the ring-size check for the run that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved<F> {
    pub field: F,
    pub guard: WindowGuard,
}

impl<F> Evolved<F> {
    pub fn into_field(self) -> F {
        self.field
    }

    pub fn wraparound_risk(&self) -> bool {
        self.guard.wraparound_risk()
    }
}
