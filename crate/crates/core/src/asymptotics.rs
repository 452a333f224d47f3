//! Long-time (weak-limit) position densities of the two quantum walks and
//! their comparison with simulated densities.
//!
//! Position `n` is read as the continuum coordinate `x = n`. Per-site masses
//! come from closed-form distribution functions: with `x = R sin u`
//! (`R = c·t`) the arcsine law integrates to `u/π` and the coined-walk
//! density to `atan(sin θ tan u)/π`.

use alloc::vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::dtqw::dtqw_step;
use crate::error::{Error, Result};
use crate::lattice::{site_position, ProbabilityField, SpinorField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeakLimitKind {
    /// `1/(π√((2γt)² − x²))`.
    CtqwArcsine,
    /// `sin θ / (π(1 − x²/τ²)√((τ cos θ)² − x²))`.
    DtqwKonno { theta: f64 },
}

/// Value of a weak-limit density at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityPoint {
    Interior(f64),
    /// `|x| = c·t`, where the density diverges.
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakLimitDensity {
    pub kind: WeakLimitKind,
    pub speed: f64,
    pub time: f64,
}

impl WeakLimitDensity {
    pub fn ctqw(gamma: f64, time: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::OutOfDomain { name: "gamma", value: gamma });
        }
        if !(time.is_finite() && time > 0.0) {
            return Err(Error::OutOfDomain { name: "time", value: time });
        }
        Ok(Self { kind: WeakLimitKind::CtqwArcsine, speed: 2.0 * gamma, time })
    }

    pub fn dtqw(theta: f64, steps: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::OutOfDomain { name: "theta", value: theta });
        }
        if !(steps.is_finite() && steps > 0.0) {
            return Err(Error::OutOfDomain { name: "tau", value: steps });
        }
        Ok(Self { kind: WeakLimitKind::DtqwKonno { theta }, speed: libm::cos(theta), time: steps })
    }

    /// Half-width `c·t` of the support.
    pub fn reach(&self) -> f64 {
        self.speed * self.time
    }

    pub fn classify(&self, x: f64) -> DensityPoint {
        let reach = self.reach();
        let ax = libm::fabs(x);
        if ax > reach {
            return DensityPoint::Outside;
        }
        if ax == reach {
            return DensityPoint::Boundary;
        }
        let root = libm::sqrt(reach * reach - x * x);
        DensityPoint::Interior(match self.kind {
            WeakLimitKind::CtqwArcsine => 1.0 / (PI * root),
            WeakLimitKind::DtqwKonno { theta } => {
                let scaled = x / self.time;
                libm::sin(theta) / (PI * (1.0 - scaled * scaled) * root)
            }
        })
    }

    /// Density, `+∞` on the boundary and `0` outside the support.
    pub fn density(&self, x: f64) -> f64 {
        match self.classify(x) {
            DensityPoint::Interior(v) => v,
            DensityPoint::Boundary => f64::INFINITY,
            DensityPoint::Outside => 0.0,
        }
    }

    /// Mass on `(−c·t, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let reach = self.reach();
        if x <= -reach {
            return 0.0;
        }
        if x >= reach {
            return 1.0;
        }
        let u = libm::asin(x / reach);
        let partial = match self.kind {
            WeakLimitKind::CtqwArcsine => u / PI,
            WeakLimitKind::DtqwKonno { theta } => libm::atan(libm::sin(theta) * libm::tan(u)) / PI,
        };
        0.5 + partial
    }

    /// Mass assigned to lattice site `n`, the interval `[n − ½, n + ½]`.
    pub fn site_mass(&self, n: i64) -> f64 {
        let x = n as f64;
        self.cdf(x + 0.5) - self.cdf(x - 0.5)
    }

    /// Site masses laid out on a ring of `n_sites`.
    pub fn site_masses(&self, n_sites: usize) -> Result<ProbabilityField> {
        ProbabilityField::from_values((0..n_sites).map(|i| self.site_mass(site_position(n_sites, i))).collect())
    }
}

pub fn ctqw_weak_density(x: f64, gamma: f64, time: f64) -> Result<f64> {
    Ok(WeakLimitDensity::ctqw(gamma, time)?.density(x))
}

pub fn dtqw_weak_density(x: f64, theta: f64, steps: f64) -> Result<f64> {
    Ok(WeakLimitDensity::dtqw(theta, steps)?.density(x))
}

pub const DEFAULT_INTERIOR_FRACTION: f64 = 0.9;
pub const DEFAULT_BINS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityComparison {
    /// Binned L1 distance over the interior `|x| ≤ f·c·t`.
    pub distance: f64,
    /// Analytic mass outside the interior window.
    pub excluded_mass: f64,
    pub bins: usize,
}

pub fn empirical_density_compare(
    simulated: &ProbabilityField,
    analytic: &WeakLimitDensity,
    interior_fraction: f64,
) -> Result<DensityComparison> {
    empirical_density_compare_binned(simulated, analytic, interior_fraction, DEFAULT_BINS)
}

/// Sites with `|n| ≤ f·c·t` are grouped into `bins` equal-width bins; the
/// simulated and analytic per-site masses are summed per bin and compared in L1.
/// Binning averages out the interference fringes of the lattice density,
/// which never converge pointwise.
pub fn empirical_density_compare_binned(
    simulated: &ProbabilityField,
    analytic: &WeakLimitDensity,
    interior_fraction: f64,
    bins: usize,
) -> Result<DensityComparison> {
    if !(interior_fraction > 0.0 && interior_fraction < 1.0) {
        return Err(Error::OutOfDomain { name: "interior_fraction", value: interior_fraction });
    }
    if bins == 0 {
        return Err(Error::Invalid("at least one bin is required"));
    }
    let window = interior_fraction * analytic.reach();
    let mut sim = vec![0.0; bins];
    let mut exact = vec![0.0; bins];
    let n_sites = simulated.n_sites();
    for (i, p) in simulated.values().iter().enumerate() {
        let n = site_position(n_sites, i);
        let x = n as f64;
        if libm::fabs(x) > window {
            continue;
        }
        let bin = (((x + window) / (2.0 * window) * bins as f64) as usize).min(bins - 1);
        sim[bin] += p;
        exact[bin] += analytic.site_mass(n);
    }
    let distance = sim.iter().zip(&exact).map(|(a, b)| libm::fabs(a - b)).sum();
    let excluded_mass = 1.0 - (analytic.cdf(window) - analytic.cdf(-window));
    Ok(DensityComparison { distance, excluded_mass, bins })
}

/// `½[ρ(τ) + ρ(τ+1)]` for the coined walk, removing the sublattice flicker.
pub fn parity_smoothed_density(initial: &SpinorField, theta: f64, steps: usize) -> ProbabilityField {
    let mut field = initial.clone();
    for _ in 0..steps {
        field = dtqw_step(&field, theta);
    }
    let now = field.density();
    let next = dtqw_step(&field, theta).density();
    now.averaged_with(&next).expect("same ring")
}
