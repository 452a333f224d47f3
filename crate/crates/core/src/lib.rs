//! Discrete- and continuous-time quantum walks on a periodic lattice, their
//! continuous-time limit, the classical counterparts and a three-dimensional
//! extension.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod bessel;
pub mod classical;
pub mod ctqw;
pub mod dtqw;
pub mod error;
pub mod fit;
pub mod highdim;
pub mod lattice;
pub mod limit;
pub mod pauli;

pub use error::{Error, Result};
pub use lattice::{
    dft_ring, idft_ring, l1_distance, ChiralProbability, ComplexValue, Evolved, MomentumField, MomentumGrid,
    ProbabilityField, RingField, ScalarWaveField, SpinorField, WindowGuard,
};
pub use num_complex::Complex64;
