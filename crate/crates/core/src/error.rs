use thiserror::Error;

/// Errors produced by the walk engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice size {0} is not a positive even integer")]
    OddLattice(usize),
    #[error("lattice size {got} is too small (need at least {min})")]
    LatticeTooSmall { got: usize, min: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("parameter `{name}` = {value} is outside its domain")]
    OutOfDomain { name: &'static str, value: f64 },
    #[error("step count {0} must be even")]
    OddSteps(usize),
    #[error("dispersion is degenerate at k = {k}, theta = {theta}")]
    DegenerateDispersion { k: f64, theta: f64 },
    #[error("matrix logarithm is ambiguous: eigenphase {phase} lies on the branch cut")]
    BranchCut { phase: f64 },
    #[error("no continuous-time limit: zeroth-order defect {defect} exceeds {threshold}")]
    NoContinuousLimit { defect: f64, threshold: f64 },
    #[error("{0}")]
    Invalid(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
