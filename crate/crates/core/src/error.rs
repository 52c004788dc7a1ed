use thiserror::Error;

use crate::weights::Pattern;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("particle number {n} out of range for {sites} sites")]
    ParticleNumberOutOfRange { n: usize, sites: usize },

    #[error("unsupported site count {sites}: {reason}")]
    UnsupportedSites { sites: usize, reason: &'static str },

    #[error("operator touches tilde mode {mode}; expected a physical-only operator")]
    NotPhysical { mode: usize },

    #[error("invalid weight w[{index}] = {value}: single-mode weights must lie in (0, 1)")]
    InvalidWeight { index: usize, value: f64 },

    #[error("pattern has {got} modes, expected {expected}")]
    PatternLength { got: usize, expected: usize },

    #[error("degenerate many-mode weights: {first} and {second} differ by less than {tolerance:e}")]
    DegenerateWeights {
        first: Pattern,
        second: Pattern,
        tolerance: f64,
    },

    #[error("weight ordering differs between the compared weight vectors (sector {sector})")]
    OrderingMismatch { sector: usize },

    #[error("single-mode odds ratio of mode {mode} does not change between the weight vectors")]
    DegenerateDifference { mode: usize },

    #[error("{quadrature} quadrature points alias particle numbers; need at least {minimum}")]
    Aliasing { quadrature: usize, minimum: usize },

    #[error("projection onto tilde pattern {pattern} vanishes (norm {norm:e})")]
    EmptyProjection { pattern: Pattern, norm: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("expectation value has imaginary residue {imag:e}")]
    ImaginaryResidue { imag: f64 },

    #[error("Hamiltonian matrix element is not real: {imag:e}")]
    NonRealMatrix { imag: f64 },

    #[error("sector with {dim} states exceeds the dense limit of {limit}")]
    SectorTooLarge { dim: usize, limit: usize },

    #[error("invalid excitation indices {indices:?}: {reason}")]
    InvalidExcitation {
        indices: Vec<usize>,
        reason: &'static str,
    },

    #[error("parameter vector has length {got}, ansatz expects {expected}")]
    ParameterLength { got: usize, expected: usize },

    #[error("objective returned a non-finite value {value} at iteration {iteration}")]
    NonFiniteObjective { value: f64, iteration: usize },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("{0} is undefined for this sector")]
    UndefinedGap(&'static str),

    #[error("need at least {needed} grid points, got {got}")]
    GridTooSmall { needed: usize, got: usize },
}
