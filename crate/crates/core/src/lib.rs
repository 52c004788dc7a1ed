//! Purified-ensemble ("w-field") variational method for excited states of
//! spinless-fermion lattice models.
//!
//! A weighted ensemble of eigenstates is encoded as a single pure state on a
//! doubled (physical + tilde) Fock space. A factorized unitary coupled-cluster
//! ansatz acting on the physical register is optimized over that state, after
//! which individual eigenstates are recovered by projecting onto tilde
//! occupation patterns and eigenenergies by finite differences in the weights.
//!
//! Module map:
//! - [`fock`]: occupation-number basis over `2L` modes, signed ladder operators.
//! - [`weights`]: single-mode weights, many-mode weights, collective orderings.
//! - [`wfield`]: free w-field construction, pair-rotation exponential, φ-projection.
//! - [`model`]: Hubbard chain, free Hamiltonian, Bloch-basis closed forms.
//! - [`ucc`]: factorized, Trotterized UCCSD ansatz and the ensemble energy.
//! - [`optim`]: Nelder–Mead simplex minimizer.
//! - [`spectroscopy`]: eigenstate projection, sector energies, finite-difference extraction, gaps.
//! - [`oracle`]: dense exact diagonalization and exact ensemble energies.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod oracle;
pub mod spectroscopy;
pub mod ucc;
pub mod weights;
pub mod wfield;

pub use error::{Error, Result};
pub use fock::{FockIndex, FockSpace, Ladder, OperatorTerms, PhysicalOperator, StateVector, Term};
pub use weights::{OrderingMap, Pattern, SectorOrdering, WeightVector};

pub use num_complex::Complex64;
