//! Factorized, Trotterized UCCSD acting on the physical register.
//!
//! Every factor is `exp(θ (A − A†))` for an excitation `A` that maps each
//! basis state to at most one basis state and satisfies `A² = 0`. The
//! generator then only rotates disjoint pairs `(p, A p)` of basis states, and
//! the closed form `1 + sin θ K + (1 − cos θ) K²` reduces to a Givens rotation
//! on each pair.
//!
//! Canonical layout: singles `(i, j)` with `i < j` in lexicographic order,
//! followed by doubles `(i, j, k, l)` over four distinct modes with `i < j`,
//! `k < l` and `(i, j) < (k, l)`. One Trotter step applies the factors to the
//! state in exactly that order; `n` steps repeat it `n` times with the same
//! angles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Ladder, OperatorTerms, PhysicalOperator, StateVector, Term};
use crate::weights::WeightVector;
use crate::wfield::build_free_wfield;

/// Largest imaginary residue tolerated in an energy.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// A particle-conserving excitation on physical modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Excitation {
    /// `c†_i c_j`.
    Single { i: usize, j: usize },
    /// `c†_i c†_j c_k c_l`.
    Double { i: usize, j: usize, k: usize, l: usize },
}

impl Excitation {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Excitation::Single { i, j } => vec![i, j],
            Excitation::Double { i, j, k, l } => vec![i, j, k, l],
        }
    }

    /// Rejects index combinations whose generator is not a pair rotation.
    pub fn validate(&self, sites: usize) -> Result<()> {
        let idx = self.indices();
        let bad = |reason| {
            Err(Error::InvalidExcitation {
                indices: idx.clone(),
                reason,
            })
        };
        if idx.iter().any(|&m| m >= sites) {
            return bad("index outside the physical register");
        }
        match *self {
            Excitation::Single { i, j } if i == j => bad("single excitation needs i != j"),
            Excitation::Double { i, j, k, l } => {
                if i == j || k == l {
                    bad("double excitation needs i != j and k != l")
                } else if (i.min(j), i.max(j)) == (k.min(l), k.max(l)) {
                    bad("creation and annihilation pairs coincide")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The excitation operator `A` as a single term.
    pub fn term(&self) -> Term {
        let factors = match *self {
            Excitation::Single { i, j } => vec![Ladder::create(i), Ladder::annihilate(j)],
            Excitation::Double { i, j, k, l } => vec![
                Ladder::create(i),
                Ladder::create(j),
                Ladder::annihilate(k),
                Ladder::annihilate(l),
            ],
        };
        Term::new(1.0, factors)
    }

    /// Anti-Hermitian generator `A − A†`.
    pub fn generator(&self) -> OperatorTerms {
        let a = self.term();
        let mut adj = a.adjoint();
        adj.coeff = -adj.coeff;
        OperatorTerms::from_terms(vec![a, adj])
    }

    /// Pairs `(p, q, s)` on the physical register with `A|p⟩ = s|q⟩`.
    fn rotation_pairs(&self, sites: usize) -> Vec<(u32, u32, f64)> {
        let a = self.term();
        (0..1usize << sites)
            .filter_map(|p| a.act(p).map(|(q, s)| (p as u32, q as u32, s)))
            .collect()
    }
}

/// Rotates the pairs of one excitation inside a block of `2^L` amplitudes.
#[inline]
fn rotate_block(block: &mut [Complex64], pairs: &[(u32, u32, f64)], cos: f64, sin: f64) {
    for &(p, q, s) in pairs {
        let (p, q) = (p as usize, q as usize);
        let a = block[p];
        let b = block[q];
        block[p] = a * cos - b * (s * sin);
        block[q] = b * cos + a * (s * sin);
    }
}

fn apply_excitation(exc: Excitation, theta: f64, state: &StateVector) -> Result<StateVector> {
    let sites = state.space().sites();
    exc.validate(sites)?;
    let pairs = exc.rotation_pairs(sites);
    let mut out = state.clone();
    let (sin, cos) = theta.sin_cos();
    for block in out.amplitudes_mut().chunks_mut(1 << sites) {
        rotate_block(block, &pairs, cos, sin);
    }
    Ok(out)
}

/// `exp(θ (c†_i c_j − c†_j c_i))` on the physical register; tilde modes are spectators.
pub fn apply_single_factor(theta: f64, i: usize, j: usize, state: &StateVector) -> Result<StateVector> {
    apply_excitation(Excitation::Single { i, j }, theta, state)
}

/// `exp(θ (c†_i c†_j c_k c_l − c†_l c†_k c_j c_i))` on the physical register.
pub fn apply_double_factor(
    theta: f64,
    (i, j, k, l): (usize, usize, usize, usize),
    state: &StateVector,
) -> Result<StateVector> {
    apply_excitation(Excitation::Double { i, j, k, l }, theta, state)
}

/// Excitation list and Trotter step count of a factorized UCCSD ansatz.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzShape {
    sites: usize,
    excitations: Vec<Excitation>,
    n_singles: usize,
    trotter_steps: usize,
}

impl AnsatzShape {
    /// Generalized singles and doubles over all `L` physical modes.
    ///
    /// Counts: `L(L−1)/2` singles and `3·C(L,4)` doubles (10 and 15 at
    /// `L = 5`, 28 and 210 at `L = 8`).
    pub fn uccsd(sites: usize, trotter_steps: usize) -> Self {
        let mut excitations = Vec::new();
        for i in 0..sites {
            for j in i + 1..sites {
                excitations.push(Excitation::Single { i, j });
            }
        }
        let n_singles = excitations.len();
        let pairs: Vec<(usize, usize)> = (0..sites)
            .flat_map(|i| (i + 1..sites).map(move |j| (i, j)))
            .collect();
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[a + 1..] {
                if k != i && k != j && l != i && l != j {
                    excitations.push(Excitation::Double { i, j, k, l });
                }
            }
        }
        Self {
            sites,
            excitations,
            n_singles,
            trotter_steps: trotter_steps.max(1),
        }
    }

    /// Arbitrary excitation list, applied in the given order.
    pub fn custom(sites: usize, excitations: Vec<Excitation>, trotter_steps: usize) -> Result<Self> {
        for e in &excitations {
            e.validate(sites)?;
        }
        let n_singles = excitations
            .iter()
            .filter(|e| matches!(e, Excitation::Single { .. }))
            .count();
        Ok(Self {
            sites,
            excitations,
            n_singles,
            trotter_steps: trotter_steps.max(1),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn trotter_steps(&self) -> usize {
        self.trotter_steps
    }

    pub fn with_trotter_steps(&self, steps: usize) -> Self {
        Self {
            trotter_steps: steps.max(1),
            ..self.clone()
        }
    }

    pub fn excitations(&self) -> &[Excitation] {
        &self.excitations
    }

    pub fn n_params(&self) -> usize {
        self.excitations.len()
    }

    pub fn n_singles(&self) -> usize {
        self.n_singles
    }

    pub fn n_doubles(&self) -> usize {
        self.excitations.len() - self.n_singles
    }

    pub fn zeros(&self) -> AnsatzParams {
        AnsatzParams {
            shape: self.clone(),
            theta: vec![0.0; self.n_params()],
        }
    }
}

/// Angles for every factor of an [`AnsatzShape`].
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzParams {
    shape: AnsatzShape,
    theta: Vec<f64>,
}

impl AnsatzParams {
    pub fn new(shape: AnsatzShape, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != shape.n_params() {
            return Err(Error::ParameterLength {
                got: theta.len(),
                expected: shape.n_params(),
            });
        }
        Ok(Self { shape, theta })
    }

    pub fn shape(&self) -> &AnsatzShape {
        &self.shape
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Angle of a given excitation, if the shape contains it.
    pub fn angle(&self, exc: &Excitation) -> Option<f64> {
        self.shape
            .excitations
            .iter()
            .position(|e| e == exc)
            .map(|i| self.theta[i])
    }
}

/// Ansatz with its rotation pairs precomputed, for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledAnsatz {
    shape: AnsatzShape,
    pairs: Vec<Vec<(u32, u32, f64)>>,
}

impl CompiledAnsatz {
    pub fn new(shape: &AnsatzShape) -> Self {
        let pairs = shape
            .excitations
            .iter()
            .map(|e| e.rotation_pairs(shape.sites))
            .collect();
        Self {
            shape: shape.clone(),
            pairs,
        }
    }

    pub fn shape(&self) -> &AnsatzShape {
        &self.shape
    }

    /// Applies `U(θ)` in place to a state on either register.
    pub fn apply_in_place(&self, theta: &[f64], state: &mut StateVector) -> Result<()> {
        if theta.len() != self.shape.n_params() {
            return Err(Error::ParameterLength {
                got: theta.len(),
                expected: self.shape.n_params(),
            });
        }
        if state.space().sites() != self.shape.sites {
            return Err(Error::DimensionMismatch {
                left: state.space().sites(),
                right: self.shape.sites,
            });
        }
        let trig: Vec<(f64, f64)> = theta.iter().map(|t| t.sin_cos()).collect();
        let block = 1usize << self.shape.sites;
        for chunk in state.amplitudes_mut().chunks_mut(block) {
            if chunk.iter().all(|a| a.norm_sqr() == 0.0) {
                continue;
            }
            for _ in 0..self.shape.trotter_steps {
                for (pairs, &(sin, cos)) in self.pairs.iter().zip(&trig) {
                    if sin != 0.0 {
                        rotate_block(chunk, pairs, cos, sin);
                    }
                }
            }
        }
        Ok(())
    }
}

/// `U(θ)|state⟩`.
pub fn apply_ansatz(params: &AnsatzParams, state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    CompiledAnsatz::new(&params.shape).apply_in_place(&params.theta, &mut out)?;
    Ok(out)
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOLERANCE * z.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue { imag: z.im });
    }
    Ok(z.re)
}

/// `⟨ψ|H|ψ⟩` with `|ψ⟩ = U(θ) exp(G(w)) |vac⟩`.
///
/// By `exp(−G) exp(G) = 1` this equals the vacuum expectation of the
/// conjugated Hamiltonian under the conjugated ansatz.
pub fn ensemble_energy(w: &WeightVector, params: &AnsatzParams, h: &OperatorTerms) -> Result<f64> {
    let psi = apply_ansatz(params, &build_free_wfield(w))?;
    real_part(crate::fock::expectation(h, &psi)?)
}

/// Energy functional with everything independent of `θ` precomputed.
#[derive(Clone, Debug)]
pub struct EnsembleObjective {
    weights: WeightVector,
    free: StateVector,
    ansatz: CompiledAnsatz,
    hamiltonian: PhysicalOperator,
}

impl EnsembleObjective {
    pub fn new(w: &WeightVector, h: &OperatorTerms, shape: &AnsatzShape) -> Result<Self> {
        if shape.sites() != w.sites() {
            return Err(Error::DimensionMismatch {
                left: shape.sites(),
                right: w.sites(),
            });
        }
        Ok(Self {
            weights: w.clone(),
            free: build_free_wfield(w),
            ansatz: CompiledAnsatz::new(shape),
            hamiltonian: PhysicalOperator::compile(h, w.sites())?,
        })
    }

    /// Same Hamiltonian and ansatz at different weights.
    pub fn reweighted(&self, w: &WeightVector) -> Self {
        Self {
            weights: w.clone(),
            free: build_free_wfield(w),
            ansatz: self.ansatz.clone(),
            hamiltonian: self.hamiltonian.clone(),
        }
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn shape(&self) -> &AnsatzShape {
        self.ansatz.shape()
    }

    pub fn hamiltonian(&self) -> &PhysicalOperator {
        &self.hamiltonian
    }

    /// The optimized doubled-space state `U(θ) exp(G) |vac⟩`.
    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        let mut psi = self.free.clone();
        self.ansatz.apply_in_place(theta, &mut psi)?;
        Ok(psi)
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        let psi = self.state(theta)?;
        real_part(self.hamiltonian.expectation(&psi)?)
    }

    /// Sector energies `E_N = ⟨P_N ψ|H|P_N ψ⟩ / D(w)` for every `N`.
    pub fn sector_energies(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let psi = self.state(theta)?;
        let sites = self.weights.sites();
        let d = self.weights.dfactor();
        (0..=sites)
            .map(|n| {
                let proj = crate::fock::project_physical_number(&psi, n)?;
                real_part(self.hamiltonian.expectation(&proj)?).map(|e| e / d)
            })
            .collect()
    }

    /// The doubled-space space of the objective.
    pub fn space(&self) -> FockSpace {
        self.free.space()
    }
}
