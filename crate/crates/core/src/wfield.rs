//! The free w-field and its generator.
//!
//! The free w-field pairs every physical mode with its tilde partner,
//!
//! ```text
//! |0⁰(w)⟩ = Π_m ( sqrt(1 − w_m) + sqrt(w_m) c†_m c̃†_m ) |vac⟩,
//! ```
//!
//! and equals `exp(G)|vac⟩` with `G = Σ_m θ_m K_m`,
//! `K_m = c†_m c̃†_m − c̃_m c_m`, `cos θ_m = sqrt(1 − w_m)`. Each `K_m`
//! satisfies `K³ = −K`, so `exp(θK) = 1 + sin θ K + (1 − cos θ) K²` exactly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, FockIndex, FockSpace, Ladder, OperatorTerms, StateVector};
use crate::weights::WeightVector;

/// Applies `exp(θ K)` for an anti-Hermitian `K` with `K³ = −K`.
pub fn apply_closed_rotation(
    generator: &OperatorTerms,
    theta: f64,
    state: &StateVector,
) -> Result<StateVector> {
    if theta == 0.0 {
        return Ok(state.clone());
    }
    let k1 = fock::apply_terms(generator, state)?;
    let k2 = fock::apply_terms(generator, &k1)?;
    let mut out = state.clone();
    out.add_scaled(theta.sin(), &k1)?;
    out.add_scaled(1.0 - theta.cos(), &k2)?;
    Ok(out)
}

/// `c†_m c̃†_m`, creating the pair `(m, m̃)`.
fn pair_creation(space: FockSpace, m: usize) -> OperatorTerms {
    let mut op = OperatorTerms::new();
    op.push(
        1.0,
        vec![Ladder::create(m), Ladder::create(space.tilde_mode(m))],
    );
    op
}

/// Per-mode angles of the pair generator `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct GFactors {
    angles: Vec<f64>,
}

impl GFactors {
    /// `θ_m ∈ [0, π/2)` with `cos θ_m = sqrt(1 − w_m)`.
    pub fn from_weights(w: &WeightVector) -> Self {
        let angles = w.values().iter().map(|&x| x.sqrt().asin()).collect();
        Self { angles }
    }

    pub fn from_angles(angles: Vec<f64>) -> Self {
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// The inverse rotation `exp(−G)`.
    pub fn negated(&self) -> Self {
        Self {
            angles: self.angles.iter().map(|a| -a).collect(),
        }
    }

    /// Anti-Hermitian pair operator `K_m = c†_m c̃†_m − c̃_m c_m`.
    pub fn generator(space: FockSpace, m: usize) -> OperatorTerms {
        let create = pair_creation(space, m);
        let annihilate = create.adjoint().scaled(-1.0);
        create.plus(&annihilate)
    }

    /// Applies `Π_m exp(θ_m K_m)`; the factors commute.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let space = state.space();
        if space.register() != fock::Register::Doubled || space.sites() != self.angles.len() {
            return Err(Error::DimensionMismatch {
                left: space.sites(),
                right: self.angles.len(),
            });
        }
        let mut out = state.clone();
        for (m, &theta) in self.angles.iter().enumerate() {
            out = apply_closed_rotation(&Self::generator(space, m), theta, &out)?;
        }
        Ok(out)
    }
}

/// `exp(G(w))` applied to `state`.
pub fn apply_g(w: &WeightVector, state: &StateVector) -> Result<StateVector> {
    GFactors::from_weights(w).apply(state)
}

/// The free w-field by its explicit product form.
pub fn build_free_wfield(w: &WeightVector) -> StateVector {
    let space = FockSpace::doubled(w.sites());
    let mut state = StateVector::vacuum(space);
    for (m, &wm) in w.values().iter().enumerate() {
        let paired = fock::apply_terms(&pair_creation(space, m), &state)
            .expect("pair operator modes are in range");
        state.scale((1.0 - wm).sqrt());
        state
            .add_scaled(wm.sqrt(), &paired)
            .expect("same space");
    }
    state
}

/// Default number of φ quadrature points, `2L + 1`.
pub fn default_quadrature(sites: usize) -> usize {
    2 * sites + 1
}

/// Extracts the `N`-particle component by discretizing
/// `(1/2π) ∫ dφ e^{−iNφ} |0_φ⟩`, where `|0_φ⟩` carries a phase `e^{iφ}` per
/// physical particle.
///
/// `Q` uniform points are exact once `Q ≥ L + 1`; fewer alias particle numbers.
pub fn sector_projection_fourier(
    state: &StateVector,
    particles: usize,
    quadrature: usize,
) -> Result<StateVector> {
    let sites = state.space().sites();
    if quadrature < sites + 1 {
        return Err(Error::Aliasing {
            quadrature,
            minimum: sites + 1,
        });
    }
    if particles > sites {
        return Ok(StateVector::zeros(state.space()));
    }
    let mut out = StateVector::zeros(state.space());
    let norm = 1.0 / quadrature as f64;
    for q in 0..quadrature {
        let phi = 2.0 * PI * q as f64 / quadrature as f64;
        for (idx, (o, a)) in out
            .amplitudes_mut()
            .iter_mut()
            .zip(state.amplitudes())
            .enumerate()
        {
            let count = FockIndex(idx).physical_occupation(sites) as f64;
            let phase = Complex64::from_polar(norm, phi * (count - particles as f64));
            *o += phase * a;
        }
    }
    Ok(out)
}

/// Reduced density matrix of the physical register, tracing out tilde modes.
pub fn reduced_physical_density(state: &StateVector) -> Vec<Vec<Complex64>> {
    let sites = state.space().sites();
    let block = 1usize << sites;
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); block]; block];
    for chunk in state.amplitudes().chunks(block) {
        for (p, a) in chunk.iter().enumerate() {
            for (q, b) in chunk.iter().enumerate() {
                rho[p][q] += a * b.conj();
            }
        }
    }
    rho
}
