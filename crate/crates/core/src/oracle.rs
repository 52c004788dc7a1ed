//! Exact reference values: dense per-sector diagonalization, exact ensemble
//! energies and the derivative route for free Hamiltonians.
//!
//! Everything here is built from the operator terms directly and never goes
//! through the ansatz, so it can arbitrate the variational results.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{apply_terms, FockIndex, FockSpace, OperatorTerms, StateVector};
use crate::linalg::symmetric_eigen;
use crate::weights::{sector_ordering, Pattern, SectorOrdering, WeightVector};

/// Largest sector dimension diagonalized densely.
pub const MAX_SECTOR_DIM: usize = 1000;

/// Central-difference step of the derivative extraction.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Physical patterns with `n` particles, ascending bitmask order.
pub fn sector_basis(sites: usize, n: usize) -> Vec<usize> {
    (0..1usize << sites)
        .filter(|b| b.count_ones() as usize == n)
        .collect()
}

/// Full spectrum of one particle-number sector.
#[derive(Clone, Debug)]
pub struct SectorSpectrum {
    pub sites: usize,
    pub particles: usize,
    /// Sector basis, as physical bitmasks.
    pub basis: Vec<usize>,
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `vectors[i]` expands eigenvalue `i` over `basis`.
    pub vectors: Vec<Vec<f64>>,
}

impl SectorSpectrum {
    /// Eigenvector `i` as a physical-register state.
    pub fn eigenstate(&self, i: usize) -> StateVector {
        let space = FockSpace::physical(self.sites);
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        for (&b, &x) in self.basis.iter().zip(&self.vectors[i]) {
            amps[b] = Complex64::new(x, 0.0);
        }
        StateVector::from_amplitudes(space, amps).expect("dimension matches")
    }

    /// Pairs the `r`-th heaviest pattern with the `r`-th lowest eigenvalue:
    /// `Σ_r μ^{n_r} E_r`.
    pub fn weighted_sum(&self, w: &WeightVector, order: &SectorOrdering) -> f64 {
        order
            .patterns()
            .zip(&self.values)
            .map(|(p, e)| w.odds_of_bits(p.bits()) * e)
            .sum()
    }

    /// True when eigenvalue `i` lies within `tol` of a neighbour.
    pub fn is_degenerate(&self, i: usize, tol: f64) -> bool {
        let e = self.values[i];
        (i > 0 && (e - self.values[i - 1]).abs() < tol)
            || (i + 1 < self.values.len() && (self.values[i + 1] - e).abs() < tol)
    }
}

/// Diagonalizes `H` restricted to the `n`-particle physical sector.
pub fn exact_sector_spectrum(h: &OperatorTerms, sites: usize, n: usize) -> Result<SectorSpectrum> {
    if n > sites {
        return Err(Error::ParticleNumberOutOfRange { n, sites });
    }
    let space = FockSpace::physical(sites);
    h.check_modes(sites)
        .map_err(|_| Error::NotPhysical {
            mode: h.max_mode().unwrap_or(0),
        })?;
    let basis = sector_basis(sites, n);
    if basis.len() > MAX_SECTOR_DIM {
        return Err(Error::SectorTooLarge {
            dim: basis.len(),
            limit: MAX_SECTOR_DIM,
        });
    }
    let dim = basis.len();
    let mut matrix = vec![vec![0.0; dim]; dim];
    for (col, &b) in basis.iter().enumerate() {
        let image = apply_terms(h, &StateVector::basis(space, FockIndex(b)))?;
        for (row, &r) in basis.iter().enumerate() {
            let z = image.amplitudes()[r];
            if z.im.abs() > 1e-12 {
                return Err(Error::NonRealMatrix { imag: z.im });
            }
            matrix[row][col] = z.re;
        }
    }
    for i in 0..dim {
        for j in 0..i {
            let avg = 0.5 * (matrix[i][j] + matrix[j][i]);
            matrix[i][j] = avg;
            matrix[j][i] = avg;
        }
    }
    let eig = symmetric_eigen(&matrix);
    Ok(SectorSpectrum {
        sites,
        particles: n,
        basis,
        values: eig.values,
        vectors: eig.vectors,
    })
}

/// Spectra of all `L + 1` sectors.
#[derive(Clone, Debug)]
pub struct ExactSpectra {
    sites: usize,
    sectors: Vec<SectorSpectrum>,
}

impl ExactSpectra {
    pub fn compute(h: &OperatorTerms, sites: usize) -> Result<Self> {
        let sectors = (0..=sites)
            .into_par_iter()
            .map(|n| exact_sector_spectrum(h, sites, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sites, sectors })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn sector(&self, n: usize) -> &SectorSpectrum {
        &self.sectors[n]
    }

    /// Sector energy `E_N(w) = Σ μ^n E_{j(n)}` with the minimizing pairing at `w`.
    pub fn sector_energy(&self, w: &WeightVector, n: usize) -> Result<f64> {
        let order = sector_ordering(w, n)?;
        Ok(self.sectors[n].weighted_sum(w, &order))
    }

    /// Sector energy at `w` with the pairing frozen by `reference`.
    ///
    /// This is exactly multilinear in the odds ratios of `w`.
    pub fn sector_energy_frozen(&self, w: &WeightVector, reference: &SectorOrdering) -> f64 {
        self.sectors[reference.particles()].weighted_sum(w, reference)
    }

    /// Exact minimal ensemble energy `Σ_N D(w) E_N(w)`.
    pub fn ensemble_energy(&self, w: &WeightVector) -> Result<f64> {
        let d = w.dfactor();
        (0..=self.sites)
            .map(|n| self.sector_energy(w, n).map(|e| d * e))
            .sum()
    }

    /// Eigenvalue the pattern is paired with at weights `w`.
    pub fn paired_energy(&self, w: &WeightVector, pattern: &Pattern) -> Result<f64> {
        let n = pattern.count();
        let order = sector_ordering(w, n)?;
        let rank = order.rank_of(pattern).expect("pattern belongs to its sector");
        Ok(self.sectors[n].values[rank])
    }
}

/// Minimal ensemble energy over particle-number-conserving unitaries.
pub fn exact_ensemble_energy(w: &WeightVector, h: &OperatorTerms) -> Result<f64> {
    ExactSpectra::compute(h, w.sites())?.ensemble_energy(w)
}

/// Energy of a free-fermion eigenstate from weight derivatives.
///
/// `E(w) = Σ_n w_n E_n` with `E_n = Σ_m Ω_m n_m` is affine in each single
/// weight; summing the central differences over the occupied modes returns
/// `E_n`. The empty pattern maps to zero.
pub fn derivative_extraction_noninteracting(
    omegas: &[f64],
    w: &WeightVector,
    pattern: &Pattern,
) -> Result<f64> {
    let sites = w.sites();
    if omegas.len() != sites || pattern.sites() != sites {
        return Err(Error::PatternLength {
            got: omegas.len().min(pattern.sites()),
            expected: sites,
        });
    }
    let ensemble = |w: &WeightVector| -> f64 {
        (0..1usize << sites)
            .map(|b| {
                let e: f64 = (0..sites)
                    .filter(|m| b >> m & 1 == 1)
                    .map(|m| omegas[m])
                    .sum();
                w.weight_of_bits(b) * e
            })
            .sum()
    };
    let mut total = 0.0;
    for m in pattern.modes() {
        let up = w.with_weight(m, w.get(m) + DERIVATIVE_STEP)?;
        let down = w.with_weight(m, w.get(m) - DERIVATIVE_STEP)?;
        total += (ensemble(&up) - ensemble(&down)) / (2.0 * DERIVATIVE_STEP);
    }
    Ok(total)
}
