//! Eigenstates and eigenenergies recovered from an optimized w-field.
//!
//! Two routes are provided. Projection reads the physical state paired with a
//! tilde pattern directly off the doubled state. Finite differences combine
//! sector ensemble energies at the `2^N` weight vectors obtained by switching
//! each occupied mode between `w` and `w'`, which is exact whenever the sector
//! energy is multilinear in the odds ratios `μ`.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    expectation, project_physical_number, FockSpace, OperatorTerms, PhysicalOperator, Register, StateVector,
};
use crate::optim::{nelder_mead, OptimizerConfig};
use crate::oracle::ExactSpectra;
use crate::ucc::{EnsembleObjective, IMAGINARY_TOLERANCE};
use crate::weights::{sector_ordering, Pattern, SectorOrdering, WeightVector};

/// Projection norms below this mark a pattern the state does not resolve.
pub const MIN_PROJECTION_NORM: f64 = 1e-10;

/// Eigenvalues closer than this to a neighbour are flagged as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

/// Physical state paired with tilde occupation `pattern`, normalized.
pub fn extract_eigenstate(psi: &StateVector, pattern: &Pattern) -> Result<StateVector> {
    let space = psi.space();
    let sites = space.sites();
    if space.register() != Register::Doubled {
        return Err(Error::InvalidConfig("eigenstate extraction needs a doubled register".into()));
    }
    if pattern.sites() != sites {
        return Err(Error::PatternLength {
            got: pattern.sites(),
            expected: sites,
        });
    }
    let offset = pattern.bits() << sites;
    let block = &psi.amplitudes()[offset..offset + (1 << sites)];
    let phys = StateVector::from_amplitudes(FockSpace::physical(sites), block.to_vec())?;
    let norm = phys.norm();
    if norm < MIN_PROJECTION_NORM {
        return Err(Error::EmptyProjection {
            pattern: *pattern,
            norm,
        });
    }
    let mut phys = phys;
    phys.scale(1.0 / norm);
    Ok(phys)
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOLERANCE * z.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue { imag: z.im });
    }
    Ok(z.re)
}

/// Rayleigh quotient `⟨φ|H|φ⟩` of a unit-norm state.
pub fn state_energy(h: &OperatorTerms, phi: &StateVector) -> Result<f64> {
    let norm = phi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    real_part(expectation(h, phi)?)
}

/// Unnormalized sector energy `⟨P_N ψ|H|P_N ψ⟩ / D(w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorEnergy {
    pub particles: usize,
    pub value: f64,
    pub weights: WeightVector,
}

pub fn sector_ensemble_energy(
    psi: &StateVector,
    w: &WeightVector,
    n: usize,
    h: &OperatorTerms,
) -> Result<SectorEnergy> {
    let proj = project_physical_number(psi, n)?;
    let value = real_part(expectation(h, &proj)?)? / w.dfactor();
    Ok(SectorEnergy {
        particles: n,
        value,
        weights: w.clone(),
    })
}

/// Source of sector ensemble energies at arbitrary weights.
pub trait SectorEvaluator: Sync {
    fn sector_energy(&self, w: &WeightVector, n: usize) -> Result<SectorEnergy>;
}

/// Exact sector energies from the dense spectrum.
///
/// The pairing of patterns with eigenvalues is frozen at reference weights,
/// so the sector energy is exactly multilinear in `μ` around them.
pub struct ExactSectorEvaluator {
    spectra: ExactSpectra,
    orderings: Vec<SectorOrdering>,
}

impl ExactSectorEvaluator {
    pub fn new(spectra: ExactSpectra, reference: &WeightVector) -> Result<Self> {
        let orderings = (0..=spectra.sites())
            .map(|n| sector_ordering(reference, n))
            .collect::<Result<_>>()?;
        Ok(Self { spectra, orderings })
    }

    pub fn spectra(&self) -> &ExactSpectra {
        &self.spectra
    }
}

impl SectorEvaluator for ExactSectorEvaluator {
    fn sector_energy(&self, w: &WeightVector, n: usize) -> Result<SectorEnergy> {
        let order = self
            .orderings
            .get(n)
            .ok_or(Error::ParticleNumberOutOfRange { n, sites: w.sites() })?;
        Ok(SectorEnergy {
            particles: n,
            value: self.spectra.sector_energy_frozen(w, order),
            weights: w.clone(),
        })
    }
}

/// How the ansatz angles are chosen at a perturbed weight vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerMode {
    /// Minimize again, warm-started from the base optimum.
    Reoptimize,
    /// Keep the base optimum. Sector energies are then exactly multilinear
    /// in `μ` and the finite differences reproduce the projection energies.
    FixedTheta,
}

/// Outcome of one evaluation of the variational sector energies.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerEvaluation {
    pub energies: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Sector energies of the UCC w-field, optimized at each requested weight
/// vector. Results are cached per weight vector, so the corners shared by
/// different patterns are optimized once.
pub struct UccSectorEvaluator {
    base: EnsembleObjective,
    theta: Vec<f64>,
    config: OptimizerConfig,
    mode: CornerMode,
    cache: Mutex<HashMap<Vec<u64>, CornerEvaluation>>,
}

impl UccSectorEvaluator {
    /// `theta` is the optimum at the weights of `base`.
    pub fn new(base: EnsembleObjective, theta: Vec<f64>, config: OptimizerConfig, mode: CornerMode) -> Self {
        Self {
            base,
            theta,
            config,
            mode,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn mode(&self) -> CornerMode {
        self.mode
    }

    /// Evaluates (or recalls) all sector energies at `w`.
    pub fn evaluate(&self, w: &WeightVector) -> Result<CornerEvaluation> {
        let key: Vec<u64> = w.values().iter().map(|x| x.to_bits()).collect();
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let objective = self.base.reweighted(w);
        let (theta, iterations, converged) = match self.mode {
            CornerMode::FixedTheta => (self.theta.clone(), 0, true),
            CornerMode::Reoptimize => {
                let r = nelder_mead(|t| objective.energy(t), &self.theta, &self.config)?;
                (r.theta_star, r.iterations, r.converged)
            }
        };
        let eval = CornerEvaluation {
            energies: objective.sector_energies(&theta)?,
            iterations,
            converged,
        };
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, eval.clone());
        Ok(eval)
    }

    /// Number of cached corner evaluations that hit the iteration cap.
    pub fn unconverged(&self) -> usize {
        self.cache
            .lock()
            .expect("cache lock")
            .values()
            .filter(|e| !e.converged)
            .count()
    }
}

impl SectorEvaluator for UccSectorEvaluator {
    fn sector_energy(&self, w: &WeightVector, n: usize) -> Result<SectorEnergy> {
        let eval = self.evaluate(w)?;
        let value = *eval
            .energies
            .get(n)
            .ok_or(Error::ParticleNumberOutOfRange { n, sites: w.sites() })?;
        Ok(SectorEnergy {
            particles: n,
            value,
            weights: w.clone(),
        })
    }
}

/// Eigenenergy of the state paired with the pattern occupying `occupied`,
/// from nested finite differences of the sector energy.
///
/// Refuses when `w'` orders the sector patterns differently from `w`.
pub fn extract_eigenenergy<E: SectorEvaluator + ?Sized>(
    evaluator: &E,
    w: &WeightVector,
    wprime: &WeightVector,
    occupied: &[usize],
) -> Result<f64> {
    let sites = w.sites();
    if wprime.sites() != sites {
        return Err(Error::DimensionMismatch {
            left: sites,
            right: wprime.sites(),
        });
    }
    let pattern = Pattern::from_modes(occupied, sites)?;
    if pattern.count() != occupied.len() {
        return Err(Error::InvalidConfig(format!("repeated mode in {occupied:?}")));
    }
    let n = occupied.len();
    let mut denominator = 1.0;
    for &m in occupied {
        let diff = w.mu_of(m) - wprime.mu_of(m);
        if diff == 0.0 {
            return Err(Error::DegenerateDifference { mode: m });
        }
        denominator *= diff;
    }

    let reference = sector_ordering(w, n)?;
    let corners: Vec<WeightVector> = (0..1usize << n)
        .map(|mask| {
            let mut c = w.clone();
            for (bit, &m) in occupied.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    c = c.with_weight(m, wprime.get(m))?;
                }
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    check_ordering(&reference, wprime)?;

    let values = corners
        .par_iter()
        .map(|c| evaluator.sector_energy(c, n).map(|e| e.value))
        .collect::<Result<Vec<f64>>>()?;
    let numerator: f64 = values
        .iter()
        .enumerate()
        .map(|(mask, v)| if mask.count_ones() % 2 == 0 { *v } else { -v })
        .sum();
    Ok(numerator / denominator)
}

/// Floating-point error bound of the nested difference over `modes`, for
/// corner values of magnitude up to `scale`.
///
/// The `2^k` corner terms cancel down to one eigenvalue times `Π Δμ`, so
/// the rounding error of the sum is amplified by `1 / Π |Δμ|`.
pub fn difference_roundoff(w: &WeightVector, wprime: &WeightVector, modes: &[usize], scale: f64) -> f64 {
    let denom: f64 = modes.iter().map(|&m| (w.mu_of(m) - wprime.mu_of(m)).abs()).product();
    64.0 * f64::EPSILON * (1usize << modes.len()) as f64 * scale / denom
}

fn check_ordering(reference: &SectorOrdering, w: &WeightVector) -> Result<()> {
    let other = sector_ordering(w, reference.particles())?;
    if other.patterns().ne(reference.patterns()) {
        return Err(Error::OrderingMismatch {
            sector: reference.particles(),
        });
    }
    Ok(())
}

/// Finite-difference energies of every pattern of sector `n`, by rank.
pub fn extract_sector<E: SectorEvaluator + ?Sized>(
    evaluator: &E,
    w: &WeightVector,
    wprime: &WeightVector,
    n: usize,
) -> Result<Vec<(Pattern, f64)>> {
    sector_ordering(w, n)?
        .patterns()
        .map(|p| extract_eigenenergy(evaluator, w, wprime, &p.modes()).map(|e| (p, e)))
        .collect()
}

/// Electron affinity, ionization energy and fundamental gap around `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaps {
    /// `E_0(N) − E_0(N+1)`.
    pub g_plus: f64,
    /// `E_0(N−1) − E_0(N)`.
    pub g_minus: f64,
    /// `g_minus − g_plus`.
    pub g: f64,
}

/// Ground-state energy of sector `n`: the heaviest pattern of the sector.
fn ground_energy<E: SectorEvaluator + ?Sized>(
    evaluator: &E,
    w: &WeightVector,
    wprime: &WeightVector,
    n: usize,
) -> Result<f64> {
    let ground = sector_ordering(w, n)?.pattern(0);
    extract_eigenenergy(evaluator, w, wprime, &ground.modes())
}

pub fn gaps<E: SectorEvaluator + ?Sized>(
    evaluator: &E,
    w: &WeightVector,
    wprime: &WeightVector,
    n: usize,
) -> Result<Gaps> {
    if n == 0 {
        return Err(Error::UndefinedGap("no sector below N = 0"));
    }
    if n >= w.sites() {
        return Err(Error::UndefinedGap("no sector above N = L"));
    }
    let below = ground_energy(evaluator, w, wprime, n - 1)?;
    let here = ground_energy(evaluator, w, wprime, n)?;
    let above = ground_energy(evaluator, w, wprime, n + 1)?;
    let g_plus = here - above;
    let g_minus = below - here;
    Ok(Gaps {
        g_plus,
        g_minus,
        g: g_minus - g_plus,
    })
}

/// Result of scanning one weight while the others stay fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearityScan {
    /// Largest residual of the affine fits.
    pub max_residual: f64,
    /// Grid index ranges over which every sector ordering stays constant.
    pub segments: Vec<Range<usize>>,
    pub energies: Vec<f64>,
}

fn affine_residual(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 3 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - (my + slope * (a - mx))).abs())
        .fold(0.0, f64::max)
}

/// Fits `E` against `w_mode` on `grid` and reports the worst affine residual.
///
/// The scan is split wherever a sector ordering changes, and each piece is
/// fitted separately.
pub fn linearity_scan<F>(energy: F, base: &WeightVector, mode: usize, grid: &[f64]) -> Result<LinearityScan>
where
    F: Fn(&WeightVector) -> Result<f64>,
{
    if grid.len() < 3 {
        return Err(Error::GridTooSmall {
            needed: 3,
            got: grid.len(),
        });
    }
    let sites = base.sites();
    let mut energies = Vec::with_capacity(grid.len());
    let mut orderings = Vec::with_capacity(grid.len());
    for &x in grid {
        let w = base.with_weight(mode, x)?;
        energies.push(energy(&w)?);
        let ords = (0..=sites)
            .map(|n| sector_ordering(&w, n).map(|o| o.patterns().collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        orderings.push(ords);
    }
    let mut segments = Vec::new();
    let mut start = 0;
    for i in 1..grid.len() {
        if orderings[i] != orderings[i - 1] {
            log::debug!("ordering changes between grid points {} and {}", i - 1, i);
            segments.push(start..i);
            start = i;
        }
    }
    segments.push(start..grid.len());
    let max_residual = segments
        .iter()
        .map(|r| affine_residual(&grid[r.clone()], &energies[r.clone()]))
        .fold(0.0, f64::max);
    Ok(LinearityScan {
        max_residual,
        segments,
        energies,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Projection,
    FiniteDifference,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Projection => "projection",
            Method::FiniteDifference => "finite-difference",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub particles: usize,
    pub pattern: Pattern,
    /// Position of the pattern in the sector, heaviest weight first.
    pub rank: usize,
    pub energy: f64,
    /// Index of the exact level this row is compared with, ascending.
    pub level: usize,
    pub oracle: f64,
    pub abs_error: f64,
    pub method: Method,
    /// The oracle level has a neighbour within [`DEGENERACY_TOLERANCE`].
    pub degenerate: bool,
}

impl SpectrumRow {
    /// The pattern sits on the level the exact minimizer would give it.
    pub fn rank_paired(&self) -> bool {
        self.rank == self.level
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    pub fn max_abs_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }
}

/// Matches the energies of one sector, given in rank order, to the exact
/// levels by sorting both lists.
///
/// Sorted matching minimizes the largest deviation between two sets of
/// levels. It does not assume the optimized state pairs patterns with
/// levels the way the exact minimizer does; [`SpectrumRow::rank_paired`]
/// records whether it does.
pub fn tabulate(
    spectra: &ExactSpectra,
    n: usize,
    energies: &[(Pattern, f64)],
    method: Method,
) -> Vec<SpectrumRow> {
    let sector = spectra.sector(n);
    let mut by_energy: Vec<usize> = (0..energies.len()).collect();
    by_energy.sort_by(|&a, &b| energies[a].1.total_cmp(&energies[b].1).then(a.cmp(&b)));
    let mut level = vec![0; energies.len()];
    for (lvl, &rank) in by_energy.iter().enumerate() {
        level[rank] = lvl;
    }
    energies
        .iter()
        .enumerate()
        .map(|(rank, &(pattern, energy))| {
            let oracle = sector.values[level[rank]];
            SpectrumRow {
                particles: n,
                pattern,
                rank,
                energy,
                level: level[rank],
                oracle,
                abs_error: (energy - oracle).abs(),
                method,
                degenerate: sector.is_degenerate(level[rank], DEGENERACY_TOLERANCE),
            }
        })
        .collect()
}

/// Projection-route energies of every pattern in sector `n`, by rank.
pub fn projection_energies(
    psi: &StateVector,
    w: &WeightVector,
    h: &PhysicalOperator,
    n: usize,
) -> Result<Vec<(Pattern, f64)>> {
    sector_ordering(w, n)?
        .patterns()
        .map(|p| {
            let phi = extract_eigenstate(psi, &p)?;
            Ok((p, real_part(h.expectation(&phi)?)?))
        })
        .collect()
}

pub fn projection_rows(
    psi: &StateVector,
    w: &WeightVector,
    h: &PhysicalOperator,
    spectra: &ExactSpectra,
    n: usize,
) -> Result<Vec<SpectrumRow>> {
    let energies = projection_energies(psi, w, h, n)?;
    Ok(tabulate(spectra, n, &energies, Method::Projection))
}

pub fn finite_difference_rows<E: SectorEvaluator + ?Sized>(
    evaluator: &E,
    w: &WeightVector,
    wprime: &WeightVector,
    spectra: &ExactSpectra,
    n: usize,
) -> Result<Vec<SpectrumRow>> {
    let energies = extract_sector(evaluator, w, wprime, n)?;
    Ok(tabulate(spectra, n, &energies, Method::FiniteDifference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hubbard, build_noninteracting, HubbardSpec};
    use crate::ucc::AnsatzShape;
    use crate::wfield::build_free_wfield;

    #[test]
    fn free_projection_returns_basis_state() {
        let w = WeightVector::decreasing(4);
        let psi = build_free_wfield(&w);
        for bits in 0..16 {
            let p = Pattern::from_bits(bits, 4);
            let phi = extract_eigenstate(&psi, &p).unwrap();
            assert!((phi.amplitudes()[bits].norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_projection_is_an_error() {
        let psi = StateVector::vacuum(FockSpace::doubled(3));
        let p = Pattern::from_occupations(&[1, 0, 0]);
        assert!(matches!(
            extract_eigenstate(&psi, &p),
            Err(Error::EmptyProjection { .. })
        ));
    }

    #[test]
    fn state_energy_checks_and_means() {
        let h = build_hubbard(HubbardSpec::new(4, 2.0)).unwrap();
        let spectra = ExactSpectra::compute(&h, 4).unwrap();
        let s = spectra.sector(2);
        let a = s.eigenstate(0);
        assert!((state_energy(&h, &a).unwrap() - s.values[0]).abs() < 1e-10);
        let mut mix = a.clone();
        mix.add_scaled(1.0, &s.eigenstate(3)).unwrap();
        mix.scale(std::f64::consts::FRAC_1_SQRT_2);
        let want = 0.5 * (s.values[0] + s.values[3]);
        assert!((state_energy(&h, &mix).unwrap() - want).abs() < 1e-10);
        let mut big = a;
        big.scale(2.0);
        assert!(matches!(state_energy(&h, &big), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn two_site_sector_energy() {
        let omegas = [0.8, -0.3];
        let w = WeightVector::new(vec![0.4, 0.25]).unwrap();
        let psi = build_free_wfield(&w);
        let h = build_noninteracting(&omegas);
        let e1 = sector_ensemble_energy(&psi, &w, 1, &h).unwrap();
        let want = w.mu_of(0) * omegas[0] + w.mu_of(1) * omegas[1];
        assert!((e1.value - want).abs() < 1e-12);
        assert_eq!(sector_ensemble_energy(&psi, &w, 0, &h).unwrap().value, 0.0);
    }

    #[test]
    fn single_particle_difference_recovers_level() {
        let omegas = [-1.0, 0.2, 0.9];
        let h = build_noninteracting(&omegas);
        let w = WeightVector::new(vec![0.45, 0.3, 0.15]).unwrap();
        let eval = ExactSectorEvaluator::new(ExactSpectra::compute(&h, 3).unwrap(), &w).unwrap();
        let wp = w.shifted(0.005).unwrap();
        for (m, om) in omegas.iter().enumerate() {
            let e = extract_eigenenergy(&eval, &w, &wp, &[m]).unwrap();
            assert!((e - om).abs() < 1e-10, "{m}: {e}");
        }
    }

    #[test]
    fn ordering_violation_refused() {
        let h = build_noninteracting(&[0.0, 1.0]);
        let w = WeightVector::new(vec![0.3, 0.28]).unwrap();
        let eval = ExactSectorEvaluator::new(ExactSpectra::compute(&h, 2).unwrap(), &w).unwrap();
        let wp = WeightVector::new(vec![0.25, 0.28]).unwrap();
        assert!(matches!(
            extract_eigenenergy(&eval, &w, &wp, &[0]),
            Err(Error::OrderingMismatch { sector: 1 })
        ));
        assert!(matches!(
            extract_eigenenergy(&eval, &w, &w, &[1]),
            Err(Error::DegenerateDifference { mode: 1 })
        ));
    }

    #[test]
    fn gap_edges() {
        let h = build_hubbard(HubbardSpec::new(3, 1.0)).unwrap();
        let w = WeightVector::decreasing(3);
        let eval = ExactSectorEvaluator::new(ExactSpectra::compute(&h, 3).unwrap(), &w).unwrap();
        let wp = w.shifted(0.005).unwrap();
        assert!(matches!(gaps(&eval, &w, &wp, 3), Err(Error::UndefinedGap(_))));
        assert!(matches!(gaps(&eval, &w, &wp, 0), Err(Error::UndefinedGap(_))));
    }

    #[test]
    fn fixed_theta_differences_match_projection() {
        let h = build_hubbard(HubbardSpec::new(4, 1.0)).unwrap();
        let w = WeightVector::decreasing(4);
        let wp = w.shifted(0.005).unwrap();
        let shape = AnsatzShape::uccsd(4, 1);
        let obj = EnsembleObjective::new(&w, &h, &shape).unwrap();
        let theta: Vec<f64> = (0..shape.n_params()).map(|i| 0.1 * (i as f64 * 0.7).sin()).collect();
        let psi = obj.state(&theta).unwrap();
        let spectra = ExactSpectra::compute(&h, 4).unwrap();
        let proj = projection_rows(&psi, &w, obj.hamiltonian(), &spectra, 2).unwrap();
        let eval = UccSectorEvaluator::new(obj, theta, OptimizerConfig::default(), CornerMode::FixedTheta);
        let fd = finite_difference_rows(&eval, &w, &wp, &spectra, 2).unwrap();
        for (a, b) in proj.iter().zip(&fd) {
            assert_eq!(a.pattern, b.pattern);
            assert!((a.energy - b.energy).abs() < 1e-8, "{} {} {}", a.pattern, a.energy, b.energy);
        }
    }

    #[test]
    fn residual_of_affine_and_curved_data() {
        let x = [0.1, 0.2, 0.3, 0.4];
        assert!(affine_residual(&x, &[1.0, 1.5, 2.0, 2.5]) < 1e-15);
        assert!(affine_residual(&x, &[0.01, 0.04, 0.09, 0.16]) > 1e-3);
    }
}
