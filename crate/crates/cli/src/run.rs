//! Per-U experiment pipelines. Each U point runs independently on the worker
//! pool; results are collected in U-grid order.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use wfield_core::model::{build_hubbard, hubbard_in_basis, HubbardSpec};
use wfield_core::optim::{minimize_objective, OptimizationResult};
use wfield_core::oracle::ExactSpectra;
use wfield_core::spectroscopy::{
    extract_eigenenergy, projection_rows, CornerMode, SpectrumRow, UccSectorEvaluator,
};
use wfield_core::ucc::{AnsatzShape, EnsembleObjective};
use wfield_core::weights::sector_ordering;
use wfield_core::{Pattern, WeightVector};

use crate::config::ExperimentConfig;

/// One output line. Numeric fields are empty on error rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub particles: usize,
    /// Tilde occupation pattern, or empty for a sector-wide error.
    pub pattern: String,
    pub method: String,
    pub energy: Option<f64>,
    pub oracle: Option<f64>,
    pub abs_error: Option<f64>,
    /// Position of the pattern in its sector, heaviest weight first.
    pub rank: Option<usize>,
    /// Exact level the row is compared with.
    pub level: Option<usize>,
    pub degenerate: bool,
    pub error: Option<String>,
}

impl ResultRow {
    fn failed(particles: usize, pattern: String, method: &str, err: impl ToString) -> Self {
        Self {
            particles,
            pattern,
            method: method.to_string(),
            energy: None,
            oracle: None,
            abs_error: None,
            rank: None,
            level: None,
            degenerate: false,
            error: Some(err.to_string()),
        }
    }

    fn value(particles: usize, pattern: String, method: &str, energy: f64, oracle: f64) -> Self {
        Self {
            particles,
            pattern,
            method: method.to_string(),
            energy: Some(energy),
            oracle: Some(oracle),
            abs_error: Some((energy - oracle).abs()),
            rank: None,
            level: None,
            degenerate: false,
            error: None,
        }
    }

    fn from_spectrum(row: &SpectrumRow) -> Self {
        Self {
            particles: row.particles,
            pattern: row.pattern.to_string(),
            method: row.method.as_str().to_string(),
            energy: Some(row.energy),
            oracle: Some(row.oracle),
            abs_error: Some(row.abs_error),
            rank: Some(row.rank),
            level: Some(row.level),
            degenerate: row.degenerate,
            error: None,
        }
    }
}

/// Everything computed at one U.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub u: f64,
    /// Optimized ensemble energy.
    pub energy: f64,
    pub exact_energy: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub theta: Vec<f64>,
    pub wallclock_ms: Option<f64>,
    pub rows: Vec<ResultRow>,
}

impl PointResult {
    pub fn max_abs_error(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.abs_error).fold(0.0, f64::max)
    }

    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub points: Vec<PointResult>,
}

impl Report {
    /// True when some point did not converge or carries an error row.
    pub fn flagged(&self) -> bool {
        self.points.iter().any(|p| !p.converged || p.has_errors())
    }
}

/// Shared inputs of one U point.
pub struct Instance {
    pub weights: WeightVector,
    pub spectra: ExactSpectra,
    pub objective: EnsembleObjective,
}

impl Instance {
    pub fn new(cfg: &ExperimentConfig, u: f64, trotter_steps: usize) -> anyhow::Result<Self> {
        let e = &cfg.experiment;
        let weights = cfg.weights()?;
        let spec = HubbardSpec::new(e.sites, u);
        // the oracle works in the real site basis; the spectrum is basis invariant
        let spectra = ExactSpectra::compute(&build_hubbard(spec)?, e.sites)?;
        let h = hubbard_in_basis(spec, e.basis.into())?;
        let shape = AnsatzShape::uccsd(e.sites, trotter_steps);
        let objective = EnsembleObjective::new(&weights, &h, &shape)?;
        Ok(Self {
            weights,
            spectra,
            objective,
        })
    }

    pub fn optimize(&self, cfg: &ExperimentConfig) -> anyhow::Result<OptimizationResult> {
        let x0 = vec![0.0; self.objective.shape().n_params()];
        Ok(minimize_objective(&self.objective, &x0, &cfg.optimizer_config())?)
    }

    pub fn exact_energy(&self) -> anyhow::Result<f64> {
        Ok(self.spectra.ensemble_energy(&self.weights)?)
    }
}

fn elapsed_ms(start: Instant, cfg: &ExperimentConfig) -> Option<f64> {
    cfg.output
        .timings
        .then(|| start.elapsed().as_secs_f64() * 1e3)
}

fn point_header(
    cfg: &ExperimentConfig,
    u: f64,
    inst: &Instance,
    opt: &OptimizationResult,
    rows: Vec<ResultRow>,
    start: Instant,
) -> anyhow::Result<PointResult> {
    Ok(PointResult {
        u,
        energy: opt.energy,
        exact_energy: inst.exact_energy()?,
        converged: opt.converged,
        iterations: opt.iterations,
        evaluations: opt.evaluations,
        theta: opt.theta_star.clone(),
        wallclock_ms: elapsed_ms(start, cfg),
        rows,
    })
}

/// Optimizes at `u` and extracts every pattern of the configured sectors by
/// tilde projection.
pub fn spectrum_point(cfg: &ExperimentConfig, u: f64) -> anyhow::Result<PointResult> {
    let start = Instant::now();
    let inst = Instance::new(cfg, u, cfg.experiment.trotter_steps)?;
    let opt = inst.optimize(cfg)?;
    if !opt.converged {
        log::warn!("U = {u}: optimizer stopped after {} iterations", opt.iterations);
    }
    let psi = inst.objective.state(&opt.theta_star)?;
    let mut rows = Vec::new();
    for &n in &cfg.experiment.sectors {
        match projection_rows(&psi, &inst.weights, inst.objective.hamiltonian(), &inst.spectra, n) {
            Ok(sector) => rows.extend(sector.iter().map(ResultRow::from_spectrum)),
            Err(err) => rows.push(ResultRow::failed(n, String::new(), "projection", err)),
        }
    }
    point_header(cfg, u, &inst, &opt, rows, start)
}

/// Ground pattern of sector `n` and its finite-difference energy.
fn ground_fd(
    eval: &UccSectorEvaluator,
    w: &WeightVector,
    wp: &WeightVector,
    n: usize,
) -> wfield_core::Result<(Pattern, f64)> {
    let ground = sector_ordering(w, n)?.pattern(0);
    Ok((ground, extract_eigenenergy(eval, w, wp, &ground.modes())?))
}

fn neutral_gap_rows(
    eval: &UccSectorEvaluator,
    inst: &Instance,
    wp: &WeightVector,
    n: usize,
) -> Vec<ResultRow> {
    const METHOD: &str = "fd-neutral-gap";
    let w = &inst.weights;
    let order = match sector_ordering(w, n) {
        Ok(o) => o,
        Err(err) => return vec![ResultRow::failed(n, String::new(), METHOD, err)],
    };
    let extracted: Vec<(Pattern, wfield_core::Result<f64>)> = order
        .patterns()
        .map(|p| (p, extract_eigenenergy(eval, w, wp, &p.modes())))
        .collect();
    if extracted.iter().any(|(_, r)| r.is_err()) {
        return extracted
            .into_iter()
            .map(|(p, r)| match r {
                Err(err) => ResultRow::failed(n, p.to_string(), METHOD, err),
                Ok(_) => ResultRow::failed(n, p.to_string(), METHOD, "another level of the sector failed"),
            })
            .collect();
    }
    let mut levels: Vec<(usize, Pattern, f64)> = extracted
        .into_iter()
        .enumerate()
        .map(|(rank, (p, r))| (rank, p, r.expect("checked above")))
        .collect();
    levels.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)));
    let exact = &inst.spectra.sector(n).values;
    let base = levels[0].2;
    levels
        .iter()
        .enumerate()
        .skip(1)
        .map(|(lvl, &(rank, p, e))| {
            let mut row = ResultRow::value(n, p.to_string(), METHOD, e - base, exact[lvl] - exact[0]);
            row.rank = Some(rank);
            row.level = Some(lvl);
            row
        })
        .collect()
}

fn fundamental_gap_rows(
    eval: &UccSectorEvaluator,
    inst: &Instance,
    wp: &WeightVector,
    n: usize,
) -> Vec<ResultRow> {
    let w = &inst.weights;
    let sites = w.sites();
    let exact = |k: usize| inst.spectra.sector(k).values[0];
    let ground = |k: usize| ground_fd(eval, w, wp, k).map(|(_, e)| e).map_err(|e| e.to_string());
    let label = sector_ordering(w, n)
        .map(|o| o.pattern(0).to_string())
        .unwrap_or_default();

    let here = ground(n);
    let plus = if n < sites {
        here.clone()
            .and_then(|e| ground(n + 1).map(|a| (e - a, exact(n) - exact(n + 1))))
    } else {
        Err(format!("g+ needs sector N + 1 = {} > L = {sites}", n + 1))
    };
    let minus = if n > 0 {
        here.and_then(|e| ground(n - 1).map(|b| (b - e, exact(n - 1) - exact(n))))
    } else {
        Err("g- needs sector N - 1 < 0".to_string())
    };
    let total = match (&plus, &minus) {
        (Ok(p), Ok(m)) => Ok((m.0 - p.0, m.1 - p.1)),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    [("fd-g-plus", plus), ("fd-g-minus", minus), ("fd-g", total)]
        .into_iter()
        .map(|(method, r)| match r {
            Ok((value, oracle)) => ResultRow::value(n, label.clone(), method, value, oracle),
            Err(err) => ResultRow::failed(n, label.clone(), method, err),
        })
        .collect()
}

/// Optimizes at `u`, then extracts neutral gaps and the fundamental gaps of
/// each configured sector through finite differences in the weights.
pub fn gaps_point(cfg: &ExperimentConfig, u: f64) -> anyhow::Result<PointResult> {
    let start = Instant::now();
    let inst = Instance::new(cfg, u, cfg.experiment.trotter_steps)?;
    let opt = inst.optimize(cfg)?;
    let wp = inst.weights.shifted(cfg.experiment.delta)?;
    let mode: CornerMode = cfg.experiment.corner_mode.into();
    let eval = UccSectorEvaluator::new(
        inst.objective.clone(),
        opt.theta_star.clone(),
        cfg.optimizer_config(),
        mode,
    );
    let mut rows = Vec::new();
    for &n in &cfg.experiment.sectors {
        rows.extend(neutral_gap_rows(&eval, &inst, &wp, n));
        rows.extend(fundamental_gap_rows(&eval, &inst, &wp, n));
    }
    let unconverged = eval.unconverged();
    if unconverged > 0 {
        log::warn!("U = {u}: {unconverged} corner optimizations hit the iteration cap");
    }
    let mut point = point_header(cfg, u, &inst, &opt, rows, start)?;
    point.converged &= unconverged == 0;
    Ok(point)
}

fn over_grid<F>(cfg: &ExperimentConfig, point: F) -> anyhow::Result<Report>
where
    F: Fn(&ExperimentConfig, f64) -> anyhow::Result<PointResult> + Sync,
{
    let points = cfg
        .experiment
        .u
        .par_iter()
        .map(|&u| point(cfg, u))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Report {
        config: cfg.clone(),
        points,
    })
}

pub fn run_spectrum(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    over_grid(cfg, spectrum_point)
}

pub fn run_gaps(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    over_grid(cfg, gaps_point)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(u: Vec<f64>, sectors: Vec<usize>) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment.sites = 3;
        cfg.experiment.u = u;
        cfg.experiment.sectors = sectors;
        cfg.optimizer.tolerance = 1e-10;
        cfg
    }

    #[test]
    fn empty_grid_gives_empty_report() {
        let report = run_spectrum(&small(vec![], vec![1])).unwrap();
        assert!(report.points.is_empty());
        assert!(!report.flagged());
    }

    #[test]
    fn free_chain_is_exact() {
        let report = run_spectrum(&small(vec![0.0], vec![1, 2])).unwrap();
        let p = &report.points[0];
        assert_eq!(p.rows.len(), 6);
        assert!(p.max_abs_error() < 1e-6, "{}", p.max_abs_error());
    }

    #[test]
    fn full_sector_gaps_have_error_rows() {
        let report = run_gaps(&small(vec![1.0], vec![3])).unwrap();
        let rows = &report.points[0].rows;
        let plus = rows.iter().find(|r| r.method == "fd-g-plus").unwrap();
        assert!(plus.error.is_some() && plus.energy.is_none());
        let minus = rows.iter().find(|r| r.method == "fd-g-minus").unwrap();
        assert!(minus.error.is_none());
        assert!(report.flagged());
    }

    #[test]
    fn free_gaps_match_exact_differences() {
        let report = run_gaps(&small(vec![0.0], vec![1, 2])).unwrap();
        let p = &report.points[0];
        assert!(!p.has_errors());
        assert!(p.max_abs_error() < 1e-6, "{}", p.max_abs_error());
    }
}
