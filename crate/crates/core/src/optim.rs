//! Deterministic Nelder–Mead simplex minimization.
//!
//! Termination is on the spread of objective values across the simplex. After
//! convergence the search restarts from a fresh simplex around the best point,
//! with seeded random step signs, as long as a restart keeps improving the
//! best value by more than the tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ucc::{AnsatzShape, EnsembleObjective};
use crate::weights::WeightVector;
use crate::fock::OperatorTerms;

/// Simplex move coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexCoefficients {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl SimplexCoefficients {
    /// `(1, 2, 1/2, 1/2)`.
    pub const STANDARD: Self = Self {
        reflection: 1.0,
        expansion: 2.0,
        contraction: 0.5,
        shrink: 0.5,
    };

    /// Dimension-dependent coefficients of Gao and Han.
    pub fn adaptive(dim: usize) -> Self {
        let n = dim.max(2) as f64;
        Self {
            reflection: 1.0,
            expansion: 1.0 + 2.0 / n,
            contraction: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Simplex is converged once `f_max − f_min` drops below this.
    pub tolerance: f64,
    /// Cap on simplex iterations, summed over restarts.
    pub max_iterations: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    pub seed: u64,
    pub restarts: usize,
    /// Use dimension-dependent coefficients instead of `(1, 2, 1/2, 1/2)`.
    pub adaptive: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-5,
            max_iterations: 200_000,
            initial_step: 0.1,
            seed: 0,
            restarts: 2,
            adaptive: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::InvalidConfig("initial_step must be positive".into()));
        }
        Ok(())
    }

    fn coefficients(&self, dim: usize) -> SimplexCoefficients {
        if self.adaptive {
            SimplexCoefficients::adaptive(dim)
        } else {
            SimplexCoefficients::STANDARD
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub theta_star: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// `(iteration, best value)` recorded whenever the best value improves.
    pub history: Vec<(usize, f64)>,
}

struct Counter<'a, F> {
    f: &'a mut F,
    evaluations: usize,
    iteration: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Counter<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let value = (self.f)(x)?;
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective {
                value,
                iteration: self.iteration,
            });
        }
        Ok(value)
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// One simplex descent from `start`; returns whether it met the tolerance.
fn descend<F: FnMut(&[f64]) -> Result<f64>>(
    counter: &mut Counter<'_, F>,
    simplex: &mut [(Vec<f64>, f64)],
    coeffs: SimplexCoefficients,
    config: &OptimizerConfig,
    history: &mut Vec<(usize, f64)>,
) -> Result<bool> {
    let n = simplex.len() - 1;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        if history.last().is_none_or(|&(_, h)| best < h) {
            history.push((counter.iteration, best));
        }
        if simplex[n].1 - best < config.tolerance {
            return Ok(true);
        }
        if counter.iteration >= config.max_iterations {
            return Ok(false);
        }
        counter.iteration += 1;

        let dim = simplex[0].0.len();
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_second = simplex[n - 1].1;

        let xr = affine(&centroid, &worst, -coeffs.reflection);
        let fr = counter.eval(&xr)?;
        if fr < best {
            let xe = affine(&centroid, &worst, -coeffs.reflection * coeffs.expansion);
            let fe = counter.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < f_worst {
            let xc = affine(&centroid, &xr, coeffs.contraction);
            let fc = counter.eval(&xc)?;
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = affine(&centroid, &worst, coeffs.contraction);
            let fc = counter.eval(&xc)?;
            let ok = fc < f_worst;
            (xc, fc, ok)
        };
        if accept {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = affine(&anchor, &vertex.0, coeffs.shrink);
            let fx = counter.eval(&x)?;
            *vertex = (x, fx);
        }
    }
}

fn initial_simplex<F: FnMut(&[f64]) -> Result<f64>>(
    counter: &mut Counter<'_, F>,
    x0: &[f64],
    f0: f64,
    steps: &[f64],
) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut simplex = vec![(x0.to_vec(), f0)];
    for (i, &step) in steps.iter().enumerate() {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = counter.eval(&x)?;
        simplex.push((x, fx));
    }
    Ok(simplex)
}

/// Minimizes `objective` starting from `x0`.
pub fn nelder_mead<F>(mut objective: F, x0: &[f64], config: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    config.validate()?;
    let mut counter = Counter {
        f: &mut objective,
        evaluations: 0,
        iteration: 0,
    };
    let f0 = counter.eval(x0)?;
    let mut history = vec![(0, f0)];
    if x0.is_empty() {
        return Ok(OptimizationResult {
            theta_star: Vec::new(),
            energy: f0,
            iterations: 0,
            evaluations: counter.evaluations,
            converged: true,
            history,
        });
    }
    let coeffs = config.coefficients(x0.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let steps = vec![config.initial_step; x0.len()];
    let mut simplex = initial_simplex(&mut counter, x0, f0, &steps)?;
    let mut converged = descend(&mut counter, &mut simplex, coeffs, config, &mut history)?;

    for _ in 0..config.restarts {
        if !converged || counter.iteration >= config.max_iterations {
            break;
        }
        let (best_x, best_f) = simplex[0].clone();
        let steps: Vec<f64> = (0..x0.len())
            .map(|_| {
                if rng.gen_bool(0.5) {
                    config.initial_step
                } else {
                    -config.initial_step
                }
            })
            .collect();
        simplex = initial_simplex(&mut counter, &best_x, best_f, &steps)?;
        converged = descend(&mut counter, &mut simplex, coeffs, config, &mut history)?;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if best_f - simplex[0].1 < config.tolerance {
            break;
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (theta_star, energy) = simplex.swap_remove(0);
    Ok(OptimizationResult {
        theta_star,
        energy,
        iterations: counter.iteration,
        evaluations: counter.evaluations,
        converged,
        history,
    })
}

/// Minimizes an ensemble objective starting from `x0` (warm start).
pub fn minimize_objective(
    objective: &EnsembleObjective,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    nelder_mead(|theta| objective.energy(theta), x0, config)
}

/// Minimizes the ensemble energy over the ansatz angles, starting from `θ = 0`.
pub fn minimize_ensemble(
    w: &WeightVector,
    h: &OperatorTerms,
    shape: &AnsatzShape,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let objective = EnsembleObjective::new(w, h, shape)?;
    minimize_objective(&objective, &vec![0.0; shape.n_params()], config)
}
