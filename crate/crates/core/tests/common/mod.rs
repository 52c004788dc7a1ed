//! Dense-matrix reference helpers shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wfield_core::fock::apply_terms;
use wfield_core::{FockIndex, FockSpace, OperatorTerms, StateVector, WeightVector};

pub type Matrix = Vec<Vec<Complex64>>;

/// Matrix of `op` on `space`, built column by column from basis states.
pub fn dense(op: &OperatorTerms, space: FockSpace) -> Matrix {
    let d = space.dim();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for col in 0..d {
        let image = apply_terms(op, &StateVector::basis(space, FockIndex(col))).unwrap();
        for (row, z) in image.amplitudes().iter().enumerate() {
            m[row][col] = *z;
        }
    }
    m
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// `exp(t A)` by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Matrix, t: f64) -> Matrix {
    let n = a.len();
    let norm: f64 = a
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = t / 2f64.powi(squarings as i32);
    let scaled: Matrix = a
        .iter()
        .map(|row| row.iter().map(|z| z * scale).collect())
        .collect();
    let mut result = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut term = result.clone();
    for i in 0..n {
        result[i][i] = Complex64::new(1.0, 0.0);
        term[i][i] = Complex64::new(1.0, 0.0);
    }
    for k in 1..30 {
        term = matmul(&term, &scaled);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn apply(m: &Matrix, s: &StateVector) -> StateVector {
    let amps = m
        .iter()
        .map(|row| row.iter().zip(s.amplitudes()).map(|(a, b)| a * b).sum())
        .collect();
    StateVector::from_amplitudes(s.space(), amps).unwrap()
}

pub fn random_state(space: FockSpace, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..space.dim())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(space, amps).unwrap().normalized().unwrap()
}

pub fn random_weights(sites: usize, rng: &mut ChaCha8Rng) -> WeightVector {
    WeightVector::new((0..sites).map(|_| rng.gen_range(0.02..0.5)).collect()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
