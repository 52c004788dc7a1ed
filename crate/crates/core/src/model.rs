//! Hamiltonians: the periodic spinless Hubbard chain, the free mode
//! Hamiltonian, and the closed-form Bloch-space solution of the five-site
//! chain at two particles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Ladder, OperatorTerms, Term};

/// Periodic chain `H = −Σ_m (c†_m c_{m+1} + c†_{m+1} c_m − U n_m n_{m+1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HubbardSpec {
    pub sites: usize,
    pub u: f64,
}

impl HubbardSpec {
    pub fn new(sites: usize, u: f64) -> Self {
        Self { sites, u }
    }
}

fn number_pair(a: usize, b: usize) -> Vec<Ladder> {
    vec![
        Ladder::create(a),
        Ladder::annihilate(a),
        Ladder::create(b),
        Ladder::annihilate(b),
    ]
}

/// Hubbard chain in the site basis; site `L` wraps to site `0`.
pub fn build_hubbard(spec: HubbardSpec) -> Result<OperatorTerms> {
    let l = spec.sites;
    if l < 2 {
        return Err(Error::UnsupportedSites {
            sites: l,
            reason: "the chain needs at least two sites",
        });
    }
    let mut op = OperatorTerms::new();
    for m in 0..l {
        let next = (m + 1) % l;
        op.push(-1.0, vec![Ladder::create(m), Ladder::annihilate(next)]);
        op.push(-1.0, vec![Ladder::create(next), Ladder::annihilate(m)]);
        if spec.u != 0.0 {
            op.push(spec.u, number_pair(m, next));
        }
    }
    Ok(op)
}

/// `h = Σ_m Ω_m c†_m c_m`.
pub fn build_noninteracting(omegas: &[f64]) -> OperatorTerms {
    let mut op = OperatorTerms::new();
    for (m, &omega) in omegas.iter().enumerate() {
        if omega != 0.0 {
            op.push(omega, vec![Ladder::create(m), Ladder::annihilate(m)]);
        }
    }
    op
}

/// `ε_k = −2 cos(2πk/L)` for `k = 0..L`.
pub fn bloch_energies(sites: usize) -> Vec<f64> {
    (0..sites)
        .map(|k| -2.0 * (2.0 * PI * k as f64 / sites as f64).cos())
        .collect()
}

/// Orbital basis in which the ansatz modes are expressed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OrbitalBasis {
    /// Lattice sites.
    Site,
    /// Real standing-wave combinations of Bloch waves, sorted by band energy.
    Bloch,
    /// Complex Bloch waves, sorted by band energy.
    #[default]
    Momentum,
}

/// Real orbitals diagonalizing the periodic hopping, ascending in energy.
///
/// Returns `(energies, orbitals)` with `orbitals[m][k]` the amplitude of
/// orbital `k` on site `m`. Degenerate `±k` pairs become cosine/sine waves.
pub fn real_bloch_orbitals(sites: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let l = sites as f64;
    let mut columns: Vec<(f64, Vec<f64>)> = Vec::with_capacity(sites);
    let wave = |k: usize, f: fn(f64) -> f64, norm: f64| -> Vec<f64> {
        (0..sites)
            .map(|m| norm * f(2.0 * PI * (k * m) as f64 / l))
            .collect()
    };
    columns.push((-2.0, vec![1.0 / l.sqrt(); sites]));
    for k in 1..sites.div_ceil(2) {
        let eps = -2.0 * (2.0 * PI * k as f64 / l).cos();
        let norm = (2.0 / l).sqrt();
        columns.push((eps, wave(k, f64::cos, norm)));
        columns.push((eps, wave(k, f64::sin, norm)));
    }
    if sites % 2 == 0 && sites >= 2 {
        let alt = (0..sites)
            .map(|m| if m % 2 == 0 { 1.0 } else { -1.0 } / l.sqrt())
            .collect();
        columns.push((2.0, alt));
    }
    // stable: cosine stays ahead of its sine partner
    columns.sort_by(|a, b| a.0.total_cmp(&b.0));
    let energies = columns.iter().map(|c| c.0).collect();
    let mut orbitals = vec![vec![0.0; sites]; sites];
    for (k, (_, col)) in columns.iter().enumerate() {
        for m in 0..sites {
            orbitals[m][k] = col[m];
        }
    }
    (energies, orbitals)
}

/// Bloch waves `c_m = Σ_k e^{−2πi km/L} a_k / √L`, ascending in energy.
///
/// Returns `(momenta, orbitals)` with `orbitals[m][j]` the amplitude of
/// orbital `j` (momentum index `momenta[j]`) on site `m`.
pub fn momentum_orbitals(sites: usize) -> (Vec<usize>, Vec<Vec<Complex64>>) {
    let eps = bloch_energies(sites);
    let mut momenta: Vec<usize> = (0..sites).collect();
    momenta.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]));
    let l = sites as f64;
    let orbitals = (0..sites)
        .map(|m| {
            momenta
                .iter()
                .map(|&k| Complex64::from_polar(1.0 / l.sqrt(), -2.0 * PI * (k * m) as f64 / l))
                .collect()
        })
        .collect();
    (momenta, orbitals)
}

fn to_complex(orbitals: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    orbitals
        .iter()
        .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect()
}

/// Rewrites an operator given on modes `m` in a rotated orbital basis,
/// substituting `c_m = Σ_k O[m][k] a_k` and `c†_m = Σ_k O[m][k]* a†_k`.
///
/// Identical factor strings are merged and coefficients below `1e-14`
/// dropped. Modes at or above `orbitals.len()` are left untouched.
pub fn rotate_orbitals(op: &OperatorTerms, orbitals: &[Vec<Complex64>]) -> OperatorTerms {
    let n = orbitals.len();
    let mut merged: BTreeMap<Vec<Ladder>, Complex64> = BTreeMap::new();
    for term in op.terms() {
        let mut partial: Vec<(Vec<Ladder>, Complex64)> = vec![(Vec::new(), term.coeff)];
        for f in &term.factors {
            let choices: Vec<(usize, Complex64)> = if f.mode < n {
                (0..n)
                    .map(|k| {
                        let o = orbitals[f.mode][k];
                        (k, if f.dagger { o.conj() } else { o })
                    })
                    .filter(|(_, c)| c.norm() > 1e-15)
                    .collect()
            } else {
                vec![(f.mode, Complex64::new(1.0, 0.0))]
            };
            partial = partial
                .into_iter()
                .flat_map(|(factors, coeff)| {
                    choices.iter().map(move |&(k, c)| {
                        let mut next = factors.clone();
                        next.push(Ladder {
                            mode: k,
                            dagger: f.dagger,
                        });
                        (next, coeff * c)
                    })
                })
                .collect();
        }
        for (factors, coeff) in partial {
            *merged.entry(factors).or_default() += coeff;
        }
    }
    OperatorTerms::from_terms(
        merged
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-14)
            .map(|(factors, coeff)| Term { coeff, factors })
            .collect(),
    )
}

/// Hubbard chain expressed in the chosen orbital basis.
pub fn hubbard_in_basis(spec: HubbardSpec, basis: OrbitalBasis) -> Result<OperatorTerms> {
    let site = build_hubbard(spec)?;
    Ok(match basis {
        OrbitalBasis::Site => site,
        OrbitalBasis::Bloch => rotate_orbitals(&site, &to_complex(&real_bloch_orbitals(spec.sites).1)),
        OrbitalBasis::Momentum => rotate_orbitals(&site, &momentum_orbitals(spec.sites).1),
    })
}

/// Closed-form constants of the five-site chain.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochConstants {
    pub eps: Vec<f64>,
    /// Inter-pair coupling, `2[cos(2π/5) − cos(4π/5)]/5`.
    pub r: f64,
    /// Diagonal shift, `2[2 + cos(2π/5) + 2cos(4π/5)]/5`.
    pub d: f64,
}

pub fn bloch_constants(sites: usize) -> Result<BlochConstants> {
    if sites != 5 {
        return Err(Error::UnsupportedSites {
            sites,
            reason: "closed-form Bloch constants exist for five sites only",
        });
    }
    let c1 = (2.0 * PI / 5.0).cos();
    let c2 = (4.0 * PI / 5.0).cos();
    Ok(BlochConstants {
        eps: bloch_energies(5),
        r: 2.0 * (c1 - c2) / 5.0,
        d: 2.0 * (2.0 + c1 + 2.0 * c2) / 5.0,
    })
}

/// Momentum-conserving pairs of two-particle Bloch states at `L = 5`;
/// each couples `|a,b⟩` with `|c,d⟩` in a 2×2 block.
pub const FIVE_SITE_PAIRINGS: [((usize, usize), (usize, usize)); 5] = [
    ((0, 1), (2, 4)),
    ((0, 2), (3, 4)),
    ((0, 3), (1, 2)),
    ((0, 4), (1, 3)),
    ((1, 4), (2, 3)),
];

/// Eigenvalues `(E−, E+)` of the 2×2 block
/// Diagonal element `⟨a,b|H|a,b⟩` of the five-site chain in the Bloch basis,
/// `ε_a + ε_b + (U/5)[4 + Σ_{c ∉ {a,b}} Re(f_ca + f_cb)]` with
/// `f_xy = e^{2πi(x−y)/5}`.
///
/// It reduces to `ε_ab + D U` when `a − b ≡ ±1 (mod 5)` and to
/// `ε_ab + (1 − D) U` when `a − b ≡ ±2`.
pub fn five_site_pair_diagonal(u: f64, a: usize, b: usize) -> f64 {
    let eps = bloch_energies(5);
    let f = |x: usize, y: usize| (2.0 * PI * (x as f64 - y as f64) / 5.0).cos();
    let sum: f64 = (0..5)
        .filter(|&c| c != a && c != b)
        .map(|c| f(c, a) + f(c, b))
        .sum();
    eps[a] + eps[b] + u / 5.0 * (4.0 + sum)
}

/// Eigenvalues `(E−, E+)` of the block `[[h_ab, ±RU], [±RU, h_cd]]`:
/// `E± = (τ ± sqrt(τ² − 4Δ)) / 2` with `τ = h_ab + h_cd` and
/// `Δ = h_ab h_cd − R²U²`.
pub fn analytic_block_eigs(u: f64, (a, b): (usize, usize), (c, d): (usize, usize)) -> (f64, f64) {
    let r = bloch_constants(5).expect("five sites").r;
    let h_ab = five_site_pair_diagonal(u, a, b);
    let h_cd = five_site_pair_diagonal(u, c, d);
    let tau = h_ab + h_cd;
    let delta = h_ab * h_cd - r * r * u * u;
    let disc = (tau * tau - 4.0 * delta).max(0.0).sqrt();
    ((tau - disc) / 2.0, (tau + disc) / 2.0)
}

/// All ten two-particle eigenvalues of the five-site chain, ascending.
pub fn analytic_five_site_pair_spectrum(u: f64) -> Vec<f64> {
    let mut out: Vec<f64> = FIVE_SITE_PAIRINGS
        .iter()
        .flat_map(|&(ab, cd)| {
            let (lo, hi) = analytic_block_eigs(u, ab, cd);
            [lo, hi]
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}
