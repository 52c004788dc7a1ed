//! Occupation-number basis over `2L` fermionic modes.
//!
//! Modes `0..L` are physical, modes `L..2L` are their tilde copies. A basis
//! state is a bitstring (bit `b` set means mode `b` is occupied) and ladder
//! operators carry the Jordan–Wigner parity of all lower-indexed modes, so
//! physical and tilde operators anticommute without any extra bookkeeping.
//!
//! The same machinery covers a physical-only register (`L` modes), which is
//! what extracted eigenstates live on.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Upper bound on the number of modes a [`FockSpace`] may hold.
pub const MAX_MODES: usize = 20;

/// Which modes a state vector carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Register {
    /// `L` physical modes.
    Physical,
    /// `L` physical modes followed by `L` tilde modes.
    Doubled,
}

/// Shape of a Fock space: the number of lattice sites and the register kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    sites: usize,
    register: Register,
}

impl FockSpace {
    /// Doubled space of `2 * sites` modes.
    pub fn doubled(sites: usize) -> Self {
        Self::new(sites, Register::Doubled)
    }

    /// Physical register of `sites` modes.
    pub fn physical(sites: usize) -> Self {
        Self::new(sites, Register::Physical)
    }

    fn new(sites: usize, register: Register) -> Self {
        let space = Self { sites, register };
        assert!(
            sites >= 1 && space.n_modes() <= MAX_MODES,
            "unsupported Fock space: {sites} sites, {:?}",
            register
        );
        space
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn n_modes(&self) -> usize {
        match self.register {
            Register::Physical => self.sites,
            Register::Doubled => 2 * self.sites,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes()
    }

    /// Bit mask selecting the physical modes.
    pub fn physical_mask(&self) -> usize {
        (1 << self.sites) - 1
    }

    /// Mode index of the tilde partner of physical mode `m`.
    pub fn tilde_mode(&self, m: usize) -> usize {
        debug_assert_eq!(self.register, Register::Doubled);
        self.sites + m
    }
}

/// Label of an occupation bitstring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockIndex(pub usize);

impl FockIndex {
    pub fn value(self) -> usize {
        self.0
    }

    pub fn is_occupied(self, mode: usize) -> bool {
        self.0 >> mode & 1 == 1
    }

    /// Number of occupied physical modes.
    pub fn physical_occupation(self, sites: usize) -> usize {
        (self.0 & ((1 << sites) - 1)).count_ones() as usize
    }

    /// Number of occupied tilde modes.
    pub fn tilde_occupation(self, sites: usize) -> usize {
        (self.0 >> sites).count_ones() as usize
    }

    /// Bits of the physical register.
    pub fn physical_bits(self, sites: usize) -> usize {
        self.0 & ((1 << sites) - 1)
    }

    /// Bits of the tilde register, shifted down to `0..L`.
    pub fn tilde_bits(self, sites: usize) -> usize {
        self.0 >> sites
    }
}

/// A single creation (`dagger`) or annihilation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { mode, dagger: false }
    }

    pub fn adjoint(self) -> Self {
        Self {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }

    /// Acts on basis state `idx`; `None` when the result vanishes.
    #[inline]
    pub fn act(self, idx: usize) -> Option<(usize, f64)> {
        let bit = 1usize << self.mode;
        let occupied = idx & bit != 0;
        if occupied == self.dagger {
            return None;
        }
        let parity = (idx & (bit - 1)).count_ones() & 1;
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        Some((idx ^ bit, sign))
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dagger {
            write!(f, "c+{}", self.mode)
        } else {
            write!(f, "c{}", self.mode)
        }
    }
}

/// Coefficient times an ordered product of ladder operators.
///
/// Factors are stored left to right as written; the rightmost factor acts
/// first.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub factors: Vec<Ladder>,
}

impl Term {
    pub fn new(coeff: impl Into<Complex64>, factors: Vec<Ladder>) -> Self {
        Self {
            coeff: coeff.into(),
            factors,
        }
    }

    /// Image of basis state `idx` with its fermionic sign, coefficient excluded.
    #[inline]
    pub fn act(&self, idx: usize) -> Option<(usize, f64)> {
        let mut idx = idx;
        let mut sign = 1.0;
        for op in self.factors.iter().rev() {
            let (next, s) = op.act(idx)?;
            idx = next;
            sign *= s;
        }
        Some((idx, sign))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            factors: self.factors.iter().rev().map(|op| op.adjoint()).collect(),
        }
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.factors.iter().map(|op| op.mode).max()
    }
}

/// A sum of second-quantized terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorTerms {
    terms: Vec<Term>,
}

impl OperatorTerms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    /// The identity operator, a single empty product.
    pub fn identity() -> Self {
        Self::from_terms(vec![Term::new(1.0, Vec::new())])
    }

    pub fn push(&mut self, coeff: impl Into<Complex64>, factors: Vec<Ladder>) {
        self.terms.push(Term::new(coeff, factors));
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(Term::adjoint).collect())
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms.iter().filter_map(Term::max_mode).max()
    }

    /// Fails if any factor addresses a mode outside `0..n_modes`.
    pub fn check_modes(&self, n_modes: usize) -> Result<()> {
        match self.max_mode() {
            Some(mode) if mode >= n_modes => Err(Error::ModeOutOfRange { mode, n_modes }),
            _ => Ok(()),
        }
    }

    /// Sum of two operators.
    pub fn plus(mut self, other: &OperatorTerms) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scaled(mut self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        for t in &mut self.terms {
            t.coeff *= factor;
        }
        self
    }
}

/// Complex amplitudes over every basis state of a [`FockSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(space: FockSpace) -> Self {
        Self {
            space,
            amps: vec![Complex64::new(0.0, 0.0); space.dim()],
        }
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::basis(space, FockIndex(0))
    }

    pub fn basis(space: FockSpace, idx: FockIndex) -> Self {
        let mut s = Self::zeros(space);
        s.amps[idx.0] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_amplitudes(space: FockSpace, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: space.dim(),
            });
        }
        Ok(Self { space, amps })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, idx: FockIndex) -> Complex64 {
        self.amps[idx.0]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, factor: impl Into<Complex64>) {
        let factor = factor.into();
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: impl Into<Complex64>, other: &StateVector) -> Result<()> {
        self.check_same(other)?;
        let factor = factor.into();
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Unit-norm copy, or `None` for a (numerically) zero vector.
    pub fn normalized(&self) -> Option<StateVector> {
        let n = self.norm();
        if n < 1e-300 {
            return None;
        }
        let mut s = self.clone();
        s.scale(1.0 / n);
        Some(s)
    }

    /// Largest amplitude difference to `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Applies a single creation or annihilation operator.
pub fn apply_mode_operator(state: &StateVector, mode: usize, dagger: bool) -> Result<StateVector> {
    let n_modes = state.space.n_modes();
    if mode >= n_modes {
        return Err(Error::ModeOutOfRange { mode, n_modes });
    }
    let op = Ladder { mode, dagger };
    let mut out = StateVector::zeros(state.space);
    for (idx, a) in state.amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        if let Some((next, sign)) = op.act(idx) {
            out.amps[next] += a * sign;
        }
    }
    Ok(out)
}

/// Applies a sum of terms; each term's rightmost factor acts first.
pub fn apply_terms(op: &OperatorTerms, state: &StateVector) -> Result<StateVector> {
    op.check_modes(state.space.n_modes())?;
    let mut out = StateVector::zeros(state.space);
    for term in &op.terms {
        for (idx, a) in state.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            if let Some((next, sign)) = term.act(idx) {
                out.amps[next] += term.coeff * a * sign;
            }
        }
    }
    Ok(out)
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.check_same(b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `⟨state|op|state⟩`.
pub fn expectation(op: &OperatorTerms, state: &StateVector) -> Result<Complex64> {
    inner(state, &apply_terms(op, state)?)
}

/// Keeps only the components with exactly `n` physical particles.
pub fn project_physical_number(state: &StateVector, n: usize) -> Result<StateVector> {
    let sites = state.space.sites();
    if n > sites {
        return Err(Error::ParticleNumberOutOfRange { n, sites });
    }
    let mut out = state.clone();
    for (idx, a) in out.amps.iter_mut().enumerate() {
        if FockIndex(idx).physical_occupation(sites) != n {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

/// Sparse matrix of an operator that acts on physical modes only.
///
/// Since tilde modes sit above every physical mode, such an operator is
/// `A ⊗ 1` on the doubled space: its Jordan–Wigner signs never see the tilde
/// register. The compiled form stores `A` on the `2^L` physical register and
/// applies it block by block, one block per tilde configuration.
#[derive(Clone, Debug)]
pub struct PhysicalOperator {
    sites: usize,
    /// `columns[p]` lists `(row, value)` with `A[row, p] = value`.
    columns: Vec<Vec<(usize, Complex64)>>,
}

impl PhysicalOperator {
    pub fn compile(op: &OperatorTerms, sites: usize) -> Result<Self> {
        if let Some(mode) = op.max_mode() {
            if mode >= sites {
                return Err(Error::NotPhysical { mode });
            }
        }
        let dim = 1usize << sites;
        let mut columns = Vec::with_capacity(dim);
        for p in 0..dim {
            let mut col: BTreeMap<usize, Complex64> = BTreeMap::new();
            for term in op.terms() {
                if let Some((row, sign)) = term.act(p) {
                    *col.entry(row).or_default() += term.coeff * sign;
                }
            }
            columns.push(col.into_iter().filter(|(_, v)| v.norm() > 0.0).collect());
        }
        Ok(Self { sites, columns })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Matrix element `⟨row|A|col⟩` on the physical register.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| *v)
            .unwrap_or_default()
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        if state.space().sites() != self.sites {
            return Err(Error::DimensionMismatch {
                left: state.space().sites(),
                right: self.sites,
            });
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check(state)?;
        let block = 1usize << self.sites;
        let mut out = StateVector::zeros(state.space());
        for (chunk_in, chunk_out) in state
            .amplitudes()
            .chunks(block)
            .zip(out.amps.chunks_mut(block))
        {
            for (p, a) in chunk_in.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for &(row, v) in &self.columns[p] {
                    chunk_out[row] += v * a;
                }
            }
        }
        Ok(out)
    }

    /// `⟨state|A|state⟩` without allocating the image.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        self.check(state)?;
        let block = 1usize << self.sites;
        let mut acc = Complex64::new(0.0, 0.0);
        for chunk in state.amplitudes().chunks(block) {
            for (p, a) in chunk.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for &(row, v) in &self.columns[p] {
                    acc += chunk[row].conj() * v * a;
                }
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dense(op: &OperatorTerms, space: FockSpace) -> Vec<Vec<Complex64>> {
        let dim = space.dim();
        let mut m = vec![vec![c(0.0); dim]; dim];
        for col in 0..dim {
            let out = apply_terms(op, &StateVector::basis(space, FockIndex(col))).unwrap();
            for row in 0..dim {
                m[row][col] = out.amplitudes()[row];
            }
        }
        m
    }

    #[test]
    fn creation_on_vacuum() {
        let space = FockSpace::doubled(2);
        let s = apply_mode_operator(&StateVector::vacuum(space), 0, true).unwrap();
        assert_eq!(s.amplitude(FockIndex(1)), c(1.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn creation_order_flips_sign() {
        let space = FockSpace::doubled(2);
        let vac = StateVector::vacuum(space);
        let a = apply_mode_operator(&apply_mode_operator(&vac, 0, true).unwrap(), 1, true).unwrap();
        let b = apply_mode_operator(&apply_mode_operator(&vac, 1, true).unwrap(), 0, true).unwrap();
        assert_eq!(a.amplitude(FockIndex(3)), -b.amplitude(FockIndex(3)));
        assert_eq!(a.amplitude(FockIndex(3)).norm(), 1.0);
    }

    #[test]
    fn annihilating_empty_mode_vanishes() {
        let space = FockSpace::doubled(2);
        let s = apply_mode_operator(&StateVector::vacuum(space), 0, false).unwrap();
        assert_eq!(s.norm(), 0.0);
    }

    #[test]
    fn mode_out_of_range() {
        let space = FockSpace::doubled(2);
        let err = apply_mode_operator(&StateVector::vacuum(space), 4, true).unwrap_err();
        assert_eq!(err, Error::ModeOutOfRange { mode: 4, n_modes: 4 });
        let mut op = OperatorTerms::new();
        op.push(1.0, vec![Ladder::create(7)]);
        assert!(apply_terms(&op, &StateVector::vacuum(space)).is_err());
    }

    #[test]
    fn identity_and_number_operator() {
        let space = FockSpace::doubled(2);
        let s = StateVector::basis(space, FockIndex(0b0101));
        assert_eq!(apply_terms(&OperatorTerms::identity(), &s).unwrap(), s);
        let mut num = OperatorTerms::new();
        num.push(1.0, vec![Ladder::create(0), Ladder::annihilate(0)]);
        assert_eq!(apply_terms(&num, &s).unwrap(), s);
    }

    #[test]
    fn inner_of_basis_vectors() {
        let space = FockSpace::physical(3);
        for i in 0..8 {
            for j in 0..8 {
                let v = inner(
                    &StateVector::basis(space, FockIndex(i)),
                    &StateVector::basis(space, FockIndex(j)),
                )
                .unwrap();
                assert_eq!(v, c(if i == j { 1.0 } else { 0.0 }));
            }
        }
        let err = inner(
            &StateVector::vacuum(space),
            &StateVector::vacuum(FockSpace::physical(2)),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn anticommutation_exhaustive() {
        for sites in 1..=3 {
            let space = FockSpace::doubled(sites);
            let n = space.n_modes();
            for idx in 0..space.dim() {
                for p in 0..n {
                    for q in 0..n {
                        for (dp, dq) in [(false, false), (true, true), (true, false)] {
                            let a = Ladder { mode: p, dagger: dp };
                            let b = Ladder { mode: q, dagger: dq };
                            let ab = Term::new(1.0, vec![a, b]).act(idx);
                            let ba = Term::new(1.0, vec![b, a]).act(idx);
                            let same = p == q;
                            if same && dp != dq {
                                // {c_p, c+_p} = 1: exactly one ordering survives, with sign +1
                                let total: f64 = [ab, ba]
                                    .iter()
                                    .flatten()
                                    .map(|(j, s)| {
                                        assert_eq!(*j, idx);
                                        *s
                                    })
                                    .sum();
                                assert_eq!(total, 1.0);
                            } else {
                                match (ab, ba) {
                                    (None, None) => {}
                                    (Some((i, s)), Some((j, t))) => {
                                        assert_eq!(i, j);
                                        assert_eq!(s, -t);
                                    }
                                    _ => panic!("asymmetric vanishing p={p} q={q} idx={idx}"),
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn adjoint_terms_give_conjugate_transpose() {
        let space = FockSpace::doubled(2);
        let mut op = OperatorTerms::new();
        op.push(
            Complex64::new(0.3, -1.2),
            vec![Ladder::create(0), Ladder::annihilate(3)],
        );
        op.push(
            Complex64::new(-0.7, 0.4),
            vec![
                Ladder::create(1),
                Ladder::create(2),
                Ladder::annihilate(0),
                Ladder::annihilate(3),
            ],
        );
        op.push(0.5, vec![Ladder::create(2)]);
        let m = dense(&op, space);
        let madj = dense(&op.adjoint(), space);
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                assert!((m[i][j] - madj[j][i].conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn physical_operator_matches_generic_route() {
        let sites = 3;
        let space = FockSpace::doubled(sites);
        let mut op = OperatorTerms::new();
        op.push(-1.0, vec![Ladder::create(0), Ladder::annihilate(2)]);
        op.push(-1.0, vec![Ladder::create(2), Ladder::annihilate(0)]);
        op.push(
            0.8,
            vec![
                Ladder::create(1),
                Ladder::annihilate(1),
                Ladder::create(2),
                Ladder::annihilate(2),
            ],
        );
        let compiled = PhysicalOperator::compile(&op, sites).unwrap();
        let amps: Vec<Complex64> = (0..space.dim())
            .map(|i| Complex64::new(((i * 7919) % 13) as f64 - 6.0, ((i * 31) % 5) as f64 - 2.0))
            .collect();
        let s = StateVector::from_amplitudes(space, amps).unwrap();
        let generic = apply_terms(&op, &s).unwrap();
        let fast = compiled.apply(&s).unwrap();
        assert!(generic.max_abs_diff(&fast) < 1e-12);
        let e1 = inner(&s, &generic).unwrap();
        let e2 = compiled.expectation(&s).unwrap();
        assert!((e1 - e2).norm() < 1e-10);

        let mut tilde = OperatorTerms::new();
        tilde.push(1.0, vec![Ladder::create(sites)]);
        assert_eq!(
            PhysicalOperator::compile(&tilde, sites).unwrap_err(),
            Error::NotPhysical { mode: sites }
        );
    }

    #[test]
    fn projection_idempotent_and_complete() {
        let sites = 2;
        let space = FockSpace::doubled(sites);
        let amps: Vec<Complex64> = (0..space.dim()).map(|i| c(i as f64 + 1.0)).collect();
        let s = StateVector::from_amplitudes(space, amps).unwrap();
        let mut total = StateVector::zeros(space);
        for n in 0..=sites {
            let p = project_physical_number(&s, n).unwrap();
            assert_eq!(project_physical_number(&p, n).unwrap(), p);
            total.add_scaled(1.0, &p).unwrap();
        }
        assert_eq!(total, s);
        let basis = StateVector::basis(space, FockIndex(0b1001));
        assert_eq!(project_physical_number(&basis, 1).unwrap(), basis);
        assert!(project_physical_number(&s, 3).is_err());
    }
}
