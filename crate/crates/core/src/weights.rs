//! Single-mode weights and the many-mode weights they induce.
//!
//! A pattern `n ∈ {0,1}^L` gets weight `Π_m w_m^{n_m} (1 − w_m)^{1 − n_m}`,
//! which factors as `D(w) · Π_m μ_m^{n_m}` with odds ratios
//! `μ_m = w_m / (1 − w_m)` and `D(w) = Π_m (1 − w_m)`. Ranking patterns by
//! decreasing weight yields the collective labels that decide which
//! eigenstate each pattern is paired with.

use std::fmt;

use crate::error::{Error, Result};

/// Two many-mode weights closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Occupation pattern over the `L` physical modes, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    bits: usize,
    sites: usize,
}

impl Pattern {
    pub fn from_bits(bits: usize, sites: usize) -> Self {
        debug_assert!(bits < 1 << sites);
        Self { bits, sites }
    }

    /// Pattern from a 0/1 slice, mode 0 first.
    pub fn from_occupations(occ: &[u8]) -> Self {
        let bits = occ
            .iter()
            .enumerate()
            .filter(|(_, &n)| n != 0)
            .fold(0, |acc, (m, _)| acc | 1 << m);
        Self {
            bits,
            sites: occ.len(),
        }
    }

    /// Pattern with exactly the listed modes occupied.
    pub fn from_modes(modes: &[usize], sites: usize) -> Result<Self> {
        let mut bits = 0;
        for &m in modes {
            if m >= sites {
                return Err(Error::ModeOutOfRange {
                    mode: m,
                    n_modes: sites,
                });
            }
            bits |= 1 << m;
        }
        Ok(Self { bits, sites })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.bits >> mode & 1 == 1
    }

    /// Occupied modes in increasing order.
    pub fn modes(&self) -> Vec<usize> {
        (0..self.sites).filter(|&m| self.is_occupied(m)).collect()
    }

    pub fn occupations(&self) -> Vec<u8> {
        (0..self.sites).map(|m| self.is_occupied(m) as u8).collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in 0..self.sites {
            write!(f, "{}", if self.is_occupied(m) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Single-mode weights `w_{s,m}`, one per physical mode.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    ws: Vec<f64>,
}

impl WeightVector {
    /// Accepts any `w ∈ (0, 1)`; weights above one half only log a warning
    /// (once per process).
    pub fn new(ws: Vec<f64>) -> Result<Self> {
        for (index, &value) in ws.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidWeight { index, value });
            }
            if value > 0.5 {
                static ONCE: std::sync::Once = std::sync::Once::new();
                ONCE.call_once(|| log::warn!("single-mode weight w[{index}] = {value} exceeds 1/2"));
                log::debug!("single-mode weight w[{index}] = {value} exceeds 1/2");
            }
        }
        Ok(Self { ws })
    }

    /// `w_m = 0.5 − 0.5 m / L`, decreasing from one half.
    pub fn decreasing(sites: usize) -> Self {
        let ws = (0..sites)
            .map(|m| 0.5 * (sites - m) as f64 / sites as f64)
            .collect();
        Self { ws }
    }

    pub fn sites(&self) -> usize {
        self.ws.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.ws
    }

    pub fn get(&self, mode: usize) -> f64 {
        self.ws[mode]
    }

    /// Copy with every weight shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new(self.ws.iter().map(|w| w + delta).collect())
    }

    /// Copy with mode `mode` set to `value`.
    pub fn with_weight(&self, mode: usize, value: f64) -> Result<Self> {
        if mode >= self.ws.len() {
            return Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.ws.len(),
            });
        }
        let mut ws = self.ws.clone();
        ws[mode] = value;
        Self::new(ws)
    }

    /// Odds ratios `μ_m = w_m / (1 − w_m)`.
    pub fn mu(&self) -> Vec<f64> {
        self.ws.iter().map(|w| w / (1.0 - w)).collect()
    }

    pub fn mu_of(&self, mode: usize) -> f64 {
        let w = self.ws[mode];
        w / (1.0 - w)
    }

    /// `D(w) = Π_m (1 − w_m)`.
    pub fn dfactor(&self) -> f64 {
        self.ws.iter().map(|w| 1.0 - w).product()
    }

    /// Product weight of the pattern with the given bitmask.
    pub fn weight_of_bits(&self, bits: usize) -> f64 {
        self.ws
            .iter()
            .enumerate()
            .map(|(m, &w)| if bits >> m & 1 == 1 { w } else { 1.0 - w })
            .product()
    }

    /// `Π_m μ_m^{n_m}`, the weight relative to `D(w)`.
    pub fn odds_of_bits(&self, bits: usize) -> f64 {
        self.ws
            .iter()
            .enumerate()
            .filter(|(m, _)| bits >> m & 1 == 1)
            .map(|(_, &w)| w / (1.0 - w))
            .product()
    }

    pub fn many_mode_weight(&self, pattern: &Pattern) -> Result<f64> {
        self.check_pattern(pattern)?;
        Ok(self.weight_of_bits(pattern.bits()))
    }

    fn check_pattern(&self, pattern: &Pattern) -> Result<()> {
        if pattern.sites() != self.sites() {
            return Err(Error::PatternLength {
                got: pattern.sites(),
                expected: self.sites(),
            });
        }
        Ok(())
    }
}

/// `D(w)` as a free function.
pub fn dfactor(w: &WeightVector) -> f64 {
    w.dfactor()
}

/// `w_n` for an explicit pattern.
pub fn many_mode_weight(w: &WeightVector, pattern: &Pattern) -> Result<f64> {
    w.many_mode_weight(pattern)
}

/// Sorts `patterns` by decreasing weight and rejects ties.
fn rank_patterns(w: &WeightVector, mut patterns: Vec<usize>) -> Result<Vec<usize>> {
    let sites = w.sites();
    let weight: Vec<f64> = (0..1usize << sites).map(|b| w.weight_of_bits(b)).collect();
    patterns.sort_by(|a, b| weight[*b].total_cmp(&weight[*a]).then(a.cmp(b)));
    for pair in patterns.windows(2) {
        if (weight[pair[0]] - weight[pair[1]]).abs() < TIE_TOLERANCE {
            return Err(Error::DegenerateWeights {
                first: Pattern::from_bits(pair[0], sites),
                second: Pattern::from_bits(pair[1], sites),
                tolerance: TIE_TOLERANCE,
            });
        }
    }
    Ok(patterns)
}

/// Collective labels `j(n) ∈ 1..=2^L` over all patterns, `j` increasing as
/// the many-mode weight decreases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingMap {
    sites: usize,
    ranks: Vec<usize>,
}

impl OrderingMap {
    /// Collective label of a pattern (1-based).
    pub fn label(&self, pattern: &Pattern) -> usize {
        self.ranks[pattern.bits()]
    }

    /// Patterns listed from the largest weight down.
    pub fn patterns(&self) -> Vec<Pattern> {
        let mut order = vec![0; self.ranks.len()];
        for (bits, &j) in self.ranks.iter().enumerate() {
            order[j - 1] = bits;
        }
        order
            .into_iter()
            .map(|b| Pattern::from_bits(b, self.sites))
            .collect()
    }
}

/// Global ordering of all `2^L` patterns.
pub fn ordering(w: &WeightVector) -> Result<OrderingMap> {
    let sites = w.sites();
    let order = rank_patterns(w, (0..1usize << sites).collect())?;
    let mut ranks = vec![0; order.len()];
    for (j, bits) in order.into_iter().enumerate() {
        ranks[bits] = j + 1;
    }
    Ok(OrderingMap { sites, ranks })
}

/// True iff both weight vectors give identical global collective labels.
pub fn same_ordering(w: &WeightVector, w2: &WeightVector) -> Result<bool> {
    Ok(ordering(w)? == ordering(w2)?)
}

/// Ordering of the `C(L, N)` patterns of one particle-number sector.
///
/// The ensemble minimum pairs the pattern at rank `r` (0-based, decreasing
/// weight) with the `r`-th lowest eigenvalue of that sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorOrdering {
    sites: usize,
    particles: usize,
    order: Vec<usize>,
}

impl SectorOrdering {
    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn pattern(&self, rank: usize) -> Pattern {
        Pattern::from_bits(self.order[rank], self.sites)
    }

    pub fn patterns(&self) -> impl Iterator<Item = Pattern> + '_ {
        self.order
            .iter()
            .map(move |&b| Pattern::from_bits(b, self.sites))
    }

    /// 0-based rank of a pattern, `None` if it belongs to another sector.
    pub fn rank_of(&self, pattern: &Pattern) -> Option<usize> {
        self.order.iter().position(|&b| b == pattern.bits())
    }
}

/// Sector-restricted ordering; ties are checked only inside the sector.
pub fn sector_ordering(w: &WeightVector, particles: usize) -> Result<SectorOrdering> {
    let sites = w.sites();
    if particles > sites {
        return Err(Error::ParticleNumberOutOfRange {
            n: particles,
            sites,
        });
    }
    let members = (0..1usize << sites)
        .filter(|b| b.count_ones() as usize == particles)
        .collect();
    Ok(SectorOrdering {
        sites,
        particles,
        order: rank_patterns(w, members)?,
    })
}

/// True iff both weight vectors rank the sector's patterns identically.
pub fn same_sector_ordering(w: &WeightVector, w2: &WeightVector, particles: usize) -> Result<bool> {
    Ok(sector_ordering(w, particles)?.order == sector_ordering(w2, particles)?.order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wv(ws: &[f64]) -> WeightVector {
        WeightVector::new(ws.to_vec()).unwrap()
    }

    #[test]
    fn product_weight_examples() {
        let w = wv(&[0.5, 0.4]);
        let p = Pattern::from_occupations(&[1, 0]);
        assert!((w.many_mode_weight(&p).unwrap() - 0.30).abs() < 1e-15);
        let zero = Pattern::from_occupations(&[0, 0]);
        assert_eq!(w.many_mode_weight(&zero).unwrap(), w.dfactor());
        assert!(w.many_mode_weight(&Pattern::from_occupations(&[1])).is_err());
    }

    #[test]
    fn paper_weights_sum_to_one() {
        let w = WeightVector::decreasing(5);
        assert_eq!(w.values(), &[0.5, 0.4, 0.3, 0.2, 0.1]);
        let total: f64 = (0..32).map(|b| w.weight_of_bits(b)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dfactor_examples() {
        assert!((WeightVector::decreasing(5).dfactor() - 0.1512).abs() < 1e-15);
        assert_eq!(wv(&[0.5]).dfactor(), 0.5);
        // formula boundary, not a valid weight vector
        assert_eq!(WeightVector { ws: vec![0.0; 3] }.dfactor(), 1.0);
    }

    #[test]
    fn rejects_out_of_range_weights() {
        assert!(WeightVector::new(vec![0.2, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::new(vec![0.505]).is_ok());
    }

    #[test]
    fn ordering_examples() {
        let m = ordering(&wv(&[0.4])).unwrap();
        assert_eq!(m.label(&Pattern::from_bits(0, 1)), 1);
        assert_eq!(m.label(&Pattern::from_bits(1, 1)), 2);

        let w = wv(&[0.4, 0.3]);
        let order: Vec<String> = ordering(&w)
            .unwrap()
            .patterns()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(order, ["00", "10", "01", "11"]);
        let weights: Vec<f64> = ordering(&w)
            .unwrap()
            .patterns()
            .iter()
            .map(|p| w.many_mode_weight(p).unwrap())
            .collect();
        for (got, want) in weights.iter().zip([0.42, 0.28, 0.18, 0.12]) {
            assert!((got - want).abs() < 1e-15);
        }

        match ordering(&wv(&[0.5, 0.5])) {
            Err(Error::DegenerateWeights { .. }) => {}
            other => panic!("expected tie error, got {other:?}"),
        }
    }

    #[test]
    fn same_ordering_examples() {
        let w = wv(&[0.4, 0.3]);
        assert!(same_ordering(&w, &w).unwrap());
        assert!(same_ordering(&w, &wv(&[0.4, 0.35])).unwrap());
        assert!(!same_ordering(&w, &wv(&[0.3, 0.4])).unwrap());
        assert!(same_ordering(&w, &wv(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn paper_weights_sectors_are_tie_free() {
        let w = WeightVector::decreasing(5);
        assert!(ordering(&w).is_err());
        let wp = w.shifted(0.005).unwrap();
        for n in 0..=5 {
            sector_ordering(&w, n).unwrap();
            assert!(same_sector_ordering(&w, &wp, n).unwrap(), "sector {n}");
        }
        let s2 = sector_ordering(&w, 2).unwrap();
        assert_eq!(s2.pattern(0).to_string(), "11000");
        assert_eq!(s2.pattern(1).to_string(), "10100");
        assert_eq!(s2.pattern(2).to_string(), "01100");
    }

    proptest! {
        #[test]
        fn weights_normalize(ws in prop::collection::vec(0.01f64..0.99, 1..=8)) {
            let w = WeightVector::new(ws).unwrap();
            let total: f64 = (0..1usize << w.sites()).map(|b| w.weight_of_bits(b)).sum();
            prop_assert!((total - 1.0).abs() < 1e-14);
        }

        #[test]
        fn weight_over_dfactor_is_odds_product(ws in prop::collection::vec(0.01f64..0.99, 1..=8)) {
            let w = WeightVector::new(ws).unwrap();
            let d = w.dfactor();
            for b in 0..1usize << w.sites() {
                let lhs = w.weight_of_bits(b) / d;
                let rhs = w.odds_of_bits(b);
                prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1.0));
            }
        }

        #[test]
        fn sector_ordering_invariant_under_common_odds_scaling(
            ws in prop::collection::vec(0.05f64..0.6, 2..=6),
            scale in 0.3f64..2.0,
        ) {
            let w = WeightVector::new(ws).unwrap();
            let scaled_ws: Vec<f64> = w.mu().iter().map(|m| {
                let mu = m * scale;
                mu / (1.0 + mu)
            }).collect();
            let w2 = WeightVector::new(scaled_ws).unwrap();
            for n in 0..=w.sites() {
                match (sector_ordering(&w, n), sector_ordering(&w2, n)) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    _ => {} // near-ties are not comparable
                }
            }
        }
    }
}
