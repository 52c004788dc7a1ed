use wfield_core::model::{
    analytic_five_site_pair_spectrum, bloch_energies, build_hubbard, build_noninteracting, hubbard_in_basis,
    HubbardSpec, OrbitalBasis,
};
use wfield_core::oracle::{derivative_extraction_noninteracting, exact_sector_spectrum, ExactSpectra};
use wfield_core::spectroscopy::{difference_roundoff, extract_eigenenergy, extract_sector, gaps, ExactSectorEvaluator};
use wfield_core::weights::sector_ordering;
use wfield_core::{Pattern, WeightVector};

fn u_grid() -> impl Iterator<Item = f64> {
    (0..=8).map(|u| u as f64)
}

#[test]
fn five_site_pairs_match_closed_form() {
    for u in u_grid().chain([0.35, 2.5, 7.25]) {
        let h = build_hubbard(HubbardSpec::new(5, u)).unwrap();
        let ed = exact_sector_spectrum(&h, 5, 2).unwrap();
        let analytic = analytic_five_site_pair_spectrum(u);
        for (a, b) in ed.values.iter().zip(&analytic) {
            assert!((a - b).abs() < 1e-10, "U={u}: {a} vs {b}");
        }
    }
}

#[test]
fn single_particle_sector_is_the_band() {
    let h = build_hubbard(HubbardSpec::new(7, 3.0)).unwrap();
    let ed = exact_sector_spectrum(&h, 7, 1).unwrap();
    let mut eps = bloch_energies(7);
    eps.sort_by(f64::total_cmp);
    for (a, b) in ed.values.iter().zip(&eps) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn spectra_do_not_depend_on_orbital_basis() {
    for l in [4, 5, 6] {
        let spec = HubbardSpec::new(l, 2.7);
        let site = ExactSpectra::compute(&build_hubbard(spec).unwrap(), l).unwrap();
        for basis in [OrbitalBasis::Bloch, OrbitalBasis::Momentum] {
            let other = ExactSpectra::compute(&hubbard_in_basis(spec, basis).unwrap(), l).unwrap();
            for n in 0..=l {
                for (a, b) in site.sector(n).values.iter().zip(&other.sector(n).values) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn spectra_invariant_under_cyclic_relabeling() {
    let l = 6;
    let h = build_hubbard(HubbardSpec::new(l, 1.9)).unwrap();
    let mut shifted = wfield_core::OperatorTerms::new();
    for t in h.terms() {
        let factors = t
            .factors
            .iter()
            .map(|f| wfield_core::Ladder {
                mode: (f.mode + 1) % l,
                dagger: f.dagger,
            })
            .collect();
        shifted.push(t.coeff, factors);
    }
    let a = ExactSpectra::compute(&h, l).unwrap();
    let b = ExactSpectra::compute(&shifted, l).unwrap();
    for n in 0..=l {
        for (x, y) in a.sector(n).values.iter().zip(&b.sector(n).values) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn ensemble_energy_is_brute_force_sum() {
    let w = WeightVector::decreasing(5);
    let h = build_hubbard(HubbardSpec::new(5, 1.0)).unwrap();
    let spectra = ExactSpectra::compute(&h, 5).unwrap();
    let mut want = 0.0;
    for n in 0..=5 {
        let order = sector_ordering(&w, n).unwrap();
        for (rank, p) in order.patterns().enumerate() {
            want += w.many_mode_weight(&p).unwrap() * spectra.sector(n).values[rank];
        }
    }
    assert!((spectra.ensemble_energy(&w).unwrap() - want).abs() < 1e-12);
}

#[test]
fn equal_weights_give_sector_trace() {
    let w = WeightVector::new(vec![0.3; 4]).unwrap();
    let h = build_hubbard(HubbardSpec::new(4, 2.0)).unwrap();
    let spectra = ExactSpectra::compute(&h, 4).unwrap();
    for n in 0..=4 {
        // all patterns of a sector share one weight, so ties are expected
        let trace: f64 = spectra.sector(n).values.iter().sum();
        let mu = 0.3f64 / 0.7;
        let direct: f64 = spectra.sector(n).values.iter().map(|e| mu.powi(n as i32) * e).sum();
        assert!((direct - mu.powi(n as i32) * trace).abs() < 1e-12);
    }
    assert!(spectra.sector_energy(&w, 2).is_err());
}

/// Rounding bound for a nested difference over `2^N` corners whose values are
/// of size `scale`, divided by `Π(μ − μ')`.
#[test]
fn finite_differences_reconstruct_every_level() {
    for l in 2..=5 {
        let w = WeightVector::decreasing(l);
        let wp = w.shifted(0.005).unwrap();
        for u in u_grid() {
            let h = build_hubbard(HubbardSpec::new(l, u)).unwrap();
            let eval = ExactSectorEvaluator::new(ExactSpectra::compute(&h, l).unwrap(), &w).unwrap();
            for n in 0..=l {
                let levels = &eval.spectra().sector(n).values;
                let scale = (0..1usize << l)
                    .filter(|b| b.count_ones() as usize == n)
                    .map(|b| w.odds_of_bits(b))
                    .sum::<f64>()
                    * levels.iter().fold(1.0f64, |a, e| a.max(e.abs()));
                for (rank, (p, e)) in extract_sector(&eval, &w, &wp, n).unwrap().into_iter().enumerate() {
                    // exact multilinearity; f64 cancellation only matters for the fullest sectors
                    let tol = if n <= 3 { 1e-8 } else { 1e-8 + difference_roundoff(&w, &wp, &p.modes(), scale) };
                    assert!((e - levels[rank]).abs() < tol, "L={l} U={u} {p}: {e} vs {}", levels[rank]);
                }
            }
        }
    }
}

#[test]
fn finite_difference_gaps_match_definition() {
    let w = WeightVector::decreasing(5);
    let wp = w.shifted(0.005).unwrap();
    for u in u_grid() {
        let h = build_hubbard(HubbardSpec::new(5, u)).unwrap();
        let spectra = ExactSpectra::compute(&h, 5).unwrap();
        let e0 = |n: usize| spectra.sector(n).values[0];
        let eval = ExactSectorEvaluator::new(spectra.clone(), &w).unwrap();
        for n in 1..3 {
            let g = gaps(&eval, &w, &wp, n).unwrap();
            assert!((g.g - (e0(n + 1) + e0(n - 1) - 2.0 * e0(n))).abs() < 1e-8);
            assert!((g.g_plus - (e0(n) - e0(n + 1))).abs() < 1e-8);
            assert!((g.g_minus - (e0(n - 1) - e0(n))).abs() < 1e-8);
        }
    }
}

#[test]
fn free_gaps_are_band_differences() {
    let l = 5;
    let h = build_hubbard(HubbardSpec::new(l, 0.0)).unwrap();
    let w = WeightVector::decreasing(l);
    let wp = w.shifted(0.005).unwrap();
    let eval = ExactSectorEvaluator::new(ExactSpectra::compute(&h, l).unwrap(), &w).unwrap();
    let mut eps = bloch_energies(l);
    eps.sort_by(f64::total_cmp);
    let filled = |n: usize| eps[..n].iter().sum::<f64>();
    for n in 1..l {
        let g = gaps(&eval, &w, &wp, n).unwrap();
        assert!((g.g_plus - (filled(n) - filled(n + 1))).abs() < 1e-8);
        assert!((g.g_minus - (filled(n - 1) - filled(n))).abs() < 1e-8);
    }
}

#[test]
fn derivative_and_difference_routes_agree() {
    let omegas = [-1.3, 0.4, 0.9, -0.2];
    let h = build_noninteracting(&omegas);
    let w = WeightVector::new(vec![0.45, 0.35, 0.25, 0.15]).unwrap();
    let wp = w.shifted(0.005).unwrap();
    let eval = ExactSectorEvaluator::new(ExactSpectra::compute(&h, 4).unwrap(), &w).unwrap();
    for bits in 0..16usize {
        let p = Pattern::from_bits(bits, 4);
        let a = derivative_extraction_noninteracting(&omegas, &w, &p).unwrap();
        let want: f64 = p.modes().iter().map(|&m| omegas[m]).sum();
        assert!((a - want).abs() < 1e-8);
        // the pattern's paired level, not necessarily its own free energy
        let b = extract_eigenenergy(&eval, &w, &wp, &p.modes()).unwrap();
        let paired = eval.spectra().paired_energy(&w, &p).unwrap();
        assert!((b - paired).abs() < 1e-8);
    }
}
