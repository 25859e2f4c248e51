//! Randomized invariants across modules.

use std::f64::consts::PI;

use fractal_spectra_core::decimation::{decimation_poly, enumerate_spectrum, inverse_branches, ALL_SIGNS, branch};
use fractal_spectra_core::energy::{
    energy, gauss_green_residual, harmonic_extension, NormalizationConvention, VertexFunction,
};
use fractal_spectra_core::geometry::{apply_word_dyadic, build_level, vertex_count, DyadicPoint, Endpoint, Word};
use fractal_spectra_core::harmonic_structure::{identity_residual, resonances, build_structure, Variant};
use fractal_spectra_core::oracle::{dense_spectrum, det_a1, interlacing_violation, Boundary, Tridiagonal};
use fractal_spectra_core::walk::simulate_walk;
use proptest::prelude::*;

const CONVENTIONS: [NormalizationConvention; 3] =
    [NormalizationConvention::Raw, NormalizationConvention::Conserved, NormalizationConvention::PaperGeometric];

fn dyadic_p0() -> DyadicPoint {
    DyadicPoint::new(0, 0, 0)
}

fn dyadic_p1() -> DyadicPoint {
    DyadicPoint::new(1, 0, 0)
}

fn level_values(m: u32, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, (1usize << (3 * m)) + 1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn two_addresses_per_interior_vertex(m in 1u32..=4, raw in any::<prop::sample::Index>()) {
        let g = build_level(m).unwrap();
        let i = 1 + raw.index(g.len() - 2);
        let addrs = g.addresses(i).unwrap();
        prop_assert_eq!(addrs.len(), 2);
        prop_assert_ne!(&addrs[0].0, &addrs[1].0);
        for (w, end) in &addrs {
            prop_assert_eq!(w.len(), m as usize);
            let start = if *end == Endpoint::P0 { dyadic_p0() } else { dyadic_p1() };
            prop_assert!(apply_word_dyadic(w, start).same_point(g.vertices()[i]));
        }
    }

    #[test]
    fn nesting(m in 1u32..=4, raw in any::<prop::sample::Index>()) {
        let coarse = build_level(m - 1).unwrap();
        let fine = build_level(m).unwrap();
        let i = raw.index(coarse.len());
        prop_assert!(coarse.vertices()[i].same_point(fine.vertices()[8 * i]));
    }

    #[test]
    fn words_contract(letters in prop::collection::vec(1u8..=8, 1..10)) {
        let m = letters.len() as i32;
        let w = Word::new(letters).unwrap();
        let a = apply_word_dyadic(&w, dyadic_p0()).to_point();
        let b = apply_word_dyadic(&w, dyadic_p1()).to_point();
        prop_assert!(a.distance(b) <= 4f64.powi(-m) * 2f64.sqrt() + 1e-15);
    }

    #[test]
    fn vertex_counts_and_degrees(m in 0u32..=4, raw in any::<prop::sample::Index>()) {
        let g = build_level(m).unwrap();
        prop_assert_eq!(g.len() as u64, vertex_count(m).unwrap());
        prop_assert_eq!(g.len(), (1usize << (3 * m)) + 1);
        let i = raw.index(g.len());
        let want = if g.is_boundary(i) { 1 } else { 2 };
        prop_assert_eq!(g.degree(i).unwrap(), want);
    }

    #[test]
    fn energy_conservation(a in -100.0f64..100.0, b in -100.0f64..100.0, m in 0u32..=6) {
        let e = harmonic_extension(a, b, m).unwrap().energy_under(NormalizationConvention::Conserved);
        let want = (a - b) * (a - b);
        prop_assert!((e - want).abs() <= 1e-12 * want.max(1e-300), "{} vs {}", e, want);
    }

    #[test]
    fn raw_energy_decimates(a in -10.0f64..10.0, b in -10.0f64..10.0, m in 1u32..=6) {
        prop_assume!((a - b).abs() > 1e-6);
        let fine = harmonic_extension(a, b, m).unwrap().energy_under(NormalizationConvention::Raw);
        let coarse = harmonic_extension(a, b, m - 1).unwrap().energy_under(NormalizationConvention::Raw);
        prop_assert!((fine - coarse / 8.0).abs() <= 1e-12 * coarse);
    }

    #[test]
    fn harmonic_minimizes(
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        m in 1u32..=2,
        noise in prop::collection::vec(-1.0f64..1.0, 63),
        scale in 1e-6f64..1.0,
    ) {
        let g = build_level(m).unwrap();
        let h = harmonic_extension(a, b, m).unwrap().function();
        let base = energy(&g, &h, NormalizationConvention::Raw).unwrap();
        let mut v = h.values().to_vec();
        let last = v.len() - 1;
        for (i, x) in v.iter_mut().enumerate().take(last).skip(1) {
            *x += scale * noise[(i - 1) % noise.len()];
        }
        let perturbed = energy(&g, &VertexFunction::new(m, v).unwrap(), NormalizationConvention::Raw).unwrap();
        prop_assert!(perturbed >= base - 1e-12);
    }

    #[test]
    fn clamping_never_increases_energy(values in level_values(2, -3.0, 4.0), which in 0usize..3) {
        let g = build_level(2).unwrap();
        let u = VertexFunction::new(2, values).unwrap();
        let n = CONVENTIONS[which];
        let before = energy(&g, &u, n).unwrap();
        let after = energy(&g, &u.clamp_unit(), n).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-14));
    }

    #[test]
    fn summation_by_parts(
        m in 1u32..=3,
        seed_u in prop::collection::vec(-1.0f64..1.0, 16),
        seed_v in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let len = (1usize << (3 * m)) + 1;
        let extend = |s: &[f64]| (0..len).map(|i| s[i % s.len()] + (i as f64 * 0.37).sin()).collect::<Vec<_>>();
        let u = VertexFunction::new(m, extend(&seed_u)).unwrap();
        let v = VertexFunction::new(m, extend(&seed_v)).unwrap();
        prop_assert!(gauss_green_residual(&u, &v, NormalizationConvention::Raw).unwrap() <= 1e-10);
    }

    #[test]
    fn conjugacy(theta in 0.0f64..=PI) {
        let lhs = decimation_poly(2.0 - 2.0 * theta.cos());
        prop_assert!((lhs - (2.0 - 2.0 * (8.0 * theta).cos())).abs() <= 1e-9);
    }

    #[test]
    fn branches_round_trip(p in 0.0f64..=4.0) {
        let bs = inverse_branches(p).unwrap();
        prop_assert_eq!(bs.len(), 8);
        for (b, s) in bs.iter().zip(ALL_SIGNS) {
            prop_assert_eq!(b.lambda, branch(p, s).unwrap());
            prop_assert!((0.0..=4.0).contains(&b.lambda));
            prop_assert!((decimation_poly(b.lambda) - p).abs() <= 1e-9);
        }
    }

    #[test]
    fn strong_harmonic_identity(lambda in -1.0f64..5.0, island in any::<bool>()) {
        let s = build_structure(if island { Variant::Island } else { Variant::Curve });
        let clearance = resonances(&s).iter().map(|r| (r - lambda).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(clearance > 1e-3);
        prop_assert!(identity_residual(&s, lambda).unwrap() <= 1e-9);
    }

    #[test]
    fn cauchy_interlacing(
        (diag, off) in (3usize..60).prop_flat_map(|n| {
            (prop::collection::vec(-4.0f64..4.0, n), prop::collection::vec(-2.0f64..2.0, n - 1))
        })
    ) {
        let n = diag.len();
        let full = Tridiagonal { diag: diag.clone(), off: off.clone() };
        let inner = Tridiagonal { diag: diag[1..n - 1].to_vec(), off: off[1..n - 2].to_vec() };
        prop_assert!(interlacing_violation(&inner.eigenvalues(), &full.eigenvalues()) <= 1e-12);
    }

    #[test]
    fn sturm_counts_match_sorted_eigenvalues(
        (diag, off) in (1usize..40).prop_flat_map(|n| {
            (prop::collection::vec(-4.0f64..4.0, n), prop::collection::vec(-2.0f64..2.0, n.saturating_sub(1)))
        }),
        x in -8.0f64..8.0,
    ) {
        let t = Tridiagonal { diag, off };
        let ev = t.eigenvalues();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let below = ev.iter().filter(|&&e| e < x - 1e-9).count();
        let at_most = ev.iter().filter(|&&e| e < x + 1e-9).count();
        let c = t.count_below(x);
        prop_assert!(below <= c && c <= at_most);
    }
}

#[test]
fn energy_conservation_at_the_cap() {
    for (a, b) in [(0.0, 1.0), (-3.25, 7.5), (1e3, -1e3 + 0.5)] {
        for m in [7u32, 8] {
            let e = harmonic_extension(a, b, m).unwrap().energy_under(NormalizationConvention::Conserved);
            let want: f64 = (a - b) * (a - b);
            assert!((e - want).abs() <= 1e-12 * want, "m={m}: {e} vs {want}");
        }
    }
}

#[test]
fn spectrum_completeness_range_and_closed_form() {
    for m in 1..=6u32 {
        let level = enumerate_spectrum(m).unwrap();
        assert_eq!(level.total_multiplicity(), (1u64 << (3 * m)) - 1);
        let ev = level.eigenvalues();
        assert!(ev.iter().all(|&l| (0.0..=4.0).contains(&l)));
        let n = 8f64.powi(m as i32);
        let worst = ev
            .iter()
            .enumerate()
            .map(|(i, &l)| (l - (2.0 - 2.0 * ((i + 1) as f64 * PI / n).cos())).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9, "m={m}: {worst}");
    }
}

#[test]
fn dense_matches_closed_form_through_level_four() {
    for m in 1..=4u32 {
        let d = dense_spectrum(m, Boundary::Dirichlet, false).unwrap().eigenvalues;
        let n = 8f64.powi(m as i32);
        assert_eq!(d.len(), (1usize << (3 * m)) - 1);
        for (k, &l) in d.iter().enumerate() {
            let s = ((k + 1) as f64 * PI / (2.0 * n)).sin();
            assert!((l - 4.0 * s * s).abs() <= 1e-10);
            assert!(l > 0.0 && l < 4.0);
        }
        let neu = dense_spectrum(m, Boundary::Neumann, false).unwrap().eigenvalues;
        assert_eq!(neu.len(), (1usize << (3 * m)) + 1);
        assert_eq!(neu.iter().filter(|v| v.abs() < 1e-12).count(), 1);
        assert_eq!(interlacing_violation(&d, &neu), 0.0);
    }
}

#[test]
fn level_two_pairs_have_small_residuals() {
    let d = dense_spectrum(2, Boundary::Neumann, true).unwrap();
    assert!(d.max_residual().unwrap() <= 1e-9);
}

#[test]
fn renormalized_eigenvalues_are_cauchy() {
    let levels: Vec<_> = (1..=6u32).map(|m| enumerate_spectrum(m).unwrap()).collect();
    for k in 1..=10usize {
        // λ_k exists from the level where 8^m − 1 ≥ k.
        let seq: Vec<f64> = levels.iter().filter_map(|l| l.continuous(k).ok()).collect();
        let gaps: Vec<f64> = seq.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for g in gaps.windows(2) {
            assert!(g[0] >= 30.0 * g[1], "k={k}: gaps {gaps:?}");
        }
    }
}

#[test]
fn determinant_brackets_each_forbidden_value() {
    let f = fractal_spectra_core::decimation::forbidden_eigenvalues();
    let mut probes = vec![0.0];
    probes.extend(f.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    probes.push(4.0);
    for w in probes.windows(2) {
        assert!(det_a1(w[0]) * det_a1(w[1]) < 0.0, "{w:?}");
    }
}

#[test]
fn walk_half_width_scales_like_inverse_root() {
    let small = simulate_walk(1, 1_000, 7).unwrap();
    let large = simulate_walk(1, 100_000, 7).unwrap();
    let ratio = small.half_width / large.half_width;
    assert!((5.0..=20.0).contains(&ratio), "{ratio}");
}
