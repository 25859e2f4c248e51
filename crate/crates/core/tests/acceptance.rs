//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fractal_spectra_core::decimation::{counting_slope, decimation_poly, enumerate_spectrum, taylor_residuals};
use fractal_spectra_core::energy::{
    energy, gauss_green_residual, harmonic_coefficients, harmonic_extension, ramification_constant,
    NormalizationConvention, VertexFunction,
};
use fractal_spectra_core::geometry::build_level;
use fractal_spectra_core::harmonic_structure::{
    ramification_from_structure, spectral_function_from_structure, verify_strong_harmonic, Variant,
    DEFAULT_FIT_SAMPLES,
};
use fractal_spectra_core::oracle::{
    dense_spectrum, interlacing_violation, verify_level_eigenvectors, Boundary, Transcription, Tridiagonal,
};
use fractal_spectra_core::walk::{build_level1_chain, crossing_times, dimensions, simulate_walk};
use fractal_spectra_core::Rational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Criterion = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Monomial coefficients of `2 − 2 T_8(1 − λ/2)`, built from the Chebyshev
/// recurrence.
fn chebyshev_r() -> Vec<f64> {
    let mul_lin = |p: &[f64]| {
        // (1 − λ/2) · p
        let mut out = vec![0.0; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            out[i] += c;
            out[i + 1] -= 0.5 * c;
        }
        out
    };
    let mut prev = vec![1.0];
    let mut cur = vec![1.0, -0.5];
    for _ in 1..8 {
        let mut next = mul_lin(&cur);
        next.iter_mut().for_each(|c| *c *= 2.0);
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    let mut out: Vec<f64> = cur.iter().map(|c| -2.0 * c).collect();
    out[0] += 2.0;
    out
}

fn closed_form(m: u32) -> Vec<f64> {
    let n = 8f64.powi(m as i32);
    (1..(1u64 << (3 * m))).map(|k| 2.0 - 2.0 * (k as f64 * PI / n).cos()).collect()
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..runs {
        let t = Instant::now();
        last = Some(f());
        best = best.min(t.elapsed());
    }
    (last.unwrap(), best)
}

fn crossing() -> Outcome {
    let want: Vec<Rational> = [64, 63, 60, 55, 48, 39, 28, 15].iter().map(|&t| Rational::from_integer(t)).collect();
    let (got, elapsed) = best_of(20, || crossing_times(&build_level1_chain().unwrap()).unwrap().exact);
    outcome(
        got == want && elapsed < Duration::from_millis(1),
        format!("T = {:?}, solve {:?}", got.iter().map(|t| t.to_string()).collect::<Vec<_>>(), elapsed),
    )
}

fn dims() -> Outcome {
    let d = dimensions().unwrap().exact;
    let ok = d.d_w == r(3, 1)
        && d.delta == r(3, 2)
        && d.d_h == r(3, 2)
        && d.rho == r(8, 1)
        && d.d_s == r(1, 1)
        && d.einstein_defect() == r(0, 1);
    outcome(
        ok,
        format!(
            "D_W {} delta {} D_H {} rho {} D_S {} Einstein defect {}",
            d.d_w,
            d.delta,
            d.d_h,
            d.rho,
            d.d_s,
            d.einstein_defect()
        ),
    )
}

fn ramification() -> Outcome {
    let direct = ramification_constant().unwrap();
    let walk = 1.0 / dimensions().unwrap().rho;
    let curve = ramification_from_structure(Variant::Curve).unwrap();
    let island = ramification_from_structure(Variant::Island).unwrap();
    let routes = [direct, walk, curve, island];
    let agree = routes.iter().all(|v| (v - 0.125).abs() <= 1e-12);
    let table: Vec<(Rational, Rational)> = (1..8).map(|k| (r(8 - k, 8), r(k, 8))).collect();
    let coeffs = harmonic_coefficients(1).unwrap() == table;
    outcome(
        agree && coeffs,
        format!("energy {direct}, 1/rho {walk}, K_D(0) curve {curve} island {island}, table exact {coeffs}"),
    )
}

fn decimation_vs_oracle() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 1..=4u32 {
        let level = enumerate_spectrum(m).unwrap();
        let enumerated = level.eigenvalues();
        let dense = dense_spectrum(m, Boundary::Dirichlet, false).unwrap().eigenvalues;
        let closed = closed_form(m);
        let expected = (1u64 << (3 * m)) - 1;
        let dev = |a: &[f64], b: &[f64]| {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        };
        let (d_dense, d_closed) = (dev(&enumerated, &dense), dev(&enumerated, &closed));
        ok &= level.total_multiplicity() == expected && d_dense <= 1e-9 && d_closed <= 1e-9;
        parts.push(format!("m={m}: {} values, dev {d_dense:.1e}/{d_closed:.1e}", enumerated.len()));
    }
    outcome(ok, parts.join("; "))
}

fn conjugacy() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let theta = PI * i as f64 / 999.0;
        let lhs = decimation_poly(2.0 - 2.0 * theta.cos());
        worst = worst.max((lhs - (2.0 - 2.0 * (8.0 * theta).cos())).abs());
    }
    outcome(worst <= 1e-9, format!("max |R(2-2cos t) - (2-2cos 8t)| = {worst:.2e} over 1000 t"))
}

fn strong_harmonic() -> Outcome {
    let curve = verify_strong_harmonic(Variant::Curve, 100).unwrap();
    let island = verify_strong_harmonic(Variant::Island, 100).unwrap();
    let fit = spectral_function_from_structure(Variant::Curve, DEFAULT_FIT_SAMPLES).unwrap();
    let want = chebyshev_r();
    let coeff_dev = fit
        .polynomial
        .coeffs()
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let ok = curve.samples_used >= 100
        && island.samples_used >= 100
        && curve.max_residual <= 1e-9
        && island.max_residual <= 1e-9
        && fit.degree == 8
        && fit.polynomial.coeffs().len() == want.len()
        && coeff_dev <= 1e-8;
    outcome(
        ok,
        format!(
            "residual curve {:.1e} island {:.1e} ({} / {} samples); fitted degree {}, coefficient dev {:.1e}",
            curve.max_residual, island.max_residual, curve.samples_used, island.samples_used, fit.degree, coeff_dev
        ),
    )
}

fn continuous() -> Outcome {
    let start = Instant::now();
    let level = enumerate_spectrum(5).unwrap();
    let mut worst = 0.0f64;
    for k in 1..=10usize {
        let target = (k as f64 * PI).powi(2);
        worst = worst.max((level.continuous(k).unwrap() - target).abs() / target);
    }
    // x ↦ x/64 + C x² + … inverts R(λ) = 64λ + c₂λ² + …, so C = −c₂/64³.
    let c = -chebyshev_r()[2] / 64f64.powi(3);
    let taylor = taylor_residuals(&[1e-2, 1e-3, 1e-4]).unwrap();
    let taylor_ok = taylor.iter().all(|&(_, _, ratio)| (ratio - c).abs() <= 0.05 * c);
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-3 && taylor_ok && elapsed < Duration::from_secs(10),
        format!(
            "max relative error {worst:.2e} (k <= 10, m = 5); residual/x^2 {:?} vs C = {c:.6e}; {elapsed:?}",
            taylor.iter().map(|t| format!("{:.6e}", t.2)).collect::<Vec<_>>()
        ),
    )
}

fn counting() -> Outcome {
    let fit = counting_slope(&enumerate_spectrum(5).unwrap()).unwrap();
    outcome(
        (fit.slope - 0.5).abs() <= 0.05,
        format!(
            "slope {:.4} over [{:.3e}, {:.3e}]; stated exponent D_S = 1 is not what the spectrum shows (flagged)",
            fit.slope, fit.x_lo, fit.x_hi
        ),
    )
}

fn printed_vectors() -> Outcome {
    let one = verify_level_eigenvectors(1, Transcription::Literal).unwrap();
    let two = verify_level_eigenvectors(2, Transcription::Corrected).unwrap();
    let literal = verify_level_eigenvectors(2, Transcription::Literal).unwrap();
    let ok = one.checks.len() == 7 && two.checks.len() == 7 && one.max_residual() <= 1e-12 && two.max_residual() <= 1e-12;
    outcome(
        ok,
        format!(
            "m=1 max {:.1e}, m=2 max {:.1e} (two entries given their sign factor; as printed: {:.2})",
            one.max_residual(),
            two.max_residual(),
            literal.max_residual()
        ),
    )
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let est = simulate_walk(1, 100_000, 20_240_601).unwrap();
    let elapsed = start.elapsed();
    let z = (est.mean - 64.0) / est.standard_error;
    outcome(
        z.abs() <= 3.0 && elapsed < Duration::from_secs(5),
        format!("mean {:.3}, se {:.3}, z {z:.2}, {elapsed:?}", est.mean, est.standard_error),
    )
}

fn run_suite<S: Strategy>(name: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> String
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    match runner.run(&strategy, test) {
        Ok(()) => format!("{name} ok"),
        Err(e) => format!("{name} FAILED: {e}"),
    }
}

fn invariants() -> Outcome {
    const CASES: u32 = 128;
    let suites = [
        run_suite("energy conservation", CASES, (-10.0f64..10.0, -10.0f64..10.0, 0u32..=6), |(a, b, m)| {
            let e = harmonic_extension(a, b, m).unwrap().energy_under(NormalizationConvention::Conserved);
            prop_assert!((e - (a - b).powi(2)).abs() <= 1e-12 * (1.0 + (a - b).powi(2)));
            Ok(())
        }),
        run_suite(
            "markov property",
            CASES,
            (1u32..=2).prop_flat_map(|m| (Just(m), prop::collection::vec(-2.0f64..3.0, (1usize << (3 * m)) + 1))),
            |(m, values)| {
                let g = build_level(m).unwrap();
                let u = VertexFunction::new(m, values).unwrap();
                let n = NormalizationConvention::Conserved;
                prop_assert!(energy(&g, &u.clamp_unit(), n).unwrap() <= energy(&g, &u, n).unwrap() + 1e-12);
                Ok(())
            },
        ),
        run_suite(
            "gauss-green",
            CASES,
            (1u32..=2).prop_flat_map(|m| {
                let len = (1usize << (3 * m)) + 1;
                (Just(m), prop::collection::vec(-1.0f64..1.0, len), prop::collection::vec(-1.0f64..1.0, len))
            }),
            |(m, u, v)| {
                let (u, v) = (VertexFunction::new(m, u).unwrap(), VertexFunction::new(m, v).unwrap());
                let res = gauss_green_residual(&u, &v, NormalizationConvention::Raw).unwrap();
                prop_assert!(res <= 1e-9);
                Ok(())
            },
        ),
        run_suite("degree profile", CASES, (0u32..=4, any::<prop::sample::Index>()), |(m, idx)| {
            let g = build_level(m).unwrap();
            let i = idx.index(g.len());
            let want = if i == 0 || i == g.len() - 1 { 1 } else { 2 };
            prop_assert_eq!(g.degree(i).unwrap(), want);
            Ok(())
        }),
        run_suite(
            "interlacing",
            CASES,
            (3usize..40).prop_flat_map(|n| {
                (prop::collection::vec(-3.0f64..3.0, n), prop::collection::vec(-2.0f64..2.0, n - 1))
            }),
            |(diag, off)| {
                let full = Tridiagonal { diag: diag.clone(), off: off.clone() };
                let n = diag.len();
                let inner = Tridiagonal { diag: diag[1..n - 1].to_vec(), off: off[1..n - 2].to_vec() };
                let v = interlacing_violation(&inner.eigenvalues(), &full.eigenvalues());
                prop_assert!(v <= 1e-12, "violation {}", v);
                Ok(())
            },
        ),
    ];
    let path: Vec<f64> = (1..=3)
        .map(|m| {
            interlacing_violation(
                &dense_spectrum(m, Boundary::Dirichlet, false).unwrap().eigenvalues,
                &dense_spectrum(m, Boundary::Neumann, false).unwrap().eigenvalues,
            )
        })
        .collect();
    let ok = suites.iter().all(|s| s.ends_with(" ok")) && path.iter().all(|&v| v == 0.0);
    outcome(ok, format!("{} ({CASES} cases each); path interlacing m=1..3 exact", suites.join(", ")))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("crossing times", crossing),
        ("dimensions", dims),
        ("ramification triple", ramification),
        ("decimation vs oracle", decimation_vs_oracle),
        ("conjugacy", conjugacy),
        ("strong harmonic structure", strong_harmonic),
        ("continuous spectrum", continuous),
        ("counting function", counting),
        ("printed eigenvectors", printed_vectors),
        ("monte-carlo walk", monte_carlo),
        ("invariant suites", invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
