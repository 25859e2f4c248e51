//! The full reproduction run behind `reproduce-all`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fractal_spectra_core::decimation::{counting_slope, enumerate_tower, taylor_residuals, DecimationPolynomial};
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
    closed_form_spectrum, dense_spectrum, interlacing_violation, verify_level_eigenvectors, Boundary, Transcription,
};
use fractal_spectra_core::walk::{build_level1_chain, crossing_times, dimensions, simulate_walk};
use fractal_spectra_core::{Rational, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Failure, Outcome};

const RANDOM_CASES: usize = 128;
const SEED: u64 = 20_240_601;

type CheckFn = Box<dyn Fn() -> Result<Check>>;

struct Check {
    pass: bool,
    detail: String,
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn crossing() -> Result<Check> {
    let start = Instant::now();
    let t = crossing_times(&build_level1_chain()?)?;
    let elapsed = start.elapsed();
    let want: Vec<Rational> = [64, 63, 60, 55, 48, 39, 28, 15].map(Rational::from_integer).to_vec();
    Ok(Check {
        pass: t.exact == want && elapsed < Duration::from_millis(1),
        detail: format!("{:?} in {elapsed:?}", t.times()),
    })
}

fn dims() -> Result<Check> {
    let d = dimensions()?;
    let e = d.exact;
    let r = Rational::new;
    Ok(Check {
        pass: e.d_w == r(3, 1)
            && e.delta == r(3, 2)
            && e.d_h == r(3, 2)
            && e.rho == r(8, 1)
            && e.d_s == r(1, 1)
            && e.einstein_defect() == r(0, 1),
        detail: format!("D_W {} delta {} D_H {} rho {} D_S {}", e.d_w, e.delta, e.d_h, e.rho, e.d_s),
    })
}

fn ramification() -> Result<Check> {
    let routes = [
        ramification_constant()?,
        1.0 / dimensions()?.rho,
        ramification_from_structure(Variant::Curve)?,
        ramification_from_structure(Variant::Island)?,
    ];
    let table: Vec<(Rational, Rational)> = (1..8).map(|k| (Rational::new(8 - k, 8), Rational::new(k, 8))).collect();
    let exact = harmonic_coefficients(1)? == table;
    Ok(Check {
        pass: routes.iter().all(|v| (v - 0.125).abs() <= 1e-12) && exact,
        detail: format!("{routes:?}, coefficient table exact: {exact}"),
    })
}

fn decimation(poly: &DecimationPolynomial) -> Result<Check> {
    let tower = enumerate_tower(4, 4, poly)?;
    let mut worst = 0.0f64;
    let mut complete = true;
    for m in 1..=4u32 {
        let level = tower.level(m).expect("level in tower");
        complete &= level.total_multiplicity() == (1u64 << (3 * m)) - 1;
        let ev = level.eigenvalues();
        worst = worst.max(max_gap(&ev, &dense_spectrum(m, Boundary::Dirichlet, false)?.eigenvalues));
        worst = worst.max(max_gap(&ev, &closed_form_spectrum(m)?));
    }
    Ok(Check { pass: complete && worst <= 1e-9, detail: format!("max deviation {worst:.2e}, complete {complete}") })
}

fn conjugacy(poly: &DecimationPolynomial) -> Result<Check> {
    let worst = (0..1000)
        .map(|i| {
            let t = PI * i as f64 / 999.0;
            (poly.eval(2.0 - 2.0 * t.cos()) - (2.0 - 2.0 * (8.0 * t).cos())).abs()
        })
        .fold(0.0, f64::max);
    Ok(Check { pass: worst <= 1e-9, detail: format!("max error {worst:.2e}") })
}

fn strong_harmonic(poly: &DecimationPolynomial) -> Result<Check> {
    let c = verify_strong_harmonic(Variant::Curve, 100)?;
    let i = verify_strong_harmonic(Variant::Island, 100)?;
    let fit = spectral_function_from_structure(Variant::Curve, DEFAULT_FIT_SAMPLES)?;
    let coeff = fit.polynomial.max_coeff_diff(&poly.expanded());
    Ok(Check {
        pass: c.max_residual <= 1e-9 && i.max_residual <= 1e-9 && coeff <= 1e-8,
        detail: format!(
            "residual curve {:.1e} island {:.1e}, coefficient diff {coeff:.1e}",
            c.max_residual, i.max_residual
        ),
    })
}

fn continuous() -> Result<Check> {
    let start = Instant::now();
    let level = enumerate_tower(5, 5, &DecimationPolynomial::standard())?.levels.pop().expect("level 5");
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let target = (k as f64 * PI).powi(2);
        worst = worst.max((level.continuous(k)? - target).abs() / target);
    }
    let c = 336.0 / 64f64.powi(3);
    let taylor = taylor_residuals(&[1e-2, 1e-3, 1e-4])?;
    let taylor_ok = taylor.iter().all(|t| (t.2 - c).abs() <= 0.05 * c);
    let elapsed = start.elapsed();
    Ok(Check {
        pass: worst <= 1e-3 && taylor_ok && elapsed < Duration::from_secs(10),
        detail: format!("relative error {worst:.2e}, Taylor constant ok {taylor_ok}, {elapsed:?}"),
    })
}

fn counting() -> Result<Check> {
    let level = enumerate_tower(5, 5, &DecimationPolynomial::standard())?.levels.pop().expect("level 5");
    let fit = counting_slope(&level)?;
    Ok(Check {
        pass: (fit.slope - 0.5).abs() <= 0.05,
        detail: format!("slope {:.4}; stated exponent D_S = 1 flagged, not asserted", fit.slope),
    })
}

fn printed_vectors() -> Result<Check> {
    let one = verify_level_eigenvectors(1, Transcription::Literal)?.max_residual();
    let two = verify_level_eigenvectors(2, Transcription::Corrected)?.max_residual();
    Ok(Check { pass: one <= 1e-12 && two <= 1e-12, detail: format!("m=1 {one:.1e}, m=2 {two:.1e}") })
}

fn monte_carlo() -> Result<Check> {
    let start = Instant::now();
    let e = simulate_walk(1, 100_000, SEED)?;
    let elapsed = start.elapsed();
    let z = (e.mean - 64.0) / e.standard_error;
    Ok(Check {
        pass: z.abs() <= 3.0 && elapsed < Duration::from_secs(5),
        detail: format!("mean {:.3} (z {z:.2}) in {elapsed:?}", e.mean),
    })
}

fn invariants() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let g2 = build_level(2)?;
    let random_fn = |rng: &mut ChaCha8Rng, m: u32, lo: f64, hi: f64| {
        VertexFunction::from_fn(m, |_| rng.random_range(lo..hi))
    };
    for _ in 0..RANDOM_CASES {
        let (a, b) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let m = rng.random_range(0..=6);
        let e = harmonic_extension(a, b, m)?.energy_under(NormalizationConvention::Conserved);
        if (e - (a - b) * (a - b)).abs() > 1e-12 * (1.0 + (a - b) * (a - b)) {
            failures.push("energy conservation");
        }
        let u = random_fn(&mut rng, 2, -2.0, 3.0)?;
        let n = NormalizationConvention::Conserved;
        if energy(&g2, &u.clamp_unit(), n)? > energy(&g2, &u, n)? + 1e-12 {
            failures.push("markov property");
        }
        let m = rng.random_range(1..=3);
        let (u, v) = (random_fn(&mut rng, m, -1.0, 1.0)?, random_fn(&mut rng, m, -1.0, 1.0)?);
        if gauss_green_residual(&u, &v, NormalizationConvention::Raw)? > 1e-9 {
            failures.push("gauss-green");
        }
        let m = rng.random_range(0..=4);
        let g = build_level(m)?;
        let i = rng.random_range(0..g.len());
        if g.degree(i)? != if g.is_boundary(i) { 1 } else { 2 } {
            failures.push("degree profile");
        }
    }
    for m in 1..=3 {
        let d = dense_spectrum(m, Boundary::Dirichlet, false)?.eigenvalues;
        let n = dense_spectrum(m, Boundary::Neumann, false)?.eigenvalues;
        if interlacing_violation(&d, &n) > 0.0 {
            failures.push("interlacing");
        }
    }
    failures.dedup();
    Ok(Check {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{RANDOM_CASES} seeded cases per suite")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    })
}

pub fn run(perturb: Option<f64>) -> Outcome {
    let poly = match perturb {
        Some(d) => DecimationPolynomial::perturbed(1, d),
        None => DecimationPolynomial::standard(),
    };
    let checks: [(&str, CheckFn); 11] = [
        ("crossing times", Box::new(crossing)),
        ("dimensions", Box::new(dims)),
        ("ramification triple", Box::new(ramification)),
        ("decimation vs oracle", Box::new(move || decimation(&poly))),
        ("conjugacy", Box::new(move || conjugacy(&poly))),
        ("strong harmonic structure", Box::new(move || strong_harmonic(&poly))),
        ("continuous spectrum", Box::new(continuous)),
        ("counting function", Box::new(counting)),
        ("printed eigenvectors", Box::new(printed_vectors)),
        ("monte-carlo walk", Box::new(monte_carlo)),
        ("invariant suites", Box::new(invariants)),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in checks.iter().enumerate() {
        let c = f().unwrap_or_else(|e| Check { pass: false, detail: format!("error: {e}") });
        println!("{} {:>2} {name}: {}", if c.pass { "PASS" } else { "FAIL" }, i + 1, c.detail);
        if !c.pass {
            failed.push(*name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{} check(s) failed: {}", failed.len(), failed.join(", "))))
    }
}
