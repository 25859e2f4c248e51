use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fractal_spectra_core::decimation::{
    enumerate_tower, forbidden_eigenvalues, DecimationPolynomial, Origin, SpectrumTower,
};
use fractal_spectra_core::decimation::eigenfunction as reconstruct;
use fractal_spectra_core::energy::{
    harmonic_extension, laplacian_renormalizer, ramification_constant, self_similar_weight, spline_integral,
    NormalizationConvention,
};
use fractal_spectra_core::geometry::build_level_with_cap;
use fractal_spectra_core::harmonic_structure::{
    ramification_from_structure, resonance_bridge, spectral_function_from_structure, verify_strong_harmonic, Variant,
    DEFAULT_FIT_SAMPLES,
};
use fractal_spectra_core::oracle::{
    closed_form_spectrum, dense_spectrum, resistance_dimension_report, series_resistance, Boundary,
};
use fractal_spectra_core::walk::{build_level1_chain, crossing_residual, crossing_times, dimensions, simulate_walk};
use fractal_spectra_core::{DEFAULT_LEVEL_CAP, DEFAULT_SPECTRUM_CAP};
use serde_json::{json, Value};

use crate::{level_cap, svg, Failure, Format, Outcome};

fn print_json(v: &Value) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn csv_sink(path: Option<PathBuf>) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Validation(what()))
    }
}

fn spectrum_tower(m: u32, poly: &DecimationPolynomial) -> Result<SpectrumTower, Failure> {
    Ok(enumerate_tower(m, level_cap(DEFAULT_SPECTRUM_CAP)?, poly)?)
}

/// Largest elementwise gap between the decimated and closed-form spectra,
/// and between the decimated and dense spectra when the level allows it.
pub fn oracle_deviation(eigenvalues: &[f64], m: u32) -> Result<(f64, Option<f64>), Failure> {
    let gap = |other: &[f64]| {
        if other.len() != eigenvalues.len() {
            return f64::INFINITY;
        }
        eigenvalues.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let closed = gap(&closed_form_spectrum(m)?);
    let dense = if m <= fractal_spectra_core::DENSE_ORACLE_CAP {
        Some(gap(&dense_spectrum(m, Boundary::Dirichlet, false)?.eigenvalues))
    } else {
        None
    };
    Ok((closed, dense))
}

pub fn dims() -> Outcome {
    let d = dimensions()?;
    let e = d.exact;
    print_json(&json!({
        "d_w": d.d_w,
        "delta": d.delta,
        "d_h": d.d_h,
        "d_s": d.d_s,
        "rho": d.rho,
        "mean_crossing": d.mean_crossing,
        "crossing_times": d.crossing_times,
        "einstein_residual": d.einstein_residual,
        "exact": {
            "d_w": e.d_w.to_string(),
            "delta": e.delta.to_string(),
            "d_h": e.d_h.to_string(),
            "d_s": e.d_s.to_string(),
            "rho": e.rho.to_string(),
        },
    }))?;
    check(d.einstein_residual <= 1e-12, || format!("Einstein residual {}", d.einstein_residual))
}

fn genealogy_label(tower: &SpectrumTower, m: u32, index: usize) -> Result<String, Failure> {
    let g = tower.genealogy(m, index)?;
    let mut s = format!("k{}@{}", g.root_k, g.root_level);
    for t in &g.signs {
        s.push(':');
        for &e in t {
            s.push(if e > 0 { '+' } else { '-' });
        }
    }
    Ok(s)
}

pub fn spectrum(
    m: u32,
    renormalized: bool,
    check_oracle: bool,
    format: Format,
    csv_path: Option<PathBuf>,
    tol: f64,
) -> Outcome {
    let tower = spectrum_tower(m, &DecimationPolynomial::standard())?;
    let level = tower.top();
    let deviation = if check_oracle { Some(oracle_deviation(&level.eigenvalues(), m)?) } else { None };
    let value_name = if renormalized { "renormalized_lambda" } else { "lambda" };
    let mut rows = Vec::with_capacity(level.nodes.len());
    for (i, n) in level.nodes.iter().enumerate() {
        let origin = match n.origin {
            Origin::Forbidden { k } => format!("forbidden:{k}"),
            Origin::Branch { parent, .. } => format!("branch:{parent}"),
        };
        let value = if renormalized { n.continuous_estimate } else { n.lambda };
        rows.push((value, n.multiplicity, origin, genealogy_label(&tower, m, i)?, n.continuous_estimate));
    }
    match format {
        Format::Csv => {
            let mut w = csv_sink(csv_path)?;
            w.write_record([value_name, "multiplicity", "origin", "genealogy", "continuous_estimate"])?;
            for (v, mult, origin, gen, cont) in &rows {
                w.write_record([v.to_string(), mult.to_string(), origin.clone(), gen.clone(), cont.to_string()])?;
            }
            w.flush()?;
            if let Some((closed, dense)) = deviation {
                eprintln!("max deviation vs closed form {closed:e}; vs dense {dense:?}");
            }
        }
        Format::Json => {
            let nodes: Vec<Value> = rows
                .iter()
                .map(|(v, mult, origin, gen, cont)| {
                    json!({ value_name: v, "multiplicity": mult, "origin": origin, "genealogy": gen, "continuous_estimate": cont })
                })
                .collect();
            let mut doc = json!({ "level": m, "total_multiplicity": level.total_multiplicity(), "nodes": nodes });
            if let Some((closed, dense)) = deviation {
                doc["max_deviation"] = json!(dense.unwrap_or(closed).max(closed));
            }
            match csv_path {
                Some(p) => serde_json::to_writer_pretty(File::create(p)?, &doc)?,
                None => print_json(&doc)?,
            }
        }
    }
    if let Some((closed, dense)) = deviation {
        let worst = dense.unwrap_or(closed).max(closed);
        check(worst <= tol, || format!("max deviation {worst:e} exceeds {tol:e}"))?;
    }
    Ok(())
}

pub fn decimate(m: u32, check_oracle: bool, perturb: Option<f64>, tol: f64) -> Outcome {
    let poly = match perturb {
        Some(d) => DecimationPolynomial::perturbed(1, d),
        None => DecimationPolynomial::standard(),
    };
    if !check_oracle {
        return print_json(&json!({
            "coefficients": poly.expanded().coeffs(),
            "forbidden": forbidden_eigenvalues(),
        }));
    }
    let level = spectrum_tower(m, &poly)?.levels.pop().expect("tower is non-empty");
    let ev = level.eigenvalues();
    let (closed, dense) = oracle_deviation(&ev, m)?;
    let worst = dense.unwrap_or(closed).max(closed);
    print_json(&json!({
        "level": m,
        "count": ev.len(),
        "total_multiplicity": level.total_multiplicity(),
        "max_deviation_closed_form": closed,
        "max_deviation_dense": dense,
        "max_deviation": worst,
        "tolerance": tol,
    }))?;
    check(worst <= tol, || format!("max deviation {worst:e} exceeds {tol:e}"))
}

pub fn oracle(m: u32, bc: Boundary, vectors: bool, csv_path: Option<PathBuf>) -> Outcome {
    let d = dense_spectrum(m, bc, vectors)?;
    let mut w = csv_sink(csv_path)?;
    let n = d.eigenvalues.len();
    let mut header = vec!["index".to_string(), "lambda".to_string()];
    if vectors {
        header.extend((0..n).map(|i| format!("v{i}")));
    }
    w.write_record(&header)?;
    for (i, l) in d.eigenvalues.iter().enumerate() {
        let mut rec = vec![(i + 1).to_string(), l.to_string()];
        if let Some(vs) = &d.eigenvectors {
            rec.extend(vs[i].iter().map(|x| x.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn harmonic(a: f64, b: f64, m: u32, n: NormalizationConvention, csv_path: Option<PathBuf>) -> Outcome {
    let cap = level_cap(DEFAULT_LEVEL_CAP)?;
    if m > cap {
        return Err(Failure::Usage(format!("level {m} exceeds cap {cap}")));
    }
    let h = harmonic_extension(a, b, m)?;
    match csv_path {
        Some(p) => {
            let mut w = csv_sink(Some(p))?;
            w.write_record(["index", "value"])?;
            for (i, v) in h.function().values().iter().enumerate() {
                w.write_record([i.to_string(), v.to_string()])?;
            }
            w.flush()?;
        }
        None => print_json(&json!({
            "level": m,
            "boundary": [a, b],
            "interior_values": h.interior_values,
            "energy_in": h.energy_in,
            "energy_out": h.energy_out,
            "energy": h.energy_under(n),
        }))?,
    }
    Ok(())
}

pub fn energy(m: u32, n: NormalizationConvention) -> Outcome {
    let cap = level_cap(DEFAULT_LEVEL_CAP)?;
    if m > cap {
        return Err(Failure::Usage(format!("level {m} exceeds cap {cap}")));
    }
    let h = harmonic_extension(0.0, 1.0, m)?;
    let (computed, claim) = resistance_dimension_report()?;
    print_json(&json!({
        "level": m,
        "normalization": format!("{n:?}"),
        "prefactor": n.prefactor(m),
        "harmonic_energy": h.energy_under(n),
        "series_resistance": series_resistance(m, n)?,
        "ramification_constant": ramification_constant()?,
        "self_similar_weight": self_similar_weight(),
        "spline_integral": spline_integral(m)?,
        "laplacian_renormalizer": laplacian_renormalizer(m)?,
        "resistance_dimension": { "computed": computed, "paper_claim": claim },
    }))
}

pub fn walk(simulate: bool, level: u32, trials: u64, seed: u64) -> Outcome {
    let chain = build_level1_chain()?;
    let t = crossing_times(&chain)?;
    let mut doc = json!({
        "crossing_times": t.times(),
        "residual": crossing_residual(&chain, &t),
    });
    if simulate {
        let e = simulate_walk(level, trials, seed)?;
        doc["simulation"] = json!({
            "level": e.level,
            "trials": e.trials,
            "seed": e.seed,
            "mean": e.mean,
            "half_width": e.half_width,
            "standard_error": e.standard_error,
            "analytic": e.analytic,
        });
    }
    print_json(&doc)
}

pub fn structure(variant: Variant, samples: usize, tol: f64) -> Outcome {
    let report = verify_strong_harmonic(variant, samples)?;
    let fit = spectral_function_from_structure(variant, DEFAULT_FIT_SAMPLES)?;
    let bridge = resonance_bridge();
    print_json(&json!({
        "variant": format!("{variant:?}").to_lowercase(),
        "max_residual": report.max_residual,
        "max_pair_deviation": report.max_pair_deviation,
        "samples_used": report.samples_used,
        "samples_skipped": report.samples_skipped,
        "k_d_at_zero": ramification_from_structure(variant)?,
        "fitted_r": fit.polynomial.coeffs(),
        "fit_degree": fit.degree,
        "fit_max_coeff_diff": fit.max_coeff_diff,
        "bridge": { "slope": bridge.slope, "intercept": bridge.intercept, "max_residual": bridge.max_residual },
    }))?;
    check(report.max_residual <= tol, || format!("identity residual {:e}", report.max_residual))
}

pub fn eigenfunction(m: u32, index: usize, path: &Path) -> Outcome {
    let tower = spectrum_tower(m, &DecimationPolynomial::standard())?;
    let len = tower.top().nodes.len();
    if index == 0 || index > len {
        return Err(Failure::Usage(format!("index {index} outside 1..={len}")));
    }
    let lambda = tower.top().nodes[index - 1].lambda;
    let values = reconstruct(&tower, m, index - 1)?;
    std::fs::write(path, svg::polyline(&values, &format!("level {m}, eigenvalue {index}: {lambda:.6}")))?;
    Ok(())
}

pub fn graph(m: u32, csv_path: Option<PathBuf>) -> Outcome {
    let g = build_level_with_cap(m, level_cap(DEFAULT_LEVEL_CAP)?)?;
    let mut w = csv_sink(csv_path)?;
    w.write_record(["index", "x_num", "x_den", "y_num", "y_den", "is_boundary"])?;
    for (i, v) in g.vertices().iter().enumerate() {
        let ((xn, xd), (yn, yd)) = v.fractions();
        w.write_record([
            i.to_string(),
            xn.to_string(),
            xd.to_string(),
            yn.to_string(),
            yd.to_string(),
            g.is_boundary(i).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
