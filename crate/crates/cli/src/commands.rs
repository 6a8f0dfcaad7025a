//! The non-verification commands. Each returns a [`Document`] holding
//! every output rendering, so the format choice stays in one place.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use polyosc::coherent::{build_bg_bosonic, build_bg_grassmann, build_perelomov};
use polyosc::fock::{build_finite_rep, build_truncated_rep};
use polyosc::measures::{
    atomic_frame_measure, bg_bessel_measure, fit_discrete_measure, frame_rows, log_grid, perelomov_finite_measure,
    perelomov_infinite_measure, rows_to_csv,
};
use polyosc::quon::solve_passage_coeffs;
use polyosc::{AlgebraSpec, Basis, CMatrix, Error, Family, FrameFamily, RadialMeasure, RepClass};
use serde_json::json;

use crate::settings::{RunConfig, StateFamily};

pub const DEFAULT_TABLE_LEN: usize = 10;
pub const DEFAULT_TRUNCATION: usize = 10;
pub const DEFAULT_SERIES_CAP: usize = 500;
pub const DEFAULT_MEASURE_TOL: f64 = 1e-5;

pub struct Document {
    pub json: serde_json::Value,
    pub csv: String,
    pub pretty: String,
    pub passed: bool,
}

/// Reals in `f64` round-trip form, so output is stable across platforms.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `re±imi`, with negative zeros folded.
pub fn cnum(z: Complex64) -> String {
    let im = z.im + 0.0;
    format!("{}{}{}i", num(z.re + 0.0), if im < 0.0 { "-" } else { "+" }, num(im.abs()))
}

pub fn tabulate(cfg: &RunConfig) -> Result<Document> {
    let spec = &cfg.spec;
    let last = match (cfg.order, spec.dim()) {
        (Some(n), Some(d)) => n.min(d - 1),
        (Some(n), None) => n,
        (None, Some(d)) => d - 1,
        (None, None) => DEFAULT_TABLE_LEN,
    };
    let mut rows = Vec::new();
    let mut csv = String::from("n,F,G,F_factorial\n");
    let mut pretty = format!("{:>4}  {:>24}  {:>24}  {:>24}\n", "n", "F(n)", "G(n)", "F(n)!");
    for n in 0..=last {
        let f = spec.structure_f(n)?;
        let g = spec.structure_g(n).ok();
        let ff = spec.f_factorial(n)?;
        let g_text = g.map(num).unwrap_or_default();
        rows.push(json!({"n": n, "F": f, "G": g, "F_factorial": ff}));
        writeln!(csv, "{n},{},{g_text},{}", num(f), num(ff))?;
        writeln!(pretty, "{n:>4}  {:>24}  {:>24}  {:>24}", num(f), if g.is_some() { g_text } else { "-".into() }, num(ff))?;
    }
    Ok(Document {
        json: json!({"spec": spec, "rows": rows}),
        csv,
        pretty,
        passed: true,
    })
}

fn state_basis(cfg: &RunConfig) -> Basis {
    match cfg.spec.class() {
        RepClass::Finite(_) => Basis::Finite,
        RepClass::Infinite => Basis::Series {
            cap: cfg.cutoff.unwrap_or(DEFAULT_SERIES_CAP),
        },
    }
}

pub fn state(cfg: &RunConfig) -> Result<Document> {
    let family = cfg.family.unwrap_or(StateFamily::Perelomov);
    if family == StateFamily::GrassmannBg {
        let k = match (cfg.order, cfg.spec.dim()) {
            (Some(k), _) => k,
            (None, Some(d)) => d,
            (None, None) => bail!("grassmann-bg on an infinite spec needs --order"),
        };
        let state = build_bg_grassmann(&cfg.spec, k)?;
        let mut csv = String::from("n,amplitude\n");
        for (n, a) in state.amplitudes.iter().enumerate() {
            writeln!(csv, "{n},\"{}\"", a.to_canonical_string())?;
        }
        return Ok(Document {
            json: state.to_json(),
            csv,
            pretty: format!("{state}\n"),
            passed: true,
        });
    }
    let built = match family {
        StateFamily::Perelomov => build_perelomov(&cfg.spec, cfg.z, state_basis(cfg)),
        _ => build_bg_bosonic(&cfg.spec, cfg.z, state_basis(cfg)),
    };
    let state = match built {
        Ok(s) => s,
        Err(Error::Divergent(reason)) => {
            return Ok(Document {
                json: json!({"verdict": "diverges", "reason": reason}),
                csv: format!("verdict,reason\ndiverges,\"{reason}\"\n"),
                pretty: format!("{reason}\n"),
                passed: false,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let probs = state.distribution();
    let mut csv = String::from("n,re,im,probability\n");
    let mut pretty = format!(
        "{:?} state, z = {}, norm² = {}, tail bound {:.3e}{}\n",
        state.family,
        cnum(state.z),
        num(state.norm_sq),
        state.tail_bound,
        if state.converged { "" } else { " (cap reached)" }
    );
    for (n, (c, p)) in state.coeffs.iter().zip(&probs).enumerate() {
        writeln!(csv, "{n},{},{},{}", num(c.re), num(c.im), num(*p))?;
        if *p >= 1e-16 || n < 8 {
            writeln!(pretty, "{n:>5}  {:>24} {:>24}  |c|² = {}", num(c.re), num(c.im), num(*p))?;
        }
    }
    Ok(Document {
        json: state.to_json(),
        csv,
        pretty,
        passed: state.converged,
    })
}

fn matrix_csv(out: &mut String, name: &str, m: &CMatrix) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z: Complex64 = m[(i, j)];
            let _ = writeln!(out, "{name},{i},{j},{},{}", num(z.re), num(z.im));
        }
    }
}

fn matrix_pretty(out: &mut String, name: &str, m: &CMatrix) {
    let _ = writeln!(out, "{name}:");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{:>9.5}{:+9.5}i", z.re + 0.0, z.im + 0.0)
            })
            .collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
}

pub fn dump(cfg: &RunConfig) -> Result<Document> {
    let ops = match cfg.spec.class() {
        RepClass::Finite(_) => build_finite_rep(&cfg.spec)?,
        RepClass::Infinite => build_truncated_rep(&cfg.spec, cfg.cutoff.unwrap_or(DEFAULT_TRUNCATION))?,
    };
    let mut csv = String::from("operator,row,col,re,im\n");
    let mut pretty = format!("dimension {}{}\n", ops.dim, if ops.truncated { " (truncated)" } else { "" });
    for (name, m) in [("a_minus", &ops.a_minus), ("a_plus", &ops.a_plus), ("number", &ops.number)] {
        matrix_csv(&mut csv, name, m);
        matrix_pretty(&mut pretty, name, m);
    }
    Ok(Document {
        json: serde_json::from_str(&ops.to_json())?,
        csv,
        pretty,
        passed: true,
    })
}

/// The spec the quon commands work with: finite of dimension `k`.
pub fn quon_spec(cfg: &RunConfig) -> Result<AlgebraSpec> {
    let spec = &cfg.spec;
    let (k, extra): (usize, Vec<f64>) = match (spec.class(), cfg.order) {
        (RepClass::Finite(_), None) => return Ok(spec.clone()),
        (RepClass::Finite(_), Some(k)) => (k, spec.kappas()[1..].to_vec()),
        (RepClass::Infinite, Some(k)) => (k, spec.kappas().to_vec()),
        (RepClass::Infinite, None) => bail!("quon commands need a finite spec or --order k"),
    };
    AlgebraSpec::finite(k, &extra, spec.phi()).context("building the k-dimensional spec")
}

pub fn passage(cfg: &RunConfig) -> Result<Document> {
    let spec = quon_spec(cfg)?;
    let coeffs = solve_passage_coeffs(&spec)?;
    let mut csv = String::from("i,re,im\n");
    let mut pretty = format!("passage coefficients, k = {} (triangular residual {:.3e})\n", coeffs.k, coeffs.residual);
    for (i, c) in coeffs.c.iter().enumerate() {
        writeln!(csv, "{},{},{}", i + 1, num(c.re), num(c.im))?;
        writeln!(pretty, "  C_{} = {}", i + 1, cnum(*c))?;
    }
    let tol = cfg.tol.unwrap_or(1e-10);
    Ok(Document {
        json: json!({"k": coeffs.k, "spec": spec, "c": coeffs.c.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(), "residual": coeffs.residual}),
        csv,
        pretty,
        passed: coeffs.residual <= tol,
    })
}

/// Closed-form radial measure for single-parameter families, or `None`
/// when only the moment fit applies.
pub fn closed_form_measure(family: &FrameFamily) -> Result<Option<RadialMeasure>> {
    let spec = &family.spec;
    if spec.rank() != 1 {
        return Ok(None);
    }
    let kappa = spec.kappas()[0];
    Ok(match (family.family, spec.class()) {
        (Family::Perelomov, RepClass::Finite(d)) => Some(perelomov_finite_measure(d)?),
        (Family::Perelomov, RepClass::Infinite) if kappa > 0.0 && kappa < 1.0 => Some(perelomov_infinite_measure(1.0 / kappa)?),
        (Family::BarutGirardello, RepClass::Infinite) if kappa > 0.0 => {
            let ell = (1.0 / kappa).round();
            if (1.0 / kappa - ell).abs() <= 1e-12 * ell {
                Some(bg_bessel_measure(ell as u32)?)
            } else {
                None
            }
        }
        _ => None,
    })
}

pub fn measure(cfg: &RunConfig) -> Result<Document> {
    let family = match cfg.family.unwrap_or(StateFamily::Perelomov) {
        StateFamily::Perelomov => Family::Perelomov,
        StateFamily::Bg => Family::BarutGirardello,
        StateFamily::GrassmannBg => bail!("the measure command covers the perelomov and bg families"),
    };
    let frame = FrameFamily::new(family, cfg.spec.clone())?;
    let count = match (cfg.order, frame.dim()) {
        (Some(n), Some(d)) => n.min(d),
        (Some(n), None) => n,
        (None, Some(d)) => d,
        (None, None) => 8,
    };
    let tol = cfg.tol.unwrap_or(DEFAULT_MEASURE_TOL);
    let (measure, fit) = match closed_form_measure(&frame)? {
        Some(m) => (m, None),
        None => {
            let targets = frame.moment_targets(count)?;
            let fit = fit_discrete_measure(&targets, &log_grid(1e-3, 40.0 * count.max(1) as f64, 160))?;
            (atomic_frame_measure(&frame, &fit)?, Some(fit))
        }
    };
    let rows = frame_rows(&frame, &measure, count, 1e-9)?;
    let passed = rows.iter().all(|r| (r.value - 1.0).abs() <= tol);
    let mut pretty = format!("measure {} ({} rows, tolerance {tol:e})\n", measure.name(), rows.len());
    for r in &rows {
        let ok = if (r.value - 1.0).abs() <= tol { "ok" } else { "FAIL" };
        writeln!(pretty, "  n = {:>3}  {:.12}  ± {:.1e}  {ok}", r.n, r.value, r.error)?;
    }
    if let Some(fit) = &fit {
        writeln!(pretty, "  moment fit residual {:.3e} after {} iterations", fit.residual, fit.iterations)?;
    }
    Ok(Document {
        json: json!({
            "measure": measure.name(),
            "tolerance": tol,
            "fit_residual": fit.as_ref().map(|f| f.residual),
            "rows": rows,
            "passed": passed,
        }),
        csv: rows_to_csv(&rows),
        pretty,
        passed,
    })
}
