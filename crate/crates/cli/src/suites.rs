//! Invariant suites behind `polyosc verify`.

use std::fmt::Write as _;

use num_complex::Complex64;
use polyosc::coherent::{
    bg_ln_norm_sq_hypergeometric, bg_norm_sq, build_bg_bosonic, build_bg_grassmann, build_perelomov,
    perelomov_ln_norm_sq_closed, perelomov_norm_sq, su11_generators, su2_generators, verify_bg_eigenstate,
    verify_bg_grassmann_eigenstate, verify_bg_grassmann_norm, verify_displacement_form, verify_su11, verify_su2,
    verify_temporal_stability,
};
use polyosc::fock::{build_finite_rep, build_truncated_rep, verify_wh_relations};
use polyosc::grassmann::verify_grassmann_resolution;
use polyosc::measures::frame_rows;
use polyosc::quon::{verify_passage_formulas, verify_quon_relations};
use polyosc::special::wronskian_defect;
use polyosc::{
    AlgebraSpec, Basis, Family, FrameFamily, GrassmannElement, NormOutcome, QuonParams, RepClass, Report, Variable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands::{closed_form_measure, cnum, quon_spec, Document, DEFAULT_MEASURE_TOL, DEFAULT_TRUNCATION};
use crate::settings::{RunConfig, Suite};

pub const DEFAULT_TOL: f64 = 1e-10;
const STABILITY_TIME: f64 = 0.7;
const BG_SERIES_CAP: usize = 60;

/// Records an error from a sub-step as a failed check instead of aborting.
fn attempt<T>(report: &mut Report, name: &str, result: polyosc::Result<T>) -> Option<T> {
    match result {
        Ok(v) => Some(v),
        Err(e) => {
            report.push_flag(name, false, e.to_string());
            None
        }
    }
}

fn algebra(spec: &AlgebraSpec, tol: f64) -> Report {
    let mut report = Report::new("algebra");
    let n_max = spec.dim().unwrap_or(20);
    let s = spec.vieta_coeffs();
    let mut vieta_dev = 0.0f64;
    let mut fact_dev = 0.0f64;
    let mut closed = true;
    for n in 0..=n_max {
        let nf = n as f64;
        let vieta = nf * s.iter().enumerate().map(|(i, si)| si * (nf - 1.0).powi(i as i32)).sum::<f64>();
        let product = spec.structure_f(n).unwrap_or(f64::NAN);
        vieta_dev = vieta_dev.max((vieta - product).abs() / product.abs().max(1.0));
        match (spec.f_factorial(n), spec.f_factorial_closed(n)) {
            (Ok(a), Ok(b)) => fact_dev = fact_dev.max((a - b).abs() / a.abs().max(1.0)),
            _ => closed = false,
        }
    }
    report.push("Vieta form = product form (relative)", vieta_dev, tol);
    if closed {
        report.push("F(n)! closed factorial form (relative)", fact_dev, tol);
    }
    if let Some(d) = spec.dim() {
        let trace: f64 = (0..d).map(|n| spec.structure_g(n).unwrap_or(f64::NAN)).sum();
        report.push("Tr G(N) = 0", trace.abs(), tol);
    }
    report
}

fn fock(cfg: &RunConfig, tol: f64) -> Report {
    let mut report = Report::new("fock");
    let ops = match cfg.spec.class() {
        RepClass::Finite(_) => build_finite_rep(&cfg.spec),
        RepClass::Infinite => build_truncated_rep(&cfg.spec, cfg.cutoff.unwrap_or(DEFAULT_TRUNCATION)),
    };
    if let Some(ops) = attempt(&mut report, "build representation", ops) {
        report.extend(verify_wh_relations(&ops, tol));
    }
    report
}

fn quon(cfg: &RunConfig, tol: f64) -> Report {
    let mut report = Report::new("quon");
    let spec = match quon_spec(cfg) {
        Ok(s) => s,
        Err(e) => {
            report.push_flag("k-dimensional spec", false, e.to_string());
            return report;
        }
    };
    let k = spec.dim().expect("quon spec is finite");
    if let Some(params) = attempt(&mut report, "quon parameters", QuonParams::new(k)) {
        report.extend(verify_quon_relations(&params, tol));
    }
    if let Some(r) = attempt(&mut report, "passage formulas", verify_passage_formulas(&spec, tol)) {
        report.extend(r);
    }
    report
}

fn random_element(rng: &mut ChaCha8Rng, k: usize) -> GrassmannElement {
    let count = rng.random_range(1..=2 * k);
    let terms: Vec<_> = (0..count)
        .map(|_| {
            let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
            (a, b, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    GrassmannElement::from_terms(k, terms)
}

fn grassmann(cfg: &RunConfig, tol: f64) -> Report {
    let k = cfg.order.or(cfg.spec.dim()).unwrap_or(2);
    let mut report = Report::new(format!("grassmann (k = {k})"));
    if k < 2 {
        report.push_flag("order", false, "k must be at least 2");
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut nilpotent = true;
    let mut assoc = 0.0f64;
    let mut q_comm = 0.0f64;
    let q_half_bar = QuonParams::new(k).map(|p| p.q_half().conj()).unwrap_or_default();
    for _ in 0..50 {
        let (x, y, z) = (random_element(&mut rng, k), random_element(&mut rng, k), random_element(&mut rng, k));
        for which in [Variable::Theta, Variable::ThetaBar] {
            nilpotent &= (0..k).fold(x.clone(), |acc, _| acc.q_derivative(which)).is_zero();
        }
        assoc = assoc.max((&(&x * &y) * &z).max_diff(&(&x * &(&y * &z))));
        let lhs = x.q_derivative(Variable::ThetaBar).q_derivative(Variable::Theta);
        let rhs = x.q_derivative(Variable::Theta).q_derivative(Variable::ThetaBar).scale(q_half_bar);
        q_comm = q_comm.max(lhs.max_diff(&rhs));
    }
    report.push_flag("(∂)^k annihilates", nilpotent, "50 seeded random elements");
    report.push("associativity", assoc, 1e-12);
    report.push("∂θ∂θ̄ = q^{-1/2} ∂θ̄∂θ", q_comm, 1e-12);

    let berezin = (0..k).all(|j| {
        let v = GrassmannElement::monomial(k, j, 0, Complex64::new(1.0, 0.0)).integrate(Variable::Theta);
        if j + 1 == k {
            v == GrassmannElement::one(k)
        } else {
            v.is_zero()
        }
    });
    report.push_flag("∫θ^j dθ = δ(j, k-1) exactly", berezin, "Berezin rule");
    if k == 2 {
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        let x = &GrassmannElement::scalar(2, a) + &GrassmannElement::monomial(2, 1, 0, b);
        report.push_flag(
            "∫(a + bθ) dθ = b exactly",
            x.integrate(Variable::Theta) == GrassmannElement::scalar(2, b),
            "Berezin integral for k = 2",
        );
    }
    match cfg.spec.dim() {
        Some(d) if d < k => {
            report.push_flag("resolution of identity", false, format!("needs dimension ≥ k, spec has d = {d}"));
        }
        _ => {
            let out = verify_grassmann_resolution(&cfg.spec, k, cfg.resolution, tol.max(1e-12));
            if let Some(out) = attempt(&mut report, "resolution of identity", out) {
                let phases: Vec<String> = out.phases.iter().map(|p| format!("{:.6}{:+.6}i", p.re + 0.0, p.im + 0.0)).collect();
                report.extend(out.report);
                report.push_flag("phases", true, phases.join(", "));
            }
        }
    }
    report
}

fn coherent(cfg: &RunConfig, tol: f64) -> Report {
    let spec = &cfg.spec;
    let z = cfg.z;
    let mut report = Report::new(format!("coherent (z = {})", cnum(z)));
    match spec.class() {
        RepClass::Finite(d) => {
            if let Some(s) = attempt(&mut report, "Perelomov state", build_perelomov(spec, z, Basis::Finite)) {
                if let Some(r) = attempt(&mut report, "displacement", verify_displacement_form(&s, tol)) {
                    report.extend(r);
                }
                if let Some(r) = attempt(&mut report, "stability", verify_temporal_stability(&s, STABILITY_TIME, tol)) {
                    report.extend(r);
                }
                if let Ok(NormOutcome::Converges(sum)) = perelomov_norm_sq(spec, z, Basis::Finite) {
                    if let Some(ln) = perelomov_ln_norm_sq_closed(spec, z.norm_sqr()) {
                        report.push("Perelomov norm = closed form (relative)", (sum.value / ln.exp() - 1.0).abs(), tol);
                    }
                }
            }
            grassmann_states(&mut report, spec, d, build_finite_rep(spec), tol);
            if spec.rank() == 1 {
                if let Some(ops) = attempt(&mut report, "representation", build_finite_rep(spec)) {
                    if let Some(g) = attempt(&mut report, "su(2) generators", su2_generators(&ops)) {
                        report.extend(verify_su2(&g, tol));
                    }
                }
            }
        }
        RepClass::Infinite => {
            let s = cfg.cutoff.unwrap_or(DEFAULT_TRUNCATION);
            let truncated = Basis::Truncated { s };
            if let Some(st) = attempt(&mut report, "Perelomov state", build_perelomov(spec, z, truncated)) {
                if let Some(r) = attempt(&mut report, "displacement", verify_displacement_form(&st, tol)) {
                    report.extend(r);
                }
                if let Some(r) = attempt(&mut report, "stability", verify_temporal_stability(&st, STABILITY_TIME, tol)) {
                    report.extend(r);
                }
            }
            if let Some(st) = attempt(&mut report, "BG state", build_bg_bosonic(spec, z, truncated)) {
                if let Some(r) = attempt(&mut report, "BG stability", verify_temporal_stability(&st, STABILITY_TIME, tol)) {
                    report.extend(r);
                }
            }
            let series = Basis::Series { cap: BG_SERIES_CAP };
            if let Some(st) = attempt(&mut report, "BG series state", build_bg_bosonic(spec, z, series)) {
                if let Some(r) = attempt(&mut report, "BG eigenstate", verify_bg_eigenstate(&st, tol)) {
                    report.extend(r);
                }
            }
            if let (Ok(sum), Ok(ln)) = (bg_norm_sq(spec, z, BG_SERIES_CAP), bg_ln_norm_sq_hypergeometric(spec, z.norm_sqr())) {
                report.push("BG norm = 0F_r (relative)", (sum.value / ln.exp() - 1.0).abs(), tol);
            }
            match perelomov_norm_sq(spec, z, Basis::Series { cap: 5000 }) {
                Ok(NormOutcome::Converges(sum)) => {
                    if let Some(ln) = perelomov_ln_norm_sq_closed(spec, z.norm_sqr()) {
                        report.push("Perelomov series = closed form (relative)", (sum.value / ln.exp() - 1.0).abs(), 1e-8);
                    }
                }
                Ok(NormOutcome::Diverges { reason }) => {
                    report.push_flag("Perelomov series", true, reason);
                }
                Err(e) => {
                    report.push_flag("Perelomov series", false, e.to_string());
                }
            }
            grassmann_states(&mut report, spec, s, build_truncated_rep(spec, s), tol);
            if spec.rank() == 1 && spec.kappas()[0] > 0.0 {
                if let Some(ops) = attempt(&mut report, "representation", build_truncated_rep(spec, s)) {
                    if let Some(g) = attempt(&mut report, "su(1,1) generators", su11_generators(&ops)) {
                        report.extend(verify_su11(&g, tol));
                    }
                }
            }
        }
    }
    report
}

fn grassmann_states(
    report: &mut Report,
    spec: &AlgebraSpec,
    k: usize,
    ops: polyosc::Result<polyosc::FockOperators>,
    tol: f64,
) {
    let Some(ops) = attempt(report, "representation", ops) else {
        return;
    };
    let Some(state) = attempt(report, "Grassmann BG state", build_bg_grassmann(spec, k)) else {
        return;
    };
    if let Some(r) = attempt(report, "Grassmann eigenstate", verify_bg_grassmann_eigenstate(&state, &ops, tol.max(1e-12))) {
        report.extend(r);
    }
    if let Some(r) = attempt(report, "Grassmann norm", verify_bg_grassmann_norm(&state, tol.max(1e-12))) {
        report.extend(r);
    }
}

fn measures(cfg: &RunConfig) -> Report {
    let tol = DEFAULT_MEASURE_TOL.max(cfg.tol.unwrap_or(0.0));
    let mut report = Report::new("measures");
    let mut wronskian = 0.0f64;
    for nu in 0..=4 {
        for step in 1..=300 {
            wronskian = wronskian.max(wronskian_defect(nu, 0.1 * step as f64).abs());
        }
    }
    report.push("Bessel Wronskian", wronskian, 1e-10);
    let mut any = false;
    for family in [Family::Perelomov, Family::BarutGirardello] {
        let Ok(frame) = FrameFamily::new(family, cfg.spec.clone()) else {
            continue;
        };
        let count = frame.dim().unwrap_or(match family {
            Family::Perelomov => 11,
            Family::BarutGirardello => 9,
        });
        let Ok(Some(measure)) = closed_form_measure(&frame) else {
            continue;
        };
        any = true;
        if let Some(rows) = attempt(&mut report, measure.name(), frame_rows(&frame, &measure, count, 1e-9)) {
            let dev = rows.iter().fold(0.0f64, |acc, r| acc.max((r.value - 1.0).abs()));
            report.push(format!("{}: frame diagonal = 1 for n < {count}", measure.name()), dev, tol);
        }
    }
    if !any {
        report.push_flag("closed-form measures", true, "none for this spec; use `polyosc measure` for the moment fit");
    }
    report
}

pub fn verify(cfg: &RunConfig) -> Document {
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let selected: Vec<Suite> = match cfg.suite {
        Suite::All => {
            let mut all = vec![Suite::Algebra, Suite::Fock];
            if cfg.spec.class().is_finite() || cfg.order.is_some() {
                all.push(Suite::Quon);
            }
            all.extend([Suite::Grassmann, Suite::Coherent, Suite::Measures]);
            all
        }
        one => vec![one],
    };
    let reports: Vec<Report> = selected
        .iter()
        .map(|suite| match suite {
            Suite::Algebra => algebra(&cfg.spec, tol),
            Suite::Fock => fock(cfg, tol),
            Suite::Quon => quon(cfg, tol),
            Suite::Grassmann => grassmann(cfg, tol),
            Suite::Coherent => coherent(cfg, tol),
            Suite::Measures => measures(cfg),
            Suite::All => unreachable!("expanded above"),
        })
        .collect();
    let passed = reports.iter().all(Report::passed);
    let mut csv = String::from("suite,check,residual,tolerance,passed\n");
    let mut pretty = String::new();
    for r in &reports {
        for c in &r.checks {
            let _ = writeln!(csv, "\"{}\",\"{}\",{:e},{:e},{}", r.title, c.name.replace('"', "'"), c.residual, c.tolerance, c.passed);
        }
        let _ = write!(pretty, "{r}");
    }
    let _ = writeln!(pretty, "{}", if passed { "all checks passed" } else { "some checks FAILED" });
    Document {
        json: json!({"spec": cfg.spec, "tolerance": tol, "seed": cfg.seed, "suites": reports, "passed": passed}),
        csv,
        pretty,
        passed,
    }
}
