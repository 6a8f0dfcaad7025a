//! Perelomov and Barut–Girardello coherent states.
//!
//! Bosonic states carry complex labels `z` and live either on a finite Fock
//! space (finite spec or truncation) or on the infinite one, where the
//! coefficient series is summed adaptively. Grassmann-labelled states live
//! on a finite space of dimension equal to the Grassmann order.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{AlgebraSpec, RepClass};
use crate::error::{Error, Result};
use crate::fock::{self, FockOperators};
use crate::grassmann::GrassmannElement;
use crate::matrix::{self, c, cis, CMatrix};
use crate::report::Report;
use crate::special::{self, ln_factorial};

/// Default hard cap on the number of series terms.
pub const DEFAULT_SERIES_CAP: usize = 500;

/// Relative size of the last accepted term at which a series stops.
const SERIES_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Perelomov,
    BarutGirardello,
}

/// Where a bosonic state lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Basis {
    /// The `d`-dimensional space of a finite spec.
    Finite,
    /// The first `s` number states of an infinite spec.
    Truncated { s: usize },
    /// The infinite Fock space, summed adaptively up to `cap` terms.
    Series { cap: usize },
}

impl Basis {
    fn validate(self, spec: &AlgebraSpec) -> Result<()> {
        match (self, spec.class()) {
            (Basis::Finite, RepClass::Finite(_)) => Ok(()),
            (Basis::Finite, RepClass::Infinite) => Err(Error::WrongClass { expected: "finite" }),
            (_, RepClass::Finite(_)) => Err(Error::WrongClass { expected: "infinite" }),
            (Basis::Truncated { s }, _) if s < 2 => {
                Err(Error::Precondition(format!("truncation order s = {s} must be at least 2")))
            }
            (Basis::Series { cap }, _) if cap < 2 => {
                Err(Error::Precondition(format!("series cap {cap} must be at least 2")))
            }
            _ => Ok(()),
        }
    }

    /// Fixed dimension, if any.
    pub fn fixed_dim(self, spec: &AlgebraSpec) -> Option<usize> {
        match self {
            Basis::Finite => spec.dim(),
            Basis::Truncated { s } => Some(s),
            Basis::Series { .. } => None,
        }
    }
}

/// Outcome of summing a norm series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    pub ln_value: f64,
    pub terms: usize,
    /// Bound on the omitted tail relative to `value`; `0` for exact sums.
    pub tail_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum NormOutcome {
    Converges(SeriesSum),
    Diverges { reason: String },
}

/// `ln |a_n|²` of the unnormalized amplitude at `x = |z|²`.
pub(crate) fn ln_weight(spec: &AlgebraSpec, family: Family, n: usize, ln_x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let ln_ff = spec
        .ln_f_factorial(n)
        .expect("index checked by the caller");
    let power = n as f64 * ln_x;
    match family {
        Family::Perelomov => ln_ff - 2.0 * ln_factorial(n as u32) + power,
        Family::BarutGirardello => -ln_ff + power,
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Sums `Σ |a_n|²` and returns it with the per-term log weights.
fn sum_weights(spec: &AlgebraSpec, family: Family, x: f64, basis: Basis) -> (SeriesSum, Vec<f64>) {
    let ln_x = x.ln();
    let mut logs = Vec::new();
    let mut ln_sum = f64::NEG_INFINITY;
    match basis.fixed_dim(spec) {
        Some(dim) => {
            for n in 0..dim {
                let t = ln_weight(spec, family, n, ln_x);
                ln_sum = ln_add(ln_sum, t);
                logs.push(t);
            }
            let sum = SeriesSum {
                value: ln_sum.exp(),
                ln_value: ln_sum,
                terms: dim,
                tail_bound: 0.0,
                converged: true,
            };
            (sum, logs)
        }
        None => {
            let cap = match basis {
                Basis::Series { cap } => cap,
                _ => unreachable!(),
            };
            let mut tail_bound = f64::INFINITY;
            let mut converged = false;
            for n in 0..cap {
                let t = ln_weight(spec, family, n, ln_x);
                ln_sum = ln_add(ln_sum, t);
                logs.push(t);
                if n == 0 {
                    continue;
                }
                // Term ratios decrease monotonically for every convergent
                // family, so the current ratio bounds all later ones.
                let ratio = (t - logs[n - 1]).exp();
                let rel = (t - ln_sum).exp();
                if ratio < 1.0 {
                    tail_bound = rel * ratio / (1.0 - ratio);
                    if rel < SERIES_REL_TOL {
                        converged = true;
                        break;
                    }
                } else {
                    tail_bound = f64::INFINITY;
                }
            }
            let sum = SeriesSum {
                value: ln_sum.exp(),
                ln_value: ln_sum,
                terms: logs.len(),
                tail_bound,
                converged,
            };
            (sum, logs)
        }
    }
}

/// Divergence verdict for the infinite Perelomov series at `x = |z|²`.
fn perelomov_divergence(spec: &AlgebraSpec, x: f64) -> Option<String> {
    let nonzero: Vec<f64> = spec.kappas().iter().copied().filter(|k| *k != 0.0).collect();
    match nonzero.len() {
        0 => None,
        1 => {
            let ell = 1.0 / nonzero[0];
            (x > 0.0 && x >= ell).then(|| format!("diverges: |z| ≥ √ℓ = {}", ell.sqrt()))
        }
        r => (x > 0.0).then(|| format!("diverges: {r} nonzero parameters give a zero radius of convergence")),
    }
}

/// `|𝒩|² = Σ F(n)!/(n!)² |z|^{2n}` over the basis.
pub fn perelomov_norm_sq(spec: &AlgebraSpec, z: Complex64, basis: Basis) -> Result<NormOutcome> {
    basis.validate(spec)?;
    let x = z.norm_sqr();
    if matches!(basis, Basis::Series { .. }) {
        if let Some(reason) = perelomov_divergence(spec, x) {
            return Ok(NormOutcome::Diverges { reason });
        }
    }
    Ok(NormOutcome::Converges(sum_weights(spec, Family::Perelomov, x, basis).0))
}

/// Closed forms of the Perelomov normalization for a single parameter:
/// `(1 - x/ℓ)^{-ℓ}` (infinite), `e^x` (harmonic) and
/// `(1 + x/(d-1))^{d-1}` (finite). Returned as a logarithm.
pub fn perelomov_ln_norm_sq_closed(spec: &AlgebraSpec, x: f64) -> Option<f64> {
    if spec.rank() != 1 {
        return None;
    }
    let kappa = spec.kappas()[0];
    match spec.class() {
        RepClass::Finite(d) => {
            let dm1 = d as f64 - 1.0;
            Some(dm1 * (x / dm1).ln_1p())
        }
        RepClass::Infinite if kappa == 0.0 => Some(x),
        RepClass::Infinite => {
            let ell = 1.0 / kappa;
            (x < ell).then(|| -ell * (-x / ell).ln_1p())
        }
    }
}

/// `|𝒩|² = Σ |z|^{2n}/F(n)!`, summed adaptively.
pub fn bg_norm_sq(spec: &AlgebraSpec, z: Complex64, cap: usize) -> Result<SeriesSum> {
    let basis = Basis::Series { cap };
    basis.validate(spec)?;
    Ok(sum_weights(spec, Family::BarutGirardello, z.norm_sqr(), basis).0)
}

/// `ln ₀F_r(ℓ₁,…,ℓ_r; ℓ₁⋯ℓ_r x)` over the nonzero parameters, which equals
/// `ln Σ x^n/F(n)!`. Evaluated independently of the state machinery.
pub fn bg_ln_norm_sq_hypergeometric(spec: &AlgebraSpec, x: f64) -> Result<f64> {
    if spec.class().is_finite() {
        return Err(Error::WrongClass { expected: "infinite" });
    }
    let ells: Vec<f64> = spec.kappas().iter().filter(|k| **k != 0.0).map(|k| 1.0 / k).collect();
    let arg = x * ells.iter().product::<f64>();
    if ells.len() == 1 {
        let l = ells[0].round();
        if (ells[0] - l).abs() < 1e-12 * l {
            return Ok(special::ln_hyp0f1_int(l as u32, arg));
        }
    }
    special::ln_hyp0f(&ells, arg, 1_000_000)
        .ok_or_else(|| Error::Divergent(format!("₀F_r series did not settle at x = {x}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct BosonicState {
    pub family: Family,
    pub spec: AlgebraSpec,
    pub z: Complex64,
    pub phi: f64,
    pub basis: Basis,
    pub coeffs: Vec<Complex64>,
    pub norm_sq: f64,
    pub tail_bound: f64,
    pub converged: bool,
}

impl BosonicState {
    /// `|c_n|²`, the number distribution.
    pub fn distribution(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn total_probability(&self) -> f64 {
        self.distribution().iter().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("state serializes");
        v["distribution"] = serde_json::json!(self.distribution());
        v
    }

    /// The same state for a different `φ` (and identical truncation).
    pub fn rebuilt_with_phi(&self, phi: f64) -> Result<Self> {
        build_state(&self.spec.with_phi(phi), self.family, self.z, self.basis)
    }
}

fn build_state(spec: &AlgebraSpec, family: Family, z: Complex64, basis: Basis) -> Result<BosonicState> {
    basis.validate(spec)?;
    let x = z.norm_sqr();
    let (sum, logs) = sum_weights(spec, family, x, basis);
    let phi = spec.phi();
    let arg = z.arg();
    let coeffs = logs
        .iter()
        .enumerate()
        .map(|(n, &t)| {
            let mag = (0.5 * (t - sum.ln_value)).exp();
            let f_n = spec.f_unchecked(n);
            Complex64::from_polar(mag, n as f64 * arg - f_n * phi)
        })
        .collect();
    Ok(BosonicState {
        family,
        spec: spec.clone(),
        z,
        phi,
        basis,
        coeffs,
        norm_sq: sum.value,
        tail_bound: sum.tail_bound,
        converged: sum.converged,
    })
}

/// Normalized Perelomov state `c_n ∝ √F(n)!/n! z^n e^{-iF(n)φ}`.
pub fn build_perelomov(spec: &AlgebraSpec, z: Complex64, basis: Basis) -> Result<BosonicState> {
    basis.validate(spec)?;
    if matches!(basis, Basis::Series { .. }) {
        if let Some(reason) = perelomov_divergence(spec, z.norm_sqr()) {
            return Err(Error::Divergent(reason));
        }
    }
    build_state(spec, Family::Perelomov, z, basis)
}

/// Normalized Barut–Girardello state `c_n ∝ z^n/√F(n)! e^{-iF(n)φ}`.
pub fn build_bg_bosonic(spec: &AlgebraSpec, z: Complex64, basis: Basis) -> Result<BosonicState> {
    if matches!(basis, Basis::Finite) {
        return Err(Error::WrongClass { expected: "infinite" });
    }
    build_state(spec, Family::BarutGirardello, z, basis)
}

fn rep_for(state: &BosonicState) -> Result<FockOperators> {
    match state.basis {
        Basis::Finite => fock::build_finite_rep(&state.spec),
        Basis::Truncated { s } => fock::build_truncated_rep(&state.spec, s),
        Basis::Series { .. } => Err(Error::Precondition("needs a finite-dimensional state".into())),
    }
}

fn column(v: &[Complex64]) -> CMatrix {
    CMatrix::from_column_slice(v.len(), 1, v)
}

/// Compares the state with `exp(z a⁺)|0⟩ / ‖·‖`, the exponential summed
/// exactly since `a⁺` is nilpotent.
pub fn verify_displacement_form(state: &BosonicState, tol: f64) -> Result<Report> {
    let ops = rep_for(state)?;
    let dim = ops.dim;
    let mut vacuum = vec![c(0.0, 0.0); dim];
    vacuum[0] = c(1.0, 0.0);
    let za = &ops.a_plus * state.z;
    let mut term = column(&vacuum);
    let mut sum = term.clone();
    for k in 1..dim {
        term = (&za * &term) / c(k as f64, 0.0);
        sum += &term;
    }
    let norm = sum.norm();
    sum /= c(norm, 0.0);
    let mut report = Report::new(format!("displacement form (dim = {dim})"));
    report.push(
        "exp(z a+)|0> / norm = state",
        matrix::max_diff(&sum, &column(&state.coeffs)),
        tol,
    );
    Ok(report)
}

/// Checks `e^{-iHt}|z, φ⟩ = |z, φ+t⟩`. On finite spaces `H = a⁺a⁻` is
/// formed as a matrix; in series mode its diagonal `F(n)` is used.
pub fn verify_temporal_stability(state: &BosonicState, t: f64, tol: f64) -> Result<Report> {
    let energies: Vec<f64> = match state.basis {
        Basis::Series { .. } => (0..state.coeffs.len()).map(|n| state.spec.f_unchecked(n)).collect(),
        _ => {
            let h = fock::hamiltonian(&rep_for(state)?);
            let off_diag = (0..h.nrows())
                .flat_map(|i| (0..h.ncols()).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .fold(0.0f64, |acc, ij| acc.max(h[ij].norm()));
            if off_diag > 0.0 {
                return Err(Error::Precondition("H is not diagonal in the number basis".into()));
            }
            (0..h.nrows()).map(|n| h[(n, n)].re).collect()
        }
    };
    let evolved: Vec<Complex64> = state
        .coeffs
        .iter()
        .zip(&energies)
        .map(|(cn, e)| cn * cis(-e * t))
        .collect();
    let target = state.rebuilt_with_phi(state.phi + t)?;
    let dev = evolved
        .iter()
        .zip(&target.coeffs)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
    let len_ok = evolved.len() == target.coeffs.len();
    let mut report = Report::new(format!("temporal stability (t = {t})"));
    report.push("exp(-iHt)|z,phi> = |z,phi+t>", if len_ok { dev } else { f64::INFINITY }, tol);
    Ok(report)
}

/// Checks `a⁻|z⟩ = z|z⟩` on every component below the truncation boundary.
/// Finite spaces use the `a⁻` matrix; series states use the index shift.
pub fn verify_bg_eigenstate(state: &BosonicState, tol: f64) -> Result<Report> {
    let len = state.coeffs.len();
    let lowered: Vec<Complex64> = match state.basis {
        Basis::Series { .. } => {
            let phi = state.phi;
            (0..len)
                .map(|n| {
                    if n + 1 >= len {
                        return c(0.0, 0.0);
                    }
                    let f1 = state.spec.f_unchecked(n + 1);
                    let f0 = state.spec.f_unchecked(n);
                    state.coeffs[n + 1] * cis((f1 - f0) * phi) * f1.sqrt()
                })
                .collect()
        }
        _ => {
            let ops = rep_for(state)?;
            (&ops.a_minus * column(&state.coeffs)).iter().copied().collect()
        }
    };
    let residual = (0..len.saturating_sub(1))
        .map(|n| (lowered[n] - state.z * state.coeffs[n]).norm())
        .fold(0.0f64, f64::max);
    let boundary = (lowered[len - 1] - state.z * state.coeffs[len - 1]).norm();
    let mut report = Report::new(format!("eigenstate of a- (z = {})", state.z));
    report.push("a-|z> = z|z> below the boundary", residual, tol);
    report.checks.last_mut().expect("just pushed").note =
        Some(format!("boundary component residual {boundary:.3e}"));
    Ok(report)
}

/// Grassmann-labelled Barut–Girardello state `Σ θ^n e^{-iF(n)φ}/√F(n)! |n⟩`,
/// kept unnormalized.
#[derive(Debug, Clone)]
pub struct GrassmannState {
    pub spec: AlgebraSpec,
    pub k: usize,
    pub phi: f64,
    pub truncated: bool,
    pub amplitudes: Vec<GrassmannElement>,
}

pub fn build_bg_grassmann(spec: &AlgebraSpec, k: usize) -> Result<GrassmannState> {
    let truncated = match spec.class() {
        RepClass::Finite(d) if d == k => false,
        RepClass::Finite(d) => {
            return Err(Error::Precondition(format!("order k = {k} must equal d = {d}")));
        }
        RepClass::Infinite if k >= 2 => true,
        RepClass::Infinite => {
            return Err(Error::Precondition(format!("order k = {k} must be at least 2")));
        }
    };
    let phi = spec.phi();
    let amplitudes = (0..k)
        .map(|n| {
            let scale = (-0.5 * spec.ln_f_factorial(n)?).exp();
            let value = cis(-spec.f_unchecked(n) * phi) * scale;
            Ok(GrassmannElement::monomial(k, n, 0, value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrassmannState {
        spec: spec.clone(),
        k,
        phi,
        truncated,
        amplitudes,
    })
}

fn fmt_real(x: f64) -> String {
    if x == x.round() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl GrassmannState {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": "bg-grassmann",
            "spec": self.spec,
            "order": self.k,
            "phi": self.phi,
            "truncated": self.truncated,
            "coeffs": self.amplitudes.iter().map(|a| a.to_canonical_string()).collect::<Vec<_>>(),
            "symbolic": self.to_string(),
        })
    }
}

/// Symbolic form with `φ` kept as a symbol, e.g. `|0⟩ + θ e^{−iφ}|1⟩`.
impl fmt::Display for GrassmannState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..self.k)
            .map(|n| {
                let mut parts = Vec::new();
                let scale = (-0.5 * self.spec.ln_f_factorial(n).unwrap_or(f64::NAN)).exp();
                if (scale - 1.0).abs() > 1e-15 {
                    parts.push(fmt_real(scale));
                }
                match n {
                    0 => {}
                    1 => parts.push("θ".into()),
                    _ => parts.push(format!("θ^{n}")),
                }
                let f_n = self.spec.f_unchecked(n);
                if f_n == 1.0 {
                    parts.push("e^{−iφ}".into());
                } else if f_n != 0.0 {
                    parts.push(format!("e^{{−i{}φ}}", fmt_real(f_n)));
                }
                let ket = format!("|{n}⟩");
                if parts.is_empty() {
                    ket
                } else {
                    format!("{}{ket}", parts.join(" "))
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `⟨θ,φ|θ,φ⟩` with the bra of `θ^n` taken as `θ̄^n` (conjugated scalar)
/// placed left of the ket factor.
#[derive(Debug, Clone)]
pub struct GrassmannNorm {
    pub element: GrassmannElement,
    /// Realized phase of the `n`-th term against `(θ̄θ)^n/F(n)!`.
    pub phases_theta_bar_theta: Vec<Complex64>,
    /// Realized phase of the `n`-th term against `(θθ̄)^n/F(n)!`.
    pub phases_theta_theta_bar: Vec<Complex64>,
}

pub fn bg_grassmann_norm(state: &GrassmannState) -> Result<GrassmannNorm> {
    let k = state.k;
    let mut element = GrassmannElement::zero(k);
    let mut phases_bar_first = Vec::with_capacity(k);
    let mut phases_theta_first = Vec::with_capacity(k);
    let theta = GrassmannElement::theta(k);
    let theta_bar = GrassmannElement::theta_bar(k);
    let bar_first = theta_bar.multiply(&theta)?;
    let theta_first = theta.multiply(&theta_bar)?;
    for (n, ket) in state.amplitudes.iter().enumerate() {
        let coeff = ket.coeff(n, 0);
        let bra = GrassmannElement::monomial(k, 0, n, coeff.conj());
        let term = bra.multiply(ket)?;
        element = &element + &term;

        let weight = 1.0 / state.spec.f_factorial(n)?;
        let realized = term.coeff(n, n) / weight;
        for (reference, out) in [(&bar_first, &mut phases_bar_first), (&theta_first, &mut phases_theta_first)] {
            let r = reference.pow(n).coeff(n, n);
            out.push(realized / r);
        }
    }
    Ok(GrassmannNorm {
        element,
        phases_theta_bar_theta: phases_bar_first,
        phases_theta_theta_bar: phases_theta_first,
    })
}

/// Compares the realized norm phases with `exp[−iπ n(n−1)/(2k)]` against the
/// `(θ̄θ)^n` reference, and records the `(θθ̄)^n` phases alongside.
pub fn verify_bg_grassmann_norm(state: &GrassmannState, tol: f64) -> Result<Report> {
    let norm = bg_grassmann_norm(state)?;
    let k = state.k as f64;
    let mut report = Report::new(format!("Grassmann norm phases (k = {})", state.k));
    for (n, (bar_first, theta_first)) in norm
        .phases_theta_bar_theta
        .iter()
        .zip(&norm.phases_theta_theta_bar)
        .enumerate()
    {
        let nf = n as f64;
        let expected = cis(-std::f64::consts::PI * nf * (nf - 1.0) / (2.0 * k));
        report.push(format!("phase of term {n} vs (θ̄θ)^n"), (bar_first - expected).norm(), tol);
        report.checks.last_mut().expect("just pushed").note = Some(format!(
            "against (θθ̄)^n: arg = {:.6}",
            theta_first.arg()
        ));
    }
    Ok(report)
}

/// Checks `op|θ,φ⟩ = λ θ|θ,φ⟩`, with `op` a `k × k` scalar matrix acting on
/// the vector of Grassmann amplitudes.
pub fn verify_grassmann_eigen(state: &GrassmannState, op: &CMatrix, lambda: f64, tol: f64) -> Result<Report> {
    let k = state.k;
    if op.shape() != (k, k) {
        return Err(Error::ShapeMismatch { left: op.shape(), right: (k, k) });
    }
    let theta = GrassmannElement::theta(k).scale(c(lambda, 0.0));
    let mut worst = 0.0f64;
    let mut support_ok = true;
    for m in 0..k {
        let lhs = (0..k).fold(GrassmannElement::zero(k), |acc, n| {
            &acc + &state.amplitudes[n].scale(op[(m, n)])
        });
        let rhs = theta.multiply(&state.amplitudes[m])?;
        worst = worst.max(lhs.max_diff(&rhs));
        support_ok &= lhs.terms().map(|t| t.0).eq(rhs.terms().map(|t| t.0))
            || lhs.max_diff(&rhs) <= tol;
    }
    let mut report = Report::new(format!("Grassmann eigenvalue relation (k = {k}, λ = {lambda})"));
    report.push("op|θ,φ> = λθ|θ,φ>", worst, tol);
    report.push_flag("monomial support agrees", support_ok, "");
    Ok(report)
}

/// `a⁻|θ,φ⟩ = θ|θ,φ⟩`.
pub fn verify_bg_grassmann_eigenstate(state: &GrassmannState, ops: &FockOperators, tol: f64) -> Result<Report> {
    if ops.dim != state.k {
        return Err(Error::Precondition(format!(
            "representation dimension {} differs from order {}",
            ops.dim, state.k
        )));
    }
    verify_grassmann_eigen(state, &ops.a_minus, 1.0, tol)
}

/// su(2) generators `J± = a±/√(−κ)`, `J₃ = (I + 2κN)/(2κ)` with `j = −1/(2κ)`.
#[derive(Debug, Clone)]
pub struct Su2 {
    pub j: f64,
    pub minus: CMatrix,
    pub plus: CMatrix,
    pub three: CMatrix,
}

/// su(1,1) generators `K± = a±/√κ`, `K₃ = (I + 2κN)/(2κ)` with `b = 1/(2κ)`.
#[derive(Debug, Clone)]
pub struct Su11 {
    pub b: f64,
    pub minus: CMatrix,
    pub plus: CMatrix,
    pub three: CMatrix,
}

fn three(ops: &FockOperators, kappa: f64) -> CMatrix {
    matrix::real_diagonal((0..ops.dim).map(|n| (1.0 + 2.0 * kappa * n as f64) / (2.0 * kappa)))
}

pub fn su2_generators(ops: &FockOperators) -> Result<Su2> {
    if ops.truncated || ops.spec.rank() != 1 || !ops.spec.class().is_finite() {
        return Err(Error::Precondition("su(2) needs a finite representation with r = 1".into()));
    }
    let kappa = ops.spec.kappas()[0];
    let s = c((-kappa).sqrt().recip(), 0.0);
    Ok(Su2 {
        j: -1.0 / (2.0 * kappa),
        minus: &ops.a_minus * s,
        plus: &ops.a_plus * s,
        three: three(ops, kappa),
    })
}

pub fn su11_generators(ops: &FockOperators) -> Result<Su11> {
    let kappa = ops.spec.kappas()[0];
    if !ops.truncated || ops.spec.rank() != 1 || kappa <= 0.0 {
        return Err(Error::Precondition("su(1,1) needs a truncated representation with r = 1, κ > 0".into()));
    }
    let s = c(kappa.sqrt().recip(), 0.0);
    Ok(Su11 {
        b: 1.0 / (2.0 * kappa),
        minus: &ops.a_minus * s,
        plus: &ops.a_plus * s,
        three: three(ops, kappa),
    })
}

pub fn verify_su2(g: &Su2, tol: f64) -> Report {
    let dim = g.three.nrows();
    let mut report = Report::new(format!("su(2) generators (j = {})", g.j));
    let comm = &g.plus * &g.minus - &g.minus * &g.plus;
    report.push("[J+, J-] = 2 J3", matrix::max_diff(&comm, &(&g.three * c(2.0, 0.0))), tol);
    let c3p = &g.three * &g.plus - &g.plus * &g.three;
    report.push("[J3, J+] = J+", matrix::max_diff(&c3p, &g.plus), tol);
    let c3m = &g.three * &g.minus - &g.minus * &g.three;
    report.push("[J3, J-] = -J-", matrix::max_diff(&c3m, &(-&g.minus)), tol);
    let casimir = &g.three * &g.three + (&g.plus * &g.minus + &g.minus * &g.plus) * c(0.5, 0.0);
    let expected = CMatrix::identity(dim, dim) * c(g.j * (g.j + 1.0), 0.0);
    report.push("Casimir = j(j+1) I", matrix::max_diff(&casimir, &expected), tol);
    report
}

/// The su(1,1) relations; `[K₋, K₊] = 2K₃` is checked away from the
/// truncation boundary `|s−1⟩`, whose deviation is recorded separately.
pub fn verify_su11(g: &Su11, tol: f64) -> Report {
    let dim = g.three.nrows();
    let mut report = Report::new(format!("su(1,1) generators (b = {}, s = {dim})", g.b));
    let comm = &g.minus * &g.plus - &g.plus * &g.minus;
    let diff = comm - &g.three * c(2.0, 0.0);
    let last = dim - 1;
    let interior = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .filter(|&(i, j)| i != last && j != last)
        .fold(0.0f64, |acc, ij| acc.max(diff[ij].norm()));
    report.push("[K-, K+] = 2 K3 off the boundary", interior, tol);
    let boundary = diff[(last, last)].norm();
    report.push_flag(
        "boundary state |s-1> deviates",
        boundary > tol,
        format!("deviation {boundary:.6e}"),
    );
    let c3p = &g.three * &g.plus - &g.plus * &g.three;
    report.push("[K3, K+] = K+", matrix::max_diff(&c3p, &g.plus), tol);
    let c3m = &g.three * &g.minus - &g.minus * &g.three;
    report.push("[K3, K-] = -K-", matrix::max_diff(&c3m, &(-&g.minus)), tol);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unwrap_sum(outcome: NormOutcome) -> SeriesSum {
        match outcome {
            NormOutcome::Converges(s) => s,
            NormOutcome::Diverges { reason } => panic!("unexpected divergence: {reason}"),
        }
    }

    #[test]
    fn perelomov_norm_examples() {
        let spec = AlgebraSpec::from_ells(&[2], 0.0).unwrap();
        let s = unwrap_sum(perelomov_norm_sq(&spec, z(0.0, 0.0), Basis::Series { cap: 500 }).unwrap());
        assert_eq!(s.value, 1.0);
        let s = unwrap_sum(perelomov_norm_sq(&spec, z(0.6, 0.8), Basis::Series { cap: 500 }).unwrap());
        assert!(s.converged);
        assert_relative_eq!(s.value, 4.0, max_relative = 1e-12);

        let fin = AlgebraSpec::finite(5, &[], 0.0).unwrap();
        let w = z(0.7, -1.1);
        let s = unwrap_sum(perelomov_norm_sq(&fin, w, Basis::Finite).unwrap());
        let closed = (1.0 + w.norm_sqr() / 4.0).powi(4);
        assert_relative_eq!(s.value, closed, max_relative = 1e-12);
        assert_relative_eq!(
            s.ln_value,
            perelomov_ln_norm_sq_closed(&fin, w.norm_sqr()).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn divergence_verdicts() {
        let two = AlgebraSpec::new(vec![0.5, 0.25], 0.0).unwrap();
        let out = perelomov_norm_sq(&two, z(0.01, 0.0), Basis::Series { cap: 500 }).unwrap();
        assert!(matches!(out, NormOutcome::Diverges { .. }));
        let one = AlgebraSpec::new(vec![0.5], 0.0).unwrap();
        let out = perelomov_norm_sq(&one, z(1.5, 0.0), Basis::Series { cap: 500 }).unwrap();
        match out {
            NormOutcome::Diverges { reason } => assert!(reason.starts_with("diverges: |z| ≥ √ℓ")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            build_perelomov(&one, z(1.5, 0.0), Basis::Series { cap: 500 }),
            Err(Error::Divergent(_))
        ));
        // One nonzero parameter among several behaves like r = 1.
        let mixed = AlgebraSpec::new(vec![0.5, 0.0], 0.0).unwrap();
        assert!(matches!(
            perelomov_norm_sq(&mixed, z(1.0, 0.0), Basis::Series { cap: 500 }).unwrap(),
            NormOutcome::Converges(_)
        ));
    }

    #[test]
    fn perelomov_states() {
        let fin = AlgebraSpec::finite(2, &[], 0.0).unwrap();
        let s = build_perelomov(&fin, z(1.0, 0.0), Basis::Finite).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(s.coeffs[0].re, h, max_relative = 1e-15);
        assert_relative_eq!(s.coeffs[1].re, h, max_relative = 1e-15);

        let harmonic = AlgebraSpec::harmonic(0.0);
        let w = z(0.3, 0.4);
        let s = build_perelomov(&harmonic, w, Basis::Truncated { s: 6 }).unwrap();
        let raw: Vec<Complex64> = (0..6)
            .map(|n| w.powu(n as u32) / (ln_factorial(n as u32).exp()).sqrt())
            .collect();
        let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for (a, b) in s.coeffs.iter().zip(&raw) {
            assert!((a - b / norm).norm() < 1e-15);
        }
        let vac = build_perelomov(&fin, z(0.0, 0.0), Basis::Finite).unwrap();
        assert_eq!(vac.coeffs, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn displacement_and_stability() {
        let fin = AlgebraSpec::finite(4, &[], 0.4).unwrap();
        let s = build_perelomov(&fin, z(0.8, -0.3), Basis::Finite).unwrap();
        assert!(verify_displacement_form(&s, 1e-12).unwrap().passed());
        assert!(verify_temporal_stability(&s, 1.3, 1e-12).unwrap().passed());

        let inf = AlgebraSpec::new(vec![0.5, 1.0 / 3.0], 1.1).unwrap();
        let s = build_perelomov(&inf, z(-0.6, 0.9), Basis::Truncated { s: 5 }).unwrap();
        assert!(verify_displacement_form(&s, 1e-12).unwrap().passed());

        let bg = build_bg_bosonic(&AlgebraSpec::from_ells(&[2], 0.2).unwrap(), z(1.0, 0.5), Basis::Series { cap: 40 })
            .unwrap();
        assert!(verify_temporal_stability(&bg, 0.5, 1e-10).unwrap().passed());
        assert!(verify_temporal_stability(&bg, 0.0, 0.0).unwrap().passed());
    }

    #[test]
    fn limit_to_harmonic() {
        // The relative gap at fixed n shrinks like n(n-1)/(4(d-1)).
        let w = z(0.7, 0.2);
        let worst_gap = |d: usize| {
            let s = build_perelomov(&AlgebraSpec::finite(d, &[], 0.0).unwrap(), w, Basis::Finite).unwrap();
            let norm = (w.norm_sqr()).exp().sqrt();
            (0..=6u32)
                .map(|n| {
                    let expected = w.powu(n) / (ln_factorial(n).exp().sqrt() * norm);
                    (s.coeffs[n as usize] - expected).norm() / expected.norm()
                })
                .fold(0.0f64, f64::max)
        };
        let gaps: Vec<f64> = [64, 256, 1024, 4096].iter().map(|&d| worst_gap(d)).collect();
        assert!(gaps.windows(2).all(|p| p[1] < 0.3 * p[0]), "{gaps:?}");
        assert!(gaps[3] < 1e-2);
    }

    #[test]
    fn bg_norm_against_hypergeometric() {
        for ell in 1..=4u32 {
            let spec = AlgebraSpec::from_ells(&[ell], 0.0).unwrap();
            for &x in &[0.0f64, 0.5, 1.0, 7.0] {
                let s = bg_norm_sq(&spec, z(x.sqrt(), 0.0), 500).unwrap();
                let oracle = bg_ln_norm_sq_hypergeometric(&spec, x).unwrap().exp();
                assert_relative_eq!(s.value, oracle, max_relative = 1e-12);
            }
        }
        let spec = AlgebraSpec::from_ells(&[2, 3], 0.0).unwrap();
        let s = bg_norm_sq(&spec, z(1.2, 0.3), 500).unwrap();
        let oracle = bg_ln_norm_sq_hypergeometric(&spec, 1.2f64.powi(2) + 0.09).unwrap().exp();
        assert_relative_eq!(s.value, oracle, max_relative = 1e-12);
    }

    #[test]
    fn bg_states() {
        let glauber = AlgebraSpec::new(vec![0.0, 0.0], 0.0).unwrap();
        let w = z(1.0, 0.0);
        let s = build_bg_bosonic(&glauber, w, Basis::Series { cap: 500 }).unwrap();
        for (n, cn) in s.coeffs.iter().enumerate().take(10) {
            let poisson = (-1.0f64).exp() / ln_factorial(n as u32).exp();
            assert_relative_eq!(cn.norm_sqr(), poisson, max_relative = 1e-12);
        }
        assert!((s.total_probability() - 1.0).abs() < 1e-12);

        let spec = AlgebraSpec::from_ells(&[3], 0.0).unwrap();
        let w = z(0.9, 0.0);
        let s = build_bg_bosonic(&spec, w, Basis::Series { cap: 500 }).unwrap();
        let raw: Vec<f64> = (0..s.coeffs.len() as u32)
            .map(|n| {
                let l = 3.0f64;
                let ln = n as f64 * l.ln() + ln_factorial(2) - ln_factorial(n) - ln_factorial(n + 2);
                (0.5 * ln).exp() * w.re.powi(n as i32)
            })
            .collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (a, b) in s.coeffs.iter().zip(&raw) {
            assert!((a.re - b / norm).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_check_distinguishes_families() {
        let spec = AlgebraSpec::from_ells(&[2], 0.3).unwrap();
        let w = z(0.6, 0.8);
        let bg = build_bg_bosonic(&spec, w, Basis::Series { cap: 60 }).unwrap();
        assert!(verify_bg_eigenstate(&bg, 1e-10).unwrap().passed());
        let per = build_perelomov(&spec, z(0.3, 0.4), Basis::Series { cap: 500 }).unwrap();
        let rep = verify_bg_eigenstate(&per, 1e-3).unwrap();
        assert!(!rep.passed());
        assert!(rep.max_residual() >= 1e-3);

        let vac = build_bg_bosonic(&spec, z(0.0, 0.0), Basis::Truncated { s: 4 }).unwrap();
        assert!(verify_bg_eigenstate(&vac, 0.0).unwrap().passed());
    }

    #[test]
    fn grassmann_qubit() {
        let spec = AlgebraSpec::finite(2, &[], 0.0).unwrap();
        let state = build_bg_grassmann(&spec, 2).unwrap();
        assert_eq!(state.to_string(), "|0⟩ + θ e^{−iφ}|1⟩");
        let ops = fock::build_finite_rep(&spec).unwrap();
        assert!(verify_bg_grassmann_eigenstate(&state, &ops, 0.0).unwrap().passed());
        assert!(build_bg_grassmann(&spec, 3).is_err());
    }

    #[test]
    fn grassmann_truncated_harmonic() {
        let spec = AlgebraSpec::harmonic(0.7);
        let state = build_bg_grassmann(&spec, 4).unwrap();
        assert!(state.truncated);
        for n in 0..4 {
            let expected = cis(-(n as f64) * 0.7) / ln_factorial(n as u32).exp().sqrt();
            assert!((state.amplitudes[n].coeff(n, 0) - expected).norm() < 1e-15);
        }
        let ops = fock::build_truncated_rep(&spec, 4).unwrap();
        assert!(verify_bg_grassmann_eigenstate(&state, &ops, 1e-14).unwrap().passed());
    }

    #[test]
    fn grassmann_two_parameter() {
        let spec = AlgebraSpec::finite(4, &[0.5], 0.9).unwrap();
        let state = build_bg_grassmann(&spec, 4).unwrap();
        let ops = fock::build_finite_rep(&spec).unwrap();
        assert!(verify_bg_grassmann_eigenstate(&state, &ops, 1e-14).unwrap().passed());
    }

    #[test]
    fn grassmann_norm_phases() {
        for d in 2..=6 {
            let spec = AlgebraSpec::finite(d, &[], 0.3).unwrap();
            let state = build_bg_grassmann(&spec, d).unwrap();
            let rep = verify_bg_grassmann_norm(&state, 1e-14).unwrap();
            assert!(rep.passed(), "{rep}");
            let norm = bg_grassmann_norm(&state).unwrap();
            assert_eq!(norm.element.coeff(0, 0), c(1.0, 0.0));
            assert_relative_eq!(norm.element.coeff(1, 1).norm(), 1.0 / spec.f_factorial(1).unwrap(), max_relative = 1e-15);
        }
        let spec = AlgebraSpec::finite(4, &[], 0.0).unwrap();
        let norm = bg_grassmann_norm(&build_bg_grassmann(&spec, 4).unwrap()).unwrap();
        assert!((norm.phases_theta_bar_theta[2] - cis(-std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
    }

    #[test]
    fn su2() {
        let spec = AlgebraSpec::finite(2, &[], 0.0).unwrap();
        let g = su2_generators(&fock::build_finite_rep(&spec).unwrap()).unwrap();
        assert_eq!(g.j, 0.5);
        assert!(matrix::max_diff(&g.three, &matrix::real_diagonal([-0.5, 0.5])) < 1e-15);
        for d in 2..=6 {
            let spec = AlgebraSpec::finite(d, &[], 0.4).unwrap();
            let ops = fock::build_finite_rep(&spec).unwrap();
            let g = su2_generators(&ops).unwrap();
            assert!(verify_su2(&g, 1e-12).passed());
            let state = build_bg_grassmann(&spec, d).unwrap();
            let lambda = (2.0 * g.j).sqrt();
            assert!(verify_grassmann_eigen(&state, &g.minus, lambda, 1e-12).unwrap().passed());
        }
    }

    #[test]
    fn su11() {
        let spec = AlgebraSpec::new(vec![0.5], 0.2).unwrap();
        let ops = fock::build_truncated_rep(&spec, 6).unwrap();
        let g = su11_generators(&ops).unwrap();
        assert_eq!(g.b, 1.0);
        let rep = verify_su11(&g, 1e-12);
        assert!(rep.passed(), "{rep}");
        let state = build_bg_grassmann(&spec, 6).unwrap();
        let lambda = (2.0 * g.b).sqrt();
        assert!(verify_grassmann_eigen(&state, &g.minus, lambda, 1e-12).unwrap().passed());
        // Amplitudes √((2b−1)!/(n!(2b+n−1)!)) (√(2b))^n for 2b = 2.
        for n in 0..6u32 {
            let expected = (ln_factorial(1) - ln_factorial(n) - ln_factorial(n + 1)).exp().sqrt() * 2f64.sqrt().powi(n as i32);
            assert_relative_eq!(state.amplitudes[n as usize].coeff(n as usize, 0).norm(), expected, max_relative = 1e-14);
        }
        assert!(su11_generators(&fock::build_finite_rep(&AlgebraSpec::finite(3, &[], 0.0).unwrap()).unwrap()).is_err());
    }

    #[test]
    fn json_export() {
        let spec = AlgebraSpec::finite(3, &[], 0.0).unwrap();
        let s = build_perelomov(&spec, z(0.5, 0.0), Basis::Finite).unwrap();
        let v = s.to_json();
        assert_eq!(v["family"], "perelomov");
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 3);
        assert_eq!(v["distribution"].as_array().unwrap().len(), 3);
        let g = build_bg_grassmann(&spec, 3).unwrap().to_json();
        assert_eq!(g["order"], 3);
        assert_eq!(g["coeffs"][0], "(1.0+0.0i)");
    }
}
