//! Radial measures resolving the identity for coherent-state families.
//!
//! For an isotropic measure `dμ = (1/π) w(|z|²) d²z`, the angular integral
//! kills every off-diagonal element of `∫dμ |z⟩⟨z|`, and the diagonal reduces
//! to `∫ w(x) |c_n(x)|² dx` with `c_n` the normalized amplitudes.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{AlgebraSpec, RepClass};
use crate::coherent::{self, Family};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};
use crate::special::{self, ln_factorial};

type LnWeight = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    /// `ln w(x)` on `[0, support)`; `scale` sets the length unit of the
    /// semi-infinite map.
    Density { ln_weight: LnWeight, support: f64, scale: f64 },
    /// Point masses `(x_j, m_j)`: `∫ f dμ = Σ m_j f(x_j)`.
    Atomic { points: Vec<(f64, f64)> },
}

#[derive(Clone)]
pub struct RadialMeasure {
    name: String,
    shape: Shape,
    factor: f64,
}

impl fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialMeasure")
            .field("name", &self.name)
            .field("support", &self.support())
            .field("factor", &self.factor)
            .finish()
    }
}

impl RadialMeasure {
    pub fn density(name: impl Into<String>, ln_weight: impl Fn(f64) -> f64 + Send + Sync + 'static, support: f64, scale: f64) -> Self {
        Self {
            name: name.into(),
            shape: Shape::Density {
                ln_weight: Arc::new(ln_weight),
                support,
                scale,
            },
            factor: 1.0,
        }
    }

    pub fn atomic(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            shape: Shape::Atomic { points },
            factor: 1.0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Right end of the support (`∞` for unbounded supports).
    pub fn support(&self) -> f64 {
        match &self.shape {
            Shape::Density { support, .. } => *support,
            Shape::Atomic { points } => points.iter().fold(0.0, |acc, p| acc.max(p.0)),
        }
    }

    /// `w(x)` for densities; `0` for atomic measures.
    pub fn weight(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Density { ln_weight, support, .. } if x >= 0.0 && x < *support => {
                self.factor * ln_weight(x).exp()
            }
            _ => 0.0,
        }
    }

    /// The same measure multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            name: format!("{} x {factor}", self.name),
            factor: self.factor * factor,
            ..self.clone()
        }
    }
}

/// `((ℓ-1)/ℓ)(1 - x/ℓ)^{-2}` on `[0, ℓ)`, for the infinite `r = 1` Perelomov
/// family. Needs `ℓ > 1`.
pub fn perelomov_infinite_measure(ell: f64) -> Result<RadialMeasure> {
    if !(ell.is_finite() && ell > 1.0) {
        return Err(Error::Precondition(format!("ℓ = {ell} must exceed 1")));
    }
    let lead = ((ell - 1.0) / ell).ln();
    Ok(RadialMeasure::density(
        format!("perelomov-infinite(l={ell})"),
        move |x| lead - 2.0 * (-x / ell).ln_1p(),
        ell,
        ell,
    ))
}

/// `(d/(d-1))(1 + x/(d-1))^{-2}` on `[0, ∞)`, for the finite `r = 1`
/// Perelomov family.
pub fn perelomov_finite_measure(d: usize) -> Result<RadialMeasure> {
    if d < 2 {
        return Err(Error::Precondition(format!("dimension d = {d} must be at least 2")));
    }
    let dm1 = d as f64 - 1.0;
    let lead = (d as f64 / dm1).ln();
    Ok(RadialMeasure::density(
        format!("perelomov-finite(d={d})"),
        move |x| lead - 2.0 * (x / dm1).ln_1p(),
        f64::INFINITY,
        dm1,
    ))
}

/// `2ℓ K_{ℓ-1}(2√(ℓx)) I_{ℓ-1}(2√(ℓx))` on `[0, ∞)`, for the `r = 1`
/// Barut–Girardello family.
pub fn bg_bessel_measure(ell: u32) -> Result<RadialMeasure> {
    if ell == 0 {
        return Err(Error::Precondition("ℓ must be a positive integer".into()));
    }
    let nu = ell - 1;
    let lead = (2.0 * ell as f64).ln();
    Ok(RadialMeasure::density(
        format!("bg-bessel(l={ell})"),
        move |x| {
            let y = 2.0 * (ell as f64 * x).sqrt();
            // K_ν I_ν → 1/(2ν) as y → 0 for ν > 0, with O(y²) corrections.
            if nu > 0 && y < 1e-8 {
                return lead - (2.0 * nu as f64).ln();
            }
            if y == 0.0 {
                return f64::INFINITY;
            }
            lead + special::bessel_k_scaled(nu, y).ln() + special::bessel_i_scaled(nu, y).ln()
        },
        f64::INFINITY,
        1.0 / ell as f64,
    ))
}

/// A coherent-state family seen through its normalized number
/// distribution `p_n(x) = |c_n(x)|²` at `x = |z|²`.
#[derive(Debug, Clone)]
pub struct FrameFamily {
    pub family: Family,
    pub spec: AlgebraSpec,
}

impl FrameFamily {
    pub fn new(family: Family, spec: AlgebraSpec) -> Result<Self> {
        let nonzero = spec.nonzero_kappas();
        match (family, spec.class()) {
            (Family::Perelomov, RepClass::Infinite) if nonzero > 1 => {
                return Err(Error::Divergent("the Perelomov family needs at most one nonzero parameter".into()));
            }
            (Family::BarutGirardello, RepClass::Finite(_)) => {
                return Err(Error::WrongClass { expected: "infinite" });
            }
            _ => {}
        }
        Ok(Self { family, spec })
    }

    /// Number states covered (`None` when unbounded).
    pub fn dim(&self) -> Option<usize> {
        self.spec.dim()
    }

    fn check_n(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if n >= d => Err(Error::OutOfRange { n, limit: d - 1 }),
            _ => Ok(()),
        }
    }

    /// `ln |𝒩(x)|²`.
    pub fn ln_norm_sq(&self, x: f64) -> Result<f64> {
        match self.family {
            Family::Perelomov => {
                if let Some(v) = coherent::perelomov_ln_norm_sq_closed(&self.spec, x) {
                    return Ok(v);
                }
                let basis = match self.spec.class() {
                    RepClass::Finite(_) => coherent::Basis::Finite,
                    RepClass::Infinite => coherent::Basis::Series { cap: 100_000 },
                };
                match coherent::perelomov_norm_sq(&self.spec, num_complex::Complex64::new(x.sqrt(), 0.0), basis)? {
                    coherent::NormOutcome::Converges(s) => Ok(s.ln_value),
                    coherent::NormOutcome::Diverges { reason } => Err(Error::Divergent(reason)),
                }
            }
            Family::BarutGirardello => coherent::bg_ln_norm_sq_hypergeometric(&self.spec, x),
        }
    }

    /// `ln p_n(x)`.
    pub fn ln_probability(&self, n: usize, x: f64) -> Result<f64> {
        self.check_n(n)?;
        if x <= 0.0 {
            return Ok(if n == 0 { 0.0 } else { f64::NEG_INFINITY });
        }
        Ok(coherent::ln_weight(&self.spec, self.family, n, x.ln()) - self.ln_norm_sq(x)?)
    }

    /// Moments `∫ x^n dρ` a radial density `ρ` must have for
    /// `dμ = |𝒩(x)|² dρ` to resolve the identity: `(n!)²/F(n)!` for
    /// Perelomov, `F(n)!` for Barut–Girardello.
    pub fn moment_targets(&self, count: usize) -> Result<Vec<f64>> {
        (0..count)
            .map(|n| {
                self.check_n(n)?;
                let ln_ff = self.spec.ln_f_factorial(n)?;
                Ok(match self.family {
                    Family::Perelomov => (2.0 * ln_factorial(n as u32) - ln_ff).exp(),
                    Family::BarutGirardello => ln_ff.exp(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameValue {
    pub value: f64,
    pub error: f64,
}

/// `⟨n| ∫dμ |z,φ⟩⟨z,φ| |n⟩`; equals 1 for every `n` when the measure
/// resolves the identity.
pub fn frame_diagonal(family: &FrameFamily, measure: &RadialMeasure, n: usize, quad_tol: f64) -> Result<FrameValue> {
    family.check_n(n)?;
    match &measure.shape {
        Shape::Atomic { points } => {
            let mut value = 0.0;
            for &(x, mass) in points {
                value += mass * family.ln_probability(n, x)?.exp();
            }
            Ok(FrameValue {
                value: measure.factor * value,
                error: 0.0,
            })
        }
        Shape::Density { ln_weight, support, scale } => {
            // The weight and the normalized amplitude are combined in log
            // form, so edge singularities of w cancel before exponentiation.
            let integrand = |x: f64| {
                if x <= 0.0 {
                    return 0.0;
                }
                match family.ln_probability(n, x) {
                    Ok(lp) if lp == f64::NEG_INFINITY => 0.0,
                    Ok(lp) => (ln_weight(x) + lp).exp(),
                    Err(_) => f64::NAN,
                }
            };
            let opts = QuadOptions {
                abs_tol: 1e-2 * quad_tol,
                rel_tol: quad_tol,
                max_intervals: 20_000,
            };
            let r = if support.is_finite() {
                quadrature::integrate(integrand, 0.0, *support, opts)?
            } else {
                quadrature::integrate_to_infinity(integrand, 0.0, scale * (1.0 + n as f64), opts)?
            };
            if !r.value.is_finite() {
                return Err(Error::QuadratureFailed { value: r.value, error: r.error });
            }
            Ok(FrameValue {
                value: measure.factor * r.value,
                error: measure.factor * r.error,
            })
        }
    }
}

/// `⟨m| ∫dμ |z,φ⟩⟨z,φ| |n⟩`. Off the diagonal the angular integral of
/// `e^{i(n-m)θ}` vanishes identically.
pub fn frame_element(family: &FrameFamily, measure: &RadialMeasure, m: usize, n: usize, quad_tol: f64) -> Result<FrameValue> {
    if m != n {
        family.check_n(m)?;
        family.check_n(n)?;
        return Ok(FrameValue { value: 0.0, error: 0.0 });
    }
    frame_diagonal(family, measure, n, quad_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentFit {
    pub grid: Vec<f64>,
    /// Nonnegative point masses, one per grid point.
    pub weights: Vec<f64>,
    /// `sqrt(Σ_n (Σ_j w_j x_j^n − t_n)² / t_n²)`.
    pub residual: f64,
    pub iterations: usize,
}

/// `count` points spaced geometrically on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|j| lo * (ratio * j as f64).exp()).collect()
}

/// Nonnegative weights matching `∫ x^n dρ = t_n` for `n < targets.len()`
/// on the given abscissae, by Lawson–Hanson nonnegative least squares on
/// the relative residuals.
pub fn fit_discrete_measure(targets: &[f64], grid: &[f64]) -> Result<MomentFit> {
    if targets.is_empty() || targets.iter().any(|t| t.is_nan() || *t <= 0.0) {
        return Err(Error::Precondition("targets must be positive".into()));
    }
    if grid.len() < targets.len() || grid.iter().any(|x| x.is_nan() || *x <= 0.0) {
        return Err(Error::Precondition(
            "the grid needs at least as many positive points as targets".into(),
        ));
    }
    let a = DMatrix::from_fn(targets.len(), grid.len(), |n, j| grid[j].powi(n as i32) / targets[n]);
    let b = DVector::from_element(targets.len(), 1.0);
    let (x, iterations) = nnls(&a, &b, 50 * grid.len())?;
    let residual = (&a * &x - &b).norm();
    Ok(MomentFit {
        grid: grid.to_vec(),
        weights: x.iter().copied().collect(),
        residual,
        iterations,
    })
}

/// Lawson–Hanson active-set solver for `min ‖Ax − b‖, x ≥ 0`.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> Result<(DVector<f64>, usize)> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 10.0 * f64::EPSILON * a.norm() * a.nrows().max(n) as f64;
    let mut iterations = 0;
    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match candidate {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => return Ok((x, iterations)),
        }
        loop {
            iterations += 1;
            if iterations > max_iter {
                let residual = (a * &x - b).norm();
                return Err(Error::FitFailed { iterations, residual });
            }
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let s_sub = sub
                .svd(true, true)
                .solve(b, 1e-15)
                .map_err(|e| Error::Precondition(format!("least-squares step failed: {e}")))?;
            if s_sub.iter().all(|v| *v > 0.0) {
                x.fill(0.0);
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = s_sub[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if s_sub[k] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - s_sub[k]));
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (s_sub[k] - x[j]);
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
}

/// Atomic frame measure from a moment fit: masses `ρ_j |𝒩(x_j)|²`.
pub fn atomic_frame_measure(family: &FrameFamily, fit: &MomentFit) -> Result<RadialMeasure> {
    let points = fit
        .grid
        .iter()
        .zip(&fit.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(&x, &w)| Ok((x, w * family.ln_norm_sq(x)?.exp())))
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialMeasure::atomic("fitted-atomic", points))
}

/// One row of a measure check report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameRow {
    pub family: String,
    pub spec: String,
    pub n: usize,
    pub value: f64,
    pub error: f64,
}

pub fn spec_label(spec: &AlgebraSpec) -> String {
    spec.kappas().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";")
}

/// Frame diagonals for `n < count`, as report rows.
pub fn frame_rows(family: &FrameFamily, measure: &RadialMeasure, count: usize, quad_tol: f64) -> Result<Vec<FrameRow>> {
    let label = match family.family {
        Family::Perelomov => "perelomov",
        Family::BarutGirardello => "barut-girardello",
    };
    (0..count)
        .map(|n| {
            let v = frame_diagonal(family, measure, n, quad_tol)?;
            Ok(FrameRow {
                family: label.into(),
                spec: spec_label(&family.spec),
                n,
                value: v.value,
                error: v.error,
            })
        })
        .collect()
}

pub fn rows_to_csv(rows: &[FrameRow]) -> String {
    let mut out = String::from("family,spec,n,value,error_estimate\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{:.15e},{:.3e}\n", r.family, r.spec, r.n, r.value, r.error));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn family(f: Family, spec: AlgebraSpec) -> FrameFamily {
        FrameFamily::new(f, spec).unwrap()
    }

    #[test]
    fn perelomov_finite_closed_form() {
        let d = 4;
        let fam = family(Family::Perelomov, AlgebraSpec::finite(d, &[], 0.0).unwrap());
        let m = perelomov_finite_measure(d).unwrap();
        for n in 0..d {
            let v = frame_diagonal(&fam, &m, n, 1e-9).unwrap();
            assert!((v.value - 1.0).abs() < 1e-6, "n={n} {v:?}");
        }
        assert!(frame_diagonal(&fam, &m, d, 1e-9).is_err());
        assert_eq!(frame_element(&fam, &m, 0, 2, 1e-9).unwrap().value, 0.0);
    }

    #[test]
    fn perelomov_infinite_closed_form() {
        let fam = family(Family::Perelomov, AlgebraSpec::from_ells(&[3], 0.0).unwrap());
        let m = perelomov_infinite_measure(3.0).unwrap();
        for n in 0..6 {
            let v = frame_diagonal(&fam, &m, n, 1e-9).unwrap();
            assert!((v.value - 1.0).abs() < 1e-6, "n={n} {v:?}");
        }
        assert!(perelomov_infinite_measure(1.0).is_err());
    }

    #[test]
    fn bg_bessel() {
        let m = bg_bessel_measure(1).unwrap();
        // w(x) = 2 K₀(2√x) I₀(2√x)
        let x: f64 = 0.7;
        let y = 2.0 * x.sqrt();
        assert_relative_eq!(m.weight(x), 2.0 * special::bessel_k(0, y) * special::bessel_i(0, y), max_relative = 1e-13);
        for ell in 2..=4 {
            let w = bg_bessel_measure(ell).unwrap().weight(1e-300);
            assert!(w.is_finite());
        }
        let fam = family(Family::BarutGirardello, AlgebraSpec::from_ells(&[2], 0.0).unwrap());
        let m = bg_bessel_measure(2).unwrap();
        for n in 0..=8 {
            let v = frame_diagonal(&fam, &m, n, 1e-9).unwrap();
            assert!((v.value - 1.0).abs() < 1e-5, "n={n} {v:?}");
        }
    }

    #[test]
    fn bg_moment_identity() {
        // ∫ x^n w(x)/₀F₁(ℓ; ℓx) dx = F(n)!
        let ell = 3;
        let spec = AlgebraSpec::from_ells(&[ell], 0.0).unwrap();
        let m = bg_bessel_measure(ell).unwrap();
        for n in [0usize, 2, 5] {
            let f = |x: f64| {
                if x <= 0.0 {
                    return 0.0;
                }
                let ln_hyp = special::ln_hyp0f1_int(ell, ell as f64 * x);
                (m.weight(x).ln() + n as f64 * x.ln() - ln_hyp).exp()
            };
            let r = quadrature::integrate_to_infinity(f, 0.0, 1.0 + n as f64, QuadOptions::default()).unwrap();
            assert_relative_eq!(r.value, spec.f_factorial(n).unwrap(), max_relative = 1e-7);
        }
    }

    #[test]
    fn corrupted_measure_fails() {
        let fam = family(Family::Perelomov, AlgebraSpec::finite(3, &[], 0.0).unwrap());
        let m = perelomov_finite_measure(3).unwrap().scaled(1.01);
        let v = frame_diagonal(&fam, &m, 1, 1e-9).unwrap();
        assert!((v.value - 1.01).abs() < 1e-6);
    }

    #[test]
    fn harmonic_moments() {
        let targets = [1.0, 1.0, 2.0, 6.0, 24.0];
        let fit = fit_discrete_measure(&targets, &log_grid(1e-3, 60.0, 120)).unwrap();
        assert!(fit.residual <= 1e-8, "{fit:?}");
        assert!(fit.weights.iter().all(|w| *w >= 0.0));
        // Cross-check: e^{-x} has these moments.
        for (n, t) in targets.iter().enumerate() {
            let r = quadrature::integrate_to_infinity(|x: f64| x.powi(n as i32) * (-x).exp(), 0.0, 1.0, QuadOptions::default())
                .unwrap();
            assert_relative_eq!(r.value, *t, max_relative = 1e-10);
        }
    }

    #[test]
    fn single_moment() {
        let fit = fit_discrete_measure(&[1.0], &[0.5, 2.0]).unwrap();
        assert_relative_eq!(fit.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        assert!(fit_discrete_measure(&[1.0, 1.0], &[0.5]).is_err());
    }

    #[test]
    fn fitted_finite_perelomov() {
        let spec = AlgebraSpec::finite(3, &[], 0.0).unwrap();
        let fam = family(Family::Perelomov, spec);
        let targets = fam.moment_targets(3).unwrap();
        assert_eq!(targets, vec![1.0, 1.0, 4.0]);
        let fit = fit_discrete_measure(&targets, &log_grid(1e-2, 50.0, 80)).unwrap();
        assert!(fit.residual <= 1e-8);
        let m = atomic_frame_measure(&fam, &fit).unwrap();
        for n in 0..3 {
            let v = frame_diagonal(&fam, &m, n, 1e-9).unwrap();
            assert!((v.value - 1.0).abs() < 1e-6, "n={n} {v:?}");
        }
    }

    #[test]
    fn fitted_two_parameter_bg() {
        let spec = AlgebraSpec::from_ells(&[2, 3], 0.0).unwrap();
        let fam = family(Family::BarutGirardello, spec);
        let targets = fam.moment_targets(4).unwrap();
        let fit = fit_discrete_measure(&targets, &log_grid(1e-2, 40.0, 100)).unwrap();
        assert!(fit.residual <= 1e-8, "{fit:?}");
        let m = atomic_frame_measure(&fam, &fit).unwrap();
        for n in 0..4 {
            let v = frame_diagonal(&fam, &m, n, 1e-9).unwrap();
            assert!((v.value - 1.0).abs() < 1e-6, "n={n} {v:?}");
        }
    }

    #[test]
    fn csv_rows() {
        let fam = family(Family::Perelomov, AlgebraSpec::finite(2, &[], 0.0).unwrap());
        let rows = frame_rows(&fam, &perelomov_finite_measure(2).unwrap(), 2, 1e-9).unwrap();
        let csv = rows_to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "family,spec,n,value,error_estimate");
        assert!(lines[1].starts_with("perelomov,-1,0,"));
        assert_eq!(lines.len(), 3);
    }
}
