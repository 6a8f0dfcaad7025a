//! Generalized Grassmann algebra of order `k` in two variables `θ`, `θ̄`.
//!
//! `θ^k = θ̄^k = 0` and `θθ̄ = q^{1/2} θ̄θ` with `q^{1/2} = exp(iπ/k)`.
//! Elements are stored in the normal order "all `θ` left of all `θ̄`", so
//! every element has a unique representation `Σ c_ab θ^a θ̄^b`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::algebra::{AlgebraSpec, RepClass};
use crate::error::{Error, Result};
use crate::quon::QuonParams;
use crate::report::Report;

pub type Monomial = (usize, usize);

/// One of the two generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Theta,
    ThetaBar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    k: usize,
    coeffs: BTreeMap<Monomial, Complex64>,
}

/// `exp(iπ j/k)`, the `j`-th power of `q^{1/2}`.
fn half_q_pow(j: i64, k: usize) -> Complex64 {
    let two_k = 2 * k as i64;
    let j = j.rem_euclid(two_k) as usize;
    // Reuse the exact quarter-turn table of the quon module on a 2k-th root.
    QuonParams::new(2 * k).expect("2k ≥ 4").q_pow(j as i64)
}

impl GrassmannElement {
    pub fn zero(k: usize) -> Self {
        assert!(k >= 2, "Grassmann order must be at least 2");
        Self {
            k,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(k: usize, value: Complex64) -> Self {
        Self::monomial(k, 0, 0, value)
    }

    pub fn one(k: usize) -> Self {
        Self::scalar(k, Complex64::new(1.0, 0.0))
    }

    /// `value · θ^a θ̄^b`; zero when an exponent reaches `k`.
    pub fn monomial(k: usize, a: usize, b: usize, value: Complex64) -> Self {
        let mut out = Self::zero(k);
        out.add_term((a, b), value);
        out
    }

    pub fn theta(k: usize) -> Self {
        Self::monomial(k, 1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn theta_bar(k: usize) -> Self {
        Self::monomial(k, 0, 1, Complex64::new(1.0, 0.0))
    }

    /// Builds an element from `(a, b, coefficient)` triples.
    pub fn from_terms(k: usize, terms: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut out = Self::zero(k);
        for (a, b, value) in terms {
            out.add_term((a, b), value);
        }
        out
    }

    fn add_term(&mut self, (a, b): Monomial, value: Complex64) {
        if a >= self.k || b >= self.k || value == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.coeffs.entry((a, b)).or_insert(Complex64::new(0.0, 0.0));
        *entry += value;
        if *entry == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&(a, b));
        }
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `θ^a θ̄^b` in normal order.
    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        self.coeffs.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, *c))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.k, self.terms().map(|((a, b), c)| (a, b, c * factor)))
    }

    /// Complex-conjugates every coefficient.
    pub fn conj_coeffs(&self) -> Self {
        Self::from_terms(self.k, self.terms().map(|((a, b), c)| (a, b, c.conj())))
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self - other).coeffs.values().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    /// Same support and coefficients within `tol` (absolute).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.k == other.k
            && self.coeffs.keys().eq(other.coeffs.keys())
            && self.max_diff(other) <= tol
    }

    /// Normal-ordered product. Moving each of the `b` trailing `θ̄`s of a
    /// left monomial past each of the `c` leading `θ`s of a right monomial
    /// contributes `q^{-1/2}`, so
    /// `(θ^a θ̄^b)(θ^c θ̄^d) = q^{-bc/2} θ^{a+c} θ̄^{b+d}`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::OrderMismatch { left: self.k, right: other.k });
        }
        let k = self.k;
        let mut out = Self::zero(k);
        for (&(a, b), &x) in &self.coeffs {
            for (&(c, d), &y) in &other.coeffs {
                if a + c >= k || b + d >= k {
                    continue;
                }
                let phase = half_q_pow(-((b * c) as i64), k);
                out.add_term((a + c, b + d), x * y * phase);
            }
        }
        Ok(out)
    }

    /// `x^n`.
    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(self.k), |acc, _| &acc * self)
    }

    /// q-derivatives. `∂_θ θ^a θ̄^b = [a]_q θ^{a-1} θ̄^b`; `∂_θ̄` acts from
    /// the left and picks up `q^{-1/2}` per `θ` it passes, so
    /// `∂_θ̄ θ^a θ̄^b = q^{-a/2} [b]_q̄ θ^a θ̄^{b-1}`.
    pub fn q_derivative(&self, which: Variable) -> Self {
        let params = QuonParams::new(self.k).expect("k ≥ 2");
        let terms = self.terms().filter_map(|((a, b), value)| match which {
            Variable::Theta if a > 0 => Some((a - 1, b, value * params.q_int(a as i64))),
            Variable::ThetaBar if b > 0 => Some((
                a,
                b - 1,
                value * params.q_bar_int(b as i64) * half_q_pow(-(a as i64), self.k),
            )),
            _ => None,
        });
        Self::from_terms(self.k, terms.collect::<Vec<_>>())
    }

    /// `∫ · dθ` or `∫ · dθ̄`: keeps the monomials whose exponent in the
    /// chosen variable is `k-1`, removing that factor, and drops the rest.
    pub fn integrate(&self, which: Variable) -> Self {
        let top = self.k - 1;
        let terms = self.terms().filter_map(|((a, b), value)| match which {
            Variable::Theta if a == top => Some((0, b, value)),
            Variable::ThetaBar if b == top => Some((a, 0, value)),
            _ => None,
        });
        Self::from_terms(self.k, terms.collect::<Vec<_>>())
    }

    /// Canonical text `c * θ^a θ̄^b + …`, ordered by `a` then `b`.
    pub fn to_canonical_string(&self) -> String {
        self.to_string()
    }

    /// Parses the canonical text form back into an element of order `k`.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let err = |message: String| Error::Parse { line: 1, message };
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero(k));
        }
        let mut out = Self::zero(k);
        for term in split_terms(text) {
            let term = term.trim();
            let (coeff_text, mono_text) = match term.split_once('*') {
                Some((c, m)) => (c.trim(), m.trim()),
                None => (term, ""),
            };
            let value = parse_complex(coeff_text).ok_or_else(|| err(format!("bad coefficient `{coeff_text}`")))?;
            let (mut a, mut b) = (0usize, 0usize);
            for factor in mono_text.split_whitespace() {
                let (var, exp) = factor.split_once('^').unwrap_or((factor, "1"));
                let exp: usize = exp.parse().map_err(|_| err(format!("bad exponent in `{factor}`")))?;
                match var {
                    "θ" | "theta" => a += exp,
                    "θ̄" | "thetabar" => b += exp,
                    _ => return Err(err(format!("unknown variable `{var}`"))),
                }
            }
            out.add_term((a, b), value);
        }
        Ok(out)
    }
}

fn split_terms(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 && i > 0 && bytes[i - 1] == b' ' => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn parse_complex(text: &str) -> Option<Complex64> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?;
    let body = inner.strip_suffix('i')?;
    // The imaginary part starts at the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E')?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].trim_start_matches('+').parse().ok()?;
    Some(Complex64::new(re, im))
}

fn fmt_complex(z: Complex64) -> String {
    // Adding 0.0 folds a negative zero into +0.0.
    let sign = if z.im < 0.0 { "-" } else { "+" };
    format!("({:?}{}{:?}i)", z.re + 0.0, sign, z.im.abs())
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .terms()
            .map(|((a, b), c)| {
                let mut mono = Vec::new();
                if a > 0 {
                    mono.push(format!("θ^{a}"));
                }
                if b > 0 {
                    mono.push(format!("θ̄^{b}"));
                }
                if mono.is_empty() {
                    fmt_complex(c)
                } else {
                    format!("{} * {}", fmt_complex(c), mono.join(" "))
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: Self) -> GrassmannElement {
        assert_eq!(self.k, rhs.k, "Grassmann order mismatch");
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: Self) -> GrassmannElement {
        self + &(-rhs)
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: Self) -> GrassmannElement {
        self.multiply(rhs).expect("Grassmann order mismatch")
    }
}

/// One summand `w · dθ θ^e θ̄^e dθ̄` of the resolution measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTerm {
    pub weight: f64,
    pub theta_exp: usize,
    pub theta_bar_exp: usize,
}

/// `dμ(θ, θ̄) = Σ_n F(n)! dθ θ^{k-1-n} θ̄^{k-1-n} dθ̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannMeasure {
    pub k: usize,
    pub terms: Vec<MeasureTerm>,
}

/// Builds the measure for a finite spec (`k = d`) or for the order-`k`
/// truncation of an infinite spec.
pub fn measure_element(spec: &AlgebraSpec, k: usize) -> Result<GrassmannMeasure> {
    if k < 2 {
        return Err(Error::Precondition(format!("order k = {k} must be at least 2")));
    }
    if let RepClass::Finite(d) = spec.class() {
        if d != k {
            return Err(Error::Precondition(format!("order k = {k} must equal d = {d}")));
        }
    }
    let terms = (0..k)
        .map(|n| {
            Ok(MeasureTerm {
                weight: spec.f_factorial(n)?,
                theta_exp: k - 1 - n,
                theta_bar_exp: k - 1 - n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrassmannMeasure { k, terms })
}

impl GrassmannMeasure {
    /// `∫ left dμ right`: each term is sandwiched as
    /// `left · θ^e θ̄^e · right`, then integrated over `θ` and `θ̄`. The
    /// differentials commute with everything.
    pub fn sandwich(&self, left: &GrassmannElement, right: &GrassmannElement) -> Result<GrassmannElement> {
        let mut total = GrassmannElement::zero(self.k);
        for term in &self.terms {
            let middle = GrassmannElement::monomial(
                self.k,
                term.theta_exp,
                term.theta_bar_exp,
                Complex64::new(term.weight, 0.0),
            );
            let product = left.multiply(&middle)?.multiply(right)?;
            let integrated = product.integrate(Variable::Theta).integrate(Variable::ThetaBar);
            total = &total + &integrated;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolutionMode {
    Strict,
    UpToPhase,
}

#[derive(Debug, Clone)]
pub struct ResolutionOutcome {
    pub report: Report,
    /// Unit-modulus phase of each diagonal value `(1/F(n)!) ∫ θ^n dμ θ̄^n`.
    pub phases: Vec<Complex64>,
}

/// Evaluates `(1/F(n)!) ∫ θ^n dμ θ̄^m` for all `0 ≤ n, m < k` and compares
/// with `δ_{nm}` exactly (strict) or in modulus (up to phase).
pub fn verify_grassmann_resolution(
    spec: &AlgebraSpec,
    k: usize,
    mode: ResolutionMode,
    tol: f64,
) -> Result<ResolutionOutcome> {
    let measure = measure_element(spec, k)?;
    let mut report = Report::new(format!("Grassmann resolution of identity (k = {k}, {mode:?})"));
    let mut phases = Vec::with_capacity(k);
    let mut worst_off = 0.0f64;
    let mut worst_diag = 0.0f64;
    for n in 0..k {
        let fact = spec.f_factorial(n)?;
        let left = GrassmannElement::monomial(k, n, 0, Complex64::new(1.0, 0.0));
        for m in 0..k {
            let right = GrassmannElement::monomial(k, 0, m, Complex64::new(1.0, 0.0));
            let value = measure.sandwich(&left, &right)?;
            let scalar = value.coeff(0, 0) / fact;
            let leftover = value.terms().filter(|(mono, _)| *mono != (0, 0)).count();
            if leftover > 0 {
                report.push_flag(format!("({n},{m}) is a scalar"), false, "non-scalar remainder");
            }
            if n == m {
                let dev = match mode {
                    ResolutionMode::Strict => (scalar - Complex64::new(1.0, 0.0)).norm(),
                    ResolutionMode::UpToPhase => (scalar.norm() - 1.0).abs(),
                };
                worst_diag = worst_diag.max(dev);
                phases.push(if scalar.norm() > 0.0 { scalar / scalar.norm() } else { scalar });
            } else {
                worst_off = worst_off.max(scalar.norm());
            }
        }
    }
    report.push("off-diagonal values vanish", worst_off, tol);
    let label = match mode {
        ResolutionMode::Strict => "diagonal values equal 1",
        ResolutionMode::UpToPhase => "diagonal values have modulus 1",
    };
    report.push(label, worst_diag, tol);
    Ok(ResolutionOutcome { report, phases })
}
