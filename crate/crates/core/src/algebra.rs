//! Structure functions of the polynomial Weyl-Heisenberg algebra.
//!
//! The algebra is fixed by a list of real parameters `κ₁, …, κ_r` through the
//! structure function
//!
//! ```text
//! F(n) = n [1 + κ₁(n-1)] [1 + κ₂(n-1)] ⋯ [1 + κ_r(n-1)]
//! ```
//!
//! with `G(n) = F(n+1) - F(n)`. When `κ₁ < 0` the Fock space is finite with
//! dimension `d = 1 - 1/κ₁`, otherwise it is infinite.

use serde::{Deserialize, Serialize};

use crate::config::{self, ConfigMap, Value};
use crate::error::{Error, Result};

/// Relative tolerance used when recognising `-1/κ₁` as an integer.
const DIMENSION_SNAP: f64 = 1e-12;

/// Dimension class of the Fock representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "d", rename_all = "lowercase")]
pub enum RepClass {
    Finite(usize),
    Infinite,
}

impl RepClass {
    pub fn dim(self) -> Option<usize> {
        match self {
            RepClass::Finite(d) => Some(d),
            RepClass::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RepClass::Finite(_))
    }
}

/// Validated parameter set `(κ₁, …, κ_r; φ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraSpec {
    kappas: Vec<f64>,
    phi: f64,
    class: RepClass,
}

impl AlgebraSpec {
    /// Validates the parameters. A negative `κ₁` is snapped to the exact
    /// value `-1/(d-1)` once `-1/κ₁` is recognised as an integer.
    pub fn new(kappas: Vec<f64>, phi: f64) -> Result<Self> {
        if kappas.is_empty() {
            return Err(Error::EmptyKappas);
        }
        for (i, &k) in kappas.iter().enumerate() {
            if !k.is_finite() {
                return Err(Error::NonFiniteParameter { index: i + 1, value: k });
            }
            if i > 0 && k < 0.0 {
                return Err(Error::NegativeKappa { index: i + 1, value: k });
            }
        }
        if !phi.is_finite() {
            return Err(Error::Precondition(format!("phi = {phi} is not finite")));
        }
        let mut kappas = kappas;
        let class = if kappas[0] < 0.0 {
            let inv = -1.0 / kappas[0];
            let m = inv.round();
            if m < 1.0 || (inv - m).abs() > DIMENSION_SNAP * m {
                return Err(Error::NonIntegerDimension { value: kappas[0] });
            }
            kappas[0] = -1.0 / m;
            RepClass::Finite(m as usize + 1)
        } else {
            RepClass::Infinite
        };
        Ok(Self { kappas, phi, class })
    }

    /// Finite-dimensional spec with `κ₁ = -1/(d-1)` followed by `extra` (the
    /// `κ₂, …` parameters).
    pub fn finite(d: usize, extra: &[f64], phi: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Precondition(format!("dimension d = {d} must be at least 2")));
        }
        let mut kappas = vec![-1.0 / (d as f64 - 1.0)];
        kappas.extend_from_slice(extra);
        Self::new(kappas, phi)
    }

    /// Spec with `κ_i = 1/ℓ_i`.
    pub fn from_ells(ells: &[u32], phi: f64) -> Result<Self> {
        if ells.contains(&0) {
            return Err(Error::Precondition("every ℓ_i must be a positive integer".into()));
        }
        Self::new(ells.iter().map(|&l| 1.0 / l as f64).collect(), phi)
    }

    /// The ordinary oscillator, `κ = (0)`.
    pub fn harmonic(phi: f64) -> Self {
        Self {
            kappas: vec![0.0],
            phi,
            class: RepClass::Infinite,
        }
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Number of parameters `r`.
    pub fn rank(&self) -> usize {
        self.kappas.len()
    }

    pub fn class(&self) -> RepClass {
        self.class
    }

    pub fn dim(&self) -> Option<usize> {
        self.class.dim()
    }

    pub fn with_phi(&self, phi: f64) -> Self {
        Self { phi, ..self.clone() }
    }

    /// Number of nonzero parameters.
    pub fn nonzero_kappas(&self) -> usize {
        self.kappas.iter().filter(|k| **k != 0.0).count()
    }

    fn check_index(&self, n: usize, limit_offset: usize) -> Result<()> {
        if let RepClass::Finite(d) = self.class {
            let limit = d - limit_offset;
            if n > limit {
                return Err(Error::OutOfRange { n, limit });
            }
        }
        Ok(())
    }

    /// `F(n)` in product form. In the finite case `n ≤ d` and `F(d) = 0`.
    pub fn structure_f(&self, n: usize) -> Result<f64> {
        self.check_index(n, 0)?;
        Ok(self.f_unchecked(n))
    }

    pub(crate) fn f_unchecked(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self.class {
            RepClass::Finite(d) => {
                let df = d as f64;
                let head = nf * (df - nf) / (df - 1.0);
                self.kappas[1..]
                    .iter()
                    .fold(head, |acc, k| acc * (1.0 + k * (nf - 1.0)))
            }
            RepClass::Infinite => self
                .kappas
                .iter()
                .fold(nf, |acc, k| acc * (1.0 + k * (nf - 1.0))),
        }
    }

    /// `G(n) = F(n+1) - F(n)`.
    pub fn structure_g(&self, n: usize) -> Result<f64> {
        self.check_index(n, 1)?;
        Ok(self.f_unchecked(n + 1) - self.f_unchecked(n))
    }

    /// Elementary symmetric polynomials `(s₀, …, s_r)` of the κ's.
    pub fn vieta_coeffs(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.kappas.len() + 1];
        s[0] = 1.0;
        for (j, &k) in self.kappas.iter().enumerate() {
            for i in (1..=j + 1).rev() {
                s[i] += k * s[i - 1];
            }
        }
        s
    }

    /// `F(n)! = F(1) F(2) ⋯ F(n)`, `F(0)! = 1`. In the finite case `n ≤ d-1`.
    pub fn f_factorial(&self, n: usize) -> Result<f64> {
        self.check_index(n, 1)?;
        Ok((1..=n).map(|i| self.f_unchecked(i)).product())
    }

    /// `ln F(n)!`, usable far beyond the range where `F(n)!` fits a double.
    pub fn ln_f_factorial(&self, n: usize) -> Result<f64> {
        self.check_index(n, 1)?;
        Ok((1..=n).map(|i| self.f_unchecked(i).ln()).sum())
    }

    /// `ℓ_i = 1/κ_i` for the parameters that enter the closed factorial form,
    /// or an error if one of them is not an integer reciprocal.
    fn closed_form_ells(&self) -> Result<Vec<u64>> {
        let skip = usize::from(self.class.is_finite());
        self.kappas
            .iter()
            .enumerate()
            .skip(skip)
            .map(|(i, &k)| {
                let err = Error::NotIntegerReciprocal { index: i + 1, value: k };
                if k <= 0.0 {
                    return Err(err);
                }
                let inv = 1.0 / k;
                let l = inv.round();
                if l < 1.0 || (inv - l).abs() > 1e-9 * l {
                    return Err(err);
                }
                Ok(l as u64)
            })
            .collect()
    }

    /// Closed factorial form of `F(n)!`, available when every relevant
    /// `1/κ_i` is a positive integer:
    ///
    /// ```text
    /// F(n)! = n! ∏ (ℓ_i + n - 1)! / (ℓ_i^n (ℓ_i - 1)!)                        (infinite)
    /// F(n)! = n! (d-1)! / ((d-1)^n (d-1-n)!) ∏_{i≥2} (ℓ_i + n - 1)! / (ℓ_i^n (ℓ_i - 1)!)
    /// ```
    pub fn f_factorial_closed(&self, n: usize) -> Result<f64> {
        self.check_index(n, 1)?;
        let ells = self.closed_form_ells()?;
        let mut value = factorial(n as u64);
        if let RepClass::Finite(d) = self.class {
            let dm1 = d as u64 - 1;
            value *= factorial(dm1) / (pow_u(dm1 as f64, n) * factorial(dm1 - n as u64));
        }
        for l in ells {
            value *= factorial(l + n as u64 - 1) / (pow_u(l as f64, n) * factorial(l - 1));
        }
        Ok(value)
    }

    /// Writes the `kappas = [..]` / `phi = ..` config form.
    pub fn to_config_string(&self) -> String {
        let kappas: Vec<String> = self
            .kappas
            .iter()
            .enumerate()
            .map(|(i, &k)| match (i, self.class) {
                (0, RepClass::Finite(d)) => format!("-1/{}", d - 1),
                _ => format!("{k:?}"),
            })
            .collect();
        format!("kappas = [{}]\nphi = {:?}\n", kappas.join(", "), self.phi)
    }

    /// Parses the config form written by [`AlgebraSpec::to_config_string`].
    /// Unknown keys are rejected.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let map = config::parse(text)?;
        Self::from_config_map(&map, &["kappas", "phi"])
    }

    /// Reads `kappas` (required) and `phi` (default 0) from a parsed config
    /// map, rejecting any key not in `allowed`.
    pub fn from_config_map(map: &ConfigMap, allowed: &[&str]) -> Result<Self> {
        map.reject_unknown(allowed)?;
        let (line, kappas) = match map.get("kappas") {
            Some((line, Value::List(items))) => (*line, items),
            Some((line, _)) => {
                return Err(Error::Parse {
                    line: *line,
                    message: "kappas must be a list".into(),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    message: "missing key `kappas`".into(),
                })
            }
        };
        let kappas = kappas
            .iter()
            .map(|s| config::parse_real(s).map_err(|message| Error::Parse { line, message }))
            .collect::<Result<Vec<_>>>()?;
        let phi = match map.get("phi") {
            Some((line, v)) => v.as_real().map_err(|message| Error::Parse { line: *line, message })?,
            None => 0.0,
        };
        Self::new(kappas, phi)
    }
}

pub(crate) fn factorial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn pow_u(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}
