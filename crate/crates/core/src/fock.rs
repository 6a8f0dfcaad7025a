//! Matrix representations on finite Fock spaces.
//!
//! Two constructions are provided: the `d`-dimensional representation that
//! exists when `κ₁ < 0`, and the order-`s` truncation of the infinite
//! representation. In both, with `|0⟩, …, |dim-1⟩` as basis,
//!
//! ```text
//! a⁻|n⟩ = √F(n) e^{+i[F(n)-F(n-1)]φ} |n-1⟩,   a⁺ = (a⁻)†.
//! ```

use serde::Serialize;

use crate::algebra::{AlgebraSpec, RepClass};
use crate::error::{Error, Result};
use crate::matrix::{self, c, cis, CMatrix};
use crate::report::Report;

#[derive(Debug, Clone, Serialize)]
pub struct FockOperators {
    pub dim: usize,
    pub spec: AlgebraSpec,
    pub truncated: bool,
    #[serde(serialize_with = "matrix::serialize_matrix")]
    pub a_minus: CMatrix,
    #[serde(serialize_with = "matrix::serialize_matrix")]
    pub a_plus: CMatrix,
    #[serde(serialize_with = "matrix::serialize_matrix")]
    pub number: CMatrix,
}

impl FockOperators {
    /// Row-major JSON document with every matrix as `[[re, im], …]` rows.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrices serialize")
    }

    /// `F(n)` as used by this representation (`n ≤ dim`).
    pub fn f(&self, n: usize) -> f64 {
        self.spec.f_unchecked(n)
    }

    /// `diag(F(0), …, F(dim-1))`.
    pub fn f_diagonal(&self) -> CMatrix {
        matrix::real_diagonal((0..self.dim).map(|n| self.f(n)))
    }

    /// Right side of `[a⁻, a⁺]`: `G(N)` for the finite representation, and
    /// `G_s(N) - F(s)|s-1⟩⟨s-1|` for the truncated one.
    pub fn expected_commutator(&self) -> CMatrix {
        let mut g = matrix::real_diagonal((0..self.dim).map(|n| self.f(n + 1) - self.f(n)));
        if self.truncated {
            let last = self.dim - 1;
            g[(last, last)] -= c(self.f(self.dim), 0.0);
        }
        g
    }
}

fn ladder(spec: &AlgebraSpec, dim: usize, truncated: bool) -> FockOperators {
    let phi = spec.phi();
    let mut a_minus = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        let f_n = spec.f_unchecked(n);
        let f_prev = spec.f_unchecked(n - 1);
        a_minus[(n - 1, n)] = cis((f_n - f_prev) * phi) * f_n.sqrt();
    }
    let a_plus = a_minus.adjoint();
    let number = matrix::real_diagonal((0..dim).map(|n| n as f64));
    FockOperators {
        dim,
        spec: spec.clone(),
        truncated,
        a_minus,
        a_plus,
        number,
    }
}

/// The `d`-dimensional representation of a finite spec.
pub fn build_finite_rep(spec: &AlgebraSpec) -> Result<FockOperators> {
    match spec.class() {
        RepClass::Finite(d) => Ok(ladder(spec, d, false)),
        RepClass::Infinite => Err(Error::WrongClass { expected: "finite" }),
    }
}

/// The order-`s` truncation of an infinite spec.
pub fn build_truncated_rep(spec: &AlgebraSpec, s: usize) -> Result<FockOperators> {
    if spec.class().is_finite() {
        return Err(Error::WrongClass { expected: "infinite" });
    }
    if s < 2 {
        return Err(Error::Precondition(format!("truncation order s = {s} must be at least 2")));
    }
    Ok(ladder(spec, s, true))
}

/// `H = F(N) = a⁺a⁻`.
pub fn hamiltonian(ops: &FockOperators) -> CMatrix {
    &ops.a_plus * &ops.a_minus
}

/// Diagonal unitary `diag(e^{-iF(n)φ})`; `a⁻(φ) = U a⁻(0) U†`.
pub fn phase_unitary(spec: &AlgebraSpec, dim: usize, phi: f64) -> CMatrix {
    matrix::diagonal((0..dim).map(|n| cis(-spec.f_unchecked(n) * phi)))
}

/// Checks the defining relations of the representation.
pub fn verify_wh_relations(ops: &FockOperators, tol: f64) -> Report {
    let mut report = Report::new(if ops.truncated {
        format!("truncated representation (s = {})", ops.dim)
    } else {
        format!("finite representation (d = {})", ops.dim)
    });
    let am = &ops.a_minus;
    let ap = &ops.a_plus;
    let n = &ops.number;

    let comm = am * ap - ap * am;
    let name = if ops.truncated {
        "[a-(s), a+(s)] = G_s(N) - F(s)|s-1><s-1|"
    } else {
        "[a-, a+] = G(N)"
    };
    report.push(name, matrix::max_diff(&comm, &ops.expected_commutator()), tol);
    report.push("[N, a-] = -a-", matrix::max_diff(&(n * am - am * n), &(-am)), tol);
    report.push("[N, a+] = +a+", matrix::max_diff(&(n * ap - ap * n), ap), tol);
    report.push("a+ = (a-)^dagger", matrix::max_diff(ap, &am.adjoint()), tol);
    report.push("a+ a- = F(N)", matrix::max_diff(&hamiltonian(ops), &ops.f_diagonal()), tol);

    let expected = ops.dim;
    for (label, m) in [("a-", am), ("a+", ap)] {
        let order = matrix::nilpotency_order(m);
        let ok = order == Some(expected);
        report.push_flag(
            format!("nilpotency order of {label} = {expected}"),
            ok,
            format!("found {order:?}"),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_level() {
        let spec = AlgebraSpec::finite(2, &[], 0.0).unwrap();
        let ops = build_finite_rep(&spec).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(ops.a_minus, expected);
    }

    #[test]
    fn d4_entries() {
        let spec = AlgebraSpec::finite(4, &[], 0.0).unwrap();
        let ops = build_finite_rep(&spec).unwrap();
        for i in 0..4 {
            assert_eq!(ops.a_minus[(i, 0)], c(0.0, 0.0));
        }
        assert_relative_eq!(ops.a_minus[(1, 2)].re, (4.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        let h = hamiltonian(&ops);
        let expected = [0.0, 1.0, 4.0 / 3.0, 1.0];
        for (i, e) in expected.iter().enumerate() {
            assert!((h[(i, i)] - c(*e, 0.0)).norm() < 1e-12);
        }
        assert_eq!(matrix::nilpotency_order(&ops.a_minus), Some(4));
        assert!(verify_wh_relations(&ops, 1e-12).passed());
    }

    #[test]
    fn number_ladder_relations() {
        let spec = AlgebraSpec::finite(5, &[0.3], 0.9).unwrap();
        let ops = build_finite_rep(&spec).unwrap();
        let cm = matrix::commutator(&ops.number, &ops.a_minus).unwrap();
        assert!(matrix::max_diff(&cm, &(-&ops.a_minus)) < 1e-14);
        let cp = matrix::commutator(&ops.number, &ops.a_plus).unwrap();
        assert!(matrix::max_diff(&cp, &ops.a_plus) < 1e-14);
    }

    #[test]
    fn truncated_entries() {
        let spec = AlgebraSpec::new(vec![0.0], 0.0).unwrap();
        let ops = build_truncated_rep(&spec, 3).unwrap();
        assert_eq!(ops.a_minus[(0, 1)], c(1.0, 0.0));
        assert_relative_eq!(ops.a_minus[(1, 2)].re, 2f64.sqrt());
        for i in 0..3 {
            assert_eq!(ops.a_plus[(i, 2)], c(0.0, 0.0));
        }
        let spec = AlgebraSpec::from_ells(&[2], 0.0).unwrap();
        let ops = build_truncated_rep(&spec, 2).unwrap();
        assert_eq!(ops.a_plus[(1, 0)], c(1.0, 0.0));
        let ops = build_truncated_rep(&spec, 3).unwrap();
        let h = hamiltonian(&ops);
        assert!(matrix::max_diff(&h, &matrix::real_diagonal([0.0, 1.0, 3.0])) < 1e-12);
    }

    #[test]
    fn truncated_boundary_term() {
        let spec = AlgebraSpec::new(vec![0.0], 0.0).unwrap();
        let ops = build_truncated_rep(&spec, 5).unwrap();
        let comm = matrix::commutator(&ops.a_minus, &ops.a_plus).unwrap();
        assert!((comm[(4, 4)] - c(1.0 - 5.0, 0.0)).norm() < 1e-12);
        assert!(verify_wh_relations(&ops, 1e-12).passed());

        let ops = build_truncated_rep(&spec, 2).unwrap();
        let comm = matrix::commutator(&ops.a_minus, &ops.a_plus).unwrap();
        assert!(matrix::max_diff(&comm, &matrix::real_diagonal([1.0, -1.0])) < 1e-15);
    }

    #[test]
    fn class_errors() {
        let inf = AlgebraSpec::new(vec![0.5], 0.0).unwrap();
        let fin = AlgebraSpec::finite(3, &[], 0.0).unwrap();
        assert!(matches!(build_finite_rep(&inf), Err(Error::WrongClass { .. })));
        assert!(matches!(build_truncated_rep(&fin, 3), Err(Error::WrongClass { .. })));
        assert!(build_truncated_rep(&inf, 1).is_err());
    }

    #[test]
    fn phase_covariance() {
        let spec = AlgebraSpec::finite(6, &[0.5, 1.5], 0.0).unwrap();
        let phi = 0.83;
        let a0 = build_finite_rep(&spec).unwrap();
        let aphi = build_finite_rep(&spec.with_phi(phi)).unwrap();
        let u = phase_unitary(&spec, 6, phi);
        let rotated = &u * &a0.a_minus * u.adjoint();
        assert!(matrix::max_diff(&rotated, &aphi.a_minus) < 1e-12);
    }

    #[test]
    fn json_layout() {
        let spec = AlgebraSpec::finite(2, &[], 0.0).unwrap();
        let ops = build_finite_rep(&spec).unwrap();
        let v: serde_json::Value = serde_json::from_str(&ops.to_json()).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["a_minus"][0][1], serde_json::json!([1.0, 0.0]));
        assert_eq!(v["spec"]["kappas"][0], -1.0);
    }
}
