//! Quon (k-fermion) algebras at `q = exp(2πi/k)` and the passage from the
//! finite polynomial algebra with `d = k` to them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{AlgebraSpec, RepClass};
use crate::error::{Error, Result};
use crate::fock::{build_finite_rep, FockOperators};
use crate::matrix::{self, c, cis, CMatrix};
use crate::report::Report;

/// `k ≥ 2` together with the principal root `q = exp(2πi/k)` and its powers.
#[derive(Debug, Clone, PartialEq)]
pub struct QuonParams {
    k: usize,
    powers: Vec<Complex64>,
}

/// `e^{2πi j/k}`, exact on quarter turns.
fn root_of_unity(j: usize, k: usize) -> Complex64 {
    let j = j % k;
    if (4 * j).is_multiple_of(k) {
        return match 4 * j / k {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
    }
    cis(2.0 * PI * j as f64 / k as f64)
}

impl QuonParams {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition(format!("quon order k = {k} must be at least 2")));
        }
        let powers = (0..k).map(|j| root_of_unity(j, k)).collect();
        Ok(Self { k, powers })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> Complex64 {
        self.powers[1 % self.k]
    }

    pub fn q_bar(&self) -> Complex64 {
        self.q().conj()
    }

    /// `q^j` for any integer `j`.
    pub fn q_pow(&self, j: i64) -> Complex64 {
        self.powers[j.rem_euclid(self.k as i64) as usize]
    }

    /// Principal `q^{1/2} = exp(πi/k)`.
    pub fn q_half(&self) -> Complex64 {
        root_of_unity(1, 2 * self.k)
    }

    /// `[n]_q = (1 - q^n)/(1 - q)` for integer `n`.
    pub fn q_int(&self, n: i64) -> Complex64 {
        (c(1.0, 0.0) - self.q_pow(n)) / (c(1.0, 0.0) - self.q())
    }

    /// `[n]_q̄`.
    pub fn q_bar_int(&self, n: i64) -> Complex64 {
        (c(1.0, 0.0) - self.q_pow(-n)) / (c(1.0, 0.0) - self.q_bar())
    }

    /// `[x]_q` for real `x`, with `q^x = exp(2πix/k)`.
    pub fn q_number(&self, x: f64) -> Complex64 {
        if x.fract() == 0.0 && x.abs() < i64::MAX as f64 {
            return self.q_int(x as i64);
        }
        (c(1.0, 0.0) - cis(2.0 * PI * x / self.k as f64)) / (c(1.0, 0.0) - self.q())
    }

    /// `[n]_q! = [1]_q [2]_q ⋯ [n]_q`.
    pub fn q_factorial(&self, n: usize) -> Complex64 {
        (1..=n as i64).map(|i| self.q_int(i)).product()
    }
}

/// The four `k × k` matrices `f₋, f₊, f₊⁺ = (f₊)†, f₋⁺ = (f₋)†`.
#[derive(Debug, Clone)]
pub struct KFermionOps {
    pub params: QuonParams,
    pub f_minus: CMatrix,
    pub f_plus: CMatrix,
    pub f_plus_dag: CMatrix,
    pub f_minus_dag: CMatrix,
    pub number: CMatrix,
}

pub fn build_kfermion_ops(params: &QuonParams) -> KFermionOps {
    let k = params.k();
    let mut f_minus = CMatrix::zeros(k, k);
    let mut f_plus = CMatrix::zeros(k, k);
    for n in 1..k {
        f_minus[(n - 1, n)] = params.q_int(n as i64).sqrt();
        f_plus[(n, n - 1)] = params.q_int(n as i64).sqrt();
    }
    KFermionOps {
        params: params.clone(),
        f_plus_dag: f_plus.adjoint(),
        f_minus_dag: f_minus.adjoint(),
        f_minus,
        f_plus,
        number: matrix::real_diagonal((0..k).map(|n| n as f64)),
    }
}

fn q_diag(params: &QuonParams, shift: i64, bar: bool) -> CMatrix {
    matrix::diagonal((0..params.k() as i64).map(|n| {
        if bar {
            params.q_bar_int(n + shift)
        } else {
            params.q_int(n + shift)
        }
    }))
}

fn push_nilpotency(report: &mut Report, label: &str, m: &CMatrix, k: usize) {
    let order = matrix::nilpotency_order(m);
    report.push_flag(
        format!("({label})^{k} = 0 with order exactly {k}"),
        order == Some(k),
        format!("found {order:?}"),
    );
}

pub fn verify_quon_relations(params: &QuonParams, tol: f64) -> Report {
    let k = params.k();
    let ops = build_kfermion_ops(params);
    let id = CMatrix::identity(k, k);
    let n = &ops.number;
    let mut report = Report::new(format!("k-fermion algebra (k = {k})"));

    let qc = matrix::q_commutator(&ops.f_minus, &ops.f_plus, params.q()).unwrap();
    report.push("f- f+ - q f+ f- = I", matrix::max_diff(&qc, &id), tol);
    let qbc = matrix::q_commutator(&ops.f_plus_dag, &ops.f_minus_dag, params.q_bar()).unwrap();
    report.push("f+^ f-^ - qbar f-^ f+^ = I", matrix::max_diff(&qbc, &id), tol);
    report.push(
        "f+ f- = [N]_q",
        matrix::max_diff(&(&ops.f_plus * &ops.f_minus), &q_diag(params, 0, false)),
        tol,
    );
    report.push(
        "f- f+ = [N+I]_q",
        matrix::max_diff(&(&ops.f_minus * &ops.f_plus), &q_diag(params, 1, false)),
        tol,
    );
    report.push(
        "[N, f-] = -f-",
        matrix::max_diff(&(n * &ops.f_minus - &ops.f_minus * n), &(-&ops.f_minus)),
        tol,
    );
    report.push(
        "[N, f+] = +f+",
        matrix::max_diff(&(n * &ops.f_plus - &ops.f_plus * n), &ops.f_plus),
        tol,
    );
    let half = params.q_half();
    report.push(
        "f- f+^ = q^{-1/2} f+^ f-",
        matrix::max_diff(
            &(&ops.f_minus * &ops.f_plus_dag),
            &((&ops.f_plus_dag * &ops.f_minus) * half.conj()),
        ),
        tol,
    );
    report.push(
        "f+ f-^ = q^{+1/2} f-^ f+",
        matrix::max_diff(&(&ops.f_plus * &ops.f_minus_dag), &((&ops.f_minus_dag * &ops.f_plus) * half)),
        tol,
    );
    for (label, m) in [
        ("f-", &ops.f_minus),
        ("f+", &ops.f_plus),
        ("f+^", &ops.f_plus_dag),
        ("f-^", &ops.f_minus_dag),
    ] {
        push_nilpotency(&mut report, label, m, k);
    }
    report
}

/// Solution `C₁, …, C_{k-1}` of the lower-triangular system
/// `Σ_{i≤n} C_i F(n)!/F(n-i)! = [n]_q`, `n = 1, …, k-1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassageCoeffs {
    pub k: usize,
    #[serde(serialize_with = "serialize_complex_list")]
    pub c: Vec<Complex64>,
    /// `max_n |(T C)_n - [n]_q|`.
    pub residual: f64,
}

fn serialize_complex_list<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    serde::Serialize::serialize(&pairs, s)
}

impl PassageCoeffs {
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "k": self.k,
            "c": self.c.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        })
        .to_string()
    }
}

fn finite_k(spec: &AlgebraSpec) -> Result<usize> {
    match spec.class() {
        RepClass::Finite(d) => Ok(d),
        RepClass::Infinite => Err(Error::WrongClass { expected: "finite" }),
    }
}

/// `T[n][i] = F(n)!/F(n-i)! = F(n) F(n-1) ⋯ F(n-i+1)` for `1 ≤ i ≤ n ≤ k-1`
/// (1-based; stored 0-based).
pub fn passage_matrix(spec: &AlgebraSpec) -> Result<Vec<Vec<f64>>> {
    let k = finite_k(spec)?;
    let mut t = vec![vec![0.0; k - 1]; k - 1];
    for n in 1..k {
        let mut prod = 1.0;
        for i in 1..=n {
            prod *= spec.f_unchecked(n + 1 - i);
            t[n - 1][i - 1] = prod;
        }
    }
    Ok(t)
}

/// Forward substitution on the triangular system; `k = d`.
pub fn solve_passage_coeffs(spec: &AlgebraSpec) -> Result<PassageCoeffs> {
    let k = finite_k(spec)?;
    let params = QuonParams::new(k)?;
    let t = passage_matrix(spec)?;
    let rhs: Vec<Complex64> = (1..k).map(|n| params.q_int(n as i64)).collect();
    let mut coeffs: Vec<Complex64> = Vec::with_capacity(k - 1);
    for row in 0..k - 1 {
        let diag = t[row][row];
        if diag == 0.0 || !diag.is_finite() {
            return Err(Error::Singular { row: row + 1 });
        }
        let partial: Complex64 = (0..row).map(|i| coeffs[i] * t[row][i]).sum();
        coeffs.push((rhs[row] - partial) / diag);
    }
    let residual = (0..k - 1)
        .map(|row| {
            let lhs: Complex64 = (0..=row).map(|i| coeffs[i] * t[row][i]).sum();
            (lhs - rhs[row]).norm()
        })
        .fold(0.0, f64::max);
    Ok(PassageCoeffs { k, c: coeffs, residual })
}

fn check_coeffs(spec: &AlgebraSpec, coeffs: &PassageCoeffs) -> Result<FockOperators> {
    let k = finite_k(spec)?;
    if coeffs.k != k || coeffs.c.len() + 1 != k {
        return Err(Error::OrderMismatch { left: coeffs.k, right: k });
    }
    build_finite_rep(spec)
}

fn powers(m: &CMatrix, max: usize) -> Vec<CMatrix> {
    let mut out = vec![CMatrix::identity(m.nrows(), m.ncols())];
    for p in 1..=max {
        out.push(&out[p - 1] * m);
    }
    out
}

/// `A₋ = Σ C_i (a⁺)^{i-1} (a⁻)^i` and `A₊ = a⁺`.
#[derive(Debug, Clone)]
pub struct QuonLadder {
    pub minus: CMatrix,
    pub plus: CMatrix,
}

pub fn build_a_ops(spec: &AlgebraSpec, coeffs: &PassageCoeffs) -> Result<QuonLadder> {
    let ops = check_coeffs(spec, coeffs)?;
    let k = ops.dim;
    let pm = powers(&ops.a_minus, k);
    let pp = powers(&ops.a_plus, k);
    let mut minus = CMatrix::zeros(k, k);
    for (idx, ci) in coeffs.c.iter().enumerate() {
        let i = idx + 1;
        minus += (&pp[i - 1] * &pm[i]) * *ci;
    }
    Ok(QuonLadder {
        minus,
        plus: ops.a_plus.clone(),
    })
}

/// `A₊⁺ = a⁻` (as `minus`, the annihilator of the conjugate algebra) and
/// `A₋⁺ = Σ C̄_i (a⁺)^i (a⁻)^{i-1}` (as `plus`).
pub fn build_abar_ops(spec: &AlgebraSpec, coeffs: &PassageCoeffs) -> Result<QuonLadder> {
    let ops = check_coeffs(spec, coeffs)?;
    let k = ops.dim;
    let pm = powers(&ops.a_minus, k);
    let pp = powers(&ops.a_plus, k);
    let mut plus = CMatrix::zeros(k, k);
    for (idx, ci) in coeffs.c.iter().enumerate() {
        let i = idx + 1;
        plus += (&pp[i] * &pm[i - 1]) * ci.conj();
    }
    Ok(QuonLadder {
        minus: ops.a_minus.clone(),
        plus,
    })
}

/// Every operator identity of the passage: the `A_q` and `A_q̄` relations,
/// the stated matrix elements, and the passage formulas
/// `A₋ = D₁ f₋`, `A₊ = f₊ D₂`, `A₊⁺ = D₃ f₊⁺`, `A₋⁺ = f₋⁺ D₄`.
pub fn verify_passage_formulas(spec: &AlgebraSpec, tol: f64) -> Result<Report> {
    let k = finite_k(spec)?;
    let params = QuonParams::new(k)?;
    let coeffs = solve_passage_coeffs(spec)?;
    let a = build_a_ops(spec, &coeffs)?;
    let abar = build_abar_ops(spec, &coeffs)?;
    let fock = build_finite_rep(spec)?;
    let f = build_kfermion_ops(&params);
    let id = CMatrix::identity(k, k);
    let n_op = &fock.number;
    let phi = spec.phi();
    let q = params.q();

    let mut report = Report::new(format!("quon passage (k = {k}, r = {})", spec.rank()));
    report.push("triangular system residual", coeffs.residual, tol);

    // A_q
    let qc = matrix::q_commutator(&a.minus, &a.plus, q)?;
    report.push("A- A+ - q A+ A- = I", matrix::max_diff(&qc, &id), tol);
    report.push(
        "A+ A- = [N]_q",
        matrix::max_diff(&(&a.plus * &a.minus), &q_diag(&params, 0, false)),
        tol,
    );
    report.push(
        "A- A+ = [N+I]_q",
        matrix::max_diff(&(&a.minus * &a.plus), &q_diag(&params, 1, false)),
        tol,
    );
    report.push(
        "[N, A+] = A+",
        matrix::max_diff(&matrix::commutator(n_op, &a.plus)?, &a.plus),
        tol,
    );
    report.push(
        "[N, A-] = -A-",
        matrix::max_diff(&matrix::commutator(n_op, &a.minus)?, &(-&a.minus)),
        tol,
    );
    push_nilpotency(&mut report, "A-", &a.minus, k);
    push_nilpotency(&mut report, "A+", &a.plus, k);
    report.push("A+ = a+", matrix::max_diff(&a.plus, &fock.a_plus), tol);

    // A_qbar
    let qbc = matrix::q_commutator(&abar.minus, &abar.plus, params.q_bar())?;
    report.push("A+^ A-^ - qbar A-^ A+^ = I", matrix::max_diff(&qbc, &id), tol);
    report.push(
        "[N, A-^] = A-^",
        matrix::max_diff(&matrix::commutator(n_op, &abar.plus)?, &abar.plus),
        tol,
    );
    report.push(
        "[N, A+^] = -A+^",
        matrix::max_diff(&matrix::commutator(n_op, &abar.minus)?, &(-&abar.minus)),
        tol,
    );
    push_nilpotency(&mut report, "A+^", &abar.minus, k);
    push_nilpotency(&mut report, "A-^", &abar.plus, k);

    // Stated matrix elements.
    let mut expected_minus = CMatrix::zeros(k, k);
    let mut expected_bar_plus = CMatrix::zeros(k, k);
    for n in 1..k {
        let fn_ = spec.f_unchecked(n);
        let phase = cis((fn_ - spec.f_unchecked(n - 1)) * phi);
        expected_minus[(n - 1, n)] = params.q_int(n as i64) / fn_.sqrt() * phase;
        expected_bar_plus[(n, n - 1)] = params.q_bar_int(n as i64) / fn_.sqrt() * phase.conj();
    }
    report.push("A-|n> = [n]_q/sqrt(F(n)) e^{+iG(n-1)phi}|n-1>", matrix::max_diff(&a.minus, &expected_minus), tol);
    report.push(
        "A-^|n> = [n+1]_qbar/sqrt(F(n+1)) e^{-iG(n)phi}|n+1>",
        matrix::max_diff(&abar.plus, &expected_bar_plus),
        tol,
    );

    // Passage formulas. Diagonal factors at n = k-1 are 0/0; the matching
    // row/column of the k-fermion operator vanishes there, so they are set
    // to zero.
    let factor = |n: usize, make: &dyn Fn(Complex64, f64) -> Complex64| -> Complex64 {
        if n + 1 >= k {
            return c(0.0, 0.0);
        }
        make(params.q_int(n as i64 + 1), spec.f_unchecked(n + 1))
    };
    let g = |n: usize| spec.f_unchecked(n + 1) - spec.f_unchecked(n);
    let d1 = matrix::diagonal((0..k).map(|n| factor(n, &|qn, f| (qn / f).sqrt()) * cis(g(n) * phi)));
    let d2 = matrix::diagonal((0..k).map(|n| factor(n, &|qn, f| (c(f, 0.0) / qn).sqrt()) * cis(-g(n) * phi)));
    let d3 = matrix::diagonal((0..k).map(|n| factor(n, &|qn, f| (c(f, 0.0) / qn.conj()).sqrt()) * cis(g(n) * phi)));
    let d4 = matrix::diagonal((0..k).map(|n| factor(n, &|qn, f| (qn.conj() / f).sqrt()) * cis(-g(n) * phi)));
    report.push("A- = ([N+I]_q/F(N+I))^1/2 e^{iG(N)phi} f-", matrix::max_diff(&a.minus, &(&d1 * &f.f_minus)), tol);
    report.push("A+ = f+ (F(N+I)/[N+I]_q)^1/2 e^{-iG(N)phi}", matrix::max_diff(&a.plus, &(&f.f_plus * &d2)), tol);
    report.push(
        "A+^ = (F(N+I)/[N+I]_qbar)^1/2 e^{iG(N)phi} f+^",
        matrix::max_diff(&abar.minus, &(&d3 * &f.f_plus_dag)),
        tol,
    );
    report.push(
        "A-^ = f-^ ([N+I]_qbar/F(N+I))^1/2 e^{-iG(N)phi}",
        matrix::max_diff(&abar.plus, &(&f.f_minus_dag * &d4)),
        tol,
    );
    Ok(report)
}
