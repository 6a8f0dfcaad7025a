//! Dense complex matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Entries at or below this magnitude count as zero when testing nilpotency.
pub const ZERO_THRESHOLD: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{iθ}`
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    Ok(a * b - b * a)
}

/// `AB - λ BA`.
pub fn q_commutator(a: &CMatrix, b: &CMatrix, lambda: Complex64) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    Ok(a * b - (b * a) * lambda)
}

fn check_square_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |A - B|` entrywise; infinite if the shapes differ.
pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn diagonal(values: impl IntoIterator<Item = Complex64>) -> CMatrix {
    let v: Vec<Complex64> = values.into_iter().collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
}

pub fn real_diagonal(values: impl IntoIterator<Item = f64>) -> CMatrix {
    diagonal(values.into_iter().map(|x| c(x, 0.0)))
}

/// Least `p ≥ 1` with `M^p = 0` (after thresholding), or `None` when no
/// `p ≤ dim` works.
pub fn nilpotency_order(m: &CMatrix) -> Option<usize> {
    if !m.is_square() {
        return None;
    }
    let dim = m.nrows().max(1);
    let mut power = m.clone();
    for p in 1..=dim {
        if max_abs(&power) <= ZERO_THRESHOLD {
            return Some(p);
        }
        power = &power * m;
    }
    None
}

/// Serializes a matrix as a row-major list of rows of `[re, im]` pairs.
pub fn serialize_matrix<S: Serializer>(m: &CMatrix, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<[f64; 2]> = (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}
