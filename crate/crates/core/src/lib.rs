//! Generalized Weyl–Heisenberg algebras, their quon and Grassmann
//! counterparts, coherent states and the measures that resolve them.

pub mod algebra;
pub mod coherent;
pub mod config;
pub mod error;
pub mod fock;
pub mod grassmann;
pub mod matrix;
pub mod measures;
pub mod quadrature;
pub mod quon;
pub mod report;
pub mod special;

pub use algebra::{AlgebraSpec, RepClass};
pub use coherent::{Basis, BosonicState, Family, GrassmannState, NormOutcome, SeriesSum};
pub use error::{Error, Result};
pub use fock::FockOperators;
pub use grassmann::{GrassmannElement, ResolutionMode, Variable};
pub use matrix::CMatrix;
pub use measures::{FrameFamily, MomentFit, RadialMeasure};
pub use num_complex::Complex64;
pub use quon::{PassageCoeffs, QuonParams};
pub use report::{Check, Report};
