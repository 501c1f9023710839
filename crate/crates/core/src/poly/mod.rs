//! Weighted-homogeneous polynomials and Milnor algebras.

pub mod milnor;
pub mod wpoly;

pub use milnor::{milnor_data, normal_form, poincare_coefficients, residue_pairing, MilnorData, MilnorError};
pub use wpoly::{hessian, Exponent, WPoly, WeightError, WeightSystem};
