//! Retract data, the trace on `C_*(End A)` and the canonical pairing.

pub mod checks;
pub mod endo;
pub mod pairing;
pub mod retract;

pub use retract::{GradedAlgebra, Retract, RetractError};
pub use endo::{Atom, RhoImage, Word, WordAlgebra};
pub use pairing::{canonical_pairing, chern_character, eta_hh, upsilon_rho, upsilon_words};
