//! The Segal map to twisted de Rham forms, Milnor classes of its images and
//! the comparison of the canonical pairing with the residue pairing.
pub mod forms;
pub mod bridge;
pub mod cycles;
pub mod corollary;
pub mod map;

pub use forms::{Form, FormBasis};
pub use map::SegalMap;
