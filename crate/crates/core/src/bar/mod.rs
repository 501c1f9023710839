//! The normalized cyclic mixed complex and its operators.

pub mod chain;
pub mod ops;
pub mod product;
pub mod suite;

pub use chain::{Bar, BarLin, Chain, Coef, Mono};
pub use ops::{BarOps, Op};
pub use product::{cyclic_sh, phi, phi_chain, sh, shuffle_words, PairChain};
