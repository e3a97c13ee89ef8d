//! Quantifier elimination for difference fields.
//!
//! Difference schemes are handled through direct presentations: an affine variety `X0`
//! together with a correspondence `X1` inside `X0 x X0`. Galois stratifications over such
//! presentations carry the data needed to eliminate quantifiers, and every construction can
//! be checked by brute force over finite fields equipped with a power of Frobenius.

pub mod algebra;
pub mod bundle;
pub mod catalog;
pub mod cli;
pub mod cover;
pub mod error;
pub mod galois;
pub mod group;
pub mod logic;
pub mod points;
pub mod presentation;
pub mod qe;
pub mod strat;

pub use error::{Error, Result};
