//! Exact commutative algebra over the rationals and finite fields.

pub mod closure;
pub mod decompose;
pub mod extension;
pub mod factor;
pub mod field;
pub mod gf;
pub mod groebner;
pub mod ideal;
pub mod mpoly;
pub mod upoly;

pub use field::{Elem, Field};
pub use ideal::Ideal;
pub use mpoly::{MPoly, Mono, MonoOrder, Ring, RingRef};
pub use upoly::UPoly;
