//! Toolkit for the permuting-gamma set of maps x + γ·Tr(H(x)) over finite
//! field towers F_p ⊆ F_q ⊆ F_{q^n}: set computation by two independent
//! routes, direction-set accounting, linear-translator structure, Hermite
//! orthogonality for quadratic extensions, and a monomial search harness.

pub mod bitmap;
pub mod error;
pub mod poly;
pub mod pset;
pub mod translators;
pub mod gf;
pub mod hermite;

pub use error::{Error, Result};
pub use gf::{FFElt, FieldCtx, FieldSpec};
