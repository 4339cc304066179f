//! Exact homological algebra for graded quiver algebras whose degree-0 part
//! need not be semisimple: truncated path algebras, minimal graded projective
//! resolutions, Yoneda Ext algebras, radical-filtration (Koszul) certificates,
//! Koszul double duals and Artin-Schelter regularity checks.
//!
//! Everything is computed over an exact field inside an explicit window of
//! internal degrees; results carry the window they are valid for.

pub mod error;
pub mod field;
pub mod linalg;
pub mod presentation;
pub mod algebra;
pub mod module;
pub mod resolution;
pub mod koszul;
pub mod ext;
pub mod regularity;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
