//! Finite fields `F_{p^k}` and univariate polynomials over them.

mod field;
mod upoly;

pub use field::{Embedding, Fe, FieldSpec};
pub use upoly::{gcd, UPoly};

use crate::error::Result;

/// Monic gcd of two polynomials over the same field.
pub fn upoly_gcd(f: &UPoly, g: &UPoly) -> UPoly {
    gcd(f, g)
}

/// True iff `f` has no repeated root over the algebraic closure.
pub fn upoly_squarefree(f: &UPoly) -> Result<bool> {
    f.is_squarefree()
}

/// Roots of `f` in `target`, each listed once.
pub fn roots_in_field(f: &UPoly, target: &FieldSpec) -> Vec<Fe> {
    f.roots_in(target)
}
