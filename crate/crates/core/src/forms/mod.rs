//! Homogeneous forms, their powers modulo Frobenius powers of the maximal
//! ideal, reducedness and perfect powers.

mod homform;
mod param;
mod parse;
mod power;
mod reduce;

pub use homform::{determinant, HomForm};
pub use param::ParamForm;
pub use parse::{format_form, parse_form};
pub use power::{coeff_of_power, in_frobenius_power, naive_pow_mod_frobenius, pow_mod_frobenius, FrobTruncPoly};
pub use reduce::{general_perfect_power, is_squarefree_binary, perfect_power_decompose, BinaryFactorization, PerfectPower};

pub(crate) use power::{BinaryPowers, FieldRing};
pub(crate) use reduce::binary_reduced;
