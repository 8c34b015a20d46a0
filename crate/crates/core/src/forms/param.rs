use crate::error::{invalid, Result};
use crate::gfpoly::{Fe, FieldSpec, UPoly};

use super::homform::HomForm;
use super::power::{dense_power, BinaryPowers, ParamRing};

/// A binary form whose coefficients are polynomials in one parameter `a`.
/// `coeffs[j]` multiplies `x^{d−j} y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamForm {
    field: FieldSpec,
    coeffs: Vec<UPoly>,
}

impl ParamForm {
    pub fn new(field: &FieldSpec, coeffs: Vec<UPoly>) -> Result<ParamForm> {
        if coeffs.is_empty() {
            return invalid("parametric form needs at least one coefficient");
        }
        if coeffs.iter().any(|c| c.field() != field) {
            return invalid("coefficient field mismatch");
        }
        Ok(ParamForm { field: field.clone(), coeffs })
    }

    /// `x^i y^j (x^{2m} + a·x^m y^m + y^{2m})` over `F_p`.
    pub fn trinomial(p: u64, i: u32, j: u32, m: u32) -> Result<ParamForm> {
        if m == 0 {
            return invalid("trinomial family needs m ≥ 1");
        }
        let field = FieldSpec::prime(p)?;
        let d = (i + j + 2 * m) as usize;
        let mut coeffs = vec![UPoly::zero(&field); d + 1];
        let (j, m) = (j as usize, m as usize);
        coeffs[j] = UPoly::one(&field);
        coeffs[j + m] = UPoly::var(&field);
        coeffs[j + 2 * m] = UPoly::one(&field);
        ParamForm::new(&field, coeffs)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    /// The concrete form at `a = value`, where `value` lies in `target`.
    pub fn specialize(&self, value: Fe, target: &FieldSpec) -> Result<HomForm> {
        let emb = self.field.embedding_into(target)?;
        let cs: Vec<Fe> = self.coeffs.iter().map(|c| c.map(&emb).eval(value)).collect();
        HomForm::from_binary_coeffs(target, &cs)
    }

    /// Surviving coefficients of `f^N mod m^[p^e]` as `(j, C_j(a))`, where
    /// `C_j` multiplies `x^{dN−j} y^j`.
    pub fn residue(&self, n: u128, e: u32) -> Result<Vec<(u128, UPoly)>> {
        let ring = ParamRing(&self.field);
        let mut bp = BinaryPowers::new(&ring, &self.coeffs);
        Ok(match bp.residue(n, e)? {
            None => Vec::new(),
            Some(w) => w
                .c
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (w.lo + i as u128, c))
                .collect(),
        })
    }

    /// Coefficient of `x^{dN−j} y^j` in `f^N`, a polynomial in `a`.
    pub fn coeff_of_power(&self, n: u32, j: u64) -> Result<UPoly> {
        let top = self.degree() as u64 * n as u64;
        if j > top {
            return invalid(format!("index {j} is outside [0, {top}]"));
        }
        Ok(dense_power(&ParamRing(&self.field), &self.coeffs, n).swap_remove(j as usize))
    }
}
