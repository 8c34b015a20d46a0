use std::collections::BTreeMap;
use std::fmt;

use crate::error::{invalid, Result};
use crate::gfpoly::{Fe, FieldSpec};

/// Sparse product-of-powers map used while expanding expressions.
pub(crate) type Terms = BTreeMap<Vec<u32>, Fe>;

/// A homogeneous polynomial in `n` variables over a finite field.
///
/// Terms are keyed by exponent vectors; every stored coefficient is
/// nonzero and every key sums to the degree. The zero form has no terms.
#[derive(Clone, PartialEq, Eq)]
pub struct HomForm {
    field: FieldSpec,
    n: usize,
    d: u32,
    terms: Terms,
}

impl fmt::Debug for HomForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {:?}", self, self.field)
    }
}

impl fmt::Display for HomForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::parse::format_form(self))
    }
}

impl HomForm {
    /// Builds a form from `(exponents, coefficient)` pairs, merging like
    /// terms. Fails if the exponent vectors have the wrong length or the
    /// nonzero terms are not all of one degree.
    pub fn new(field: &FieldSpec, n: usize, terms: impl IntoIterator<Item = (Vec<u32>, Fe)>) -> Result<HomForm> {
        if n == 0 {
            return invalid("a form needs at least one variable");
        }
        let mut map = Terms::new();
        for (v, c) in terms {
            if v.len() != n {
                return invalid(format!("exponent vector {v:?} does not have length {n}"));
            }
            if c >= field.q() {
                return invalid(format!("coefficient handle {c} is not in {field}"));
            }
            let slot = map.entry(v).or_insert(0);
            *slot = field.add(*slot, c);
        }
        map.retain(|_, c| *c != 0);
        let mut degs = map.keys().map(|v| v.iter().sum::<u32>());
        let d = degs.next().unwrap_or(0);
        if degs.any(|e| e != d) {
            return invalid("polynomial is not homogeneous");
        }
        Ok(HomForm { field: field.clone(), n, d, terms: map })
    }

    pub(crate) fn from_terms_unchecked(field: &FieldSpec, n: usize, d: u32, terms: Terms) -> HomForm {
        debug_assert!(terms.iter().all(|(v, c)| *c != 0 && v.iter().sum::<u32>() == d));
        HomForm { field: field.clone(), n, d, terms }
    }

    /// The zero form of degree `d`.
    pub fn zero(field: &FieldSpec, n: usize, d: u32) -> HomForm {
        HomForm { field: field.clone(), n, d, terms: Terms::new() }
    }

    /// `c · x^v`.
    pub fn monomial(field: &FieldSpec, exps: Vec<u32>, c: Fe) -> Result<HomForm> {
        let n = exps.len();
        HomForm::new(field, n, [(exps, c)])
    }

    /// The binary form `Σ c_j x^{d−j} y^j` with `d = coeffs.len() − 1`.
    pub fn from_binary_coeffs(field: &FieldSpec, coeffs: &[Fe]) -> Result<HomForm> {
        if coeffs.is_empty() {
            return invalid("binary form needs at least one coefficient");
        }
        let d = (coeffs.len() - 1) as u32;
        let mut terms = Terms::new();
        for (j, &c) in coeffs.iter().enumerate() {
            if c >= field.q() {
                return invalid(format!("coefficient handle {c} is not in {field}"));
            }
            if c != 0 {
                terms.insert(vec![d - j as u32, j as u32], c);
            }
        }
        Ok(HomForm { field: field.clone(), n: 2, d, terms })
    }

    /// Dense coefficients `c_j` of `x^{d−j} y^j`, for binary forms.
    pub fn binary_coeffs(&self) -> Option<Vec<Fe>> {
        (self.n == 2).then(|| {
            let mut out = vec![0; self.d as usize + 1];
            for (v, &c) in &self.terms {
                out[v[1] as usize] = c;
            }
            out
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Fe> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: Fe) -> HomForm {
        let f = &self.field;
        let mut terms = self.terms.clone();
        for v in terms.values_mut() {
            *v = f.mul(*v, c);
        }
        terms.retain(|_, c| *c != 0);
        HomForm { terms, ..self.clone() }
    }

    pub fn mul(&self, o: &HomForm) -> HomForm {
        assert_eq!(self.n, o.n, "variable count mismatch");
        let terms = mul_terms(&self.field, &self.terms, &o.terms);
        HomForm { field: self.field.clone(), n: self.n, d: self.d + o.d, terms }
    }

    pub fn pow(&self, r: u32) -> HomForm {
        let mut acc = HomForm::new(&self.field, self.n, [(vec![0; self.n], 1)]).unwrap();
        let mut base = self.clone();
        let mut r = r;
        while r > 0 {
            if r & 1 == 1 {
                acc = acc.mul(&base);
            }
            r >>= 1;
            if r > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn add(&self, o: &HomForm) -> Result<HomForm> {
        if self.n != o.n {
            return invalid("variable count mismatch");
        }
        if !self.is_zero() && !o.is_zero() && self.d != o.d {
            return invalid("degree mismatch");
        }
        let terms = self.terms.iter().chain(o.terms.iter()).map(|(v, c)| (v.clone(), *c));
        let mut out = HomForm::new(&self.field, self.n, terms)?;
        if out.is_zero() {
            out.d = self.d.max(o.d);
        }
        Ok(out)
    }

    /// Exponents of the lexicographically largest term.
    pub fn leading_exponents(&self) -> Option<&Vec<u32>> {
        self.terms.keys().next_back()
    }

    /// `f(T·x)`: each variable `x_i` is replaced by `Σ_j T[i][j] x_j`.
    pub fn substitute_linear(&self, t: &[Vec<Fe>]) -> Result<HomForm> {
        let n = self.n;
        if t.len() != n || t.iter().any(|row| row.len() != n) {
            return invalid(format!("substitution matrix must be {n}×{n}"));
        }
        if determinant(&self.field, t) == 0 {
            return invalid("substitution matrix is singular");
        }
        let f = &self.field;
        let images: Vec<Terms> = t
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(j, &c)| {
                        let mut v = vec![0; n];
                        v[j] = 1;
                        (v, c)
                    })
                    .collect()
            })
            .collect();
        let mut acc = Terms::new();
        for (v, &c) in &self.terms {
            let mut part: Terms = [(vec![0; n], c)].into_iter().collect();
            for (i, &e) in v.iter().enumerate() {
                for _ in 0..e {
                    part = mul_terms(f, &part, &images[i]);
                }
            }
            for (w, c) in part {
                let slot = acc.entry(w).or_insert(0);
                *slot = f.add(*slot, c);
            }
        }
        acc.retain(|_, c| *c != 0);
        Ok(HomForm { field: f.clone(), n, d: self.d, terms: acc })
    }

    /// The same form viewed over an extension field.
    pub fn extend_to(&self, target: &FieldSpec) -> Result<HomForm> {
        let emb = self.field.embedding_into(target)?;
        let terms = self.terms.iter().map(|(v, &c)| (v.clone(), emb.apply(c))).collect();
        Ok(HomForm { field: target.clone(), n: self.n, d: self.d, terms })
    }
}

pub(crate) fn mul_terms(f: &FieldSpec, a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (va, &ca) in a {
        for (vb, &cb) in b {
            let v: Vec<u32> = va.iter().zip(vb).map(|(x, y)| x + y).collect();
            let slot = out.entry(v).or_insert(0);
            *slot = f.add(*slot, f.mul(ca, cb));
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Determinant by Gaussian elimination.
pub fn determinant(f: &FieldSpec, m: &[Vec<Fe>]) -> Fe {
    let n = m.len();
    let mut a: Vec<Vec<Fe>> = m.to_vec();
    let mut det = 1;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else { return 0 };
        if piv != col {
            a.swap(piv, col);
            det = f.neg(det);
        }
        det = f.mul(det, a[col][col]);
        let inv = f.inv(a[col][col]).unwrap();
        for r in col + 1..n {
            let factor = f.mul(a[r][col], inv);
            if factor == 0 {
                continue;
            }
            for c in col..n {
                a[r][c] = f.sub(a[r][c], f.mul(factor, a[col][c]));
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> FieldSpec {
        FieldSpec::prime(7).unwrap()
    }

    #[test]
    fn rejects_inhomogeneous() {
        assert!(HomForm::new(&f7(), 2, [(vec![2, 0], 1), (vec![0, 1], 1)]).is_err());
    }

    #[test]
    fn merges_and_drops_zeros() {
        let f = HomForm::new(&f7(), 2, [(vec![1, 1], 3), (vec![1, 1], 4), (vec![2, 0], 1)]).unwrap();
        assert_eq!(f.num_terms(), 1);
    }

    #[test]
    fn substitutions() {
        let k = f7();
        let x2 = HomForm::monomial(&k, vec![2, 0], 1).unwrap();
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(x2.substitute_linear(&swap).unwrap(), HomForm::monomial(&k, vec![0, 2], 1).unwrap());
        let xy = HomForm::monomial(&k, vec![1, 1], 1).unwrap();
        let shear = vec![vec![1, 1], vec![0, 1]];
        let want = HomForm::new(&k, 2, [(vec![1, 1], 1), (vec![0, 2], 1)]).unwrap();
        assert_eq!(xy.substitute_linear(&shear).unwrap(), want);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(want.substitute_linear(&id).unwrap(), want);
        assert!(xy.substitute_linear(&[vec![1, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let k = f7();
        let c = vec![1, 0, 3, 0, 0, 6];
        let f = HomForm::from_binary_coeffs(&k, &c).unwrap();
        assert_eq!(f.degree(), 5);
        assert_eq!(f.binary_coeffs().unwrap(), c);
    }
}
