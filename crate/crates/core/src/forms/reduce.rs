use crate::error::{invalid, Result};
use crate::gfpoly::{Fe, FieldSpec, UPoly};

use super::homform::{HomForm, Terms};

/// Multiplicity structure of a nonzero binary form
/// `f = lead · x^α · y^β · h(x, y)` with `h` monic in `x` and coprime to `xy`.
#[derive(Clone, Debug)]
pub struct BinaryFactorization {
    pub x_mult: u32,
    pub y_mult: u32,
    /// Coefficient of `x^{d−α−β} y^β` in `f`.
    pub lead: Fe,
    /// Squarefree decomposition of `h(u, 1)`.
    pub factors: Vec<(UPoly, u32)>,
}

/// `h(u) = f(u, 1) / u^α` for the coefficient vector `c_j` of `x^{d−j} y^j`,
/// with the `x` and `y` multiplicities split off.
pub(crate) fn dehomogenize(field: &FieldSpec, c: &[Fe]) -> (u32, u32, UPoly) {
    let d = c.len() - 1;
    let jmin = c.iter().position(|&a| a != 0).expect("nonzero form");
    let jmax = c.iter().rposition(|&a| a != 0).unwrap();
    let alpha = d - jmax;
    let top = d - alpha;
    // h[k] = c_{top − k}
    let h = UPoly::new(field, (0..=top - jmin).map(|k| c[top - k]).collect());
    (alpha as u32, jmin as u32, h)
}

/// Binary coefficients of the homogenization of a polynomial in `u = x/y`.
fn homogenize(g: &UPoly) -> Vec<Fe> {
    let m = g.degree().unwrap();
    (0..=m).map(|j| g.coeff(m - j)).collect()
}

impl BinaryFactorization {
    pub fn of(field: &FieldSpec, c: &[Fe]) -> BinaryFactorization {
        let (x_mult, y_mult, h) = dehomogenize(field, c);
        let lead = h.lead();
        let factors = if h.degree() == Some(0) { Vec::new() } else { h.squarefree_decomposition() };
        BinaryFactorization { x_mult, y_mult, lead, factors }
    }

    pub fn is_reduced(&self) -> bool {
        self.x_mult <= 1 && self.y_mult <= 1 && self.factors.iter().all(|(_, m)| *m == 1)
    }

    /// Multiplicity of every distinct linear factor over the closure.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut out = Vec::new();
        if self.x_mult > 0 {
            out.push(self.x_mult);
        }
        if self.y_mult > 0 {
            out.push(self.y_mult);
        }
        for (g, m) in &self.factors {
            out.extend(std::iter::repeat_n(*m, g.degree().unwrap()));
        }
        out
    }

    pub fn distinct_factors(&self) -> usize {
        self.multiplicities().len()
    }
}

/// Fast reducedness test on a coefficient vector.
pub(crate) fn binary_reduced(field: &FieldSpec, c: &[Fe]) -> bool {
    let (alpha, beta, h) = dehomogenize(field, c);
    alpha <= 1 && beta <= 1 && h.is_squarefree().unwrap()
}

/// True iff the binary form has no repeated linear factor over the closure.
pub fn is_squarefree_binary(f: &HomForm) -> Result<bool> {
    let Some(c) = f.binary_coeffs() else {
        return invalid("squarefree test needs a binary form");
    };
    if f.is_zero() {
        return invalid("squarefree test on the zero form");
    }
    Ok(binary_reduced(f.field(), &c))
}

/// `f = scalar · base^exponent` with `exponent` maximal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectPower {
    pub base: HomForm,
    pub exponent: u32,
    pub scalar: Fe,
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

/// Decomposes `f` as a scalar times a maximal power. Binary forms go through
/// the multiplicities of their linear factors; other forms through exact
/// root extraction.
pub fn perfect_power_decompose(f: &HomForm) -> Result<PerfectPower> {
    if f.is_zero() {
        return invalid("perfect power of the zero form");
    }
    if f.nvars() == 2 {
        Ok(binary_perfect_power(f))
    } else {
        Ok(general_perfect_power(f))
    }
}

fn binary_perfect_power(f: &HomForm) -> PerfectPower {
    let field = f.field();
    let c = f.binary_coeffs().unwrap();
    let bf = BinaryFactorization::of(field, &c);
    let r = bf.multiplicities().into_iter().fold(0, gcd_u32).max(1);
    if f.degree() == 0 {
        return PerfectPower { base: f.scale(field.inv(c[0]).unwrap()), exponent: 1, scalar: c[0] };
    }
    let mut base = HomForm::monomial(field, vec![bf.x_mult / r, bf.y_mult / r], 1).unwrap();
    for (g, m) in &bf.factors {
        let h = HomForm::from_binary_coeffs(field, &homogenize(g)).unwrap();
        base = base.mul(&h.pow(m / r));
    }
    PerfectPower { base, exponent: r, scalar: bf.lead }
}

/// Root extraction for forms in any number of variables.
pub fn general_perfect_power(f: &HomForm) -> PerfectPower {
    let field = f.field().clone();
    let lead_exps = f.leading_exponents().unwrap().clone();
    let scalar = f.terms()[&lead_exps];
    let mut g = f.scale(field.inv(scalar).unwrap());
    let p = field.p() as u32;
    let mut ppow = 1;
    while g.degree() > 0 && g.terms().keys().all(|v| v.iter().all(|&e| e % p == 0)) {
        let terms: Terms =
            g.terms().iter().map(|(v, &c)| (v.iter().map(|&e| e / p).collect(), field.frob_inv(c))).collect();
        g = HomForm::from_terms_unchecked(&field, g.nvars(), g.degree() / p, terms);
        ppow *= p;
    }
    let d = g.degree();
    for l in (2..=d).rev() {
        if d % l != 0 || l % p == 0 {
            continue;
        }
        if let Some(root) = lex_root(&g, l) {
            return PerfectPower { base: root, exponent: ppow * l, scalar };
        }
    }
    PerfectPower { base: g, exponent: ppow, scalar }
}

/// `l`-th root of a form whose lexicographically largest coefficient is 1,
/// for `l` prime to `p`. Each step cancels the leading term of `f − g^l`.
fn lex_root(f: &HomForm, l: u32) -> Option<HomForm> {
    let field = f.field();
    let lead = f.leading_exponents()?;
    if lead.iter().any(|&e| e % l != 0) {
        return None;
    }
    let top: Vec<u32> = lead.iter().map(|e| e / l).collect();
    let mut g = HomForm::monomial(field, top.clone(), 1).unwrap();
    let mut last_added = top.clone();
    let inv_l = field.inv(field.from_int((l as u64 % field.p()) as i64))?;
    loop {
        let diff = f.add(&g.pow(l).scale(field.neg(1))).ok()?;
        let Some(w) = diff.leading_exponents() else { return Some(g) };
        let c = diff.terms()[w];
        // new term t with lm-part top^{l-1}·t = w
        let t: Option<Vec<u32>> = w.iter().zip(&top).map(|(&a, &b)| a.checked_sub((l - 1) * b)).collect();
        let t = t?;
        if t >= last_added {
            return None;
        }
        let term = HomForm::monomial(field, t.clone(), field.mul(c, inv_l)).ok()?;
        g = g.add(&term).ok()?;
        last_added = t;
    }
}
