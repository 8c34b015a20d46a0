//! Text grammar for forms.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' uint)?
//! atom   := uint | 'x' | 'y' | 'z' | 'x'uint | 't' | '(' expr ')'
//! ```
//!
//! `x, y, z` are aliases for `x1, x2, x3`; `t` is the generator of the
//! coefficient field. Whitespace is ignored.

use crate::error::{Error, Result};
use crate::gfpoly::{Fe, FieldSpec};

use super::homform::{mul_terms, HomForm, Terms};

const MAX_DEGREE: u32 = 100_000;

#[derive(Clone, Debug, PartialEq)]
enum Tok<'s> {
    Num(&'s str),
    Var(usize),
    Gen,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { offset, message: message.into() })
}

fn check_brackets(b: &[u8]) -> Result<()> {
    let mut open: Vec<usize> = Vec::new();
    for (i, &c) in b.iter().enumerate() {
        match c {
            b'(' => open.push(i),
            b')' if open.pop().is_none() => return err(i, "unmatched ')'"),
            _ => {}
        }
    }
    match open.first() {
        Some(&i) => err(i, "unmatched '('"),
        None => Ok(()),
    }
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok<'_>)>> {
    let b = s.as_bytes();
    check_brackets(b)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let start = i;
        let tok = match b[i] {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(&s[start..i])));
                continue;
            }
            b'x' => {
                i += 1;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let idx = if i == start + 1 {
                    0
                } else {
                    match s[start + 1..i].parse::<usize>() {
                        Ok(v) if v >= 1 => v - 1,
                        _ => return err(start, "variable index must be at least 1"),
                    }
                };
                out.push((start, Tok::Var(idx)));
                continue;
            }
            b'y' => Tok::Var(1),
            b'z' => Tok::Var(2),
            b't' => Tok::Gen,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::Open,
            b')' => Tok::Close,
            c => return err(i, format!("unexpected character {:?}", c as char)),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'s, 'f> {
    toks: Vec<(usize, Tok<'s>)>,
    pos: usize,
    field: &'f FieldSpec,
    n: usize,
    end: usize,
}

impl<'s> Parser<'s, '_> {
    fn peek(&self) -> Option<&Tok<'s>> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn constant(&self, c: Fe) -> Terms {
        let mut t = Terms::new();
        if c != 0 {
            t.insert(vec![0; self.n], c);
        }
        t
    }

    fn reduce(&self, lit: &str) -> Fe {
        let p = self.field.p() as u128;
        lit.bytes().fold(0u128, |acc, d| (acc * 10 + (d - b'0') as u128) % p) as Fe
    }

    fn expr(&mut self) -> Result<Terms> {
        let f = self.field;
        let mut acc = Terms::new();
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.pos += 1,
            Some(Tok::Minus) => {
                self.pos += 1;
                negate = true;
            }
            _ => {}
        }
        loop {
            for (v, c) in self.term()? {
                let c = if negate { f.neg(c) } else { c };
                let slot = acc.entry(v).or_insert(0);
                *slot = f.add(*slot, c);
            }
            acc.retain(|_, c| *c != 0);
            match self.peek() {
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Terms> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => self.pos += 1,
                Some(Tok::Num(_) | Tok::Var(_) | Tok::Gen | Tok::Open) => {}
                _ => return Ok(acc),
            }
            let rhs = self.factor()?;
            acc = mul_terms(self.field, &acc, &rhs);
        }
    }

    fn factor(&mut self) -> Result<Terms> {
        let base_at = self.offset();
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e = match self.toks.get(self.pos) {
            Some(&(o, Tok::Num(lit))) => {
                self.pos += 1;
                match lit.parse::<u32>() {
                    Ok(e) if e <= MAX_DEGREE => e,
                    _ => return err(o, "exponent too large"),
                }
            }
            _ => return err(self.offset(), "expected an exponent after '^'"),
        };
        let deg = base.keys().map(|v| v.iter().sum::<u32>()).max().unwrap_or(0);
        if deg.saturating_mul(e) > MAX_DEGREE {
            return err(base_at, "power too large");
        }
        let mut acc = self.constant(1);
        let mut sq = base;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_terms(self.field, &acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = mul_terms(self.field, &sq, &sq);
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Terms> {
        let at = self.offset();
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(lit)) => Ok(self.constant(self.reduce(lit))),
            Some(Tok::Var(i)) => {
                let mut v = vec![0; self.n];
                v[i] = 1;
                Ok([(v, 1)].into_iter().collect())
            }
            Some(Tok::Gen) => match self.field.gen_t() {
                Some(t) => Ok(self.constant(t)),
                None => err(at, format!("'t' needs an extension field, not {}", self.field)),
            },
            Some(Tok::Open) => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return err(self.offset(), "expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => err(at, "expected a number, variable or '('"),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parses a nonzero homogeneous form. The variable count is the largest
/// variable index used, raised to `min_vars` if given.
pub fn parse_form(text: &str, field: &FieldSpec, min_vars: Option<usize>) -> Result<HomForm> {
    let toks = tokenize(text)?;
    let used = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let n = used.max(min_vars.unwrap_or(0)).max(1);
    let end = text.len();
    let mut parser = Parser { toks, pos: 0, field, n, end };
    if parser.peek().is_none() {
        return err(0, "empty polynomial");
    }
    let terms = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return err(parser.offset(), "unexpected trailing input");
    }
    if terms.is_empty() {
        return err(0, "polynomial is zero");
    }
    HomForm::new(field, n, terms).map_err(|e| match e {
        Error::Invalid(m) => Error::Parse { offset: 0, message: m },
        other => other,
    })
}

fn var_name(n: usize, i: usize) -> String {
    if n <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

/// Canonical text: terms in decreasing lexicographic order of exponents.
pub fn format_form(f: &HomForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let field = f.field();
    let n = f.nvars();
    let mut parts = Vec::new();
    for (v, &c) in f.terms().iter().rev() {
        let mono: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { var_name(n, i) } else { format!("{}^{e}", var_name(n, i)) })
            .collect();
        let cs = field.format(c);
        let cs = if cs.contains('+') { format!("({cs})") } else { cs };
        parts.push(match (c, mono.is_empty()) {
            (_, true) => cs,
            (1, false) => mono.join("*"),
            _ => format!("{cs}*{}", mono.join("*")),
        });
    }
    parts.join("+")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn parses_common_shapes() {
        let f = parse_form("x^5+y^5", &fp(7), None).unwrap();
        assert_eq!(f.nvars(), 2);
        assert_eq!(f.degree(), 5);
        assert_eq!(f.to_string(), "x^5+y^5");
        let g = parse_form("2x^2 y^3 - 9*y^5", &fp(7), None).unwrap();
        assert_eq!(g.to_string(), "2*x^2*y^3+5*y^5");
        let h = parse_form("(x+y)^2", &fp(3), None).unwrap();
        assert_eq!(h.to_string(), "x^2+2*x*y+y^2");
        let m = parse_form("x1*x2*x3", &fp(5), None).unwrap();
        assert_eq!(m.nvars(), 3);
        assert_eq!(m.to_string(), "x*y*z");
        let w = parse_form("x1*x4", &fp(5), None).unwrap();
        assert_eq!(w.to_string(), "x1*x4");
    }

    #[test]
    fn field_coefficients() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let f = parse_form("(2*t+1)*x^2 + t*y^2", &f9, None).unwrap();
        assert_eq!(f.to_string(), "(2*t+1)*x^2+t*y^2");
        assert_eq!(parse_form(&f.to_string(), &f9, None).unwrap(), f);
        let e = parse_form("t*x", &fp(3), None).unwrap_err();
        assert!(matches!(e, Error::Parse { offset: 0, .. }));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_form("(unparsable", &fp(5), None) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
        match parse_form("x^2 + y)", &fp(5), None) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 7),
            other => panic!("{other:?}"),
        }
        match parse_form("x^2 + #", &fp(5), None) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_form("x^2+y", &fp(5), None).is_err());
        assert!(parse_form("5*x", &fp(5), None).is_err());
        assert!(parse_form("", &fp(5), None).is_err());
    }
}
