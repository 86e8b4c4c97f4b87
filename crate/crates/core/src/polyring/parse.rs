use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ExponentVector, Modulus, SparsePoly};

/// A polynomial-text error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

/// Ordered variable names; variable `i` is the `i`-th exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ParseError> {
        let mut index = HashMap::new();
        let mut out = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().trim();
            if !valid_name(n) {
                return err(0, format!("invalid variable name {n:?}"));
            }
            if index.insert(n.to_string(), i).is_some() {
                return err(0, format!("duplicate variable {n:?}"));
            }
            out.push(n.to_string());
        }
        Ok(VarSet { names: out, index })
    }

    /// Names separated by commas and/or whitespace.
    pub fn parse_list(s: &str) -> Result<Self, ParseError> {
        let names: Vec<&str> = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        Self::new(&names)
    }

    /// `x1, ..., xn`.
    pub fn indexed(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Self::new(&names).expect("generated names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Longest declared name that prefixes `rest`, so `x^2yw` reads as `x^2*y*w`.
    fn match_var(&self, rest: &str) -> Option<(usize, usize)> {
        self.names.iter().enumerate().filter(|(_, n)| rest.starts_with(n.as_str())).max_by_key(|(_, n)| n.len()).map(|(i, n)| (i, n.len()))
    }

    pub fn parse_poly(&self, s: &str, modulus: Modulus) -> Result<SparsePoly, ParseError> {
        Parser { src: s, pos: 0, vars: self, modulus }.poly()
    }

    /// Canonical text: graded-lex order, explicit `*` and `^`, terms joined by ` + `.
    pub fn format(&self, a: &SparsePoly) -> String {
        assert_eq!(a.nvars(), self.len(), "variable count mismatch");
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in a.terms().iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let mut factors = Vec::new();
            for (k, &x) in e.as_slice().iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.names[k].clone()),
                    _ => factors.push(format!("{}^{}", self.names[k], x)),
                }
            }
            if factors.is_empty() {
                let _ = write!(out, "{c}");
            } else {
                if *c != 1 {
                    let _ = write!(out, "{c}*");
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    vars: &'a VarSet,
    modulus: Modulus,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += self.peek().unwrap().len_utf8();
        }
    }

    fn digits(&mut self) -> Option<&str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn poly(mut self) -> Result<SparsePoly, ParseError> {
        let n = self.vars.len();
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negate = false;
        if self.peek() == Some('-') {
            negate = true;
            self.pos += 1;
        }
        loop {
            self.skip_ws();
            let (e, mut c) = self.term()?;
            if negate {
                c = self.modulus.neg(c);
            }
            terms.push((e, c));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => negate = false,
                Some('-') => negate = true,
                Some(ch) => return err(self.pos, format!("unexpected character {ch:?}")),
            }
            self.pos += 1;
        }
        Ok(SparsePoly::from_terms(self.modulus, n, terms))
    }

    fn term(&mut self) -> Result<(ExponentVector, u64), ParseError> {
        let start = self.pos;
        let modulus = self.modulus;
        let coeff = self.digits().map(|d| modulus.reduce_decimal(d));
        self.skip_ws();
        let mut exps = vec![0u32; self.vars.len()];
        let mut have_factor = false;
        loop {
            let save = self.pos;
            if have_factor || coeff.is_some() {
                self.skip_ws();
                if self.peek() == Some('*') {
                    self.pos += 1;
                    self.skip_ws();
                    if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
                        return err(self.pos, "expected a variable after '*'");
                    }
                }
            }
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => {
                    let at = self.pos;
                    let Some((i, len)) = self.vars.match_var(self.rest()) else {
                        let ident: String = self.rest().chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
                        return err(at, format!("undeclared variable {ident:?}"));
                    };
                    self.pos += len;
                    self.skip_ws();
                    let mut k = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        let p = self.pos;
                        let Some(d) = self.digits() else {
                            return err(p, "expected an exponent after '^'");
                        };
                        k = d.parse().map_err(|_| ParseError { pos: p, msg: "exponent too large".into() })?;
                    }
                    exps[i] = exps[i].checked_add(k).ok_or(ParseError { pos: at, msg: "exponent overflow".into() })?;
                    have_factor = true;
                }
                _ => {
                    self.pos = save;
                    break;
                }
            }
        }
        if coeff.is_none() && !have_factor {
            return err(start, "expected a term");
        }
        Ok((ExponentVector::new(&exps), coeff.unwrap_or(1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> Modulus {
        Modulus::field(p).unwrap()
    }

    #[test]
    fn juxtaposition_and_longest_match() {
        let v = VarSet::parse_list("x,y,z,w").unwrap();
        let a = v.parse_poly("x^4+y^4+z^4+2w^4+x^2yw+yz^2w", m(3)).unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(v.format(&a), "x^4 + x^2*y*w + y^4 + y*z^2*w + z^4 + 2*w^4");
        let v = VarSet::parse_list("x0 x1 x2 y0 y1 y2").unwrap();
        let b = v.parse_poly("x0y0^2+x1y1^2+x2 y2^2", m(2)).unwrap();
        assert_eq!(v.format(&b), "x0*y0^2 + x1*y1^2 + x2*y2^2");
    }

    #[test]
    fn coefficients_reduce_silently() {
        let v = VarSet::parse_list("x").unwrap();
        assert_eq!(v.format(&v.parse_poly("7x + 3", m(3)).unwrap()), "x");
        assert_eq!(v.format(&v.parse_poly("2*x - x", m(5)).unwrap()), "x");
        assert_eq!(v.format(&v.parse_poly("-1", m(5)).unwrap()), "4");
        assert_eq!(v.format(&v.parse_poly("0", m(5)).unwrap()), "0");
    }

    #[test]
    fn errors_carry_positions() {
        let v = VarSet::parse_list("x,y").unwrap();
        let e = v.parse_poly("x + q^2", m(2)).unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(e.msg.contains("undeclared"));
        assert_eq!(v.parse_poly("x^", m(2)).unwrap_err().pos, 2);
        assert!(v.parse_poly("x + ", m(2)).is_err());
        assert!(v.parse_poly("x ** y", m(2)).is_err());
        assert!(VarSet::parse_list("x,x").is_err());
        assert!(VarSet::parse_list("1x").is_err());
    }

    #[test]
    fn round_trip_is_fixed_point() {
        let v = VarSet::parse_list("a,b,c").unwrap();
        for s in ["a^3 + 2*b*c + 1", "c^7*a + b", "3*a*b*c + a^2 + 4"] {
            let p = v.parse_poly(s, m(5)).unwrap();
            let t = v.format(&p);
            let q = v.parse_poly(&t, m(5)).unwrap();
            assert_eq!(p, q);
            assert_eq!(v.format(&q), t);
        }
    }
}
