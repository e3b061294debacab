//! Sparse multivariate polynomials with `BigInt` coefficients.
//!
//! Monomials are ordered by graded lexicographic order (total degree first,
//! then lexicographic in the variable list), which makes leading terms well
//! defined and exact division by leading-term cancellation sound. Variables
//! live in a shared [`Ring`] that mixes lattice symbols and family parameters
//! uniformly; polynomials belonging to different rings never interoperate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// A named list of variables shared by all polynomials of one computation.
#[derive(Debug, PartialEq, Eq)]
pub struct Ring {
    vars: Vec<String>,
}

impl Ring {
    /// Creates a ring with the given variable names, in order. Names must be
    /// non-empty, unique, and start with an ASCII letter.
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Arc<Ring> {
        let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_owned()).collect();
        for (i, v) in vars.iter().enumerate() {
            assert!(
                !v.is_empty() && v.chars().next().unwrap().is_ascii_alphabetic(),
                "invalid variable name {v:?}"
            );
            assert!(
                v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\''),
                "invalid variable name {v:?}"
            );
            assert!(!vars[..i].contains(v), "duplicate variable name {v:?}");
        }
        Arc::new(Ring { vars })
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a.vars == b.vars
}

/// Exponent vector of one monomial; the length always equals the ring's
/// variable count.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(Vec<u16>);

impl Mono {
    fn one(n: usize) -> Mono {
        Mono(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise division; `None` if any exponent would go negative.
    fn try_div(&self, other: &Mono) -> Option<Mono> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u16>>>()
            .map(Mono)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyParseError {
    #[error("unexpected character {found:?} at byte {at}")]
    UnexpectedChar { found: char, at: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable {name:?} (ring has {known:?})")]
    UnknownVariable { name: String, known: Vec<String> },
    #[error("exponent out of range at byte {at}")]
    ExponentRange { at: usize },
    #[error("trailing input at byte {at}")]
    Trailing { at: usize },
}

/// A sparse polynomial over the integers. Zero coefficients are never stored.
#[derive(Clone)]
pub struct MultiPoly {
    ring: Arc<Ring>,
    terms: BTreeMap<Mono, BigInt>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(ring: &Arc<Ring>) -> MultiPoly {
        MultiPoly { ring: Arc::clone(ring), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: impl Into<BigInt>) -> MultiPoly {
        let mut p = MultiPoly::zero(ring);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(Mono::one(ring.n_vars()), c);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> MultiPoly {
        MultiPoly::constant(ring, 1)
    }

    pub fn var(ring: &Arc<Ring>, index: usize) -> MultiPoly {
        assert!(index < ring.n_vars(), "variable index {index} out of range");
        let mut exps = vec![0u16; ring.n_vars()];
        exps[index] = 1;
        let mut p = MultiPoly::zero(ring);
        p.terms.insert(Mono(exps), BigInt::one());
        p
    }

    pub fn var_named(ring: &Arc<Ring>, name: &str) -> MultiPoly {
        let idx = ring
            .var_index(name)
            .unwrap_or_else(|| panic!("ring has no variable {name:?}"));
        MultiPoly::var(ring, idx)
    }

    /// The homogeneous linear form with the given coefficient per variable.
    pub fn linear(ring: &Arc<Ring>, coeffs: &[BigInt]) -> MultiPoly {
        assert_eq!(coeffs.len(), ring.n_vars(), "coefficient count mismatch");
        let mut p = MultiPoly::zero(ring);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exps = vec![0u16; ring.n_vars()];
                exps[i] = 1;
                p.terms.insert(Mono(exps), c.clone());
            }
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    /// `Some(d)` if every term has total degree `d` (zero counts as
    /// homogeneous of every degree and reports `Some(0)`).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Mono::degree);
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|e| e == d).then_some(d),
        }
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Coefficient vector of a linear form (degree <= 1 with zero constant
    /// term). `None` if the polynomial is not homogeneous linear.
    pub fn linear_coeffs(&self) -> Option<Vec<BigInt>> {
        let mut coeffs = vec![BigInt::zero(); self.ring.n_vars()];
        for (m, c) in &self.terms {
            if m.degree() != 1 {
                return None;
            }
            let i = m.0.iter().position(|&e| e == 1).unwrap();
            coeffs[i] = c.clone();
        }
        Some(coeffs)
    }

    pub fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn insert_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch in sub");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch in mul");
        let mut out = MultiPoly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::one(&self.ring);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact division over the integers: returns `q` with `self == q * den`,
    /// or `None` when no such integer-coefficient quotient exists.
    pub fn exact_div(&self, den: &MultiPoly) -> Option<MultiPoly> {
        assert!(same_ring(&self.ring, &den.ring), "ring mismatch in exact_div");
        let (dm, dc) = den.leading()?; // zero divisor -> None
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.ring);
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.try_div(&dm)?;
            let (c, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            let mut t = MultiPoly::zero(&self.ring);
            t.terms.insert(m, c);
            rem = rem.sub(&t.mul(den));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Greatest common divisor of the coefficients (zero for the zero
    /// polynomial); always non-negative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and flips signs so the leading coefficient is
    /// positive. Returns the normalized polynomial together with the factor
    /// it was divided by (so `self == factor * normalized`). The zero
    /// polynomial normalizes to itself with factor 1.
    pub fn primitive_normalized(&self) -> (BigInt, MultiPoly) {
        if self.is_zero() {
            return (BigInt::one(), self.clone());
        }
        let mut f = self.content();
        if self.leading().unwrap().1.is_negative() {
            f = -f;
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c / &f;
        }
        (f, out)
    }

    /// Substitutes `images[i]` for variable `i`. All images must share one
    /// ring, which becomes the ring of the result.
    pub fn subst(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.ring.n_vars(), "image count mismatch");
        let target = images
            .first()
            .map(|p| Arc::clone(&p.ring))
            .unwrap_or_else(|| Arc::clone(&self.ring));
        assert!(
            images.iter().all(|p| same_ring(&p.ring, &target)),
            "substitution images live in different rings"
        );
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&images[i].pow(e as u32));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Evaluates at an integer point.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.ring.n_vars(), "point length mismatch");
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Parses an expression over this ring: integers, variable names, `+`,
    /// `-` (binary and unary), `*`, `^` with non-negative integer exponents,
    /// and parentheses. Adjacency does not multiply; `*` is required.
    pub fn parse(ring: &Arc<Ring>, input: &str) -> Result<MultiPoly, PolyParseError> {
        let mut p = Parser { ring, bytes: input.as_bytes(), pos: 0 };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(PolyParseError::Trailing { at: p.pos });
        }
        Ok(poly)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(abs.to_string());
            }
            for (v, &e) in self.ring.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyParseError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, PolyParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                return match self.bytes.get(self.pos) {
                    Some(&b) => Err(PolyParseError::UnexpectedChar { found: b as char, at: self.pos }),
                    None => Err(PolyParseError::UnexpectedEnd),
                };
            }
            let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
            let e: u16 = text
                .parse()
                .map_err(|_| PolyParseError::ExponentRange { at: start })?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyParseError> {
        match self.peek() {
            None => Err(PolyParseError::UnexpectedEnd),
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    match self.bytes.get(self.pos) {
                        Some(&b) => Err(PolyParseError::UnexpectedChar { found: b as char, at: self.pos }),
                        None => Err(PolyParseError::UnexpectedEnd),
                    }
                }
            }
            Some(b) if b.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                Ok(MultiPoly::constant(self.ring, text.parse::<BigInt>().unwrap()))
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric()
                        || self.bytes[self.pos] == b'_'
                        || self.bytes[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                match self.ring.var_index(name) {
                    Some(i) => Ok(MultiPoly::var(self.ring, i)),
                    None => Err(PolyParseError::UnknownVariable {
                        name: name.to_owned(),
                        known: self.ring.vars.clone(),
                    }),
                }
            }
            Some(b) => Err(PolyParseError::UnexpectedChar { found: b as char, at: self.pos }),
        }
    }
}

/// Elementary symmetric polynomial `e_k` of the given polynomials.
pub fn elementary_symmetric(ring: &Arc<Ring>, items: &[MultiPoly], k: usize) -> MultiPoly {
    // dp[j] holds e_j of the prefix processed so far
    let mut dp: Vec<MultiPoly> = Vec::with_capacity(k + 1);
    dp.push(MultiPoly::one(ring));
    for _ in 0..k {
        dp.push(MultiPoly::zero(ring));
    }
    for item in items {
        for j in (1..=k).rev() {
            let add = dp[j - 1].mul(item);
            dp[j] = dp[j].add(&add);
        }
    }
    dp.swap_remove(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_xy() -> Arc<Ring> {
        Ring::new(&["x", "y"])
    }

    #[test]
    fn graded_lex_orders_by_degree_then_lex() {
        // x^2 > x*y > y^2 > x > y > 1
        let m = |a: u16, b: u16| Mono(vec![a, b]);
        let mut v = vec![m(0, 0), m(0, 1), m(1, 0), m(0, 2), m(1, 1), m(2, 0)];
        v.sort();
        assert_eq!(v, vec![m(0, 0), m(0, 1), m(1, 0), m(0, 2), m(1, 1), m(2, 0)]);
        assert!(m(2, 0) > m(1, 1));
        assert!(m(1, 1) > m(0, 2));
        assert!(m(0, 2) > m(1, 0));
    }

    #[test]
    fn arithmetic_matches_hand_expansion() {
        let r = ring_xy();
        let x = MultiPoly::var_named(&r, "x");
        let y = MultiPoly::var_named(&r, "y");
        // (x + y)(x - y) = x^2 - y^2
        let prod = x.add(&y).mul(&x.sub(&y));
        let expect = x.pow(2).sub(&y.pow(2));
        assert_eq!(prod, expect);
        // (2x + y)^2 = 4x^2 + 4xy + y^2
        let two_x = x.scale(&BigInt::from(2));
        let sq = two_x.add(&y).pow(2);
        assert_eq!(sq, MultiPoly::parse(&r, "4*x^2 + 4*x*y + y^2").unwrap());
    }

    #[test]
    fn parse_display_round_trip() {
        let r = ring_xy();
        for s in [
            "0",
            "1",
            "-1",
            "x",
            "-x + y",
            "3*x^2*y - 2*x + 7",
            "x^4 - 2*x^2*y^2 + y^4",
            "-5*x*y",
        ] {
            let p = MultiPoly::parse(&r, s).unwrap();
            assert_eq!(p.to_string(), s, "display of parse of {s:?}");
            let q = MultiPoly::parse(&r, &p.to_string()).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn parse_handles_nesting_and_unary_minus() {
        let r = ring_xy();
        let p = MultiPoly::parse(&r, "-(x - 2)*(-y + x)^2").unwrap();
        let x = MultiPoly::var_named(&r, "x");
        let y = MultiPoly::var_named(&r, "y");
        let two = MultiPoly::constant(&r, 2);
        let expect = x.sub(&two).mul(&x.sub(&y).pow(2)).neg();
        assert_eq!(p, expect);
    }

    #[test]
    fn parse_rejects_unknown_variable() {
        let r = ring_xy();
        let err = MultiPoly::parse(&r, "x + z").unwrap_err();
        assert!(matches!(err, PolyParseError::UnknownVariable { .. }));
    }

    #[test]
    fn exact_division_recovers_factor() {
        let r = ring_xy();
        let a = MultiPoly::parse(&r, "x^2 - x*y + 3").unwrap();
        let b = MultiPoly::parse(&r, "2*x + y").unwrap();
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&b), Some(a.clone()));
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        // not divisible: remainder nonzero
        let c = prod.add(&MultiPoly::one(&r));
        assert_eq!(c.exact_div(&b), None);
        // integer-exactness: (2x) / 2 works, (2x + 1) / 2 does not
        let two = MultiPoly::constant(&r, 2);
        let x = MultiPoly::var_named(&r, "x");
        assert_eq!(x.scale(&BigInt::from(2)).exact_div(&two), Some(x.clone()));
        let odd = x.scale(&BigInt::from(2)).add(&MultiPoly::one(&r));
        assert_eq!(odd.exact_div(&two), None);
    }

    #[test]
    fn content_and_primitive_normalization() {
        let r = ring_xy();
        let p = MultiPoly::parse(&r, "-6*x^2 + 9*x*y - 3*y^2").unwrap();
        assert_eq!(p.content(), BigInt::from(3));
        let (f, norm) = p.primitive_normalized();
        assert_eq!(f, BigInt::from(-3));
        assert_eq!(norm, MultiPoly::parse(&r, "2*x^2 - 3*x*y + y^2").unwrap());
        assert_eq!(norm.scale(&f), p);
    }

    #[test]
    fn substitution_changes_basis() {
        // rewrite p(x, y) in terms of u = x + y, v = y: x -> u - v, y -> v
        let r = ring_xy();
        let s = Ring::new(&["u", "v"]);
        let p = MultiPoly::parse(&r, "x^2 + 2*x*y + y^2").unwrap();
        let img = vec![
            MultiPoly::parse(&s, "u - v").unwrap(),
            MultiPoly::parse(&s, "v").unwrap(),
        ];
        assert_eq!(p.subst(&img), MultiPoly::parse(&s, "u^2").unwrap());
    }

    #[test]
    fn evaluation_at_integer_points() {
        let r = ring_xy();
        let p = MultiPoly::parse(&r, "x^3 - 2*x*y + 5").unwrap();
        let v = p.eval_int(&[BigInt::from(3), BigInt::from(-2)]);
        assert_eq!(v, BigInt::from(27 + 12 + 5));
    }

    #[test]
    fn linear_coeffs_extracts_forms() {
        let r = ring_xy();
        let p = MultiPoly::parse(&r, "-2*x + 3*y").unwrap();
        assert_eq!(
            p.linear_coeffs(),
            Some(vec![BigInt::from(-2), BigInt::from(3)])
        );
        assert!(MultiPoly::parse(&r, "x + 1").unwrap().linear_coeffs().is_none());
        assert!(MultiPoly::parse(&r, "x*y").unwrap().linear_coeffs().is_none());
        assert_eq!(
            MultiPoly::zero(&r).linear_coeffs(),
            Some(vec![BigInt::zero(), BigInt::zero()])
        );
    }

    #[test]
    fn elementary_symmetric_of_weights() {
        let r = ring_xy();
        let items: Vec<MultiPoly> = ["x", "y", "x + y"]
            .iter()
            .map(|s| MultiPoly::parse(&r, s).unwrap())
            .collect();
        let e1 = elementary_symmetric(&r, &items, 1);
        let e2 = elementary_symmetric(&r, &items, 2);
        let e3 = elementary_symmetric(&r, &items, 3);
        assert_eq!(e1, MultiPoly::parse(&r, "2*x + 2*y").unwrap());
        // xy + x(x+y) + y(x+y) = x^2 + 3xy + y^2
        assert_eq!(e2, MultiPoly::parse(&r, "x^2 + 3*x*y + y^2").unwrap());
        assert_eq!(e3, MultiPoly::parse(&r, "x^2*y + x*y^2").unwrap());
    }

    #[test]
    fn homogeneous_degree_detection() {
        let r = ring_xy();
        assert_eq!(
            MultiPoly::parse(&r, "x^2 + x*y").unwrap().homogeneous_degree(),
            Some(2)
        );
        assert_eq!(
            MultiPoly::parse(&r, "x^2 + x").unwrap().homogeneous_degree(),
            None
        );
        assert_eq!(MultiPoly::zero(&r).homogeneous_degree(), Some(0));
    }
}
