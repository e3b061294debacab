//! Sums of rational functions with factored denominators.
//!
//! Fixed-point localization produces sums of terms `numerator / (scalar *
//! product of linear forms)`. Keeping the denominator in factored form makes
//! common denominators cheap and lets reduction proceed by repeated exact
//! division instead of multivariate gcd.

use crate::poly::{MultiPoly, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// A rational function `num / (den_scalar * prod factor^power)`.
///
/// Invariants after construction: `den_scalar > 0`; every factor is
/// primitive (content 1), has positive leading coefficient and is
/// nonconstant; factors are pairwise distinct and sorted by display string;
/// no factor divides `num` (the representation is reduced greedily); the
/// gcd of `den_scalar` and the content of `num` is 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: MultiPoly,
    den_scalar: BigInt,
    den_factors: Vec<(MultiPoly, u32)>,
}

impl RatFunc {
    pub fn zero(ring: &Arc<Ring>) -> RatFunc {
        RatFunc {
            num: MultiPoly::zero(ring),
            den_scalar: BigInt::one(),
            den_factors: Vec::new(),
        }
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        RatFunc { num: p, den_scalar: BigInt::one(), den_factors: Vec::new() }.reduced()
    }

    /// Builds `num / (scalar * prod factors)` and reduces. Factors may repeat
    /// and may carry content and signs; they are normalized here. A zero or
    /// constant factor is rejected as a construction error (`None`).
    pub fn new(num: MultiPoly, scalar: BigInt, factors: &[MultiPoly]) -> Option<RatFunc> {
        if scalar.is_zero() {
            return None;
        }
        let mut den_scalar = scalar;
        let mut collected: Vec<(MultiPoly, u32)> = Vec::new();
        for f in factors {
            let (c, norm) = f.primitive_normalized();
            if norm.is_zero() {
                return None;
            }
            den_scalar *= c;
            if norm.degree() == Some(0) {
                // constant factor: its content moved into the scalar
                continue;
            }
            match collected.iter_mut().find(|(g, _)| *g == norm) {
                Some((_, p)) => *p += 1,
                None => collected.push((norm, 1)),
            }
        }
        let num = if den_scalar.is_negative() {
            den_scalar = -den_scalar;
            num.neg()
        } else {
            num
        };
        Some(RatFunc { num, den_scalar, den_factors: collected }.reduced())
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.num.ring()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den_scalar(&self) -> &BigInt {
        &self.den_scalar
    }

    pub fn den_factors(&self) -> &[(MultiPoly, u32)] {
        &self.den_factors
    }

    fn reduced(mut self) -> RatFunc {
        if self.num.is_zero() {
            return RatFunc::zero(self.num.ring());
        }
        // cancel polynomial factors by repeated exact division
        let mut kept: Vec<(MultiPoly, u32)> = Vec::new();
        for (f, mut pow) in std::mem::take(&mut self.den_factors) {
            while pow > 0 {
                match self.num.exact_div(&f) {
                    Some(q) => {
                        self.num = q;
                        pow -= 1;
                    }
                    None => break,
                }
            }
            if pow > 0 {
                kept.push((f, pow));
            }
        }
        kept.sort_by_key(|(f, _)| f.to_string());
        self.den_factors = kept;
        // cancel shared integer content
        let g = self.num.content().gcd(&self.den_scalar);
        if !g.is_one() {
            self.num = self.num.exact_div(&MultiPoly::constant(self.num.ring(), g.clone())).unwrap();
            self.den_scalar = &self.den_scalar / &g;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the reduced form has no polynomial factors and unit scalar.
    pub fn is_polynomial(&self) -> bool {
        self.den_factors.is_empty() && self.den_scalar.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&MultiPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// The value as an exact rational number, if the function is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.den_factors.is_empty() {
            return None;
        }
        let c = self.num.as_constant()?;
        Some(BigRational::new(c, self.den_scalar.clone()))
    }

    /// The value as an integer, if the function is a constant integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        let c = self.as_constant()?;
        c.is_integer().then(|| c.to_integer())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den_scalar: self.den_scalar.clone(),
            den_factors: self.den_factors.clone(),
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        // lcm of denominators: max power per factor, lcm of scalars
        let mut factors: Vec<(MultiPoly, u32)> = self.den_factors.clone();
        for (g, q) in &other.den_factors {
            match factors.iter_mut().find(|(f, _)| f == g) {
                Some((_, p)) => *p = (*p).max(*q),
                None => factors.push((g.clone(), *q)),
            }
        }
        let scalar = self.den_scalar.lcm(&other.den_scalar);

        let cofactor = |rf: &RatFunc| -> MultiPoly {
            let mut co = MultiPoly::constant(rf.num.ring(), &scalar / &rf.den_scalar);
            for (f, p) in &factors {
                let have = rf
                    .den_factors
                    .iter()
                    .find(|(g, _)| g == f)
                    .map(|(_, q)| *q)
                    .unwrap_or(0);
                for _ in have..*p {
                    co = co.mul(f);
                }
            }
            co
        };
        let num = self.num.mul(&cofactor(self)).add(&other.num.mul(&cofactor(other)));
        RatFunc { num, den_scalar: scalar, den_factors: factors }.reduced()
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        let mut factors = self.den_factors.clone();
        for (g, q) in &other.den_factors {
            match factors.iter_mut().find(|(f, _)| f == g) {
                Some((_, p)) => *p += *q,
                None => factors.push((g.clone(), *q)),
            }
        }
        RatFunc {
            num: self.num.mul(&other.num),
            den_scalar: &self.den_scalar * &other.den_scalar,
            den_factors: factors,
        }
        .reduced()
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> RatFunc {
        RatFunc {
            num: self.num.mul(p),
            den_scalar: self.den_scalar.clone(),
            den_factors: self.den_factors.clone(),
        }
        .reduced()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_factors.is_empty() && self.den_scalar.is_one() {
            return write!(f, "{}", self.num);
        }
        let mut den = Vec::new();
        if !self.den_scalar.is_one() {
            den.push(self.den_scalar.to_string());
        }
        for (g, p) in &self.den_factors {
            if *p == 1 {
                den.push(format!("({g})"));
            } else {
                den.push(format!("({g})^{p}"));
            }
        }
        write!(f, "({}) / ({})", self.num, den.join("*"))
    }
}

/// Sums a sequence of terms and returns the reduced result.
pub fn ratfunc_sum_reduce(terms: &[RatFunc]) -> RatFunc {
    assert!(!terms.is_empty(), "empty rational function sum");
    let mut acc = RatFunc::zero(terms[0].ring());
    for t in terms {
        acc = acc.add(t);
    }
    acc
}
