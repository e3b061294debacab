//! Number-theoretic constraints on Chern and Betti numbers of closed
//! symplectic 8-manifolds with a Hamiltonian circle action and isolated
//! fixed points.
//!
//! The Todd genus of such a manifold is 1, which in dimension 8 reads
//!
//! ```text
//! -c1^4 + 4 c1^2 c2 + 3 c2^2 + c1 c3 - c4 = 720.
//! ```
//!
//! Two Chern numbers are linear in the Betti numbers (`c4 = 2 + 2 b2 + b4`,
//! `c1 c3 = 44 + 8 b2 - 2 b4`), and the index `k0` constrains the rest.
//! When `b2 = 1` the intersection form on `H^4` is positive definite, which
//! pins the remaining Chern numbers to finitely many values per `b4`; for
//! Euler characteristic 6 two small Diophantine systems sharpen the list to
//! the tables reproduced in the tests.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiophantineError {
    #[error("even Betti vector must have at least two entries, got {0}")]
    TooShort(usize),
    #[error("b_0 must be 1, got {0}")]
    BadB0(u64),
    #[error("even Betti numbers must satisfy Poincare duality (palindromic vector)")]
    NotPalindromic,
    #[error("index {0} is not in the supported range")]
    UnsupportedIndex(u64),
    #[error("Betti vector has {got} entries but half-dimension n = {n} needs {need}")]
    WrongLength { got: usize, n: usize, need: usize },
}

/// The even Betti numbers `b_0, b_2, ..., b_{2n}` of a closed symplectic
/// manifold of dimension `2n` with a Hamiltonian circle action and isolated
/// fixed points: `entry(i)` is `b_{2i}`. Always starts at 1 and is
/// palindromic (Poincare duality; odd Betti numbers vanish).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiVector {
    b: Vec<u64>,
}

impl BettiVector {
    pub fn new(b: Vec<u64>) -> Result<Self, DiophantineError> {
        if b.len() < 2 {
            return Err(DiophantineError::TooShort(b.len()));
        }
        if b[0] != 1 {
            return Err(DiophantineError::BadB0(b[0]));
        }
        let n = b.len();
        if (0..n).any(|i| b[i] != b[n - 1 - i]) {
            return Err(DiophantineError::NotPalindromic);
        }
        Ok(BettiVector { b })
    }

    /// dim-8 vector `(1, b2, b4, b2, 1)`
    pub fn dim8(b2: u64, b4: u64) -> Self {
        BettiVector { b: vec![1, b2, b4, b2, 1] }
    }

    /// half-dimension `n` (the manifold has dimension `2n`)
    pub fn n(&self) -> usize {
        self.b.len() - 1
    }

    /// `b_{2i}`
    pub fn entry(&self, i: usize) -> u64 {
        self.b[i]
    }

    pub fn b2(&self) -> u64 {
        self.b[1]
    }

    pub fn b4(&self) -> u64 {
        self.b[2]
    }

    /// Euler characteristic = number of fixed points
    pub fn euler(&self) -> u64 {
        self.b.iter().sum()
    }

    /// unimodality of the lower half, `b_0 <= b_2 <= ... <= b_n`
    pub fn is_unimodal(&self) -> bool {
        let half = self.b.len().div_ceil(2);
        self.b[..half].windows(2).all(|w| w[0] <= w[1])
    }
}

/// The five Chern numbers of a closed 8-manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChernNumberSet {
    pub c1_4: i64,
    pub c1sq_c2: i64,
    pub c2_2: i64,
    pub c1c3: i64,
    pub c4: i64,
}

impl ChernNumberSet {
    /// Todd genus 1 in dimension 8.
    pub fn todd_relation_holds(&self) -> bool {
        -self.c1_4 + 4 * self.c1sq_c2 + 3 * self.c2_2 + self.c1c3 - self.c4 == 720
    }
}

/// `(c4, c1c3) = (2 + 2 b2 + b4, 44 + 8 b2 - 2 b4)` in dimension 8.
pub fn betti_to_c4_c1c3(b: &BettiVector) -> (i64, i64) {
    let (b2, b4) = (b.b2() as i64, b.b4() as i64);
    (2 + 2 * b2 + b4, 44 + 8 * b2 - 2 * b4)
}

/// `sigma(M) = 2 - 2 b2 + b4` in dimension 8.
pub fn signature_from_betti(b: &BettiVector) -> i64 {
    2 - 2 * (b.b2() as i64) + b.b4() as i64
}

/// An exact affine function of `c1^4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineInC14 {
    pub constant: Rational64,
    pub slope: Rational64,
}

impl AffineInC14 {
    fn new(constant: Rational64, slope: Rational64) -> Self {
        AffineInC14 { constant, slope }
    }

    /// evaluates at an integer `c1^4`, requiring an integer result
    pub fn eval(&self, c1_4: i64) -> Option<i64> {
        let v = self.constant + self.slope * Rational64::from_integer(c1_4);
        v.is_integer().then(|| v.to_integer())
    }
}

/// Constraints the index places on `c1^4`, `c1^2 c2` and `c2^2` (dimension
/// 8). Index 1 gives no relation; 4 and 5 determine everything; 2 and 3
/// leave one degree of freedom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChernRelations {
    Unconstrained,
    Determined { c1_4: i64, c1sq_c2: i64, c2_2: i64 },
    AffineInC14 { c1sq_c2: AffineInC14, c2_2: AffineInC14 },
}

impl ChernRelations {
    pub fn of(k0: u64, b: &BettiVector) -> Result<Self, DiophantineError> {
        let (b2, b4) = (b.b2() as i64, b.b4() as i64);
        let r = |n: i64, d: i64| Rational64::new(n, d);
        match k0 {
            1 => Ok(ChernRelations::Unconstrained),
            5 => Ok(ChernRelations::Determined {
                c1_4: 625,
                c1sq_c2: 250,
                c2_2: 101 - 2 * b2 + b4,
            }),
            4 => Ok(ChernRelations::Determined {
                c1_4: 512,
                c1sq_c2: 224,
                c2_2: 98 - 2 * b2 + b4,
            }),
            3 => Ok(ChernRelations::AffineInC14 {
                c1sq_c2: AffineInC14::new(r(108, 1), r(2, 9)),
                c2_2: AffineInC14::new(r(82 - 2 * b2 + b4, 1), r(1, 27)),
            }),
            2 => Ok(ChernRelations::AffineInC14 {
                c1sq_c2: AffineInC14::new(r(96, 1), r(1, 4)),
                c2_2: AffineInC14::new(r(98 - 2 * b2 + b4, 1), r(0, 1)),
            }),
            other => Err(DiophantineError::UnsupportedIndex(other)),
        }
    }

    /// does a full Chern number set satisfy these relations?
    pub fn satisfied_by(&self, c: &ChernNumberSet) -> bool {
        match self {
            ChernRelations::Unconstrained => true,
            ChernRelations::Determined { c1_4, c1sq_c2, c2_2 } => {
                c.c1_4 == *c1_4 && c.c1sq_c2 == *c1sq_c2 && c.c2_2 == *c2_2
            }
            ChernRelations::AffineInC14 { c1sq_c2, c2_2 } => {
                c1sq_c2.eval(c.c1_4) == Some(c.c1sq_c2) && c2_2.eval(c.c1_4) == Some(c.c2_2)
            }
        }
    }
}

/// Solutions of `x^2 + y^2 + 24 = y1 x + y2 y` with `y1, y2` in `{-7, 7}`.
/// The absolute values `(|x|, |y|)` always land in
/// `{(3,3), (3,4), (4,3), (4,4)}`.
pub fn numlem_solutions() -> Vec<(i64, i64, i64, i64)> {
    // completeness: a solution forces (x^2 - 7|x|) + (y^2 - 7|y|) <= -24,
    // and each summand is at least -12, so both |x|, |y| <= 7 < 24
    let mut out = Vec::new();
    for y1 in [-7i64, 7] {
        for y2 in [-7i64, 7] {
            for x in -24..=24 {
                for y in -24i64..=24 {
                    if x * x + y * y + 24 == y1 * x + y2 * y {
                        out.push((x, y, y1, y2));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The distinct `(|x|, |y|)` values among [`numlem_solutions`].
pub fn numlem_abs_pairs() -> BTreeSet<(i64, i64)> {
    numlem_solutions()
        .into_iter()
        .map(|(x, y, _, _)| (x.abs(), y.abs()))
        .collect()
}

/// Is `n` a sum of two squares? Euler's characterization: every prime
/// congruent to 3 mod 4 divides `n` to an even power.
pub fn is_sum_of_two_squares(n: u64) -> bool {
    if n == 0 {
        return true;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if p % 4 == 3 && e % 2 == 1 {
                return false;
            }
        }
        p += 1;
    }
    if m > 1 && m % 4 == 3 {
        return false;
    }
    true
}

/// A solution of the pair of lattice equations
/// `|u|^2 = 3 |v|^2 + 82`, `<u, v> = 2 |v|^2 + 12` in `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticePairSolution {
    pub u: (i64, i64),
    pub v: (i64, i64),
}

impl LatticePairSolution {
    pub fn u_norm_sq(&self) -> i64 {
        self.u.0 * self.u.0 + self.u.1 * self.u.1
    }
    pub fn inner(&self) -> i64 {
        self.u.0 * self.v.0 + self.u.1 * self.v.1
    }
    pub fn v_norm_sq(&self) -> i64 {
        self.v.0 * self.v.0 + self.v.1 * self.v.1
    }
}

/// All solutions of the lattice system, enumerated inside the proven box
/// (`(|v|^2 - 17)^2 <= 145` gives `|v|^2 <= 29`, hence `|u|^2 <= 169`).
/// A sum-of-two-squares pre-filter skips infeasible `|v|^2` values before
/// the quadratic enumeration.
pub fn uv_solutions() -> Vec<LatticePairSolution> {
    uv_solutions_with_box(5, 13)
}

/// Same enumeration with explicit coordinate bounds; the default box is
/// `|c|,|d| <= 5`, `|a|,|b| <= 13`. Rerunning with a doubled box must give
/// the identical set (completeness check in the tests).
pub fn uv_solutions_with_box(v_bound: i64, u_bound: i64) -> Vec<LatticePairSolution> {
    let feasible: BTreeSet<i64> = (1..=29)
        .filter(|&s| {
            is_sum_of_two_squares(s as u64) && is_sum_of_two_squares((3 * s + 82) as u64)
        })
        .collect();
    let mut out = Vec::new();
    for c in -v_bound..=v_bound {
        for d in -v_bound..=v_bound {
            let s = c * c + d * d;
            if !feasible.contains(&s) {
                continue;
            }
            let target_u = 3 * s + 82;
            let target_ip = 2 * s + 12;
            for a in -u_bound..=u_bound {
                for b in -u_bound..=u_bound {
                    if a * a + b * b == target_u && a * c + b * d == target_ip {
                        out.push(LatticePairSolution { u: (a, b), v: (c, d) });
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The distinct `(|u|^2, <u,v>, |v|^2)` triples among [`uv_solutions`].
pub fn uv_value_triples() -> BTreeSet<(i64, i64, i64)> {
    uv_solutions()
        .into_iter()
        .map(|s| (s.u_norm_sq(), s.inner(), s.v_norm_sq()))
        .collect()
}

/// The finite list of Chern numbers compatible with index `k0` and
/// `b2 = 1`, per value of `b4` (dimension 8). For `b4 = 2` (six fixed
/// points) the Euclidean-lattice refinements apply; other `b4` get the
/// interval bounds only. Sorted by `c1^4`.
pub fn chern_number_candidates(k0: u64, b4: u64) -> Result<Vec<ChernNumberSet>, DiophantineError> {
    if !(2..=5).contains(&k0) {
        return Err(DiophantineError::UnsupportedIndex(k0));
    }
    let b4 = b4 as i64;
    let c4 = 4 + b4;
    let c1c3 = 52 - 2 * b4;
    // the index divides c1 c3
    if c1c3 <= 0 || c1c3 % (k0 as i64) != 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    match k0 {
        5 => out.push(ChernNumberSet {
            c1_4: 625,
            c1sq_c2: 250,
            c2_2: 99 + b4,
            c1c3,
            c4,
        }),
        4 => out.push(ChernNumberSet {
            c1_4: 512,
            c1sq_c2: 224,
            c2_2: 96 + b4,
            c1c3,
            c4,
        }),
        3 => {
            // c1^4 = 81 A with (2A - (b4 + 32))^2 <= b4^2 + 64 b4 + 448
            let disc = b4 * b4 + 64 * b4 + 448;
            let in_interval = |a: i64| {
                let t = 2 * a - (b4 + 32);
                t * t <= disc
            };
            let a_values: Vec<i64> = if b4 == 2 {
                uv_value_triples().into_iter().map(|(_, _, v2)| v2).collect()
            } else {
                (1..=(b4 + 32)).filter(|&a| in_interval(a)).collect()
            };
            for a in a_values {
                debug_assert!(in_interval(a));
                out.push(ChernNumberSet {
                    c1_4: 81 * a,
                    c1sq_c2: 108 + 18 * a,
                    c2_2: 80 + b4 + 3 * a,
                    c1c3,
                    c4,
                });
            }
        }
        2 => {
            // c1^4 = 16 A with sqrt(A) in
            // [(sqrt(96 + b4) - sqrt(b4)) / 2, (sqrt(96 + b4) + sqrt(b4)) / 2];
            // both endpoint comparisons are done exactly by squaring
            let ge_lower = |a: i64| {
                // 4A >= 96 + 2 b4 - 2 sqrt(b4 (96 + b4))
                let rhs = 96 + 2 * b4 - 4 * a;
                rhs <= 0 || 4 * b4 * (96 + b4) >= rhs * rhs
            };
            let le_upper = |a: i64| {
                // 4A <= 96 + 2 b4 + 2 sqrt(b4 (96 + b4))
                let lhs = 4 * a - 96 - 2 * b4;
                lhs <= 0 || lhs * lhs <= 4 * b4 * (96 + b4)
            };
            let a_values: Vec<i64> = if b4 == 2 {
                numlem_abs_pairs().into_iter().map(|(x, y)| x * x + y * y).collect::<BTreeSet<_>>().into_iter().collect()
            } else {
                (1..=(96 + 2 * b4)).filter(|&a| ge_lower(a) && le_upper(a)).collect()
            };
            for a in a_values {
                debug_assert!(ge_lower(a) && le_upper(a));
                out.push(ChernNumberSet {
                    c1_4: 16 * a,
                    c1sq_c2: 96 + 4 * a,
                    c2_2: 96 + b4,
                    c1c3,
                    c4,
                });
            }
        }
        _ => unreachable!(),
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The budget `C(k0, n, b)`: the amount by which the total `c1`-magnitude
/// of a positive multigraph exceeds `k0 |E|`. A non-negative multiple of
/// `k0` whenever the manifold is described by a positive multigraph, zero
/// exactly when every edge has magnitude `k0`.
pub fn magnitude_budget_c(k0: u64, n: usize, b: &BettiVector) -> Result<i64, DiophantineError> {
    if b.n() != n {
        return Err(DiophantineError::WrongLength {
            got: b.n() + 1,
            n,
            need: n + 1,
        });
    }
    let k0 = k0 as i64;
    let ni = n as i64;
    let mut c = 0i64;
    if n % 2 == 0 {
        for k in 1..=(n / 2) as i64 {
            let idx = (ni - 2 * k) / 2; // subscript n - 2k is b_{n-2k} = entry((n-2k)/2)
            c += (12 * k * k - ni * (k0 + 1)) * b.entry(idx as usize) as i64;
        }
        c -= ni / 2 * (k0 + 1) * b.entry(n / 2) as i64;
    } else {
        for k in 1..=((n - 1) / 2) as i64 {
            let idx = (ni - 1 - 2 * k) / 2;
            c += (12 * k * (k + 1) + 3 - ni * (k0 + 1)) * b.entry(idx as usize) as i64;
        }
        c -= (ni * (k0 + 1) - 3) * b.entry((n - 1) / 2) as i64;
    }
    Ok(c)
}

/// Admissible `(b2, b4)` in dimension 8 for index `k0 >= 2`: the budget
/// must be a non-negative multiple of `k0`, and the even Betti numbers are
/// unimodal.
pub fn betti_candidates(k0: u64) -> Result<BTreeSet<(u64, u64)>, DiophantineError> {
    if !(2..=5).contains(&k0) {
        return Err(DiophantineError::UnsupportedIndex(k0));
    }
    let mut out = BTreeSet::new();
    // C >= 0 forces b4 <= 6 already at k0 = 2 and shrinks further for
    // larger k0, so a generous box is exhaustive
    for b2 in 1..=100u64 {
        for b4 in b2..=100u64 {
            let b = BettiVector::dim8(b2, b4);
            let c = magnitude_budget_c(k0, 4, &b)?;
            if c >= 0 && c % (k0 as i64) == 0 {
                out.insert((b2, b4));
            }
        }
    }
    Ok(out)
}
