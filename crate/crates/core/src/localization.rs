//! Exact fixed-point localization.
//!
//! For a torus action with isolated fixed points, the integral of an
//! equivariant class is the sum over fixed points of its restriction
//! divided by the product of the isotropy weights there,
//!
//! ```text
//! integral = sum over p of class(p) / Lambda_p .
//! ```
//!
//! Everything here is exact: restrictions are multivariate polynomials
//! (weights may carry parameters), sums are reduced rational functions,
//! and a class of cohomological degree 2n must integrate to an integer
//! while lower degrees must give zero. These identities double as strong
//! consistency checks on candidate weight data.

use crate::diophantine::ChernNumberSet;
use crate::poly::{elementary_symmetric, same_ring, MultiPoly, Ring};
use crate::ratfunc::{ratfunc_sum_reduce, RatFunc};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalizationError {
    #[error("fixed point {0} has a zero weight")]
    ZeroWeight(String),
    #[error("fixed point {id} has {got} weights, expected {want}")]
    WeightCount { id: String, got: usize, want: usize },
    #[error("torus rank {d} exceeds the ring's variable count {nvars}")]
    RankTooLarge { d: usize, nvars: usize },
    #[error("class restrictions given for {got} points, data has {want}")]
    RestrictionCount { got: usize, want: usize },
    #[error("weight data uses a different ring")]
    RingMismatch,
    #[error("no generic direction with coordinates up to {0} in absolute value")]
    NoGenericDirection(i64),
    #[error("integral is not a constant: {0}")]
    NotConstant(String),
    #[error("integral is not an integer: {0}")]
    NotInteger(String),
    #[error("edge difference {diff} is not divisible by the weight {weight}")]
    NotDivisible { diff: String, weight: String },
    #[error("edge evaluation is not an integer constant: {0}")]
    EdgeNotInteger(String),
    #[error("weight sign is not determined (nonconstant value) at {0}")]
    IndeterminateSign(String),
}

/// A fixed point with its multiset of isotropy weights. Weights are linear
/// forms in the first `d` ring variables (the torus coordinates); their
/// coefficients may involve the remaining variables (family parameters).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub id: String,
    pub weights: Vec<MultiPoly>,
}

/// Isotropy data for a rank `d` torus action with isolated fixed points on
/// a manifold of dimension `2n` (`n` nonzero weights at each point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointData {
    ring: Arc<Ring>,
    d: usize,
    points: Vec<FixedPoint>,
}

impl FixedPointData {
    pub fn new(
        ring: Arc<Ring>,
        d: usize,
        points: Vec<FixedPoint>,
    ) -> Result<Self, LocalizationError> {
        if d == 0 || d > ring.n_vars() {
            return Err(LocalizationError::RankTooLarge { d, nvars: ring.n_vars() });
        }
        let n = points.first().map_or(0, |p| p.weights.len());
        for p in &points {
            if p.weights.len() != n {
                return Err(LocalizationError::WeightCount {
                    id: p.id.clone(),
                    got: p.weights.len(),
                    want: n,
                });
            }
            for w in &p.weights {
                if !same_ring(w.ring(), &ring) {
                    return Err(LocalizationError::RingMismatch);
                }
                if w.is_zero() {
                    return Err(LocalizationError::ZeroWeight(p.id.clone()));
                }
            }
        }
        Ok(FixedPointData { ring, d, points })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// half-dimension: the number of weights at each fixed point
    pub fn n(&self) -> usize {
        self.points.first().map_or(0, |p| p.weights.len())
    }

    /// product of the weights at point `i`
    pub fn euler_product(&self, i: usize) -> MultiPoly {
        let mut prod = MultiPoly::one(&self.ring);
        for w in &self.points[i].weights {
            prod = prod.mul(w);
        }
        prod
    }

    /// sum of the weights at point `i` (the equivariant `c_1` restriction)
    pub fn weight_sum(&self, i: usize) -> MultiPoly {
        let mut s = MultiPoly::zero(&self.ring);
        for w in &self.points[i].weights {
            s = s.add(w);
        }
        s
    }

    /// Does every weight come paired with its negative somewhere in the
    /// data, counted with multiplicity?
    pub fn weights_paired(&self) -> bool {
        let mut balance: BTreeMap<String, i64> = BTreeMap::new();
        for p in &self.points {
            for w in &p.weights {
                // key w and -w together, track the signed count
                let neg = w.neg();
                let (key, delta) = if w.to_string() < neg.to_string() {
                    (w.to_string(), 1)
                } else {
                    (neg.to_string(), -1)
                };
                *balance.entry(key).or_insert(0) += delta;
            }
        }
        balance.values().all(|&v| v == 0)
    }

    /// Value of a weight at an integer direction `xi`: substitutes the
    /// torus variables, keeps parameters symbolic.
    pub fn weight_at_direction(&self, w: &MultiPoly, xi: &[i64]) -> MultiPoly {
        let images: Vec<MultiPoly> = (0..self.ring.n_vars())
            .map(|i| {
                if i < self.d {
                    MultiPoly::constant(&self.ring, xi[i])
                } else {
                    MultiPoly::var(&self.ring, i)
                }
            })
            .collect();
        w.subst(&images)
    }

    /// Morse index of point `i` along direction `xi`: the number of
    /// weights with `w(xi) < 0`. Every `w(xi)` must be a nonzero constant.
    pub fn morse_index(&self, i: usize, xi: &[i64]) -> Result<usize, LocalizationError> {
        let p = &self.points[i];
        let mut idx = 0;
        for w in &p.weights {
            match self.weight_at_direction(w, xi).as_constant() {
                Some(c) if c.is_negative() => idx += 1,
                Some(c) if c.is_positive() => {}
                _ => return Err(LocalizationError::IndeterminateSign(p.id.clone())),
            }
        }
        Ok(idx)
    }

    /// is every `w(xi)` nonzero (as a polynomial in the parameters)?
    pub fn is_generic(&self, xi: &[i64]) -> bool {
        self.points
            .iter()
            .flat_map(|p| &p.weights)
            .all(|w| !self.weight_at_direction(w, xi).is_zero())
    }

    /// The first direction, scanning shells of growing max-norm in
    /// lexicographic order and requiring a positive leading coordinate, at
    /// which every weight is nonzero.
    pub fn generic_direction(&self) -> Result<Vec<i64>, LocalizationError> {
        const BOUND: i64 = 16;
        let d = self.d;
        for b in 1..=BOUND {
            let mut xi = vec![-b; d];
            'tuples: loop {
                let on_shell = xi.iter().any(|&c| c.abs() == b);
                let lead_positive =
                    xi.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
                if on_shell && lead_positive && self.is_generic(&xi) {
                    return Ok(xi);
                }
                for i in (0..d).rev() {
                    if xi[i] < b {
                        xi[i] += 1;
                        for y in xi.iter_mut().skip(i + 1) {
                            *y = -b;
                        }
                        continue 'tuples;
                    }
                }
                break;
            }
        }
        Err(LocalizationError::NoGenericDirection(BOUND))
    }

    /// Restriction to the subcircle `xi`: the rank drops to 1, each torus
    /// variable maps to `xi_i` times a fresh circle variable, and family
    /// parameters survive unchanged. Fails if `xi` is not generic.
    pub fn restrict_to_subcircle(
        &self,
        xi: &[i64],
    ) -> Result<FixedPointData, LocalizationError> {
        assert_eq!(xi.len(), self.d);
        let params: Vec<String> = self.ring.var_names()[self.d..].to_vec();
        let mut circle_name = String::from("t");
        while params.iter().any(|p| *p == circle_name) {
            circle_name.push('_');
        }
        let mut names = vec![circle_name];
        names.extend(params);
        let new_ring = Ring::new(&names);
        let t = MultiPoly::var(&new_ring, 0);
        let images: Vec<MultiPoly> = (0..self.ring.n_vars())
            .map(|i| {
                if i < self.d {
                    t.scale(&BigInt::from(xi[i]))
                } else {
                    MultiPoly::var(&new_ring, 1 + i - self.d)
                }
            })
            .collect();
        let points: Vec<FixedPoint> = self
            .points
            .iter()
            .map(|p| FixedPoint {
                id: p.id.clone(),
                weights: p.weights.iter().map(|w| w.subst(&images)).collect(),
            })
            .collect();
        // a zero restricted weight means xi was not generic
        FixedPointData::new(new_ring, 1, points)
    }
}

/// The exact localization sum `sum_p class(p) / Lambda_p`, fully reduced.
pub fn abbv_integrate(
    data: &FixedPointData,
    class_at: &[MultiPoly],
) -> Result<RatFunc, LocalizationError> {
    if class_at.len() != data.n_points() {
        return Err(LocalizationError::RestrictionCount {
            got: class_at.len(),
            want: data.n_points(),
        });
    }
    let mut terms = Vec::with_capacity(data.n_points());
    for (i, alpha) in class_at.iter().enumerate() {
        if !same_ring(alpha.ring(), data.ring()) {
            return Err(LocalizationError::RingMismatch);
        }
        let term = RatFunc::new(alpha.clone(), BigInt::from(1), &data.points()[i].weights)
            .ok_or_else(|| LocalizationError::ZeroWeight(data.points()[i].id.clone()))?;
        terms.push(term);
    }
    Ok(ratfunc_sum_reduce(&terms))
}

/// Localization sum that must come out as an integer (top-degree classes).
pub fn abbv_expect_integer(
    data: &FixedPointData,
    class_at: &[MultiPoly],
) -> Result<BigInt, LocalizationError> {
    let total = abbv_integrate(data, class_at)?;
    match total.as_integer() {
        Some(v) => Ok(v),
        None if total.as_constant().is_some() => {
            Err(LocalizationError::NotInteger(total.to_string()))
        }
        None => Err(LocalizationError::NotConstant(total.to_string())),
    }
}

/// all partitions of `n` into positive parts, each non-increasing, in a
/// deterministic order
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// `sigma_j` of the weights at a point: the restriction of the `j`-th
/// equivariant Chern class.
pub fn equivariant_chern_restriction(weights: &[MultiPoly], j: usize) -> MultiPoly {
    assert!(!weights.is_empty());
    elementary_symmetric(weights[0].ring(), weights, j)
}

/// Values of all top-degree Chern monomials, keyed by the partition of `n`
/// (dimension 8: `[1,1,1,1]` is c1^4, `[2,1,1]` is c1^2 c2, `[2,2]` is
/// c2^2, `[3,1]` is c1 c3, `[4]` is c4).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernMonomialValues {
    pub n: usize,
    pub values: BTreeMap<Vec<usize>, BigInt>,
}

impl ChernMonomialValues {
    /// the dimension-8 specialization
    pub fn dim8(&self) -> Option<ChernNumberSet> {
        if self.n != 4 {
            return None;
        }
        let get = |p: &[usize]| -> Option<i64> {
            self.values.get(p).and_then(|v| i64::try_from(v).ok())
        };
        Some(ChernNumberSet {
            c1_4: get(&[1, 1, 1, 1])?,
            c1sq_c2: get(&[2, 1, 1])?,
            c2_2: get(&[2, 2])?,
            c1c3: get(&[3, 1])?,
            c4: get(&[4])?,
        })
    }
}

fn chern_monomial_restriction(weights: &[MultiPoly], part: &[usize]) -> MultiPoly {
    let mut m = MultiPoly::one(weights[0].ring());
    for &j in part {
        m = m.mul(&equivariant_chern_restriction(weights, j));
    }
    m
}

/// Computes every top-degree Chern monomial from the weights: for each
/// partition of `n`, integrate the product of the matching elementary
/// symmetric polynomials. Ranks above 1 are first restricted to the
/// smallest generic subcircle; the result does not depend on that choice.
pub fn chern_numbers_from_weights(
    data: &FixedPointData,
) -> Result<ChernMonomialValues, LocalizationError> {
    let restricted;
    let data = if data.rank() > 1 {
        let xi = data.generic_direction()?;
        restricted = data.restrict_to_subcircle(&xi)?;
        &restricted
    } else {
        data
    };
    let n = data.n();
    let mut values = BTreeMap::new();
    for part in partitions(n) {
        let class_at: Vec<MultiPoly> = data
            .points()
            .iter()
            .map(|p| chern_monomial_restriction(&p.weights, &part))
            .collect();
        let v = abbv_expect_integer(data, &class_at)?;
        values.insert(part, v);
    }
    Ok(ChernMonomialValues { n, values })
}

/// Outcome of the standard localization identities on a data set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    /// `N(w) = N(-w)` over the whole data set
    pub pairing_ok: bool,
    /// for k < n: does `sum_p Sigma(p)^k / Lambda_p` vanish identically?
    pub vanishing: Vec<(usize, bool)>,
    /// `sum_p Sigma(p)^n / Lambda_p`, when it is an integer
    pub top_power: Option<BigInt>,
    /// every top-degree Chern monomial, when integral
    pub monomials: Vec<(Vec<usize>, Option<BigInt>)>,
}

impl ConsistencyReport {
    pub fn ok(&self) -> bool {
        self.pairing_ok
            && self.vanishing.iter().all(|&(_, v)| v)
            && self.top_power.is_some()
            && self.monomials.iter().all(|(_, v)| v.is_some())
    }
}

/// Runs the localization identities on the data. Ranks above 1 are checked
/// through the smallest generic subcircle; parameterized data is checked
/// identically in the parameters.
pub fn abbv_consistency_check(
    data: &FixedPointData,
) -> Result<ConsistencyReport, LocalizationError> {
    let pairing_ok = data.weights_paired();
    let restricted;
    let data = if data.rank() > 1 {
        let xi = data.generic_direction()?;
        restricted = data.restrict_to_subcircle(&xi)?;
        &restricted
    } else {
        data
    };
    let n = data.n();
    let sums: Vec<MultiPoly> = (0..data.n_points()).map(|i| data.weight_sum(i)).collect();
    let mut vanishing = Vec::new();
    for k in 0..n {
        let class_at: Vec<MultiPoly> = sums.iter().map(|s| s.pow(k as u32)).collect();
        let v = abbv_integrate(data, &class_at)?;
        vanishing.push((k, v.is_zero()));
    }
    let top_class: Vec<MultiPoly> = sums.iter().map(|s| s.pow(n as u32)).collect();
    let top_power = abbv_integrate(data, &top_class)?.as_integer();
    let mut monomials = Vec::new();
    for part in partitions(n) {
        let class_at: Vec<MultiPoly> = data
            .points()
            .iter()
            .map(|p| chern_monomial_restriction(&p.weights, &part))
            .collect();
        let v = abbv_integrate(data, &class_at)?.as_integer();
        monomials.push((part, v));
    }
    Ok(ConsistencyReport { pairing_ok, vanishing, top_power, monomials })
}

/// Evaluation of a degree-2 class on an edge with weight `w`:
/// `alpha[e] = alpha(p)/w + alpha(q)/(-w) = (alpha(p) - alpha(q)) / w`,
/// which must come out as an exact integer on a multigraph edge.
pub fn edge_evaluation(
    alpha_p: &MultiPoly,
    alpha_q: &MultiPoly,
    w: &MultiPoly,
) -> Result<BigInt, LocalizationError> {
    let diff = alpha_p.sub(alpha_q);
    if diff.is_zero() {
        return Ok(BigInt::zero());
    }
    let quot = diff.exact_div(w).ok_or_else(|| LocalizationError::NotDivisible {
        diff: diff.to_string(),
        weight: w.to_string(),
    })?;
    quot.as_constant()
        .ok_or_else(|| LocalizationError::EdgeNotInteger(quot.to_string()))
}

/// A multigraph edge for the edge-sum identity: endpoint indices into the
/// fixed-point list plus the weight at the tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationEdge {
    pub tail: usize,
    pub head: usize,
    pub weight: MultiPoly,
}

/// Both sides of the identity `sum_e alpha[e] = integral of alpha c_{n-1}`:
/// the left side sums exact edge evaluations, the right side localizes
/// `alpha * sigma_{n-1}(weights)`. Returns the pair for reporting.
pub fn edge_sum_identity_check(
    data: &FixedPointData,
    edges: &[EvaluationEdge],
    class_at: &[MultiPoly],
) -> Result<(BigInt, BigInt), LocalizationError> {
    if class_at.len() != data.n_points() {
        return Err(LocalizationError::RestrictionCount {
            got: class_at.len(),
            want: data.n_points(),
        });
    }
    let mut lhs = BigInt::zero();
    for e in edges {
        lhs += edge_evaluation(&class_at[e.tail], &class_at[e.head], &e.weight)?;
    }
    let n = data.n();
    let weighted: Vec<MultiPoly> = (0..data.n_points())
        .map(|i| {
            class_at[i].mul(&equivariant_chern_restriction(
                &data.points()[i].weights,
                n - 1,
            ))
        })
        .collect();
    let rhs = abbv_expect_integer(data, &weighted)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(id: &str, ws: Vec<MultiPoly>) -> FixedPoint {
        FixedPoint { id: id.to_string(), weights: ws }
    }

    fn cp1() -> FixedPointData {
        let ring = Ring::new(&["x"]);
        let x = MultiPoly::var(&ring, 0);
        FixedPointData::new(
            ring.clone(),
            1,
            vec![pt("n", vec![x.clone()]), pt("s", vec![x.neg()])],
        )
        .unwrap()
    }

    fn cp2_rank2() -> FixedPointData {
        let ring = Ring::new(&["x", "y"]);
        let x = MultiPoly::var(&ring, 0);
        let y = MultiPoly::var(&ring, 1);
        FixedPointData::new(
            ring.clone(),
            2,
            vec![
                pt("p0", vec![x.clone(), y.clone()]),
                pt("p1", vec![x.neg(), y.sub(&x)]),
                pt("p2", vec![y.neg(), x.sub(&y)]),
            ],
        )
        .unwrap()
    }

    /// linear circle action on CP^4: weights (j - i) x at point i
    fn cp4_circle() -> FixedPointData {
        let ring = Ring::new(&["x"]);
        let x = MultiPoly::var(&ring, 0);
        let points = (0..5i64)
            .map(|i| {
                let ws = (0..5i64)
                    .filter(|&j| j != i)
                    .map(|j| x.scale(&BigInt::from(j - i)))
                    .collect();
                pt(&format!("p{i}"), ws)
            })
            .collect();
        FixedPointData::new(ring, 1, points).unwrap()
    }

    #[test]
    fn cp1_integrals() {
        let data = cp1();
        let one = MultiPoly::one(data.ring());
        // degree 0 < 2n: vanishes
        let v = abbv_integrate(&data, &[one.clone(), one.clone()]).unwrap();
        assert!(v.is_zero());
        // equivariant c1 restrictions integrate to deg(c1) = 2
        let c1: Vec<MultiPoly> = (0..2).map(|i| data.weight_sum(i)).collect();
        assert_eq!(abbv_expect_integer(&data, &c1).unwrap(), BigInt::from(2));
    }

    #[test]
    fn cp2_chern_numbers_via_subcircle() {
        let data = cp2_rank2();
        let vals = chern_numbers_from_weights(&data).unwrap();
        // c1^2 = 9 and c2 = Euler characteristic = 3
        assert_eq!(vals.values[&vec![1, 1]], BigInt::from(9));
        assert_eq!(vals.values[&vec![2]], BigInt::from(3));
    }

    #[test]
    fn cp4_chern_numbers() {
        let data = cp4_circle();
        let vals = chern_numbers_from_weights(&data).unwrap();
        let c = vals.dim8().unwrap();
        assert_eq!(
            (c.c1_4, c.c1sq_c2, c.c2_2, c.c1c3, c.c4),
            (625, 250, 100, 50, 5)
        );
        assert!(c.todd_relation_holds());
        // c4 equals the fixed-point count
        assert_eq!(c.c4 as usize, data.n_points());
    }

    #[test]
    fn consistency_check_passes_and_detects_corruption() {
        let data = cp4_circle();
        let report = abbv_consistency_check(&data).unwrap();
        assert!(report.ok());
        assert!(report.pairing_ok);
        assert_eq!(report.top_power, Some(BigInt::from(625)));

        // flip one weight sign: pairing and the polynomial identities break
        let ring = data.ring().clone();
        let mut pts = data.points().to_vec();
        pts[0].weights[0] = pts[0].weights[0].neg();
        let bad = FixedPointData::new(ring, 1, pts).unwrap();
        let report = abbv_consistency_check(&bad).unwrap();
        assert!(!report.ok());
        assert!(!report.pairing_ok);
        assert!(report.vanishing.iter().any(|&(_, v)| !v));
    }

    #[test]
    fn generic_direction_is_deterministic() {
        let data = cp2_rank2();
        let xi = data.generic_direction().unwrap();
        // shell 1, lex order, positive lead: (0,1) kills x at p0, (1,-1)
        // leaves all six weights nonzero
        assert_eq!(xi, vec![1, -1]);
        assert!(data.is_generic(&xi));
        assert_eq!(xi, data.generic_direction().unwrap());
    }

    #[test]
    fn chern_numbers_invariant_under_direction_and_basis() {
        let data = cp2_rank2();
        let base = chern_numbers_from_weights(&data).unwrap();
        // three explicit generic directions
        for xi in [[1i64, 2], [2, 1], [3, -1]] {
            assert!(data.is_generic(&xi));
            let r = data.restrict_to_subcircle(&xi).unwrap();
            let vals = chern_numbers_from_weights(&r).unwrap();
            assert_eq!(vals, base, "direction {xi:?}");
        }
        // GL(2, Z) change of basis: (x, y) -> (x + y, y)
        let ring = data.ring().clone();
        let x = MultiPoly::var(&ring, 0);
        let y = MultiPoly::var(&ring, 1);
        let images = vec![x.add(&y), y.clone()];
        let pts: Vec<FixedPoint> = data
            .points()
            .iter()
            .map(|p| FixedPoint {
                id: p.id.clone(),
                weights: p.weights.iter().map(|w| w.subst(&images)).collect(),
            })
            .collect();
        let transformed = FixedPointData::new(ring, 2, pts).unwrap();
        assert_eq!(chern_numbers_from_weights(&transformed).unwrap(), base);
        // relabeling fixed points
        let mut pts = data.points().to_vec();
        pts.rotate_left(1);
        let rotated = FixedPointData::new(data.ring().clone(), 2, pts).unwrap();
        assert_eq!(chern_numbers_from_weights(&rotated).unwrap(), base);
    }

    #[test]
    fn parameterized_family_checks_identically() {
        // CP^1 x CP^1 under the circle (1, k) with k symbolic: the
        // localization identities hold as rational-function identities
        let ring = Ring::new(&["x", "k"]);
        let x = MultiPoly::var(&ring, 0);
        let kx = MultiPoly::parse(&ring, "k*x").unwrap();
        let data = FixedPointData::new(
            ring.clone(),
            1,
            vec![
                pt("a", vec![x.clone(), kx.clone()]),
                pt("b", vec![x.neg(), kx.clone()]),
                pt("c", vec![x.clone(), kx.neg()]),
                pt("d", vec![x.neg(), kx.neg()]),
            ],
        )
        .unwrap();
        let one = MultiPoly::one(&ring);
        let ones = vec![one.clone(), one.clone(), one.clone(), one];
        assert!(abbv_integrate(&data, &ones).unwrap().is_zero());
        // c1^2 = 8 independently of k
        let c1sq: Vec<MultiPoly> = (0..4).map(|i| data.weight_sum(i).pow(2)).collect();
        assert_eq!(abbv_expect_integer(&data, &c1sq).unwrap(), BigInt::from(8));
        // c2 = 4 = Euler characteristic
        let c2: Vec<MultiPoly> = (0..4)
            .map(|i| equivariant_chern_restriction(&data.points()[i].weights, 2))
            .collect();
        assert_eq!(abbv_expect_integer(&data, &c2).unwrap(), BigInt::from(4));
    }

    #[test]
    fn morse_indices_on_cp4() {
        let data = cp4_circle();
        for i in 0..5 {
            assert_eq!(data.morse_index(i, &[1]).unwrap(), i);
        }
        // direction reversal flips lambda to n - lambda
        for i in 0..5 {
            assert_eq!(data.morse_index(i, &[-1]).unwrap(), 4 - i);
        }
    }

    #[test]
    fn edge_evaluation_examples() {
        let ring = Ring::new(&["x", "y"]);
        let p = MultiPoly::parse(&ring, "2*x + 4*y").unwrap();
        let q = MultiPoly::parse(&ring, "4*x + 2*y").unwrap();
        let w = MultiPoly::parse(&ring, "-x + y").unwrap();
        assert_eq!(edge_evaluation(&p, &q, &w).unwrap(), BigInt::from(2));
        // equal restrictions evaluate to zero
        assert_eq!(edge_evaluation(&p, &p, &w).unwrap(), BigInt::zero());
        // indivisible difference is an error
        let bad = MultiPoly::parse(&ring, "x + y").unwrap();
        assert!(matches!(
            edge_evaluation(&p, &q, &bad),
            Err(LocalizationError::NotDivisible { .. })
        ));
        // rank-3 example: (2(a + 2b + c) - 2(a + c)) / b = 4
        let r3 = Ring::new(&["a", "b", "c"]);
        let u = MultiPoly::parse(&r3, "2*a + 4*b + 2*c").unwrap();
        let v = MultiPoly::parse(&r3, "2*a + 2*c").unwrap();
        let b = MultiPoly::var(&r3, 1);
        assert_eq!(edge_evaluation(&u, &v, &b).unwrap(), BigInt::from(4));
    }

    #[test]
    fn edge_sum_identity_on_cp1() {
        let data = cp1();
        let c1: Vec<MultiPoly> = (0..2).map(|i| data.weight_sum(i)).collect();
        let x = MultiPoly::var(data.ring(), 0);
        let edges = vec![EvaluationEdge { tail: 0, head: 1, weight: x }];
        // n = 1: c_{n-1} = 1, both sides equal the degree of c1, which is 2
        let (lhs, rhs) = edge_sum_identity_check(&data, &edges, &c1).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, BigInt::from(2));
    }

    #[test]
    fn partitions_of_four() {
        assert_eq!(
            partitions(4),
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1],
            ]
        );
        assert_eq!(partitions(1), vec![vec![1]]);
    }

    #[test]
    fn validation_errors() {
        let ring = Ring::new(&["x"]);
        let x = MultiPoly::var(&ring, 0);
        let zero = MultiPoly::zero(&ring);
        assert!(matches!(
            FixedPointData::new(ring.clone(), 1, vec![pt("p", vec![zero])]),
            Err(LocalizationError::ZeroWeight(_))
        ));
        assert!(matches!(
            FixedPointData::new(
                ring.clone(),
                1,
                vec![pt("p", vec![x.clone()]), pt("q", vec![x.clone(), x.clone()])]
            ),
            Err(LocalizationError::WeightCount { .. })
        ));
        assert!(matches!(
            FixedPointData::new(ring.clone(), 2, vec![pt("p", vec![x.clone()])]),
            Err(LocalizationError::RankTooLarge { .. })
        ));
        let data = cp1();
        assert!(matches!(
            abbv_integrate(&data, &[MultiPoly::one(data.ring())]),
            Err(LocalizationError::RestrictionCount { .. })
        ));
    }

    #[test]
    fn weight_pairing_detection() {
        let data = cp4_circle();
        assert!(data.weights_paired());
        let ring = Ring::new(&["x"]);
        let x = MultiPoly::var(&ring, 0);
        let minus_two = x.scale(&BigInt::from(2)).neg();
        let unpaired =
            FixedPointData::new(ring, 1, vec![pt("p", vec![x]), pt("q", vec![minus_two])])
                .unwrap();
        assert!(!unpaired.weights_paired());
    }

    #[test]
    fn nonintegral_sum_is_reported() {
        // weights {x}, {-2x} do not come from a closed manifold
        let ring = Ring::new(&["x"]);
        let x = MultiPoly::var(&ring, 0);
        let data = FixedPointData::new(
            ring.clone(),
            1,
            vec![
                pt("p", vec![x.clone()]),
                pt("q", vec![x.scale(&BigInt::from(-2))]),
            ],
        )
        .unwrap();
        // class = x at both points: x/x + x/(-2x) = 1 - 1/2 = 1/2
        let class = vec![x.clone(), x.clone()];
        let err = abbv_expect_integer(&data, &class).unwrap_err();
        assert!(matches!(err, LocalizationError::NotInteger(_)));
    }
}
