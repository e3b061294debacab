//! GKM-style graphs for torus actions with isolated fixed points, and the
//! equivariant cohomology machinery built on top of them: canonical module
//! bases, their structure constants, and equivariant Chern class expansions.
//!
//! A graph is built from `FixedPointData` whose weights are integer linear
//! forms in the torus variables (no family parameters), together with a
//! generic integer direction `xi`. Edges pair each weight with its negative
//! at another fixed point, subject to the moment-map compatibility condition
//! that the moment images differ by a positive multiple of the weight.
//!
//! Sign convention for canonical classes: the restriction of the class of a
//! point `p` to `p` itself is the product of `-w` over the weights `w` at
//! `p` that are negative on `xi`, so diagonals are products of positive
//! forms. This fixes the sign ambiguity and matches the tables produced by
//! `canonical_classes` and `solve_constrained_classes`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::localization::{
    abbv_integrate, edge_evaluation, equivariant_chern_restriction, FixedPoint, FixedPointData,
    LocalizationError,
};
use crate::matrix::{IntMatrix, LinearSolution};
use crate::poly::{MultiPoly, Ring};
use crate::ratfunc::{ratfunc_sum_reduce, RatFunc};

#[derive(Debug, Error)]
pub enum GkmError {
    #[error(transparent)]
    Localization(#[from] LocalizationError),
    #[error("weight `{weight}` at `{id}` is not an integer linear form in the torus variables")]
    NonLinearWeight { id: String, weight: String },
    #[error("weights at `{0}` contain a linearly dependent pair")]
    NotGkm(String),
    #[error("weight `{weight}` at `{id}` has no admissible partner")]
    EdgePairing { id: String, weight: String },
    #[error("no edge between `{tail}` and `{head}`")]
    MissingEdge { tail: String, head: String },
    #[error("`{num}` is not divisible by `{den}`")]
    NotDivisible { num: String, den: String },
    #[error("expected a constant, got `{0}`")]
    NotConstant(String),
    #[error("unsupported for this graph: {0}")]
    Unsupported(String),
    #[error("constraints are inconsistent: {0}")]
    InconsistentConstraints(String),
    #[error("cannot expand in the canonical basis: {0}")]
    BasisExpansion(String),
    #[error("structure constant ({i},{j}) -> {s} is not homogeneous of the expected degree")]
    DegreeMismatch { i: usize, j: usize, s: usize },
}

type Result<T> = std::result::Result<T, GkmError>;

/// One edge of the graph, oriented so that the weight is positive on `xi`.
#[derive(Debug, Clone)]
pub struct GkmEdge {
    pub tail: usize,
    pub head: usize,
    /// weight at the tail; the head carries its negative
    pub weight: MultiPoly,
    pub tail_slot: usize,
    pub head_slot: usize,
    /// `psi(head) - psi(tail) = ratio * weight`, always positive
    pub moment_ratio: BigRational,
}

#[derive(Debug, Clone)]
pub struct MorseData {
    /// Morse index of each point: the number of weights negative on `xi`
    pub index: Vec<usize>,
    /// point indices sorted by increasing moment value (ties by index, then
    /// by position)
    pub order: Vec<usize>,
    /// does the Morse index strictly increase along every edge?
    pub index_increasing: bool,
}

pub struct GkmGraph {
    data: FixedPointData,
    xi: Vec<i64>,
    /// weight values on `xi`, per point and weight slot
    wval: Vec<Vec<BigInt>>,
    lambda: Vec<usize>,
    /// moment image of each point, `psi(p) = -sum of weights`
    psi: Vec<MultiPoly>,
    /// moment value along `xi`
    phi: Vec<BigInt>,
    edges: Vec<GkmEdge>,
    full_gkm: bool,
}

impl GkmGraph {
    pub fn new(data: FixedPointData, xi: Vec<i64>) -> Result<GkmGraph> {
        let d = data.rank();
        if d != data.ring().n_vars() {
            return Err(GkmError::Unsupported(
                "graph construction needs pure torus data without family parameters".into(),
            ));
        }
        if xi.len() != d {
            return Err(GkmError::Unsupported(format!(
                "direction has {} coordinates, expected {}",
                xi.len(),
                d
            )));
        }
        for p in data.points() {
            for w in &p.weights {
                if w.linear_coeffs().is_none() {
                    return Err(GkmError::NonLinearWeight {
                        id: p.id.clone(),
                        weight: w.to_string(),
                    });
                }
            }
        }

        let mut wval = Vec::with_capacity(data.n_points());
        let mut lambda = Vec::with_capacity(data.n_points());
        let mut psi = Vec::with_capacity(data.n_points());
        let mut phi = Vec::with_capacity(data.n_points());
        for (i, p) in data.points().iter().enumerate() {
            let mut vals = Vec::with_capacity(p.weights.len());
            for w in &p.weights {
                let v = data
                    .weight_at_direction(w, &xi)
                    .as_constant()
                    .expect("no parameters");
                if v.is_zero() {
                    return Err(GkmError::Localization(LocalizationError::IndeterminateSign(
                        p.id.clone(),
                    )));
                }
                vals.push(v);
            }
            lambda.push(vals.iter().filter(|v| v.is_negative()).count());
            let mom = data.weight_sum(i).neg();
            phi.push(
                data.weight_at_direction(&mom, &xi)
                    .as_constant()
                    .expect("no parameters"),
            );
            psi.push(mom);
            wval.push(vals);
        }

        let edges = pair_edges(&data, &wval, &psi)?;
        let full_gkm = (0..data.n_points()).all(|i| !has_dependent_pair(&data, i));

        Ok(GkmGraph { data, xi, wval, lambda, psi, phi, edges, full_gkm })
    }

    pub fn data(&self) -> &FixedPointData {
        &self.data
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.data.ring()
    }

    pub fn xi(&self) -> &[i64] {
        &self.xi
    }

    pub fn n_points(&self) -> usize {
        self.data.n_points()
    }

    pub fn edges(&self) -> &[GkmEdge] {
        &self.edges
    }

    pub fn is_full_gkm(&self) -> bool {
        self.full_gkm
    }

    pub fn point_id(&self, i: usize) -> &str {
        &self.data.points()[i].id
    }

    /// moment image of point `i` under the weight sum normalization
    pub fn moment(&self, i: usize) -> &MultiPoly {
        &self.psi[i]
    }

    pub fn morse_data(&self) -> MorseData {
        let mut order: Vec<usize> = (0..self.n_points()).collect();
        order.sort_by(|&a, &b| {
            self.phi[a]
                .cmp(&self.phi[b])
                .then(self.lambda[a].cmp(&self.lambda[b]))
                .then(a.cmp(&b))
        });
        let index_increasing =
            self.edges.iter().all(|e| self.lambda[e.tail] < self.lambda[e.head]);
        MorseData { index: self.lambda.clone(), order, index_increasing }
    }

    /// Product of `-w` over the weights at `i` negative on `xi`; this is
    /// the diagonal value of the canonical class of the point.
    pub fn canonical_diagonal(&self, i: usize) -> MultiPoly {
        let mut prod = MultiPoly::one(self.data.ring());
        for (s, w) in self.data.points()[i].weights.iter().enumerate() {
            if self.wval[i][s].is_negative() {
                prod = prod.mul(&w.neg());
            }
        }
        prod
    }

    /// restriction of the `j`-th equivariant Chern class, one value per point
    pub fn chern_restriction(&self, j: usize) -> Vec<MultiPoly> {
        self.data
            .points()
            .iter()
            .map(|p| equivariant_chern_restriction(&p.weights, j))
            .collect()
    }

    fn edges_between(&self, a: usize, b: usize) -> Vec<&GkmEdge> {
        self.edges.iter().filter(|e| e.tail == a && e.head == b).collect()
    }

    fn only_edge(&self, a: usize, b: usize) -> Result<&GkmEdge> {
        let found = self.edges_between(a, b);
        match found.len() {
            1 => Ok(found[0]),
            0 => Err(GkmError::MissingEdge {
                tail: self.point_id(a).to_string(),
                head: self.point_id(b).to_string(),
            }),
            _ => Err(GkmError::Unsupported(format!(
                "multiple edges between `{}` and `{}`",
                self.point_id(a),
                self.point_id(b)
            ))),
        }
    }

    /// evaluation of the equivariant first Chern class on an edge
    pub fn edge_magnitude(&self, e: &GkmEdge) -> Result<BigInt> {
        Ok(edge_evaluation(
            &self.data.weight_sum(e.tail),
            &self.data.weight_sum(e.head),
            &e.weight,
        )?)
    }

    /// The closed form for the degree-2 canonical class when there is a
    /// unique point of index 1: `(c_1^T(p_0) - c_1^T) / k_0`, where `k_0`
    /// is the evaluation of `c_1^T` on the bottom edge. Returns the class
    /// restrictions and `k_0`.
    pub fn degree2_class_closed_form(&self) -> Result<(Vec<MultiPoly>, BigInt)> {
        let p0 = self.unique_point_of_index(0)?;
        let p1 = self.unique_point_of_index(1)?;
        let e = self.only_edge(p0, p1)?;
        let k0 = self.edge_magnitude(e)?;
        if !k0.is_positive() {
            return Err(GkmError::InconsistentConstraints(format!(
                "bottom edge evaluation {k0} is not positive"
            )));
        }
        let top = self.data.weight_sum(p0);
        let k0_poly = MultiPoly::constant(self.data.ring(), k0.clone());
        let mut row = Vec::with_capacity(self.n_points());
        for i in 0..self.n_points() {
            let diff = top.sub(&self.data.weight_sum(i));
            let val = diff.exact_div(&k0_poly).ok_or_else(|| GkmError::NotDivisible {
                num: diff.to_string(),
                den: k0.to_string(),
            })?;
            row.push(val);
        }
        Ok((row, k0))
    }

    fn unique_point_of_index(&self, l: usize) -> Result<usize> {
        let mut found = self.lambda.iter().enumerate().filter(|(_, &lam)| lam == l);
        match (found.next(), found.next()) {
            (Some((i, _)), None) => Ok(i),
            _ => Err(GkmError::Unsupported(format!(
                "expected exactly one point of index {l}"
            ))),
        }
    }

    /// The integer comparing the projected negative Euler classes along an
    /// edge whose endpoints have adjacent Morse indices. The projection
    /// kills the edge weight `eta`, sending a linear form `v` to
    /// `v - (v(xi)/eta(xi)) eta`; the invariant is the ratio of the
    /// projected diagonal at the tail to the projected diagonal at the head
    /// with the edge direction divided out.
    pub fn theta(&self, tail: usize, head: usize) -> Result<BigInt> {
        let e = self.only_edge(tail, head)?;
        if self.lambda[head] != self.lambda[tail] + 1 {
            return Err(GkmError::Unsupported(format!(
                "theta needs an index jump of one along `{}` -> `{}`",
                self.point_id(tail),
                self.point_id(head)
            )));
        }
        let eta = &e.weight;
        let eta_val = &self.wval[tail][e.tail_slot];
        let ring = self.data.ring();
        let mut num = MultiPoly::one(ring);
        for (s, w) in self.data.points()[tail].weights.iter().enumerate() {
            if self.wval[tail][s].is_negative() {
                num = num.mul(&rho_numerator(&w.neg(), &-&self.wval[tail][s], eta, eta_val));
            }
        }
        let mut den = MultiPoly::one(ring);
        for (s, w) in self.data.points()[head].weights.iter().enumerate() {
            if s != e.head_slot && self.wval[head][s].is_negative() {
                den = den.mul(&rho_numerator(&w.neg(), &-&self.wval[head][s], eta, eta_val));
            }
        }
        let quot = num.exact_div(&den).ok_or_else(|| GkmError::NotDivisible {
            num: num.to_string(),
            den: den.to_string(),
        })?;
        let theta = quot
            .as_constant()
            .ok_or_else(|| GkmError::NotConstant(quot.to_string()))?;
        if theta.is_zero() {
            return Err(GkmError::InconsistentConstraints(format!(
                "theta vanishes on `{}` -> `{}`",
                self.point_id(tail),
                self.point_id(head)
            )));
        }
        Ok(theta)
    }

    /// Canonical classes for a full GKM graph whose index profile has a
    /// unique minimum and maximum. Index-1 classes use the closed form,
    /// classes one step below the top use the vanishing of their integral,
    /// and intermediate classes are assembled from theta invariants along
    /// paths with unit index jumps (at most two steps; graphs needing
    /// longer paths are rejected rather than guessed).
    pub fn canonical_classes(&self) -> Result<CanonicalClasses> {
        if !self.full_gkm {
            let culprit = (0..self.n_points())
                .find(|&i| has_dependent_pair(&self.data, i))
                .map(|i| self.point_id(i).to_string())
                .unwrap_or_default();
            return Err(GkmError::NotGkm(culprit));
        }
        let morse = self.morse_data();
        if !morse.index_increasing {
            return Err(GkmError::Unsupported(
                "canonical classes need an index-increasing graph".into(),
            ));
        }
        let n = self.data.n();
        let top = self.unique_point_of_index(n)?;
        let _bottom = self.unique_point_of_index(0)?;

        let mut rows = Vec::with_capacity(self.n_points());
        for p in 0..self.n_points() {
            let lam = self.lambda[p];
            let row = if lam == 0 {
                vec![MultiPoly::one(self.data.ring()); self.n_points()]
            } else if lam == n {
                let mut row = vec![MultiPoly::zero(self.data.ring()); self.n_points()];
                row[p] = self.canonical_diagonal(p);
                row
            } else if lam == 1 {
                self.degree2_class_closed_form()?.0
            } else if lam == n - 1 {
                self.near_top_row(p, top)?
            } else {
                self.path_formula_row(p)?
            };
            rows.push(row);
        }
        let classes = CanonicalClasses { rows };
        classes.verify(self)?;
        Ok(classes)
    }

    /// Class of a point `p` of index `n - 1`: supported on `p` and the top
    /// point, where the value is pinned by the vanishing of the integral.
    fn near_top_row(&self, p: usize, top: usize) -> Result<Vec<MultiPoly>> {
        let mut row = vec![MultiPoly::zero(self.data.ring()); self.n_points()];
        row[p] = self.canonical_diagonal(p);
        let num = row[p].mul(&self.data.euler_product(top));
        let den = self.data.euler_product(p);
        let quot = num.exact_div(&den).ok_or_else(|| GkmError::NotDivisible {
            num: num.to_string(),
            den: den.to_string(),
        })?;
        row[top] = quot.neg();
        Ok(row)
    }

    /// Class of an intermediate point via theta invariants along paths
    /// with unit index jumps.
    fn path_formula_row(&self, p: usize) -> Result<Vec<MultiPoly>> {
        let ring = self.data.ring();
        let mut row = vec![MultiPoly::zero(ring); self.n_points()];
        row[p] = self.canonical_diagonal(p);
        let lam_p = self.lambda[p];
        for q in 0..self.n_points() {
            if q == p || self.lambda[q] <= lam_p {
                continue;
            }
            match self.lambda[q] - lam_p {
                1 => {
                    if let Ok(e) = self.only_edge(p, q) {
                        let theta = self.theta(p, q)?;
                        let diag = self.canonical_diagonal(q);
                        let quot =
                            diag.exact_div(&e.weight).ok_or_else(|| GkmError::NotDivisible {
                                num: diag.to_string(),
                                den: e.weight.to_string(),
                            })?;
                        row[q] = quot.scale(&theta);
                    }
                }
                2 => {
                    let mut terms = Vec::new();
                    for r in 0..self.n_points() {
                        if self.lambda[r] != lam_p + 1 {
                            continue;
                        }
                        let (Ok(e1), Ok(e2)) = (self.only_edge(p, r), self.only_edge(r, q)) else {
                            continue;
                        };
                        let t1 = self.theta(p, r)?;
                        let t2 = self.theta(r, q)?;
                        let num = self.psi[r].sub(&self.psi[p]).scale(&(t1 * t2));
                        let den_factors = [
                            self.psi[q].sub(&self.psi[p]),
                            e1.weight.clone(),
                            e2.weight.clone(),
                        ];
                        let term = RatFunc::new(num, BigInt::one(), &den_factors)
                            .ok_or_else(|| {
                                GkmError::Unsupported(
                                    "degenerate moment difference in path formula".into(),
                                )
                            })?;
                        terms.push(term);
                    }
                    if !terms.is_empty() {
                        let total =
                            ratfunc_sum_reduce(&terms).mul_poly(&self.canonical_diagonal(q));
                        row[q] = total
                            .as_polynomial()
                            .ok_or_else(|| {
                                GkmError::Unsupported(format!(
                                    "path sum for `{}` at `{}` is not polynomial",
                                    self.point_id(p),
                                    self.point_id(q)
                                ))
                            })?
                            .clone();
                    }
                }
                _ => {
                    if self.unit_path_exists(p, q) {
                        return Err(GkmError::Unsupported(format!(
                            "class of `{}` needs a path of length {} to `{}`",
                            self.point_id(p),
                            self.lambda[q] - lam_p,
                            self.point_id(q)
                        )));
                    }
                }
            }
        }
        Ok(row)
    }

    fn unit_path_exists(&self, from: usize, to: usize) -> bool {
        let mut reach = vec![false; self.n_points()];
        reach[from] = true;
        for _ in 0..self.data.n() {
            for e in &self.edges {
                if reach[e.tail] && self.lambda[e.head] == self.lambda[e.tail] + 1 {
                    reach[e.head] = true;
                }
            }
        }
        reach[to]
    }

    /// Expand a class, given by its restrictions, in the canonical basis.
    /// Coefficients are polynomials in the torus variables; the expansion
    /// is verified exactly before it is returned.
    pub fn expand_in_basis(
        &self,
        classes: &CanonicalClasses,
        alpha: &[MultiPoly],
    ) -> Result<Vec<MultiPoly>> {
        if alpha.len() != self.n_points() {
            return Err(GkmError::BasisExpansion(format!(
                "{} restrictions for {} points",
                alpha.len(),
                self.n_points()
            )));
        }
        let morse = self.morse_data();
        let mut coeffs = vec![MultiPoly::zero(self.data.ring()); self.n_points()];
        for &i in &morse.order {
            let mut residual = alpha[i].clone();
            for h in 0..self.n_points() {
                if !coeffs[h].is_zero() {
                    residual = residual.sub(&coeffs[h].mul(&classes.rows[h][i]));
                }
            }
            let diag = &classes.rows[i][i];
            coeffs[i] = residual.exact_div(diag).ok_or_else(|| {
                GkmError::BasisExpansion(format!(
                    "residual `{residual}` at `{}` is not divisible by the diagonal `{diag}`",
                    self.point_id(i)
                ))
            })?;
        }
        for q in 0..self.n_points() {
            let mut acc = MultiPoly::zero(self.data.ring());
            for h in 0..self.n_points() {
                acc = acc.add(&coeffs[h].mul(&classes.rows[h][q]));
            }
            if acc != alpha[q] {
                return Err(GkmError::BasisExpansion(format!(
                    "round trip failed at `{}`",
                    self.point_id(q)
                )));
            }
        }
        Ok(coeffs)
    }

    /// All products of basis classes expanded in the basis again. Each
    /// coefficient is checked to be homogeneous of the degree forced by the
    /// Morse indices.
    pub fn structure_constants(&self, classes: &CanonicalClasses) -> Result<StructureConstants> {
        let n_pts = self.n_points();
        let mut coeffs = vec![vec![Vec::new(); n_pts]; n_pts];
        for i in 0..n_pts {
            for j in i..n_pts {
                let product: Vec<MultiPoly> = (0..n_pts)
                    .map(|q| classes.rows[i][q].mul(&classes.rows[j][q]))
                    .collect();
                let expansion = self.expand_in_basis(classes, &product)?;
                for (s, c) in expansion.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let want = self.lambda[i] + self.lambda[j];
                    if self.lambda[s] > want
                        || c.homogeneous_degree() != Some((want - self.lambda[s]) as u32)
                    {
                        return Err(GkmError::DegreeMismatch { i, j, s });
                    }
                }
                coeffs[i][j] = expansion.clone();
                if i != j {
                    coeffs[j][i] = expansion;
                }
            }
        }
        Ok(StructureConstants { lambda: self.lambda.clone(), coeffs })
    }

    /// Restrictions of all equivariant Chern classes expanded in the basis:
    /// entry `j - 1` holds the expansion of the `j`-th Chern class.
    pub fn chern_class_expansions(
        &self,
        classes: &CanonicalClasses,
    ) -> Result<Vec<Vec<MultiPoly>>> {
        (1..=self.data.n())
            .map(|j| self.expand_in_basis(classes, &self.chern_restriction(j)))
            .collect()
    }

    pub fn restrict_to_subcircle(&self, xi: &[i64]) -> Result<FixedPointData> {
        Ok(self.data.restrict_to_subcircle(xi)?)
    }

    /// Localization sum of a class given by restrictions, as an exact
    /// rational function in the torus variables.
    pub fn integrate(&self, class_at: &[MultiPoly]) -> Result<RatFunc> {
        Ok(abbv_integrate(&self.data, class_at)?)
    }

    /// Canonical classes for the six-point multigraph profile with one
    /// non-GKM vertex carrying a dependent weight pair. The class of the
    /// special vertex is the equivariant dual of the isotropy submanifold
    /// through it; the class of the other middle vertex is pinned by edge
    /// divisibility up to two integer multipliers, which are solved for
    /// exactly from the integrality of the integral over the isotropy
    /// submanifold and the vanishing of the global integral.
    pub fn solve_constrained_classes(&self) -> Result<ConstrainedSolution> {
        let n = self.data.n();
        if n != 4 || self.n_points() != 6 {
            return Err(GkmError::Unsupported(
                "constrained solver expects six fixed points in dimension eight".into(),
            ));
        }
        let mut by_index: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (i, &l) in self.lambda.iter().enumerate() {
            by_index[l].push(i);
        }
        if by_index.iter().map(Vec::len).collect::<Vec<_>>() != vec![1, 1, 2, 1, 1] {
            return Err(GkmError::Unsupported(
                "constrained solver expects the index profile (1,1,2,1,1)".into(),
            ));
        }
        let (p3, top) = (by_index[3][0], by_index[4][0]);
        let dependent: Vec<usize> = by_index[2]
            .iter()
            .copied()
            .filter(|&i| has_dependent_pair(&self.data, i))
            .collect();
        let [special] = dependent[..] else {
            return Err(GkmError::Unsupported(
                "constrained solver expects exactly one vertex with a dependent weight pair"
                    .into(),
            ));
        };
        let plain = by_index[2].iter().copied().find(|&i| i != special).unwrap();

        let ring = self.data.ring();
        let zero_row = || vec![MultiPoly::zero(ring); self.n_points()];

        // dual class of the isotropy submanifold through the special vertex
        let (members, tangents, normals) = self.isotropy_component(special)?;
        let mut special_row = zero_row();
        for (k, &q) in members.iter().enumerate() {
            let mut prod = MultiPoly::one(ring);
            for &s in &normals[k] {
                prod = prod.mul(&self.data.points()[q].weights[s]);
            }
            special_row[q] = prod;
        }
        if special_row[special] != self.canonical_diagonal(special) {
            return Err(GkmError::InconsistentConstraints(
                "isotropy dual does not restrict to the canonical diagonal".into(),
            ));
        }

        // the plain middle class: known entries plus two pinned shapes
        let g3 = self.pinned_shape(p3, &[by_index[0][0], by_index[1][0], special])?;
        let g4 = self.pinned_shape(top, &[by_index[0][0], by_index[1][0], special])?;
        let (m3, m4, isotropy_integral) = self.solve_multipliers(
            plain,
            p3,
            top,
            &g3,
            &g4,
            &members,
            &tangents,
        )?;
        let mut plain_row = zero_row();
        plain_row[plain] = self.canonical_diagonal(plain);
        plain_row[p3] = g3.scale(&m3);
        plain_row[top] = g4.scale(&m4);

        let mut rows = Vec::with_capacity(self.n_points());
        for p in 0..self.n_points() {
            rows.push(match self.lambda[p] {
                0 => vec![MultiPoly::one(ring); self.n_points()],
                1 => self.degree2_class_closed_form()?.0,
                2 if p == special => special_row.clone(),
                2 => plain_row.clone(),
                3 => self.near_top_row(p, top)?,
                _ => {
                    let mut row = zero_row();
                    row[p] = self.canonical_diagonal(p);
                    row
                }
            });
        }
        let classes = CanonicalClasses { rows };
        classes.verify(self)?;
        Ok(ConstrainedSolution {
            multipliers: (m3, m4),
            isotropy_integral,
            special,
            plain,
            members,
            classes,
        })
    }

    /// Members of the connected isotropy submanifold through `seed`, with
    /// the weight slots tangent and normal to it at each member. The
    /// submanifold is cut out by the common direction of the dependent
    /// weight pair at `seed`; members carry two weights in that direction
    /// and sit on the same moment line.
    fn isotropy_component(
        &self,
        seed: usize,
    ) -> Result<(Vec<usize>, Vec<Vec<usize>>, Vec<Vec<usize>>)> {
        let coeffs: Vec<Vec<BigInt>> = self.data.points()[seed]
            .weights
            .iter()
            .map(|w| w.linear_coeffs().unwrap())
            .collect();
        let mut direction: Option<Vec<BigInt>> = None;
        'outer: for a in 0..coeffs.len() {
            for b in a + 1..coeffs.len() {
                if proportionality(&coeffs[a], &coeffs[b]).is_some() {
                    let (_, prim) = self.data.points()[seed].weights[a].primitive_normalized();
                    direction = Some(prim.linear_coeffs().unwrap());
                    break 'outer;
                }
            }
        }
        let dir = direction.ok_or_else(|| {
            GkmError::Unsupported("seed vertex has no dependent weight pair".into())
        })?;
        let mut members = Vec::new();
        let mut tangents = Vec::new();
        let mut normals = Vec::new();
        for q in 0..self.n_points() {
            let diff = self.psi[q].sub(&self.psi[seed]);
            let on_line = diff.is_zero()
                || proportionality(&diff.linear_coeffs().unwrap(), &dir).is_some();
            if !on_line {
                continue;
            }
            let mut tang = Vec::new();
            let mut norm = Vec::new();
            for (s, w) in self.data.points()[q].weights.iter().enumerate() {
                if proportionality(&w.linear_coeffs().unwrap(), &dir).is_some() {
                    tang.push(s);
                } else {
                    norm.push(s);
                }
            }
            if tang.len() == 2 {
                members.push(q);
                tangents.push(tang);
                normals.push(norm);
            }
        }
        if !members.contains(&seed) {
            return Err(GkmError::InconsistentConstraints(
                "seed vertex is not on its own isotropy submanifold".into(),
            ));
        }
        Ok((members, tangents, normals))
    }

    /// The product of the primitive directions of edges from `q` to the
    /// given zero set, each oriented positively on `xi`: any class vanishing
    /// there restricts at `q` to an integer multiple of this product.
    fn pinned_shape(&self, q: usize, zeros: &[usize]) -> Result<MultiPoly> {
        let mut dirs: Vec<MultiPoly> = Vec::new();
        for e in &self.edges {
            let (a, b) = (e.tail, e.head);
            let touches = (a == q && zeros.contains(&b)) || (b == q && zeros.contains(&a));
            if touches {
                let (_, mut prim) = e.weight.primitive_normalized();
                let val = self
                    .data
                    .weight_at_direction(&prim, &self.xi)
                    .as_constant()
                    .expect("no parameters");
                if val.is_negative() {
                    prim = prim.neg();
                }
                if !dirs.contains(&prim) {
                    dirs.push(prim);
                }
            }
        }
        if dirs.len() != 2 {
            return Err(GkmError::Unsupported(format!(
                "expected two pinned directions at `{}`, found {}",
                self.point_id(q),
                dirs.len()
            )));
        }
        Ok(dirs[0].mul(&dirs[1]))
    }

    /// Solve for the two integer multipliers and the value of the isotropy
    /// integral by matching polynomial identities coefficient by
    /// coefficient over the integers.
    #[allow(clippy::too_many_arguments)]
    fn solve_multipliers(
        &self,
        plain: usize,
        p3: usize,
        top: usize,
        g3: &MultiPoly,
        g4: &MultiPoly,
        members: &[usize],
        tangents: &[Vec<usize>],
    ) -> Result<(BigInt, BigInt, BigInt)> {
        let d = self.data.rank();
        let base = self.data.ring();
        let mut names: Vec<String> = base.var_names().to_vec();
        for extra in ["m1", "m2"] {
            let mut name = extra.to_string();
            while names.contains(&name) {
                name.push('_');
            }
            names.push(name);
        }
        let ext = Ring::new(&names);
        let lift = |p: &MultiPoly| lift_poly(&ext, p);
        let m1 = MultiPoly::var(&ext, d);
        let m2 = MultiPoly::var(&ext, d + 1);

        // global integral of the unknown class must vanish
        let mut global_terms = Vec::new();
        for q in 0..self.n_points() {
            let value = if q == plain {
                lift(&self.canonical_diagonal(plain))
            } else if q == p3 {
                lift(g3).mul(&m1)
            } else if q == top {
                lift(g4).mul(&m2)
            } else {
                continue;
            };
            let weights: Vec<MultiPoly> =
                self.data.points()[q].weights.iter().map(&lift).collect();
            global_terms.push(
                RatFunc::new(value, BigInt::one(), &weights).expect("weights are nonzero"),
            );
        }
        let global = ratfunc_sum_reduce(&global_terms);

        // integral over the isotropy submanifold must be an integer
        let mut local_terms = Vec::new();
        for (k, &q) in members.iter().enumerate() {
            let value = if q == p3 {
                lift(g3).mul(&m1)
            } else if q == top {
                lift(g4).mul(&m2)
            } else {
                continue;
            };
            let tang: Vec<MultiPoly> = tangents[k]
                .iter()
                .map(|&s| lift(&self.data.points()[q].weights[s]))
                .collect();
            local_terms
                .push(RatFunc::new(value, BigInt::one(), &tang).expect("weights are nonzero"));
        }
        let local = ratfunc_sum_reduce(&local_terms);
        let mut local_den = MultiPoly::constant(&ext, local.den_scalar().clone());
        for (f, pow) in local.den_factors() {
            local_den = local_den.mul(&f.pow(*pow));
        }

        // rows over the unknowns (m1, m2, c)
        let mut rows: BTreeMap<Vec<u16>, (Vec<BigInt>, BigInt)> = BTreeMap::new();
        let mut add = |mono: &[u16], col: usize, coef: &BigInt, rhs: bool| {
            let entry = rows
                .entry(mono[..d].to_vec())
                .or_insert_with(|| (vec![BigInt::zero(); 3], BigInt::zero()));
            if rhs {
                entry.1 -= coef;
            } else {
                entry.0[col] += coef;
            }
        };
        let classify = |mono: &[u16]| -> Result<Option<usize>> {
            match (mono[d], mono[d + 1]) {
                (0, 0) => Ok(None),
                (1, 0) => Ok(Some(0)),
                (0, 1) => Ok(Some(1)),
                _ => Err(GkmError::InconsistentConstraints(
                    "integral is not linear in the multipliers".into(),
                )),
            }
        };
        for (mono, coef) in global.numerator().terms() {
            match classify(mono.exponents())? {
                Some(col) => add(mono.exponents(), col, coef, false),
                None => add(mono.exponents(), 0, coef, true),
            }
        }
        // the local identity gets its own rows, kept apart from the global ones
        let mut local_rows: BTreeMap<Vec<u16>, (Vec<BigInt>, BigInt)> = BTreeMap::new();
        {
            let mut add_local = |mono: &[u16], col: usize, coef: &BigInt, rhs: bool| {
                let entry = local_rows
                    .entry(mono[..d].to_vec())
                    .or_insert_with(|| (vec![BigInt::zero(); 3], BigInt::zero()));
                if rhs {
                    entry.1 -= coef;
                } else {
                    entry.0[col] += coef;
                }
            };
            for (mono, coef) in local.numerator().terms() {
                match classify(mono.exponents())? {
                    Some(col) => add_local(mono.exponents(), col, coef, false),
                    None => add_local(mono.exponents(), 0, coef, true),
                }
            }
            for (mono, coef) in local_den.terms() {
                add_local(mono.exponents(), 2, &-coef, false);
            }
        }

        let mut mat_rows = Vec::new();
        let mut rhs = Vec::new();
        for (_, (row, b)) in rows.into_iter().chain(local_rows) {
            mat_rows.push(row);
            rhs.push(b);
        }
        let mat = IntMatrix::from_rows(mat_rows);
        match mat.solve(&rhs) {
            LinearSolution::Unique(sol) => {
                let [m1v, m2v, c] = <[BigInt; 3]>::try_from(sol).expect("three unknowns");
                Ok((m1v, m2v, c))
            }
            LinearSolution::None => Err(GkmError::InconsistentConstraints(
                "no integer multipliers satisfy the integral conditions".into(),
            )),
            LinearSolution::Affine { .. } => Err(GkmError::InconsistentConstraints(
                "the integral conditions do not determine the multipliers".into(),
            )),
        }
    }
}

/// Canonical classes of a graph: `rows[p][q]` is the restriction of the
/// class of point `p` to point `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalClasses {
    pub rows: Vec<Vec<MultiPoly>>,
}

impl CanonicalClasses {
    pub fn get(&self, p: usize, q: usize) -> &MultiPoly {
        &self.rows[p][q]
    }

    /// Check the defining properties against the graph: degrees, diagonal
    /// values, vanishing at points of lower or equal index, divisibility
    /// along every edge, and vanishing integrals below the top degree.
    pub fn verify(&self, g: &GkmGraph) -> Result<()> {
        let n = g.data().n();
        for (p, row) in self.rows.iter().enumerate() {
            let lam = g.lambda[p];
            for (q, val) in row.iter().enumerate() {
                if val.is_zero() {
                    continue;
                }
                if val.homogeneous_degree() != Some(lam as u32) {
                    return Err(GkmError::InconsistentConstraints(format!(
                        "class of `{}` has a value of the wrong degree at `{}`",
                        g.point_id(p),
                        g.point_id(q)
                    )));
                }
                if q != p && g.lambda[q] <= lam {
                    return Err(GkmError::InconsistentConstraints(format!(
                        "class of `{}` does not vanish at `{}`",
                        g.point_id(p),
                        g.point_id(q)
                    )));
                }
            }
            if row[p] != g.canonical_diagonal(p) {
                return Err(GkmError::InconsistentConstraints(format!(
                    "class of `{}` has the wrong diagonal",
                    g.point_id(p)
                )));
            }
            for e in g.edges() {
                let diff = row[e.tail].sub(&row[e.head]);
                if !diff.is_zero() && diff.exact_div(&e.weight).is_none() {
                    return Err(GkmError::NotDivisible {
                        num: diff.to_string(),
                        den: e.weight.to_string(),
                    });
                }
            }
            if lam < n && !g.integrate(row)?.is_zero() {
                return Err(GkmError::InconsistentConstraints(format!(
                    "class of `{}` has a nonvanishing integral",
                    g.point_id(p)
                )));
            }
        }
        Ok(())
    }
}

/// Expansion coefficients of all pairwise products of canonical classes:
/// `coeffs[i][j][s]` is the coefficient of the class of `s` in the product
/// of the classes of `i` and `j`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    lambda: Vec<usize>,
    pub coeffs: Vec<Vec<Vec<MultiPoly>>>,
}

impl StructureConstants {
    /// The integer structure constant of the induced basis in ordinary
    /// cohomology: the coefficient when the degrees add up, zero otherwise.
    pub fn ordinary(&self, i: usize, j: usize, s: usize) -> BigInt {
        if self.lambda[i] + self.lambda[j] == self.lambda[s] {
            self.coeffs[i][j][s].as_constant().expect("degree checked")
        } else {
            BigInt::zero()
        }
    }
}

/// Output of the constrained class solver.
#[derive(Debug, Clone)]
pub struct ConstrainedSolution {
    /// multipliers of the two pinned restriction shapes
    pub multipliers: (BigInt, BigInt),
    /// value of the integral over the isotropy submanifold
    pub isotropy_integral: BigInt,
    /// vertex carrying the dependent weight pair
    pub special: usize,
    /// the other middle vertex
    pub plain: usize,
    /// fixed points on the isotropy submanifold
    pub members: Vec<usize>,
    pub classes: CanonicalClasses,
}

/// A unimodular identification of two weight tables: `basis` lists the
/// images of the candidate coordinate vectors in reference coordinates,
/// and `vertex_map[i]` is the reference point matching candidate point `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMatch {
    pub basis: Vec<Vec<BigInt>>,
    pub vertex_map: Vec<usize>,
}

/// All unimodular changes of coordinates carrying the candidate weight
/// table onto the reference weight table, together with the vertex
/// bijections they induce. Both tables must consist of integer linear
/// forms; the search runs over images of a spanning set of candidate
/// weights among the reference weights.
pub fn match_unimodular(
    candidate: &FixedPointData,
    reference: &FixedPointData,
) -> Result<Vec<UnimodularMatch>> {
    let d = candidate.rank();
    if reference.rank() != d
        || candidate.n() != reference.n()
        || candidate.n_points() != reference.n_points()
    {
        return Ok(Vec::new());
    }
    let cand = coeff_table(candidate)?;
    let refr = coeff_table(reference)?;

    // spanning subset of candidate weights, greedily by rank
    let mut span: Vec<Vec<BigInt>> = Vec::new();
    'next: for row in cand.iter().flatten() {
        let mut probe = span.clone();
        probe.push(row.clone());
        if IntMatrix::from_rows(probe.clone()).rank() == probe.len() {
            span.push(row.clone());
            if span.len() == d {
                break 'next;
            }
        }
    }
    if span.len() < d {
        return Err(GkmError::Unsupported(
            "candidate weights do not span the coordinate space".into(),
        ));
    }
    let mut ref_pool: Vec<Vec<BigInt>> = refr.iter().flatten().cloned().collect();
    ref_pool.sort();
    ref_pool.dedup();

    // U maps candidate coordinates to reference coordinates;
    // row j of U solves span_matrix^T x = (j-th coordinates of the images)
    let span_t = IntMatrix::from_rows(span.clone()); // rows are the spanning weights
    let mut matches = Vec::new();
    let mut image = vec![0usize; d];
    enumerate_images(&mut image, 0, ref_pool.len(), &mut |image| {
        let mut u_rows = Vec::with_capacity(d);
        for j in 0..d {
            let target: Vec<BigInt> =
                image.iter().map(|&k| ref_pool[k][j].clone()).collect();
            match span_t.solve(&target) {
                LinearSolution::Unique(x) => u_rows.push(x),
                _ => return,
            }
        }
        let u = IntMatrix::from_rows(u_rows.clone());
        match u.det_bareiss() {
            Ok(det) if det.abs() == BigInt::one() => {}
            _ => return,
        }
        if let Some(vertex_map) = table_bijection(&cand, &refr, &u) {
            // basis rows are the columns of U
            let basis: Vec<Vec<BigInt>> =
                (0..d).map(|i| (0..d).map(|j| u.row(j)[i].clone()).collect()).collect();
            let m = UnimodularMatch { basis, vertex_map };
            if !matches.contains(&m) {
                matches.push(m);
            }
        }
    });
    matches.sort_by(|a, b| (&a.basis, &a.vertex_map).cmp(&(&b.basis, &b.vertex_map)));
    Ok(matches)
}

fn enumerate_images(
    image: &mut Vec<usize>,
    pos: usize,
    pool: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == image.len() {
        visit(image);
        return;
    }
    for k in 0..pool {
        image[pos] = k;
        enumerate_images(image, pos + 1, pool, visit);
    }
}

fn coeff_table(data: &FixedPointData) -> Result<Vec<Vec<Vec<BigInt>>>> {
    data.points()
        .iter()
        .map(|p| {
            p.weights
                .iter()
                .map(|w| {
                    w.linear_coeffs().ok_or_else(|| GkmError::NonLinearWeight {
                        id: p.id.clone(),
                        weight: w.to_string(),
                    })
                })
                .collect()
        })
        .collect()
}

/// Match each candidate point, with weights mapped through `u`, to a
/// distinct reference point with the same weight multiset.
fn table_bijection(
    cand: &[Vec<Vec<BigInt>>],
    refr: &[Vec<Vec<BigInt>>],
    u: &IntMatrix,
) -> Option<Vec<usize>> {
    let key = |weights: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        let mut k: Vec<Vec<BigInt>> = weights.to_vec();
        k.sort();
        k
    };
    let ref_keys: Vec<Vec<Vec<BigInt>>> = refr.iter().map(|w| key(w)).collect();
    let mut used = vec![false; refr.len()];
    let mut map = Vec::with_capacity(cand.len());
    for point in cand {
        let mapped: Vec<Vec<BigInt>> = point.iter().map(|c| u.mul_vec(c)).collect();
        let mk = key(&mapped);
        let slot = (0..refr.len()).find(|&r| !used[r] && ref_keys[r] == mk)?;
        used[slot] = true;
        map.push(slot);
    }
    Some(map)
}

/// Weights at the two fixed points replacing a fixed point with weights
/// `w` after blowing up a four-dimensional invariant submanifold through
/// it: the `normal` pair `(s, t)` contributes `{w_s, w_t - w_s}` and
/// `{w_t, w_s - w_t}`. Fails when the two normal weights coincide.
pub fn blowup_weights(
    weights: &[MultiPoly],
    normal: (usize, usize),
) -> Result<[Vec<MultiPoly>; 2]> {
    let (s, t) = normal;
    if weights[s] == weights[t] {
        return Err(GkmError::Unsupported(
            "normal weights coincide, the blow-up has non-isolated fixed points".into(),
        ));
    }
    let rest: Vec<MultiPoly> = weights
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != s && *k != t)
        .map(|(_, w)| w.clone())
        .collect();
    let mut first = rest.clone();
    first.push(weights[s].clone());
    first.push(weights[t].sub(&weights[s]));
    let mut second = rest;
    second.push(weights[t].clone());
    second.push(weights[s].sub(&weights[t]));
    Ok([first, second])
}

/// Weights at the three fixed points in the exceptional fiber over a fixed
/// point on an invariant curve: the tangent weight survives, and each
/// normal direction `i` contributes `{w_tangent, w_i, w_j - w_i, w_k - w_i}`.
pub fn blowup_weights_curve(
    weights: &[MultiPoly],
    tangent: usize,
) -> Result<Vec<Vec<MultiPoly>>> {
    let normals: Vec<usize> = (0..weights.len()).filter(|&k| k != tangent).collect();
    let mut out = Vec::with_capacity(normals.len());
    for &i in &normals {
        let mut table = vec![weights[tangent].clone(), weights[i].clone()];
        for &j in &normals {
            if j != i {
                let diff = weights[j].sub(&weights[i]);
                if diff.is_zero() {
                    return Err(GkmError::Unsupported(
                        "coinciding normal weights in curve blow-up".into(),
                    ));
                }
                table.push(diff);
            }
        }
        out.push(table);
    }
    Ok(out)
}

/// Recognize two weight tables as the exceptional pair of a blow-up and
/// return the possible merged tables: the tables must share two weights,
/// carry a symmetric pair `u, -u`, and the two remaining weights must
/// differ by `u`.
pub fn blowdown_merge(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<Vec<MultiPoly>> {
    let mut out: Vec<Vec<MultiPoly>> = Vec::new();
    for (ia, u) in a.iter().enumerate() {
        for (ib, v) in b.iter().enumerate() {
            if !u.add(v).is_zero() {
                continue;
            }
            let rest_a: Vec<&MultiPoly> =
                a.iter().enumerate().filter(|(k, _)| *k != ia).map(|(_, w)| w).collect();
            let rest_b: Vec<&MultiPoly> =
                b.iter().enumerate().filter(|(k, _)| *k != ib).map(|(_, w)| w).collect();
            // choose the shared pair from rest_a and match it in rest_b
            for s in 0..rest_a.len() {
                for t in s + 1..rest_a.len() {
                    let mut remaining_b: Vec<usize> = (0..rest_b.len()).collect();
                    let mut shared_ok = true;
                    for shared in [rest_a[s], rest_a[t]] {
                        match remaining_b.iter().position(|&k| rest_b[k] == shared) {
                            Some(pos) => {
                                remaining_b.remove(pos);
                            }
                            None => {
                                shared_ok = false;
                                break;
                            }
                        }
                    }
                    if !shared_ok {
                        continue;
                    }
                    let w3 = (0..rest_a.len())
                        .find(|&k| k != s && k != t)
                        .map(|k| rest_a[k])
                        .expect("four weights");
                    let w4 = rest_b[remaining_b[0]];
                    if w4.sub(w3) == *u {
                        let merged =
                            vec![rest_a[s].clone(), rest_a[t].clone(), w3.clone(), w4.clone()];
                        if !out.contains(&merged) {
                            out.push(merged);
                        }
                    }
                }
            }
        }
    }
    out
}

/// `eta(xi) * v - v(xi) * eta`: the numerator of the projection of `v`
/// along `eta`, cleared of the denominator `eta(xi)`.
fn rho_numerator(v: &MultiPoly, v_val: &BigInt, eta: &MultiPoly, eta_val: &BigInt) -> MultiPoly {
    v.scale(eta_val).sub(&eta.scale(v_val))
}

/// `Some(c)` when `a = c * b` for a rational `c` (not both zero).
fn proportionality(a: &[BigInt], b: &[BigInt]) -> Option<BigRational> {
    let lead = b.iter().position(|x| !x.is_zero())?;
    if a[lead].is_zero() {
        return None;
    }
    let c = BigRational::new(a[lead].clone(), b[lead].clone());
    for k in 0..a.len() {
        if BigRational::from(a[k].clone()) != &c * BigRational::from(b[k].clone()) {
            return None;
        }
    }
    Some(c)
}

fn lift_poly(ext: &Arc<Ring>, p: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(ext);
    for (mono, coef) in p.terms() {
        let mut term = MultiPoly::constant(ext, coef.clone());
        for (i, &e) in mono.exponents().iter().enumerate() {
            if e > 0 {
                term = term.mul(&MultiPoly::var(ext, i).pow(e as u32));
            }
        }
        out = out.add(&term);
    }
    out
}

/// Pair positive weight instances with negative partners at other points,
/// requiring the moment images to differ by a positive multiple of the
/// weight. Forced pairs are assigned first; any remaining ambiguity is
/// resolved by deterministic backtracking to a full matching.
fn pair_edges(
    data: &FixedPointData,
    wval: &[Vec<BigInt>],
    psi: &[MultiPoly],
) -> Result<Vec<GkmEdge>> {
    struct PosInstance {
        point: usize,
        slot: usize,
        candidates: Vec<(usize, usize, BigRational)>,
    }
    let mut pos: Vec<PosInstance> = Vec::new();
    for (i, p) in data.points().iter().enumerate() {
        for (s, w) in p.weights.iter().enumerate() {
            if !wval[i][s].is_positive() {
                continue;
            }
            let neg = w.neg();
            let mut candidates = Vec::new();
            for (j, q) in data.points().iter().enumerate() {
                if j == i {
                    continue;
                }
                for (t, v) in q.weights.iter().enumerate() {
                    if *v != neg {
                        continue;
                    }
                    let diff = psi[j].sub(&psi[i]);
                    if diff.is_zero() {
                        continue;
                    }
                    let dc = diff.linear_coeffs().expect("moment images are linear");
                    let wc = w.linear_coeffs().expect("weights are linear");
                    if let Some(c) = proportionality(&dc, &wc) {
                        if c.is_positive() {
                            candidates.push((j, t, c));
                        }
                    }
                }
            }
            if candidates.is_empty() {
                return Err(GkmError::EdgePairing {
                    id: p.id.clone(),
                    weight: w.to_string(),
                });
            }
            pos.push(PosInstance { point: i, slot: s, candidates });
        }
    }

    // deterministic backtracking over candidate partners
    fn assign(
        pos: &[PosInstance],
        k: usize,
        used: &mut Vec<Vec<bool>>,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if k == pos.len() {
            return true;
        }
        for (ci, (j, t, _)) in pos[k].candidates.iter().enumerate() {
            if used[*j][*t] {
                continue;
            }
            used[*j][*t] = true;
            chosen[k] = ci;
            if assign(pos, k + 1, used, chosen) {
                return true;
            }
            used[*j][*t] = false;
        }
        false
    }
    let mut used: Vec<Vec<bool>> =
        data.points().iter().map(|p| vec![false; p.weights.len()]).collect();
    let mut chosen = vec![0usize; pos.len()];
    if !assign(&pos, 0, &mut used, &mut chosen) {
        let first = &pos[0];
        return Err(GkmError::EdgePairing {
            id: data.points()[first.point].id.clone(),
            weight: data.points()[first.point].weights[first.slot].to_string(),
        });
    }
    let mut edges: Vec<GkmEdge> = pos
        .iter()
        .zip(&chosen)
        .map(|(inst, &ci)| {
            let (j, t, ref c) = inst.candidates[ci];
            GkmEdge {
                tail: inst.point,
                head: j,
                weight: data.points()[inst.point].weights[inst.slot].clone(),
                tail_slot: inst.slot,
                head_slot: t,
                moment_ratio: c.clone(),
            }
        })
        .collect();
    edges.sort_by(|a, b| {
        (a.tail, a.head, a.weight.to_string()).cmp(&(b.tail, b.head, b.weight.to_string()))
    });
    Ok(edges)
}

/// Convenience constructor: a fixed point per `(id, weights)` pair, weights
/// parsed in the given ring, full torus rank.
pub fn build_fixed_point_data(
    ring: &Arc<Ring>,
    table: &[(&str, &[&str])],
) -> Result<FixedPointData> {
    let points = table
        .iter()
        .map(|(id, weights)| {
            let parsed = weights
                .iter()
                .map(|w| {
                    MultiPoly::parse(ring, w)
                        .map_err(|e| GkmError::Unsupported(format!("cannot parse `{w}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FixedPoint { id: id.to_string(), weights: parsed })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedPointData::new(Arc::clone(ring), ring.n_vars(), points)?)
}

fn has_dependent_pair(data: &FixedPointData, i: usize) -> bool {
    let coeffs: Vec<Vec<BigInt>> = data.points()[i]
        .weights
        .iter()
        .filter_map(|w| w.linear_coeffs())
        .collect();
    (0..coeffs.len())
        .any(|a| (a + 1..coeffs.len()).any(|b| proportionality(&coeffs[a], &coeffs[b]).is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::chern_numbers_from_weights;
    use proptest::prelude::*;

    fn graph(ring: &Arc<Ring>, table: &[(&str, &[&str])], xi: &[i64]) -> GkmGraph {
        let data = build_fixed_point_data(ring, table).unwrap();
        GkmGraph::new(data, xi.to_vec()).unwrap()
    }

    fn v_graph() -> GkmGraph {
        let ring = Ring::new(&["x", "y"]);
        graph(
            &ring,
            &[
                ("q0", &["-x + y", "y", "x + y", "2*x + y"]),
                ("q1", &["x - y", "x", "x + y", "x + 2*y"]),
                ("q2", &["-2*x - y", "-x", "y", "x + 2*y"]),
                ("q2'", &["-x - 2*y", "-y", "x", "2*x + y"]),
                ("q3", &["-x - 2*y", "-x - y", "-x", "-x + y"]),
                ("q4", &["-2*x - y", "-x - y", "-y", "x - y"]),
            ],
            &[1, 2],
        )
    }

    fn w_graph() -> GkmGraph {
        let ring = Ring::new(&["a", "b"]);
        graph(
            &ring,
            &[
                ("p0", &["-3*a + b", "-2*a + b", "-a + b", "b"]),
                ("p1", &["3*a - b", "a", "-a + b", "b"]),
                ("p2", &["-3*a + b", "-a", "-2*a + b", "-b"]),
                ("p2'", &["a - b", "2*a - b", "a", "2*a"]),
                ("p3", &["3*a - b", "-a", "a", "-b"]),
                ("p4", &["a - b", "-2*a", "2*a - b", "-a"]),
            ],
            &[1, 5],
        )
    }

    fn q_graph() -> GkmGraph {
        let ring = Ring::new(&["a", "b", "c"]);
        graph(
            &ring,
            &[
                ("q0", &["b", "b + c", "a + b + c", "a + b"]),
                ("q1", &["-b", "a", "c", "a + b + c"]),
                ("q2", &["-c", "-b - c", "a", "a + b"]),
                ("q2'", &["-a", "-a - b", "b + c", "c"]),
                ("q3", &["-a - b - c", "-a", "-c", "b"]),
                ("q4", &["-a - b - c", "-b - c", "-a - b", "-b"]),
            ],
            &[1, 1, 1],
        )
    }

    fn assert_rows(g: &GkmGraph, classes: &CanonicalClasses, expected: &[&[&str]]) {
        for (p, row) in expected.iter().enumerate() {
            for (q, entry) in row.iter().enumerate() {
                let want = MultiPoly::parse(g.ring(), entry).unwrap();
                assert_eq!(
                    classes.rows[p][q],
                    want,
                    "class of {} at {}",
                    g.point_id(p),
                    g.point_id(q)
                );
            }
        }
    }

    fn assert_expansion(g: &GkmGraph, got: &[MultiPoly], expected: &[&str], what: &str) {
        for (k, entry) in expected.iter().enumerate() {
            let want = MultiPoly::parse(g.ring(), entry).unwrap();
            assert_eq!(got[k], want, "{what}, coefficient of {}", g.point_id(k));
        }
    }

    #[test]
    fn v_graph_shape() {
        let g = v_graph();
        assert!(g.is_full_gkm());
        let morse = g.morse_data();
        assert_eq!(morse.index, vec![0, 1, 2, 2, 3, 4]);
        assert_eq!(morse.order, vec![0, 1, 2, 3, 4, 5]);
        assert!(morse.index_increasing);
        assert_eq!(g.edges().len(), 12);
        for i in 0..6 {
            let deg = g
                .edges()
                .iter()
                .filter(|e| e.tail == i || e.head == i)
                .count();
            assert_eq!(deg, 4, "degree of {}", g.point_id(i));
        }
        for e in g.edges() {
            assert!(e.moment_ratio.is_positive());
        }
        let y = MultiPoly::parse(g.ring(), "y").unwrap();
        assert!(g
            .edges()
            .iter()
            .any(|e| e.tail == 2 && e.head == 5 && e.weight == y));
        assert_eq!(
            g.moment(0),
            &MultiPoly::parse(g.ring(), "-2*x - 4*y").unwrap()
        );
    }

    #[test]
    fn v_degree2_closed_form() {
        let g = v_graph();
        let (row, k0) = g.degree2_class_closed_form().unwrap();
        assert_eq!(k0, BigInt::from(2));
        assert_expansion(
            &g,
            &row,
            &["0", "-x + y", "2*x + y", "3*y", "3*x + 3*y", "2*x + 4*y"],
            "degree-2 class",
        );
    }

    #[test]
    fn v_theta_values() {
        let g = v_graph();
        assert_eq!(g.theta(1, 2).unwrap(), BigInt::from(1));
        assert_eq!(g.theta(1, 3).unwrap(), BigInt::from(3));
        assert_eq!(g.theta(2, 4).unwrap(), BigInt::from(3));
        assert_eq!(g.theta(3, 4).unwrap(), BigInt::from(1));
        assert_eq!(g.theta(4, 5).unwrap(), BigInt::from(1));
        assert!(matches!(g.theta(2, 3), Err(GkmError::MissingEdge { .. })));
        assert!(matches!(g.theta(0, 2), Err(GkmError::Unsupported(_))));
    }

    #[test]
    fn v_theta_does_not_depend_on_direction() {
        let g13 = {
            let g = v_graph();
            GkmGraph::new(
                build_fixed_point_data(
                    g.ring(),
                    &[
                        ("q0", &["-x + y", "y", "x + y", "2*x + y"]),
                        ("q1", &["x - y", "x", "x + y", "x + 2*y"]),
                        ("q2", &["-2*x - y", "-x", "y", "x + 2*y"]),
                        ("q2'", &["-x - 2*y", "-y", "x", "2*x + y"]),
                        ("q3", &["-x - 2*y", "-x - y", "-x", "-x + y"]),
                        ("q4", &["-2*x - y", "-x - y", "-y", "x - y"]),
                    ],
                )
                .unwrap(),
                vec![1, 3],
            )
            .unwrap()
        };
        let g12 = v_graph();
        assert_eq!(g13.morse_data().index, g12.morse_data().index);
        for (t, h) in [(1, 2), (1, 3), (2, 4), (3, 4), (4, 5)] {
            assert_eq!(g12.theta(t, h).unwrap(), g13.theta(t, h).unwrap());
        }
    }

    #[test]
    fn v_canonical_classes() {
        let g = v_graph();
        let classes = g.canonical_classes().unwrap();
        assert_rows(
            &g,
            &classes,
            &[
                &["1", "1", "1", "1", "1", "1"],
                &["0", "-x + y", "2*x + y", "3*y", "3*x + 3*y", "2*x + 4*y"],
                &["0", "0", "x*(2*x + y)", "0", "3*x*(x + y)", "(2*x + y)*(x + y)"],
                &["0", "0", "0", "y*(x + 2*y)", "(x + y)*(x + 2*y)", "3*y*(x + y)"],
                &["0", "0", "0", "0", "x*(x + y)*(x + 2*y)", "y*(2*x + y)*(x + y)"],
                &["0", "0", "0", "0", "0", "(2*x + y)*(x + y)*y*(-x + y)"],
            ],
        );
    }

    #[test]
    fn v_structure_constants() {
        let g = v_graph();
        let classes = g.canonical_classes().unwrap();
        let sc = g.structure_constants(&classes).unwrap();
        let expect = [
            ((1, 1), ["0", "-x + y", "3", "3", "0", "0"]),
            ((1, 2), ["0", "0", "2*x + y", "0", "3", "0"]),
            ((1, 3), ["0", "0", "0", "3*y", "3", "0"]),
            ((1, 4), ["0", "0", "0", "0", "3*x + 3*y", "1"]),
            ((2, 2), ["0", "0", "x*(2*x + y)", "0", "3*x", "1"]),
            ((2, 3), ["0", "0", "0", "0", "3*x + 3*y", "0"]),
            ((3, 3), ["0", "0", "0", "y*(x + 2*y)", "x + 2*y", "1"]),
        ];
        for ((i, j), coeffs) in expect {
            assert_expansion(&g, &sc.coeffs[i][j], &coeffs, &format!("product ({i},{j})"));
        }
        // structure constants of the basis induced in ordinary cohomology
        assert_eq!(sc.ordinary(1, 1, 2), BigInt::from(3));
        assert_eq!(sc.ordinary(1, 1, 3), BigInt::from(3));
        assert_eq!(sc.ordinary(1, 1, 1), BigInt::zero());
        assert_eq!(sc.ordinary(1, 2, 4), BigInt::from(3));
        assert_eq!(sc.ordinary(2, 2, 5), BigInt::from(1));
        assert_eq!(sc.ordinary(2, 3, 5), BigInt::zero());
    }

    #[test]
    fn v_chern_class_expansions() {
        let g = v_graph();
        let classes = g.canonical_classes().unwrap();
        let chern = g.chern_class_expansions(&classes).unwrap();
        assert_expansion(&g, &chern[0], &["2*x + 4*y", "-2", "0", "0", "0", "0"], "c1");
        assert_expansion(
            &g,
            &chern[1],
            &["-x^2 + 6*x*y + 6*y^2", "-7*x - 7*y", "7", "7", "0", "0"],
            "c2",
        );
        assert_expansion(
            &g,
            &chern[2],
            &[
                "-2*x^3 - 2*x^2*y + 6*x*y^2 + 4*y^3",
                "-6*x^2 - 14*x*y - 6*y^2",
                "8*x + 16*y",
                "16*x + 8*y",
                "-24",
                "0",
            ],
            "c3",
        );
        assert_expansion(
            &g,
            &chern[3],
            &[
                "(-x + y)*y*(x + y)*(2*x + y)",
                "-x^3 - 5*x^2*y - 5*x*y^2 - y^3",
                "x^2 + 7*x*y + 7*y^2",
                "7*x^2 + 7*x*y + y^2",
                "-6*x - 12*y",
                "6",
            ],
            "c4",
        );
    }

    #[test]
    fn v_chern_numbers() {
        let g = v_graph();
        let numbers = chern_numbers_from_weights(g.data()).unwrap();
        let dim8 = numbers.dim8().unwrap();
        assert_eq!(
            (dim8.c1_4, dim8.c1sq_c2, dim8.c2_2, dim8.c1c3, dim8.c4),
            (288, 168, 98, 48, 6)
        );
    }

    #[test]
    fn v_subcircle_restriction() {
        let g = v_graph();
        let sub = g.restrict_to_subcircle(&[1, 2]).unwrap();
        let t = MultiPoly::var(sub.ring(), 0);
        let want: Vec<MultiPoly> = [1, 2, 3, 4]
            .iter()
            .map(|&k| t.scale(&BigInt::from(k)))
            .collect();
        assert_eq!(sub.points()[0].weights, want);
    }

    #[test]
    fn w_edges_are_forced() {
        let g = w_graph();
        assert!(!g.is_full_gkm());
        assert_eq!(g.morse_data().index, vec![0, 1, 2, 2, 3, 4]);
        assert!(g.morse_data().index_increasing);
        assert_eq!(g.edges().len(), 12);
        let a = MultiPoly::parse(g.ring(), "a").unwrap();
        let two_a = MultiPoly::parse(g.ring(), "2*a").unwrap();
        let has = |tail: usize, head: usize, w: &MultiPoly| {
            g.edges()
                .iter()
                .any(|e| e.tail == tail && e.head == head && e.weight == *w)
        };
        // the dependent pair at p2' splits between p3 and p4
        assert!(has(1, 2, &a));
        assert!(has(3, 4, &a));
        assert!(has(3, 5, &two_a));
        assert!(has(4, 5, &a));
    }

    #[test]
    fn w_needs_the_constrained_solver() {
        let g = w_graph();
        match g.canonical_classes() {
            Err(GkmError::NotGkm(id)) => assert_eq!(id, "p2'"),
            other => panic!("expected NotGkm, got {other:?}"),
        }
    }

    #[test]
    fn w_constrained_solution() {
        let g = w_graph();
        let sol = g.solve_constrained_classes().unwrap();
        assert_eq!(sol.special, 3);
        assert_eq!(sol.plain, 2);
        assert_eq!(sol.members, vec![3, 4, 5]);
        assert_eq!(sol.multipliers, (BigInt::from(1), BigInt::from(2)));
        assert_eq!(sol.isotropy_integral, BigInt::from(-1));
        assert_rows(
            &g,
            &sol.classes,
            &[
                &["1", "1", "1", "1", "1", "1"],
                &["0", "-3*a + b", "b", "-4*a + 2*b", "-3*a + 2*b", "-2*a + 2*b"],
                &["0", "0", "a*b", "0", "a*b", "2*a*(-a + b)"],
                &[
                    "0",
                    "0",
                    "0",
                    "(-2*a + b)*(-a + b)",
                    "(-3*a + b)*b",
                    "(-2*a + b)*(-a + b)",
                ],
                &["0", "0", "0", "0", "a*b*(-3*a + b)", "2*a*(-2*a + b)*(-a + b)"],
                &["0", "0", "0", "0", "0", "2*a^2*(-a + b)*(-2*a + b)"],
            ],
        );
    }

    #[test]
    fn w_structure_constants() {
        let g = w_graph();
        let classes = g.solve_constrained_classes().unwrap().classes;
        let sc = g.structure_constants(&classes).unwrap();
        let expect = [
            ((1, 1), ["0", "-3*a + b", "3", "2", "0", "0"]),
            ((1, 2), ["0", "0", "b", "0", "1", "0"]),
            ((1, 3), ["0", "0", "0", "-4*a + 2*b", "1", "0"]),
            ((1, 4), ["0", "0", "0", "0", "-3*a + 2*b", "1"]),
            ((2, 2), ["0", "0", "a*b", "0", "0", "1"]),
            ((2, 3), ["0", "0", "0", "0", "b", "-1"]),
            ((3, 3), ["0", "0", "0", "(-2*a + b)*(-a + b)", "-2*a", "2"]),
        ];
        for ((i, j), coeffs) in expect {
            assert_expansion(&g, &sc.coeffs[i][j], &coeffs, &format!("product ({i},{j})"));
        }
        assert_eq!(sc.ordinary(1, 1, 2), BigInt::from(3));
        assert_eq!(sc.ordinary(1, 1, 3), BigInt::from(2));
        assert_eq!(sc.ordinary(2, 3, 5), BigInt::from(-1));
    }

    #[test]
    fn w_chern_class_expansions() {
        let g = w_graph();
        let classes = g.solve_constrained_classes().unwrap().classes;
        let chern = g.chern_class_expansions(&classes).unwrap();
        assert_expansion(&g, &chern[0], &["-6*a + 4*b", "-3", "0", "0", "0", "0"], "c1");
        assert_expansion(
            &g,
            &chern[1],
            &["11*a^2 - 18*a*b + 6*b^2", "4*a - 7*b", "13", "9", "0", "0"],
            "c2",
        );
        assert_expansion(
            &g,
            &chern[2],
            &[
                "-6*a^3 + 22*a^2*b - 18*a*b^2 + 4*b^3",
                "-(a - 5*b)*(a - b)",
                "9*(2*b - 3*a)",
                "7*a + 6*b",
                "-16",
                "0",
            ],
            "c3",
        );
        assert_expansion(
            &g,
            &chern[3],
            &[
                "(-3*a + b)*(-2*a + b)*(-a + b)*b",
                "b*(b - a)*(a - b)",
                "12*a^2 - 15*a*b + 5*b^2",
                "2*a^2 + b*a + b^2",
                "-4*b",
                "6",
            ],
            "c4",
        );
        let numbers = chern_numbers_from_weights(g.data()).unwrap();
        let dim8 = numbers.dim8().unwrap();
        assert_eq!((dim8.c1_4, dim8.c1sq_c2, dim8.c2_2), (405, 198, 97));
    }

    #[test]
    fn q_canonical_classes() {
        let g = q_graph();
        assert_eq!(g.morse_data().order, vec![0, 1, 2, 3, 4, 5]);
        let (_, k0) = g.degree2_class_closed_form().unwrap();
        assert_eq!(k0, BigInt::from(4));
        let classes = g.canonical_classes().unwrap();
        assert_rows(
            &g,
            &classes,
            &[
                &["1", "1", "1", "1", "1", "1"],
                &["0", "b", "b + c", "a + b", "a + b + c", "a + 2*b + c"],
                &["0", "0", "c*(b + c)", "0", "c*(a + b + c)", "(a + b + c)*(b + c)"],
                &["0", "0", "0", "a*(a + b)", "a*(a + b + c)", "(a + b)*(a + b + c)"],
                &[
                    "0",
                    "0",
                    "0",
                    "0",
                    "a*c*(a + b + c)",
                    "(a + b)*(b + c)*(a + b + c)",
                ],
                &["0", "0", "0", "0", "0", "(a + b + c)*(b + c)*(a + b)*b"],
            ],
        );
    }

    #[test]
    fn q_structure_constants_and_chern() {
        let g = q_graph();
        let classes = g.canonical_classes().unwrap();
        let sc = g.structure_constants(&classes).unwrap();
        let expect = [
            ((1, 1), ["0", "b", "1", "1", "0", "0"]),
            ((1, 2), ["0", "0", "b + c", "0", "1", "0"]),
            ((1, 3), ["0", "0", "0", "a + b", "1", "0"]),
            ((1, 4), ["0", "0", "0", "0", "a + b + c", "1"]),
            ((2, 2), ["0", "0", "c*(b + c)", "0", "c", "1"]),
            ((2, 3), ["0", "0", "0", "0", "a + b + c", "0"]),
            ((3, 3), ["0", "0", "0", "a*(a + b)", "a", "1"]),
        ];
        for ((i, j), coeffs) in expect {
            assert_expansion(&g, &sc.coeffs[i][j], &coeffs, &format!("product ({i},{j})"));
        }
        assert_eq!(sc.ordinary(1, 1, 2), BigInt::from(1));
        assert_eq!(sc.ordinary(1, 1, 3), BigInt::from(1));
        assert_eq!(sc.ordinary(1, 2, 4), BigInt::from(1));
        assert_eq!(sc.ordinary(2, 2, 5), BigInt::from(1));
        assert_eq!(sc.ordinary(3, 3, 5), BigInt::from(1));
        assert_eq!(sc.ordinary(1, 4, 5), BigInt::from(1));
        assert_eq!(sc.ordinary(2, 3, 5), BigInt::zero());

        let chern = g.chern_class_expansions(&classes).unwrap();
        assert_expansion(&g, &chern[0], &["2*a + 4*b + 2*c", "-4", "0", "0", "0", "0"], "c1");
        assert_expansion(
            &g,
            &chern[1],
            &[
                "a^2 + 6*a*b + 3*a*c + 6*b^2 + 6*b*c + c^2",
                "-7*a - 7*b - 7*c",
                "7",
                "7",
                "0",
                "0",
            ],
            "c2",
        );
        assert_expansion(
            &g,
            &chern[2],
            &[
                "(a + 2*b + c)*(2*a*b + a*c + 2*b^2 + 2*b*c)",
                "-3*a^2 - 7*a*b - 8*a*c - 4*b^2 - 7*b*c - 3*c^2",
                "9*a + 6*b + 3*c",
                "3*a + 6*b + 9*c",
                "-12",
                "0",
            ],
            "c3",
        );
        assert_expansion(
            &g,
            &chern[3],
            &[
                "b*(b + c)*(a + b + c)*(a + b)",
                "-(a + b + c)*(a*b + 2*a*c + b^2 + b*c)",
                "3*a^2 + 4*a*b + 2*a*c + b^2 + b*c",
                "a*b + 2*a*c + b^2 + 4*b*c + 3*c^2",
                "-3*a - 6*b - 3*c",
                "6",
            ],
            "c4",
        );
        let numbers = chern_numbers_from_weights(g.data()).unwrap();
        let dim8 = numbers.dim8().unwrap();
        assert_eq!((dim8.c1_4, dim8.c1sq_c2, dim8.c2_2), (512, 224, 98));
    }

    #[test]
    fn projective_line_classes() {
        let ring = Ring::new(&["x"]);
        let g = graph(&ring, &[("s", &["x"]), ("n", &["-x"])], &[1]);
        let classes = g.canonical_classes().unwrap();
        assert_rows(&g, &classes, &[&["1", "1"], &["0", "x"]]);
    }

    #[test]
    fn expansion_rejects_classes_outside_the_span() {
        let g = v_graph();
        let classes = g.canonical_classes().unwrap();
        let mut alpha = vec![MultiPoly::zero(g.ring()); 6];
        alpha[0] = MultiPoly::one(g.ring());
        assert!(matches!(
            g.expand_in_basis(&classes, &alpha),
            Err(GkmError::BasisExpansion(_))
        ));
    }

    #[test]
    fn match_v_with_itself() {
        let g = v_graph();
        let matches = match_unimodular(g.data(), g.data()).unwrap();
        let one = BigInt::one();
        let zero = BigInt::zero();
        let identity = UnimodularMatch {
            basis: vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            vertex_map: vec![0, 1, 2, 3, 4, 5],
        };
        assert!(matches.contains(&identity));
        // swapping the coordinates exchanges q0 with q1, q2 with q2', q3 with q4
        let swap = UnimodularMatch {
            basis: vec![vec![zero.clone(), one.clone()], vec![one, zero]],
            vertex_map: vec![1, 0, 3, 2, 5, 4],
        };
        assert!(matches.contains(&swap));
    }

    #[test]
    fn match_rebased_tables() {
        let big = |k: i64| BigInt::from(k);
        // the index-2 family table at its generic basis
        let ring_b = Ring::new(&["b1", "b2"]);
        let cand = build_fixed_point_data(
            &ring_b,
            &[
                ("q0", &["-2*b1 + 3*b2", "-b1 + 2*b2", "b2", "b1"]),
                ("q1", &["2*b1 - 3*b2", "b1 - b2", "b2", "-b1 + 3*b2"]),
                ("q2", &["-b1", "-b1 + b2", "-b1 + 2*b2", "-b1 + 3*b2"]),
                ("q2'", &["b1 - 3*b2", "b1 - 2*b2", "b1 - b2", "b1"]),
                ("q3", &["b1 - 3*b2", "-b2", "-b1 + b2", "-2*b1 + 3*b2"]),
                ("q4", &["-b1", "-b2", "b1 - 2*b2", "2*b1 - 3*b2"]),
            ],
        )
        .unwrap();
        let matches = match_unimodular(&cand, v_graph().data()).unwrap();
        let want = UnimodularMatch {
            basis: vec![vec![big(2), big(1)], vec![big(1), big(1)]],
            vertex_map: vec![0, 1, 2, 3, 4, 5],
        };
        assert!(matches.contains(&want), "missing {want:?} in {matches:?}");

        // an index-3 family table against the multigraph reference
        let cand = build_fixed_point_data(
            &ring_b,
            &[
                ("p0", &["-2*b1 + 3*b2", "-b1 + 2*b2", "b2", "b1"]),
                ("p1", &["2*b1 - 3*b2", "b1 - b2", "b2", "b1"]),
                ("p2", &["-2*b1 + 3*b2", "-b1 + b2", "-b1 + 2*b2", "-b1"]),
                ("p2'", &["-b2", "b1 - 2*b2", "b1 - b2", "2*b1 - 2*b2"]),
                ("p3", &["2*b1 - 3*b2", "-b1 + b2", "b1 - b2", "-b1"]),
                ("p4", &["-b2", "-2*b1 + 2*b2", "b1 - 2*b2", "-b1 + b2"]),
            ],
        )
        .unwrap();
        let matches = match_unimodular(&cand, w_graph().data()).unwrap();
        let want = UnimodularMatch {
            basis: vec![vec![big(0), big(1)], vec![big(-1), big(1)]],
            vertex_map: vec![0, 1, 2, 3, 4, 5],
        };
        assert!(matches.contains(&want), "missing {want:?} in {matches:?}");

        // the index-4 table against the quadric reference
        let ring_b3 = Ring::new(&["b1", "b2", "b3"]);
        let cand = build_fixed_point_data(
            &ring_b3,
            &[
                ("q0", &["b1", "b2", "-b1 + b2 + b3", "b3"]),
                ("q1", &["-b1", "-b1 + b3", "-b1 + b2", "-b1 + b2 + b3"]),
                ("q2", &["b1 - b2", "-b2", "-b1 + b3", "b3"]),
                ("q2'", &["b1 - b3", "-b3", "b2", "-b1 + b2"]),
                ("q3", &["b1 - b2 - b3", "b1 - b3", "b1 - b2", "b1"]),
                ("q4", &["b1 - b2 - b3", "-b2", "-b3", "-b1"]),
            ],
        )
        .unwrap();
        let matches = match_unimodular(&cand, q_graph().data()).unwrap();
        let want = UnimodularMatch {
            basis: vec![
                vec![big(0), big(1), big(0)],
                vec![big(0), big(1), big(1)],
                vec![big(1), big(1), big(0)],
            ],
            vertex_map: vec![0, 1, 2, 3, 4, 5],
        };
        assert!(matches.contains(&want), "missing {want:?} in {matches:?}");
    }

    #[test]
    fn blowup_point_tables() {
        let ring = Ring::new(&["x", "y"]);
        let parse = |s: &str| MultiPoly::parse(&ring, s).unwrap();
        let weights: Vec<MultiPoly> =
            ["x", "y", "x + y", "-x - y"].iter().map(|s| parse(s)).collect();
        let [first, second] = blowup_weights(&weights, (2, 3)).unwrap();
        let sorted = |v: &[MultiPoly]| {
            let mut s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
            s.sort();
            s
        };
        assert_eq!(
            sorted(&first),
            sorted(&["x", "y", "x + y", "-2*x - 2*y"].iter().map(|s| parse(s)).collect::<Vec<_>>())
        );
        assert_eq!(
            sorted(&second),
            sorted(&["x", "y", "-x - y", "2*x + 2*y"].iter().map(|s| parse(s)).collect::<Vec<_>>())
        );
        let equal: Vec<MultiPoly> = ["x", "y", "x + y", "x + y"].iter().map(|s| parse(s)).collect();
        assert!(blowup_weights(&equal, (2, 3)).is_err());
    }

    #[test]
    fn blowup_along_curve_and_merge_back() {
        // the bottom end of an invariant line in projective four-space
        let ring = Ring::new(&["s", "t"]);
        let parse = |s: &str| MultiPoly::parse(&ring, s).unwrap();
        let q1: Vec<MultiPoly> = ["-3*s", "-s + t", "-2*s + 2*t", "-3*s + 3*t"]
            .iter()
            .map(|w| parse(w))
            .collect();
        let tables = blowup_weights_curve(&q1, 1).unwrap();
        assert_eq!(tables.len(), 3);
        let sorted = |v: &[MultiPoly]| {
            let mut s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
            s.sort();
            s
        };
        let expect = [
            ["-s + t", "-3*s", "s + 2*t", "3*t"],
            ["-s + t", "-2*s + 2*t", "-s - 2*t", "-s + t"],
            ["-s + t", "-3*s + 3*t", "-3*t", "s - t"],
        ];
        for (table, want) in tables.iter().zip(expect) {
            let want: Vec<MultiPoly> = want.iter().map(|w| parse(w)).collect();
            assert_eq!(sorted(table), sorted(&want));
        }

        // merging the doubled table with its neighbor reproduces the
        // dependent-pair vertex of the multigraph reference
        let neighbor: Vec<MultiPoly> = ["-2*s - t", "s - t", "-s + t", "-2*s + 2*t"]
            .iter()
            .map(|w| parse(w))
            .collect();
        let merges = blowdown_merge(&tables[1], &neighbor);
        let p2p: Vec<MultiPoly> = ["-s - 2*t", "-2*s - t", "-s + t", "-2*s + 2*t"]
            .iter()
            .map(|w| parse(w))
            .collect();
        assert!(merges.iter().any(|m| sorted(m) == sorted(&p2p)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// recovering a unimodular change of coordinates from the weight tables
        #[test]
        fn prop_match_recovers_unimodular_change(ops in prop::collection::vec((0u8..4, -2i8..=2), 1..4)) {
            let mut u = [[1i64, 0], [0, 1]];
            for (op, k) in ops {
                let k = k as i64;
                match op {
                    0 => { u[1][0] += k * u[0][0]; u[1][1] += k * u[0][1]; }
                    1 => { u[0][0] += k * u[1][0]; u[0][1] += k * u[1][1]; }
                    2 => u.swap(0, 1),
                    _ => { u[0][0] = -u[0][0]; u[0][1] = -u[0][1]; }
                }
            }
            let reference = v_graph();
            let ring = reference.ring();
            let transformed: Vec<FixedPoint> = reference
                .data()
                .points()
                .iter()
                .map(|p| FixedPoint {
                    id: p.id.clone(),
                    weights: p
                        .weights
                        .iter()
                        .map(|w| {
                            let c = w.linear_coeffs().unwrap();
                            let mapped = [
                                &BigInt::from(u[0][0]) * &c[0] + &BigInt::from(u[0][1]) * &c[1],
                                &BigInt::from(u[1][0]) * &c[0] + &BigInt::from(u[1][1]) * &c[1],
                            ];
                            MultiPoly::linear(ring, &mapped)
                        })
                        .collect(),
                })
                .collect();
            let cand = FixedPointData::new(Arc::clone(ring), 2, transformed).unwrap();
            let matches = match_unimodular(&cand, reference.data()).unwrap();
            prop_assert!(matches.iter().any(|m| m.vertex_map == vec![0, 1, 2, 3, 4, 5]));
        }

        /// blown-up exceptional tables merge back to the original weights
        #[test]
        fn prop_blowup_merge_roundtrip(coeffs in prop::collection::vec((-3i64..=3, -3i64..=3), 4)) {
            let ring = Ring::new(&["x", "y"]);
            let weights: Vec<MultiPoly> = coeffs
                .iter()
                .map(|&(p, q)| MultiPoly::linear(&ring, &[BigInt::from(p), BigInt::from(q)]))
                .collect();
            prop_assume!(weights.iter().all(|w| !w.is_zero()));
            prop_assume!(weights[2] != weights[3]);
            let [first, second] = blowup_weights(&weights, (2, 3)).unwrap();
            let merges = blowdown_merge(&first, &second);
            let sorted = |v: &[MultiPoly]| {
                let mut s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
                s.sort();
                s
            };
            prop_assert!(merges.iter().any(|m| sorted(m) == sorted(&weights)));
        }
    }
}
