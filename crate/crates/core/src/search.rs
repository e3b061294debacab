//! The classification pipeline: from (dimension, Betti numbers, index) to
//! surviving isotropy-weight families.
//!
//! A run walks the candidate multigraphs for the degree profile, streams
//! the singular magnitude assignments for each, solves for the kernel of
//! `A(Γ) - diag(m)` to parameterize the edge weights, and keeps the
//! families that pass every enabled necessary condition: strict edge
//! positivity, effectiveness, parallel-edge coprimality, and the
//! localization identities. Everything is exact; families are reported
//! with their arithmetic side conditions instead of being expanded.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diophantine::ChernNumberSet;
use crate::graphs::{enumerate_multigraphs_acyclic, DegreeProfile, DirectedMultigraph};
use crate::localization::{
    abbv_integrate, equivariant_chern_restriction, partitions, ChernMonomialValues, FixedPoint,
    FixedPointData, LocalizationError,
};
use crate::magnitudes::{
    default_pinned_pairs, magnitude_assignments, pair_structure, MagnitudeAssignment,
    MagnitudeError,
};
use crate::matrix::{positive_point_in_row_span, row_hnf_canonical};
use crate::poly::{MultiPoly, Ring};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("the index must satisfy 1 <= k0 <= {max}, got {k0}")]
    IndexOutOfRange { k0: u64, max: usize },
    #[error("shard {got} out of range, the plan has {want} shards")]
    ShardOutOfRange { got: usize, want: usize },
    #[error("expected {want} parameters, got {got}")]
    ParameterCount { got: usize, want: usize },
    #[error("parameter point outside the positivity cone: w({edge}) = {value}")]
    ConeViolation { edge: usize, value: BigInt },
    #[error(transparent)]
    Magnitude(#[from] MagnitudeError),
    #[error(transparent)]
    Localization(#[from] LocalizationError),
}

/// `c1 c_{n-1}[M]` from the Betti numbers alone; every multigraph
/// describing the manifold has magnitudes summing to this.
pub fn c1cn1_total(profile: &DegreeProfile) -> i64 {
    let n = profile.n() as i64;
    let mut total = 0i64;
    for (i, &b) in profile.counts().iter().enumerate() {
        let i = i as i64;
        total += b as i64 * (6 * i * (i - 1) + n * (5 - 3 * n) / 2);
    }
    total
}

/// Inputs of one search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub profile: DegreeProfile,
    pub k0: u64,
    /// When set, survivors must have one of these Chern-number sets
    /// (half-dimension 4 only).
    pub admissible: Option<Vec<ChernNumberSet>>,
    /// Box bound for probing arithmetic side conditions at integer
    /// parameter points.
    pub probe_bound: i64,
    pub check_effectiveness: bool,
    pub check_triple_edges: bool,
    pub check_localization: bool,
}

impl SearchConfig {
    pub fn new(profile: DegreeProfile, k0: u64) -> Result<SearchConfig, SearchError> {
        let max = profile.n() + 1;
        if k0 == 0 || k0 as usize > max {
            return Err(SearchError::IndexOutOfRange { k0, max });
        }
        Ok(SearchConfig {
            profile,
            k0,
            admissible: None,
            probe_bound: 12,
            check_effectiveness: true,
            check_triple_edges: true,
            check_localization: true,
        })
    }

    /// The magnitude budget shared by every candidate multigraph.
    pub fn total(&self) -> i64 {
        c1cn1_total(&self.profile)
    }
}

/// A parameterized weight family on one labeled multigraph: the saturated
/// kernel of `A(Γ) - diag(m)`, expressed as linear forms in `b1..br`, with
/// a witness that the strict-positivity cone is nonempty.
#[derive(Debug, Clone)]
pub struct CandidateFamily {
    graph: DirectedMultigraph,
    magnitudes: MagnitudeAssignment,
    kernel: Vec<Vec<BigInt>>,
    ring: Arc<Ring>,
    edge_forms: Vec<MultiPoly>,
    positive_witness: Vec<BigInt>,
}

/// Builds the weight family of a singular magnitude assignment, or `None`
/// when the kernel is trivial or meets the open positive orthant nowhere.
/// The kernel basis is canonicalized so equal families print identically.
pub fn reconstruct_weight_family(
    graph: &DirectedMultigraph,
    magnitudes: &MagnitudeAssignment,
) -> Option<CandidateFamily> {
    let n_edges = graph.n_edges();
    let mut m = graph.edge_adjacency();
    for (e, &me) in magnitudes.m_per_edge.iter().enumerate() {
        let v = &m[(e, e)] - BigInt::from(me);
        m[(e, e)] = v;
    }
    let kd = m.kernel_data();
    if kd.kernel.is_empty() {
        return None;
    }
    let kernel = row_hnf_canonical(&kd.kernel);
    let positive_witness = positive_point_in_row_span(&kernel, n_edges)?;

    let r = kernel.len();
    let names: Vec<String> = (1..=r).map(|k| format!("b{k}")).collect();
    let ring = Ring::new(&names);
    let edge_forms: Vec<MultiPoly> = (0..n_edges)
        .map(|e| {
            let coeffs: Vec<BigInt> = kernel.iter().map(|row| row[e].clone()).collect();
            MultiPoly::linear(&ring, &coeffs)
        })
        .collect();
    Some(CandidateFamily {
        graph: graph.clone(),
        magnitudes: magnitudes.clone(),
        kernel,
        ring,
        edge_forms,
        positive_witness,
    })
}

impl CandidateFamily {
    pub fn graph(&self) -> &DirectedMultigraph {
        &self.graph
    }

    pub fn magnitudes(&self) -> &MagnitudeAssignment {
        &self.magnitudes
    }

    /// Saturated kernel basis in canonical form; row `k` holds the
    /// coefficients of `b{k+1}` across the edge order.
    pub fn kernel(&self) -> &[Vec<BigInt>] {
        &self.kernel
    }

    pub fn n_parameters(&self) -> usize {
        self.kernel.len()
    }

    /// Parameter ring of the family, variables `b1..br`.
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    /// The weight form `w(e)` of one edge.
    pub fn edge_form(&self, e: usize) -> &MultiPoly {
        &self.edge_forms[e]
    }

    /// A strictly positive integer weight vector in the kernel span,
    /// witnessing that the positivity cone is nonempty.
    pub fn positive_witness(&self) -> &[BigInt] {
        &self.positive_witness
    }

    /// Isotropy weights at one vertex: `-w(e)` for each incoming edge
    /// first, then `+w(e)` for each outgoing edge, in edge order. On the
    /// positivity cone a vertex of index λ gets exactly λ negative weights.
    pub fn vertex_weights(&self, v: usize) -> Vec<MultiPoly> {
        let mut out = Vec::new();
        for (e, &(_, h)) in self.graph.edges().iter().enumerate() {
            if h == v {
                out.push(self.edge_forms[e].neg());
            }
        }
        for (e, &(t, _)) in self.graph.edges().iter().enumerate() {
            if t == v {
                out.push(self.edge_forms[e].clone());
            }
        }
        out
    }

    /// The family as fixed point data of a rank-`r` torus over `b1..br`,
    /// suitable for the localization identities and for lattice matching
    /// against reference tables.
    pub fn fixed_point_data(&self) -> Result<FixedPointData, SearchError> {
        let points = (0..self.graph.n_vertices())
            .map(|v| FixedPoint {
                id: format!("p{v}"),
                weights: self.vertex_weights(v),
            })
            .collect();
        Ok(FixedPointData::new(
            self.ring.clone(),
            self.n_parameters(),
            points,
        )?)
    }

    /// Instantiates the family at an integer parameter point, producing
    /// concrete circle weights. The point must lie in the positivity cone.
    pub fn instantiate(&self, params: &[i64]) -> Result<FixedPointData, SearchError> {
        let values = self.edge_values(params)?;
        let ring = Ring::new(&["x"]);
        let x = MultiPoly::var(&ring, 0);
        let points = (0..self.graph.n_vertices())
            .map(|v| {
                let mut weights = Vec::new();
                for (e, &(_, h)) in self.graph.edges().iter().enumerate() {
                    if h == v {
                        weights.push(x.scale(&-&values[e]));
                    }
                }
                for (e, &(t, _)) in self.graph.edges().iter().enumerate() {
                    if t == v {
                        weights.push(x.scale(&values[e]));
                    }
                }
                FixedPoint {
                    id: format!("p{v}"),
                    weights,
                }
            })
            .collect();
        Ok(FixedPointData::new(ring, 1, points)?)
    }

    fn edge_values(&self, params: &[i64]) -> Result<Vec<BigInt>, SearchError> {
        if params.len() != self.n_parameters() {
            return Err(SearchError::ParameterCount {
                got: params.len(),
                want: self.n_parameters(),
            });
        }
        let mut values = Vec::with_capacity(self.edge_forms.len());
        for e in 0..self.edge_forms.len() {
            let mut v = BigInt::zero();
            for (row, &p) in self.kernel.iter().zip(params) {
                v += &row[e] * BigInt::from(p);
            }
            if !v.is_positive() {
                return Err(SearchError::ConeViolation { edge: e, value: v });
            }
            values.push(v);
        }
        Ok(values)
    }

    /// A deterministic identity for deduplication and sorting: the graph's
    /// canonical edge list, the magnitudes, and the canonical kernel.
    pub fn canonical_key(&self) -> String {
        let edges: Vec<String> = self
            .graph
            .edges()
            .iter()
            .map(|(t, h)| format!("{t}-{h}"))
            .collect();
        let m: Vec<String> = self.magnitudes.m_per_edge.iter().map(u64::to_string).collect();
        let rows: Vec<String> = self
            .kernel
            .iter()
            .map(|row| {
                row.iter()
                    .map(BigInt::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        format!("g[{}] m[{}] k[{}]", edges.join(" "), m.join(" "), rows.join("; "))
    }
}

/// One filter's verdict, with a witness: a satisfying parameter point for
/// probed conditions, or the violated identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Results of all enabled necessary conditions on one family. The family
/// survives when every enabled filter passed.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub filters: Vec<FilterOutcome>,
    /// Number of integer parameter points in the probe box satisfying the
    /// positivity cone and every arithmetic side condition at once.
    pub satisfying_points: u64,
    /// A sample of those points, capped for readability.
    pub sample_points: Vec<Vec<i64>>,
    /// Human-readable arithmetic side conditions attached to the family.
    pub side_conditions: Vec<String>,
    /// Top Chern monomials when the localization filter ran, keyed by
    /// partition, values as decimal strings.
    pub chern_numbers: Option<Vec<(Vec<usize>, String)>>,
}

impl FilterReport {
    pub fn survived(&self) -> bool {
        self.filters.iter().all(|f| f.passed)
    }

    fn push(&mut self, name: &str, passed: bool, witness: Option<String>) {
        self.filters.push(FilterOutcome {
            name: name.to_string(),
            passed,
            witness,
        });
    }

    /// The first failed filter, if any.
    pub fn first_failure(&self) -> Option<&str> {
        self.filters
            .iter()
            .find(|f| !f.passed)
            .map(|f| f.name.as_str())
    }
}

const SAMPLE_POINT_CAP: usize = 16;
const PROBE_ITERATION_CAP: u64 = 4_000_000;

/// Evaluates the necessary conditions on a family: the sign pattern by
/// Morse index, the edge-sum identity behind multigraph positivity, the
/// probed effectiveness and parallel-edge coprimality conditions, the
/// localization identities, and Chern-number admissibility when the
/// configuration carries a table.
pub fn apply_necessary_filters(family: &CandidateFamily, cfg: &SearchConfig) -> FilterReport {
    let mut report = FilterReport::default();
    let graph = family.graph();
    let n = graph.profile().n();

    // (ii) at an index-λ vertex, exactly λ weights are negative on the
    // whole cone: the incoming edges. Zero forms can never be positive.
    let mut sign_witness = None;
    for v in 0..graph.n_vertices() {
        let incoming = graph.edges().iter().filter(|&&(_, h)| h == v).count();
        if incoming != graph.morse_index(v) {
            sign_witness = Some(format!("vertex {v} has {incoming} incoming edges"));
        }
    }
    for (e, form) in family.edge_forms.iter().enumerate() {
        if form.is_zero() {
            sign_witness = Some(format!("w({e}) vanishes identically"));
        }
    }
    report.push("sign-pattern", sign_witness.is_none(), sign_witness);

    // (iv) positivity: m(e) w(e) = Σ(tail) - Σ(head) identically, so the
    // weight sum strictly drops along every edge of the cone.
    let sums: Vec<MultiPoly> = (0..graph.n_vertices())
        .map(|v| {
            family
                .vertex_weights(v)
                .iter()
                .fold(MultiPoly::zero(&family.ring), |acc, w| acc.add(w))
        })
        .collect();
    let mut positivity_witness = None;
    for (e, &(t, h)) in graph.edges().iter().enumerate() {
        let me = BigInt::from(family.magnitudes.m_per_edge[e]);
        let lhs = family.edge_forms[e].scale(&me);
        if sums[t].sub(&sums[h]) != lhs {
            positivity_witness = Some(format!("edge {e} violates the edge-sum identity"));
        }
    }
    report.push("positivity", positivity_witness.is_none(), positivity_witness);

    probe_side_conditions(family, cfg, &mut report);

    if cfg.check_localization {
        match localization_filter(family, n) {
            Ok(values) => {
                report.push("localization", true, None);
                let admissible = match (&cfg.admissible, values.dim8()) {
                    (Some(table), Some(set)) => Some(table.iter().any(|c| *c == set)),
                    (Some(_), None) => Some(false),
                    (None, _) => None,
                };
                report.chern_numbers = Some(
                    values
                        .values
                        .iter()
                        .map(|(k, v)| (k.clone(), v.to_string()))
                        .collect(),
                );
                if let Some(ok) = admissible {
                    let witness = (!ok).then(|| "Chern numbers outside the admissible table".to_string());
                    report.push("chern-admissible", ok, witness);
                }
            }
            Err(witness) => report.push("localization", false, Some(witness)),
        }
    }

    report
}

/// Walks the integer points of the probe box inside the positivity cone
/// and tests the arithmetic side conditions at each: weights coprime at
/// every vertex, and coprime across any bundle of three or more parallel
/// edges. Fills the probed filters and the satisfying-point statistics.
fn probe_side_conditions(family: &CandidateFamily, cfg: &SearchConfig, report: &mut FilterReport) {
    if !cfg.check_effectiveness && !cfg.check_triple_edges {
        return;
    }
    let graph = family.graph();
    let r = family.n_parameters();
    let n_edges = graph.n_edges();

    let triples: Vec<Vec<usize>> = pair_structure(graph)
        .into_iter()
        .filter(|p| p.edge_ids.len() >= 3)
        .map(|p| p.edge_ids)
        .collect();

    if cfg.check_effectiveness {
        for v in 0..graph.n_vertices() {
            let forms: Vec<String> = family
                .vertex_weights(v)
                .iter()
                .map(|w| w.to_string())
                .collect();
            report
                .side_conditions
                .push(format!("gcd({}) = 1", forms.join(", ")));
        }
    }
    if cfg.check_triple_edges {
        for ids in &triples {
            let forms: Vec<String> = ids
                .iter()
                .map(|&e| family.edge_forms[e].to_string())
                .collect();
            report
                .side_conditions
                .push(format!("gcd({}) = 1 (parallel edges)", forms.join(", ")));
        }
    }

    // coefficient matrix in machine integers; kernel entries are tiny
    let coeffs: Vec<Vec<i128>> = family
        .kernel
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| i128::try_from(c).expect("kernel coefficient fits in 128 bits"))
                .collect()
        })
        .collect();

    let mut bound = cfg.probe_bound.max(1);
    while bound > 1 && ((2 * bound as u64 + 1).pow(r as u32)) > PROBE_ITERATION_CAP {
        bound -= 1;
    }

    let mut point = vec![-bound; r];
    let mut effective_witness: Option<Vec<i64>> = None;
    let mut triple_witness: Option<Vec<i64>> = None;
    let mut in_cone = 0u64;
    loop {
        let mut values = Vec::with_capacity(n_edges);
        let mut positive = true;
        for e in 0..n_edges {
            let mut v = 0i128;
            for (k, row) in coeffs.iter().enumerate() {
                v += row[e] * point[k] as i128;
            }
            if v <= 0 {
                positive = false;
                break;
            }
            values.push(v);
        }
        if positive {
            in_cone += 1;
            let effective = !cfg.check_effectiveness
                || (0..graph.n_vertices()).all(|v| {
                    let mut g = 0i128;
                    for (e, &(t, h)) in graph.edges().iter().enumerate() {
                        if t == v || h == v {
                            g = g.gcd(&values[e]);
                        }
                    }
                    g == 1
                });
            let triple_ok = !cfg.check_triple_edges
                || triples.iter().all(|ids| {
                    let mut g = 0i128;
                    for &e in ids {
                        g = g.gcd(&values[e]);
                    }
                    g == 1
                });
            if effective && cfg.check_effectiveness && effective_witness.is_none() {
                effective_witness = Some(point.clone());
            }
            if triple_ok && cfg.check_triple_edges && triple_witness.is_none() {
                triple_witness = Some(point.clone());
            }
            if effective && triple_ok {
                report.satisfying_points += 1;
                if report.sample_points.len() < SAMPLE_POINT_CAP {
                    report.sample_points.push(point.clone());
                }
            }
        }

        // advance the odometer
        let mut k = 0;
        loop {
            if k == r {
                if cfg.check_effectiveness {
                    let witness = effective_witness
                        .as_ref()
                        .map(|p| format!("parameters {p:?}"))
                        .or_else(|| Some(format!("no point in the box |b| <= {bound} ({in_cone} cone points)")));
                    report.push("effectiveness", effective_witness.is_some(), witness);
                }
                if cfg.check_triple_edges {
                    if triples.is_empty() {
                        report.push("triple-edges", true, None);
                    } else {
                        let witness = triple_witness
                            .as_ref()
                            .map(|p| format!("parameters {p:?}"))
                            .or_else(|| Some(format!("no point in the box |b| <= {bound}")));
                        report.push("triple-edges", triple_witness.is_some(), witness);
                    }
                }
                return;
            }
            if point[k] < bound {
                point[k] += 1;
                break;
            }
            point[k] = -bound;
            k += 1;
        }
    }
}

/// Runs the localization identities symbolically on the family's rank-`r`
/// data: the localized integrals of `Σ(p)^k` vanish for `k < n`, and all
/// top Chern monomials reduce to constant integers. Returns the monomial
/// values, or a description of the violated identity.
fn localization_filter(
    family: &CandidateFamily,
    n: usize,
) -> Result<ChernMonomialValues, String> {
    let data = family.fixed_point_data().map_err(|e| e.to_string())?;
    let sums: Vec<MultiPoly> = (0..data.n_points()).map(|i| data.weight_sum(i)).collect();
    for k in 0..n {
        let classes: Vec<MultiPoly> = sums.iter().map(|s| s.pow(k as u32)).collect();
        let value = abbv_integrate(&data, &classes).map_err(|e| e.to_string())?;
        if !value.is_zero() {
            return Err(format!("integral of Σ^{k} is {value}, expected 0"));
        }
    }
    let mut values = BTreeMap::new();
    for partition in partitions(n) {
        let classes: Vec<MultiPoly> = data
            .points()
            .iter()
            .map(|p| {
                partition.iter().fold(MultiPoly::constant(data.ring(), 1), |acc, &j| {
                    acc.mul(&equivariant_chern_restriction(&p.weights, j))
                })
            })
            .collect();
        let value = abbv_integrate(&data, &classes).map_err(|e| e.to_string())?;
        match value.as_integer() {
            Some(v) => {
                values.insert(partition, v);
            }
            None => {
                return Err(format!(
                    "Chern monomial {partition:?} evaluates to {value}, expected an integer"
                ))
            }
        }
    }
    Ok(ChernMonomialValues { n, values })
}

/// A surviving family together with its serializable record.
#[derive(Debug, Clone)]
pub struct SearchSurvivor {
    pub family: CandidateFamily,
    pub record: SurvivorRecord,
}

/// Weights of one fixed point in a survivor record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexWeights {
    pub id: String,
    pub index: usize,
    pub weights: Vec<String>,
}

/// JSON form of one surviving family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivorRecord {
    pub graph_edges: Vec<(usize, usize)>,
    pub vertex_indices: Vec<usize>,
    pub magnitudes: Vec<u64>,
    pub kernel_basis: Vec<Vec<String>>,
    pub edge_weights: Vec<String>,
    pub weight_table: Vec<VertexWeights>,
    pub filter_report: FilterReport,
    pub canonical_key: String,
}

impl SearchSurvivor {
    fn new(family: CandidateFamily, report: FilterReport) -> SearchSurvivor {
        let graph = family.graph();
        let record = SurvivorRecord {
            graph_edges: graph.edges().to_vec(),
            vertex_indices: (0..graph.n_vertices()).map(|v| graph.morse_index(v)).collect(),
            magnitudes: family.magnitudes().m_per_edge.clone(),
            kernel_basis: family
                .kernel()
                .iter()
                .map(|row| row.iter().map(BigInt::to_string).collect())
                .collect(),
            edge_weights: (0..graph.n_edges())
                .map(|e| family.edge_form(e).to_string())
                .collect(),
            weight_table: (0..graph.n_vertices())
                .map(|v| VertexWeights {
                    id: format!("p{v}"),
                    index: graph.morse_index(v),
                    weights: family
                        .vertex_weights(v)
                        .iter()
                        .map(|w| w.to_string())
                        .collect(),
                })
                .collect(),
            filter_report: report,
            canonical_key: family.canonical_key(),
        };
        SearchSurvivor { family, record }
    }
}

/// Counters describing one run or one shard.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SearchLog {
    pub graphs: usize,
    pub budget_infeasible: u64,
    pub pin_infeasible: u64,
    pub assignments: u64,
    pub empty_cone: u64,
    /// First failed filter name -> number of families rejected by it.
    pub rejections: BTreeMap<String, u64>,
    pub survivors: usize,
}

impl SearchLog {
    pub fn absorb(&mut self, other: &SearchLog) {
        self.graphs += other.graphs;
        self.budget_infeasible += other.budget_infeasible;
        self.pin_infeasible += other.pin_infeasible;
        self.assignments += other.assignments;
        self.empty_cone += other.empty_cone;
        for (k, v) in &other.rejections {
            *self.rejections.entry(k.clone()).or_default() += v;
        }
        self.survivors += other.survivors;
    }
}

/// One unit of work: a single candidate multigraph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchShard {
    pub index: usize,
    pub graph_key: String,
}

/// Outcome of a full run: the canonical survivor set and the merged log.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub survivors: Vec<SearchSurvivor>,
    pub log: SearchLog,
}

/// The candidate multigraphs of a run, in enumeration order; shard `i` of
/// the plan processes graph `i`.
pub fn candidate_graphs(cfg: &SearchConfig) -> Vec<DirectedMultigraph> {
    // weight sums strictly decrease along edges on the positivity cone, so
    // cyclic shapes can never carry a family and are skipped at the source
    enumerate_multigraphs_acyclic(&cfg.profile)
}

/// The deterministic shard plan of a run: one shard per candidate graph.
pub fn plan_shards(cfg: &SearchConfig) -> Vec<SearchShard> {
    candidate_graphs(cfg)
        .iter()
        .enumerate()
        .map(|(index, g)| SearchShard {
            index,
            graph_key: format!("{:?}", g.edges()),
        })
        .collect()
}

/// Processes one shard of the plan.
pub fn run_shard(cfg: &SearchConfig, shard: usize) -> Result<SearchOutcome, SearchError> {
    let graphs = candidate_graphs(cfg);
    if shard >= graphs.len() {
        return Err(SearchError::ShardOutOfRange {
            got: shard,
            want: graphs.len(),
        });
    }
    run_on_graph(cfg, &graphs[shard])
}

/// Processes a single candidate multigraph. Callers holding the graph
/// list avoid the re-enumeration `run_shard` performs on every call.
pub fn run_on_graph(
    cfg: &SearchConfig,
    graph: &DirectedMultigraph,
) -> Result<SearchOutcome, SearchError> {
    let mut log = SearchLog {
        graphs: 1,
        ..SearchLog::default()
    };
    let mut survivors = Vec::new();
    run_graph(cfg, graph, &mut survivors, &mut log)?;
    log.survivors = survivors.len();
    Ok(SearchOutcome { survivors, log })
}

/// The end-to-end pipeline. Deterministic: the survivor set is sorted by
/// canonical key and deduplicated, so shard order never matters.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let graphs = candidate_graphs(cfg);
    let mut log = SearchLog {
        graphs: graphs.len(),
        ..SearchLog::default()
    };
    let mut survivors = Vec::new();
    for g in &graphs {
        run_graph(cfg, g, &mut survivors, &mut log)?;
    }
    finalize(&mut survivors);
    log.survivors = survivors.len();
    Ok(SearchOutcome { survivors, log })
}

/// Merges shard outcomes (for resumed or distributed runs) into the same
/// canonical result `run_search` produces.
pub fn merge_outcomes(outcomes: Vec<SearchOutcome>) -> SearchOutcome {
    let mut log = SearchLog::default();
    let mut survivors = Vec::new();
    for o in outcomes {
        log.absorb(&o.log);
        survivors.extend(o.survivors);
    }
    finalize(&mut survivors);
    log.survivors = survivors.len();
    SearchOutcome { survivors, log }
}

fn finalize(survivors: &mut Vec<SearchSurvivor>) {
    survivors.sort_by(|a, b| a.record.canonical_key.cmp(&b.record.canonical_key));
    survivors.dedup_by(|a, b| a.record.canonical_key == b.record.canonical_key);
}

fn run_graph(
    cfg: &SearchConfig,
    graph: &DirectedMultigraph,
    survivors: &mut Vec<SearchSurvivor>,
    log: &mut SearchLog,
) -> Result<(), SearchError> {
    let total = cfg.total();
    if total <= 0 {
        log.budget_infeasible += 1;
        return Ok(());
    }
    let pins = default_pinned_pairs(graph);
    let mut assignments = Vec::new();
    match magnitude_assignments(graph, cfg.k0, total as u64, &pins, |a| assignments.push(a)) {
        Ok(_) => {}
        Err(
            MagnitudeError::BudgetNotDivisible { .. } | MagnitudeError::BudgetTooSmall { .. },
        ) => {
            log.budget_infeasible += 1;
            return Ok(());
        }
        Err(
            MagnitudeError::PinnedPairMissing { .. } | MagnitudeError::PinnedPairMultiple { .. },
        ) => {
            // the extremal edges provably exist and are simple, so a graph
            // without them describes nothing
            log.pin_infeasible += 1;
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    }
    log.assignments += assignments.len() as u64;
    for m in &assignments {
        let Some(family) = reconstruct_weight_family(graph, m) else {
            log.empty_cone += 1;
            continue;
        };
        let report = apply_necessary_filters(&family, cfg);
        if report.survived() {
            survivors.push(SearchSurvivor::new(family, report));
        } else if let Some(name) = report.first_failure() {
            *log.rejections.entry(name.to_string()).or_default() += 1;
        }
    }
    Ok(())
}
