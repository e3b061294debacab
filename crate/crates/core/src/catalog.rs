//! Built-in reference actions and their published invariants.
//!
//! Each entry lives under `data/` as a versioned JSON document holding the
//! weight table of a torus action together with every value the engine is
//! expected to reproduce from it: Chern numbers, the canonical class table,
//! products in the canonical basis, and the equivariant Chern expansions.
//! [`CatalogEntry::verify`] recomputes all of that from the weights alone
//! and stops at the first violated invariant, naming it.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gkm::{CanonicalClasses, GkmGraph};
use crate::localization::{
    abbv_consistency_check, chern_numbers_from_weights, FixedPoint, FixedPointData,
};
use crate::poly::{MultiPoly, Ring};

/// Version of the on-disk entry layout. Bump when a field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

static ENTRIES: &[(&str, &str)] = &[
    ("v", include_str!("../data/v.json")),
    ("w", include_str!("../data/w.json")),
    ("q", include_str!("../data/q.json")),
    ("omega", include_str!("../data/omega.json")),
    ("cp2xcp2", include_str!("../data/cp2xcp2.json")),
    ("cp4", include_str!("../data/cp4.json")),
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("no catalog entry named `{0}`")]
    UnknownEntry(String),
    #[error("malformed catalog data: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("{name}: invariant `{check}` violated: {detail}")]
    Check {
        name: String,
        check: &'static str,
        detail: String,
    },
}

/// One fixed point of a stored action: its label, isotropy weights, and
/// (when the source lists one) the restriction of the equivariant first
/// Chern class, which must equal the weight sum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogPoint {
    pub id: String,
    pub weights: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1t: Option<String>,
}

/// A Chern monomial pinned to its integral. The partition `[2, 1, 1]`
/// stands for `c2 c1 c1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChernValue {
    pub partition: Vec<usize>,
    pub value: i64,
}

/// Expected expansion of a product of two canonical classes in the
/// canonical basis. Factor indices follow the listed point order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductRelation {
    pub factors: [usize; 2],
    pub coefficients: Vec<String>,
}

/// Expected outcome of the constrained-class solver on entries whose
/// graph is not GKM at some fixed point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstrainedMeta {
    pub multipliers: [i64; 2],
    pub isotropy_integral: i64,
    pub special: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub schema_version: u32,
    pub name: String,
    pub title: String,
    pub variables: Vec<String>,
    pub xi: Vec<i64>,
    /// Divisibility of the first Chern class; equals the gcd of the
    /// magnitudes of all edges of the moment graph.
    pub k0: i64,
    pub points: Vec<CatalogPoint>,
    #[serde(default)]
    pub chern_numbers: Vec<ChernValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_classes: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constrained: Option<ConstrainedMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub products: Option<Vec<ProductRelation>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chern_in_basis: Option<Vec<Vec<String>>>,
}

/// Everything `verify` recomputed for an entry, in serializable form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub points: usize,
    /// Complex dimension of the underlying manifold.
    pub dimension: usize,
    pub rank: usize,
    pub full_gkm: bool,
    pub k0: i64,
    /// All top Chern monomials evaluated from the weights.
    pub chern_numbers: Vec<(Vec<usize>, String)>,
    /// Names of the invariants that held, in the order they were checked.
    pub checks: Vec<String>,
}

/// Names of the built-in entries, in catalog order.
pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

/// Loads a built-in entry by name.
pub fn load(name: &str) -> Result<CatalogEntry, CatalogError> {
    let raw = ENTRIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, raw)| *raw)
        .ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))?;
    parse(raw)
}

/// Parses an entry from JSON text, e.g. an external copy of a data file.
pub fn parse(raw: &str) -> Result<CatalogEntry, CatalogError> {
    Ok(serde_json::from_str(raw)?)
}

/// Loads every built-in entry.
pub fn load_all() -> Result<Vec<CatalogEntry>, CatalogError> {
    names().into_iter().map(load).collect()
}

impl CatalogEntry {
    pub fn ring(&self) -> Arc<Ring> {
        Ring::new(&self.variables)
    }

    fn fail(&self, check: &'static str, detail: impl ToString) -> CatalogError {
        CatalogError::Check {
            name: self.name.clone(),
            check,
            detail: detail.to_string(),
        }
    }

    fn parse_poly(
        &self,
        ring: &Arc<Ring>,
        input: &str,
        check: &'static str,
    ) -> Result<MultiPoly, CatalogError> {
        MultiPoly::parse(ring, input).map_err(|e| self.fail(check, e))
    }

    /// The weight table as fixed point data over a fresh ring.
    pub fn fixed_point_data(&self) -> Result<FixedPointData, CatalogError> {
        let ring = self.ring();
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let mut weights = Vec::with_capacity(p.weights.len());
            for w in &p.weights {
                weights.push(self.parse_poly(&ring, w, "weights")?);
            }
            points.push(FixedPoint {
                id: p.id.clone(),
                weights,
            });
        }
        FixedPointData::new(ring, self.variables.len(), points)
            .map_err(|e| self.fail("weights", e))
    }

    /// The moment graph of the entry, using its stored generic direction.
    pub fn graph(&self) -> Result<GkmGraph, CatalogError> {
        let data = self.fixed_point_data()?;
        GkmGraph::new(data, self.xi.clone()).map_err(|e| self.fail("graph", e))
    }

    /// Computes the canonical class table by whichever route the entry
    /// needs: the direct construction, or the constrained solver when the
    /// graph fails to be GKM at a fixed point.
    pub fn classes(&self, graph: &GkmGraph) -> Result<CanonicalClasses, CatalogError> {
        if self.constrained.is_some() {
            let sol = graph
                .solve_constrained_classes()
                .map_err(|e| self.fail("canonical-classes", e))?;
            Ok(sol.classes)
        } else {
            graph
                .canonical_classes()
                .map_err(|e| self.fail("canonical-classes", e))
        }
    }

    /// Recomputes every stored invariant from the weight table and stops at
    /// the first violation. On success the report lists what was checked.
    pub fn verify(&self) -> Result<VerificationReport, CatalogError> {
        let mut checks = Vec::new();

        if self.schema_version != SCHEMA_VERSION {
            return Err(self.fail(
                "schema",
                format!(
                    "entry has schema version {}, engine expects {}",
                    self.schema_version, SCHEMA_VERSION
                ),
            ));
        }
        checks.push("schema".to_string());

        let data = self.fixed_point_data()?;
        checks.push("weights".to_string());

        if !data.weights_paired() {
            return Err(self.fail("pairing", "some weight has no matching negative"));
        }
        checks.push("pairing".to_string());

        let ring = data.ring().clone();
        for (i, p) in self.points.iter().enumerate() {
            if let Some(c1t) = &p.c1t {
                let stored = self.parse_poly(&ring, c1t, "c1t")?;
                if data.weight_sum(i) != stored {
                    return Err(self.fail(
                        "c1t",
                        format!("weight sum at {} differs from the stored class", p.id),
                    ));
                }
            }
        }
        checks.push("c1t".to_string());

        let graph = self.graph()?;
        checks.push("graph".to_string());

        let mut magnitudes = BigInt::from(0);
        for e in graph.edges() {
            let m = graph.edge_magnitude(e).map_err(|err| self.fail("k0", err))?;
            magnitudes = magnitudes.gcd(&m);
        }
        if magnitudes != BigInt::from(self.k0) {
            return Err(self.fail(
                "k0",
                format!("edge magnitudes have gcd {magnitudes}, entry states {}", self.k0),
            ));
        }
        checks.push("k0".to_string());

        let report = abbv_consistency_check(&data).map_err(|e| self.fail("localization", e))?;
        if !report.ok() {
            let detail = if !report.pairing_ok {
                "weight pairing fails".to_string()
            } else if let Some((k, _)) = report.vanishing.iter().find(|&&(_, ok)| !ok) {
                format!("localized integral of degree {k} does not vanish")
            } else {
                "a top Chern monomial is not an integer".to_string()
            };
            return Err(self.fail("localization", detail));
        }
        checks.push("localization".to_string());

        let computed = chern_numbers_from_weights(&data).map_err(|e| self.fail("chern-numbers", e))?;
        for pin in &self.chern_numbers {
            match computed.values.get(&pin.partition) {
                Some(v) if *v == BigInt::from(pin.value) => {}
                Some(v) => {
                    return Err(self.fail(
                        "chern-numbers",
                        format!(
                            "monomial {:?} evaluates to {v}, entry states {}",
                            pin.partition, pin.value
                        ),
                    ))
                }
                None => {
                    return Err(self.fail(
                        "chern-numbers",
                        format!("monomial {:?} is not a top-degree product", pin.partition),
                    ))
                }
            }
        }
        checks.push("chern-numbers".to_string());

        let classes = match &self.canonical_classes {
            Some(stored_rows) => {
                let classes = self.check_canonical(&graph, stored_rows)?;
                checks.push("canonical-classes".to_string());
                Some(classes)
            }
            None => None,
        };

        if let (Some(classes), Some(stored)) = (&classes, &self.products) {
            self.check_products(&graph, classes, stored)?;
            checks.push("products".to_string());
        }

        if let (Some(classes), Some(stored)) = (&classes, &self.chern_in_basis) {
            self.check_chern_expansions(&graph, classes, stored)?;
            checks.push("chern-expansions".to_string());
        }

        Ok(VerificationReport {
            name: self.name.clone(),
            points: data.n_points(),
            dimension: data.n(),
            rank: data.rank(),
            full_gkm: graph.is_full_gkm(),
            k0: self.k0,
            chern_numbers: computed
                .values
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            checks,
        })
    }

    fn check_canonical(
        &self,
        graph: &GkmGraph,
        stored_rows: &[Vec<String>],
    ) -> Result<CanonicalClasses, CatalogError> {
        let ring = graph.ring().clone();
        let classes = self.classes(graph)?;
        if let (Some(meta), Ok(sol)) = (&self.constrained, graph.solve_constrained_classes()) {
            let expected = (
                BigInt::from(meta.multipliers[0]),
                BigInt::from(meta.multipliers[1]),
            );
            if sol.multipliers != expected {
                return Err(self.fail(
                    "canonical-classes",
                    format!("solver multipliers {:?} differ from the stored pair", sol.multipliers),
                ));
            }
            if sol.isotropy_integral != BigInt::from(meta.isotropy_integral) {
                return Err(self.fail(
                    "canonical-classes",
                    format!("isotropy integral {} differs", sol.isotropy_integral),
                ));
            }
            if graph.point_id(sol.special) != meta.special {
                return Err(self.fail(
                    "canonical-classes",
                    format!("special point is {}", graph.point_id(sol.special)),
                ));
            }
        }
        classes
            .verify(graph)
            .map_err(|e| self.fail("canonical-classes", e))?;
        if stored_rows.len() != self.points.len() {
            return Err(self.fail("canonical-classes", "stored table has the wrong shape"));
        }
        for (p, row) in stored_rows.iter().enumerate() {
            if row.len() != self.points.len() {
                return Err(self.fail("canonical-classes", "stored table has the wrong shape"));
            }
            for (q, entry) in row.iter().enumerate() {
                let stored = self.parse_poly(&ring, entry, "canonical-classes")?;
                if *classes.get(p, q) != stored {
                    return Err(self.fail(
                        "canonical-classes",
                        format!(
                            "class of {} restricted to {} differs from the stored value",
                            graph.point_id(p),
                            graph.point_id(q)
                        ),
                    ));
                }
            }
        }
        Ok(classes)
    }

    fn check_products(
        &self,
        graph: &GkmGraph,
        classes: &CanonicalClasses,
        stored: &[ProductRelation],
    ) -> Result<(), CatalogError> {
        let ring = graph.ring().clone();
        let sc = graph
            .structure_constants(classes)
            .map_err(|e| self.fail("products", e))?;
        for rel in stored {
            let [i, j] = rel.factors;
            if i >= self.points.len() || j >= self.points.len() {
                return Err(self.fail("products", "factor index out of range"));
            }
            if rel.coefficients.len() != self.points.len() {
                return Err(self.fail("products", "coefficient row has the wrong length"));
            }
            for (s, coeff) in rel.coefficients.iter().enumerate() {
                let stored_coeff = self.parse_poly(&ring, coeff, "products")?;
                if sc.coeffs[i][j][s] != stored_coeff {
                    return Err(self.fail(
                        "products",
                        format!("coefficient of product ({i},{j}) on class {s} differs"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_chern_expansions(
        &self,
        graph: &GkmGraph,
        classes: &CanonicalClasses,
        stored: &[Vec<String>],
    ) -> Result<(), CatalogError> {
        let ring = graph.ring().clone();
        let expansions = graph
            .chern_class_expansions(classes)
            .map_err(|e| self.fail("chern-expansions", e))?;
        if stored.len() != expansions.len() {
            return Err(self.fail("chern-expansions", "stored table has the wrong shape"));
        }
        for (deg, row) in stored.iter().enumerate() {
            if row.len() != self.points.len() {
                return Err(self.fail("chern-expansions", "stored row has the wrong length"));
            }
            for (s, coeff) in row.iter().enumerate() {
                let stored_coeff = self.parse_poly(&ring, coeff, "chern-expansions")?;
                if expansions[deg][s] != stored_coeff {
                    return Err(self.fail(
                        "chern-expansions",
                        format!("coefficient of c{} on class {s} differs", deg + 1),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lists_six_entries() {
        assert_eq!(names(), vec!["v", "w", "q", "omega", "cp2xcp2", "cp4"]);
        for name in names() {
            let entry = load(name).unwrap();
            assert_eq!(entry.name, name);
            assert_eq!(entry.schema_version, SCHEMA_VERSION);
            assert!(!entry.points.is_empty());
        }
        assert!(matches!(load("nope"), Err(CatalogError::UnknownEntry(_))));
    }

    #[test]
    fn every_entry_verifies() {
        for name in names() {
            let entry = load(name).unwrap();
            let report = entry.verify().unwrap_or_else(|e| panic!("{e}"));
            assert!(report.checks.contains(&"localization".to_string()), "{name}");
            assert!(report.checks.contains(&"chern-numbers".to_string()), "{name}");
        }
    }

    #[test]
    fn golden_entries_check_their_tables() {
        for name in ["v", "w", "q"] {
            let report = load(name).unwrap().verify().unwrap();
            for check in ["canonical-classes", "products", "chern-expansions"] {
                assert!(report.checks.contains(&check.to_string()), "{name}: {check}");
            }
        }
        let omega = load("omega").unwrap().verify().unwrap();
        assert!(!omega.checks.contains(&"canonical-classes".to_string()));
    }

    #[test]
    fn entry_graphs_have_expected_shape() {
        let cases = [
            ("v", 6, 12, true),
            ("w", 6, 12, false),
            ("q", 6, 12, true),
            ("omega", 6, 15, true),
            ("cp2xcp2", 9, 18, true),
            ("cp4", 5, 10, false),
        ];
        for (name, points, edges, full) in cases {
            let g = load(name).unwrap().graph().unwrap();
            assert_eq!(g.n_points(), points, "{name}");
            assert_eq!(g.edges().len(), edges, "{name}");
            assert_eq!(g.is_full_gkm(), full, "{name}");
        }
    }

    #[test]
    fn k0_matches_the_closed_form_on_golden_entries() {
        for name in ["v", "w", "q"] {
            let entry = load(name).unwrap();
            let g = entry.graph().unwrap();
            let (_, k0) = g.degree2_class_closed_form().unwrap();
            assert_eq!(k0, BigInt::from(entry.k0), "{name}");
        }
    }

    #[test]
    fn corrupted_entries_name_the_violated_invariant() {
        let mut entry = load("v").unwrap();
        entry.points[0].weights[1] = "2*y".to_string();
        match entry.verify() {
            Err(CatalogError::Check { check, .. }) => assert_eq!(check, "pairing"),
            other => panic!("expected a pairing failure, got {other:?}"),
        }

        let mut entry = load("v").unwrap();
        entry.chern_numbers[0].value = 289;
        match entry.verify() {
            Err(CatalogError::Check { check, .. }) => assert_eq!(check, "chern-numbers"),
            other => panic!("expected a chern-number failure, got {other:?}"),
        }

        let mut entry = load("q").unwrap();
        entry.k0 = 3;
        match entry.verify() {
            Err(CatalogError::Check { check, .. }) => assert_eq!(check, "k0"),
            other => panic!("expected a k0 failure, got {other:?}"),
        }

        let mut entry = load("w").unwrap();
        entry.constrained.as_mut().unwrap().isotropy_integral = 1;
        match entry.verify() {
            Err(CatalogError::Check { check, .. }) => assert_eq!(check, "canonical-classes"),
            other => panic!("expected a canonical-class failure, got {other:?}"),
        }

        let mut entry = load("v").unwrap();
        entry.schema_version = 99;
        assert!(matches!(
            entry.verify(),
            Err(CatalogError::Check { check: "schema", .. })
        ));
    }

    #[test]
    fn reports_serialize_to_json() {
        let report = load("v").unwrap().verify().unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"k0\":2"));
        assert!(text.contains("\"full_gkm\":true"));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks, report.checks);
    }
}
