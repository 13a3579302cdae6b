//! IS graphs: firms connected by symmetric, positive cost-reduction weights.
//!
//! An [`ISGraph`] can only be obtained through validation, so every value of
//! the type is loop-free, symmetric, has no isolated firm and forms a single
//! connected component. Hop distances and closeness centralities are derived
//! from the edge structure only; weights never act as lengths.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::ratio::{self, Rational};

/// One raw edge entry, before validation. Firms are referenced by id.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge {
    pub a: String,
    pub b: String,
    pub weight: Rational,
}

impl RawEdge {
    pub fn new(a: impl Into<String>, b: impl Into<String>, weight: Rational) -> Self {
        RawEdge {
            a: a.into(),
            b: b.into(),
            weight,
        }
    }
}

/// Unvalidated graph input: a firm list plus weighted edge entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawGraph {
    pub firms: Vec<String>,
    pub edges: Vec<RawEdge>,
}

impl RawGraph {
    pub fn new<S: Into<String>>(firms: impl IntoIterator<Item = S>) -> Self {
        RawGraph {
            firms: firms.into_iter().map(Into::into).collect(),
            edges: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<ISGraph, ValidationErrors> {
        ISGraph::validate(self)
    }

    pub fn edge(mut self, a: impl Into<String>, b: impl Into<String>, weight: Rational) -> Self {
        self.edges.push(RawEdge::new(a, b, weight));
        self
    }
}

/// A single violation found while validating a [`RawGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationError {
    #[error("graph has {count} firm(s); at least 2 are required")]
    TooFewFirms { count: usize },
    #[error("firm id {id:?} is listed more than once")]
    DuplicateFirmId { id: String },
    #[error("edge {a:?}-{b:?} references unknown firm {id:?}")]
    UnknownFirm { a: String, b: String, id: String },
    #[error("firm {id:?} has a self-loop with weight {weight}")]
    SelfLoop { id: String, weight: String },
    #[error("edge {a:?}-{b:?} has negative weight {weight}")]
    NegativeWeight {
        a: String,
        b: String,
        weight: String,
    },
    #[error("edge {a:?}-{b:?} is given conflicting weights {first} and {second}")]
    AsymmetricWeight {
        a: String,
        b: String,
        first: String,
        second: String,
    },
    #[error("firm {id:?} has no incident edge with positive weight")]
    IsolatedFirm { id: String },
    #[error("graph splits into {components} connected components")]
    DisconnectedGraph { components: usize },
}

impl ValidationError {
    /// Stable short name of the violation kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ValidationError::TooFewFirms { .. } => "TooFewFirms",
            ValidationError::DuplicateFirmId { .. } => "DuplicateFirmId",
            ValidationError::UnknownFirm { .. } => "UnknownFirm",
            ValidationError::SelfLoop { .. } => "SelfLoop",
            ValidationError::NegativeWeight { .. } => "NegativeWeight",
            ValidationError::AsymmetricWeight { .. } => "AsymmetricWeight",
            ValidationError::IsolatedFirm { .. } => "IsolatedFirm",
            ValidationError::DisconnectedGraph { .. } => "DisconnectedGraph",
        }
    }
}

/// The complete list of violations of a rejected graph.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl ValidationErrors {
    pub fn kinds(&self) -> Vec<&'static str> {
        self.0.iter().map(ValidationError::kind).collect()
    }

    pub fn contains_kind(&self, kind: &str) -> bool {
        self.0.iter().any(|e| e.kind() == kind)
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  {}: {}", e.kind(), e)?;
        }
        Ok(())
    }
}

/// Validated IS graph. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ISGraph {
    firms: Vec<String>,
    /// Sorted by neighbour index; every weight is strictly positive.
    adjacency: Vec<Vec<(usize, Rational)>>,
    centrality: OnceLock<Vec<Rational>>,
}

impl PartialEq for ISGraph {
    fn eq(&self, other: &Self) -> bool {
        self.firms == other.firms && self.adjacency == other.adjacency
    }
}

impl Eq for ISGraph {}

/// Validates raw firm and edge input. See [`ISGraph::validate`].
pub fn validate(raw: &RawGraph) -> Result<ISGraph, ValidationErrors> {
    ISGraph::validate(raw)
}

impl ISGraph {
    /// Builds a graph from raw input, reporting every violation found.
    ///
    /// Edges given in one direction only are mirrored. An edge listed twice
    /// (in either direction) must carry the same weight both times. Zero
    /// weights mean "no edge". Global connectivity is only reported when no
    /// firm is isolated, since an isolated firm already implies it.
    pub fn validate(raw: &RawGraph) -> Result<ISGraph, ValidationErrors> {
        let mut errors = Vec::new();
        let n = raw.firms.len();
        if n < 2 {
            errors.push(ValidationError::TooFewFirms { count: n });
        }

        let mut index: HashMap<&str, usize> = HashMap::with_capacity(n);
        for (i, id) in raw.firms.iter().enumerate() {
            if index.entry(id.as_str()).or_insert(i) != &i {
                errors.push(ValidationError::DuplicateFirmId { id: id.clone() });
            }
        }

        let mut weights: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
        for edge in &raw.edges {
            let ends = (index.get(edge.a.as_str()), index.get(edge.b.as_str()));
            for (id, found) in [(&edge.a, ends.0), (&edge.b, ends.1)] {
                if found.is_none() {
                    errors.push(ValidationError::UnknownFirm {
                        a: edge.a.clone(),
                        b: edge.b.clone(),
                        id: id.clone(),
                    });
                }
            }
            if edge.a == edge.b {
                if !edge.weight.is_zero() {
                    errors.push(ValidationError::SelfLoop {
                        id: edge.a.clone(),
                        weight: ratio::to_fraction_string(&edge.weight),
                    });
                }
                continue;
            }
            if edge.weight.is_negative() {
                errors.push(ValidationError::NegativeWeight {
                    a: edge.a.clone(),
                    b: edge.b.clone(),
                    weight: ratio::to_fraction_string(&edge.weight),
                });
                continue;
            }
            let (Some(&i), Some(&j)) = ends else { continue };
            match weights[i].get(&j) {
                Some(existing) if *existing != edge.weight => {
                    errors.push(ValidationError::AsymmetricWeight {
                        a: edge.a.clone(),
                        b: edge.b.clone(),
                        first: ratio::to_fraction_string(existing),
                        second: ratio::to_fraction_string(&edge.weight),
                    });
                }
                Some(_) => {}
                None => {
                    weights[i].insert(j, edge.weight.clone());
                    weights[j].insert(i, edge.weight.clone());
                }
            }
        }

        let adjacency: Vec<Vec<(usize, Rational)>> = weights
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, w)| !w.is_zero()).collect())
            .collect();

        finish(raw.firms.clone(), adjacency, errors)
    }

    /// Builds a graph from a dense weight matrix (row `i` lists firm `i`).
    pub fn from_matrix(
        firms: Vec<String>,
        matrix: &[Vec<Rational>],
    ) -> Result<ISGraph, ValidationErrors> {
        let n = firms.len();
        let mut errors = Vec::new();
        if n < 2 {
            errors.push(ValidationError::TooFewFirms { count: n });
        }
        let mut seen = HashMap::new();
        for id in &firms {
            if seen.insert(id.as_str(), ()).is_some() {
                errors.push(ValidationError::DuplicateFirmId { id: id.clone() });
            }
        }
        assert!(
            matrix.len() == n && matrix.iter().all(|row| row.len() == n),
            "weight matrix must be {n}x{n}"
        );
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                errors.push(ValidationError::SelfLoop {
                    id: firms[i].clone(),
                    weight: ratio::to_fraction_string(&matrix[i][i]),
                });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = &matrix[i][j];
                if j > i && w.is_negative() {
                    errors.push(ValidationError::NegativeWeight {
                        a: firms[i].clone(),
                        b: firms[j].clone(),
                        weight: ratio::to_fraction_string(w),
                    });
                }
                if j > i && *w != matrix[j][i] {
                    errors.push(ValidationError::AsymmetricWeight {
                        a: firms[i].clone(),
                        b: firms[j].clone(),
                        first: ratio::to_fraction_string(w),
                        second: ratio::to_fraction_string(&matrix[j][i]),
                    });
                }
                if w.is_positive() && matrix[j][i] == *w {
                    adjacency[i].push((j, w.clone()));
                }
            }
        }
        finish(firms, adjacency, errors)
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn firms(&self) -> &[String] {
        &self.firms
    }

    pub fn firm_index(&self, id: &str) -> Option<usize> {
        self.firms.iter().position(|f| f == id)
    }

    /// Neighbours of `i` with their (positive) edge weights, sorted by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, Rational)] {
        &self.adjacency[i]
    }

    /// `W[i][j]`; zero when there is no edge.
    pub fn weight(&self, i: usize, j: usize) -> Rational {
        self.adjacency[i]
            .binary_search_by_key(&j, |(k, _)| *k)
            .map(|pos| self.adjacency[i][pos].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i]
            .binary_search_by_key(&j, |(k, _)| *k)
            .is_ok()
    }

    /// Dense copy of the weight matrix.
    pub fn weight_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.firm_count();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (i, row) in self.adjacency.iter().enumerate() {
            for (j, w) in row {
                m[i][*j] = w.clone();
            }
        }
        m
    }

    /// Each undirected edge once, as `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |(j, _)| *j > i)
                .map(move |(j, w)| (i, *j, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sum of the weights incident to `i`.
    pub fn incident_weight(&self, i: usize) -> Rational {
        ratio::sum(self.adjacency[i].iter().map(|(_, w)| w))
    }

    /// Sum of all edge weights, each undirected edge counted once.
    pub fn total_weight(&self) -> Rational {
        ratio::sum(self.edges().map(|(_, _, w)| w))
    }

    /// All-pairs hop distances via one breadth-first search per source.
    pub fn distances(&self) -> DistanceMatrix {
        let n = self.firm_count();
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::with_capacity(n);
        for source in 0..n {
            let row = &mut dist[source * n..(source + 1) * n];
            row[source] = 0;
            queue.clear();
            queue.push_back(source);
            while let Some(u) = queue.pop_front() {
                let next = row[u] + 1;
                for &(v, _) in &self.adjacency[u] {
                    if row[v] == u32::MAX {
                        row[v] = next;
                        queue.push_back(v);
                    }
                }
            }
        }
        debug_assert!(dist.iter().all(|&d| d != u32::MAX));
        DistanceMatrix { n, dist }
    }

    /// Closeness centrality `(n-1) / Σ_j d(i, j)` of firm `i`.
    pub fn closeness_centrality(&self, i: usize) -> Rational {
        self.centralities()[i].clone()
    }

    /// Closeness centrality of every firm, computed once and cached.
    pub fn centralities(&self) -> &[Rational] {
        self.centrality.get_or_init(|| {
            let d = self.distances();
            (0..self.firm_count())
                .map(|i| closeness_from_distances(&d, i))
                .collect()
        })
    }

    /// The same graph with firms reordered: new firm `k` is old firm `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> ISGraph {
        let n = self.firm_count();
        assert_eq!(order.len(), n, "permutation length mismatch");
        let mut inverse = vec![usize::MAX; n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        assert!(
            inverse.iter().all(|&k| k != usize::MAX),
            "not a permutation"
        );
        let firms = order.iter().map(|&old| self.firms[old].clone()).collect();
        let adjacency = order
            .iter()
            .map(|&old| {
                let mut row: Vec<_> = self.adjacency[old]
                    .iter()
                    .map(|(j, w)| (inverse[*j], w.clone()))
                    .collect();
                row.sort_by_key(|(j, _)| *j);
                row
            })
            .collect();
        ISGraph {
            firms,
            adjacency,
            centrality: OnceLock::new(),
        }
    }
}

fn finish(
    firms: Vec<String>,
    adjacency: Vec<Vec<(usize, Rational)>>,
    mut errors: Vec<ValidationError>,
) -> Result<ISGraph, ValidationErrors> {
    let mut isolated = false;
    for (i, row) in adjacency.iter().enumerate() {
        if row.is_empty() {
            isolated = true;
            errors.push(ValidationError::IsolatedFirm {
                id: firms[i].clone(),
            });
        }
    }
    if !isolated && firms.len() >= 2 {
        let components = count_components(&adjacency);
        if components > 1 {
            errors.push(ValidationError::DisconnectedGraph { components });
        }
    }
    if errors.is_empty() {
        Ok(ISGraph {
            firms,
            adjacency,
            centrality: OnceLock::new(),
        })
    } else {
        Err(ValidationErrors(errors))
    }
}

fn count_components(adjacency: &[Vec<(usize, Rational)>]) -> usize {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &(v, _) in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

fn closeness_from_distances(d: &DistanceMatrix, i: usize) -> Rational {
    let total: u64 = d.row(i).iter().map(|&x| u64::from(x)).sum();
    Rational::new((d.n as u64 - 1).into(), total.into())
}

/// Hop counts between every pair of firms, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Free-function form of [`ISGraph::distances`].
pub fn distances(g: &ISGraph) -> DistanceMatrix {
    g.distances()
}

/// Free-function form of [`ISGraph::closeness_centrality`].
pub fn closeness_centrality(g: &ISGraph, i: usize) -> Rational {
    g.closeness_centrality(i)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    pub(crate) fn fig1() -> ISGraph {
        RawGraph::new(["1", "2", "3", "4", "5", "6"])
            .edge("1", "2", int(4))
            .edge("1", "3", int(2))
            .edge("1", "4", int(8))
            .edge("2", "4", int(2))
            .edge("3", "4", int(6))
            .edge("4", "5", int(4))
            .edge("4", "6", int(8))
            .validate()
            .unwrap()
    }

    pub(crate) fn path3() -> ISGraph {
        RawGraph::new(["A", "B", "C"])
            .edge("A", "B", int(4))
            .edge("B", "C", int(2))
            .validate()
            .unwrap()
    }

    #[test]
    fn fig1_is_valid() {
        let g = fig1();
        assert_eq!(g.firm_count(), 6);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(g.weight(0, 3), int(8));
        assert_eq!(g.weight(3, 0), int(8));
        assert_eq!(g.weight(4, 5), int(0));
        assert_eq!(g.total_weight(), int(34));
    }

    #[test]
    fn single_firm_reports_both_errors() {
        let err = RawGraph::new(["A"]).validate().unwrap_err();
        assert_eq!(err.kinds(), vec!["TooFewFirms", "IsolatedFirm"]);
    }

    #[test]
    fn two_components_rejected() {
        let err = RawGraph::new(["A", "B", "C", "D"])
            .edge("A", "B", int(1))
            .edge("C", "D", int(1))
            .validate()
            .unwrap_err();
        assert_eq!(
            err.0,
            vec![ValidationError::DisconnectedGraph { components: 2 }]
        );
    }

    #[test]
    fn reports_every_violation() {
        let err = RawGraph::new(["A", "B", "C", "A", "E"])
            .edge("A", "A", int(1))
            .edge("A", "B", int(-3))
            .edge("B", "C", int(2))
            .edge("C", "B", int(5))
            .edge("C", "Z", int(1))
            .validate()
            .unwrap_err();
        let kinds = err.kinds();
        for k in [
            "DuplicateFirmId",
            "SelfLoop",
            "NegativeWeight",
            "AsymmetricWeight",
            "UnknownFirm",
            "IsolatedFirm",
        ] {
            assert!(kinds.contains(&k), "missing {k} in {kinds:?}");
        }
    }

    #[test]
    fn one_direction_is_mirrored_and_equal_duplicates_accepted() {
        let g = RawGraph::new(["A", "B"])
            .edge("B", "A", frac(1, 4))
            .edge("A", "B", frac(2, 8))
            .validate()
            .unwrap();
        assert_eq!(g.weight(0, 1), frac(1, 4));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn zero_weight_is_no_edge() {
        let err = RawGraph::new(["A", "B", "C"])
            .edge("A", "B", int(1))
            .edge("B", "C", int(0))
            .validate()
            .unwrap_err();
        assert_eq!(err.kinds(), vec!["IsolatedFirm"]);
    }

    #[test]
    fn from_matrix_checks_symmetry() {
        let firms: Vec<String> = ["A", "B"].iter().map(|s| s.to_string()).collect();
        let ok = ISGraph::from_matrix(firms.clone(), &[vec![int(0), int(3)], vec![int(3), int(0)]]);
        assert_eq!(ok.unwrap().weight(1, 0), int(3));
        let bad = ISGraph::from_matrix(firms, &[vec![int(1), int(3)], vec![int(2), int(0)]]);
        let kinds = bad.unwrap_err().kinds();
        assert!(kinds.contains(&"SelfLoop") && kinds.contains(&"AsymmetricWeight"));
    }

    #[test]
    fn fig1_distances() {
        let d = fig1().distances();
        assert_eq!(d.get(4, 5), 2);
        assert_eq!(d.get(1, 2), 2);
        assert_eq!(d.get(0, 3), 1);
        assert_eq!(d.get(3, 3), 0);
    }

    #[test]
    fn path_distances_and_centrality() {
        let g = path3();
        assert_eq!(g.distances().get(0, 2), 2);
        assert_eq!(g.centralities(), &[frac(2, 3), int(1), frac(2, 3)]);
    }

    #[test]
    fn fig1_centralities() {
        let g = fig1();
        let expected = [
            frac(5, 7),
            frac(5, 8),
            frac(5, 8),
            int(1),
            frac(5, 9),
            frac(5, 9),
        ];
        assert_eq!(g.centralities(), &expected);
        assert_eq!(ratio::sum(g.centralities()), frac(1027, 252));
    }

    #[test]
    fn two_firm_centrality_is_one() {
        let g = RawGraph::new(["A", "B"])
            .edge("A", "B", int(10))
            .validate()
            .unwrap();
        assert_eq!(closeness_centrality(&g, 0), int(1));
        assert_eq!(closeness_centrality(&g, 1), int(1));
    }

    #[test]
    fn permutation_relabels_centrality() {
        let g = fig1();
        let order = [5, 3, 1, 0, 4, 2];
        let p = g.permuted(&order);
        for (new, &old) in order.iter().enumerate() {
            assert_eq!(p.closeness_centrality(new), g.closeness_centrality(old));
            assert_eq!(p.firms()[new], g.firms()[old]);
        }
    }
}
