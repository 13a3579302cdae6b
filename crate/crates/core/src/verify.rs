//! Constructive checks of game properties, core membership and the
//! fairness/stability axioms of the allocation, plus a seeded generator of
//! valid IS graphs for randomized suites.
//!
//! Every checker is exhaustive over coalitions and therefore bounded by an
//! enumeration limit ([`CHECK_LIMIT`] by default). A failing report always
//! carries a counterexample whose two sides can be recomputed by direct
//! evaluation.

use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::allocation::{allocate, AllocationReport, TransactionCost};
use crate::error::{self, EnumerationLimitExceeded};
use crate::games::{make_game, AggregationWeights, CharacteristicGame, Coalition, GameKind};
use crate::graph::{ISGraph, RawGraph};
use crate::ratio::{self, Rational};
use crate::shapley;

/// Default player bound for exhaustive property checks.
pub const CHECK_LIMIT: usize = 12;

/// Player bound for the symmetry axiom's per-pair quantifier.
pub const SYMMETRY_LIMIT: usize = 10;

impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.members())
    }
}

fn serialize_fraction<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&ratio::to_fraction_string(r))
}

/// Witness of a violated inequality `lhs <relation> rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// The coalitions involved, in the order the relation names them.
    pub coalitions: Vec<Coalition>,
    /// Firms involved (symmetry and dummy checks).
    pub firms: Vec<usize>,
    /// The inequality or identity that should have held, e.g. `f(S) <= f(T)`.
    pub relation: String,
    #[serde(serialize_with = "serialize_fraction")]
    pub lhs: Rational,
    #[serde(serialize_with = "serialize_fraction")]
    pub rhs: Rational,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        for (k, c) in self.coalitions.iter().enumerate() {
            write!(
                f,
                "{}{}={}",
                if k == 0 { " with " } else { ", " },
                ["S", "T"].get(k).unwrap_or(&"U"),
                c
            )?;
        }
        if !self.firms.is_empty() {
            write!(f, " firms {:?}", self.firms)?;
        }
        write!(
            f,
            ": lhs {} vs rhs {}",
            ratio::Fraction(&self.lhs),
            ratio::Fraction(&self.rhs)
        )
    }
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    pub instances_checked: u64,
}

impl PropertyReport {
    fn new(property: impl Into<String>) -> Self {
        PropertyReport {
            property: property.into(),
            holds: true,
            counterexample: None,
            instances_checked: 0,
        }
    }

    fn fail(mut self, cx: Counterexample) -> Self {
        self.holds = false;
        self.counterexample = Some(cx);
        self
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.holds { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{status}] {} ({} instances)",
            self.property, self.instances_checked
        )?;
        if let Some(cx) = &self.counterexample {
            write!(f, "\n       counterexample: {cx}")?;
        }
        Ok(())
    }
}

fn table_within(
    game: &CharacteristicGame,
    limit: usize,
) -> Result<Vec<Rational>, EnumerationLimitExceeded> {
    error::ensure_within(game.firm_count(), limit)?;
    Ok(game.table())
}

fn at(table: &[Rational], s: Coalition) -> &Rational {
    &table[s.bits() as usize]
}

fn label(game: &CharacteristicGame, property: &str) -> String {
    format!("{property}[{}]", game.kind())
}

fn cx(coalitions: Vec<Coalition>, relation: &str, lhs: Rational, rhs: Rational) -> Counterexample {
    Counterexample {
        coalitions,
        firms: Vec::new(),
        relation: relation.to_string(),
        lhs,
        rhs,
    }
}

/// `f(S) <= f(T)` for every `S ⊂ T`.
pub fn check_monotonicity(
    game: &CharacteristicGame,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    check_monotonicity_with_limit(game, CHECK_LIMIT)
}

pub fn check_monotonicity_with_limit(
    game: &CharacteristicGame,
    limit: usize,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let table = table_within(game, limit)?;
    let mut report = PropertyReport::new(label(game, "monotonicity"));
    for t in Coalition::all(game.firm_count()) {
        for s in t.subsets().skip(1) {
            report.instances_checked += 1;
            if at(&table, s) > at(&table, t) {
                let (l, r) = (at(&table, s).clone(), at(&table, t).clone());
                return Ok(report.fail(cx(vec![s, t], "f(S) <= f(T)", l, r)));
            }
        }
    }
    Ok(report)
}

/// `f(S ∪ T) >= f(S) + f(T)` for every disjoint pair.
pub fn check_superadditivity(
    game: &CharacteristicGame,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    check_superadditivity_with_limit(game, CHECK_LIMIT)
}

pub fn check_superadditivity_with_limit(
    game: &CharacteristicGame,
    limit: usize,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let table = table_within(game, limit)?;
    let mut report = PropertyReport::new(label(game, "superadditivity"));
    for u in Coalition::all(game.firm_count()) {
        for s in u.subsets() {
            let t = u.difference(s);
            report.instances_checked += 1;
            let parts = at(&table, s) + at(&table, t);
            if *at(&table, u) < parts {
                let whole = at(&table, u).clone();
                return Ok(report.fail(cx(vec![s, t], "f(S u T) >= f(S) + f(T)", whole, parts)));
            }
        }
    }
    Ok(report)
}

/// `f(S ∪ T) + f(S ∩ T) >= f(S) + f(T)` for every pair.
pub fn check_convexity(
    game: &CharacteristicGame,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    check_convexity_with_limit(game, CHECK_LIMIT)
}

pub fn check_convexity_with_limit(
    game: &CharacteristicGame,
    limit: usize,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    supermodular_scan(game, limit, false)
}

/// Convexity with equality on every pair, i.e. the game is additive.
pub fn check_modularity(
    game: &CharacteristicGame,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    check_modularity_with_limit(game, CHECK_LIMIT)
}

pub fn check_modularity_with_limit(
    game: &CharacteristicGame,
    limit: usize,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    supermodular_scan(game, limit, true)
}

fn supermodular_scan(
    game: &CharacteristicGame,
    limit: usize,
    equality: bool,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let table = table_within(game, limit)?;
    let (name, relation) = if equality {
        ("modularity", "f(S u T) + f(S n T) == f(S) + f(T)")
    } else {
        ("convexity", "f(S u T) + f(S n T) >= f(S) + f(T)")
    };
    let mut report = PropertyReport::new(label(game, name));
    let count = table.len() as u64;
    // The relation is symmetric in S and T, so unordered pairs suffice.
    for s_bits in 0..count {
        for t_bits in s_bits..count {
            let (s, t) = (Coalition::from_bits(s_bits), Coalition::from_bits(t_bits));
            report.instances_checked += 1;
            let lhs = at(&table, s.union(t)) + at(&table, s.intersection(t));
            let rhs = at(&table, s) + at(&table, t);
            let ok = if equality { lhs == rhs } else { lhs >= rhs };
            if !ok {
                return Ok(report.fail(cx(vec![s, t], relation, lhs, rhs)));
            }
        }
    }
    Ok(report)
}

/// Efficiency `Σ a_i = f(Γ)` and coalitional rationality `Σ_{i∈S} a_i >= f(S)`.
pub fn check_core(
    game: &CharacteristicGame,
    allocation: &[Rational],
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    check_core_with_limit(game, allocation, CHECK_LIMIT)
}

pub fn check_core_with_limit(
    game: &CharacteristicGame,
    allocation: &[Rational],
    limit: usize,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let n = game.firm_count();
    assert_eq!(
        allocation.len(),
        n,
        "allocation must have one entry per firm"
    );
    let table = table_within(game, limit)?;
    let mut report = PropertyReport::new(label(game, "core"));
    let grand = Coalition::grand(n);
    let total = ratio::sum(allocation);
    report.instances_checked += 1;
    if total != *at(&table, grand) {
        let v = at(&table, grand).clone();
        return Ok(report.fail(cx(vec![grand], "sum_i a_i == f(G)", total, v)));
    }
    for s in Coalition::all(n) {
        report.instances_checked += 1;
        let paid = ratio::sum(s.members().map(|i| &allocation[i]));
        if paid < *at(&table, s) {
            let v = at(&table, s).clone();
            return Ok(report.fail(cx(vec![s], "sum_{i in S} a_i >= f(S)", paid, v)));
        }
    }
    Ok(report)
}

/// Efficiency and coalitional rationality of a transaction-cost allocation:
/// shares sum to `τ(Γ)`, and no coalition with two or more members pays
/// more than `τ(S) = τ(Γ)`.
///
/// Up to [`CHECK_LIMIT`] firms every coalition is visited. Beyond that only
/// the coalition with the largest total share is checked (all firms with a
/// positive share, topped up to two members), which dominates the rest.
pub fn check_stability(report: &AllocationReport) -> PropertyReport {
    let n = report.firm_count();
    let tau = report.tc.total();
    let mut out = PropertyReport::new("stability");
    let total = ratio::sum(&report.shares);
    out.instances_checked += 1;
    if total != *tau || !report.efficiency_residual.is_zero() {
        let grand = if n <= crate::games::MAX_PLAYERS {
            vec![Coalition::grand(n)]
        } else {
            Vec::new()
        };
        return out.fail(cx(grand, "sum_i T_i == tau(G)", total, tau.clone()));
    }
    if n <= CHECK_LIMIT {
        for s in Coalition::all(n).filter(|s| s.len() >= 2) {
            out.instances_checked += 1;
            let paid = ratio::sum(s.members().map(|i| &report.shares[i]));
            if paid > *tau {
                return out.fail(cx(vec![s], "sum_{i in S} T_i <= tau(G)", paid, tau.clone()));
            }
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| report.shares[b].cmp(&report.shares[a]));
        let mut paid = Rational::zero();
        for (k, &i) in order.iter().enumerate() {
            if k >= 2 && report.shares[i] <= Rational::zero() {
                break;
            }
            paid += &report.shares[i];
        }
        out.instances_checked += 1;
        if paid > *tau {
            return out.fail(cx(
                Vec::new(),
                "max_S sum_{i in S} T_i <= tau(G)",
                paid,
                tau.clone(),
            ));
        }
    }
    out
}

/// Shapley-based cost shares `φ_i(f) · τ / f(Γ)` for an arbitrary game.
pub fn tc_shares(
    game: &CharacteristicGame,
    tau: &Rational,
) -> Result<Vec<Rational>, EnumerationLimitExceeded> {
    let phi = shapley::shapley_exact_all(game)?;
    let grand = game.grand_value();
    Ok(phi.into_iter().map(|p| p * tau / &grand).collect())
}

/// `Σ shares == total`.
pub fn check_efficiency(shares: &[Rational], total: &Rational) -> PropertyReport {
    let mut report = PropertyReport::new("efficiency");
    report.instances_checked = 1;
    let sum = ratio::sum(shares);
    if sum != *total {
        return report.fail(cx(Vec::new(), "sum_i T_i == tau(G)", sum, total.clone()));
    }
    report
}

/// For every pair `i, j` interchangeable in `f` (`f(S∪{i}) = f(S∪{j})` for
/// all `S ⊆ Γ∖{i,j}`), the shares must be equal. `instances_checked`
/// counts the interchangeable pairs found.
pub fn check_symmetry(
    game: &CharacteristicGame,
    shares: &[Rational],
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let n = game.firm_count();
    let table = table_within(game, SYMMETRY_LIMIT)?;
    let mut report = PropertyReport::new(label(game, "symmetry"));
    let grand = Coalition::grand(n);
    for i in 0..n {
        for j in i + 1..n {
            let rest = grand.without(i).without(j);
            let interchangeable = rest
                .subsets()
                .all(|s| at(&table, s.with(i)) == at(&table, s.with(j)));
            if !interchangeable {
                continue;
            }
            report.instances_checked += 1;
            if shares[i] != shares[j] {
                let mut c = cx(
                    Vec::new(),
                    "T_i == T_j",
                    shares[i].clone(),
                    shares[j].clone(),
                );
                c.firms = vec![i, j];
                return Ok(report.fail(c));
            }
        }
    }
    Ok(report)
}

/// For every dummy firm `d` (`f(S∪{d}) = f(S) + f({d})` for all
/// `S ⊆ Γ∖{d}`), the share must be `f({d}) · τ / f(Γ)`. Vacuous when no
/// dummy exists, which is the case for every valid IS graph game.
pub fn check_dummy_player(
    game: &CharacteristicGame,
    shares: &[Rational],
    tau: &Rational,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let n = game.firm_count();
    let table = table_within(game, CHECK_LIMIT)?;
    let mut report = PropertyReport::new(label(game, "dummy-player"));
    let grand = Coalition::grand(n);
    let grand_value = at(&table, grand).clone();
    for d in 0..n {
        let alone = at(&table, Coalition::singleton(d));
        let dummy = grand
            .without(d)
            .subsets()
            .all(|s| *at(&table, s.with(d)) == at(&table, s) + alone);
        if !dummy {
            continue;
        }
        report.instances_checked += 1;
        let expected = alone * tau / &grand_value;
        if shares[d] != expected {
            let mut c = cx(
                Vec::new(),
                "T_d == f({d}) * tau / f(G)",
                shares[d].clone(),
                expected,
            );
            c.firms = vec![d];
            return Ok(report.fail(c));
        }
    }
    Ok(report)
}

/// Additivity of the allocation over two IS games on the same firm set.
///
/// Each game enters the sum as its cost game `τ·σ/σ(Γ)`, whose Shapley value
/// is exactly the allocation `T(σ, τ)`. The summed game therefore has grand
/// value `τ + τ'`, and the check asserts
/// `T_i(sum, τ + τ') = T_i(σ, τ) + T_i(σ', τ')` with the left side computed
/// by exact enumeration on the pointwise sum.
pub fn check_additivity(
    first: (&ISGraph, &TransactionCost),
    second: (&ISGraph, &TransactionCost),
    w: &AggregationWeights,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let (g1, tc1) = first;
    let (g2, tc2) = second;
    assert_eq!(g1.firms(), g2.firms(), "additivity needs a shared firm set");
    error::ensure_within(g1.firm_count(), error::enumeration_limit())?;
    let cost_game = |g: &ISGraph, tc: &TransactionCost| {
        make_game(g, GameKind::Aggregated, w).scaled(tc.total() / w.total())
    };
    let summed = cost_game(g1, tc1).sum(&cost_game(g2, tc2));
    let tau = tc1.total() + tc2.total();
    let combined = tc_shares(&summed, &tau)?;
    let a1 = allocate(g1, tc1, w);
    let a2 = allocate(g2, tc2, w);
    let mut report = PropertyReport::new("additivity");
    for i in 0..g1.firm_count() {
        report.instances_checked += 1;
        let separate = &a1.shares[i] + &a2.shares[i];
        if combined[i] != separate {
            let mut c = cx(
                Vec::new(),
                "T_i(sum, tau + tau') == T_i(sigma, tau) + T_i(sigma', tau')",
                combined[i].clone(),
                separate,
            );
            c.firms = vec![i];
            return Ok(report.fail(c));
        }
    }
    Ok(report)
}

/// Efficiency, symmetry, dummy player and additivity for `T(σ, τ)` on `g`.
///
/// Additivity is checked against `partner` when given, otherwise against the
/// unit-weight complete graph on the same firms with `τ' = 1`.
pub fn check_fairness_axioms(
    g: &ISGraph,
    tc: &TransactionCost,
    w: &AggregationWeights,
    partner: Option<(&ISGraph, &TransactionCost)>,
) -> Result<Vec<PropertyReport>, EnumerationLimitExceeded> {
    error::ensure_within(g.firm_count(), SYMMETRY_LIMIT)?;
    let report = allocate(g, tc, w);
    let sigma = make_game(g, GameKind::Aggregated, w);
    let mut out = vec![
        check_efficiency(&report.shares, tc.total()),
        check_symmetry(&sigma, &report.shares)?,
        check_dummy_player(&sigma, &report.shares, tc.total())?,
    ];
    let fallback;
    let partner = match partner {
        Some(p) => p,
        None => {
            fallback = (
                complete_graph(g.firms()),
                TransactionCost::new(Rational::one()).unwrap(),
            );
            (&fallback.0, &fallback.1)
        }
    };
    out.push(check_additivity((g, tc), partner, w)?);
    Ok(out)
}

fn complete_graph(firms: &[String]) -> ISGraph {
    let mut raw = RawGraph::new(firms.iter().cloned());
    for (i, a) in firms.iter().enumerate() {
        for b in &firms[i + 1..] {
            raw = raw.edge(a.clone(), b.clone(), Rational::one());
        }
    }
    raw.validate()
        .expect("complete graph on distinct firms is valid")
}

/// Monotonicity, superadditivity and convexity of `v`, `ι` and `σ`, plus
/// modularity of `ι`.
pub fn check_game_properties(
    g: &ISGraph,
    w: &AggregationWeights,
) -> Result<Vec<PropertyReport>, EnumerationLimitExceeded> {
    error::ensure_within(g.firm_count(), CHECK_LIMIT)?;
    let mut out = Vec::new();
    for kind in [
        GameKind::Physical,
        GameKind::Institutional,
        GameKind::Aggregated,
    ] {
        let game = make_game(g, kind, w);
        out.push(check_monotonicity(&game)?);
        out.push(check_superadditivity(&game)?);
        out.push(check_convexity(&game)?);
        if kind == GameKind::Institutional {
            out.push(check_modularity(&game)?);
        }
    }
    Ok(out)
}

/// The IS index, read as an allocation of `σ(Γ)`, lies in the core of `σ`.
pub fn check_index_in_core(
    g: &ISGraph,
    w: &AggregationWeights,
) -> Result<PropertyReport, EnumerationLimitExceeded> {
    let sigma = make_game(g, GameKind::Aggregated, w);
    check_core(&sigma, &shapley::is_index(g, w).sigma())
}

/// Parameters of a random IS graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphGenSpec {
    pub firm_count: usize,
    /// Probability of each pair being joined, in `(0, 1]`.
    pub edge_density: f64,
    pub weight_min: Rational,
    pub weight_max: Rational,
    pub seed: u64,
}

impl GraphGenSpec {
    /// Integer weights in `[1, 10]`.
    pub fn new(firm_count: usize, edge_density: f64, seed: u64) -> Self {
        GraphGenSpec {
            firm_count,
            edge_density,
            weight_min: Rational::one(),
            weight_max: Rational::from_integer(10.into()),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("infeasible graph spec: {0}")]
pub struct InfeasibleSpec(pub String);

/// Number of evenly spaced weight values drawn from, minus one.
const WEIGHT_STEPS: i64 = 100;

/// Generates a valid IS graph, deterministic in `spec`.
///
/// Each pair is joined with probability `edge_density`; components left
/// disconnected are then joined by one extra edge each between random
/// members. Weights are drawn from `WEIGHT_STEPS + 1` evenly spaced values
/// in `[weight_min, weight_max]`.
pub fn generate_graph(spec: &GraphGenSpec) -> Result<ISGraph, InfeasibleSpec> {
    let n = spec.firm_count;
    if n < 2 {
        return Err(InfeasibleSpec(format!("need at least 2 firms, got {n}")));
    }
    if !(spec.edge_density > 0.0 && spec.edge_density <= 1.0) {
        return Err(InfeasibleSpec(format!(
            "edge density must be in (0, 1], got {}",
            spec.edge_density
        )));
    }
    if spec.weight_min <= Rational::zero() || spec.weight_max < spec.weight_min {
        return Err(InfeasibleSpec(format!(
            "weight range [{}, {}] must be positive and non-empty",
            ratio::Fraction(&spec.weight_min),
            ratio::Fraction(&spec.weight_max)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let span = (&spec.weight_max - &spec.weight_min) / Rational::from_integer(WEIGHT_STEPS.into());
    let weight = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(0..=WEIGHT_STEPS);
        &spec.weight_min + &span * Rational::from_integer(k.into())
    };

    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(spec.edge_density) {
                let w = weight(&mut rng);
                matrix[i][j] = w.clone();
                matrix[j][i] = w;
            }
        }
    }

    let components = components_of(&matrix);
    for c in 1..components.len() {
        let target = rng.gen_range(0..c);
        let a = *components[c].choose(&mut rng).expect("non-empty component");
        let b = *components[target]
            .choose(&mut rng)
            .expect("non-empty component");
        let w = weight(&mut rng);
        matrix[a][b] = w.clone();
        matrix[b][a] = w;
    }

    let firms = (1..=n).map(|i| i.to_string()).collect();
    ISGraph::from_matrix(firms, &matrix)
        .map_err(|e| InfeasibleSpec(format!("generator produced an invalid graph: {e}")))
}

fn components_of(matrix: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let n = matrix.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut k = 0;
        while k < members.len() {
            let u = members[k];
            k += 1;
            for v in 0..n {
                if !seen[v] && !matrix[u][v].is_zero() {
                    seen[v] = true;
                    members.push(v);
                }
            }
        }
        out.push(members);
    }
    out
}

/// `count` random graphs with firm counts in `min_n..=max_n` and densities
/// in `[0.2, 1.0]`, all derived from `seed`.
pub fn random_graphs(seed: u64, count: usize, min_n: usize, max_n: usize) -> Vec<ISGraph> {
    assert!(2 <= min_n && min_n <= max_n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(min_n..=max_n);
            let density = rng.gen_range(0.2..=1.0);
            let spec = GraphGenSpec::new(n, density, rng.gen());
            generate_graph(&spec).expect("random family specs are feasible")
        })
        .collect()
}
