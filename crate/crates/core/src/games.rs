//! Coalitions and transferable-utility characteristic functions.
//!
//! The physical game `v` sums the edge weights inside a coalition, the
//! institutional game `ι` sums closeness centralities, and the aggregated
//! game `σ = α·v/v(Γ) + β·ι/ι(Γ)` combines their normalized forms.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::ISGraph;
use crate::ratio::{self, Rational};

/// Largest player count a [`Coalition`] bitmask can address.
pub const MAX_PLAYERS: usize = 64;

/// A set of firms, stored as a bitmask over firm indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The grand coalition `{0, .., n-1}`.
    pub fn grand(n: usize) -> Self {
        assert!(
            n <= MAX_PLAYERS,
            "coalitions address at most {MAX_PLAYERS} firms"
        );
        if n == MAX_PLAYERS {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_PLAYERS);
        Coalition(1u64 << i)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        members.into_iter().fold(Coalition::EMPTY, |c, i| c.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_PLAYERS && self.0 & (1u64 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        Coalition(self.0 | Coalition::singleton(i).0)
    }

    pub fn without(self, i: usize) -> Self {
        Coalition(self.0 & !Coalition::singleton(i).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Self {
        Coalition(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    /// Member indices in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Every coalition over `n` firms, in bitmask order starting at `∅`.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        let grand = Coalition::grand(n).0;
        (0..=grand).map(Coalition)
    }

    /// Every subset of `self` (including `∅` and `self`), largest first.
    pub fn subsets(self) -> impl Iterator<Item = Coalition> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == 0 {
                None
            } else {
                Some((current - 1) & full)
            };
            Some(Coalition(current))
        })
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// Relative weights of the physical and institutional parts of `σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationWeights {
    alpha: Rational,
    beta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("aggregation weight {name} must be positive, got {value}")]
pub struct InvalidWeight {
    pub name: &'static str,
    pub value: String,
}

impl AggregationWeights {
    pub fn new(alpha: Rational, beta: Rational) -> Result<Self, InvalidWeight> {
        for (name, value) in [("alpha", &alpha), ("beta", &beta)] {
            if !value.is_positive() {
                return Err(InvalidWeight {
                    name,
                    value: ratio::to_fraction_string(value),
                });
            }
        }
        Ok(AggregationWeights { alpha, beta })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// `σ(Γ) = α + β`.
    pub fn total(&self) -> Rational {
        &self.alpha + &self.beta
    }
}

impl Default for AggregationWeights {
    fn default() -> Self {
        AggregationWeights {
            alpha: Rational::one(),
            beta: Rational::one(),
        }
    }
}

/// Which characteristic function a [`CharacteristicGame`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    Physical,
    Institutional,
    Aggregated,
    NormalizedPhysical,
    NormalizedInstitutional,
    Synthetic,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Physical => "physical",
            GameKind::Institutional => "institutional",
            GameKind::Aggregated => "aggregated",
            GameKind::NormalizedPhysical => "normalized-physical",
            GameKind::NormalizedInstitutional => "normalized-institutional",
            GameKind::Synthetic => "synthetic",
        })
    }
}

/// `v(S)`: total weight of the edges with both endpoints in `S`.
pub fn physical_value(g: &ISGraph, s: Coalition) -> Rational {
    let mut total = Rational::zero();
    if s.len() <= 1 {
        return total;
    }
    for i in s.members() {
        for (j, w) in g.neighbors(i) {
            if *j > i && s.contains(*j) {
                total += w;
            }
        }
    }
    total
}

/// `ι(S)`: sum of the members' closeness centralities.
pub fn institutional_value(g: &ISGraph, s: Coalition) -> Rational {
    let c = g.centralities();
    ratio::sum(s.members().map(|i| &c[i]))
}

/// `σ(S) = α·v(S)/v(Γ) + β·ι(S)/ι(Γ)`.
pub fn aggregated_value(g: &ISGraph, s: Coalition, w: &AggregationWeights) -> Rational {
    GraphTotals::new(g).aggregated(g, s, w)
}

#[derive(Debug, Clone)]
struct GraphTotals {
    physical: Rational,
    institutional: Rational,
}

impl GraphTotals {
    fn new(g: &ISGraph) -> Self {
        GraphTotals {
            physical: g.total_weight(),
            institutional: ratio::sum(g.centralities()),
        }
    }

    fn aggregated(&self, g: &ISGraph, s: Coalition, w: &AggregationWeights) -> Rational {
        w.alpha() * physical_value(g, s) / &self.physical
            + w.beta() * institutional_value(g, s) / &self.institutional
    }
}

type Evaluator = dyn Fn(Coalition) -> Rational + Send + Sync;

/// A player count plus a pure evaluator `Coalition -> value` with `f(∅) = 0`.
#[derive(Clone)]
pub struct CharacteristicGame {
    firm_count: usize,
    kind: GameKind,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for CharacteristicGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacteristicGame")
            .field("firm_count", &self.firm_count)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl CharacteristicGame {
    /// Wraps an arbitrary evaluator. The empty coalition always maps to 0,
    /// whatever `f` returns for it.
    pub fn synthetic<F>(firm_count: usize, f: F) -> Self
    where
        F: Fn(Coalition) -> Rational + Send + Sync + 'static,
    {
        Self::with_kind(firm_count, GameKind::Synthetic, f)
    }

    /// A game given by a table of `2^n` values indexed by coalition bits.
    pub fn from_table(firm_count: usize, values: Vec<Rational>) -> Self {
        assert_eq!(
            values.len(),
            1usize << firm_count,
            "table needs 2^n entries"
        );
        Self::synthetic(firm_count, move |s| values[s.bits() as usize].clone())
    }

    /// `f(S) = Σ_{i∈S} c_i`.
    pub fn additive(contributions: Vec<Rational>) -> Self {
        let n = contributions.len();
        Self::synthetic(n, move |s| {
            ratio::sum(s.members().map(|i| &contributions[i]))
        })
    }

    fn with_kind<F>(firm_count: usize, kind: GameKind, f: F) -> Self
    where
        F: Fn(Coalition) -> Rational + Send + Sync + 'static,
    {
        assert!(firm_count <= MAX_PLAYERS);
        CharacteristicGame {
            firm_count,
            kind,
            eval: Arc::new(f),
        }
    }

    pub fn firm_count(&self) -> usize {
        self.firm_count
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.firm_count)
    }

    pub fn evaluate(&self, s: Coalition) -> Rational {
        debug_assert!(
            s.is_subset_of(self.grand()),
            "coalition {s} outside the player set"
        );
        if s.is_empty() {
            return Rational::zero();
        }
        (self.eval)(s)
    }

    /// `f(Γ)`.
    pub fn grand_value(&self) -> Rational {
        self.evaluate(self.grand())
    }

    /// Values of all `2^n` coalitions, indexed by bitmask.
    pub fn table(&self) -> Vec<Rational> {
        Coalition::all(self.firm_count)
            .map(|s| self.evaluate(s))
            .collect()
    }

    /// `k·f`.
    pub fn scaled(&self, k: Rational) -> Self {
        let inner = self.clone();
        Self::synthetic(self.firm_count, move |s| &k * inner.evaluate(s))
    }

    /// Pointwise `f + h` on a shared player set.
    pub fn sum(&self, other: &CharacteristicGame) -> Self {
        assert_eq!(
            self.firm_count, other.firm_count,
            "games must share the firm set"
        );
        let (f, h) = (self.clone(), other.clone());
        Self::synthetic(self.firm_count, move |s| f.evaluate(s) + h.evaluate(s))
    }
}

/// Builds the characteristic function of the given kind over `g`.
///
/// The grand-coalition totals are computed once here; evaluations afterwards
/// only touch the coalition's members.
///
/// Panics for graphs with more than [`MAX_PLAYERS`] firms or for
/// [`GameKind::Synthetic`], which has no graph-derived evaluator.
pub fn make_game(g: &ISGraph, kind: GameKind, w: &AggregationWeights) -> CharacteristicGame {
    let n = g.firm_count();
    let graph = Arc::new(g.clone());
    graph.centralities();
    let totals = GraphTotals::new(&graph);
    match kind {
        GameKind::Physical => {
            CharacteristicGame::with_kind(n, kind, move |s| physical_value(&graph, s))
        }
        GameKind::Institutional => {
            CharacteristicGame::with_kind(n, kind, move |s| institutional_value(&graph, s))
        }
        GameKind::NormalizedPhysical => CharacteristicGame::with_kind(n, kind, move |s| {
            physical_value(&graph, s) / &totals.physical
        }),
        GameKind::NormalizedInstitutional => CharacteristicGame::with_kind(n, kind, move |s| {
            institutional_value(&graph, s) / &totals.institutional
        }),
        GameKind::Aggregated => {
            let w = w.clone();
            CharacteristicGame::with_kind(n, kind, move |s| totals.aggregated(&graph, s, &w))
        }
        GameKind::Synthetic => {
            panic!("synthetic games are built with CharacteristicGame::synthetic")
        }
    }
}
