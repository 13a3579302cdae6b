//! Shapley values: exact subset enumeration and the closed forms for IS games.
//!
//! The enumeration path works for any [`CharacteristicGame`] and serves as
//! the oracle. The closed forms read only a firm's weight row and its
//! closeness centrality:
//!
//! * physical game: `φ_i(v) = Σ_j W_ij / 2`
//! * institutional game: `φ_i(ι) = 𝔠(i)`
//!
//! and by linearity `Φ_i(σ) = α·φ_i(v)/v(Γ) + β·𝔠(i)/ι(Γ)`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{self, EnumerationLimitExceeded};
use crate::games::{AggregationWeights, CharacteristicGame, Coalition};
use crate::graph::ISGraph;
use crate::ratio::{self, Rational};

/// `|S|!(n-|S|-1)!/n!` for every `|S|` in `0..n`.
fn size_weights(n: usize) -> Vec<Rational> {
    let facts: Vec<BigInt> = (0..=n).map(ratio::factorial).collect();
    (0..n)
        .map(|s| Rational::new(&facts[s] * &facts[n - s - 1], facts[n].clone()))
        .collect()
}

/// Exact Shapley value of player `i`, with the default enumeration limit.
pub fn shapley_exact(
    game: &CharacteristicGame,
    i: usize,
) -> Result<Rational, EnumerationLimitExceeded> {
    shapley_exact_with_limit(game, i, error::enumeration_limit())
}

/// Exact Shapley value of player `i` by summing weighted marginal
/// contributions over every `S ⊆ Γ∖{i}`.
pub fn shapley_exact_with_limit(
    game: &CharacteristicGame,
    i: usize,
    limit: usize,
) -> Result<Rational, EnumerationLimitExceeded> {
    let n = game.firm_count();
    error::ensure_within(n, limit)?;
    assert!(i < n, "player {i} out of range for {n} players");
    let weights = size_weights(n);
    // Marginals are accumulated per coalition size, then weighted once.
    let mut by_size = vec![Rational::zero(); n];
    for s in game.grand().without(i).subsets() {
        by_size[s.len()] += game.evaluate(s.with(i)) - game.evaluate(s);
    }
    Ok(weighted_sum(&weights, &by_size))
}

/// Exact Shapley values of every player, evaluating each coalition once.
pub fn shapley_exact_all(
    game: &CharacteristicGame,
) -> Result<Vec<Rational>, EnumerationLimitExceeded> {
    shapley_exact_all_with_limit(game, error::enumeration_limit())
}

pub fn shapley_exact_all_with_limit(
    game: &CharacteristicGame,
    limit: usize,
) -> Result<Vec<Rational>, EnumerationLimitExceeded> {
    let n = game.firm_count();
    error::ensure_within(n, limit)?;
    Ok(shapley_from_table(n, &game.table()))
}

/// Shapley values from a `2^n` table of coalition values.
pub(crate) fn shapley_from_table(n: usize, table: &[Rational]) -> Vec<Rational> {
    let weights = size_weights(n);
    let grand = Coalition::grand(n);
    (0..n)
        .map(|i| {
            let mut by_size = vec![Rational::zero(); n];
            for s in grand.without(i).subsets() {
                let with = s.with(i);
                by_size[s.len()] += &table[with.bits() as usize] - &table[s.bits() as usize];
            }
            weighted_sum(&weights, &by_size)
        })
        .collect()
}

fn weighted_sum(weights: &[Rational], by_size: &[Rational]) -> Rational {
    weights
        .iter()
        .zip(by_size)
        .fold(Rational::zero(), |acc, (w, m)| acc + w * m)
}

/// `Σ_j W_ij / 2`: Shapley value of `i` in the (un-normalized) physical game.
pub fn shapley_physical_closed(g: &ISGraph, i: usize) -> Rational {
    g.incident_weight(i) / Rational::from_integer(2.into())
}

/// `𝔠(i)`: Shapley value of `i` in the (un-normalized) institutional game.
pub fn shapley_institutional_closed(g: &ISGraph, i: usize) -> Rational {
    g.closeness_centrality(i)
}

/// One firm's IS index and its two components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    /// `α · φ_i(v̄)`
    pub physical: Rational,
    /// `β · φ_i(ῑ)`
    pub institutional: Rational,
    /// `Φ_i(σ)`, the sum of the two.
    pub sigma: Rational,
}

impl IndexEntry {
    pub fn new(physical: Rational, institutional: Rational) -> Self {
        let sigma = &physical + &institutional;
        IndexEntry {
            physical,
            institutional,
            sigma,
        }
    }
}

/// Per-firm IS indices; the `sigma` column sums to `α + β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ISIndexVector {
    pub entries: Vec<IndexEntry>,
}

impl ISIndexVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn physical(&self) -> Vec<Rational> {
        self.entries.iter().map(|e| e.physical.clone()).collect()
    }

    pub fn institutional(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .map(|e| e.institutional.clone())
            .collect()
    }

    pub fn sigma(&self) -> Vec<Rational> {
        self.entries.iter().map(|e| e.sigma.clone()).collect()
    }

    pub fn sigma_total(&self) -> Rational {
        ratio::sum(self.entries.iter().map(|e| &e.sigma))
    }
}

/// IS index of every firm via the closed forms; polynomial in the graph size.
pub fn is_index(g: &ISGraph, w: &AggregationWeights) -> ISIndexVector {
    let physical_total = g.total_weight();
    let institutional_total = ratio::sum(g.centralities());
    let entries = (0..g.firm_count())
        .map(|i| {
            let physical = w.alpha() * shapley_physical_closed(g, i) / &physical_total;
            let institutional =
                w.beta() * shapley_institutional_closed(g, i) / &institutional_total;
            IndexEntry::new(physical, institutional)
        })
        .collect();
    ISIndexVector { entries }
}
