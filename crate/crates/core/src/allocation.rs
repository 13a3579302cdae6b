//! Transaction-cost allocation: `T_i = Φ_i(σ) · τ(Γ) / σ(Γ)`.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{self, EnumerationLimitExceeded};
use crate::games::{make_game, AggregationWeights, GameKind};
use crate::graph::ISGraph;
use crate::ratio::{self, Fraction, Rational};
use crate::shapley::{self, ISIndexVector, IndexEntry};
use crate::verify::PropertyReport;

/// Default number of decimals in rendered shares.
pub const DEFAULT_PRECISION: u32 = 2;

/// The collective transaction cost `τ(Γ)` to be shared. Always positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionCost(Rational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("transaction cost must be positive, got {0}")]
pub struct InvalidTransactionCost(pub String);

impl TransactionCost {
    pub fn new(total: Rational) -> Result<Self, InvalidTransactionCost> {
        if total.is_positive() {
            Ok(TransactionCost(total))
        } else {
            Err(InvalidTransactionCost(ratio::to_fraction_string(&total)))
        }
    }

    pub fn total(&self) -> &Rational {
        &self.0
    }
}

/// Per-firm cost shares together with the index they were derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationReport {
    pub firms: Vec<String>,
    pub shares: Vec<Rational>,
    pub index: ISIndexVector,
    pub tc: TransactionCost,
    pub weights: AggregationWeights,
    /// `Σ shares − τ(Γ)`; zero for every report produced by this module.
    pub efficiency_residual: Rational,
    pub precision: u32,
    pub axiom_summary: Option<Vec<PropertyReport>>,
}

impl AllocationReport {
    fn build(
        g: &ISGraph,
        index: ISIndexVector,
        divisor: &Rational,
        tc: &TransactionCost,
        w: &AggregationWeights,
    ) -> Self {
        let shares: Vec<Rational> = index
            .entries
            .iter()
            .map(|e| &e.sigma * tc.total() / divisor)
            .collect();
        let efficiency_residual = ratio::sum(&shares) - tc.total();
        AllocationReport {
            firms: g.firms().to_vec(),
            shares,
            index,
            tc: tc.clone(),
            weights: w.clone(),
            efficiency_residual,
            precision: DEFAULT_PRECISION,
            axiom_summary: None,
        }
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_axiom_summary(mut self, checks: Vec<PropertyReport>) -> Self {
        self.axiom_summary = Some(checks);
        self
    }

    pub fn firm_count(&self) -> usize {
        self.shares.len()
    }

    /// True iff the shares sum to `τ(Γ)` exactly.
    pub fn efficiency_certificate(&self) -> bool {
        self.efficiency_residual.is_zero()
    }

    pub fn shares_rendered(&self) -> Vec<String> {
        self.shares
            .iter()
            .map(|s| ratio::render_decimal(s, self.precision))
            .collect()
    }

    /// Machine-readable form; every number is an exact `p/q` string except
    /// the explicitly rendered shares.
    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            firms: self.firms.clone(),
            shares_exact: self.shares.iter().map(ratio::to_fraction_string).collect(),
            shares_rendered: self.shares_rendered(),
            precision: self.precision,
            tau: ratio::to_fraction_string(self.tc.total()),
            alpha: ratio::to_fraction_string(self.weights.alpha()),
            beta: ratio::to_fraction_string(self.weights.beta()),
            index: self
                .firms
                .iter()
                .zip(&self.index.entries)
                .map(|(firm, e)| IndexJson {
                    firm: firm.clone(),
                    physical: ratio::to_fraction_string(&e.physical),
                    institutional: ratio::to_fraction_string(&e.institutional),
                    sigma: ratio::to_fraction_string(&e.sigma),
                })
                .collect(),
            efficiency_residual: ratio::to_fraction_string(&self.efficiency_residual),
            checks: self.axiom_summary.clone(),
        }
    }

    /// Aligned plain-text table.
    pub fn render_table(&self) -> String {
        let rendered = self.shares_rendered();
        let exact: Vec<String> = self.shares.iter().map(ratio::to_fraction_string).collect();
        let sigma: Vec<String> = self
            .index
            .entries
            .iter()
            .map(|e| ratio::to_fraction_string(&e.sigma))
            .collect();
        let wf = column_width("firm", &self.firms);
        let wr = column_width("share", &rendered);
        let we = column_width("exact", &exact);
        let ws = column_width("index", &sigma);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "tau = {}  alpha = {}  beta = {}",
            Fraction(self.tc.total()),
            Fraction(self.weights.alpha()),
            Fraction(self.weights.beta())
        );
        let _ = writeln!(
            out,
            "{:<wf$}  {:>wr$}  {:>we$}  {:>ws$}",
            "firm", "share", "exact", "index"
        );
        for i in 0..self.firm_count() {
            let _ = writeln!(
                out,
                "{:<wf$}  {:>wr$}  {:>we$}  {:>ws$}",
                self.firms[i], rendered[i], exact[i], sigma[i]
            );
        }
        let _ = writeln!(
            out,
            "total {}  efficiency residual {}",
            Fraction(&ratio::sum(&self.shares)),
            Fraction(&self.efficiency_residual)
        );
        if let Some(checks) = &self.axiom_summary {
            for c in checks {
                let _ = writeln!(out, "{c}");
            }
        }
        out
    }
}

pub(crate) fn column_width(header: &str, cells: &[String]) -> usize {
    cells
        .iter()
        .map(|c| c.chars().count())
        .chain(std::iter::once(header.len()))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexJson {
    pub firm: String,
    pub physical: String,
    pub institutional: String,
    pub sigma: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportJson {
    pub firms: Vec<String>,
    pub shares_exact: Vec<String>,
    pub shares_rendered: Vec<String>,
    pub precision: u32,
    pub tau: String,
    pub alpha: String,
    pub beta: String,
    pub index: Vec<IndexJson>,
    pub efficiency_residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<PropertyReport>>,
}

/// Allocates `τ(Γ)` through the closed-form IS index.
///
/// No characteristic function is evaluated on any coalition: only weight
/// rows and closeness centralities are read, and `σ(Γ)` is `α + β`.
pub fn allocate(g: &ISGraph, tc: &TransactionCost, w: &AggregationWeights) -> AllocationReport {
    let index = shapley::is_index(g, w);
    let divisor = w.total();
    debug_assert!(
        g.firm_count() > 16
            || divisor
                == crate::games::aggregated_value(
                    g,
                    crate::games::Coalition::grand(g.firm_count()),
                    w
                )
    );
    AllocationReport::build(g, index, &divisor, tc, w)
}

/// Recomputes the allocation by exact enumeration of `σ`, `α·v̄` and `β·ῑ`.
pub fn allocate_exact_oracle(
    g: &ISGraph,
    tc: &TransactionCost,
    w: &AggregationWeights,
) -> Result<AllocationReport, EnumerationLimitExceeded> {
    allocate_exact_oracle_with_limit(g, tc, w, error::enumeration_limit())
}

pub fn allocate_exact_oracle_with_limit(
    g: &ISGraph,
    tc: &TransactionCost,
    w: &AggregationWeights,
    limit: usize,
) -> Result<AllocationReport, EnumerationLimitExceeded> {
    error::ensure_within(g.firm_count(), limit)?;
    let sigma = make_game(g, GameKind::Aggregated, w);
    let physical = make_game(g, GameKind::NormalizedPhysical, w).scaled(w.alpha().clone());
    let institutional = make_game(g, GameKind::NormalizedInstitutional, w).scaled(w.beta().clone());

    let phi_sigma = shapley::shapley_exact_all_with_limit(&sigma, limit)?;
    let phi_physical = shapley::shapley_exact_all_with_limit(&physical, limit)?;
    let phi_institutional = shapley::shapley_exact_all_with_limit(&institutional, limit)?;
    let entries = phi_physical
        .into_iter()
        .zip(phi_institutional)
        .zip(phi_sigma)
        .map(|((physical, institutional), sigma)| IndexEntry {
            physical,
            institutional,
            sigma,
        })
        .collect();
    let divisor = sigma.grand_value();
    Ok(AllocationReport::build(
        g,
        ISIndexVector { entries },
        &divisor,
        tc,
        w,
    ))
}
