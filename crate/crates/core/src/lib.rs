//! Fair and stable transaction-cost allocation for industrial-symbiosis
//! networks.
//!
//! A weighted connectivity graph of firms ([`graph::ISGraph`]) induces two
//! cooperative games: a physical game valuing the cost reductions realized
//! inside each coalition, and an institutional game valuing the members'
//! closeness centralities. Their normalized, weighted sum `σ` is shared by
//! Shapley value, and a collective transaction cost is split in proportion.
//!
//! All arithmetic is exact ([`ratio::Rational`]); decimals only appear when
//! rendering.
//!
//! ```
//! use symbiosis::allocation::{allocate, TransactionCost};
//! use symbiosis::games::AggregationWeights;
//! use symbiosis::graph::RawGraph;
//! use symbiosis::ratio::int;
//!
//! let g = RawGraph::new(["A", "B", "C"])
//!     .edge("A", "B", int(4))
//!     .edge("B", "C", int(2))
//!     .validate()
//!     .unwrap();
//! let tc = TransactionCost::new(int(100)).unwrap();
//! let report = allocate(&g, &tc, &AggregationWeights::default());
//! assert_eq!(report.shares_rendered(), ["30.95", "46.43", "22.62"]);
//! assert!(report.efficiency_certificate());
//! ```

pub mod allocation;
pub mod cli;
pub mod error;
pub mod games;
pub mod graph;
pub mod ratio;
pub mod shapley;
pub mod verify;

pub use allocation::{allocate, allocate_exact_oracle, AllocationReport, TransactionCost};
pub use error::EnumerationLimitExceeded;
pub use games::{AggregationWeights, CharacteristicGame, Coalition, GameKind};
pub use graph::{ISGraph, RawGraph};
pub use shapley::{is_index, ISIndexVector};
