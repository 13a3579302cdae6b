//! Command-line front end: graph documents in, tables or JSON out.
//!
//! Exit codes: 0 success, 1 domain error or property violation, 2 input or
//! parse error. Output is a pure function of the input file and flags.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::allocation::{self, allocate, column_width, TransactionCost};
use crate::error::{self, EnumerationLimitExceeded};
use crate::games::AggregationWeights;
use crate::graph::{ISGraph, RawEdge, RawGraph, ValidationErrors};
use crate::ratio::{self, Rational};
use crate::shapley;
use crate::verify::{self, PropertyReport};

/// Graph document schema version written by this crate.
pub const FORMAT_VERSION: &str = "1";

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub format_version: String,
    pub firms: Vec<String>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub a: String,
    pub b: String,
    /// Decimal (`"0.25"`) or rational (`"1/4"`) string.
    pub w: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(ValidationErrors),
    #[error("{0}")]
    Limit(EnumerationLimitExceeded),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 2,
            CliError::Invalid(_) | CliError::Limit(_) | CliError::Domain(_) => 1,
        }
    }
}

impl From<EnumerationLimitExceeded> for CliError {
    fn from(e: EnumerationLimitExceeded) -> Self {
        CliError::Limit(e)
    }
}

impl GraphDocument {
    /// Parses JSON text; errors carry the line and column or the field path.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| {
            CliError::Parse(format!(
                "parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        if doc.format_version != FORMAT_VERSION {
            return Err(CliError::Parse(format!(
                "field format_version: unsupported version {:?} (expected {FORMAT_VERSION:?})",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Converts weight strings exactly, reporting every malformed one.
    pub fn to_raw(&self) -> Result<RawGraph, CliError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut problems = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            match ratio::parse_rational(&e.w) {
                Ok(weight) => edges.push(RawEdge::new(e.a.clone(), e.b.clone(), weight)),
                Err(err) => problems.push(format!("field edges[{k}].w: {err}")),
            }
        }
        if !problems.is_empty() {
            return Err(CliError::Parse(problems.join("\n")));
        }
        Ok(RawGraph {
            firms: self.firms.clone(),
            edges,
        })
    }

    pub fn to_graph(&self) -> Result<ISGraph, CliError> {
        self.to_raw()?.validate().map_err(CliError::Invalid)
    }

    /// Document form of a validated graph.
    pub fn from_graph(g: &ISGraph) -> Self {
        GraphDocument {
            format_version: FORMAT_VERSION.to_string(),
            firms: g.firms().to_vec(),
            edges: g
                .edges()
                .map(|(i, j, w)| EdgeEntry {
                    a: g.firms()[i].clone(),
                    b: g.firms()[j].clone(),
                    w: ratio::to_fraction_string(w),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "symbiosis",
    version,
    about = "Transaction-cost allocation for industrial-symbiosis graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    GameProperties,
    Axioms,
    Core,
}

#[derive(Debug, clap::Args)]
pub struct WeightArgs {
    /// Weight of the normalized physical game.
    #[arg(long, default_value = "1")]
    pub alpha: String,
    /// Weight of the normalized institutional game.
    #[arg(long, default_value = "1")]
    pub beta: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph document and list every violation.
    Validate { path: PathBuf },
    /// Allocate a transaction cost among the firms.
    Allocate {
        path: PathBuf,
        /// Total transaction cost, decimal or p/q.
        #[arg(long)]
        tc: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, default_value_t = allocation::DEFAULT_PRECISION)]
        precision: u32,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Attach stability and core checks to the report.
        #[arg(long)]
        with_checks: bool,
    },
    /// Print each firm's IS index and its physical and institutional parts.
    Index {
        path: PathBuf,
        #[command(flatten)]
        weights: WeightArgs,
        /// Recompute by exact enumeration and require equality.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Print the closeness centrality of each firm.
    Centrality {
        path: PathBuf,
        #[arg(long, default_value_t = 4)]
        precision: u32,
    },
    /// Run property and axiom checks on a graph or on seeded random graphs.
    Check {
        path: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random graphs (2 to 7 firms) to check.
        #[arg(long)]
        trials: Option<usize>,
        /// Transaction cost used by the axiom suite.
        #[arg(long, default_value = "100")]
        tc: String,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut out = Outcome::default();
    match execute(&cli.command, &mut out.stdout) {
        Ok(code) => out.code = code,
        Err(e) => {
            out.code = e.exit_code();
            out.stderr = format!("error: {e}\n");
        }
    }
    out
}

fn parse_number(flag: &str, value: &str) -> Result<Rational, CliError> {
    ratio::parse_rational(value).map_err(|e| CliError::Parse(format!("--{flag}: {e}")))
}

fn weights_from(args: &WeightArgs) -> Result<AggregationWeights, CliError> {
    AggregationWeights::new(
        parse_number("alpha", &args.alpha)?,
        parse_number("beta", &args.beta)?,
    )
    .map_err(|e| CliError::Domain(e.to_string()))
}

fn transaction_cost(value: &str) -> Result<TransactionCost, CliError> {
    TransactionCost::new(parse_number("tc", value)?)
        .map_err(|e| CliError::Domain(format!("InvalidTransactionCost: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn execute(command: &Command, out: &mut String) -> Result<i32, CliError> {
    match command {
        Command::Validate { path } => {
            let doc = GraphDocument::load(path)?;
            match doc.to_raw()?.validate() {
                Ok(g) => {
                    let _ = writeln!(
                        out,
                        "valid: {} firms, {} edges",
                        g.firm_count(),
                        g.edge_count()
                    );
                    Ok(0)
                }
                Err(errors) => {
                    for e in &errors.0 {
                        let _ = writeln!(out, "{}: {e}", e.kind());
                    }
                    Ok(1)
                }
            }
        }
        Command::Allocate {
            path,
            tc,
            weights,
            precision,
            format,
            with_checks,
        } => {
            let w = weights_from(weights)?;
            let tc = transaction_cost(tc)?;
            let g = GraphDocument::load(path)?.to_graph()?;
            let mut report = allocate(&g, &tc, &w).with_precision(*precision);
            let mut code = 0;
            if *with_checks {
                let mut checks = vec![verify::check_stability(&report)];
                match verify::check_index_in_core(&g, &w) {
                    Ok(r) => checks.push(r),
                    Err(e) => {
                        return Err(CliError::Domain(format!("core check skipped: {e}")));
                    }
                }
                if checks.iter().any(|c| !c.holds) {
                    code = 1;
                }
                report = report.with_axiom_summary(checks);
            }
            match format {
                Format::Table => out.push_str(&report.render_table()),
                Format::Json => out.push_str(&to_json(&report.to_json())),
            }
            Ok(code)
        }
        Command::Index {
            path,
            weights,
            exact,
            format,
        } => {
            let w = weights_from(weights)?;
            let g = GraphDocument::load(path)?.to_graph()?;
            let index = shapley::is_index(&g, &w);
            let oracle_matches = if *exact {
                let tc = TransactionCost::new(Rational::from_integer(1.into())).expect("1 > 0");
                let oracle = allocation::allocate_exact_oracle(&g, &tc, &w)?;
                Some(oracle.index == index)
            } else {
                None
            };
            match format {
                Format::Table => out.push_str(&index_table(&g, &index)),
                Format::Json => {
                    let rows: Vec<allocation::IndexJson> = g
                        .firms()
                        .iter()
                        .zip(&index.entries)
                        .map(|(firm, e)| allocation::IndexJson {
                            firm: firm.clone(),
                            physical: ratio::to_fraction_string(&e.physical),
                            institutional: ratio::to_fraction_string(&e.institutional),
                            sigma: ratio::to_fraction_string(&e.sigma),
                        })
                        .collect();
                    out.push_str(&to_json(&rows));
                }
            }
            match oracle_matches {
                Some(true) => {
                    if *format == Format::Table {
                        out.push_str("oracle: match\n");
                    }
                    Ok(0)
                }
                Some(false) => Err(CliError::Domain(
                    "oracle: MISMATCH between closed form and exact enumeration".into(),
                )),
                None => Ok(0),
            }
        }
        Command::Centrality { path, precision } => {
            let g = GraphDocument::load(path)?.to_graph()?;
            let exact: Vec<String> = g
                .centralities()
                .iter()
                .map(ratio::to_fraction_string)
                .collect();
            let decimal: Vec<String> = g
                .centralities()
                .iter()
                .map(|c| ratio::render_decimal(c, *precision))
                .collect();
            let wf = column_width("firm", g.firms());
            let we = column_width("closeness", &exact);
            let wd = column_width("decimal", &decimal);
            let _ = writeln!(
                out,
                "{:<wf$}  {:>we$}  {:>wd$}",
                "firm", "closeness", "decimal"
            );
            for i in 0..g.firm_count() {
                let _ = writeln!(
                    out,
                    "{:<wf$}  {:>we$}  {:>wd$}",
                    g.firms()[i],
                    exact[i],
                    decimal[i]
                );
            }
            Ok(0)
        }
        Command::Check {
            path,
            suite,
            seed,
            trials,
            tc,
            weights,
            format,
        } => {
            let w = weights_from(weights)?;
            let tc = transaction_cost(tc)?;
            let mut graphs: Vec<(String, ISGraph)> = Vec::new();
            if let Some(path) = path {
                graphs.push((
                    path.display().to_string(),
                    GraphDocument::load(path)?.to_graph()?,
                ));
            }
            if let Some(k) = trials {
                for (t, g) in verify::random_graphs(*seed, *k, 2, 7)
                    .into_iter()
                    .enumerate()
                {
                    graphs.push((format!("random#{t} (seed {seed}, n={})", g.firm_count()), g));
                }
            }
            if graphs.is_empty() {
                return Err(CliError::Parse(
                    "check needs a graph path or --trials".into(),
                ));
            }
            let mut results = Vec::with_capacity(graphs.len());
            for (name, g) in &graphs {
                results.push(CheckResult {
                    graph: name.clone(),
                    reports: run_suite(g, *suite, &tc, &w)?,
                });
            }
            let failed = results
                .iter()
                .flat_map(|r| &r.reports)
                .filter(|r| !r.holds)
                .count();
            match format {
                Format::Json => out.push_str(&to_json(&results)),
                Format::Table => {
                    for r in &results {
                        let _ = writeln!(out, "{}", r.graph);
                        for p in &r.reports {
                            let _ = writeln!(out, "  {}", p.to_string().replace('\n', "\n  "));
                        }
                    }
                    let total: usize = results.iter().map(|r| r.reports.len()).sum();
                    let _ = writeln!(
                        out,
                        "{} graph(s), {total} check(s), {failed} failed",
                        results.len()
                    );
                }
            }
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

#[derive(Debug, Serialize)]
struct CheckResult {
    graph: String,
    reports: Vec<PropertyReport>,
}

fn run_suite(
    g: &ISGraph,
    suite: Suite,
    tc: &TransactionCost,
    w: &AggregationWeights,
) -> Result<Vec<PropertyReport>, EnumerationLimitExceeded> {
    let mut reports = Vec::new();
    if matches!(suite, Suite::All | Suite::GameProperties) {
        reports.extend(verify::check_game_properties(g, w)?);
    }
    if matches!(suite, Suite::All | Suite::Axioms) {
        reports.extend(verify::check_fairness_axioms(g, tc, w, None)?);
        let report = allocate(g, tc, w);
        error::ensure_within(g.firm_count(), verify::CHECK_LIMIT)?;
        reports.push(verify::check_stability(&report));
    }
    if matches!(suite, Suite::All | Suite::Core) {
        reports.push(verify::check_index_in_core(g, w)?);
    }
    Ok(reports)
}

fn index_table(g: &ISGraph, index: &shapley::ISIndexVector) -> String {
    let col = |f: fn(&shapley::IndexEntry) -> &Rational| -> Vec<String> {
        index
            .entries
            .iter()
            .map(|e| ratio::to_fraction_string(f(e)))
            .collect()
    };
    let physical = col(|e| &e.physical);
    let institutional = col(|e| &e.institutional);
    let sigma = col(|e| &e.sigma);
    let wf = column_width("firm", g.firms());
    let wp = column_width("physical", &physical);
    let wi = column_width("institutional", &institutional);
    let ws = column_width("sigma", &sigma);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<wf$}  {:>wp$}  {:>wi$}  {:>ws$}",
        "firm", "physical", "institutional", "sigma"
    );
    for i in 0..g.firm_count() {
        let _ = writeln!(
            out,
            "{:<wf$}  {:>wp$}  {:>wi$}  {:>ws$}",
            g.firms()[i],
            physical[i],
            institutional[i],
            sigma[i]
        );
    }
    let _ = writeln!(out, "total sigma {}", ratio::Fraction(&index.sigma_total()));
    out
}
