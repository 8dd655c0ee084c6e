//! Command-line front end: copy counts and densities, inducibility bound
//! reports, exhaustive maximum-density search, convergence tables, and the
//! even-tree extremality check.
//!
//! Trees are written in the bracket format (`*` leaf, `-` empty,
//! `(a,b,...)` internal) or as shorthands: `E<d>:<k>` even tree, `H<d>:<n>`
//! strict even tree, `C<d>:<h>` complete tree, `Cat:<k>` binary
//! caterpillar. The host argument of `count` may also name a file whose
//! contents are the tree text.
//!
//! Exit codes: 0 success, 2 input error, 3 cap exceeded. Identical
//! invocations print byte-identical output (the heuristic simplex search is
//! seeded).

mod output;

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::{json, Value};

use inducibility::bounds::{
    eta, rational_json, BoundsEngine, BoundsError, BoundsOptions, NumericOptions,
};
use inducibility::combinatorics::binomial;
use inducibility::counting::{count_copies_bruteforce, CopyCounter, CountError};
use inducibility::search::{
    conjecture_check, convergence_csv, convergence_table, max_density, SearchCaps, SearchError,
};
use inducibility::tree::{
    caterpillar, complete_tree, even_tree, parse_tree, strict_even_tree, Arity, Tree, TreeError,
};
use output::{decimal12, ratio, ratio_with_decimal, sig12};

#[derive(Parser)]
#[command(
    name = "inducibility",
    version,
    about = "Exact leaf-induced-subtree densities and inducibility bounds for d-ary trees"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Arity bound d (default: inferred from shorthands, else 2).
    #[arg(long, global = true, env = "INDUCIBILITY_D")]
    d: Option<u32>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text, env = "INDUCIBILITY_FORMAT")]
    format: Format,

    /// Cap on leaf subsets scanned by the brute-force counter.
    #[arg(
        long = "cap-subsets",
        global = true,
        default_value_t = 10_000_000,
        env = "INDUCIBILITY_CAP_SUBSETS"
    )]
    cap_subsets: u64,

    /// Cap on isomorphism classes scanned by a search.
    #[arg(
        long = "cap-trees",
        global = true,
        default_value_t = 1_000_000,
        env = "INDUCIBILITY_CAP_TREES"
    )]
    cap_trees: u64,

    /// Numeric tolerance for the heuristic supremum search, in (0, 1e-3].
    #[arg(long, global = true, default_value_t = 1e-9, env = "INDUCIBILITY_TOL")]
    tol: f64,

    /// Seed for the deterministic simplex-search starts.
    #[arg(long, global = true, default_value_t = 0, env = "INDUCIBILITY_SEED")]
    seed: u64,

    /// Restrict search populations to strictly d-ary trees.
    #[arg(long, global = true, env = "INDUCIBILITY_STRICT")]
    strict: bool,

    /// Count by subset enumeration instead of the branch recursion.
    #[arg(long, global = true, env = "INDUCIBILITY_BRUTEFORCE")]
    bruteforce: bool,

    /// Accept the uniform-supremum closed form for binary trees whose
    /// branch sizes differ by exactly two (sharper but unproven).
    #[arg(long = "assume-gap2", global = true, env = "INDUCIBILITY_ASSUME_GAP2")]
    assume_gap2: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Copy count and density of a pattern inside a host tree.
    Count {
        /// Host tree: literal, shorthand, or a file containing one.
        host: String,
        /// Pattern tree: literal or shorthand.
        pattern: String,
    },
    /// Lower/upper bound report (with exactness certificate when known).
    Bounds { tree: String },
    /// Exact maximum density over all trees with a given leaf count.
    Search {
        pattern: String,
        /// Host leaf count (strict index when --strict is set).
        #[arg(long)]
        n: u64,
    },
    /// Per-size maximum densities against a reference lower bound.
    Converge {
        pattern: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Reference value as `num/den` (default: the strict-even limit η).
        #[arg(long)]
        reference: Option<String>,
    },
    /// Check that even trees maximize the copy count of an even pattern.
    Conjecture {
        /// Pattern leaf count (the even tree with k leaves).
        #[arg(long)]
        k: u64,
        /// Largest host size to scan.
        #[arg(long = "n-max")]
        n_max: u64,
    },
}

enum CliError {
    Input(String),
    Cap(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Cap(m) => m,
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            SearchError::Count(inner) => CliError::from(inner),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// A tree argument before the arity is fixed.
enum TreeSpec {
    Literal(String),
    Even { d: u32, k: u64 },
    StrictEven { d: u32, n: u64 },
    Complete { d: u32, h: u32 },
    Caterpillar { k: u64 },
}

impl TreeSpec {
    fn parse(text: &str) -> Result<TreeSpec, CliError> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("Cat:") {
            let k = parse_number(rest, "caterpillar leaf count")?;
            return Ok(TreeSpec::Caterpillar { k });
        }
        for (prefix, kind) in [("E", 0u8), ("H", 1), ("C", 2)] {
            if let Some(rest) = text.strip_prefix(prefix) {
                if let Some((d_text, value_text)) = rest.split_once(':') {
                    if d_text.chars().all(|c| c.is_ascii_digit()) && !d_text.is_empty() {
                        let d: u32 = parse_number(d_text, "shorthand arity")? as u32;
                        if d < 2 {
                            return Err(CliError::Input(format!(
                                "shorthand arity must be at least 2, got {d}"
                            )));
                        }
                        let value = parse_number(value_text, "shorthand index")?;
                        return Ok(match kind {
                            0 => TreeSpec::Even { d, k: value },
                            1 => TreeSpec::StrictEven { d, n: value },
                            _ => TreeSpec::Complete {
                                d,
                                h: u32::try_from(value)
                                    .map_err(|_| CliError::Input("height too large".into()))?,
                            },
                        });
                    }
                }
            }
        }
        Ok(TreeSpec::Literal(text.to_owned()))
    }

    fn implied_arity(&self) -> Option<u32> {
        match self {
            TreeSpec::Even { d, .. }
            | TreeSpec::StrictEven { d, .. }
            | TreeSpec::Complete { d, .. } => Some(*d),
            TreeSpec::Caterpillar { .. } => Some(2),
            TreeSpec::Literal(_) => None,
        }
    }

    fn build(&self, d: Arity) -> Result<Tree, CliError> {
        // Generated trees are capped by leaf count; caterpillars tighter,
        // since their canonical keys grow with the square of the size.
        const MAX_GENERATED_LEAVES: u64 = 1_000_000;
        const MAX_CATERPILLAR_LEAVES: u64 = 2_048;
        let too_big = |what: &str, leaves: u64, max: u64| {
            CliError::Input(format!("{what} with {leaves} leaves exceeds the limit of {max}"))
        };
        let tree = match self {
            TreeSpec::Literal(text) => parse_tree(text, d)?,
            TreeSpec::Even { d: gd, k } => {
                if *k > MAX_GENERATED_LEAVES {
                    return Err(too_big("even tree", *k, MAX_GENERATED_LEAVES));
                }
                even_tree(Arity::new(*gd)?, *k)
            }
            TreeSpec::StrictEven { d: gd, n } => {
                let leaves = u64::from(*gd - 1).saturating_mul(*n).saturating_add(1);
                if leaves > MAX_GENERATED_LEAVES {
                    return Err(too_big("strict even tree", leaves, MAX_GENERATED_LEAVES));
                }
                strict_even_tree(Arity::new(*gd)?, *n)
            }
            TreeSpec::Complete { d: gd, h } => {
                if u64::from(*gd)
                    .checked_pow(*h)
                    .is_none_or(|l| l > MAX_GENERATED_LEAVES)
                {
                    return Err(CliError::Input(format!(
                        "complete tree of height {h} exceeds the leaf limit of {MAX_GENERATED_LEAVES}"
                    )));
                }
                complete_tree(Arity::new(*gd)?, *h)
            }
            TreeSpec::Caterpillar { k } => {
                if *k < 1 {
                    return Err(CliError::Input(
                        "caterpillar needs at least one leaf".into(),
                    ));
                }
                if *k > MAX_CATERPILLAR_LEAVES {
                    return Err(too_big("caterpillar", *k, MAX_CATERPILLAR_LEAVES));
                }
                caterpillar(*k)
            }
        };
        tree.validate_arity(d)?;
        Ok(tree)
    }
}

fn parse_number(text: &str, what: &str) -> Result<u64, CliError> {
    text.trim()
        .parse::<u64>()
        .map_err(|_| CliError::Input(format!("invalid {what}: {text:?}")))
}

fn parse_rational(text: &str) -> Result<BigRational, CliError> {
    let err = || {
        CliError::Input(format!(
            "invalid rational {text:?}; expected num/den or integer"
        ))
    };
    let text = text.trim();
    let (num_text, den_text) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num = num_text.trim().parse::<num::BigInt>().map_err(|_| err())?;
    let den = den_text.trim().parse::<num::BigInt>().map_err(|_| err())?;
    if den == num::BigInt::from(0) {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// Reads the argument from a file when one exists at that path, otherwise
/// treats it as tree text.
fn spec_or_file(arg: &str) -> Result<TreeSpec, CliError> {
    if std::path::Path::new(arg).is_file() {
        let contents = std::fs::read_to_string(arg)
            .map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?;
        TreeSpec::parse(contents.trim())
    } else {
        TreeSpec::parse(arg)
    }
}

fn resolve_arity(config: &ConfigArgs, specs: &[&TreeSpec]) -> Result<Arity, CliError> {
    let implied = specs.iter().filter_map(|s| s.implied_arity()).max();
    let d = config.d.or(implied).unwrap_or(2);
    Ok(Arity::new(d)?)
}

fn bounds_options(config: &ConfigArgs) -> Result<BoundsOptions, CliError> {
    if !(config.tol > 0.0 && config.tol <= 1e-3) {
        return Err(CliError::Input(format!(
            "tolerance must lie in (0, 1e-3], got {}",
            config.tol
        )));
    }
    if config.cap_subsets == 0 || config.cap_trees == 0 {
        return Err(CliError::Input("caps must be positive".into()));
    }
    Ok(BoundsOptions {
        numeric: Some(NumericOptions {
            seed: config.seed,
            tolerance: config.tol,
            ..NumericOptions::default()
        }),
        assume_gap_two_supremum: config.assume_gap2,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(rendered) => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    // Validates tolerance and caps up front for every command.
    let opts = bounds_options(&cli.config)?;
    match &cli.command {
        Command::Count { host, pattern } => {
            let host_spec = spec_or_file(host)?;
            let pattern_spec = TreeSpec::parse(pattern)?;
            let d = resolve_arity(&cli.config, &[&host_spec, &pattern_spec])?;
            let host = host_spec.build(d)?;
            let pattern = pattern_spec.build(d)?;
            run_count(&cli.config, d, &host, &pattern)
        }
        Command::Bounds { tree } => {
            let spec = spec_or_file(tree)?;
            let d = resolve_arity(&cli.config, &[&spec])?;
            let tree = spec.build(d)?;
            run_bounds(&cli.config, d, &tree, &opts)
        }
        Command::Search { pattern, n } => {
            let spec = TreeSpec::parse(pattern)?;
            let d = resolve_arity(&cli.config, &[&spec])?;
            let pattern = spec.build(d)?;
            run_search(&cli.config, d, &pattern, *n)
        }
        Command::Converge {
            pattern,
            from,
            to,
            reference,
        } => {
            let spec = TreeSpec::parse(pattern)?;
            let d = resolve_arity(&cli.config, &[&spec])?;
            let pattern = spec.build(d)?;
            let reference = match reference {
                Some(text) => parse_rational(text)?,
                None => eta(&pattern, d)?,
            };
            run_converge(&cli.config, d, &pattern, (*from, *to), &reference)
        }
        Command::Conjecture { k, n_max } => {
            let d = Arity::new(cli.config.d.unwrap_or(2))?;
            run_conjecture(&cli.config, d, *k, *n_max)
        }
    }
}

fn run_count(
    config: &ConfigArgs,
    d: Arity,
    host: &Tree,
    pattern: &Tree,
) -> Result<String, CliError> {
    let (copies, method) = if config.bruteforce {
        (
            count_copies_bruteforce(pattern, host, config.cap_subsets)?,
            "subsets",
        )
    } else {
        (CopyCounter::new(pattern, d)?.count(host)?, "recursion")
    };
    let k = pattern.leaf_count();
    let n = host.leaf_count();
    let density =
        (k >= 1 && n >= k).then(|| BigRational::new(copies.clone().into(), binomial(n, k).into()));
    Ok(match config.format {
        Format::Json => render_json(&json!({
            "host": host.canon_key(),
            "pattern": pattern.canon_key(),
            "d": d.get(),
            "method": method,
            "copies": copies.to_string(),
            "density": density.as_ref().map(rational_json),
            "density_decimal": density.as_ref().map(decimal12),
        })),
        Format::Csv => {
            let mut out = String::from("copies,density_num,density_den,density_decimal\n");
            match &density {
                Some(g) => {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        copies,
                        g.numer(),
                        g.denom(),
                        decimal12(g)
                    )
                    .unwrap();
                }
                None => writeln!(out, "{copies},,,").unwrap(),
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "host: {host}  ({n} leaves, d = {d})").unwrap();
            writeln!(out, "pattern: {pattern}  ({k} leaves)").unwrap();
            writeln!(out, "method: {method}").unwrap();
            writeln!(out, "copies: {copies}").unwrap();
            match &density {
                Some(g) => writeln!(out, "density: {}", ratio_with_decimal(g)).unwrap(),
                None => writeln!(out, "density: undefined (pattern exceeds host)").unwrap(),
            }
            out
        }
    })
}

fn run_bounds(
    config: &ConfigArgs,
    d: Arity,
    tree: &Tree,
    opts: &BoundsOptions,
) -> Result<String, CliError> {
    if tree.is_empty() {
        // Density-one convention for the empty pattern.
        return Ok(match config.format {
            Format::Json => render_json(&json!({
                "tree": "-", "d": d.get(), "leaves": 0,
                "exact": {"value": {"num": "1", "den": "1"}, "certificate": "TwoLeaf"},
            })),
            Format::Csv => "kind,tag,num,den\nexact,TwoLeaf,1,1\n".to_owned(),
            Format::Text => {
                "tree: -  (0 leaves)\nexact: 1/1 = 1.00000000000 [TwoLeaf]\n".to_owned()
            }
        });
    }
    let mut engine = BoundsEngine::new(d, opts.clone());
    let report = engine.report(tree)?;
    Ok(match config.format {
        Format::Json => render_json(&report.to_json()),
        Format::Csv => {
            let mut out = String::from("kind,tag,num,den\n");
            writeln!(
                out,
                "eta,eta-limit,{},{}",
                report.eta.numer(),
                report.eta.denom()
            )
            .unwrap();
            if let Some((value, cert)) = &report.exact {
                writeln!(
                    out,
                    "exact,{},{},{}",
                    cert.tag(),
                    value.numer(),
                    value.denom()
                )
                .unwrap();
            }
            for b in &report.lower {
                writeln!(
                    out,
                    "lower,{},{},{}",
                    b.source.tag(),
                    b.value.numer(),
                    b.value.denom()
                )
                .unwrap();
            }
            for b in &report.upper {
                writeln!(
                    out,
                    "upper,{},{},{}",
                    b.source.tag(),
                    b.value.numer(),
                    b.value.denom()
                )
                .unwrap();
            }
            let best_lower = report.best_lower();
            let best_upper = report.best_upper();
            writeln!(
                out,
                "best_lower,,{},{}",
                best_lower.numer(),
                best_lower.denom()
            )
            .unwrap();
            writeln!(
                out,
                "best_upper,,{},{}",
                best_upper.numer(),
                best_upper.denom()
            )
            .unwrap();
            out
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "tree: {tree}  ({} leaves, d = {d})", tree.leaf_count()).unwrap();
            writeln!(out, "eta: {}", ratio_with_decimal(&report.eta)).unwrap();
            match &report.exact {
                Some((value, cert)) => {
                    writeln!(out, "exact: {} [{}]", ratio_with_decimal(value), cert.tag()).unwrap()
                }
                None => writeln!(out, "exact: unknown").unwrap(),
            }
            writeln!(out, "lower bounds:").unwrap();
            for b in &report.lower {
                writeln!(
                    out,
                    "  {:<24} {}",
                    b.source.tag(),
                    ratio_with_decimal(&b.value)
                )
                .unwrap();
            }
            writeln!(out, "upper bounds:").unwrap();
            for b in &report.upper {
                writeln!(
                    out,
                    "  {:<24} {}",
                    b.source.tag(),
                    ratio_with_decimal(&b.value)
                )
                .unwrap();
            }
            writeln!(
                out,
                "best interval: [{}, {}]",
                ratio(&report.best_lower()),
                ratio(&report.best_upper())
            )
            .unwrap();
            out
        }
    })
}

fn run_search(config: &ConfigArgs, d: Arity, pattern: &Tree, n: u64) -> Result<String, CliError> {
    // `n` is the host leaf count; in strict mode an incompatible residue is
    // an input error surfaced by the enumerator.
    let caps = SearchCaps {
        trees: config.cap_trees,
    };
    let result = max_density(pattern, d, n, config.strict, &caps)?;
    Ok(match config.format {
        Format::Json => render_json(&json!({
            "pattern": pattern.canon_key(),
            "d": d.get(),
            "n": n,
            "strict": config.strict,
            "max_density": rational_json(&result.max_density),
            "max_density_decimal": decimal12(&result.max_density),
            "max_count": result.max_count.to_string(),
            "trees_scanned": result.trees_scanned,
            "argmax": result.argmax.iter().map(|t| t.canon_key()).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("n,max_density_num,max_density_den,tree\n");
            for t in &result.argmax {
                writeln!(
                    out,
                    "{},{},{},{}",
                    n,
                    result.max_density.numer(),
                    result.max_density.denom(),
                    t
                )
                .unwrap();
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "pattern: {pattern}  (d = {d}, {n} leaves, strict = {})",
                config.strict
            )
            .unwrap();
            writeln!(
                out,
                "max density: {}",
                ratio_with_decimal(&result.max_density)
            )
            .unwrap();
            writeln!(out, "trees scanned: {}", result.trees_scanned).unwrap();
            writeln!(out, "argmax ({} classes):", result.argmax.len()).unwrap();
            for t in &result.argmax {
                writeln!(out, "  {t}").unwrap();
            }
            out
        }
    })
}

fn run_converge(
    config: &ConfigArgs,
    d: Arity,
    pattern: &Tree,
    range: (u64, u64),
    reference: &BigRational,
) -> Result<String, CliError> {
    let caps = SearchCaps {
        trees: config.cap_trees,
    };
    let rows = convergence_table(pattern, d, range, config.strict, reference, &caps)?;
    Ok(match config.format {
        Format::Csv => convergence_csv(&rows),
        Format::Json => render_json(&json!({
            "pattern": pattern.canon_key(),
            "d": d.get(),
            "strict": config.strict,
            "reference": rational_json(reference),
            "rows": rows.iter().map(|r| json!({
                "n": r.n,
                "leaves": r.leaves,
                "max_density": rational_json(&r.max_density),
                "gap": rational_json(&r.gap),
                "n_times_gap": r.n_times_gap,
            })).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "pattern: {pattern}  (d = {d}, strict = {}, reference = {})",
                config.strict,
                ratio(reference)
            )
            .unwrap();
            writeln!(
                out,
                "{:>5} {:>7} {:>24} {:>24} {:>14}",
                "n", "leaves", "max_density", "gap", "n*gap"
            )
            .unwrap();
            for r in &rows {
                writeln!(
                    out,
                    "{:>5} {:>7} {:>24} {:>24} {:>14}",
                    r.n,
                    r.leaves,
                    ratio(&r.max_density),
                    ratio(&r.gap),
                    sig12(r.n_times_gap)
                )
                .unwrap();
            }
            out
        }
    })
}

fn run_conjecture(config: &ConfigArgs, d: Arity, k: u64, n_max: u64) -> Result<String, CliError> {
    let caps = SearchCaps {
        trees: config.cap_trees,
    };
    let report = conjecture_check(d, k, n_max, &caps)?;
    Ok(match config.format {
        Format::Json => render_json(&json!({
            "d": d.get(),
            "k": k,
            "n_max": n_max,
            "holds": report.holds(),
            "counterexamples": report.counterexamples,
            "rows": report.rows.iter().map(|r| json!({
                "n": r.n,
                "max_count": r.max_count.to_string(),
                "even_count": r.even_count.to_string(),
                "even_is_argmax": r.even_is_argmax,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("n,max_count,even_count,even_is_argmax\n");
            for r in &report.rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.n, r.max_count, r.even_count, r.even_is_argmax
                )
                .unwrap();
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "pattern: even tree with {k} leaves (d = {d}), hosts up to {n_max} leaves"
            )
            .unwrap();
            for r in &report.rows {
                writeln!(
                    out,
                    "n = {:>3}: max copies {}, even tree attains: {}",
                    r.n,
                    r.max_count,
                    if r.even_is_argmax { "yes" } else { "NO" }
                )
                .unwrap();
            }
            if report.holds() {
                writeln!(out, "no counterexample").unwrap();
            } else {
                writeln!(out, "counterexamples at n = {:?}", report.counterexamples).unwrap();
            }
            out
        }
    })
}

fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}
