//! `mxt` — build minimax trees, derive prefix codes and group-test plans,
//! verify the fast algorithms against brute-force oracles, and measure
//! construction scaling.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 unreadable or
//! malformed input, 3 invalid flag combination, 4 zero-probability symbol
//! where positive mass is required.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use minimax_tree::verify::{integer_sweep, real_sweep, threshold_sweep};
use minimax_tree::{
    build_minimax_heap, build_minimax_int, build_minimax_real, group_test_plan, huffman_code,
    minimax_code, redundancy_report, shannon_code, Distribution, Error, MinimaxTree, Parallelism,
    PrefixCode, Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "mxt",
    version,
    about = "Minimax trees, minimax-redundancy codes, and group-test plans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a minimax tree from a weight file and print it
    Tree {
        /// Weight file: one integer or decimal weight per line; `#`
        /// comments and blank lines are ignored
        input: PathBuf,
        /// Construction algorithm; `int` and `real` are the linear-time
        /// paths, `heap` the O(n log n) reference
        #[arg(long, value_enum, default_value_t = Mode::Int)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Cost)]
        format: Format,
    },
    /// Derive a prefix code from a distribution file
    Code {
        /// Distribution file: `symbol<TAB>count-or-prob` per line
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Minimax)]
        algo: Algo,
        /// Also print a redundancy report of the code against the true
        /// distribution in this file (the input file is the estimate)
        #[arg(long, value_name = "DISTFILE")]
        report: Option<PathBuf>,
    },
    /// Emit a group-testing plan for a distribution file as JSON
    Grouptest {
        /// Distribution file: `symbol<TAB>count-or-prob` per line
        input: PathBuf,
    },
    /// Run the oracle-equivalence suites
    Verify {
        /// Largest multiset size for the exhaustive integer suite (also
        /// caps the randomized real suite, at most 8 there)
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Cases per randomized suite; 0 runs the exhaustive integer
        /// suite only
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, env = "MXT_SEED", default_value_t = 42)]
        seed: u64,
    },
    /// Time tree construction over a range of input sizes
    Bench {
        /// Comma-separated sizes; `2^20` exponent notation is accepted
        #[arg(long, required = true, value_delimiter = ',')]
        sizes: Vec<String>,
        #[arg(long, value_enum, default_value_t = BenchAlgo::Int)]
        algo: BenchAlgo,
        /// Timed repetitions per size; the median is reported
        #[arg(long, default_value_t = 5)]
        reps: u32,
        #[arg(long, env = "MXT_SEED", default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Int,
    Real,
    Heap,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Json,
    Cost,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Minimax,
    Shannon,
    Huffman,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchAlgo {
    Int,
    Real,
}

/// A failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Tree { input, mode, format } => cmd_tree(&input, mode, format),
        Command::Code { input, algo, report } => cmd_code(&input, algo, report.as_deref()),
        Command::Grouptest { input } => cmd_grouptest(&input),
        Command::Verify { n_max, trials, seed } => cmd_verify(n_max, trials, seed),
        Command::Bench { sizes, algo, reps, seed } => cmd_bench(&sizes, algo, reps, seed),
    }
}

// ---------------------------------------------------------------- weights

enum ParsedWeights {
    Ints(Vec<i64>),
    Reals { values: Vec<f64>, first_non_int_line: usize },
}

fn parse_weight_file(path: &Path) -> CliResult<ParsedWeights> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            entries.push((number + 1, line));
        }
    }
    let mut ints = Vec::with_capacity(entries.len());
    let mut first_non_int_line = None;
    for &(number, token) in &entries {
        match token.parse::<i64>() {
            Ok(v) => ints.push(v),
            Err(_) => {
                first_non_int_line = Some(number);
                break;
            }
        }
    }
    if first_non_int_line.is_none() {
        return Ok(ParsedWeights::Ints(ints));
    }
    let mut reals = Vec::with_capacity(entries.len());
    for &(number, token) in &entries {
        let value = token
            .parse::<f64>()
            .map_err(|_| fail(2, format!("{}:{number}: not a number: {token:?}", path.display())))?;
        reals.push(value);
    }
    Ok(ParsedWeights::Reals {
        values: reals,
        first_non_int_line: first_non_int_line.unwrap(),
    })
}

fn cmd_tree(input: &Path, mode: Mode, format: Format) -> CliResult<()> {
    let build_err = |e: Error| fail(2, format!("{}: {e}", input.display()));
    match (mode, parse_weight_file(input)?) {
        (Mode::Int, ParsedWeights::Ints(w)) => {
            let tree = build_minimax_int(&w).map_err(build_err)?;
            print_int_tree(&tree, format);
        }
        (Mode::Int, ParsedWeights::Reals { first_non_int_line, .. }) => {
            return Err(fail(
                3,
                format!(
                    "--mode int needs integer weights, but {}:{first_non_int_line} is not an integer",
                    input.display()
                ),
            ));
        }
        (Mode::Heap, ParsedWeights::Ints(w)) => {
            let tree = build_minimax_heap(&w).map_err(build_err)?;
            print_int_tree(&tree, format);
        }
        (Mode::Real, ParsedWeights::Ints(w)) => {
            let reals: Vec<f64> = w.iter().map(|&v| v as f64).collect();
            let tree = build_minimax_real(&reals).map_err(build_err)?;
            print_real_tree(&tree, format);
        }
        (Mode::Real, ParsedWeights::Reals { values, .. }) => {
            let tree = build_minimax_real(&values).map_err(build_err)?;
            print_real_tree(&tree, format);
        }
        (Mode::Heap, ParsedWeights::Reals { values, .. }) => {
            let tree = build_minimax_heap(&values).map_err(build_err)?;
            print_real_tree(&tree, format);
        }
    }
    Ok(())
}

fn print_int_tree(tree: &MinimaxTree<i64>, format: Format) {
    match format {
        // Integer costs are exact at any magnitude; append the fixed
        // nine-digit zero fraction rather than rounding through f64.
        Format::Cost => println!("{}.000000000", tree.cost()),
        Format::Json => println!("{}", tree_to_json(tree, |w| json!(w))),
        Format::Dot => print!("{}", tree_to_dot(tree)),
    }
}

fn print_real_tree(tree: &MinimaxTree<f64>, format: Format) {
    match format {
        Format::Cost => println!("{:.9}", tree.cost()),
        Format::Json => println!("{}", tree_to_json(tree, |w| json!(w))),
        Format::Dot => print!("{}", tree_to_dot(tree)),
    }
}

fn tree_to_json<W: Weight>(
    tree: &MinimaxTree<W>,
    weight_value: impl Fn(W) -> serde_json::Value,
) -> String {
    let nodes: Vec<serde_json::Value> = tree
        .nodes()
        .iter()
        .map(|node| {
            let mut object = serde_json::Map::new();
            object.insert("weight".into(), weight_value(node.weight()));
            if let (Some(left), Some(right)) = (node.left(), node.right()) {
                object.insert("children".into(), json!([left.index(), right.index()]));
            }
            if let Some(leaf) = node.leaf_index() {
                object.insert("leaf_index".into(), json!(leaf));
            }
            serde_json::Value::Object(object)
        })
        .collect();
    json!({ "nodes": nodes, "root": tree.root_id().index() }).to_string()
}

fn tree_to_dot<W: Weight>(tree: &MinimaxTree<W>) -> String {
    let mut out = String::from("digraph minimax {\n");
    for (index, node) in tree.nodes().iter().enumerate() {
        if node.is_leaf() {
            let _ = writeln!(out, "  n{index} [shape=box, label=\"{}\"];", node.weight());
        } else {
            let _ = writeln!(out, "  n{index} [shape=circle, label=\"{}\"];", node.weight());
        }
    }
    for (index, node) in tree.nodes().iter().enumerate() {
        for child in node.children() {
            let _ = writeln!(out, "  n{index} -> n{};", child.index());
        }
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------- distributions and codes

fn parse_dist_file(path: &Path) -> CliResult<(Vec<String>, Distribution)> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    let mut symbols: Vec<String> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let number = number + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((symbol, value)) = line.split_once('\t') else {
            return Err(fail(
                2,
                format!("{}:{number}: expected `symbol<TAB>count-or-prob`", path.display()),
            ));
        };
        let symbol = symbol.trim();
        if symbol.is_empty() {
            return Err(fail(2, format!("{}:{number}: empty symbol", path.display())));
        }
        if symbols.iter().any(|s| s == symbol) {
            return Err(fail(2, format!("{}:{number}: duplicate symbol {symbol:?}", path.display())));
        }
        let value: f64 = value.trim().parse().map_err(|_| {
            fail(2, format!("{}:{number}: not a number: {:?}", path.display(), value.trim()))
        })?;
        if !value.is_finite() || value < 0.0 {
            return Err(fail(
                2,
                format!("{}:{number}: counts must be finite and nonnegative", path.display()),
            ));
        }
        symbols.push(symbol.to_string());
        values.push(value);
    }
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(fail(2, format!("{}: needs at least one positive count", path.display())));
    }
    for v in &mut values {
        *v /= total;
    }
    let dist = Distribution::from_probs(&values)
        .map_err(|e| fail(2, format!("{}: {e}", path.display())))?;
    Ok((symbols, dist))
}

fn code_error(symbols: &[String], algo: Algo, e: Error) -> Failure {
    match e {
        Error::ZeroProbability { index } => {
            fail(4, format!("zero-probability symbol {:?}", symbols[index]))
        }
        Error::TooFewSymbols { n } => {
            let name = match algo {
                Algo::Minimax => "minimax",
                Algo::Shannon => "shannon",
                Algo::Huffman => "huffman",
            };
            fail(3, format!("--algo {name} needs at least two symbols, got {n}"))
        }
        other => fail(2, other.to_string()),
    }
}

fn cmd_code(input: &Path, algo: Algo, report: Option<&Path>) -> CliResult<()> {
    let (symbols, estimate) = parse_dist_file(input)?;
    let code: PrefixCode = match algo {
        Algo::Minimax => minimax_code(&estimate),
        Algo::Shannon => shannon_code(&estimate),
        Algo::Huffman => huffman_code(&estimate),
    }
    .map_err(|e| code_error(&symbols, algo, e))?;
    for (index, symbol) in symbols.iter().enumerate() {
        println!("{symbol} {} {}", code.lengths()[index], code.codeword_string(index));
    }
    if let Some(true_path) = report {
        let (_, true_dist) = parse_dist_file(true_path)?;
        let report = redundancy_report(&true_dist, &estimate, &code).map_err(|e| match e {
            Error::LengthMismatch { expected, actual } => fail(
                2,
                format!(
                    "{}: expected {actual} symbols to match the code, got {expected}",
                    true_path.display()
                ),
            ),
            other => fail(2, other.to_string()),
        })?;
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
    }
    Ok(())
}

fn cmd_grouptest(input: &Path) -> CliResult<()> {
    let (symbols, dist) = parse_dist_file(input)?;
    let plan = group_test_plan(&dist).map_err(|e| code_error(&symbols, Algo::Minimax, e))?;
    println!("{}", serde_json::to_string_pretty(&plan.root).expect("plan serializes"));
    Ok(())
}

// ----------------------------------------------------------------- verify

fn cmd_verify(n_max: usize, trials: u64, seed: u64) -> CliResult<()> {
    let par = Parallelism::Parallel;
    let mut reports = Vec::new();

    let integer = integer_sweep(n_max, -4, 4, 4, seed, par);
    println!("integer exhaustive: {} cases, {} mismatches", integer.cases, integer.mismatches);
    reports.push(integer);

    if trials > 0 {
        let real = real_sweep(trials, n_max.min(8), seed.wrapping_add(1), par);
        println!("real randomized: {} cases, {} mismatches", real.cases, real.mismatches);
        reports.push(real);

        let threshold = threshold_sweep(trials, 100, seed.wrapping_add(2), par);
        println!(
            "threshold agreement: {} cases, {} mismatches",
            threshold.cases, threshold.mismatches
        );
        reports.push(threshold);
    }

    let mut clean = true;
    for report in &reports {
        for sample in &report.samples {
            println!("  {sample}");
            clean = false;
        }
    }
    if clean {
        println!("all passed");
        Ok(())
    } else {
        Err(fail(1, "verification failed"))
    }
}

// ------------------------------------------------------------------ bench

fn parse_size(token: &str) -> CliResult<usize> {
    let bad = || fail(2, format!("bad size {token:?}; use an integer or `2^20` notation"));
    let value = if let Some((base, exponent)) = token.split_once('^') {
        let base: u32 = base.trim().parse().map_err(|_| bad())?;
        let exponent: u32 = exponent.trim().parse().map_err(|_| bad())?;
        (base as usize).checked_pow(exponent).ok_or_else(bad)?
    } else {
        token.trim().parse().map_err(|_| bad())?
    };
    if value == 0 {
        return Err(fail(2, "sizes must be at least 1"));
    }
    Ok(value)
}

fn cmd_bench(sizes: &[String], algo: BenchAlgo, reps: u32, seed: u64) -> CliResult<()> {
    if reps == 0 {
        return Err(fail(3, "--reps must be at least 1"));
    }
    let sizes: Vec<usize> = sizes.iter().map(|s| parse_size(s)).collect::<CliResult<_>>()?;

    // Repetitions are interleaved round-robin across the sizes: every build
    // then starts with whatever the previous (differently-sized) build left
    // in cache, instead of small inputs re-running against their own warm
    // working set while large ones never can. One untimed warmup per size
    // faults pages in and settles the allocator first.
    fn run<I, O>(inputs: &[(usize, I)], reps: u32, build: impl Fn(&I) -> O) -> Vec<Vec<u128>> {
        for (_, input) in inputs {
            std::hint::black_box(build(input));
        }
        let mut times: Vec<Vec<u128>> =
            inputs.iter().map(|_| Vec::with_capacity(reps as usize)).collect();
        for _ in 0..reps {
            for (slot, (_, input)) in inputs.iter().enumerate() {
                let start = Instant::now();
                let out = build(input);
                let elapsed = start.elapsed();
                std::hint::black_box(&out);
                times[slot].push(elapsed.as_nanos());
            }
        }
        times
    }

    let times = match algo {
        BenchAlgo::Int => {
            let inputs: Vec<(usize, Vec<i64>)> = sizes
                .iter()
                .map(|&n| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64));
                    (n, (0..n).map(|_| rng.gen_range(-1_000_000..=1_000_000)).collect())
                })
                .collect();
            run(&inputs, reps, |w| build_minimax_int(w).expect("bench input is valid"))
        }
        BenchAlgo::Real => {
            let inputs: Vec<(usize, Vec<f64>)> = sizes
                .iter()
                .map(|&n| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64));
                    (n, (0..n).map(|_| rng.gen_range(-30.0..0.0)).collect())
                })
                .collect();
            run(&inputs, reps, |w| build_minimax_real(w).expect("bench input is valid"))
        }
    };

    for (&n, mut times_ns) in sizes.iter().zip(times) {
        times_ns.sort_unstable();
        let median = times_ns[times_ns.len() / 2].max(1);
        let per_elem = median as f64 / n as f64;
        println!("{n} {median} {per_elem:.3}");
    }
    Ok(())
}
