//! Command-line interface: `rank`, `benchmark` and `kernel-check`.
//!
//! Exit codes: 0 on success, 1 on internal failure, 2 on usage or data
//! errors. Machine-readable output goes to stdout, diagnostics to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{load_dataset, load_items, FeatureVector, NormalizationScope};
use crate::error::{Error, Result};
use crate::eval::{format_table, parse_methods, run_experiment, write_csv, ExperimentConfig};
use crate::kernel::{kernel_check, KernelCheckConfig, KernelSpec, KernelVariant};
use crate::ranker::{AnkerConfig, AnkerModel};
use crate::svm::CvConfig;

#[derive(Debug, Parser)]
#[command(name = "anker-rank", version, about = "Object ranking with the analogy kernel")]
pub struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "ANKER_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on ranked data and rank a query set
    Rank(RankArgs),
    /// Run the train/test protocol for several methods
    Benchmark(BenchmarkArgs),
    /// Check positive semi-definiteness of the kernel on random data
    KernelCheck(KernelCheckArgs),
}

/// `auto` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostArg {
    Auto,
    Fixed(f64),
}

fn parse_cost(s: &str) -> std::result::Result<CostArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(CostArg::Auto);
    }
    match s.parse::<f64>() {
        Ok(c) if c > 0.0 && c.is_finite() => Ok(CostArg::Fixed(c)),
        _ => Err(format!("expected 'auto' or a positive number, got '{s}'")),
    }
}

/// `auto` or an explicit normalisation scope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScopeArg {
    Auto,
    Fixed(NormalizationScope),
}

fn parse_scope(s: &str) -> std::result::Result<ScopeArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(ScopeArg::Auto);
    }
    s.parse::<NormalizationScope>()
        .map(ScopeArg::Fixed)
        .map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Kernel aggregation: mean or poly2
    #[arg(long, default_value = "poly2")]
    pub kernel: KernelVariant,

    /// SVM cost parameter, or `auto` for cross-validation over a grid
    #[arg(long = "c", default_value = "auto", value_parser = parse_cost)]
    pub c: CostArg,

    /// Keep at most this many training pairs (uniform subsample)
    #[arg(long)]
    pub pair_cap: Option<usize>,

    /// Normalisation scope: auto (KS gate), train+test or test-only
    #[arg(long, default_value = "auto", value_parser = parse_scope)]
    pub normalize: ScopeArg,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl ModelArgs {
    fn anker_config(&self) -> AnkerConfig {
        AnkerConfig {
            kernel: KernelSpec::new(self.kernel),
            c: match self.c {
                CostArg::Auto => None,
                CostArg::Fixed(c) => Some(c),
            },
            cv: CvConfig::default(),
            pair_cap: self.pair_cap,
            scope: self.scope(),
            ..AnkerConfig::default()
        }
    }

    fn scope(&self) -> Option<NormalizationScope> {
        match self.normalize {
            ScopeArg::Auto => None,
            ScopeArg::Fixed(s) => Some(s),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    /// Ranked training data (CSV)
    #[arg(long)]
    pub train: PathBuf,

    /// Items to rank (CSV with the training feature columns)
    #[arg(long)]
    pub query: PathBuf,

    /// Output path for the ranking JSON (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Include the pairwise preference matrix in the output
    #[arg(long)]
    pub include_matrix: bool,

    /// Write the fitted model as JSON
    #[arg(long)]
    pub save_model: Option<PathBuf>,

    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// Training data; repeat together with --test for several problems
    #[arg(long, required = true)]
    pub train: Vec<PathBuf>,

    /// Test data, paired with --train in order
    #[arg(long, required = true)]
    pub test: Vec<PathBuf>,

    /// Comma-separated subset of anker, err, ranksvm, able2rank
    #[arg(long)]
    pub methods: String,

    #[arg(long, default_value_t = 20)]
    pub repeats: usize,

    /// Results CSV (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Text table (default: stderr)
    #[arg(long)]
    pub table: Option<PathBuf>,

    /// Number of strongest analogies summed by able2rank
    #[arg(long, default_value_t = crate::baselines::DEFAULT_K)]
    pub k: usize,

    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct KernelCheckArgs {
    #[arg(long, default_value_t = 200)]
    pub samples: usize,

    #[arg(long, default_value_t = 10)]
    pub dim: usize,

    /// Smallest eigenvalue allowed is -tol
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Largest pair-set size per trial
    #[arg(long, default_value_t = 50)]
    pub max_pairs: usize,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn cmd_rank(args: &RankArgs) -> Result<()> {
    let train = load_dataset(&args.train)?;
    let query: Vec<FeatureVector> = load_items(&args.query, &train.schema)?;
    let config = args.model.anker_config();
    let model = AnkerModel::fit(&train, &query, &config, args.model.seed)?;
    let mut prediction = model.rank(&query)?;
    if !args.include_matrix {
        prediction.preference_matrix = None;
    }
    if let Some(path) = &args.save_model {
        fs::write(path, model.to_json()?).map_err(|e| Error::io(path, e))?;
    }
    let mut json = serde_json::to_string(&prediction)?;
    json.push('\n');
    write_output(args.out.as_deref(), &json)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let methods = parse_methods(&args.methods)?;
    if args.train.len() != args.test.len() {
        return Err(Error::InvalidArgument(format!(
            "{} --train paths but {} --test paths",
            args.train.len(),
            args.test.len()
        )));
    }
    let config = ExperimentConfig {
        anker: args.model.anker_config(),
        able2rank_k: args.k,
        scope: args.model.scope(),
        ..ExperimentConfig::default()
    };
    let mut results = Vec::new();
    for (train_path, test_path) in args.train.iter().zip(&args.test) {
        let train = load_dataset(train_path)?;
        let test = load_dataset(test_path)?;
        let problem = format!("{} -> {}", stem(train_path), stem(test_path));
        eprintln!("running {problem} ({} repeats)", args.repeats);
        results.extend(run_experiment(
            &problem,
            &train,
            &test,
            &methods,
            args.repeats,
            args.model.seed,
            &config,
        )?);
    }
    let mut csv = Vec::new();
    write_csv(&results, &mut csv)?;
    write_output(args.out.as_deref(), &String::from_utf8_lossy(&csv))?;
    let table = format_table(&results)?;
    match &args.table {
        Some(p) => fs::write(p, &table).map_err(|e| Error::io(p, e))?,
        None => eprint!("{table}"),
    }
    Ok(())
}

/// Returns whether every check passed.
fn cmd_kernel_check(args: &KernelCheckArgs) -> Result<bool> {
    let report = kernel_check(&KernelCheckConfig {
        samples: args.samples,
        max_pairs: args.max_pairs,
        min_dim: args.dim,
        max_dim: args.dim,
        tol: args.tol,
        seed: args.seed,
    })?;
    let mut json = serde_json::to_string(&report)?;
    json.push('\n');
    write_output(None, &json)?;
    eprintln!(
        "min eigenvalue ≥ -{:e} in {}/{} trials",
        args.tol,
        report.trials_passed,
        report.trials.len()
    );
    eprintln!(
        "{}/{} quadruples match",
        report.boolean_matched, report.boolean_total
    );
    Ok(report.passed)
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads.filter(|&n| n > 0) {
        // a second call (e.g. from tests) keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_threads(cli.threads);
    let outcome = match &cli.command {
        Command::Rank(a) => cmd_rank(a).map(|_| true),
        Command::Benchmark(a) => cmd_benchmark(a).map(|_| true),
        Command::KernelCheck(a) => cmd_kernel_check(a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_data_error() {
                2
            } else {
                1
            }
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
