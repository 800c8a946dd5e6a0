//! `pptgap` — analyze, construct, verify and search bipartite states against
//! the flip-compression rank criteria.

use clap::{Args, Parser, Subcommand};
use pptgap::cli_io::{
    self, format, render_criteria_report, render_search_summary, render_suite_report, suites,
    EXIT_CANDIDATE, EXIT_ENTANGLED, EXIT_INCONSISTENT, EXIT_OK, EXIT_USAGE,
};
use pptgap::constructions::{construct, RecipeName, StateRecipe};
use pptgap::criteria::{analyze, Tolerance};
use pptgap::search::{hunt, SearchConfig, Strategy};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pptgap", version, about = "Entanglement criteria from flip-compression ranks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a state file and report all criteria verdicts.
    Check(CheckArgs),
    /// Construct a named state and write it to a matrix file.
    Construct(ConstructArgs),
    /// Run a named verification suite over a seeded corpus.
    Verify(VerifyArgs),
    /// Hunt for PPT states inside the rank-gap region.
    Search(SearchArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Path of the matrix file to analyze.
    path: PathBuf,
    /// Override both tolerance cutoffs with an absolute value.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct ConstructArgs {
    /// Recipe name: sharp_separable, invariant_gap, skew_inflated,
    /// sym_skew_mix, random_separable, random_spc, random_ppt.
    #[arg(long)]
    name: String,
    /// Local dimension.
    #[arg(long)]
    k: usize,
    /// Seed for the random recipes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Term count for the random recipes (defaults to k).
    #[arg(long, default_value_t = 0)]
    terms: usize,
    /// Output path.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: realign-identities, sharp-family, spc-chain, rank1-family,
    /// m3-guard, audit-random, audit-file, construction-ranks.
    #[arg(long)]
    suite: String,
    /// Largest local dimension for the family suites.
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    /// Local dimension for the corpus suites.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Corpus size.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Term count for the SPC sampler.
    #[arg(long, default_value_t = 2)]
    terms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generating-set file for the audit-file suite.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// TOML run configuration; flags below are ignored when present.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// random or anneal.
    #[arg(long, default_value = "random")]
    strategy: String,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for full dumps of confirmed candidates.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn run_check(args: &CheckArgs, json: bool) -> ExitCode {
    let (matrix, _) = match format::load_matrix(&args.path) {
        Ok(loaded) => loaded,
        Err(e) => return fail(e),
    };
    let tol = match args.eps {
        Some(eps) => Tolerance { eps_psd: eps, eps_rank: eps },
        None => cli_io::tolerance_from_env(matrix.local_dim()),
    };
    let report = match analyze(&matrix, tol) {
        Ok(report) => report,
        Err(e) => return fail(e),
    };
    if json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
    } else {
        print!("{}", render_criteria_report(&report));
    }
    if !report.internally_consistent() {
        return ExitCode::from(EXIT_INCONSISTENT as u8);
    }
    if !report.rank_inequality_holds {
        return ExitCode::from(EXIT_ENTANGLED as u8);
    }
    ExitCode::from(EXIT_OK as u8)
}

fn run_construct(args: &ConstructArgs, json: bool) -> ExitCode {
    let name = match args.name.as_str() {
        "sharp_separable" => RecipeName::SharpSeparable,
        "invariant_gap" => RecipeName::InvariantGap,
        "skew_inflated" => RecipeName::SkewInflated,
        "sym_skew_mix" => RecipeName::SymSkewMix,
        "random_separable" => RecipeName::RandomSeparable,
        "random_spc" => RecipeName::RandomSpc,
        "random_ppt" => RecipeName::RandomPpt,
        other => return fail(format!("unknown recipe {other:?}")),
    };
    let recipe = StateRecipe {
        name,
        k: args.k,
        seed: args.seed,
        terms: args.terms,
    };
    let tol = cli_io::tolerance_from_env(args.k);
    let state = match construct(&recipe, tol) {
        Ok(state) => state,
        Err(e) => return fail(e),
    };
    let metadata = format::MatrixMetadata {
        name: Some(args.name.clone()),
        recipe: Some(recipe),
        seed: Some(args.seed),
    };
    if let Err(e) = format::save_matrix(&args.out, &state, Some(metadata)) {
        return fail(e);
    }
    if json {
        println!(
            "{}",
            serde_json::json!({"written": args.out.display().to_string(), "k": args.k})
        );
    } else {
        println!("wrote {} (k = {})", args.out.display(), args.k);
    }
    ExitCode::from(EXIT_OK as u8)
}

fn run_verify(args: &VerifyArgs, json: bool) -> ExitCode {
    let report = match args.suite.as_str() {
        "realign-identities" => suites::realign_identities(args.samples, args.samples / 2, args.seed),
        "sharp-family" => suites::sharp_family(args.kmax),
        "spc-chain" => suites::spc_chain(args.k, args.samples, args.terms, args.seed),
        "rank1-family" => suites::rank1_family(args.k.max(4), args.samples, args.seed),
        "m3-guard" => suites::m3_guard(args.k, args.samples, args.seed),
        "audit-random" => suites::audit_random(args.k.max(4), args.samples, args.seed),
        "construction-ranks" => suites::construction_ranks(args.kmax.min(6)),
        "audit-file" => {
            let path = match &args.file {
                Some(path) => path,
                None => return fail("audit-file requires --file"),
            };
            match format::load_generating_set(path) {
                Ok(set) => suites::audit_file(&set),
                Err(e) => return fail(e),
            }
        }
        other => return fail(format!("unknown suite {other:?}")),
    };
    if json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
    } else {
        print!("{}", render_suite_report(&report));
    }
    if report.passed {
        ExitCode::from(EXIT_OK as u8)
    } else {
        ExitCode::from(EXIT_INCONSISTENT as u8)
    }
}

fn run_search(args: &SearchArgs, json: bool) -> ExitCode {
    let config = match &args.config {
        Some(path) => match format::load_search_config(path) {
            Ok(config) => config,
            Err(e) => return fail(e),
        },
        None => {
            let strategy = match args.strategy.as_str() {
                "random" => Strategy::Random,
                "anneal" => Strategy::Anneal,
                other => return fail(format!("unknown strategy {other:?}")),
            };
            let mut config = SearchConfig::new(args.k, strategy, args.iters, args.seed);
            config.workers = args.workers;
            config
        }
    };
    let outcome = match hunt(&config) {
        Ok(outcome) => outcome,
        Err(e) => return fail(e),
    };
    for record in &outcome.records {
        println!("{}", cli_io::record_json(record));
    }
    if json {
        println!("{}", serde_json::to_string(&outcome.summary).expect("serializable"));
    } else {
        print!("{}", render_search_summary(&outcome.summary));
    }
    if outcome.summary.theorem_violations > 0 {
        return ExitCode::from(EXIT_INCONSISTENT as u8);
    }
    if outcome.summary.candidates > 0 {
        // extraordinary event: dump every confirmed state for manual review
        let dir = args.dump_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        for candidate in &outcome.candidates {
            let record = &outcome.records[candidate.record_index];
            let path = dir.join(format!(
                "gap-candidate-{}-{}.json",
                record.worker, record.iter
            ));
            let metadata = format::MatrixMetadata {
                name: Some("gap-candidate".into()),
                recipe: None,
                seed: Some(record.state_seed),
            };
            if let Err(e) = format::save_matrix(&path, &candidate.state, Some(metadata)) {
                eprintln!("error: could not dump candidate: {e}");
            }
        }
        return ExitCode::from(EXIT_CANDIDATE as u8);
    }
    ExitCode::from(EXIT_OK as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Check(args) => run_check(args, cli.json),
        Command::Construct(args) => run_construct(args, cli.json),
        Command::Verify(args) => run_verify(args, cli.json),
        Command::Search(args) => run_search(args, cli.json),
    }
}
