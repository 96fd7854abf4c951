//! `concept-metrics`: evaluate the quality of knowledge-graph concept
//! embeddings from the command line.
//!
//! ```text
//! concept-metrics eval categorization --embeddings vectors.txt --kg slice.nt \
//!     --concepts dbo:City,dbo:Person --out report.json
//! concept-metrics eval coherence ... --batch-size 20 --radius 10 --seed 42 --out r.json
//! concept-metrics eval semantic-error ... --method wu_palmer --out r.json
//! concept-metrics eval relatedness --embeddings v.txt --judgments j.tsv --corr spearman --out r.json
//! concept-metrics eval transition --embeddings v.txt --kg slice.nt --properties p1,p2 --out r.json
//! concept-metrics project --embeddings v.txt --ids a,b,c --method tsne --seed 7 --out scatter.tsv
//! concept-metrics fixture generate --spec spec.json --out fixture-dir/
//! ```
//!
//! Per-row failures (an unknown concept, a zero-norm vector) are embedded in
//! the report; only structural problems (unreadable files, malformed inputs)
//! abort with a nonzero exit code. `CONCEPT_EVAL_THREADS` caps the worker
//! pool; output row order always follows input order.

mod commands;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "concept-metrics", version, about = "Intrinsic evaluation of concept embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an evaluation task and write a report.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Project selected embeddings to 2-D and export TSV + SVG.
    Project(ProjectArgs),
    /// Synthetic fixture management.
    #[command(subcommand)]
    Fixture(FixtureCommand),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Cosine between each concept vector and the mean of its entity vectors.
    Categorization(CategorizationArgs),
    /// Fraction of a concept's nearest pooled entities sharing its background concept.
    Coherence(CoherenceArgs),
    /// Pairwise |ontology similarity - embedding cosine| matrix.
    SemanticError(SemanticErrorArgs),
    /// Correlation between judged relatedness and embedding cosine.
    Relatedness(RelatednessArgs),
    /// Cosine between domain+property and range vectors per property.
    Transition(TransitionArgs),
}

#[derive(Subcommand)]
enum FixtureCommand {
    /// Generate a seeded synthetic fixture directory from a JSON spec.
    Generate(FixtureGenerateArgs),
}

/// How to read and label the embedding table; shared by every command.
#[derive(Args, Clone)]
struct EmbeddingArgs {
    /// Embedding file (word2vec text/binary, GloVe text, or TSV).
    #[arg(long)]
    embeddings: std::path::PathBuf,

    /// One of auto, word2vec-text, word2vec-binary, glove, tsv.
    #[arg(long, default_value = "auto")]
    embedding_format: String,

    /// Lowercase identifiers (and label tokens) on load.
    #[arg(long)]
    lowercase: bool,

    /// Prefix expansion file (`prefix TAB expansion` lines).
    #[arg(long)]
    prefix_map: Option<std::path::PathBuf>,

    /// Pre-tokenized label file (`identifier TAB token token ...`); identifiers
    /// missing from the table get a composed vector.
    #[arg(long)]
    labels: Option<std::path::PathBuf>,

    /// Token composition mode for labeled identifiers: avg or sum.
    #[arg(long, default_value = "avg")]
    compose: String,

    /// Data-set label echoed into reports (default: embeddings file stem).
    #[arg(long)]
    dataset_label: Option<String>,

    /// Model label echoed into reports (default: embeddings file stem).
    #[arg(long)]
    model_label: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Report destination.
    #[arg(long)]
    out: std::path::PathBuf,

    /// json (canonical), csv, or markdown.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct CategorizationArgs {
    #[command(flatten)]
    embedding: EmbeddingArgs,
    /// Knowledge-graph slice: .nt file, typing .tsv, or a fixture directory.
    #[arg(long)]
    kg: std::path::PathBuf,
    /// Comma list of concept identifiers, or a file with one per line.
    #[arg(long)]
    concepts: String,
    /// direct or transitive entity retrieval.
    #[arg(long, default_value = "direct")]
    typing: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CoherenceArgs {
    #[command(flatten)]
    embedding: EmbeddingArgs,
    #[arg(long)]
    kg: std::path::PathBuf,
    #[arg(long)]
    concepts: String,
    /// Entities sampled per concept when building the pool.
    #[arg(long, default_value_t = 20)]
    batch_size: usize,
    /// Neighborhood size n for the coherence score.
    #[arg(long, default_value_t = 10)]
    radius: usize,
    /// Pool sampling seed.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "direct")]
    typing: String,
    /// strict (pool label) or any (typing set) matching.
    #[arg(long = "match", default_value = "strict")]
    match_mode: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SemanticErrorArgs {
    #[command(flatten)]
    embedding: EmbeddingArgs,
    #[arg(long)]
    kg: std::path::PathBuf,
    #[arg(long)]
    concepts: String,
    /// wu_palmer or inverse_path.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RelatednessArgs {
    #[command(flatten)]
    embedding: EmbeddingArgs,
    /// Judged pairs TSV with a `# scale lo hi` header.
    #[arg(long)]
    judgments: std::path::PathBuf,
    /// spearman or pearson.
    #[arg(long)]
    corr: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TransitionArgs {
    #[command(flatten)]
    embedding: EmbeddingArgs,
    #[arg(long)]
    kg: std::path::PathBuf,
    /// Comma list of property identifiers, or a file with one per line.
    #[arg(long)]
    properties: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    embedding: EmbeddingArgs,
    /// Identifiers to project: comma list or file.
    #[arg(long)]
    ids: String,
    /// pca or tsne.
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// t-SNE perplexity (default min(30, (n-1)/3)).
    #[arg(long)]
    perplexity: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Group labels TSV (`id TAB group`) for coloring.
    #[arg(long)]
    groups: Option<std::path::PathBuf>,
    /// Scatter TSV destination; the SVG lands next to it.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct FixtureGenerateArgs {
    /// Fixture spec JSON.
    #[arg(long)]
    spec: std::path::PathBuf,
    /// Output directory.
    #[arg(long)]
    out: std::path::PathBuf,
}

fn main() {
    if let Ok(threads) = std::env::var("CONCEPT_EVAL_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n > 0 {
                // ignore failure: the global pool may already exist
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(EvalCommand::Categorization(args)) => commands::categorization(args),
        Command::Eval(EvalCommand::Coherence(args)) => commands::coherence(args),
        Command::Eval(EvalCommand::SemanticError(args)) => commands::semantic_error(args),
        Command::Eval(EvalCommand::Relatedness(args)) => commands::relatedness(args),
        Command::Eval(EvalCommand::Transition(args)) => commands::transition(args),
        Command::Project(args) => commands::project(args),
        Command::Fixture(FixtureCommand::Generate(args)) => commands::fixture_generate(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
