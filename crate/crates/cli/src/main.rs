//! Command-line driver: runs the pipeline or its stages over a corpus
//! directory and queries the persisted indices.
//!
//! Exit codes: 0 success, 1 parse or artifact failure, 2 empty corpus,
//! 3 query with no entries.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unlev_core::index::{EventIndexEntry, Index, IndexEntry, IndexError, PersonIndexEntry, PlaceIndexEntry};
use unlev_core::pipeline::{
    self, PipelineConfig, PipelineError, PipelineSettings,
};
use unlev_core::rank::RankWeights;
use unlev_core::score::Threshold;
use unlev_core::silhouette;

#[derive(Parser)]
#[command(name = "unlev", version, about = "Event extraction, clustering, indexing and ranking over UNL-style news corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Corpus directory of document files
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory for artifacts
    #[arg(long)]
    out: PathBuf,
    /// Clustering/segmentation threshold (strict >)
    #[arg(long, default_value_t = Threshold::DEFAULT)]
    threshold: Threshold,
    /// Ranking weights as df,tf,title
    #[arg(long, value_parser = parse_weights, default_value = "1,1,3")]
    weights: RankWeights,
    /// Score place/person/duration features even without a shared head
    #[arg(long)]
    loose_features: bool,
    /// Keep unmatched segments as singleton clusters
    #[arg(long)]
    keep_singletons: bool,
    /// Substitute ln(N/doc_count) for the document-count ranking term
    #[arg(long)]
    idf: bool,
    /// Emit match lines in the published log's verbatim quirk format
    #[arg(long)]
    verbatim_fig2: bool,
}

impl CommonArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            corpus_dir: self.corpus.clone(),
            out_dir: self.out.clone(),
            settings: PipelineSettings {
                threshold: self.threshold,
                weights: self.weights,
                loose_features: self.loose_features,
                keep_singletons: self.keep_singletons,
                idf: self.idf,
                verbatim_fig2: self.verbatim_fig2,
            },
        }
    }
}

fn parse_weights(s: &str) -> Result<RankWeights, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected df,tf,title, got `{s}`"));
    }
    let parse = |p: &str| -> Result<f64, String> {
        let v: f64 = p.trim().parse().map_err(|_| format!("invalid weight `{p}`"))?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(format!("weight `{p}` must be strictly positive"))
        }
    };
    Ok(RankWeights {
        doc_count: parse(parts[0])?,
        frequency: parse(parts[1])?,
        title: parse(parts[2])?,
    })
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexKind {
    Person,
    Place,
    Event,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: segment, cluster, index, rank, eval
    Run(CommonArgs),
    /// Parse and segment the corpus; writes manifest.json and segments.jsonl
    Segment(CommonArgs),
    /// Cluster persisted segments; writes clusters.jsonl and matches.log
    Cluster(CommonArgs),
    /// Build the person/place/event indices from persisted clusters
    Index(CommonArgs),
    /// Rank main events; writes ranking.tsv
    Rank(CommonArgs),
    /// Evaluate the clustering; writes eval.tsv
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Print the six-row published-coefficient consistency check and exit
        #[arg(long)]
        table1: bool,
        /// Also write a point,coefficient CSV to this path
        #[arg(long)]
        fig8: Option<PathBuf>,
    },
    /// Query a persisted index by key; prints TSV rows
    Query {
        /// Output directory holding the .idx files
        #[arg(long)]
        out: PathBuf,
        #[arg(value_enum)]
        kind: IndexKind,
        key: String,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &PipelineError) -> u8 {
    match e {
        PipelineError::EmptyCorpus(_) => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<ExitCode, PipelineError> {
    match command {
        Command::Run(args) => {
            pipeline::run_pipeline(&args.config())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Segment(args) => {
            pipeline::stage_segment(&args.config())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Cluster(args) => {
            pipeline::stage_cluster(&args.config())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Index(args) => {
            pipeline::stage_index(&args.config())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank(args) => {
            pipeline::stage_rank(&args.config())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { common, table1, fig8 } => {
            if table1 {
                print!("{}", silhouette::render_reference_check());
                return Ok(ExitCode::SUCCESS);
            }
            let config = common.config();
            pipeline::stage_eval(&config)?;
            if let Some(path) = fig8 {
                let store = pipeline::load_segments(&config)?;
                let clusters = pipeline::load_clusters(&config)?;
                let points = pipeline::clustering_points(&clusters, &store)?;
                let csv = silhouette::render_points_csv(&points)?;
                std::fs::write(&path, csv).map_err(|e| PipelineError::Io {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { out, kind, key } => query(&out, kind, &key),
    }
}

fn print_hits<E: IndexEntry>(index: &Index<E>, key: &str) -> Result<bool, PipelineError> {
    match index.query(key) {
        Ok(hits) => {
            print!("{}", Index::tsv(&hits));
            Ok(true)
        }
        Err(IndexError::KeyNotFound { .. }) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

fn query(out: &PathBuf, kind: IndexKind, key: &str) -> Result<ExitCode, PipelineError> {
    let found = match kind {
        IndexKind::Person => print_hits(&Index::<PersonIndexEntry>::load(out)?, key),
        IndexKind::Place => print_hits(&Index::<PlaceIndexEntry>::load(out)?, key),
        IndexKind::Event => print_hits(&Index::<EventIndexEntry>::load(out)?, key),
    }?;
    if found {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("no entries");
        Ok(ExitCode::from(3))
    }
}
