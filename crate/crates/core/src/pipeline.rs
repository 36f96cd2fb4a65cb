//! The end-to-end pipeline over a corpus directory, and the individual
//! stages it is composed of.
//!
//! Every artifact is written in a canonical order with no timestamps, so a
//! rerun over the same corpus produces byte-identical output, and running
//! the stages one by one produces exactly the files of a single
//! `run_pipeline` invocation.
//!
//! Artifacts in the output directory:
//!
//! - `manifest.json` — settings and content digests of the input files
//! - `segments.jsonl` / `clusters.jsonl` — stage artifacts
//! - `matches.log` — the cluster match log
//! - `person.idx`, `place.idx`, `event.idx` — the three indices
//! - `ranking.tsv` — ranked main events
//! - `eval.tsv` — silhouette report over the clustering

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cluster::{cluster_segments, emit_match_log, segment_similarity, EventCluster};
use crate::event_model::{attach_sub_events, build_event_table, identify_main_events};
use crate::index::{build_indices, IndexError, Indices};
use crate::lineformat;
use crate::parser::parse_document;
use crate::rank::{rank_events, render_ranking, RankError, RankWeights};
use crate::score::Threshold;
use crate::segment::{Segment, SegmentOptions, SegmentStore};
use crate::silhouette::{render_report, EvalError, ScoredClustering};
use crate::unl::UnlDocument;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SEGMENTS_FILE: &str = "segments.jsonl";
pub const CLUSTERS_FILE: &str = "clusters.jsonl";
pub const MATCHES_FILE: &str = "matches.log";
pub const RANKING_FILE: &str = "ranking.tsv";
pub const EVAL_FILE: &str = "eval.tsv";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus directory {} contains no document files", .0.display())]
    EmptyCorpus(PathBuf),
    #[error("{}", .0.join("\n"))]
    ParseFailures(Vec<String>),
    #[error("document id `{0}` appears in more than one file")]
    DuplicateDocId(String),
    #[error("missing artifact {}; run the predecessor stage first", .0.display())]
    MissingArtifact(PathBuf),
    #[error("io failure on {path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Rank(#[from] RankError),
}

impl PipelineError {
    fn io(path: &Path, e: std::io::Error) -> PipelineError {
        PipelineError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        }
    }
}

/// Tunable settings recorded in the manifest. Paths are deliberately not
/// part of this struct so output bytes do not depend on directory locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub threshold: Threshold,
    pub weights: RankWeights,
    pub loose_features: bool,
    pub keep_singletons: bool,
    pub idf: bool,
    pub verbatim_fig2: bool,
}

impl Default for PipelineSettings {
    fn default() -> PipelineSettings {
        PipelineSettings {
            threshold: Threshold::DEFAULT,
            weights: RankWeights::default(),
            loose_features: false,
            keep_singletons: false,
            idf: false,
            verbatim_fig2: false,
        }
    }
}

impl PipelineSettings {
    fn segment_options(&self) -> SegmentOptions {
        SegmentOptions {
            threshold: self.threshold,
            loose_features: self.loose_features,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_dir: PathBuf,
    pub out_dir: PathBuf,
    pub settings: PipelineSettings,
}

impl PipelineConfig {
    pub fn new(corpus_dir: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> PipelineConfig {
        PipelineConfig {
            corpus_dir: corpus_dir.into(),
            out_dir: out_dir.into(),
            settings: PipelineSettings::default(),
        }
    }

    fn artifact(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct InputDigest {
    file: String,
    sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    format: String,
    settings: PipelineSettings,
    inputs: Vec<InputDigest>,
}

/// The parsed corpus: documents sorted by id, ids unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<UnlDocument>,
    digests: Vec<InputDigest>,
}

impl Corpus {
    /// Reads and parses every regular file of the directory, in file-name
    /// order. All parse failures are collected and reported together.
    pub fn load(dir: &Path) -> Result<Corpus, PipelineError> {
        let mut names: Vec<(String, PathBuf)> = Vec::new();
        let entries = fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| PipelineError::io(dir, e))?;
            let path = entry.path();
            let name = entry.file_name().to_string_lossy().to_string();
            if path.is_file() && !name.starts_with('.') {
                names.push((name, path));
            }
        }
        names.sort();
        if names.is_empty() {
            return Err(PipelineError::EmptyCorpus(dir.to_path_buf()));
        }

        let mut documents = Vec::new();
        let mut digests = Vec::new();
        let mut failures = Vec::new();
        for (name, path) in &names {
            let text = match fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) => {
                    failures.push(format!("{name}: {e}"));
                    continue;
                }
            };
            digests.push(InputDigest {
                file: name.clone(),
                sha256: hex_digest(text.as_bytes()),
            });
            match parse_document(&text, name) {
                Ok(doc) => documents.push(doc),
                Err(e) => failures.push(e.to_string()),
            }
        }
        if !failures.is_empty() {
            return Err(PipelineError::ParseFailures(failures));
        }
        Corpus::from_parts(documents, digests)
    }

    pub fn from_documents(documents: Vec<UnlDocument>) -> Result<Corpus, PipelineError> {
        Corpus::from_parts(documents, Vec::new())
    }

    fn from_parts(
        mut documents: Vec<UnlDocument>,
        digests: Vec<InputDigest>,
    ) -> Result<Corpus, PipelineError> {
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        for pair in documents.windows(2) {
            if pair[0].doc_id == pair[1].doc_id {
                return Err(PipelineError::DuplicateDocId(pair[0].doc_id.clone()));
            }
        }
        Ok(Corpus { documents, digests })
    }

    pub fn documents(&self) -> &[UnlDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

fn ensure_out_dir(config: &PipelineConfig) -> Result<(), PipelineError> {
    fs::create_dir_all(&config.out_dir).map_err(|e| PipelineError::io(&config.out_dir, e))
}

/// Segments the corpus and writes `manifest.json` plus `segments.jsonl`.
pub fn stage_segment(config: &PipelineConfig) -> Result<SegmentStore, PipelineError> {
    let corpus = Corpus::load(&config.corpus_dir)?;
    ensure_out_dir(config)?;

    let manifest = Manifest {
        format: lineformat::FORMAT_VERSION.to_string(),
        settings: config.settings.clone(),
        inputs: corpus.digests.clone(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_text(&config.artifact(MANIFEST_FILE), &(manifest_json + "\n"))?;

    let store = SegmentStore::build(corpus.documents(), &config.settings.segment_options());
    let segments: Vec<&Segment> = store.iter().map(|(_, s)| s).collect();
    lineformat::write_file(&config.artifact(SEGMENTS_FILE), "segment", &segments)?;
    Ok(store)
}

fn load_artifact<T: serde::de::DeserializeOwned>(
    config: &PipelineConfig,
    name: &str,
    kind: &str,
) -> Result<Vec<T>, PipelineError> {
    let path = config.artifact(name);
    if !path.exists() {
        return Err(PipelineError::MissingArtifact(path));
    }
    Ok(lineformat::read_file(&path, kind)?)
}

pub fn load_segments(config: &PipelineConfig) -> Result<SegmentStore, PipelineError> {
    let segments: Vec<Segment> = load_artifact(config, SEGMENTS_FILE, "segment")?;
    Ok(SegmentStore::from_segments(segments))
}

pub fn load_clusters(config: &PipelineConfig) -> Result<Vec<EventCluster>, PipelineError> {
    load_artifact(config, CLUSTERS_FILE, "cluster")
}

/// Clusters persisted segments and writes `clusters.jsonl` and `matches.log`.
pub fn stage_cluster(config: &PipelineConfig) -> Result<Vec<EventCluster>, PipelineError> {
    let store = load_segments(config)?;
    let clusters = cluster_segments(
        &store,
        config.settings.threshold,
        config.settings.keep_singletons,
    );
    lineformat::write_file(&config.artifact(CLUSTERS_FILE), "cluster", &clusters)?;
    write_text(
        &config.artifact(MATCHES_FILE),
        &emit_match_log(&clusters, config.settings.verbatim_fig2),
    )?;
    Ok(clusters)
}

/// Builds event records from persisted clusters and writes the three
/// index files.
pub fn stage_index(config: &PipelineConfig) -> Result<Indices, PipelineError> {
    let corpus = Corpus::load(&config.corpus_dir)?;
    let store = load_segments(config)?;
    let clusters = load_clusters(config)?;
    let table = build_event_table(&clusters, &store);
    let mut records = identify_main_events(&table, &store, corpus.documents());
    attach_sub_events(&mut records, &table, &store);
    let indices = build_indices(&records);
    indices.save(&config.out_dir)?;
    Ok(indices)
}

/// Ranks main events from persisted clusters and writes `ranking.tsv`.
///
/// A corpus whose clusters have no `icl>event` head is not a failure at the
/// pipeline level; it produces a header-only ranking.
pub fn stage_rank(config: &PipelineConfig) -> Result<String, PipelineError> {
    let corpus = Corpus::load(&config.corpus_dir)?;
    let store = load_segments(config)?;
    let clusters = load_clusters(config)?;
    let table = build_event_table(&clusters, &store);
    let tsv = match rank_events(
        &table,
        corpus.documents(),
        &config.settings.weights,
        config.settings.idf,
    ) {
        Ok(ranked) => render_ranking(&ranked),
        Err(RankError::EmptyCorpus) => render_ranking(&[]),
        Err(e) => return Err(e.into()),
    };
    write_text(&config.artifact(RANKING_FILE), &tsv)?;
    Ok(tsv)
}

/// Builds the evaluator input from clusters: one 1-D point per member, its
/// mean similarity to the other members (1.0 for a singleton cluster).
pub fn clustering_points(
    clusters: &[EventCluster],
    store: &SegmentStore,
) -> Result<ScoredClustering, EvalError> {
    let groups = clusters
        .iter()
        .map(|cluster| {
            let points = cluster
                .members
                .iter()
                .map(|m| {
                    if cluster.members.len() < 2 {
                        return 1.0;
                    }
                    let seg = store.get(m).expect("member resolves");
                    let sum: u32 = cluster
                        .members
                        .iter()
                        .filter(|o| *o != m)
                        .map(|o| {
                            u32::from(
                                segment_similarity(seg, store.get(o).expect("member resolves"))
                                    .tenths(),
                            )
                        })
                        .sum();
                    f64::from(sum) / (cluster.members.len() - 1) as f64 / 10.0
                })
                .collect();
            (format!("{}#{}", cluster.cluster_id, cluster.head), points)
        })
        .collect();
    ScoredClustering::new(groups)
}

/// Evaluates the persisted clustering and writes `eval.tsv`. Fewer than two
/// clusters is reported in the file rather than failing the pipeline.
pub fn stage_eval(config: &PipelineConfig) -> Result<String, PipelineError> {
    let store = load_segments(config)?;
    let clusters = load_clusters(config)?;
    let report = if clusters.len() < 2 {
        format!(
            "sample\ta\tb\tcoefficient\n; silhouette unavailable: {} cluster(s)\n",
            clusters.len()
        )
    } else {
        let points = clustering_points(&clusters, &store)?;
        render_report(&points)?
    };
    write_text(&config.artifact(EVAL_FILE), &report)?;
    Ok(report)
}

/// Runs every stage in order. The staged subcommands call exactly these
/// functions, so stagewise execution writes byte-identical artifacts.
pub fn run_pipeline(config: &PipelineConfig) -> Result<(), PipelineError> {
    stage_segment(config)?;
    stage_cluster(config)?;
    stage_index(config)?;
    stage_rank(config)?;
    stage_eval(config)?;
    Ok(())
}

/// Map of document id to parsed document for ad-hoc inspection.
pub fn document_map(corpus: &Corpus) -> BTreeMap<String, &UnlDocument> {
    corpus
        .documents()
        .iter()
        .map(|d| (d.doc_id.clone(), d))
        .collect()
}
