//! Event extraction, clustering, indexing and ranking for news corpora
//! annotated in a UNL-style concept-relation notation.
//!
//! The pipeline stages are:
//!
//! 1. [`parser`] — read corpus files into [`UnlDocument`]s.
//! 2. [`segment`] — group consecutive sentences into event segments with the
//!    condition/feature/conjunction scoring scheme.
//! 3. [`cluster`] — form cross-document event clusters from segments whose
//!    similarity exceeds the threshold.
//! 4. [`event_model`] — build the per-event table, identify main events,
//!    attach sub-events and resolve timeline details.
//! 5. [`index`] — build, persist and query the person/place/event indices.
//! 6. [`rank`] — score and rank main events.
//! 7. [`silhouette`] — silhouette-based cluster quality evaluation.
//!
//! [`pipeline`] ties the stages together over a corpus directory.

pub mod cluster;
pub mod event_model;
pub mod index;
pub mod lineformat;
pub mod parser;
pub mod pipeline;
pub mod rank;
pub mod score;
pub mod segment;
pub mod silhouette;
pub mod unl;

pub use cluster::{cluster_segments, emit_match_log, segment_similarity, EventCluster, SegmentPairMatch};
pub use event_model::{
    attach_sub_events, build_event_table, identify_main_events, resolve_time, EventEntry,
    EventRecord, EventTable, ResolvedTime, TimeQualifier,
};
pub use index::{
    build_indices, EventIndexEntry, Index, IndexError, Indices, PersonIndexEntry, PlaceIndexEntry,
};
pub use parser::{extract_date, parse_concept, parse_document, parse_relation, ParseError};
pub use pipeline::{run_pipeline, Corpus, PipelineConfig, PipelineError, PipelineSettings};
pub use rank::{rank_events, title_hits, RankError, RankWeights, RankedEvent};
pub use score::{Score, Threshold};
pub use segment::{
    build_segments, pair_score, sentence_features, PairScore, Segment, SegmentOptions, SegmentRef,
    SegmentStore, SentenceFeatures,
};
pub use silhouette::{
    mean_silhouette, point_silhouette, quality_band, silhouette, EvalError, QualityBand,
    ScoredClustering, SilhouetteRow,
};
pub use unl::{Concept, DocDate, NodeKey, Relation, Sentence, UnlDocument};
