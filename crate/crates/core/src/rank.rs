//! Main-event ranking from document spread, corpus frequency and title
//! occurrence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event_model::EventTable;
use crate::unl::UnlDocument;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("no main events to rank")]
    EmptyCorpus,
    #[error("rank weights must be strictly positive")]
    NonPositiveWeights,
}

/// Linear weights for the three score components. The default gives title
/// occurrence the highest priority.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankWeights {
    pub doc_count: f64,
    pub frequency: f64,
    pub title: f64,
}

impl Default for RankWeights {
    fn default() -> RankWeights {
        RankWeights {
            doc_count: 1.0,
            frequency: 1.0,
            title: 3.0,
        }
    }
}

impl RankWeights {
    pub fn validate(&self) -> Result<(), RankError> {
        if self.doc_count > 0.0 && self.frequency > 0.0 && self.title > 0.0 {
            Ok(())
        } else {
            Err(RankError::NonPositiveWeights)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEvent {
    pub event_name: String,
    pub doc_count: usize,
    pub total_frequency: usize,
    pub title_count: usize,
    pub score: f64,
    pub rank: usize,
}

/// Number of documents whose title concepts include this headword.
pub fn title_hits(event: &str, documents: &[UnlDocument]) -> usize {
    let event = event.to_lowercase();
    documents
        .iter()
        .filter(|d| d.title_concepts.iter().any(|c| c.headword == event))
        .count()
}

/// Scores and ranks every main event of the table.
///
/// `score = w_df * doc_count + w_tf * total_frequency + w_title * title_count`,
/// or with `idf`, the first term becomes `w_df * ln(N / doc_count)`. Sorted by
/// descending score, ties ascending by name; ranks are the 1-based positions.
pub fn rank_events(
    table: &EventTable,
    documents: &[UnlDocument],
    weights: &RankWeights,
    idf: bool,
) -> Result<Vec<RankedEvent>, RankError> {
    weights.validate()?;
    let corpus_size = documents.len();

    let mut ranked: Vec<RankedEvent> = table
        .iter()
        .filter(|(_, entry)| entry.head.is_event())
        .map(|(_, entry)| {
            let doc_count = entry.doc_ids.len();
            let total_frequency = entry.frequency;
            let title_count = title_hits(&entry.head.headword, documents);
            let df_term = if idf {
                (corpus_size as f64 / doc_count as f64).ln()
            } else {
                doc_count as f64
            };
            let score = weights.doc_count * df_term
                + weights.frequency * total_frequency as f64
                + weights.title * title_count as f64;
            RankedEvent {
                event_name: entry.head.headword.clone(),
                doc_count,
                total_frequency,
                title_count,
                score,
                rank: 0,
            }
        })
        .collect();

    if ranked.is_empty() {
        return Err(RankError::EmptyCorpus);
    }

    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| a.event_name.cmp(&b.event_name))
    });
    for (i, event) in ranked.iter_mut().enumerate() {
        event.rank = i + 1;
    }
    Ok(ranked)
}

/// TSV rendering: `rank, event, score, doc_count, total_frequency, title_count`.
pub fn render_ranking(ranked: &[RankedEvent]) -> String {
    let mut out = String::from("rank\tevent\tscore\tdoc_count\ttotal_frequency\ttitle_count\n");
    for e in ranked {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            e.rank, e.event_name, e.score, e.doc_count, e.total_frequency, e.title_count
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::cluster_segments;
    use crate::event_model::build_event_table;
    use crate::parser::parse_document;
    use crate::score::Threshold;
    use crate::segment::{SegmentOptions, SegmentStore};

    fn event_doc(id: &str, head: &str, titled: bool) -> UnlDocument {
        let title = if titled {
            format!("#TITLE {head}(icl>event)\n")
        } else {
            String::new()
        };
        let text = format!(
            "#DOC {id}\n{title}#SENT s1\nagt({head}(icl>event), student(icl>person))\nplc({head}(icl>event), hall(icl>place))\n#END\n"
        );
        parse_document(&text, "test").unwrap()
    }

    fn rank_fixture(specs: &[(&str, &str, bool)]) -> (EventTable, Vec<UnlDocument>) {
        let docs: Vec<UnlDocument> = specs
            .iter()
            .map(|(id, head, titled)| event_doc(id, head, *titled))
            .collect();
        let store = SegmentStore::build(&docs, &SegmentOptions::default());
        let clusters = cluster_segments(&store, Threshold::DEFAULT, false);
        (build_event_table(&clusters, &store), docs)
    }

    #[test]
    fn title_occurrence_dominates_under_default_weights() {
        // A and B both span 3 docs with frequency 3; only A is titled.
        let (table, docs) = rank_fixture(&[
            ("a1", "assembly", true),
            ("a2", "assembly", false),
            ("a3", "assembly", false),
            ("b1", "banquet", false),
            ("b2", "banquet", false),
            ("b3", "banquet", false),
        ]);
        let ranked = rank_events(&table, &docs, &RankWeights::default(), false).unwrap();
        assert_eq!(ranked[0].event_name, "assembly");
        assert_eq!(ranked[0].score, 1.0 * 3.0 + 1.0 * 3.0 + 3.0 * 1.0);
        assert_eq!(ranked[1].event_name, "banquet");
        assert_eq!(ranked[1].score, 6.0);
        assert_eq!(ranked[0].rank, 1);
        assert_eq!(ranked[1].rank, 2);
    }

    #[test]
    fn single_event_ranks_first_for_any_weights() {
        let (table, docs) = rank_fixture(&[("a1", "meet", false), ("a2", "meet", false)]);
        let heavy = RankWeights {
            doc_count: 9.0,
            frequency: 0.5,
            title: 100.0,
        };
        let ranked = rank_events(&table, &docs, &heavy, false).unwrap();
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].rank, 1);
    }

    #[test]
    fn identical_components_break_ties_by_name_without_rank_sharing() {
        let (table, docs) = rank_fixture(&[
            ("a1", "meet", false),
            ("a2", "meet", false),
            ("b1", "feast", false),
            ("b2", "feast", false),
        ]);
        let ranked = rank_events(&table, &docs, &RankWeights::default(), false).unwrap();
        assert_eq!(ranked[0].score, ranked[1].score);
        assert_eq!(ranked[0].event_name, "feast");
        assert_eq!(ranked[1].event_name, "meet");
        assert_eq!((ranked[0].rank, ranked[1].rank), (1, 2));
    }

    #[test]
    fn empty_table_is_an_error() {
        let (table, docs) = rank_fixture(&[]);
        assert_eq!(
            rank_events(&table, &docs, &RankWeights::default(), false),
            Err(RankError::EmptyCorpus)
        );
    }

    #[test]
    fn title_hits_count_documents_case_folded() {
        let docs = vec![
            event_doc("d1", "election", true),
            event_doc("d2", "election", true),
            event_doc("d3", "election", false),
        ];
        assert_eq!(title_hits("election", &docs), 2);
        assert_eq!(title_hits("Election", &docs), 2);
        assert_eq!(title_hits("absent", &docs), 0);
    }

    #[test]
    fn idf_substitutes_the_document_term() {
        let (table, docs) = rank_fixture(&[
            ("a1", "meet", false),
            ("a2", "meet", false),
            ("b1", "feast", false),
            ("b2", "feast", false),
        ]);
        let ranked = rank_events(&table, &docs, &RankWeights::default(), true).unwrap();
        let expected = (4.0f64 / 2.0).ln() + 2.0;
        assert!((ranked[0].score - expected).abs() < 1e-12);
    }

    #[test]
    fn non_positive_weights_are_rejected() {
        let (table, docs) = rank_fixture(&[("a1", "meet", false), ("a2", "meet", false)]);
        let bad = RankWeights {
            doc_count: 0.0,
            frequency: 1.0,
            title: 1.0,
        };
        assert_eq!(
            rank_events(&table, &docs, &bad, false),
            Err(RankError::NonPositiveWeights)
        );
    }
}
