//! Sentence-to-segment grouping with the modified scoring scheme.
//!
//! Consecutive sentences of one document merge into a segment when their
//! pair score clears the threshold (condition + feature + conjunction) or
//! when a conjunction links them, which overrides the threshold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::score::{Score, Threshold};
use crate::unl::{Concept, NodeKey, Relation, Sentence, UnlDocument};

const CONDITION_EVENT: Score = Score::from_tenths(5);
const CONDITION_ACTION: Score = Score::from_tenths(4);
const FEATURE_PLACE: Score = Score::from_tenths(2);
const FEATURE_PERSON: Score = Score::from_tenths(2);
const FEATURE_DURATION: Score = Score::from_tenths(1);
const CONJUNCTION: Score = Score::from_tenths(1);

/// Options shared by segmentation and pair scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentOptions {
    pub threshold: Threshold,
    /// When set, place/person/duration features score even without a shared
    /// head (the default counts them only when the condition score is
    /// positive).
    pub loose_features: bool,
}

impl Default for SegmentOptions {
    fn default() -> SegmentOptions {
        SegmentOptions {
            threshold: Threshold::DEFAULT,
            loose_features: false,
        }
    }
}

/// Per-sentence summary feeding the pair scorer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceFeatures {
    /// Event/action concepts — the head candidates.
    pub heads: Vec<Concept>,
    pub persons: Vec<Concept>,
    pub places: Vec<Concept>,
    /// Concepts reached by a `tim`/`dur` relation or carrying a time
    /// constraint.
    pub times: Vec<Concept>,
    /// All distinct concepts in first-occurrence order.
    pub concepts: Vec<Concept>,
    /// Relations labeled `and`/`or`; candidate cross-sentence links.
    pub conjunctions: Vec<Relation>,
    /// True when the first relation of the sentence is labeled `and`/`or`.
    pub starts_with_conjunction: bool,
    pub has_duration: bool,
}

/// The three score components of one adjacent-sentence comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairScore {
    pub condition: Score,
    pub feature: Score,
    pub conjunction: Score,
}

impl PairScore {
    pub fn total(&self) -> Score {
        self.condition + self.feature + self.conjunction
    }
}

/// A scored group of consecutive sentences; the clustering unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub doc_id: String,
    pub sentence_ids: Vec<String>,
    /// The event/action concept of highest in-segment frequency, if any.
    pub head: Option<Concept>,
    pub concepts: Vec<Concept>,
    pub relations: Vec<Relation>,
    pub persons: Vec<Concept>,
    pub places: Vec<Concept>,
    pub times: Vec<Concept>,
    pub has_duration: bool,
}

impl Segment {
    pub fn head_key(&self) -> Option<NodeKey> {
        self.head.as_ref().map(Concept::node_key)
    }

    pub fn person_headwords(&self) -> impl Iterator<Item = &str> {
        self.persons.iter().map(|c| c.headword.as_str())
    }

    pub fn place_headwords(&self) -> impl Iterator<Item = &str> {
        self.places.iter().map(|c| c.headword.as_str())
    }
}

fn push_unique<T: PartialEq + Clone>(list: &mut Vec<T>, item: &T) {
    if !list.contains(item) {
        list.push(item.clone());
    }
}

/// Extracts the feature summary of one sentence.
pub fn sentence_features(sentence: &Sentence) -> SentenceFeatures {
    let mut f = SentenceFeatures {
        heads: Vec::new(),
        persons: Vec::new(),
        places: Vec::new(),
        times: Vec::new(),
        concepts: Vec::new(),
        conjunctions: Vec::new(),
        starts_with_conjunction: sentence
            .relations
            .first()
            .is_some_and(Relation::is_conjunction),
        has_duration: false,
    };

    for relation in &sentence.relations {
        if relation.label == "dur" {
            f.has_duration = true;
        }
        if relation.is_conjunction() {
            f.conjunctions.push(relation.clone());
        }
        for concept in relation.endpoints() {
            push_unique(&mut f.concepts, concept);
            if concept.is_event() || concept.is_action() {
                push_unique(&mut f.heads, concept);
            }
            if concept.is_person() {
                push_unique(&mut f.persons, concept);
            }
            if concept.is_place() {
                push_unique(&mut f.places, concept);
            }
            if concept.has_attribute("dur") {
                f.has_duration = true;
            }
        }
        if relation.label == "tim" || relation.label == "dur" {
            push_unique(&mut f.times, &relation.target);
        }
    }
    for concept in f.concepts.clone() {
        if concept.is_time() {
            push_unique(&mut f.times, &concept);
        }
    }
    f
}

fn shared_head_condition(a: &SentenceFeatures, b: &SentenceFeatures) -> Score {
    let shared = |want_event: bool| {
        a.heads.iter().any(|ca| {
            (if want_event { ca.is_event() } else { ca.is_action() })
                && b.heads.iter().any(|cb| cb.node_key() == ca.node_key())
        })
    };
    if shared(true) {
        CONDITION_EVENT
    } else if shared(false) {
        CONDITION_ACTION
    } else {
        Score::ZERO
    }
}

fn share_headword(a: &[Concept], b: &[Concept]) -> bool {
    a.iter().any(|ca| b.iter().any(|cb| cb.headword == ca.headword))
}

/// True when an `and`/`or` relation in either sentence has one endpoint in
/// `a`'s concepts and the other in `b`'s.
fn conjunction_links(a: &SentenceFeatures, b: &SentenceFeatures) -> bool {
    let in_a = |c: &Concept| a.concepts.iter().any(|x| x.headword == c.headword);
    let in_b = |c: &Concept| b.concepts.iter().any(|x| x.headword == c.headword);
    a.conjunctions
        .iter()
        .chain(b.conjunctions.iter())
        .any(|rel| {
            let [x, y] = rel.endpoints();
            (in_a(x) && in_b(y)) || (in_b(x) && in_a(y))
        })
}

/// Scores two adjacent sentences from their feature summaries.
pub fn pair_score_features(
    a: &SentenceFeatures,
    b: &SentenceFeatures,
    loose_features: bool,
) -> PairScore {
    let condition = shared_head_condition(a, b);

    let mut feature = Score::ZERO;
    if loose_features || condition > Score::ZERO {
        if share_headword(&a.places, &b.places) {
            feature = feature + FEATURE_PLACE;
        }
        if share_headword(&a.persons, &b.persons) {
            feature = feature + FEATURE_PERSON;
        }
        if a.has_duration && b.has_duration {
            feature = feature + FEATURE_DURATION;
        }
    }

    let conjunction = if conjunction_links(a, b) || b.starts_with_conjunction {
        CONJUNCTION
    } else {
        Score::ZERO
    };

    PairScore {
        condition,
        feature,
        conjunction,
    }
}

/// Scores two adjacent sentences of one document.
pub fn pair_score(a: &Sentence, b: &Sentence, loose_features: bool) -> PairScore {
    pair_score_features(&sentence_features(a), &sentence_features(b), loose_features)
}

/// Picks the most frequent event/action concept; ties break to the earliest
/// first occurrence. Frequency counts every relation-endpoint occurrence.
fn segment_head(relations: &[Relation]) -> Option<Concept> {
    let mut order: Vec<(NodeKey, Concept, usize)> = Vec::new();
    for relation in relations {
        for concept in relation.endpoints() {
            if !(concept.is_event() || concept.is_action()) {
                continue;
            }
            let key = concept.node_key();
            match order.iter_mut().find(|(k, _, _)| *k == key) {
                Some((_, _, count)) => *count += 1,
                None => order.push((key, concept.clone(), 1)),
            }
        }
    }
    let mut best: Option<(Concept, usize)> = None;
    for (_, concept, count) in order {
        // Strictly greater, so the first occurrence wins ties.
        if best.as_ref().is_none_or(|(_, b)| count > *b) {
            best = Some((concept, count));
        }
    }
    best.map(|(c, _)| c)
}

fn build_segment(doc_id: &str, sentences: &[&Sentence]) -> Segment {
    let mut seg = Segment {
        doc_id: doc_id.to_string(),
        sentence_ids: sentences.iter().map(|s| s.sentence_id.clone()).collect(),
        head: None,
        concepts: Vec::new(),
        relations: Vec::new(),
        persons: Vec::new(),
        places: Vec::new(),
        times: Vec::new(),
        has_duration: false,
    };
    for sentence in sentences {
        let f = sentence_features(sentence);
        seg.relations.extend(sentence.relations.iter().cloned());
        for c in &f.concepts {
            push_unique(&mut seg.concepts, c);
        }
        for c in &f.persons {
            push_unique(&mut seg.persons, c);
        }
        for c in &f.places {
            push_unique(&mut seg.places, c);
        }
        for c in &f.times {
            push_unique(&mut seg.times, c);
        }
        seg.has_duration |= f.has_duration;
    }
    seg.head = segment_head(&seg.relations);
    seg
}

/// Greedy left-to-right segmentation of one document.
///
/// Sentence `i+1` joins the current segment iff its pair score against the
/// segment's last sentence exceeds the threshold, or the conjunction
/// component is positive (the conjunction override).
pub fn build_segments(doc: &UnlDocument, opts: &SegmentOptions) -> Vec<Segment> {
    let mut segments = Vec::new();
    let mut current: Vec<&Sentence> = Vec::new();
    let features: Vec<SentenceFeatures> = doc.sentences.iter().map(sentence_features).collect();

    for (i, sentence) in doc.sentences.iter().enumerate() {
        if current.is_empty() {
            current.push(sentence);
            continue;
        }
        let score = pair_score_features(&features[i - 1], &features[i], opts.loose_features);
        if opts.threshold.admits(score.total()) || score.conjunction > Score::ZERO {
            current.push(sentence);
        } else {
            segments.push(build_segment(&doc.doc_id, &current));
            current = vec![sentence];
        }
    }
    if !current.is_empty() {
        segments.push(build_segment(&doc.doc_id, &current));
    }
    segments
}

/// Position of a segment: document id plus index in that document's
/// segment list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SegmentRef {
    pub doc_id: String,
    pub index: usize,
}

/// All segments of a corpus, grouped by document, in deterministic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentStore {
    by_doc: BTreeMap<String, Vec<Segment>>,
}

impl SegmentStore {
    pub fn build(documents: &[UnlDocument], opts: &SegmentOptions) -> SegmentStore {
        let mut by_doc = BTreeMap::new();
        for doc in documents {
            by_doc.insert(doc.doc_id.clone(), build_segments(doc, opts));
        }
        SegmentStore { by_doc }
    }

    /// Rebuilds a store from a flat segment list (e.g. a persisted artifact).
    /// Per-document order follows list order.
    pub fn from_segments(segments: Vec<Segment>) -> SegmentStore {
        let mut by_doc: BTreeMap<String, Vec<Segment>> = BTreeMap::new();
        for segment in segments {
            by_doc.entry(segment.doc_id.clone()).or_default().push(segment);
        }
        SegmentStore { by_doc }
    }

    pub fn get(&self, r: &SegmentRef) -> Option<&Segment> {
        self.by_doc.get(&r.doc_id).and_then(|v| v.get(r.index))
    }

    /// Segments in (doc_id, index) order.
    pub fn iter(&self) -> impl Iterator<Item = (SegmentRef, &Segment)> {
        self.by_doc.iter().flat_map(|(doc_id, segments)| {
            segments.iter().enumerate().map(move |(index, seg)| {
                (
                    SegmentRef {
                        doc_id: doc_id.clone(),
                        index,
                    },
                    seg,
                )
            })
        })
    }

    pub fn len(&self) -> usize {
        self.by_doc.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
