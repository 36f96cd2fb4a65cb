//! The per-event associative table, main/sub-event identification and
//! timeline resolution.
//!
//! Main events are the `icl>event` heads of the table; sub-events are the
//! `icl>action` concepts co-occurring with a main event inside its cluster
//! member segments. Every event name in the published index figures is a
//! noun-like event and every sub-event a verb, which is the reading
//! implemented here.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cluster::EventCluster;
use crate::segment::{SegmentRef, SegmentStore};
use crate::unl::{Concept, DocDate, NodeKey, Relation, UnlDocument};

/// Part of speech derived from the head constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PosTag {
    NounEvent,
    VerbAction,
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosTag::NounEvent => write!(f, "noun-event"),
            PosTag::VerbAction => write!(f, "verb-action"),
        }
    }
}

/// One head node's aggregate over all cluster member segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventEntry {
    pub head: Concept,
    pub concept_nodes: Vec<Concept>,
    pub relations: Vec<Relation>,
    /// Number of member-segment occurrences across the corpus.
    pub frequency: usize,
    pub pos: PosTag,
    pub doc_ids: Vec<String>,
    /// Sentence ids per document, in segment order.
    pub sentence_ids: BTreeMap<String, Vec<String>>,
    /// The member segments this entry aggregates, in (doc, index) order.
    pub positions: Vec<SegmentRef>,
}

/// Associative map from head node to its aggregate entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventTable {
    entries: BTreeMap<NodeKey, EventEntry>,
}

impl EventTable {
    /// Assembles a table from prebuilt entries, keyed by head node.
    pub fn from_entries(entries: impl IntoIterator<Item = EventEntry>) -> EventTable {
        EventTable {
            entries: entries
                .into_iter()
                .map(|e| (e.head.node_key(), e))
                .collect(),
        }
    }

    pub fn get(&self, key: &NodeKey) -> Option<&EventEntry> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeKey, &EventEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn push_unique<T: PartialEq + Clone>(list: &mut Vec<T>, item: &T) {
    if !list.contains(item) {
        list.push(item.clone());
    }
}

/// Builds the event table from cluster members. One entry per distinct head
/// node; frequency counts every member-segment occurrence.
pub fn build_event_table(clusters: &[EventCluster], store: &SegmentStore) -> EventTable {
    let mut entries: BTreeMap<NodeKey, EventEntry> = BTreeMap::new();
    let mut positions: Vec<SegmentRef> = clusters
        .iter()
        .flat_map(|c| c.members.iter().cloned())
        .collect();
    positions.sort();
    positions.dedup();

    for r in positions {
        let segment = store.get(&r).expect("cluster member resolves");
        let head = segment.head.as_ref().expect("cluster member has a head");
        let key = head.node_key();
        let entry = entries.entry(key).or_insert_with(|| EventEntry {
            head: head.clone(),
            concept_nodes: Vec::new(),
            relations: Vec::new(),
            frequency: 0,
            pos: if head.is_event() {
                PosTag::NounEvent
            } else {
                PosTag::VerbAction
            },
            doc_ids: Vec::new(),
            sentence_ids: BTreeMap::new(),
            positions: Vec::new(),
        });
        entry.frequency += 1;
        push_unique(&mut entry.doc_ids, &r.doc_id);
        entry
            .sentence_ids
            .entry(r.doc_id.clone())
            .or_default()
            .extend(segment.sentence_ids.iter().cloned());
        for c in &segment.concepts {
            push_unique(&mut entry.concept_nodes, c);
        }
        for rel in &segment.relations {
            push_unique(&mut entry.relations, rel);
        }
        entry.positions.push(r);
    }

    EventTable { entries }
}

/// Timeline qualifier attached to a resolved date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeQualifier {
    Explicit,
    Before,
    After,
    Published,
    Unknown,
}

impl fmt::Display for TimeQualifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeQualifier::Explicit => write!(f, "explicit"),
            TimeQualifier::Before => write!(f, "before"),
            TimeQualifier::After => write!(f, "after"),
            TimeQualifier::Published => write!(f, "published"),
            TimeQualifier::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedTime {
    pub date: Option<DocDate>,
    pub qualifier: TimeQualifier,
}

impl ResolvedTime {
    pub const UNKNOWN: ResolvedTime = ResolvedTime {
        date: None,
        qualifier: TimeQualifier::Unknown,
    };

    /// The index-facing rendering: the date, or "unknown".
    pub fn display_date(&self) -> String {
        match self.date {
            Some(d) => d.to_string(),
            None => "unknown".to_string(),
        }
    }
}

/// Resolves the time of one segment through the rule cascade:
///
/// 1. a time-related concept with a parseable `dd_mm_yyyy` headword wins
///    ("explicit");
/// 2. a `past`/`future` attribute on the segment head anchors to the
///    document date ("before"/"after");
/// 3. the document date alone ("published");
/// 4. otherwise unknown.
///
/// Exactly one rule fires for any input.
pub fn resolve_time(doc: &UnlDocument, segment: &crate::segment::Segment) -> ResolvedTime {
    for time_concept in &segment.times {
        if let Ok(date) = time_concept.headword.parse::<DocDate>() {
            return ResolvedTime {
                date: Some(date),
                qualifier: TimeQualifier::Explicit,
            };
        }
    }
    let doc_date = doc.date();
    if let (Some(head), Some(date)) = (segment.head.as_ref(), doc_date) {
        for attr in &head.attributes {
            match attr.as_str() {
                "past" => {
                    return ResolvedTime {
                        date: Some(date),
                        qualifier: TimeQualifier::Before,
                    }
                }
                "future" => {
                    return ResolvedTime {
                        date: Some(date),
                        qualifier: TimeQualifier::After,
                    }
                }
                _ => {}
            }
        }
    }
    match doc_date {
        Some(date) => ResolvedTime {
            date: Some(date),
            qualifier: TimeQualifier::Published,
        },
        None => ResolvedTime::UNKNOWN,
    }
}

/// Per-document detail of one main event record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDocDetail {
    pub doc_id: String,
    /// Action concepts co-occurring in this document's member segments.
    pub sub_events: Vec<Concept>,
    pub time: ResolvedTime,
    pub sentence_ids: Vec<String>,
}

/// A main event with its corpus-wide detail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub main_event: Concept,
    pub frequency: usize,
    /// Union of per-document sub-events, deduplicated by headword.
    pub sub_events: Vec<Concept>,
    pub persons: Vec<String>,
    pub places: Vec<String>,
    pub docs: Vec<EventDocDetail>,
}

impl EventRecord {
    pub fn event_name(&self) -> &str {
        &self.main_event.headword
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.docs.iter().map(|d| d.doc_id.as_str())
    }

    pub fn times(&self) -> impl Iterator<Item = &ResolvedTime> {
        self.docs.iter().map(|d| &d.time)
    }
}

/// Builds one record per `icl>event` table entry, gathering persons, places
/// and resolved times from all of its member segments. Records are ordered
/// by descending frequency, then headword. Sub-events are left empty; see
/// [`attach_sub_events`].
pub fn identify_main_events(
    table: &EventTable,
    store: &SegmentStore,
    documents: &[UnlDocument],
) -> Vec<EventRecord> {
    let by_id: BTreeMap<&str, &UnlDocument> =
        documents.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let mut records = Vec::new();
    for (_, entry) in table.iter() {
        if !entry.head.is_event() {
            continue;
        }
        let mut record = EventRecord {
            main_event: entry.head.clone(),
            frequency: entry.frequency,
            sub_events: Vec::new(),
            persons: Vec::new(),
            places: Vec::new(),
            docs: Vec::new(),
        };
        let mut positions = entry.positions.clone();
        positions.sort();
        for r in &positions {
            let segment = store.get(r).expect("table position resolves");
            for p in segment.person_headwords() {
                push_unique(&mut record.persons, &p.to_string());
            }
            for p in segment.place_headwords() {
                push_unique(&mut record.places, &p.to_string());
            }
            let time = by_id
                .get(r.doc_id.as_str())
                .map(|doc| resolve_time(doc, segment))
                .unwrap_or(ResolvedTime::UNKNOWN);
            match record.docs.iter_mut().find(|d| d.doc_id == r.doc_id) {
                Some(detail) => {
                    detail.sentence_ids.extend(segment.sentence_ids.iter().cloned());
                    if detail.time != time {
                        log::warn!(
                            "event `{}` in {} has multiple resolved times; keeping the first",
                            record.main_event.headword,
                            r.doc_id,
                        );
                    }
                }
                None => record.docs.push(EventDocDetail {
                    doc_id: r.doc_id.clone(),
                    sub_events: Vec::new(),
                    time,
                    sentence_ids: segment.sentence_ids.clone(),
                }),
            }
        }
        records.push(record);
    }
    records.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.main_event.headword.cmp(&b.main_event.headword))
    });
    records
}

/// Fills each record's sub-events: the distinct `icl>action` concepts found
/// in its member segments, per document and record-wide, in first-occurrence
/// order, deduplicated by headword. A concept never serves as both the main
/// event and a sub-event of the same record.
pub fn attach_sub_events(records: &mut [EventRecord], table: &EventTable, store: &SegmentStore) {
    for record in records.iter_mut() {
        let Some(entry) = table.get(&record.main_event.node_key()) else {
            continue;
        };
        let mut positions = entry.positions.clone();
        positions.sort();
        for r in &positions {
            let segment = store.get(r).expect("table position resolves");
            for concept in &segment.concepts {
                if !concept.is_action() || concept.headword == record.main_event.headword {
                    continue;
                }
                if !record
                    .sub_events
                    .iter()
                    .any(|c| c.headword == concept.headword)
                {
                    record.sub_events.push(concept.clone());
                }
                let detail = record
                    .docs
                    .iter_mut()
                    .find(|d| d.doc_id == r.doc_id)
                    .expect("doc detail exists for member segment");
                if !detail
                    .sub_events
                    .iter()
                    .any(|c| c.headword == concept.headword)
                {
                    detail.sub_events.push(concept.clone());
                }
            }
        }
    }
}
