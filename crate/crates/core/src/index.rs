//! The person, place and event indices: build, persist, load and query.
//!
//! Row grain is one entry per (key, main event, document). Keys and values
//! are case-folded on write; the on-disk format is the line-oriented
//! header + JSON-lines form of [`crate::lineformat`], with JSON keys in the
//! published column order of each index.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event_model::{EventRecord, ResolvedTime};
use crate::lineformat;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("io failure on {path}: {reason}")]
    IoFailure { path: String, reason: String },
    #[error("format mismatch in {path}: found `{found}`, expected `{expected}`")]
    FormatVersionMismatch {
        path: String,
        found: String,
        expected: String,
    },
    #[error("key `{key}` not found")]
    KeyNotFound { key: String },
}

impl IndexError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> IndexError {
        IndexError::IoFailure {
            path: path.display().to_string(),
            reason: e.to_string(),
        }
    }
}

/// Behavior shared by the three row types.
pub trait IndexEntry: Serialize + DeserializeOwned + Clone + PartialEq {
    /// File stem and header kind: `person`, `place` or `event`.
    const KIND: &'static str;
    /// Column names for TSV output, mirroring the published figures.
    const COLUMNS: &'static [&'static str];

    fn primary_key(&self) -> &str;
    /// Secondary sort key after (primary, event name): the document id.
    fn sort_key(&self) -> (String, String, String);
    fn tsv_row(&self) -> String;
}

fn list_cell(items: &[String]) -> String {
    format!("[{}]", items.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonIndexEntry {
    pub person: String,
    pub event_name: String,
    pub sub_events: Vec<String>,
    pub document_id: String,
    pub places: Vec<String>,
    pub time: ResolvedTime,
    pub sentences: Vec<String>,
}

impl IndexEntry for PersonIndexEntry {
    const KIND: &'static str = "person";
    const COLUMNS: &'static [&'static str] = &[
        "person",
        "event_name",
        "sub_events",
        "document_id",
        "places",
        "time",
        "sentences",
    ];

    fn primary_key(&self) -> &str {
        &self.person
    }

    fn sort_key(&self) -> (String, String, String) {
        (
            self.person.clone(),
            self.event_name.clone(),
            self.document_id.clone(),
        )
    }

    fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.person,
            self.event_name,
            list_cell(&self.sub_events),
            self.document_id,
            list_cell(&self.places),
            self.time.display_date(),
            list_cell(&self.sentences),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceIndexEntry {
    pub place: String,
    pub event_name: String,
    pub sub_events: Vec<String>,
    pub document_id: String,
    pub persons: Vec<String>,
    pub time: ResolvedTime,
    pub sentences: Vec<String>,
}

impl IndexEntry for PlaceIndexEntry {
    const KIND: &'static str = "place";
    const COLUMNS: &'static [&'static str] = &[
        "place",
        "event_name",
        "sub_events",
        "document_id",
        "persons",
        "time",
        "sentences",
    ];

    fn primary_key(&self) -> &str {
        &self.place
    }

    fn sort_key(&self) -> (String, String, String) {
        (
            self.place.clone(),
            self.event_name.clone(),
            self.document_id.clone(),
        )
    }

    fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.place,
            self.event_name,
            list_cell(&self.sub_events),
            self.document_id,
            list_cell(&self.persons),
            self.time.display_date(),
            list_cell(&self.sentences),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventIndexEntry {
    pub event_name: String,
    pub sub_events: Vec<String>,
    pub document_id: String,
    pub persons: Vec<String>,
    pub places: Vec<String>,
    pub time: ResolvedTime,
    pub sentences: Vec<String>,
}

impl IndexEntry for EventIndexEntry {
    const KIND: &'static str = "event";
    const COLUMNS: &'static [&'static str] = &[
        "event_name",
        "sub_events",
        "document_id",
        "persons",
        "places",
        "time",
        "sentences",
    ];

    fn primary_key(&self) -> &str {
        &self.event_name
    }

    fn sort_key(&self) -> (String, String, String) {
        (
            self.event_name.clone(),
            String::new(),
            self.document_id.clone(),
        )
    }

    fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.event_name,
            list_cell(&self.sub_events),
            self.document_id,
            list_cell(&self.persons),
            list_cell(&self.places),
            self.time.display_date(),
            list_cell(&self.sentences),
        )
    }
}

/// An index held in canonical (sorted) order.
#[derive(Debug, Clone, PartialEq)]
pub struct Index<E: IndexEntry> {
    entries: Vec<E>,
}

impl<E: IndexEntry> Default for Index<E> {
    fn default() -> Index<E> {
        Index { entries: Vec::new() }
    }
}

impl<E: IndexEntry> Index<E> {
    pub fn new(mut entries: Vec<E>) -> Index<E> {
        entries.sort_by_key(IndexEntry::sort_key);
        Index { entries }
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All entries whose primary field equals the case-folded key, in
    /// persisted order. An absent key is an error, distinguishable from an
    /// empty index by construction.
    pub fn query(&self, key: &str) -> Result<Vec<&E>, IndexError> {
        let key = key.to_lowercase();
        let hits: Vec<&E> = self
            .entries
            .iter()
            .filter(|e| e.primary_key() == key)
            .collect();
        if hits.is_empty() {
            return Err(IndexError::KeyNotFound { key });
        }
        Ok(hits)
    }

    pub fn tsv(entries: &[&E]) -> String {
        let mut out = E::COLUMNS.join("\t");
        out.push('\n');
        for entry in entries {
            out.push_str(&entry.tsv_row());
            out.push('\n');
        }
        out
    }

    pub fn file_name() -> String {
        format!("{}.idx", E::KIND)
    }

    pub fn save(&self, dir: &Path) -> Result<(), IndexError> {
        lineformat::write_file(&dir.join(Self::file_name()), E::KIND, &self.entries)
    }

    pub fn load(dir: &Path) -> Result<Index<E>, IndexError> {
        let entries = lineformat::read_file(&dir.join(Self::file_name()), E::KIND)?;
        Ok(Index::new(entries))
    }
}

/// The three indices of one corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Indices {
    pub person: Index<PersonIndexEntry>,
    pub place: Index<PlaceIndexEntry>,
    pub event: Index<EventIndexEntry>,
}

impl Indices {
    pub fn save(&self, dir: &Path) -> Result<(), IndexError> {
        self.person.save(dir)?;
        self.place.save(dir)?;
        self.event.save(dir)
    }

    pub fn load(dir: &Path) -> Result<Indices, IndexError> {
        Ok(Indices {
            person: Index::load(dir)?,
            place: Index::load(dir)?,
            event: Index::load(dir)?,
        })
    }
}

fn fold_all(items: &[String]) -> Vec<String> {
    items.iter().map(|s| s.to_lowercase()).collect()
}

/// Builds the three indices from main event records: one event entry per
/// (main, doc), one person entry per (person, main, doc), one place entry
/// per (place, main, doc).
pub fn build_indices(records: &[EventRecord]) -> Indices {
    let mut person = Vec::new();
    let mut place = Vec::new();
    let mut event = Vec::new();

    for record in records {
        let event_name = record.main_event.headword.to_lowercase();
        let persons = fold_all(&record.persons);
        let places = fold_all(&record.places);
        for detail in &record.docs {
            let sub_events: Vec<String> = detail
                .sub_events
                .iter()
                .map(|c| c.headword.to_lowercase())
                .collect();
            let document_id = detail.doc_id.to_lowercase();
            let sentences = fold_all(&detail.sentence_ids);
            event.push(EventIndexEntry {
                event_name: event_name.clone(),
                sub_events: sub_events.clone(),
                document_id: document_id.clone(),
                persons: persons.clone(),
                places: places.clone(),
                time: detail.time,
                sentences: sentences.clone(),
            });
            for p in &persons {
                person.push(PersonIndexEntry {
                    person: p.clone(),
                    event_name: event_name.clone(),
                    sub_events: sub_events.clone(),
                    document_id: document_id.clone(),
                    places: places.clone(),
                    time: detail.time,
                    sentences: sentences.clone(),
                });
            }
            for p in &places {
                place.push(PlaceIndexEntry {
                    place: p.clone(),
                    event_name: event_name.clone(),
                    sub_events: sub_events.clone(),
                    document_id: document_id.clone(),
                    persons: persons.clone(),
                    time: detail.time,
                    sentences: sentences.clone(),
                });
            }
        }
    }

    Indices {
        person: Index::new(person),
        place: Index::new(place),
        event: Index::new(event),
    }
}
