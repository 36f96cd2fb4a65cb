//! Proptest strategies shared by the integration test targets.

use proptest::prelude::*;

use unlev_core::segment::Segment;
use unlev_core::unl::{Concept, DocDate, Relation, Sentence, UnlDocument};

pub const HEADWORDS: &[&str] = &[
    "meet", "wait", "go", "run", "walk", "festival", "storm", "election", "student", "farmer",
    "minister", "crowd", "delhi", "madurai", "hall", "river", "hour", "day", "temple", "old",
];

pub const KINDS: &[Option<&str>] = &[
    None,
    Some("event"),
    Some("action"),
    Some("person"),
    Some("place"),
    Some("time"),
    Some("thing"),
];

pub const LABELS: &[&str] = &["agt", "obj", "aoj", "plc", "tim", "dur", "and", "or", "mod", "ben"];

pub const ATTRS: &[&str] = &["past", "future", "dur", "entry"];

pub fn concept() -> impl Strategy<Value = Concept> {
    (
        prop::sample::select(HEADWORDS),
        prop::sample::select(KINDS),
        prop::collection::vec(prop::sample::select(ATTRS), 0..3),
    )
        .prop_map(|(headword, kind, mut attributes)| {
            attributes.dedup();
            Concept {
                headword: headword.to_string(),
                constraints: kind
                    .map(|k| vec![("icl".to_string(), k.to_string())])
                    .into_iter()
                    .flatten()
                    .collect(),
                attributes: attributes.into_iter().map(str::to_string).collect(),
            }
        })
}

pub fn relation() -> impl Strategy<Value = Relation> {
    (prop::sample::select(LABELS), concept(), concept()).prop_map(|(label, source, target)| {
        Relation {
            label: label.to_string(),
            source,
            target,
        }
    })
}

pub fn sentences() -> impl Strategy<Value = Vec<Sentence>> {
    prop::collection::vec(prop::collection::vec(relation(), 0..5), 1..7).prop_map(|groups| {
        groups
            .into_iter()
            .enumerate()
            .map(|(i, relations)| Sentence {
                sentence_id: format!("s{}", i + 1),
                relations,
            })
            .collect()
    })
}

pub fn doc_date() -> impl Strategy<Value = DocDate> {
    (1u32..=28, 1u32..=12, 1990i32..=2030)
        .prop_map(|(d, m, y)| DocDate::new(d, m, y).expect("day <= 28 is always valid"))
}

pub fn document() -> impl Strategy<Value = UnlDocument> {
    (
        "[a-z][a-z0-9_]{0,14}",
        prop::option::of(doc_date()),
        prop::collection::vec(concept(), 0..3),
        sentences(),
    )
        .prop_map(|(doc_id, explicit_date, title_concepts, sentences)| UnlDocument {
            doc_id,
            title_concepts,
            explicit_date,
            sentences,
        })
}

/// A corpus with unique document ids.
pub fn corpus(max_docs: usize) -> impl Strategy<Value = Vec<UnlDocument>> {
    prop::collection::vec(document(), 1..max_docs).prop_map(|mut docs| {
        for (i, doc) in docs.iter_mut().enumerate() {
            doc.doc_id = format!("doc{i}_{}", doc.doc_id);
        }
        docs
    })
}

fn kinded(headword: &str, kind: &str) -> Concept {
    Concept {
        headword: headword.to_string(),
        constraints: vec![("icl".to_string(), kind.to_string())],
        attributes: Vec::new(),
    }
}

/// A synthetic segment with the fields clustering looks at; one per doc id.
pub fn synthetic_segment(doc_hint: usize) -> impl Strategy<Value = Segment> {
    (
        prop::option::of((prop::sample::select(HEADWORDS), prop_oneof![Just("event"), Just("action")])),
        prop::collection::vec(prop::sample::select(&["delhi", "madurai", "hall"][..]), 0..3),
        prop::collection::vec(prop::sample::select(&["student", "farmer", "minister"][..]), 0..3),
        any::<bool>(),
    )
        .prop_map(move |(head, mut places, mut persons, has_duration)| {
            places.dedup();
            persons.dedup();
            Segment {
                doc_id: format!("doc{doc_hint}"),
                sentence_ids: vec!["s1".to_string()],
                head: head.map(|(h, k)| kinded(h, k)),
                concepts: Vec::new(),
                relations: Vec::new(),
                persons: persons.into_iter().map(|p| kinded(p, "person")).collect(),
                places: places.into_iter().map(|p| kinded(p, "place")).collect(),
                times: Vec::new(),
                has_duration,
            }
        })
}

pub fn segment_list(max: usize) -> impl Strategy<Value = Vec<Segment>> {
    prop::collection::vec(any::<u8>(), 2..max).prop_flat_map(|seeds| {
        seeds
            .into_iter()
            .enumerate()
            .map(|(i, _)| synthetic_segment(i))
            .collect::<Vec<_>>()
    })
}
