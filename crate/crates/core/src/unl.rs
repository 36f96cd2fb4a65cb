//! Domain types for UNL-style documents: concepts, relations, sentences,
//! documents and the `dd_mm_yyyy` dates embedded in document ids.
//!
//! All identifiers (headwords, constraint keys and values, attributes,
//! relation labels, document and sentence ids) are case-folded at parse time
//! so matching across documents is case-insensitive.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A semantic-graph node: a headword, an ordered list of `key>value`
/// constraints and an ordered list of `@` attributes.
///
/// Canonical token form: `festival(icl>event, plc>city).@entry.@past`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Concept {
    pub headword: String,
    pub constraints: Vec<(String, String)>,
    pub attributes: Vec<String>,
}

impl Concept {
    /// A bare concept with no constraints or attributes.
    pub fn bare(headword: &str) -> Concept {
        Concept {
            headword: headword.to_lowercase(),
            constraints: Vec::new(),
            attributes: Vec::new(),
        }
    }

    pub fn first_constraint(&self) -> Option<(&str, &str)> {
        self.constraints
            .first()
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Constraint matching is on the first constraint only; later
    /// constraints are carried but inert.
    pub fn has_constraint(&self, key: &str, value: &str) -> bool {
        self.first_constraint() == Some((key, value))
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.attributes.iter().any(|a| a == name)
    }

    pub fn is_event(&self) -> bool {
        self.has_constraint("icl", "event")
    }

    pub fn is_action(&self) -> bool {
        self.has_constraint("icl", "action")
    }

    pub fn is_person(&self) -> bool {
        self.has_constraint("icl", "person")
    }

    pub fn is_place(&self) -> bool {
        self.has_constraint("icl", "place")
    }

    pub fn is_time(&self) -> bool {
        self.has_constraint("icl", "time")
    }

    pub fn node_key(&self) -> NodeKey {
        NodeKey {
            headword: self.headword.clone(),
            constraint: self
                .constraints
                .first()
                .map(|(k, v)| (k.clone(), v.clone())),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.headword)?;
        if !self.constraints.is_empty() {
            write!(f, "(")?;
            for (i, (k, v)) in self.constraints.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{k}>{v}")?;
            }
            write!(f, ")")?;
        }
        for attr in &self.attributes {
            write!(f, ".@{attr}")?;
        }
        Ok(())
    }
}

impl Serialize for Concept {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Concept {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Concept, D::Error> {
        let token = String::deserialize(deserializer)?;
        crate::parser::parse_concept(&token).map_err(de::Error::custom)
    }
}

/// The identity under which concepts are matched across segments and
/// documents: headword plus first constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeKey {
    pub headword: String,
    pub constraint: Option<(String, String)>,
}

impl NodeKey {
    pub fn of(concept: &Concept) -> NodeKey {
        concept.node_key()
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.constraint {
            Some((k, v)) => write!(f, "{}({k}>{v})", self.headword),
            None => write!(f, "{}", self.headword),
        }
    }
}

impl Serialize for NodeKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<NodeKey, D::Error> {
        let token = String::deserialize(deserializer)?;
        let concept = crate::parser::parse_concept(&token).map_err(de::Error::custom)?;
        Ok(concept.node_key())
    }
}

/// A labeled edge between two concepts, written `label(source, target)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub label: String,
    pub source: Concept,
    pub target: Concept,
}

impl Relation {
    pub fn endpoints(&self) -> [&Concept; 2] {
        [&self.source, &self.target]
    }

    pub fn is_conjunction(&self) -> bool {
        self.label == "and" || self.label == "or"
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.label, self.source, self.target)
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Relation, D::Error> {
        let text = String::deserialize(deserializer)?;
        crate::parser::parse_relation(&text).map_err(de::Error::custom)
    }
}

/// One sentence block: an id and its relations in file order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub sentence_id: String,
    pub relations: Vec<Relation>,
}

impl Sentence {
    /// Distinct concepts in first-occurrence order across the relation list.
    pub fn concepts(&self) -> Vec<&Concept> {
        let mut seen = Vec::new();
        for rel in &self.relations {
            for c in rel.endpoints() {
                if !seen.contains(&c) {
                    seen.push(c);
                }
            }
        }
        seen
    }
}

/// A parsed corpus document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnlDocument {
    pub doc_id: String,
    pub title_concepts: Vec<Concept>,
    /// Date from an explicit `#DATE` directive; `date()` falls back to one
    /// embedded in the document id.
    pub explicit_date: Option<DocDate>,
    pub sentences: Vec<Sentence>,
}

impl UnlDocument {
    pub fn date(&self) -> Option<DocDate> {
        self.explicit_date
            .or_else(|| crate::parser::extract_date(&self.doc_id))
    }
}

/// A validated calendar date rendered as `dd_mm_yyyy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DocDate(NaiveDate);

impl DocDate {
    pub fn new(day: u32, month: u32, year: i32) -> Option<DocDate> {
        NaiveDate::from_ymd_opt(year, month, day).map(DocDate)
    }

    pub fn day(&self) -> u32 {
        self.0.day()
    }

    pub fn month(&self) -> u32 {
        self.0.month()
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }
}

impl fmt::Display for DocDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}_{:02}_{:04}", self.day(), self.month(), self.year())
    }
}

impl FromStr for DocDate {
    type Err = String;

    fn from_str(s: &str) -> Result<DocDate, String> {
        let mut parts = s.split('_');
        let (day, month, year) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(d), Some(m), Some(y), None) if d.len() == 2 && m.len() == 2 && y.len() == 4 => {
                let d: u32 = d.parse().map_err(|_| format!("invalid date `{s}`"))?;
                let m: u32 = m.parse().map_err(|_| format!("invalid date `{s}`"))?;
                let y: i32 = y.parse().map_err(|_| format!("invalid date `{s}`"))?;
                (d, m, y)
            }
            _ => return Err(format!("date `{s}` is not of the form dd_mm_yyyy")),
        };
        DocDate::new(day, month, year).ok_or_else(|| format!("`{s}` is not a calendar date"))
    }
}

impl Serialize for DocDate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DocDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<DocDate, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_matching_uses_first_constraint_only() {
        let c = Concept {
            headword: "festival".into(),
            constraints: vec![
                ("icl".into(), "event".into()),
                ("plc".into(), "city".into()),
            ],
            attributes: vec![],
        };
        assert!(c.has_constraint("icl", "event"));
        assert!(!c.has_constraint("plc", "city"), "later constraints are inert");
    }

    #[test]
    fn node_key_display_has_at_most_one_constraint() {
        let c = Concept {
            headword: "wait".into(),
            constraints: vec![
                ("icl".into(), "action".into()),
                ("agt".into(), "thing".into()),
            ],
            attributes: vec!["past".into()],
        };
        assert_eq!(c.node_key().to_string(), "wait(icl>action)");
        assert_eq!(Concept::bare("go").node_key().to_string(), "go");
    }

    #[test]
    fn doc_date_round_trips_and_validates() {
        let d: DocDate = "02_01_2011".parse().unwrap();
        assert_eq!(d.to_string(), "02_01_2011");
        assert!("31_02_2011".parse::<DocDate>().is_err());
        assert!("29_02_2012".parse::<DocDate>().is_ok(), "leap day");
        assert!("1_1_2011".parse::<DocDate>().is_err(), "widths are fixed");
    }
}
