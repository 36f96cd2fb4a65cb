//! Parsing for the line-oriented corpus file format.
//!
//! ```text
//! #DOC <doc_id>
//! #TITLE <concept> <concept> ...        (optional, before the first #SENT)
//! #DATE <dd>_<mm>_<yyyy>                (optional, before the first #SENT)
//! #SENT <sentence_id>
//! label(conceptToken, conceptToken)     (one relation per line)
//! ...
//! #END
//! ```
//!
//! Lines starting with `;` are comments. Concept tokens follow the grammar
//! `headword(key>value, ...) .@attr...`; see [`parse_concept`].

use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::unl::{Concept, DocDate, Relation, Sentence, UnlDocument};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed concept `{token}`: {reason}")]
    MalformedConcept { token: String, reason: String },
    #[error("malformed document {source_name} at line {line}: {reason}")]
    MalformedDocument {
        source_name: String,
        line: usize,
        reason: String,
    },
}

impl ParseError {
    fn concept(token: &str, reason: impl Into<String>) -> ParseError {
        ParseError::MalformedConcept {
            token: token.to_string(),
            reason: reason.into(),
        }
    }

    /// Line number carried by a document error, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MalformedDocument { line, .. } => Some(*line),
            ParseError::MalformedConcept { .. } => None,
        }
    }
}

fn valid_headword(word: &str) -> bool {
    !word.is_empty()
        && !word
            .chars()
            .any(|c| c == '(' || c == ')' || c == ',' || c.is_whitespace())
}

/// Parses a single concept token, e.g. `festival(icl>event).@entry.@past`.
///
/// The headword and all constraint/attribute parts are case-folded.
pub fn parse_concept(token: &str) -> Result<Concept, ParseError> {
    let token = token.trim();
    if token.is_empty() {
        return Err(ParseError::concept(token, "empty concept"));
    }

    let (head_part, rest) = match token.find('(') {
        Some(open) => {
            let close = matching_paren(token, open)
                .ok_or_else(|| ParseError::concept(token, "unbalanced parentheses"))?;
            (&token[..open], Some((&token[open + 1..close], &token[close + 1..])))
        }
        None => (token, None),
    };

    let (headword, constraints, tail) = match rest {
        Some((inner, tail)) => {
            let mut constraints = Vec::new();
            for part in split_top_level(inner) {
                let part = part.trim();
                let gt = part
                    .find('>')
                    .ok_or_else(|| ParseError::concept(token, format!("constraint `{part}` lacks '>'")))?;
                let key = part[..gt].trim();
                let value = part[gt + 1..].trim();
                if key.is_empty() || value.is_empty() {
                    return Err(ParseError::concept(token, format!("empty constraint side in `{part}`")));
                }
                constraints.push((key.to_lowercase(), value.to_lowercase()));
            }
            if constraints.is_empty() {
                return Err(ParseError::concept(token, "empty constraint list"));
            }
            (head_part, constraints, tail)
        }
        None => {
            // Bare concept: the headword runs up to the first attribute marker.
            match head_part.find(".@") {
                Some(pos) => (&head_part[..pos], Vec::new(), &head_part[pos..]),
                None => (head_part, Vec::new(), ""),
            }
        }
    };

    if !valid_headword(headword) {
        return Err(ParseError::concept(token, "invalid or empty headword"));
    }

    let mut attributes = Vec::new();
    let mut remaining = tail;
    while !remaining.is_empty() {
        let Some(stripped) = remaining.strip_prefix(".@") else {
            return Err(ParseError::concept(token, format!("unexpected trailing `{remaining}`")));
        };
        let end = stripped.find(".@").unwrap_or(stripped.len());
        let attr = &stripped[..end];
        if attr.is_empty() || attr.contains(['(', ')', ',', '@']) || attr.contains(char::is_whitespace) {
            return Err(ParseError::concept(token, format!("invalid attribute `@{attr}`")));
        }
        attributes.push(attr.to_lowercase());
        remaining = &stripped[end..];
    }

    Ok(Concept {
        headword: headword.to_lowercase(),
        constraints,
        attributes,
    })
}

/// Index of the parenthesis closing the one at `open`.
fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().skip(open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits on commas that are not nested inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses a relation expression `label(conceptToken, conceptToken)`.
pub fn parse_relation(text: &str) -> Result<Relation, ParseError> {
    let text = text.trim();
    let open = text
        .find('(')
        .ok_or_else(|| ParseError::concept(text, "relation lacks '('"))?;
    let close = matching_paren(text, open)
        .ok_or_else(|| ParseError::concept(text, "unbalanced parentheses"))?;
    if !text[close + 1..].trim().is_empty() {
        return Err(ParseError::concept(text, "trailing content after relation"));
    }
    let label = text[..open].trim().to_lowercase();
    if label.len() < 2 || label.len() > 4 || !label.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(ParseError::concept(
            text,
            format!("relation label `{label}` does not match [a-z]{{2,4}}"),
        ));
    }
    let args = split_top_level(&text[open + 1..close]);
    if args.len() != 2 {
        return Err(ParseError::concept(
            text,
            format!("relation takes 2 arguments, found {}", args.len()),
        ));
    }
    Ok(Relation {
        label,
        source: parse_concept(args[0])?,
        target: parse_concept(args[1])?,
    })
}

static DATE_GROUP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\d{2})_(\d{2})_(\d{4})").expect("static regex"));

/// Extracts the last `dd_mm_yyyy` group embedded in a document id as a
/// validated calendar date. Never fails: ids without a valid group yield
/// `None`.
pub fn extract_date(doc_id: &str) -> Option<DocDate> {
    let caps = DATE_GROUP.captures_iter(doc_id).last()?;
    let day: u32 = caps[1].parse().ok()?;
    let month: u32 = caps[2].parse().ok()?;
    let year: i32 = caps[3].parse().ok()?;
    DocDate::new(day, month, year)
}

/// Parses one corpus file. `source_name` labels errors (typically the file
/// name); the document id itself comes from the `#DOC` directive.
pub fn parse_document(text: &str, source_name: &str) -> Result<UnlDocument, ParseError> {
    let doc_err = |line: usize, reason: String| ParseError::MalformedDocument {
        source_name: source_name.to_string(),
        line,
        reason,
    };

    let mut doc: Option<UnlDocument> = None;
    let mut current: Option<Sentence> = None;
    let mut ended = false;
    let mut any_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        any_content = true;
        if ended {
            return Err(doc_err(line_no, "content after #END".into()));
        }

        if let Some(rest) = line.strip_prefix('#') {
            let (directive, arg) = match rest.split_once(char::is_whitespace) {
                Some((d, a)) => (d, a.trim()),
                None => (rest, ""),
            };
            match directive {
                "DOC" => {
                    if doc.is_some() {
                        return Err(doc_err(line_no, "duplicate #DOC directive".into()));
                    }
                    if arg.is_empty() || arg.contains(char::is_whitespace) {
                        return Err(doc_err(line_no, "invalid document id".into()));
                    }
                    doc = Some(UnlDocument {
                        doc_id: arg.to_lowercase(),
                        title_concepts: Vec::new(),
                        explicit_date: None,
                        sentences: Vec::new(),
                    });
                }
                "TITLE" => {
                    let d = doc
                        .as_mut()
                        .ok_or_else(|| doc_err(line_no, "#TITLE before #DOC".into()))?;
                    if current.is_some() || !d.sentences.is_empty() {
                        return Err(doc_err(line_no, "#TITLE after first #SENT".into()));
                    }
                    if !d.title_concepts.is_empty() {
                        return Err(doc_err(line_no, "duplicate #TITLE directive".into()));
                    }
                    for token in arg.split_whitespace() {
                        let c = parse_concept(token)
                            .map_err(|e| doc_err(line_no, e.to_string()))?;
                        d.title_concepts.push(c);
                    }
                    if d.title_concepts.is_empty() {
                        return Err(doc_err(line_no, "empty #TITLE".into()));
                    }
                }
                "DATE" => {
                    let d = doc
                        .as_mut()
                        .ok_or_else(|| doc_err(line_no, "#DATE before #DOC".into()))?;
                    if current.is_some() || !d.sentences.is_empty() {
                        return Err(doc_err(line_no, "#DATE after first #SENT".into()));
                    }
                    if d.explicit_date.is_some() {
                        return Err(doc_err(line_no, "duplicate #DATE directive".into()));
                    }
                    let date: DocDate = arg
                        .parse()
                        .map_err(|e: String| doc_err(line_no, e))?;
                    d.explicit_date = Some(date);
                }
                "SENT" => {
                    let d = doc
                        .as_mut()
                        .ok_or_else(|| doc_err(line_no, "#SENT before #DOC".into()))?;
                    if let Some(done) = current.take() {
                        d.sentences.push(done);
                    }
                    if arg.is_empty() || arg.contains(char::is_whitespace) {
                        return Err(doc_err(line_no, "invalid sentence id".into()));
                    }
                    let id = arg.to_lowercase();
                    if d.sentences.iter().any(|s| s.sentence_id == id) {
                        return Err(doc_err(line_no, format!("duplicate sentence id `{id}`")));
                    }
                    current = Some(Sentence {
                        sentence_id: id,
                        relations: Vec::new(),
                    });
                }
                "END" => {
                    let d = doc
                        .as_mut()
                        .ok_or_else(|| doc_err(line_no, "#END before #DOC".into()))?;
                    if let Some(done) = current.take() {
                        d.sentences.push(done);
                    }
                    ended = true;
                }
                other => {
                    return Err(doc_err(line_no, format!("unknown directive `#{other}`")));
                }
            }
        } else {
            let sentence = current
                .as_mut()
                .ok_or_else(|| doc_err(line_no, "relation line outside a sentence block".into()))?;
            let relation =
                parse_relation(line).map_err(|e| doc_err(line_no, e.to_string()))?;
            sentence.relations.push(relation);
        }
    }

    if !any_content {
        return Err(doc_err(0, "empty document".into()));
    }
    let doc = doc.ok_or_else(|| doc_err(1, "missing #DOC directive".into()))?;
    if !ended {
        return Err(doc_err(
            text.lines().count(),
            "missing #END terminator".into(),
        ));
    }
    Ok(doc)
}

/// Serializes a document back to its canonical file form. For input already
/// in canonical form (case-folded tokens, single spaces after commas, no
/// comments), `serialize_document(parse_document(f)) == f`.
pub fn serialize_document(doc: &UnlDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("#DOC {}\n", doc.doc_id));
    if !doc.title_concepts.is_empty() {
        let title: Vec<String> = doc.title_concepts.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("#TITLE {}\n", title.join(" ")));
    }
    if let Some(date) = doc.explicit_date {
        out.push_str(&format!("#DATE {date}\n"));
    }
    for sentence in &doc.sentences {
        out.push_str(&format!("#SENT {}\n", sentence.sentence_id));
        for relation in &sentence.relations {
            out.push_str(&format!("{relation}\n"));
        }
    }
    out.push_str("#END\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_constraint_concept() {
        let c = parse_concept("wait(icl>action)").unwrap();
        assert_eq!(c.headword, "wait");
        assert_eq!(c.constraints, vec![("icl".to_string(), "action".to_string())]);
        assert!(c.attributes.is_empty());
    }

    #[test]
    fn parses_bare_concept() {
        let c = parse_concept("go").unwrap();
        assert_eq!(c.headword, "go");
        assert!(c.constraints.is_empty());
        assert!(c.attributes.is_empty());
    }

    #[test]
    fn parses_constraints_and_attributes() {
        let c = parse_concept("festival(icl>event).@entry.@past").unwrap();
        assert_eq!(c.headword, "festival");
        assert_eq!(c.constraints, vec![("icl".to_string(), "event".to_string())]);
        assert_eq!(c.attributes, vec!["entry".to_string(), "past".to_string()]);
        // Round-trip through the serializer.
        assert_eq!(c.to_string(), "festival(icl>event).@entry.@past");
    }

    #[test]
    fn case_folds_all_parts() {
        let c = parse_concept("Festival(ICL>Event).@Past").unwrap();
        assert_eq!(c.to_string(), "festival(icl>event).@past");
    }

    #[test]
    fn rejects_malformed_concepts() {
        for bad in [
            "",
            "wait(icl>action",
            "(icl>event)",
            "wait(iclaction)",
            "wait(icl>action),",
            "wait(icl>action)x",
            "wait(icl>action).@",
            "wait()",
            "wait(icl>action,)",
        ] {
            assert!(
                matches!(parse_concept(bad), Err(ParseError::MalformedConcept { .. })),
                "`{bad}` should be rejected"
            );
        }
    }

    #[test]
    fn parses_relation_with_nested_commas() {
        let r = parse_relation("agt(go(icl>action, plt>foot), student(icl>person))").unwrap();
        assert_eq!(r.label, "agt");
        assert_eq!(r.source.headword, "go");
        assert_eq!(r.source.constraints.len(), 2);
        assert_eq!(r.target.headword, "student");
    }

    #[test]
    fn rejects_bad_relation_labels() {
        assert!(parse_relation("a(go, x)").is_err());
        assert!(parse_relation("agent(go, x)").is_err());
        assert!(parse_relation("ag1(go, x)").is_err());
        assert!(parse_relation("agt(go)").is_err());
        assert!(parse_relation("agt(go, x, y)").is_err());
    }

    #[test]
    fn extracts_dates_from_doc_ids() {
        assert_eq!(
            extract_date("ta_bbc_agricrisis_02_01_2011.utf8").unwrap().to_string(),
            "02_01_2011"
        );
        assert_eq!(
            extract_date("ta_bbc_alagiri_19_03_2011.utf8").unwrap().to_string(),
            "19_03_2011"
        );
        assert_eq!(extract_date("notes.txt"), None);
        // Last group wins.
        assert_eq!(
            extract_date("x_02_01_2011_y_14_12_2010").unwrap().to_string(),
            "14_12_2010"
        );
        // An invalid last group yields absent, not an earlier group.
        assert_eq!(extract_date("ok_02_01_2011_bad_40_13_2010"), None);
        assert_eq!(extract_date("month_13_19_2011"), None);
    }

    #[test]
    fn parses_minimal_document() {
        let text = "#DOC d1\n#SENT s1\nagt(go(icl>action), student(icl>person))\n#END\n";
        let doc = parse_document(text, "d1.utf8").unwrap();
        assert_eq!(doc.doc_id, "d1");
        assert_eq!(doc.sentences.len(), 1);
        assert_eq!(doc.sentences[0].relations.len(), 1);
    }

    #[test]
    fn empty_text_is_malformed() {
        assert!(matches!(
            parse_document("", "empty.utf8"),
            Err(ParseError::MalformedDocument { .. })
        ));
        assert!(matches!(
            parse_document("; only a comment\n", "c.utf8"),
            Err(ParseError::MalformedDocument { .. })
        ));
    }

    #[test]
    fn two_sentence_fixture_round_trips() {
        let text = concat!(
            "#DOC ta_test_05_06_2010.utf8\n",
            "#TITLE election(icl>event) go(icl>action)\n",
            "#DATE 05_06_2010\n",
            "#SENT s1\n",
            "agt(go(icl>action), student(icl>person))\n",
            "plc(go(icl>action), madurai(icl>place))\n",
            "#SENT s2\n",
            "obj(wait(icl>action), student(icl>person))\n",
            "#END\n"
        );
        let doc = parse_document(text, "fixture").unwrap();
        assert_eq!(doc.sentences.len(), 2);
        assert_eq!(doc.sentences[0].sentence_id, "s1");
        assert_eq!(doc.sentences[1].sentence_id, "s2");
        assert_eq!(serialize_document(&doc), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "#DOC d1\n#SENT s1\nnot a relation line\n#END\n";
        match parse_document(text, "d1") {
            Err(ParseError::MalformedDocument { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected document error, got {other:?}"),
        }
        let unknown = "#DOC d1\n#WHAT now\n#END\n";
        match parse_document(unknown, "d1") {
            Err(ParseError::MalformedDocument { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected document error, got {other:?}"),
        }
    }

    #[test]
    fn relation_outside_sentence_block_is_rejected() {
        let text = "#DOC d1\nagt(go(icl>action), x)\n#END\n";
        assert!(parse_document(text, "d1").is_err());
    }

    #[test]
    fn explicitly_empty_sentence_block_is_allowed() {
        let text = "#DOC d1\n#SENT s1\n#SENT s2\nagt(go(icl>action), x)\n#END\n";
        let doc = parse_document(text, "d1").unwrap();
        assert_eq!(doc.sentences.len(), 2);
        assert!(doc.sentences[0].relations.is_empty());
    }

    #[test]
    fn duplicate_sentence_ids_are_rejected() {
        let text = "#DOC d1\n#SENT s1\n#SENT s1\n#END\n";
        assert!(parse_document(text, "d1").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "; corpus header\n\n#DOC d1\n; a note\n#SENT s1\n\n#END\n";
        let doc = parse_document(text, "d1").unwrap();
        assert_eq!(doc.sentences.len(), 1);
    }

    #[test]
    fn date_falls_back_to_doc_id() {
        let text = "#DOC ta_bbc_agricrisis_02_01_2011.utf8\n#SENT s1\n#END\n";
        let doc = parse_document(text, "f").unwrap();
        assert!(doc.explicit_date.is_none());
        assert_eq!(doc.date().unwrap().to_string(), "02_01_2011");
    }
}
