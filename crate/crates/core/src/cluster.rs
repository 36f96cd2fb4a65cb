//! Cross-document event clustering.
//!
//! Segments whose heads are the same node and whose similarity strictly
//! exceeds the threshold form match pairs; clusters are the connected
//! components of the match graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::score::{Score, Threshold};
use crate::segment::{Segment, SegmentRef, SegmentStore};
use crate::unl::NodeKey;

const HEAD_EVENT: Score = Score::from_tenths(5);
const HEAD_ACTION: Score = Score::from_tenths(4);
const SHARED_PLACE: Score = Score::from_tenths(2);
const SHARED_PERSON: Score = Score::from_tenths(2);
const BOTH_DURATIONS: Score = Score::from_tenths(1);

/// One admitted segment pair. `a` orders before `b` by (doc_id, index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentPairMatch {
    pub head: NodeKey,
    pub a: SegmentRef,
    pub b: SegmentRef,
    pub score: Score,
}

impl SegmentPairMatch {
    pub fn doc_a(&self) -> &str {
        &self.a.doc_id
    }

    pub fn doc_b(&self) -> &str {
        &self.b.doc_id
    }
}

/// A connected component of the match graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventCluster {
    pub cluster_id: usize,
    pub head: NodeKey,
    /// Member refs, sorted by (doc_id, index); the transitive closure of the
    /// match endpoints.
    pub members: Vec<SegmentRef>,
    pub matches: Vec<SegmentPairMatch>,
    /// Mean pairwise similarity across all member pairs (1.0 for a
    /// singleton cluster).
    pub cohesion: f64,
}

/// The `S = p + p1 + p2 + p3` similarity of two segments.
///
/// `p` requires head-node equality (0.5 for event heads, 0.4 for action
/// heads); the feature terms are unconditional but can never reach the
/// clustering threshold on their own.
pub fn segment_similarity(a: &Segment, b: &Segment) -> Score {
    let mut total = Score::ZERO;
    match (a.head.as_ref(), b.head.as_ref()) {
        (Some(ha), Some(hb)) if ha.node_key() == hb.node_key() => {
            if ha.is_event() {
                total = total + HEAD_EVENT;
            } else if ha.is_action() {
                total = total + HEAD_ACTION;
            }
        }
        _ => {}
    }
    if a.place_headwords().any(|p| b.place_headwords().any(|q| p == q)) {
        total = total + SHARED_PLACE;
    }
    if a.person_headwords().any(|p| b.person_headwords().any(|q| p == q)) {
        total = total + SHARED_PERSON;
    }
    if a.has_duration && b.has_duration {
        total = total + BOTH_DURATIONS;
    }
    total
}

/// Forms event clusters from all segment pairs with equal heads and
/// similarity strictly above the threshold.
///
/// Clusters are connected components of the match graph, ordered by
/// (head, first member). Unmatched segments form singleton clusters only
/// when `keep_singletons` is set.
pub fn cluster_segments(
    store: &SegmentStore,
    threshold: Threshold,
    keep_singletons: bool,
) -> Vec<EventCluster> {
    let headed: Vec<(SegmentRef, &Segment)> = store
        .iter()
        .filter(|(_, seg)| seg.head.is_some())
        .collect();

    let mut matches: Vec<SegmentPairMatch> = Vec::new();
    for (i, (ref_a, seg_a)) in headed.iter().enumerate() {
        for (ref_b, seg_b) in headed.iter().skip(i + 1) {
            if seg_a.head_key() != seg_b.head_key() {
                continue;
            }
            let score = segment_similarity(seg_a, seg_b);
            if threshold.admits(score) {
                matches.push(SegmentPairMatch {
                    head: seg_a.head_key().expect("headed segment"),
                    a: ref_a.clone(),
                    b: ref_b.clone(),
                    score,
                });
            }
        }
    }
    matches.sort_by(|x, y| (&x.head, &x.a, &x.b).cmp(&(&y.head, &y.a, &y.b)));

    // Union-find over match endpoints.
    let mut parent: BTreeMap<SegmentRef, SegmentRef> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<SegmentRef, SegmentRef>, r: &SegmentRef) -> SegmentRef {
        let p = parent.get(r).cloned().unwrap_or_else(|| r.clone());
        if p == *r {
            return p;
        }
        let root = find(parent, &p);
        parent.insert(r.clone(), root.clone());
        root
    }
    for m in &matches {
        let ra = find(&mut parent, &m.a);
        let rb = find(&mut parent, &m.b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent.insert(hi, lo);
        }
    }

    let mut components: BTreeMap<SegmentRef, Vec<SegmentRef>> = BTreeMap::new();
    for m in &matches {
        for r in [&m.a, &m.b] {
            let root = find(&mut parent, r);
            let members = components.entry(root).or_default();
            if !members.contains(r) {
                members.push(r.clone());
            }
        }
    }

    let mut clusters: Vec<EventCluster> = Vec::new();
    for (root, mut members) in components {
        members.sort();
        let head = store
            .get(&members[0])
            .and_then(Segment::head_key)
            .expect("matched segment has a head");
        let cluster_matches: Vec<SegmentPairMatch> = matches
            .iter()
            .filter(|m| find(&mut parent, &m.a) == root)
            .cloned()
            .collect();
        let cohesion = mean_pairwise(&members, store);
        clusters.push(EventCluster {
            cluster_id: 0,
            head,
            members,
            matches: cluster_matches,
            cohesion,
        });
    }

    if keep_singletons {
        for (r, seg) in &headed {
            if !matches.iter().any(|m| m.a == *r || m.b == *r) {
                clusters.push(EventCluster {
                    cluster_id: 0,
                    head: seg.head_key().expect("headed segment"),
                    members: vec![r.clone()],
                    matches: Vec::new(),
                    cohesion: 1.0,
                });
            }
        }
    }

    clusters.sort_by(|x, y| {
        (&x.head.headword, &x.head, &x.members[0]).cmp(&(&y.head.headword, &y.head, &y.members[0]))
    });
    for (i, cluster) in clusters.iter_mut().enumerate() {
        cluster.cluster_id = i + 1;
    }
    clusters
}

fn mean_pairwise(members: &[SegmentRef], store: &SegmentStore) -> f64 {
    if members.len() < 2 {
        return 1.0;
    }
    let mut sum = 0u32;
    let mut pairs = 0u32;
    for (i, a) in members.iter().enumerate() {
        for b in members.iter().skip(i + 1) {
            let (sa, sb) = (store.get(a).unwrap(), store.get(b).unwrap());
            sum += u32::from(segment_similarity(sa, sb).tenths());
            pairs += 1;
        }
    }
    f64::from(sum) / f64::from(pairs) / 10.0
}

/// Renders the match log: one line per unordered match pair, sorted by
/// (head, doc_a, doc_b).
///
/// `verbatim` reproduces the published log's quirks ("Macths", no space
/// after `doc2`) for byte-level fixture diffing.
pub fn emit_match_log(clusters: &[EventCluster], verbatim: bool) -> String {
    let mut lines: Vec<String> = clusters
        .iter()
        .flat_map(|c| c.matches.iter())
        .map(|m| {
            if verbatim {
                format!("{} Macths doc1 {} doc2{}", m.head, m.doc_a(), m.doc_b())
            } else {
                format!("{} Matches doc1 {} doc2 {}", m.head, m.doc_a(), m.doc_b())
            }
        })
        .collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::SegmentOptions;
    use crate::unl::Concept;

    fn segment(
        doc: &str,
        head: Option<&str>,
        places: &[&str],
        persons: &[&str],
        dur: bool,
    ) -> Segment {
        let head = head.map(|t| crate::parser::parse_concept(t).unwrap());
        Segment {
            doc_id: doc.into(),
            sentence_ids: vec!["s1".into()],
            head,
            concepts: Vec::new(),
            relations: Vec::new(),
            persons: persons
                .iter()
                .map(|p| {
                    let mut c = Concept::bare(p);
                    c.constraints.push(("icl".into(), "person".into()));
                    c
                })
                .collect(),
            places: places
                .iter()
                .map(|p| {
                    let mut c = Concept::bare(p);
                    c.constraints.push(("icl".into(), "place".into()));
                    c
                })
                .collect(),
            times: Vec::new(),
            has_duration: dur,
        }
    }

    #[test]
    fn full_event_match_scores_one() {
        let a = segment("d1", Some("meet(icl>event)"), &["madurai"], &["student"], true);
        let b = segment("d2", Some("meet(icl>event)"), &["madurai"], &["student"], true);
        assert_eq!(segment_similarity(&a, &b), Score::from_tenths(10));
    }

    #[test]
    fn action_heads_alone_score_four_tenths() {
        let a = segment("d1", Some("wait(icl>action)"), &[], &[], false);
        let b = segment("d2", Some("wait(icl>action)"), &[], &[], false);
        assert_eq!(segment_similarity(&a, &b), Score::from_tenths(4));
    }

    #[test]
    fn event_place_duration_hits_threshold_but_never_clusters() {
        // 0.5 + 0.2 + 0.1 = 0.8 exactly, and the rule is strict.
        let a = segment("d1", Some("meet(icl>event)"), &["madurai"], &[], true);
        let b = segment("d2", Some("meet(icl>event)"), &["madurai"], &[], true);
        let s = segment_similarity(&a, &b);
        assert_eq!(s, Score::from_tenths(8));
        assert!(!Threshold::DEFAULT.admits(s));

        let store = SegmentStore::from_segments(vec![a, b]);
        assert!(cluster_segments(&store, Threshold::DEFAULT, false).is_empty());
    }

    #[test]
    fn zero_segments_yield_zero_clusters() {
        let store = SegmentStore::from_segments(Vec::new());
        assert!(cluster_segments(&store, Threshold::DEFAULT, false).is_empty());
    }

    #[test]
    fn transitive_closure_joins_three_segments() {
        // A-B and B-C exceed the threshold, A-C does not; the cluster still
        // holds all three. Verified against a brute-force BFS oracle below.
        let a = segment("d1", Some("wait(icl>action)"), &["delhi"], &["farmer"], true);
        let b = segment(
            "d2",
            Some("wait(icl>action)"),
            &["delhi", "paris"],
            &["farmer", "minister"],
            true,
        );
        let c = segment("d3", Some("wait(icl>action)"), &["paris"], &["minister"], true);
        assert!(Threshold::DEFAULT.admits(segment_similarity(&a, &b)));
        assert!(Threshold::DEFAULT.admits(segment_similarity(&b, &c)));
        assert!(!Threshold::DEFAULT.admits(segment_similarity(&a, &c)));

        let store = SegmentStore::from_segments(vec![a, b, c]);
        let clusters = cluster_segments(&store, Threshold::DEFAULT, false);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members.len(), 3);
        assert_eq!(clusters[0].matches.len(), 2);

        // Brute-force closure oracle: BFS over the explicit admitted-pair
        // adjacency list.
        let refs: Vec<SegmentRef> = store.iter().map(|(r, _)| r).collect();
        let mut adj = vec![vec![]; refs.len()];
        for i in 0..refs.len() {
            for j in i + 1..refs.len() {
                let (si, sj) = (store.get(&refs[i]).unwrap(), store.get(&refs[j]).unwrap());
                if si.head_key() == sj.head_key()
                    && Threshold::DEFAULT.admits(segment_similarity(si, sj))
                {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        let mut seen = vec![false; refs.len()];
        let mut queue = vec![0];
        seen[0] = true;
        while let Some(i) = queue.pop() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "oracle reaches all three members");
    }

    #[test]
    fn clusters_never_mix_heads() {
        let a = segment("d1", Some("wait(icl>action)"), &["delhi"], &["farmer"], true);
        let b = segment("d1", Some("go(icl>action)"), &["delhi"], &["farmer"], true);
        let c = segment("d2", Some("wait(icl>action)"), &["delhi"], &["farmer"], true);
        let d = segment("d2", Some("go(icl>action)"), &["delhi"], &["farmer"], true);
        let store = SegmentStore::from_segments(vec![a, b, c, d]);
        let clusters = cluster_segments(&store, Threshold::DEFAULT, false);
        assert_eq!(clusters.len(), 2);
        for cluster in &clusters {
            for m in &cluster.members {
                assert_eq!(store.get(m).unwrap().head_key().unwrap(), cluster.head);
            }
        }
        // Ascending by headword: go before wait.
        assert_eq!(clusters[0].head.headword, "go");
        assert_eq!(clusters[1].head.headword, "wait");
        assert_eq!(clusters[0].cluster_id, 1);
    }

    #[test]
    fn singletons_kept_only_on_request() {
        let a = segment("d1", Some("wait(icl>action)"), &[], &[], false);
        let store = SegmentStore::from_segments(vec![a]);
        assert!(cluster_segments(&store, Threshold::DEFAULT, false).is_empty());
        let kept = cluster_segments(&store, Threshold::DEFAULT, true);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].members.len(), 1);
        assert_eq!(kept[0].cohesion, 1.0);
    }

    #[test]
    fn match_log_dedupes_unordered_pairs() {
        let a = segment("d1", Some("wait(icl>action)"), &["delhi"], &["farmer"], true);
        let b = segment("d2", Some("wait(icl>action)"), &["delhi"], &["farmer"], true);
        let store = SegmentStore::from_segments(vec![a, b]);
        let clusters = cluster_segments(&store, Threshold::DEFAULT, false);
        let log = emit_match_log(&clusters, false);
        assert_eq!(log, "wait(icl>action) Matches doc1 d1 doc2 d2\n");
        let verbatim = emit_match_log(&clusters, true);
        assert_eq!(verbatim, "wait(icl>action) Macths doc1 d1 doc2d2\n");
    }

    #[test]
    fn empty_cluster_list_yields_empty_log() {
        assert_eq!(emit_match_log(&[], false), "");
    }
}
