//! Turns text-level coreference clusters into node chains by way of
//! node-to-token alignments.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::document::{DocumentAnnotation, IdentityChain, NodeRef};
use crate::penman::AmrGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSpan<'a> {
    pub variable: &'a str,
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub height: usize,
}

/// Token span, inclusive at both ends.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub sent: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionCluster {
    pub id: String,
    pub mentions: Vec<Mention>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
    #[serde(default)]
    pub clusters: Vec<MentionCluster>,
}

impl MentionFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Tree edges after re-entrancy removal: for every node, the edge reached
/// first by a depth-first walk from the root, taking children in the order
/// they appear in the input.
fn tree_children(graph: &AmrGraph) -> (Vec<&str>, HashMap<&str, Vec<&str>>) {
    let mut out: HashMap<&str, Vec<&str>> = HashMap::new();
    for r in &graph.relations {
        let (p, c) = if r.inverted {
            (&r.target, &r.source)
        } else {
            (&r.source, &r.target)
        };
        out.entry(p.as_str()).or_default().push(c.as_str());
    }
    let mut order = Vec::new();
    let mut tree: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut seen: HashSet<&str> = HashSet::new();
    let roots = std::iter::once(graph.root.as_str()).chain(graph.instances.keys().map(String::as_str));
    for root in roots {
        if !seen.insert(root) {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        order.push(root);
        while let Some((v, next)) = stack.pop() {
            let Some(&c) = out.get(v).and_then(|cs| cs.get(next)) else {
                continue;
            };
            stack.push((v, next + 1));
            if seen.insert(c) {
                tree.entry(v).or_default().push(c);
                order.push(c);
                stack.push((c, 0));
            }
        }
    }
    (order, tree)
}

/// Spans of every aligned node, in depth-first order.
///
/// A node's span covers the tokens aligned to it, to its attributes and to
/// everything below it once re-entrant edges are removed. Height counts
/// attribute values as leaves.
pub fn node_spans(graph: &AmrGraph) -> Result<Vec<NodeSpan<'_>>> {
    if graph.tokens.is_none() {
        return Err(Error::Usage(format!("graph {} has no ::tok line", graph.id)));
    }
    let (order, tree) = tree_children(graph);
    let mut tokens: HashMap<&str, BTreeSet<usize>> = HashMap::new();
    let mut height: HashMap<&str, usize> = HashMap::new();
    for (v, t) in &graph.alignments {
        tokens.entry(v.as_str()).or_default().extend(t);
    }
    let mut has_attribute: HashSet<&str> = HashSet::new();
    for a in &graph.attributes {
        tokens.entry(a.source.as_str()).or_default().extend(&a.alignment);
        has_attribute.insert(a.source.as_str());
    }
    for &v in order.iter().rev() {
        let mut h = usize::from(has_attribute.contains(v));
        let mut below = BTreeSet::new();
        for &c in tree.get(v).into_iter().flatten() {
            h = h.max(height[c] + 1);
            below.extend(tokens.get(c).into_iter().flatten().copied());
        }
        tokens.entry(v).or_default().extend(below);
        height.insert(v, h);
    }
    Ok(order
        .iter()
        .filter_map(|&v| {
            let t = tokens.get(v)?;
            Some(NodeSpan {
                variable: v,
                start: *t.first()?,
                end: *t.last()?,
                height: height[v],
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedMention {
    pub cluster: String,
    pub mention: Mention,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct InjectionReport {
    pub mentions: usize,
    pub assigned: usize,
    pub dropped: Vec<DroppedMention>,
    /// Input clusters left with nodes from a single sentence.
    pub discarded_clusters: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub annotation: DocumentAnnotation,
    pub report: InjectionReport,
}

/// Node for a mention: the shortest containing span, then the greatest
/// height, then the earliest node in depth-first order.
pub fn best_node<'a>(spans: &[NodeSpan<'a>], start: usize, end: usize) -> Option<&'a str> {
    let mut best: Option<&NodeSpan<'a>> = None;
    for s in spans.iter().filter(|s| s.start <= start && end <= s.end) {
        let better = best.is_none_or(|b| {
            let (len, blen) = (s.end - s.start, b.end - b.start);
            len < blen || (len == blen && s.height > b.height)
        });
        if better {
            best = Some(s);
        }
    }
    best.map(|s| s.variable)
}

/// Maps mention clusters onto nodes. `spans` holds each sentence's id and
/// node spans, in document order.
pub fn assign_mentions(spans: &[(&str, Vec<NodeSpan<'_>>)], clusters: &[MentionCluster]) -> Injection {
    let position: HashMap<&str, usize> = spans.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();
    let mut report = InjectionReport::default();
    let mut claimed: BTreeMap<NodeRef, String> = BTreeMap::new();
    let mut chains: Vec<(Mention, IdentityChain)> = Vec::new();

    for cluster in clusters {
        let mut members: Vec<NodeRef> = Vec::new();
        let mut first: Option<Mention> = None;
        for m in &cluster.mentions {
            report.mentions += 1;
            let drop = |reason: String| DroppedMention {
                cluster: cluster.id.clone(),
                mention: m.clone(),
                reason,
            };
            let Some(&i) = position.get(m.sent.as_str()) else {
                report.dropped.push(drop(format!("unknown sentence {}", m.sent)));
                continue;
            };
            let Some(var) = best_node(&spans[i].1, m.start, m.end) else {
                report.dropped.push(drop("no node span contains the mention".to_string()));
                continue;
            };
            let node = NodeRef::new(&m.sent, var);
            if let Some(owner) = claimed.get(&node).filter(|o| **o != cluster.id) {
                report.dropped.push(drop(format!("node {node} already belongs to cluster {owner}")));
                continue;
            }
            report.assigned += 1;
            let key = (i, m.start, m.end);
            if first.as_ref().is_none_or(|f| key < (position[f.sent.as_str()], f.start, f.end)) {
                first = Some(m.clone());
            }
            if !members.contains(&node) {
                members.push(node);
            }
        }
        let sentences: BTreeSet<&str> = members.iter().map(|n| n.sentence_id.as_str()).collect();
        if sentences.len() < 2 {
            report.discarded_clusters.push(cluster.id.clone());
            continue;
        }
        for n in &members {
            claimed.insert(n.clone(), cluster.id.clone());
        }
        chains.push((
            first.expect("assigned cluster has a mention"),
            IdentityChain {
                id: String::new(),
                members,
            },
        ));
    }

    chains.sort_by_key(|(m, _)| (position[m.sent.as_str()], m.start, m.end));
    let chains = chains
        .into_iter()
        .enumerate()
        .map(|(k, (_, mut chain))| {
            chain.id = format!("c{k}");
            chain.members.sort_by_key(|n| position[n.sentence_id.as_str()]);
            chain
        })
        .collect();
    Injection {
        annotation: DocumentAnnotation {
            doc_id: None,
            chains,
            implicit_roles: Vec::new(),
            bridging: Vec::new(),
        },
        report,
    }
}

/// Checks every mention against its sentence's tokens, then assigns.
pub fn inject(sentences: &[AmrGraph], mentions: &MentionFile) -> Result<Injection> {
    let mut spans = Vec::with_capacity(sentences.len());
    for g in sentences {
        spans.push((g.id.as_str(), node_spans(g)?));
    }
    let lengths: HashMap<&str, usize> = sentences
        .iter()
        .map(|g| (g.id.as_str(), g.tokens.as_ref().map_or(0, Vec::len)))
        .collect();
    let mut bad = Vec::new();
    for c in &mentions.clusters {
        for m in &c.mentions {
            match lengths.get(m.sent.as_str()) {
                None => bad.push(format!("{} refers to unknown sentence {}", c.id, m.sent)),
                Some(&n) if m.start > m.end || m.end >= n => {
                    bad.push(format!("{} has span {}..{} outside {} ({n} tokens)", c.id, m.start, m.end, m.sent))
                }
                _ => {}
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::Ingestion(bad.join("; ")));
    }
    let mut injection = assign_mentions(&spans, &mentions.clusters);
    injection.annotation.doc_id = mentions.doc_id.clone();
    Ok(injection)
}
