use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use super::{ChainOutcome, Mode, COREF_ENTITY, COREF_ROLE};
use crate::document::NodeRef;
use crate::penman::{print_penman, read_penman_file, write_penman_file, AmrGraph};
use crate::{Error, Result};

pub const DOCUMENT_CONCEPT: &str = "document";

const PROVENANCE_KEY: &str = "provenance";

/// A document-level graph plus the bookkeeping needed to score it.
#[derive(Debug, Clone, PartialEq)]
pub struct DocGraph {
    /// `graph.id` is the document id, `graph.root` the document node.
    pub graph: AmrGraph,
    /// Sentences (1-based, document order) each variable stands for.
    pub provenance: BTreeMap<String, BTreeSet<usize>>,
    pub sentence_count: usize,
    /// Where each original sentence node ended up. Empty for graphs read
    /// from a file.
    pub merge_map: BTreeMap<NodeRef, String>,
    /// Build mode, when this graph came from the builder.
    pub mode: Option<Mode>,
    pub outcomes: Vec<ChainOutcome>,
}

/// Sentence index encoded in a `s<i>.<var>` name.
pub(crate) fn prefix_sentence(var: &str) -> Option<usize> {
    let (prefix, rest) = var.split_once('.')?;
    let digits = prefix.strip_prefix('s')?;
    if rest.is_empty() || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i > 0)
}

pub(crate) fn sentence_edge_index(role: &str) -> Option<usize> {
    let digits = role.strip_prefix(":snt")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl DocGraph {
    pub fn doc_id(&self) -> &str {
        &self.graph.id
    }

    pub fn root(&self) -> &str {
        &self.graph.root
    }

    /// Sentence root variables, indexed by `:snt<i>` edge number minus one.
    pub fn sentence_roots(&self) -> Vec<Option<&str>> {
        let mut roots = vec![None; self.sentence_count];
        for r in &self.graph.relations {
            if r.source == self.graph.root {
                if let Some(i) = sentence_edge_index(&r.role).filter(|&i| i >= 1 && i <= self.sentence_count) {
                    roots[i - 1] = Some(r.target.as_str());
                }
            }
        }
        roots
    }

    /// Wraps a parsed graph. Provenance comes from a `::provenance` metadata
    /// line when present, else from `s<i>.` variable prefixes, else from the
    /// nearest sentence root.
    pub fn from_amr(graph: AmrGraph) -> Result<Self> {
        graph.validate()?;
        let sentence_count = graph
            .relations
            .iter()
            .filter(|r| r.source == graph.root)
            .filter_map(|r| sentence_edge_index(&r.role))
            .max()
            .unwrap_or(0);

        let mut explicit: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        if let Some(line) = graph.metadata_value(PROVENANCE_KEY) {
            for entry in line.split_whitespace() {
                let parsed = entry.split_once('=').and_then(|(var, ids)| {
                    let ids: Option<BTreeSet<usize>> = ids
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse().ok())
                        .collect();
                    Some((var.to_string(), ids?))
                });
                match parsed {
                    Some((var, ids)) => {
                        explicit.insert(var, ids);
                    }
                    None => {
                        return Err(Error::Structure {
                            graph: graph.id.clone(),
                            message: format!("malformed provenance entry {entry}"),
                        })
                    }
                }
            }
        }

        let mut dg = DocGraph {
            graph,
            provenance: BTreeMap::new(),
            sentence_count,
            merge_map: BTreeMap::new(),
            mode: None,
            outcomes: Vec::new(),
        };
        let nearest = dg.nearest_sentences();
        let all: BTreeSet<usize> = (1..=sentence_count).collect();
        for var in dg.graph.instances.keys() {
            let p = if let Some(p) = explicit.get(var) {
                p.clone()
            } else if *var == dg.graph.root {
                all.clone()
            } else if let Some(i) = prefix_sentence(var).filter(|&i| i <= sentence_count) {
                BTreeSet::from([i])
            } else {
                nearest.get(var).cloned().unwrap_or_default()
            };
            dg.provenance.insert(var.clone(), p);
        }
        Ok(dg)
    }

    /// Sentences whose roots are closest to each node, ignoring edge
    /// direction and paths through the document node.
    fn nearest_sentences(&self) -> HashMap<String, BTreeSet<usize>> {
        let mut adjacent: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.graph.relations {
            if r.source == self.graph.root || r.target == self.graph.root {
                continue;
            }
            adjacent.entry(&r.source).or_default().push(&r.target);
            adjacent.entry(&r.target).or_default().push(&r.source);
        }
        let mut best: HashMap<String, (usize, BTreeSet<usize>)> = HashMap::new();
        for (i, root) in self.sentence_roots().into_iter().enumerate() {
            let Some(root) = root else { continue };
            let mut dist: HashMap<&str, usize> = HashMap::from([(root, 0)]);
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                let d = dist[v];
                let entry = best.entry(v.to_string()).or_insert((usize::MAX, BTreeSet::new()));
                if d < entry.0 {
                    *entry = (d, BTreeSet::from([i + 1]));
                } else if d == entry.0 {
                    entry.1.insert(i + 1);
                }
                for &w in adjacent.get(v).into_iter().flatten() {
                    if !dist.contains_key(w) {
                        dist.insert(w, d + 1);
                        queue.push_back(w);
                    }
                }
            }
        }
        best.into_iter().map(|(v, (_, s))| (v, s)).collect()
    }

    /// The plain graph, carrying a provenance metadata line for every node
    /// whose sentences cannot be read off its name.
    pub fn to_amr(&self) -> AmrGraph {
        let mut g = self.graph.clone();
        g.metadata.retain(|line| !line.contains(&format!("::{PROVENANCE_KEY} ")));
        let entries: Vec<String> = g
            .instances
            .keys()
            .filter(|v| **v != g.root)
            .filter_map(|v| {
                let p = self.provenance.get(v)?;
                let derived = prefix_sentence(v).map(|i| BTreeSet::from([i]));
                if derived.as_ref() == Some(p) {
                    return None;
                }
                let ids: Vec<String> = p.iter().map(usize::to_string).collect();
                Some(format!("{v}={}", ids.join(",")))
            })
            .collect();
        if !entries.is_empty() {
            g.metadata.push(format!("# ::{PROVENANCE_KEY} {}", entries.join(" ")));
        }
        g
    }

    pub fn to_penman(&self) -> Result<String> {
        print_penman(&self.to_amr())
    }

    /// Checks the document-graph invariants.
    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        let fail = |message: String| {
            Err(Error::Structure {
                graph: self.graph.id.clone(),
                message,
            })
        };
        if self.graph.concept(&self.graph.root) != Some(DOCUMENT_CONCEPT) {
            return fail(format!("root concept is not {DOCUMENT_CONCEPT}"));
        }
        let snt: Vec<usize> = self
            .graph
            .relations
            .iter()
            .filter(|r| r.source == self.graph.root)
            .filter_map(|r| sentence_edge_index(&r.role))
            .collect();
        let expected: Vec<usize> = (1..=self.sentence_count).collect();
        let mut sorted = snt.clone();
        sorted.sort_unstable();
        if sorted != expected {
            return fail(format!("sentence edges {sorted:?} do not cover 1..={}", self.sentence_count));
        }
        for (v, c) in &self.graph.instances {
            if c == COREF_ENTITY {
                let n = self
                    .graph
                    .relations
                    .iter()
                    .filter(|r| r.role == COREF_ROLE && r.target == *v)
                    .count();
                if n < 2 {
                    return fail(format!("{v} has {n} incoming {COREF_ROLE} edges"));
                }
            }
        }
        let mut adjacent: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.graph.relations {
            adjacent.entry(&r.source).or_default().push(&r.target);
            adjacent.entry(&r.target).or_default().push(&r.source);
        }
        let mut seen = BTreeSet::from([self.graph.root.as_str()]);
        let mut stack = vec![self.graph.root.as_str()];
        while let Some(v) = stack.pop() {
            for &w in adjacent.get(v).into_iter().flatten() {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        let unreachable: Vec<String> = self
            .graph
            .instances
            .keys()
            .filter(|v| !seen.contains(v.as_str()))
            .cloned()
            .collect();
        if !unreachable.is_empty() {
            return Err(Error::Disconnected {
                graph: self.graph.id.clone(),
                unreachable,
            });
        }
        Ok(())
    }
}

pub fn read_docgraphs(path: impl AsRef<Path>) -> Result<Vec<DocGraph>> {
    read_penman_file(path)?.into_iter().map(DocGraph::from_amr).collect()
}

pub fn write_docgraphs(path: impl AsRef<Path>, graphs: &[DocGraph]) -> Result<()> {
    let amrs: Vec<AmrGraph> = graphs.iter().map(DocGraph::to_amr).collect();
    write_penman_file(path, &amrs)
}

/// Removes every coref-entity node with a single incoming `:coref` edge and
/// points its other edges at that sole member.
pub fn collapse_singletons(mut dg: DocGraph) -> DocGraph {
    let singletons: Vec<(String, String)> = dg
        .graph
        .instances
        .iter()
        .filter(|(_, c)| *c == COREF_ENTITY)
        .filter_map(|(v, _)| {
            let mut incoming = dg
                .graph
                .relations
                .iter()
                .filter(|r| r.role == COREF_ROLE && r.target == *v && r.source != *v);
            let first = incoming.next()?;
            incoming.next().is_none().then(|| (v.clone(), first.source.clone()))
        })
        .collect();
    if singletons.is_empty() {
        return dg;
    }
    let replace: HashMap<&str, &str> = singletons.iter().map(|(ce, m)| (ce.as_str(), m.as_str())).collect();
    let resolve = |v: &str| -> String {
        let mut v = v;
        while let Some(&next) = replace.get(v) {
            v = next;
        }
        v.to_string()
    };
    let g = &mut dg.graph;
    g.relations
        .retain(|r| !(r.role == COREF_ROLE && replace.get(r.target.as_str()) == Some(&r.source.as_str())));
    let mut seen = BTreeSet::new();
    let relations = std::mem::take(&mut g.relations);
    for mut r in relations {
        r.source = resolve(&r.source);
        r.target = resolve(&r.target);
        if seen.insert((r.source.clone(), r.role.clone(), r.target.clone())) {
            g.relations.push(r);
        }
    }
    let mut seen = BTreeSet::new();
    let attributes = std::mem::take(&mut g.attributes);
    for mut a in attributes {
        a.source = resolve(&a.source);
        if seen.insert((a.source.clone(), a.role.clone(), a.value.clone())) {
            g.attributes.push(a);
        }
    }
    g.root = resolve(&g.root);
    for (ce, member) in &singletons {
        let member = resolve(member);
        g.instances.shift_remove(ce);
        if let Some(p) = dg.provenance.remove(ce) {
            dg.provenance.entry(member).or_default().extend(p);
        }
    }
    for v in dg.merge_map.values_mut() {
        *v = resolve(v);
    }
    dg
}
