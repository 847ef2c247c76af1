use std::collections::{BTreeSet, HashMap};

use crate::builder::{DocGraph, COREF_ENTITY};
use crate::penman::AmrGraph;

/// A graph flattened into indexed triples for alignment search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSet {
    pub variables: Vec<String>,
    /// Concept of each variable, by index.
    pub concepts: Vec<String>,
    pub attributes: Vec<(usize, String, String)>,
    pub relations: Vec<(usize, String, usize)>,
    /// Sentences (1-based) each variable stands for; empty when unknown.
    pub provenance: Vec<BTreeSet<usize>>,
    pub sentence_count: usize,
    /// The document node, which never counts towards coreference.
    pub root: Option<usize>,
}

/// Drops one pair of surrounding double quotes.
pub fn normalize_value(value: &str) -> &str {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value)
}

impl TripleSet {
    pub fn from_amr(graph: &AmrGraph) -> Self {
        let variables: Vec<String> = graph.instances.keys().cloned().collect();
        let index: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut attributes = Vec::new();
        let mut seen = BTreeSet::new();
        for a in &graph.attributes {
            let t = (index[a.source.as_str()], a.role.clone(), normalize_value(&a.value).to_string());
            if seen.insert(t.clone()) {
                attributes.push(t);
            }
        }
        let mut relations = Vec::new();
        let mut seen = BTreeSet::new();
        for r in &graph.relations {
            let t = (index[r.source.as_str()], r.role.clone(), index[r.target.as_str()]);
            if seen.insert(t.clone()) {
                relations.push(t);
            }
        }
        TripleSet {
            concepts: graph.instances.values().cloned().collect(),
            provenance: vec![BTreeSet::new(); variables.len()],
            root: index.get(graph.root.as_str()).copied(),
            variables,
            attributes,
            relations,
            sentence_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.variables.len() + self.attributes.len() + self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_multi_sentence(&self, v: usize) -> bool {
        self.provenance[v].len() >= 2
    }

    /// Coreference items: coref-entity instances, incoming edges of nodes
    /// spanning several sentences, and edges between nodes from disjoint
    /// sentence sets. Edges touching the document node never count.
    pub fn coref_items(&self) -> CorefItems {
        let instances = self.concepts.iter().map(|c| c == COREF_ENTITY).collect();
        let relations = self
            .relations
            .iter()
            .map(|&(s, _, t)| {
                if Some(s) == self.root || Some(t) == self.root {
                    return false;
                }
                let (ps, pt) = (&self.provenance[s], &self.provenance[t]);
                self.is_multi_sentence(t) || (!ps.is_empty() && !pt.is_empty() && ps.is_disjoint(pt))
            })
            .collect();
        CorefItems { instances, relations }
    }
}

/// Flags over a [`TripleSet`]'s instance and relation triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorefItems {
    pub instances: Vec<bool>,
    pub relations: Vec<bool>,
}

impl CorefItems {
    pub fn count(&self) -> usize {
        self.instances.iter().chain(&self.relations).filter(|b| **b).count()
    }
}

pub fn extract_triples(graph: &DocGraph) -> TripleSet {
    let mut set = TripleSet::from_amr(&graph.graph);
    set.sentence_count = graph.sentence_count;
    for (i, v) in set.variables.iter().enumerate() {
        set.provenance[i] = graph.provenance.get(v).cloned().unwrap_or_default();
    }
    set
}
