use std::collections::{BTreeMap, BTreeSet};

use super::resources::{load_text, tsv_pairs};
use crate::{Error, Result};

const BUNDLED: &str = include_str!("../../data/ontology.tsv");

/// Partial order over named-entity types, stored as child -> parents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityTypeOntology {
    parents: BTreeMap<String, BTreeSet<String>>,
}

impl EntityTypeOntology {
    pub fn from_tsv(source: &str, text: &str) -> Result<Self> {
        let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for row in tsv_pairs(source, text) {
            let (_, child, parent) = row?;
            parents.entry(child.to_string()).or_default().insert(parent.to_string());
            parents.entry(parent.to_string()).or_default();
        }
        let ontology = EntityTypeOntology { parents };
        if let Some(t) = ontology.parents.keys().find(|t| ontology.is_ancestor(t, t)) {
            return Err(Error::Data {
                path: source.to_string(),
                message: format!("type hierarchy has a cycle through {t}"),
            });
        }
        Ok(ontology)
    }

    pub fn bundled() -> Self {
        Self::from_tsv("<bundled ontology.tsv>", BUNDLED).expect("bundled ontology is valid")
    }

    pub fn load() -> Result<Self> {
        let (source, text) = load_text("ontology.tsv", BUNDLED)?;
        Self::from_tsv(&source, &text)
    }

    pub fn contains(&self, t: &str) -> bool {
        self.parents.contains_key(t)
    }

    /// True when `ancestor` lies strictly above `t`.
    pub fn is_ancestor(&self, ancestor: &str, t: &str) -> bool {
        let mut stack: Vec<&str> = self.parents.get(t).into_iter().flatten().map(String::as_str).collect();
        let mut seen = BTreeSet::new();
        while let Some(p) = stack.pop() {
            if p == ancestor {
                return true;
            }
            if seen.insert(p) {
                stack.extend(self.parents.get(p).into_iter().flatten().map(String::as_str));
            }
        }
        false
    }

    /// Root type and additional types for a cluster of entity types given in
    /// mention order.
    ///
    /// Only types known to the ontology compete for the root, and among them
    /// only those with no more specific type in the cluster. Remaining ties
    /// (or a cluster with no known type at all) go to the most frequent type,
    /// then to the earliest mention.
    pub fn select_type<'a>(&self, types: &[&'a str]) -> Option<(&'a str, Vec<&'a str>)> {
        let mut distinct: Vec<&'a str> = Vec::new();
        for t in types {
            if !distinct.contains(t) {
                distinct.push(t);
            }
        }
        let known: Vec<&'a str> = distinct.iter().copied().filter(|t| self.contains(t)).collect();
        let pool: Vec<&'a str> = if known.is_empty() {
            distinct.clone()
        } else {
            known
                .iter()
                .copied()
                .filter(|t| !known.iter().any(|other| other != t && self.is_ancestor(t, other)))
                .collect()
        };
        let frequency = |t: &str| types.iter().filter(|x| **x == t).count();
        let mut root: Option<&'a str> = None;
        for t in pool {
            if root.is_none_or(|r| frequency(t) > frequency(r)) {
                root = Some(t);
            }
        }
        let root = root?;
        let extras = distinct.into_iter().filter(|t| *t != root).collect();
        Some((root, extras))
    }
}
