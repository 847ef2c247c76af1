use std::collections::HashMap;

use super::triples::TripleSet;
use super::NodeMapping;

/// Matched triples and matched coreference items under `mapping`, counted
/// directly from the triples.
pub(crate) fn count_matches(source: &TripleSet, target: &TripleSet, mapping: &NodeMapping) -> (usize, usize) {
    let source_items = source.coref_items();
    let target_items = target.coref_items();
    let attrs: std::collections::HashSet<(usize, &str, &str)> = target
        .attributes
        .iter()
        .map(|(v, r, x)| (*v, r.as_str(), x.as_str()))
        .collect();
    let rels: HashMap<(usize, &str, usize), usize> = target
        .relations
        .iter()
        .enumerate()
        .map(|(i, (s, r, t))| ((*s, r.as_str(), *t), i))
        .collect();
    let m = |v: usize| mapping.targets.get(v).copied().flatten();

    let (mut matched, mut coref) = (0, 0);
    for (v, concept) in source.concepts.iter().enumerate() {
        if let Some(c) = m(v) {
            if target.concepts[c] == *concept {
                matched += 1;
                if source_items.instances[v] && target_items.instances[c] {
                    coref += 1;
                }
            }
        }
    }
    for (v, role, value) in &source.attributes {
        if let Some(c) = m(*v) {
            if attrs.contains(&(c, role.as_str(), value.as_str())) {
                matched += 1;
            }
        }
    }
    for (i, (s, role, t)) in source.relations.iter().enumerate() {
        if let (Some(ms), Some(mt)) = (m(*s), m(*t)) {
            if let Some(&j) = rels.get(&(ms, role.as_str(), mt)) {
                matched += 1;
                if source_items.relations[i] && target_items.relations[j] {
                    coref += 1;
                }
            }
        }
    }
    (matched, coref)
}
