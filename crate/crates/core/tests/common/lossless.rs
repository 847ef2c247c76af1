//! Independent check that a built graph keeps every sentence triple.

use std::collections::BTreeSet;

use docamr::builder::{DocGraph, PronounLexicon};
use docamr::document::{Document, NodeRef};

/// Problems found in `built`; empty when the graph is lossless.
pub fn violations(doc: &Document, built: &DocGraph, lexicon: &PronounLexicon) -> Vec<String> {
    let mut problems = Vec::new();
    let relations: BTreeSet<(&str, &str, &str)> = built
        .graph
        .relations
        .iter()
        .map(|r| (r.source.as_str(), r.role.as_str(), r.target.as_str()))
        .collect();
    let attributes: BTreeSet<(&str, &str, &str)> = built
        .graph
        .attributes
        .iter()
        .map(|a| (a.source.as_str(), a.role.as_str(), a.value.as_str()))
        .collect();
    let mut expected: BTreeSet<(String, String, String)> = BTreeSet::new();

    for s in &doc.sentences {
        let to = |v: &str| -> Option<&str> { built.merge_map.get(&NodeRef::new(&s.id, v)).map(String::as_str) };
        for r in &s.relations {
            let (Some(a), Some(b)) = (to(&r.source), to(&r.target)) else {
                problems.push(format!("{}: no merge_map entry for {} or {}", s.id, r.source, r.target));
                continue;
            };
            if !relations.contains(&(a, r.role.as_str(), b)) {
                problems.push(format!("{}: lost ({} {} {})", s.id, r.source, r.role, r.target));
            }
            expected.insert((a.to_string(), r.role.clone(), b.to_string()));
        }
        for at in &s.attributes {
            match to(&at.source) {
                Some(a) if attributes.contains(&(a, at.role.as_str(), at.value.as_str())) => {}
                _ => problems.push(format!("{}: lost ({} {} {})", s.id, at.source, at.role, at.value)),
            }
        }
        for (v, concept) in &s.instances {
            let Some(target) = to(v) else {
                problems.push(format!("{}: {v} missing from merge_map", s.id));
                continue;
            };
            let named = s.relations.iter().any(|r| r.source == *v && r.role == ":name");
            let pronoun = lexicon.is_pronoun(concept) && !named;
            if !named && !pronoun && built.graph.concept(target) != Some(concept.as_str()) {
                problems.push(format!("{}: {v} / {concept} became {target} / {:?}", s.id, built.graph.concept(target)));
            }
        }
    }

    let implicit: BTreeSet<(String, String)> = doc
        .annotation
        .implicit_roles
        .iter()
        .filter_map(|ir| Some((built.merge_map.get(&ir.predicate)?.clone(), ir.role.clone())))
        .collect();
    for r in &built.graph.relations {
        let key = (r.source.clone(), r.role.clone(), r.target.clone());
        if expected.contains(&key) {
            continue;
        }
        let document_level = r.source == built.graph.root && r.role.starts_with(":snt")
            || matches!(r.role.as_str(), ":coref" | ":additional-type" | ":part" | ":subset")
            || implicit.contains(&(r.source.clone(), r.role.clone()));
        if !document_level {
            problems.push(format!("unexpected relation ({} {} {})", r.source, r.role, r.target));
        }
    }
    problems
}
