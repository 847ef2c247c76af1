//! Random documents and perturbed predictions for property tests and
//! benchmarks.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::document::{
    BridgingKind, BridgingRelation, Document, DocumentAnnotation, IdentityChain, ImplicitRole, NodeRef, RefTarget,
};
use crate::penman::{parse_penman, AmrGraph, Attribute, Relation};

const BUNDLED_POOL: &str = include_str!("../data/sentences.amr");

const PREDICATES: &[&str] = &[
    "go-02", "see-01", "say-01", "want-01", "give-01", "arrive-01", "leave-11", "attack-01", "help-01", "know-01",
];
const NOUNS: &[&str] = &["boy", "girl", "dog", "house", "car", "city", "book", "money", "government", "report"];
const PRONOUNS: &[&str] = &["i", "you", "he", "she", "it", "they", "someone", "this", "one", "we"];
const ENTITY_TYPES: &[&str] = &[
    "person", "person", "city", "country", "organization", "criminal-organization", "company", "gizmo",
];
const NAMES: &[&str] = &["Ann", "Bill", "Khar", "Bilal", "Paris", "Cola", "Lee"];
const ROLES: &[&str] = &[":ARG0", ":ARG1", ":ARG2", ":mod", ":location", ":time", ":poss", ":manner"];

/// Shape of randomly generated documents.
#[derive(Debug, Clone)]
pub struct DocSpec {
    pub sentences: RangeInclusive<usize>,
    /// Non-name nodes per sentence.
    pub nodes: RangeInclusive<usize>,
    pub chains: RangeInclusive<usize>,
    pub chain_size: RangeInclusive<usize>,
    pub pronoun_rate: f64,
    pub named_rate: f64,
    pub reentrancy_rate: f64,
    pub implicit_roles: RangeInclusive<usize>,
    pub bridging: RangeInclusive<usize>,
}

impl Default for DocSpec {
    fn default() -> Self {
        DocSpec {
            sentences: 2..=8,
            nodes: 1..=6,
            chains: 0..=4,
            chain_size: 1..=4,
            pronoun_rate: 0.3,
            named_rate: 0.25,
            reentrancy_rate: 0.1,
            implicit_roles: 0..=2,
            bridging: 0..=1,
        }
    }
}

impl DocSpec {
    /// Documents small enough for exhaustive alignment search.
    pub fn tiny() -> Self {
        DocSpec {
            sentences: 2..=3,
            nodes: 1..=2,
            chains: 0..=2,
            chain_size: 2..=3,
            pronoun_rate: 0.3,
            named_rate: 0.0,
            reentrancy_rate: 0.0,
            implicit_roles: 0..=1,
            bridging: 0..=0,
        }
    }
}

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items.choose(rng).unwrap()
}

pub fn random_sentence<R: Rng>(rng: &mut R, id: &str, nodes: usize, spec: &DocSpec) -> AmrGraph {
    let mut g = AmrGraph {
        id: id.to_string(),
        root: "v0".to_string(),
        ..AmrGraph::default()
    };
    g.instances.insert("v0".to_string(), pick(rng, PREDICATES).to_string());
    let mut names = 0;
    for k in 1..nodes.max(1) {
        let var = format!("v{k}");
        let parent = format!("v{}", rng.gen_range(0..k));
        let roll: f64 = rng.gen();
        let concept = if roll < spec.pronoun_rate {
            pick(rng, PRONOUNS)
        } else if roll < spec.pronoun_rate + spec.named_rate {
            let name = format!("n{names}");
            names += 1;
            g.instances.insert(name.clone(), "name".to_string());
            let first = pick(rng, NAMES);
            g.attributes.push(attribute(&name, ":op1", &format!("\"{first}\"")));
            if rng.gen_bool(0.3) {
                let second = pick(rng, NAMES);
                g.attributes.push(attribute(&name, ":op2", &format!("\"{second}\"")));
            }
            g.relations.push(Relation::new(&var, ":name", &name));
            if rng.gen_bool(0.3) {
                g.attributes.push(attribute(&var, ":wiki", &format!("\"{first}\"")));
            }
            pick(rng, ENTITY_TYPES)
        } else if rng.gen_bool(0.3) {
            pick(rng, PREDICATES)
        } else {
            pick(rng, NOUNS)
        };
        g.instances.insert(var.clone(), concept.to_string());
        let mut rel = Relation::new(&parent, pick(rng, ROLES), &var);
        rel.inverted = rng.gen_bool(0.1);
        g.relations.push(rel);
        if rng.gen_bool(0.1) {
            g.attributes.push(attribute(&var, ":polarity", "-"));
        }
        if k >= 2 && rng.gen_bool(spec.reentrancy_rate) {
            let other = format!("v{}", rng.gen_range(0..k));
            if other != var {
                g.relations.push(Relation::new(&var, pick(rng, ROLES), &other));
            }
        }
    }
    g
}

fn attribute(source: &str, role: &str, value: &str) -> Attribute {
    Attribute {
        source: source.to_string(),
        role: role.to_string(),
        value: value.to_string(),
        alignment: BTreeSet::new(),
    }
}

/// Nodes that may join a chain: everything except name nodes.
fn chain_candidates(sentences: &[AmrGraph]) -> Vec<NodeRef> {
    sentences
        .iter()
        .flat_map(|s| {
            s.instances
                .iter()
                .filter(|(_, c)| *c != "name")
                .map(|(v, _)| NodeRef::new(&s.id, v))
        })
        .collect()
}

fn random_annotation<R: Rng>(rng: &mut R, sentences: &[AmrGraph], spec: &DocSpec) -> DocumentAnnotation {
    let mut free = chain_candidates(sentences);
    free.shuffle(rng);
    let mut chains = Vec::new();
    let n_chains = rng.gen_range(spec.chains.clone());
    for k in 0..n_chains {
        let size = rng.gen_range(spec.chain_size.clone()).min(free.len());
        if size == 0 {
            break;
        }
        let members: Vec<NodeRef> = free.drain(..size).collect();
        chains.push(IdentityChain {
            id: format!("c{k}"),
            members,
        });
    }
    let all = chain_candidates(sentences);
    let target = |rng: &mut R| -> RefTarget {
        if !chains.is_empty() && rng.gen_bool(0.5) {
            RefTarget::Chain {
                chain: chains.choose(rng).unwrap().id.clone(),
            }
        } else {
            RefTarget::Node(all.choose(rng).unwrap().clone())
        }
    };
    let mut implicit_roles = Vec::new();
    for _ in 0..rng.gen_range(spec.implicit_roles.clone()) {
        let predicate = all.choose(rng).unwrap().clone();
        let role = [":ARG0", ":ARG1", ":ARG2", ":ARG4"].choose(rng).unwrap().to_string();
        let t = target(rng);
        implicit_roles.push(ImplicitRole { predicate, role, target: t });
    }
    let mut bridging = Vec::new();
    for _ in 0..rng.gen_range(spec.bridging.clone()) {
        let (parent, child) = (target(rng), target(rng));
        if parent != child {
            let kind = if rng.gen_bool(0.5) {
                BridgingKind::PartWhole
            } else {
                BridgingKind::SetMember
            };
            bridging.push(BridgingRelation { kind, parent, child });
        }
    }
    DocumentAnnotation {
        doc_id: None,
        chains,
        implicit_roles,
        bridging,
    }
}

pub fn random_document<R: Rng>(rng: &mut R, id: &str, spec: &DocSpec) -> Document {
    let n = rng.gen_range(spec.sentences.clone());
    let sentences: Vec<AmrGraph> = (0..n)
        .map(|i| {
            let nodes = rng.gen_range(spec.nodes.clone());
            random_sentence(rng, &format!("s{}", i + 1), nodes, spec)
        })
        .collect();
    let annotation = random_annotation(rng, &sentences, spec);
    Document::new(id, sentences, annotation).expect("generated annotation is valid")
}

/// Sentence graphs bundled for benchmark corpora.
pub fn sentence_pool() -> Vec<AmrGraph> {
    parse_penman(BUNDLED_POOL).expect("bundled sentence pool parses")
}

/// A document of `sentences` graphs drawn from `pool`, with chains linking
/// nodes of equal concept across sentences plus random pronoun links.
pub fn sample_document<R: Rng>(rng: &mut R, id: &str, pool: &[AmrGraph], sentences: usize) -> Document {
    let mut graphs = Vec::with_capacity(sentences);
    for i in 0..sentences {
        let mut g = pool.choose(rng).expect("non-empty pool").clone();
        g.id = format!("s{}", i + 1);
        g.tokens = None;
        g.metadata.clear();
        graphs.push(g);
    }
    let mut by_concept: BTreeMap<&str, Vec<NodeRef>> = BTreeMap::new();
    for g in &graphs {
        for (v, c) in &g.instances {
            if c != "name" {
                by_concept.entry(c).or_default().push(NodeRef::new(&g.id, v));
            }
        }
    }
    let mut chains = Vec::new();
    for members in by_concept.into_values() {
        let sentences: BTreeSet<&str> = members.iter().map(|m| m.sentence_id.as_str()).collect();
        if sentences.len() >= 2 && rng.gen_bool(0.5) {
            let mut members = members;
            members.shuffle(rng);
            members.truncate(rng.gen_range(2..=members.len().min(5)));
            chains.push(IdentityChain {
                id: format!("c{}", chains.len()),
                members,
            });
        }
    }
    let annotation = DocumentAnnotation {
        doc_id: Some(id.to_string()),
        chains,
        implicit_roles: Vec::new(),
        bridging: Vec::new(),
    };
    Document::new(id, graphs, annotation).expect("sampled annotation is valid")
}

/// Per-element probabilities used by [`perturb_document`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub relabel_edge: f64,
    pub delete_leaf: f64,
    pub replace_concept: f64,
    pub drop_chain_member: f64,
}

impl Noise {
    pub fn uniform(rate: f64) -> Self {
        Noise {
            relabel_edge: rate,
            delete_leaf: rate / 2.0,
            replace_concept: rate / 2.0,
            drop_chain_member: rate,
        }
    }

    /// Noise that leaves every surviving node's concept intact.
    pub fn structural(rate: f64) -> Self {
        Noise {
            replace_concept: 0.0,
            ..Self::uniform(rate)
        }
    }
}

/// A noisy copy of `doc`: edges relabeled, leaves deleted, concepts
/// replaced and chain members dropped.
pub fn perturb_document<R: Rng>(rng: &mut R, doc: &Document, noise: &Noise) -> Document {
    let mut removed: BTreeSet<NodeRef> = BTreeSet::new();
    let mut sentences = Vec::with_capacity(doc.sentences.len());
    for s in &doc.sentences {
        let mut g = s.clone();
        for r in &mut g.relations {
            if rng.gen_bool(noise.relabel_edge) {
                r.role = pick(rng, ROLES).to_string();
            }
        }
        let mut degree: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &s.relations {
            *degree.entry(&r.source).or_default() += 1;
            *degree.entry(&r.target).or_default() += 1;
        }
        let leaves: Vec<String> = s
            .instances
            .keys()
            .filter(|v| **v != s.root && degree.get(v.as_str()) == Some(&1))
            .filter(|v| !s.relations.iter().any(|r| r.source == **v))
            .cloned()
            .collect();
        for leaf in leaves {
            if rng.gen_bool(noise.delete_leaf) {
                g.instances.shift_remove(&leaf);
                g.relations.retain(|r| r.target != leaf);
                g.attributes.retain(|a| a.source != leaf);
                removed.insert(NodeRef::new(&s.id, &leaf));
            }
        }
        for c in g.instances.values_mut() {
            if rng.gen_bool(noise.replace_concept) {
                *c = pick(rng, NOUNS).to_string();
            }
        }
        sentences.push(g);
    }

    let keep = |r: &NodeRef| !removed.contains(r);
    let mut annotation = doc.annotation.clone();
    for chain in &mut annotation.chains {
        chain.members.retain(keep);
        if chain.members.len() > 1 && rng.gen_bool(noise.drop_chain_member) {
            let k = rng.gen_range(0..chain.members.len());
            chain.members.remove(k);
        }
    }
    let dead: BTreeSet<String> = annotation
        .chains
        .iter()
        .filter(|c| c.members.is_empty())
        .map(|c| c.id.clone())
        .collect();
    annotation.chains.retain(|c| !c.members.is_empty());
    let live = |t: &RefTarget| match t {
        RefTarget::Chain { chain } => !dead.contains(chain),
        RefTarget::Node(n) => keep(n),
    };
    annotation
        .implicit_roles
        .retain(|ir| keep(&ir.predicate) && live(&ir.target));
    annotation.bridging.retain(|b| live(&b.parent) && live(&b.child));
    Document::new(doc.doc_id.clone(), sentences, annotation).expect("perturbation keeps references valid")
}
