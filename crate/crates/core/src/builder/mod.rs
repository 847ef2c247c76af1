//! Document-level graph construction.

mod docgraph;
mod lexicon;
mod ontology;
mod resources;
mod stats;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;

pub use docgraph::{collapse_singletons, read_docgraphs, write_docgraphs, DocGraph, DOCUMENT_CONCEPT};
pub use lexicon::{PronounLexicon, PronounTier};
pub use ontology::EntityTypeOntology;
pub use stats::{chain_statistics, StatsReport};

use crate::document::{BridgingKind, Document, IdentityChain, NodeRef, RefTarget};
use crate::penman::{AmrGraph, Attribute, Relation};
use crate::{Error, Result};

pub const COREF_ENTITY: &str = "coref-entity";
pub const INTERLOCUTOR_ENTITY: &str = "interlocutor-entity";
pub const COREF_ROLE: &str = ":coref";
pub const COREF_INSTANCE_ROLE: &str = ":coref-instance";
pub const ADDITIONAL_TYPE_ROLE: &str = ":additional-type";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    DocAmr,
    MergeAll,
    NoCoref,
    NoMerge,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::DocAmr, Mode::MergeAll, Mode::NoCoref, Mode::NoMerge];

    pub fn name(self) -> &'static str {
        match self {
            Mode::DocAmr => "docamr",
            Mode::MergeAll => "merge-all",
            Mode::NoCoref => "no-coref",
            Mode::NoMerge => "no-merge",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown mode {s} (expected docamr, merge-all, no-coref or no-merge)")))
    }
}

/// Data files and edge labels the builder depends on.
#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub lexicon: PronounLexicon,
    pub ontology: EntityTypeOntology,
    pub part_whole_role: String,
    pub set_member_role: String,
}

impl BuildConfig {
    /// Bundled data, overridden by files in `$DOCAMR_DATA` when present.
    pub fn load() -> Result<Self> {
        Ok(BuildConfig {
            lexicon: PronounLexicon::load()?,
            ontology: EntityTypeOntology::load()?,
            ..Self::default()
        })
    }
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            lexicon: PronounLexicon::bundled(),
            ontology: EntityTypeOntology::bundled(),
            part_whole_role: ":part".to_string(),
            set_member_role: ":subset".to_string(),
        }
    }
}

/// How the pronouns of one chain are handled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PronounPlan {
    /// The chain has content members; the pronouns at these member
    /// positions are dropped onto the chain representative.
    Drop { pronouns: Vec<usize> },
    /// Pronoun-only chain merged into the member at `keep`, whose concept is
    /// the most specific one in the chain.
    Merge { keep: usize },
    /// Pronoun-only dialogue chain mixing `i`/`you` with other pronouns.
    Interlocutor,
}

/// Where a chain's pronouns ended up, for merge statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PronounTarget {
    Pronoun,
    InterlocutorEntity,
    OtherNode,
    CorefEntity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainOutcome {
    pub chain_id: String,
    pub members: usize,
    pub pronouns: usize,
    pub pronoun_target: Option<PronounTarget>,
    pub named_entities: usize,
    pub named_entities_after: usize,
}

/// True when the member at `r` is a named entity (has an outgoing `:name`).
pub fn is_named_entity(doc: &Document, r: &NodeRef) -> bool {
    doc.sentence_index(&r.sentence_id).is_some_and(|i| {
        doc.sentences[i]
            .relations
            .iter()
            .any(|rel| rel.role == ":name" && rel.source == r.variable)
    })
}

/// A member is pronominal when its concept is in the lexicon and it is not a
/// named entity.
pub fn is_pronominal(doc: &Document, r: &NodeRef, lexicon: &PronounLexicon) -> bool {
    doc.concept(r).is_some_and(|c| lexicon.is_pronoun(c)) && !is_named_entity(doc, r)
}

pub fn resolve_pronouns(doc: &Document, chain: &IdentityChain, lexicon: &PronounLexicon) -> PronounPlan {
    let pronouns: Vec<usize> = (0..chain.members.len())
        .filter(|&i| is_pronominal(doc, &chain.members[i], lexicon))
        .collect();
    if pronouns.len() < chain.members.len() {
        return PronounPlan::Drop { pronouns };
    }
    let concepts: Vec<&str> = chain.members.iter().map(|m| doc.concept(m).unwrap_or_default()).collect();
    let heterogeneous = concepts.iter().any(|c| *c != concepts[0]);
    if heterogeneous && concepts.iter().any(|c| lexicon.is_interlocutor(c)) {
        return PronounPlan::Interlocutor;
    }
    let best = lexicon.most_specific(concepts.iter().copied()).unwrap_or(concepts[0]);
    PronounPlan::Merge {
        keep: concepts.iter().position(|c| *c == best).unwrap_or(0),
    }
}

/// Mutable graph with union-find style aliasing used while building.
struct Work {
    concepts: IndexMap<String, String>,
    attributes: Vec<Attribute>,
    relations: Vec<Relation>,
    provenance: BTreeMap<String, BTreeSet<usize>>,
    alias: HashMap<String, String>,
    counters: HashMap<&'static str, usize>,
}

impl Work {
    fn resolve(&self, var: &str) -> String {
        let mut v = var;
        while let Some(next) = self.alias.get(v) {
            v = next;
        }
        v.to_string()
    }

    fn concept(&self, var: &str) -> &str {
        self.concepts.get(&self.resolve(var)).map(String::as_str).unwrap_or_default()
    }

    fn new_node(&mut self, prefix: &'static str, concept: &str, provenance: BTreeSet<usize>) -> String {
        let k = self.counters.entry(prefix).or_default();
        let var = format!("{prefix}{k}");
        *k += 1;
        self.concepts.insert(var.clone(), concept.to_string());
        self.provenance.insert(var.clone(), provenance);
        var
    }

    fn provenance_of<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> BTreeSet<usize> {
        vars.into_iter()
            .flat_map(|v| self.provenance.get(&self.resolve(v)).cloned().unwrap_or_default())
            .collect()
    }

    /// Folds `from` into `into`; `from` loses its concept, every edge moves.
    fn merge_into(&mut self, from: &str, into: &str) {
        let (from, into) = (self.resolve(from), self.resolve(into));
        if from == into {
            return;
        }
        self.concepts.shift_remove(&from);
        if let Some(p) = self.provenance.remove(&from) {
            self.provenance.entry(into.clone()).or_default().extend(p);
        }
        self.alias.insert(from, into);
    }

    fn add_relation(&mut self, source: &str, role: &str, target: &str) {
        let (s, t) = (self.resolve(source), self.resolve(target));
        self.relations.push(Relation::new(s, role, t));
    }

    fn outgoing(&self, var: &str, role: &str) -> Vec<String> {
        let var = self.resolve(var);
        let mut out: Vec<String> = Vec::new();
        for r in &self.relations {
            if r.role == role && self.resolve(&r.source) == var {
                let t = self.resolve(&r.target);
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    fn attributes_of(&self, var: &str) -> Vec<(String, String)> {
        let var = self.resolve(var);
        let mut a: Vec<(String, String)> = self
            .attributes
            .iter()
            .filter(|a| self.resolve(&a.source) == var)
            .map(|a| (a.role.clone(), a.value.clone()))
            .collect();
        a.sort();
        a.dedup();
        a
    }

    fn merge_named_entities(&mut self, members: &[String], ontology: &EntityTypeOntology) -> String {
        let survivor = self.resolve(&members[0]);
        let types: Vec<String> = members.iter().map(|m| self.concept(m).to_string()).collect();
        let type_refs: Vec<&str> = types.iter().map(String::as_str).collect();
        let (root, extras) = ontology.select_type(&type_refs).expect("non-empty cluster");
        let (root, extras): (String, Vec<String>) = (root.to_string(), extras.into_iter().map(str::to_string).collect());

        let mut forms: Vec<(Vec<(String, String)>, String)> = Vec::new();
        for m in members {
            for name in self.outgoing(m, ":name") {
                let form = self.attributes_of(&name);
                match forms.iter().find(|(f, _)| *f == form) {
                    Some((_, kept)) => {
                        let kept = kept.clone();
                        self.merge_into(&name, &kept);
                    }
                    None => forms.push((form, name)),
                }
            }
        }
        for m in &members[1..] {
            self.merge_into(m, &survivor);
        }
        self.concepts.insert(survivor.clone(), root);
        for t in extras {
            let prov = self.provenance.get(&survivor).cloned().unwrap_or_default();
            let node = self.new_node("at", &t, prov);
            self.add_relation(&survivor, ADDITIONAL_TYPE_ROLE, &node);
        }
        survivor
    }
}

fn sentence_var(index: usize, var: &str) -> String {
    format!("s{}.{var}", index + 1)
}

/// Builds the document graph for `doc` in the given mode.
pub fn build(doc: &Document, mode: Mode, config: &BuildConfig) -> DocGraph {
    let n = doc.sentences.len();
    let mut work = Work {
        concepts: IndexMap::new(),
        attributes: Vec::new(),
        relations: Vec::new(),
        provenance: BTreeMap::new(),
        alias: HashMap::new(),
        counters: HashMap::new(),
    };
    let root = "d".to_string();
    work.concepts.insert(root.clone(), DOCUMENT_CONCEPT.to_string());
    work.provenance.insert(root.clone(), (1..=n).collect());
    for (i, s) in doc.sentences.iter().enumerate() {
        work.relations.push(Relation::new(&root, format!(":snt{}", i + 1), sentence_var(i, &s.root)));
    }
    for (i, s) in doc.sentences.iter().enumerate() {
        for (v, c) in &s.instances {
            let var = sentence_var(i, v);
            work.concepts.insert(var.clone(), c.clone());
            work.provenance.insert(var, BTreeSet::from([i + 1]));
        }
        for a in &s.attributes {
            work.attributes.push(Attribute {
                source: sentence_var(i, &a.source),
                role: a.role.clone(),
                value: a.value.clone(),
                alignment: BTreeSet::new(),
            });
        }
        for r in &s.relations {
            work.relations.push(Relation {
                source: sentence_var(i, &r.source),
                role: r.role.clone(),
                target: sentence_var(i, &r.target),
                inverted: r.inverted,
            });
        }
    }

    let node_var = |r: &NodeRef| -> String {
        let i = doc.sentence_index(&r.sentence_id).expect("validated reference");
        sentence_var(i, &r.variable)
    };

    let mut representative: HashMap<&str, String> = HashMap::new();
    let mut outcomes = Vec::new();
    if mode != Mode::NoCoref {
        for chain in &doc.annotation.chains {
            let vars: Vec<String> = chain.members.iter().map(node_var).collect();
            let (rep, outcome) = match mode {
                Mode::DocAmr => build_chain(&mut work, doc, chain, &vars, config),
                Mode::MergeAll => {
                    let survivor = work.resolve(&vars[0]);
                    let own = work.concept(&survivor).to_string();
                    let mut extra: Vec<(String, BTreeSet<usize>)> = Vec::new();
                    for v in &vars[1..] {
                        let c = work.concept(v).to_string();
                        let p = work.provenance_of([v]);
                        if c == own {
                            continue;
                        }
                        match extra.iter_mut().find(|(e, _)| *e == c) {
                            Some((_, prov)) => prov.extend(p),
                            None => extra.push((c, p)),
                        }
                    }
                    for v in &vars[1..] {
                        work.merge_into(v, &survivor);
                    }
                    for (c, p) in extra {
                        let node = work.new_node("ci", &c, p);
                        work.add_relation(&survivor, COREF_INSTANCE_ROLE, &node);
                    }
                    (survivor, None)
                }
                Mode::NoMerge => {
                    let prov = work.provenance_of(&vars);
                    let ce = work.new_node("ce", COREF_ENTITY, prov);
                    for v in &vars {
                        work.add_relation(v, COREF_ROLE, &ce);
                    }
                    (ce, None)
                }
                Mode::NoCoref => unreachable!(),
            };
            representative.insert(chain.id.as_str(), rep);
            outcomes.extend(outcome);
        }

        let target_var = |work: &Work, t: &RefTarget| -> String {
            match t {
                RefTarget::Chain { chain } => work.resolve(&representative[chain.as_str()]),
                RefTarget::Node(r) => work.resolve(&node_var(r)),
            }
        };
        for ir in &doc.annotation.implicit_roles {
            let target = target_var(&work, &ir.target);
            work.add_relation(&node_var(&ir.predicate), &ir.role, &target);
        }
        for br in &doc.annotation.bridging {
            let parent = target_var(&work, &br.parent);
            let child = target_var(&work, &br.child);
            let role = match br.kind {
                BridgingKind::PartWhole => &config.part_whole_role,
                BridgingKind::SetMember => &config.set_member_role,
            };
            work.add_relation(&parent, role, &child);
        }
    }

    let mut merge_map = BTreeMap::new();
    for (i, s) in doc.sentences.iter().enumerate() {
        for v in s.instances.keys() {
            merge_map.insert(NodeRef::new(&s.id, v), work.resolve(&sentence_var(i, v)));
        }
    }
    let (graph, provenance) = finish(work, &doc.doc_id, root);
    let built = DocGraph {
        graph,
        provenance,
        sentence_count: n,
        merge_map,
        mode: Some(mode),
        outcomes,
    };
    if mode == Mode::NoCoref {
        built
    } else {
        collapse_singletons(built)
    }
}

fn build_chain(
    work: &mut Work,
    doc: &Document,
    chain: &IdentityChain,
    vars: &[String],
    config: &BuildConfig,
) -> (String, Option<ChainOutcome>) {
    let named: Vec<usize> = (0..vars.len()).filter(|&i| is_named_entity(doc, &chain.members[i])).collect();
    let mut outcome = ChainOutcome {
        chain_id: chain.id.clone(),
        members: vars.len(),
        pronouns: 0,
        pronoun_target: None,
        named_entities: named.len(),
        named_entities_after: usize::from(!named.is_empty()),
    };
    let rep = match resolve_pronouns(doc, chain, &config.lexicon) {
        PronounPlan::Drop { pronouns } => {
            let mut content: Vec<String> = Vec::new();
            if !named.is_empty() {
                let members: Vec<String> = named.iter().map(|&i| vars[i].clone()).collect();
                work.merge_named_entities(&members, &config.ontology);
            }
            for (i, v) in vars.iter().enumerate() {
                if pronouns.contains(&i) {
                    continue;
                }
                let v = work.resolve(v);
                if !content.contains(&v) {
                    content.push(v);
                }
            }
            let prov = work.provenance_of(&content);
            let ce = work.new_node("ce", COREF_ENTITY, prov);
            for c in &content {
                work.add_relation(c, COREF_ROLE, &ce);
            }
            for &p in &pronouns {
                work.merge_into(&vars[p], &ce);
            }
            outcome.pronouns = pronouns.len();
            if !pronouns.is_empty() {
                outcome.pronoun_target = Some(if content.len() >= 2 {
                    PronounTarget::CorefEntity
                } else {
                    PronounTarget::OtherNode
                });
            }
            ce
        }
        PronounPlan::Merge { keep } => {
            let survivor = work.resolve(&vars[keep]);
            for v in vars {
                work.merge_into(v, &survivor);
            }
            outcome.pronouns = vars.len();
            outcome.pronoun_target = Some(PronounTarget::Pronoun);
            survivor
        }
        PronounPlan::Interlocutor => {
            let prov = work.provenance_of(vars);
            let ie = work.new_node("ie", INTERLOCUTOR_ENTITY, prov);
            for v in vars {
                work.merge_into(v, &ie);
            }
            outcome.pronouns = vars.len();
            outcome.pronoun_target = Some(PronounTarget::InterlocutorEntity);
            ie
        }
    };
    (rep, Some(outcome))
}

/// Rewrites edges through the alias map and drops duplicates.
fn finish(work: Work, doc_id: &str, root: String) -> (AmrGraph, BTreeMap<String, BTreeSet<usize>>) {
    let mut seen_rel = BTreeSet::new();
    let mut relations = Vec::new();
    for r in &work.relations {
        let (s, t) = (work.resolve(&r.source), work.resolve(&r.target));
        if seen_rel.insert((s.clone(), r.role.clone(), t.clone())) {
            relations.push(Relation {
                source: s,
                role: r.role.clone(),
                target: t,
                inverted: r.inverted,
            });
        }
    }
    let mut seen_attr = BTreeSet::new();
    let mut attributes = Vec::new();
    for a in &work.attributes {
        let s = work.resolve(&a.source);
        if seen_attr.insert((s.clone(), a.role.clone(), a.value.clone())) {
            attributes.push(Attribute {
                source: s,
                role: a.role.clone(),
                value: a.value.clone(),
                alignment: BTreeSet::new(),
            });
        }
    }
    let provenance = work
        .concepts
        .keys()
        .map(|v| (v.clone(), work.provenance.get(v).cloned().unwrap_or_default()))
        .collect();
    let graph = AmrGraph {
        id: doc_id.to_string(),
        root,
        instances: work.concepts,
        attributes,
        relations,
        ..AmrGraph::default()
    };
    (graph, provenance)
}
