//! In-memory document: sentence graphs plus cross-sentence annotation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::penman::{read_penman_file, AmrGraph};
use crate::{Error, Result};

/// A node of one sentence graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    #[serde(rename = "sent")]
    pub sentence_id: String,
    #[serde(rename = "var")]
    pub variable: String,
}

impl NodeRef {
    pub fn new(sentence_id: impl Into<String>, variable: impl Into<String>) -> Self {
        NodeRef {
            sentence_id: sentence_id.into(),
            variable: variable.into(),
        }
    }
}

impl std::fmt::Display for NodeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.sentence_id, self.variable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityChain {
    pub id: String,
    pub members: Vec<NodeRef>,
}

/// Either a whole chain or a single node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RefTarget {
    Chain { chain: String },
    Node(NodeRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicitRole {
    #[serde(flatten)]
    pub predicate: NodeRef,
    pub role: String,
    pub target: RefTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BridgingKind {
    PartWhole,
    SetMember,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgingRelation {
    pub kind: BridgingKind,
    pub parent: RefTarget,
    pub child: RefTarget,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentAnnotation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
    #[serde(default)]
    pub chains: Vec<IdentityChain>,
    #[serde(default)]
    pub implicit_roles: Vec<ImplicitRole>,
    #[serde(default)]
    pub bridging: Vec<BridgingRelation>,
}

impl DocumentAnnotation {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("annotation serializes")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<AmrGraph>,
    pub annotation: DocumentAnnotation,
}

const NON_ARG_ROLES: &[&str] = &[
    ":accompanier", ":age", ":beneficiary", ":cause", ":compared-to", ":concession",
    ":condition", ":consist-of", ":degree", ":destination", ":direction", ":domain",
    ":duration", ":example", ":extent", ":frequency", ":instrument", ":li", ":location",
    ":manner", ":medium", ":mod", ":mode", ":name", ":ord", ":part", ":path", ":polarity",
    ":polite", ":poss", ":purpose", ":quant", ":range", ":scale", ":source", ":subevent",
    ":subset", ":time", ":topic", ":unit", ":value", ":wiki",
];

pub fn is_valid_implicit_role(role: &str) -> bool {
    let numbered = |prefix: &str| {
        role.strip_prefix(prefix)
            .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
    };
    numbered(":ARG") || numbered(":op") || NON_ARG_ROLES.contains(&role)
}

impl Document {
    /// Validates the annotation against the sentences. Chain members are put
    /// into document order (sentence order, then declaration order).
    pub fn new(
        doc_id: impl Into<String>,
        sentences: Vec<AmrGraph>,
        mut annotation: DocumentAnnotation,
    ) -> Result<Self> {
        let doc_id = doc_id.into();
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, s) in sentences.iter().enumerate() {
            if index.insert(s.id.as_str(), i).is_some() {
                return Err(Error::Ingestion(format!("duplicate sentence id {}", s.id)));
            }
        }
        let position = |r: &NodeRef| -> Option<(usize, usize)> {
            let si = *index.get(r.sentence_id.as_str())?;
            let vi = sentences[si].instances.get_index_of(&r.variable)?;
            Some((si, vi))
        };

        let mut unresolved: BTreeSet<String> = BTreeSet::new();
        let mut problems: Vec<String> = Vec::new();
        let mut owner: BTreeMap<NodeRef, String> = BTreeMap::new();
        let mut chain_ids: BTreeSet<&str> = BTreeSet::new();

        for chain in &mut annotation.chains {
            if chain.members.is_empty() {
                problems.push(format!("chain {} has no members", chain.id));
            }
            for m in &chain.members {
                if position(m).is_none() {
                    unresolved.insert(m.to_string());
                } else if let Some(prev) = owner.insert(m.clone(), chain.id.clone()) {
                    problems.push(format!("{m} is a member of both {prev} and {}", chain.id));
                }
            }
            chain.members.sort_by_key(|m| position(m).unwrap_or((usize::MAX, usize::MAX)));
        }
        for chain in &annotation.chains {
            if !chain_ids.insert(chain.id.as_str()) {
                problems.push(format!("duplicate chain id {}", chain.id));
            }
        }

        let check_target = |t: &RefTarget, unresolved: &mut BTreeSet<String>, problems: &mut Vec<String>| match t {
            RefTarget::Chain { chain } => {
                if !chain_ids.contains(chain.as_str()) {
                    problems.push(format!("unknown chain {chain}"));
                }
            }
            RefTarget::Node(n) => {
                if position(n).is_none() {
                    unresolved.insert(n.to_string());
                }
            }
        };
        for ir in &annotation.implicit_roles {
            if position(&ir.predicate).is_none() {
                unresolved.insert(ir.predicate.to_string());
            }
            if !is_valid_implicit_role(&ir.role) {
                problems.push(format!("invalid implicit role label {}", ir.role));
            }
            check_target(&ir.target, &mut unresolved, &mut problems);
        }
        for br in &annotation.bridging {
            if br.parent == br.child {
                problems.push("bridging relation with parent equal to child".to_string());
            }
            check_target(&br.parent, &mut unresolved, &mut problems);
            check_target(&br.child, &mut unresolved, &mut problems);
        }

        if !unresolved.is_empty() {
            problems.insert(
                0,
                format!(
                    "unresolved node references: {}",
                    unresolved.into_iter().collect::<Vec<_>>().join(", ")
                ),
            );
        }
        if !problems.is_empty() {
            return Err(Error::Ingestion(problems.join("; ")));
        }
        Ok(Document {
            doc_id,
            sentences,
            annotation,
        })
    }

    pub fn sentence_index(&self, sentence_id: &str) -> Option<usize> {
        self.sentences.iter().position(|s| s.id == sentence_id)
    }

    pub fn concept(&self, r: &NodeRef) -> Option<&str> {
        let i = self.sentence_index(&r.sentence_id)?;
        self.sentences[i].concept(&r.variable)
    }

    pub fn chain(&self, id: &str) -> Option<&IdentityChain> {
        self.annotation.chains.iter().find(|c| c.id == id)
    }
}

/// Reads a PENMAN file of sentence graphs and a JSON annotation file.
pub fn load_document(amr_file: impl AsRef<Path>, annotation_file: impl AsRef<Path>) -> Result<Document> {
    let amr_file = amr_file.as_ref();
    let sentences = read_penman_file(amr_file)?;
    let annotation = DocumentAnnotation::read(annotation_file)?;
    let doc_id = annotation.doc_id.clone().unwrap_or_else(|| {
        amr_file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    Document::new(doc_id, sentences, annotation)
}
