//! PENMAN reading and writing.
//!
//! Graphs are held in a flat form: one concept per variable, plus attribute
//! and relation lists. Inverse roles (`:ARG0-of`) are normalized on read and
//! restored on write through [`Relation::inverted`].

mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

pub use parse::{parse_penman, read_penman_file};
pub use print::{print_penman, write_penman_file};

/// A constant-valued edge, e.g. `:op1 "Bill"` or `:polarity -`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub source: String,
    pub role: String,
    /// Raw constant text; quoted literals keep their quotes.
    pub value: String,
    pub alignment: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub source: String,
    pub role: String,
    pub target: String,
    /// Written as `target :role-of source` in the original text.
    pub inverted: bool,
}

impl Relation {
    pub fn new(source: impl Into<String>, role: impl Into<String>, target: impl Into<String>) -> Self {
        Relation {
            source: source.into(),
            role: role.into(),
            target: target.into(),
            inverted: false,
        }
    }
}

/// One sentence-level (or document-level) AMR graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AmrGraph {
    pub id: String,
    pub root: String,
    /// Variable to concept, in order of declaration.
    pub instances: IndexMap<String, String>,
    pub attributes: Vec<Attribute>,
    pub relations: Vec<Relation>,
    /// Token indices aligned to each variable's concept.
    pub alignments: BTreeMap<String, BTreeSet<usize>>,
    pub tokens: Option<Vec<String>>,
    /// Metadata lines other than `::id` and `::tok`, kept verbatim.
    pub metadata: Vec<String>,
}

/// Order-free view of a graph used for equality checks and scoring.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Triple {
    Instance(String, String),
    Attribute(String, String, String),
    Relation(String, String, String),
}

impl AmrGraph {
    pub fn triple_set(&self) -> BTreeSet<Triple> {
        let mut set = BTreeSet::new();
        for (var, concept) in &self.instances {
            set.insert(Triple::Instance(var.clone(), concept.clone()));
        }
        for attr in &self.attributes {
            set.insert(Triple::Attribute(
                attr.source.clone(),
                attr.role.clone(),
                attr.value.clone(),
            ));
        }
        for rel in &self.relations {
            set.insert(Triple::Relation(
                rel.source.clone(),
                rel.role.clone(),
                rel.target.clone(),
            ));
        }
        set
    }

    pub fn concept(&self, var: &str) -> Option<&str> {
        self.instances.get(var).map(String::as_str)
    }

    /// Metadata value for `::key`, searching the preserved lines.
    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        let marker = format!("::{key} ");
        self.metadata.iter().find_map(|line| {
            let start = line.find(&marker)? + marker.len();
            let rest = &line[start..];
            let end = rest.find(" ::").unwrap_or(rest.len());
            Some(rest[..end].trim())
        })
    }

    /// Checks the structural invariants that the parser guarantees.
    pub fn validate(&self) -> crate::Result<()> {
        let fail = |message: String| {
            Err(crate::Error::Structure {
                graph: self.id.clone(),
                message,
            })
        };
        if !self.instances.contains_key(&self.root) {
            return fail(format!("root {} has no concept", self.root));
        }
        for rel in &self.relations {
            for var in [&rel.source, &rel.target] {
                if !self.instances.contains_key(var) {
                    return fail(format!("relation {} refers to undeclared {var}", rel.role));
                }
            }
        }
        for attr in &self.attributes {
            if !self.instances.contains_key(&attr.source) {
                return fail(format!("attribute {} on undeclared {}", attr.role, attr.source));
            }
        }
        Ok(())
    }
}

const FORWARD_OF_ROLES: [&str; 3] = [":consist-of", ":prep-out-of", ":prep-on-behalf-of"];

/// Splits `:ARG0-of` into (`:ARG0`, true). Roles that merely end in `-of`
/// (`:consist-of`) are forward roles.
pub fn normalize_role(role: &str) -> (String, bool) {
    if FORWARD_OF_ROLES.contains(&role) {
        return (role.to_string(), false);
    }
    match role.strip_suffix("-of") {
        Some(base) if base.len() > 1 => (base.to_string(), true),
        _ => (role.to_string(), false),
    }
}

pub fn invert_role(role: &str) -> String {
    let (base, inverted) = normalize_role(role);
    if inverted {
        base
    } else {
        format!("{role}-of")
    }
}

/// Heuristic used to tell a dangling re-entrancy from a bare constant:
/// AMR variables are a letter or two plus digits, optionally prefixed by a
/// document sentence marker (`s3.p2`).
pub fn looks_like_variable(symbol: &str) -> bool {
    let local = match symbol.split_once('.') {
        Some((prefix, rest)) => {
            let digits = prefix.strip_prefix('s').unwrap_or("");
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return false;
            }
            rest
        }
        None => symbol,
    };
    let letters = local.bytes().take_while(u8::is_ascii_lowercase).count();
    let digits = &local[letters..];
    (1..=2).contains(&letters)
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (letters == 1 || !digits.is_empty() || symbol.contains('.'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_normalization() {
        assert_eq!(normalize_role(":ARG0-of"), (":ARG0".into(), true));
        assert_eq!(normalize_role(":consist-of"), (":consist-of".into(), false));
        assert_eq!(normalize_role(":consist-of-of"), (":consist-of".into(), true));
        assert_eq!(invert_role(":ARG1"), ":ARG1-of");
        assert_eq!(invert_role(":ARG1-of"), ":ARG1");
    }

    #[test]
    fn variable_shapes() {
        for v in ["p", "p2", "ce0", "s1.p", "s12.ab3", "x"] {
            assert!(looks_like_variable(v), "{v}");
        }
        for c in ["-", "+", "imperative", "expressive", "he", "1.5", "Bill", "abc"] {
            assert!(!looks_like_variable(c), "{c}");
        }
    }
}
