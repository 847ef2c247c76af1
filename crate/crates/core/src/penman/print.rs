use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;

use super::{invert_role, AmrGraph};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) enum ChildKind {
    /// First visit: the child's subtree is written here.
    Expanded(String),
    /// Re-entrancy: the child is written as a bare variable.
    Reference(String),
    Attribute(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Child {
    pub label: String,
    pub kind: ChildKind,
}

/// Depth-first layout used for printing: children ordered by label, then by
/// their order in the graph; each variable is expanded at its first visit.
pub(crate) fn spanning_layout(graph: &AmrGraph) -> Result<IndexMap<String, Vec<Child>>> {
    // (parent, label, child var or attribute index, order)
    struct Edge {
        parent: String,
        label: String,
        child: Option<String>,
        attr: usize,
        order: usize,
    }

    let mut flipped = vec![false; graph.relations.len()];
    let oriented = |i: usize, flipped: &[bool]| {
        let rel = &graph.relations[i];
        // printed under `target` when inverted, unless flipped back
        if rel.inverted != flipped[i] {
            (&rel.target, &rel.source)
        } else {
            (&rel.source, &rel.target)
        }
    };

    // flip edges until every variable is reachable from the root
    loop {
        let mut out: HashMap<&str, Vec<&str>> = HashMap::new();
        for i in 0..graph.relations.len() {
            let (p, c) = oriented(i, &flipped);
            out.entry(p.as_str()).or_default().push(c.as_str());
        }
        let mut reach: HashSet<&str> = HashSet::new();
        let mut stack = vec![graph.root.as_str()];
        while let Some(v) = stack.pop() {
            if reach.insert(v) {
                if let Some(cs) = out.get(v) {
                    stack.extend(cs.iter().copied());
                }
            }
        }
        if graph.instances.keys().all(|v| reach.contains(v.as_str())) {
            break;
        }
        let flip = (0..graph.relations.len()).find(|&i| {
            let (p, c) = oriented(i, &flipped);
            !reach.contains(p.as_str()) && reach.contains(c.as_str())
        });
        match flip {
            Some(i) => flipped[i] = true,
            None => {
                let unreachable = graph
                    .instances
                    .keys()
                    .filter(|v| !reach.contains(v.as_str()))
                    .cloned()
                    .collect();
                return Err(Error::Disconnected {
                    graph: graph.id.clone(),
                    unreachable,
                });
            }
        }
    }

    let mut edges: HashMap<&str, Vec<Edge>> = HashMap::new();
    for (i, rel) in graph.relations.iter().enumerate() {
        let (p, c) = oriented(i, &flipped);
        let printed_inverse = p != &rel.source;
        let label = if printed_inverse {
            invert_role(&rel.role)
        } else {
            rel.role.clone()
        };
        edges.entry(p.as_str()).or_default().push(Edge {
            parent: p.clone(),
            label,
            child: Some(c.clone()),
            attr: 0,
            order: i,
        });
    }
    for (i, attr) in graph.attributes.iter().enumerate() {
        edges.entry(attr.source.as_str()).or_default().push(Edge {
            parent: attr.source.clone(),
            label: attr.role.clone(),
            child: None,
            attr: i,
            order: graph.relations.len() + i,
        });
    }
    for list in edges.values_mut() {
        list.sort_by(|a, b| a.label.cmp(&b.label).then(a.order.cmp(&b.order)));
    }

    let mut layout: IndexMap<String, Vec<Child>> = IndexMap::new();
    let mut visited: HashSet<String> = HashSet::new();
    // explicit stack of (var, next child index) to avoid deep recursion
    let mut stack: Vec<(String, usize)> = vec![(graph.root.clone(), 0)];
    visited.insert(graph.root.clone());
    layout.insert(graph.root.clone(), Vec::new());
    while let Some((var, next)) = stack.pop() {
        let list = edges.get(var.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let Some(edge) = list.get(next) else {
            continue;
        };
        stack.push((var.clone(), next + 1));
        debug_assert_eq!(edge.parent, var);
        let kind = match &edge.child {
            None => ChildKind::Attribute(edge.attr),
            Some(c) if visited.contains(c) => ChildKind::Reference(c.clone()),
            Some(c) => {
                visited.insert(c.clone());
                layout.insert(c.clone(), Vec::new());
                stack.push((c.clone(), 0));
                ChildKind::Expanded(c.clone())
            }
        };
        layout[&var].push(Child {
            label: edge.label.clone(),
            kind,
        });
    }
    Ok(layout)
}

fn alignment_suffix(tokens: &BTreeSet<usize>) -> String {
    if tokens.is_empty() {
        return String::new();
    }
    let joined: Vec<String> = tokens.iter().map(usize::to_string).collect();
    format!("~e.{}", joined.join(","))
}

fn write_node(
    out: &mut String,
    graph: &AmrGraph,
    layout: &IndexMap<String, Vec<Child>>,
    var: &str,
    depth: usize,
) {
    let concept = &graph.instances[var];
    let align = graph.alignments.get(var).map(alignment_suffix).unwrap_or_default();
    write!(out, "({var} / {concept}{align}").unwrap();
    for child in &layout[var] {
        out.push('\n');
        out.push_str(&"    ".repeat(depth + 1));
        out.push_str(&child.label);
        out.push(' ');
        match &child.kind {
            ChildKind::Expanded(c) => write_node(out, graph, layout, c, depth + 1),
            ChildKind::Reference(c) => out.push_str(c),
            ChildKind::Attribute(i) => {
                let attr = &graph.attributes[*i];
                out.push_str(&attr.value);
                out.push_str(&alignment_suffix(&attr.alignment));
            }
        }
    }
    out.push(')');
}

/// Serializes one graph, metadata first.
pub fn print_penman(graph: &AmrGraph) -> Result<String> {
    graph.validate()?;
    let layout = spanning_layout(graph)?;
    let mut out = String::new();
    writeln!(out, "# ::id {}", graph.id).unwrap();
    if let Some(tokens) = &graph.tokens {
        writeln!(out, "# ::tok {}", tokens.join(" ")).unwrap();
    }
    for line in &graph.metadata {
        writeln!(out, "{line}").unwrap();
    }
    write_node(&mut out, graph, &layout, &graph.root, 0);
    out.push('\n');
    Ok(out)
}

/// Blank-line separated blocks, in the given order.
pub fn write_penman_file<'a>(
    path: impl AsRef<Path>,
    graphs: impl IntoIterator<Item = &'a AmrGraph>,
) -> Result<()> {
    let mut text = String::new();
    for g in graphs {
        text.push_str(&print_penman(g)?);
        text.push('\n');
    }
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
