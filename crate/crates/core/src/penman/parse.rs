use std::collections::BTreeSet;
use std::path::Path;

use super::{looks_like_variable, normalize_role, AmrGraph, Attribute, Relation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Symbol(String),
    Quoted(String),
    Align(BTreeSet<usize>),
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn rest_of_line(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c == '\n' {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn symbol(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | '~' | '"') {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn next(&mut self) -> Result<Option<(Tok, Pos)>> {
        self.skip_ws();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => {
                self.bump();
                Tok::Open
            }
            ')' => {
                self.bump();
                Tok::Close
            }
            '/' => {
                self.bump();
                Tok::Slash
            }
            '"' => {
                let mut s = String::from('"');
                self.bump();
                loop {
                    match self.bump() {
                        Some('\\') => {
                            s.push('\\');
                            if let Some(e) = self.bump() {
                                s.push(e);
                            }
                        }
                        Some('"') => {
                            s.push('"');
                            break;
                        }
                        Some(ch) => s.push(ch),
                        None => return Err(syntax(pos, "unterminated string literal")),
                    }
                }
                Tok::Quoted(s)
            }
            '~' => {
                self.bump();
                let raw = self.symbol();
                Tok::Align(parse_alignment(&raw).ok_or_else(|| {
                    syntax(pos, &format!("malformed alignment marker ~{raw}"))
                })?)
            }
            ':' => Tok::Role(self.symbol()),
            _ => Tok::Symbol(self.symbol()),
        };
        Ok(Some((tok, pos)))
    }
}

/// `e.3,4`, `3,4` or `3` to a set of token indices.
fn parse_alignment(raw: &str) -> Option<BTreeSet<usize>> {
    let indices = match raw.split_once('.') {
        Some((prefix, rest)) if prefix.bytes().all(|b| b.is_ascii_alphabetic()) => rest,
        _ => raw,
    };
    indices
        .split(',')
        .map(|s| s.parse::<usize>().ok())
        .collect::<Option<BTreeSet<_>>>()
        .filter(|s| !s.is_empty())
}

fn syntax(pos: Pos, message: &str) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.to_string(),
    }
}

enum PendingTarget {
    Node(String),
    Symbol(String, Pos),
    Constant(String),
}

struct PendingEdge {
    source: String,
    role: String,
    target: PendingTarget,
    alignment: BTreeSet<usize>,
}

struct GraphParser<'a, 'b> {
    lexer: &'b mut Lexer<'a>,
    peeked: Option<(Tok, Pos)>,
    graph: AmrGraph,
    edges: Vec<PendingEdge>,
}

impl<'a, 'b> GraphParser<'a, 'b> {
    fn peek(&mut self) -> Result<Option<&(Tok, Pos)>> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn take(&mut self, open: Pos) -> Result<(Tok, Pos)> {
        self.peek()?;
        self.peeked
            .take()
            .ok_or_else(|| syntax(open, "unbalanced parentheses: node is never closed"))
    }

    fn optional_alignment(&mut self) -> Result<BTreeSet<usize>> {
        if let Some((Tok::Align(_), _)) = self.peek()? {
            if let Some((Tok::Align(set), _)) = self.peeked.take() {
                return Ok(set);
            }
        }
        Ok(BTreeSet::new())
    }

    /// Parses `( var / concept edges* )`, the opening paren already consumed.
    fn node(&mut self, open: Pos) -> Result<String> {
        let (tok, pos) = self.take(open)?;
        let Tok::Symbol(var) = tok else {
            return Err(syntax(pos, "expected a variable after '('"));
        };
        let (tok, pos) = self.take(open)?;
        if tok != Tok::Slash {
            return Err(syntax(pos, &format!("expected '/' after variable {var}")));
        }
        let (tok, pos) = self.take(open)?;
        let concept = match tok {
            Tok::Symbol(s) | Tok::Quoted(s) if !s.is_empty() => s,
            _ => return Err(syntax(pos, &format!("expected a concept for {var}"))),
        };
        let alignment = self.optional_alignment()?;
        match self.graph.instances.get(&var) {
            Some(existing) if *existing != concept => {
                return Err(Error::Structure {
                    graph: self.graph.id.clone(),
                    message: format!(
                        "{}:{}: variable {var} declared as both {existing} and {concept}",
                        pos.line, pos.column
                    ),
                })
            }
            _ => {
                self.graph.instances.insert(var.clone(), concept);
            }
        }
        if !alignment.is_empty() {
            self.graph.alignments.entry(var.clone()).or_default().extend(alignment);
        }

        loop {
            let (tok, pos) = self.take(open)?;
            match tok {
                Tok::Close => return Ok(var),
                Tok::Role(role) => {
                    if role.len() < 2 {
                        return Err(syntax(pos, "empty role label"));
                    }
                    // alignment on the role itself carries no node information
                    self.optional_alignment()?;
                    let (tok, tpos) = self.take(open)?;
                    let target = match tok {
                        Tok::Open => PendingTarget::Node(self.node(tpos)?),
                        Tok::Symbol(s) => PendingTarget::Symbol(s, tpos),
                        Tok::Quoted(s) => PendingTarget::Constant(s),
                        _ => return Err(syntax(tpos, &format!("expected a value for {role}"))),
                    };
                    let alignment = self.optional_alignment()?;
                    self.edges.push(PendingEdge {
                        source: var.clone(),
                        role,
                        target,
                        alignment,
                    });
                }
                _ => return Err(syntax(pos, "expected a role or ')'")),
            }
        }
    }

    fn finish(mut self) -> Result<AmrGraph> {
        for edge in std::mem::take(&mut self.edges) {
            let target = match edge.target {
                PendingTarget::Node(v) => Some(v),
                PendingTarget::Symbol(s, pos) => {
                    if self.graph.instances.contains_key(&s) {
                        if !edge.alignment.is_empty() {
                            self.graph
                                .alignments
                                .entry(s.clone())
                                .or_default()
                                .extend(edge.alignment.iter().copied());
                        }
                        Some(s)
                    } else if looks_like_variable(&s) {
                        return Err(Error::Structure {
                            graph: self.graph.id.clone(),
                            message: format!(
                                "{}:{}: reference to undeclared variable {s}",
                                pos.line, pos.column
                            ),
                        });
                    } else {
                        self.graph.attributes.push(Attribute {
                            source: edge.source.clone(),
                            role: edge.role.clone(),
                            value: s,
                            alignment: edge.alignment.clone(),
                        });
                        None
                    }
                }
                PendingTarget::Constant(c) => {
                    self.graph.attributes.push(Attribute {
                        source: edge.source.clone(),
                        role: edge.role.clone(),
                        value: c,
                        alignment: edge.alignment.clone(),
                    });
                    None
                }
            };
            if let Some(target) = target {
                let (role, inverted) = normalize_role(&edge.role);
                let rel = if inverted {
                    Relation {
                        source: target,
                        role,
                        target: edge.source,
                        inverted: true,
                    }
                } else {
                    Relation {
                        source: edge.source,
                        role,
                        target,
                        inverted: false,
                    }
                };
                self.graph.relations.push(rel);
            }
        }
        Ok(self.graph)
    }
}

fn apply_metadata(graph: &mut AmrGraph, line: &str) {
    let body = line.trim_start_matches('#').trim_start();
    if let Some(rest) = body.strip_prefix("::id ") {
        let (id, others) = match rest.find(" ::") {
            Some(i) => (&rest[..i], Some(&rest[i + 1..])),
            None => (rest, None),
        };
        graph.id = id.trim().to_string();
        if let Some(others) = others {
            graph.metadata.push(format!("# {}", others.trim()));
        }
    } else if let Some(rest) = body.strip_prefix("::tok ") {
        graph.tokens = Some(rest.split_whitespace().map(str::to_string).collect());
    } else {
        graph.metadata.push(line.trim_end().to_string());
    }
}

/// Parses every PENMAN block in `text`, in file order.
///
/// Graphs without a `::id` line are numbered from 1 in file order.
pub fn parse_penman(text: &str) -> Result<Vec<AmrGraph>> {
    let mut lexer = Lexer::new(text);
    let mut graphs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut pending = AmrGraph::default();
    loop {
        lexer.skip_ws();
        let pos = lexer.pos();
        match lexer.chars.peek() {
            None => break,
            Some('#') => {
                let line = lexer.rest_of_line();
                apply_metadata(&mut pending, &line);
            }
            Some('(') => {
                lexer.bump();
                let mut graph = std::mem::take(&mut pending);
                if graph.id.is_empty() {
                    graph.id = (graphs.len() + 1).to_string();
                }
                if !seen.insert(graph.id.clone()) {
                    return Err(Error::Structure {
                        graph: graph.id,
                        message: format!("{}:{}: duplicate graph id", pos.line, pos.column),
                    });
                }
                let mut parser = GraphParser {
                    lexer: &mut lexer,
                    peeked: None,
                    graph,
                    edges: Vec::new(),
                };
                let root = parser.node(pos)?;
                if let Some((_, extra)) = parser.peeked.take() {
                    return Err(syntax(extra, "unexpected token after graph"));
                }
                parser.graph.root = root;
                graphs.push(parser.finish()?);
            }
            Some(')') => return Err(syntax(pos, "unbalanced parentheses: unexpected ')'")),
            Some(_) => return Err(syntax(pos, "expected '(' or a metadata line")),
        }
    }
    Ok(graphs)
}

pub fn read_penman_file(path: impl AsRef<Path>) -> Result<Vec<AmrGraph>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_penman(&text)
}
