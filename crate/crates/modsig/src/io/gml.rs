//! Minimal GML reader: one `graph [ ... ]` block containing `node [ id,
//! label, scalar attributes ]` and `edge [ source, target, value ]` entries.
//! Node scalar attributes become covariate columns; unknown keys and nested
//! blocks are skipped with a warning; a `directed 1` flag is ignored with a
//! warning (edges are always treated as undirected).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, SelfLoopPolicy};
use crate::io::covariates::CovariateTable;

/// A parsed GML file: the graph, node attributes as covariates, and any
/// warnings about skipped content.
#[derive(Debug, Clone)]
pub struct GmlData {
    pub graph: Graph,
    pub covariates: CovariateTable,
    pub warnings: Vec<String>,
}

/// Reads a GML file.
pub fn read_gml(path: impl AsRef<Path>, policy: SelfLoopPolicy) -> Result<GmlData> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gml(&text, &path.display().to_string(), policy)
}

/// Parses GML text. `source` names the input in error messages.
pub fn parse_gml(text: &str, source: &str, policy: SelfLoopPolicy) -> Result<GmlData> {
    let tokens = tokenize(text, source)?;
    Parser {
        tokens,
        pos: 0,
        source,
        warnings: Vec::new(),
    }
    .parse(policy)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Str(String),
    Atom(String),
}

fn tokenize(text: &str, source: &str) -> Result<Vec<(u64, Tok)>> {
    let mut tokens = Vec::new();
    let mut line: u64 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '[' => {
                tokens.push((line, Tok::Open));
                chars.next();
            }
            ']' => {
                tokens.push((line, Tok::Close));
                chars.next();
            }
            '"' => {
                chars.next();
                let start = line;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => {
                            return Err(Error::Parse {
                                path: source.into(),
                                line: start,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\n') => {
                            line += 1;
                            s.push('\n');
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                tokens.push((start, Tok::Str(s)));
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                tokens.push((line, Tok::Atom(s)));
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(u64, Tok)>,
    pos: usize,
    source: &'a str,
    warnings: Vec<String>,
}

#[derive(Debug)]
enum Value {
    Scalar(String),
    Block,
}

struct NodeDef {
    id: i64,
    label: Option<String>,
    attrs: Vec<(String, String)>,
}

struct EdgeDef {
    source: i64,
    target: i64,
    weight: f64,
    line: u64,
}

impl Parser<'_> {
    fn parse(mut self, policy: SelfLoopPolicy) -> Result<GmlData> {
        let mut graph_body: Option<(Vec<NodeDef>, Vec<EdgeDef>)> = None;
        while let Some((line, tok)) = self.next() {
            match tok {
                Tok::Atom(key) if key == "graph" => {
                    self.expect_open(line)?;
                    let body = self.parse_graph_body(policy)?;
                    if graph_body.is_some() {
                        self.warnings
                            .push(format!("line {line}: extra graph block skipped"));
                    } else {
                        graph_body = Some(body);
                    }
                }
                Tok::Atom(key) => {
                    // Top-level metadata such as Creator or Version.
                    match self.parse_value(line)? {
                        Value::Scalar(_) => {}
                        Value::Block => self
                            .warnings
                            .push(format!("line {line}: top-level block {key:?} skipped")),
                    }
                }
                other => {
                    return Err(self.unexpected(line, &other, "a top-level key"));
                }
            }
        }
        let (nodes, edges) = graph_body.ok_or_else(|| Error::Parse {
            path: self.source.into(),
            line: 1,
            message: "no graph block found".into(),
        })?;
        self.build(nodes, edges, policy)
    }

    fn parse_graph_body(
        &mut self,
        policy: SelfLoopPolicy,
    ) -> Result<(Vec<NodeDef>, Vec<EdgeDef>)> {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        loop {
            let (line, tok) = self.next_or_eof("inside graph block")?;
            match tok {
                Tok::Close => return Ok((nodes, edges)),
                Tok::Atom(key) if key == "node" => {
                    self.expect_open(line)?;
                    nodes.push(self.parse_node(line)?);
                }
                Tok::Atom(key) if key == "edge" => {
                    self.expect_open(line)?;
                    edges.push(self.parse_edge(line, policy)?);
                }
                Tok::Atom(key) if key == "directed" => {
                    if let Value::Scalar(v) = self.parse_value(line)? {
                        if v != "0" {
                            self.warnings.push(format!(
                                "line {line}: directed flag ignored; edges treated as undirected"
                            ));
                        }
                    }
                }
                Tok::Atom(key) => match self.parse_value(line)? {
                    Value::Scalar(_) => self
                        .warnings
                        .push(format!("line {line}: graph attribute {key:?} skipped")),
                    Value::Block => self
                        .warnings
                        .push(format!("line {line}: graph block {key:?} skipped")),
                },
                other => return Err(self.unexpected(line, &other, "a graph entry")),
            }
        }
    }

    fn parse_node(&mut self, open_line: u64) -> Result<NodeDef> {
        let mut id = None;
        let mut label = None;
        let mut attrs = Vec::new();
        loop {
            let (line, tok) = self.next_or_eof("inside node block")?;
            match tok {
                Tok::Close => {
                    let id = id.ok_or_else(|| Error::Parse {
                        path: self.source.into(),
                        line: open_line,
                        message: "node block without id".into(),
                    })?;
                    return Ok(NodeDef { id, label, attrs });
                }
                Tok::Atom(key) => match self.parse_value(line)? {
                    Value::Scalar(v) if key == "id" => {
                        id = Some(v.parse::<i64>().map_err(|_| Error::Parse {
                            path: self.source.into(),
                            line,
                            message: format!("node id {v:?} is not an integer"),
                        })?);
                    }
                    Value::Scalar(v) if key == "label" => label = Some(v),
                    Value::Scalar(v) => attrs.push((key, v)),
                    Value::Block => self
                        .warnings
                        .push(format!("line {line}: node block {key:?} skipped")),
                },
                other => return Err(self.unexpected(line, &other, "a node attribute")),
            }
        }
    }

    fn parse_edge(&mut self, open_line: u64, _policy: SelfLoopPolicy) -> Result<EdgeDef> {
        let mut source = None;
        let mut target = None;
        let mut weight = 1.0;
        loop {
            let (line, tok) = self.next_or_eof("inside edge block")?;
            match tok {
                Tok::Close => {
                    let (source, target) = match (source, target) {
                        (Some(s), Some(t)) => (s, t),
                        _ => {
                            return Err(Error::Parse {
                                path: self.source.into(),
                                line: open_line,
                                message: "edge block needs source and target".into(),
                            })
                        }
                    };
                    return Ok(EdgeDef {
                        source,
                        target,
                        weight,
                        line: open_line,
                    });
                }
                Tok::Atom(key) => match self.parse_value(line)? {
                    Value::Scalar(v) if key == "source" || key == "target" => {
                        let id = v.parse::<i64>().map_err(|_| Error::Parse {
                            path: self.source.into(),
                            line,
                            message: format!("edge {key} {v:?} is not an integer"),
                        })?;
                        if key == "source" {
                            source = Some(id);
                        } else {
                            target = Some(id);
                        }
                    }
                    Value::Scalar(v) if key == "value" || key == "weight" => {
                        weight = v.parse::<f64>().map_err(|_| Error::Parse {
                            path: self.source.into(),
                            line,
                            message: format!("edge weight {v:?} is not a number"),
                        })?;
                    }
                    Value::Scalar(_) => self
                        .warnings
                        .push(format!("line {line}: edge attribute {key:?} skipped")),
                    Value::Block => self
                        .warnings
                        .push(format!("line {line}: edge block {key:?} skipped")),
                },
                other => return Err(self.unexpected(line, &other, "an edge attribute")),
            }
        }
    }

    /// Consumes one value: a scalar token, or a whole nested block.
    fn parse_value(&mut self, key_line: u64) -> Result<Value> {
        let (line, tok) = self.next_or_eof("after a key")?;
        match tok {
            Tok::Str(s) => Ok(Value::Scalar(s)),
            Tok::Atom(s) => Ok(Value::Scalar(s)),
            Tok::Open => {
                self.skip_block(line)?;
                Ok(Value::Block)
            }
            Tok::Close => Err(self.unexpected(key_line, &Tok::Close, "a value")),
        }
    }

    /// Consumes tokens until the matching close bracket.
    fn skip_block(&mut self, open_line: u64) -> Result<()> {
        let mut depth = 1usize;
        let context = format!("inside block opened at line {open_line}");
        loop {
            let (_, tok) = self.next_or_eof(&context)?;
            match tok {
                Tok::Open => depth += 1,
                Tok::Close => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
    }

    fn build(
        mut self,
        nodes: Vec<NodeDef>,
        edges: Vec<EdgeDef>,
        policy: SelfLoopPolicy,
    ) -> Result<GmlData> {
        let mut id_to_index = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(nodes.len());
        let mut covariates = CovariateTable::default();
        for (index, node) in nodes.iter().enumerate() {
            if id_to_index.insert(node.id, index).is_some() {
                return Err(Error::DuplicateLabel {
                    label: format!("node id {}", node.id),
                });
            }
            let label = node.label.clone().unwrap_or_else(|| node.id.to_string());
            if labels.contains(&label) {
                return Err(Error::DuplicateLabel { label });
            }
            labels.push(label.clone());
            covariates.push_empty_row(label)?;
            for (key, value) in &node.attrs {
                let col = covariates.ensure_column(key);
                covariates.set(index, col, value.clone());
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for edge in &edges {
            let lookup = |id: i64| {
                id_to_index.get(&id).copied().ok_or_else(|| Error::UnknownNode {
                    label: format!("id {id}"),
                    context: format!("{}: edge at line {}", self.source, edge.line),
                })
            };
            let i = lookup(edge.source)?;
            let j = lookup(edge.target)?;
            if i == j {
                match policy {
                    SelfLoopPolicy::Reject => {
                        return Err(Error::SelfLoop {
                            node: labels[i].clone(),
                            line: Some(edge.line),
                        })
                    }
                    SelfLoopPolicy::Drop => continue,
                }
            }
            if !edge.weight.is_finite() || edge.weight < 0.0 {
                return Err(Error::InvalidWeight {
                    u: labels[i].clone(),
                    v: labels[j].clone(),
                    weight: edge.weight,
                    line: Some(edge.line),
                });
            }
            pairs.push((i, j, edge.weight));
        }
        let graph = Graph::from_parts(labels, pairs, policy)?;
        Ok(GmlData {
            graph,
            covariates,
            warnings: self.warnings.drain(..).collect(),
        })
    }

    fn next(&mut self) -> Option<(u64, Tok)> {
        let item = self.tokens.get(self.pos).cloned();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn next_or_eof(&mut self, context: &str) -> Result<(u64, Tok)> {
        let last_line = self.tokens.last().map_or(1, |(l, _)| *l);
        self.next().ok_or_else(|| Error::Parse {
            path: self.source.into(),
            line: last_line,
            message: format!("unexpected end of input {context}"),
        })
    }

    fn expect_open(&mut self, line: u64) -> Result<()> {
        match self.next_or_eof("expecting a block")? {
            (_, Tok::Open) => Ok(()),
            (l, other) => Err(self.unexpected(l.max(line), &other, "an opening bracket")),
        }
    }

    fn unexpected(&self, line: u64, tok: &Tok, wanted: &str) -> Error {
        let shown = match tok {
            Tok::Open => "[".to_string(),
            Tok::Close => "]".to_string(),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Atom(s) => s.clone(),
        };
        Error::Parse {
            path: self.source.into(),
            line,
            message: format!("unexpected token {shown}, expected {wanted}"),
        }
    }
}
