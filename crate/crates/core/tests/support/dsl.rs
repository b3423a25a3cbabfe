//! A compact notation for workspaces, rendered to `.bws.json` text without the engine.
//!
//! One stack per line:
//!
//! ```text
//! A@10,20 "main": repeat(3){ print("hi"); print($x) }; print(arithmetic(OP="*", 2, 5))
//! ```
//!
//! * `TYPE#id(args){seq | seq}` is a block. `#id` is optional; missing ids are filled
//!   in as `b1, b2, ...` in document order (preorder: inputs, bodies, then next).
//! * Arguments are positional value inputs or `NAME=value`. Naming a field sets the
//!   field. A number, string, `true`/`false` or `$var` given for an input stands for a
//!   number, text, boolean or variable block; `"hi"#b4` gives such a block an id.
//! * `{...}` holds the statement inputs in order, separated by `|`.
//! * A trailing `!"note"` adds a visible comment, `?"note"` a hidden one.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::defs::{def, Def};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub ty: String,
    pub fields: BTreeMap<String, Value>,
    pub values: BTreeMap<String, Option<Node>>,
    pub bodies: BTreeMap<String, Vec<Node>>,
    pub comment: Option<(String, bool)>,
}

impl Node {
    pub fn blank(id: impl Into<String>, ty: &str) -> Node {
        let d = def(ty);
        Node {
            id: id.into(),
            ty: ty.to_string(),
            fields: d.fields.iter().map(|(n, v)| (n.to_string(), v.json())).collect(),
            values: d.values.iter().map(|(n, _)| (n.to_string(), None)).collect(),
            bodies: d.bodies.iter().map(|n| (n.to_string(), Vec::new())).collect(),
            comment: None,
        }
    }

    pub fn def(&self) -> &'static Def {
        def(&self.ty)
    }

    /// This node and everything nested in it, excluding successors, in preorder.
    pub fn preorder<'a>(&'a self, out: &mut Vec<&'a Node>) {
        out.push(self);
        let d = self.def();
        for (name, _) in d.values {
            if let Some(Some(child)) = self.values.get(*name) {
                child.preorder(out);
            }
        }
        for name in d.bodies {
            for child in &self.bodies[*name] {
                child.preorder(out);
            }
        }
    }

    /// Input nesting depth: 1 for a block with nothing inside.
    pub fn depth(&self) -> usize {
        let values = self.values.values().flatten().map(|c| c.depth());
        let bodies = self.bodies.values().flatten().map(|c| c.depth());
        1 + values.chain(bodies).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StackSpec {
    pub label: String,
    pub name: Option<String>,
    pub x: i64,
    pub y: i64,
    pub seq: Vec<Node>,
}

impl StackSpec {
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        for n in &self.seq {
            n.preorder(&mut out);
        }
        out
    }
}

/// Label order: shorter labels first, then alphabetical.
pub fn label_key(label: &str) -> (usize, String) {
    (label.len(), label.to_string())
}

fn seq_json(seq: &[Node]) -> Value {
    let mut next = Value::Null;
    for node in seq.iter().rev() {
        next = node_json(node, next);
    }
    next
}

fn node_json(node: &Node, next: Value) -> Value {
    let d = node.def();
    let mut inputs = Map::new();
    for (name, _) in d.values {
        let child = node.values.get(*name).cloned().flatten();
        let block = child.map_or(Value::Null, |c| node_json(&c, Value::Null));
        inputs.insert(name.to_string(), json!({ "block": block }));
    }
    for name in d.bodies {
        inputs.insert(name.to_string(), json!({ "block": seq_json(&node.bodies[*name]) }));
    }
    let comment = node
        .comment
        .as_ref()
        .map_or(Value::Null, |(t, v)| json!({ "text": t, "visible": v }));
    json!({
        "id": node.id,
        "type": node.ty,
        "fields": node.fields,
        "inputs": inputs,
        "next": next,
        "comment": comment,
    })
}

pub fn workspace_json(stacks: &[StackSpec]) -> Value {
    let mut sorted: Vec<&StackSpec> = stacks.iter().collect();
    sorted.sort_by_key(|s| label_key(&s.label));
    let stacks: Vec<Value> = sorted
        .iter()
        .map(|s| {
            json!({
                "label": s.label,
                "custom_name": s.name,
                "x": s.x,
                "y": s.y,
                "block": seq_json(&s.seq),
            })
        })
        .collect();
    json!({ "version": 1, "stacks": stacks })
}

/// Canonical file text: sorted keys, two-space indent, trailing newline.
pub fn canonical_text(stacks: &[StackSpec]) -> String {
    let mut text = serde_json::to_string_pretty(&workspace_json(stacks)).unwrap();
    text.push('\n');
    text
}

pub fn hash_text(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Var(String),
    Punct(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        i += 1;
                        s.push(*chars.get(i).ok_or("bad escape")?);
                    }
                    Some(c) => s.push(*c),
                }
                i += 1;
            }
            i += 1;
            out.push(Tok::Str(s));
        } else if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| format!("bad number {text}"))?));
        } else if c == '$' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Var(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "@,:;(){}|=#!?".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected '{c}' at token {}, found {:?}", self.pos, self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(format!("expected a name, found {other:?}")),
        }
    }

    fn int(&mut self) -> Result<i64, String> {
        match self.next() {
            Some(Tok::Num(n)) if n.fract() == 0.0 => Ok(n as i64),
            other => Err(format!("expected an integer, found {other:?}")),
        }
    }

    fn stack(&mut self) -> Result<StackSpec, String> {
        let label = self.ident()?;
        let (mut x, mut y) = (0, 0);
        if self.eat('@') {
            x = self.int()?;
            self.expect(',')?;
            y = self.int()?;
        }
        let name = match self.peek() {
            Some(Tok::Str(_)) => match self.next() {
                Some(Tok::Str(s)) => Some(s),
                _ => unreachable!(),
            },
            _ => None,
        };
        self.expect(':')?;
        let seq = self.seq()?;
        if seq.is_empty() {
            return Err(format!("stack {label} has no blocks"));
        }
        Ok(StackSpec {
            label,
            name,
            x,
            y,
            seq,
        })
    }

    fn seq(&mut self) -> Result<Vec<Node>, String> {
        let mut out = Vec::new();
        if matches!(self.peek(), Some(Tok::Ident(_))) {
            out.push(self.block()?);
            while self.eat(';') {
                out.push(self.block()?);
            }
        }
        Ok(out)
    }

    fn block(&mut self) -> Result<Node, String> {
        let ty = self.ident()?;
        if !super::defs::DEFS.iter().any(|d| d.name == ty) {
            return Err(format!("unknown block type {ty}"));
        }
        let id = if self.eat('#') { self.ident()? } else { String::new() };
        let mut node = Node::blank(id, &ty);
        let d = node.def();
        if self.eat('(') {
            let mut positional = d.values.iter().map(|(n, _)| *n);
            if !self.eat(')') {
                loop {
                    let named = match (self.peek(), self.toks.get(self.pos + 1)) {
                        (Some(Tok::Ident(n)), Some(Tok::Punct('='))) => Some(n.clone()),
                        _ => None,
                    };
                    match named {
                        Some(name) => {
                            self.pos += 2;
                            if d.has_field(&name) {
                                let v = match self.next() {
                                    Some(Tok::Num(n)) if n.fract() == 0.0 => json!(n as i64),
                                    Some(Tok::Num(n)) => json!(n),
                                    Some(Tok::Str(s)) => json!(s),
                                    Some(Tok::Ident(s)) => json!(s),
                                    other => return Err(format!("bad field value {other:?}")),
                                };
                                node.fields.insert(name, v);
                            } else if d.values.iter().any(|(n, _)| *n == name) {
                                let v = self.value()?;
                                node.values.insert(name, Some(v));
                            } else {
                                return Err(format!("{ty} has no field or input {name}"));
                            }
                        }
                        None => {
                            let name = positional
                                .next()
                                .ok_or_else(|| format!("too many inputs for {ty}"))?;
                            let v = self.value()?;
                            node.values.insert(name.to_string(), Some(v));
                        }
                    }
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
        }
        if self.eat('{') {
            let mut bodies = d.bodies.iter();
            loop {
                let name = bodies
                    .next()
                    .ok_or_else(|| format!("too many statement inputs for {ty}"))?;
                let seq = self.seq()?;
                node.bodies.insert(name.to_string(), seq);
                if self.eat('}') {
                    break;
                }
                self.expect('|')?;
            }
        }
        for (mark, visible) in [('!', true), ('?', false)] {
            if self.eat(mark) {
                match self.next() {
                    Some(Tok::Str(s)) => node.comment = Some((s, visible)),
                    other => return Err(format!("expected comment text, found {other:?}")),
                }
            }
        }
        Ok(node)
    }

    /// A value block, or literal sugar for one.
    fn value(&mut self) -> Result<Node, String> {
        let lit = |ty: &str, field: &str, v: Value| {
            let mut n = Node::blank("", ty);
            n.fields.insert(field.to_string(), v);
            n
        };
        let mut node: Node = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v = if n.fract() == 0.0 { json!(n as i64) } else { json!(n) };
                lit("number", "NUM", v)
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                lit("text", "TEXT", json!(s))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                lit("var_get", "VAR", json!(v))
            }
            Some(Tok::Ident(b)) if b == "true" || b == "false" => {
                self.pos += 1;
                lit("boolean", "BOOL", json!(b))
            }
            _ => return self.block(),
        };
        if self.eat('#') {
            node.id = self.ident()?;
        }
        Ok(node)
    }
}

fn assign_ids(stacks: &mut [StackSpec]) {
    let mut used: BTreeSet<String> = BTreeSet::new();
    fn collect(n: &Node, used: &mut BTreeSet<String>) {
        if !n.id.is_empty() {
            used.insert(n.id.clone());
        }
        n.values.values().flatten().for_each(|c| collect(c, used));
        n.bodies.values().flatten().for_each(|c| collect(c, used));
    }
    for s in stacks.iter() {
        s.seq.iter().for_each(|n| collect(n, &mut used));
    }
    let mut counter = 0;
    fn fill(n: &mut Node, counter: &mut usize, used: &BTreeSet<String>) {
        if n.id.is_empty() {
            loop {
                *counter += 1;
                let id = format!("b{counter}");
                if !used.contains(&id) {
                    n.id = id;
                    break;
                }
            }
        }
        let d = n.def();
        for (name, _) in d.values {
            if let Some(Some(c)) = n.values.get_mut(*name) {
                fill(c, counter, used);
            }
        }
        for name in d.bodies {
            for c in n.bodies.get_mut(*name).unwrap() {
                fill(c, counter, used);
            }
        }
    }
    for s in stacks.iter_mut() {
        for n in s.seq.iter_mut() {
            fill(n, &mut counter, &used);
        }
    }
}

/// Parses one stack per non-empty line.
pub fn parse_stacks<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Vec<StackSpec>, String> {
    let mut stacks = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut p = Parser {
            toks: lex(line)?,
            pos: 0,
        };
        let s = p.stack().map_err(|e| format!("{e} in: {line}"))?;
        if p.pos != p.toks.len() {
            return Err(format!("trailing tokens in: {line}"));
        }
        stacks.push(s);
    }
    assign_ids(&mut stacks);
    Ok(stacks)
}

pub fn parse(text: &str) -> Vec<StackSpec> {
    parse_stacks(text.lines()).unwrap_or_else(|e| panic!("{e}"))
}

/// Canonical text for notation, for tests that just need a file.
pub fn file(text: &str) -> String {
    canonical_text(&parse(text))
}
