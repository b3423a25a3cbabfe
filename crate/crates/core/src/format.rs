//! Canonical `.bws.json` workspace files.
//!
//! Saving always produces the canonical form: keys sorted, stacks in label order,
//! two-space indentation, LF line endings and a trailing newline. Loading a canonical
//! file and saving it again reproduces it byte for byte.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::defs::{BlockKind, BlockSet, FieldKind, FieldValue};
use crate::labeling::{self, Label};
use crate::workspace::{Block, BlockId, Comment, Point, Stack, Violation, Workspace};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("schema violation at {0}")]
    SchemaViolation(String),
}

fn violation(path: impl Into<String>) -> FormatError {
    FormatError::SchemaViolation(path.into())
}

fn number_value(n: f64) -> Value {
    if n.fract() == 0.0 && n.abs() < 9.0e15 {
        json!(n as i64)
    } else {
        json!(n)
    }
}

fn field_json(v: &FieldValue) -> Value {
    match v {
        FieldValue::Number(n) => number_value(*n),
        FieldValue::Text(t) => Value::String(t.clone()),
    }
}

fn block_json(ws: &Workspace, id: &BlockId) -> Value {
    let block = ws.block(id).expect("block exists");
    let def = ws.def_of(id).expect("known definition");
    let fields: Map<String, Value> = block
        .fields
        .iter()
        .map(|(k, v)| (k.clone(), field_json(v)))
        .collect();
    let mut inputs = Map::new();
    for spec in &def.value_inputs {
        let child = block.value_slots.get(&spec.name).cloned().flatten();
        inputs.insert(
            spec.name.clone(),
            json!({ "block": child.map_or(Value::Null, |c| block_json(ws, &c)) }),
        );
    }
    for spec in &def.statement_inputs {
        let child = block.statement_slots.get(&spec.name).cloned().flatten();
        inputs.insert(
            spec.name.clone(),
            json!({ "block": child.map_or(Value::Null, |c| block_json(ws, &c)) }),
        );
    }
    let comment = block.comment.as_ref().map_or(Value::Null, |c| {
        json!({ "text": c.text, "visible": c.visible })
    });
    json!({
        "id": block.id.as_str(),
        "type": block.def_id,
        "fields": fields,
        "inputs": inputs,
        "next": block.next.as_ref().map_or(Value::Null, |n| block_json(ws, n)),
        "comment": comment,
    })
}

/// The workspace as a JSON value in canonical shape.
pub fn to_json(ws: &Workspace) -> Value {
    let stacks: Vec<Value> = ws
        .stacks()
        .iter()
        .map(|s| {
            json!({
                "label": s.label.as_str(),
                "custom_name": s.custom_name,
                "x": s.position.x,
                "y": s.position.y,
                "block": block_json(ws, &s.top),
            })
        })
        .collect();
    json!({ "version": FORMAT_VERSION, "stacks": stacks })
}

/// Canonical text of a workspace.
pub fn save(ws: &Workspace) -> String {
    let mut text = serde_json::to_string_pretty(&to_json(ws)).expect("json values serialize");
    text.push('\n');
    text
}

/// Hex SHA-256 of the canonical serialization.
pub fn state_hash(ws: &Workspace) -> String {
    hex::encode(Sha256::digest(save(ws).as_bytes()))
}

/// Loads a workspace over the standard block set.
pub fn load(text: &str) -> Result<Workspace, FormatError> {
    load_with(text, Arc::new(BlockSet::standard()))
}

pub fn load_with(text: &str, block_set: Arc<BlockSet>) -> Result<Workspace, FormatError> {
    let root: Value = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        reason: e.to_string(),
    })?;
    let mut loader = Loader {
        set: &block_set,
        blocks: Vec::new(),
        ids: HashSet::new(),
    };
    let obj = root.as_object().ok_or_else(|| violation("$"))?;
    for key in obj.keys() {
        if key != "version" && key != "stacks" {
            return Err(violation(key.as_str()));
        }
    }
    if obj.get("version").and_then(Value::as_u64) != Some(FORMAT_VERSION) {
        return Err(violation("version"));
    }
    let stacks_json = obj
        .get("stacks")
        .and_then(Value::as_array)
        .ok_or_else(|| violation("stacks"))?;
    let mut stacks = Vec::new();
    let mut labels = HashSet::new();
    for (i, s) in stacks_json.iter().enumerate() {
        let path = format!("stacks[{i}]");
        let s = s.as_object().ok_or_else(|| violation(&path))?;
        for key in s.keys() {
            if !["label", "custom_name", "x", "y", "block"].contains(&key.as_str()) {
                return Err(violation(format!("{path}.{key}")));
            }
        }
        let label = s
            .get("label")
            .and_then(Value::as_str)
            .and_then(Label::parse)
            .ok_or_else(|| violation(format!("{path}.label")))?;
        if !labels.insert(label.clone()) {
            return Err(violation(format!("{path}.label")));
        }
        let custom_name = match s.get("custom_name") {
            None | Some(Value::Null) => None,
            Some(Value::String(n)) => Some(
                labeling::normalize_custom_name(n)
                    .map_err(|_| violation(format!("{path}.custom_name")))?,
            ),
            Some(_) => return Err(violation(format!("{path}.custom_name"))),
        };
        let coord = |k: &str| {
            s.get(k)
                .and_then(Value::as_i64)
                .ok_or_else(|| violation(format!("{path}.{k}")))
        };
        let position = Point::new(coord("x")?, coord("y")?);
        let block = s
            .get("block")
            .filter(|b| b.is_object())
            .ok_or_else(|| violation(format!("{path}.block")))?;
        let top = loader.block(block, &format!("{path}.block"))?;
        stacks.push(Stack {
            label,
            custom_name,
            position,
            top,
        });
    }
    let ws = Workspace::from_raw(block_set.clone(), loader.blocks, stacks);
    if let Some(v) = ws.validate().into_iter().next() {
        return Err(violation(violation_path(&v)));
    }
    Ok(ws)
}

/// Path used when a structural violation surfaces while loading.
pub fn violation_path(v: &Violation) -> String {
    match v {
        Violation::UnknownDefinition(id) => format!("blocks.{id}.type"),
        Violation::DanglingReference { from, .. } => format!("blocks.{from}.next"),
        Violation::SharedChild(id)
        | Violation::KindMismatch(id)
        | Violation::TypeMismatch(id)
        | Violation::Orphan(id)
        | Violation::Cycle(id) => format!("blocks.{id}"),
        Violation::FieldMismatch { block, field } => format!("blocks.{block}.fields.{field}"),
        Violation::UnknownInput { block, input } | Violation::MissingInput { block, input } => {
            format!("blocks.{block}.inputs.{input}")
        }
        Violation::DanglingStackTop(l)
        | Violation::StackTopHasParent(l)
        | Violation::DuplicateLabel(l) => format!("stacks.{l}"),
        Violation::UnsortedStacks => "stacks".to_string(),
    }
}

struct Loader<'a> {
    set: &'a BlockSet,
    blocks: Vec<Block>,
    ids: HashSet<BlockId>,
}

impl Loader<'_> {
    fn kind(&self, id: &BlockId) -> Option<BlockKind> {
        let b = self.blocks.iter().find(|b| &b.id == id)?;
        self.set.get(&b.def_id).map(|d| d.kind)
    }

    fn block(&mut self, v: &Value, json_path: &str) -> Result<BlockId, FormatError> {
        let obj = v.as_object().ok_or_else(|| violation(json_path))?;
        let id = obj
            .get("id")
            .and_then(Value::as_str)
            .filter(|s| !s.is_empty())
            .map(BlockId::new)
            .ok_or_else(|| violation(format!("{json_path}.id")))?;
        let path = format!("blocks.{id}");
        if !self.ids.insert(id.clone()) {
            return Err(violation(format!("{path}.id")));
        }
        for key in obj.keys() {
            if !["id", "type", "fields", "inputs", "next", "comment"].contains(&key.as_str()) {
                return Err(violation(format!("{path}.{key}")));
            }
        }
        let def = obj
            .get("type")
            .and_then(Value::as_str)
            .and_then(|t| self.set.get(t))
            .ok_or_else(|| violation(format!("{path}.type")))?
            .clone();
        let mut block = Block::blank(id.clone(), &def);

        match obj.get("fields") {
            None => {}
            Some(Value::Object(fields)) => {
                for (name, raw) in fields {
                    let fpath = format!("{path}.fields.{name}");
                    let spec = def.field(name).ok_or_else(|| violation(&fpath))?;
                    let value = match (&spec.kind, raw) {
                        (FieldKind::Number { .. }, Value::Number(n)) => {
                            FieldValue::Number(n.as_f64().ok_or_else(|| violation(&fpath))?)
                        }
                        (FieldKind::Text { .. } | FieldKind::Choice { .. }, Value::String(s)) => {
                            FieldValue::Text(s.clone())
                        }
                        _ => return Err(violation(fpath)),
                    };
                    if !spec.accepts(&value) {
                        return Err(violation(fpath));
                    }
                    block.fields.insert(name.clone(), value);
                }
            }
            Some(_) => return Err(violation(format!("{path}.fields"))),
        }

        let mut pending_inputs = Vec::new();
        match obj.get("inputs") {
            None => {}
            Some(Value::Object(inputs)) => {
                for (name, raw) in inputs {
                    let ipath = format!("{path}.inputs.{name}");
                    if !def.has_input(name) {
                        return Err(violation(ipath));
                    }
                    let slot = raw.as_object().ok_or_else(|| violation(&ipath))?;
                    if slot.keys().any(|k| k != "block") {
                        return Err(violation(ipath));
                    }
                    match slot.get("block") {
                        None | Some(Value::Null) => {}
                        Some(child @ Value::Object(_)) => {
                            pending_inputs.push((name.clone(), ipath, child))
                        }
                        Some(_) => return Err(violation(ipath)),
                    }
                }
            }
            Some(_) => return Err(violation(format!("{path}.inputs"))),
        }

        match obj.get("comment") {
            None | Some(Value::Null) => {}
            Some(Value::Object(c)) => {
                let text = c.get("text").and_then(Value::as_str);
                let visible = c.get("visible").and_then(Value::as_bool);
                match (text, visible, c.len()) {
                    (Some(text), Some(visible), 2) => {
                        block.comment = Some(Comment {
                            text: text.to_string(),
                            visible,
                        })
                    }
                    _ => return Err(violation(format!("{path}.comment"))),
                }
            }
            Some(_) => return Err(violation(format!("{path}.comment"))),
        }

        let next = match obj.get("next") {
            None | Some(Value::Null) => None,
            Some(n @ Value::Object(_)) => {
                if def.kind != BlockKind::Statement || !def.has_next {
                    return Err(violation(format!("{path}.next")));
                }
                Some(n)
            }
            // Bare id references are not part of the format; treat them as dangling.
            Some(_) => return Err(violation(format!("{path}.next"))),
        };

        let slot_index = self.blocks.len();
        self.blocks.push(block);

        let mut value_children = BTreeMap::new();
        let mut statement_children = BTreeMap::new();
        for (name, ipath, child) in pending_inputs {
            let child_id = self.block(child, &ipath)?;
            let child_def = self
                .blocks
                .iter()
                .find(|b| b.id == child_id)
                .and_then(|b| self.set.get(&b.def_id))
                .expect("child just loaded");
            if let Some(spec) = def.value_input_spec(&name) {
                let fits = child_def.kind == BlockKind::Value
                    && child_def.output.is_some_and(|o| o.compatible(spec.accepts));
                if !fits {
                    return Err(violation(ipath));
                }
                value_children.insert(name, child_id);
            } else {
                if child_def.kind != BlockKind::Statement {
                    return Err(violation(ipath));
                }
                statement_children.insert(name, child_id);
            }
        }
        let next_id = match next {
            Some(n) => {
                let nid = self.block(n, &format!("{path}.next"))?;
                if self.kind(&nid) != Some(BlockKind::Statement) {
                    return Err(violation(format!("{path}.next")));
                }
                Some(nid)
            }
            None => None,
        };
        let block = &mut self.blocks[slot_index];
        for (k, v) in value_children {
            block.value_slots.insert(k, Some(v));
        }
        for (k, v) in statement_children {
            block.statement_slots.insert(k, Some(v));
        }
        block.next = next_id;
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::ConnectionRef;

    fn sample() -> Workspace {
        let mut ws = Workspace::standard();
        let r = ws.new_block_at("repeat", BTreeMap::new(), Point::new(10, 10)).unwrap();
        let n = ws
            .new_block("number", BTreeMap::from([("NUM".into(), FieldValue::Number(3.0))]))
            .unwrap();
        let p = ws.new_block("print", BTreeMap::new()).unwrap();
        let t = ws
            .new_block("text", BTreeMap::from([("TEXT".into(), FieldValue::Text("hi".into()))]))
            .unwrap();
        ws.connect(&ConnectionRef::ValueSlot(r.clone(), "TIMES".into()), &n).unwrap();
        ws.connect(&ConnectionRef::ValueSlot(p.clone(), "VALUE".into()), &t).unwrap();
        ws.connect(&ConnectionRef::StatementSlot(r.clone(), "BODY".into()), &p).unwrap();
        ws.set_comment(&r, Some(Comment { text: "loop".into(), visible: true })).unwrap();
        ws.new_block_at("print", BTreeMap::new(), Point::new(-20, 200)).unwrap();
        ws
    }

    #[test]
    fn canonical_round_trip() {
        let text = save(&sample());
        let again = save(&load(&text).unwrap());
        assert_eq!(text, again);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
        assert!(text.contains("\n  \"stacks\": ["));
    }

    #[test]
    fn integral_numbers_have_no_fraction() {
        let text = save(&sample());
        assert!(text.contains("\"NUM\": 3\n"), "{text}");
    }

    #[test]
    fn keys_are_sorted() {
        let text = save(&sample());
        let order = ["\"block\"", "\"custom_name\"", "\"label\"", "\"x\"", "\"y\""];
        let positions: Vec<usize> = order.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
        assert!(text.find("\"stacks\"").unwrap() < text.find("\"version\"").unwrap());
    }

    #[test]
    fn parse_error_reports_line() {
        let err = load("{\n  \"version\": 1,\n  oops\n}").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn duplicate_stack_label_is_rejected() {
        let text = r#"{"version":1,"stacks":[
            {"label":"A","custom_name":null,"x":0,"y":0,"block":{"id":"b1","type":"print"}},
            {"label":"A","custom_name":null,"x":0,"y":0,"block":{"id":"b2","type":"print"}}]}"#;
        assert_eq!(load(text).unwrap_err(), violation("stacks[1].label"));
    }

    #[test]
    fn dangling_next_is_rejected() {
        let text = r#"{"version":1,"stacks":[
            {"label":"A","custom_name":null,"x":0,"y":0,"block":{"id":"b7","type":"print","next":"b9"}}]}"#;
        assert_eq!(load(text).unwrap_err(), violation("blocks.b7.next"));
    }

    #[test]
    fn schema_checks() {
        let cases = [
            (r#"{"version":2,"stacks":[]}"#, "version"),
            (r#"{"version":1}"#, "stacks"),
            (
                r#"{"version":1,"stacks":[{"label":"a","x":0,"y":0,"block":{"id":"b1","type":"print"}}]}"#,
                "stacks[0].label",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0.5,"y":0,"block":{"id":"b1","type":"print"}}]}"#,
                "stacks[0].x",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0,"y":0,"block":{"id":"b1","type":"nope"}}]}"#,
                "blocks.b1.type",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0,"y":0,"block":{"id":"b1","type":"number","fields":{"NUM":"x"}}}]}"#,
                "blocks.b1.fields.NUM",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0,"y":0,"block":{"id":"b1","type":"repeat","inputs":{"BODY":{"block":{"id":"b2","type":"number"}}}}}]}"#,
                "blocks.b1.inputs.BODY",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0,"y":0,"block":{"id":"b1","type":"print","next":{"id":"b1","type":"print"}}}]}"#,
                "blocks.b1.id",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0,"y":0,"block":{"id":"b1","type":"number","next":{"id":"b2","type":"print"}}}]}"#,
                "blocks.b1.next",
            ),
            (
                r#"{"version":1,"stacks":[{"label":"A","x":0,"y":0,"block":{"id":"b1","type":"print","next":{"id":"b2","type":"number"}}}]}"#,
                "blocks.b1.next",
            ),
        ];
        for (text, path) in cases {
            assert_eq!(load(text).unwrap_err(), violation(path), "{text}");
        }
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let ws = sample();
        assert_eq!(state_hash(&ws), state_hash(&ws.clone()));
        assert_eq!(state_hash(&ws).len(), 64);
        let mut other = ws.clone();
        other.new_block("print", BTreeMap::new()).unwrap();
        assert_ne!(state_hash(&ws), state_hash(&other));
    }
}
