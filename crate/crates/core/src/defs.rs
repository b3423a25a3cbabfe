//! Block definitions: the static vocabulary a workspace is built from.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Type carried by a value connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ValueType {
    Number,
    Text,
    Boolean,
    Any,
}

impl ValueType {
    /// Two value types fit together when they are equal or either side is `Any`.
    pub fn compatible(self, other: ValueType) -> bool {
        self == other || self == ValueType::Any || other == ValueType::Any
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueType::Number => "number",
            ValueType::Text => "text",
            ValueType::Boolean => "boolean",
            ValueType::Any => "any",
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Statement,
    Value,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    Number { default: f64 },
    Text { default: String },
    Choice { options: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub name: String,
    /// Spoken name, e.g. "value" for `NUM`.
    pub label: String,
    pub kind: FieldKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueInputSpec {
    pub name: String,
    pub label: String,
    pub accepts: ValueType,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatementInputSpec {
    pub name: String,
    pub label: String,
}

/// Scalar stored in a block field.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldValue {
    Number(f64),
    Text(String),
}

impl FieldValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            FieldValue::Number(n) => Some(*n),
            FieldValue::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            FieldValue::Text(t) => Some(t),
            FieldValue::Number(_) => None,
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Number(n) => f.write_str(&format_number(*n)),
            FieldValue::Text(t) => f.write_str(t),
        }
    }
}

/// Renders integral values without a fractional part ("10", not "10.0").
pub fn format_number(n: f64) -> String {
    if n.is_finite() && n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

impl FieldSpec {
    pub fn default_value(&self) -> FieldValue {
        match &self.kind {
            FieldKind::Number { default } => FieldValue::Number(*default),
            FieldKind::Text { default } => FieldValue::Text(default.clone()),
            FieldKind::Choice { options } => FieldValue::Text(options[0].clone()),
        }
    }

    pub fn accepts(&self, value: &FieldValue) -> bool {
        match (&self.kind, value) {
            (FieldKind::Number { .. }, FieldValue::Number(n)) => n.is_finite(),
            (FieldKind::Text { .. }, FieldValue::Text(_)) => true,
            (FieldKind::Choice { options }, FieldValue::Text(t)) => options.iter().any(|o| o == t),
            _ => false,
        }
    }

    /// Parses typed text into a value for this field. Choices match case-insensitively.
    pub fn parse_input(&self, text: &str) -> Option<FieldValue> {
        match &self.kind {
            FieldKind::Number { .. } => text
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|n| n.is_finite())
                .map(FieldValue::Number),
            FieldKind::Text { .. } => Some(FieldValue::Text(text.to_string())),
            FieldKind::Choice { options } => options
                .iter()
                .find(|o| o.eq_ignore_ascii_case(text.trim()))
                .map(|o| FieldValue::Text(o.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockDefinition {
    pub def_id: String,
    /// Spoken name of the block type.
    pub display: String,
    pub kind: BlockKind,
    pub fields: Vec<FieldSpec>,
    pub value_inputs: Vec<ValueInputSpec>,
    pub statement_inputs: Vec<StatementInputSpec>,
    pub output: Option<ValueType>,
    pub has_previous: bool,
    pub has_next: bool,
}

impl BlockDefinition {
    pub fn statement(def_id: &str, display: &str) -> Self {
        BlockDefinition {
            def_id: def_id.to_string(),
            display: display.to_string(),
            kind: BlockKind::Statement,
            fields: Vec::new(),
            value_inputs: Vec::new(),
            statement_inputs: Vec::new(),
            output: None,
            has_previous: true,
            has_next: true,
        }
    }

    pub fn value(def_id: &str, display: &str, output: ValueType) -> Self {
        BlockDefinition {
            def_id: def_id.to_string(),
            display: display.to_string(),
            kind: BlockKind::Value,
            fields: Vec::new(),
            value_inputs: Vec::new(),
            statement_inputs: Vec::new(),
            output: Some(output),
            has_previous: false,
            has_next: false,
        }
    }

    pub fn number_field(mut self, name: &str, label: &str, default: f64) -> Self {
        self.fields.push(FieldSpec {
            name: name.to_string(),
            label: label.to_string(),
            kind: FieldKind::Number { default },
        });
        self
    }

    pub fn text_field(mut self, name: &str, label: &str, default: &str) -> Self {
        self.fields.push(FieldSpec {
            name: name.to_string(),
            label: label.to_string(),
            kind: FieldKind::Text {
                default: default.to_string(),
            },
        });
        self
    }

    pub fn choice_field(mut self, name: &str, label: &str, options: &[&str]) -> Self {
        self.fields.push(FieldSpec {
            name: name.to_string(),
            label: label.to_string(),
            kind: FieldKind::Choice {
                options: options.iter().map(|s| s.to_string()).collect(),
            },
        });
        self
    }

    pub fn value_input(mut self, name: &str, label: &str, accepts: ValueType) -> Self {
        self.value_inputs.push(ValueInputSpec {
            name: name.to_string(),
            label: label.to_string(),
            accepts,
        });
        self
    }

    pub fn statement_input(mut self, name: &str, label: &str) -> Self {
        self.statement_inputs.push(StatementInputSpec {
            name: name.to_string(),
            label: label.to_string(),
        });
        self
    }

    pub fn field(&self, name: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn value_input_spec(&self, name: &str) -> Option<&ValueInputSpec> {
        self.value_inputs.iter().find(|i| i.name == name)
    }

    pub fn statement_input_spec(&self, name: &str) -> Option<&StatementInputSpec> {
        self.statement_inputs.iter().find(|i| i.name == name)
    }

    pub fn has_input(&self, name: &str) -> bool {
        self.value_input_spec(name).is_some() || self.statement_input_spec(name).is_some()
    }

    /// Number of navigable children: fields, then value inputs, then statement inputs.
    pub fn child_count(&self) -> usize {
        self.fields.len() + self.value_inputs.len() + self.statement_inputs.len()
    }

    /// Checks the shape rules tying `kind`, `output` and the chaining flags together.
    pub fn is_well_formed(&self) -> bool {
        match self.kind {
            BlockKind::Value => self.output.is_some() && !self.has_previous && !self.has_next,
            BlockKind::Statement => self.output.is_none(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BlockSetError {
    #[error("duplicate block definition {0}")]
    Duplicate(String),
    #[error("malformed block definition {0}")]
    Malformed(String),
}

/// A named toolbox category.
#[derive(Clone, Debug, PartialEq)]
pub struct Category {
    pub name: String,
    pub entries: Vec<String>,
}

/// All definitions known to a workspace, in toolbox order.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSet {
    defs: BTreeMap<String, BlockDefinition>,
    order: Vec<String>,
    categories: Vec<Category>,
}

impl BlockSet {
    pub fn new(
        defs: Vec<BlockDefinition>,
        categories: Vec<Category>,
    ) -> Result<Self, BlockSetError> {
        let mut map = BTreeMap::new();
        let mut order = Vec::new();
        for def in defs {
            if !def.is_well_formed() {
                return Err(BlockSetError::Malformed(def.def_id));
            }
            if map.contains_key(&def.def_id) {
                return Err(BlockSetError::Duplicate(def.def_id));
            }
            order.push(def.def_id.clone());
            map.insert(def.def_id.clone(), def);
        }
        for cat in &categories {
            for entry in &cat.entries {
                if !map.contains_key(entry) {
                    return Err(BlockSetError::Malformed(entry.clone()));
                }
            }
        }
        Ok(BlockSet {
            defs: map,
            order,
            categories,
        })
    }

    /// The fixed teaching vocabulary: output, variables, loops, conditionals and expressions.
    pub fn standard() -> Self {
        use ValueType::*;
        let defs = vec![
            BlockDefinition::statement("repeat", "repeat")
                .value_input("TIMES", "times", Number)
                .statement_input("BODY", "do"),
            BlockDefinition::statement("if", "if")
                .value_input("COND", "condition", Boolean)
                .statement_input("DO", "then")
                .statement_input("ELSE", "else"),
            BlockDefinition::statement("print", "print").value_input("VALUE", "value", Any),
            BlockDefinition::statement("set_var", "set")
                .text_field("VAR", "variable", "x")
                .value_input("VALUE", "value", Any),
            BlockDefinition::value("var_get", "variable", Any).text_field("VAR", "variable", "x"),
            BlockDefinition::value("number", "number", Number).number_field("NUM", "value", 0.0),
            BlockDefinition::value("text", "text", Text).text_field("TEXT", "text", ""),
            BlockDefinition::value("boolean", "boolean", Boolean).choice_field(
                "BOOL",
                "value",
                &["true", "false"],
            ),
            BlockDefinition::value("arithmetic", "arithmetic", Number)
                .choice_field("OP", "operator", &["+", "-", "*", "/"])
                .value_input("A", "left", Number)
                .value_input("B", "right", Number),
            BlockDefinition::value("compare", "compare", Boolean)
                .choice_field("OP", "operator", &["<", "=", ">"])
                .value_input("A", "left", Any)
                .value_input("B", "right", Any),
            BlockDefinition::value("logic", "logic", Boolean)
                .choice_field("OP", "operator", &["and", "or", "not"])
                .value_input("A", "left", Boolean)
                .value_input("B", "right", Boolean),
        ];
        let cat = |name: &str, entries: &[&str]| Category {
            name: name.to_string(),
            entries: entries.iter().map(|s| s.to_string()).collect(),
        };
        let categories = vec![
            cat("Output", &["print"]),
            cat("Control", &["repeat", "if"]),
            cat("Variables", &["set_var", "var_get"]),
            cat("Values", &["number", "text", "boolean"]),
            cat("Operators", &["arithmetic", "compare", "logic"]),
        ];
        BlockSet::new(defs, categories).expect("standard block set is well formed")
    }

    pub fn get(&self, def_id: &str) -> Option<&BlockDefinition> {
        self.defs.get(def_id)
    }

    /// Definitions in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = &BlockDefinition> {
        self.order.iter().map(move |id| &self.defs[id])
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compatibility_matrix() {
        use ValueType::*;
        let all = [Number, Text, Boolean, Any];
        for a in all {
            for b in all {
                let expected = a == b || a == Any || b == Any;
                assert_eq!(a.compatible(b), expected, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn standard_set_is_consistent() {
        let set = BlockSet::standard();
        assert_eq!(set.len(), 11);
        for def in set.iter() {
            assert!(def.is_well_formed(), "{}", def.def_id);
        }
        let listed: usize = set.categories().iter().map(|c| c.entries.len()).sum();
        assert_eq!(listed, set.len());
    }

    #[test]
    fn duplicate_definitions_rejected() {
        let d = BlockDefinition::statement("print", "print");
        let err = BlockSet::new(vec![d.clone(), d], vec![]).unwrap_err();
        assert_eq!(err, BlockSetError::Duplicate("print".into()));
    }

    #[test]
    fn value_block_with_next_is_malformed() {
        let mut d = BlockDefinition::value("n", "n", ValueType::Number);
        d.has_next = true;
        assert!(BlockSet::new(vec![d], vec![]).is_err());
    }

    #[test]
    fn field_parsing() {
        let set = BlockSet::standard();
        let num = set.get("number").unwrap().field("NUM").unwrap();
        assert_eq!(num.parse_input(" 12.5"), Some(FieldValue::Number(12.5)));
        assert_eq!(num.parse_input("abc"), None);
        let op = set.get("logic").unwrap().field("OP").unwrap();
        assert_eq!(op.parse_input("AND"), Some(FieldValue::Text("and".into())));
        assert_eq!(op.parse_input("xor"), None);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(10.0), "10");
        assert_eq!(format_number(-3.0), "-3");
        assert_eq!(format_number(2.5), "2.5");
    }
}
