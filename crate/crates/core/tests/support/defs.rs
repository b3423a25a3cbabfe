//! The standard vocabulary as plain data, written out by hand.

use serde_json::{json, Value};

pub struct Def {
    pub name: &'static str,
    /// Output type for value blocks; `None` for statements.
    pub output: Option<&'static str>,
    pub fields: &'static [(&'static str, Default)],
    pub values: &'static [(&'static str, &'static str)],
    pub bodies: &'static [&'static str],
}

#[derive(Clone, Copy)]
pub enum Default {
    Num(f64),
    Text(&'static str),
    Choice(&'static [&'static str]),
}

impl Default {
    pub fn json(self) -> Value {
        match self {
            Default::Num(n) => json!(n as i64),
            Default::Text(t) => json!(t),
            Default::Choice(options) => json!(options[0]),
        }
    }
}

impl Def {
    pub fn is_statement(&self) -> bool {
        self.output.is_none()
    }

    pub fn element_count(&self) -> usize {
        self.fields.len() + self.values.len() + self.bodies.len()
    }

    pub fn has_field(&self, name: &str) -> bool {
        self.fields.iter().any(|(f, _)| *f == name)
    }
}

pub const DEFS: &[Def] = &[
    Def { name: "print", output: None, fields: &[], values: &[("VALUE", "Any")], bodies: &[] },
    Def { name: "repeat", output: None, fields: &[], values: &[("TIMES", "Number")], bodies: &["BODY"] },
    Def { name: "if", output: None, fields: &[], values: &[("COND", "Boolean")], bodies: &["DO", "ELSE"] },
    Def {
        name: "set_var",
        output: None,
        fields: &[("VAR", Default::Text("x"))],
        values: &[("VALUE", "Any")],
        bodies: &[],
    },
    Def { name: "var_get", output: Some("Any"), fields: &[("VAR", Default::Text("x"))], values: &[], bodies: &[] },
    Def { name: "number", output: Some("Number"), fields: &[("NUM", Default::Num(0.0))], values: &[], bodies: &[] },
    Def { name: "text", output: Some("Text"), fields: &[("TEXT", Default::Text(""))], values: &[], bodies: &[] },
    Def {
        name: "boolean",
        output: Some("Boolean"),
        fields: &[("BOOL", Default::Choice(&["true", "false"]))],
        values: &[],
        bodies: &[],
    },
    Def {
        name: "arithmetic",
        output: Some("Number"),
        fields: &[("OP", Default::Choice(&["+", "-", "*", "/"]))],
        values: &[("A", "Number"), ("B", "Number")],
        bodies: &[],
    },
    Def {
        name: "compare",
        output: Some("Boolean"),
        fields: &[("OP", Default::Choice(&["<", "=", ">"]))],
        values: &[("A", "Any"), ("B", "Any")],
        bodies: &[],
    },
    Def {
        name: "logic",
        output: Some("Boolean"),
        fields: &[("OP", Default::Choice(&["and", "or", "not"]))],
        values: &[("A", "Boolean"), ("B", "Boolean")],
        bodies: &[],
    },
];

/// Toolbox order: Output, Control, Variables, Values, Operators.
pub const TOOLBOX_ORDER: &[&str] = &[
    "print", "repeat", "if", "set_var", "var_get", "number", "text", "boolean", "arithmetic",
    "compare", "logic",
];

pub fn def(name: &str) -> &'static Def {
    DEFS.iter()
        .find(|d| d.name == name)
        .unwrap_or_else(|| panic!("unknown block type {name}"))
}

/// Whether a value of type `output` may sit in a slot accepting `accepts`.
pub fn fits(output: &str, accepts: &str) -> bool {
    output == "Any" || accepts == "Any" || output == accepts
}
