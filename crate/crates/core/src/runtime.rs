//! A small tree-walking interpreter for the standard block set.

use std::collections::BTreeMap;
use std::fmt;

use crate::defs::{format_number, FieldValue};
use crate::labeling::Label;
use crate::workspace::{BlockId, Workspace};

pub const DEFAULT_STEP_LIMIT: u64 = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Boolean(bool),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "text",
            Value::Boolean(_) => "boolean",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => f.write_str(&format_number(*n)),
            Value::Text(t) => f.write_str(t),
            Value::Boolean(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RuntimeError {
    #[error("empty {input} input in stack {label}, block {number}")]
    EmptyValueSlot {
        label: Label,
        number: usize,
        input: String,
    },
    #[error("type error: {0}")]
    TypeError(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum OutputStatus {
    Ok,
    Error(RuntimeError),
    StepLimitExceeded,
}

impl fmt::Display for OutputStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputStatus::Ok => f.write_str("ok"),
            OutputStatus::Error(e) => write!(f, "{e}"),
            OutputStatus::StepLimitExceeded => f.write_str("step limit exceeded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub lines: Vec<String>,
    pub status: OutputStatus,
    /// Blocks evaluated, never more than the step limit.
    pub steps: u64,
}

enum Stop {
    Error(RuntimeError),
    Limit,
}

impl From<RuntimeError> for Stop {
    fn from(e: RuntimeError) -> Self {
        Stop::Error(e)
    }
}

fn type_error(msg: impl Into<String>) -> Stop {
    Stop::Error(RuntimeError::TypeError(msg.into()))
}

struct Machine<'a> {
    ws: &'a Workspace,
    env: BTreeMap<String, Value>,
    lines: Vec<String>,
    steps: u64,
    limit: u64,
}

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Result<(), Stop> {
        if self.steps >= self.limit {
            return Err(Stop::Limit);
        }
        self.steps += 1;
        Ok(())
    }

    fn field(&self, id: &BlockId, name: &str) -> Option<&'a FieldValue> {
        self.ws.block(id)?.fields.get(name)
    }

    fn text_field(&self, id: &BlockId, name: &str) -> String {
        self.field(id, name)
            .map(|v| v.to_string())
            .unwrap_or_default()
    }

    fn slot(&mut self, id: &BlockId, input: &str) -> Result<Value, Stop> {
        let child = self
            .ws
            .block(id)
            .and_then(|b| b.value_slots.get(input))
            .cloned()
            .flatten();
        match child {
            Some(c) => self.eval(&c),
            None => {
                let label = self
                    .ws
                    .stack_of(id)
                    .map(|s| s.label.clone())
                    .unwrap_or_else(|| Label::from_index(0));
                let number = self.ws.numbering().get(id).map_or(0, |n| n.number);
                let input = self
                    .ws
                    .def_of(id)
                    .and_then(|d| d.value_input_spec(input))
                    .map_or(input.to_string(), |s| s.label.clone());
                Err(RuntimeError::EmptyValueSlot {
                    label,
                    number,
                    input,
                }
                .into())
            }
        }
    }

    fn number(&mut self, id: &BlockId, input: &str) -> Result<f64, Stop> {
        match self.slot(id, input)? {
            Value::Number(n) => Ok(n),
            other => Err(type_error(format!("expected a number, got {}", other.type_name()))),
        }
    }

    fn boolean(&mut self, id: &BlockId, input: &str) -> Result<bool, Stop> {
        match self.slot(id, input)? {
            Value::Boolean(b) => Ok(b),
            other => Err(type_error(format!("expected a boolean, got {}", other.type_name()))),
        }
    }

    fn eval(&mut self, id: &BlockId) -> Result<Value, Stop> {
        self.tick()?;
        let def_id = self.ws.block(id).map(|b| b.def_id.as_str()).unwrap_or("");
        match def_id {
            "number" => Ok(Value::Number(
                self.field(id, "NUM").and_then(|v| v.as_number()).unwrap_or(0.0),
            )),
            "text" => Ok(Value::Text(self.text_field(id, "TEXT"))),
            "boolean" => Ok(Value::Boolean(self.text_field(id, "BOOL") == "true")),
            "var_get" => {
                let name = self.text_field(id, "VAR");
                self.env
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| type_error(format!("variable {name} is not set")))
            }
            "arithmetic" => {
                let a = self.number(id, "A")?;
                let b = self.number(id, "B")?;
                let n = match self.text_field(id, "OP").as_str() {
                    "+" => a + b,
                    "-" => a - b,
                    "*" => a * b,
                    "/" if b == 0.0 => return Err(type_error("division by zero")),
                    "/" => a / b,
                    op => return Err(type_error(format!("unknown operator {op}"))),
                };
                Ok(Value::Number(n))
            }
            "compare" => {
                let a = self.slot(id, "A")?;
                let b = self.slot(id, "B")?;
                let op = self.text_field(id, "OP");
                let ordering = match (&a, &b) {
                    (Value::Number(x), Value::Number(y)) => x.partial_cmp(y),
                    (Value::Text(x), Value::Text(y)) => Some(x.cmp(y)),
                    (Value::Boolean(x), Value::Boolean(y)) if op == "=" => Some(x.cmp(y)),
                    _ => None,
                };
                let Some(ordering) = ordering else {
                    return Err(type_error(format!(
                        "cannot compare {} with {}",
                        a.type_name(),
                        b.type_name()
                    )));
                };
                let result = match op.as_str() {
                    "<" => ordering.is_lt(),
                    "=" => ordering.is_eq(),
                    ">" => ordering.is_gt(),
                    op => return Err(type_error(format!("unknown operator {op}"))),
                };
                Ok(Value::Boolean(result))
            }
            "logic" => {
                let op = self.text_field(id, "OP");
                let a = self.boolean(id, "A")?;
                let result = match op.as_str() {
                    "not" => !a,
                    "and" => {
                        let b = self.boolean(id, "B")?;
                        a && b
                    }
                    "or" => {
                        let b = self.boolean(id, "B")?;
                        a || b
                    }
                    op => return Err(type_error(format!("unknown operator {op}"))),
                };
                Ok(Value::Boolean(result))
            }
            other => Err(type_error(format!("{other} is not a value block"))),
        }
    }

    fn exec_sequence(&mut self, head: Option<BlockId>) -> Result<(), Stop> {
        let mut cur = head;
        while let Some(id) = cur {
            self.exec(&id)?;
            cur = self.ws.successor(&id).cloned();
        }
        Ok(())
    }

    fn body(&self, id: &BlockId, input: &str) -> Option<BlockId> {
        self.ws
            .block(id)
            .and_then(|b| b.statement_slots.get(input))
            .cloned()
            .flatten()
    }

    fn exec(&mut self, id: &BlockId) -> Result<(), Stop> {
        // A loose value block at a stack top is evaluated for its errors only.
        if self.ws.def_of(id).is_some_and(|d| d.output.is_some()) {
            return self.eval(id).map(|_| ());
        }
        self.tick()?;
        let def_id = self.ws.block(id).map(|b| b.def_id.clone()).unwrap_or_default();
        match def_id.as_str() {
            "print" => {
                let v = self.slot(id, "VALUE")?;
                self.lines.push(v.to_string());
            }
            "set_var" => {
                let v = self.slot(id, "VALUE")?;
                let name = self.text_field(id, "VAR");
                self.env.insert(name, v);
            }
            "repeat" => {
                let n = self.number(id, "TIMES")?.floor();
                let body = self.body(id, "BODY");
                let mut i = 0.0;
                while i < n {
                    self.exec_sequence(body.clone())?;
                    i += 1.0;
                }
            }
            "if" => {
                let branch = if self.boolean(id, "COND")? { "DO" } else { "ELSE" };
                let body = self.body(id, branch);
                self.exec_sequence(body)?;
            }
            other => return Err(type_error(format!("cannot run {other}"))),
        }
        Ok(())
    }
}

/// Runs every stack in label order; errors stop the run and keep the output so far.
pub fn run(ws: &Workspace, step_limit: u64) -> Output {
    let mut m = Machine {
        ws,
        env: BTreeMap::new(),
        lines: Vec::new(),
        steps: 0,
        limit: step_limit,
    };
    let mut status = OutputStatus::Ok;
    for stack in ws.stacks() {
        if let Err(stop) = m.exec_sequence(Some(stack.top.clone())) {
            status = match stop {
                Stop::Error(e) => OutputStatus::Error(e),
                Stop::Limit => OutputStatus::StepLimitExceeded,
            };
            break;
        }
    }
    Output {
        lines: m.lines,
        status,
        steps: m.steps,
    }
}

/// Evaluates one value block with the given variable bindings.
pub fn eval_value(
    ws: &Workspace,
    block: &BlockId,
    env: &BTreeMap<String, Value>,
) -> Result<Value, RuntimeError> {
    let mut m = Machine {
        ws,
        env: env.clone(),
        lines: Vec::new(),
        steps: 0,
        limit: DEFAULT_STEP_LIMIT,
    };
    m.eval(block).map_err(|stop| match stop {
        Stop::Error(e) => e,
        Stop::Limit => RuntimeError::TypeError("expression too deep".into()),
    })
}
