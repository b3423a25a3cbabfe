//! Screen-reader output: every engine event becomes exactly one [`Announcement`].
//!
//! All wording lives in [`Templates`]; hosts may replace entries to adjust phrasing.
//! Verbosity only ever adds text around the terse form, so terse text is always a
//! substring of standard text, and standard of verbose.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::defs::{format_number, BlockKind, FieldKind, FieldValue};
use crate::labeling::{BlockNumber, Label};
use crate::runtime::{Output, OutputStatus};
use crate::workspace::{BlockId, ElementRef, Point, Workspace, WorkspaceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Politeness {
    Polite,
    Assertive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Navigation,
    Mode,
    Edit,
    Error,
    Help,
    System,
}

impl Category {
    /// Errors, mode changes and edits interrupt; everything else waits its turn.
    pub fn politeness(self) -> Politeness {
        match self {
            Category::Error | Category::Mode | Category::Edit => Politeness::Assertive,
            Category::Navigation | Category::Help | Category::System => Politeness::Polite,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announcement {
    pub text: String,
    pub politeness: Politeness,
    pub category: Category,
}

impl Announcement {
    pub fn new(category: Category, text: impl Into<String>) -> Self {
        let text = text.into();
        debug_assert!(!text.is_empty());
        Announcement {
            text,
            politeness: category.politeness(),
            category,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    Terse,
    #[default]
    Standard,
    Verbose,
}

impl FromStr for Verbosity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "terse" => Ok(Verbosity::Terse),
            "standard" => Ok(Verbosity::Standard),
            "verbose" => Ok(Verbosity::Verbose),
            other => Err(format!("unknown verbosity {other}")),
        }
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

// ---------------------------------------------------------------------------
// Block phrases
// ---------------------------------------------------------------------------

fn field_text(ws: &Workspace, id: &BlockId, name: &str) -> String {
    ws.block(id)
        .and_then(|b| b.fields.get(name))
        .map(|v| v.to_string())
        .unwrap_or_default()
}

fn slot_text(ws: &Workspace, id: &BlockId, input: &str) -> String {
    match ws.block(id).and_then(|b| b.value_slots.get(input)).cloned().flatten() {
        Some(child) => inline(ws, &child),
        None => "empty".to_string(),
    }
}

fn operator_words(op: &str) -> &str {
    match op {
        "+" => "plus",
        "-" => "minus",
        "*" => "times",
        "/" => "divided by",
        "<" => "less than",
        "=" => "equals",
        ">" => "greater than",
        other => other,
    }
}

/// How a value block reads when nested inside another block's phrase.
fn inline(ws: &Workspace, id: &BlockId) -> String {
    let Some(block) = ws.block(id) else {
        return String::new();
    };
    match block.def_id.as_str() {
        "number" | "boolean" | "var_get" => block
            .fields
            .values()
            .next()
            .map(|v| v.to_string())
            .unwrap_or_default(),
        "text" => format!("'{}'", field_text(ws, id, "TEXT")),
        _ => phrase(ws, id),
    }
}

/// Short spoken form of a block: its type and primary content, e.g. `repeat 10 times`.
pub fn phrase(ws: &Workspace, id: &BlockId) -> String {
    let Some(block) = ws.block(id) else {
        return String::new();
    };
    let f = |name: &str| field_text(ws, id, name);
    let s = |name: &str| slot_text(ws, id, name);
    match block.def_id.as_str() {
        "print" => format!("print {}", s("VALUE")),
        "set_var" => format!("set {} to {}", f("VAR"), s("VALUE")),
        "repeat" => format!("repeat {} times", s("TIMES")),
        "if" => {
            let has_else = block
                .statement_slots
                .get("ELSE")
                .is_some_and(|b| b.is_some());
            if has_else {
                format!("if {} else", s("COND"))
            } else {
                format!("if {}", s("COND"))
            }
        }
        "var_get" => format!("variable {}", f("VAR")),
        "number" => format!("number {}", f("NUM")),
        "text" => format!("text '{}'", f("TEXT")),
        "boolean" => format!("boolean {}", f("BOOL")),
        "arithmetic" | "compare" => {
            format!("{} {} {}", s("A"), operator_words(&f("OP")), s("B"))
        }
        "logic" => {
            if f("OP") == "not" {
                format!("not {}", s("A"))
            } else {
                format!("{} {} {}", s("A"), f("OP"), s("B"))
            }
        }
        other => {
            let display = ws
                .block_set()
                .get(other)
                .map_or(other.to_string(), |d| d.display.clone());
            match block.fields.values().next() {
                Some(v) => format!("{display} {v}"),
                None => display,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Subjects
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct StackRef {
    pub label: Label,
    pub name: Option<String>,
}

impl StackRef {
    pub fn of(ws: &Workspace, label: &Label) -> StackRef {
        StackRef {
            label: label.clone(),
            name: ws.stack(label).and_then(|s| s.custom_name.clone()),
        }
    }
}

impl fmt::Display for StackRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(name) => write!(f, "Stack {}, \"{}\"", self.label, name),
            None => write!(f, "Stack {}", self.label),
        }
    }
}

/// Everything needed to describe one block at any verbosity.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInfo {
    pub stack: StackRef,
    pub number: BlockNumber,
    pub phrase: String,
    /// Blocks nested inside (inputs and bodies), not counting successors.
    pub nested: usize,
    pub has_comment: bool,
}

impl BlockInfo {
    pub fn of(ws: &Workspace, id: &BlockId) -> Option<BlockInfo> {
        let stack = ws.stack_of(id)?;
        Some(BlockInfo {
            stack: StackRef::of(ws, &stack.label),
            number: ws.numbering().get(id)?,
            phrase: phrase(ws, id),
            nested: ws.subtree(id).len().saturating_sub(1),
            has_comment: ws.block(id)?.comment.is_some(),
        })
    }

    /// `Stack A, block 2 of 5`
    pub fn location(&self) -> String {
        format!(
            "{}, block {} of {}",
            self.stack, self.number.number, self.number.total
        )
    }

    fn extras(&self) -> String {
        let mut out = String::new();
        if self.nested > 0 {
            out.push_str(&format!(", contains {}", plural(self.nested, "block")));
        }
        if self.has_comment {
            out.push_str(", has comment");
        }
        out
    }

    /// Location first: `Stack A, block 1 of 4, repeat 10 times`.
    pub fn describe(&self, v: Verbosity) -> String {
        match v {
            Verbosity::Terse => self.phrase.clone(),
            Verbosity::Standard => format!("{}, {}", self.location(), self.phrase),
            Verbosity::Verbose => {
                format!("{}, {}{}", self.location(), self.phrase, self.extras())
            }
        }
    }

    /// Event head first: `Deleted print 'hi', Stack A, block 2 of 3`.
    pub fn headed(&self, head: &str, v: Verbosity) -> String {
        match v {
            Verbosity::Terse => format!("{head}{}", self.phrase),
            Verbosity::Standard => format!("{head}{}, {}", self.phrase, self.location()),
            Verbosity::Verbose => format!(
                "{head}{}, {}{}",
                self.phrase,
                self.location(),
                self.extras()
            ),
        }
    }
}

/// Returns the described text of one child element of a block.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementInfo {
    pub owner_phrase: String,
    /// e.g. `times input: 10`, `do input, empty`, `value field: 3`
    pub text: String,
    /// Verbose-only detail, e.g. `accepts number`.
    pub detail: String,
}

impl ElementInfo {
    pub fn of(ws: &Workspace, owner: &BlockId, index: usize) -> Option<ElementInfo> {
        let def = ws.def_of(owner)?;
        let element = ws.children(owner).into_iter().nth(index)?;
        let (text, detail) = match &element {
            ElementRef::Field { name } => {
                let spec = def.field(name)?;
                let value = field_text(ws, owner, name);
                let detail = match &spec.kind {
                    FieldKind::Number { .. } => "number field".to_string(),
                    FieldKind::Text { .. } => "text field".to_string(),
                    FieldKind::Choice { options } => format!("choice of {}", options.join(", ")),
                };
                (format!("{} field: {}", spec.label, value), detail)
            }
            ElementRef::ValueInput { name, block } => {
                let spec = def.value_input_spec(name)?;
                let text = match block {
                    Some(b) => format!("{} input: {}", spec.label, inline(ws, b)),
                    None => format!("{} input, empty", spec.label),
                };
                (text, format!("accepts {}", spec.accepts))
            }
            ElementRef::StatementInput { name, first } => {
                let spec = def.statement_input_spec(name)?;
                match first {
                    Some(b) => {
                        let count = ws.sequence(b).len();
                        (
                            format!("{} input: {}", spec.label, phrase(ws, b)),
                            format!("holds {}", plural(count, "statement")),
                        )
                    }
                    None => (
                        format!("{} input, empty", spec.label),
                        "accepts statements".to_string(),
                    ),
                }
            }
        };
        Some(ElementInfo {
            owner_phrase: phrase(ws, owner),
            text,
            detail,
        })
    }

    pub fn describe(&self, v: Verbosity) -> String {
        match v {
            Verbosity::Terse => self.text.clone(),
            Verbosity::Standard => format!("{}, {}", self.owner_phrase, self.text),
            Verbosity::Verbose => {
                format!("{}, {}, {}", self.owner_phrase, self.text, self.detail)
            }
        }
    }

    pub fn headed(&self, head: &str, v: Verbosity) -> String {
        match v {
            Verbosity::Terse => format!("{head}{}", self.text),
            Verbosity::Standard => format!("{head}{}, in {}", self.text, self.owner_phrase),
            Verbosity::Verbose => format!(
                "{head}{}, in {}, {}",
                self.text, self.owner_phrase, self.detail
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StackInfo {
    pub stack: StackRef,
    pub blocks: usize,
    pub position: Point,
}

impl StackInfo {
    pub fn of(ws: &Workspace, label: &Label) -> Option<StackInfo> {
        let s = ws.stack(label)?;
        Some(StackInfo {
            stack: StackRef::of(ws, label),
            blocks: ws.numbering().blocks(label).map_or(0, |b| b.len()),
            position: s.position,
        })
    }

    pub fn describe(&self, v: Verbosity) -> String {
        match v {
            Verbosity::Terse => self.stack.to_string(),
            Verbosity::Standard => format!("{}, {}", self.stack, plural(self.blocks, "block")),
            Verbosity::Verbose => format!(
                "{}, {}, at {}, {}",
                self.stack,
                plural(self.blocks, "block"),
                self.position.x,
                self.position.y
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntryInfo {
    pub name: String,
    pub category: String,
    pub index: usize,
    pub count: usize,
    pub kind: String,
}

impl EntryInfo {
    pub fn describe(&self, v: Verbosity) -> String {
        let std = format!(
            "{}, {} category, {} of {}",
            self.name,
            self.category,
            self.index + 1,
            self.count
        );
        match v {
            Verbosity::Terse => self.name.clone(),
            Verbosity::Standard => std,
            Verbosity::Verbose => format!("{std}, {}", self.kind),
        }
    }
}

/// A cursor target, described.
#[derive(Clone, Debug, PartialEq)]
pub enum Landing {
    Point(Point),
    Stack(StackInfo),
    Block(BlockInfo),
    Element(ElementInfo),
    Entry(EntryInfo),
}

impl Landing {
    pub fn describe(&self, v: Verbosity) -> String {
        match self {
            Landing::Point(p) => format!("Workspace cursor at {}, {}", p.x, p.y),
            Landing::Stack(s) => s.describe(v),
            Landing::Block(b) => b.describe(v),
            Landing::Element(e) => e.describe(v),
            Landing::Entry(e) => e.describe(v),
        }
    }

    pub fn headed(&self, head: &str, v: Verbosity) -> String {
        match self {
            Landing::Block(b) => b.headed(head, v),
            Landing::Element(e) => e.headed(head, v),
            other => format!("{head}{}", other.describe(v)),
        }
    }
}

/// `describe_block` at a given verbosity; `None` when the block does not exist.
pub fn describe_block(ws: &Workspace, id: &BlockId, v: Verbosity) -> Option<String> {
    BlockInfo::of(ws, id).map(|i| i.describe(v))
}

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
    In,
    Out,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Up,
        Direction::Left,
        Direction::Down,
        Direction::Right,
        Direction::In,
        Direction::Out,
    ];

    fn relation(self) -> &'static str {
        match self {
            Direction::Up => "above",
            Direction::Down => "below",
            Direction::Left => "to the left of",
            Direction::Right => "to the right of",
            Direction::In => "inside",
            Direction::Out => "outside",
        }
    }
}

/// Why a move did not happen.
#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    TopOfStack(Label),
    EndOfStack(Label),
    StartOfInput { input: String, owner: String },
    EndOfInput { input: String, owner: String },
    FirstElement { owner: String },
    LastElement { owner: String },
    FirstStack,
    LastStack,
    EmptyConnection { element: String },
    /// Field entered outside Edit mode.
    ReadOnlyField { element: String },
    WorkspaceLevel,
    EmptyWorkspace,
    NoNeighbor { direction: Direction, subject: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZoomChange {
    In,
    Out,
    Reset,
    Maximum,
    Minimum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommentChange {
    Added(String),
    Hidden,
    Shown(String),
}

/// Something that happened in the engine. Rendering is total over this enum.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Moved(Landing),
    Boundary(Boundary),
    NoStack(char),
    EditMode(Landing),
    NavigationMode,
    Cut(BlockInfo),
    Copied(BlockInfo),
    Pasted(BlockInfo),
    Inserted(BlockInfo),
    Deleted(BlockInfo),
    Disconnected(BlockInfo),
    Comment { block: BlockInfo, change: CommentChange },
    StackCreated(StackRef),
    StackRetired(Label),
    StackRenamed(StackRef),
    ToolboxOpened { shown: usize, context: Option<String> },
    ToolboxClosed,
    FieldEditing { element: ElementInfo },
    FieldTyped { typed: char, buffer: String },
    FieldErased { buffer: String },
    FieldSet { element: ElementInfo },
    FieldCancelled { element: ElementInfo },
    Zoom { change: ZoomChange, percent: u32 },
    RunFinished(Output),
    OutputShown(Option<Output>),
    AssistantOn,
    AssistantOff,
    Preview(Vec<(String, String)>),
    ShortcutsShown(String),
    ShortcutsHidden,
    AccessibilityOn,
    AccessibilityOff,
    Located(String),
    Error { action: &'static str, error: EngineError },
}

/// Failures surfaced to the user; every one is announced, none aborts a session.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("keyboard accessibility is disabled")]
    AccessibilityDisabled,
    #[error("no block selected")]
    NoSelection,
    #[error("not in Edit mode")]
    NotInEditMode,
    #[error("clipboard is empty")]
    EmptyClipboard,
    #[error("block is already the top of its stack")]
    AlreadyDetached,
    #[error("nothing is attached here")]
    NothingAttached,
    #[error("no connection here")]
    NoConnection,
    #[error("no blocks fit {0}")]
    ToolboxEmptyForContext(String),
    #[error("toolbox is not open")]
    ToolboxNotOpen,
    #[error("toolbox is open; insert a block or close the toolbox first")]
    ToolboxOpen,
    #[error("a name is required")]
    MissingArgument,
    #[error("a field is being edited; Enter saves, Escape cancels")]
    FieldEditActive,
    #[error("no field is being edited")]
    NoFieldEdit,
    #[error("'{input}' is not a valid {field}")]
    BadFieldInput { field: String, input: String },
    #[error("{0}")]
    Workspace(#[from] WorkspaceError),
}

impl Event {
    pub fn category(&self) -> Category {
        match self {
            Event::Moved(_) | Event::Boundary(_) | Event::NoStack(_) | Event::Located(_) => {
                Category::Navigation
            }
            Event::ToolboxOpened { .. } | Event::ToolboxClosed => Category::Navigation,
            Event::EditMode(_)
            | Event::NavigationMode
            | Event::AccessibilityOn
            | Event::AccessibilityOff => Category::Mode,
            Event::Cut(_)
            | Event::Copied(_)
            | Event::Pasted(_)
            | Event::Inserted(_)
            | Event::Deleted(_)
            | Event::Disconnected(_)
            | Event::Comment { .. }
            | Event::StackCreated(_)
            | Event::StackRetired(_)
            | Event::StackRenamed(_)
            | Event::FieldSet { .. } => Category::Edit,
            Event::FieldEditing { .. }
            | Event::FieldTyped { .. }
            | Event::FieldErased { .. }
            | Event::FieldCancelled { .. } => Category::Navigation,
            Event::AssistantOn
            | Event::AssistantOff
            | Event::Preview(_)
            | Event::ShortcutsShown(_)
            | Event::ShortcutsHidden => Category::Help,
            Event::Zoom { .. } | Event::OutputShown(_) => Category::System,
            Event::RunFinished(out) => match out.status {
                OutputStatus::Ok => Category::System,
                _ => Category::Error,
            },
            Event::Error { .. } => Category::Error,
        }
    }
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

/// The wording table. Placeholders are written `{name}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Templates {
    table: BTreeMap<&'static str, String>,
}

const DEFAULT_TEMPLATES: &[(&str, &str)] = &[
    ("boundary.top_of_stack", "Top of stack {label}"),
    ("boundary.end_of_stack", "End of stack {label}"),
    ("boundary.start_of_input", "Start of {input} input of {owner}"),
    ("boundary.end_of_input", "End of {input} input of {owner}"),
    ("boundary.first_element", "First element of {owner}"),
    ("boundary.last_element", "Last element of {owner}"),
    ("boundary.first_stack", "First stack"),
    ("boundary.last_stack", "Last stack"),
    ("boundary.empty_connection", "Empty connection, {element}"),
    ("boundary.read_only_field", "{element}, read only in Navigation mode"),
    ("boundary.workspace_level", "Already at workspace level"),
    ("boundary.empty_workspace", "Workspace empty"),
    ("boundary.no_neighbor", "Nothing {relation} {subject}"),
    ("jump.no_stack", "No stack {letter}"),
    ("mode.edit", "Edit mode: "),
    ("mode.navigation", "Navigation mode"),
    ("edit.cut", "Cut "),
    ("edit.copied", "Copied "),
    ("edit.pasted", "Pasted "),
    ("edit.inserted", "Inserted "),
    ("edit.deleted", "Deleted "),
    ("edit.disconnected", "Disconnected "),
    ("comment.added", "Comment added: {text}"),
    ("comment.added_empty", "Comment added"),
    ("comment.hidden", "Comment hidden"),
    ("comment.shown", "Comment shown: {text}"),
    ("comment.on", ", on "),
    ("stack.created", "Created {stack}"),
    ("stack.retired", "Removed stack {label}"),
    ("stack.renamed", "Renamed {stack}"),
    ("toolbox.opened", "Toolbox open, {count}"),
    ("toolbox.opened_for", "Toolbox open, {count} for {context}"),
    ("toolbox.closed", "Toolbox closed"),
    ("field.editing", "Editing {element}"),
    ("field.editing_hint", ". Type a new value, Enter to save, Escape to cancel"),
    ("field.typed", "{char}"),
    ("field.buffer", ", now {buffer}"),
    ("field.erased", "Erased, now {buffer}"),
    ("field.erased_empty", "Erased, now empty"),
    ("field.set", "Set "),
    ("field.cancelled", "Cancelled, {element}"),
    ("zoom.level", "Zoom {percent}%"),
    ("zoom.reset", "Zoom reset {percent}%"),
    ("zoom.maximum", "Maximum zoom {percent}%"),
    ("zoom.minimum", "Minimum zoom {percent}%"),
    ("run.ok", "Program finished, {lines} of output"),
    ("run.error", "Program stopped: {reason}"),
    ("run.last_line", ", last line: {line}"),
    ("run.steps", ", {steps} steps"),
    ("output.none_yet", "No output yet; run the program first"),
    ("output.empty", "No output"),
    ("output.header", "Output, {lines}:\n"),
    ("output.stopped", "Stopped: {reason}"),
    ("output.status", "\nStatus: {status}, {steps} steps"),
    ("assistant.on", "Navigational assistant on"),
    ("assistant.off", "Navigational assistant off"),
    ("assistant.nothing", "No moves available"),
    ("shortcuts.hidden", "Shortcuts list closed"),
    ("accessibility.on", "Keyboard accessibility enabled"),
    ("accessibility.off", "Keyboard accessibility disabled"),
    ("error", "Cannot {action}: {reason}"),
];

impl Default for Templates {
    fn default() -> Self {
        Templates {
            table: DEFAULT_TEMPLATES
                .iter()
                .map(|(k, v)| (*k, v.to_string()))
                .collect(),
        }
    }
}

impl Templates {
    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.table.keys().copied()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.table.get(key).map(|s| s.as_str())
    }

    /// Replaces the wording for an existing key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, text: impl Into<String>) -> Result<(), String> {
        match self.table.get_mut(key) {
            Some(slot) => {
                *slot = text.into();
                Ok(())
            }
            None => Err(format!("unknown template {key}")),
        }
    }

    fn fill(&self, key: &str, args: &[(&str, &str)]) -> String {
        let mut text = self.table.get(key).cloned().unwrap_or_default();
        for (name, value) in args {
            text = text.replace(&format!("{{{name}}}"), value);
        }
        text
    }

    fn plain(&self, key: &str) -> String {
        self.fill(key, &[])
    }

    /// Renders one event as one announcement.
    pub fn render(&self, event: &Event, v: Verbosity) -> Announcement {
        let text = self.text(event, v);
        let text = if text.is_empty() {
            // Overrides may blank a template; never emit silence.
            format!("{:?}", event.category())
        } else {
            text
        };
        Announcement::new(event.category(), text)
    }

    fn text(&self, event: &Event, v: Verbosity) -> String {
        match event {
            Event::Moved(landing) => landing.describe(v),
            Event::Boundary(b) => self.boundary(b),
            Event::NoStack(letter) => self.fill("jump.no_stack", &[("letter", &letter.to_string())]),
            Event::EditMode(landing) => landing.headed(&self.plain("mode.edit"), v),
            Event::NavigationMode => self.plain("mode.navigation"),
            Event::Cut(b) => b.headed(&self.plain("edit.cut"), v),
            Event::Copied(b) => b.headed(&self.plain("edit.copied"), v),
            Event::Pasted(b) => b.headed(&self.plain("edit.pasted"), v),
            Event::Inserted(b) => b.headed(&self.plain("edit.inserted"), v),
            Event::Deleted(b) => b.headed(&self.plain("edit.deleted"), v),
            Event::Disconnected(b) => b.headed(&self.plain("edit.disconnected"), v),
            Event::Comment { block, change } => {
                let head = match change {
                    CommentChange::Added(t) if t.is_empty() => self.plain("comment.added_empty"),
                    CommentChange::Added(t) => self.fill("comment.added", &[("text", t)]),
                    CommentChange::Hidden => self.plain("comment.hidden"),
                    CommentChange::Shown(t) => self.fill("comment.shown", &[("text", t)]),
                };
                match v {
                    Verbosity::Terse => head,
                    _ => format!("{head}{}", block.headed(&self.plain("comment.on"), v)),
                }
            }
            Event::StackCreated(s) => self.fill("stack.created", &[("stack", &s.to_string())]),
            Event::StackRetired(l) => self.fill("stack.retired", &[("label", l.as_str())]),
            Event::StackRenamed(s) => self.fill("stack.renamed", &[("stack", &s.to_string())]),
            Event::ToolboxOpened { shown, context } => {
                let count = plural(*shown, "block");
                match context {
                    Some(c) => self.fill("toolbox.opened_for", &[("count", &count), ("context", c)]),
                    None => self.fill("toolbox.opened", &[("count", &count)]),
                }
            }
            Event::ToolboxClosed => self.plain("toolbox.closed"),
            Event::FieldEditing { element } => {
                let head = self.fill("field.editing", &[("element", &element.text)]);
                match v {
                    Verbosity::Terse => head,
                    _ => format!("{head}{}", self.plain("field.editing_hint")),
                }
            }
            Event::FieldTyped { typed, buffer } => {
                let spoken = match typed {
                    ' ' => "space".to_string(),
                    c => c.to_string(),
                };
                let head = self.fill("field.typed", &[("char", &spoken)]);
                match v {
                    Verbosity::Terse => head,
                    _ => format!("{head}{}", self.fill("field.buffer", &[("buffer", buffer)])),
                }
            }
            Event::FieldErased { buffer } if buffer.is_empty() => self.plain("field.erased_empty"),
            Event::FieldErased { buffer } => self.fill("field.erased", &[("buffer", buffer)]),
            Event::FieldSet { element } => element.headed(&self.plain("field.set"), v),
            Event::FieldCancelled { element } => {
                self.fill("field.cancelled", &[("element", &element.text)])
            }
            Event::Zoom { change, percent } => {
                let key = match change {
                    ZoomChange::In | ZoomChange::Out => "zoom.level",
                    ZoomChange::Reset => "zoom.reset",
                    ZoomChange::Maximum => "zoom.maximum",
                    ZoomChange::Minimum => "zoom.minimum",
                };
                self.fill(key, &[("percent", &percent.to_string())])
            }
            Event::RunFinished(out) => self.run_finished(out, v),
            Event::OutputShown(out) => self.output(out.as_ref(), v),
            Event::AssistantOn => self.plain("assistant.on"),
            Event::AssistantOff => self.plain("assistant.off"),
            Event::Preview(entries) if entries.is_empty() => self.plain("assistant.nothing"),
            Event::Preview(entries) => entries
                .iter()
                .map(|(key, landing)| format!("{key}: {landing}."))
                .collect::<Vec<_>>()
                .join(" "),
            Event::ShortcutsShown(listing) => listing.clone(),
            Event::ShortcutsHidden => self.plain("shortcuts.hidden"),
            Event::AccessibilityOn => self.plain("accessibility.on"),
            Event::AccessibilityOff => self.plain("accessibility.off"),
            Event::Located(text) => text.clone(),
            Event::Error { action, error } => self.fill(
                "error",
                &[("action", action), ("reason", &error.to_string())],
            ),
        }
    }

    fn boundary(&self, b: &Boundary) -> String {
        match b {
            Boundary::TopOfStack(l) => self.fill("boundary.top_of_stack", &[("label", l.as_str())]),
            Boundary::EndOfStack(l) => self.fill("boundary.end_of_stack", &[("label", l.as_str())]),
            Boundary::StartOfInput { input, owner } => self.fill(
                "boundary.start_of_input",
                &[("input", input), ("owner", owner)],
            ),
            Boundary::EndOfInput { input, owner } => self.fill(
                "boundary.end_of_input",
                &[("input", input), ("owner", owner)],
            ),
            Boundary::FirstElement { owner } => {
                self.fill("boundary.first_element", &[("owner", owner)])
            }
            Boundary::LastElement { owner } => {
                self.fill("boundary.last_element", &[("owner", owner)])
            }
            Boundary::FirstStack => self.plain("boundary.first_stack"),
            Boundary::LastStack => self.plain("boundary.last_stack"),
            Boundary::EmptyConnection { element } => {
                self.fill("boundary.empty_connection", &[("element", element)])
            }
            Boundary::ReadOnlyField { element } => {
                self.fill("boundary.read_only_field", &[("element", element)])
            }
            Boundary::WorkspaceLevel => self.plain("boundary.workspace_level"),
            Boundary::EmptyWorkspace => self.plain("boundary.empty_workspace"),
            Boundary::NoNeighbor { direction, subject } => self.fill(
                "boundary.no_neighbor",
                &[("relation", direction.relation()), ("subject", subject)],
            ),
        }
    }

    fn run_finished(&self, out: &Output, v: Verbosity) -> String {
        let mut text = match &out.status {
            OutputStatus::Ok => self.fill(
                "run.ok",
                &[("lines", &plural(out.lines.len(), "line"))],
            ),
            other => self.fill("run.error", &[("reason", &other.to_string())]),
        };
        if v >= Verbosity::Standard {
            if let Some(line) = out.lines.last() {
                text.push_str(&self.fill("run.last_line", &[("line", line)]));
            }
        }
        if v == Verbosity::Verbose {
            text.push_str(&self.fill("run.steps", &[("steps", &out.steps.to_string())]));
        }
        text
    }

    fn output(&self, out: Option<&Output>, v: Verbosity) -> String {
        let Some(out) = out else {
            return self.plain("output.none_yet");
        };
        let mut core = out.lines.join("\n");
        if let OutputStatus::Ok = out.status {
        } else {
            if !core.is_empty() {
                core.push('\n');
            }
            core.push_str(&self.fill("output.stopped", &[("reason", &out.status.to_string())]));
        }
        let mut text = if out.lines.is_empty() && matches!(out.status, OutputStatus::Ok) {
            self.plain("output.empty")
        } else if v >= Verbosity::Standard && !out.lines.is_empty() {
            format!(
                "{}{core}",
                self.fill("output.header", &[("lines", &plural(out.lines.len(), "line"))])
            )
        } else {
            core
        };
        if v == Verbosity::Verbose {
            let status = match out.status {
                OutputStatus::Ok => "ok",
                OutputStatus::Error(_) => "error",
                OutputStatus::StepLimitExceeded => "step limit exceeded",
            };
            text.push_str(&self.fill(
                "output.status",
                &[("status", status), ("steps", &out.steps.to_string())],
            ));
        }
        text
    }
}

/// Renders with the default wording.
pub fn render(event: &Event, v: Verbosity) -> Announcement {
    Templates::default().render(event, v)
}

/// Spoken form of a field value for announcements.
pub fn spoken_value(v: &FieldValue) -> String {
    match v {
        FieldValue::Number(n) => format_number(*n),
        FieldValue::Text(t) => t.clone(),
    }
}

/// Spoken kind of a block definition, e.g. `statement block` or `number value block`.
pub fn kind_phrase(ws: &Workspace, def_id: &str) -> String {
    match ws.block_set().get(def_id) {
        Some(d) if d.kind == BlockKind::Statement => "statement block".to_string(),
        Some(d) => format!("{} value block", d.output.map_or("any", |o| o.name())),
        None => "block".to_string(),
    }
}
