//! The engine facade: one command loop over navigation, editing, runtime and settings.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Value as Json};

use crate::announce::{
    Announcement, BlockInfo, Boundary, CommentChange, ElementInfo, EngineError, EntryInfo, Event,
    Landing, StackRef, Templates, Verbosity, ZoomChange, kind_phrase,
};
use crate::announce::Direction;
use crate::defs::BlockSet;
use crate::editing::{
    compatible_entries_at, connection_context, cursor_after_removal, describe_connection,
    filtered_categories, ClipOrigin, Clipboard, Mode, Toolbox,
};
use crate::format::{self, FormatError};
use crate::labeling::Label;
use crate::navigation::{self, CursorLocation, Step};
use crate::runtime::{self, Output, DEFAULT_STEP_LIMIT};
use crate::shortcuts::{shortcuts_help, CommandId, Dispatch, DispatchContext, KeyChord, Keymap};
use crate::workspace::{Comment, ConnectionRef, ElementRef, Point, Workspace, SPLIT_OFFSET};

pub const ZOOM_MIN: f64 = 0.25;
pub const ZOOM_MAX: f64 = 4.0;
pub const ZOOM_STEP: f64 = 1.2;

/// A field being typed into.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldEdit {
    pub block: crate::workspace::BlockId,
    pub index: usize,
    pub field: String,
    pub buffer: String,
}

/// Result of applying one chord.
#[derive(Clone, Debug, PartialEq)]
pub struct Applied {
    pub dispatch: Dispatch,
    pub announcements: Vec<Announcement>,
}

#[derive(Clone, Debug)]
pub struct Session {
    workspace: Workspace,
    cursor: CursorLocation,
    mode: Mode,
    clipboard: Option<Clipboard>,
    keymap: Keymap,
    toolbox: Option<Toolbox>,
    zoom: f64,
    verbosity: Verbosity,
    assistant_on: bool,
    shortcuts_open: bool,
    last_output: Option<Output>,
    field_edit: Option<FieldEdit>,
    templates: Templates,
    step_limit: u64,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(Workspace::standard())
    }
}

type CmdResult = Result<Vec<Event>, EngineError>;

impl Session {
    pub fn new(workspace: Workspace) -> Self {
        Session {
            workspace,
            cursor: CursorLocation::WorkspacePoint(Point::default()),
            mode: Mode::Navigation,
            clipboard: None,
            keymap: Keymap::default_keymap(),
            toolbox: None,
            zoom: 1.0,
            verbosity: Verbosity::Standard,
            assistant_on: false,
            shortcuts_open: false,
            last_output: None,
            field_edit: None,
            templates: Templates::default(),
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }

    /// Loads a workspace file with the standard block set.
    pub fn load(text: &str) -> Result<Session, FormatError> {
        Ok(Session::new(format::load(text)?))
    }

    pub fn load_with(text: &str, set: Arc<BlockSet>) -> Result<Session, FormatError> {
        Ok(Session::new(format::load_with(text, set)?))
    }

    pub fn save(&self) -> String {
        format::save(&self.workspace)
    }

    pub fn state_hash(&self) -> String {
        format::state_hash(&self.workspace)
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn cursor(&self) -> &CursorLocation {
        &self.cursor
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn clipboard(&self) -> Option<&Clipboard> {
        self.clipboard.as_ref()
    }

    pub fn keymap(&self) -> &Keymap {
        &self.keymap
    }

    pub fn set_keymap(&mut self, keymap: Keymap) {
        self.keymap = keymap;
    }

    pub fn toolbox(&self) -> Option<&Toolbox> {
        self.toolbox.as_ref()
    }

    pub fn zoom(&self) -> f64 {
        self.zoom
    }

    pub fn verbosity(&self) -> Verbosity {
        self.verbosity
    }

    pub fn set_verbosity(&mut self, v: Verbosity) {
        self.verbosity = v;
    }

    pub fn assistant_on(&self) -> bool {
        self.assistant_on
    }

    pub fn accessibility_on(&self) -> bool {
        self.keymap.enabled
    }

    pub fn last_output(&self) -> Option<&Output> {
        self.last_output.as_ref()
    }

    pub fn field_edit(&self) -> Option<&FieldEdit> {
        self.field_edit.as_ref()
    }

    pub fn templates_mut(&mut self) -> &mut Templates {
        &mut self.templates
    }

    pub fn set_step_limit(&mut self, limit: u64) {
        self.step_limit = limit;
    }

    /// Places the cursor directly; invalid locations are ignored.
    pub fn set_cursor(&mut self, at: CursorLocation) -> bool {
        if self.toolbox.is_none() && !matches!(at, CursorLocation::ToolboxEntry(..)) && at.is_valid(&self.workspace) {
            self.cursor = at;
            true
        } else {
            false
        }
    }

    pub fn dispatch_context(&self) -> DispatchContext {
        DispatchContext {
            field_editing: self.field_edit.is_some(),
            toolbox_open: self.toolbox.is_some(),
        }
    }

    /// Handles one chord: dispatch, run the command, render every resulting event.
    pub fn apply(&mut self, chord: &KeyChord, arg: Option<&str>) -> Applied {
        let dispatch = self.keymap.dispatch(chord, self.dispatch_context());
        let announcements = match dispatch {
            Dispatch::Command(cmd) => self.execute(cmd, arg),
            Dispatch::PassThrough => Vec::new(),
        };
        Applied {
            dispatch,
            announcements,
        }
    }

    /// Runs a command as if its chord had been pressed.
    pub fn execute(&mut self, cmd: CommandId, arg: Option<&str>) -> Vec<Announcement> {
        let labels_before = self.labels();
        let cursor_before = self.cursor.clone();
        let mut events = match self.run_command(cmd, arg) {
            Ok(events) => events,
            Err(error) => vec![Event::Error {
                action: action_name(cmd),
                error,
            }],
        };
        let labels_after = self.labels();
        for l in labels_before.difference(&labels_after) {
            events.push(Event::StackRetired(l.clone()));
        }
        for l in labels_after.difference(&labels_before) {
            events.push(Event::StackCreated(StackRef::of(&self.workspace, l)));
        }
        if self.assistant_on && cmd != CommandId::ToggleAssistant && self.cursor != cursor_before {
            events.push(self.preview());
        }
        debug_assert!(self.cursor_is_valid(), "cursor {:?} invalid", self.cursor);
        events
            .iter()
            .map(|e| self.templates.render(e, self.verbosity))
            .collect()
    }

    fn labels(&self) -> BTreeSet<Label> {
        self.workspace.stacks().iter().map(|s| s.label.clone()).collect()
    }

    fn cursor_is_valid(&self) -> bool {
        match (&self.cursor, &self.toolbox) {
            (CursorLocation::ToolboxEntry(c, e), Some(t)) => t.entry(*c, *e).is_some(),
            (CursorLocation::ToolboxEntry(..), None) => false,
            (other, _) => other.is_valid(&self.workspace),
        }
    }

    fn preview(&self) -> Event {
        if self.toolbox.is_some() {
            return Event::Preview(Vec::new());
        }
        Event::Preview(navigation::assistant_preview(
            &self.workspace,
            &self.cursor,
            &self.keymap,
        ))
    }

    fn landing(&self, at: &CursorLocation) -> Option<Landing> {
        match at {
            CursorLocation::ToolboxEntry(c, e) => {
                let tb = self.toolbox.as_ref()?;
                let (cat, entries) = tb.categories.get(*c)?;
                let def_id = entries.get(*e)?;
                let def = self.workspace.block_set().get(def_id)?;
                Some(Landing::Entry(EntryInfo {
                    name: def.display.clone(),
                    category: cat.clone(),
                    index: *e,
                    count: entries.len(),
                    kind: kind_phrase(&self.workspace, def_id),
                }))
            }
            other => navigation::landing(&self.workspace, other),
        }
    }

    fn moved_to(&mut self, to: CursorLocation) -> CmdResult {
        self.cursor = to;
        let landing = self.landing(&self.cursor).ok_or(EngineError::NoSelection)?;
        Ok(vec![Event::Moved(landing)])
    }

    fn run_command(&mut self, cmd: CommandId, arg: Option<&str>) -> CmdResult {
        use CommandId::*;
        if !self.keymap.enabled && cmd != ToggleAccessibility {
            return Err(EngineError::AccessibilityDisabled);
        }
        let field_cmd = matches!(cmd, FieldInput(_) | FieldBackspace | FieldCommit | FieldCancel);
        if self.field_edit.is_some() && !field_cmd && cmd != ToggleAccessibility {
            return Err(EngineError::FieldEditActive);
        }
        if self.field_edit.is_none() && field_cmd {
            return Err(EngineError::NoFieldEdit);
        }
        if self.toolbox.is_some() {
            let allowed = matches!(
                cmd,
                MoveUp | MoveDown | MoveLeft | MoveRight | MoveIn | MoveOut
                    | Confirm | CloseToolbox | Locate | ToggleShortcuts | ToggleAccessibility
                    | ToggleAssistant | ZoomIn | ZoomOut | ZoomReset
            );
            if !allowed {
                return Err(EngineError::ToolboxOpen);
            }
        }
        match cmd {
            MoveUp => self.move_dir(Direction::Up),
            MoveDown => self.move_dir(Direction::Down),
            MoveLeft => self.move_dir(Direction::Left),
            MoveRight => self.move_dir(Direction::Right),
            MoveIn => self.move_dir(Direction::In),
            MoveOut => self.move_dir(Direction::Out),
            JumpToStack(c) => match navigation::jump_target(&self.workspace, c) {
                Some(top) => self.moved_to(CursorLocation::Block(top)),
                None => Ok(vec![Event::NoStack(c)]),
            },
            ToggleEditMode => self.toggle_mode(),
            CursorUp => self.move_point(Direction::Up),
            CursorDown => self.move_point(Direction::Down),
            CursorLeft => self.move_point(Direction::Left),
            CursorRight => self.move_point(Direction::Right),
            OpenToolbox => self.open_toolbox(),
            CloseToolbox => self.close_toolbox(),
            Confirm => self.confirm(),
            Locate => Ok(vec![Event::Located(self.locate_text())]),
            Cut => self.cut(),
            Copy => self.copy(),
            Paste => self.paste(),
            Delete => self.delete(),
            ToggleComment => self.toggle_comment(arg),
            Disconnect => self.disconnect(),
            ToggleAssistant => {
                self.assistant_on = !self.assistant_on;
                if self.assistant_on {
                    Ok(vec![Event::AssistantOn, self.preview()])
                } else {
                    Ok(vec![Event::AssistantOff])
                }
            }
            ToggleShortcuts => {
                self.shortcuts_open = !self.shortcuts_open;
                if self.shortcuts_open {
                    Ok(vec![Event::ShortcutsShown(shortcuts_help(&self.keymap))])
                } else {
                    Ok(vec![Event::ShortcutsHidden])
                }
            }
            RenameStack => self.rename_stack(arg),
            Run => {
                let out = runtime::run(&self.workspace, self.step_limit);
                self.last_output = Some(out.clone());
                Ok(vec![Event::RunFinished(out)])
            }
            ShowOutput => Ok(vec![Event::OutputShown(self.last_output.clone())]),
            ToggleAccessibility => {
                self.keymap.enabled = !self.keymap.enabled;
                if self.keymap.enabled {
                    Ok(vec![Event::AccessibilityOn])
                } else {
                    Ok(vec![Event::AccessibilityOff])
                }
            }
            ZoomIn => Ok(vec![self.zoom_by(ZoomChange::In)]),
            ZoomOut => Ok(vec![self.zoom_by(ZoomChange::Out)]),
            ZoomReset => Ok(vec![self.zoom_by(ZoomChange::Reset)]),
            FieldInput(c) => {
                let edit = self.field_edit.as_mut().expect("checked");
                edit.buffer.push(c);
                Ok(vec![Event::FieldTyped {
                    typed: c,
                    buffer: edit.buffer.clone(),
                }])
            }
            FieldBackspace => {
                let edit = self.field_edit.as_mut().expect("checked");
                edit.buffer.pop();
                Ok(vec![Event::FieldErased {
                    buffer: edit.buffer.clone(),
                }])
            }
            FieldCommit => self.commit_field(),
            FieldCancel => {
                let edit = self.field_edit.take().expect("checked");
                let element = ElementInfo::of(&self.workspace, &edit.block, edit.index)
                    .ok_or(EngineError::NoSelection)?;
                Ok(vec![Event::FieldCancelled { element }])
            }
        }
    }

    // -- navigation ----------------------------------------------------------

    fn move_dir(&mut self, dir: Direction) -> CmdResult {
        if let Some(tb) = &self.toolbox {
            return self.move_in_toolbox(tb.clone(), dir);
        }
        match navigation::step(&self.workspace, &self.cursor, dir) {
            Step::Moved(to) => self.moved_to(to),
            Step::Blocked(b) => Ok(vec![Event::Boundary(b)]),
            Step::Field { block, index } => {
                let element = ElementInfo::of(&self.workspace, &block, index)
                    .ok_or(EngineError::NoSelection)?;
                if self.mode != Mode::Edit {
                    return Ok(vec![Event::Boundary(Boundary::ReadOnlyField {
                        element: element.text,
                    })]);
                }
                let field = match self.workspace.children(&block).get(index) {
                    Some(ElementRef::Field { name }) => name.clone(),
                    _ => return Err(EngineError::NoSelection),
                };
                self.field_edit = Some(FieldEdit {
                    block,
                    index,
                    field,
                    buffer: String::new(),
                });
                Ok(vec![Event::FieldEditing { element }])
            }
        }
    }

    fn move_in_toolbox(&mut self, tb: Toolbox, dir: Direction) -> CmdResult {
        let CursorLocation::ToolboxEntry(c, e) = self.cursor else {
            return Err(EngineError::ToolboxNotOpen);
        };
        let entries = tb.categories[c].1.len();
        let target = match dir {
            Direction::Up if e > 0 => Some((c, e - 1)),
            Direction::Down if e + 1 < entries => Some((c, e + 1)),
            Direction::Left if c > 0 => Some((c - 1, 0)),
            Direction::Right if c + 1 < tb.categories.len() => Some((c + 1, 0)),
            _ => None,
        };
        match target {
            Some((c, e)) => self.moved_to(CursorLocation::ToolboxEntry(c, e)),
            None => {
                let subject = match dir {
                    Direction::Left | Direction::Right => format!("{} category", tb.categories[c].0),
                    _ => tb
                        .entry(c, e)
                        .and_then(|d| self.workspace.block_set().get(d))
                        .map_or_else(String::new, |d| d.display.clone()),
                };
                Ok(vec![Event::Boundary(Boundary::NoNeighbor {
                    direction: dir,
                    subject,
                })])
            }
        }
    }

    fn move_point(&mut self, dir: Direction) -> CmdResult {
        let p = navigation::move_workspace_cursor(&self.workspace, &self.cursor, dir);
        self.moved_to(CursorLocation::WorkspacePoint(p))
    }

    fn locate_text(&self) -> String {
        if let (CursorLocation::ToolboxEntry(..), Some(l)) = (&self.cursor, self.landing(&self.cursor)) {
            return format!("Toolbox, {}, {} mode", l.describe(Verbosity::Standard), self.mode);
        }
        let toolbox_key = self
            .keymap
            .chord_for(CommandId::OpenToolbox)
            .map_or_else(|| "the toolbox key".to_string(), |c| c.to_string());
        navigation::locate(
            &self.workspace,
            &self.cursor,
            &self.mode.to_string(),
            &toolbox_key,
        )
    }

    // -- modes and toolbox ---------------------------------------------------

    fn toggle_mode(&mut self) -> CmdResult {
        match self.mode {
            Mode::Edit => {
                self.mode = Mode::Navigation;
                Ok(vec![Event::NavigationMode])
            }
            Mode::Navigation => {
                if self.cursor.block().is_none() {
                    return Err(EngineError::NoSelection);
                }
                self.mode = Mode::Edit;
                let landing = self.landing(&self.cursor).ok_or(EngineError::NoSelection)?;
                Ok(vec![Event::EditMode(landing)])
            }
        }
    }

    fn open_toolbox(&mut self) -> CmdResult {
        let context = match self.mode {
            Mode::Edit => connection_context(&self.workspace, &self.cursor),
            Mode::Navigation => None,
        };
        let entries = compatible_entries_at(&self.workspace, context.as_ref());
        if entries.is_empty() {
            let what = context
                .as_ref()
                .map_or_else(|| "here".to_string(), |c| describe_connection(&self.workspace, c));
            return Err(EngineError::ToolboxEmptyForContext(what));
        }
        let anchor = match &self.cursor {
            CursorLocation::WorkspacePoint(p) => *p,
            other => navigation::cursor_seed(&self.workspace, other).offset(SPLIT_OFFSET),
        };
        let tb = Toolbox {
            categories: filtered_categories(self.workspace.block_set(), &entries),
            saved_cursor: self.cursor.clone(),
            context: context.clone(),
            anchor,
        };
        let shown = tb.shown();
        self.toolbox = Some(tb);
        let opened = Event::ToolboxOpened {
            shown,
            context: context.map(|c| describe_connection(&self.workspace, &c)),
        };
        let mut events = vec![opened];
        events.extend(self.moved_to(CursorLocation::ToolboxEntry(0, 0))?);
        Ok(events)
    }

    fn close_toolbox(&mut self) -> CmdResult {
        let tb = self.toolbox.take().ok_or(EngineError::ToolboxNotOpen)?;
        self.cursor = tb.saved_cursor;
        Ok(vec![Event::ToolboxClosed])
    }

    fn confirm(&mut self) -> CmdResult {
        let tb = self.toolbox.clone().ok_or(EngineError::ToolboxNotOpen)?;
        let CursorLocation::ToolboxEntry(c, e) = self.cursor else {
            return Err(EngineError::ToolboxNotOpen);
        };
        let def_id = tb.entry(c, e).ok_or(EngineError::ToolboxNotOpen)?.to_string();
        self.insert(&def_id)
    }

    /// Inserts a new block of `def_id` from the open toolbox.
    pub fn insert(&mut self, def_id: &str) -> CmdResult {
        let tb = self.toolbox.clone().ok_or(EngineError::ToolboxNotOpen)?;
        if !tb.contains(def_id) {
            return Err(crate::workspace::WorkspaceError::UnknownDefinition(def_id.to_string()).into());
        }
        if self.mode == Mode::Navigation && !matches!(tb.saved_cursor, CursorLocation::WorkspacePoint(_)) {
            return Err(EngineError::NotInEditMode);
        }
        let backup = self.workspace.clone();
        let id = self
            .workspace
            .new_block_at(def_id, Default::default(), tb.anchor)?;
        if let Some(conn) = &tb.context {
            if let Err(e) = self.workspace.connect(conn, &id) {
                self.workspace = backup;
                return Err(e.into());
            }
        }
        self.toolbox = None;
        self.cursor = CursorLocation::Block(id.clone());
        let info = BlockInfo::of(&self.workspace, &id).ok_or(EngineError::NoSelection)?;
        Ok(vec![Event::Inserted(info)])
    }

    // -- editing -------------------------------------------------------------

    fn selected_block(&self) -> Result<crate::workspace::BlockId, EngineError> {
        match &self.cursor {
            CursorLocation::Block(b) => Ok(b.clone()),
            _ => Err(EngineError::NoSelection),
        }
    }

    fn require_edit(&self) -> Result<(), EngineError> {
        if self.mode == Mode::Edit {
            Ok(())
        } else {
            Err(EngineError::NotInEditMode)
        }
    }

    fn cut(&mut self) -> CmdResult {
        let id = self.selected_block()?;
        let info = BlockInfo::of(&self.workspace, &id).ok_or(EngineError::NoSelection)?;
        let tree = self.workspace.to_tree(&id, false).ok_or(EngineError::NoSelection)?;
        let after = cursor_after_removal(&self.workspace, &id);
        self.workspace.remove_block(&id)?;
        self.clipboard = Some(Clipboard {
            tree,
            origin: ClipOrigin::Cut,
            pastes: 0,
        });
        self.cursor = after;
        Ok(vec![Event::Cut(info)])
    }

    fn copy(&mut self) -> CmdResult {
        let id = self.selected_block()?;
        let info = BlockInfo::of(&self.workspace, &id).ok_or(EngineError::NoSelection)?;
        let tree = self.workspace.to_tree(&id, false).ok_or(EngineError::NoSelection)?;
        self.clipboard = Some(Clipboard {
            tree,
            origin: ClipOrigin::Copy,
            pastes: 0,
        });
        Ok(vec![Event::Copied(info)])
    }

    fn paste(&mut self) -> CmdResult {
        self.require_edit()?;
        let clip = self.clipboard.clone().ok_or(EngineError::EmptyClipboard)?;
        let (target, at): (Option<ConnectionRef>, Point) = match &self.cursor {
            CursorLocation::WorkspacePoint(p) => (None, *p),
            CursorLocation::Block(b) => (
                Some(ConnectionRef::Next(b.clone())),
                navigation::cursor_seed(&self.workspace, &self.cursor),
            ),
            CursorLocation::Element(..) => {
                let conn = connection_context(&self.workspace, &self.cursor)
                    .ok_or(EngineError::NoConnection)?;
                (Some(conn), navigation::cursor_seed(&self.workspace, &self.cursor))
            }
            _ => return Err(EngineError::NoSelection),
        };
        let backup = self.workspace.clone();
        let root = self.workspace.instantiate(&clip.tree, at, !clip.keeps_ids())?;
        if let Some(conn) = &target {
            if let Err(e) = self.workspace.connect(conn, &root) {
                self.workspace = backup;
                return Err(e.into());
            }
        }
        if let Some(c) = self.clipboard.as_mut() {
            c.pastes += 1;
        }
        self.cursor = CursorLocation::Block(root.clone());
        let info = BlockInfo::of(&self.workspace, &root).ok_or(EngineError::NoSelection)?;
        Ok(vec![Event::Pasted(info)])
    }

    fn delete(&mut self) -> CmdResult {
        let id = self.selected_block()?;
        let info = BlockInfo::of(&self.workspace, &id).ok_or(EngineError::NoSelection)?;
        let after = cursor_after_removal(&self.workspace, &id);
        self.workspace.remove_block(&id)?;
        self.cursor = after;
        Ok(vec![Event::Deleted(info)])
    }

    fn toggle_comment(&mut self, text: Option<&str>) -> CmdResult {
        self.require_edit()?;
        let id = self.selected_block()?;
        let current = self.workspace.block(&id).and_then(|b| b.comment.clone());
        let (comment, change) = match current {
            None => {
                let t = text.unwrap_or("").to_string();
                (
                    Comment {
                        text: t.clone(),
                        visible: true,
                    },
                    CommentChange::Added(t),
                )
            }
            Some(c) if c.visible => (
                Comment {
                    visible: false,
                    ..c
                },
                CommentChange::Hidden,
            ),
            Some(c) => (
                Comment {
                    visible: true,
                    ..c.clone()
                },
                CommentChange::Shown(c.text),
            ),
        };
        self.workspace.set_comment(&id, Some(comment))?;
        let block = BlockInfo::of(&self.workspace, &id).ok_or(EngineError::NoSelection)?;
        Ok(vec![Event::Comment { block, change }])
    }

    fn disconnect(&mut self) -> CmdResult {
        self.require_edit()?;
        let id = match &self.cursor {
            CursorLocation::Block(b) => {
                if self.workspace.parent(b).is_none() {
                    return Err(EngineError::AlreadyDetached);
                }
                b.clone()
            }
            CursorLocation::Element(b, i) => self
                .workspace
                .children(b)
                .get(*i)
                .and_then(|e| e.attached().cloned())
                .ok_or(EngineError::NothingAttached)?,
            _ => return Err(EngineError::NoSelection),
        };
        self.workspace.detach(&id, false)?;
        self.cursor = CursorLocation::Block(id.clone());
        let info = BlockInfo::of(&self.workspace, &id).ok_or(EngineError::NoSelection)?;
        Ok(vec![Event::Disconnected(info)])
    }

    fn rename_stack(&mut self, name: Option<&str>) -> CmdResult {
        let label = navigation::stack_at(&self.workspace, &self.cursor).ok_or(EngineError::NoSelection)?;
        let name = name.ok_or(EngineError::MissingArgument)?;
        self.workspace.set_custom_name(&label, name)?;
        Ok(vec![Event::StackRenamed(StackRef::of(&self.workspace, &label))])
    }

    fn commit_field(&mut self) -> CmdResult {
        let edit = self.field_edit.clone().expect("checked");
        let spec = self
            .workspace
            .def_of(&edit.block)
            .and_then(|d| d.field(&edit.field))
            .cloned()
            .ok_or(EngineError::NoSelection)?;
        let Some(value) = spec.parse_input(&edit.buffer) else {
            return Err(EngineError::BadFieldInput {
                field: match &spec.kind {
                    crate::defs::FieldKind::Choice { options } => {
                        format!("{}; expected one of {}", spec.label, options.join(", "))
                    }
                    _ => "number".to_string(),
                },
                input: edit.buffer,
            });
        };
        self.workspace.set_field(&edit.block, &edit.field, value)?;
        self.field_edit = None;
        let element = ElementInfo::of(&self.workspace, &edit.block, edit.index)
            .ok_or(EngineError::NoSelection)?;
        Ok(vec![Event::FieldSet { element }])
    }

    // -- settings ------------------------------------------------------------

    fn zoom_by(&mut self, change: ZoomChange) -> Event {
        let (zoom, change) = match change {
            ZoomChange::In => {
                let z = (self.zoom * ZOOM_STEP).min(ZOOM_MAX);
                (z, if z >= ZOOM_MAX { ZoomChange::Maximum } else { ZoomChange::In })
            }
            ZoomChange::Out => {
                let z = (self.zoom / ZOOM_STEP).max(ZOOM_MIN);
                (z, if z <= ZOOM_MIN { ZoomChange::Minimum } else { ZoomChange::Out })
            }
            other => (1.0, other),
        };
        self.zoom = zoom;
        Event::Zoom {
            change,
            percent: (zoom * 100.0).round() as u32,
        }
    }

    // -- host interface ------------------------------------------------------

    /// A JSON snapshot of everything a visual host needs to draw the session.
    pub fn render_model(&self) -> Json {
        let ws = &self.workspace;
        let stacks: Vec<Json> = ws
            .stacks()
            .iter()
            .map(|s| {
                json!({
                    "label": s.label.as_str(),
                    "custom_name": s.custom_name,
                    "x": s.position.x,
                    "y": s.position.y,
                    "aria_label": StackRef::of(ws, &s.label).to_string(),
                    "block": self.render_block(&s.top),
                })
            })
            .collect();
        let cursor = match &self.cursor {
            CursorLocation::WorkspacePoint(p) => json!({"kind": "point", "x": p.x, "y": p.y}),
            CursorLocation::StackHead(l) => json!({"kind": "stack", "label": l.as_str()}),
            CursorLocation::Block(b) => json!({"kind": "block", "block": b.as_str()}),
            CursorLocation::Element(b, i) => json!({"kind": "element", "block": b.as_str(), "index": i}),
            CursorLocation::ToolboxEntry(c, e) => json!({"kind": "toolbox", "category": c, "entry": e}),
        };
        let toolbox = self.toolbox.as_ref().map(|t| {
            json!({
                "categories": t.categories.iter().map(|(name, entries)| json!({
                    "name": name,
                    "entries": entries,
                })).collect::<Vec<_>>(),
            })
        });
        json!({
            "stacks": stacks,
            "cursor": cursor,
            "mode": self.mode.to_string(),
            "zoom": self.zoom,
            "verbosity": format!("{:?}", self.verbosity).to_lowercase(),
            "assistant_on": self.assistant_on,
            "accessibility_on": self.keymap.enabled,
            "shortcuts_open": self.shortcuts_open,
            "toolbox": toolbox,
            "field_edit": self.field_edit.as_ref().map(|f| json!({
                "block": f.block.as_str(),
                "field": f.field,
                "buffer": f.buffer,
            })),
        })
    }

    fn render_block(&self, id: &crate::workspace::BlockId) -> Json {
        let ws = &self.workspace;
        let Some(block) = ws.block(id) else {
            return Json::Null;
        };
        let children: Vec<Json> = ws
            .children(id)
            .iter()
            .enumerate()
            .map(|(i, el)| {
                let focused = self.cursor == CursorLocation::Element(id.clone(), i);
                let label = ElementInfo::of(ws, id, i).map(|e| e.text).unwrap_or_default();
                match el {
                    ElementRef::Field { name } => json!({
                        "kind": "field",
                        "name": name,
                        "value": block.fields.get(name).map(|v| v.to_string()),
                        "aria_label": label,
                        "focused": focused,
                    }),
                    ElementRef::ValueInput { name, block: child } => json!({
                        "kind": "value",
                        "name": name,
                        "aria_label": label,
                        "focused": focused,
                        "block": child.as_ref().map(|c| self.render_block(c)),
                    }),
                    ElementRef::StatementInput { name, first } => json!({
                        "kind": "statement",
                        "name": name,
                        "aria_label": label,
                        "focused": focused,
                        "block": first.as_ref().map(|c| self.render_block(c)),
                    }),
                }
            })
            .collect();
        let number = ws.numbering().get(id).map(|n| n.number);
        json!({
            "id": id.as_str(),
            "type": block.def_id,
            "number": number,
            "aria_label": crate::announce::describe_block(ws, id, Verbosity::Standard),
            "focused": self.cursor == CursorLocation::Block(id.clone()),
            "children": children,
            "comment": block.comment.as_ref().map(|c| json!({"text": c.text, "visible": c.visible})),
            "next": block.next.as_ref().map(|n| self.render_block(n)),
        })
    }
}

/// Verb used in "Cannot <action>" announcements.
fn action_name(cmd: CommandId) -> &'static str {
    use CommandId::*;
    match cmd {
        MoveUp | MoveDown | MoveLeft | MoveRight | MoveIn | MoveOut | JumpToStack(_) => "move",
        CursorUp | CursorDown | CursorLeft | CursorRight => "move workspace cursor",
        ToggleEditMode => "enter Edit mode",
        OpenToolbox => "open toolbox",
        CloseToolbox => "close toolbox",
        Confirm => "insert",
        Locate => "locate",
        Cut => "cut",
        Copy => "copy",
        Paste => "paste",
        Delete => "delete",
        ToggleComment => "comment",
        Disconnect => "disconnect",
        ToggleAssistant => "toggle assistant",
        ToggleShortcuts => "show shortcuts",
        RenameStack => "name stack",
        Run => "run",
        ShowOutput => "read output",
        ToggleAccessibility => "toggle accessibility",
        ZoomIn | ZoomOut | ZoomReset => "zoom",
        FieldInput(_) | FieldBackspace => "type",
        FieldCommit => "save field",
        FieldCancel => "cancel field edit",
    }
}
