//! Navigation/Edit modes, the clipboard, the toolbox and its compatibility filter.

use std::fmt;

use crate::defs::{BlockKind, BlockSet};
use crate::navigation::CursorLocation;
use crate::tree::BlockTree;
use crate::workspace::{BlockId, ConnectionRef, ElementRef, Point, Workspace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Navigation,
    Edit,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Navigation => "navigation",
            Mode::Edit => "edit",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClipOrigin {
    Cut,
    Copy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clipboard {
    pub tree: BlockTree,
    pub origin: ClipOrigin,
    pub pastes: u32,
}

impl Clipboard {
    /// Only the first paste of a cut keeps the original ids.
    pub fn keeps_ids(&self) -> bool {
        self.origin == ClipOrigin::Cut && self.pastes == 0
    }
}

/// The open toolbox: visible categories (filtered), the selection and where to return.
#[derive(Clone, Debug, PartialEq)]
pub struct Toolbox {
    pub categories: Vec<(String, Vec<String>)>,
    pub saved_cursor: CursorLocation,
    /// Connection new blocks attach to, when opened in Edit mode on one.
    pub context: Option<ConnectionRef>,
    /// Position for blocks inserted as new stacks.
    pub anchor: Point,
}

impl Toolbox {
    pub fn entry(&self, category: usize, entry: usize) -> Option<&str> {
        self.categories
            .get(category)
            .and_then(|(_, e)| e.get(entry))
            .map(|s| s.as_str())
    }

    pub fn shown(&self) -> usize {
        self.categories.iter().map(|(_, e)| e.len()).sum()
    }

    pub fn contains(&self, def_id: &str) -> bool {
        self.categories
            .iter()
            .any(|(_, e)| e.iter().any(|d| d == def_id))
    }
}

/// The connection an insert or paste at `cursor` would attach to.
///
/// Only input elements and statement blocks have one; occupied value inputs still count,
/// and simply admit nothing.
pub fn connection_context(ws: &Workspace, cursor: &CursorLocation) -> Option<ConnectionRef> {
    match cursor {
        CursorLocation::Element(b, i) => match ws.children(b).get(*i)? {
            ElementRef::Field { .. } => None,
            e => e.connection(b),
        },
        CursorLocation::Block(b) if ws.kind_of(b) == Some(BlockKind::Statement) => {
            Some(ConnectionRef::Next(b.clone()))
        }
        _ => None,
    }
}

/// Definitions a fresh block of which could be attached at `context`, in toolbox order.
pub fn compatible_entries_at(ws: &Workspace, context: Option<&ConnectionRef>) -> Vec<String> {
    let set = ws.block_set();
    let order = set
        .categories()
        .iter()
        .flat_map(|c| c.entries.iter().cloned());
    let Some(conn) = context else {
        return order.collect();
    };
    let owner_def = ws.def_of(conn.owner());
    order
        .filter(|def_id| {
            let Some(def) = set.get(def_id) else {
                return false;
            };
            match conn {
                ConnectionRef::Next(_) | ConnectionRef::Previous(_) => {
                    owner_def.is_some_and(|o| o.kind == BlockKind::Statement)
                        && def.kind == BlockKind::Statement
                        && def.has_previous
                        && def.has_next
                }
                ConnectionRef::StatementSlot(_, name) => {
                    owner_def.is_some_and(|o| o.statement_input_spec(name).is_some())
                        && def.kind == BlockKind::Statement
                        && def.has_previous
                }
                ConnectionRef::ValueSlot(owner, name) => {
                    let Some(spec) = owner_def.and_then(|o| o.value_input_spec(name)) else {
                        return false;
                    };
                    let empty = ws
                        .block(owner)
                        .and_then(|b| b.value_slots.get(name))
                        .is_some_and(|s| s.is_none());
                    empty
                        && def.kind == BlockKind::Value
                        && def.output.is_some_and(|o| o.compatible(spec.accepts))
                }
            }
        })
        .collect()
}

/// Toolbox categories restricted to `entries`; categories left empty are dropped.
pub fn filtered_categories(set: &BlockSet, entries: &[String]) -> Vec<(String, Vec<String>)> {
    set.categories()
        .iter()
        .map(|c| {
            (
                c.name.clone(),
                c.entries
                    .iter()
                    .filter(|e| entries.contains(e))
                    .cloned()
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|(_, e)| !e.is_empty())
        .collect()
}

/// Spoken name of a connection, e.g. `times input of repeat 10 times`.
pub fn describe_connection(ws: &Workspace, conn: &ConnectionRef) -> String {
    let owner = crate::announce::phrase(ws, conn.owner());
    let def = ws.def_of(conn.owner());
    match conn {
        ConnectionRef::Next(_) | ConnectionRef::Previous(_) => format!("after {owner}"),
        ConnectionRef::ValueSlot(_, name) => {
            let label = def
                .and_then(|d| d.value_input_spec(name))
                .map_or(name.clone(), |s| s.label.clone());
            format!("{label} input of {owner}")
        }
        ConnectionRef::StatementSlot(_, name) => {
            let label = def
                .and_then(|d| d.statement_input_spec(name))
                .map_or(name.clone(), |s| s.label.clone());
            format!("{label} input of {owner}")
        }
    }
}

/// Where the cursor should go after `id` is removed, computed before removal.
pub fn cursor_after_removal(ws: &Workspace, id: &BlockId) -> CursorLocation {
    if let Some(p) = ws.predecessor(id) {
        return CursorLocation::Block(p.clone());
    }
    if let Some(n) = ws.successor(id) {
        return CursorLocation::Block(n.clone());
    }
    if let Some((owner, i)) = ws.slot_position(id) {
        return CursorLocation::Element(owner, i);
    }
    match ws.stack_of(id) {
        Some(s) if &s.top != id => CursorLocation::StackHead(s.label.clone()),
        Some(s) => CursorLocation::WorkspacePoint(s.position),
        None => CursorLocation::WorkspacePoint(Point::default()),
    }
}
