//! The 3D cursor model: vertical siblings, horizontal elements and nesting in/out,
//! over workspace, stack, block and element layers.

use std::collections::{BTreeSet, VecDeque};

use crate::announce::{phrase, Boundary, Direction, ElementInfo, Landing, StackInfo, StackRef};
use crate::announce::BlockInfo;
use crate::defs::BlockKind;
use crate::labeling::Label;
use crate::shortcuts::{CommandId, Keymap};
use crate::workspace::{BlockId, ConnectionRef, ElementRef, Point, Workspace};

/// Units moved per workspace-cursor key press.
pub const CURSOR_STEP: i64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CursorLocation {
    WorkspacePoint(Point),
    StackHead(Label),
    Block(BlockId),
    /// Child `index` of `children(block)`.
    Element(BlockId, usize),
    /// Category and entry index within the open toolbox.
    ToolboxEntry(usize, usize),
}

impl CursorLocation {
    /// The block the cursor is on or inside, if any.
    pub fn block(&self) -> Option<&BlockId> {
        match self {
            CursorLocation::Block(b) | CursorLocation::Element(b, _) => Some(b),
            _ => None,
        }
    }

    /// True when the location refers to something that exists in `ws`.
    pub fn is_valid(&self, ws: &Workspace) -> bool {
        match self {
            CursorLocation::WorkspacePoint(_) => true,
            CursorLocation::StackHead(l) => ws.stack(l).is_some(),
            CursorLocation::Block(b) => ws.contains(b),
            CursorLocation::Element(b, i) => ws.contains(b) && *i < ws.children(b).len(),
            CursorLocation::ToolboxEntry(..) => true,
        }
    }
}

/// What a single move does.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Moved(CursorLocation),
    /// In on a field: enter field editing (Edit mode) or report it read only.
    Field { block: BlockId, index: usize },
    Blocked(Boundary),
}

fn no_neighbor(direction: Direction, subject: String) -> Step {
    Step::Blocked(Boundary::NoNeighbor { direction, subject })
}

fn input_label(ws: &Workspace, owner: &BlockId, index: usize) -> String {
    let Some(def) = ws.def_of(owner) else {
        return String::new();
    };
    match ws.children(owner).get(index) {
        Some(ElementRef::Field { name }) => def.field(name).map(|f| f.label.clone()),
        Some(ElementRef::ValueInput { name, .. }) => {
            def.value_input_spec(name).map(|s| s.label.clone())
        }
        Some(ElementRef::StatementInput { name, .. }) => {
            def.statement_input_spec(name).map(|s| s.label.clone())
        }
        None => None,
    }
    .unwrap_or_default()
}

fn element_text(ws: &Workspace, owner: &BlockId, index: usize) -> String {
    ElementInfo::of(ws, owner, index)
        .map(|e| e.text)
        .unwrap_or_default()
}

/// Applies one move to `from`. Pure: the workspace is never touched.
pub fn step(ws: &Workspace, from: &CursorLocation, dir: Direction) -> Step {
    use CursorLocation as C;
    use Direction as D;
    match from {
        C::WorkspacePoint(_) => match dir {
            D::In => match ws.stacks().first() {
                Some(s) => Step::Moved(C::StackHead(s.label.clone())),
                None => Step::Blocked(Boundary::EmptyWorkspace),
            },
            D::Out => Step::Blocked(Boundary::WorkspaceLevel),
            d => no_neighbor(d, "workspace cursor".into()),
        },
        C::StackHead(label) => {
            let stacks = ws.stacks();
            let Some(i) = stacks.iter().position(|s| &s.label == label) else {
                return Step::Blocked(Boundary::WorkspaceLevel);
            };
            match dir {
                D::Down => match stacks.get(i + 1) {
                    Some(s) => Step::Moved(C::StackHead(s.label.clone())),
                    None => Step::Blocked(Boundary::LastStack),
                },
                D::Up if i > 0 => Step::Moved(C::StackHead(stacks[i - 1].label.clone())),
                D::Up => Step::Blocked(Boundary::FirstStack),
                D::In => Step::Moved(C::Block(stacks[i].top.clone())),
                D::Out => Step::Moved(C::WorkspacePoint(stacks[i].position)),
                d => no_neighbor(d, format!("stack {label}")),
            }
        }
        C::Block(b) => step_block(ws, b, dir),
        C::Element(b, i) => {
            let children = ws.children(b);
            let Some(element) = children.get(*i) else {
                return Step::Moved(C::Block(b.clone()));
            };
            let owner = || phrase(ws, b);
            match dir {
                D::Left if *i > 0 => Step::Moved(C::Element(b.clone(), i - 1)),
                D::Left => Step::Blocked(Boundary::FirstElement { owner: owner() }),
                D::Right if i + 1 < children.len() => Step::Moved(C::Element(b.clone(), i + 1)),
                D::Right => Step::Blocked(Boundary::LastElement { owner: owner() }),
                D::In => match element {
                    ElementRef::Field { .. } => Step::Field {
                        block: b.clone(),
                        index: *i,
                    },
                    other => match other.attached() {
                        Some(child) => Step::Moved(C::Block(child.clone())),
                        None => Step::Blocked(Boundary::EmptyConnection {
                            element: element_text(ws, b, *i),
                        }),
                    },
                },
                D::Out => Step::Moved(C::Block(b.clone())),
                d => no_neighbor(d, element_text(ws, b, *i)),
            }
        }
        C::ToolboxEntry(..) => no_neighbor(dir, "toolbox".into()),
    }
}

fn step_block(ws: &Workspace, b: &BlockId, dir: Direction) -> Step {
    use CursorLocation as C;
    use Direction as D;
    let is_statement = ws.kind_of(b) == Some(BlockKind::Statement);
    let sequence_end = |at_start: bool| -> Step {
        let head = ws.sequence_head(b);
        match ws.slot_position(&head) {
            Some((owner, index)) => {
                let input = input_label(ws, &owner, index);
                let owner = phrase(ws, &owner);
                Step::Blocked(if at_start {
                    Boundary::StartOfInput { input, owner }
                } else {
                    Boundary::EndOfInput { input, owner }
                })
            }
            None => {
                let label = ws
                    .stack_of(b)
                    .map(|s| s.label.clone())
                    .unwrap_or_else(|| Label::from_index(0));
                Step::Blocked(if at_start {
                    Boundary::TopOfStack(label)
                } else {
                    Boundary::EndOfStack(label)
                })
            }
        }
    };
    match dir {
        D::Down if !is_statement => no_neighbor(dir, phrase(ws, b)),
        D::Down => match ws.successor(b) {
            Some(n) => Step::Moved(C::Block(n.clone())),
            None => sequence_end(false),
        },
        D::Up if !is_statement => no_neighbor(dir, phrase(ws, b)),
        D::Up => match ws.predecessor(b) {
            Some(p) => Step::Moved(C::Block(p.clone())),
            None => sequence_end(true),
        },
        D::In => {
            if ws.children(b).is_empty() {
                no_neighbor(dir, phrase(ws, b))
            } else {
                Step::Moved(C::Element(b.clone(), 0))
            }
        }
        D::Out => {
            if let Some((owner, i)) = ws.slot_position(b) {
                return Step::Moved(C::Element(owner, i));
            }
            let head = ws.sequence_head(b);
            if let Some((owner, i)) = ws.slot_position(&head) {
                return Step::Moved(C::Element(owner, i));
            }
            match ws.stack_of(b) {
                Some(s) => Step::Moved(C::StackHead(s.label.clone())),
                None => Step::Blocked(Boundary::WorkspaceLevel),
            }
        }
        D::Left | D::Right => {
            let in_value_slot = matches!(ws.parent(b), Some(ConnectionRef::ValueSlot(..)));
            let Some((owner, i)) = ws.slot_position(b).filter(|_| in_value_slot) else {
                return no_neighbor(dir, phrase(ws, b));
            };
            let count = ws.children(&owner).len();
            if dir == D::Left {
                if i > 0 {
                    Step::Moved(C::Element(owner, i - 1))
                } else {
                    Step::Blocked(Boundary::FirstElement {
                        owner: phrase(ws, &owner),
                    })
                }
            } else if i + 1 < count {
                Step::Moved(C::Element(owner, i + 1))
            } else {
                Step::Blocked(Boundary::LastElement {
                    owner: phrase(ws, &owner),
                })
            }
        }
    }
}

/// Description of a (non-toolbox) cursor location.
pub fn landing(ws: &Workspace, at: &CursorLocation) -> Option<Landing> {
    match at {
        CursorLocation::WorkspacePoint(p) => Some(Landing::Point(*p)),
        CursorLocation::StackHead(l) => StackInfo::of(ws, l).map(Landing::Stack),
        CursorLocation::Block(b) => BlockInfo::of(ws, b).map(Landing::Block),
        CursorLocation::Element(b, i) => ElementInfo::of(ws, b, *i).map(Landing::Element),
        CursorLocation::ToolboxEntry(..) => None,
    }
}

/// Block at the top of the stack whose single-letter label is `letter`.
pub fn jump_target(ws: &Workspace, letter: char) -> Option<BlockId> {
    ws.stacks()
        .iter()
        .find(|s| s.label.letter() == Some(letter))
        .map(|s| s.top.clone())
}

/// Seed point for the workspace cursor: the point itself, or the current stack's position.
pub fn cursor_seed(ws: &Workspace, at: &CursorLocation) -> Point {
    match at {
        CursorLocation::WorkspacePoint(p) => *p,
        CursorLocation::StackHead(l) => ws.stack(l).map(|s| s.position).unwrap_or_default(),
        CursorLocation::Block(b) | CursorLocation::Element(b, _) => {
            ws.stack_of(b).map(|s| s.position).unwrap_or_default()
        }
        CursorLocation::ToolboxEntry(..) => Point::default(),
    }
}

/// One workspace-cursor step from `at`. Only Up/Down/Left/Right are meaningful.
pub fn move_workspace_cursor(ws: &Workspace, at: &CursorLocation, dir: Direction) -> Point {
    let p = cursor_seed(ws, at);
    match dir {
        Direction::Up => Point::new(p.x, p.y - CURSOR_STEP),
        Direction::Down => Point::new(p.x, p.y + CURSOR_STEP),
        Direction::Left => Point::new(p.x - CURSOR_STEP, p.y),
        Direction::Right => Point::new(p.x + CURSOR_STEP, p.y),
        Direction::In | Direction::Out => p,
    }
}

/// Full description of where the cursor is, for the locate command.
pub fn locate(ws: &Workspace, at: &CursorLocation, mode: &str, toolbox_key: &str) -> String {
    match at {
        CursorLocation::WorkspacePoint(p) => {
            if ws.stacks().is_empty() {
                return format!("Workspace empty; press {toolbox_key} to open toolbox");
            }
            let labels: Vec<&str> = ws.stacks().iter().map(|s| s.label.as_str()).collect();
            let count = if labels.len() == 1 {
                "1 stack".to_string()
            } else {
                format!("{} stacks", labels.len())
            };
            format!("Workspace cursor at {}, {}; {}: {}", p.x, p.y, count, labels.join(", "))
        }
        CursorLocation::StackHead(l) => match StackInfo::of(ws, l) {
            Some(info) => format!(
                "{}, at {}, {}, {mode} mode",
                info.describe(crate::announce::Verbosity::Standard),
                info.position.x,
                info.position.y
            ),
            None => String::from("Nowhere"),
        },
        CursorLocation::Block(b) => {
            let Some(info) = BlockInfo::of(ws, b) else {
                return String::from("Nowhere");
            };
            let mut text = format!("{}, {}, {mode} mode", info.location(), info.phrase);
            if let Some(p) = ws.predecessor(b) {
                text.push_str(&format!("; previous: {}", phrase(ws, p)));
            }
            if let Some(n) = ws.successor(b) {
                text.push_str(&format!("; next: {}", phrase(ws, n)));
            }
            let head = ws.sequence_head(b);
            let container = ws.slot_position(b).or_else(|| ws.slot_position(&head));
            if let Some((owner, i)) = container {
                text.push_str(&format!(
                    "; inside {} input of {}",
                    input_label(ws, &owner, i),
                    phrase(ws, &owner)
                ));
            }
            text
        }
        CursorLocation::Element(b, i) => {
            let (Some(info), Some(el)) = (BlockInfo::of(ws, b), ElementInfo::of(ws, b, *i)) else {
                return String::from("Nowhere");
            };
            format!("{}, {}, {}, {mode} mode", info.location(), info.phrase, el.text)
        }
        CursorLocation::ToolboxEntry(..) => String::from("Toolbox"),
    }
}

fn command_for(dir: Direction) -> CommandId {
    match dir {
        Direction::Up => CommandId::MoveUp,
        Direction::Down => CommandId::MoveDown,
        Direction::Left => CommandId::MoveLeft,
        Direction::Right => CommandId::MoveRight,
        Direction::In => CommandId::MoveIn,
        Direction::Out => CommandId::MoveOut,
    }
}

/// Dry-runs every direction and lists the ones that would move, keyed by their bound chord.
pub fn assistant_preview(ws: &Workspace, at: &CursorLocation, keymap: &Keymap) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for dir in Direction::ALL {
        let Step::Moved(to) = step(ws, at, dir) else {
            continue;
        };
        let Some(chord) = keymap.chord_for(command_for(dir)) else {
            continue;
        };
        let text = match (&to, dir) {
            (CursorLocation::Element(b, i), Direction::In) => {
                format!("enter {}, {}", phrase(ws, b), element_text(ws, b, *i))
            }
            _ => match landing(ws, &to) {
                Some(l) => l.describe(crate::announce::Verbosity::Terse),
                None => continue,
            },
        };
        out.push((chord.to_string(), text));
    }
    out
}

/// Closure of single moves and stack jumps from `start`.
pub fn reachable_set(ws: &Workspace, start: &CursorLocation) -> BTreeSet<CursorLocation> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let jumps: Vec<CursorLocation> = ('A'..='Z')
        .filter_map(|c| jump_target(ws, c))
        .map(CursorLocation::Block)
        .collect();
    while let Some(at) = queue.pop_front() {
        let moves = Direction::ALL.iter().filter_map(|d| match step(ws, &at, *d) {
            Step::Moved(to) => Some(to),
            _ => None,
        });
        for to in moves.chain(jumps.iter().cloned()).collect::<Vec<_>>() {
            if seen.insert(to.clone()) {
                queue.push_back(to);
            }
        }
    }
    seen
}

/// The stack a location belongs to, when it belongs to one.
pub fn stack_at(ws: &Workspace, at: &CursorLocation) -> Option<Label> {
    match at {
        CursorLocation::StackHead(l) => Some(l.clone()),
        CursorLocation::Block(b) | CursorLocation::Element(b, _) => {
            ws.stack_of(b).map(|s| s.label.clone())
        }
        _ => None,
    }
}

/// Stack reference used in announcements for the stack at a location.
pub fn stack_ref_at(ws: &Workspace, at: &CursorLocation) -> Option<StackRef> {
    stack_at(ws, at).map(|l| StackRef::of(ws, &l))
}
