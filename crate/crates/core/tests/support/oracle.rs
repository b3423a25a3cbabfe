//! Independent expectations computed from the notation or by brute force.

use std::collections::{BTreeMap, BTreeSet};

use eaf_core::labeling::Label;
use eaf_core::workspace::{BlockId, ConnectionRef, Point, Workspace};
use eaf_core::CursorLocation;

use super::defs::TOOLBOX_ORDER;
use super::dsl::StackSpec;

/// Every location a keyboard user should be able to reach from `start`: the start point,
/// each stack's point and head, each block and each of its elements.
pub fn enumerate_locations(stacks: &[StackSpec], start: Point) -> BTreeSet<CursorLocation> {
    let mut out = BTreeSet::from([CursorLocation::WorkspacePoint(start)]);
    for s in stacks {
        out.insert(CursorLocation::WorkspacePoint(Point::new(s.x, s.y)));
        out.insert(CursorLocation::StackHead(Label::parse(&s.label).unwrap()));
        for n in s.nodes() {
            out.insert(CursorLocation::Block(BlockId::new(&n.id)));
            for i in 0..n.def().element_count() {
                out.insert(CursorLocation::Element(BlockId::new(&n.id), i));
            }
        }
    }
    out
}

/// Every connection point in the notation.
pub fn connections(stacks: &[StackSpec]) -> Vec<ConnectionRef> {
    let mut out = Vec::new();
    for s in stacks {
        for n in s.nodes() {
            let id = BlockId::new(&n.id);
            let d = n.def();
            if d.is_statement() {
                out.push(ConnectionRef::Next(id.clone()));
            }
            for (name, _) in d.values {
                out.push(ConnectionRef::ValueSlot(id.clone(), name.to_string()));
            }
            for name in d.bodies {
                out.push(ConnectionRef::StatementSlot(id.clone(), name.to_string()));
            }
        }
    }
    out
}

/// Definitions for which creating a fresh block and connecting it at `conn` succeeds.
pub fn brute_force_entries(ws: &Workspace, conn: &ConnectionRef) -> Vec<String> {
    TOOLBOX_ORDER
        .iter()
        .filter(|def_id| {
            let mut trial = ws.clone();
            let Ok(id) = trial.new_block(def_id, BTreeMap::new()) else {
                return false;
            };
            trial.connect(conn, &id).is_ok() && trial.validate().is_empty()
        })
        .map(|s| s.to_string())
        .collect()
}
