//! Owned, nested block trees: the clipboard payload and the shape of stacks on disk.

use std::collections::BTreeMap;

use crate::defs::FieldValue;
use crate::labeling;
use crate::workspace::{Block, BlockId, Comment, Point, Stack, Workspace, WorkspaceError};

#[derive(Clone, Debug, PartialEq)]
pub struct BlockTree {
    pub id: BlockId,
    pub def_id: String,
    pub fields: BTreeMap<String, FieldValue>,
    /// Value and statement inputs by name; statement inputs hold the head of their sequence.
    pub inputs: BTreeMap<String, Option<BlockTree>>,
    pub next: Option<Box<BlockTree>>,
    pub comment: Option<Comment>,
}

impl BlockTree {
    pub fn ids(&self) -> Vec<BlockId> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t.id.clone()));
        out
    }

    pub fn len(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn visit(&self, f: &mut impl FnMut(&BlockTree)) {
        f(self);
        for child in self.inputs.values().flatten() {
            child.visit(f);
        }
        if let Some(n) = &self.next {
            n.visit(f);
        }
    }
}

impl Workspace {
    /// Copies the block, its nested inputs and (when `with_next`) its successor chain.
    pub fn to_tree(&self, id: &BlockId, with_next: bool) -> Option<BlockTree> {
        let block = self.block(id)?;
        let def = self.def_of(id)?;
        let mut inputs = BTreeMap::new();
        for spec in &def.value_inputs {
            let child = block.value_slots.get(&spec.name).cloned().flatten();
            inputs.insert(
                spec.name.clone(),
                child.and_then(|c| self.to_tree(&c, false)),
            );
        }
        for spec in &def.statement_inputs {
            let child = block.statement_slots.get(&spec.name).cloned().flatten();
            inputs.insert(spec.name.clone(), child.and_then(|c| self.to_tree(&c, true)));
        }
        let next = if with_next {
            block
                .next
                .as_ref()
                .and_then(|n| self.to_tree(n, true))
                .map(Box::new)
        } else {
            None
        };
        Some(BlockTree {
            id: block.id.clone(),
            def_id: block.def_id.clone(),
            fields: block.fields.clone(),
            inputs,
            next,
            comment: block.comment.clone(),
        })
    }

    /// Adds `tree` as a new stack at `at` under the lowest unused label.
    ///
    /// Ids are kept unless `fresh_ids` is set or an id is already taken.
    pub fn instantiate(
        &mut self,
        tree: &BlockTree,
        at: Point,
        fresh_ids: bool,
    ) -> Result<BlockId, WorkspaceError> {
        let keep = !fresh_ids && tree.ids().iter().all(|id| !self.contains(id));
        let mut blocks = Vec::new();
        let root = self.flatten(tree, keep, &mut blocks)?;
        let label = labeling::assign_label(self);
        self.add_stack_raw(
            blocks,
            Stack {
                label,
                custom_name: None,
                position: at,
                top: root.clone(),
            },
        );
        debug_assert!(self.validate().is_empty(), "{:?}", self.validate());
        Ok(root)
    }

    fn flatten(
        &mut self,
        tree: &BlockTree,
        keep_ids: bool,
        out: &mut Vec<Block>,
    ) -> Result<BlockId, WorkspaceError> {
        let def = self
            .block_set()
            .get(&tree.def_id)
            .ok_or_else(|| WorkspaceError::UnknownDefinition(tree.def_id.clone()))?
            .clone();
        let id = if keep_ids {
            tree.id.clone()
        } else {
            self.fresh_id_avoiding(out)
        };
        let mut block = Block::blank(id.clone(), &def);
        for (name, value) in &tree.fields {
            match def.field(name) {
                Some(spec) if spec.accepts(value) => {
                    block.fields.insert(name.clone(), value.clone());
                }
                _ => return Err(WorkspaceError::BadFieldValue(name.clone())),
            }
        }
        block.comment = tree.comment.clone();
        // Reserve the id before recursing so children never reuse it.
        out.push(block);
        let slot = out.len() - 1;
        for (name, child) in &tree.inputs {
            let Some(child) = child else {
                if !def.has_input(name) {
                    return Err(WorkspaceError::UnknownInput(name.clone()));
                }
                continue;
            };
            let child_id = self.flatten(child, keep_ids, out)?;
            if def.value_input_spec(name).is_some() {
                out[slot].value_slots.insert(name.clone(), Some(child_id));
            } else if def.statement_input_spec(name).is_some() {
                out[slot].statement_slots.insert(name.clone(), Some(child_id));
            } else {
                return Err(WorkspaceError::UnknownInput(name.clone()));
            }
        }
        if let Some(next) = &tree.next {
            let next_id = self.flatten(next, keep_ids, out)?;
            out[slot].next = Some(next_id);
        }
        Ok(id)
    }

    fn fresh_id_avoiding(&mut self, pending: &[Block]) -> BlockId {
        loop {
            let id = self.fresh_id();
            if pending.iter().all(|b| b.id != id) {
                return id;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::ConnectionRef;

    #[test]
    fn tree_round_trip_preserves_ids() {
        let mut ws = Workspace::standard();
        let r = ws.new_block("repeat", BTreeMap::new()).unwrap();
        let p = ws.new_block("print", BTreeMap::new()).unwrap();
        let t = ws.new_block("text", BTreeMap::new()).unwrap();
        ws.connect(&ConnectionRef::ValueSlot(p.clone(), "VALUE".into()), &t)
            .unwrap();
        ws.connect(&ConnectionRef::StatementSlot(r.clone(), "BODY".into()), &p)
            .unwrap();
        let tree = ws.to_tree(&r, true).unwrap();
        assert_eq!(tree.len(), 3);
        let label = ws.stack_of(&r).unwrap().label.clone();
        let before = ws.clone();
        ws.remove_stack(&label).unwrap();
        let root = ws.instantiate(&tree, Point::default(), false).unwrap();
        assert_eq!(root, r);
        assert_eq!(ws, before);
    }

    #[test]
    fn fresh_ids_when_requested_or_colliding() {
        let mut ws = Workspace::standard();
        let p = ws.new_block("print", BTreeMap::new()).unwrap();
        let tree = ws.to_tree(&p, false).unwrap();
        let copy = ws.instantiate(&tree, Point::new(5, 5), false).unwrap();
        assert_ne!(copy, p);
        assert_eq!(ws.stacks().len(), 2);
        assert!(ws.validate().is_empty());
    }
}
