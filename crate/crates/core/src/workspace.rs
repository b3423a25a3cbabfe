//! Blocks, stacks and connections, plus the invariant-preserving graph mutations
//! every editing command is built from.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::defs::{BlockDefinition, BlockKind, BlockSet, FieldValue, ValueType};
use crate::labeling::{self, Label, NumberingIndex};

/// Offset applied to stacks split off an existing stack.
pub const SPLIT_OFFSET: Point = Point { x: 40, y: 40 };

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(String);

impl BlockId {
    pub fn new(id: impl Into<String>) -> Self {
        BlockId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric_suffix(&self) -> Option<u64> {
        self.0.strip_prefix('b').and_then(|n| n.parse().ok())
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Workspace coordinates, in workspace units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn offset(self, by: Point) -> Point {
        Point::new(self.x + by.x, self.y + by.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comment {
    pub text: String,
    pub visible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub id: BlockId,
    pub def_id: String,
    pub fields: BTreeMap<String, FieldValue>,
    pub value_slots: BTreeMap<String, Option<BlockId>>,
    /// Head of the nested statement sequence for each statement input.
    pub statement_slots: BTreeMap<String, Option<BlockId>>,
    pub next: Option<BlockId>,
    pub comment: Option<Comment>,
}

impl Block {
    /// A block with every field at its default and every slot empty.
    pub fn blank(id: BlockId, def: &BlockDefinition) -> Self {
        Block {
            id,
            def_id: def.def_id.clone(),
            fields: def
                .fields
                .iter()
                .map(|f| (f.name.clone(), f.default_value()))
                .collect(),
            value_slots: def
                .value_inputs
                .iter()
                .map(|i| (i.name.clone(), None))
                .collect(),
            statement_slots: def
                .statement_inputs
                .iter()
                .map(|i| (i.name.clone(), None))
                .collect(),
            next: None,
            comment: None,
        }
    }

    /// Every block this one references directly, with the connection it sits at.
    fn references(&self) -> impl Iterator<Item = (ConnectionRef, &BlockId)> {
        let value = self.value_slots.iter().filter_map(move |(name, b)| {
            b.as_ref()
                .map(|b| (ConnectionRef::ValueSlot(self.id.clone(), name.clone()), b))
        });
        let stmt = self.statement_slots.iter().filter_map(move |(name, b)| {
            b.as_ref()
                .map(|b| (ConnectionRef::StatementSlot(self.id.clone(), name.clone()), b))
        });
        let next = self
            .next
            .iter()
            .map(move |b| (ConnectionRef::Next(self.id.clone()), b));
        value.chain(stmt).chain(next)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stack {
    pub label: Label,
    pub custom_name: Option<String>,
    pub position: Point,
    pub top: BlockId,
}

/// An attachment point on a block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConnectionRef {
    Previous(BlockId),
    Next(BlockId),
    ValueSlot(BlockId, String),
    StatementSlot(BlockId, String),
}

impl ConnectionRef {
    pub fn owner(&self) -> &BlockId {
        match self {
            ConnectionRef::Previous(b)
            | ConnectionRef::Next(b)
            | ConnectionRef::ValueSlot(b, _)
            | ConnectionRef::StatementSlot(b, _) => b,
        }
    }
}

/// A navigable child of a block, in canonical order: fields, value inputs, statement inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementRef {
    Field { name: String },
    ValueInput { name: String, block: Option<BlockId> },
    StatementInput { name: String, first: Option<BlockId> },
}

impl ElementRef {
    /// The block reached by entering this element, if any.
    pub fn attached(&self) -> Option<&BlockId> {
        match self {
            ElementRef::Field { .. } => None,
            ElementRef::ValueInput { block, .. } => block.as_ref(),
            ElementRef::StatementInput { first, .. } => first.as_ref(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ElementRef::Field { name }
            | ElementRef::ValueInput { name, .. }
            | ElementRef::StatementInput { name, .. } => name,
        }
    }

    /// The connection this element stands for, when it is an input.
    pub fn connection(&self, owner: &BlockId) -> Option<ConnectionRef> {
        match self {
            ElementRef::Field { .. } => None,
            ElementRef::ValueInput { name, .. } => {
                Some(ConnectionRef::ValueSlot(owner.clone(), name.clone()))
            }
            ElementRef::StatementInput { name, .. } => {
                Some(ConnectionRef::StatementSlot(owner.clone(), name.clone()))
            }
        }
    }
}

/// What a connection accepts, for error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    Statement,
    Value(ValueType),
    /// The target block has no such connection (e.g. `Next` of a value block).
    Missing,
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionKind::Statement => f.write_str("statement"),
            ConnectionKind::Value(t) => write!(f, "{t} value"),
            ConnectionKind::Missing => f.write_str("missing"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum WorkspaceError {
    #[error("unknown block type {0}")]
    UnknownDefinition(String),
    #[error("bad value for field {0}")]
    BadFieldValue(String),
    #[error("unknown block {0}")]
    UnknownBlock(BlockId),
    #[error("no stack {0}")]
    UnknownStack(Label),
    #[error("block has no input {0}")]
    UnknownInput(String),
    #[error("{}", incompatible_text(.block, .target))]
    IncompatibleConnection {
        /// Spoken name of the block being attached.
        block: String,
        target: ConnectionKind,
    },
    #[error("{0} input is already filled")]
    OccupiedValueSlot(String),
    #[error("connection would create a cycle")]
    WouldCreateCycle,
    #[error("block {0} is not a free-standing stack top")]
    NotDetached(BlockId),
    #[error("invalid stack name")]
    InvalidName(String),
    #[error("stack {label} has {total} blocks, no block {number}")]
    NumberOutOfRange {
        label: Label,
        number: usize,
        total: usize,
    },
}

fn incompatible_text(block: &str, target: &ConnectionKind) -> String {
    match target {
        ConnectionKind::Missing => format!("{block} block has no matching connection there"),
        other => format!("{block} block does not fit {other} connection"),
    }
}

/// A structural problem found by [`Workspace::validate`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    UnknownDefinition(BlockId),
    /// A slot or `next` points at a block that does not exist.
    DanglingReference { from: BlockId, to: BlockId },
    /// A block is referenced by more than one parent connection.
    SharedChild(BlockId),
    /// A statement block in a value slot, or a value block in a statement position.
    KindMismatch(BlockId),
    /// A value block whose output type does not fit its slot.
    TypeMismatch(BlockId),
    FieldMismatch { block: BlockId, field: String },
    UnknownInput { block: BlockId, input: String },
    MissingInput { block: BlockId, input: String },
    /// Block not reachable from any stack top.
    Orphan(BlockId),
    Cycle(BlockId),
    DanglingStackTop(Label),
    StackTopHasParent(Label),
    DuplicateLabel(Label),
    UnsortedStacks,
}

#[derive(Clone, Debug, Default)]
struct Index {
    parent: HashMap<BlockId, ConnectionRef>,
    stack_of: HashMap<BlockId, usize>,
    numbering: NumberingIndex,
}

/// Stacks of connected blocks: the single source of truth all commands mutate.
#[derive(Clone, Debug)]
pub struct Workspace {
    block_set: Arc<BlockSet>,
    blocks: BTreeMap<BlockId, Block>,
    stacks: Vec<Stack>,
    next_id: u64,
    index: Index,
}

impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks && self.stacks == other.stacks
    }
}

impl Workspace {
    pub fn new(block_set: Arc<BlockSet>) -> Self {
        Workspace {
            block_set,
            blocks: BTreeMap::new(),
            stacks: Vec::new(),
            next_id: 1,
            index: Index::default(),
        }
    }

    pub fn standard() -> Self {
        Workspace::new(Arc::new(BlockSet::standard()))
    }

    /// Assembles a workspace without checking invariants; pair with [`Workspace::validate`].
    pub fn from_raw(block_set: Arc<BlockSet>, blocks: Vec<Block>, mut stacks: Vec<Stack>) -> Self {
        stacks.sort_by(|a, b| a.label.cmp(&b.label));
        let next_id = blocks
            .iter()
            .filter_map(|b| b.id.numeric_suffix())
            .max()
            .map_or(1, |n| n + 1);
        let mut ws = Workspace {
            block_set,
            blocks: blocks.into_iter().map(|b| (b.id.clone(), b)).collect(),
            stacks,
            next_id,
            index: Index::default(),
        };
        ws.reindex();
        ws
    }

    /// Same as [`Workspace::from_raw`] but keeps the given stack order, for building
    /// deliberately broken workspaces in tests.
    #[doc(hidden)]
    pub fn from_raw_unsorted(block_set: Arc<BlockSet>, blocks: Vec<Block>, stacks: Vec<Stack>) -> Self {
        let mut ws = Workspace::from_raw(block_set, blocks, Vec::new());
        ws.stacks = stacks;
        ws.reindex();
        ws
    }

    pub fn block_set(&self) -> &BlockSet {
        &self.block_set
    }

    pub fn block_set_arc(&self) -> Arc<BlockSet> {
        Arc::clone(&self.block_set)
    }

    pub fn block(&self, id: &BlockId) -> Option<&Block> {
        self.blocks.get(id)
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn contains(&self, id: &BlockId) -> bool {
        self.blocks.contains_key(id)
    }

    pub fn def_of(&self, id: &BlockId) -> Option<&BlockDefinition> {
        self.blocks
            .get(id)
            .and_then(|b| self.block_set.get(&b.def_id))
    }

    pub fn kind_of(&self, id: &BlockId) -> Option<BlockKind> {
        self.def_of(id).map(|d| d.kind)
    }

    /// Stacks in label order.
    pub fn stacks(&self) -> &[Stack] {
        &self.stacks
    }

    pub fn stack(&self, label: &Label) -> Option<&Stack> {
        self.stacks.iter().find(|s| &s.label == label)
    }

    pub fn stack_of(&self, id: &BlockId) -> Option<&Stack> {
        self.index.stack_of.get(id).map(|&i| &self.stacks[i])
    }

    pub fn numbering(&self) -> &NumberingIndex {
        &self.index.numbering
    }

    /// The connection a block is attached at; `None` for stack tops.
    pub fn parent(&self, id: &BlockId) -> Option<&ConnectionRef> {
        self.index.parent.get(id)
    }

    pub fn is_stack_top(&self, id: &BlockId) -> bool {
        self.stacks.iter().any(|s| &s.top == id)
    }

    pub fn predecessor(&self, id: &BlockId) -> Option<&BlockId> {
        match self.parent(id) {
            Some(ConnectionRef::Next(p)) => Some(p),
            _ => None,
        }
    }

    pub fn successor(&self, id: &BlockId) -> Option<&BlockId> {
        self.blocks.get(id).and_then(|b| b.next.as_ref())
    }

    /// First block of the statement sequence containing `id`.
    pub fn sequence_head(&self, id: &BlockId) -> BlockId {
        let mut cur = id.clone();
        let mut guard = 0;
        while let Some(p) = self.predecessor(&cur) {
            cur = p.clone();
            guard += 1;
            if guard > self.blocks.len() {
                break;
            }
        }
        cur
    }

    /// Last block of the chain starting at `id`.
    pub fn chain_tail(&self, id: &BlockId) -> BlockId {
        let mut cur = id.clone();
        let mut guard = 0;
        while let Some(n) = self.successor(&cur) {
            cur = n.clone();
            guard += 1;
            if guard > self.blocks.len() {
                break;
            }
        }
        cur
    }

    /// Blocks of the sequence starting at `head`, following `next`.
    pub fn sequence(&self, head: &BlockId) -> Vec<BlockId> {
        let mut out = Vec::new();
        let mut cur = Some(head.clone());
        while let Some(id) = cur {
            if out.contains(&id) || !self.contains(&id) {
                break;
            }
            cur = self.successor(&id).cloned();
            out.push(id);
        }
        out
    }

    /// Canonical navigable children of a block.
    pub fn children(&self, id: &BlockId) -> Vec<ElementRef> {
        let (Some(block), Some(def)) = (self.blocks.get(id), self.def_of(id)) else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(def.child_count());
        for f in &def.fields {
            out.push(ElementRef::Field {
                name: f.name.clone(),
            });
        }
        for i in &def.value_inputs {
            out.push(ElementRef::ValueInput {
                name: i.name.clone(),
                block: block.value_slots.get(&i.name).cloned().flatten(),
            });
        }
        for i in &def.statement_inputs {
            out.push(ElementRef::StatementInput {
                name: i.name.clone(),
                first: block.statement_slots.get(&i.name).cloned().flatten(),
            });
        }
        out
    }

    /// Index of the child element through which `id` is reached from its container,
    /// when `id` sits directly in a value slot or heads a statement input.
    pub fn slot_position(&self, id: &BlockId) -> Option<(BlockId, usize)> {
        let (owner, input) = match self.parent(id)? {
            ConnectionRef::ValueSlot(p, n) | ConnectionRef::StatementSlot(p, n) => (p, n),
            _ => return None,
        };
        let idx = self
            .children(owner)
            .iter()
            .position(|e| e.name() == input && !matches!(e, ElementRef::Field { .. }))?;
        Some((owner.clone(), idx))
    }

    /// Document-order traversal of a stack.
    pub fn preorder(&self, label: &Label) -> Result<Vec<BlockId>, WorkspaceError> {
        let stack = self
            .stack(label)
            .ok_or_else(|| WorkspaceError::UnknownStack(label.clone()))?;
        Ok(self.preorder_from(&stack.top))
    }

    /// Pre-order from `root`: the block, its value-slot blocks, its statement bodies,
    /// then its successor chain.
    pub fn preorder_from(&self, root: &BlockId) -> Vec<BlockId> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut work = vec![root.clone()];
        while let Some(id) = work.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            let (Some(block), Some(def)) = (self.blocks.get(&id), self.def_of(&id)) else {
                continue;
            };
            // Pushed in reverse of visiting order.
            if let Some(n) = &block.next {
                work.push(n.clone());
            }
            for input in def.statement_inputs.iter().rev() {
                if let Some(Some(b)) = block.statement_slots.get(&input.name) {
                    work.push(b.clone());
                }
            }
            for input in def.value_inputs.iter().rev() {
                if let Some(Some(b)) = block.value_slots.get(&input.name) {
                    work.push(b.clone());
                }
            }
            out.push(id);
        }
        out
    }

    /// The block and everything nested inside it (value slots and statement bodies),
    /// excluding its successor chain.
    pub fn subtree(&self, id: &BlockId) -> Vec<BlockId> {
        let Some(block) = self.blocks.get(id) else {
            return Vec::new();
        };
        let mut out = vec![id.clone()];
        for b in block.value_slots.values().flatten() {
            out.extend(self.preorder_from(b));
        }
        for b in block.statement_slots.values().flatten() {
            out.extend(self.preorder_from(b));
        }
        out
    }

    pub fn fresh_id(&mut self) -> BlockId {
        loop {
            let id = BlockId(format!("b{}", self.next_id));
            self.next_id += 1;
            if !self.blocks.contains_key(&id) {
                return id;
            }
        }
    }

    fn reindex(&mut self) {
        let mut parent = HashMap::new();
        for block in self.blocks.values() {
            for (conn, child) in block.references() {
                parent.entry(child.clone()).or_insert(conn);
            }
        }
        let mut stack_of = HashMap::new();
        for (i, stack) in self.stacks.iter().enumerate() {
            for id in self.preorder_from(&stack.top) {
                stack_of.entry(id).or_insert(i);
            }
        }
        self.index.parent = parent;
        self.index.stack_of = stack_of;
        self.index.numbering = labeling::renumber(self);
    }

    fn insert_stack(&mut self, stack: Stack) {
        let pos = self
            .stacks
            .binary_search_by(|s| s.label.cmp(&stack.label))
            .unwrap_or_else(|e| e);
        self.stacks.insert(pos, stack);
    }

    fn stack_index_of_top(&self, id: &BlockId) -> Option<usize> {
        self.stacks.iter().position(|s| &s.top == id)
    }

    /// Creates a block as a new single-block stack at the origin.
    pub fn new_block(
        &mut self,
        def_id: &str,
        fields: BTreeMap<String, FieldValue>,
    ) -> Result<BlockId, WorkspaceError> {
        self.new_block_at(def_id, fields, Point::default())
    }

    /// Creates a block as a new single-block stack at `at`; missing fields take defaults.
    pub fn new_block_at(
        &mut self,
        def_id: &str,
        fields: BTreeMap<String, FieldValue>,
        at: Point,
    ) -> Result<BlockId, WorkspaceError> {
        let def = self
            .block_set
            .get(def_id)
            .ok_or_else(|| WorkspaceError::UnknownDefinition(def_id.to_string()))?
            .clone();
        for (name, value) in &fields {
            match def.field(name) {
                Some(spec) if spec.accepts(value) => {}
                _ => return Err(WorkspaceError::BadFieldValue(name.clone())),
            }
        }
        let id = self.fresh_id();
        let mut block = Block::blank(id.clone(), &def);
        block.fields.extend(fields);
        self.blocks.insert(id.clone(), block);
        let label = labeling::assign_label(self);
        self.insert_stack(Stack {
            label,
            custom_name: None,
            position: at,
            top: id.clone(),
        });
        self.reindex();
        Ok(id)
    }

    /// Checks whether `block` (a stack top) could be attached at `at`, without mutating.
    pub fn check_connect(&self, at: &ConnectionRef, block: &BlockId) -> Result<(), WorkspaceError> {
        let def = self
            .def_of(block)
            .ok_or_else(|| WorkspaceError::UnknownBlock(block.clone()))?;
        if !self.is_stack_top(block) {
            return Err(WorkspaceError::NotDetached(block.clone()));
        }
        let owner = at.owner();
        let owner_def = self
            .def_of(owner)
            .ok_or_else(|| WorkspaceError::UnknownBlock(owner.clone()))?;
        let incompatible = |target: ConnectionKind| WorkspaceError::IncompatibleConnection {
            block: def.display.clone(),
            target,
        };
        match at {
            ConnectionRef::Next(_) | ConnectionRef::Previous(_) => {
                if owner_def.kind != BlockKind::Statement {
                    return Err(incompatible(ConnectionKind::Missing));
                }
                if def.kind != BlockKind::Statement || !def.has_previous || !def.has_next {
                    return Err(incompatible(ConnectionKind::Statement));
                }
            }
            ConnectionRef::StatementSlot(_, name) => {
                if owner_def.statement_input_spec(name).is_none() {
                    return Err(WorkspaceError::UnknownInput(name.clone()));
                }
                if def.kind != BlockKind::Statement || !def.has_previous {
                    return Err(incompatible(ConnectionKind::Statement));
                }
            }
            ConnectionRef::ValueSlot(_, name) => {
                let spec = owner_def
                    .value_input_spec(name)
                    .ok_or_else(|| WorkspaceError::UnknownInput(name.clone()))?;
                let fits = def.kind == BlockKind::Value
                    && def.output.is_some_and(|o| o.compatible(spec.accepts));
                if !fits {
                    return Err(incompatible(ConnectionKind::Value(spec.accepts)));
                }
                let occupied = self
                    .blocks
                    .get(owner)
                    .and_then(|b| b.value_slots.get(name))
                    .is_some_and(|s| s.is_some());
                if occupied {
                    return Err(WorkspaceError::OccupiedValueSlot(spec.label.clone()));
                }
            }
        }
        if self.stack_of(owner).map(|s| &s.top) == Some(block) {
            return Err(WorkspaceError::WouldCreateCycle);
        }
        Ok(())
    }

    /// Splices the stack rooted at `block` in at `at` and retires that stack's label.
    ///
    /// At `Next(b)` or an occupied statement input, the displaced chain reattaches after
    /// the inserted chain's tail. At `Previous(b)` of a stack top, the inserted chain
    /// becomes the new top of `b`'s stack.
    pub fn connect(&mut self, at: &ConnectionRef, block: &BlockId) -> Result<(), WorkspaceError> {
        self.check_connect(at, block)?;
        if let ConnectionRef::Previous(target) = at {
            match self.parent(target).cloned() {
                Some(conn) => return self.connect(&conn, block),
                None => {
                    let tail = self.chain_tail(block);
                    let own = self.stack_index_of_top(block).expect("checked");
                    self.stacks.remove(own);
                    let target_stack = self.stack_index_of_top(target).expect("stack top");
                    self.stacks[target_stack].top = block.clone();
                    self.blocks.get_mut(&tail).expect("tail").next = Some(target.clone());
                    self.reindex();
                    return Ok(());
                }
            }
        }
        let own = self.stack_index_of_top(block).expect("checked");
        self.stacks.remove(own);
        let tail = self.chain_tail(block);
        let owner = self.blocks.get_mut(at.owner()).expect("checked");
        let displaced = match at {
            ConnectionRef::Next(_) => owner.next.replace(block.clone()),
            ConnectionRef::StatementSlot(_, name) => owner
                .statement_slots
                .insert(name.clone(), Some(block.clone()))
                .flatten(),
            ConnectionRef::ValueSlot(_, name) => {
                owner.value_slots.insert(name.clone(), Some(block.clone()));
                None
            }
            ConnectionRef::Previous(_) => unreachable!(),
        };
        if let Some(rest) = displaced {
            self.blocks.get_mut(&tail).expect("tail").next = Some(rest);
        }
        self.reindex();
        Ok(())
    }

    /// Detaches `block` (with everything nested in it) into a new stack and returns its id.
    ///
    /// With `heal`, the block's successor chain reattaches to its former position; without,
    /// the successor chain travels with the block. Detaching a stack top is a no-op.
    pub fn detach(&mut self, block: &BlockId, heal: bool) -> Result<BlockId, WorkspaceError> {
        if !self.contains(block) {
            return Err(WorkspaceError::UnknownBlock(block.clone()));
        }
        let Some(conn) = self.parent(block).cloned() else {
            return Ok(block.clone());
        };
        let source_pos = self
            .stack_of(block)
            .map(|s| s.position)
            .unwrap_or_default();
        let successor = if heal {
            self.blocks.get_mut(block).expect("exists").next.take()
        } else {
            None
        };
        let owner = self.blocks.get_mut(conn.owner()).expect("parent exists");
        match &conn {
            ConnectionRef::Next(_) => owner.next = successor,
            ConnectionRef::StatementSlot(_, name) => {
                owner.statement_slots.insert(name.clone(), successor);
            }
            ConnectionRef::ValueSlot(_, name) => {
                owner.value_slots.insert(name.clone(), None);
            }
            ConnectionRef::Previous(_) => unreachable!("parent links are never Previous"),
        }
        let label = labeling::assign_label(self);
        self.insert_stack(Stack {
            label,
            custom_name: None,
            position: source_pos.offset(SPLIT_OFFSET),
            top: block.clone(),
        });
        self.reindex();
        Ok(block.clone())
    }

    /// Removes a whole stack and all its blocks, retiring its label.
    pub fn remove_stack(&mut self, label: &Label) -> Result<Stack, WorkspaceError> {
        let idx = self
            .stacks
            .iter()
            .position(|s| &s.label == label)
            .ok_or_else(|| WorkspaceError::UnknownStack(label.clone()))?;
        let stack = self.stacks.remove(idx);
        for id in self.preorder_from(&stack.top) {
            self.blocks.remove(&id);
        }
        self.reindex();
        Ok(stack)
    }

    /// Removes one block and everything nested in it, healing the chain around it.
    ///
    /// A stack top's successor becomes the new top of the same stack; a sole top retires
    /// the stack. Returns the removed block's id, which no longer exists afterwards.
    pub fn remove_block(&mut self, id: &BlockId) -> Result<Vec<BlockId>, WorkspaceError> {
        if !self.contains(id) {
            return Err(WorkspaceError::UnknownBlock(id.clone()));
        }
        if let Some(idx) = self.stack_index_of_top(id) {
            match self.blocks.get_mut(id).expect("exists").next.take() {
                Some(next) => self.stacks[idx].top = next,
                None => {
                    self.stacks.remove(idx);
                }
            }
        } else {
            self.detach(id, true)?;
            let idx = self.stack_index_of_top(id).expect("just detached");
            self.stacks.remove(idx);
        }
        let removed = self.subtree(id);
        for b in &removed {
            self.blocks.remove(b);
        }
        self.reindex();
        Ok(removed)
    }

    pub fn set_field(&mut self, id: &BlockId, name: &str, value: FieldValue) -> Result<(), WorkspaceError> {
        let def = self
            .def_of(id)
            .ok_or_else(|| WorkspaceError::UnknownBlock(id.clone()))?;
        match def.field(name) {
            Some(spec) if spec.accepts(&value) => {}
            _ => return Err(WorkspaceError::BadFieldValue(name.to_string())),
        }
        self.blocks
            .get_mut(id)
            .expect("exists")
            .fields
            .insert(name.to_string(), value);
        Ok(())
    }

    pub fn set_comment(&mut self, id: &BlockId, comment: Option<Comment>) -> Result<(), WorkspaceError> {
        let block = self
            .blocks
            .get_mut(id)
            .ok_or_else(|| WorkspaceError::UnknownBlock(id.clone()))?;
        block.comment = comment;
        Ok(())
    }

    pub fn set_custom_name(&mut self, label: &Label, name: &str) -> Result<(), WorkspaceError> {
        let idx = self
            .stacks
            .iter()
            .position(|s| &s.label == label)
            .ok_or_else(|| WorkspaceError::UnknownStack(label.clone()))?;
        let name = labeling::normalize_custom_name(name)?;
        self.stacks[idx].custom_name = Some(name);
        Ok(())
    }

    /// Adds an already-built stack; used by loaders and clipboard paste.
    pub(crate) fn add_stack_raw(&mut self, blocks: Vec<Block>, stack: Stack) {
        for b in blocks {
            self.blocks.insert(b.id.clone(), b);
        }
        self.insert_stack(stack);
        self.reindex();
    }

    /// Lists every invariant violation; empty iff the workspace is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let set = &self.block_set;

        let mut seen_labels = HashSet::new();
        for s in &self.stacks {
            if !seen_labels.insert(&s.label) {
                out.push(Violation::DuplicateLabel(s.label.clone()));
            }
        }
        if self.stacks.windows(2).any(|w| w[0].label >= w[1].label) && out.is_empty() {
            out.push(Violation::UnsortedStacks);
        }

        let mut incoming: HashMap<&BlockId, usize> = HashMap::new();
        for block in self.blocks.values() {
            let Some(def) = set.get(&block.def_id) else {
                out.push(Violation::UnknownDefinition(block.id.clone()));
                continue;
            };
            let names: Vec<&String> = def.fields.iter().map(|f| &f.name).collect();
            for spec in &def.fields {
                match block.fields.get(&spec.name) {
                    Some(v) if spec.accepts(v) => {}
                    _ => out.push(Violation::FieldMismatch {
                        block: block.id.clone(),
                        field: spec.name.clone(),
                    }),
                }
            }
            for name in block.fields.keys() {
                if !names.contains(&name) {
                    out.push(Violation::FieldMismatch {
                        block: block.id.clone(),
                        field: name.clone(),
                    });
                }
            }
            for spec in &def.value_inputs {
                if !block.value_slots.contains_key(&spec.name) {
                    out.push(Violation::MissingInput {
                        block: block.id.clone(),
                        input: spec.name.clone(),
                    });
                }
            }
            for spec in &def.statement_inputs {
                if !block.statement_slots.contains_key(&spec.name) {
                    out.push(Violation::MissingInput {
                        block: block.id.clone(),
                        input: spec.name.clone(),
                    });
                }
            }
            for name in block.value_slots.keys() {
                if def.value_input_spec(name).is_none() {
                    out.push(Violation::UnknownInput {
                        block: block.id.clone(),
                        input: name.clone(),
                    });
                }
            }
            for name in block.statement_slots.keys() {
                if def.statement_input_spec(name).is_none() {
                    out.push(Violation::UnknownInput {
                        block: block.id.clone(),
                        input: name.clone(),
                    });
                }
            }
            if block.next.is_some() && (def.kind != BlockKind::Statement || !def.has_next) {
                out.push(Violation::KindMismatch(block.id.clone()));
            }

            for (conn, child) in block.references() {
                let Some(child_block) = self.blocks.get(child) else {
                    out.push(Violation::DanglingReference {
                        from: block.id.clone(),
                        to: child.clone(),
                    });
                    continue;
                };
                *incoming.entry(child).or_default() += 1;
                let Some(child_def) = set.get(&child_block.def_id) else {
                    continue;
                };
                match &conn {
                    ConnectionRef::ValueSlot(_, name) => {
                        if child_def.kind != BlockKind::Value {
                            out.push(Violation::KindMismatch(child.clone()));
                        } else if let (Some(spec), Some(output)) =
                            (def.value_input_spec(name), child_def.output)
                        {
                            if !output.compatible(spec.accepts) {
                                out.push(Violation::TypeMismatch(child.clone()));
                            }
                        }
                    }
                    ConnectionRef::StatementSlot(..) | ConnectionRef::Next(_) => {
                        if child_def.kind != BlockKind::Statement {
                            out.push(Violation::KindMismatch(child.clone()));
                        }
                    }
                    ConnectionRef::Previous(_) => {}
                }
            }
        }
        for (id, n) in &incoming {
            if *n > 1 {
                out.push(Violation::SharedChild((*id).clone()));
            }
        }

        let mut reached: HashSet<BlockId> = HashSet::new();
        for s in &self.stacks {
            if !self.blocks.contains_key(&s.top) {
                out.push(Violation::DanglingStackTop(s.label.clone()));
                continue;
            }
            if incoming.get(&s.top).copied().unwrap_or(0) > 0 {
                out.push(Violation::StackTopHasParent(s.label.clone()));
            }
            let mut work = vec![s.top.clone()];
            let mut local: HashSet<BlockId> = HashSet::new();
            while let Some(id) = work.pop() {
                if !local.insert(id.clone()) {
                    if incoming.get(&id).copied().unwrap_or(0) <= 1 {
                        out.push(Violation::Cycle(id));
                    }
                    continue;
                }
                if let Some(b) = self.blocks.get(&id) {
                    work.extend(b.references().map(|(_, c)| c.clone()));
                }
            }
            reached.extend(local);
        }
        for id in self.blocks.keys() {
            if !reached.contains(id) {
                out.push(Violation::Orphan(id.clone()));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}
