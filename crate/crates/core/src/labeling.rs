//! Stack letter labels, custom stack names and pre-order block numbering.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::workspace::{BlockId, Workspace, WorkspaceError};

/// Longest custom stack name accepted, in characters.
pub const MAX_CUSTOM_NAME: usize = 60;

/// A stack letter label: `A`..`Z`, then `AA`, `AB`, ...
///
/// Ordering follows the label sequence (shorter labels first), so `Z < AA`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label(String);

impl Label {
    pub fn parse(text: &str) -> Option<Label> {
        if !text.is_empty() && text.bytes().all(|b| b.is_ascii_uppercase()) {
            Some(Label(text.to_string()))
        } else {
            None
        }
    }

    /// The label at zero-based position `index` in the sequence A, B, .., Z, AA, AB, ..
    pub fn from_index(index: usize) -> Label {
        let mut n = index + 1;
        let mut letters = Vec::new();
        while n > 0 {
            n -= 1;
            letters.push(b'A' + (n % 26) as u8);
            n /= 26;
        }
        letters.reverse();
        Label(String::from_utf8(letters).expect("ascii"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Single-letter labels are the only ones reachable by Alt+letter.
    pub fn letter(&self) -> Option<char> {
        let mut chars = self.0.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Some(c),
            _ => None,
        }
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowest label in sequence order that is not in `used`.
pub fn lowest_unused<'a>(used: impl IntoIterator<Item = &'a Label>) -> Label {
    let used: BTreeSet<&Label> = used.into_iter().collect();
    (0..)
        .map(Label::from_index)
        .find(|l| !used.contains(l))
        .expect("label sequence is unbounded")
}

/// Label a newly created stack would receive. Existing stacks are never relabeled.
pub fn assign_label(ws: &Workspace) -> Label {
    lowest_unused(ws.stacks().iter().map(|s| &s.label))
}

/// Trims and checks a custom stack name.
pub fn normalize_custom_name(name: &str) -> Result<String, WorkspaceError> {
    let trimmed = name.trim();
    if trimmed.is_empty() || trimmed.chars().count() > MAX_CUSTOM_NAME {
        return Err(WorkspaceError::InvalidName(name.to_string()));
    }
    Ok(trimmed.to_string())
}

/// Position of a block inside its stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockNumber {
    pub number: usize,
    pub total: usize,
}

/// Pre-order block numbers for every stack, 1-based and gap-free.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NumberingIndex {
    numbers: BTreeMap<BlockId, (Label, BlockNumber)>,
    order: BTreeMap<Label, Vec<BlockId>>,
}

impl NumberingIndex {
    pub fn get(&self, id: &BlockId) -> Option<BlockNumber> {
        self.numbers.get(id).map(|(_, n)| *n)
    }

    pub fn stack_of(&self, id: &BlockId) -> Option<&Label> {
        self.numbers.get(id).map(|(l, _)| l)
    }

    /// Blocks of a stack in numbering order.
    pub fn blocks(&self, label: &Label) -> Option<&[BlockId]> {
        self.order.get(label).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numbers.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BlockId, &Label, BlockNumber)> {
        self.numbers.iter().map(|(id, (l, n))| (id, l, *n))
    }
}

/// Recomputes numbering from the pre-order traversal of every stack.
pub fn renumber(ws: &Workspace) -> NumberingIndex {
    let mut index = NumberingIndex::default();
    for stack in ws.stacks() {
        let order = ws.preorder_from(&stack.top);
        let total = order.len();
        for (i, id) in order.iter().enumerate() {
            index.numbers.entry(id.clone()).or_insert((
                stack.label.clone(),
                BlockNumber {
                    number: i + 1,
                    total,
                },
            ));
        }
        index.order.insert(stack.label.clone(), order);
    }
    index
}

/// The block at 1-based pre-order position `number` of stack `label`.
pub fn resolve(ws: &Workspace, label: &Label, number: usize) -> Result<BlockId, WorkspaceError> {
    let blocks = ws
        .numbering()
        .blocks(label)
        .ok_or_else(|| WorkspaceError::UnknownStack(label.clone()))?;
    if number == 0 || number > blocks.len() {
        return Err(WorkspaceError::NumberOutOfRange {
            label: label.clone(),
            number,
            total: blocks.len(),
        });
    }
    Ok(blocks[number - 1].clone())
}
