//! Seeded random workspaces: at most 30 blocks, nesting depth at most 4, at least 2 stacks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::defs::{fits, DEFS};
use super::dsl::{Node, StackSpec};

pub const MAX_BLOCKS: usize = 30;
pub const MAX_DEPTH: usize = 4;

struct Gen {
    rng: ChaCha8Rng,
    budget: usize,
    next_id: usize,
}

impl Gen {
    fn id(&mut self) -> String {
        self.next_id += 1;
        format!("b{}", self.next_id)
    }

    fn take(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn node(&mut self, ty: &str) -> Node {
        let id = self.id();
        let mut n = Node::blank(id, ty);
        let names = ["x", "y", "count"];
        for (field, value) in n.fields.iter_mut() {
            *value = match (ty, field.as_str()) {
                ("number", _) => {
                    if self.rng.gen_bool(0.2) {
                        json!(self.rng.gen_range(-40..40) as f64 + 0.5)
                    } else {
                        json!(self.rng.gen_range(-5..20))
                    }
                }
                ("text", _) => json!(*["hi", "a b", "", "done"].choose(&mut self.rng).unwrap()),
                (_, "VAR") => json!(*names.choose(&mut self.rng).unwrap()),
                ("boolean", _) => json!(*["true", "false"].choose(&mut self.rng).unwrap()),
                ("arithmetic", _) => json!(*["+", "-", "*", "/"].choose(&mut self.rng).unwrap()),
                ("compare", _) => json!(*["<", "=", ">"].choose(&mut self.rng).unwrap()),
                ("logic", _) => json!(*["and", "or", "not"].choose(&mut self.rng).unwrap()),
                _ => value.clone(),
            };
        }
        if self.rng.gen_bool(0.08) {
            let visible = self.rng.gen_bool(0.5);
            n.comment = Some(("note".to_string(), visible));
        }
        n
    }

    fn fill_inputs(&mut self, n: &mut Node, depth: usize) {
        let d = n.def();
        if depth >= MAX_DEPTH {
            return;
        }
        for (name, accepts) in d.values {
            if self.rng.gen_bool(0.7) {
                if let Some(v) = self.value(accepts, depth + 1) {
                    n.values.insert(name.to_string(), Some(v));
                }
            }
        }
        for name in d.bodies {
            let len = self.rng.gen_range(0..=3);
            let seq = self.statements(len, depth + 1);
            n.bodies.insert(name.to_string(), seq);
        }
    }

    fn value(&mut self, accepts: &str, depth: usize) -> Option<Node> {
        let choices: Vec<&str> = DEFS
            .iter()
            .filter(|d| d.output.is_some_and(|o| fits(o, accepts)))
            .map(|d| d.name)
            .collect();
        if !self.take() {
            return None;
        }
        let ty = *choices.choose(&mut self.rng).unwrap();
        let mut n = self.node(ty);
        self.fill_inputs(&mut n, depth);
        Some(n)
    }

    fn statements(&mut self, len: usize, depth: usize) -> Vec<Node> {
        let mut out = Vec::new();
        for _ in 0..len {
            if !self.take() {
                break;
            }
            let ty = *["print", "print", "set_var", "repeat", "if"].choose(&mut self.rng).unwrap();
            let mut n = self.node(ty);
            self.fill_inputs(&mut n, depth);
            out.push(n);
        }
        out
    }
}

/// A workspace for `seed`. Same seed, same workspace.
pub fn generate(seed: u64) -> Vec<StackSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stack_count = rng.gen_range(2..=4);
    let budget = rng.gen_range(stack_count + 2..=MAX_BLOCKS);
    let mut g = Gen {
        rng,
        budget: budget - stack_count,
        next_id: 0,
    };
    let mut letters: Vec<char> = ('A'..='F').collect();
    if g.rng.gen_bool(0.3) {
        letters.remove(g.rng.gen_range(0..2));
    }
    let mut stacks = Vec::new();
    for (i, letter) in letters.into_iter().take(stack_count).enumerate() {
        let seq = if g.rng.gen_bool(0.15) {
            let ty = *["number", "arithmetic", "compare", "text"].choose(&mut g.rng).unwrap();
            let mut n = g.node(ty);
            g.fill_inputs(&mut n, 1);
            vec![n]
        } else {
            g.budget += 1;
            let len = g.rng.gen_range(1..=4);
            let mut seq = g.statements(len, 1);
            if seq.is_empty() {
                let n = g.node("print");
                seq.push(n);
            }
            seq
        };
        let name = g.rng.gen_bool(0.2).then(|| format!("part {}", i + 1));
        stacks.push(StackSpec {
            label: letter.to_string(),
            name,
            x: i as i64 * 240 + g.rng.gen_range(0..40),
            y: g.rng.gen_range(0..300),
            seq,
        });
    }
    stacks
}

pub fn block_count(stacks: &[StackSpec]) -> usize {
    stacks.iter().map(|s| s.nodes().len()).sum()
}

pub fn max_depth(stacks: &[StackSpec]) -> usize {
    stacks
        .iter()
        .flat_map(|s| s.seq.iter())
        .map(|n| n.depth())
        .max()
        .unwrap_or(0)
}
