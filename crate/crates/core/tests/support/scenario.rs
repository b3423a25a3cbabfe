//! Scripted replay cases read from `.scn` files.
//!
//! ```text
//! case: move into the loop body
//! category: navigation
//! stack: A: repeat(10){ print("hi") }
//! > Alt+A
//! = Stack A, block 1 of 4, repeat 10 times
//! > F
//! ~ times input
//! final: same
//! ```
//!
//! Expectation lines after a `>` chord apply to that chord's announcements, in order:
//! `= text` exact, `~ text` substring, `! text` exact and assertive. A chord must be
//! matched in full unless `...` follows, and `\n` in expected text is a line break.
//! `cmd: Name` checks the dispatched command, `same` and `changed` check the state hash
//! against the previous entry.
//! `final: same` keeps the initial state; `final: empty` is an empty workspace;
//! `final:` followed by `stack:`-style lines prefixed `final-stack:` gives the result.

use std::path::Path;

use eaf_core::replay::{parse_script, replay_lines};
use eaf_core::{Keymap, Politeness, Session, Verbosity};

use super::dsl::{canonical_text, hash_text, parse_stacks};

#[derive(Clone, Debug, PartialEq)]
pub enum Expect {
    Exact(String),
    Contains(String),
    Assertive(String),
}

#[derive(Clone, Debug, Default)]
pub struct Step {
    pub line: usize,
    pub chord: String,
    pub expects: Vec<Expect>,
    pub open_ended: bool,
    pub command: Option<String>,
    pub hash: Option<bool>,
}

#[derive(Clone, Debug)]
pub enum Final {
    Same,
    Stacks(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct Case {
    pub file: String,
    pub line: usize,
    pub name: String,
    pub category: String,
    pub verbosity: Verbosity,
    pub keymap: Vec<String>,
    pub stacks: Vec<String>,
    pub steps: Vec<Step>,
    pub fin: Option<Final>,
}

pub fn parse_file(name: &str, text: &str) -> Result<Vec<Case>, String> {
    let mut cases: Vec<Case> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end();
        let err = |m: &str| format!("{name}:{line}: {m}");
        if l.trim().is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("case:") {
            cases.push(Case {
                file: name.to_string(),
                line,
                name: rest.trim().to_string(),
                category: String::new(),
                verbosity: Verbosity::Standard,
                keymap: Vec::new(),
                stacks: Vec::new(),
                steps: Vec::new(),
                fin: None,
            });
            continue;
        }
        let case = cases.last_mut().ok_or_else(|| err("text before first case"))?;
        if let Some(rest) = l.strip_prefix("category:") {
            case.category = rest.trim().to_string();
        } else if let Some(rest) = l.strip_prefix("verbosity:") {
            case.verbosity = rest.trim().parse().map_err(|e: String| err(&e))?;
        } else if let Some(rest) = l.strip_prefix("keymap:") {
            case.keymap.push(rest.trim().to_string());
        } else if let Some(rest) = l.strip_prefix("stack:") {
            case.stacks.push(rest.trim().to_string());
        } else if let Some(rest) = l.strip_prefix("> ") {
            case.steps.push(Step {
                line,
                chord: rest.trim().to_string(),
                ..Step::default()
            });
        } else if let Some(rest) = l.strip_prefix("= ") {
            last_step(case, err("expectation before any chord"))?.expects.push(Expect::Exact(unescape(rest)));
        } else if let Some(rest) = l.strip_prefix("~ ") {
            last_step(case, err("expectation before any chord"))?.expects.push(Expect::Contains(unescape(rest)));
        } else if let Some(rest) = l.strip_prefix("! ") {
            last_step(case, err("expectation before any chord"))?.expects.push(Expect::Assertive(unescape(rest)));
        } else if l == "..." {
            last_step(case, err("expectation before any chord"))?.open_ended = true;
        } else if let Some(rest) = l.strip_prefix("cmd:") {
            last_step(case, err("expectation before any chord"))?.command = Some(rest.trim().to_string());
        } else if l == "same" {
            last_step(case, err("expectation before any chord"))?.hash = Some(false);
        } else if l == "changed" {
            last_step(case, err("expectation before any chord"))?.hash = Some(true);
        } else if l == "final: same" {
            case.fin = Some(Final::Same);
        } else if l == "final: empty" {
            case.fin = Some(Final::Stacks(Vec::new()));
        } else if let Some(rest) = l.strip_prefix("final-stack:") {
            match &mut case.fin {
                Some(Final::Stacks(lines)) => lines.push(rest.trim().to_string()),
                _ => case.fin = Some(Final::Stacks(vec![rest.trim().to_string()])),
            }
        } else {
            return Err(err(&format!("unrecognized line: {l}")));
        }
    }
    Ok(cases)
}

fn unescape(text: &str) -> String {
    text.replace("\\n", "\n")
}

fn last_step(case: &mut Case, err: String) -> Result<&mut Step, String> {
    case.steps.last_mut().ok_or(err)
}

pub fn load_dir(dir: &Path) -> Vec<Case> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let name = p.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(&p).unwrap();
        out.extend(parse_file(&name, &text).unwrap_or_else(|e| panic!("{e}")));
    }
    out
}

/// Runs one case; `Err` describes the first mismatch.
pub fn run(case: &Case) -> Result<(), String> {
    let at = |line: usize, m: String| format!("{}:{} [{}]: {m}", case.file, line, case.name);
    if case.category.is_empty() {
        return Err(at(case.line, "missing category".into()));
    }
    let fin = case
        .fin
        .as_ref()
        .ok_or_else(|| at(case.line, "missing final state".into()))?;
    if case.steps.iter().all(|s| s.expects.is_empty()) {
        return Err(at(case.line, "no announcement expectations".into()));
    }
    let initial = parse_stacks(case.stacks.iter().map(|s| s.as_str())).map_err(|e| at(case.line, e))?;
    let initial_text = canonical_text(&initial);
    let mut session = Session::load(&initial_text).map_err(|e| at(case.line, format!("load: {e}")))?;
    if !case.keymap.is_empty() {
        let km = Keymap::default_keymap()
            .apply_overrides(&case.keymap.join("\n"))
            .map_err(|e| at(case.line, e.to_string()))?;
        session.set_keymap(km);
    }
    session.set_verbosity(case.verbosity);
    let script: String = case.steps.iter().map(|s| format!("{}\n", s.chord)).collect();
    let lines = parse_script(&script).map_err(|e| at(case.line, e.to_string()))?;
    let transcript = replay_lines(&mut session, &lines);
    if transcript.initial_hash != hash_text(&initial_text) {
        return Err(at(case.line, "initial hash differs from the notation's file".into()));
    }
    let mut previous = transcript.initial_hash.clone();
    for (step, entry) in case.steps.iter().zip(&transcript.entries) {
        let got: Vec<&str> = entry.announcements.iter().map(|a| a.text.as_str()).collect();
        let fail = |m: String| Err(at(step.line, format!("{} -> {m}; got {:?}", step.chord, got)));
        if let Some(cmd) = &step.command {
            if &entry.command != cmd {
                return fail(format!("command {} expected {cmd}", entry.command));
            }
        }
        if step.expects.len() > got.len() || (!step.open_ended && step.expects.len() != got.len()) {
            return fail(format!("{} announcements expected", step.expects.len()));
        }
        for (k, (e, a)) in step.expects.iter().zip(&entry.announcements).enumerate() {
            let ok = match e {
                Expect::Exact(t) => &a.text == t,
                Expect::Contains(t) => a.text.contains(t.as_str()),
                Expect::Assertive(t) => &a.text == t && a.politeness == Politeness::Assertive,
            };
            if !ok {
                return fail(format!("announcement {k} expected {e:?}"));
            }
        }
        if let Some(changed) = step.hash {
            if (entry.state_hash != previous) != changed {
                return fail(format!("hash changed = {}", !changed));
            }
        }
        previous = entry.state_hash.clone();
    }
    let expected_text = match fin {
        Final::Same => initial_text,
        Final::Stacks(lines) => {
            let stacks = parse_stacks(lines.iter().map(|s| s.as_str())).map_err(|e| at(case.line, e))?;
            canonical_text(&stacks)
        }
    };
    let actual = session.save();
    if actual != expected_text {
        return Err(at(
            case.line,
            format!("final workspace differs\nexpected:\n{expected_text}\nactual:\n{actual}"),
        ));
    }
    if transcript.final_hash() != hash_text(&expected_text) {
        return Err(at(case.line, "final hash differs".into()));
    }
    if !session.workspace().validate().is_empty() {
        return Err(at(case.line, "workspace invalid after replay".into()));
    }
    Ok(())
}
