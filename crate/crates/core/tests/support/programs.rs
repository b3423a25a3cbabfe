//! Reader for the hand-evaluated program expectations.

use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expected {
    pub status: String,
    pub steps: Option<u64>,
    pub lines: Vec<String>,
}

/// Parses `[name]` sections of `status:`, `steps:`, `repeat: N text` and output lines.
pub fn parse_expected(text: &str) -> BTreeMap<String, Expected> {
    let mut out: BTreeMap<String, Expected> = BTreeMap::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.to_string());
            out.insert(name.to_string(), Expected::default());
            continue;
        }
        let e = out.get_mut(current.as_ref().expect("section header first")).unwrap();
        if let Some(s) = line.strip_prefix("status: ") {
            e.status = s.to_string();
        } else if let Some(s) = line.strip_prefix("steps: ") {
            e.steps = Some(s.parse().unwrap());
        } else if let Some(s) = line.strip_prefix("repeat: ") {
            let (n, text) = s.split_once(' ').unwrap();
            e.lines.extend(std::iter::repeat_n(text.to_string(), n.parse().unwrap()));
        } else {
            e.lines.push(line.to_string());
        }
    }
    out
}
