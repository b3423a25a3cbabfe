//! Keystroke scripts and the transcripts produced by replaying them.

use serde::{Deserialize, Serialize};

use crate::announce::Announcement;
use crate::session::Session;
use crate::shortcuts::{KeyChord, ShortcutError};

/// One script line: a chord and an optional quoted argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptLine {
    pub line: usize,
    pub chord: KeyChord,
    pub argument: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("script line {line}: {reason}")]
pub struct ScriptParseError {
    pub line: usize,
    pub reason: String,
}

fn parse_argument(text: &str) -> Result<String, String> {
    let inner = text
        .strip_prefix('"')
        .ok_or_else(|| "argument must be double-quoted".to_string())?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                let rest: String = chars.collect();
                if !rest.trim().is_empty() {
                    return Err(format!("unexpected text after argument: {}", rest.trim()));
                }
                return Ok(out);
            }
            '\\' => match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(c @ ('"' | '\\')) => out.push(c),
                Some(c) => return Err(format!("unknown escape \\{c}")),
                None => return Err("unterminated argument".to_string()),
            },
            c => out.push(c),
        }
    }
    Err("unterminated argument".to_string())
}

/// Parses a `.keys` script: one chord per line, `#` comment lines, blank lines skipped.
pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>, ScriptParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (chord_text, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((c, r)) => (c, r.trim()),
            None => (trimmed, ""),
        };
        let chord = KeyChord::parse(chord_text).map_err(|e: ShortcutError| ScriptParseError {
            line,
            reason: e.to_string(),
        })?;
        let argument = if rest.is_empty() {
            None
        } else {
            Some(parse_argument(rest).map_err(|reason| ScriptParseError { line, reason })?)
        };
        out.push(ScriptLine {
            line,
            chord,
            argument,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub chord: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub argument: Option<String>,
    pub command: String,
    pub announcements: Vec<Announcement>,
    pub state_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub initial_hash: String,
    pub entries: Vec<TranscriptEntry>,
    /// Canonical workspace after the last chord.
    pub final_workspace: serde_json::Value,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("transcripts serialize");
        text.push('\n');
        text
    }

    /// Hash after the last entry, or the initial hash for an empty script.
    pub fn final_hash(&self) -> &str {
        self.entries
            .last()
            .map_or(&self.initial_hash, |e| &e.state_hash)
    }

    /// Every announcement in order.
    pub fn announcements(&self) -> impl Iterator<Item = &Announcement> {
        self.entries.iter().flat_map(|e| e.announcements.iter())
    }
}

/// Applies pre-parsed script lines to `session`.
pub fn replay_lines(session: &mut Session, lines: &[ScriptLine]) -> Transcript {
    let initial_hash = session.state_hash();
    let entries = lines
        .iter()
        .map(|l| {
            let applied = session.apply(&l.chord, l.argument.as_deref());
            TranscriptEntry {
                chord: l.chord.to_string(),
                argument: l.argument.clone(),
                command: applied.dispatch.to_string(),
                announcements: applied.announcements,
                state_hash: session.state_hash(),
            }
        })
        .collect();
    Transcript {
        initial_hash,
        entries,
        final_workspace: crate::format::to_json(session.workspace()),
    }
}

/// Parses and replays a script.
pub fn replay(session: &mut Session, script: &str) -> Result<Transcript, ScriptParseError> {
    let lines = parse_script(script)?;
    Ok(replay_lines(session, &lines))
}
