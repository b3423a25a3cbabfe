//! Key chords, the keymap and chord dispatch.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// A non-modifier key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    /// A printable character; letters are stored upper case.
    Char(char),
    Esc,
    Enter,
    Delete,
    Backspace,
    Tab,
    Space,
    Up,
    Down,
    Left,
    Right,
    Home,
    End,
    F(u8),
}

const NAMED: &[(&str, Key)] = &[
    ("Esc", Key::Esc),
    ("Enter", Key::Enter),
    ("Delete", Key::Delete),
    ("Backspace", Key::Backspace),
    ("Tab", Key::Tab),
    ("Space", Key::Space),
    ("Up", Key::Up),
    ("Down", Key::Down),
    ("Left", Key::Left),
    ("Right", Key::Right),
    ("Home", Key::Home),
    ("End", Key::End),
];

const ALIASES: &[(&str, Key)] = &[
    ("escape", Key::Esc),
    ("return", Key::Enter),
    ("del", Key::Delete),
    ("arrowup", Key::Up),
    ("arrowdown", Key::Down),
    ("arrowleft", Key::Left),
    ("arrowright", Key::Right),
];

impl Key {
    fn parse(text: &str) -> Option<Key> {
        let mut chars = text.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if c.is_whitespace() || c.is_control() {
                return None;
            }
            return Some(Key::Char(c.to_uppercase().next().unwrap_or(c)));
        }
        let lower = text.to_ascii_lowercase();
        if let Some((_, k)) = NAMED
            .iter()
            .chain(ALIASES)
            .find(|(name, _)| name.eq_ignore_ascii_case(&lower))
        {
            return Some(*k);
        }
        let n: u8 = lower.strip_prefix('f')?.parse().ok()?;
        (1..=12).contains(&n).then_some(Key::F(n))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Char(c) => write!(f, "{c}"),
            Key::F(n) => write!(f, "F{n}"),
            named => {
                let name = NAMED
                    .iter()
                    .find(|(_, k)| k == named)
                    .map(|(n, _)| *n)
                    .expect("every named key is listed");
                f.write_str(name)
            }
        }
    }
}

/// A key plus modifiers. Canonical text orders modifiers Ctrl, Shift, Alt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyChord {
    pub ctrl: bool,
    pub shift: bool,
    pub alt: bool,
    pub key: Key,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ShortcutError {
    #[error("bad key chord {0:?}")]
    BadChord(String),
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("{0} is reserved for toggling keyboard accessibility")]
    ReservedChord(KeyChord),
    #[error("{0} is bound twice")]
    DuplicateChord(KeyChord),
}

impl KeyChord {
    pub const fn plain(key: Key) -> Self {
        KeyChord {
            ctrl: false,
            shift: false,
            alt: false,
            key,
        }
    }

    pub const fn letter(c: char) -> Self {
        KeyChord::plain(Key::Char(c))
    }

    pub const fn ctrl(mut self) -> Self {
        self.ctrl = true;
        self
    }

    pub const fn shift(mut self) -> Self {
        self.shift = true;
        self
    }

    pub const fn alt(mut self) -> Self {
        self.alt = true;
        self
    }

    /// The chord that can never be unbound.
    pub const RESERVED: KeyChord = KeyChord::letter('K').ctrl().shift();

    pub fn parse(text: &str) -> Result<KeyChord, ShortcutError> {
        let bad = || ShortcutError::BadChord(text.to_string());
        let text_trim = text.trim();
        // A trailing "+" is the plus key itself: "+", "Ctrl++".
        let (mods, key) = if text_trim == "+" {
            ("", "+")
        } else if let Some(rest) = text_trim.strip_suffix("++") {
            (rest, "+")
        } else {
            match text_trim.rsplit_once('+') {
                Some((m, k)) => (m, k),
                None => ("", text_trim),
            }
        };
        let mut chord = KeyChord::plain(Key::parse(key).ok_or_else(bad)?);
        if !mods.is_empty() {
            for m in mods.split('+') {
                let slot = match m.to_ascii_lowercase().as_str() {
                    "ctrl" | "control" => &mut chord.ctrl,
                    "shift" => &mut chord.shift,
                    "alt" | "option" => &mut chord.alt,
                    _ => return Err(bad()),
                };
                if *slot {
                    return Err(bad());
                }
                *slot = true;
            }
        }
        Ok(chord)
    }

    /// The character this chord types into a text field, if any.
    pub fn typed_char(&self) -> Option<char> {
        if self.ctrl || self.alt {
            return None;
        }
        match self.key {
            Key::Space => Some(' '),
            Key::Char(c) if c.is_alphabetic() && !self.shift => c.to_lowercase().next(),
            Key::Char(c) => Some(c),
            _ => None,
        }
    }
}

impl FromStr for KeyChord {
    type Err = ShortcutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KeyChord::parse(s)
    }
}

impl fmt::Display for KeyChord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctrl {
            f.write_str("Ctrl+")?;
        }
        if self.shift {
            f.write_str("Shift+")?;
        }
        if self.alt {
            f.write_str("Alt+")?;
        }
        write!(f, "{}", self.key)
    }
}

/// Every action a chord can trigger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandId {
    MoveUp,
    MoveLeft,
    MoveDown,
    MoveRight,
    MoveIn,
    MoveOut,
    JumpToStack(char),
    ToggleEditMode,
    CursorUp,
    CursorDown,
    CursorLeft,
    CursorRight,
    OpenToolbox,
    CloseToolbox,
    Locate,
    Cut,
    Copy,
    Paste,
    Delete,
    ToggleComment,
    Disconnect,
    ToggleAssistant,
    ToggleShortcuts,
    RenameStack,
    Run,
    ShowOutput,
    ToggleAccessibility,
    ZoomIn,
    ZoomOut,
    ZoomReset,
    /// Enter while the toolbox is open.
    Confirm,
    FieldInput(char),
    FieldBackspace,
    FieldCommit,
    FieldCancel,
}

const SIMPLE_COMMANDS: &[(&str, CommandId)] = &[
    ("MoveUp", CommandId::MoveUp),
    ("MoveLeft", CommandId::MoveLeft),
    ("MoveDown", CommandId::MoveDown),
    ("MoveRight", CommandId::MoveRight),
    ("MoveIn", CommandId::MoveIn),
    ("MoveOut", CommandId::MoveOut),
    ("ToggleEditMode", CommandId::ToggleEditMode),
    ("CursorUp", CommandId::CursorUp),
    ("CursorDown", CommandId::CursorDown),
    ("CursorLeft", CommandId::CursorLeft),
    ("CursorRight", CommandId::CursorRight),
    ("OpenToolbox", CommandId::OpenToolbox),
    ("CloseToolbox", CommandId::CloseToolbox),
    ("Locate", CommandId::Locate),
    ("Cut", CommandId::Cut),
    ("Copy", CommandId::Copy),
    ("Paste", CommandId::Paste),
    ("Delete", CommandId::Delete),
    ("ToggleComment", CommandId::ToggleComment),
    ("Disconnect", CommandId::Disconnect),
    ("ToggleAssistant", CommandId::ToggleAssistant),
    ("ToggleShortcuts", CommandId::ToggleShortcuts),
    ("RenameStack", CommandId::RenameStack),
    ("Run", CommandId::Run),
    ("ShowOutput", CommandId::ShowOutput),
    ("ToggleAccessibility", CommandId::ToggleAccessibility),
    ("ZoomIn", CommandId::ZoomIn),
    ("ZoomOut", CommandId::ZoomOut),
    ("ZoomReset", CommandId::ZoomReset),
    ("Confirm", CommandId::Confirm),
    ("FieldBackspace", CommandId::FieldBackspace),
    ("FieldCommit", CommandId::FieldCommit),
    ("FieldCancel", CommandId::FieldCancel),
];

impl fmt::Display for CommandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandId::JumpToStack(c) => write!(f, "JumpToStack({c})"),
            CommandId::FieldInput(c) => write!(f, "FieldInput({c})"),
            other => {
                let name = SIMPLE_COMMANDS
                    .iter()
                    .find(|(_, c)| c == other)
                    .map(|(n, _)| *n)
                    .expect("every command is listed");
                f.write_str(name)
            }
        }
    }
}

impl FromStr for CommandId {
    type Err = ShortcutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || ShortcutError::UnknownCommand(s.to_string());
        if let Some((_, c)) = SIMPLE_COMMANDS.iter().find(|(n, _)| *n == s) {
            return Ok(*c);
        }
        let arg = |prefix: &str| -> Option<char> {
            let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            let mut chars = inner.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Some(c),
                _ => None,
            }
        };
        if let Some(c) = arg("JumpToStack") {
            return if c.is_ascii_uppercase() {
                Ok(CommandId::JumpToStack(c))
            } else {
                Err(unknown())
            };
        }
        if let Some(c) = arg("FieldInput") {
            return Ok(CommandId::FieldInput(c));
        }
        Err(unknown())
    }
}

/// Groups used by the shortcuts listing, in listing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scope {
    Navigation,
    Mode,
    Workspace,
    Toolbox,
    Announce,
    EditOps,
    Assist,
    Execution,
    Settings,
    View,
    Field,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Navigation => "Navigation",
            Scope::Mode => "Mode",
            Scope::Workspace => "Workspace",
            Scope::Toolbox => "Toolbox",
            Scope::Announce => "Announce",
            Scope::EditOps => "Edit ops",
            Scope::Assist => "Assist",
            Scope::Execution => "Execution",
            Scope::Settings => "Settings",
            Scope::View => "View",
            Scope::Field => "Field",
        }
    }
}

impl CommandId {
    pub fn scope(self) -> Scope {
        use CommandId::*;
        match self {
            MoveUp | MoveLeft | MoveDown | MoveRight | MoveIn | MoveOut | JumpToStack(_) => {
                Scope::Navigation
            }
            ToggleEditMode => Scope::Mode,
            CursorUp | CursorDown | CursorLeft | CursorRight => Scope::Workspace,
            OpenToolbox | CloseToolbox | Confirm => Scope::Toolbox,
            Locate => Scope::Announce,
            Cut | Copy | Paste | Delete | ToggleComment | Disconnect => Scope::EditOps,
            ToggleAssistant | ToggleShortcuts | RenameStack => Scope::Assist,
            Run | ShowOutput => Scope::Execution,
            ToggleAccessibility => Scope::Settings,
            ZoomIn | ZoomOut | ZoomReset => Scope::View,
            FieldInput(_) | FieldBackspace | FieldCommit | FieldCancel => Scope::Field,
        }
    }

    /// Short spoken description for the shortcuts listing.
    pub fn description(self) -> String {
        use CommandId::*;
        let text = match self {
            MoveUp => "move up to the previous block",
            MoveLeft => "move left to the previous element",
            MoveDown => "move down to the next block",
            MoveRight => "move right to the next element",
            MoveIn => "move in to the first nested element",
            MoveOut => "move out to the parent",
            JumpToStack(c) => return format!("jump to stack {c}"),
            ToggleEditMode => "toggle Edit mode",
            CursorUp => "move workspace cursor up",
            CursorDown => "move workspace cursor down",
            CursorLeft => "move workspace cursor left",
            CursorRight => "move workspace cursor right",
            OpenToolbox => "open toolbox",
            CloseToolbox => "close toolbox",
            Locate => "announce cursor location",
            Cut => "cut selected block",
            Copy => "copy selected block",
            Paste => "paste at current connection",
            Delete => "delete selected block",
            ToggleComment => "add or hide comment",
            Disconnect => "disconnect at cursor",
            ToggleAssistant => "toggle navigational assistant",
            ToggleShortcuts => "toggle shortcuts list",
            RenameStack => "name current stack",
            Run => "run the program",
            ShowOutput => "read the output",
            ToggleAccessibility => "enable or disable keyboard accessibility",
            ZoomIn => "zoom in",
            ZoomOut => "zoom out",
            ZoomReset => "reset zoom",
            Confirm => "insert selected toolbox block",
            FieldInput(c) => return format!("type {c}"),
            FieldBackspace => "erase last character",
            FieldCommit => "save field",
            FieldCancel => "cancel field edit",
        };
        text.to_string()
    }

    /// Commands that change the workspace document when they succeed.
    pub fn may_mutate(self) -> bool {
        use CommandId::*;
        matches!(
            self,
            Cut | Paste | Delete | ToggleComment | Disconnect | RenameStack | Confirm | FieldCommit
        )
    }
}

/// Result of looking up a chord.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dispatch {
    Command(CommandId),
    /// Not handled; the host keeps its default behavior.
    PassThrough,
}

impl fmt::Display for Dispatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dispatch::Command(c) => write!(f, "{c}"),
            Dispatch::PassThrough => f.write_str("PassThrough"),
        }
    }
}

/// Session state that affects routing before keymap lookup.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DispatchContext {
    pub field_editing: bool,
    pub toolbox_open: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Keymap {
    bindings: BTreeMap<KeyChord, CommandId>,
    pub enabled: bool,
}

const DEFAULT_BINDINGS: &[(&str, CommandId)] = &[
    ("W", CommandId::MoveUp),
    ("A", CommandId::MoveLeft),
    ("S", CommandId::MoveDown),
    ("D", CommandId::MoveRight),
    ("F", CommandId::MoveIn),
    ("Q", CommandId::MoveOut),
    ("E", CommandId::ToggleEditMode),
    ("Shift+W", CommandId::CursorUp),
    ("Shift+S", CommandId::CursorDown),
    ("Shift+A", CommandId::CursorLeft),
    ("Shift+D", CommandId::CursorRight),
    ("T", CommandId::OpenToolbox),
    ("Esc", CommandId::CloseToolbox),
    ("C", CommandId::Locate),
    ("Ctrl+X", CommandId::Cut),
    ("Ctrl+C", CommandId::Copy),
    ("Ctrl+V", CommandId::Paste),
    ("Delete", CommandId::Delete),
    ("Ctrl+/", CommandId::ToggleComment),
    ("Shift+X", CommandId::Disconnect),
    ("Shift+H", CommandId::ToggleAssistant),
    ("Shift+K", CommandId::ToggleShortcuts),
    ("Shift+I", CommandId::RenameStack),
    ("Shift+R", CommandId::Run),
    ("Shift+O", CommandId::ShowOutput),
    ("Ctrl+Shift+K", CommandId::ToggleAccessibility),
    ("+", CommandId::ZoomIn),
    ("-", CommandId::ZoomOut),
    ("0", CommandId::ZoomReset),
];

impl Default for Keymap {
    fn default() -> Self {
        Keymap::default_keymap()
    }
}

impl Keymap {
    pub fn default_keymap() -> Keymap {
        let mut bindings: BTreeMap<KeyChord, CommandId> = DEFAULT_BINDINGS
            .iter()
            .map(|(chord, cmd)| (KeyChord::parse(chord).expect("default chord"), *cmd))
            .collect();
        for c in 'A'..='Z' {
            bindings.insert(KeyChord::letter(c).alt(), CommandId::JumpToStack(c));
        }
        Keymap {
            bindings,
            enabled: true,
        }
    }

    /// A keymap holding only the reserved toggle.
    pub fn minimal() -> Keymap {
        Keymap {
            bindings: BTreeMap::from([(KeyChord::RESERVED, CommandId::ToggleAccessibility)]),
            enabled: true,
        }
    }

    pub fn lookup(&self, chord: &KeyChord) -> Option<CommandId> {
        self.bindings.get(chord).copied()
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&KeyChord, &CommandId)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// First chord (in chord order) bound to `command`.
    pub fn chord_for(&self, command: CommandId) -> Option<KeyChord> {
        self.bindings
            .iter()
            .find(|(_, c)| **c == command)
            .map(|(k, _)| *k)
    }

    /// Binds `chord` to `command`, replacing whatever the chord did before.
    pub fn remap(&self, chord: &str, command: &str) -> Result<Keymap, ShortcutError> {
        let chord = KeyChord::parse(chord)?;
        let command: CommandId = command.parse()?;
        self.remap_parsed(chord, Some(command))
    }

    /// Removes the binding of `chord`.
    pub fn unbind(&self, chord: &str) -> Result<Keymap, ShortcutError> {
        self.remap_parsed(KeyChord::parse(chord)?, None)
    }

    fn remap_parsed(&self, chord: KeyChord, command: Option<CommandId>) -> Result<Keymap, ShortcutError> {
        if chord == KeyChord::RESERVED && command != Some(CommandId::ToggleAccessibility) {
            return Err(ShortcutError::ReservedChord(chord));
        }
        let mut next = self.clone();
        match command {
            Some(c) => next.bindings.insert(chord, c),
            None => next.bindings.remove(&chord),
        };
        Ok(next)
    }

    /// Applies a keymap override file on top of this keymap.
    ///
    /// Each line is `chord = command` or `chord = none`; `#` starts a comment line.
    pub fn apply_overrides(&self, text: &str) -> Result<Keymap, KeymapFileError> {
        let mut out = self.clone();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |kind| KeymapFileError { line, kind };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            // Split on the last '=' so "Ctrl+= = ZoomIn" style chords survive.
            let (chord, command) = trimmed
                .rsplit_once('=')
                .ok_or_else(|| err(ShortcutError::BadChord(trimmed.to_string())))?;
            let chord = KeyChord::parse(chord.trim()).map_err(err)?;
            if seen.insert(chord, line).is_some() {
                return Err(err(ShortcutError::DuplicateChord(chord)));
            }
            let command = command.trim();
            let command = if command.eq_ignore_ascii_case("none") {
                None
            } else {
                Some(command.parse().map_err(err)?)
            };
            out = out.remap_parsed(chord, command).map_err(err)?;
        }
        Ok(out)
    }

    /// Maps a chord to a command given the session's routing state.
    pub fn dispatch(&self, chord: &KeyChord, ctx: DispatchContext) -> Dispatch {
        if *chord == KeyChord::RESERVED {
            return Dispatch::Command(CommandId::ToggleAccessibility);
        }
        if !self.enabled {
            return Dispatch::PassThrough;
        }
        if ctx.field_editing {
            match chord.key {
                Key::Enter if !chord.ctrl && !chord.alt => {
                    return Dispatch::Command(CommandId::FieldCommit)
                }
                Key::Esc => return Dispatch::Command(CommandId::FieldCancel),
                Key::Backspace => return Dispatch::Command(CommandId::FieldBackspace),
                _ => {
                    if let Some(c) = chord.typed_char() {
                        return Dispatch::Command(CommandId::FieldInput(c));
                    }
                }
            }
        }
        if ctx.toolbox_open && chord.key == Key::Enter && !chord.ctrl && !chord.alt && !chord.shift {
            return Dispatch::Command(CommandId::Confirm);
        }
        match self.lookup(chord) {
            Some(c) => Dispatch::Command(c),
            None => Dispatch::PassThrough,
        }
    }

    /// One line per binding, grouped by scope: `Scope: chord = description`.
    ///
    /// A complete set of Alt+letter jumps collapses to a single `Alt+[A-Z]` line.
    pub fn help_lines(&self) -> Vec<String> {
        let all_jumps = ('A'..='Z').all(|c| {
            self.lookup(&KeyChord::letter(c).alt()) == Some(CommandId::JumpToStack(c))
        });
        let mut entries: Vec<(Scope, CommandId, String)> = Vec::new();
        for (chord, cmd) in &self.bindings {
            if all_jumps && matches!(cmd, CommandId::JumpToStack(_)) && *chord == KeyChord::letter(cmd_letter(*cmd)).alt() {
                continue;
            }
            entries.push((cmd.scope(), *cmd, chord.to_string()));
        }
        if all_jumps {
            entries.push((
                Scope::Navigation,
                CommandId::JumpToStack('A'),
                "Alt+[A-Z]".to_string(),
            ));
        }
        entries.sort();
        entries
            .into_iter()
            .map(|(scope, cmd, chord)| {
                let desc = if chord == "Alt+[A-Z]" {
                    "jump to the stack with that letter".to_string()
                } else {
                    cmd.description()
                };
                format!("{}: {} = {}", scope.name(), chord, desc)
            })
            .collect()
    }
}

fn cmd_letter(cmd: CommandId) -> char {
    match cmd {
        CommandId::JumpToStack(c) => c,
        _ => '\0',
    }
}

/// The shortcuts listing announced by the help command.
pub fn shortcuts_help(keymap: &Keymap) -> String {
    let usable = keymap
        .bindings()
        .any(|(_, c)| *c != CommandId::ToggleAccessibility);
    if !keymap.enabled || !usable {
        return "Keyboard accessibility disabled".to_string();
    }
    keymap.help_lines().join("\n")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("keymap line {line}: {kind}")]
pub struct KeymapFileError {
    pub line: usize,
    pub kind: ShortcutError,
}
