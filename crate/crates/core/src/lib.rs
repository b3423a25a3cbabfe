//! Engine for keyboard-only, screen-reader friendly editing of block-based programs.
//!
//! A [`Session`](session::Session) owns a [`Workspace`](workspace::Workspace) of labeled
//! stacks, a cursor, the Navigation/Edit mode and a clipboard. Hosts feed it key chords
//! and receive [`Announcement`](announce::Announcement)s destined for a screen reader.

pub mod announce;
pub mod defs;
pub mod editing;
pub mod format;
pub mod labeling;
pub mod navigation;
pub mod replay;
pub mod runtime;
pub mod session;
pub mod shortcuts;
pub mod tree;
pub mod workspace;

pub use announce::{Announcement, Category, Politeness, Verbosity};
pub use defs::{BlockSet, FieldValue, ValueType};
pub use editing::Mode;
pub use labeling::Label;
pub use navigation::CursorLocation;
pub use replay::{replay, Transcript};
pub use session::Session;
pub use shortcuts::{CommandId, Dispatch, KeyChord, Keymap};
pub use workspace::{BlockId, ConnectionRef, ElementRef, Point, Workspace, WorkspaceError};
