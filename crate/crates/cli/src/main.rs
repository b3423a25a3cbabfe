//! `eaf`: replay keystroke scripts, run programs, validate and format workspace files.

use std::fs;
use std::io::{IsTerminal, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use eaf_core::format;
use eaf_core::replay::{parse_script, replay_lines};
use eaf_core::runtime::{self, OutputStatus, DEFAULT_STEP_LIMIT};
use eaf_core::shortcuts::shortcuts_help;
use eaf_core::{Keymap, Session, Verbosity};

#[derive(Parser)]
#[command(name = "eaf", version, about = "Keyboard-accessible block workspace engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a keystroke script against a workspace and write the transcript.
    Replay {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Keymap override file (`chord = command` lines).
        #[arg(long)]
        keymap: Option<PathBuf>,
        #[arg(long, default_value = "standard")]
        verbosity: Verbosity,
        /// Transcript destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the program in a workspace and print its output.
    Run {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: u64,
    },
    /// Check a workspace file against the schema and structural invariants.
    Validate {
        #[arg(long)]
        workspace: PathBuf,
    },
    /// Rewrite a workspace file in canonical form.
    Fmt {
        #[arg(long)]
        workspace: PathBuf,
        /// Report whether the file is canonical without rewriting it.
        #[arg(long)]
        check: bool,
    },
    /// Print the shortcut listing, optionally with a keymap override file applied.
    Keys {
        #[arg(long)]
        keymap: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 1,
            error: error.into(),
        }
    }

    fn internal(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)
}

fn load_session(path: &Path) -> Result<Session, Failure> {
    let text = read(path)?;
    Session::load(&text)
        .with_context(|| format!("loading {}", path.display()))
        .map_err(Failure::input)
}

fn load_keymap(path: Option<&Path>) -> Result<Keymap, Failure> {
    let base = Keymap::default_keymap();
    match path {
        None => Ok(base),
        Some(p) => {
            let text = read(p)?;
            base.apply_overrides(&text)
                .with_context(|| format!("loading keymap {}", p.display()))
                .map_err(Failure::input)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::input),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout")
            .map_err(Failure::input),
    }
}

fn replay_cmd(
    workspace: &Path,
    script: &Path,
    keymap: Option<&Path>,
    verbosity: Verbosity,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut session = load_session(workspace)?;
    session.set_keymap(load_keymap(keymap)?);
    session.set_verbosity(verbosity);
    let text = read(script)?;
    let lines = parse_script(&text)
        .with_context(|| format!("parsing {}", script.display()))
        .map_err(Failure::input)?;
    let transcript = panic::catch_unwind(AssertUnwindSafe(|| replay_lines(&mut session, &lines)))
        .map_err(|_| Failure::internal(anyhow::anyhow!("engine panicked during replay")))?;
    let violations = session.workspace().validate();
    if let Some(v) = violations.first() {
        return Err(Failure::internal(anyhow::anyhow!(
            "workspace invariant broken after replay at {}",
            format::violation_path(v)
        )));
    }
    write_out(out, &transcript.to_json())
}

fn run_cmd(workspace: &Path, step_limit: u64) -> Result<(), Failure> {
    let session = load_session(workspace)?;
    let output = runtime::run(session.workspace(), step_limit);
    let mut text = output.lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    write_out(None, &text)?;
    match output.status {
        OutputStatus::Ok => Ok(()),
        status => Err(Failure::input(anyhow::anyhow!("program stopped: {status}"))),
    }
}

fn validate_cmd(workspace: &Path) -> Result<(), Failure> {
    let session = load_session(workspace)?;
    let violations = session.workspace().validate();
    if violations.is_empty() {
        return write_out(None, "ok\n");
    }
    let paths: Vec<String> = violations.iter().map(format::violation_path).collect();
    Err(Failure::input(anyhow::anyhow!(
        "schema violation at {}",
        paths.join(", ")
    )))
}

fn fmt_cmd(workspace: &Path, check: bool) -> Result<(), Failure> {
    let original = read(workspace)?;
    let session = load_session(workspace)?;
    let canonical = session.save();
    if canonical == original {
        return Ok(());
    }
    if check {
        return Err(Failure::input(anyhow::anyhow!(
            "{} is not in canonical form",
            workspace.display()
        )));
    }
    fs::write(workspace, canonical)
        .with_context(|| format!("writing {}", workspace.display()))
        .map_err(Failure::input)
}

fn keys_cmd(keymap: Option<&Path>) -> Result<(), Failure> {
    let keymap = load_keymap(keymap)?;
    write_out(None, &format!("{}\n", shortcuts_help(&keymap)))
}

fn report(failure: &Failure) {
    let styled = std::env::var_os("EAF_NO_COLOR").is_none() && std::io::stderr().is_terminal();
    let prefix = if styled { "\x1b[31merror\x1b[0m" } else { "error" };
    eprintln!("{prefix}: {:#}", failure.error);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Replay {
            workspace,
            script,
            keymap,
            verbosity,
            out,
        } => replay_cmd(workspace, script, keymap.as_deref(), *verbosity, out.as_deref()),
        Command::Run {
            workspace,
            step_limit,
        } => run_cmd(workspace, *step_limit),
        Command::Validate { workspace } => validate_cmd(workspace),
        Command::Fmt { workspace, check } => fmt_cmd(workspace, *check),
        Command::Keys { keymap } => keys_cmd(keymap.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            report(&failure);
            ExitCode::from(failure.code)
        }
    }
}
