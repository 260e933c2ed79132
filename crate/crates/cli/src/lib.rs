//! The `rkbs` command-line tool.
//!
//! Exit codes: 0 success, 1 a computed negative verdict (the document is
//! still printed), 2 usage, parse, configuration or operational errors.

use std::ffi::OsString;

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use rkbs::config::{ActionSpec, ConfigError, OutputFormat, SessionConfig};

pub mod doc;
pub mod parse;

mod commands;
mod selftest;

use doc::Document;
use parse::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Operation(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Config(_) => "config",
            CliError::Operation(_) => "operation",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rkbs", version, about = "Self-similar k-graphs and Baumslag-Solitar semigroups")]
struct Cli {
    /// Session config: a JSON file, or inline JSON starting with `{`.
    #[arg(long, global = true)]
    config: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration cap for path sets.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the configured instance and check its axioms.
    Validate,
    /// Normal form `e_μ a^ℓ` of a word.
    Nf {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Product of two words.
    Mul {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// Right least common multiple.
    Lcm {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// `a^g · μ` and `a^g|_μ`.
    Act {
        #[arg(allow_hyphen_values = true)]
        g: String,
        path: String,
    },
    /// Periodicity, simplicity and pure infiniteness.
    Report,
    /// Is `(μ, g, ν)` a cycline triple?
    Cycline {
        mu: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
        nu: String,
    },
    /// The bijection `φ_{p,q}` realizing a central unitary.
    Center { p: String, q: String },
    /// Affine realization of the ×p,×q semigroup.
    Furstenberg { p: usize, q: usize },
    /// Exact computations in the *-algebra.
    Staralg {
        #[command(subcommand)]
        op: StarCommand,
    },
    /// Randomized self-checks of every module.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum StarCommand {
    /// Evaluate an expression and print its canonical form.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    Mul {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// `ω(xy) = ω(y σ_{i}(x))`.
    Kms {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// `V_{p,q}`: unitary and central?
    Center { p: String, q: String },
    /// Check a built-in isomorphism: `flip-bs` or `square-flip`.
    Hom {
        pair: String,
        #[arg(default_value_t = 2)]
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn default_config() -> SessionConfig {
    SessionConfig::new(ActionSpec::ProductOdometers { sizes: vec![2, 3] })
}

fn load_config(cli: &Cli) -> Result<SessionConfig, CliError> {
    let mut cfg = match cli.config.as_deref() {
        None => default_config(),
        Some(s) if s.trim_start().starts_with('{') => SessionConfig::from_json(s)?,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
            SessionConfig::from_json(&text)?
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(cap) = cli.cap {
        cfg.cap = cap;
    }
    if let Some(depth) = cli.depth {
        cfg.depth = depth;
    }
    if cli.json {
        cfg.format = OutputFormat::Json;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &SessionConfig) -> Result<Document, CliError> {
    use commands as c;
    match &cli.command {
        Command::Validate => return c::validate(cfg),
        Command::Furstenberg { p, q } => return c::furstenberg(*p, *q),
        Command::Staralg {
            op: StarCommand::Hom { pair, n },
        } => return c::star_hom(pair, *n),
        Command::Selftest => return Ok(selftest::run(cfg)),
        _ => {}
    }
    let ss = cfg.build()?;
    match &cli.command {
        Command::Nf { word } => c::nf(&ss, word),
        Command::Mul { x, y } => c::mul(&ss, x, y),
        Command::Lcm { x, y } => c::lcm(&ss, x, y),
        Command::Act { g, path } => c::act(&ss, g, path),
        Command::Report => c::report(&ss),
        Command::Cycline { mu, g, nu } => {
            let depth = cli.depth.unwrap_or(5);
            c::cycline(&ss, mu, g, nu, depth, cfg.seed)
        }
        Command::Center { p, q } => c::center(&ss, p, q),
        Command::Staralg { op } => match op {
            StarCommand::Eval { expr } => c::star_eval(&ss, expr),
            StarCommand::Mul { x, y } => c::star_mul(&ss, x, y),
            StarCommand::Kms { x, y } => c::star_kms(&ss, x, y),
            StarCommand::Center { p, q } => c::star_center(&ss, p, q),
            StarCommand::Hom { .. } => unreachable!("handled above"),
        },
        Command::Validate | Command::Furstenberg { .. } | Command::Selftest => unreachable!("handled above"),
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return RunOutput { code, stdout, stderr };
        }
    };
    let json_mode = cli.json;
    let outcome = load_config(&cli).and_then(|cfg| {
        let json = cfg.format == OutputFormat::Json;
        dispatch(&cli, &cfg).map(|d| (d, json))
    });
    match outcome {
        Ok((doc, json)) => RunOutput {
            code: doc.exit_code(),
            stdout: if json { doc.json() } else { doc.text() },
            stderr: String::new(),
        },
        Err(e) => {
            let stderr = if json_mode {
                let v = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
                format!("{}\n", serde_json::to_string_pretty(&v).expect("diagnostic serializes"))
            } else {
                format!("error ({}): {e}\n", e.kind())
            };
            RunOutput {
                code: 2,
                stdout: String::new(),
                stderr,
            }
        }
    }
}
