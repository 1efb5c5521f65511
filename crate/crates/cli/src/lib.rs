//! Command-line front end for `tanglefloer`.
//!
//! [`run`] does all the work and returns the captured output, so the binary
//! is a thin wrapper and tests can drive commands in-process.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use tanglefloer::ErrorKind;

mod commands;
pub mod machine;
mod sketch;

pub use sketch::render_svg;

/// Worker-count cap for the internal thread pool.
pub const THREADS_ENV: &str = "TANGLEFLOER_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_THEOREM: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Parser)]
#[command(name = "tanglefloer", version, about = "Homoclinic Floer homology of planar tangles")]
pub struct Cli {
    /// Append a machine-readable JSON block to the report.
    #[arg(long, global = true)]
    pub machine: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Signs {
    M,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Orient {
    #[value(name = "u+")]
    UPlus,
    #[value(name = "u-")]
    UMinus,
    #[value(name = "s+")]
    SPlus,
    #[value(name = "s-")]
    SMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Primary,
    Semi,
    Chaotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapName {
    Henon,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a tangle file and report its classification and grading.
    Validate { file: PathBuf },
    /// Primary homology.
    Homology {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "m")]
        signs: Signs,
        /// Global orientation for n-signs.
        #[arg(long, value_enum, default_value = "u+")]
        orient: Orient,
        /// Work with the n-th iterate of the map.
        #[arg(short = 'n', long, default_value_t = 1)]
        power: i64,
        /// Print the boundary matrices.
        #[arg(long)]
        dump: bool,
        /// Also compute the equivariant homology over Q[T, T^-1].
        #[arg(long)]
        equivariant: bool,
    },
    /// Semi-primary homology.
    Semi {
        file: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1)]
        power: i64,
        #[arg(long)]
        dump: bool,
    },
    /// Chaotic homology (signs suppressed on bigons around periodic points).
    Chaotic {
        file: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1)]
        power: i64,
        #[arg(long)]
        dump: bool,
    },
    /// Euler characteristics of the chaotic homology of iterates and the zeta series.
    Zeta {
        file: PathBuf,
        #[arg(short = 'n', long = "terms", default_value_t = 3)]
        terms: usize,
    },
    /// Cohomology, checked against the homology of the inverse map.
    Cohomology {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "primary")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "m")]
        signs: Signs,
        #[arg(long, value_enum, default_value = "u+")]
        orient: Orient,
    },
    /// Compare homology of the map with that of an iterate.
    Iterate {
        file: PathBuf,
        #[arg(short = 'n', long)]
        power: i64,
        #[arg(long, value_enum, default_value = "primary")]
        variant: VariantArg,
        /// Print the iterated tangle instead of the comparison.
        #[arg(long)]
        emit: bool,
    },
    /// Apply a move script and check invariance after each move.
    Move {
        file: PathBuf,
        script: PathBuf,
        /// Write the resulting tangle here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare the primary homology of two tangles.
    Invariance { before: PathBuf, after: PathBuf },
    /// Trace the invariant manifolds of a built-in map into a tangle file.
    Trace {
        #[arg(long, value_enum, default_value = "henon")]
        map: MapName,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        /// Arclength grown along each branch.
        #[arg(long, default_value_t = 10.0)]
        budget: f64,
        /// Longest polyline segment.
        #[arg(long, default_value_t = 0.01)]
        lmax: f64,
        /// Largest turning angle between segments (radians).
        #[arg(long, default_value_t = 0.2)]
        thetamax: f64,
        /// Iterates kept on each side of the representative.
        #[arg(long)]
        window: Option<i64>,
        /// Also run a refinement study with this many levels.
        #[arg(long)]
        converge: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render a tangle as SVG.
    Sketch {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 800)]
        width: u32,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<tanglefloer::Error> for Failure {
    fn from(e: tanglefloer::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Format => EXIT_FORMAT,
            ErrorKind::Theorem => EXIT_THEOREM,
            ErrorKind::Validation | ErrorKind::Computation => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

/// Output collected by a command before it is returned.
#[derive(Debug, Default)]
pub struct Output {
    pub text: String,
    pub diagnostics: String,
    pub machine: Option<serde_json::Value>,
    pub exit_code: i32,
}

impl Output {
    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn note(&mut self, s: impl AsRef<str>) {
        self.diagnostics.push_str(s.as_ref());
        self.diagnostics.push('\n');
    }
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FORMAT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), rendered)
            } else {
                (rendered, String::new())
            };
            return CommandResult {
                exit_code: code,
                stdout,
                stderr,
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            return CommandResult {
                exit_code: EXIT_FORMAT,
                stdout: String::new(),
                stderr: format!("error: thread pool: {e}\n"),
            }
        }
    };
    pool.install(|| execute(&cli))
}

fn execute(cli: &Cli) -> CommandResult {
    let mut out = Output::default();
    let name = commands::name(&cli.command);
    match commands::dispatch(&cli.command, &mut out) {
        Ok(()) => {}
        Err(f) => {
            out.exit_code = f.code;
            out.note(format!("error: {}", f.message));
            out.machine = Some(match out.machine.take() {
                Some(mut m) => {
                    m["error"] = serde_json::json!(f.message);
                    m
                }
                None => machine::failure(name, &f),
            });
        }
    }
    let mut stdout = out.text;
    if cli.machine {
        let block = out.machine.unwrap_or_else(|| machine::bare(name));
        stdout.push_str(&machine::render(block, out.exit_code));
    }
    CommandResult {
        exit_code: out.exit_code,
        stdout,
        stderr: out.diagnostics,
    }
}
