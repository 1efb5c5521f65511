use thiserror::Error;

/// Coarse category of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unreadable input: syntax, I/O.
    Format,
    /// Input parsed but violates a tangle invariant.
    Validation,
    /// A structural identity that must hold failed.
    Theorem,
    /// Computation could not be carried out with the given data.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {msg}")]
    Syntax {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("duplicate {which} parameter {value} shared by {first} and {second}")]
    DuplicateParameter {
        which: &'static str,
        value: f64,
        first: String,
        second: String,
    },
    #[error("orbit {orbit} is missing iterate {iterate}")]
    MissingIterate { orbit: String, iterate: i64 },
    #[error("point {point}: label has length {found}, surface requires {expected}")]
    LabelLength {
        point: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid tangle: {0}")]
    Invalid(String),
    #[error("{0} is not primary")]
    NotPrimary(String),
    #[error("tangle carries no geometry")]
    MissingGeometry,
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("grading of {point} is {value}, outside {{±1, ±2, ±3}}")]
    GradingRange { point: String, value: i64 },
    #[error("cannot grade {0}: no supplied or geometric grading")]
    Ungradable(String),
    #[error("supplied and geometric gradings disagree at {0:?}")]
    GradingConflict(Vec<String>),
    #[error("point lies on the loop")]
    OnLoop,
    #[error("no containment information for marked point {0}")]
    NoContainment(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("boundary depends on the window: {0}")]
    WindowUnstable(String),
    #[error("boundary does not square to zero in degree {0}")]
    BoundarySquare(i64),
    #[error("bigons do not share an endpoint: {0}")]
    EndpointMismatch(String),
    #[error("move rejected: {0}")]
    Move(String),
    #[error("identity violated: {0}")]
    Theorem(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. } => ErrorKind::Format,
            Error::DuplicateParameter { .. }
            | Error::MissingIterate { .. }
            | Error::LabelLength { .. }
            | Error::Invalid(_)
            | Error::GradingRange { .. }
            | Error::GradingConflict(_) => ErrorKind::Validation,
            Error::BoundarySquare(_) | Error::Theorem(_) => ErrorKind::Theorem,
            _ => ErrorKind::Computation,
        }
    }

    pub(crate) fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
