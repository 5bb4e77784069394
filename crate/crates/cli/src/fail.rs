//! Failure type carrying the process exit code.
//!
//! Exit codes: 0 success, 2 usage or validation, 3 resource cap exceeded,
//! 4 runtime numerical failure.

use std::fmt;
use std::path::PathBuf;

use gsw::Error as LibError;

#[derive(Debug)]
pub enum Fail {
    /// Bad flags or inputs; the message names the offending flag.
    Usage(String),
    /// An error surfaced by the library.
    Lib(LibError),
    /// The computation ran but produced something unusable.
    Numeric(String),
    /// Reading or writing a file failed.
    Io(PathBuf, std::io::Error),
}

pub type CliResult<T> = Result<T, Fail>;

impl Fail {
    pub fn exit_code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 2,
            Fail::Lib(e) => match e {
                LibError::CapExceeded { .. } => 3,
                LibError::NonFinite(_) | LibError::DegenerateFit(_) => 4,
                _ => 2,
            },
            Fail::Numeric(_) => 4,
            Fail::Io(..) => 2,
        }
    }
}

impl fmt::Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fail::Usage(msg) => write!(f, "{msg}"),
            Fail::Lib(e) => write!(f, "{e}"),
            Fail::Numeric(msg) => write!(f, "{msg}"),
            Fail::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<LibError> for Fail {
    fn from(e: LibError) -> Self {
        Fail::Lib(e)
    }
}
