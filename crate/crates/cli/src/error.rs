use std::fmt;

use regimes_core::Error;

/// Process exit codes.
pub mod code {
    pub const OTHER: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const DATA: i32 = 4;
    pub const NUMERIC: i32 = 5;
    pub const FINGERPRINT: i32 = 6;
    pub const OUTPUT: i32 = 7;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(code::INPUT, message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new(code::DATA, message)
    }

    pub fn output(message: impl Into<String>) -> Self {
        Self::new(code::OUTPUT, message)
    }

    pub fn context(self, what: &str) -> Self {
        Self {
            code: self.code,
            message: format!("{what}: {}", self.message),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let c = match &e {
            Error::Io { .. } | Error::Parse { .. } | Error::Calendar { .. } => code::INPUT,
            Error::NonPositive { .. }
            | Error::ZeroDivision { .. }
            | Error::ZeroVariance(_)
            | Error::Dimension(_)
            | Error::Invalid(_)
            | Error::MissingHorizon(_)
            | Error::TooLarge(_)
            | Error::NonFinite(_) => code::DATA,
            Error::Underflow(_) | Error::Diverged { .. } | Error::Singular => code::NUMERIC,
            Error::Fingerprint { .. } => code::FINGERPRINT,
        };
        Self::new(c, e.to_string())
    }
}
