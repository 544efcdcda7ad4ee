use thiserror::Error;
use zenodark::holonomy::ParseError;

/// Exit status for argument and usage problems.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures and IO.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] zenodark::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use zenodark::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(
                E::InvalidSector { .. }
                | E::InvalidCoupling(_)
                | E::ClosedFormUnavailable { .. }
                | E::InvalidSchedule(_)
                | E::Parse(_),
            ) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }

    /// A path parse error with the offending text and a caret under the
    /// failing byte.
    pub fn path(text: &str, err: &ParseError) -> Self {
        let mut msg = format!("invalid path: {err}");
        if let ParseError::Syntax { position, .. } = err {
            let col = text[..(*position).min(text.len())].chars().count();
            msg.push_str(&format!("\n  {text}\n  {}^", " ".repeat(col)));
        }
        CliError::Usage(msg)
    }
}
