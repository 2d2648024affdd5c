//! Exit codes, error reports and CSV formatting.

use std::fmt::Write as _;

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    CheckFailure = 1,
    InvalidInput = 2,
    RuntimeAbort = 3,
}

/// A failure reported as machine-readable JSON on stderr.
#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub key: Option<String>,
    pub exit: Exit,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            kind: "invalid_input".into(),
            message: message.into(),
            key: None,
            exit: Exit::InvalidInput,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            kind: "io".into(),
            message: message.into(),
            key: None,
            exit: Exit::RuntimeAbort,
        }
    }

    pub fn with_key(mut self, key: impl Into<String>) -> Self {
        self.key = Some(key.into());
        self
    }

    /// Wraps a JSON decoding error, pulling out the offending key when serde names one.
    pub fn from_schema(e: serde_json::Error) -> Self {
        let message = e.to_string();
        let key = ["unknown field `", "missing field `", "duplicate field `"]
            .iter()
            .find_map(|prefix| {
                let start = message.find(prefix)? + prefix.len();
                let len = message[start..].find('`')?;
                Some(message[start..start + len].to_string())
            });
        Self {
            kind: "schema".into(),
            message,
            key,
            exit: Exit::InvalidInput,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "key": self.key,
                "exit_code": self.exit as i32,
            }
        })
    }
}

impl From<vortex_panel::Error> for CliError {
    fn from(e: vortex_panel::Error) -> Self {
        use vortex_panel::Error::*;
        let exit = match e {
            InvalidArgument(_) | Domain(_) | SizeMismatch { .. } => Exit::InvalidInput,
            SingularEvaluation { .. } | NumericalSingularity(_) | Collision { .. } | BoundaryCollision { .. } => {
                Exit::RuntimeAbort
            }
        };
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            key: None,
            exit,
        }
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip binary64.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty for `None`.
pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn csv_line(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "{}", cells.join(","));
}

/// What a command produced. `primary` is the main artifact (CSV or JSON text);
/// `summary` always exists and doubles as the artifact when `primary` is `None`.
pub struct Outcome {
    pub primary: Option<String>,
    pub summary: Value,
    pub exit: Exit,
}
