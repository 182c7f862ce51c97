use std::fmt;

use serde::{Deserialize, Serialize};

/// Finding severity. Ordered `Info < Warn < Block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Info,
    Warn,
    Block,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "Info",
            Severity::Warn => "Warn",
            Severity::Block => "Block",
        })
    }
}

/// A validation or pooling-compatibility observation with a stable code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatFinding {
    pub severity: Severity,
    pub code: String,
    pub field: String,
    pub message: String,
    #[serde(default)]
    pub campaigns: Vec<String>,
}

impl CompatFinding {
    pub fn new(
        severity: Severity,
        code: impl Into<String>,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        CompatFinding {
            severity,
            code: code.into(),
            field: field.into(),
            message: message.into(),
            campaigns: Vec::new(),
        }
    }

    pub fn info(code: &str, field: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, code, field, message)
    }

    pub fn warn(code: &str, field: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Warn, code, field, message)
    }

    pub fn block(code: &str, field: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Block, code, field, message)
    }

    pub fn with_campaigns<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.campaigns = ids.into_iter().map(Into::into).collect();
        self
    }

    pub fn is_block(&self) -> bool {
        self.severity == Severity::Block
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("finding serializes")
    }
}

impl fmt::Display for CompatFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} ({}): {}",
            self.severity, self.code, self.field, self.message
        )
    }
}
