use drfcheck_core::{Error, ErrorCategory};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Config,
    Data,
    Numerical,
    Internal,
}

impl Category {
    /// Process exit status for this category.
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 1,
            Category::Data => 2,
            Category::Numerical => 3,
            Category::Internal => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{category:?} error: {message}")]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        Self {
            category,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Category::Config, message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new(Category::Data, message)
    }

    /// Any library error raised while checking user input.
    pub fn as_config(e: Error) -> Self {
        Self::config(e.to_string())
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let category = match e.category() {
            ErrorCategory::Config => Category::Config,
            ErrorCategory::Data => Category::Data,
            ErrorCategory::Numerical => Category::Numerical,
            ErrorCategory::Internal => Category::Internal,
        };
        Self::new(category, e.to_string())
    }
}
