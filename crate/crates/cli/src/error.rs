use serde_json::json;

/// Front-end failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(sympwig::Error),
    Validation { error: String, detail: String },
    Internal(String),
}

impl CliError {
    pub fn validation(error: &str, detail: impl Into<String>) -> Self {
        CliError::Validation { error: error.into(), detail: detail.into() }
    }

    /// 2 for invalid input, 3 for an exhausted search, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(sympwig::Error::SearchExhausted(_)) => 3,
            CliError::Lib(_) | CliError::Validation { .. } => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Lib(e) => json!({ "error": e.kind(), "detail": e.to_string() }),
            CliError::Validation { error, detail } => json!({ "error": error, "detail": detail }),
            CliError::Internal(detail) => json!({ "error": "Internal", "detail": detail }),
        }
    }
}

impl From<sympwig::Error> for CliError {
    fn from(e: sympwig::Error) -> Self {
        CliError::Lib(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        assert_eq!(CliError::from(sympwig::Error::SearchExhausted("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(sympwig::Error::NonFinite).exit_code(), 2);
        assert_eq!(CliError::validation("MalformedJson", "x").exit_code(), 2);
        assert_eq!(CliError::Internal("x".into()).exit_code(), 1);
        let j = CliError::from(sympwig::Error::FormsCoincide).to_json();
        assert_eq!(j["error"], "FormsCoincide");
    }
}
