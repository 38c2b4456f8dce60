use std::fmt;

use serde::{Deserialize, Serialize};

/// ISO-style language code such as `hy` or `en`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lang(pub String);

impl Lang {
    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Lang {
    fn from(code: &str) -> Self {
        Self(code.to_string())
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    /// Worth retrying: timeouts, throttling, 5xx.
    #[error("transient provider failure: {0}")]
    Transient(String),
    #[error("provider rejected the request: {0}")]
    Permanent(String),
}

/// A machine translation backend.
pub trait TranslationProvider: Send + Sync {
    fn id(&self) -> &str;

    fn supports(&self, src: &Lang, dst: &Lang) -> bool;

    /// Translate `text`; the output is returned verbatim to callers.
    fn translate(&self, text: &str, src: &Lang, dst: &Lang) -> Result<String, ProviderError>;
}
