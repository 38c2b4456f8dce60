//! Generic JSON-over-HTTP translation provider.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::provider::{Lang, ProviderError, TranslationProvider};
use super::TranslateError;

/// How to build the request body and where to find the translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HttpProviderConfig {
    pub id: String,
    pub endpoint: String,
    /// Environment variable holding the API key; no auth header when unset.
    pub api_key_env: Option<String>,
    pub auth_header: String,
    /// Prefix for the key in the auth header, e.g. `Bearer`. Empty for a bare key.
    pub auth_scheme: String,
    pub text_field: String,
    pub src_field: String,
    pub dst_field: String,
    /// Extra constant fields merged into every request body.
    pub extra_fields: Map<String, Value>,
    /// Dot-separated path into the response, numeric segments index arrays:
    /// `data.translations.0.translatedText`.
    pub response_path: String,
    pub timeout_secs: u64,
    /// Supported `[src, dst]` pairs; empty means any pair.
    pub language_pairs: Vec<(String, String)>,
}

impl Default for HttpProviderConfig {
    fn default() -> Self {
        Self {
            id: "http".into(),
            endpoint: String::new(),
            api_key_env: None,
            auth_header: "Authorization".into(),
            auth_scheme: "Bearer".into(),
            text_field: "q".into(),
            src_field: "source".into(),
            dst_field: "target".into(),
            extra_fields: Map::new(),
            response_path: "translatedText".into(),
            timeout_secs: 30,
            language_pairs: Vec::new(),
        }
    }
}

pub struct HttpProvider {
    config: HttpProviderConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(config: HttpProviderConfig) -> Result<Self, TranslateError> {
        if config.endpoint.is_empty() {
            return Err(TranslateError::Config("http provider needs an endpoint".into()));
        }
        let api_key = match &config.api_key_env {
            Some(var) => Some(
                std::env::var(var)
                    .map_err(|_| TranslateError::Config(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .build()
            .into();
        Ok(Self { config, api_key, agent })
    }

    fn body(&self, text: &str, src: &Lang, dst: &Lang) -> Value {
        let mut body = self.config.extra_fields.clone();
        body.insert(self.config.text_field.clone(), Value::from(text));
        body.insert(self.config.src_field.clone(), Value::from(src.as_str()));
        body.insert(self.config.dst_field.clone(), Value::from(dst.as_str()));
        Value::Object(body)
    }
}

/// Follow a dot path through objects and arrays.
pub fn extract_path<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').filter(|s| !s.is_empty()).try_fold(value, |v, seg| match v {
        Value::Object(map) => map.get(seg),
        Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    })
}

impl TranslationProvider for HttpProvider {
    fn id(&self) -> &str {
        &self.config.id
    }

    fn supports(&self, src: &Lang, dst: &Lang) -> bool {
        self.config.language_pairs.is_empty()
            || self
                .config
                .language_pairs
                .iter()
                .any(|(s, d)| s == src.as_str() && d == dst.as_str())
    }

    fn translate(&self, text: &str, src: &Lang, dst: &Lang) -> Result<String, ProviderError> {
        let mut req = self.agent.post(&self.config.endpoint);
        if let Some(key) = &self.api_key {
            let value = if self.config.auth_scheme.is_empty() {
                key.clone()
            } else {
                format!("{} {key}", self.config.auth_scheme)
            };
            req = req.header(self.config.auth_header.as_str(), value);
        }
        let mut resp = req
            .send_json(self.body(text, src, dst))
            .map_err(|e| ProviderError::Transient(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err(ProviderError::Transient(format!("HTTP {status}")));
        }
        if status >= 400 {
            let detail = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(ProviderError::Permanent(format!("HTTP {status}: {detail}")));
        }
        let json: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::Permanent(format!("invalid JSON response: {e}")))?;
        match extract_path(&json, &self.config.response_path) {
            Some(Value::String(s)) => Ok(s.clone()),
            _ => Err(ProviderError::Permanent(format!(
                "response has no string at {}",
                self.config.response_path
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn extracts_nested_paths() {
        let v = json!({"data": {"translations": [{"translatedText": "hi"}]}});
        assert_eq!(extract_path(&v, "data.translations.0.translatedText"), Some(&json!("hi")));
        assert_eq!(extract_path(&v, "data.translations.1"), None);
        assert_eq!(extract_path(&v, "data.missing"), None);
    }

    #[test]
    fn builds_body_from_template() {
        let mut cfg = HttpProviderConfig {
            endpoint: "http://127.0.0.1:9/translate".into(),
            ..Default::default()
        };
        cfg.extra_fields.insert("format".into(), json!("text"));
        let p = HttpProvider::new(cfg).unwrap();
        let body = p.body("բարև", &"hy".into(), &"en".into());
        assert_eq!(body, json!({"q": "բարև", "source": "hy", "target": "en", "format": "text"}));
    }

    #[test]
    fn missing_endpoint_or_key_is_a_config_error() {
        assert!(HttpProvider::new(HttpProviderConfig::default()).is_err());
        let cfg = HttpProviderConfig {
            endpoint: "http://localhost".into(),
            api_key_env: Some("PARACORP_TEST_SURELY_UNSET_KEY".into()),
            ..Default::default()
        };
        assert!(HttpProvider::new(cfg).is_err());
    }

    #[test]
    fn unreachable_endpoint_is_transient() {
        let cfg = HttpProviderConfig {
            endpoint: "http://127.0.0.1:9/translate".into(),
            timeout_secs: 2,
            ..Default::default()
        };
        let p = HttpProvider::new(cfg).unwrap();
        let err = p.translate("x", &"hy".into(), &"en".into()).unwrap_err();
        assert!(matches!(err, ProviderError::Transient(_)));
    }
}
