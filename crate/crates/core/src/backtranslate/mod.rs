//! Paraphrase candidates by repeated round-trip translation through a pivot
//! language, with a caching, rate-limited, retrying client in front of a
//! pluggable provider and mechanical post-filters on the output.

mod cache;
mod generate;
pub mod http;
pub mod mock;
mod provider;
mod rate;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub use cache::{CacheEntry, CacheKey, TranslationCache, CACHE_FILE};
pub use generate::{
    reject_mixed_script, GeneratedPair, GenerationConfig, Generator, PairStatus, PostFilter,
};
pub use http::{HttpProvider, HttpProviderConfig};
pub use mock::{IdentityProvider, ReversalProvider, TableProvider};
pub use provider::{Lang, ProviderError, TranslationProvider};
pub use rate::TokenBucket;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("provider {provider} does not support {src}->{dst}")]
    UnsupportedPair { provider: String, src: Lang, dst: Lang },
    #[error("provider unreachable after {attempts} attempts: {last}")]
    Unreachable { attempts: u32, last: String },
    #[error("provider returned an empty translation")]
    EmptyResponse,
    #[error("{0}")]
    Rejected(String),
    #[error("translation cache: {0}")]
    Cache(String),
    #[error("provider configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub request_text: String,
    pub src: Lang,
    pub dst: Lang,
    pub response_text: String,
    pub provider_id: String,
    pub from_cache: bool,
    /// Unix milliseconds of the provider call that produced the response.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            base_delay_ms: 200,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (1-based).
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = self.multiplier.powi(attempt.saturating_sub(1) as i32);
        Duration::from_secs_f64(self.base_delay_ms as f64 * factor / 1000.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    Identity,
    Reversal,
    Table,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProviderSettings {
    pub kind: ProviderKind,
    /// Substitution tables for the `table` provider.
    pub table_path: Option<PathBuf>,
    pub http: HttpProviderConfig,
    /// Requests per second; non-positive disables limiting.
    pub rate: f64,
    pub retry: RetryPolicy,
    /// Directory of the persistent cache; in-memory only when unset.
    pub cache_dir: Option<PathBuf>,
}

impl Default for ProviderSettings {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Identity,
            table_path: None,
            http: HttpProviderConfig::default(),
            rate: 5.0,
            retry: RetryPolicy::default(),
            cache_dir: None,
        }
    }
}

impl ProviderSettings {
    pub fn build_provider(&self) -> Result<Arc<dyn TranslationProvider>, TranslateError> {
        Ok(match self.kind {
            ProviderKind::Identity => Arc::new(IdentityProvider),
            ProviderKind::Reversal => Arc::new(ReversalProvider),
            ProviderKind::Table => {
                let path = self
                    .table_path
                    .as_ref()
                    .ok_or_else(|| TranslateError::Config("table provider needs table_path".into()))?;
                Arc::new(TableProvider::from_tsv(path)?)
            }
            ProviderKind::Http => Arc::new(HttpProvider::new(self.http.clone())?),
        })
    }

    pub fn build_translator(&self) -> Result<Translator, TranslateError> {
        let cache = match &self.cache_dir {
            Some(dir) => TranslationCache::open(dir)?,
            None => TranslationCache::in_memory(),
        };
        Ok(Translator::new(self.build_provider()?, Arc::new(cache))
            .with_rate_limit(self.rate)
            .with_retry(self.retry))
    }
}

pub(crate) fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Cache-first client around a provider.
pub struct Translator {
    provider: Arc<dyn TranslationProvider>,
    cache: Arc<TranslationCache>,
    limiter: Option<TokenBucket>,
    retry: RetryPolicy,
    calls: AtomicUsize,
}

impl Translator {
    pub fn new(provider: Arc<dyn TranslationProvider>, cache: Arc<TranslationCache>) -> Self {
        Self {
            provider,
            cache,
            limiter: None,
            retry: RetryPolicy::default(),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn with_rate_limit(mut self, rate: f64) -> Self {
        self.limiter = (rate > 0.0).then(|| TokenBucket::new(rate));
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn provider_id(&self) -> &str {
        self.provider.id()
    }

    /// Number of requests actually sent to the provider (cache hits excluded).
    pub fn provider_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn cache(&self) -> &TranslationCache {
        &self.cache
    }

    pub fn translate(&self, text: &str, src: &Lang, dst: &Lang) -> Result<TranslationRecord, TranslateError> {
        let provider_id = self.provider.id().to_string();
        if !self.provider.supports(src, dst) {
            return Err(TranslateError::UnsupportedPair {
                provider: provider_id,
                src: src.clone(),
                dst: dst.clone(),
            });
        }
        let key = CacheKey::new(&provider_id, src, dst, text);
        let record = |response_text: String, from_cache: bool, timestamp: u64| TranslationRecord {
            request_text: text.to_string(),
            src: src.clone(),
            dst: dst.clone(),
            response_text,
            provider_id: provider_id.clone(),
            from_cache,
            timestamp,
        };
        if let Some(hit) = self.cache.get(&key) {
            return Ok(record(hit.response_text, true, hit.timestamp));
        }

        let attempts = self.retry.attempts.max(1);
        for attempt in 1..=attempts {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            self.calls.fetch_add(1, Ordering::Relaxed);
            match self.provider.translate(text, src, dst) {
                Ok(out) if out.trim().is_empty() => return Err(TranslateError::EmptyResponse),
                Ok(out) => {
                    let timestamp = now_millis();
                    self.cache.insert(
                        key,
                        CacheEntry {
                            response_text: out.clone(),
                            timestamp,
                        },
                    )?;
                    return Ok(record(out, false, timestamp));
                }
                Err(ProviderError::Permanent(msg)) => return Err(TranslateError::Rejected(msg)),
                Err(ProviderError::Transient(msg)) => {
                    if attempt == attempts {
                        return Err(TranslateError::Unreachable { attempts, last: msg });
                    }
                    log::debug!("transient failure (attempt {attempt}/{attempts}): {msg}");
                    std::thread::sleep(self.retry.delay(attempt));
                }
            }
        }
        unreachable!("retry loop returns on its final attempt")
    }

    /// Translate to `pivot` and back; returns the back-translation and both records.
    pub fn round_trip(
        &self,
        text: &str,
        src: &Lang,
        pivot: &Lang,
    ) -> Result<(String, Vec<TranslationRecord>), TranslateError> {
        let there = self.translate(text, src, pivot)?;
        let back = self.translate(&there.response_text, pivot, src)?;
        Ok((back.response_text.clone(), vec![there, back]))
    }
}
