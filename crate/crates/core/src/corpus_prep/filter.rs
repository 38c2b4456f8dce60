use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{PrepError, Sentence, Token};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    pub min_content_tokens: usize,
    pub max_content_tokens: usize,
    /// A sentence matching any of these patterns is dropped as metadata.
    pub metadata_patterns: Vec<String>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_content_tokens: 6,
            max_content_tokens: 22,
            metadata_patterns: vec![
                // page reference followed or preceded by a year
                r"(?i)\bէջ\.?\s*\d+.*\b(?:1[89]|20)\d{2}\b".into(),
                r"(?i)\b(?:1[89]|20)\d{2}\b.*\bէջ\.?\s*\d+".into(),
                r"(?i)\b(?:pp?|page)\.?\s*\d+.*\b(?:1[89]|20)\d{2}\b".into(),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Kept,
    TooShort,
    TooLong,
    Repetition,
    MetadataLine,
}

impl FilterReason {
    pub const ALL: [FilterReason; 5] = [
        FilterReason::Kept,
        FilterReason::TooShort,
        FilterReason::TooLong,
        FilterReason::Repetition,
        FilterReason::MetadataLine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterReason::Kept => "kept",
            FilterReason::TooShort => "too_short",
            FilterReason::TooLong => "too_long",
            FilterReason::Repetition => "repetition",
            FilterReason::MetadataLine => "metadata_line",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub sent_id: String,
    pub kept: bool,
    pub reason: FilterReason,
}

#[derive(Debug, Clone)]
pub struct SelectionFilter {
    min: usize,
    max: usize,
    patterns: Vec<Regex>,
}

impl SelectionFilter {
    pub fn new(config: &FilterConfig) -> Result<Self, PrepError> {
        if config.min_content_tokens > config.max_content_tokens {
            return Err(PrepError::Bounds {
                min: config.min_content_tokens,
                max: config.max_content_tokens,
            });
        }
        let patterns = config
            .metadata_patterns
            .iter()
            .map(|p| {
                Regex::new(p).map_err(|source| PrepError::Pattern {
                    pattern: p.clone(),
                    source,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            min: config.min_content_tokens,
            max: config.max_content_tokens,
            patterns,
        })
    }

    /// Checks run in order: metadata, repetition, then the length bounds.
    pub fn classify(&self, sentence: &Sentence) -> FilterReason {
        if self.patterns.iter().any(|re| re.is_match(&sentence.text)) {
            FilterReason::MetadataLine
        } else if has_repeated_run(&sentence.tokens, 3) {
            FilterReason::Repetition
        } else if sentence.content_token_count < self.min {
            FilterReason::TooShort
        } else if sentence.content_token_count > self.max {
            FilterReason::TooLong
        } else {
            FilterReason::Kept
        }
    }

    /// Every input gets exactly one decision, in input order.
    pub fn apply(&self, sentences: Vec<Sentence>) -> (Vec<Sentence>, Vec<FilterDecision>) {
        let mut kept = Vec::new();
        let mut decisions = Vec::with_capacity(sentences.len());
        for sentence in sentences {
            let reason = self.classify(&sentence);
            decisions.push(FilterDecision {
                sent_id: sentence.sent_id.clone(),
                kept: reason == FilterReason::Kept,
                reason,
            });
            if reason == FilterReason::Kept {
                kept.push(sentence);
            }
        }
        (kept, decisions)
    }
}

/// True when `run` consecutive word tokens (punctuation and numbers skipped)
/// are identical after case folding and punctuation stripping.
pub fn has_repeated_run(tokens: &[Token], run: usize) -> bool {
    let words: Vec<String> = tokens.iter().filter(|t| t.is_word()).map(Token::normalized).collect();
    if run == 0 || words.len() < run {
        return false;
    }
    words.windows(run).any(|w| w.iter().all(|x| *x == w[0]))
}
