//! Sentence pool preparation: document loading, sentence segmentation,
//! tokenization and the selection filters that keep only well-formed,
//! moderately long sentences.

mod filter;
mod load;
pub mod script;
pub mod segment;
pub mod stopwords;
pub mod tokenize;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use filter::{FilterConfig, FilterDecision, FilterReason, SelectionFilter};
pub use load::{load_documents, Diagnostic, IngestConfig, LoadReport};
pub use script::{text_script, Script};
pub use segment::{Segmenter, SegmenterConfig};
pub use stopwords::{fold, Stopwords};
pub use tokenize::{content_token_count, Token, TokenKind, Tokenizer};

#[derive(Debug, thiserror::Error)]
pub enum PrepError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid metadata pattern {pattern:?}: {source}")]
    Pattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
    #[error("invalid filter bounds: min {min} > max {max}")]
    Bounds { min: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub source_name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub sent_id: String,
    pub doc_id: String,
    pub index_in_doc: usize,
    pub text: String,
    pub tokens: Vec<Token>,
    pub content_token_count: usize,
}

impl Sentence {
    pub fn new(doc_id: &str, index_in_doc: usize, text: &str, tokenizer: &Tokenizer) -> Self {
        let tokens = tokenizer.tokenize(text);
        Self {
            sent_id: sentence_id(doc_id, index_in_doc),
            doc_id: doc_id.to_string(),
            index_in_doc,
            text: text.to_string(),
            content_token_count: content_token_count(&tokens),
            tokens,
        }
    }
}

/// Sentence ids sort in document order for documents with < 100000 sentences.
pub fn sentence_id(doc_id: &str, index: usize) -> String {
    format!("{doc_id}#{index:05}")
}

pub fn segment_sentences(doc: &Document, segmenter: &Segmenter, tokenizer: &Tokenizer) -> Vec<Sentence> {
    segmenter
        .split(&doc.text)
        .into_iter()
        .enumerate()
        .map(|(i, text)| Sentence::new(&doc.doc_id, i, text, tokenizer))
        .collect()
}

/// Collapse every whitespace run to one space and trim.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
