//! Whitespace tokenizer with punctuation peeling.
//!
//! Rules, applied to each whitespace-separated chunk:
//!
//! 1. Leading and trailing characters that are neither letters nor digits are
//!    peeled off, one punctuation token per character.
//! 2. The remaining core (from the first to the last alphanumeric character)
//!    is a single token, so internal hyphens, apostrophes and Armenian
//!    intra-word marks keep a word intact: `100%-ով` stays one token.
//! 3. A core with at least one letter is a `Word`; otherwise it is a `Number`.
//! 4. A chunk without any alphanumeric character becomes punctuation tokens.
//!
//! Scripts are assigned from the token's letters only (see [`text_script`]).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::script::{text_script, Script};
use super::stopwords::{fold, Stopwords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Number,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub script: Script,
    pub is_stopword: bool,
}

impl Token {
    pub fn is_punctuation(&self) -> bool {
        self.kind == TokenKind::Punctuation
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// Counts towards the sentence length filters.
    pub fn is_content(&self) -> bool {
        !self.is_punctuation() && !self.is_stopword
    }

    /// Case-folded surface with every non-alphanumeric character removed.
    pub fn normalized(&self) -> String {
        fold(&self.surface)
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    stopwords: Arc<Stopwords>,
}

impl Tokenizer {
    pub fn new(stopwords: Arc<Stopwords>) -> Self {
        Self { stopwords }
    }

    pub fn stopwords(&self) -> &Stopwords {
        &self.stopwords
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        for chunk in text.split_whitespace() {
            self.tokenize_chunk(chunk, &mut tokens);
        }
        tokens
    }

    fn tokenize_chunk(&self, chunk: &str, out: &mut Vec<Token>) {
        let first = chunk.char_indices().find(|(_, c)| c.is_alphanumeric());
        let Some((start, _)) = first else {
            out.extend(chunk.chars().map(punct));
            return;
        };
        let (last, last_char) = chunk
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_alphanumeric())
            .expect("chunk has an alphanumeric char");
        let end = last + last_char.len_utf8();

        out.extend(chunk[..start].chars().map(punct));
        let core = &chunk[start..end];
        let kind = if core.chars().any(char::is_alphabetic) {
            TokenKind::Word
        } else {
            TokenKind::Number
        };
        out.push(Token {
            surface: core.to_string(),
            kind,
            script: text_script(core),
            is_stopword: kind == TokenKind::Word && self.stopwords.contains(core),
        });
        out.extend(chunk[end..].chars().map(punct));
    }
}

fn punct(c: char) -> Token {
    Token {
        surface: c.to_string(),
        kind: TokenKind::Punctuation,
        script: Script::DigitOrNeutral,
        is_stopword: false,
    }
}

/// Number of tokens that are neither punctuation nor stopwords.
pub fn content_token_count(tokens: &[Token]) -> usize {
    tokens.iter().filter(|t| t.is_content()).count()
}
