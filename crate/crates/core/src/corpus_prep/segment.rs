//! Rule-based sentence splitter.
//!
//! A terminator ends a sentence only when it is followed by whitespace or the
//! end of text, after absorbing any run of further terminators and closing
//! quotes/brackets. A `.` that closes a listed abbreviation never ends a
//! sentence. Boundary errors that slip through are left to the length filters.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::stopwords::fold;

/// Armenian full stop.
pub const ARMENIAN_FULL_STOP: char = '\u{0589}';

const CLOSERS: &[char] = &['»', '"', '\'', ')', ']', '}', '”', '’', '›'];
const OPENERS: &[char] = &['«', '"', '\'', '(', '[', '{', '“', '‘', '‹'];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SegmenterConfig {
    pub terminators: Vec<char>,
    pub abbreviations: Vec<String>,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            terminators: vec![ARMENIAN_FULL_STOP, '?', '!', '…', '.'],
            abbreviations: ["Եր.", "էջ.", "թ.", "թթ.", "տ.", "պ.", "Ս.", "Ն.", "ՀՀ.", "Mr.", "Dr.", "e.g.", "i.e."]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Segmenter {
    terminators: Vec<char>,
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::new(&SegmenterConfig::default())
    }
}

impl Segmenter {
    pub fn new(config: &SegmenterConfig) -> Self {
        Self {
            terminators: config.terminators.clone(),
            abbreviations: config.abbreviations.iter().map(|a| fold(a)).collect(),
        }
    }

    fn is_terminator(&self, c: char) -> bool {
        self.terminators.contains(&c)
    }

    /// Split `text` into trimmed, non-empty sentence spans.
    pub fn split<'a>(&self, text: &'a str) -> Vec<&'a str> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut spans = Vec::new();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if !self.is_terminator(c) {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < chars.len() && (self.is_terminator(chars[j].1) || CLOSERS.contains(&chars[j].1)) {
                j += 1;
            }
            let at_break = j == chars.len() || chars[j].1.is_whitespace();
            let is_abbrev = c == '.' && j == i + 1 && self.ends_abbreviation(&text[start..pos + 1]);
            if at_break && !is_abbrev {
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                let span = text[start..end].trim();
                if !span.is_empty() {
                    spans.push(span);
                }
                start = end;
            }
            i = j;
        }
        let tail = text[start..].trim();
        if !tail.is_empty() {
            spans.push(tail);
        }
        spans
    }

    fn ends_abbreviation(&self, prefix: &str) -> bool {
        let word = prefix
            .rsplit(char::is_whitespace)
            .next()
            .unwrap_or("")
            .trim_start_matches(OPENERS);
        !word.is_empty() && self.abbreviations.contains(&fold(word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_armenian_sentences() {
        let seg = Segmenter::default();
        assert_eq!(seg.split("Ա։ Բ։"), vec!["Ա։", "Բ։"]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        let seg = Segmenter::default();
        assert_eq!(seg.split("  առանց վերջակետի տեքստ "), vec!["առանց վերջակետի տեքստ"]);
    }

    #[test]
    fn abbreviation_does_not_split() {
        // "Եր." is listed, so the only boundary is the final '։'.
        let seg = Segmenter::default();
        assert_eq!(seg.split("Եր. 2008, էջ 97։"), vec!["Եր. 2008, էջ 97։"]);
    }

    #[test]
    fn unlisted_abbreviation_splits() {
        let seg = Segmenter::new(&SegmenterConfig {
            abbreviations: vec![],
            ..SegmenterConfig::default()
        });
        assert_eq!(seg.split("Եր. 2008, էջ 97։"), vec!["Եր.", "2008, էջ 97։"]);
    }

    #[test]
    fn decimal_point_is_not_a_boundary() {
        let seg = Segmenter::default();
        assert_eq!(seg.split("Հոդված 300.1-ը։ Հաջորդը։").len(), 2);
    }

    #[test]
    fn absorbs_closing_quotes_and_runs() {
        let seg = Segmenter::default();
        assert_eq!(seg.split("Նա ասաց «այո»։ Իսկ դու?! Ոչ…"), vec!["Նա ասաց «այո»։", "Իսկ դու?!", "Ոչ…"]);
        assert_eq!(seg.split("«Գնա՛։» Գնաց։"), vec!["«Գնա՛։»", "Գնաց։"]);
    }

    #[test]
    fn empty_text_has_no_sentences() {
        assert!(Segmenter::default().split("   ").is_empty());
    }

    #[test]
    fn custom_terminators() {
        let seg = Segmenter::new(&SegmenterConfig {
            terminators: vec![':'],
            abbreviations: vec![],
        });
        assert_eq!(seg.split("Ա: Բ. Գ:"), vec!["Ա:", "Բ. Գ:"]);
    }
}
