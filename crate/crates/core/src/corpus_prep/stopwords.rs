use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::PrepError;

const DEFAULT_ARMENIAN: &str = include_str!("../../data/stopwords_hy.txt");

/// Unicode default case folding.
pub fn fold(text: &str) -> String {
    caseless::default_case_fold_str(text)
}

/// A case-folded stopword set.
///
/// The list format is UTF-8 text with one token per line; blank lines and
/// lines starting with `#` are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Stopwords {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled Armenian list.
    pub fn armenian() -> Self {
        Self::parse(DEFAULT_ARMENIAN)
    }

    pub fn parse(list: &str) -> Self {
        let words = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(fold)
            .collect();
        Self { words }
    }

    pub fn from_file(path: &Path) -> Result<Self, PrepError> {
        let text = fs::read_to_string(path).map_err(|source| PrepError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.words.contains(&fold(surface))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|w| fold(w.as_ref())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_list_loads() {
        let sw = Stopwords::armenian();
        assert!(sw.len() > 50);
        assert!(sw.contains("է"));
        assert!(sw.contains("Եվ") || sw.contains("և"));
        assert!(!sw.contains("Կոռուպցիան"));
    }

    #[test]
    fn lookup_is_case_folded() {
        let sw: Stopwords = ["The", "and"].into_iter().collect();
        assert!(sw.contains("the"));
        assert!(sw.contains("AND"));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let sw = Stopwords::parse("# header\n\n a \nb\n");
        assert_eq!(sw.len(), 2);
        assert!(!sw.contains("# header"));
    }
}
