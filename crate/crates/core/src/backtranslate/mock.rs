//! Deterministic in-process providers for tests and dry runs.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::provider::{Lang, ProviderError, TranslationProvider};
use super::TranslateError;

/// Returns its input unchanged.
#[derive(Debug, Clone, Default)]
pub struct IdentityProvider;

impl TranslationProvider for IdentityProvider {
    fn id(&self) -> &str {
        "identity"
    }

    fn supports(&self, _src: &Lang, _dst: &Lang) -> bool {
        true
    }

    fn translate(&self, text: &str, _src: &Lang, _dst: &Lang) -> Result<String, ProviderError> {
        Ok(text.to_string())
    }
}

/// Reverses the character order of its input.
#[derive(Debug, Clone, Default)]
pub struct ReversalProvider;

impl TranslationProvider for ReversalProvider {
    fn id(&self) -> &str {
        "reversal"
    }

    fn supports(&self, _src: &Lang, _dst: &Lang) -> bool {
        true
    }

    fn translate(&self, text: &str, _src: &Lang, _dst: &Lang) -> Result<String, ProviderError> {
        Ok(text.chars().rev().collect())
    }
}

/// Word-for-word substitution from per-direction lookup tables.
///
/// Each whitespace-separated chunk is split into leading punctuation, a core
/// and trailing punctuation; the core is replaced when the table for the
/// requested direction has an entry for it, otherwise it passes through.
/// Directions without a table are unsupported.
#[derive(Debug, Clone, Default)]
pub struct TableProvider {
    tables: HashMap<(Lang, Lang), HashMap<String, String>>,
}

impl TableProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_entry(mut self, src: &str, dst: &str, from: &str, to: &str) -> Self {
        self.insert(src.into(), dst.into(), from.into(), to.into());
        self
    }

    /// Make `src → dst` supported even when it has no entries.
    pub fn with_direction(mut self, src: &str, dst: &str) -> Self {
        self.tables.entry((src.into(), dst.into())).or_default();
        self
    }

    pub fn insert(&mut self, src: Lang, dst: Lang, from: String, to: String) {
        self.tables.entry((src, dst)).or_default().insert(from, to);
    }

    /// Load a UTF-8 file of `src<TAB>dst<TAB>from<TAB>to` lines; `#` starts a comment line.
    pub fn from_tsv(path: &Path) -> Result<Self, TranslateError> {
        let text = fs::read_to_string(path).map_err(|e| TranslateError::Config(format!("{}: {e}", path.display())))?;
        let mut provider = Self::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [src, dst, from, to] = cols[..] else {
                return Err(TranslateError::Config(format!(
                    "{}:{}: expected 4 tab-separated columns, found {}",
                    path.display(),
                    n + 1,
                    cols.len()
                )));
            };
            provider.insert(src.into(), dst.into(), from.to_string(), to.to_string());
        }
        Ok(provider)
    }
}

impl TranslationProvider for TableProvider {
    fn id(&self) -> &str {
        "table"
    }

    fn supports(&self, src: &Lang, dst: &Lang) -> bool {
        self.tables.contains_key(&(src.clone(), dst.clone()))
    }

    fn translate(&self, text: &str, src: &Lang, dst: &Lang) -> Result<String, ProviderError> {
        let table = self
            .tables
            .get(&(src.clone(), dst.clone()))
            .ok_or_else(|| ProviderError::Permanent(format!("no table for {src}->{dst}")))?;
        let out: Vec<String> = text
            .split_whitespace()
            .map(|chunk| {
                let start = chunk.find(|c: char| c.is_alphanumeric()).unwrap_or(chunk.len());
                let end = chunk
                    .rfind(|c: char| c.is_alphanumeric())
                    .map_or(start, |i| i + chunk[i..].chars().next().unwrap().len_utf8());
                if start >= end {
                    return chunk.to_string();
                }
                let core = &chunk[start..end];
                match table.get(core) {
                    Some(rep) => format!("{}{}{}", &chunk[..start], rep, &chunk[end..]),
                    None => chunk.to_string(),
                }
            })
            .collect();
        Ok(out.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_substitutes_cores_and_keeps_punctuation() {
        let p = TableProvider::new()
            .with_entry("hy", "en", "չարիք", "evil")
            .with_entry("hy", "en", "Կոռուպցիան", "Corruption");
        let out = p.translate("Կոռուպցիան չարիք է։", &"hy".into(), &"en".into()).unwrap();
        assert_eq!(out, "Corruption evil է։");
    }

    #[test]
    fn unsupported_direction() {
        let p = TableProvider::new().with_direction("hy", "en");
        assert!(p.supports(&"hy".into(), &"en".into()));
        assert!(!p.supports(&"en".into(), &"hy".into()));
        assert!(p.translate("x", &"en".into(), &"hy".into()).is_err());
    }

    #[test]
    fn loads_tsv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.tsv");
        fs::write(&path, "# comment\nhy\ten\tա\tA\nen\thy\tA\tա՛\n").unwrap();
        let p = TableProvider::from_tsv(&path).unwrap();
        let fwd = p.translate("ա բ", &"hy".into(), &"en".into()).unwrap();
        assert_eq!(fwd, "A բ");
        assert_eq!(p.translate(&fwd, &"en".into(), &"hy".into()).unwrap(), "ա՛ բ");

        fs::write(&path, "hy\ten\tա\n").unwrap();
        let err = TableProvider::from_tsv(&path).unwrap_err();
        assert!(err.to_string().contains(":1:"));
    }
}
