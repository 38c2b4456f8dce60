//! Writing-system classification of characters and tokens.

use serde::{Deserialize, Serialize};

/// Writing system of a token, derived from its alphabetic characters only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Script {
    Armenian,
    Latin,
    Cyrillic,
    /// No alphabetic characters at all (digits, punctuation, symbols).
    DigitOrNeutral,
    Other,
    /// Alphabetic characters from two or more scripts inside one token.
    Mixed,
}

/// Script of a single alphabetic character; `None` for non-alphabetic ones.
pub fn char_script(c: char) -> Option<Script> {
    if !c.is_alphabetic() {
        return None;
    }
    let cp = c as u32;
    let script = match cp {
        0x0531..=0x058F | 0xFB13..=0xFB17 => Script::Armenian,
        0x0041..=0x005A
        | 0x0061..=0x007A
        | 0x00AA
        | 0x00BA
        | 0x00C0..=0x00D6
        | 0x00D8..=0x00F6
        | 0x00F8..=0x024F
        | 0x1E00..=0x1EFF
        | 0x2C60..=0x2C7F
        | 0xA720..=0xA7FF
        | 0xFB00..=0xFB06
        | 0xFF21..=0xFF3A
        | 0xFF41..=0xFF5A => Script::Latin,
        0x0400..=0x052F | 0x1C80..=0x1C8F | 0x2DE0..=0x2DFF | 0xA640..=0xA69F => Script::Cyrillic,
        _ => Script::Other,
    };
    Some(script)
}

/// Script of a whole string: the single script of its alphabetic characters,
/// `Mixed` when there are several, `DigitOrNeutral` when there are none.
pub fn text_script(text: &str) -> Script {
    let mut found: Option<Script> = None;
    for script in text.chars().filter_map(char_script) {
        match found {
            None => found = Some(script),
            Some(s) if s == script => {}
            Some(_) => return Script::Mixed,
        }
    }
    found.unwrap_or(Script::DigitOrNeutral)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_single_scripts() {
        assert_eq!(text_script("Կարինեն"), Script::Armenian);
        assert_eq!(text_script("genocide"), Script::Latin);
        assert_eq!(text_script("Москва"), Script::Cyrillic);
        assert_eq!(text_script("2008"), Script::DigitOrNeutral);
        assert_eq!(text_script("%-"), Script::DigitOrNeutral);
        assert_eq!(text_script("東京"), Script::Other);
    }

    #[test]
    fn digits_and_punctuation_are_neutral() {
        assert_eq!(text_script("COVID-19"), Script::Latin);
        assert_eq!(text_script("100%-ով"), Script::Armenian);
    }

    #[test]
    fn detects_mixed() {
        assert_eq!(text_script("genocideաբանություն"), Script::Mixed);
        assert_eq!(text_script("Мoсква"), Script::Mixed);
    }
}
