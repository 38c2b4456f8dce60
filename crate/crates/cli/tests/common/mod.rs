//! Synthetic corpora, translation tables and configs shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONSONANTS: [&str; 24] = [
    "բ", "գ", "դ", "զ", "թ", "ժ", "լ", "խ", "ծ", "կ", "հ", "ձ", "ղ", "ճ", "մ", "ն", "շ", "պ", "ռ", "ս", "վ", "տ", "ր", "ք",
];
const VOWELS: [&str; 5] = ["ա", "ե", "ի", "ո", "ու"];

pub const VOCAB: usize = 400;

/// Pseudo-Armenian word number `i`: three consonant-vowel syllables.
pub fn hy_word(i: usize) -> String {
    let mut n = i;
    let mut w = String::new();
    for _ in 0..3 {
        w.push_str(CONSONANTS[n % CONSONANTS.len()]);
        n /= CONSONANTS.len();
        w.push_str(VOWELS[n % VOWELS.len()]);
        n /= VOWELS.len();
    }
    w
}

/// Synonym of `hy_word(i)` produced by the round trip.
pub fn hy_synonym(i: usize) -> String {
    format!("{}ն", hy_word(i))
}

fn en_word(i: usize) -> String {
    let mut n = i;
    let mut w = String::from("en");
    loop {
        w.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break w;
        }
    }
}

/// Round-trip tables: most words come back unchanged, every fourth as a
/// synonym, a few stay in English and a few come back mixed-script.
pub fn write_tables(path: &Path) {
    let mut out = String::from("# src\tdst\tfrom\tto\n");
    for i in 0..VOCAB {
        let en = en_word(i);
        let _ = writeln!(out, "hy\ten\t{}\t{en}", hy_word(i));
        let _ = writeln!(out, "hy\ten\t{}\t{en}", hy_synonym(i));
        if i % 89 == 5 {
            continue;
        }
        let back = if i % 97 == 3 {
            format!("{en}աբան")
        } else if i % 4 == 0 {
            hy_synonym(i)
        } else {
            hy_word(i)
        };
        let _ = writeln!(out, "en\thy\t{en}\t{back}");
    }
    fs::write(path, out).unwrap();
}

/// One sentence of `len` content words, with the odd stopword and number.
pub fn sentence(rng: &mut ChaCha8Rng, len: usize) -> String {
    let mut words: Vec<String> = Vec::with_capacity(len + 2);
    for k in 0..len {
        words.push(hy_word(rng.random_range(0..VOCAB)));
        if k == 2 && rng.random_bool(0.3) {
            words.push("և".into());
        }
    }
    if rng.random_bool(0.1) {
        let at = rng.random_range(0..words.len());
        words.insert(at, rng.random_range(1..500u32).to_string());
    }
    let mut s = words.join(" ");
    s.push('։');
    s
}

/// `docs` documents of `per_doc` sentences under `<root>/corpus/news/`.
/// Roughly one sentence in eight falls outside the length limits or repeats
/// a word three times.
pub fn write_corpus(root: &Path, docs: usize, per_doc: usize, seed: u64) -> PathBuf {
    let dir = root.join("corpus").join("news");
    fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in 0..docs {
        let mut text = String::new();
        for _ in 0..per_doc {
            let roll = rng.random_range(0..100);
            let s = if roll < 4 {
                { let n = rng.random_range(2..6); sentence(&mut rng, n) }
            } else if roll < 8 {
                { let n = rng.random_range(23..30); sentence(&mut rng, n) }
            } else if roll < 12 {
                let w = hy_word(rng.random_range(0..VOCAB));
                format!("{w} {w} {w} {}", sentence(&mut rng, 6))
            } else {
                { let n = rng.random_range(6..18); sentence(&mut rng, n) }
            };
            text.push_str(&s);
            text.push(' ');
        }
        fs::write(dir.join(format!("doc{d:04}.txt")), text.trim_end()).unwrap();
    }
    root.join("corpus")
}

/// A config using the table provider, no rate limit and small quotas.
/// `positives` is the `build.positives` source.
pub fn write_config(root: &Path, positives: &str, extra: &str) -> PathBuf {
    write_tables(&root.join("tables.tsv"));
    let text = format!(
        r#"[ingest]
path = "corpus"

[provider]
kind = "table"
table_path = "tables.tsv"
rate = 0.0

[provider.retry]
attempts = 1
base_delay_ms = 0

[negatives.train]
consecutive = 40
random = 40

[negatives.test]
consecutive = 10
random = 10

[evaluation]
n_resamples = 500

[service]
annotators = ["ani", "aram", "lilit"]

[build]
positives = "{positives}"

[paths]
work_dir = "work"
{extra}"#
    );
    let path = root.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}
