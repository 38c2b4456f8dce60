//! Synthetic non-paraphrase pairs from consecutive or random sentences.
//!
//! "Consecutive" means adjacent among the kept sentences of one document:
//! sentences removed by the selection filters are no longer in the pool.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{pair_key, DatasetError, Label, LabeledPair, Origin};
use crate::corpus_prep::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quota {
    pub consecutive: usize,
    pub random: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NegativeQuotas {
    pub train: Quota,
    pub test: Quota,
}

impl Default for NegativeQuotas {
    fn default() -> Self {
        Self {
            train: Quota {
                consecutive: 1330,
                random: 1330,
            },
            test: Quota {
                consecutive: 150,
                random: 150,
            },
        }
    }
}

/// Kept sentences per document in document order.
fn by_document(sentences: &[Sentence]) -> BTreeMap<&str, Vec<&Sentence>> {
    let mut docs: BTreeMap<&str, Vec<&Sentence>> = BTreeMap::new();
    for s in sentences {
        docs.entry(s.doc_id.as_str()).or_default().push(s);
    }
    for list in docs.values_mut() {
        list.sort_by_key(|s| s.index_in_doc);
    }
    docs
}

fn negative(id: String, a: &str, b: &str, origin: Origin) -> LabeledPair {
    LabeledPair {
        pair_id: id,
        sentence_1: a.to_string(),
        sentence_2: b.to_string(),
        label: Label::NonParaphrase,
        near_paraphrase: false,
        origin,
    }
}

/// Sample `n` adjacent kept-sentence pairs without replacement. Pairs whose
/// key is in `exclude` or whose two texts are identical are not candidates.
/// Output follows document order; ids are `{id_prefix}{k}`.
pub fn consecutive_negative_pairs(
    sentences: &[Sentence],
    n: usize,
    seed: u64,
    exclude: &HashSet<(String, String)>,
    id_prefix: &str,
) -> Result<Vec<LabeledPair>, DatasetError> {
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for doc in by_document(sentences).values() {
        for w in doc.windows(2) {
            let key = pair_key(&w[0].text, &w[1].text);
            if w[0].text != w[1].text && !exclude.contains(&key) && seen.insert(key) {
                candidates.push((w[0], w[1]));
            }
        }
    }
    if n > candidates.len() {
        return Err(DatasetError::Shortfall {
            kind: "consecutive",
            requested: n,
            available: candidates.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, candidates.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .enumerate()
        .map(|(k, i)| {
            let (a, b) = candidates[i];
            negative(format!("{id_prefix}{k:05}"), &a.text, &b.text, Origin::Consecutive)
        })
        .collect())
}

const ENUMERATE_LIMIT: usize = 2_000_000;

/// Sample `n` distinct pairs of distinct sentences uniformly, never pairing
/// two sentences adjacent in their document and never producing a pair whose
/// key is in `exclude`. Output is in draw order.
pub fn random_negative_pairs(
    sentences: &[Sentence],
    n: usize,
    seed: u64,
    exclude: &HashSet<(String, String)>,
    id_prefix: &str,
) -> Result<Vec<LabeledPair>, DatasetError> {
    // pool of distinct texts, in first-seen order
    let mut pool: Vec<&str> = Vec::new();
    let mut position = std::collections::HashMap::new();
    for s in sentences {
        position.entry(s.text.as_str()).or_insert_with(|| {
            pool.push(s.text.as_str());
            pool.len() - 1
        });
    }
    let m = pool.len();
    let canonical = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };

    let mut forbidden: HashSet<(usize, usize)> = HashSet::new();
    for doc in by_document(sentences).values() {
        for w in doc.windows(2) {
            let (a, b) = (position[w[0].text.as_str()], position[w[1].text.as_str()]);
            if a != b {
                forbidden.insert(canonical(a, b));
            }
        }
    }
    for (a, b) in exclude {
        if let (Some(&i), Some(&j)) = (position.get(a.as_str()), position.get(b.as_str())) {
            if i != j {
                forbidden.insert(canonical(i, j));
            }
        }
    }
    let total = m * m.saturating_sub(1) / 2;
    let available = total - forbidden.len();
    if n > available {
        return Err(DatasetError::Shortfall {
            kind: "random",
            requested: n,
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: Vec<(usize, usize)> = if total <= ENUMERATE_LIMIT {
        let valid: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .filter(|p| !forbidden.contains(p))
            .collect();
        index::sample(&mut rng, valid.len(), n)
            .into_iter()
            .map(|k| valid[k])
            .collect()
    } else {
        let mut taken = HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            if i == j {
                continue;
            }
            let p = canonical(i, j);
            if !forbidden.contains(&p) && taken.insert(p) {
                out.push(p);
            }
        }
        out
    };
    Ok(chosen
        .into_iter()
        .enumerate()
        .map(|(k, (i, j))| negative(format!("{id_prefix}{k:05}"), pool[i], pool[j], Origin::Random))
        .collect())
}
