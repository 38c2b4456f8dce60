use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::provider::Lang;
use super::{TranslateError, TranslationRecord, Translator};
use crate::corpus_prep::{Script, Segmenter, Sentence, TokenKind, Tokenizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerationConfig {
    pub source_lang: Lang,
    pub pivot: Lang,
    pub iterations: u32,
    /// Reject as untranslated when more than this share of word tokens is
    /// not in the source script.
    pub untranslated_threshold: f64,
    pub source_script: Script,
    /// Upper bound on concurrent provider requests.
    pub max_in_flight: usize,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            source_lang: "hy".into(),
            pivot: "en".into(),
            iterations: 2,
            untranslated_threshold: 0.5,
            source_script: Script::Armenian,
            max_in_flight: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Candidate,
    RejectedMixedScript,
    RejectedUntranslated,
    RejectedMultisentence,
}

impl PairStatus {
    pub const ALL: [PairStatus; 4] = [
        PairStatus::Candidate,
        PairStatus::RejectedMixedScript,
        PairStatus::RejectedUntranslated,
        PairStatus::RejectedMultisentence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PairStatus::Candidate => "candidate",
            PairStatus::RejectedMixedScript => "rejected_mixed_script",
            PairStatus::RejectedUntranslated => "rejected_untranslated",
            PairStatus::RejectedMultisentence => "rejected_multisentence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedPair {
    pub pair_id: String,
    pub source: Sentence,
    pub candidate_text: String,
    pub pivot: Lang,
    pub iterations: u32,
    pub provenance: Vec<TranslationRecord>,
    pub status: PairStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

pub fn pair_id_for(sentence: &Sentence) -> String {
    format!("bt:{}", sentence.sent_id)
}

/// True when some word token mixes letters from two or more scripts.
pub fn reject_mixed_script(text: &str) -> bool {
    mixed_script(&Tokenizer::default(), text)
}

fn mixed_script(tokenizer: &Tokenizer, text: &str) -> bool {
    tokenizer
        .tokenize(text)
        .iter()
        .any(|t| t.kind == TokenKind::Word && t.script == Script::Mixed)
}

/// Mechanical checks on a generated candidate: mixed-script words,
/// predominantly foreign output, and multi-sentence output.
#[derive(Debug, Clone)]
pub struct PostFilter {
    segmenter: Segmenter,
    tokenizer: Tokenizer,
    threshold: f64,
    source_script: Script,
}

impl Default for PostFilter {
    fn default() -> Self {
        let cfg = GenerationConfig::default();
        Self::new(Segmenter::default(), cfg.untranslated_threshold, cfg.source_script)
    }
}

impl PostFilter {
    pub fn new(segmenter: Segmenter, threshold: f64, source_script: Script) -> Self {
        Self {
            segmenter,
            tokenizer: Tokenizer::default(),
            threshold,
            source_script,
        }
    }

    pub fn classify(&self, text: &str) -> PairStatus {
        let tokens = self.tokenizer.tokenize(text);
        let words: Vec<_> = tokens.iter().filter(|t| t.kind == TokenKind::Word).collect();
        if words.iter().any(|t| t.script == Script::Mixed) {
            return PairStatus::RejectedMixedScript;
        }
        let foreign = words.iter().filter(|t| t.script != self.source_script).count();
        if !words.is_empty() && foreign as f64 / words.len() as f64 > self.threshold {
            return PairStatus::RejectedUntranslated;
        }
        if self.segmenter.split(text).len() >= 2 {
            return PairStatus::RejectedMultisentence;
        }
        PairStatus::Candidate
    }

    /// Sets the final status of a pair that is still a candidate.
    pub fn apply(&self, mut pair: GeneratedPair) -> GeneratedPair {
        if pair.status == PairStatus::Candidate {
            pair.status = self.classify(&pair.candidate_text);
        }
        pair
    }
}

pub struct Generator {
    translator: Arc<Translator>,
    config: GenerationConfig,
    post_filter: PostFilter,
    pool: rayon::ThreadPool,
}

impl Generator {
    pub fn new(
        translator: Arc<Translator>,
        config: GenerationConfig,
        segmenter: Segmenter,
    ) -> Result<Self, TranslateError> {
        if config.iterations == 0 {
            return Err(TranslateError::Config("iterations must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.max_in_flight.max(1))
            .build()
            .map_err(|e| TranslateError::Config(e.to_string()))?;
        let post_filter = PostFilter::new(segmenter, config.untranslated_threshold, config.source_script);
        Ok(Self {
            translator,
            config,
            post_filter,
            pool,
        })
    }

    pub fn translator(&self) -> &Translator {
        &self.translator
    }

    /// Apply `iterations` round trips to the sentence, then the post-filters.
    /// Translation failures reject the pair instead of failing.
    pub fn generate(&self, sentence: &Sentence) -> GeneratedPair {
        let mut text = sentence.text.clone();
        let mut provenance = Vec::with_capacity(2 * self.config.iterations as usize);
        let mut diagnostics = Vec::new();
        for _ in 0..self.config.iterations {
            match self
                .translator
                .round_trip(&text, &self.config.source_lang, &self.config.pivot)
            {
                Ok((back, records)) => {
                    text = back;
                    provenance.extend(records);
                }
                Err(e) => {
                    diagnostics.push(e.to_string());
                    break;
                }
            }
        }
        let failed = !diagnostics.is_empty();
        let pair = GeneratedPair {
            pair_id: pair_id_for(sentence),
            source: sentence.clone(),
            candidate_text: if failed { String::new() } else { text },
            pivot: self.config.pivot.clone(),
            iterations: self.config.iterations,
            provenance,
            status: if failed {
                PairStatus::RejectedUntranslated
            } else {
                PairStatus::Candidate
            },
            diagnostics,
        };
        self.post_filter.apply(pair)
    }

    /// Generate for every sentence concurrently; output is ordered by pair_id.
    pub fn generate_batch(&self, sentences: &[Sentence]) -> Vec<GeneratedPair> {
        let mut pairs: Vec<GeneratedPair> = self
            .pool
            .install(|| sentences.par_iter().map(|s| self.generate(s)).collect());
        pairs.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtranslate::{
        IdentityProvider, ProviderError, RetryPolicy, TableProvider, TranslationCache, TranslationProvider,
    };

    fn generator(p: impl TranslationProvider + 'static, iterations: u32) -> Generator {
        let t = Translator::new(Arc::new(p), Arc::new(TranslationCache::in_memory())).with_retry(RetryPolicy {
            attempts: 2,
            base_delay_ms: 0,
            multiplier: 1.0,
        });
        let cfg = GenerationConfig {
            iterations,
            ..GenerationConfig::default()
        };
        Generator::new(Arc::new(t), cfg, Segmenter::default()).unwrap()
    }

    fn sentence(text: &str) -> Sentence {
        Sentence::new("doc", 0, text, &Tokenizer::default())
    }

    #[test]
    fn identity_single_iteration() {
        let g = generator(IdentityProvider, 1);
        let pair = g.generate(&sentence("Կարինեն սովորել է քոլեջում։"));
        assert_eq!(pair.candidate_text, "Կարինեն սովորել է քոլեջում։");
        assert_eq!(pair.status, PairStatus::Candidate);
        assert_eq!(pair.provenance.len(), 2);
    }

    #[test]
    fn two_iterations_four_records_chained() {
        let g = generator(IdentityProvider, 2);
        let s = sentence("Կարինեն սովորել է քոլեջում։");
        let pair = g.generate(&s);
        assert_eq!(pair.provenance.len(), 4);
        assert_eq!(pair.provenance[0].request_text, s.text);
        for w in pair.provenance.windows(2) {
            assert_eq!(w[1].request_text, w[0].response_text);
        }
    }

    #[test]
    fn mixed_script_output_rejected() {
        let p = TableProvider::new()
            .with_entry("hy", "en", "ցեղասպանագիտություն", "genocidology")
            .with_entry("en", "hy", "genocidology", "genocideաբանություն");
        let g = generator(p, 1);
        let pair = g.generate(&sentence("ցեղասպանագիտություն"));
        assert_eq!(pair.candidate_text, "genocideաբանություն");
        assert_eq!(pair.status, PairStatus::RejectedMixedScript);
    }

    struct Down;

    impl TranslationProvider for Down {
        fn id(&self) -> &str {
            "down"
        }
        fn supports(&self, _: &Lang, _: &Lang) -> bool {
            true
        }
        fn translate(&self, _: &str, _: &Lang, _: &Lang) -> Result<String, ProviderError> {
            Err(ProviderError::Transient("connection refused".into()))
        }
    }

    #[test]
    fn translation_failure_marks_untranslated() {
        let g = generator(Down, 2);
        let pairs = g.generate_batch(&[sentence("ա բ գ"), sentence("դ ե զ")]);
        assert_eq!(pairs.len(), 2);
        for p in pairs {
            assert_eq!(p.status, PairStatus::RejectedUntranslated);
            assert!(p.diagnostics[0].contains("unreachable"));
        }
    }

    #[test]
    fn mixed_script_detection() {
        assert!(reject_mixed_script("genocideաբանություն"));
        assert!(!reject_mixed_script("Կարինեն սովորել է"));
        assert!(!reject_mixed_script("COVID-19 համաճարակ"));
    }

    #[test]
    fn post_filter_rules() {
        let f = PostFilter::default();
        // 6 of 10 words Latin: 0.6 > 0.5
        let text = "one two three four five six է ու ա բ";
        assert_eq!(f.classify(text), PairStatus::RejectedUntranslated);
        // 5 of 10 is not a majority
        let text = "one two three four five է ու ա բ գ";
        assert_eq!(f.classify(text), PairStatus::Candidate);
        assert_eq!(f.classify("Ա։ Բ։"), PairStatus::RejectedMultisentence);
        assert_eq!(f.classify("Կարինեն սովորել է քոլեջում։"), PairStatus::Candidate);
    }

    #[test]
    fn zero_iterations_rejected() {
        let t = Translator::new(Arc::new(IdentityProvider), Arc::new(TranslationCache::in_memory()));
        let cfg = GenerationConfig {
            iterations: 0,
            ..GenerationConfig::default()
        };
        assert!(Generator::new(Arc::new(t), cfg, Segmenter::default()).is_err());
    }

    #[test]
    fn batch_is_sorted_and_deterministic_with_warm_cache() {
        let g = generator(crate::backtranslate::ReversalProvider, 2);
        let sents: Vec<Sentence> = (0..20)
            .rev()
            .map(|i| Sentence::new("doc", i, &format!("նախադասություն {i}"), &Tokenizer::default()))
            .collect();
        let first = g.generate_batch(&sents);
        assert!(first.windows(2).all(|w| w[0].pair_id < w[1].pair_id));
        let second = serde_json::to_string(&g.generate_batch(&sents)).unwrap();
        let third = serde_json::to_string(&g.generate_batch(&sents)).unwrap();
        assert_eq!(second, third);
    }
}
