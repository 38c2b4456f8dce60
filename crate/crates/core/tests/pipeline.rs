use std::collections::HashSet;
use std::sync::Arc;

use paracorp::backtranslate::{GenerationConfig, Generator, PairStatus, TableProvider, TranslationCache, Translator};
use paracorp::corpus_prep::{segment_sentences, Document, FilterConfig, Segmenter, SelectionFilter, Stopwords, Tokenizer};
use paracorp::dataset::{
    assemble_split, consecutive_negative_pairs, export_tsv, import_tsv, random_negative_pairs, split_stats, Label,
    LabeledPair, Origin, Provenance, SplitName,
};
use paracorp::evaluation::{evaluate, jaccard_baseline, tune_threshold, EvalConfig};
use paracorp::pair_metrics::PairScorer;

const WORDS: [&str; 12] = [
    "կառավարությունը", "որոշել", "նոր", "դպրոց", "կառուցել", "քաղաքի", "կենտրոնում", "երեկ", "նախարարը",
    "հայտարարել", "ծրագիրը", "շարունակվում",
];
const EN: [&str; 12] = [
    "government", "decided", "new", "school", "build", "city", "center", "yesterday", "minister", "announced",
    "program", "continues",
];

fn documents() -> Vec<Document> {
    (0..6)
        .map(|d| {
            let text = (0..8)
                .map(|s| {
                    let words: Vec<&str> = (0..8).map(|k| WORDS[(d * 5 + s * 3 + k * 7) % WORDS.len()]).collect();
                    format!("{} {s}{d}։", words.join(" "))
                })
                .collect::<Vec<_>>()
                .join(" ");
            Document {
                doc_id: format!("doc{d}"),
                source_name: "news".into(),
                text,
            }
        })
        .collect()
}

fn provider() -> TableProvider {
    let mut table = TableProvider::new();
    for (i, (hy, en)) in WORDS.iter().zip(EN).enumerate() {
        table.insert("hy".into(), "en".into(), hy.to_string(), en.to_string());
        // a few words come back as near synonyms
        let back = if i % 3 == 0 { format!("{hy}ն") } else { hy.to_string() };
        table.insert("en".into(), "hy".into(), en.to_string(), back);
    }
    table
}

#[test]
fn corpus_to_evaluation() {
    let tokenizer = Tokenizer::new(Arc::new(Stopwords::armenian()));
    let sentences: Vec<_> = documents()
        .iter()
        .flat_map(|d| segment_sentences(d, &Segmenter::default(), &tokenizer))
        .collect();
    assert_eq!(sentences.len(), 48);
    let (kept, _) = SelectionFilter::new(&FilterConfig::default()).unwrap().apply(sentences);
    assert!(kept.len() > 30, "{}", kept.len());

    let translator = Arc::new(Translator::new(Arc::new(provider()), Arc::new(TranslationCache::in_memory())));
    let generator = Generator::new(translator, GenerationConfig::default(), Segmenter::default()).unwrap();
    let generated = generator.generate_batch(&kept);
    assert_eq!(generated.len(), kept.len());
    let positives: Vec<LabeledPair> = generated
        .iter()
        .filter(|g| g.status == PairStatus::Candidate)
        .map(|g| LabeledPair {
            pair_id: g.pair_id.clone(),
            sentence_1: g.source.text.clone(),
            sentence_2: g.candidate_text.clone(),
            label: Label::Paraphrase,
            near_paraphrase: false,
            origin: Origin::Backtranslation,
        })
        .collect();
    assert!(!positives.is_empty());
    assert!(positives.iter().all(|p| p.sentence_1 != p.sentence_2));

    let mut exclude: HashSet<_> = positives.iter().map(|p| p.key()).collect();
    let cons = consecutive_negative_pairs(&kept, 10, 1, &exclude, "c-").unwrap();
    exclude.extend(cons.iter().map(|p| p.key()));
    let rand = random_negative_pairs(&kept, 10, 2, &exclude, "r-").unwrap();
    let negatives = [cons, rand].concat();
    let provenance = Provenance {
        config_sha256: "f".repeat(64),
        seed: 3,
    };
    let split = assemble_split(SplitName::Test, positives.clone(), negatives, provenance).unwrap();
    assert_eq!(split.pairs.len(), positives.len() + 20);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("test.tsv");
    export_tsv(&split, &path).unwrap();
    let back = import_tsv(&path, SplitName::Test).unwrap();
    assert_eq!(back, split);

    let scorer = PairScorer::new(tokenizer, Default::default());
    let stats = split_stats(&back, &scorer);
    assert_eq!(stats.n_total, split.pairs.len());
    assert!(stats.mean_jaccard_paraphrase.unwrap() > stats.mean_jaccard_non_paraphrase.unwrap());

    let choice = tune_threshold(&back, &scorer).unwrap();
    let preds = jaccard_baseline(&back, choice.threshold, &scorer).unwrap();
    let report = evaluate(
        &preds,
        &back,
        &EvalConfig {
            n_resamples: 200,
            ..EvalConfig::default()
        },
    )
    .unwrap();
    assert!(report.f1.value >= choice.f1 - 1e-12);
    assert_eq!(report.n_pairs, split.pairs.len());
}
