//! Building blocks for assembling sentential paraphrase corpora by double
//! back-translation, annotating them, and scoring paraphrase detectors.

pub mod corpus_prep;
pub mod pair_metrics;
pub mod backtranslate;
pub mod dataset;
pub mod annotation;
pub mod evaluation;
