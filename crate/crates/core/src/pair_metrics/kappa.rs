use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Chance-corrected agreement between two raters over the same items.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    pub n_items: usize,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub kappa: f64,
}

/// Cohen's kappa over paired categorical labels.
///
/// `p_o` is the fraction of items labelled identically and `p_e` the sum over
/// categories of the product of both raters' marginal rates. When `p_e` is 1
/// both raters used one and the same category throughout, and kappa is 1.
pub fn cohens_kappa<L: Eq + Hash>(labels_a: &[L], labels_b: &[L]) -> Result<Kappa, MetricsError> {
    if labels_a.len() != labels_b.len() {
        return Err(MetricsError::LengthMismatch {
            left: labels_a.len(),
            right: labels_b.len(),
        });
    }
    if labels_a.is_empty() {
        return Err(MetricsError::EmptyAggregate);
    }
    let n = labels_a.len();
    let agree = labels_a.iter().zip(labels_b).filter(|(a, b)| a == b).count();

    let mut marginals: HashMap<&L, (usize, usize)> = HashMap::new();
    for a in labels_a {
        marginals.entry(a).or_default().0 += 1;
    }
    for b in labels_b {
        marginals.entry(b).or_default().1 += 1;
    }
    let nf = n as f64;
    // integer numerator keeps p_e exact up to the final division
    let pe_num: u128 = marginals.values().map(|&(ca, cb)| (ca as u128) * (cb as u128)).sum();
    let expected = pe_num as f64 / (nf * nf);
    let observed = agree as f64 / nf;
    let kappa = if pe_num == (n as u128) * (n as u128) {
        1.0
    } else {
        (observed - expected) / (1.0 - expected)
    };
    Ok(Kappa {
        n_items: n,
        observed_agreement: observed,
        expected_agreement: expected,
        kappa,
    })
}
