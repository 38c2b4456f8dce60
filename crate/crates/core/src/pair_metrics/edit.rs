/// Word-level Levenshtein distance with unit costs.
pub fn word_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    edit_distance(a, b, true)
}

/// Insertions and deletions only; a substitution costs two operations.
pub fn indel_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    edit_distance(a, b, false)
}

pub(crate) fn edit_distance<T: PartialEq>(a: &[T], b: &[T], substitution: bool) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let indel = prev[j + 1].min(cur[j]) + 1;
            cur[j + 1] = if x == y {
                prev[j]
            } else if substitution {
                indel.min(prev[j] + 1)
            } else {
                indel
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_zero() {
        assert_eq!(word_edit_distance(&["ա", "բ"], &["ա", "բ"]), 0);
    }

    #[test]
    fn one_substitution() {
        assert_eq!(word_edit_distance(&["ա", "բ", "գ"], &["ա", "խ", "գ"]), 1);
        assert_eq!(indel_distance(&["ա", "բ", "գ"], &["ա", "խ", "գ"]), 2);
    }

    #[test]
    fn pure_insertions() {
        let empty: [&str; 0] = [];
        assert_eq!(word_edit_distance(&empty, &["ա", "բ"]), 2);
        assert_eq!(word_edit_distance(&["ա", "բ"], &empty), 2);
    }

    #[test]
    fn transposition_costs_two() {
        assert_eq!(word_edit_distance(&["ա", "բ"], &["բ", "ա"]), 2);
    }
}
