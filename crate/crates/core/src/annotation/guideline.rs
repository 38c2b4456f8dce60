/// Annotator guideline served to the labeling UI.
pub const GUIDELINE_MARKDOWN: &str = r#"# Paraphrase annotation guideline

Read both sentences and pick the similarity degree that fits best.
Degrees 4 and 5 count as **paraphrase**; degrees 0 to 3 count as
**non-paraphrase**.

| Degree | Meaning |
|-------:|---------|
| 5 | Completely equivalent: both sentences mean the same thing. |
| 4 | Mostly equivalent: only unimportant details differ. |
| 3 | Roughly equivalent: some important information differs or is missing. |
| 2 | Not equivalent, but they share some details. |
| 1 | Not equivalent, but on the same topic. |
| 0 | On different topics. |

Judge meaning, not wording. Word order changes, synonyms and a different
grammatical construction are fine as long as no fact is added, dropped or
changed. Ungrammatical or partly untranslated output should get a low degree.

## Near-paraphrases

Some non-paraphrase pairs are very close in meaning. When you choose a
degree of 3 or lower for such a pair, also tick **near-paraphrase**. Three
kinds come up often:

1. **Partial overlap.** One sentence keeps most of the other but loses or
   adds a piece of information (for example, who said it).
   - Աշխատավարձերը բարձրացել են տաս տոկոսով, հայտարարել է նախարարը։
   - Աշխատավարձերը բարձրացել են տաս տոկոսով։
2. **One-way entailment.** The first sentence implies the second, but not
   the other way around.
   - Նա մարզվում է ամեն առավոտ՝ մրցումներին պատրաստվելու համար։
   - Նա պատրաստվում է մրցումներին։
3. **Same frame, different entities.** The sentences share their structure
   and context but talk about different people, places, numbers or articles.
   - Արամը ծնվել է Գյումրիում 1985 թվականին։
   - Դավիթը ծնվել է Գյումրիում 1987 թվականին։

The near-paraphrase box is disabled for degrees 4 and 5.
"#;
