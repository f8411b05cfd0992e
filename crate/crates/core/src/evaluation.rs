//! Accuracy reports, learning curves, error overlap between taggers and the
//! parameter-count audit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;

use crate::corpus::{TagSet, TaggedCorpus};
use crate::error::{argument, Result};
use crate::lexicon::Lexicon;
use crate::tagger::{select_tags, tag_corpus, ContextConfig, ModelRecipe, TagDecision};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub token_count: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Tokens for which an alternative tag was emitted.
    pub ambiguous_count: usize,
    pub correct_with_alternatives: usize,
    pub accuracy_with_alternatives: f64,
    /// `(gold, predicted) -> count`, over primary tags.
    pub confusion: BTreeMap<(usize, usize), usize>,
}

impl EvalReport {
    pub fn ambiguous_rate(&self) -> f64 {
        self.ambiguous_count as f64 / self.token_count as f64
    }

    /// `key<TAB>value` lines.
    pub fn write_summary<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "tokens\t{}", self.token_count)?;
        writeln!(w, "correct\t{}", self.correct)?;
        writeln!(w, "accuracy\t{:.6}", self.accuracy)?;
        writeln!(w, "ambiguous\t{}", self.ambiguous_count)?;
        writeln!(w, "ambiguous_rate\t{:.6}", self.ambiguous_rate())?;
        writeln!(
            w,
            "correct_with_alternatives\t{}",
            self.correct_with_alternatives
        )?;
        writeln!(
            w,
            "accuracy_with_alternatives\t{:.6}",
            self.accuracy_with_alternatives
        )?;
        Ok(())
    }

    /// `gold<TAB>pred<TAB>count` lines.
    pub fn write_confusion<W: Write>(&self, tagset: &TagSet, mut w: W) -> Result<()> {
        for (&(gold, pred), count) in &self.confusion {
            writeln!(w, "{}\t{}\t{count}", tagset.name(gold), tagset.name(pred))?;
        }
        Ok(())
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let pct = |x: f64| 100.0 * x;
        let _ = writeln!(s, "{:<28}{:>10}", "tokens", self.token_count);
        let _ = writeln!(s, "{:<28}{:>10}", "correct", self.correct);
        let _ = writeln!(s, "{:<28}{:>9.2}%", "accuracy", pct(self.accuracy));
        let _ = writeln!(
            s,
            "{:<28}{:>9.2}%",
            "ambiguously tagged",
            pct(self.ambiguous_rate())
        );
        let _ = writeln!(
            s,
            "{:<28}{:>9.2}%",
            "accuracy with alternatives",
            pct(self.accuracy_with_alternatives)
        );
        s
    }
}

/// Scores per-token decisions against `gold`, in corpus order.
pub fn evaluate(gold: &TaggedCorpus, decisions: &[TagDecision]) -> Result<EvalReport> {
    let token_count = gold.token_count();
    if token_count == 0 {
        return Err(argument("nothing to evaluate"));
    }
    if decisions.len() != token_count {
        return Err(argument(format!(
            "{} decisions for {token_count} gold tokens",
            decisions.len()
        )));
    }
    let mut correct = 0;
    let mut ambiguous_count = 0;
    let mut correct_with_alternatives = 0;
    let mut confusion = BTreeMap::new();
    for (token, d) in gold.tokens().zip(decisions) {
        let hit = d.primary == token.tag;
        let alt_hit = d.alternative == Some(token.tag);
        correct += hit as usize;
        correct_with_alternatives += (hit || alt_hit) as usize;
        ambiguous_count += d.alternative.is_some() as usize;
        *confusion.entry((token.tag, d.primary)).or_insert(0) += 1;
    }
    Ok(EvalReport {
        token_count,
        correct,
        accuracy: correct as f64 / token_count as f64,
        ambiguous_count,
        correct_with_alternatives,
        accuracy_with_alternatives: correct_with_alternatives as f64 / token_count as f64,
        confusion,
    })
}

/// Context-free baseline: each token gets the most probable tag of its
/// lexicon entry.
pub fn lexical_baseline(lexicon: &Lexicon, corpus: &TaggedCorpus) -> Vec<TagDecision> {
    corpus
        .tokens()
        .map(|t| select_tags(lexicon.lookup(&t.word), 0.0))
        .collect()
}

/// Corpus positions (flat token indices) where the primary tag is wrong.
pub fn error_positions(gold: &TaggedCorpus, decisions: &[TagDecision]) -> BTreeSet<usize> {
    gold.tokens()
        .zip(decisions)
        .enumerate()
        .filter(|(_, (t, d))| d.primary != t.tag)
        .map(|(i, _)| i)
        .collect()
}

/// Shared errors relative to the smaller error set: `|A ∩ B| / min(|A|, |B|)`,
/// or 0 if either set is empty.
pub fn error_overlap(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    let smaller = a.len().min(b.len());
    if smaller == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / smaller as f64
}

/// Trainable network weights, biases excluded: `slots * n * n` without a
/// hidden layer, `slots * n * h + h * n` with one.
pub fn parameter_count(tagset_size: usize, context: ContextConfig, hidden: usize) -> usize {
    let inputs = context.slots() * tagset_size;
    if hidden == 0 {
        inputs * tagset_size
    } else {
        inputs * hidden + hidden * tagset_size
    }
}

/// Bias weights, reported next to [`parameter_count`].
pub fn bias_count(tagset_size: usize, hidden: usize) -> usize {
    tagset_size + hidden
}

/// Number of tag trigrams a second-order Markov tagger must estimate.
pub fn trigram_count(tagset_size: usize) -> usize {
    tagset_size.pow(3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub requested: usize,
    /// Tokens actually used, after rounding up to whole sentences.
    pub train_tokens: usize,
    pub accuracy: f64,
}

/// Trains a fresh model on growing prefixes of `train` and scores each on
/// `eval`.
pub fn learning_curve(
    train: &TaggedCorpus,
    sizes: &[usize],
    recipe: &ModelRecipe,
    eval: &TaggedCorpus,
    alt_margin: f64,
) -> Result<Vec<CurvePoint>> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(argument("learning-curve sizes must be ascending"));
    }
    let total = train.token_count();
    if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s > total) {
        return Err(argument(format!(
            "learning-curve size {s} outside 1..={total}"
        )));
    }
    sizes
        .iter()
        .map(|&size| {
            let subset = train.head(size)?;
            let (model, _) = recipe.fit(&subset)?;
            let decisions = tag_corpus(&model, eval, alt_margin)?;
            let report = evaluate(eval, &decisions)?;
            Ok(CurvePoint {
                requested: size,
                train_tokens: subset.token_count(),
                accuracy: report.accuracy,
            })
        })
        .collect()
}
