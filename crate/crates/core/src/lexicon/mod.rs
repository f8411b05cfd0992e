//! The three-tier lexicon: a fullform map of pruned relative frequencies, a
//! pruned suffix trie for unknown words, and a global default entry.
//!
//! Lookup tries the exact word form, then its lowercased form, then walks
//! the suffix trie, and finally falls back to the default entry, so every
//! non-empty word receives a probability vector.

mod io;
pub mod prob;
pub mod suffix;

use std::collections::BTreeMap;

use crate::corpus::{count_word_tags, TagSet, TaggedCorpus, WordTagCounts};
use crate::error::{Error, Result};

pub use io::{read_lexicon, write_lexicon};
pub use prob::{
    information_gain, mle_probabilities, node_information, normalize, TagProbVector,
    DEFAULT_PRUNE_THRESHOLD,
};
pub use suffix::{
    build_default_entry, build_suffix_tree, prune_suffix_tree, Label, SuffixNode,
    DEFAULT_GAIN_THRESHOLD, DEFAULT_MAX_SUFFIX_LEN,
};

/// Exact-form word → probability vector map.
pub type FullformLexicon = BTreeMap<String, TagProbVector>;

/// Construction parameters for [`Lexicon::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexiconParams {
    pub max_suffix_len: usize,
    pub gain_threshold: f64,
    pub prune_threshold: f64,
}

impl Default for LexiconParams {
    fn default() -> Self {
        LexiconParams {
            max_suffix_len: DEFAULT_MAX_SUFFIX_LEN,
            gain_threshold: DEFAULT_GAIN_THRESHOLD,
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
        }
    }
}

/// Which tier answered a lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookupSource {
    Fullform,
    Lowercase,
    Suffix,
    Default,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub tagset: TagSet,
    pub fullform: FullformLexicon,
    pub suffix_tree: SuffixNode,
    pub default_entry: TagProbVector,
}

pub fn build_fullform(counts: &WordTagCounts, prune_threshold: f64) -> Result<FullformLexicon> {
    counts
        .iter()
        .map(|(word, freqs)| Ok((word.clone(), mle_probabilities(freqs, prune_threshold)?)))
        .collect()
}

impl Lexicon {
    /// Builds all three tiers from a training corpus whose tagset has its
    /// open-class tags flagged.
    pub fn build(corpus: &TaggedCorpus, params: &LexiconParams) -> Result<Self> {
        let counts = count_word_tags(corpus);
        Self::from_counts(&counts, &corpus.tagset, params)
    }

    pub fn from_counts(
        counts: &WordTagCounts,
        tagset: &TagSet,
        params: &LexiconParams,
    ) -> Result<Self> {
        let fullform = build_fullform(counts, params.prune_threshold)?;
        let tree = build_suffix_tree(counts, tagset, params.max_suffix_len)?;
        if tree.total() == 0 {
            return Err(Error::Config(
                "the corpus has no tokens with an open-class tag".into(),
            ));
        }
        let suffix_tree = prune_suffix_tree(tree, params.gain_threshold);
        let default_entry = build_default_entry(&suffix_tree)?;
        Ok(Lexicon {
            tagset: tagset.clone(),
            fullform,
            suffix_tree,
            default_entry,
        })
    }

    pub fn lookup(&self, word: &str) -> &TagProbVector {
        self.lookup_with_source(word).0
    }

    pub fn lookup_with_source(&self, word: &str) -> (&TagProbVector, LookupSource) {
        if let Some(v) = self.fullform.get(word) {
            return (v, LookupSource::Fullform);
        }
        let lower = word.to_lowercase();
        if lower != word {
            if let Some(v) = self.fullform.get(&lower) {
                return (v, LookupSource::Lowercase);
            }
        }
        match self.suffix_tree.lookup(word) {
            Some(v) => (v, LookupSource::Suffix),
            None => (&self.default_entry, LookupSource::Default),
        }
    }
}
