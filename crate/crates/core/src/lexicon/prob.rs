//! Relative-frequency estimates and the entropy-based measures used to
//! prune the suffix trie.

use crate::error::{argument, Result};

/// Per-tag probability vector aligned to the tagset.
pub type TagProbVector = Vec<f64>;

/// Default minimum probability for a tag to survive in a fullform entry.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 0.01;

fn total(counts: &[u64]) -> u64 {
    counts.iter().sum()
}

/// Index of the largest count, lowest index on ties.
fn argmax(counts: &[u64]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Normalizes raw frequencies into a probability vector.
pub fn normalize(counts: &[u64]) -> Result<TagProbVector> {
    let t = total(counts);
    if t == 0 {
        return Err(argument("cannot normalize an all-zero frequency vector"));
    }
    let t = t as f64;
    Ok(counts.iter().map(|&c| c as f64 / t).collect())
}

/// Maximum-likelihood tag probabilities with low-probability tags removed.
///
/// Tags whose relative frequency falls below `prune_threshold` are zeroed and
/// the survivors renormalized. If nothing survives, the most frequent tag
/// (lowest index on ties) gets probability 1.
pub fn mle_probabilities(counts: &[u64], prune_threshold: f64) -> Result<TagProbVector> {
    let mut probs = normalize(counts)?;
    for p in probs.iter_mut() {
        if *p < prune_threshold {
            *p = 0.0;
        }
    }
    let kept: f64 = probs.iter().sum();
    if kept == 0.0 {
        let mut one_hot = vec![0.0; counts.len()];
        one_hot[argmax(counts)] = 1.0;
        return Ok(one_hot);
    }
    for p in probs.iter_mut() {
        *p /= kept;
    }
    Ok(probs)
}

/// Entropy in bits of the tag distribution given by `freqs`.
pub fn node_information(freqs: &[u64]) -> Result<f64> {
    let t = total(freqs);
    if t == 0 {
        return Err(argument("information of an empty node"));
    }
    let t = t as f64;
    Ok(freqs
        .iter()
        .filter(|&&f| f > 0)
        .map(|&f| {
            let p = f as f64 / t;
            -p * p.log2()
        })
        .sum())
}

/// Frequency-weighted entropy reduction of a child node relative to its
/// parent: `F(child) * (I(parent) - I(child))`. Negative when the child is
/// less pure than the parent.
pub fn information_gain(parent_freqs: &[u64], child_freqs: &[u64]) -> Result<f64> {
    let parent_info = node_information(parent_freqs)?;
    let child_total = total(child_freqs);
    if child_total == 0 {
        return Ok(0.0);
    }
    let child_info = node_information(child_freqs)?;
    Ok(child_total as f64 * (parent_info - child_info))
}
