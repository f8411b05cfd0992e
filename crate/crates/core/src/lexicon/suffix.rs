//! Suffix trie over word endings, read right to left, with
//! information-gain pruning into per-node default branches.

use std::collections::BTreeMap;
use std::fmt;

use crate::corpus::{TagSet, WordTagCounts};
use crate::error::{Error, Result};

use super::prob::{information_gain, normalize, TagProbVector};

pub const DEFAULT_MAX_SUFFIX_LEN: usize = 5;
pub const DEFAULT_GAIN_THRESHOLD: f64 = 10.0;

/// Edge label of a trie node. The derived order sorts character labels by
/// code point and puts `Default` after all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Root,
    Char(char),
    Default,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Root => f.write_str("<ROOT>"),
            Label::Default => f.write_str("<DEFAULT>"),
            Label::Char(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuffixNode {
    pub label: Label,
    pub freqs: Vec<u64>,
    pub children: BTreeMap<Label, SuffixNode>,
    /// Normalized `freqs`; set on the leaves of a pruned trie only.
    pub probs: Option<TagProbVector>,
}

impl SuffixNode {
    pub fn new(label: Label, tags: usize) -> Self {
        SuffixNode {
            label,
            freqs: vec![0; tags],
            children: BTreeMap::new(),
            probs: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.freqs.iter().sum()
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .values()
            .map(SuffixNode::node_count)
            .sum::<usize>()
    }

    pub fn leaves(&self) -> Vec<&SuffixNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a SuffixNode>) {
        if self.is_leaf() {
            out.push(self);
        }
        for child in self.children.values() {
            child.collect_leaves(out);
        }
    }

    /// Visits every node in preorder with its depth (root = 0).
    pub fn preorder(&self, mut visit: impl FnMut(usize, &SuffixNode)) {
        fn go(node: &SuffixNode, depth: usize, visit: &mut dyn FnMut(usize, &SuffixNode)) {
            visit(depth, node);
            for child in node.children.values() {
                go(child, depth + 1, visit);
            }
        }
        go(self, 0, &mut visit);
    }

    /// Nodes visited when looking `word` up, starting with the root. The
    /// walk consumes characters from the end of the word, taking the
    /// matching child or else the default child, and stops at a leaf.
    pub fn walk(&self, word: &str) -> Vec<&SuffixNode> {
        let mut path = vec![self];
        let mut node = self;
        let mut chars = word.chars().rev();
        while !node.is_leaf() {
            let Some(c) = chars.next() else { break };
            match node
                .children
                .get(&Label::Char(c))
                .or_else(|| node.children.get(&Label::Default))
            {
                Some(next) => {
                    node = next;
                    path.push(node);
                }
                None => break,
            }
        }
        path
    }

    /// Probability vector of the leaf reached by `word`, if the walk ends
    /// at a leaf.
    pub fn lookup(&self, word: &str) -> Option<&TagProbVector> {
        let last = *self.walk(word).last().expect("walk includes the root");
        if last.is_leaf() {
            last.probs.as_ref()
        } else {
            None
        }
    }
}

/// Builds the unpruned trie from the open-class observations in `counts`.
/// Each word contributes its last `max_suffix_len` characters (the whole
/// word when shorter), read right to left; its frequency is added to every
/// node on that path including the root.
pub fn build_suffix_tree(
    counts: &WordTagCounts,
    tagset: &TagSet,
    max_suffix_len: usize,
) -> Result<SuffixNode> {
    if !tagset.has_open_class() {
        return Err(Error::Config(
            "no open-class tags configured; the suffix lexicon needs at least one".into(),
        ));
    }
    let n = tagset.len();
    let mut root = SuffixNode::new(Label::Root, n);
    for (word, freqs) in counts {
        let open: Vec<(usize, u64)> = freqs
            .iter()
            .enumerate()
            .filter(|&(t, &f)| f > 0 && tagset.is_open(t))
            .map(|(t, &f)| (t, f))
            .collect();
        if open.is_empty() {
            continue;
        }
        let mut node = &mut root;
        for &(t, f) in &open {
            node.freqs[t] += f;
        }
        for c in word.chars().rev().take(max_suffix_len) {
            node = node
                .children
                .entry(Label::Char(c))
                .or_insert_with(|| SuffixNode::new(Label::Char(c), n));
            for &(t, f) in &open {
                node.freqs[t] += f;
            }
        }
    }
    Ok(root)
}

/// Prunes the trie bottom-up.
///
/// After a node's subtrees are pruned, each character-labelled leaf child
/// whose weighted information gain over the node is below `gain_threshold`
/// is removed and its frequencies are added to the node's default child. A
/// default child left as the only child is dropped, turning the node into a
/// leaf that its own parent then examines. Surviving leaves get normalized
/// probability vectors.
pub fn prune_suffix_tree(mut root: SuffixNode, gain_threshold: f64) -> SuffixNode {
    prune_node(&mut root, gain_threshold);
    assign_leaf_probs(&mut root);
    root
}

fn prune_node(node: &mut SuffixNode, threshold: f64) {
    for child in node.children.values_mut() {
        prune_node(child, threshold);
    }

    let doomed: Vec<Label> = node
        .children
        .iter()
        .filter(|(label, child)| {
            **label != Label::Default
                && child.is_leaf()
                && information_gain(&node.freqs, &child.freqs)
                    .expect("a node with children has positive mass")
                    < threshold
        })
        .map(|(label, _)| *label)
        .collect();

    if !doomed.is_empty() {
        let n = node.freqs.len();
        let mut absorbed = vec![0u64; n];
        for label in doomed {
            let child = node.children.remove(&label).expect("label taken from map");
            for (a, f) in absorbed.iter_mut().zip(&child.freqs) {
                *a += f;
            }
        }
        let default = node
            .children
            .entry(Label::Default)
            .or_insert_with(|| SuffixNode::new(Label::Default, n));
        for (d, a) in default.freqs.iter_mut().zip(&absorbed) {
            *d += a;
        }
    }

    if node.children.len() == 1 && node.children.contains_key(&Label::Default) {
        node.children.clear();
    }
}

fn assign_leaf_probs(node: &mut SuffixNode) {
    if node.is_leaf() {
        node.probs = normalize(&node.freqs).ok();
    } else {
        node.probs = None;
        for child in node.children.values_mut() {
            assign_leaf_probs(child);
        }
    }
}

/// Fallback distribution: root frequencies minus the frequencies of every
/// leaf of the pruned trie, clamped at zero and normalized. Falls back to
/// the root distribution when nothing is left over.
pub fn build_default_entry(pruned_root: &SuffixNode) -> Result<TagProbVector> {
    let mut residual: Vec<i128> = pruned_root.freqs.iter().map(|&f| f as i128).collect();
    for leaf in pruned_root.leaves() {
        for (r, &f) in residual.iter_mut().zip(&leaf.freqs) {
            *r -= f as i128;
        }
    }
    let clamped: Vec<u64> = residual.iter().map(|&r| r.max(0) as u64).collect();
    if clamped.iter().any(|&r| r > 0) {
        normalize(&clamped)
    } else {
        normalize(&pruned_root.freqs)
    }
}
