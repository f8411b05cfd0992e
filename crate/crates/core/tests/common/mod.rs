//! Reference implementations used only by the test suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nettagger::lexicon::{Label, SuffixNode};
use nettagger::network::{Network, TrainingHyperparams};

/// Trie node key: the suffix read right to left, `*` marking a default node.
pub type PathKey = String;

fn entropy(freqs: &[u64]) -> f64 {
    let total: u64 = freqs.iter().sum();
    let mut h = 0.0;
    for &f in freqs {
        if f > 0 {
            let p = f as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

fn add(acc: &mut [u64], f: &[u64]) {
    for (a, b) in acc.iter_mut().zip(f) {
        *a += b;
    }
}

fn parent_of(key: &str) -> Option<String> {
    let mut chars: Vec<char> = key.chars().collect();
    chars.pop()?;
    Some(chars.into_iter().collect())
}

/// Unpruned suffix frequencies computed straight from word counts.
pub fn suffix_freqs(
    words: &[(String, Vec<u64>)],
    max_len: usize,
    tags: usize,
) -> BTreeMap<PathKey, Vec<u64>> {
    let mut out: BTreeMap<PathKey, Vec<u64>> = BTreeMap::new();
    for (word, freqs) in words {
        let rev: Vec<char> = word.chars().rev().take(max_len).collect();
        for k in 0..=rev.len() {
            let key: String = rev[..k].iter().collect();
            add(out.entry(key).or_insert_with(|| vec![0; tags]), freqs);
        }
    }
    out
}

/// Leaf pruning by repeated global sweeps until nothing changes.
pub fn prune_reference(
    mut nodes: BTreeMap<PathKey, Vec<u64>>,
    threshold: f64,
) -> BTreeMap<PathKey, Vec<u64>> {
    let tags = nodes.values().next().map_or(0, Vec::len);
    loop {
        let mut changed = false;
        let keys: Vec<String> = nodes.keys().cloned().collect();
        let has_child = |nodes: &BTreeMap<PathKey, Vec<u64>>, key: &str| {
            nodes.keys().any(|k| parent_of(k).as_deref() == Some(key))
        };
        for key in &keys {
            if key.is_empty() || key.ends_with('*') || !nodes.contains_key(key) {
                continue;
            }
            if has_child(&nodes, key) {
                continue;
            }
            let parent = parent_of(key).expect("non-root");
            let pf = nodes[&parent].clone();
            let cf = nodes[key].clone();
            let child_total: u64 = cf.iter().sum();
            let gain = child_total as f64 * (entropy(&pf) - entropy(&cf));
            if gain < threshold {
                nodes.remove(key);
                let default_key = format!("{parent}*");
                add(
                    nodes.entry(default_key).or_insert_with(|| vec![0; tags]),
                    &cf,
                );
                changed = true;
            }
        }
        let keys: Vec<String> = nodes.keys().cloned().collect();
        for key in &keys {
            let children: Vec<&String> = nodes
                .keys()
                .filter(|k| parent_of(k).as_deref() == Some(key.as_str()))
                .collect();
            if children.len() == 1 && children[0].ends_with('*') {
                let c = children[0].clone();
                nodes.remove(&c);
                changed = true;
            }
        }
        if !changed {
            return nodes;
        }
    }
}

/// Flattens a trie into path keys.
pub fn flatten(root: &SuffixNode) -> BTreeMap<PathKey, Vec<u64>> {
    fn go(node: &SuffixNode, key: String, out: &mut BTreeMap<PathKey, Vec<u64>>) {
        out.insert(key.clone(), node.freqs.clone());
        for (label, child) in &node.children {
            let mut k = key.clone();
            match label {
                Label::Char(c) => k.push(*c),
                Label::Default => k.push('*'),
                Label::Root => unreachable!("root is never a child"),
            }
            go(child, k, out);
        }
    }
    let mut out = BTreeMap::new();
    go(root, String::new(), &mut out);
    out
}

pub fn leaf_keys(nodes: &BTreeMap<PathKey, Vec<u64>>) -> BTreeSet<PathKey> {
    nodes
        .keys()
        .filter(|k| {
            !nodes
                .keys()
                .any(|c| parent_of(c).as_deref() == Some(k.as_str()))
        })
        .cloned()
        .collect()
}

fn half_squared_error(net: &Network, input: &[f64], target: &[f64]) -> f64 {
    let out = net.forward(input).unwrap().output;
    0.5 * out
        .iter()
        .zip(target)
        .map(|(a, t)| (t - a) * (t - a))
        .sum::<f64>()
}

/// Largest relative error between the weight change of one plain
/// backpropagation step (learning rate 1, no momentum, no error threshold)
/// and the negative gradient of `0.5 * sum (t - a)^2` estimated by central
/// differences.
pub fn gradient_check(net: &Network, input: &[f64], target: &[f64], step: f64) -> f64 {
    let hp = TrainingHyperparams {
        learning_rate: 1.0,
        momentum: 0.0,
        error_threshold: 0.0,
        seed: 0,
    };
    let mut stepped = net.clone();
    stepped.train_pattern(input, target, &hp).unwrap();

    let mut worst: f64 = 0.0;
    for l in 0..net.layers.len() {
        for k in 0..net.layers[l].weights.len() {
            let analytic = stepped.layers[l].weights[k] - net.layers[l].weights[k];
            let mut plus = net.clone();
            plus.layers[l].weights[k] += step;
            let mut minus = net.clone();
            minus.layers[l].weights[k] -= step;
            let numeric = -(half_squared_error(&plus, input, target)
                - half_squared_error(&minus, input, target))
                / (2.0 * step);
            let scale = analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max((analytic - numeric).abs() / scale);
        }
    }
    worst
}
