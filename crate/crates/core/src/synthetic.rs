//! Synthetic tagged-text generator for benchmarks.
//!
//! Tags follow a first-order Markov chain and each tag emits words from a
//! fixed 300-word vocabulary. A large share of the vocabulary is listed
//! under two tags, so many tokens can only be resolved from context. Since
//! the generating process is known, [`SyntheticGrammar::decode`] gives the
//! exact per-token posterior argmax, an upper reference for any tagger
//! trained on the generated text.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{TagSet, TaggedCorpus, Token};

const TAGS: [&str; 8] = ["DT", "IN", "JJ", "MD", "NN", "PR", "RB", "VB"];
const OPEN: [&str; 4] = ["JJ", "NN", "RB", "VB"];
const DT: usize = 0;
const IN: usize = 1;
const JJ: usize = 2;
const MD: usize = 3;
const NN: usize = 4;
const PR: usize = 5;
const RB: usize = 6;
const VB: usize = 7;

/// Start distribution, in `TAGS` order.
const INITIAL: [f64; 8] = [0.35, 0.10, 0.05, 0.0, 0.15, 0.25, 0.05, 0.05];

/// `TRANSITION[from][to]`.
const TRANSITION: [[f64; 8]; 8] = [
    //  DT    IN    JJ    MD    NN    PR    RB    VB
    [0.00, 0.00, 0.30, 0.00, 0.65, 0.00, 0.05, 0.00], // DT
    [0.55, 0.00, 0.10, 0.00, 0.15, 0.20, 0.00, 0.00], // IN
    [0.00, 0.10, 0.10, 0.00, 0.75, 0.00, 0.05, 0.00], // JJ
    [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.15, 0.85], // MD
    [0.05, 0.25, 0.00, 0.15, 0.10, 0.00, 0.05, 0.40], // NN
    [0.00, 0.00, 0.00, 0.30, 0.00, 0.00, 0.10, 0.60], // PR
    [0.10, 0.10, 0.30, 0.00, 0.00, 0.00, 0.00, 0.50], // RB
    [0.40, 0.20, 0.10, 0.00, 0.00, 0.15, 0.15, 0.00], // VB
];

/// A group of vocabulary words sharing the same possible tags.
struct WordClass {
    /// `(tag, share of that tag's emission mass taken by this class)`
    tags: &'static [(usize, f64)],
    size: usize,
    suffixes: &'static [&'static str],
}

const CLASSES: [WordClass; 13] = [
    WordClass {
        tags: &[(DT, 0.65)],
        size: 4,
        suffixes: &[""],
    },
    WordClass {
        tags: &[(IN, 0.70)],
        size: 8,
        suffixes: &[""],
    },
    WordClass {
        tags: &[(PR, 0.60)],
        size: 6,
        suffixes: &[""],
    },
    WordClass {
        tags: &[(MD, 1.00)],
        size: 4,
        suffixes: &["ll", "n"],
    },
    WordClass {
        tags: &[(DT, 0.35), (PR, 0.40)],
        size: 2,
        suffixes: &["at"],
    },
    WordClass {
        tags: &[(IN, 0.30), (RB, 0.40)],
        size: 6,
        suffixes: &["er", "on"],
    },
    WordClass {
        tags: &[(NN, 0.55)],
        size: 90,
        suffixes: &["tion", "ness", "ment", "ist"],
    },
    WordClass {
        tags: &[(VB, 0.50)],
        size: 60,
        suffixes: &["ize", "ate", "ify"],
    },
    WordClass {
        tags: &[(JJ, 0.55)],
        size: 40,
        suffixes: &["ous", "ful", "ive", "ic"],
    },
    WordClass {
        tags: &[(RB, 0.60)],
        size: 20,
        suffixes: &["ly"],
    },
    WordClass {
        tags: &[(NN, 0.30), (VB, 0.40)],
        size: 40,
        suffixes: &["", "ow", "ump", "ack"],
    },
    WordClass {
        tags: &[(JJ, 0.25), (NN, 0.15)],
        size: 12,
        suffixes: &["al", "ant"],
    },
    WordClass {
        tags: &[(VB, 0.10), (JJ, 0.20)],
        size: 8,
        suffixes: &["ed"],
    },
];

const MIN_SENTENCE: usize = 6;
const MAX_SENTENCE: usize = 20;

#[derive(Debug, Clone)]
pub struct SyntheticGrammar {
    pub tagset: TagSet,
    pub words: Vec<String>,
    word_index: HashMap<String, usize>,
    /// `emission[tag][word]`
    emission: Vec<Vec<f64>>,
    /// Per-tag cumulative emission for sampling.
    emission_cdf: Vec<Vec<f64>>,
}

fn cdf(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

fn sample(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cdf.last().expect("non-empty distribution");
    let u = rng.gen::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn make_stem(rng: &mut impl Rng) -> String {
    const ONSETS: [&str; 14] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
    ];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let syllables = rng.gen_range(1..=2);
    let mut s = String::new();
    for _ in 0..syllables {
        s.push_str(ONSETS.choose(rng).expect("non-empty"));
        s.push_str(VOWELS.choose(rng).expect("non-empty"));
    }
    s.push_str(ONSETS.choose(rng).expect("non-empty"));
    s
}

impl SyntheticGrammar {
    /// The fixed 8-tag, 300-word grammar; `seed` only picks word spellings
    /// and frequency ranks.
    pub fn new(seed: u64) -> Self {
        let tagset = TagSet::with_open(TAGS, OPEN).expect("static tagset");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut words = Vec::new();
        let mut seen = HashSet::new();
        let mut emission = vec![Vec::new(); TAGS.len()];

        for class in &CLASSES {
            // Zipf weights over the class, in random rank order.
            let mut ranks: Vec<usize> = (0..class.size).collect();
            ranks.shuffle(&mut rng);
            let norm: f64 = (1..=class.size).map(|r| 1.0 / r as f64).sum();
            for &rank in &ranks {
                let word = loop {
                    let suffix = class.suffixes.choose(&mut rng).expect("non-empty");
                    let w = format!("{}{}", make_stem(&mut rng), suffix);
                    if seen.insert(w.clone()) {
                        break w;
                    }
                };
                let weight = 1.0 / (rank + 1) as f64 / norm;
                for (t, row) in emission.iter_mut().enumerate() {
                    let share = class
                        .tags
                        .iter()
                        .find(|(tag, _)| *tag == t)
                        .map_or(0.0, |(_, s)| *s);
                    row.push(share * weight);
                }
                words.push(word);
            }
        }
        for row in emission.iter_mut() {
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
        }
        let emission_cdf = emission.iter().map(|row| cdf(row)).collect();
        let word_index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        SyntheticGrammar {
            tagset,
            words,
            word_index,
            emission,
            emission_cdf,
        }
    }

    pub fn vocabulary_size(&self) -> usize {
        self.words.len()
    }

    /// Number of tags that can emit `word`.
    pub fn tag_count(&self, word: &str) -> usize {
        self.word_index.get(word).map_or(0, |&w| {
            (0..TAGS.len())
                .filter(|&t| self.emission[t][w] > 0.0)
                .count()
        })
    }

    pub fn is_ambiguous(&self, word: &str) -> bool {
        self.tag_count(word) > 1
    }

    /// Generates exactly `tokens` tokens; the last sentence is cut short if
    /// needed.
    pub fn generate(&self, tokens: usize, seed: u64) -> TaggedCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let initial = cdf(&INITIAL);
        let transition: Vec<Vec<f64>> = TRANSITION.iter().map(|row| cdf(row)).collect();
        let mut sentences = Vec::new();
        let mut produced = 0;
        while produced < tokens {
            let len = rng
                .gen_range(MIN_SENTENCE..=MAX_SENTENCE)
                .min(tokens - produced);
            let mut sentence = Vec::with_capacity(len);
            let mut tag = sample(&initial, &mut rng);
            for i in 0..len {
                if i > 0 {
                    tag = sample(&transition[tag], &mut rng);
                }
                let w = sample(&self.emission_cdf[tag], &mut rng);
                sentence.push(Token {
                    word: self.words[w].clone(),
                    tag,
                });
            }
            produced += len;
            sentences.push(sentence);
        }
        TaggedCorpus::new(sentences, self.tagset.clone()).expect("generated corpus is valid")
    }

    fn emit(&self, tag: usize, word: &str) -> f64 {
        self.word_index
            .get(word)
            .map_or(0.0, |&w| self.emission[tag][w])
    }

    /// Posterior tag marginals `P(tag_i | words)` by the forward-backward
    /// recursions, rescaled per position.
    pub fn posterior_marginals<S: AsRef<str>>(&self, words: &[S]) -> Vec<Vec<f64>> {
        let n = TAGS.len();
        let len = words.len();
        if len == 0 {
            return Vec::new();
        }
        let normalize = |v: &mut Vec<f64>| {
            let s: f64 = v.iter().sum();
            if s > 0.0 {
                v.iter_mut().for_each(|x| *x /= s);
            }
        };

        let mut forward: Vec<Vec<f64>> = Vec::with_capacity(len);
        let mut first: Vec<f64> = (0..n)
            .map(|t| INITIAL[t] * self.emit(t, words[0].as_ref()))
            .collect();
        normalize(&mut first);
        forward.push(first);
        for i in 1..len {
            let prev = &forward[i - 1];
            let mut cur: Vec<f64> = (0..n)
                .map(|t| {
                    let inflow: f64 = (0..n).map(|s| prev[s] * TRANSITION[s][t]).sum();
                    inflow * self.emit(t, words[i].as_ref())
                })
                .collect();
            normalize(&mut cur);
            forward.push(cur);
        }

        let mut backward = vec![vec![1.0; n]; len];
        for i in (0..len - 1).rev() {
            let mut cur: Vec<f64> = (0..n)
                .map(|s| {
                    (0..n)
                        .map(|t| {
                            TRANSITION[s][t]
                                * self.emit(t, words[i + 1].as_ref())
                                * backward[i + 1][t]
                        })
                        .sum()
                })
                .collect();
            normalize(&mut cur);
            backward[i] = cur;
        }

        forward
            .into_iter()
            .zip(backward)
            .map(|(f, b)| {
                let mut m: Vec<f64> = f.iter().zip(&b).map(|(x, y)| x * y).collect();
                normalize(&mut m);
                m
            })
            .collect()
    }

    /// Per-token posterior argmax (lowest index on ties).
    pub fn decode<S: AsRef<str>>(&self, words: &[S]) -> Vec<usize> {
        self.posterior_marginals(words)
            .iter()
            .map(|m| {
                let mut best = 0;
                for (t, &p) in m.iter().enumerate() {
                    if p > m[best] {
                        best = t;
                    }
                }
                best
            })
            .collect()
    }

    /// Joint probability of a tag sequence and word sequence.
    pub fn joint<S: AsRef<str>>(&self, tags: &[usize], words: &[S]) -> f64 {
        let mut p = 1.0;
        for (i, (&t, w)) in tags.iter().zip(words).enumerate() {
            p *= if i == 0 {
                INITIAL[t]
            } else {
                TRANSITION[tags[i - 1]][t]
            };
            p *= self.emit(t, w.as_ref());
        }
        p
    }
}
