//! The tagger: context-window input assembly, training with recurrent
//! feedback of earlier decisions, and greedy left-to-right decoding.
//!
//! The network input for the word at position `t` holds one tagset-sized
//! slot per context word, ordered `t-p, ..., t-1, t, t+1, ..., t+f`. Slots
//! for the current and following words carry lexicon probabilities; slots
//! for preceding words carry the network's own outputs for those words.
//! Slots outside the sentence are zero, and feedback never crosses a
//! sentence boundary.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::corpus::{TagSet, TaggedCorpus};
use crate::error::{argument, Error, Result};
use crate::lexicon::Lexicon;
use crate::network::{
    read_model, write_model, Network, NetworkShape, TrainingHyperparams, DEFAULT_INIT_RANGE,
};

pub const DEFAULT_PRECEDING: usize = 3;
pub const DEFAULT_FOLLOWING: usize = 2;
pub const DEFAULT_ALT_MARGIN: f64 = 0.1;
pub const DEFAULT_LOG_INTERVAL: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextConfig {
    pub preceding: usize,
    pub following: usize,
}

impl Default for ContextConfig {
    fn default() -> Self {
        ContextConfig {
            preceding: DEFAULT_PRECEDING,
            following: DEFAULT_FOLLOWING,
        }
    }
}

impl ContextConfig {
    pub fn new(preceding: usize, following: usize) -> Self {
        ContextConfig {
            preceding,
            following,
        }
    }

    /// Number of words in the window, `p + 1 + f`.
    pub fn slots(&self) -> usize {
        self.preceding + 1 + self.following
    }

    pub fn input_size(&self, tags: usize) -> usize {
        self.slots() * tags
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub network: Network,
    pub lexicon: Lexicon,
    pub context: ContextConfig,
}

impl TaggerModel {
    /// Fresh model with a seeded random network sized for the lexicon's
    /// tagset and the context window.
    pub fn new(
        lexicon: Lexicon,
        context: ContextConfig,
        hidden: usize,
        seed: u64,
        init_range: f64,
    ) -> Result<Self> {
        let n = lexicon.tagset.len();
        let shape = NetworkShape::new(context.input_size(n), hidden, n)?;
        let network = Network::init(shape, seed, init_range)?;
        Ok(TaggerModel {
            network,
            lexicon,
            context,
        })
    }

    pub fn from_parts(network: Network, lexicon: Lexicon, context: ContextConfig) -> Result<Self> {
        let n = lexicon.tagset.len();
        let shape = network.shape;
        if shape.input != context.input_size(n) || shape.output != n {
            return Err(Error::Config(format!(
                "network shape {}x{}x{} does not fit {} tags with context p={} f={}",
                shape.input, shape.hidden, shape.output, n, context.preceding, context.following
            )));
        }
        Ok(TaggerModel {
            network,
            lexicon,
            context,
        })
    }

    pub fn tagset(&self) -> &TagSet {
        &self.lexicon.tagset
    }

    /// Writes the network as a `netmodel 1` file with the context window as
    /// metadata.
    pub fn write_network<W: Write>(&self, w: W) -> Result<()> {
        let mut meta = BTreeMap::new();
        meta.insert(
            "context".to_string(),
            format!("{} {}", self.context.preceding, self.context.following),
        );
        write_model(&self.network, &meta, w)
    }

    /// Reads a network written by [`TaggerModel::write_network`]. The stored
    /// context wins over `fallback_context`.
    pub fn read_network<R: BufRead>(
        reader: R,
        lexicon: Lexicon,
        fallback_context: ContextConfig,
    ) -> Result<Self> {
        let file = read_model(reader)?;
        let context = match file.metadata.get("context") {
            None => fallback_context,
            Some(v) => {
                let nums: Vec<usize> = v
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Format(format!("bad context metadata {v:?}")))?;
                match nums[..] {
                    [p, f] => ContextConfig::new(p, f),
                    _ => return Err(Error::Format(format!("bad context metadata {v:?}"))),
                }
            }
        };
        Self::from_parts(file.network, lexicon, context)
    }
}

/// Writes the network input for `position` into `buf`.
///
/// `lexical[i]` is the lexicon vector of word `i` of the sentence and
/// `feedback` the vectors of the `min(p, position)` words right before
/// `position`, oldest first.
fn fill_input(
    buf: &mut [f64],
    lexical: &[&[f64]],
    position: usize,
    feedback: &[Vec<f64>],
    ctx: ContextConfig,
    n: usize,
) {
    buf.fill(0.0);
    let p = ctx.preceding;
    for (k, fb) in feedback.iter().rev().enumerate() {
        // k = 0 is the word at position - 1, which sits in slot p - 1
        let slot = p - 1 - k;
        buf[slot * n..(slot + 1) * n].copy_from_slice(fb);
    }
    for offset in 0..=ctx.following {
        let Some(vec) = lexical.get(position + offset) else {
            break;
        };
        let slot = p + offset;
        buf[slot * n..(slot + 1) * n].copy_from_slice(vec);
    }
}

fn check_feedback(
    feedback: &[Vec<f64>],
    position: usize,
    ctx: ContextConfig,
    n: usize,
) -> Result<()> {
    let want = ctx.preceding.min(position);
    if feedback.len() != want {
        return Err(argument(format!(
            "expected {want} feedback vectors at position {position}, got {}",
            feedback.len()
        )));
    }
    if let Some(v) = feedback.iter().find(|v| v.len() != n) {
        return Err(argument(format!(
            "feedback vector has {} values, tagset has {n}",
            v.len()
        )));
    }
    Ok(())
}

/// Network input for `words[position]`; `left_feedback` holds the output
/// vectors of the `min(p, position)` preceding words, oldest first.
pub fn assemble_input<S: AsRef<str>>(
    model: &TaggerModel,
    words: &[S],
    position: usize,
    left_feedback: &[Vec<f64>],
) -> Result<Vec<f64>> {
    if position >= words.len() {
        return Err(argument(format!(
            "position {position} outside a sentence of {} words",
            words.len()
        )));
    }
    let n = model.tagset().len();
    let ctx = model.context;
    check_feedback(left_feedback, position, ctx, n)?;
    let lexical: Vec<&[f64]> = words
        .iter()
        .map(|w| model.lexicon.lookup(w.as_ref()).as_slice())
        .collect();
    let mut buf = vec![0.0; ctx.input_size(n)];
    fill_input(&mut buf, &lexical, position, left_feedback, ctx, n);
    Ok(buf)
}

/// `lambda * target + (1 - lambda) * actual`.
pub fn blended_feedback(target: &[f64], actual: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if target.len() != actual.len() {
        return Err(argument("target and output lengths differ"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(argument(format!("lambda must be in [0, 1], got {lambda}")));
    }
    Ok(target
        .iter()
        .zip(actual)
        .map(|(&t, &a)| lambda * t + (1.0 - lambda) * a)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingSchedule {
    /// Word positions to process; the corpus is cycled as often as needed.
    pub total_cycles: u64,
    /// Cycles over which the teacher weight falls linearly from 1 to 0.
    pub forcing_cycles: u64,
    pub log_interval: u64,
    pub hyperparams: TrainingHyperparams,
}

impl TrainingSchedule {
    /// Schedule with teacher forcing over the first half of training.
    pub fn new(total_cycles: u64, hyperparams: TrainingHyperparams) -> Self {
        TrainingSchedule {
            total_cycles,
            forcing_cycles: total_cycles / 2,
            log_interval: DEFAULT_LOG_INTERVAL,
            hyperparams,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.forcing_cycles > self.total_cycles {
            return Err(Error::Config(format!(
                "forcing_cycles ({}) exceeds total_cycles ({})",
                self.forcing_cycles, self.total_cycles
            )));
        }
        if self.log_interval == 0 {
            return Err(Error::Config("log_interval must be positive".into()));
        }
        self.hyperparams.validate()
    }

    /// Weight of the target in the fed-back vector at `cycle`.
    pub fn lambda(&self, cycle: u64) -> f64 {
        if self.forcing_cycles == 0 {
            return 0.0;
        }
        (1.0 - cycle as f64 / self.forcing_cycles as f64).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    /// Cycles completed.
    pub cycle: u64,
    /// Mean over the interval of the per-pattern mean squared output error.
    pub mse: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub entries: Vec<LogEntry>,
}

/// Trains `model` on `corpus` in corpus order.
///
/// For each word the left-context slots are filled with the stored feedback
/// of the preceding words of the same sentence. The feedback stored for a
/// word is the blend of its one-hot target and the network output, weighted
/// by the teacher weight at the cycle the word was processed.
pub fn train(
    model: &mut TaggerModel,
    corpus: &TaggedCorpus,
    schedule: &TrainingSchedule,
) -> Result<TrainingLog> {
    schedule.validate()?;
    let n = model.tagset().len();
    if corpus.tagset.names() != model.tagset().names() {
        return Err(Error::Config(
            "corpus tagset differs from the lexicon tagset".into(),
        ));
    }
    let ctx = model.context;
    if model.network.shape.input != ctx.input_size(n) || model.network.shape.output != n {
        return Err(Error::Config(
            "network shape does not match tagset and context".into(),
        ));
    }
    let mut log = TrainingLog::default();
    if schedule.total_cycles == 0 {
        return Ok(log);
    }
    if corpus.token_count() == 0 {
        return Err(argument("cannot train on an empty corpus"));
    }

    let mut cache: HashMap<&str, Vec<f64>> = HashMap::new();
    for token in corpus.tokens() {
        cache
            .entry(token.word.as_str())
            .or_insert_with(|| model.lexicon.lookup(&token.word).clone());
    }

    let hp = schedule.hyperparams;
    let mut input = vec![0.0; ctx.input_size(n)];
    let mut target = vec![0.0; n];
    let mut cycle = 0u64;
    let mut interval_sum = 0.0;
    let mut interval_len = 0u64;

    'outer: loop {
        for sentence in &corpus.sentences {
            let lexical: Vec<&[f64]> = sentence
                .iter()
                .map(|t| cache[t.word.as_str()].as_slice())
                .collect();
            let mut history: Vec<Vec<f64>> = Vec::with_capacity(sentence.len());
            for (pos, token) in sentence.iter().enumerate() {
                if cycle == schedule.total_cycles {
                    break 'outer;
                }
                let lambda = schedule.lambda(cycle);
                let fb = &history[pos.saturating_sub(ctx.preceding)..pos];
                fill_input(&mut input, &lexical, pos, fb, ctx, n);
                target.fill(0.0);
                target[token.tag] = 1.0;

                let output = model.network.train_pattern(&input, &target, &hp)?;
                let sq: f64 = output
                    .iter()
                    .zip(&target)
                    .map(|(a, t)| (t - a) * (t - a))
                    .sum();
                interval_sum += sq / n as f64;
                interval_len += 1;
                history.push(blended_feedback(&target, &output, lambda)?);
                cycle += 1;

                if cycle.is_multiple_of(schedule.log_interval) || cycle == schedule.total_cycles {
                    let mse = interval_sum / interval_len as f64;
                    if !mse.is_finite() {
                        return Err(Error::Numeric(format!(
                            "training error became {mse} at cycle {cycle}"
                        )));
                    }
                    log.entries.push(LogEntry { cycle, mse, lambda });
                    interval_sum = 0.0;
                    interval_len = 0;
                }
            }
        }
    }
    Ok(log)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagDecision {
    pub primary: usize,
    pub primary_score: f64,
    /// Runner-up tag, present when its score is within the margin.
    pub alternative: Option<usize>,
    pub alternative_score: Option<f64>,
    /// Raw output activations; they need not sum to one.
    pub scores: Vec<f64>,
}

/// Picks the highest-scoring tag (lowest index on ties), plus the runner-up
/// as an alternative when it trails by less than `alt_margin`.
pub fn select_tags(output: &[f64], alt_margin: f64) -> TagDecision {
    let mut primary = 0;
    for (i, &s) in output.iter().enumerate() {
        if s > output[primary] {
            primary = i;
        }
    }
    let mut second: Option<usize> = None;
    for (i, &s) in output.iter().enumerate() {
        if i != primary && second.is_none_or(|j| s > output[j]) {
            second = Some(i);
        }
    }
    let primary_score = output[primary];
    let alternative = second.filter(|&j| primary_score - output[j] < alt_margin);
    TagDecision {
        primary,
        primary_score,
        alternative,
        alternative_score: alternative.map(|j| output[j]),
        scores: output.to_vec(),
    }
}

/// Tags one sentence left to right, feeding raw outputs back as left
/// context. Takes bare words, so gold tags cannot leak in.
pub fn tag_sentence<S: AsRef<str>>(
    model: &TaggerModel,
    words: &[S],
    alt_margin: f64,
) -> Result<Vec<TagDecision>> {
    let n = model.tagset().len();
    let ctx = model.context;
    let lexical: Vec<&[f64]> = words
        .iter()
        .map(|w| model.lexicon.lookup(w.as_ref()).as_slice())
        .collect();
    let mut input = vec![0.0; ctx.input_size(n)];
    let mut outputs: Vec<Vec<f64>> = Vec::with_capacity(words.len());
    let mut decisions = Vec::with_capacity(words.len());
    for pos in 0..words.len() {
        let fb = &outputs[pos.saturating_sub(ctx.preceding)..pos];
        fill_input(&mut input, &lexical, pos, fb, ctx, n);
        let out = model.network.forward(&input)?.output;
        decisions.push(select_tags(&out, alt_margin));
        outputs.push(out);
    }
    Ok(decisions)
}

/// Tags every sentence of `corpus` from its words alone, returning one
/// decision per token in corpus order.
pub fn tag_corpus(
    model: &TaggerModel,
    corpus: &TaggedCorpus,
    alt_margin: f64,
) -> Result<Vec<TagDecision>> {
    let mut out = Vec::with_capacity(corpus.token_count());
    for sentence in &corpus.sentences {
        let words: Vec<&str> = sentence.iter().map(|t| t.word.as_str()).collect();
        out.extend(tag_sentence(model, &words, alt_margin)?);
    }
    Ok(out)
}

/// Parameters for building and training a model from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelRecipe {
    pub lexicon: crate::lexicon::LexiconParams,
    pub context: ContextConfig,
    pub hidden: usize,
    pub init_range: f64,
    pub schedule: TrainingSchedule,
}

impl ModelRecipe {
    pub fn new(schedule: TrainingSchedule) -> Self {
        ModelRecipe {
            lexicon: Default::default(),
            context: ContextConfig::default(),
            hidden: 0,
            init_range: DEFAULT_INIT_RANGE,
            schedule,
        }
    }

    /// Builds the lexicon from `corpus`, initializes a network seeded from
    /// the schedule's hyperparameters and trains it.
    pub fn fit(&self, corpus: &TaggedCorpus) -> Result<(TaggerModel, TrainingLog)> {
        let lexicon = Lexicon::build(corpus, &self.lexicon)?;
        let mut model = TaggerModel::new(
            lexicon,
            self.context,
            self.hidden,
            self.schedule.hyperparams.seed,
            self.init_range,
        )?;
        let log = train(&mut model, corpus, &self.schedule)?;
        Ok((model, log))
    }
}
