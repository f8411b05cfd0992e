//! Run configuration: a flat `key = value` file, overridden by flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use nettagger::lexicon::LexiconParams;
use nettagger::tagger::{ModelRecipe, DEFAULT_ALT_MARGIN, DEFAULT_LOG_INTERVAL};
use nettagger::{ContextConfig, TrainingHyperparams, TrainingSchedule};

use crate::CliError;

/// Cycles used when neither the file nor the flags set `total_cycles`.
pub const DEFAULT_TOTAL_CYCLES: u64 = 100_000;

/// Every setting, each optional. Also serves as the flag set shared by all
/// subcommands.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct RunConfig {
    /// Tagged training corpus (`word<TAB>tag` lines)
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Tagset file (`tag` or `tag<TAB>open` per line)
    #[arg(long, global = true)]
    pub tagset: Option<PathBuf>,
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true)]
    pub preceding: Option<usize>,
    #[arg(long, global = true)]
    pub following: Option<usize>,
    #[arg(long, global = true)]
    pub hidden: Option<usize>,

    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, global = true)]
    pub momentum: Option<f64>,
    #[arg(long, global = true)]
    pub error_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub init_range: Option<f64>,

    #[arg(long, global = true)]
    pub total_cycles: Option<u64>,
    #[arg(long, global = true)]
    pub forcing_cycles: Option<u64>,
    #[arg(long, global = true)]
    pub log_interval: Option<u64>,

    #[arg(long, global = true)]
    pub max_suffix_len: Option<usize>,
    #[arg(long, global = true)]
    pub gain_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub prune_threshold: Option<f64>,

    #[arg(long, global = true)]
    pub alt_margin: Option<f64>,
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("config line {line}: bad value for {key}: {e}")))
}

fn set<T: FromStr>(
    slot: &mut Option<T>,
    line: usize,
    key: &str,
    value: &str,
) -> Result<(), CliError>
where
    T::Err: fmt::Display,
{
    if slot.is_some() {
        return Err(CliError::Config(format!(
            "config line {line}: {key} set twice"
        )));
    }
    *slot = Some(parse_value(line, key, value)?);
    Ok(())
}

impl RunConfig {
    /// Parses a config file. Blank lines and lines starting with `#` are
    /// ignored; unknown keys are an error.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(CliError::Config(format!(
                    "config line {line}: expected `key = value`"
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "corpus" => set(&mut c.corpus, line, key, value)?,
                "tagset" => set(&mut c.tagset, line, key, value)?,
                "lexicon" => set(&mut c.lexicon, line, key, value)?,
                "model" => set(&mut c.model, line, key, value)?,
                "output" => set(&mut c.output, line, key, value)?,
                "preceding" => set(&mut c.preceding, line, key, value)?,
                "following" => set(&mut c.following, line, key, value)?,
                "hidden" => set(&mut c.hidden, line, key, value)?,
                "learning_rate" => set(&mut c.learning_rate, line, key, value)?,
                "momentum" => set(&mut c.momentum, line, key, value)?,
                "error_threshold" => set(&mut c.error_threshold, line, key, value)?,
                "seed" => set(&mut c.seed, line, key, value)?,
                "init_range" => set(&mut c.init_range, line, key, value)?,
                "total_cycles" => set(&mut c.total_cycles, line, key, value)?,
                "forcing_cycles" => set(&mut c.forcing_cycles, line, key, value)?,
                "log_interval" => set(&mut c.log_interval, line, key, value)?,
                "max_suffix_len" => set(&mut c.max_suffix_len, line, key, value)?,
                "gain_threshold" => set(&mut c.gain_threshold, line, key, value)?,
                "prune_threshold" => set(&mut c.prune_threshold, line, key, value)?,
                "alt_margin" => set(&mut c.alt_margin, line, key, value)?,
                other => {
                    return Err(CliError::Config(format!(
                        "config line {line}: unknown key `{other}`"
                    )))
                }
            }
        }
        Ok(c)
    }

    /// Values from `flags` win over values in `self`.
    pub fn overridden_by(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            corpus: flags.corpus.or(self.corpus),
            tagset: flags.tagset.or(self.tagset),
            lexicon: flags.lexicon.or(self.lexicon),
            model: flags.model.or(self.model),
            output: flags.output.or(self.output),
            preceding: flags.preceding.or(self.preceding),
            following: flags.following.or(self.following),
            hidden: flags.hidden.or(self.hidden),
            learning_rate: flags.learning_rate.or(self.learning_rate),
            momentum: flags.momentum.or(self.momentum),
            error_threshold: flags.error_threshold.or(self.error_threshold),
            seed: flags.seed.or(self.seed),
            init_range: flags.init_range.or(self.init_range),
            total_cycles: flags.total_cycles.or(self.total_cycles),
            forcing_cycles: flags.forcing_cycles.or(self.forcing_cycles),
            log_interval: flags.log_interval.or(self.log_interval),
            max_suffix_len: flags.max_suffix_len.or(self.max_suffix_len),
            gain_threshold: flags.gain_threshold.or(self.gain_threshold),
            prune_threshold: flags.prune_threshold.or(self.prune_threshold),
            alt_margin: flags.alt_margin.or(self.alt_margin),
        }
    }

    pub fn context(&self) -> ContextConfig {
        let d = ContextConfig::default();
        ContextConfig::new(
            self.preceding.unwrap_or(d.preceding),
            self.following.unwrap_or(d.following),
        )
    }

    pub fn lexicon_params(&self) -> LexiconParams {
        let d = LexiconParams::default();
        LexiconParams {
            max_suffix_len: self.max_suffix_len.unwrap_or(d.max_suffix_len),
            gain_threshold: self.gain_threshold.unwrap_or(d.gain_threshold),
            prune_threshold: self.prune_threshold.unwrap_or(d.prune_threshold),
        }
    }

    pub fn hyperparams(&self) -> TrainingHyperparams {
        let d = TrainingHyperparams::default();
        TrainingHyperparams {
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            momentum: self.momentum.unwrap_or(d.momentum),
            error_threshold: self.error_threshold.unwrap_or(d.error_threshold),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    pub fn schedule(&self) -> TrainingSchedule {
        let total = self.total_cycles.unwrap_or(DEFAULT_TOTAL_CYCLES);
        let mut s = TrainingSchedule::new(total, self.hyperparams());
        if let Some(f) = self.forcing_cycles {
            s.forcing_cycles = f;
        }
        s.log_interval = self.log_interval.unwrap_or(DEFAULT_LOG_INTERVAL);
        s
    }

    pub fn recipe(&self) -> ModelRecipe {
        let mut r = ModelRecipe::new(self.schedule());
        r.lexicon = self.lexicon_params();
        r.context = self.context();
        r.hidden = self.hidden.unwrap_or(r.hidden);
        r.init_range = self.init_range.unwrap_or(r.init_range);
        r
    }

    pub fn alt_margin(&self) -> f64 {
        self.alt_margin.unwrap_or(DEFAULT_ALT_MARGIN)
    }

    /// Every key with its effective value, defaults filled in.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or_else(|| "(unset)".to_string(), |p| p.display().to_string())
        };
        let r = self.recipe();
        let s = r.schedule;
        let hp = s.hyperparams;
        vec![
            ("corpus", path(&self.corpus)),
            ("tagset", path(&self.tagset)),
            ("lexicon", path(&self.lexicon)),
            ("model", path(&self.model)),
            ("output", path(&self.output)),
            ("preceding", r.context.preceding.to_string()),
            ("following", r.context.following.to_string()),
            ("hidden", r.hidden.to_string()),
            ("learning_rate", hp.learning_rate.to_string()),
            ("momentum", hp.momentum.to_string()),
            ("error_threshold", hp.error_threshold.to_string()),
            ("seed", hp.seed.to_string()),
            ("init_range", r.init_range.to_string()),
            ("total_cycles", s.total_cycles.to_string()),
            ("forcing_cycles", s.forcing_cycles.to_string()),
            ("log_interval", s.log_interval.to_string()),
            ("max_suffix_len", r.lexicon.max_suffix_len.to_string()),
            ("gain_threshold", r.lexicon.gain_threshold.to_string()),
            ("prune_threshold", r.lexicon.prune_threshold.to_string()),
            ("alt_margin", self.alt_margin().to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let c = RunConfig::parse("# run\nhidden = 8\n\nseed=3\ncorpus = a b.txt\n").unwrap();
        assert_eq!(c.hidden, Some(8));
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.corpus, Some(PathBuf::from("a b.txt")));
        assert_eq!(c.preceding, None);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        for text in [
            "hiden = 3",
            "seed = 1\nseed = 2",
            "seed 1",
            "momentum = fast",
        ] {
            assert!(
                matches!(RunConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn flags_win_and_defaults_fill_in() {
        let file = RunConfig::parse("hidden = 8\nseed = 3\ntotal_cycles = 40").unwrap();
        let flags = RunConfig {
            seed: Some(9),
            ..Default::default()
        };
        let c = file.overridden_by(flags);
        assert_eq!(c.hidden, Some(8));
        assert_eq!(c.seed, Some(9));
        let s = c.schedule();
        assert_eq!((s.total_cycles, s.forcing_cycles), (40, 20));
        assert_eq!(c.context(), ContextConfig::new(3, 2));
        let resolved = c.resolved();
        assert_eq!(resolved.len(), 20);
        assert!(resolved.contains(&("model", "(unset)".to_string())));
    }
}
