use std::io::Write;
use std::path::Path;

use nettagger::corpus::split_corpus;
use nettagger::evaluation::{self, evaluate};
use nettagger::lexicon::{read_lexicon, write_lexicon, Lexicon, SuffixNode};
use nettagger::tagger::{tag_sentence, train as train_model};
use nettagger::{parse_corpus, TagDecision, TagSet, TaggedCorpus, TaggerModel};

use crate::config::RunConfig;
use crate::files::{self, TaggedLine};
use crate::CliError;

fn require<'a, T>(value: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| {
        CliError::Usage(format!(
            "`{key}` must be set, in the config file or as --{}",
            key.replace('_', "-")
        ))
    })
}

fn load_tagset(cfg: &RunConfig) -> Result<Option<TagSet>, CliError> {
    cfg.tagset
        .as_deref()
        .map(|p| Ok(TagSet::read_config(files::open(p)?)?))
        .transpose()
}

fn load_lexicon(cfg: &RunConfig) -> Result<Lexicon, CliError> {
    Ok(read_lexicon(files::open(require(
        &cfg.lexicon,
        "lexicon",
    )?)?)?)
}

fn load_corpus(path: &Path, tagset: Option<&TagSet>) -> Result<TaggedCorpus, CliError> {
    Ok(parse_corpus(files::open(path)?, tagset)?)
}

/// The corpus parsed against the configured tagset. A tagset file is needed
/// since it marks the open word classes.
fn training_corpus(cfg: &RunConfig) -> Result<TaggedCorpus, CliError> {
    let tagset = load_tagset(cfg)?.ok_or_else(|| {
        CliError::Usage("`tagset` must be set; it lists the open word classes".into())
    })?;
    load_corpus(require(&cfg.corpus, "corpus")?, Some(&tagset))
}

pub fn build_lexicon(cfg: &RunConfig) -> Result<(), CliError> {
    let out = require(&cfg.lexicon, "lexicon")?;
    let corpus = training_corpus(cfg)?;
    let lexicon = Lexicon::build(&corpus, &cfg.lexicon_params())?;
    eprintln!(
        "lexicon: {} word forms, {} suffix-tree nodes ({} leaves)",
        lexicon.fullform.len(),
        lexicon.suffix_tree.node_count(),
        lexicon.suffix_tree.leaves().len()
    );
    files::write_output(Some(out), |w| Ok(write_lexicon(&lexicon, w)?))
}

pub fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let out = require(&cfg.model, "model")?;
    let lexicon = load_lexicon(cfg)?;
    let corpus = load_corpus(require(&cfg.corpus, "corpus")?, Some(&lexicon.tagset))?;
    let recipe = cfg.recipe();
    let mut model = TaggerModel::new(
        lexicon,
        recipe.context,
        recipe.hidden,
        recipe.schedule.hyperparams.seed,
        recipe.init_range,
    )?;
    let log = train_model(&mut model, &corpus, &recipe.schedule)?;
    for e in &log.entries {
        eprintln!(
            "cycle {}\tmse {:.6}\tlambda {:.4}",
            e.cycle, e.mse, e.lambda
        );
    }
    files::write_output(Some(out), |w| Ok(model.write_network(w)?))
}

fn load_model(cfg: &RunConfig) -> Result<TaggerModel, CliError> {
    let lexicon = load_lexicon(cfg)?;
    let path = require(&cfg.model, "model")?;
    Ok(TaggerModel::read_network(
        files::open(path)?,
        lexicon,
        cfg.context(),
    )?)
}

fn write_decision(
    w: &mut dyn Write,
    tagset: &TagSet,
    word: &str,
    d: &TagDecision,
    scores: bool,
) -> std::io::Result<()> {
    write!(w, "{word}\t{}", tagset.name(d.primary))?;
    let alt = d.alternative.map(|a| tagset.name(a));
    if scores {
        let s: Vec<String> = d.scores.iter().map(|x| format!("{x:.6}")).collect();
        writeln!(w, "\t{}\t{}", alt.unwrap_or(""), s.join(","))
    } else if let Some(alt) = alt {
        writeln!(w, "\t{alt}")
    } else {
        writeln!(w)
    }
}

pub fn tag(cfg: &RunConfig, input: Option<&Path>, scores: bool) -> Result<(), CliError> {
    let model = load_model(cfg)?;
    let sentences = match input {
        Some(p) => files::read_words(files::open(p)?)?,
        None => files::read_words(std::io::stdin().lock())?,
    };
    let margin = cfg.alt_margin();
    files::write_output(cfg.output.as_deref(), |w| {
        for words in &sentences {
            let decisions = tag_sentence(&model, words, margin)?;
            for (word, d) in words.iter().zip(&decisions) {
                write_decision(w, model.tagset(), word, d, scores)?;
            }
            writeln!(w)?;
        }
        Ok(())
    })
}

/// Tagset for scoring: the configured one, else the lexicon's, else every
/// tag seen in either file.
fn eval_tagset(
    cfg: &RunConfig,
    gold_path: &Path,
    tagged: &[Vec<TaggedLine>],
) -> Result<TagSet, CliError> {
    if let Some(t) = load_tagset(cfg)? {
        return Ok(t);
    }
    if cfg.lexicon.is_some() {
        return Ok(load_lexicon(cfg)?.tagset);
    }
    let gold = load_corpus(gold_path, None)?;
    let mut names: Vec<String> = gold.tagset.names().to_vec();
    for t in tagged.iter().flatten() {
        names.push(t.tag.clone());
        names.extend(t.alternative.clone());
    }
    names.sort();
    names.dedup();
    Ok(TagSet::new(names)?)
}

fn misaligned(line: usize, msg: String) -> CliError {
    nettagger::Error::Format(format!("tagged file line {line}: {msg}")).into()
}

fn align(
    gold: &TaggedCorpus,
    tagged: &[Vec<TaggedLine>],
    tagset: &TagSet,
) -> Result<Vec<TagDecision>, CliError> {
    let tag_index = |name: &str, line: usize| {
        tagset.index_of(name).ok_or_else(|| {
            CliError::from(nettagger::Error::UnknownTag {
                line,
                tag: name.to_string(),
            })
        })
    };
    let last_line = tagged.last().and_then(|s| s.last()).map_or(0, |t| t.line);
    let mut decisions = Vec::with_capacity(gold.token_count());
    for (i, gs) in gold.sentences.iter().enumerate() {
        let Some(ts) = tagged.get(i) else {
            return Err(misaligned(
                last_line + 1,
                format!("file ends before gold sentence {}", i + 1),
            ));
        };
        for (j, g) in gs.iter().enumerate() {
            let Some(t) = ts.get(j) else {
                let line = ts.last().map_or(0, |t| t.line) + 1;
                return Err(misaligned(
                    line,
                    format!("sentence ends early, gold has `{}` next", g.word),
                ));
            };
            if t.word != g.word {
                return Err(misaligned(
                    t.line,
                    format!("word `{}` where gold has `{}`", t.word, g.word),
                ));
            }
            decisions.push(TagDecision {
                primary: tag_index(&t.tag, t.line)?,
                primary_score: 1.0,
                alternative: t
                    .alternative
                    .as_deref()
                    .map(|a| tag_index(a, t.line))
                    .transpose()?,
                alternative_score: None,
                scores: Vec::new(),
            });
        }
        if let Some(extra) = ts.get(gs.len()) {
            return Err(misaligned(
                extra.line,
                format!(
                    "extra token `{}` past the end of gold sentence {}",
                    extra.word,
                    i + 1
                ),
            ));
        }
    }
    if let Some(extra) = tagged.get(gold.sentences.len()) {
        return Err(misaligned(
            extra[0].line,
            "extra sentence past the end of gold".into(),
        ));
    }
    Ok(decisions)
}

pub fn eval(
    cfg: &RunConfig,
    gold_path: &Path,
    tagged_path: &Path,
    compare_path: Option<&Path>,
) -> Result<(), CliError> {
    let tagged = files::read_tagged(files::open(tagged_path)?)?;
    let other = compare_path
        .map(|p| files::read_tagged(files::open(p)?))
        .transpose()?;
    let all_tagged: Vec<Vec<TaggedLine>> = tagged
        .iter()
        .chain(other.iter().flatten())
        .cloned()
        .collect();
    let tagset = eval_tagset(cfg, gold_path, &all_tagged)?;
    let gold = load_corpus(gold_path, Some(&tagset))?;
    let decisions = align(&gold, &tagged, &tagset)?;
    let report = evaluate(&gold, &decisions)?;
    print!("{}", report.table());

    // (errors in the tagged file, errors in the other file, shared, overlap)
    let comparison = match &other {
        None => None,
        Some(other) => {
            let a = evaluation::error_positions(&gold, &decisions);
            let b = evaluation::error_positions(&gold, &align(&gold, other, &tagset)?);
            let shared = a.intersection(&b).count();
            Some((a.len(), b.len(), shared, evaluation::error_overlap(&a, &b)))
        }
    };
    let write_comparison = |w: &mut dyn Write| -> std::io::Result<()> {
        if let Some((a, b, shared, overlap)) = comparison {
            writeln!(w, "errors\t{a}")?;
            writeln!(w, "compare_errors\t{b}")?;
            writeln!(w, "shared_errors\t{shared}")?;
            writeln!(w, "error_overlap\t{overlap:.6}")?;
        }
        Ok(())
    };
    write_comparison(&mut std::io::stdout().lock())?;
    if let Some(out) = cfg.output.as_deref() {
        files::write_output(Some(out), |w| {
            report.write_summary(&mut *w)?;
            Ok(write_comparison(w)?)
        })?;
        let mut confusion = out.as_os_str().to_owned();
        confusion.push(".confusion");
        files::write_output(Some(Path::new(&confusion)), |w| {
            Ok(report.write_confusion(&tagset, w)?)
        })?;
    }
    Ok(())
}

pub fn learning_curve(
    cfg: &RunConfig,
    test_tokens: usize,
    sizes: &[usize],
) -> Result<(), CliError> {
    let corpus = training_corpus(cfg)?;
    let (train, test) = split_corpus(&corpus, test_tokens)?;
    let points = evaluation::learning_curve(&train, sizes, &cfg.recipe(), &test, cfg.alt_margin())?;
    files::write_output(cfg.output.as_deref(), |w| {
        writeln!(w, "requested\ttrain_tokens\taccuracy")?;
        for p in &points {
            writeln!(w, "{}\t{}\t{:.6}", p.requested, p.train_tokens, p.accuracy)?;
        }
        Ok(())
    })
}

fn format_probs(tagset: &TagSet, probs: &[f64]) -> String {
    let parts: Vec<String> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, p)| format!("{}={p:.4}", tagset.name(i)))
        .collect();
    parts.join(" ")
}

fn format_freqs(tagset: &TagSet, node: &SuffixNode) -> String {
    let parts: Vec<String> = node
        .freqs
        .iter()
        .enumerate()
        .filter(|(_, &f)| f > 0)
        .map(|(i, f)| format!("{}:{f}", tagset.name(i)))
        .collect();
    parts.join(" ")
}

pub fn inspect(cfg: &RunConfig, word: Option<&str>) -> Result<(), CliError> {
    let lex = load_lexicon(cfg)?;
    let ts = &lex.tagset;
    files::write_output(cfg.output.as_deref(), |w| {
        match word {
            None => {
                writeln!(w, "tags\t{}", ts.len())?;
                let open: Vec<&str> = (0..ts.len())
                    .filter(|&i| ts.is_open(i))
                    .map(|i| ts.name(i))
                    .collect();
                writeln!(w, "open\t{}", open.join(" "))?;
                writeln!(w, "word_forms\t{}", lex.fullform.len())?;
                writeln!(w, "suffix_nodes\t{}", lex.suffix_tree.node_count())?;
                writeln!(w, "suffix_leaves\t{}", lex.suffix_tree.leaves().len())?;
                writeln!(w, "default\t{}", format_probs(ts, &lex.default_entry))?;
            }
            Some(word) => {
                let (probs, source) = lex.lookup_with_source(word);
                writeln!(w, "source\t{source:?}")?;
                writeln!(w, "probs\t{}", format_probs(ts, probs))?;
                writeln!(w, "suffix path:")?;
                for (depth, node) in lex.suffix_tree.walk(word).into_iter().enumerate() {
                    writeln!(
                        w,
                        "{}{}\t{}{}",
                        "  ".repeat(depth),
                        node.label,
                        format_freqs(ts, node),
                        if node.is_leaf() { "\t(leaf)" } else { "" }
                    )?;
                }
            }
        }
        Ok(())
    })
}
