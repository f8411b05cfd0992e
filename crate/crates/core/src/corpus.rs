//! Tagged corpora in the vertical `word<TAB>tag` format, the tagset they are
//! labelled with, and the raw word/tag counts that feed lexicon construction.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{argument, Error, Result};

/// Ordered tag inventory. The position of a tag is its index in every
/// probability and activation vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    tags: Vec<String>,
    index: HashMap<String, usize>,
    open: Vec<bool>,
}

impl TagSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tags = Vec::new();
        let mut index = HashMap::new();
        for name in names {
            let name = name.into();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(argument(format!("invalid tag name {name:?}")));
            }
            if index.insert(name.clone(), tags.len()).is_some() {
                return Err(argument(format!("duplicate tag `{name}`")));
            }
            tags.push(name);
        }
        let open = vec![false; tags.len()];
        Ok(TagSet { tags, index, open })
    }

    /// Builds a tagset and flags the listed tags as open-class.
    pub fn with_open<I, S, J, T>(names: I, open: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        J: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut set = TagSet::new(names)?;
        for name in open {
            set.set_open(name.as_ref(), true)?;
        }
        Ok(set)
    }

    pub fn set_open(&mut self, name: &str, open: bool) -> Result<()> {
        let i = self
            .index_of(name)
            .ok_or_else(|| argument(format!("tag `{name}` is not in the tagset")))?;
        self.open[i] = open;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.tags
    }

    pub fn name(&self, i: usize) -> &str {
        &self.tags[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn is_open(&self, i: usize) -> bool {
        self.open[i]
    }

    pub fn has_open_class(&self) -> bool {
        self.open.iter().any(|&o| o)
    }

    /// Reads a tagset config: one tag per line, optionally followed by
    /// `<TAB>open`. Blank lines are skipped.
    pub fn read_config<R: BufRead>(reader: R) -> Result<Self> {
        let mut names = Vec::new();
        let mut open = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let name = fields.next().unwrap_or_default();
            match (fields.next(), fields.next()) {
                (None, _) => {}
                (Some("open"), None) => open.push(name.to_string()),
                _ => {
                    return Err(Error::Parse {
                        line: n + 1,
                        msg: format!("expected `tag` or `tag<TAB>open`, got {line:?}"),
                    })
                }
            }
            names.push(name.to_string());
        }
        TagSet::with_open(names, open)
    }

    pub fn write_config<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, name) in self.tags.iter().enumerate() {
            if self.open[i] {
                writeln!(w, "{name}\topen")?;
            } else {
                writeln!(w, "{name}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub word: String,
    /// Index into the corpus tagset.
    pub tag: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedCorpus {
    pub sentences: Vec<Vec<Token>>,
    pub tagset: TagSet,
}

impl TaggedCorpus {
    pub fn new(sentences: Vec<Vec<Token>>, tagset: TagSet) -> Result<Self> {
        for sentence in &sentences {
            if sentence.is_empty() {
                return Err(argument("empty sentence"));
            }
            for token in sentence {
                if token.tag >= tagset.len() {
                    return Err(argument(format!("tag index {} out of range", token.tag)));
                }
                if token.word.is_empty() || token.word.chars().any(char::is_whitespace) {
                    return Err(argument(format!("invalid word {:?}", token.word)));
                }
            }
        }
        Ok(TaggedCorpus { sentences, tagset })
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    /// The shortest prefix of whole sentences holding at least `min_tokens`
    /// tokens.
    pub fn head(&self, min_tokens: usize) -> Result<TaggedCorpus> {
        let total = self.token_count();
        if min_tokens > total {
            return Err(argument(format!(
                "requested {min_tokens} tokens but the corpus has {total}"
            )));
        }
        let mut seen = 0;
        let mut sentences = Vec::new();
        for sentence in &self.sentences {
            if seen >= min_tokens {
                break;
            }
            seen += sentence.len();
            sentences.push(sentence.clone());
        }
        Ok(TaggedCorpus {
            sentences,
            tagset: self.tagset.clone(),
        })
    }
}

/// Parses a vertical corpus. With `tagset` supplied every tag is validated
/// against it; otherwise the tagset is derived from the data, sorted.
pub fn parse_corpus<R: BufRead>(reader: R, tagset: Option<&TagSet>) -> Result<TaggedCorpus> {
    // (word, tag, line number) per token, grouped by sentence.
    let mut raw: Vec<Vec<(String, String, usize)>> = Vec::new();
    let mut current = Vec::new();
    let mut seen_token = false;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = n + 1;
        if line.trim().is_empty() {
            if !current.is_empty() {
                raw.push(std::mem::take(&mut current));
            }
            continue;
        }
        if !seen_token && line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `word<TAB>tag`, got {} field(s)", fields.len()),
            });
        }
        let (word, tag) = (fields[0], fields[1]);
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("invalid word {word:?}"),
            });
        }
        if tag.is_empty() || tag.chars().any(char::is_whitespace) {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("invalid tag {tag:?}"),
            });
        }
        seen_token = true;
        current.push((word.to_string(), tag.to_string(), lineno));
    }
    if !current.is_empty() {
        raw.push(current);
    }

    let tagset = match tagset {
        Some(t) => t.clone(),
        None => {
            let mut names: Vec<&str> = raw.iter().flatten().map(|(_, t, _)| t.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            TagSet::new(names)?
        }
    };

    let mut sentences = Vec::with_capacity(raw.len());
    for sentence in raw {
        let mut tokens = Vec::with_capacity(sentence.len());
        for (word, tag, line) in sentence {
            let tag = tagset
                .index_of(&tag)
                .ok_or(Error::UnknownTag { line, tag })?;
            tokens.push(Token { word, tag });
        }
        sentences.push(tokens);
    }
    Ok(TaggedCorpus { sentences, tagset })
}

pub fn write_corpus<W: Write>(corpus: &TaggedCorpus, mut w: W) -> Result<()> {
    for sentence in &corpus.sentences {
        for token in sentence {
            writeln!(w, "{}\t{}", token.word, corpus.tagset.name(token.tag))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Splits off the final whole sentences, at least `test_tokens` of them, as
/// a test set.
pub fn split_corpus(
    corpus: &TaggedCorpus,
    test_tokens: usize,
) -> Result<(TaggedCorpus, TaggedCorpus)> {
    let total = corpus.token_count();
    if test_tokens == 0 || test_tokens >= total {
        return Err(argument(format!(
            "test_tokens must be in 1..{total}, got {test_tokens}"
        )));
    }
    let mut taken = 0;
    let mut cut = corpus.sentences.len();
    while taken < test_tokens {
        cut -= 1;
        taken += corpus.sentences[cut].len();
    }
    if cut == 0 {
        return Err(argument(format!(
            "a test set of {test_tokens} tokens would leave no training sentences"
        )));
    }
    let train = TaggedCorpus {
        sentences: corpus.sentences[..cut].to_vec(),
        tagset: corpus.tagset.clone(),
    };
    let test = TaggedCorpus {
        sentences: corpus.sentences[cut..].to_vec(),
        tagset: corpus.tagset.clone(),
    };
    Ok((train, test))
}

/// Per-word tag frequencies, indexed like the tagset.
pub type WordTagCounts = BTreeMap<String, Vec<u64>>;

pub fn count_word_tags(corpus: &TaggedCorpus) -> WordTagCounts {
    let n = corpus.tagset.len();
    let mut counts = WordTagCounts::new();
    for token in corpus.tokens() {
        let entry = counts
            .entry(token.word.clone())
            .or_insert_with(|| vec![0; n]);
        entry[token.tag] += 1;
    }
    counts
}
