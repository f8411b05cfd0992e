//! `netlex 1` text serialization.
//!
//! ```text
//! netlex 1
//! [tagset]
//! DT
//! NN<TAB>open
//! [fullform]
//! word<TAB>p1,...,pn
//! [suffixtree]
//! depth<TAB>label<TAB>f1,...,fn[<TAB>p1,...,pn]
//! [default]
//! p1,...,pn
//! ```
//!
//! Trie nodes are listed in preorder; the probability field is present on
//! leaves only. Probabilities are written with 9 significant digits.

use std::io::{BufRead, Write};

use crate::corpus::TagSet;
use crate::error::{format_err, Error, Result};

use super::prob::TagProbVector;
use super::suffix::{Label, SuffixNode};
use super::{FullformLexicon, Lexicon};

const HEADER: &str = "netlex 1";

fn fmt_prob(p: f64) -> String {
    format!("{p:.8e}")
}

fn join_probs(v: &[f64]) -> String {
    v.iter().map(|&p| fmt_prob(p)).collect::<Vec<_>>().join(",")
}

fn join_freqs(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub fn write_lexicon<W: Write>(lex: &Lexicon, mut w: W) -> Result<()> {
    writeln!(w, "{HEADER}")?;
    writeln!(w, "[tagset]")?;
    lex.tagset.write_config(&mut w)?;
    writeln!(w, "[fullform]")?;
    for (word, probs) in &lex.fullform {
        writeln!(w, "{word}\t{}", join_probs(probs))?;
    }
    writeln!(w, "[suffixtree]")?;
    let mut result = Ok(());
    lex.suffix_tree.preorder(|depth, node| {
        if result.is_err() {
            return;
        }
        let freqs = join_freqs(&node.freqs);
        result = match (&node.probs, node.is_leaf()) {
            (Some(p), true) => writeln!(w, "{depth}\t{}\t{freqs}\t{}", node.label, join_probs(p)),
            _ => writeln!(w, "{depth}\t{}\t{freqs}", node.label),
        };
    });
    result?;
    writeln!(w, "[default]")?;
    writeln!(w, "{}", join_probs(&lex.default_entry))?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
    peeked: Option<String>,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<Option<String>> {
        if let Some(l) = self.peeked.take() {
            return Ok(Some(l));
        }
        match self.inner.next() {
            None => Ok(None),
            Some(l) => {
                self.line += 1;
                Ok(Some(l?.trim_end_matches('\r').to_string()))
            }
        }
    }

    fn peek_is_section(&mut self) -> Result<bool> {
        if self.peeked.is_none() {
            self.peeked = self.next()?;
        }
        Ok(match &self.peeked {
            None => true,
            Some(l) => is_section(l),
        })
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        match self.next()? {
            Some(l) if l == want => Ok(()),
            Some(l) => Err(self.err(format!("expected `{want}`, found {l:?}"))),
            None => Err(self.err(format!("expected `{want}`, found end of file"))),
        }
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse {
            line: self.line,
            msg,
        }
    }
}

fn is_section(line: &str) -> bool {
    matches!(
        line,
        "[tagset]" | "[fullform]" | "[suffixtree]" | "[default]"
    )
}

fn parse_probs(s: &str, n: usize) -> std::result::Result<TagProbVector, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.parse::<f64>()
                .map_err(|e| format!("bad number {x:?}: {e}"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} values, found {}", v.len()));
    }
    Ok(v)
}

fn parse_freqs(s: &str, n: usize) -> std::result::Result<Vec<u64>, String> {
    let v: Vec<u64> = s
        .split(',')
        .map(|x| {
            x.parse::<u64>()
                .map_err(|e| format!("bad count {x:?}: {e}"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} counts, found {}", v.len()));
    }
    Ok(v)
}

fn parse_label(s: &str) -> Option<Label> {
    match s {
        "<ROOT>" => Some(Label::Root),
        "<DEFAULT>" => Some(Label::Default),
        _ => {
            let mut chars = s.chars();
            let c = chars.next()?;
            chars.next().is_none().then_some(Label::Char(c))
        }
    }
}

pub fn read_lexicon<R: BufRead>(reader: R) -> Result<Lexicon> {
    let mut lines = Lines {
        inner: reader.lines(),
        line: 0,
        peeked: None,
    };
    match lines.next()? {
        Some(l) if l == HEADER => {}
        Some(l) => return Err(format_err(format!("unsupported lexicon header {l:?}"))),
        None => return Err(format_err("empty lexicon file")),
    }

    lines.expect("[tagset]")?;
    let mut tagset_text = String::new();
    while !lines.peek_is_section()? {
        tagset_text.push_str(&lines.next()?.unwrap_or_default());
        tagset_text.push('\n');
    }
    let tagset = TagSet::read_config(tagset_text.as_bytes())?;
    let n = tagset.len();

    lines.expect("[fullform]")?;
    let mut fullform = FullformLexicon::new();
    while !lines.peek_is_section()? {
        let l = lines.next()?.unwrap_or_default();
        let (word, probs) = l
            .split_once('\t')
            .ok_or_else(|| lines.err(format!("expected `word<TAB>probs`, found {l:?}")))?;
        let probs = parse_probs(probs, n).map_err(|m| lines.err(m))?;
        fullform.insert(word.to_string(), probs);
    }

    lines.expect("[suffixtree]")?;
    // Stack of open nodes; the node at index d sits at depth d.
    let mut stack: Vec<SuffixNode> = Vec::new();
    let mut root: Option<SuffixNode> = None;
    while !lines.peek_is_section()? {
        let l = lines.next()?.unwrap_or_default();
        let fields: Vec<&str> = l.split('\t').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(lines.err(format!("malformed trie line {l:?}")));
        }
        let depth: usize = fields[0]
            .parse()
            .map_err(|_| lines.err(format!("bad depth {:?}", fields[0])))?;
        let label = parse_label(fields[1])
            .ok_or_else(|| lines.err(format!("bad label {:?}", fields[1])))?;
        if (depth == 0) != (label == Label::Root)
            || depth > stack.len()
            || (depth == 0 && !stack.is_empty())
        {
            return Err(lines.err(format!("node at depth {depth} is out of place")));
        }
        fold_stack(&mut stack, depth, &mut root);
        let mut node = SuffixNode::new(label, n);
        node.freqs = parse_freqs(fields[2], n).map_err(|m| lines.err(m))?;
        if let Some(p) = fields.get(3) {
            node.probs = Some(parse_probs(p, n).map_err(|m| lines.err(m))?);
        }
        stack.push(node);
    }
    fold_stack(&mut stack, 0, &mut root);
    let suffix_tree = root.ok_or_else(|| format_err("suffix tree has no root"))?;
    let mut misplaced = false;
    suffix_tree.preorder(|_, node| misplaced |= node.probs.is_some() && !node.is_leaf());
    if misplaced {
        return Err(format_err("probability vector on an internal trie node"));
    }

    lines.expect("[default]")?;
    let l = lines
        .next()?
        .ok_or_else(|| format_err("missing default entry"))?;
    let default_entry = parse_probs(&l, n).map_err(|m| lines.err(m))?;
    while let Some(l) = lines.next()? {
        if !l.is_empty() {
            return Err(lines.err(format!("trailing content {l:?}")));
        }
    }

    Ok(Lexicon {
        tagset,
        fullform,
        suffix_tree,
        default_entry,
    })
}

/// Pops nodes deeper than `depth - 1` off the stack into their parents.
fn fold_stack(stack: &mut Vec<SuffixNode>, depth: usize, root: &mut Option<SuffixNode>) {
    while stack.len() > depth {
        let node = stack.pop().expect("non-empty");
        match stack.last_mut() {
            Some(parent) => {
                parent.children.insert(node.label, node);
            }
            None => *root = Some(node),
        }
    }
}
