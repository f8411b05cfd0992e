//! File helpers: path-annotated I/O errors, atomic output, and the plain
//! word and tagged-output formats.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::CliError;

fn with_path(path: &Path, e: io::Error) -> CliError {
    io::Error::new(e.kind(), format!("{}: {e}", path.display())).into()
}

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| with_path(path, e))
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| with_path(path, e))
}

/// Runs `body` against `path`, or standard output when `path` is `None`.
/// A file only appears once `body` has succeeded; it is written to a
/// temporary file in the same directory and renamed into place.
pub fn write_output<F>(path: Option<&Path>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match path {
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let tmp = NamedTempFile::new_in(dir).map_err(|e| with_path(dir, e))?;
            let mut w = BufWriter::new(tmp);
            body(&mut w)?;
            let tmp = w
                .into_inner()
                .map_err(|e| with_path(path, e.into_error()))?;
            tmp.persist(path).map_err(|e| with_path(path, e.error))?;
            Ok(())
        }
    }
}

/// Sentences of words from one-token-per-line text. Only the first
/// tab-separated field is used, so tagged files can be re-tagged. Lines
/// starting with `#` before the first word are comments.
pub fn read_words<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>, CliError> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    let mut seen_word = false;
    for line in reader.lines() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if !seen_word && line.starts_with('#') {
            continue;
        }
        let word = line.split('\t').next().unwrap_or_default().trim();
        if word.is_empty() {
            continue;
        }
        seen_word = true;
        current.push(word.to_string());
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

/// One token of tagger output.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedLine {
    pub line: usize,
    pub word: String,
    pub tag: String,
    pub alternative: Option<String>,
}

/// Reads tagger output: `word<TAB>tag`, optionally followed by an
/// alternative tag (possibly empty) and a score column.
pub fn read_tagged<R: BufRead>(reader: R) -> Result<Vec<Vec<TaggedLine>>, CliError> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    let mut seen = false;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if !seen && line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=4).contains(&fields.len()) || fields[0].is_empty() || fields[1].is_empty() {
            return Err(nettagger::Error::Parse {
                line: n + 1,
                msg: "expected `word<TAB>tag[<TAB>alternative[<TAB>scores]]`".into(),
            }
            .into());
        }
        seen = true;
        current.push(TaggedLine {
            line: n + 1,
            word: fields[0].to_string(),
            tag: fields[1].to_string(),
            alternative: fields
                .get(2)
                .filter(|a| !a.is_empty())
                .map(|a| a.to_string()),
        });
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}
