//! Reading raw threads, writing token files, configuration and corpus splits.

mod config;
mod split;

pub(crate) use config::hex_digest;
pub use config::{PipelineConfig, Stage, DEFAULT_REWRITE_CAP};
pub use split::{split_corpus, CorpusSplit, SplitSets};

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenizer::TokenStream;

/// One forum thread as collected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawThread {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl RawThread {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            body: body.into(),
            meta: BTreeMap::new(),
        }
    }

    /// Text handed to normalization: `title + "\n" + body` when `with_title`
    /// is set and the title is non-empty, the body alone otherwise.
    pub fn document_text(&self, with_title: bool) -> String {
        if with_title && !self.title.trim().is_empty() {
            format!("{}\n{}", self.title, self.body)
        } else {
            self.body.clone()
        }
    }
}

/// A document id paired with text, used between pipeline stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Tsv,
}

impl InputFormat {
    /// `.tsv` files are read as TSV, everything else as JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => InputFormat::Tsv,
            _ => InputFormat::Jsonl,
        }
    }
}

/// A record that could not be decoded. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

/// Records with an `id` that must be non-empty and unique within a file.
pub trait Identified {
    fn id(&self) -> &str;
}

impl Identified for RawThread {
    fn id(&self) -> &str {
        &self.id
    }
}

impl Identified for TextRecord {
    fn id(&self) -> &str {
        &self.id
    }
}

/// Lazy line-oriented record reader. Yields records in file order;
/// undecodable lines come out as [`RecordError`]s and reading continues.
pub struct RecordReader<T> {
    lines: std::io::Lines<BufReader<File>>,
    format: InputFormat,
    line_no: usize,
    seen: HashSet<String>,
    _record: PhantomData<T>,
}

impl<T: DeserializeOwned + Identified + FromTsv> RecordReader<T> {
    pub fn open(path: &Path, format: InputFormat) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            lines: BufReader::new(file).lines(),
            format,
            line_no: 0,
            seen: HashSet::new(),
            _record: PhantomData,
        })
    }

    fn decode(&self, line: &str) -> std::result::Result<T, String> {
        match self.format {
            InputFormat::Jsonl => serde_json::from_str(line).map_err(|e| e.to_string()),
            InputFormat::Tsv => T::from_tsv(line),
        }
    }
}

impl<T: DeserializeOwned + Identified + FromTsv> Iterator for RecordReader<T> {
    type Item = Result<std::result::Result<T, RecordError>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                    self.line_no += 1;
                    return Some(Ok(Err(RecordError {
                        line: self.line_no,
                        message: "line is not valid UTF-8".into(),
                    })));
                }
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let line_no = self.line_no;
            let record = self.decode(&line).and_then(|record: T| {
                if record.id().is_empty() {
                    Err("empty id".to_string())
                } else if !self.seen.insert(record.id().to_string()) {
                    Err(format!("duplicate id `{}`", record.id()))
                } else {
                    Ok(record)
                }
            });
            return Some(Ok(record.map_err(|message| RecordError {
                line: line_no,
                message,
            })));
        }
    }
}

/// Decoding of one TSV line.
pub trait FromTsv: Sized {
    fn from_tsv(line: &str) -> std::result::Result<Self, String>;
}

fn unescape_tsv(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

impl FromTsv for RawThread {
    /// Columns: `id`, `title`, `body`; `\n`, `\t` and `\\` are escaped.
    fn from_tsv(line: &str) -> std::result::Result<Self, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            [id, title, body] => Ok(RawThread::new(
                unescape_tsv(id),
                unescape_tsv(title),
                unescape_tsv(body),
            )),
            _ => Err(format!("expected 3 tab-separated fields, found {}", fields.len())),
        }
    }
}

impl FromTsv for TextRecord {
    fn from_tsv(line: &str) -> std::result::Result<Self, String> {
        match line.split_once('\t') {
            Some((id, text)) => Ok(TextRecord {
                id: unescape_tsv(id),
                text: unescape_tsv(text),
            }),
            None => Err("expected `id<TAB>text`".into()),
        }
    }
}

/// Opens a lazy reader over raw threads.
pub fn read_threads(path: &Path, format: InputFormat) -> Result<RecordReader<RawThread>> {
    RecordReader::open(path, format)
}

/// Reads every record, splitting decodable records from per-line errors.
/// I/O failures abort.
pub fn read_all<T: DeserializeOwned + Identified + FromTsv>(
    path: &Path,
    format: InputFormat,
) -> Result<(Vec<T>, Vec<RecordError>)> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for item in RecordReader::<T>::open(path, format)? {
        match item? {
            Ok(record) => records.push(record),
            Err(e) => errors.push(e),
        }
    }
    Ok((records, errors))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WriteSummary {
    pub docs: u64,
    pub tokens: u64,
}

/// How token lines are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenLayout {
    /// Surfaces joined by single spaces, one document per line.
    #[default]
    Plain,
    /// `id<TAB>` followed by surfaces joined by `|`, with original whitespace
    /// kept between tokens it separated. Readable by the label tools.
    Segmented,
}

/// Buffered writer for tokenized documents.
pub struct TokenWriter {
    out: BufWriter<File>,
    path: PathBuf,
    layout: TokenLayout,
    summary: WriteSummary,
}

impl TokenWriter {
    pub fn create(path: &Path, layout: TokenLayout) -> Result<Self> {
        let file = File::create(path).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            docs_written: 0,
            source,
        })?;
        Ok(Self {
            out: BufWriter::new(file),
            path: path.to_path_buf(),
            layout,
            summary: WriteSummary::default(),
        })
    }

    pub fn write(&mut self, id: &str, stream: &TokenStream) -> Result<()> {
        let line = match self.layout {
            TokenLayout::Plain => stream.surfaces().collect::<Vec<_>>().join(" "),
            TokenLayout::Segmented => format!("{}\t{}", id, stream.segmented()),
        };
        writeln!(self.out, "{line}").map_err(|source| self.write_error(source))?;
        self.summary.docs += 1;
        self.summary.tokens += stream.len() as u64;
        Ok(())
    }

    fn write_error(&self, source: std::io::Error) -> Error {
        Error::Write {
            path: self.path.clone(),
            docs_written: self.summary.docs,
            source,
        }
    }

    pub fn finish(mut self) -> Result<WriteSummary> {
        self.out.flush().map_err(|source| self.write_error(source))?;
        Ok(self.summary)
    }
}

/// Writes one line of space-joined surfaces per document.
pub fn write_tokens<'a, I>(streams: I, path: &Path) -> Result<WriteSummary>
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    let mut writer = TokenWriter::create(path, TokenLayout::Plain)?;
    for stream in streams {
        writer.write("", stream)?;
    }
    writer.finish()
}

/// Writes serializable records as JSON lines.
pub fn write_jsonl<'a, T, I>(records: I, path: &Path) -> Result<u64>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let file = File::create(path).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        docs_written: 0,
        source,
    })?;
    let mut out = BufWriter::new(file);
    let mut written = 0;
    for record in records {
        let line = serde_json::to_string(record).expect("records serialize to JSON");
        writeln!(out, "{line}").map_err(|source| Error::Write {
            path: path.to_path_buf(),
            docs_written: written,
            source,
        })?;
        written += 1;
    }
    out.flush().map_err(|source| Error::Write {
        path: path.to_path_buf(),
        docs_written: written,
        source,
    })?;
    Ok(written)
}

/// Splits the text half of a segmented line into token surfaces. Tokens
/// are separated by unescaped `|` or whitespace.
pub fn parse_segmented(text: &str) -> std::result::Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(e @ ('|' | '\\')) => current.push(e),
                _ => return Err("dangling or unknown escape".into()),
            },
            c if c == '|' || c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    Ok(tokens)
}

/// One line of a token file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenLine {
    /// Present for segmented lines.
    pub id: Option<String>,
    pub tokens: Vec<String>,
}

/// Reads a token file in either layout. Lines containing a tab are
/// segmented (`id<TAB>text`), others are space-joined surfaces.
pub fn read_token_file(path: &Path) -> Result<Vec<TokenLine>> {
    let file = File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Read { path: path.to_path_buf(), source })?;
        let parsed = match line.split_once('\t') {
            Some((id, text)) => TokenLine {
                id: Some(id.to_string()),
                tokens: parse_segmented(text).map_err(|message| Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message,
                })?,
            },
            None => TokenLine {
                id: None,
                tokens: line.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect(),
            },
        };
        out.push(parsed);
    }
    Ok(out)
}
