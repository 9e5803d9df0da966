//! Batch commands behind the `thaiprep` binary. Every command reads its
//! input lazily in fixed-size batches, maps each batch in parallel and
//! writes results in input order, so output never depends on `jobs`.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{
    hex_digest, read_token_file, FromTsv, Identified, InputFormat, PipelineConfig, RawThread,
    RecordError, RecordReader, TextRecord, TokenLayout, TokenWriter,
};
use crate::error::{Error, Result};
use crate::filters::{FilterReason, ThreadFilter};
use crate::metrics::{
    boundaries_from_segmented, boundary_prf, read_gold_labels, BoundaryLabels, CorpusStats, MetricsReport,
    StatsAccumulator,
};
use crate::normalizer::{NormalizedDocument, Normalizer, RewriteRecord};
use crate::postproc::{
    correct_spelling, lowercase_english, ungroup_emoji, MisspellingMap, OovCount, VocabCounter, VocabTable,
};
use crate::tokenizer::{TokenStream, Tokenizer};

const BATCH: usize = 1024;

/// Bumped whenever a stage's output changes for the same input.
const STAGE_VERSIONS: [(&str, u32); 4] = [("filter", 1), ("normalize", 1), ("tokenize", 1), ("postproc", 1)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Record counts of one run. `read = emitted + sum(filtered)`; malformed
/// records are counted under the `malformed` reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub read: u64,
    pub emitted: u64,
    pub filtered: BTreeMap<String, u64>,
}

impl StageCounts {
    fn reject(&mut self, reason: &str) {
        *self.filtered.entry(reason.to_string()).or_default() += 1;
    }

    pub fn reconciles(&self) -> bool {
        self.read == self.emitted + self.filtered.values().sum::<u64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub inputs: Vec<InputDigest>,
    pub stage_versions: BTreeMap<String, u32>,
    pub counts: StageCounts,
    pub tokens: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocab_size: Option<usize>,
    /// Set when the run stopped early; counts cover what was written.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunManifest {
    fn new(command: &str, config: &PipelineConfig, inputs: Vec<InputDigest>) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config.digest(),
            inputs,
            stage_versions: STAGE_VERSIONS.iter().map(|(s, v)| (s.to_string(), *v)).collect(),
            counts: StageCounts::default(),
            tokens: 0,
            vocab_size: None,
            error: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        std::fs::write(path, json).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            docs_written: 0,
            source,
        })
    }
}

/// Where a command reads and writes.
#[derive(Debug, Clone)]
pub struct RunPaths {
    pub input: PathBuf,
    pub output: PathBuf,
    pub manifest: Option<PathBuf>,
    /// Vocabulary file written by `pipeline` when set.
    pub vocab: Option<PathBuf>,
    /// Malformed input records go here as `{line, message}` JSONL; the file
    /// is only created when there is something to report.
    pub errors: Option<PathBuf>,
    /// Per-document rewrite records written by `preprocess` when set.
    pub audit: Option<PathBuf>,
    pub layout: TokenLayout,
}

impl RunPaths {
    /// Error reports default to `<output>.errors.jsonl`.
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        let output = output.into();
        let mut errors = output.clone().into_os_string();
        errors.push(".errors.jsonl");
        Self {
            input: input.into(),
            output,
            manifest: None,
            vocab: None,
            errors: Some(errors.into()),
            audit: None,
            layout: TokenLayout::Segmented,
        }
    }
}

pub fn file_digest(path: &Path) -> Result<InputDigest> {
    let mut file = std::fs::File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(InputDigest { path: path.display().to_string(), sha256: hex_digest(&bytes) })
}

fn digests(config: &PipelineConfig, input: &Path, with_resources: bool) -> Result<Vec<InputDigest>> {
    let mut paths = vec![input.to_path_buf()];
    if with_resources {
        paths.extend(config.lexicon_paths.iter().cloned());
        paths.extend(config.misspelling_map_path.iter().cloned());
        paths.extend(config.profile_paths.iter().cloned());
        paths.extend(config.tcc_rules_path.iter().cloned());
    }
    paths.iter().map(|p| file_digest(p)).collect()
}

/// Everything needed to turn a raw thread into tokens, built once per run
/// and shared read-only across workers.
pub struct Pipeline {
    filter: ThreadFilter,
    normalizer: Normalizer,
    tokenizer: Tokenizer,
    misspellings: MisspellingMap,
    include_title: bool,
}

/// What happened to one thread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Emitted(TokenStream),
    Filtered(FilterReason),
}

impl Pipeline {
    /// Loads the lexicon, misspelling map and language profiles. Fails
    /// before any output exists when a resource is missing or invalid.
    pub fn new(config: &PipelineConfig) -> Result<Self> {
        config.validate()?;
        let misspellings = match &config.misspelling_map_path {
            Some(path) => MisspellingMap::load(path)?,
            None => MisspellingMap::default(),
        };
        Ok(Self {
            filter: ThreadFilter::from_config(config)?,
            normalizer: Normalizer::new(config)?,
            tokenizer: Tokenizer::from_config(config)?,
            misspellings,
            include_title: config.include_title,
        })
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    /// Tokenizes normalized text and applies the post-tokenization steps.
    pub fn tokenize_text(&self, text: &str) -> TokenStream {
        let stream = ungroup_emoji(self.tokenizer.tokenize(text));
        correct_spelling(lowercase_english(stream), &self.misspellings)
    }

    pub fn normalize_thread(&self, thread: &RawThread) -> String {
        self.normalizer.normalize_text(&thread.document_text(self.include_title))
    }

    pub fn process(&self, thread: &RawThread) -> Outcome {
        let decision = self.filter.decide(thread);
        if !decision.accepted {
            return Outcome::Filtered(decision.reason);
        }
        Outcome::Emitted(self.tokenize_text(&self.normalize_thread(thread)))
    }
}

fn reason_name(reason: FilterReason) -> &'static str {
    match reason {
        FilterReason::Ok => "ok",
        FilterReason::TooShort => "too_short",
        FilterReason::NoTitle => "no_title",
        FilterReason::WrongLanguage => "wrong_language",
    }
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))
}

/// Reads records batch by batch, maps them on `pool` and hands results to
/// `sink` in input order. Malformed records are counted, collected into
/// `malformed` and skipped.
fn run_batches<T, U, M, S>(
    path: &Path,
    pool: &rayon::ThreadPool,
    counts: &mut StageCounts,
    malformed: &mut Vec<RecordError>,
    map: M,
    mut sink: S,
) -> Result<()>
where
    T: serde::de::DeserializeOwned + Identified + FromTsv + Send + Sync,
    U: Send,
    M: Fn(&T) -> U + Sync,
    S: FnMut(&T, U, &mut StageCounts) -> Result<()>,
{
    let mut reader = RecordReader::<T>::open(path, InputFormat::from_path(path))?;
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        for item in reader.by_ref() {
            counts.read += 1;
            match item? {
                Ok(record) => batch.push(record),
                Err(e) => {
                    log::warn!("{}:{}: skipping record: {}", path.display(), e.line, e.message);
                    counts.reject("malformed");
                    malformed.push(e);
                }
            }
            if batch.len() == BATCH {
                break;
            }
        }
        if batch.is_empty() {
            return Ok(());
        }
        let results: Vec<U> = pool.install(|| batch.par_iter().map(&map).collect());
        for (record, result) in batch.iter().zip(results) {
            sink(record, result, counts)?;
        }
    }
}

/// Writes the error report and manifest whether or not `result` failed,
/// then passes the result on.
fn finish_run(
    mut manifest: RunManifest,
    paths: &RunPaths,
    malformed: &[RecordError],
    result: Result<()>,
) -> Result<RunManifest> {
    if let Err(e) = &result {
        manifest.error = Some(e.to_string());
    }
    if let (Some(path), false) = (&paths.errors, malformed.is_empty()) {
        let mut out = JsonlWriter::create(path)?;
        for e in malformed {
            out.write(e)?;
        }
        out.finish()?;
    }
    if let Some(path) = &paths.manifest {
        manifest.write(path)?;
    }
    result.map(|()| manifest)
}

/// Keeps threads that pass the length and language filters.
pub fn cmd_filter(paths: &RunPaths, config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let filter = ThreadFilter::from_config(config)?;
    let pool = thread_pool(config.jobs)?;
    let mut manifest = RunManifest::new("filter", config, digests(config, &paths.input, false)?);
    let mut out = JsonlWriter::create(&paths.output)?;
    let mut malformed = Vec::new();
    let result = run_batches(
        &paths.input,
        &pool,
        &mut manifest.counts,
        &mut malformed,
        |t: &RawThread| filter.decide(t),
        |thread, decision, counts| {
            if decision.accepted {
                out.write(thread)?;
                counts.emitted += 1;
            } else {
                counts.reject(reason_name(decision.reason));
            }
            Ok(())
        },
    )
    .and_then(|()| out.finish());
    finish_run(manifest, paths, &malformed, result)
}

#[derive(Serialize)]
struct AuditRecord<'a> {
    id: &'a str,
    rewrites: &'a [RewriteRecord],
}

/// Normalizes threads into `{id, text}` records.
pub fn cmd_preprocess(paths: &RunPaths, config: &PipelineConfig) -> Result<RunManifest> {
    config.validate()?;
    let normalizer = Normalizer::new(config)?;
    let pool = thread_pool(config.jobs)?;
    let mut manifest = RunManifest::new("preprocess", config, digests(config, &paths.input, false)?);
    let mut out = JsonlWriter::create(&paths.output)?;
    let mut audit = paths.audit.as_deref().map(JsonlWriter::create).transpose()?;
    let track = audit.is_some();
    let mut malformed = Vec::new();
    let result = run_batches(
        &paths.input,
        &pool,
        &mut manifest.counts,
        &mut malformed,
        |t: &RawThread| {
            let text = t.document_text(config.include_title);
            if track {
                normalizer.normalize(&text)
            } else {
                NormalizedDocument { text: normalizer.normalize_text(&text), rewrites: Vec::new() }
            }
        },
        |thread, doc, counts| {
            if let Some(audit) = audit.as_mut() {
                audit.write(&AuditRecord { id: &thread.id, rewrites: &doc.rewrites })?;
            }
            out.write(&TextRecord { id: thread.id.clone(), text: doc.text })?;
            counts.emitted += 1;
            Ok(())
        },
    )
    .and_then(|()| out.finish())
    .and_then(|()| audit.as_mut().map_or(Ok(()), JsonlWriter::finish));
    finish_run(manifest, paths, &malformed, result)
}

/// Tokenizes normalized `{id, text}` records.
pub fn cmd_tokenize(paths: &RunPaths, config: &PipelineConfig) -> Result<RunManifest> {
    let pipeline = Pipeline::new(config)?;
    let pool = thread_pool(config.jobs)?;
    let mut manifest = RunManifest::new("tokenize", config, digests(config, &paths.input, true)?);
    let mut out = TokenWriter::create(&paths.output, paths.layout)?;
    let mut tokens = 0;
    let mut malformed = Vec::new();
    let result = run_batches(
        &paths.input,
        &pool,
        &mut manifest.counts,
        &mut malformed,
        |r: &TextRecord| pipeline.tokenize_text(&r.text),
        |record, stream, counts| {
            out.write(&record.id, &stream)?;
            counts.emitted += 1;
            tokens += stream.len() as u64;
            Ok(())
        },
    )
    .and_then(|()| out.finish().map(drop));
    manifest.tokens = tokens;
    finish_run(manifest, paths, &malformed, result)
}

/// Filter, normalize, tokenize and post-process in one pass; optionally
/// builds the vocabulary of the emitted tokens.
pub fn cmd_pipeline(paths: &RunPaths, config: &PipelineConfig) -> Result<RunManifest> {
    let pipeline = Pipeline::new(config)?;
    let pool = thread_pool(config.jobs)?;
    let mut manifest = RunManifest::new("pipeline", config, digests(config, &paths.input, true)?);
    let mut out = TokenWriter::create(&paths.output, paths.layout)?;
    let mut vocab = paths.vocab.as_ref().map(|_| VocabCounter::new());
    let mut tokens = 0;
    let mut malformed = Vec::new();
    let result = run_batches(
        &paths.input,
        &pool,
        &mut manifest.counts,
        &mut malformed,
        |t: &RawThread| pipeline.process(t),
        |thread, outcome, counts| {
            match outcome {
                Outcome::Emitted(stream) => {
                    out.write(&thread.id, &stream)?;
                    if let Some(v) = vocab.as_mut() {
                        v.add_stream(counts.emitted, &stream);
                    }
                    counts.emitted += 1;
                    tokens += stream.len() as u64;
                }
                Outcome::Filtered(reason) => counts.reject(reason_name(reason)),
            }
            Ok(())
        },
    )
    .and_then(|()| out.finish().map(drop))
    .and_then(|()| match (vocab, &paths.vocab) {
        (Some(counter), Some(path)) => {
            let table = counter.table(config.vocab_size)?;
            manifest.vocab_size = Some(table.len());
            table.write(path)
        }
        _ => Ok(()),
    });
    manifest.tokens = tokens;
    finish_run(manifest, paths, &malformed, result)
}

/// Summary printed by `vocab`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabReport {
    pub documents: u64,
    pub tokens: u64,
    pub distinct: usize,
    pub size: usize,
    /// Occurrences outside the reference vocabulary, or outside the new one
    /// when no reference was given.
    pub oov: u64,
    pub oov_rate: f64,
}

/// Builds a `k`-entry vocabulary from a token file and measures OOV
/// against `reference` (or the new table).
pub fn cmd_vocab(input: &Path, output: &Path, k: usize, reference: Option<&Path>) -> Result<VocabReport> {
    let lines = read_token_file(input)?;
    let mut counter = VocabCounter::new();
    for (i, line) in lines.iter().enumerate() {
        counter.add(i as u64, line.tokens.iter().map(String::as_str));
    }
    let table = counter.table(k)?;
    table.write(output)?;
    let against = match reference {
        Some(path) => VocabTable::read(path)?,
        None => table.clone(),
    };
    let mut oov = OovCount::default();
    for token in lines.iter().flat_map(|l| &l.tokens) {
        oov.total += 1;
        oov.oov += u64::from(!against.contains(token));
    }
    Ok(VocabReport {
        documents: lines.len() as u64,
        tokens: counter.total_tokens(),
        distinct: counter.distinct(),
        size: table.len(),
        oov: oov.oov,
        oov_rate: if oov.total == 0 { 0.0 } else { oov.rate() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub documents: u64,
    #[serde(flatten)]
    pub metrics: MetricsReport,
}

/// Reads predicted labels from `id<TAB>segmented text` or `id<TAB>bitstring`.
fn read_predictions(path: &Path) -> Result<Vec<(String, BoundaryLabels)>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), line: n + 1, message };
        let (id, body) = line
            .split_once('\t')
            .ok_or_else(|| parse_err("expected `id<TAB>tokens`".into()))?;
        let labels = if !body.is_empty() && body.chars().all(|c| c == '0' || c == '1') {
            body.parse().map_err(parse_err)?
        } else {
            boundaries_from_segmented(body).map_err(|e| parse_err(e.to_string()))?.1
        };
        out.push((id.to_string(), labels));
    }
    Ok(out)
}

/// Micro-averaged boundary P/R/F1 of predictions against gold labels.
pub fn cmd_eval(predicted: &Path, gold: &Path) -> Result<EvalReport> {
    let predicted: HashMap<String, BoundaryLabels> = read_predictions(predicted)?.into_iter().collect();
    let gold = read_gold_labels(gold)?;
    let gold_ids: std::collections::HashSet<&str> = gold.iter().map(|(id, _)| id.as_str()).collect();
    let mut unmatched: Vec<String> = gold
        .iter()
        .filter(|(id, _)| !predicted.contains_key(id))
        .map(|(id, _)| format!("{id} (no prediction)"))
        .collect();
    let mut extra: Vec<&String> = predicted.keys().filter(|id| !gold_ids.contains(id.as_str())).collect();
    extra.sort();
    unmatched.extend(extra.into_iter().map(|id| format!("{id} (no gold labels)")));
    if !unmatched.is_empty() {
        return Err(Error::UnmatchedIds(unmatched.join(", ")));
    }
    let mut total = MetricsReport::from_counts(0, 0, 0);
    for (id, labels) in &gold {
        let report = boundary_prf(&predicted[id], labels)
            .map_err(|e| Error::Metrics(format!("document `{id}`: {e}")))?;
        total = total.combine(&report);
    }
    Ok(EvalReport { documents: gold.len() as u64, metrics: total })
}

/// Document and token counts of a token file.
pub fn cmd_stats(input: &Path) -> Result<CorpusStats> {
    let mut acc = StatsAccumulator::default();
    for line in read_token_file(input)? {
        acc.add(line.tokens.len() as u64);
    }
    Ok(acc.finish())
}

/// Converts `id<TAB>segmented text` lines into `id<TAB>bitstring` gold labels.
pub fn cmd_labels(input: &Path, output: &Path) -> Result<u64> {
    let text = std::fs::read_to_string(input).map_err(|source| Error::Read {
        path: input.to_path_buf(),
        source,
    })?;
    let mut out = String::new();
    let mut docs = 0;
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { path: input.to_path_buf(), line: n + 1, message };
        let (id, body) = line
            .split_once('\t')
            .ok_or_else(|| parse_err("expected `id<TAB>segmented text`".into()))?;
        let (_, labels) = boundaries_from_segmented(body).map_err(|e| parse_err(e.to_string()))?;
        out.push_str(&format!("{id}\t{labels}\n"));
        docs += 1;
    }
    std::fs::write(output, out).map_err(|source| Error::Write {
        path: output.to_path_buf(),
        docs_written: 0,
        source,
    })?;
    Ok(docs)
}

/// JSON-lines writer that reports how far it got on failure.
struct JsonlWriter {
    out: std::io::BufWriter<std::fs::File>,
    path: PathBuf,
    written: u64,
}

impl JsonlWriter {
    fn create(path: &Path) -> Result<Self> {
        let file = std::fs::File::create(path).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            docs_written: 0,
            source,
        })?;
        Ok(Self { out: std::io::BufWriter::new(file), path: path.to_path_buf(), written: 0 })
    }

    fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        use std::io::Write;
        let line = serde_json::to_string(record).expect("records serialize to JSON");
        writeln!(self.out, "{line}").map_err(|source| Error::Write {
            path: self.path.clone(),
            docs_written: self.written,
            source,
        })?;
        self.written += 1;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        use std::io::Write;
        self.out.flush().map_err(|source| Error::Write {
            path: self.path.clone(),
            docs_written: self.written,
            source,
        })
    }
}
