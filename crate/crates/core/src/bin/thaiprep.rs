use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use thaiprep::corpus_io::{read_all, split_corpus, write_jsonl, CorpusSplit, InputFormat, PipelineConfig, RawThread, TokenLayout};
use thaiprep::filters::{train_profiles, write_profile};
use thaiprep::pipeline::{self, RunManifest, RunPaths};
use thaiprep::{Error, Result};

#[derive(Parser)]
#[command(name = "thaiprep", version, about = "Preprocess and tokenize noisy Thai social-media text")]
struct Cli {
    /// TOML config file; flags and THAIPREP_* variables override it
    #[arg(long, global = true, env = "THAIPREP_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "THAIPREP_INPUT")]
    input: Option<PathBuf>,
    #[arg(long, global = true, env = "THAIPREP_OUTPUT")]
    output: Option<PathBuf>,
    /// Lexicon file, one word per line (repeatable)
    #[arg(long, global = true, env = "THAIPREP_LEXICON", value_delimiter = ',')]
    lexicon: Vec<PathBuf>,
    #[arg(long, global = true, env = "THAIPREP_MISSPELL_MAP")]
    misspell_map: Option<PathBuf>,
    #[arg(long, global = true, env = "THAIPREP_VOCAB_SIZE")]
    vocab_size: Option<usize>,
    #[arg(long, global = true, env = "THAIPREP_JOBS")]
    jobs: Option<usize>,
    /// Where to write the run manifest (JSON)
    #[arg(long, global = true, env = "THAIPREP_MANIFEST")]
    manifest: Option<PathBuf>,
    /// Where to report malformed input records [default: <output>.errors.jsonl]
    #[arg(long, global = true, env = "THAIPREP_ERRORS")]
    errors: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Keep threads with a title, a long enough body and the target language
    Filter,
    /// Normalize threads into {id, text} records
    Preprocess {
        /// Also write each document's rewrite records here (JSONL)
        #[arg(long)]
        audit: Option<PathBuf>,
    },
    /// Tokenize normalized records
    Tokenize(TokenOutput),
    /// Filter, normalize, tokenize and post-process raw threads
    Pipeline {
        #[command(flatten)]
        tokens: TokenOutput,
        /// Also write the vocabulary of the emitted tokens here
        #[arg(long)]
        vocab_out: Option<PathBuf>,
    },
    /// Build a vocabulary from a token file and report OOV
    Vocab {
        /// Measure OOV against this vocabulary instead of the new one
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Boundary precision/recall/F1 of predicted segmentations
    Eval {
        /// Gold labels, `id<TAB>bitstring` per line
        #[arg(long)]
        gold: PathBuf,
    },
    /// Document and token counts of a token file
    Stats,
    /// Turn `id<TAB>segmented text` lines into gold labels
    Labels,
    /// Deterministic train/valid/test split of a thread file
    Split {
        #[arg(long)]
        train: Option<usize>,
        #[arg(long)]
        valid: usize,
        #[arg(long)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train language profiles from `language<TAB>text` lines
    TrainProfiles,
}

#[derive(Args)]
struct TokenOutput {
    #[arg(long, value_enum, default_value_t = Layout::Segmented)]
    layout: Layout,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Plain,
    Segmented,
}

impl From<Layout> for TokenLayout {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Plain => TokenLayout::Plain,
            Layout::Segmented => TokenLayout::Segmented,
        }
    }
}

impl Cli {
    fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        if !self.lexicon.is_empty() {
            config.lexicon_paths = self.lexicon.clone();
        }
        if let Some(map) = &self.misspell_map {
            config.misspelling_map_path = Some(map.clone());
        }
        if let Some(k) = self.vocab_size {
            config.vocab_size = k;
        }
        if let Some(jobs) = self.jobs {
            config.jobs = jobs;
        }
        config.validate()?;
        Ok(config)
    }

    fn input(&self) -> Result<&Path> {
        self.input.as_deref().ok_or_else(|| Error::Config("--input is required".into()))
    }

    fn output(&self) -> Result<&Path> {
        self.output.as_deref().ok_or_else(|| Error::Config("--output is required".into()))
    }

    fn run_paths(&self) -> Result<RunPaths> {
        let mut paths = RunPaths::new(self.input()?, self.output()?);
        paths.manifest = self.manifest.clone();
        if self.errors.is_some() {
            paths.errors = self.errors.clone();
        }
        Ok(paths)
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn report_manifest(manifest: &RunManifest) {
    log::info!(
        "{}: read {}, emitted {}, filtered {:?}",
        manifest.command,
        manifest.counts.read,
        manifest.counts.emitted,
        manifest.counts.filtered
    );
    print_json(manifest);
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Filter => report_manifest(&pipeline::cmd_filter(&cli.run_paths()?, &cli.pipeline_config()?)?),
        Command::Preprocess { audit } => {
            let mut paths = cli.run_paths()?;
            paths.audit = audit.clone();
            report_manifest(&pipeline::cmd_preprocess(&paths, &cli.pipeline_config()?)?)
        }
        Command::Tokenize(out) => {
            let mut paths = cli.run_paths()?;
            paths.layout = out.layout.into();
            report_manifest(&pipeline::cmd_tokenize(&paths, &cli.pipeline_config()?)?)
        }
        Command::Pipeline { tokens, vocab_out } => {
            let mut paths = cli.run_paths()?;
            paths.layout = tokens.layout.into();
            paths.vocab = vocab_out.clone();
            report_manifest(&pipeline::cmd_pipeline(&paths, &cli.pipeline_config()?)?)
        }
        Command::Vocab { reference } => {
            let config = cli.pipeline_config()?;
            let report = pipeline::cmd_vocab(cli.input()?, cli.output()?, config.vocab_size, reference.as_deref())?;
            print_json(&report);
        }
        Command::Eval { gold } => print_json(&pipeline::cmd_eval(cli.input()?, gold)?),
        Command::Stats => print_json(&pipeline::cmd_stats(cli.input()?)?),
        Command::Labels => {
            let docs = pipeline::cmd_labels(cli.input()?, cli.output()?)?;
            print_json(&serde_json::json!({ "documents": docs }));
        }
        Command::Split { train, valid, test, seed } => {
            let input = cli.input()?;
            let (threads, errors) = read_all::<RawThread>(input, InputFormat::from_path(input))?;
            if let Some(e) = errors.first() {
                return Err(Error::Parse { path: input.to_path_buf(), line: e.line, message: e.message.clone() });
            }
            let ids: Vec<&str> = threads.iter().map(|t| t.id.as_str()).collect();
            let sets = split_corpus(&ids, CorpusSplit { train: *train, valid: *valid, test: *test, seed: *seed })?;
            let dir = cli.output()?;
            std::fs::create_dir_all(dir)?;
            for (name, ids) in [("train", &sets.train), ("valid", &sets.valid), ("test", &sets.test)] {
                let wanted: std::collections::HashSet<&str> = ids.iter().map(String::as_str).collect();
                let subset: Vec<&RawThread> = threads.iter().filter(|t| wanted.contains(t.id.as_str())).collect();
                write_jsonl(subset, &dir.join(format!("{name}.jsonl")))?;
            }
            print_json(&serde_json::json!({
                "train": sets.train.len(),
                "valid": sets.valid.len(),
                "test": sets.test.len(),
                "unused": sets.unused.len(),
            }));
        }
        Command::TrainProfiles => {
            let input = cli.input()?;
            let text = std::fs::read_to_string(input).map_err(|source| Error::Read { path: input.to_path_buf(), source })?;
            let mut docs = Vec::new();
            for (n, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let (lang, body) = line.split_once('\t').ok_or_else(|| Error::Parse {
                    path: input.to_path_buf(),
                    line: n + 1,
                    message: "expected `language<TAB>text`".into(),
                })?;
                docs.push((body, lang));
            }
            let dir = cli.output()?;
            std::fs::create_dir_all(dir)?;
            let profiles = train_profiles(docs)?;
            for p in &profiles {
                write_profile(p, &dir.join(format!("{}.profile", p.language)))?;
            }
            print_json(&serde_json::json!({ "languages": profiles.iter().map(|p| &p.language).collect::<Vec<_>>() }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_user_error() { 1 } else { 2 })
        }
    }
}
