//! The `gectool` command line.
//!
//! Exit codes: 0 on success, 1 when the input or a computation fails,
//! 2 for usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::align::{EditGranularity, DEFAULT_SWAP_GAP};
use crate::m2::{format_record, from_parallel, split_parallel_line, ExtractOptions, M2Reader};
use crate::manifest::{sidecar_path, DigestReader, DigestWriter, FileDigest, RunManifest};
use crate::noise::{
    synthesize_corpus, CharNoiseScope, ConfusionLexicon, InsertSampling, NoiseConfig, Noiser, SplitSink, TsvSink,
    DEFAULT_MAX_SENTENCES,
};
use crate::pipeline::{
    build_mix, count_documents, render_stats_table, stats_from_m2, stats_from_parallel, Balance, CorpusStats,
    InputFormat, MixPart, MixSpec,
};
use crate::score::{ScoreError, Scorer, TypeRecallCounter, DEFAULT_BETA};
use crate::text::{builtin_profile, tokenize_with, LanguageProfile, ProfileError, Sentence, TokenizeMode};
use crate::Error;

/// Environment variable naming a directory of `<lang>.json` profile files.
pub const PROFILE_DIR_ENV: &str = "GECTOOL_PROFILE_DIR";

#[derive(Debug, Parser)]
#[command(name = "gectool", version, about = "Corpus tooling for grammatical error correction")]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Where to write the run manifest (default: next to the first output file).
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,

    /// Do not write a run manifest.
    #[arg(long, global = true, conflicts_with = "manifest")]
    pub no_manifest: bool,

    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate (noisy, clean) pairs from clean monolingual text.
    Noise(NoiseArgs),
    /// Convert `source<TAB>target` pairs into M2 records.
    Extract(ExtractArgs),
    /// Score corrected sentences against gold M2 annotations.
    Score(ScoreArgs),
    /// Sentence, word and error-rate statistics of corpora.
    Stats(StatsArgs),
    /// Shuffle authentic and synthetic pairs into a finetuning mix.
    Mix(MixArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CharScopeArg {
    All,
    CorruptedOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InsertSamplingArg {
    Uniform,
    FrequencyWeighted,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Language of a built-in profile (or of a file in $GECTOOL_PROFILE_DIR).
    #[arg(long)]
    pub lang: Option<String>,
    /// Profile JSON file; laid over the --lang profile when both are given.
    #[arg(long, value_name = "FILE")]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_SENTENCES)]
    pub max_sentences: u64,
    /// Vocabulary file (`word[<TAB>freq]` per line). Built from the input when absent.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Explicit substitution candidates (`word<TAB>cand...` per line).
    #[arg(long, value_name = "FILE")]
    pub proposals: Option<PathBuf>,
    #[arg(long, default_value_t = crate::noise::DEFAULT_MAX_EDIT_DISTANCE)]
    pub max_edit_distance: usize,
    /// Clean text, one sentence per line; `-` reads stdin.
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE", requires = "out_tgt", conflicts_with = "out_tsv")]
    pub out_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "out_src")]
    pub out_tgt: Option<PathBuf>,
    /// `noisy<TAB>clean` output (the default, on stdout).
    #[arg(long, value_name = "FILE")]
    pub out_tsv: Option<PathBuf>,
    /// Input is already tokenized; split on whitespace only.
    #[arg(long)]
    pub pretokenized: bool,
    #[arg(long, value_enum, default_value_t = CharScopeArg::All)]
    pub char_noise: CharScopeArg,
    #[arg(long, value_enum, default_value_t = InsertSamplingArg::Uniform)]
    pub insert_sampling: InsertSamplingArg,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
    #[arg(long)]
    pub no_merge_swaps: bool,
    #[arg(long, default_value_t = DEFAULT_SWAP_GAP)]
    pub max_gap: usize,
    /// One edit per non-match alignment edge instead of merged runs.
    #[arg(long)]
    pub split_edits: bool,
    #[arg(long, default_value_t = 0)]
    pub annotator: u32,
    /// Run the rule tokenizer over both sides instead of splitting on whitespace.
    #[arg(long)]
    pub tokenize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// Corrected sentences, tokenized, one per gold record.
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    /// Add recall per error type against one fixed annotator.
    #[arg(long)]
    pub per_type: bool,
    /// Annotator used by --per-type.
    #[arg(long, default_value_t = 0)]
    pub annotator: u32,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    pub format: ReportFormat,
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Auto,
    M2,
    Tsv,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// M2 or `source<TAB>target` files; several inputs are reported as subsets.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    pub format: FormatArg,
    /// One document id per sentence; give once per input, in the same order.
    #[arg(long, value_name = "FILE")]
    pub doc_index: Vec<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BalanceArg {
    ReplicateAuthentic,
    TruncateSynthetic,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    /// Authentic parallel file with an optional oversampling factor, `PATH[:FACTOR]`.
    #[arg(long, required = true, value_name = "PATH[:FACTOR]")]
    pub authentic: Vec<String>,
    #[arg(long)]
    pub synthetic: PathBuf,
    /// Authentic to synthetic line ratio, `A:S`.
    #[arg(long, default_value = "1:2")]
    pub ratio: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BalanceArg::ReplicateAuthentic)]
    pub balance: BalanceArg,
    #[arg(long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Failed(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

macro_rules! impl_failed {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Failed(e.into())
            }
        }
    )*};
}

impl_failed!(
    io::Error,
    serde_json::Error,
    crate::m2::M2Error,
    crate::noise::NoiseError,
    crate::noise::LexiconError,
    crate::pipeline::PipelineError,
    ScoreError
);

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::UnknownLanguage(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.into()),
        }
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

fn file_error(path: &Path, source: io::Error) -> CliError {
    CliError::Failed(Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn open_file(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| file_error(path, e))
}

struct Input {
    reader: DigestReader<Box<dyn BufRead>>,
    label: String,
}

impl Input {
    fn open(path: &Path) -> Result<Self, CliError> {
        let inner: Box<dyn BufRead> = if is_stdio(path) {
            Box::new(BufReader::new(io::stdin()))
        } else {
            Box::new(open_file(path)?)
        };
        Ok(Input {
            reader: DigestReader::new(inner),
            label: label(path),
        })
    }

    /// Hashes whatever was not consumed so the digest covers the whole input.
    fn finish(mut self) -> Result<FileDigest, CliError> {
        io::copy(&mut self.reader, &mut io::sink())?;
        Ok(self.reader.finish(self.label))
    }
}

struct Output {
    writer: DigestWriter<Box<dyn Write>>,
    path: PathBuf,
}

impl Output {
    fn create(path: &Path) -> Result<Self, CliError> {
        let inner: Box<dyn Write> = if is_stdio(path) {
            Box::new(BufWriter::new(io::stdout()))
        } else {
            Box::new(BufWriter::new(File::create(path).map_err(|e| file_error(path, e))?))
        };
        Ok(Output {
            writer: DigestWriter::new(inner),
            path: path.to_path_buf(),
        })
    }

    fn finish(self) -> Result<FileDigest, CliError> {
        let path = self.path;
        self.writer.finish(label(&path)).map_err(|e| file_error(&path, e))
    }
}

struct ManifestTarget {
    explicit: Option<PathBuf>,
    disabled: bool,
}

impl ManifestTarget {
    fn write(&self, manifest: &RunManifest, outputs: &[PathBuf]) -> Result<(), CliError> {
        if self.disabled {
            return Ok(());
        }
        let paths: Vec<PathBuf> = match &self.explicit {
            Some(p) => vec![p.clone()],
            None => outputs
                .iter()
                .filter(|p| !is_stdio(p))
                .map(|p| sidecar_path(p))
                .collect(),
        };
        if paths.is_empty() {
            log::debug!("output goes to stdout; no manifest written (use --manifest)");
        }
        for path in paths {
            manifest.write_to(&path).map_err(|e| file_error(&path, e))?;
        }
        Ok(())
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gectool: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                log::debug!("caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn main() -> ExitCode {
    main_with_args(std::env::args_os())
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let target = ManifestTarget {
        explicit: cli.manifest.clone(),
        disabled: cli.no_manifest,
    };
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?,
        ),
        None => None,
    };
    let command = cli.command;
    let go = move || match command {
        Command::Noise(args) => cmd_noise(args, &target),
        Command::Extract(args) => cmd_extract(args, &target),
        Command::Score(args) => cmd_score(args, &target),
        Command::Stats(args) => cmd_stats(args, &target),
        Command::Mix(args) => cmd_mix(args, &target),
    };
    match pool {
        Some(pool) => pool.install(go),
        None => go(),
    }
}

/// Resolves the noising profile from `--lang` and `--profile`.
///
/// With only `--lang`, `$GECTOOL_PROFILE_DIR/<lang>.json` is laid over the
/// built-in profile when that file exists.
pub fn resolve_profile(lang: Option<&str>, profile: Option<&Path>) -> Result<LanguageProfile, CliError> {
    let read = |path: &Path| std::fs::read_to_string(path).map_err(|e| file_error(path, e));
    let base = match lang {
        Some(lang) => {
            let from_dir = std::env::var_os(PROFILE_DIR_ENV)
                .map(|dir| Path::new(&dir).join(format!("{lang}.json")))
                .filter(|p| p.is_file());
            match from_dir {
                Some(path) => {
                    let json = read(&path)?;
                    let profile = match builtin_profile(lang) {
                        Ok(builtin) => builtin.overlay_json(&json)?,
                        Err(_) => LanguageProfile::from_json(&json)?,
                    };
                    Some(profile)
                }
                None => Some(builtin_profile(lang)?),
            }
        }
        None => None,
    };
    match (base, profile) {
        (Some(base), Some(path)) => Ok(base.overlay_json(&read(path)?)?),
        (None, Some(path)) => Ok(LanguageProfile::from_json(&read(path)?)?),
        (Some(base), None) => Ok(base),
        (None, None) => Err(CliError::Usage("noise needs --lang or --profile".into())),
    }
}

fn vocabulary_from_file(path: &Path, mode: TokenizeMode, max_lines: u64) -> Result<ConfusionLexicon, CliError> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut reader = open_file(path)?;
    let mut buf = Vec::new();
    let mut lines = 0;
    while lines < max_lines {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        lines += 1;
        let Ok(line) = std::str::from_utf8(&buf) else {
            continue;
        };
        for token in tokenize_with(line.trim_end_matches(['\n', '\r']), mode).tokens() {
            if token.chars().any(char::is_alphanumeric) {
                *counts.entry(token.to_string()).or_default() += 1;
            }
        }
    }
    log::info!("built a vocabulary of {} words from {}", counts.len(), path.display());
    Ok(ConfusionLexicon::from_vocabulary(counts))
}

fn cmd_noise(args: NoiseArgs, target: &ManifestTarget) -> Result<(), CliError> {
    let profile = resolve_profile(args.lang.as_deref(), args.profile.as_deref())?;
    let tokenize = if args.pretokenized {
        TokenizeMode::Pretokenized
    } else {
        TokenizeMode::Rules
    };
    let (lexicon, vocabulary_source) = match &args.lexicon {
        Some(path) => (ConfusionLexicon::read_vocabulary(open_file(path)?)?, label(path)),
        None if is_stdio(&args.input) => {
            return Err(CliError::Usage(
                "reading stdin needs --lexicon; the vocabulary cannot be built from a stream".into(),
            ))
        }
        None => (
            vocabulary_from_file(&args.input, tokenize, args.max_sentences)?,
            "input".to_string(),
        ),
    };
    let mut lexicon = lexicon.with_max_edit_distance(args.max_edit_distance);
    if let Some(path) = &args.proposals {
        lexicon.read_proposals(open_file(path)?)?;
    }

    let mut config = NoiseConfig::new(profile, args.seed);
    config.max_sentences = args.max_sentences;
    config.tokenize = tokenize;
    config.char_noise = match args.char_noise {
        CharScopeArg::All => CharNoiseScope::All,
        CharScopeArg::CorruptedOnly => CharNoiseScope::CorruptedOnly,
    };
    config.insert_sampling = match args.insert_sampling {
        InsertSamplingArg::Uniform => InsertSampling::Uniform,
        InsertSamplingArg::FrequencyWeighted => InsertSampling::FrequencyWeighted,
    };
    let resolved = json!({
        "profile": config.profile.to_json_value(),
        "seed": config.seed,
        "max_sentences": config.max_sentences,
        "tokenize": config.tokenize,
        "char_noise": config.char_noise,
        "insert_sampling": config.insert_sampling,
        "vocabulary": vocabulary_source,
        "proposals": args.proposals.as_deref().map(label),
        "max_edit_distance": args.max_edit_distance,
        "emit_order": "noisy-clean",
    });
    let noiser = Noiser::new(config, lexicon)?;

    let mut input = Input::open(&args.input)?;
    let mut manifest = RunManifest::new("noise", resolved);
    let (summary, outputs) = match (&args.out_src, &args.out_tgt) {
        (Some(src), Some(tgt)) => {
            let mut sink = SplitSink {
                noisy: Output::create(src)?,
                clean: Output::create(tgt)?,
            };
            let summary = synthesize_corpus(&mut input.reader, &noiser, &mut sink, None);
            manifest.outputs = vec![sink.noisy.finish()?, sink.clean.finish()?];
            (summary?, vec![src.clone(), tgt.clone()])
        }
        _ => {
            let path = args.out_tsv.clone().unwrap_or_else(|| PathBuf::from("-"));
            let mut sink = TsvSink(Output::create(&path)?);
            let summary = synthesize_corpus(&mut input.reader, &noiser, &mut sink, None);
            manifest.outputs = vec![sink.0.finish()?];
            (summary?, vec![path])
        }
    };
    manifest.inputs.push(input.finish()?);
    for extra in [&args.lexicon, &args.proposals].into_iter().flatten() {
        manifest
            .inputs
            .push(crate::manifest::digest_file(extra).map_err(|e| file_error(extra, e))?);
    }
    manifest.summary = serde_json::to_value(summary)?;
    target.write(&manifest, &outputs)
}

impl Write for Output {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.writer.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

fn cmd_extract(args: ExtractArgs, target: &ManifestTarget) -> Result<(), CliError> {
    let options = ExtractOptions {
        granularity: if args.split_edits {
            EditGranularity::Split
        } else {
            EditGranularity::Merged
        },
        merge_swaps: !args.no_merge_swaps,
        max_swap_gap: args.max_gap,
    };
    let mode = if args.tokenize {
        TokenizeMode::Rules
    } else {
        TokenizeMode::Pretokenized
    };
    let mut input = Input::open(&args.input)?;
    let mut out = Output::create(&args.output)?;
    let mut line = String::new();
    let mut index = 0;
    loop {
        line.clear();
        if input.reader.read_line(&mut line)? == 0 {
            break;
        }
        index += 1;
        let text = line.trim_end_matches(['\n', '\r']);
        let Some((src, tgt)) = split_parallel_line(text) else {
            return Err(crate::pipeline::PipelineError::NotParallel {
                path: input.label.clone(),
                line: index,
            }
            .into());
        };
        let record = from_parallel(
            &tokenize_with(src, mode),
            &tokenize_with(tgt, mode),
            args.annotator,
            &options,
        );
        out.write_all(format_record(&record, index)?.as_bytes())?;
    }
    let mut manifest = RunManifest::new(
        "extract",
        json!({
            "options": options,
            "annotator": args.annotator,
            "tokenize": mode,
        }),
    );
    manifest.outputs.push(out.finish()?);
    manifest.inputs.push(input.finish()?);
    manifest.summary = json!({ "records": index });
    target.write(&manifest, &[args.output])
}

fn cmd_score(args: ScoreArgs, target: &ManifestTarget) -> Result<(), CliError> {
    let mut scorer = Scorer::new(args.beta)?;
    let mut types = args.per_type.then(|| TypeRecallCounter::new(args.annotator));
    let mut gold_in = Input::open(&args.gold)?;
    let mut hyp_in = Input::open(&args.hyp)?;
    let mut hyp_count = 0;
    let mut gold_count = 0;
    {
        let mut records = M2Reader::new(&mut gold_in.reader);
        let mut hyp_lines = (&mut hyp_in.reader).lines();
        loop {
            let record = records.next().transpose()?;
            let hyp = hyp_lines.next().transpose()?;
            gold_count += usize::from(record.is_some());
            hyp_count += usize::from(hyp.is_some());
            let (record, hyp) = match (record, hyp) {
                (Some(r), Some(h)) => (r, h),
                (None, None) => break,
                _ => {
                    // Count what is left so the error names both totals.
                    gold_count += records.by_ref().count();
                    hyp_count += hyp_lines.by_ref().count();
                    return Err(ScoreError::LengthMismatch {
                        hyp: hyp_count,
                        gold: gold_count,
                        index: hyp_count.min(gold_count),
                    }
                    .into());
                }
            };
            let hyp = Sentence::from_tokenized(hyp.trim_end_matches('\r'));
            let score = scorer.add(&record, &hyp)?;
            if let Some(types) = types.as_mut() {
                types.add_edits(&record, &score.hypothesis_edits);
            }
        }
    }
    let report = scorer.finish();
    let types = types.map(TypeRecallCounter::finish);

    let mut out = Output::create(&args.output)?;
    match args.format {
        ReportFormat::Json => {
            let mut value = serde_json::to_value(&report)?;
            if let Some(types) = &types {
                value["annotator_recall"] = serde_json::to_value(types)?;
            }
            let mut text = serde_json::to_string_pretty(&value)?;
            text.push('\n');
            out.write_all(text.as_bytes())?;
        }
        ReportFormat::Table => {
            out.write_all(report.render_table(false).as_bytes())?;
            if let Some(types) = &types {
                let table = crate::score::render_type_table(types);
                writeln!(out)?;
                out.write_all(table.as_bytes())?;
            }
        }
    }
    let mut manifest = RunManifest::new(
        "score",
        json!({
            "beta": args.beta,
            "per_type": args.per_type,
            "annotator": args.annotator,
            "format": format!("{:?}", args.format).to_lowercase(),
        }),
    );
    manifest.outputs.push(out.finish()?);
    manifest.inputs.push(gold_in.finish()?);
    manifest.inputs.push(hyp_in.finish()?);
    manifest.summary = json!({ "sentences": gold_count });
    target.write(&manifest, &[args.output])
}

fn detect_format(reader: &mut dyn BufRead) -> io::Result<InputFormat> {
    let head = reader.fill_buf()?;
    Ok(
        if head.starts_with(b"S ") || head.starts_with(b"S\n") || head.starts_with(b"S\r\n") {
            InputFormat::M2
        } else {
            InputFormat::Tsv
        },
    )
}

fn cmd_stats(args: StatsArgs, target: &ManifestTarget) -> Result<(), CliError> {
    if !args.doc_index.is_empty() && args.doc_index.len() != args.inputs.len() {
        return Err(CliError::Usage(format!(
            "{} --doc-index files given for {} inputs",
            args.doc_index.len(),
            args.inputs.len()
        )));
    }
    let mut manifest = RunManifest::new(
        "stats",
        json!({
            "format": format!("{:?}", args.format).to_lowercase(),
            "json": args.json,
        }),
    );
    let mut parts = Vec::new();
    for (i, path) in args.inputs.iter().enumerate() {
        let mut input = Input::open(path)?;
        let format = match args.format {
            FormatArg::M2 => InputFormat::M2,
            FormatArg::Tsv => InputFormat::Tsv,
            FormatArg::Auto => detect_format(&mut input.reader)?,
        };
        let mut stats = match format {
            InputFormat::M2 => stats_from_m2(&mut input.reader)?,
            _ => stats_from_parallel(&mut input.reader, &input.label)?,
        };
        if let Some(index) = args.doc_index.get(i) {
            let docs = count_documents(open_file(index)?, stats.sentences)?;
            stats.documents = Some(docs);
            manifest
                .inputs
                .push(crate::manifest::digest_file(index).map_err(|e| file_error(index, e))?);
        }
        manifest.inputs.push(input.finish()?);
        parts.push((label(path), stats));
    }
    let stats = if parts.len() == 1 {
        parts.pop().expect("one part").1
    } else {
        CorpusStats::combine(parts)
    };

    let mut out = Output::create(&args.output)?;
    if args.json {
        out.write_all(stats.to_json().as_bytes())?;
        out.write_all(b"\n")?;
    } else {
        out.write_all(render_stats_table(&stats).as_bytes())?;
    }
    manifest.outputs.push(out.finish()?);
    target.write(&manifest, &[args.output])
}

/// Parses `PATH[:FACTOR]`; a suffix that is not a number stays part of the path.
pub fn parse_mix_part(arg: &str) -> Result<MixPart, CliError> {
    if let Some((path, factor)) = arg.rsplit_once(':') {
        if !factor.is_empty() && factor.chars().all(|c| c.is_ascii_digit()) {
            let oversample = factor
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("oversampling factor {factor:?} is too large")))?;
            if oversample == 0 {
                return Err(CliError::Usage(format!(
                    "oversampling factor in {arg:?} must be at least 1"
                )));
            }
            return Ok(MixPart {
                path: PathBuf::from(path),
                oversample,
            });
        }
    }
    Ok(MixPart {
        path: PathBuf::from(arg),
        oversample: 1,
    })
}

/// Parses an `A:S` ratio of positive integers.
pub fn parse_ratio(arg: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Usage(format!("ratio {arg:?} is not of the form A:S with positive integers"));
    let (a, s) = arg.split_once(':').ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let s: u64 = s.trim().parse().map_err(|_| bad())?;
    if a == 0 || s == 0 {
        return Err(bad());
    }
    Ok((a, s))
}

fn cmd_mix(args: MixArgs, target: &ManifestTarget) -> Result<(), CliError> {
    let (ratio_authentic, ratio_synthetic) = parse_ratio(&args.ratio)?;
    let authentic = args
        .authentic
        .iter()
        .map(|a| parse_mix_part(a))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = MixSpec {
        authentic,
        synthetic: args.synthetic.clone(),
        ratio_authentic,
        ratio_synthetic,
        seed: args.seed,
        balance: match args.balance {
            BalanceArg::ReplicateAuthentic => Balance::ReplicateAuthentic,
            BalanceArg::TruncateSynthetic => Balance::TruncateSynthetic,
        },
    };
    let mut buffer = Vec::new();
    let summary = build_mix(&spec, &mut buffer)?;
    let mut out = Output::create(&args.output)?;
    out.write_all(&buffer)?;

    let mut manifest = RunManifest::new("mix", serde_json::to_value(&spec)?);
    manifest.outputs.push(out.finish()?);
    for path in spec.authentic.iter().map(|p| &p.path).chain([&spec.synthetic]) {
        manifest
            .inputs
            .push(crate::manifest::digest_file(path).map_err(|e| file_error(path, e))?);
    }
    manifest.summary = serde_json::to_value(summary)?;
    target.write(&manifest, &[args.output])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_parts() {
        let p = parse_mix_part("data/train.tsv:10").unwrap();
        assert_eq!((p.path, p.oversample), (PathBuf::from("data/train.tsv"), 10));
        let p = parse_mix_part("C:/x.tsv").unwrap();
        assert_eq!((p.path, p.oversample), (PathBuf::from("C:/x.tsv"), 1));
        assert!(parse_mix_part("a.tsv:0").is_err());
    }

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1:20").unwrap(), (1, 20));
        assert!(parse_ratio("1:0").is_err());
        assert!(parse_ratio("2").is_err());
    }

    #[test]
    fn profile_resolution() {
        assert!(matches!(resolve_profile(None, None), Err(CliError::Usage(_))));
        assert!(matches!(resolve_profile(Some("xx"), None), Err(CliError::Usage(_))));
        assert_eq!(resolve_profile(Some("de"), None).unwrap().lang, "de");
    }
}
