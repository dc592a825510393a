//! `antiplag` — sampling-based plagiarism detection from the command line.
//!
//! Exit codes: 0 success, 1 document or I/O error, 2 usage error, and 3
//! from `detect` when at least one suspect triggered an alert.

use anyhow::{anyhow, bail, Context, Result};
use antiplag::detector::{detect_batch, DetectionResult};
use antiplag::evalharness::{
    build_test_corpus, render_accuracy_table, render_comparison, run_evaluation, LabeledReport,
    TestCorpusSpec, TextPool,
};
use antiplag::report::{
    emit_html, emit_json, read_json, ReportBundle, WorkspaceMeta,
};
use antiplag::sampler::{EngineConfig, MatchMode};
use antiplag::searchindex::{
    build_index, default_gram_width, LocalProvider, PhraseIndex, SampledSourceStore,
};
use antiplag::textmodel::DocumentOrigin;
use antiplag::workspace::{load_documents, Workspace};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "antiplag", version, about = "Sampling-based plagiarism detection")]
struct Cli {
    /// Workspace root; $ANTIPLAG_WORKSPACE or the current directory
    /// when omitted.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the exact-phrase index over a corpus directory and persist
    /// it into the workspace.
    Index {
        corpus_dir: PathBuf,
        /// Token n-gram width used as the posting key.
        #[arg(long, default_value_t = 3)]
        gram_width: usize,
    },
    /// Run detection over the suspect documents.
    Detect(DetectArgs),
    /// Generate a test corpus and measure detection accuracy.
    Eval(EvalArgs),
    /// Render the static HTML report from saved JSON results.
    Report {
        results: PathBuf,
        /// Output directory (default: <workspace>/report).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EngineArgs {
    /// Words per sampling query (W).
    #[arg(short = 'W', long = "window", default_value_t = 5)]
    window: usize,
    /// Words between query starts (S).
    #[arg(short = 'S', long = "step", default_value_t = 6)]
    step: usize,
    /// Allowed edits as a fraction of the span length.
    #[arg(long, default_value_t = 0.05)]
    edit_ratio: f64,
    /// Areas a source must hit before it is downloaded.
    #[arg(long, default_value_t = 2)]
    min_sample_hits: usize,
    /// Final filter length for single-area sources.
    #[arg(long, default_value_t = 50)]
    min_area_chars: usize,
    /// Covered-text fraction at or above which a document alerts.
    #[arg(long, default_value_t = 0.25)]
    alert_threshold: f64,
    /// Hermetic search mode.
    #[arg(long, value_enum, default_value_t = MatchModeArg::Edit)]
    match_mode: MatchModeArg,
    /// Provider results consumed per query.
    #[arg(long, default_value_t = 10)]
    max_hits: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatchModeArg {
    Exact,
    Edit,
}

impl EngineArgs {
    fn to_config(&self) -> EngineConfig {
        EngineConfig {
            window_size: self.window,
            step_size: self.step,
            edit_ratio: self.edit_ratio,
            min_sample_hits: self.min_sample_hits,
            min_area_chars: self.min_area_chars,
            alert_threshold: self.alert_threshold,
            match_mode: match self.match_mode {
                MatchModeArg::Exact => MatchMode::Exact,
                MatchModeArg::Edit => MatchMode::EditDistance,
            },
            max_hits: self.max_hits,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Directory of suspect documents (default: <workspace>/suspects).
    #[arg(long)]
    suspects: Option<PathBuf>,
    /// Search provider, e.g. `local:<corpus-dir>`; defaults to the
    /// persisted workspace index.
    #[arg(long)]
    provider: Option<String>,
    /// Hermetic run: detect against the local corpus only, without
    /// writing the sampled-source store.
    #[arg(long)]
    hermetic: bool,
    #[command(flatten)]
    engine: EngineArgs,
    /// JSON results path (default: <workspace>/results.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the HTML report.
    #[arg(long)]
    html: bool,
    /// Worker threads (default: all processors).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Corpus spec JSON; the bundled 48-file shape when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Overrides the spec's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path (default: <workdir>/report.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to generate the corpus (default: <workspace>/eval).
    #[arg(long)]
    workdir: Option<PathBuf>,
    /// Step sizes to evaluate side by side; the engine's -S when empty.
    #[arg(long, value_delimiter = ',')]
    steps: Vec<usize>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Worker threads (default: all processors).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workspace = resolve_workspace(cli.workspace);
    let code = match cli.command {
        Command::Index {
            corpus_dir,
            gram_width,
        } => run_index(&workspace, &corpus_dir, gram_width),
        Command::Detect(args) => run_detect(&workspace, args),
        Command::Eval(args) => run_eval(&workspace, args),
        Command::Report { results, out_dir } => run_report(&workspace, &results, out_dir),
    };
    match code {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn resolve_workspace(flag: Option<PathBuf>) -> Workspace {
    let root = flag
        .or_else(|| std::env::var_os("ANTIPLAG_WORKSPACE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    Workspace::new(root)
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // Ignore failure: the global pool can only be set once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn run_index(ws: &Workspace, corpus_dir: &Path, gram_width: usize) -> Result<ExitCode> {
    let corpus = load_documents(corpus_dir, DocumentOrigin::LocalCorpus)
        .with_context(|| format!("loading corpus from {}", corpus_dir.display()))?;
    let count = corpus.len();
    let index = build_index(corpus, gram_width);
    fs::create_dir_all(ws.root()).ok();
    index
        .save(&ws.index_path())
        .context("persisting the index")?;
    println!(
        "indexed {count} documents (gram width {gram_width}) -> {}",
        ws.index_path().display()
    );
    Ok(ExitCode::SUCCESS)
}

fn load_provider_index(ws: &Workspace, spec: Option<&str>, config: &EngineConfig) -> Result<PhraseIndex> {
    match spec {
        Some(s) => {
            let dir = s
                .strip_prefix("local:")
                .ok_or_else(|| anyhow!("unsupported provider `{s}`; expected local:<corpus-dir>"))?;
            let corpus = load_documents(Path::new(dir), DocumentOrigin::LocalCorpus)
                .with_context(|| format!("loading corpus from {dir}"))?;
            Ok(build_index(corpus, default_gram_width(config.window_size)))
        }
        None => {
            let path = ws.index_path();
            if !path.exists() {
                bail!(
                    "no provider given and no index at {}; run `antiplag index <corpus-dir>` \
                     or pass --provider local:<corpus-dir>",
                    path.display()
                );
            }
            PhraseIndex::load(&path).context("loading the persisted index")
        }
    }
}

fn run_detect(ws: &Workspace, args: DetectArgs) -> Result<ExitCode> {
    configure_jobs(args.jobs);
    let config = args.engine.to_config();
    config.validate().map_err(|e| anyhow!(e))?;

    let suspects_dir = args.suspects.unwrap_or_else(|| ws.suspects_dir());
    let suspects = load_documents(&suspects_dir, DocumentOrigin::Suspect)
        .with_context(|| format!("loading suspects from {}", suspects_dir.display()))?;
    if suspects.is_empty() {
        bail!("no suspect documents in {}", suspects_dir.display());
    }

    let index = load_provider_index(ws, args.provider.as_deref(), &config)?;
    let provider = LocalProvider::new(&index);
    let store = if args.hermetic {
        None
    } else {
        Some(SampledSourceStore::open(ws.sampled_dir(), "local").map_err(|e| anyhow!(e))?)
    };

    let outcomes = detect_batch(&suspects, &config, &provider, store.as_ref());

    let mut results: Vec<DetectionResult> = Vec::new();
    let mut failures = 0usize;
    for (id, outcome) in outcomes {
        match outcome {
            Ok(r) => {
                println!(
                    "{}: {:.1}%{}",
                    r.suspect_id,
                    r.percent_plagiarized * 100.0,
                    if r.alert { " ALERT" } else { "" }
                );
                results.push(r);
            }
            Err(e) => {
                eprintln!("{id}: failed: {e}");
                failures += 1;
            }
        }
    }

    let bundle = ReportBundle::new(
        &results,
        WorkspaceMeta {
            root: ws.root().display().to_string(),
            suspects: suspects.len(),
        },
        // Hrefs must resolve from the report/ directory: stored copies
        // sit one level up; corpus files get absolute paths.
        |sid| {
            let source = index.document(sid)?;
            store
                .as_ref()
                .and_then(|s| {
                    s.entry_for_uri(&source.source_uri)
                        .map(|e| format!("../sampled/{}", s.relative_path(&e.id)))
                })
                .or_else(|| {
                    Some(
                        fs::canonicalize(&source.source_uri)
                            .map(|p| p.display().to_string())
                            .unwrap_or_else(|_| source.source_uri.clone()),
                    )
                })
        },
    )
    .map_err(|e| anyhow!(e))?;

    let out = args.out.unwrap_or_else(|| ws.results_path());
    emit_json(&bundle, &out).map_err(|e| anyhow!(e))?;
    println!("results -> {}", out.display());

    if args.html {
        let texts: BTreeMap<String, String> = suspects
            .iter()
            .map(|d| (d.id.clone(), d.text.clone()))
            .collect();
        emit_html(&bundle, &texts, &ws.report_dir()).map_err(|e| anyhow!(e))?;
        println!("report -> {}", ws.report_dir().join("index.html").display());
    }

    if failures > 0 {
        Ok(ExitCode::from(1))
    } else if results.iter().any(|r| r.alert) {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn run_eval(ws: &Workspace, args: EvalArgs) -> Result<ExitCode> {
    configure_jobs(args.jobs);
    let mut spec: TestCorpusSpec = match &args.spec {
        Some(path) => {
            let bytes = fs::read(path)
                .with_context(|| format!("reading spec {}", path.display()))?;
            serde_json::from_slice(&bytes)
                .with_context(|| format!("parsing spec {}", path.display()))?
        }
        None => TestCorpusSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.rng_seed = seed;
    }

    let workdir = args.workdir.unwrap_or_else(|| ws.root().join("eval"));
    if workdir.exists() {
        fs::remove_dir_all(&workdir)
            .with_context(|| format!("clearing {}", workdir.display()))?;
    }
    let pool = TextPool::generate(spec.rng_seed, spec.total_sentences());
    build_test_corpus(&spec, &pool, &workdir).map_err(|e| anyhow!(e))?;
    println!(
        "generated {} files / {} sentences under {}",
        spec.total_files(),
        spec.total_sentences(),
        workdir.display()
    );

    let base = args.engine.to_config();
    base.validate().map_err(|e| anyhow!(e))?;
    let steps = if args.steps.is_empty() {
        vec![base.step_size]
    } else {
        args.steps.clone()
    };

    let eval_ws = Workspace::new(&workdir);
    let mut runs = Vec::new();
    for step in steps {
        let config = EngineConfig {
            step_size: step,
            ..base.clone()
        };
        let report = run_evaluation(&eval_ws, &config).map_err(|e| anyhow!(e))?;
        runs.push(LabeledReport {
            label: format!("W={}, S={}", config.window_size, step),
            report,
        });
    }

    println!();
    print!("{}", render_accuracy_table(&runs));
    println!();
    print!("{}", render_comparison(&runs));

    let out = args.out.unwrap_or_else(|| workdir.join("report.json"));
    let json = serde_json::to_string_pretty(&runs).context("serializing the report")?;
    fs::write(&out, json).with_context(|| format!("writing {}", out.display()))?;
    println!("\nreport -> {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn run_report(ws: &Workspace, results: &Path, out_dir: Option<PathBuf>) -> Result<ExitCode> {
    let bundle = read_json(results).map_err(|e| anyhow!(e))?;
    let suspects_dir = ws.suspects_dir();
    let texts: BTreeMap<String, String> = if suspects_dir.is_dir() {
        load_documents(&suspects_dir, DocumentOrigin::Suspect)
            .map_err(|e| anyhow!(e))?
            .into_iter()
            .map(|d| (d.id, d.text))
            .collect()
    } else {
        BTreeMap::new()
    };
    let out_dir = out_dir.unwrap_or_else(|| ws.report_dir());
    emit_html(&bundle, &texts, &out_dir).map_err(|e| anyhow!(e))?;
    println!("report -> {}", out_dir.join("index.html").display());
    Ok(ExitCode::SUCCESS)
}
