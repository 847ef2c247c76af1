mod bench;
mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use docamr::builder::{build, chain_statistics, read_docgraphs, write_docgraphs, BuildConfig, DocGraph, Mode};
use docamr::document::{load_document, Document};
use docamr::inject::{inject, Injection, MentionFile};
use docamr::penman::{read_penman_file, AmrGraph};
use docamr::smatch::{score_corpus, SearchConfig};
use docamr::synth::sentence_pool;
use docamr::CorpusScore;
use serde_json::{json, Value};

use report::RunManifest;

#[derive(Parser)]
#[command(name = "docamr", version, about = "Build and score document-level AMR graphs")]
struct Cli {
    /// Machine-readable output on stdout and a run manifest on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for corpus scoring (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress warnings.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge the sentence graphs of one document into a document graph.
    Build {
        #[arg(long)]
        amr: PathBuf,
        #[arg(long)]
        coref: PathBuf,
        #[arg(long, default_value = "docamr")]
        mode: Mode,
        /// Output PENMAN file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain and merge counters for the docamr build of one document.
    Stats {
        #[arg(long)]
        amr: PathBuf,
        #[arg(long)]
        coref: PathBuf,
    },
    /// Score predicted document graphs against gold ones.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Turn token-span mention clusters into an annotation file.
    InjectCoref {
        #[arg(long)]
        amr: PathBuf,
        #[arg(long)]
        mentions: PathBuf,
        /// Output annotation JSON (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inject mentions, build a docamr graph and score it against gold.
    Pipeline {
        #[arg(long)]
        amr: PathBuf,
        #[arg(long)]
        mentions: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Also write the built document graph here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Time constrained against unconstrained scoring on synthetic documents.
    Bench {
        /// PENMAN file of sentence graphs to sample from (default: bundled pool).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Sentences per document, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 10, 20, 30])]
        sizes: Vec<usize>,
        /// Documents per size.
        #[arg(long, default_value_t = 3)]
        docs: usize,
        /// Edge relabel/delete probability for the predictions.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Restrict single-sentence nodes to candidates from the same sentence.
    #[arg(long)]
    constrained: bool,
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Align exhaustively when both graphs have at most this many nodes.
    #[arg(long, default_value_t = 10)]
    exact_max: usize,
    /// Include elapsed times in the report.
    #[arg(long)]
    timing: bool,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            seed: self.seed,
            constrained: self.constrained,
            max_exact_nodes: self.exact_max,
        }
    }
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl From<docamr::Error> for Failure {
    fn from(e: docamr::Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn stage(name: &'static str) -> impl Fn(docamr::Error) -> Failure {
    move |e| Failure {
        kind: e.kind(),
        message: format!("{name}: {e}"),
    }
}

fn output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            kind: "io",
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serializes"));
}

fn doc_id_for(mentions: &MentionFile, amr: &Path) -> String {
    mentions.doc_id.clone().unwrap_or_else(|| {
        amr.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    })
}

fn injection(amr: &Path, mentions: &Path, quiet: bool) -> docamr::Result<(Vec<AmrGraph>, MentionFile, Injection)> {
    let sentences = read_penman_file(amr)?;
    let file = MentionFile::read(mentions)?;
    let result = inject(&sentences, &file)?;
    if !quiet {
        for d in &result.report.dropped {
            eprintln!(
                "warning: cluster {}: mention {} {}..{} dropped: {}",
                d.cluster, d.mention.sent, d.mention.start, d.mention.end, d.reason
            );
        }
        for c in &result.report.discarded_clusters {
            eprintln!("warning: cluster {c} does not span two sentences and was discarded");
        }
    }
    Ok((sentences, file, result))
}

fn evaluate(gold: &[DocGraph], pred: &[DocGraph], search: &SearchArgs, json: bool) -> docamr::Result<()> {
    let config = search.config();
    let result: CorpusScore = score_corpus(gold, pred, &config)?;
    if json {
        print_json(&report::evaluate_json(&result, &config, search.timing));
    } else {
        print!("{}", report::evaluate_text(&result, search.timing));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<RunManifest<'_>, Failure> {
    let start = Instant::now();
    let mut manifest = match &cli.command {
        Command::Build { amr, coref, mode, out } => {
            let config = BuildConfig::load()?;
            let doc = load_document(amr, coref)?;
            let built = build(&doc, *mode, &config);
            match out {
                Some(p) => write_docgraphs(p, std::slice::from_ref(&built))?,
                None => output(None, &built.to_penman()?)?,
            }
            RunManifest {
                subcommand: "build",
                inputs: vec![("amr", amr.as_path()), ("coref", coref.as_path())],
                mode: Some(mode.name()),
                seed: None,
                elapsed: Default::default(),
            }
        }
        Command::Stats { amr, coref } => {
            let config = BuildConfig::load()?;
            let doc = load_document(amr, coref)?;
            let built = build(&doc, Mode::DocAmr, &config);
            let stats = chain_statistics(&doc, &built)?;
            let mut v = json!({"schema": report::STATS_SCHEMA, "doc_id": doc.doc_id});
            if let (Value::Object(m), Ok(Value::Object(s))) = (&mut v, serde_json::to_value(stats)) {
                m.extend(s);
            }
            print_json(&v);
            RunManifest {
                subcommand: "stats",
                inputs: vec![("amr", amr.as_path()), ("coref", coref.as_path())],
                mode: Some(Mode::DocAmr.name()),
                seed: None,
                elapsed: Default::default(),
            }
        }
        Command::Evaluate { gold, pred, search } => {
            let g = read_docgraphs(gold)?;
            let p = read_docgraphs(pred)?;
            evaluate(&g, &p, search, cli.json)?;
            RunManifest {
                subcommand: "evaluate",
                inputs: vec![("gold", gold.as_path()), ("pred", pred.as_path())],
                mode: None,
                seed: Some(search.seed),
                elapsed: Default::default(),
            }
        }
        Command::InjectCoref { amr, mentions, out } => {
            let (_, _, result) = injection(amr, mentions, cli.quiet)?;
            let mut text = result.annotation.to_json();
            text.push('\n');
            output(out.as_deref(), &text)?;
            if cli.json && out.is_some() {
                let r = &result.report;
                print_json(&json!({
                    "schema": report::INJECT_SCHEMA,
                    "mentions": r.mentions,
                    "assigned": r.assigned,
                    "dropped": r.dropped.len(),
                    "chains": result.annotation.chains.len(),
                    "discarded_clusters": r.discarded_clusters,
                }));
            }
            RunManifest {
                subcommand: "inject-coref",
                inputs: vec![("amr", amr.as_path()), ("mentions", mentions.as_path())],
                mode: None,
                seed: None,
                elapsed: Default::default(),
            }
        }
        Command::Pipeline {
            amr,
            mentions,
            gold,
            out,
            search,
        } => {
            let (sentences, file, result) = injection(amr, mentions, cli.quiet).map_err(stage("inject-coref"))?;
            let config = BuildConfig::load().map_err(stage("build"))?;
            let doc = Document::new(doc_id_for(&file, amr), sentences, result.annotation).map_err(stage("build"))?;
            let built = build(&doc, Mode::DocAmr, &config);
            if let Some(p) = out {
                write_docgraphs(p, std::slice::from_ref(&built)).map_err(stage("build"))?;
            }
            let g = read_docgraphs(gold).map_err(stage("evaluate"))?;
            evaluate(&g, &[built], search, cli.json).map_err(stage("evaluate"))?;
            RunManifest {
                subcommand: "pipeline",
                inputs: vec![
                    ("amr", amr.as_path()),
                    ("mentions", mentions.as_path()),
                    ("gold", gold.as_path()),
                ],
                mode: Some(Mode::DocAmr.name()),
                seed: Some(search.seed),
                elapsed: Default::default(),
            }
        }
        Command::Bench {
            corpus,
            sizes,
            docs,
            noise,
            restarts,
            seed,
        } => {
            if !(0.0..=1.0).contains(noise) {
                return Err(docamr::Error::Usage(format!("noise must be in [0, 1], got {noise}")).into());
            }
            let pool = match corpus {
                Some(p) => {
                    let graphs = read_penman_file(p)?;
                    if graphs.is_empty() {
                        return Err(docamr::Error::Usage(format!("{}: no sentence graphs", p.display())).into());
                    }
                    graphs
                }
                None => sentence_pool(),
            };
            let settings = bench::BenchSettings {
                sizes: sizes.clone(),
                docs: *docs,
                noise: *noise,
                search: SearchConfig {
                    restarts: *restarts,
                    seed: *seed,
                    ..SearchConfig::default()
                },
            };
            let config = BuildConfig::load()?;
            let rows = bench::run(&pool, &settings, &config)?;
            if cli.json {
                print_json(&bench::to_json(&rows, &settings));
            } else {
                print!("{}", bench::to_text(&rows));
            }
            let short: Vec<String> = rows
                .iter()
                .flat_map(|r| r.shortfalls().into_iter().map(move |d| format!("{}-sentence doc {d}", r.sentences)))
                .collect();
            if !short.is_empty() {
                return Err(Failure {
                    kind: "benchmark",
                    message: format!("constrained f1 below unconstrained f1 for {}", short.join(", ")),
                });
            }
            RunManifest {
                subcommand: "bench",
                inputs: corpus.iter().map(|p| ("corpus", p.as_path())).collect(),
                mode: Some(Mode::DocAmr.name()),
                seed: Some(*seed),
                elapsed: Default::default(),
            }
        }
    };
    manifest.elapsed = start.elapsed();
    Ok(manifest)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            eprintln!("error[usage]: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error[usage]: {}", one_line(&e.to_string()));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(manifest) => {
            if cli.json {
                eprintln!("{}", manifest.to_json());
            }
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, one_line(&f.message));
            ExitCode::from(if f.kind == "usage" { 2 } else { 1 })
        }
    }
}
