//! `skillrec`: pipeline and operations entry points.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (bad input files,
//! corrupt state, invalid config), 3 internal error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand};

use skillrec_core::classifier::{evaluate, split_train_test, train_classifier, ClassifierModel, Hyperparams};
use skillrec_core::config::Config;
use skillrec_core::engine::Engine;
use skillrec_core::error::Error;
use skillrec_core::importance::{
    normalize_rates, occurrence_rates, read_profiles, refresh_profile, write_profile, HeadingDetector,
    SkillSentenceDetector,
};
use skillrec_core::oer::{fetch_oers, FixtureConnector, PropertyScales, RepositoryConnector};
use skillrec_core::sim::{run_sim, SimConfig};
use skillrec_core::text::{preprocess_with_source, CleanSentence};
use skillrec_core::tfidf::{extract_skill_terms, read_terms, write_terms};
use skillrec_core::vacancy::{
    label_corpus, load_vacancies, read_labeled, split_sections, vacancy_sentences, write_labeled, ColumnMap,
    HeadingRules, Label, RawVacancy,
};

#[derive(Debug, Parser)]
#[command(name = "skillrec", version, about = "Skill extraction and OER recommendation")]
struct Cli {
    /// TOML config file. For `simulate` it holds simulation settings,
    /// otherwise engine and service settings.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vacancy CSV to labeled sentences (`label<TAB>tokens`).
    Ingest(IngestArgs),
    /// Train the skill-sentence classifier and print its evaluation as JSON.
    Train(TrainArgs),
    /// Rank skill terms by TFIDF (`term<TAB>score<TAB>df`).
    ExtractSkills(ExtractArgs),
    /// Build or refresh one job skill profile.
    Importance(ImportanceArgs),
    /// Load OER fixtures, job profiles and a vacancy corpus into a data directory.
    Load(LoadArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Run the closed-loop simulation and write line-delimited metrics.
    Simulate(SimulateArgs),
    /// Run the periodic batch jobs once against a data directory.
    Batch(BatchArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Vacancy CSV with id, title, location, date and body columns.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Labeled sentences as written by `ingest`.
    #[arg(long)]
    input: PathBuf,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the evaluation report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Held-out share of each class, in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Embedding dimension, >= 1.
    #[arg(long, default_value_t = 50)]
    dim: usize,
    /// Passes over the training data, >= 1.
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    /// Initial learning rate, > 0.
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    /// Shortest character n-gram.
    #[arg(long, default_value_t = 3)]
    min_n: usize,
    /// Longest character n-gram, >= min-n.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Vacancy CSV, or a `document<TAB>sentence` file of skill sentences.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Minimum number of documents a term must occur in, >= 1.
    #[arg(long, default_value_t = 3)]
    min_df: usize,
    /// Keep this many top terms; all when omitted.
    #[arg(long)]
    top_n: Option<usize>,
    /// Classifier used to pick skill sentences from a CSV; without it the
    /// required-skills headings decide.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ImportanceArgs {
    /// Vacancy CSV.
    #[arg(long)]
    vacancies: PathBuf,
    /// Skill-term file from `extract-skills`.
    #[arg(long)]
    terms: PathBuf,
    #[arg(long)]
    job: String,
    #[arg(long, default_value = "")]
    location: String,
    /// Reference date (YYYY-MM-DD); today when omitted.
    #[arg(long)]
    today: Option<NaiveDate>,
    /// Profile file with earlier scores to decay from.
    #[arg(long)]
    previous: Option<PathBuf>,
    /// Classifier for spotting skill sentences; headings otherwise.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct LoadArgs {
    /// Data directory (overrides the config file).
    #[arg(long, env = "SKILLREC_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Directory of `<repository>.jsonl` OER fixtures.
    #[arg(long)]
    oers: Option<PathBuf>,
    /// Profile file(s) from `importance`.
    #[arg(long)]
    profiles: Vec<PathBuf>,
    /// Vacancy CSV kept for importance refreshes.
    #[arg(long, requires = "terms")]
    corpus: Option<PathBuf>,
    /// Skill terms tracked on refresh.
    #[arg(long, requires = "corpus")]
    terms: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Listen port, 1..=65535 (overrides the config file).
    #[arg(long, env = "SKILLREC_PORT")]
    port: Option<u16>,
    /// Data directory (overrides the config file).
    #[arg(long, env = "SKILLREC_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Seconds between scheduled batch runs; 0 disables.
    #[arg(long, env = "SKILLREC_SCHEDULER_SECS")]
    scheduler_secs: Option<u64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Metrics file (one JSON object per line).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    learners: Option<usize>,
    #[arg(long)]
    oers: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Half-width of uniform satisfaction noise, >= 0.
    #[arg(long)]
    noise: Option<f64>,
    /// Steps between batch runs, >= 1.
    #[arg(long)]
    batch_every: Option<usize>,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// Data directory (overrides the config file).
    #[arg(long, env = "SKILLREC_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// End of the batch period (RFC 3339); now when omitted.
    #[arg(long)]
    period_end: Option<DateTime<Utc>>,
}

#[derive(Debug)]
enum Failure {
    Data(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::State(_) | Error::UserMismatch { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", path.display()))
}

type Outcome = Result<(), Failure>;

fn engine_config(cli: &Cli) -> Result<Config, Failure> {
    Ok(match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

fn load_split(path: &Path) -> Result<Vec<RawVacancy>, Failure> {
    let report = load_vacancies(path, &ColumnMap::default())?;
    if report.skipped_empty > 0 {
        eprintln!("skipped {} vacancies with an empty body", report.skipped_empty);
    }
    let rules = HeadingRules::default();
    Ok(report.vacancies.into_iter().map(|v| split_sections(v, &rules)).collect())
}

fn detector(model: &Option<PathBuf>) -> Result<Box<dyn SkillSentenceDetector + Send + Sync>, Failure> {
    Ok(match model {
        Some(path) => Box::new(ClassifierModel::load(path)?),
        None => Box::new(HeadingDetector::default()),
    })
}

fn ingest(args: &IngestArgs) -> Outcome {
    let vacancies = load_split(&args.input)?;
    let labeled = label_corpus(&vacancies, &HeadingRules::default());
    let mut out = create(&args.out)?;
    write_labeled(&mut out, &labeled).map_err(io_err(&args.out))?;
    out.flush().map_err(io_err(&args.out))?;
    let skill = labeled.iter().filter(|l| l.label == Label::Skill).count();
    eprintln!(
        "{} vacancies, {} sentences ({skill} skill, {} other)",
        vacancies.len(),
        labeled.len(),
        labeled.len() - skill
    );
    Ok(())
}

fn train(args: &TrainArgs, seed: u64) -> Outcome {
    if !(args.test_fraction > 0.0 && args.test_fraction < 1.0) {
        return Err(Failure::Data(format!("test-fraction must lie in (0, 1), got {}", args.test_fraction)));
    }
    let file = File::open(&args.input).map_err(io_err(&args.input))?;
    let data = read_labeled(BufReader::new(file))?;
    let hyper = Hyperparams {
        dim: args.dim,
        min_n: args.min_n,
        max_n: args.max_n,
        epochs: args.epochs,
        lr: args.lr,
        seed,
    };
    let (train_set, test_set) = split_train_test(&data, args.test_fraction, seed);
    let model = train_classifier(&train_set, &hyper)?;
    let report = evaluate(&model, &test_set)?;
    model.save(&args.out)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    if let Some(path) = &args.report {
        std::fs::write(path, format!("{json}\n")).map_err(io_err(path))?;
    }
    println!("{json}");
    Ok(())
}

/// Skill sentences from a CSV (by model or heading) or a
/// `document<TAB>sentence` file.
fn skill_sentences(input: &Path, model: &Option<PathBuf>) -> Result<Vec<CleanSentence>, Failure> {
    if input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let vacancies = load_split(input)?;
        return Ok(match model {
            Some(path) => {
                let model = ClassifierModel::load(path)?;
                vacancies
                    .iter()
                    .flat_map(vacancy_sentences)
                    .filter(|s| model.is_skill_sentence(s))
                    .collect()
            }
            None => label_corpus(&vacancies, &HeadingRules::default())
                .into_iter()
                .filter(|l| l.label == Label::Skill)
                .map(|l| l.sentence)
                .collect(),
        });
    }
    let text = read_text(input)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let (doc, sentence) = line
            .split_once('\t')
            .ok_or_else(|| Failure::Data(format!("{}:{}: expected document<TAB>sentence", input.display(), n + 1)))?;
        out.extend(preprocess_with_source(sentence, doc, Some("required skills")));
    }
    Ok(out)
}

fn extract(args: &ExtractArgs) -> Outcome {
    if args.min_df == 0 {
        return Err(Failure::Data("min-df must be at least 1".into()));
    }
    let sentences = skill_sentences(&args.input, &args.model)?;
    let terms = extract_skill_terms(&sentences, args.min_df, args.top_n.unwrap_or(usize::MAX));
    let mut out = create(&args.out)?;
    write_terms(&mut out, &terms).map_err(io_err(&args.out))?;
    out.flush().map_err(io_err(&args.out))?;
    eprintln!("{} terms from {} skill sentences", terms.len(), sentences.len());
    Ok(())
}

fn importance(args: &ImportanceArgs, config: &Config) -> Outcome {
    let vacancies = load_split(&args.vacancies)?;
    let terms = read_terms(&read_text(&args.terms)?)?;
    let today = args.today.unwrap_or_else(|| Utc::now().date_naive());
    let detector = detector(&args.model)?;
    let rates = occurrence_rates(
        &vacancies,
        &args.job,
        &args.location,
        config.window_months,
        today,
        &terms,
        detector.as_ref(),
    );
    let previous = match &args.previous {
        Some(path) => read_profiles(&read_text(path)?)?,
        None => Vec::new(),
    };
    let job = args.job.trim().to_lowercase();
    let location = skillrec_core::vacancy::normalize_location(&args.location);
    let prior = previous.iter().find(|p| p.job == job && p.location == location);
    let profile = refresh_profile(
        prior,
        &job,
        &location,
        &normalize_rates(&rates),
        config.alpha,
        today,
        config.top_k_skills,
    )?;
    let mut out = create(&args.out)?;
    write_profile(&mut out, &profile).map_err(io_err(&args.out))?;
    out.flush().map_err(io_err(&args.out))?;
    eprintln!("{} skills for `{job}` at `{location}`", profile.entries.len());
    Ok(())
}

fn load(args: &LoadArgs, mut config: Config) -> Outcome {
    if let Some(dir) = &args.data_dir {
        config.data_dir = dir.clone();
    }
    let fixture_dir = args.oers.clone().or_else(|| config.fixture_dir.clone());
    let mut engine = Engine::open(config)?;
    if let Some(dir) = fixture_dir {
        let mut fetched = Vec::new();
        for conn in FixtureConnector::discover(&dir)? {
            let result = fetch_oers(&conn)?;
            if result.skipped > 0 {
                eprintln!("{}: skipped {} malformed records", conn.repository(), result.skipped);
            }
            fetched.push((conn.repository().to_string(), result.records));
        }
        let added = engine.import_raw(&fetched, &PropertyScales::default())?;
        eprintln!("imported {added} OERs");
    }
    let mut profiles = Vec::new();
    for path in &args.profiles {
        profiles.extend(read_profiles(&read_text(path)?)?);
    }
    if !profiles.is_empty() {
        eprintln!("published {} job profiles", profiles.len());
        engine.publish_profiles(profiles)?;
    }
    if let (Some(corpus), Some(terms)) = (&args.corpus, &args.terms) {
        let vacancies = load_split(corpus)?;
        let terms = read_terms(&read_text(terms)?)?;
        eprintln!("stored {} vacancies and {} terms", vacancies.len(), terms.len());
        engine.load_corpus(vacancies, terms)?;
    }
    engine.snapshot(Utc::now())?;
    Ok(())
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn serve(args: &ServeArgs, mut config: Config) -> Outcome {
    if let Some(port) = args.port {
        config.port = port;
    }
    if let Some(dir) = &args.data_dir {
        config.data_dir = dir.clone();
    }
    if let Some(secs) = args.scheduler_secs {
        config.scheduler_secs = secs;
    }
    config.validate()?;
    runtime()?
        .block_on(skillrec_server::serve(config, Arc::new(Utc::now)))
        .map_err(|e| match e {
            skillrec_server::ServeError::Engine(e) => Failure::from(e),
            other => Failure::Internal(other.to_string()),
        })
}

fn simulate(args: &SimulateArgs, cli: &Cli) -> Outcome {
    let mut cfg = match &cli.config {
        Some(path) => SimConfig::from_toml(&read_text(path)?)?,
        None => SimConfig::default(),
    };
    cfg.seed = cli.seed;
    cfg.n_learners = args.learners.unwrap_or(cfg.n_learners);
    cfg.n_oers = args.oers.unwrap_or(cfg.n_oers);
    cfg.steps = args.steps.unwrap_or(cfg.steps);
    cfg.noise = args.noise.unwrap_or(cfg.noise);
    cfg.batch_every = args.batch_every.unwrap_or(cfg.batch_every);
    let report = run_sim(&cfg)?;
    let mut out = create(&args.out)?;
    report.write_jsonl(&mut out)?;
    out.flush().map_err(io_err(&args.out))?;
    let window = 20.min(cfg.steps);
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    eprintln!(
        "satisfaction {} -> {}; rated {}, irrelevant {}, changed {}; max final L1 {:.1}",
        fmt(report.mean_satisfaction(0..window)),
        fmt(report.mean_satisfaction(cfg.steps - window..cfg.steps)),
        report.rated,
        report.irrelevant,
        report.changed,
        report.max_final_l1()
    );
    Ok(())
}

fn batch(args: &BatchArgs, mut config: Config) -> Outcome {
    if let Some(dir) = &args.data_dir {
        config.data_dir = dir.clone();
    }
    let mut engine = Engine::open(config)?;
    let report = engine.run_batch(args.period_end.unwrap_or_else(Utc::now))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    println!("{json}");
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Train(a) => train(a, cli.seed),
        Command::ExtractSkills(a) => extract(a),
        Command::Importance(a) => importance(a, &engine_config(cli)?),
        Command::Load(a) => load(a, engine_config(cli)?),
        Command::Serve(a) => serve(a, engine_config(cli)?),
        Command::Simulate(a) => simulate(a, cli),
        Command::Batch(a) => batch(a, engine_config(cli)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
