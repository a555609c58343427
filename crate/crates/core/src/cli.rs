//! `reibench` command line.
//!
//! Settings come from an optional JSON config file (`--config`) and are
//! overridden by flags. The API key for remote providers is read from
//! `REI_API_KEY` only.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::sample::{parse_decimal, uniform, unit_counts};
use crate::dataset::seeds::parse_seeds;
use crate::dataset::{
    bundled_seeds, count_res, generate, read_episodes, stratified_sample, table3, to_jsonl, ContextType, Episode,
    FilterRules, GenConfig, Generator, Proportions, RELevel, SeedInstruction, VaguenessCell,
};
use crate::eval::{
    aggregate, emit_report, read_records, records_to_jsonl, run_all, EvalConfig, ReportFormat, RunManifest,
};
use crate::gateway::{Provider, RemoteConfig, RemoteProvider, ScriptedMode, ScriptedProvider};
use crate::planners::domain::HOUSEHOLD_DOMAIN;
use crate::planners::{DomainModel, PlannerKind, SaycanConfig, DEFAULT_SEARCH_BUDGET};
use crate::strategies::{StrategyConfig, StrategyKind};
use crate::world::TaskKind;

pub const API_KEY_ENV: &str = "REI_API_KEY";

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn failed(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "reibench", version, about = "Vague referring expression benchmark for LLM task planners")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// scripted or remote.
    #[arg(long, global = true)]
    pub provider: Option<String>,
    /// Scripted provider behaviour: perfect, context-blind, omit-object or echo.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// saycan or llmp.
    #[arg(long, global = true)]
    pub planner: Option<String>,
    /// none, ap, gated-ap, cot, icl, tocc or no-context.
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Comma-separated cells, e.g. `mixed-short,implicit` or `all`.
    #[arg(long, global = true)]
    pub cells: Option<String>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand seed instructions into the nine-cell dataset.
    Generate {
        /// Seed instruction file (JSON array); defaults to the bundled seeds.
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[arg(long)]
        replicates: Option<u32>,
    },
    /// Draw a stratified subset of task units.
    Sample {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        n: Option<u64>,
        /// `table3`, `uniform` or `Kind=weight,...`.
        #[arg(long)]
        proportions: Option<String>,
    },
    /// Run a planner and strategy over a dataset.
    Evaluate {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        run_id: Option<String>,
        /// TOCC plans from the rewritten instruction alone.
        #[arg(long)]
        tocc_instruction_only: bool,
    },
    /// Aggregate record files into a report.
    Report {
        /// Record files, one per run.
        #[arg(long = "records", required = true, num_args = 1..)]
        records: Vec<PathBuf>,
        /// Run whose success rates the deltas are taken against.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// markdown, csv or json.
        #[arg(long)]
        format: Option<String>,
    },
    /// Pretty-print one episode.
    Inspect {
        episode_id: String,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Run the scripted-provider acceptance checks.
    Selfcheck,
    /// Planning domain utilities.
    Domain {
        #[command(subcommand)]
        action: DomainAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum DomainAction {
    /// Print the bundled domain.
    Dump,
    /// Parse a domain file and report its schemas.
    Validate { path: Option<PathBuf> },
}

/// Config file contents. Every field is optional; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub provider: Option<String>,
    pub scripted_mode: Option<String>,
    pub remote: Option<RemoteConfig>,
    pub planner: Option<String>,
    pub strategy: Option<String>,
    pub tocc_instruction_only: Option<bool>,
    pub dataset: Option<PathBuf>,
    pub seeds_file: Option<PathBuf>,
    pub replicates: Option<u32>,
    pub sample_size: Option<u64>,
    pub proportions: Option<String>,
    pub seed: Option<u64>,
    pub step_budget: Option<usize>,
    pub choice_retries: Option<u32>,
    pub search_budget: Option<usize>,
    pub short_removal_fraction: Option<f64>,
    pub jobs: Option<usize>,
    pub cells: Option<String>,
    pub run_id: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read --config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| invalid(format!("{}: {}", path.display(), e.message())))
    }

    /// Applies the shared flags over the file values.
    pub fn merge_flags(mut self, a: &CommonArgs) -> Self {
        fn over<T: Clone>(slot: &mut Option<T>, flag: &Option<T>) {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        over(&mut self.provider, &a.provider);
        over(&mut self.scripted_mode, &a.mode);
        over(&mut self.planner, &a.planner);
        over(&mut self.strategy, &a.strategy);
        over(&mut self.cells, &a.cells);
        over(&mut self.jobs, &a.jobs);
        over(&mut self.seed, &a.seed);
        over(&mut self.out, &a.out);
        self
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn jobs(&self) -> Result<usize, CliError> {
        match self.jobs {
            Some(0) => Err(invalid("--jobs must be at least 1")),
            Some(j) => Ok(j),
            None => Ok(1),
        }
    }

    fn planner(&self) -> Result<PlannerKind, CliError> {
        self.planner.as_deref().unwrap_or("saycan").parse().map_err(invalid)
    }

    fn strategy(&self) -> Result<StrategyKind, CliError> {
        self.strategy
            .as_deref()
            .unwrap_or("none")
            .parse()
            .map_err(|e: crate::strategies::StrategyError| invalid(e.to_string()))
    }

    fn scripted_mode(&self) -> Result<ScriptedMode, CliError> {
        self.scripted_mode.as_deref().unwrap_or("perfect").parse().map_err(invalid)
    }

    fn cells(&self) -> Result<BTreeSet<VaguenessCell>, CliError> {
        parse_cells(self.cells.as_deref().unwrap_or("all"))
    }

    fn format(&self) -> Result<ReportFormat, CliError> {
        self.format.as_deref().unwrap_or("markdown").parse().map_err(invalid)
    }

    fn proportions(&self) -> Result<Proportions, CliError> {
        parse_proportions(self.proportions.as_deref().unwrap_or("table3"))
    }

    fn dataset(&self) -> Result<&Path, CliError> {
        self.dataset
            .as_deref()
            .ok_or_else(|| invalid("missing dataset path: pass --dataset <FILE> or set `dataset` in the config"))
    }

    fn provider(&self) -> Result<Box<dyn Provider>, CliError> {
        match self.provider.as_deref().unwrap_or("scripted") {
            "scripted" => Ok(Box::new(ScriptedProvider::new(self.scripted_mode()?, self.seed()))),
            "remote" => {
                let mut cfg = self
                    .remote
                    .clone()
                    .ok_or_else(|| invalid("--provider remote needs a `remote` section (endpoint, model) in --config"))?;
                cfg.api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
                if cfg.api_key.is_none() {
                    return Err(invalid(format!("--provider remote needs {API_KEY_ENV} to be set")));
                }
                Ok(Box::new(RemoteProvider::new(cfg)))
            }
            other => Err(invalid(format!("unknown provider `{other}` (expected scripted or remote)"))),
        }
    }
}

/// `all`, a level, a context type, or `level-context`, comma-separated.
pub fn parse_cells(spec: &str) -> Result<BTreeSet<VaguenessCell>, CliError> {
    let mut out = BTreeSet::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let item = item.to_ascii_lowercase();
        let matched: Vec<VaguenessCell> = if item == "all" || item == "*" {
            VaguenessCell::all()
        } else if let Ok(level) = item.parse::<RELevel>() {
            VaguenessCell::all().into_iter().filter(|c| c.level == level).collect()
        } else if let Ok(ctx) = item.parse::<ContextType>() {
            VaguenessCell::all().into_iter().filter(|c| c.context == ctx).collect()
        } else {
            vec![item.parse::<VaguenessCell>().map_err(|e| invalid(format!("--cells: {e}")))?]
        };
        out.extend(matched);
    }
    if out.is_empty() {
        return Err(invalid("--cells selects no cell"));
    }
    Ok(out)
}

/// `table3`, `uniform`, or `Kind=weight` pairs such as
/// `PickPlace=2,HeatPlace=1`.
pub fn parse_proportions(spec: &str) -> Result<Proportions, CliError> {
    match spec.trim().to_ascii_lowercase().as_str() {
        "table3" => return Ok(table3()),
        "uniform" => return Ok(uniform()),
        _ => {}
    }
    let mut out: Proportions = Vec::new();
    for pair in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, w) = pair
            .split_once('=')
            .ok_or_else(|| invalid(format!("--proportions: expected Kind=weight, got `{pair}`")))?;
        let kind: TaskKind = k.trim().parse().map_err(|e: crate::world::WorldError| invalid(format!("--proportions: {e}")))?;
        let weight = parse_decimal(w).ok_or_else(|| invalid(format!("--proportions: bad weight `{w}`")))?;
        if out.iter().any(|(k2, _)| *k2 == kind) {
            return Err(invalid(format!("--proportions: {kind} given twice")));
        }
        out.push((kind, weight));
    }
    if out.is_empty() || out.iter().all(|(_, w)| *w == Ratio::from_integer(0)) {
        return Err(invalid("--proportions: no positive weight"));
    }
    Ok(out)
}

fn load_dataset(path: &Path) -> Result<Vec<Episode>, CliError> {
    read_episodes(path).map_err(|e| invalid(format!("--dataset {}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| failed(format!("cannot create {}: {e}", dir.display())))?;
            }
            fs::write(p, text).map_err(|e| failed(format!("cannot write {}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| failed(format!("stdout: {e}"))),
    }
}

fn cmd_generate(cfg: &RunConfig, seeds_flag: Option<PathBuf>, replicates: Option<u32>) -> Result<(), CliError> {
    let seeds: Vec<SeedInstruction> = match seeds_flag.or_else(|| cfg.seeds_file.clone()) {
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| invalid(format!("--seeds {}: {e}", p.display())))?;
            parse_seeds(&text).map_err(|e| invalid(format!("--seeds {}: {e}", p.display())))?
        }
        None => bundled_seeds(),
    };
    let replicates = replicates.or(cfg.replicates).unwrap_or(1);
    if replicates == 0 {
        return Err(invalid("--replicates must be at least 1"));
    }
    let mut gen = GenConfig {
        run_seed: cfg.seed(),
        replicates,
        ..GenConfig::default()
    };
    if let Some(f) = cfg.short_removal_fraction {
        if !(f > 0.0 && f < 1.0) {
            return Err(invalid("short_removal_fraction must lie strictly between 0 and 1"));
        }
        gen.short_removal_fraction = f;
    }
    gen.rules = FilterRules::swapped();
    let cells = cfg.cells()?;
    let remote;
    let generator = match cfg.provider.as_deref().unwrap_or("scripted") {
        "scripted" => Generator::Deterministic,
        _ => {
            remote = cfg.provider()?;
            Generator::Llm(remote.as_ref())
        }
    };
    let episodes: Vec<Episode> = generate(&seeds, &gen, generator)
        .map_err(|e| failed(format!("generation failed: {e}")))?
        .into_iter()
        .filter(|e| cells.contains(&e.cell))
        .collect();
    write_out(cfg.out.as_deref(), &to_jsonl(&episodes))?;
    eprintln!(
        "generated {} episodes from {} seeds x {} replicate(s)",
        episodes.len(),
        seeds.len(),
        replicates
    );
    Ok(())
}

fn cmd_sample(cfg: &RunConfig, n: Option<u64>) -> Result<(), CliError> {
    let pool = load_dataset(cfg.dataset()?)?;
    let n = n.or(cfg.sample_size).ok_or_else(|| invalid("missing sample size: pass --n <UNITS>"))?;
    let proportions = cfg.proportions()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let subset = stratified_sample(&pool, n, &proportions, &mut rng).map_err(|e| invalid(format!("sample: {e}")))?;
    let counts = unit_counts(&subset);
    let mut summary = String::new();
    let mut shown = Vec::new();
    for (kind, _) in &proportions {
        let c = counts.get(kind).copied().unwrap_or(0);
        let _ = writeln!(summary, "{:<16} {c}", kind.as_str());
        shown.push(c.to_string());
    }
    let _ = writeln!(summary, "counts {}", shown.join("/"));
    match cfg.out.as_deref() {
        Some(p) => {
            write_out(Some(p), &to_jsonl(&subset))?;
            print!("{summary}");
        }
        None => {
            eprint!("{summary}");
            write_out(None, &to_jsonl(&subset))?;
        }
    }
    Ok(())
}

fn default_run_id(cfg: &RunConfig, planner: PlannerKind, strategy: StrategyKind) -> Result<String, CliError> {
    let who = match cfg.provider.as_deref().unwrap_or("scripted") {
        "scripted" => cfg.scripted_mode()?.as_str().to_string(),
        _ => cfg
            .remote
            .as_ref()
            .map(|r| r.model.replace(['/', ' '], "_"))
            .unwrap_or_else(|| "remote".into()),
    };
    Ok(format!("{who}-{planner}-{strategy}-s{}", cfg.seed()))
}

fn cmd_evaluate(cfg: &RunConfig, run_id: Option<String>, instruction_only: bool) -> Result<(), CliError> {
    let path = cfg.dataset()?;
    let planner = cfg.planner()?;
    let strategy = cfg.strategy()?;
    let cells = cfg.cells()?;
    let jobs = cfg.jobs()?;
    let provider = cfg.provider()?;
    let bytes = fs::read(path).map_err(|e| invalid(format!("--dataset {}: {e}", path.display())))?;
    let episodes: Vec<Episode> = load_dataset(path)?
        .into_iter()
        .filter(|e| cells.contains(&e.cell))
        .collect();
    if episodes.is_empty() {
        return Err(invalid("no episode matches --cells"));
    }
    let run_id = match run_id.or_else(|| cfg.run_id.clone()) {
        Some(r) => r,
        None => default_run_id(cfg, planner, strategy)?,
    };
    let mut saycan = SaycanConfig::default();
    if let Some(b) = cfg.step_budget {
        saycan.step_budget = b;
    }
    if let Some(r) = cfg.choice_retries {
        saycan.choice_retries = r;
    }
    let eval = EvalConfig {
        run_id: run_id.clone(),
        run_seed: cfg.seed(),
        planner,
        strategy: StrategyConfig {
            kind: strategy,
            tocc_instruction_only: instruction_only || cfg.tocc_instruction_only.unwrap_or(false),
        },
        saycan,
        search_budget: cfg.search_budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
    };
    let records = run_all(&episodes, &eval, provider.as_ref(), jobs);
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(&run_id));
    write_out(Some(&dir.join("records.jsonl")), &records_to_jsonl(&records))?;
    let manifest = RunManifest::new(&run_id, &eval, cfg.seed(), &bytes, episodes.len(), provider.describe());
    write_out(Some(&dir.join("manifest.json")), &manifest.to_json())?;
    let ok = records.iter().filter(|r| r.success).count();
    println!("{run_id}: {ok}/{} succeeded; records in {}", records.len(), dir.display());
    Ok(())
}

fn cmd_report(cfg: &RunConfig, records: &[PathBuf], baseline: Option<PathBuf>) -> Result<(), CliError> {
    let format = cfg.format()?;
    let load = |p: &Path| {
        let recs = read_records(p).map_err(|e| invalid(e.to_string()))?;
        aggregate(&recs).map_err(|e| invalid(format!("{}: {e}", p.display())))
    };
    let runs = records.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let base = baseline.as_deref().map(load).transpose()?;
    write_out(cfg.out.as_deref(), &emit_report(&runs, base.as_ref(), format))
}

pub fn render_episode(e: &Episode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "episode  {}", e.id);
    let _ = writeln!(s, "cell     {}", e.cell);
    let _ = writeln!(s, "scene    {}", e.scene.scene_id);
    let _ = writeln!(s, "goal     {}", serde_json::to_string(&e.goal).expect("goal serializes"));
    let targets: Vec<&str> = e.targets.iter().map(String::as_str).collect();
    let _ = writeln!(s, "targets  {}", targets.join(", "));
    let q = count_res(e);
    let _ = writeln!(
        s,
        "counts   context {}/{}  instruction {}/{} (explicit/implicit)",
        q.ctx_explicit, q.ctx_implicit, q.ins_explicit, q.ins_implicit
    );
    let _ = writeln!(
        s,
        "lineage  seed {} replicate {} rng {} engine {:?}",
        e.lineage.seed_id, e.lineage.replicate, e.lineage.rng_seed, e.lineage.engine
    );
    let _ = writeln!(s, "\nContext:");
    for t in e.context.turns.iter().chain(std::iter::once(&e.instruction)) {
        if std::ptr::eq(t, &e.instruction) {
            let _ = writeln!(s, "\nInstruction:");
        }
        let _ = writeln!(s, "{}: {}", t.speaker.label(), t.text);
        for a in &t.re_annotations {
            let _ = writeln!(s, "    [{}..{}] {:<22} {:<11} -> {}", a.start, a.end, format!("`{}`", a.surface), format!("{:?}", a.form).to_lowercase(), a.referent);
        }
    }
    s
}

fn cmd_inspect(cfg: &RunConfig, id: &str) -> Result<(), CliError> {
    let episodes = load_dataset(cfg.dataset()?)?;
    let e = episodes
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| invalid(format!("no episode `{id}` in the dataset")))?;
    write_out(None, &render_episode(e))
}

fn cmd_selfcheck() -> Result<(), CliError> {
    let outcomes = crate::selfcheck::run_selfcheck();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed_ids: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    if failed_ids.is_empty() {
        println!("all {} checks passed", outcomes.len());
        Ok(())
    } else {
        Err(failed(format!("checks failed: {}", failed_ids.join(", "))))
    }
}

fn cmd_domain(action: DomainAction) -> Result<(), CliError> {
    match action {
        DomainAction::Dump => write_out(None, HOUSEHOLD_DOMAIN),
        DomainAction::Validate { path } => {
            let text = match &path {
                Some(p) => fs::read_to_string(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
                None => HOUSEHOLD_DOMAIN.to_string(),
            };
            let d = DomainModel::parse(&text).map_err(|e| invalid(format!("domain {}: {e}", e.pos())))?;
            println!("ok: {} schemas, {} predicates", d.schemas.len(), d.predicates.len());
            Ok(())
        }
    }
}

/// Runs one command line. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = file.merge_flags(&cli.common);
    match cli.command {
        Command::Generate { seeds, replicates } => cmd_generate(&cfg, seeds, replicates),
        Command::Sample { dataset, n, proportions } => {
            if dataset.is_some() {
                cfg.dataset = dataset;
            }
            if proportions.is_some() {
                cfg.proportions = proportions;
            }
            cmd_sample(&cfg, n)
        }
        Command::Evaluate {
            dataset,
            run_id,
            tocc_instruction_only,
        } => {
            if dataset.is_some() {
                cfg.dataset = dataset;
            }
            cmd_evaluate(&cfg, run_id, tocc_instruction_only)
        }
        Command::Report {
            records,
            baseline,
            format,
        } => {
            if format.is_some() {
                cfg.format = format;
            }
            cmd_report(&cfg, &records, baseline)
        }
        Command::Inspect { episode_id, dataset } => {
            if dataset.is_some() {
                cfg.dataset = dataset;
            }
            cmd_inspect(&cfg, &episode_id)
        }
        Command::Selfcheck => cmd_selfcheck(),
        Command::Domain { action } => cmd_domain(action),
    }
}
