//! The `chatsat` command line: configuration resolution and subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chatlog::{corpus_stats, read_corpus, write_sessions, Corpus, Format, Speaker, Summary};
use crate::container::parse_key_values;
use crate::error::{Error, Result};
use crate::eval::{
    bias_report, evaluate, infer_unlabeled, parse_methods, rating_distance_analysis, read_calls, threshold_calls,
    compute_metrics, train_methods, write_calls, ExperimentConfig, Method, Split, TrainedModel,
    DEFAULT_SAMPLE_FRACTION,
};
use crate::nnet::gradcheck::{gradient_check, random_batch, DEFAULT_EPSILON, TOLERANCE};
use crate::nnet::{CellType, ModelConfig};
use crate::preprocess::{consolidate_turns, turn_gaps};
use crate::synthcorpus::{generate, GenSpec};

#[derive(Debug, Parser)]
#[command(name = "chatsat", version, about = "Customer dissatisfaction prediction from chat logs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Shorthand for `--set seed=N`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic corpus and its ground-truth labels.
    Generate,
    /// Parse and validate corpus files; with --out, write them merged as JSONL.
    Ingest { paths: Vec<PathBuf> },
    /// Session, gap and rating statistics of a corpus.
    Stats { corpus: PathBuf },
    /// Train the configured methods on the labeled sessions of a corpus.
    Train { corpus: PathBuf },
    /// Test-set metrics of a trained model directory.
    Evaluate {
        #[arg(long)]
        models: PathBuf,
        corpus: PathBuf,
    },
    /// Per-session dissatisfaction calls from one model.
    Infer {
        #[arg(long)]
        model: PathBuf,
        corpus: PathBuf,
    },
    /// Compare rated sessions with model calls on unrated ones.
    BiasReport {
        #[arg(long)]
        calls: PathBuf,
        corpus: PathBuf,
    },
    /// Finite-difference check of the recurrent gradients.
    Gradcheck,
}

/// Every setting of a run, resolved from defaults, `--config` and `--set`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub generator: GenSpec,
    pub experiment: ExperimentConfig,
    pub distance_sample_fraction: f64,
    pub gradcheck_epsilon: f64,
    pub gradcheck_tolerance: f64,
    pub gradcheck_sequences: usize,
    pub gradcheck: ModelConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut gradcheck = ModelConfig::new(CellType::Lstm, true, 20);
        gradcheck.embed_dim = 5;
        gradcheck.hidden_dim = 8;
        gradcheck.max_len = 12;
        RunConfig {
            seed: 0,
            generator: GenSpec::default(),
            experiment: ExperimentConfig::default(),
            distance_sample_fraction: DEFAULT_SAMPLE_FRACTION,
            gradcheck_epsilon: DEFAULT_EPSILON,
            gradcheck_tolerance: TOLERANCE,
            gradcheck_sequences: 4,
            gradcheck,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value for {key}: {value:?}")))
}

impl RunConfig {
    /// Applies one `key = value` setting. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let e = &mut self.experiment;
        if let Some(k) = key.strip_prefix("gen.") {
            if k == "rng_seed" {
                return Err(Error::Config("the generator seed is `seed`".into()));
            }
            return self.generator.set(k, value.trim());
        }
        if let Some(k) = key.strip_prefix("model.") {
            if matches!(k, "cell" | "include_time" | "vocab_size" | "rng_seed") {
                return Err(Error::Config(format!("model.{k} is set per method; use `methods` or `seed`")));
            }
            return e.model.set(k, value);
        }
        if let Some(k) = key.strip_prefix("gradcheck.") {
            match k {
                "epsilon" => self.gradcheck_epsilon = num(key, value)?,
                "tolerance" => self.gradcheck_tolerance = num(key, value)?,
                "n_sequences" => self.gradcheck_sequences = num(key, value)?,
                "cell" | "include_time" | "vocab_size" | "rng_seed" => {
                    return Err(Error::Config(format!("{key} is fixed by the gradcheck command")))
                }
                _ => return self.gradcheck.set(k, value),
            }
            return Ok(());
        }
        match key {
            "seed" => self.seed = num(key, value)?,
            "threshold" => e.threshold = num(key, value)?,
            "min_frequency" => e.min_frequency = num(key, value)?,
            "methods" => e.methods = parse_methods(value)?,
            "ngram_top_k" => e.ngram_top_k = num(key, value)?,
            "forest.n_trees" => e.forest.n_trees = num(key, value)?,
            "forest.max_depth" => {
                e.forest.max_depth = match value.trim() {
                    "none" => None,
                    v => Some(num(key, v)?),
                }
            }
            "forest.max_features" => {
                e.forest.max_features = match value.trim() {
                    "auto" => None,
                    v => Some(num(key, v)?),
                }
            }
            "forest.min_samples_leaf" => e.forest.min_samples_leaf = num(key, value)?,
            "l1.lambda" => e.l1.lambda = num(key, value)?,
            "l1.tol" => e.l1.tol = num(key, value)?,
            "l1.max_iter" => e.l1.max_iter = num(key, value)?,
            "distance.sample_fraction" => self.distance_sample_fraction = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Copies the master seed into every seeded component and validates.
    pub fn finish(mut self) -> Result<RunConfig> {
        self.generator.rng_seed = self.seed;
        self.experiment.seed = self.seed;
        self.gradcheck.rng_seed = self.seed;
        self.generator.validate()?;
        let mut probe = self.experiment.model.clone();
        probe.vocab_size = 1;
        probe.validate()?;
        self.gradcheck.validate()?;
        let t = self.experiment.threshold;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("threshold {t} outside [0, 1]")));
        }
        if !(self.distance_sample_fraction > 0.0 && self.distance_sample_fraction <= 1.0) {
            return Err(Error::Config("distance.sample_fraction must be in (0, 1]".into()));
        }
        if self.gradcheck_sequences == 0 {
            return Err(Error::Config("gradcheck.n_sequences must be positive".into()));
        }
        Ok(self)
    }

    pub fn resolve(global: &GlobalArgs) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &global.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            for (k, v) in parse_key_values(&text)? {
                cfg.set(&k, &v)?;
            }
        }
        for kv in &global.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(seed) = global.seed {
            cfg.seed = seed;
        }
        cfg.finish()
    }

    /// Every key with its resolved value, one per line, sorted.
    pub fn to_text(&self) -> String {
        let e = &self.experiment;
        let mut m: BTreeMap<String, String> = BTreeMap::new();
        m.insert("seed".into(), self.seed.to_string());
        m.insert("threshold".into(), e.threshold.to_string());
        m.insert("min_frequency".into(), e.min_frequency.to_string());
        m.insert(
            "methods".into(),
            e.methods.iter().map(|x| x.slug()).collect::<Vec<_>>().join(","),
        );
        m.insert("ngram_top_k".into(), e.ngram_top_k.to_string());
        m.insert("forest.n_trees".into(), e.forest.n_trees.to_string());
        m.insert(
            "forest.max_depth".into(),
            e.forest.max_depth.map_or("none".into(), |d| d.to_string()),
        );
        m.insert(
            "forest.max_features".into(),
            e.forest.max_features.map_or("auto".into(), |d| d.to_string()),
        );
        m.insert("forest.min_samples_leaf".into(), e.forest.min_samples_leaf.to_string());
        m.insert("l1.lambda".into(), e.l1.lambda.to_string());
        m.insert("l1.tol".into(), e.l1.tol.to_string());
        m.insert("l1.max_iter".into(), e.l1.max_iter.to_string());
        m.insert("distance.sample_fraction".into(), self.distance_sample_fraction.to_string());
        m.insert("gradcheck.epsilon".into(), self.gradcheck_epsilon.to_string());
        m.insert("gradcheck.tolerance".into(), self.gradcheck_tolerance.to_string());
        m.insert("gradcheck.n_sequences".into(), self.gradcheck_sequences.to_string());
        let skip = ["cell", "include_time", "vocab_size", "rng_seed"];
        for (prefix, text) in [
            ("gen.", self.generator.to_text()),
            ("model.", self.experiment.model.to_text()),
            ("gradcheck.", self.gradcheck.to_text()),
        ] {
            for (k, v) in parse_key_values(&text).expect("own output parses") {
                if !skip.contains(&k.as_str()) {
                    m.insert(format!("{prefix}{k}"), v);
                }
            }
        }
        m.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Exit status and one-line error text for a failed command.
pub fn error_line(e: &Error) -> String {
    let msg = e.to_string().replace('\n', " ");
    let msg = msg
        .strip_prefix(&format!("{}: ", e.kind().replace('_', " ")))
        .unwrap_or(&msg);
    format!("error: {}: {msg}", e.kind())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        _ => 1,
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("no such file: {}", path.display())))
    }
}

fn out_dir(global: &GlobalArgs, required: bool) -> Result<Option<PathBuf>> {
    match &global.out {
        Some(d) => Ok(Some(d.clone())),
        None if required => Err(Error::Config("this command needs --out DIR".into())),
        None => Ok(None),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let c = read_corpus(path)?;
    if c.is_empty() {
        return Err(Error::InvalidInput(format!("{} contains no sessions", path.display())));
    }
    Ok(c)
}

pub const CONFIG_FILE: &str = "run.cfg";
pub const SPLIT_FILE: &str = "split.json";
pub const TRAIN_METRICS_FILE: &str = "train_metrics.json";
pub const MODEL_EXT: &str = "model";

/// Runs one command, writing the human-readable report to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    // Check inputs before any computation.
    let cfg = RunConfig::resolve(&cli.global)?;
    match &cli.command {
        Command::Generate => out_dir(&cli.global, true).map(|_| ())?,
        Command::Ingest { paths } => {
            if paths.is_empty() {
                return Err(Error::Config("ingest needs at least one corpus file".into()));
            }
            paths.iter().try_for_each(|p| require_file(p))?
        }
        Command::Stats { corpus } => require_file(corpus)?,
        Command::Train { corpus } => {
            require_file(corpus)?;
            out_dir(&cli.global, true)?;
        }
        Command::Evaluate { models, corpus } => {
            require_file(corpus)?;
            require_file(&models.join(SPLIT_FILE))?;
        }
        Command::Infer { model, corpus } | Command::BiasReport { calls: model, corpus } => {
            require_file(model)?;
            require_file(corpus)?;
        }
        Command::Gradcheck => {}
    }
    log::info!("resolved configuration:\n{}", cfg.to_text());
    let out = out_dir(&cli.global, false)?;
    if let Some(d) = &out {
        create_dir(d)?;
        write_file(&d.join(CONFIG_FILE), cfg.to_text())?;
    }
    match &cli.command {
        Command::Generate => cmd_generate(&cfg, out.as_deref().expect("checked"), stdout),
        Command::Ingest { paths } => cmd_ingest(paths, out.as_deref(), stdout),
        Command::Stats { corpus } => cmd_stats(&cfg, corpus, out.as_deref(), stdout),
        Command::Train { corpus } => cmd_train(&cfg, corpus, out.as_deref().expect("checked"), stdout),
        Command::Evaluate { models, corpus } => cmd_evaluate(&cfg, models, corpus, out.as_deref(), stdout),
        Command::Infer { model, corpus } => cmd_infer(&cfg, model, corpus, out.as_deref(), stdout),
        Command::BiasReport { calls, corpus } => cmd_bias_report(calls, corpus, out.as_deref(), stdout),
        Command::Gradcheck => cmd_gradcheck(&cfg, stdout),
    }
}

pub fn cmd_generate(cfg: &RunConfig, out: &Path, stdout: &mut dyn Write) -> Result<()> {
    let (corpus, truth) = generate(&cfg.generator)?;
    let mut buf = Vec::new();
    write_sessions(&corpus, Format::Jsonl, &mut buf)?;
    write_file(&out.join("corpus.jsonl"), buf)?;
    let mut buf = Vec::new();
    truth.write(&mut buf)?;
    write_file(&out.join("ground_truth.json"), buf)?;
    writeln!(
        stdout,
        "generated {} sessions ({} labeled) into {}",
        corpus.len(),
        corpus.labeled().count(),
        out.display()
    )?;
    Ok(())
}

pub fn cmd_ingest(paths: &[PathBuf], out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let mut all = Vec::new();
    for p in paths {
        let c = read_corpus(p)?;
        let utts: usize = c.sessions().iter().map(|s| s.utterances().len()).sum();
        writeln!(
            stdout,
            "{}: {} sessions, {} labeled, {} utterances",
            p.display(),
            c.len(),
            c.labeled().count(),
            utts
        )?;
        all.extend(c.into_sessions());
    }
    let merged = Corpus::from_sessions(all)?;
    writeln!(stdout, "total: {} sessions, {} labeled", merged.len(), merged.labeled().count())?;
    if let Some(d) = out {
        let mut buf = Vec::new();
        write_sessions(&merged, Format::Jsonl, &mut buf)?;
        write_file(&d.join("corpus.jsonl"), buf)?;
    }
    Ok(())
}

fn summary_row(name: &str, s: Option<Summary>) -> String {
    match s {
        Some(s) => format!("{name:<22} {:>10.2} {:>10.2} {:>10.2} {:>10.2}\n", s.mean, s.min, s.median, s.max),
        None => format!("{name:<22} {:>10} {:>10} {:>10} {:>10}\n", "-", "-", "-", "-"),
    }
}

pub fn cmd_stats(cfg: &RunConfig, path: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(path)?;
    let st = corpus_stats(&corpus);
    let mut gaps: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for s in corpus.sessions() {
        for (responder, gap) in turn_gaps(&consolidate_turns(s)) {
            let key = match responder {
                Speaker::Agent => "agent",
                Speaker::Customer => "customer",
            };
            gaps.entry(key).or_default().push(gap);
        }
    }
    let mut text = format!(
        "sessions {}  labeled {} ({:.2}%)\n\n{:<22} {:>10} {:>10} {:>10} {:>10}\n",
        st.sessions,
        st.labeled,
        100.0 * st.labeled_fraction,
        "",
        "mean",
        "min",
        "median",
        "max"
    );
    text += &summary_row("duration (min)", st.duration_minutes);
    text += &summary_row("utterances", st.utterances);
    text += &summary_row("words", st.words);
    text += &summary_row("agent gap (s)", gaps.get("agent").and_then(|g| Summary::of(g)));
    text += &summary_row("customer gap (s)", gaps.get("customer").and_then(|g| Summary::of(g)));
    text += "\nrating  count\n";
    for (i, c) in st.rating_histogram.iter().enumerate() {
        text += &format!("{:<7} {c}\n", i + 1);
    }
    if let Some(m) = st.mean_rating {
        text += &format!("mean rating {m:.3}\n");
    }
    let labeled: Vec<_> = corpus.labeled().collect();
    let distances = rating_distance_analysis(&labeled, cfg.distance_sample_fraction, cfg.seed);
    match &distances {
        Ok(d) => {
            text += &format!("\ncosine distance from Average ({} sampled sessions)\n", d.sample_size);
            for (name, v) in &d.distances {
                text += &format!("{name:<17} {v:.4}\n");
            }
        }
        Err(e) => text += &format!("\ncosine distances skipped: {e}\n"),
    }
    write!(stdout, "{text}")?;
    if let Some(d) = out {
        let json = serde_json::json!({
            "corpus": st,
            "gaps": gaps.iter().map(|(k, g)| (k.to_string(), Summary::of(g))).collect::<BTreeMap<_, _>>(),
            "rating_distances": distances.ok(),
        });
        write_file(&d.join("stats.json"), serde_json::to_string_pretty(&json)? + "\n")?;
        write_file(&d.join("stats.txt"), text)?;
    }
    Ok(())
}

fn model_path(dir: &Path, method: Method) -> PathBuf {
    dir.join(format!("{}.{MODEL_EXT}", method.slug()))
}

pub fn cmd_train(cfg: &RunConfig, path: &Path, out: &Path, stdout: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(path)?;
    let set = train_methods(&corpus, &cfg.experiment)?;
    write_file(&out.join(SPLIT_FILE), serde_json::to_string_pretty(&set.split)? + "\n")?;
    // Metrics of each final model on every labeled session it was built from.
    let labeled: Vec<_> = corpus.labeled().collect();
    let labels: Vec<u8> = labeled.iter().map(|s| s.label().expect("labeled")).collect();
    let mut train_metrics = BTreeMap::new();
    for m in &set.models {
        let method = m.method();
        m.save(&model_path(out, method))?;
        let probs = crate::eval::SessionClassifier::predict_proba(m, &labeled)?;
        let metrics = compute_metrics(&threshold_calls(&probs, cfg.experiment.threshold), &labels)?;
        writeln!(stdout, "{:<10} labeled-corpus F1 {:.4}", method.name(), metrics.f1)?;
        train_metrics.insert(method.slug(), metrics);
    }
    write_file(&out.join(TRAIN_METRICS_FILE), serde_json::to_string_pretty(&train_metrics)? + "\n")?;
    Ok(())
}

/// Models found in `dir`, in table order.
pub fn load_models(dir: &Path) -> Result<Vec<TrainedModel>> {
    let mut out = Vec::new();
    for m in Method::ALL {
        let p = model_path(dir, m);
        if p.is_file() {
            out.push(TrainedModel::load(&p)?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!("no model files in {}", dir.display())));
    }
    Ok(out)
}

pub fn cmd_evaluate(
    cfg: &RunConfig,
    models_dir: &Path,
    path: &Path,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let corpus = load_corpus(path)?;
    let split: Split = serde_json::from_str(&fs::read_to_string(models_dir.join(SPLIT_FILE))?)?;
    let models = load_models(models_dir)?;
    let report = evaluate(&models, &corpus, &split, cfg.experiment.threshold)?;
    let table = report.to_table();
    write!(stdout, "{table}")?;
    if let Some(d) = out {
        write_file(&d.join("report.txt"), &table)?;
        write_file(&d.join("report.json"), report.to_json()?)?;
    }
    Ok(())
}

pub fn cmd_infer(cfg: &RunConfig, model: &Path, path: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(path)?;
    let m = TrainedModel::load(model)?;
    let sessions: Vec<_> = corpus.sessions().iter().collect();
    let calls = infer_unlabeled(&m, &sessions, cfg.experiment.threshold)?;
    let positive = calls.iter().filter(|c| c.call == 1).count();
    match out {
        Some(d) => {
            let mut buf = Vec::new();
            write_calls(&calls, &mut buf)?;
            write_file(&d.join("calls.tsv"), buf)?;
            writeln!(stdout, "{}: {positive} of {} sessions called dissatisfied", m.method(), calls.len())?;
        }
        None => write_calls(&calls, stdout)?,
    }
    Ok(())
}

pub fn cmd_bias_report(calls: &Path, path: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(path)?;
    let calls = read_calls(std::io::BufReader::new(fs::File::open(calls)?))?;
    let report = bias_report(&corpus, &calls)?;
    let text = report.to_text();
    write!(stdout, "{text}")?;
    if let Some(d) = out {
        write_file(&d.join("bias.txt"), &text)?;
        write_file(&d.join("bias.json"), report.to_json()?)?;
        write_file(&d.join("bias.svg"), report.to_svg())?;
    }
    Ok(())
}

pub fn cmd_gradcheck(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let mut worst: f64 = 0.0;
    for cell in CellType::ALL {
        let mc = ModelConfig {
            cell,
            include_time: true,
            ..cfg.gradcheck.clone()
        };
        let batch = random_batch(&mc, cfg.gradcheck_sequences, cfg.seed);
        let r = gradient_check(&mc, &batch, cfg.gradcheck_epsilon)?;
        writeln!(
            stdout,
            "{:<9} max relative error {:.3e} over {} entries (worst {})",
            cell.as_str(),
            r.max_rel_error,
            r.checked,
            r.worst
        )?;
        worst = worst.max(r.max_rel_error);
    }
    writeln!(stdout, "max relative error {worst:.3e} (tolerance {:.0e})", cfg.gradcheck_tolerance)?;
    if worst < cfg.gradcheck_tolerance {
        writeln!(stdout, "PASS")?;
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "gradient check failed: {worst:.3e} >= {}",
            cfg.gradcheck_tolerance
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn global(set: &[&str]) -> GlobalArgs {
        GlobalArgs {
            config: None,
            set: set.iter().map(|s| s.to_string()).collect(),
            seed: None,
            out: None,
        }
    }

    #[test]
    fn resolved_text_round_trips() {
        let cfg = RunConfig::resolve(&global(&[
            "seed=7",
            "methods=lstm_time,valence",
            "model.hidden_dim=16",
            "gen.turns_range=4..=9",
            "forest.max_depth=6",
        ]))
        .unwrap();
        assert_eq!(cfg.experiment.model.hidden_dim, 16);
        assert_eq!(cfg.generator.rng_seed, 7);
        let mut again = RunConfig::default();
        for (k, v) in parse_key_values(&cfg.to_text()).unwrap() {
            again.set(&k, &v).unwrap();
        }
        assert_eq!(again.finish().unwrap(), cfg);
    }

    #[test]
    fn unknown_and_bad_keys_rejected() {
        for bad in ["nope=1", "model.bogus=1", "gen.rng_seed=3", "threshold=x", "model.cell=gru", "threshold=2"] {
            let e = RunConfig::resolve(&global(&[bad])).unwrap_err();
            assert_eq!(e.kind(), "config", "{bad}");
        }
        assert!(RunConfig::resolve(&global(&["noequals"])).is_err());
    }

    #[test]
    fn error_lines_are_single_line() {
        let e = Error::Config("a\nb".into());
        assert_eq!(error_line(&e), "error: config: a b");
        assert_eq!(exit_code(&e), 2);
    }
}
