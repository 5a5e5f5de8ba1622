//! Subcommands. Each resolves its run directory from the config digest and
//! seed, reuses upstream artifacts already present there (validating them on
//! the way in) and regenerates missing ones, so any command can run first.
//!
//! Every command prints one `key=value` summary line on stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use skillxfer_core::bayes::{accuracy, fit_cpts, learn_structure};
use skillxfer_core::behavior::{split, to_dataset, DataSet, PlayerId, SessionLog};
use skillxfer_core::game::{run_session, PlayerProfile};
use skillxfer_core::rng::{derive_seed, purpose};
use skillxfer_core::transfer::{discriminative_attributes, run_transfer, trace_curves, TerminalReason, TransferTrace};

use crate::config::{load_config, ExperimentConfig};
use crate::formats::{dataset, network, profile, sessions, trace, read_file, write_file};
use crate::{CliError, Result};

/// Iteration counter used for the standalone (non-loop) commands; the
/// transfer loop numbers its iterations from 1.
const STANDALONE: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "skillxfer", version, about = "Simulated expert/learner behavior identification and transfer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one session per player and write JSONL logs.
    Simulate(Flags),
    /// Window the session logs into a CSV dataset.
    Dataset(Flags),
    /// Learn a classifier network and report held-out accuracy.
    Identify(Flags),
    /// Run the closed transfer loop; write the trace and curves.
    Transfer(Flags),
    /// Summarize the transfer trace of a run.
    Report(Flags),
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Base output directory; overrides the config's `output_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress stdout.
    #[arg(long)]
    pub quiet: bool,
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Simulate(f)
            | Command::Dataset(f)
            | Command::Identify(f)
            | Command::Transfer(f)
            | Command::Report(f) => f,
        }
    }
}

/// What a successful command produced.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub run_dir: PathBuf,
    /// Set when the command completed but its result is anomalous.
    pub anomaly: Option<String>,
}

pub fn run(command: &Command) -> Result<Outcome> {
    let run = Run::prepare(command.flags())?;
    let (stdout, anomaly) = match command {
        Command::Simulate(_) => (run.simulate()?, None),
        Command::Dataset(_) => (run.dataset()?, None),
        Command::Identify(_) => (run.identify()?, None),
        Command::Transfer(_) => run.transfer()?,
        Command::Report(_) => (run.report()?, None),
    };
    Ok(Outcome {
        stdout,
        run_dir: run.dir,
        anomaly,
    })
}

struct Run {
    cfg: ExperimentConfig,
    expert: PlayerProfile,
    learner: PlayerProfile,
    seed: u64,
    dir: PathBuf,
}

impl Run {
    fn prepare(flags: &Flags) -> Result<Run> {
        let cfg = load_config(&flags.config)?;
        let (expert, learner) = cfg.profiles()?;
        let seed = flags.seed.unwrap_or(cfg.seed);
        let dir = dir_for(&cfg, flags, &expert, &learner, seed);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let run = Run {
            cfg,
            expert,
            learner,
            seed,
            dir,
        };
        let resolved = ExperimentConfig {
            seed,
            ..run.cfg.clone()
        };
        run.write("config.json", &resolved.to_json())?;
        run.write("expert.json", &profile::write_profile(&run.expert))?;
        run.write("learner.json", &profile::write_profile(&run.learner))?;
        Ok(run)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        write_file(&self.path(name), contents.as_bytes())
    }

    fn session_file(player: PlayerId) -> String {
        format!("session-{player}.jsonl")
    }

    fn session_seed(&self, player: PlayerId) -> u64 {
        let p = match player {
            PlayerId::Id1 => purpose::EXPERT_SESSION,
            PlayerId::Id2 => purpose::LEARNER_SESSION,
        };
        derive_seed(self.seed, STANDALONE, p)
    }

    fn play(&self) -> Result<Vec<SessionLog>> {
        let mut logs = Vec::new();
        for (player, prof) in [(PlayerId::Id1, &self.expert), (PlayerId::Id2, &self.learner)] {
            let log = run_session(&self.cfg.scenario, prof, player, self.session_seed(player))?;
            self.write(&Self::session_file(player), &sessions::write_jsonl(&log.records))?;
            logs.push(log);
        }
        Ok(logs)
    }

    fn logs(&self) -> Result<Vec<SessionLog>> {
        let files = PlayerId::ALL.map(|p| self.path(&Self::session_file(p)));
        if !files.iter().all(|f| f.is_file()) {
            return self.play();
        }
        PlayerId::ALL
            .into_iter()
            .zip(&files)
            .map(|(player, f)| {
                let records = sessions::read_jsonl(&read_file(f)?)
                    .map_err(|e| CliError::data(format!("{}: {e}", f.display())))?;
                sessions::to_session(records, player, self.session_seed(player), &self.cfg.scenario.scenario_id)
                    .map_err(|e| CliError::data(format!("{}: {e}", f.display())))
            })
            .collect()
    }

    fn data(&self) -> Result<DataSet> {
        let f = self.path("dataset.csv");
        if f.is_file() {
            return dataset::read_csv(&read_file(&f)?)
                .map_err(|e| CliError::data(format!("{}: {e}", f.display())));
        }
        let ds = to_dataset(&self.logs()?, self.cfg.window)?;
        self.write("dataset.csv", &dataset::write_csv(&ds))?;
        Ok(ds)
    }

    fn simulate(&self) -> Result<String> {
        let logs = self.play()?;
        Ok(format!(
            "command=simulate seed={} ticks={} id1_records={} id2_records={} run_dir={}\n",
            self.seed,
            self.cfg.scenario.ticks_per_session,
            logs[0].len(),
            logs[1].len(),
            self.dir.display()
        ))
    }

    fn dataset(&self) -> Result<String> {
        let ds = self.data()?;
        let counts = ds.value_counts(ds.n_vars() - 1);
        Ok(format!(
            "command=dataset seed={} window={} rows={} id1_rows={} id2_rows={} run_dir={}\n",
            self.seed,
            self.cfg.window,
            ds.n_rows(),
            counts[0],
            counts[1],
            self.dir.display()
        ))
    }

    fn identify(&self) -> Result<String> {
        let ds = self.data()?;
        let (train, test) = split(&ds, self.cfg.split_ratio, derive_seed(self.seed, STANDALONE, purpose::SPLIT))?;
        let learn = self.cfg.learn_config(derive_seed(self.seed, STANDALONE, purpose::LEARN));
        let dag = learn_structure(&train, &learn)?;
        let bn = fit_cpts(&dag, &train, learn.smoothing)?;
        let acc = accuracy(&bn, &test)?;
        let selected: Vec<&str> = discriminative_attributes(&bn).iter().map(|a| a.name()).collect();
        self.write("network.json", &network::write_json(&bn))?;
        // the file omits run_dir so that repeated runs compare equal
        let line = format!(
            "command=identify seed={} accuracy={acc} train_rows={} test_rows={} edges={} attributes={}",
            self.seed,
            train.n_rows(),
            test.n_rows(),
            dag.n_edges(),
            selected.join(";"),
        );
        self.write("identify.txt", &format!("{line}\n"))?;
        Ok(format!("{line} run_dir={}\n", self.dir.display()))
    }

    fn transfer(&self) -> Result<(String, Option<String>)> {
        let t = run_transfer(&self.expert, &self.learner, &self.cfg.transfer_config(), self.seed)?;
        self.write("trace.csv", &trace::write_trace_csv(&t))?;
        self.write("trace.json", &trace::write_trace_json(&t))?;
        self.write("curves.csv", &trace::write_curves_csv(&trace_curves(&t)))?;
        let anomaly = (t.terminal_reason == TerminalReason::MaxIterations).then(|| {
            format!(
                "transfer did not reach the stop threshold within {} iterations",
                self.cfg.max_iterations
            )
        });
        Ok((format!("command=transfer {} run_dir={}\n", trace_fields(&t), self.dir.display()), anomaly))
    }

    fn report(&self) -> Result<String> {
        let f = self.path("trace.json");
        if !f.is_file() {
            return Err(CliError::data(format!("{} not found; run `transfer` first", f.display())));
        }
        let t = trace::read_trace_json(&read_file(&f)?)
            .map_err(|e| CliError::data(format!("{}: {e}", f.display())))?;
        let text = render_report(&t);
        self.write("report.txt", &text)?;
        Ok(text)
    }
}

fn trace_fields(t: &TransferTrace) -> String {
    let first = &t.iterations[0];
    let last = t.iterations.last().expect("trace has an iteration");
    format!(
        "seed={} iterations={} terminal_reason={} initial_accuracy={} final_accuracy={} initial_divergence={} final_divergence={}",
        t.seed,
        t.iterations.len(),
        t.terminal_reason.name(),
        first.accuracy,
        last.accuracy,
        first.divergence,
        last.divergence
    )
}

/// Human-readable summary of a trace; the last line is the usual
/// `key=value` summary.
pub fn render_report(t: &TransferTrace) -> String {
    let mut s = String::new();
    writeln!(s, "transfer of {} toward {}", t.iterations[0].learner.profile_id(), t.expert.profile_id()).unwrap();
    writeln!(s, "{:>9}  {:>8}  {:>10}  {:<40}  nudged", "iteration", "accuracy", "divergence", "targeted").unwrap();
    for r in &t.iterations {
        let targeted: Vec<&str> = r.targeted.iter().map(|a| a.name()).collect();
        let nudged: Vec<&str> = r.nudged_keys.iter().map(|k| k.name()).collect();
        writeln!(
            s,
            "{:>9}  {:>8.4}  {:>10.6}  {:<40}  {}",
            r.iteration,
            r.accuracy,
            r.divergence,
            targeted.join(","),
            if nudged.is_empty() { "-".to_string() } else { nudged.join(",") }
        )
        .unwrap();
    }
    writeln!(s, "command=report {}", trace_fields(t)).unwrap();
    s
}

/// Path of the run directory a command with these flags would use.
pub fn run_dir(flags: &Flags) -> Result<PathBuf> {
    let cfg = load_config(&flags.config)?;
    let (e, l) = cfg.profiles()?;
    Ok(dir_for(&cfg, flags, &e, &l, flags.seed.unwrap_or(cfg.seed)))
}

fn dir_for(cfg: &ExperimentConfig, flags: &Flags, e: &PlayerProfile, l: &PlayerProfile, seed: u64) -> PathBuf {
    let base = flags.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    base.join(format!("{}-s{seed}", cfg.digest(e, l)))
}
