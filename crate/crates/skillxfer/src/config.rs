//! The experiment configuration document.
//!
//! A single JSON object; every key is optional and takes the default shown:
//!
//! ```json
//! {
//!   "seed": 0,
//!   "output_dir": "runs",
//!   "scenario": {
//!     "scenario_id": "default",
//!     "ticks_per_session": 2000,
//!     "probabilities": {
//!       "location_indoor": 0.5, "obstacle_present": 0.8, "soldier_present": 0.8,
//!       "civilian_present": 0.8, "horse_available": 0.8, "climbable_present": 0.8,
//!       "person_facing": 0.8
//!     }
//!   },
//!   "profiles": { "linkage_strength": 0.7, "expert": "table1", "learner": "table1" },
//!   "dataset": { "window": 5, "split_ratio": 0.5 },
//!   "learn": { "max_parents": 3, "smoothing": 1.0, "restarts": 5 },
//!   "transfer": {
//!     "learning_rate": 0.5, "stop_threshold": 0.55, "max_iterations": 50,
//!     "fixed_split_seed": null
//!   }
//! }
//! ```
//!
//! A profile source is `"table1"`, `{"file": "path.json"}` (relative to the
//! config file), or for the learner also `"expert"` (start as a copy of the
//! expert). Unknown keys are rejected and every violation is reported.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use skillxfer_core::bayes::LearnConfig;
use skillxfer_core::behavior::{Stimulus, DEFAULT_SPLIT_RATIO, DEFAULT_WINDOW};
use skillxfer_core::game::{
    table1_profiles_with_strength, PlayerProfile, Scenario, DEFAULT_LINKAGE_STRENGTH,
};
use skillxfer_core::transfer::TransferConfig;

use crate::formats::profile::{read_profile, write_profile};
use crate::{CliError, ConfigViolation, Result};

pub const DEFAULT_OUTPUT_DIR: &str = "runs";

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Table1,
    /// Learner only: start from the expert's profile.
    Expert,
    File(PathBuf),
}

impl ProfileSource {
    fn to_json(&self) -> Value {
        match self {
            ProfileSource::Table1 => json!("table1"),
            ProfileSource::Expert => json!("expert"),
            ProfileSource::File(p) => json!({ "file": p.to_string_lossy() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub scenario: Scenario,
    pub linkage_strength: f64,
    pub expert: ProfileSource,
    pub learner: ProfileSource,
    pub window: usize,
    pub split_ratio: f64,
    pub max_parents: usize,
    pub smoothing: f64,
    pub restarts: usize,
    pub learning_rate: f64,
    pub stop_threshold: f64,
    pub max_iterations: usize,
    pub fixed_split_seed: Option<u64>,
    /// Directory relative profile paths resolve against; not serialized.
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let t = TransferConfig::default();
        ExperimentConfig {
            seed: 0,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            scenario: Scenario::default(),
            linkage_strength: DEFAULT_LINKAGE_STRENGTH,
            expert: ProfileSource::Table1,
            learner: ProfileSource::Table1,
            window: DEFAULT_WINDOW,
            split_ratio: DEFAULT_SPLIT_RATIO,
            max_parents: t.learn.max_parents,
            smoothing: t.learn.smoothing,
            restarts: t.learn.restarts,
            learning_rate: t.learning_rate,
            stop_threshold: t.stop_threshold,
            max_iterations: t.max_iterations,
            fixed_split_seed: None,
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn learn_config(&self, seed: u64) -> LearnConfig {
        LearnConfig {
            max_parents: self.max_parents,
            smoothing: self.smoothing,
            restarts: self.restarts,
            seed,
        }
    }

    pub fn transfer_config(&self) -> TransferConfig {
        TransferConfig {
            learning_rate: self.learning_rate,
            stop_threshold: self.stop_threshold,
            max_iterations: self.max_iterations,
            scenario: self.scenario.clone(),
            window: self.window,
            split_ratio: self.split_ratio,
            fixed_split_seed: self.fixed_split_seed,
            learn: self.learn_config(0),
        }
    }

    /// The full document with every default made explicit.
    pub fn to_value(&self) -> Value {
        let p = &self.scenario.probabilities;
        let probabilities: Map<String, Value> = Stimulus::ALL
            .iter()
            .map(|&f| (f.field_name().to_string(), json!(p.get(f))))
            .collect();
        json!({
            "seed": self.seed,
            "output_dir": self.output_dir.to_string_lossy(),
            "scenario": {
                "scenario_id": self.scenario.scenario_id,
                "ticks_per_session": self.scenario.ticks_per_session,
                "probabilities": probabilities,
            },
            "profiles": {
                "linkage_strength": self.linkage_strength,
                "expert": self.expert.to_json(),
                "learner": self.learner.to_json(),
            },
            "dataset": { "window": self.window, "split_ratio": self.split_ratio },
            "learn": {
                "max_parents": self.max_parents,
                "smoothing": self.smoothing,
                "restarts": self.restarts,
            },
            "transfer": {
                "learning_rate": self.learning_rate,
                "stop_threshold": self.stop_threshold,
                "max_iterations": self.max_iterations,
                "fixed_split_seed": self.fixed_split_seed,
            },
        })
    }

    pub fn to_json(&self) -> String {
        crate::formats::to_json(&self.to_value())
    }

    /// Loads the expert and initial learner profiles.
    pub fn profiles(&self) -> Result<(PlayerProfile, PlayerProfile)> {
        let table1 = || {
            table1_profiles_with_strength(self.linkage_strength)
                .map_err(|e| CliError::config("profiles.linkage_strength", e.to_string()))
        };
        let load = |path: &Path, at: &str| -> Result<PlayerProfile> {
            let full = self.base_dir.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| CliError::config(at, format!("{}: {e}", full.display())))?;
            read_profile(&text).map_err(|e| CliError::config(at, e.to_string()))
        };
        let expert = match &self.expert {
            ProfileSource::Table1 => table1()?.0,
            ProfileSource::File(p) => load(p, "profiles.expert.file")?,
            ProfileSource::Expert => return Err(CliError::config("profiles.expert", "cannot copy itself")),
        };
        let learner = match &self.learner {
            ProfileSource::Table1 => table1()?.1,
            ProfileSource::Expert => {
                let mut l = expert.clone();
                l.set_profile_id(format!("{}-copy", expert.profile_id()));
                l
            }
            ProfileSource::File(p) => load(p, "profiles.learner.file")?,
        };
        Ok((expert, learner))
    }

    /// Short digest of everything that determines a run's outputs except
    /// the seed and output location: the explicit config and both profiles.
    pub fn digest(&self, expert: &PlayerProfile, learner: &PlayerProfile) -> String {
        let mut v = self.to_value();
        let obj = v.as_object_mut().expect("config is an object");
        obj.remove("seed");
        obj.remove("output_dir");
        let mut h = Sha256::new();
        h.update(v.to_string());
        h.update(write_profile(expert));
        h.update(write_profile(learner));
        h.finalize()[..6].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("", format!("cannot read {}: {e}", path.display())))?;
    let base = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    parse_config(&text, base)
}

/// Parses a configuration document; an empty document yields the defaults.
/// Relative profile paths must exist under `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let value: Value = if text.trim().is_empty() {
        Value::Object(Map::new())
    } else {
        serde_json::from_str(text).map_err(|e| CliError::config("", format!("not valid JSON: {e}")))?
    };
    let mut c = Checker::default();
    let mut cfg = ExperimentConfig {
        base_dir: base_dir.to_path_buf(),
        ..Default::default()
    };
    let d = ExperimentConfig::default();

    let Some(root) = c.object(&value, "", &[
        "seed", "output_dir", "scenario", "profiles", "dataset", "learn", "transfer",
    ]) else {
        return Err(c.into_error());
    };
    cfg.seed = c.integer(root, "", "seed", d.seed, 0);
    cfg.output_dir = PathBuf::from(c.string(root, "", "output_dir", DEFAULT_OUTPUT_DIR));

    let empty = Value::Object(Map::new());
    let sc = root.get("scenario").unwrap_or(&empty);
    if let Some(o) = c.object(sc, "scenario", &["scenario_id", "ticks_per_session", "probabilities"]) {
        cfg.scenario.scenario_id = c.string(o, "scenario", "scenario_id", &d.scenario.scenario_id);
        cfg.scenario.ticks_per_session =
            c.integer(o, "scenario", "ticks_per_session", d.scenario.ticks_per_session, 1);
        let names: Vec<&str> = Stimulus::ALL.iter().map(|f| f.field_name()).collect();
        let pv = o.get("probabilities").unwrap_or(&empty);
        if let Some(po) = c.object(pv, "scenario.probabilities", &names) {
            for f in Stimulus::ALL {
                let p = c.number(
                    po,
                    "scenario.probabilities",
                    f.field_name(),
                    d.scenario.probabilities.get(f),
                    |x| (0.0..=1.0).contains(&x),
                    "must be in [0, 1]",
                );
                cfg.scenario.probabilities.set(f, p);
            }
        }
    }

    let pr = root.get("profiles").unwrap_or(&empty);
    if let Some(o) = c.object(pr, "profiles", &["linkage_strength", "expert", "learner"]) {
        cfg.linkage_strength = c.number(
            o,
            "profiles",
            "linkage_strength",
            d.linkage_strength,
            |x| (0.0..=1.0).contains(&x),
            "must be in [0, 1]",
        );
        cfg.expert = c.source(o, "expert", false, base_dir);
        cfg.learner = c.source(o, "learner", true, base_dir);
    }

    let ds = root.get("dataset").unwrap_or(&empty);
    if let Some(o) = c.object(ds, "dataset", &["window", "split_ratio"]) {
        cfg.window = c.integer(o, "dataset", "window", d.window as u64, 1) as usize;
        cfg.split_ratio = c.number(
            o,
            "dataset",
            "split_ratio",
            d.split_ratio,
            |x| x > 0.0 && x < 1.0,
            "must be in (0, 1)",
        );
    }

    let lv = root.get("learn").unwrap_or(&empty);
    if let Some(o) = c.object(lv, "learn", &["max_parents", "smoothing", "restarts"]) {
        cfg.max_parents = c.integer(o, "learn", "max_parents", d.max_parents as u64, 1) as usize;
        cfg.smoothing = c.number(
            o,
            "learn",
            "smoothing",
            d.smoothing,
            |x| x > 0.0 && x.is_finite(),
            "must be positive",
        );
        cfg.restarts = c.integer(o, "learn", "restarts", d.restarts as u64, 0) as usize;
    }

    let tv = root.get("transfer").unwrap_or(&empty);
    if let Some(o) = c.object(
        tv,
        "transfer",
        &["learning_rate", "stop_threshold", "max_iterations", "fixed_split_seed"],
    ) {
        cfg.learning_rate = c.number(
            o,
            "transfer",
            "learning_rate",
            d.learning_rate,
            |x| x > 0.0 && x <= 1.0,
            "must be in (0, 1]",
        );
        cfg.stop_threshold = c.number(
            o,
            "transfer",
            "stop_threshold",
            d.stop_threshold,
            |x| (0.5..1.0).contains(&x),
            "must be in [0.5, 1)",
        );
        cfg.max_iterations =
            c.integer(o, "transfer", "max_iterations", d.max_iterations as u64, 1) as usize;
        cfg.fixed_split_seed = match o.get("fixed_split_seed") {
            None | Some(Value::Null) => None,
            Some(_) => Some(c.integer(o, "transfer", "fixed_split_seed", 0, 0)),
        };
    }

    if c.violations.is_empty() {
        if let Err(e) = cfg.transfer_config().validate() {
            c.push("", e.to_string());
        }
    }
    if c.violations.is_empty() {
        Ok(cfg)
    } else {
        Err(c.into_error())
    }
}

#[derive(Default)]
struct Checker {
    violations: Vec<ConfigViolation>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Checker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(ConfigViolation {
            path: path.into(),
            message: message.into(),
        });
    }

    fn into_error(self) -> CliError {
        CliError::Config(self.violations)
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(o) = v.as_object() else {
            self.push(path, "expected an object");
            return None;
        };
        for k in o.keys().filter(|k| !allowed.contains(&k.as_str())) {
            self.push(join(path, k), "unknown key");
        }
        Some(o)
    }

    fn number(
        &mut self,
        o: &Map<String, Value>,
        path: &str,
        key: &str,
        default: f64,
        ok: impl Fn(f64) -> bool,
        rule: &str,
    ) -> f64 {
        match o.get(key) {
            None => default,
            Some(v) => match v.as_f64() {
                Some(x) if ok(x) => x,
                Some(x) => {
                    self.push(join(path, key), format!("{x} {rule}"));
                    default
                }
                None => {
                    self.push(join(path, key), "expected a number");
                    default
                }
            },
        }
    }

    fn integer(&mut self, o: &Map<String, Value>, path: &str, key: &str, default: u64, min: u64) -> u64 {
        match o.get(key) {
            None => default,
            Some(v) => match v.as_u64() {
                Some(x) if x >= min => x,
                Some(x) => {
                    self.push(join(path, key), format!("{x} must be at least {min}"));
                    default
                }
                None => {
                    self.push(join(path, key), "expected a non-negative integer");
                    default
                }
            },
        }
    }

    fn string(&mut self, o: &Map<String, Value>, path: &str, key: &str, default: &str) -> String {
        match o.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            Some(_) => {
                self.push(join(path, key), "expected a non-empty string");
                default.to_string()
            }
        }
    }

    fn source(&mut self, o: &Map<String, Value>, key: &str, learner: bool, base: &Path) -> ProfileSource {
        let path = join("profiles", key);
        let expected = if learner {
            "expected \"table1\", \"expert\" or {\"file\": path}"
        } else {
            "expected \"table1\" or {\"file\": path}"
        };
        match o.get(key) {
            None => ProfileSource::Table1,
            Some(Value::String(s)) if s == "table1" => ProfileSource::Table1,
            Some(Value::String(s)) if learner && s == "expert" => ProfileSource::Expert,
            Some(Value::Object(m)) if m.len() == 1 && m.get("file").is_some_and(Value::is_string) => {
                let file = PathBuf::from(m["file"].as_str().unwrap());
                if !base.join(&file).is_file() {
                    self.push(join(&path, "file"), format!("{} does not exist", file.display()));
                }
                ProfileSource::File(file)
            }
            Some(_) => {
                self.push(path, expected);
                ProfileSource::Table1
            }
        }
    }
}
