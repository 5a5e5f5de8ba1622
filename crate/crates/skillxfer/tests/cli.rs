//! End-to-end runs of the `skillxfer` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use skillxfer::formats::{dataset, network, profile, sessions, trace};

const SMALL: &str = r#"{"scenario": {"ticks_per_session": 600}}"#;

fn skillxfer(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skillxfer"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn setup(config: &str) -> (tempfile::TempDir, PathBuf, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("runs");
    (dir, cfg, out)
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing from {line:?}"))
}

#[test]
fn identify_reports_accuracy_and_attributes() {
    let (_d, cfg, out) = setup("{}");
    let o = skillxfer(&["identify", "--seed", "1"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    let acc: f64 = field(&line, "accuracy").parse().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert!(acc > 0.7);
    let attrs = field(&line, "attributes");
    assert!(!attrs.is_empty());
    for a in attrs.split(';') {
        a.parse::<skillxfer_core::behavior::Attribute>().unwrap();
    }
    let run_dir = field(&line, "run_dir");
    assert!(run_dir.ends_with("-s1"));
}

#[test]
fn every_emitted_file_parses_back() {
    let (_d, cfg, out) = setup(SMALL);
    for c in ["simulate", "dataset", "identify", "transfer", "report"] {
        let o = skillxfer(&[c, "--seed", "2"], &cfg, &out);
        assert!(o.status.success(), "{c}: {}", stderr(&o));
    }
    let dir = fs::read_dir(&out).unwrap().next().unwrap().unwrap().path();
    let read = |name: &str| fs::read_to_string(dir.join(name)).unwrap();

    for p in ["ID1", "ID2"] {
        let recs = sessions::read_jsonl(&read(&format!("session-{p}.jsonl"))).unwrap();
        assert_eq!(recs.len(), 600);
        assert_eq!(sessions::write_jsonl(&recs), read(&format!("session-{p}.jsonl")));
    }
    let ds = dataset::read_csv(&read("dataset.csv")).unwrap();
    assert_eq!(ds.n_rows(), 240);
    assert_eq!(dataset::write_csv(&ds), read("dataset.csv"));
    let bn = network::read_json(&read("network.json")).unwrap();
    assert_eq!(network::write_json(&bn), read("network.json"));
    for p in ["expert.json", "learner.json"] {
        let prof = profile::read_profile(&read(p)).unwrap();
        assert_eq!(profile::write_profile(&prof), read(p));
    }
    let t = trace::read_trace_json(&read("trace.json")).unwrap();
    assert_eq!(trace::write_trace_json(&t), read("trace.json"));
    assert_eq!(trace::read_trace_csv(&read("trace.csv")).unwrap().len(), t.iterations.len());
    let curves = trace::read_curves_csv(&read("curves.csv")).unwrap();
    assert_eq!(trace::write_curves_csv(&curves), read("curves.csv"));
    let cfg_back = skillxfer::config::parse_config(&read("config.json"), &dir).unwrap();
    assert_eq!(cfg_back.seed, 2);
    assert!(read("report.txt").lines().last().unwrap().starts_with("command=report "));
}

#[test]
fn copying_the_expert_stops_after_one_iteration() {
    let (_d, cfg, out) = setup(r#"{"profiles": {"learner": "expert"}}"#);
    let o = skillxfer(&["transfer", "--seed", "4"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o);
    assert_eq!(field(&line, "iterations"), "1");
    assert_eq!(field(&line, "terminal_reason"), "threshold_reached");
    let dir = PathBuf::from(field(&line, "run_dir"));
    let rows = trace::read_trace_csv(&fs::read_to_string(dir.join("trace.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
}

#[test]
fn simulate_is_repeatable_and_seeded() {
    let (d, cfg, out) = setup(SMALL);
    let other = d.path().join("again");
    let a = skillxfer(&["simulate", "--seed", "9"], &cfg, &out);
    let b = skillxfer(&["simulate", "--seed", "9"], &cfg, &other);
    let c = skillxfer(&["simulate", "--seed", "10"], &cfg, &other);
    assert!(a.status.success() && b.status.success() && c.status.success());
    let dir = |o: &Output| PathBuf::from(field(&stdout(o), "run_dir"));
    for f in ["session-ID1.jsonl", "session-ID2.jsonl", "config.json"] {
        assert_eq!(fs::read(dir(&a).join(f)).unwrap(), fs::read(dir(&b).join(f)).unwrap());
    }
    assert_ne!(
        fs::read(dir(&a).join("session-ID1.jsonl")).unwrap(),
        fs::read(dir(&c).join("session-ID1.jsonl")).unwrap()
    );
    assert_eq!(dir(&a).file_name(), dir(&b).file_name());
}

#[test]
fn seed_defaults_to_the_config() {
    let (_d, cfg, out) = setup(r#"{"seed": 77, "scenario": {"ticks_per_session": 100}}"#);
    let o = skillxfer(&["simulate"], &cfg, &out);
    assert!(stdout(&o).contains("seed=77"));
    assert!(field(&stdout(&o), "run_dir").ends_with("-s77"));
}

#[test]
fn quiet_suppresses_stdout() {
    let (_d, cfg, out) = setup(SMALL);
    let o = skillxfer(&["simulate", "--quiet"], &cfg, &out);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn invalid_config_exits_2_listing_every_field() {
    let (_d, cfg, out) = setup(r#"{"transfer": {"learning_rate": 1.5}, "dataset": {"window": 0}, "bogus": true}"#);
    let o = skillxfer(&["simulate"], &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 3, "{err}");
    assert!(lines.iter().all(|l| l.starts_with("error[config]: ")));
    assert!(err.contains("transfer.learning_rate"));
    assert!(err.contains("dataset.window"));
    assert!(err.contains("bogus: unknown key"));
    assert!(!out.exists());
}

#[test]
fn missing_config_and_profile_files_are_config_errors() {
    let (d, _cfg, out) = setup("{}");
    let o = skillxfer(&["simulate"], &d.path().join("nope.json"), &out);
    assert_eq!(o.status.code(), Some(2));
    let (_d, cfg, out) = setup(r#"{"profiles": {"learner": {"file": "learner.json"}}}"#);
    let o = skillxfer(&["simulate"], &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("profiles.learner.file"));
}

#[test]
fn profile_files_are_resolved_next_to_the_config() {
    let (d, cfg, out) = setup(r#"{"profiles": {"expert": {"file": "p/e.json"}, "learner": "expert"}, "scenario": {"ticks_per_session": 500}}"#);
    fs::create_dir(d.path().join("p")).unwrap();
    let (e, _) = skillxfer_core::game::table1_profiles();
    fs::write(d.path().join("p/e.json"), profile::write_profile(&e)).unwrap();
    let o = skillxfer(&["transfer"], &cfg, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "iterations"), "1");

    fs::write(d.path().join("p/e.json"), "{\"profile_id\": \"x\"}").unwrap();
    let o = skillxfer(&["transfer"], &cfg, &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[config]: profiles.expert.file"));
}

#[test]
fn corrupt_artifacts_exit_3() {
    let (_d, cfg, out) = setup(SMALL);
    let o = skillxfer(&["simulate"], &cfg, &out);
    let dir = PathBuf::from(field(&stdout(&o), "run_dir"));
    let f = dir.join("session-ID2.jsonl");
    let text = fs::read_to_string(&f).unwrap().replacen("\"ID2\"", "\"ID1\"", 1);
    fs::write(&f, text).unwrap();
    let o = skillxfer(&["dataset"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error[data]: "));

    fs::write(&f, "not json\n").unwrap();
    let o = skillxfer(&["dataset"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn report_needs_a_trace() {
    let (_d, cfg, out) = setup(SMALL);
    let o = skillxfer(&["report"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("run `transfer` first"));
}

#[test]
fn exhausted_budget_exits_4_after_writing_the_trace() {
    let (_d, cfg, out) = setup(r#"{"transfer": {"max_iterations": 1}}"#);
    let o = skillxfer(&["transfer"], &cfg, &out);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error[anomaly]: "));
    let line = stdout(&o);
    assert_eq!(field(&line, "terminal_reason"), "max_iterations");
    assert!(PathBuf::from(field(&line, "run_dir")).join("trace.json").is_file());
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_skillxfer")).arg("simulate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--config"));
}
