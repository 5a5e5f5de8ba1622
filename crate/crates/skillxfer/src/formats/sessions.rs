//! Session logs as JSON Lines, one behavior record per line.

use std::fmt::Write as _;

use skillxfer_core::behavior::{validate_session, BehaviorRecord, PlayerId, SessionLog};

use crate::{CliError, Result};

pub fn write_jsonl(records: &[BehaviorRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let line = serde_json::to_string(r).expect("in-memory JSON serialization");
        writeln!(out, "{line}").unwrap();
    }
    out
}

/// Parses records; blank lines are skipped, anything else that fails to
/// parse is reported with its line number.
pub fn read_jsonl(text: &str) -> Result<Vec<BehaviorRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: BehaviorRecord = serde_json::from_str(line)
            .map_err(|e| CliError::data(format!("line {}: {e}", i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

/// Reassembles a validated single-player session from parsed records.
pub fn to_session(
    records: Vec<BehaviorRecord>,
    player: PlayerId,
    seed: u64,
    scenario_id: &str,
) -> Result<SessionLog> {
    let mut log = SessionLog::new(player, seed, scenario_id);
    log.records = records;
    if let Some(v) = validate_session(&log).first() {
        return Err(CliError::data(format!("{player} session: {v}")));
    }
    Ok(log)
}
