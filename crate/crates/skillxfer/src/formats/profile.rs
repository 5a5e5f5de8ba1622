//! Player profiles and scenarios as pretty JSON. Writing what was read
//! reproduces the file byte for byte.

use skillxfer_core::game::{PlayerProfile, Scenario};

use crate::{CliError, Result};

pub fn write_profile(p: &PlayerProfile) -> String {
    super::to_json(p)
}

pub fn read_profile(text: &str) -> Result<PlayerProfile> {
    serde_json::from_str(text).map_err(|e| CliError::data(format!("profile: {e}")))
}

pub fn write_scenario(s: &Scenario) -> String {
    super::to_json(s)
}

pub fn read_scenario(text: &str) -> Result<Scenario> {
    let s: Scenario =
        serde_json::from_str(text).map_err(|e| CliError::data(format!("scenario: {e}")))?;
    s.validate()?;
    Ok(s)
}
