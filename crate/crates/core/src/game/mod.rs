//! Game world simulation: stimulus scenarios, condition keys, player
//! profiles and seeded play sessions.

mod profile;
mod table1;

pub use profile::{Categorical, PlayerProfile, NORMALIZATION_TOLERANCE};
pub use table1::{table1_profiles, table1_profiles_with_strength, DEFAULT_LINKAGE_STRENGTH};

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::behavior::{Attribute, BehaviorRecord, PlayerId, SessionLog, Stimulus, StimulusContext};
use crate::rng::{self, Rng};
use crate::{Error, Result};

/// Rejected draws from a key's distribution before falling back to the
/// default key.
pub const MAX_REJECTIONS: usize = 100;

/// Per-stimulus occurrence probabilities. `location_indoor` is the
/// probability of being indoors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimulusProbabilities {
    pub location_indoor: f64,
    pub obstacle_present: f64,
    pub soldier_present: f64,
    pub civilian_present: f64,
    pub horse_available: f64,
    pub climbable_present: f64,
    pub person_facing: f64,
}

impl StimulusProbabilities {
    pub fn uniform(p: f64) -> Self {
        StimulusProbabilities {
            location_indoor: p,
            obstacle_present: p,
            soldier_present: p,
            civilian_present: p,
            horse_available: p,
            climbable_present: p,
            person_facing: p,
        }
    }

    pub fn get(&self, field: Stimulus) -> f64 {
        match field {
            Stimulus::LocationIndoor => self.location_indoor,
            Stimulus::Obstacle => self.obstacle_present,
            Stimulus::Soldier => self.soldier_present,
            Stimulus::Civilian => self.civilian_present,
            Stimulus::Horse => self.horse_available,
            Stimulus::Climbable => self.climbable_present,
            Stimulus::PersonFacing => self.person_facing,
        }
    }

    pub fn set(&mut self, field: Stimulus, p: f64) {
        match field {
            Stimulus::LocationIndoor => self.location_indoor = p,
            Stimulus::Obstacle => self.obstacle_present = p,
            Stimulus::Soldier => self.soldier_present = p,
            Stimulus::Civilian => self.civilian_present = p,
            Stimulus::Horse => self.horse_available = p,
            Stimulus::Climbable => self.climbable_present = p,
            Stimulus::PersonFacing => self.person_facing = p,
        }
    }
}

impl Default for StimulusProbabilities {
    fn default() -> Self {
        StimulusProbabilities {
            location_indoor: 0.5,
            ..StimulusProbabilities::uniform(0.8)
        }
    }
}

/// The game world a session is played in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub scenario_id: String,
    pub ticks_per_session: u64,
    pub probabilities: StimulusProbabilities,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            scenario_id: String::from("default"),
            ticks_per_session: 2000,
            probabilities: StimulusProbabilities::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        for f in Stimulus::ALL {
            let p = self.probabilities.get(f);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!(
                    "probability of {} is {p}, outside [0, 1]",
                    f.field_name()
                )));
            }
        }
        Ok(())
    }
}

/// A game condition under which a profile prescribes a behavior
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKey {
    Indoor,
    Outdoor,
    PersonFacing,
    ClimbingOpportunity,
    Obstacle,
    HorseAvailable,
    SoldierPresent,
    CivilianPresent,
    Default,
}

impl ConditionKey {
    pub const ALL: [ConditionKey; 9] = [
        ConditionKey::Indoor,
        ConditionKey::Outdoor,
        ConditionKey::PersonFacing,
        ConditionKey::ClimbingOpportunity,
        ConditionKey::Obstacle,
        ConditionKey::HorseAvailable,
        ConditionKey::SoldierPresent,
        ConditionKey::CivilianPresent,
        ConditionKey::Default,
    ];

    /// Keys triggered by a stimulus being present. When any of them fires it
    /// takes precedence over the location keys.
    pub const FOREGROUND: [ConditionKey; 6] = [
        ConditionKey::PersonFacing,
        ConditionKey::ClimbingOpportunity,
        ConditionKey::Obstacle,
        ConditionKey::HorseAvailable,
        ConditionKey::SoldierPresent,
        ConditionKey::CivilianPresent,
    ];

    pub fn position(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ConditionKey::Indoor => "indoor",
            ConditionKey::Outdoor => "outdoor",
            ConditionKey::PersonFacing => "person_facing",
            ConditionKey::ClimbingOpportunity => "climbing_opportunity",
            ConditionKey::Obstacle => "obstacle",
            ConditionKey::HorseAvailable => "horse_available",
            ConditionKey::SoldierPresent => "soldier_present",
            ConditionKey::CivilianPresent => "civilian_present",
            ConditionKey::Default => "default",
        }
    }

    /// The stimulus that activates a foreground key.
    pub fn trigger(self) -> Option<Stimulus> {
        match self {
            ConditionKey::PersonFacing => Some(Stimulus::PersonFacing),
            ConditionKey::ClimbingOpportunity => Some(Stimulus::Climbable),
            ConditionKey::Obstacle => Some(Stimulus::Obstacle),
            ConditionKey::HorseAvailable => Some(Stimulus::Horse),
            ConditionKey::SoldierPresent => Some(Stimulus::Soldier),
            ConditionKey::CivilianPresent => Some(Stimulus::Civilian),
            ConditionKey::Indoor | ConditionKey::Outdoor | ConditionKey::Default => None,
        }
    }

    /// The smallest context that activates this key.
    pub fn minimal_context(self) -> StimulusContext {
        let mut ctx = StimulusContext::default();
        match self {
            ConditionKey::Indoor => ctx.location_indoor = true,
            ConditionKey::Outdoor | ConditionKey::Default => {}
            k => ctx.set(k.trigger().expect("foreground key"), true),
        }
        ctx
    }

    /// Behaviors feasible in the key's minimal context.
    pub fn native_behaviors(self) -> impl Iterator<Item = Attribute> {
        let ctx = self.minimal_context();
        Attribute::ALL.into_iter().filter(move |a| a.is_feasible(&ctx))
    }

    /// Whether `behavior` is feasible in at least one context activating
    /// this key.
    pub fn can_reach(self, behavior: Attribute) -> bool {
        if self.trigger().is_some() {
            true
        } else {
            behavior.is_feasible(&self.minimal_context())
        }
    }
}

impl fmt::Display for ConditionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown condition key {s:?}")))
    }
}

/// The keys active in `ctx`: every triggered foreground key, or the
/// location key alone when no foreground stimulus is present.
pub fn active_keys(ctx: &StimulusContext) -> ActiveKeys {
    let mut keys = ActiveKeys {
        keys: [ConditionKey::Default; 6],
        len: 0,
    };
    for k in ConditionKey::FOREGROUND {
        if ctx.get(k.trigger().expect("foreground key")) {
            keys.keys[keys.len] = k;
            keys.len += 1;
        }
    }
    if keys.len == 0 {
        keys.keys[0] = if ctx.location_indoor {
            ConditionKey::Indoor
        } else {
            ConditionKey::Outdoor
        };
        keys.len = 1;
    }
    keys
}

/// Up to six simultaneously active condition keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveKeys {
    keys: [ConditionKey; 6],
    len: usize,
}

impl ActiveKeys {
    pub fn as_slice(&self) -> &[ConditionKey] {
        &self.keys[..self.len]
    }
}

/// Draws each stimulus independently with its scenario probability.
pub fn sample_context(scenario: &Scenario, rng: &mut Rng) -> StimulusContext {
    let mut ctx = StimulusContext::default();
    for f in Stimulus::ALL {
        let p = scenario.probabilities.get(f);
        ctx.set(f, rng.gen_bool(p.clamp(0.0, 1.0)));
    }
    ctx
}

/// Picks the player's behavior for `ctx`.
///
/// One active key is chosen uniformly; its distribution is sampled until a
/// context-feasible behavior comes up. After [`MAX_REJECTIONS`] misses the
/// default key's distribution, restricted to feasible behaviors, is used.
pub fn choose_behavior(
    profile: &PlayerProfile,
    ctx: &StimulusContext,
    rng: &mut Rng,
) -> Result<Attribute> {
    let active = active_keys(ctx);
    let keys = active.as_slice();
    let key = keys[rng.gen_range(0..keys.len())];
    let dist = profile.distribution(key);
    for _ in 0..MAX_REJECTIONS {
        let b = dist.sample(rng);
        if b.is_feasible(ctx) {
            return Ok(b);
        }
    }
    let fallback = profile
        .distribution(ConditionKey::Default)
        .restricted(|a| a.is_feasible(ctx))
        .ok_or_else(|| {
            Error::config(format!(
                "profile {} has no feasible default behavior",
                profile.profile_id()
            ))
        })?;
    Ok(fallback.sample(rng))
}

/// Plays one seeded session of `scenario.ticks_per_session` ticks.
pub fn run_session(
    scenario: &Scenario,
    profile: &PlayerProfile,
    player: PlayerId,
    seed: u64,
) -> Result<SessionLog> {
    scenario.validate()?;
    let mut rng = rng::from_seed(seed);
    let mut log = SessionLog::new(player, seed, scenario.scenario_id.clone());
    log.records.reserve(scenario.ticks_per_session as usize);
    for tick in 0..scenario.ticks_per_session {
        let context = sample_context(scenario, &mut rng);
        let behavior = choose_behavior(profile, &context, &mut rng)?;
        log.records.push(BehaviorRecord {
            tick,
            player,
            context,
            behavior,
        });
    }
    Ok(log)
}
