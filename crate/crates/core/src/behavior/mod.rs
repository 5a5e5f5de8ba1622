//! Behavior vocabulary, stimulus contexts, session logs and their conversion
//! into the tabular data the classifier consumes.

mod dataset;
mod windows;

pub use dataset::{behavior_variables, DataSet, Variable, CLASS_COLUMN};
pub use windows::{split, to_dataset, DEFAULT_SPLIT_RATIO, DEFAULT_WINDOW};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the ten observable behavior attributes. The discriminant is the
/// attribute's index number (1..=10).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Attribute {
    Fighting = 1,
    Obstacle = 2,
    RidingHrs = 3,
    FacingSol = 4,
    Climbing = 5,
    Location = 6,
    FacingPrs = 7,
    Movement = 8,
    Listening = 9,
    AttackCiv = 10,
}

impl Attribute {
    /// All attributes in index order.
    pub const ALL: [Attribute; 10] = [
        Attribute::Fighting,
        Attribute::Obstacle,
        Attribute::RidingHrs,
        Attribute::FacingSol,
        Attribute::Climbing,
        Attribute::Location,
        Attribute::FacingPrs,
        Attribute::Movement,
        Attribute::Listening,
        Attribute::AttackCiv,
    ];

    /// Index number, 1..=10.
    pub fn index(self) -> u8 {
        self as u8
    }

    /// Zero-based position, which is also the dataset column.
    pub fn column(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(index: u8) -> Option<Attribute> {
        Attribute::ALL.get(usize::from(index).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Fighting => "fighting",
            Attribute::Obstacle => "obstacle",
            Attribute::RidingHrs => "riding_hrs",
            Attribute::FacingSol => "facing_sol",
            Attribute::Climbing => "climbing",
            Attribute::Location => "location",
            Attribute::FacingPrs => "facing_prs",
            Attribute::Movement => "movement",
            Attribute::Listening => "listening",
            Attribute::AttackCiv => "attack_civ",
        }
    }

    /// Whether the behavior can physically happen in `ctx`.
    pub fn is_feasible(self, ctx: &StimulusContext) -> bool {
        match self {
            Attribute::RidingHrs => ctx.horse_available,
            Attribute::FacingSol => ctx.soldier_present,
            Attribute::AttackCiv => ctx.civilian_present,
            Attribute::Climbing => ctx.climbable_present,
            Attribute::Listening | Attribute::FacingPrs => ctx.person_facing,
            Attribute::Fighting | Attribute::Obstacle | Attribute::Location | Attribute::Movement => {
                true
            }
        }
    }

    /// The stimulus whose presence a game agent raises to elicit this
    /// behavior. `None` for location and movement, which no single stimulus
    /// drives.
    pub fn stimulus(self) -> Option<Stimulus> {
        match self {
            Attribute::Fighting | Attribute::Obstacle => Some(Stimulus::Obstacle),
            Attribute::RidingHrs => Some(Stimulus::Horse),
            Attribute::FacingSol => Some(Stimulus::Soldier),
            Attribute::Climbing => Some(Stimulus::Climbable),
            Attribute::FacingPrs | Attribute::Listening => Some(Stimulus::PersonFacing),
            Attribute::AttackCiv => Some(Stimulus::Civilian),
            Attribute::Location | Attribute::Movement => None,
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| crate::Error::invalid(alloc::format!("unknown attribute {s:?}")))
    }
}

/// The seven stimulus fields of a [`StimulusContext`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stimulus {
    LocationIndoor,
    Obstacle,
    Soldier,
    Civilian,
    Horse,
    Climbable,
    PersonFacing,
}

impl Stimulus {
    pub const ALL: [Stimulus; 7] = [
        Stimulus::LocationIndoor,
        Stimulus::Obstacle,
        Stimulus::Soldier,
        Stimulus::Civilian,
        Stimulus::Horse,
        Stimulus::Climbable,
        Stimulus::PersonFacing,
    ];

    /// Field name as used in context records and scenario files.
    pub fn field_name(self) -> &'static str {
        match self {
            Stimulus::LocationIndoor => "location_indoor",
            Stimulus::Obstacle => "obstacle_present",
            Stimulus::Soldier => "soldier_present",
            Stimulus::Civilian => "civilian_present",
            Stimulus::Horse => "horse_available",
            Stimulus::Climbable => "climbable_present",
            Stimulus::PersonFacing => "person_facing",
        }
    }

    pub fn from_field_name(s: &str) -> Option<Stimulus> {
        Stimulus::ALL.into_iter().find(|f| f.field_name() == s)
    }
}

/// What the game world presents to the player at one tick.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimulusContext {
    pub location_indoor: bool,
    pub obstacle_present: bool,
    pub soldier_present: bool,
    pub civilian_present: bool,
    pub horse_available: bool,
    pub climbable_present: bool,
    /// Someone is looking the player in the face.
    pub person_facing: bool,
}

impl StimulusContext {
    pub fn get(&self, field: Stimulus) -> bool {
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

    pub fn set(&mut self, field: Stimulus, value: bool) {
        match field {
            Stimulus::LocationIndoor => self.location_indoor = value,
            Stimulus::Obstacle => self.obstacle_present = value,
            Stimulus::Soldier => self.soldier_present = value,
            Stimulus::Civilian => self.civilian_present = value,
            Stimulus::Horse => self.horse_available = value,
            Stimulus::Climbable => self.climbable_present = value,
            Stimulus::PersonFacing => self.person_facing = value,
        }
    }

    /// Packs the seven fields into bits 0..7, in [`Stimulus::ALL`] order.
    pub fn to_bits(&self) -> u8 {
        Stimulus::ALL
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &f)| acc | (u8::from(self.get(f)) << i))
    }

    pub fn from_bits(bits: u8) -> StimulusContext {
        let mut ctx = StimulusContext::default();
        for (i, &f) in Stimulus::ALL.iter().enumerate() {
            ctx.set(f, bits & (1 << i) != 0);
        }
        ctx
    }
}

/// The two players. `Id1` is the expert, `Id2` the learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlayerId {
    #[serde(rename = "ID1")]
    Id1,
    #[serde(rename = "ID2")]
    Id2,
}

impl PlayerId {
    pub const ALL: [PlayerId; 2] = [PlayerId::Id1, PlayerId::Id2];

    pub fn name(self) -> &'static str {
        match self {
            PlayerId::Id1 => "ID1",
            PlayerId::Id2 => "ID2",
        }
    }

    /// Class-state index in datasets and networks.
    pub fn class_index(self) -> u8 {
        match self {
            PlayerId::Id1 => 0,
            PlayerId::Id2 => 1,
        }
    }

    pub fn from_class_index(i: u8) -> Option<PlayerId> {
        PlayerId::ALL.get(usize::from(i)).copied()
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlayerId {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "ID1" => Ok(PlayerId::Id1),
            "ID2" => Ok(PlayerId::Id2),
            _ => Err(crate::Error::invalid(alloc::format!("unknown player {s:?}"))),
        }
    }
}

/// One observed (context, behavior) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorRecord {
    pub tick: u64,
    pub player: PlayerId,
    pub context: StimulusContext,
    pub behavior: Attribute,
}

/// The ordered records of one player's session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLog {
    pub player: PlayerId,
    pub seed: u64,
    pub scenario_id: String,
    pub records: Vec<BehaviorRecord>,
}

impl SessionLog {
    pub fn new(player: PlayerId, seed: u64, scenario_id: impl Into<String>) -> Self {
        SessionLog {
            player,
            seed,
            scenario_id: scenario_id.into(),
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// A broken session-log invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The behavior is impossible in the recorded context.
    Infeasible { tick: u64, behavior: Attribute },
    /// Tick not strictly greater than the previous record's.
    TickOrder { tick: u64, previous: u64 },
    /// Record belongs to a different player than the log.
    WrongPlayer { tick: u64, player: PlayerId },
}

impl Violation {
    pub fn tick(&self) -> u64 {
        match *self {
            Violation::Infeasible { tick, .. }
            | Violation::TickOrder { tick, .. }
            | Violation::WrongPlayer { tick, .. } => tick,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Infeasible { tick, behavior } => {
                write!(f, "tick {tick}: behavior {behavior} infeasible in context")
            }
            Violation::TickOrder { tick, previous } => {
                write!(f, "tick {tick}: not after previous tick {previous}")
            }
            Violation::WrongPlayer { tick, player } => {
                write!(f, "tick {tick}: record for {player} in another player's log")
            }
        }
    }
}

/// Lists every feasibility, ordering and ownership violation in `log`.
pub fn validate_session(log: &SessionLog) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut previous: Option<u64> = None;
    for r in &log.records {
        if let Some(p) = previous {
            if r.tick <= p {
                out.push(Violation::TickOrder {
                    tick: r.tick,
                    previous: p,
                });
            }
        }
        previous = Some(r.tick);
        if r.player != log.player {
            out.push(Violation::WrongPlayer {
                tick: r.tick,
                player: r.player,
            });
        }
        if !r.behavior.is_feasible(&r.context) {
            out.push(Violation::Infeasible {
                tick: r.tick,
                behavior: r.behavior,
            });
        }
    }
    out
}
