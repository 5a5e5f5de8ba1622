//! Built-in expert and learner profiles.
//!
//! Each condition key links a player to zero or more behaviors:
//!
//! | key                    | expert (ID1)         | learner (ID2)                          |
//! |------------------------|----------------------|----------------------------------------|
//! | indoor / outdoor       | no effect            | movement (walks indoor, runs outdoor)  |
//! | person_facing          | facing_sol           | riding_hrs, climbing, attack_civ       |
//! | climbing_opportunity   | climbing             | attack_civ                             |
//! | obstacle               | fighting             | listening                              |
//! | horse_available        | facing_sol           | listening                              |
//!
//! Linked behaviors share the linkage strength `s`; the remaining `1 - s` is
//! spread uniformly over the rest of the key's support. A player without a
//! link for a key is uniform over that support. Both players use the same
//! support per key (behaviors feasible in the key's minimal context plus
//! either player's linked behaviors) so KL divergence between them is
//! finite.

use alloc::format;
use alloc::vec::Vec;

use super::{Categorical, ConditionKey, PlayerProfile};
use crate::behavior::Attribute;
use crate::{Error, Result};

pub const DEFAULT_LINKAGE_STRENGTH: f64 = 0.7;

fn expert_links(key: ConditionKey) -> &'static [Attribute] {
    match key {
        ConditionKey::PersonFacing | ConditionKey::HorseAvailable => &[Attribute::FacingSol],
        ConditionKey::ClimbingOpportunity => &[Attribute::Climbing],
        ConditionKey::Obstacle => &[Attribute::Fighting],
        _ => &[],
    }
}

fn learner_links(key: ConditionKey) -> &'static [Attribute] {
    match key {
        ConditionKey::Indoor | ConditionKey::Outdoor => &[Attribute::Movement],
        ConditionKey::PersonFacing => &[
            Attribute::RidingHrs,
            Attribute::Climbing,
            Attribute::AttackCiv,
        ],
        ConditionKey::ClimbingOpportunity => &[Attribute::AttackCiv],
        ConditionKey::Obstacle | ConditionKey::HorseAvailable => &[Attribute::Listening],
        _ => &[],
    }
}

fn shared_support(key: ConditionKey) -> Vec<Attribute> {
    let mut s: Vec<Attribute> = key.native_behaviors().collect();
    s.extend_from_slice(expert_links(key));
    s.extend_from_slice(learner_links(key));
    s.sort_unstable();
    s.dedup();
    s
}

fn linked_distribution(support: &[Attribute], links: &[Attribute], s: f64) -> Categorical {
    let rest: Vec<Attribute> = support.iter().copied().filter(|a| !links.contains(a)).collect();
    if links.is_empty() {
        return Categorical::uniform_over(support.iter().copied()).expect("nonempty support");
    }
    if rest.is_empty() {
        return Categorical::uniform_over(links.iter().copied()).expect("nonempty links");
    }
    let mut probs = [0.0; 10];
    for a in links {
        probs[a.column()] = s / links.len() as f64;
    }
    for a in &rest {
        probs[a.column()] = (1.0 - s) / rest.len() as f64;
    }
    Categorical::from_probs(probs).expect("normalized by construction")
}

fn build(id: &str, links: fn(ConditionKey) -> &'static [Attribute], s: f64) -> PlayerProfile {
    let dists = ConditionKey::ALL.map(|k| linked_distribution(&shared_support(k), links(k), s));
    PlayerProfile::new(id, dists).expect("built-in profile is valid")
}

/// Expert and learner profiles at the default linkage strength.
pub fn table1_profiles() -> (PlayerProfile, PlayerProfile) {
    table1_profiles_with_strength(DEFAULT_LINKAGE_STRENGTH).expect("default strength is valid")
}

/// Expert and learner profiles with linkage strength `s` in `[0, 1]`.
pub fn table1_profiles_with_strength(s: f64) -> Result<(PlayerProfile, PlayerProfile)> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!("linkage strength {s} not in [0, 1]")));
    }
    Ok((
        build("table1-expert", expert_links, s),
        build("table1-learner", learner_links, s),
    ))
}
