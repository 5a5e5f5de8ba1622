//! The closed identification/transfer loop: learn a classifier that tells
//! the players apart, aim stimuli at the attributes it relies on, pull the
//! learner's profile toward the expert's on the matching conditions, and
//! repeat until the classifier is back at chance.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bayes::{accuracy, fit_cpts, learn_structure, BayesNet, LearnConfig};
use crate::behavior::{split, to_dataset, Attribute, PlayerId, DEFAULT_SPLIT_RATIO, DEFAULT_WINDOW};
use crate::game::{run_session, ConditionKey, PlayerProfile, Scenario};
use crate::rng::{derive_seed, purpose};
use crate::{Error, Result};

/// Probability floor a targeted stimulus is raised to.
pub const STIMULUS_BOOST: f64 = 0.8;

/// Two conditional probabilities closer than this count as equal when
/// deciding which keys to nudge.
const KEY_DIFFERENCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    /// Fraction η of the gap to the expert closed per nudge, in (0, 1].
    pub learning_rate: f64,
    /// Held-out accuracy at or below which the players count as
    /// indistinguishable.
    pub stop_threshold: f64,
    pub max_iterations: usize,
    /// Base scenario; also fixes the ticks per session.
    pub scenario: Scenario,
    pub window: usize,
    pub split_ratio: f64,
    /// `None` derives a fresh split seed each iteration.
    pub fixed_split_seed: Option<u64>,
    pub learn: LearnConfig,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            learning_rate: 0.5,
            stop_threshold: 0.55,
            max_iterations: 50,
            scenario: Scenario::default(),
            window: DEFAULT_WINDOW,
            split_ratio: DEFAULT_SPLIT_RATIO,
            fixed_split_seed: None,
            learn: LearnConfig::default(),
        }
    }
}

impl TransferConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::invalid(format!(
                "learning_rate {} not in (0, 1]",
                self.learning_rate
            )));
        }
        if !(self.stop_threshold >= 0.5 && self.stop_threshold < 1.0) {
            return Err(Error::invalid(format!(
                "stop_threshold {} not in [0.5, 1)",
                self.stop_threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::invalid("window must be at least 1"));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::invalid(format!("split_ratio {} not in (0, 1)", self.split_ratio)));
        }
        self.scenario.validate()?;
        self.learn.validate()
    }
}

/// A scenario with stimuli raised for the targeted attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimulusSchedule {
    pub scenario: Scenario,
    pub targeted: BTreeSet<Attribute>,
}

/// Raises each targeted attribute's stimulus to at least
/// [`STIMULUS_BOOST`]; everything else stays as in `base`.
pub fn build_schedule(targets: &BTreeSet<Attribute>, base: &Scenario) -> StimulusSchedule {
    let mut scenario = base.clone();
    for f in targets.iter().filter_map(|a| a.stimulus()) {
        let p = scenario.probabilities.get(f);
        scenario.probabilities.set(f, p.max(STIMULUS_BOOST));
    }
    StimulusSchedule {
        scenario,
        targeted: targets.clone(),
    }
}

/// Attributes in the class node's Markov blanket. Variables whose name is
/// not a behavior attribute are ignored.
pub fn discriminative_attributes(bn: &BayesNet) -> BTreeSet<Attribute> {
    bn.class_blanket()
        .into_iter()
        .filter_map(|v| bn.variables()[v].name.parse().ok())
        .collect()
}

/// Keys under which some targeted attribute is more or less likely for the
/// learner than for the expert.
pub fn linked_keys(
    targets: &BTreeSet<Attribute>,
    learner: &PlayerProfile,
    expert: &PlayerProfile,
) -> Vec<ConditionKey> {
    ConditionKey::ALL
        .into_iter()
        .filter(|&k| {
            let (l, e) = (learner.distribution(k), expert.distribution(k));
            targets
                .iter()
                .any(|&a| (l.prob(a) - e.prob(a)).abs() > KEY_DIFFERENCE_EPS)
        })
        .collect()
}

/// Moves the learner's distribution on each of `keys` a fraction `eta`
/// of the way to the expert's. This is the expected long-run effect of
/// rewarding expert-like and penalizing other behavior.
pub fn nudge_profile(
    learner: &PlayerProfile,
    expert: &PlayerProfile,
    keys: &[ConditionKey],
    eta: f64,
) -> Result<PlayerProfile> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid(format!("learning rate {eta} not in (0, 1]")));
    }
    let mut out = learner.clone();
    for &k in keys {
        let mixed = learner.distribution(k).mix(expert.distribution(k), eta);
        out.set_distribution(k, mixed)?;
    }
    Ok(out)
}

/// Mean over condition keys of KL(learner_k ‖ expert_k), in nats.
pub fn divergence(learner: &PlayerProfile, expert: &PlayerProfile) -> f64 {
    let total: f64 = ConditionKey::ALL
        .iter()
        .map(|&k| learner.distribution(k).kl(expert.distribution(k)))
        .sum();
    total / ConditionKey::ALL.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    ThresholdReached,
    MaxIterations,
}

impl TerminalReason {
    pub fn name(self) -> &'static str {
        match self {
            TerminalReason::ThresholdReached => "threshold_reached",
            TerminalReason::MaxIterations => "max_iterations",
        }
    }
}

/// What happened in one pass of the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub accuracy: f64,
    /// Divergence of the learner profile played this iteration.
    #[serde(with = "nonfinite")]
    pub divergence: f64,
    /// Attributes that were boosted in this iteration's sessions.
    pub scheduled: BTreeSet<Attribute>,
    /// Discriminative attributes found by this iteration's classifier.
    pub targeted: BTreeSet<Attribute>,
    /// Keys nudged after this iteration; empty on the last one.
    pub nudged_keys: Vec<ConditionKey>,
    pub learner: PlayerProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferTrace {
    pub seed: u64,
    pub expert: PlayerProfile,
    pub iterations: Vec<IterationRecord>,
    pub terminal_reason: TerminalReason,
}

impl TransferTrace {
    /// The learner profile after the last nudge (the one played last).
    pub fn final_learner(&self) -> &PlayerProfile {
        &self.iterations.last().expect("trace has an iteration").learner
    }
}

/// Runs the transfer loop. Every random stream is derived from `seed`, so
/// identical inputs give an identical trace.
pub fn run_transfer(
    expert: &PlayerProfile,
    learner0: &PlayerProfile,
    config: &TransferConfig,
    seed: u64,
) -> Result<TransferTrace> {
    config.validate()?;
    expert.validate()?;
    learner0.validate()?;
    let base = &config.scenario;
    let mut learner = learner0.clone();
    let mut schedule = build_schedule(&BTreeSet::new(), base);
    let mut iterations = Vec::new();
    let mut reason = TerminalReason::MaxIterations;

    for it in 1..=config.max_iterations {
        let counter = it as u64;
        let expert_log = run_session(
            &schedule.scenario,
            expert,
            PlayerId::Id1,
            derive_seed(seed, counter, purpose::EXPERT_SESSION),
        )?;
        let learner_log = run_session(
            &schedule.scenario,
            &learner,
            PlayerId::Id2,
            derive_seed(seed, counter, purpose::LEARNER_SESSION),
        )?;
        let data = to_dataset(&[expert_log, learner_log], config.window)?;
        let split_seed = config
            .fixed_split_seed
            .unwrap_or_else(|| derive_seed(seed, counter, purpose::SPLIT));
        let (train, test) = split(&data, config.split_ratio, split_seed)?;
        let learn = LearnConfig {
            seed: derive_seed(seed, counter, purpose::LEARN),
            ..config.learn
        };
        let dag = learn_structure(&train, &learn)?;
        let bn = fit_cpts(&dag, &train, learn.smoothing)?;
        let acc = accuracy(&bn, &test)?;
        let targeted = discriminative_attributes(&bn);

        let mut record = IterationRecord {
            iteration: it,
            accuracy: acc,
            divergence: divergence(&learner, expert),
            scheduled: schedule.targeted.clone(),
            targeted: targeted.clone(),
            nudged_keys: Vec::new(),
            learner: learner.clone(),
        };
        if acc <= config.stop_threshold || targeted.is_empty() {
            iterations.push(record);
            reason = TerminalReason::ThresholdReached;
            break;
        }
        let keys = linked_keys(&targeted, &learner, expert);
        learner = nudge_profile(&learner, expert, &keys, config.learning_rate)?;
        record.nudged_keys = keys;
        iterations.push(record);
        schedule = build_schedule(&targeted, base);
    }

    Ok(TransferTrace {
        seed,
        expert: expert.clone(),
        iterations,
        terminal_reason: reason,
    })
}

/// One plotted series: a player's probability of each key's curve behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub player: PlayerId,
    pub iteration: usize,
    pub values: [f64; 9],
}

/// Behavioral output per condition key, one series per player per
/// iteration. Each key is plotted through the expert's most likely behavior
/// under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub behaviors: [Attribute; 9],
    pub series: Vec<CurveSeries>,
}

impl CurveTable {
    pub fn keys(&self) -> [ConditionKey; 9] {
        ConditionKey::ALL
    }

    pub fn width(&self) -> usize {
        self.behaviors.len()
    }

    pub fn get(&self, player: PlayerId, iteration: usize) -> Option<&CurveSeries> {
        self.series
            .iter()
            .find(|s| s.player == player && s.iteration == iteration)
    }
}

fn series(profile: &PlayerProfile, behaviors: &[Attribute; 9], player: PlayerId, iteration: usize) -> CurveSeries {
    let mut values = [0.0; 9];
    for (i, k) in ConditionKey::ALL.iter().enumerate() {
        values[i] = profile.distribution(*k).prob(behaviors[i]);
    }
    CurveSeries {
        player,
        iteration,
        values,
    }
}

/// Curves for an expert and a sequence of learner snapshots, numbered from 1.
pub fn behavioral_curves<'a>(
    expert: &PlayerProfile,
    learners: impl IntoIterator<Item = &'a PlayerProfile>,
) -> CurveTable {
    let behaviors = ConditionKey::ALL.map(|k| expert.distribution(k).argmax());
    let mut out = CurveTable {
        behaviors,
        series: Vec::new(),
    };
    for (i, l) in learners.into_iter().enumerate() {
        out.series.push(series(expert, &behaviors, PlayerId::Id1, i + 1));
        out.series.push(series(l, &behaviors, PlayerId::Id2, i + 1));
    }
    out
}

/// Curves over every iteration of a trace.
pub fn trace_curves(trace: &TransferTrace) -> CurveTable {
    behavioral_curves(&trace.expert, trace.iterations.iter().map(|r| &r.learner))
}

/// Serializes non-finite floats as strings so JSON can carry them.
mod nonfinite {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr<'a> {
            Num(f64),
            Str(&'a str),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str("inf") => Ok(f64::INFINITY),
            Repr::Str("-inf") => Ok(f64::NEG_INFINITY),
            Repr::Str("nan") => Ok(f64::NAN),
            Repr::Str(other) => Err(D::Error::custom(alloc::format!("not a number: {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{table1_profiles, Categorical};

    #[test]
    fn empty_targets_keep_base() {
        let base = Scenario::default();
        assert_eq!(build_schedule(&BTreeSet::new(), &base).scenario, base);
    }

    #[test]
    fn riding_raises_horse_only() {
        let mut base = Scenario::default();
        base.probabilities.horse_available = 0.2;
        let t: BTreeSet<_> = [Attribute::RidingHrs].into_iter().collect();
        let s = build_schedule(&t, &base);
        let mut expected = base.clone();
        expected.probabilities.horse_available = 0.8;
        assert_eq!(s.scenario, expected);
        // already above the floor: unchanged
        base.probabilities.horse_available = 0.9;
        assert_eq!(build_schedule(&t, &base).scenario, base);
    }

    #[test]
    fn nudge_fixed_point_midpoint_and_copy() {
        let (e, l) = table1_profiles();
        assert_eq!(nudge_profile(&e, &e, &ConditionKey::ALL, 0.5).unwrap(), e);

        let mut lp = e.clone();
        let mut probs = [0.0; 10];
        probs[Attribute::Fighting.column()] = 0.2;
        probs[Attribute::Movement.column()] = 0.8;
        lp.set_distribution(ConditionKey::Obstacle, Categorical::from_probs(probs).unwrap())
            .unwrap();
        let mut ep = e.clone();
        probs[Attribute::Fighting.column()] = 0.8;
        probs[Attribute::Movement.column()] = 0.2;
        ep.set_distribution(ConditionKey::Obstacle, Categorical::from_probs(probs).unwrap())
            .unwrap();
        let mid = nudge_profile(&lp, &ep, &[ConditionKey::Obstacle], 0.5).unwrap();
        let f = mid.distribution(ConditionKey::Obstacle).prob(Attribute::Fighting);
        assert!((f - 0.5).abs() < 1e-15);

        let copy = nudge_profile(&l, &e, &ConditionKey::ALL, 1.0).unwrap();
        for k in ConditionKey::ALL {
            assert_eq!(copy.distribution(k), e.distribution(k));
        }
        assert_eq!(divergence(&copy, &e), 0.0);
    }

    #[test]
    fn nudge_leaves_other_keys_alone() {
        let (e, l) = table1_profiles();
        let n = nudge_profile(&l, &e, &[ConditionKey::Obstacle], 0.5).unwrap();
        for k in ConditionKey::ALL {
            if k != ConditionKey::Obstacle {
                assert_eq!(n.distribution(k), l.distribution(k));
            }
        }
        assert!(nudge_profile(&l, &e, &[], 0.0).is_err());
        assert!(nudge_profile(&l, &e, &[], 1.5).is_err());
    }

    #[test]
    fn table1_divergence_is_finite_and_positive() {
        let (e, l) = table1_profiles();
        let d = divergence(&l, &e);
        assert!(d.is_finite() && d > 0.0);
        assert_eq!(divergence(&e, &e), 0.0);
    }

    #[test]
    fn linked_keys_follow_differences() {
        let (e, l) = table1_profiles();
        let t: BTreeSet<_> = [Attribute::Fighting].into_iter().collect();
        let keys = linked_keys(&t, &l, &e);
        assert!(keys.contains(&ConditionKey::Obstacle));
        assert!(!keys.contains(&ConditionKey::SoldierPresent));
        assert!(linked_keys(&t, &e, &e).is_empty());
    }

    #[test]
    fn curves_shape_and_identity() {
        let (e, l) = table1_profiles();
        let c = behavioral_curves(&e, [&e]);
        assert_eq!(c.width(), 9);
        assert_eq!(c.series.len(), 2);
        assert_eq!(c.series[0].values, c.series[1].values);
        let c = behavioral_curves(&e, [&l, &e, &l]);
        assert_eq!(c.series.len(), 6);
        assert_eq!(c.get(PlayerId::Id2, 2).unwrap().values, c.get(PlayerId::Id1, 2).unwrap().values);
        assert_eq!(c.behaviors[ConditionKey::Obstacle.position()], Attribute::Fighting);
    }

    #[test]
    fn config_validation() {
        let ok = TransferConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            TransferConfig { learning_rate: 0.0, ..ok.clone() },
            TransferConfig { learning_rate: 1.01, ..ok.clone() },
            TransferConfig { stop_threshold: 0.49, ..ok.clone() },
            TransferConfig { stop_threshold: 1.0, ..ok.clone() },
            TransferConfig { max_iterations: 0, ..ok.clone() },
            TransferConfig { window: 0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
