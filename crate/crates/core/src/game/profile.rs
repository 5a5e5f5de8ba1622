use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use rand::Rng as _;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ConditionKey;
use crate::behavior::Attribute;
use crate::rng::Rng;
use crate::{Error, Result};

/// Allowed deviation of a distribution's total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A categorical distribution over the ten behaviors, indexed by column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Categorical {
    probs: [f64; 10],
}

impl Categorical {
    pub fn from_probs(probs: [f64; 10]) -> Result<Self> {
        let c = Categorical { probs };
        c.validate()?;
        Ok(c)
    }

    pub fn point(b: Attribute) -> Self {
        let mut probs = [0.0; 10];
        probs[b.column()] = 1.0;
        Categorical { probs }
    }

    /// Uniform over the given behaviors; `None` when there are none.
    pub fn uniform_over(support: impl IntoIterator<Item = Attribute>) -> Option<Self> {
        let mut probs = [0.0; 10];
        let mut n = 0usize;
        for b in support {
            if probs[b.column()] == 0.0 {
                probs[b.column()] = 1.0;
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        for p in &mut probs {
            *p /= n as f64;
        }
        Some(Categorical { probs })
    }

    pub fn prob(&self, b: Attribute) -> f64 {
        self.probs[b.column()]
    }

    pub fn probs(&self) -> &[f64; 10] {
        &self.probs
    }

    pub fn support(&self) -> impl Iterator<Item = Attribute> + '_ {
        Attribute::ALL.into_iter().filter(|a| self.prob(*a) > 0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::config(format!("probability {p} is not a finite non-negative number")));
        }
        let total = self.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::config(format!("distribution sums to {total}, not 1")));
        }
        Ok(())
    }

    /// The most probable behavior, lowest index first on ties.
    pub fn argmax(&self) -> Attribute {
        let mut best = Attribute::ALL[0];
        for a in Attribute::ALL {
            if self.prob(a) > self.prob(best) {
                best = a;
            }
        }
        best
    }

    pub fn sample(&self, rng: &mut Rng) -> Attribute {
        let u: f64 = rng.gen::<f64>() * self.total();
        let mut acc = 0.0;
        let mut last = None;
        for a in Attribute::ALL {
            let p = self.prob(a);
            if p > 0.0 {
                acc += p;
                last = Some(a);
                if u < acc {
                    return a;
                }
            }
        }
        last.expect("distribution with positive mass")
    }

    /// The distribution conditioned on `keep`; `None` if no mass survives.
    pub fn restricted(&self, keep: impl Fn(Attribute) -> bool) -> Option<Categorical> {
        let mut probs = [0.0; 10];
        let mut mass = 0.0;
        for a in Attribute::ALL {
            if keep(a) {
                probs[a.column()] = self.prob(a);
                mass += self.prob(a);
            }
        }
        if mass <= 0.0 {
            return None;
        }
        for p in &mut probs {
            *p /= mass;
        }
        Some(Categorical { probs })
    }

    /// `(1 - eta) * self + eta * target`, written so that equal inputs
    /// and `eta == 1` reproduce `target` exactly.
    pub fn mix(&self, target: &Categorical, eta: f64) -> Categorical {
        if eta == 1.0 {
            return *target;
        }
        let mut probs = [0.0; 10];
        for (i, p) in probs.iter_mut().enumerate() {
            *p = self.probs[i] + eta * (target.probs[i] - self.probs[i]);
        }
        Categorical { probs }
    }

    /// KL(self ‖ other) in nats; infinite when `other` misses part of
    /// `self`'s support.
    pub fn kl(&self, other: &Categorical) -> f64 {
        let mut d = 0.0;
        for (p, q) in self.probs.iter().zip(&other.probs) {
            if *p > 0.0 {
                if *q <= 0.0 {
                    return f64::INFINITY;
                }
                d += p * libm::log(p / q);
            }
        }
        d.max(0.0)
    }
}

impl Serialize for Categorical {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.support().count()))?;
        for a in self.support() {
            map.serialize_entry(a.name(), &self.prob(a))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Categorical {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        let mut probs = [0.0; 10];
        for (name, p) in raw {
            let a: Attribute = name.parse().map_err(D::Error::custom)?;
            probs[a.column()] = p;
        }
        Categorical::from_probs(probs).map_err(D::Error::custom)
    }
}

/// A player's behavior distribution under each condition key.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerProfile {
    profile_id: String,
    distributions: [Categorical; 9],
}

impl PlayerProfile {
    pub fn new(profile_id: impl Into<String>, distributions: [Categorical; 9]) -> Result<Self> {
        let p = PlayerProfile {
            profile_id: profile_id.into(),
            distributions,
        };
        p.validate()?;
        Ok(p)
    }

    /// Every key uniform over the behaviors feasible in its minimal context.
    pub fn uniform_native(profile_id: impl Into<String>) -> Self {
        let distributions = ConditionKey::ALL.map(|k| {
            Categorical::uniform_over(k.native_behaviors()).expect("movement is always feasible")
        });
        PlayerProfile {
            profile_id: profile_id.into(),
            distributions,
        }
    }

    pub fn profile_id(&self) -> &str {
        &self.profile_id
    }

    pub fn set_profile_id(&mut self, id: impl Into<String>) {
        self.profile_id = id.into();
    }

    pub fn distribution(&self, key: ConditionKey) -> &Categorical {
        &self.distributions[key.position()]
    }

    pub fn distributions(&self) -> impl Iterator<Item = (ConditionKey, &Categorical)> {
        ConditionKey::ALL.into_iter().zip(self.distributions.iter())
    }

    pub fn set_distribution(&mut self, key: ConditionKey, dist: Categorical) -> Result<()> {
        check_key(key, &dist)?;
        self.distributions[key.position()] = dist;
        Ok(())
    }

    /// Checks normalization and that every key only uses behaviors some
    /// activating context allows.
    pub fn validate(&self) -> Result<()> {
        for (k, d) in self.distributions() {
            check_key(k, d).map_err(|e| Error::config(format!("profile {}: {e}", self.profile_id)))?;
        }
        Ok(())
    }
}

fn check_key(key: ConditionKey, dist: &Categorical) -> Result<()> {
    dist.validate()
        .map_err(|e| Error::config(format!("key {key}: {e}")))?;
    if let Some(b) = dist.support().find(|b| !key.can_reach(*b)) {
        return Err(Error::config(format!(
            "key {key}: behavior {b} is infeasible in every context activating the key"
        )));
    }
    Ok(())
}

impl Serialize for PlayerProfile {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        struct Dists<'a>(&'a PlayerProfile);
        impl Serialize for Dists<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(9))?;
                for (k, d) in self.0.distributions() {
                    map.serialize_entry(k.name(), d)?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("profile_id", &self.profile_id)?;
        map.serialize_entry("distributions", &Dists(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for PlayerProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            profile_id: String,
            distributions: BTreeMap<String, Categorical>,
        }
        let raw = Raw::deserialize(d)?;
        let mut slots: [Option<Categorical>; 9] = [None; 9];
        for (name, dist) in raw.distributions {
            let k: ConditionKey = name.parse().map_err(D::Error::custom)?;
            slots[k.position()] = Some(dist);
        }
        let mut dists = [Categorical::point(Attribute::Movement); 9];
        for k in ConditionKey::ALL {
            dists[k.position()] = slots[k.position()]
                .ok_or_else(|| D::Error::custom(format!("missing distribution for key {k}")))?;
        }
        PlayerProfile::new(raw.profile_id, dists).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_point() {
        let u = Categorical::uniform_over([Attribute::Fighting, Attribute::Movement]).unwrap();
        assert_eq!(u.prob(Attribute::Fighting), 0.5);
        assert!(Categorical::uniform_over([]).is_none());
        assert_eq!(Categorical::point(Attribute::Climbing).argmax(), Attribute::Climbing);
    }

    #[test]
    fn argmax_ties_to_lowest_index() {
        let u = Categorical::uniform_over([Attribute::Movement, Attribute::Obstacle]).unwrap();
        assert_eq!(u.argmax(), Attribute::Obstacle);
    }

    #[test]
    fn rejects_bad_mass() {
        let mut probs = [0.0; 10];
        probs[0] = 0.5;
        assert!(Categorical::from_probs(probs).is_err());
        probs[1] = 0.5 + 2e-9;
        assert!(Categorical::from_probs(probs).is_err());
        probs[1] = 0.5;
        assert!(Categorical::from_probs(probs).is_ok());
        probs[1] = f64::NAN;
        assert!(Categorical::from_probs(probs).is_err());
    }

    #[test]
    fn kl_basics() {
        let p = Categorical::uniform_over([Attribute::Fighting, Attribute::Movement]).unwrap();
        let q = Categorical::point(Attribute::Fighting);
        assert_eq!(p.kl(&p), 0.0);
        assert!(p.kl(&q).is_infinite());
        assert!((q.kl(&p) - libm::log(2.0)).abs() < 1e-15);
    }

    #[test]
    fn mix_endpoints() {
        let p = Categorical::uniform_over([Attribute::Fighting, Attribute::Movement]).unwrap();
        let q = Categorical::point(Attribute::Fighting);
        assert_eq!(p.mix(&q, 1.0), q);
        assert_eq!(p.mix(&p, 0.3), p);
        assert!((p.mix(&q, 0.5).prob(Attribute::Fighting) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn default_key_cannot_hold_context_dependent_behaviors() {
        let mut p = PlayerProfile::uniform_native("x");
        assert!(p
            .set_distribution(ConditionKey::Default, Categorical::point(Attribute::Listening))
            .is_err());
        assert!(p
            .set_distribution(ConditionKey::Obstacle, Categorical::point(Attribute::Listening))
            .is_ok());
    }
}
