//! Independent reference computations for tests. Nothing here is used by
//! the algorithms themselves.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::bayes::{BayesNet, Cpt, Dag};
use crate::behavior::{Attribute, StimulusContext, Variable};
use crate::game::{ConditionKey, PlayerProfile, Scenario, MAX_REJECTIONS};
use crate::rng::Rng;

/// P(class | row) by summing the product of CPT entries over every full
/// assignment that agrees with the evidence in `row` (class cell ignored).
pub fn enumerate_class_posterior(bn: &BayesNet, row: &[u8]) -> Vec<f64> {
    let n = bn.variables().len();
    let cards: Vec<usize> = bn.variables().iter().map(Variable::cardinality).collect();
    let k = cards[bn.class()];
    let mut mass = vec![0.0; k];
    let total: usize = cards.iter().product();
    let mut x = vec![0u8; n];
    for mut code in 0..total {
        for v in (0..n).rev() {
            x[v] = (code % cards[v]) as u8;
            code /= cards[v];
        }
        if (0..n).any(|v| v != bn.class() && x[v] != row[v]) {
            continue;
        }
        let mut p = 1.0;
        for v in 0..n {
            let cpt = bn.cpt(v);
            let mut j = 0;
            for &u in cpt.parents() {
                j = j * cards[u] + usize::from(x[u]);
            }
            p *= cpt.row(j)[usize::from(x[v])];
        }
        mass[usize::from(x[bn.class()])] += p;
    }
    let z: f64 = mass.iter().sum();
    mass.into_iter().map(|m| m / z).collect()
}

/// Argmax with lowest-index ties.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in p.iter().enumerate() {
        if x > p[best] {
            best = i;
        }
    }
    best
}

/// A random network over `n` binary nodes: each node draws up to
/// `max_parents` parents among earlier nodes of a shuffled order, and every
/// CPT row is a normalized vector of uniform draws in (0.05, 1).
pub fn random_binary_net(n: usize, max_parents: usize, rng: &mut Rng) -> BayesNet {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut dag = Dag::empty(n);
    for j in 1..n {
        let want = rng.gen_range(0..=max_parents.min(j));
        for _ in 0..want {
            let u = order[rng.gen_range(0..j)];
            let _ = dag.add_edge(u, order[j]);
        }
    }
    let variables: Vec<Variable> = (0..n)
        .map(|i| Variable::new(alloc::format!("x{i}"), &["0", "1"]))
        .collect();
    let cpts = (0..n)
        .map(|v| {
            let parents = dag.parents(v).to_vec();
            let q = 1usize << parents.len();
            let mut probs = Vec::with_capacity(2 * q);
            for _ in 0..q {
                let a: f64 = rng.gen_range(0.05..1.0);
                let b: f64 = rng.gen_range(0.05..1.0);
                probs.push(a / (a + b));
                probs.push(b / (a + b));
            }
            Cpt::new(parents.clone(), vec![2; parents.len()], 2, probs).expect("valid table")
        })
        .collect();
    let class = rng.gen_range(0..n);
    BayesNet::new(variables, dag, cpts, class).expect("valid network")
}

fn active(ctx: &StimulusContext) -> Vec<ConditionKey> {
    let fg: Vec<ConditionKey> = [
        (ctx.person_facing, ConditionKey::PersonFacing),
        (ctx.climbable_present, ConditionKey::ClimbingOpportunity),
        (ctx.obstacle_present, ConditionKey::Obstacle),
        (ctx.horse_available, ConditionKey::HorseAvailable),
        (ctx.soldier_present, ConditionKey::SoldierPresent),
        (ctx.civilian_present, ConditionKey::CivilianPresent),
    ]
    .into_iter()
    .filter_map(|(on, k)| on.then_some(k))
    .collect();
    if !fg.is_empty() {
        fg
    } else if ctx.location_indoor {
        vec![ConditionKey::Indoor]
    } else {
        vec![ConditionKey::Outdoor]
    }
}

/// Exact behavior distribution the capped rejection sampler produces in
/// `ctx`: per active key, the key's feasible mass `f` is hit within the cap
/// with probability `1 - (1 - f)^cap`, otherwise the default key's feasible
/// part is used.
pub fn exact_behavior_distribution(profile: &PlayerProfile, ctx: &StimulusContext) -> [f64; 10] {
    let keys = active(ctx);
    let feasible: Vec<bool> = Attribute::ALL.iter().map(|a| a.is_feasible(ctx)).collect();
    let default = profile.distribution(ConditionKey::Default).probs();
    let dmass: f64 = (0..10).filter(|&i| feasible[i]).map(|i| default[i]).sum();
    let mut out = [0.0; 10];
    for k in &keys {
        let p = profile.distribution(*k).probs();
        let f: f64 = (0..10).filter(|&i| feasible[i]).map(|i| p[i]).sum();
        let miss = libm::pow(1.0 - f, MAX_REJECTIONS as f64);
        for i in 0..10 {
            if feasible[i] {
                let hit = if f > 0.0 { (1.0 - miss) * p[i] / f } else { 0.0 };
                out[i] += (hit + miss * default[i] / dmass) / keys.len() as f64;
            }
        }
    }
    out
}

/// Exact per-tick behavior probabilities under a scenario, summing over all
/// 128 contexts.
pub fn exact_tick_marginals(scenario: &Scenario, profile: &PlayerProfile) -> [f64; 10] {
    let mut out = [0.0; 10];
    for bits in 0..128u8 {
        let ctx = StimulusContext::from_bits(bits);
        let mut w = 1.0;
        for f in crate::behavior::Stimulus::ALL {
            let p = scenario.probabilities.get(f);
            w *= if ctx.get(f) { p } else { 1.0 - p };
        }
        if w == 0.0 {
            continue;
        }
        let d = exact_behavior_distribution(profile, &ctx);
        for i in 0..10 {
            out[i] += w * d[i];
        }
    }
    out
}

/// Exact per-tick probabilities of the movement column's walk and run
/// outcomes.
pub fn exact_walk_run(scenario: &Scenario, profile: &PlayerProfile) -> (f64, f64) {
    let mut walk = 0.0;
    let mut run = 0.0;
    for bits in 0..128u8 {
        let ctx = StimulusContext::from_bits(bits);
        let mut w = 1.0;
        for f in crate::behavior::Stimulus::ALL {
            let p = scenario.probabilities.get(f);
            w *= if ctx.get(f) { p } else { 1.0 - p };
        }
        let m = exact_behavior_distribution(profile, &ctx)[Attribute::Movement.column()];
        if ctx.location_indoor {
            walk += w * m;
        } else {
            run += w * m;
        }
    }
    (walk, run)
}
