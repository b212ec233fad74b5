#![allow(dead_code)]

pub mod naive;

use std::collections::BTreeMap;

use infoseg::model::{AccessSet, ExactSetCounts, UnitSpace, UnitSpaceSpec};
use infoseg::personhood::Membership;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn unit_ids(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("u{i}")).collect()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Random exact-set counts: up to `max_sets` distinct access sets per group,
/// with at most `max_people` people in total.
pub fn random_counts(
    rng: &mut ChaCha8Rng,
    m: usize,
    groups: usize,
    max_sets: usize,
    max_people: u64,
) -> ExactSetCounts {
    let mut counts = ExactSetCounts::new(unit_ids(m)).unwrap();
    let full = (1u32 << m) - 1;
    let per_group = (max_people / groups as u64).max(1);
    for g in 0..groups {
        let group = format!("g{g}");
        counts.ensure_group(&group);
        let sets = rng.gen_range(1..=max_sets);
        let mut budget = per_group;
        for _ in 0..sets {
            if budget == 0 {
                break;
            }
            let set = AccessSet::from_bits(rng.gen_range(1..=full));
            let n = rng.gen_range(1..=budget.min(per_group / sets as u64 + 1));
            counts.add(&group, set, n).unwrap();
            budget -= n;
        }
    }
    counts
}

/// Random membership log over `m` units; every person follows at least one unit.
pub fn random_log(rng: &mut ChaCha8Rng, m: usize, groups: usize, people: usize) -> Vec<Membership> {
    let units = unit_ids(m);
    let mut log = Vec::new();
    for p in 0..people {
        let group = format!("g{}", rng.gen_range(0..groups));
        let k = rng.gen_range(1..=m);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.shuffle(rng);
        for &u in &idx[..k] {
            log.push(Membership::new(format!("p{p}"), group.clone(), units[u].clone()));
        }
    }
    log.shuffle(rng);
    log
}

/// Random 1-D unit space with distinct positions, some topics and a random center.
pub fn random_space(rng: &mut ChaCha8Rng, m: usize) -> UnitSpace {
    let ids = unit_ids(m);
    let mut xs: Vec<f64> = Vec::new();
    while xs.len() < m {
        let x = (rng.gen_range(-1000i32..=1000) as f64) / 500.0;
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    let mut topics: Vec<u64> = (0..m).map(|_| rng.gen_range(0..10)).collect();
    if topics.iter().all(|&t| t == 0) {
        topics[0] = 1;
    }
    let center = ids[rng.gen_range(0..m)].clone();
    UnitSpaceSpec::new(ids)
        .with_line_positions(&xs)
        .with_topic_counts(topics)
        .with_center(center)
        .validate()
        .unwrap()
}

/// Per-group masses as plain vectors, keyed by group id.
pub fn masses(table: &infoseg::model::PersonhoodTable) -> BTreeMap<String, Vec<f64>> {
    table.groups().map(|(g, gp)| (g.to_string(), gp.mass.clone())).collect()
}
