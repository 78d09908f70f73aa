//! Shared helpers for the integration suites: bundled-data loading and an
//! independent brute-force solver to check the optimizer against.

use std::path::PathBuf;

use egalloc::model::{agent_utility, check_instance, Allocation, PreferenceProfile};
use egalloc::io::parse_instance;
use egalloc::ProblemInstance;

#[allow(dead_code)]
pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[allow(dead_code)]
pub fn load_instance(name: &str) -> ProblemInstance {
    let path = data_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    let inst = parse_instance(&text).expect("bundled instance parses");
    check_instance(&inst, 0.1).expect("bundled instance validates");
    inst
}

/// Welfare of `owner` computed agent by agent through the public
/// checked API.
#[allow(dead_code)]
pub fn welfare_of(owner: &[usize], profile: &PreferenceProfile) -> f64 {
    let alloc = Allocation { owner: owner.to_vec() };
    (0..profile.n_agents())
        .map(|a| agent_utility(&alloc, &profile.rows[a], a).unwrap())
        .fold(f64::INFINITY, f64::min)
}

/// Independent exact solver: plain recursion over resources, welfare
/// recomputed from scratch at every leaf. Returns the lexicographically
/// smallest argmax, matching the production solver's tie-break.
#[allow(dead_code)]
pub fn solve_recursive(profile: &PreferenceProfile) -> (Vec<usize>, f64) {
    fn descend(
        profile: &PreferenceProfile,
        owner: &mut Vec<usize>,
        best: &mut (Vec<usize>, f64),
    ) {
        if owner.len() == profile.m_resources() {
            let w = welfare_of(owner, profile);
            if w > best.1 {
                *best = (owner.clone(), w);
            }
            return;
        }
        for agent in 0..profile.n_agents() {
            owner.push(agent);
            descend(profile, owner, best);
            owner.pop();
        }
    }

    let mut best = (Vec::new(), f64::NEG_INFINITY);
    descend(profile, &mut Vec::new(), &mut best);
    best
}
