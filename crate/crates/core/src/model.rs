//! Core domain types: preference profiles, allocations, problem instances,
//! and the utility/welfare evaluation shared by every solver.
//!
//! Utilities are always accumulated in ascending resource order. Every other
//! component (solvers, profit accounting, tests) relies on that fixed
//! summation order so that equal bundles produce bit-identical doubles.

use crate::error::{Error, Result, RowRef, Violation};

/// Smallest admissible preference value; the open interval (0, 100) is
/// enforced as the closed interval [EPS, 100 - EPS].
pub const EPS: f64 = 1e-6;

/// Largest admissible preference value.
pub const MAX_VALUE: f64 = 100.0 - EPS;

/// Absolute tolerance on limited-mode row sums for internally produced data.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Loose sum tolerance for published data sets whose printed rows carry
/// 2-3 decimals; the bundled limited example has rows summing to
/// 99.947..99.954, so anything tighter than 0.06 rejects it.
pub const LOOSE_SUM_TOLERANCE: f64 = 0.1;

/// One agent's per-resource valuations.
pub type PreferenceVector = Vec<f64>;

/// Egalitarian social welfare: the minimum utility across all agents.
pub type Welfare = f64;

/// Scenario rules governing admissible preference vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Values free within (0, 100).
    Unlimited,
    /// Values within (0, 100) and each row summing exactly to `r`.
    Limited { r: f64 },
}

impl Mode {
    /// The row-sum target, if this mode has one.
    pub fn sum_target(&self) -> Option<f64> {
        match self {
            Mode::Unlimited => None,
            Mode::Limited { r } => Some(*r),
        }
    }
}

/// All agents' reported preference vectors plus the scenario mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceProfile {
    /// Row i holds agent i's per-resource valuations.
    pub rows: Vec<PreferenceVector>,
    pub mode: Mode,
}

impl PreferenceProfile {
    pub fn n_agents(&self) -> usize {
        self.rows.len()
    }

    /// Resource count, taken from the first row.
    pub fn m_resources(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// Assignment of every resource to exactly one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    /// owner[j] is the 0-based agent index receiving resource j.
    pub owner: Vec<usize>,
}

impl Allocation {
    pub fn new(owner: Vec<usize>) -> Self {
        Allocation { owner }
    }

    /// The resources assigned to `agent`, in ascending order.
    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&j| self.owner[j] == agent).collect()
    }
}

/// A reported profile plus the designated liar and its true preferences.
///
/// `profile.rows[liar]` is what the auctioneer sees; `truth` is used only
/// for profit accounting and never enters a solve unless it is also the
/// reported row.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub profile: PreferenceProfile,
    /// 0-based index of the lying agent.
    pub liar: usize,
    pub truth: PreferenceVector,
}

impl ProblemInstance {
    /// The liar's rivals: every reported row except the liar's, in order.
    pub fn rival_rows(&self) -> Vec<PreferenceVector> {
        self.profile
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.liar)
            .map(|(_, row)| row.clone())
            .collect()
    }

    /// A copy of the profile with the liar's row replaced by `reported`.
    pub fn profile_with_liar_row(&self, reported: &[f64]) -> PreferenceProfile {
        let mut profile = self.profile.clone();
        profile.rows[self.liar] = reported.to_vec();
        profile
    }
}

/// Sum of `prefs` over the resources owned by `agent`, in ascending
/// resource order. An agent owning nothing gets 0.
pub fn agent_utility(alloc: &Allocation, prefs: &[f64], agent: usize) -> Result<f64> {
    if alloc.owner.len() != prefs.len() {
        return Err(Error::Dimension(format!(
            "allocation covers {} resources, preference vector has {}",
            alloc.owner.len(),
            prefs.len()
        )));
    }
    Ok(utility_unchecked(&alloc.owner, prefs, agent))
}

/// Minimum agent utility under `alloc`; 0 whenever some agent is
/// empty-handed.
pub fn egalitarian_welfare(alloc: &Allocation, profile: &PreferenceProfile) -> Result<Welfare> {
    let m = profile.m_resources();
    if alloc.owner.len() != m {
        return Err(Error::Dimension(format!(
            "allocation covers {} resources, profile has {m}",
            alloc.owner.len()
        )));
    }
    if let Some(&bad) = alloc.owner.iter().find(|&&a| a >= profile.n_agents()) {
        return Err(Error::Dimension(format!(
            "owner index {bad} out of range for {} agents",
            profile.n_agents()
        )));
    }
    Ok(welfare_unchecked(&alloc.owner, &profile.rows))
}

/// Ascending-order utility sum without dimension checks; shared hot path.
pub(crate) fn utility_unchecked(owner: &[usize], prefs: &[f64], agent: usize) -> f64 {
    let mut total = 0.0;
    for (j, &o) in owner.iter().enumerate() {
        if o == agent {
            total += prefs[j];
        }
    }
    total
}

/// Minimum ascending-order utility over all agents, without checks.
pub(crate) fn welfare_unchecked(owner: &[usize], rows: &[PreferenceVector]) -> f64 {
    let mut min = f64::INFINITY;
    for (agent, row) in rows.iter().enumerate() {
        let u = utility_unchecked(owner, row, agent);
        if u < min {
            min = u;
        }
    }
    min
}

fn validate_row(row: RowRef, values: &[f64], m: usize, mode: Mode, sum_tolerance: f64, out: &mut Vec<Violation>) {
    if values.len() != m {
        out.push(Violation::RowLength { row, len: values.len(), expected: m });
        return;
    }
    for (col, &value) in values.iter().enumerate() {
        if !(EPS..=MAX_VALUE).contains(&value) {
            out.push(Violation::ValueOutOfRange { row, col, value });
        }
    }
    if let Some(r) = mode.sum_target() {
        let sum: f64 = values.iter().sum();
        if (sum - r).abs() > sum_tolerance {
            out.push(Violation::RowSum { row, sum, expected: r, tolerance: sum_tolerance });
        }
    }
}

/// Every invariant violation in `inst`, with coordinates; empty means valid.
///
/// `sum_tolerance` bounds limited-mode row-sum deviations: use
/// [`SUM_TOLERANCE`] for internally produced data and
/// [`LOOSE_SUM_TOLERANCE`] when loading published tables.
pub fn validate_instance(inst: &ProblemInstance, sum_tolerance: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = inst.profile.m_resources();
    for (i, row) in inst.profile.rows.iter().enumerate() {
        validate_row(RowRef::Agent(i), row, m, inst.profile.mode, sum_tolerance, &mut out);
    }
    validate_row(RowRef::Truth, &inst.truth, m, inst.profile.mode, sum_tolerance, &mut out);
    if inst.liar >= inst.profile.n_agents() {
        out.push(Violation::LiarIndex { liar: inst.liar, agents: inst.profile.n_agents() });
    }
    out
}

/// [`validate_instance`] folded into a `Result`.
pub fn check_instance(inst: &ProblemInstance, sum_tolerance: f64) -> Result<()> {
    let violations = validate_instance(inst, sum_tolerance);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(violations))
    }
}

/// Validate a single vector against a mode, as a liar's reported row.
pub fn check_vector(values: &[f64], m: usize, mode: Mode, sum_tolerance: f64) -> Result<()> {
    let mut out = Vec::new();
    validate_row(RowRef::Truth, values, m, mode, sum_tolerance, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_profile() -> PreferenceProfile {
        PreferenceProfile {
            rows: vec![vec![60.0, 40.0], vec![60.0, 40.0]],
            mode: Mode::Unlimited,
        }
    }

    #[test]
    fn utility_sums_owned_resources() {
        let alloc = Allocation::new(vec![0, 1]);
        let profile = toy_profile();
        assert_eq!(agent_utility(&alloc, &profile.rows[0], 0).unwrap(), 60.0);
        assert_eq!(agent_utility(&alloc, &profile.rows[1], 1).unwrap(), 40.0);
    }

    #[test]
    fn empty_bundle_scores_zero() {
        let alloc = Allocation::new(vec![0, 0]);
        assert_eq!(agent_utility(&alloc, &[60.0, 40.0], 1).unwrap(), 0.0);
    }

    #[test]
    fn permuting_resources_preserves_utilities() {
        // Mathematical invariance only: summation order changes, so the
        // comparison is approximate, not bitwise.
        let prefs = vec![17.67, 12.58, 4.35, 12.0, 5.47];
        let owner = vec![0, 1, 0, 1, 0];
        let perm = [3, 0, 4, 2, 1];
        let prefs_p: Vec<f64> = perm.iter().map(|&j| prefs[j]).collect();
        let owner_p: Vec<usize> = perm.iter().map(|&j| owner[j]).collect();
        for agent in 0..2 {
            let before = agent_utility(&Allocation::new(owner.clone()), &prefs, agent).unwrap();
            let after =
                agent_utility(&Allocation::new(owner_p.clone()), &prefs_p, agent).unwrap();
            assert!((before - after).abs() < 1e-12, "agent {agent}: {before} vs {after}");
        }
    }

    #[test]
    fn owning_everything_recovers_the_row_sum() {
        // In limited mode the whole-bundle utility is the row sum, hence r
        // up to the renormalization tolerance.
        let row = vec![25.0, 25.0, 30.0, 20.0];
        let alloc = Allocation::new(vec![1; 4]);
        let u = agent_utility(&alloc, &row, 1).unwrap();
        assert!((u - 100.0).abs() <= SUM_TOLERANCE, "{u}");
        assert_eq!(agent_utility(&alloc, &row, 0).unwrap(), 0.0);
    }

    #[test]
    fn welfare_is_min_utility() {
        let profile = toy_profile();
        assert_eq!(egalitarian_welfare(&Allocation::new(vec![0, 1]), &profile).unwrap(), 40.0);
        assert_eq!(egalitarian_welfare(&Allocation::new(vec![0, 0]), &profile).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let alloc = Allocation::new(vec![0, 1, 0]);
        assert!(agent_utility(&alloc, &[1.0, 2.0], 0).is_err());
        assert!(egalitarian_welfare(&alloc, &toy_profile()).is_err());
    }

    #[test]
    fn owner_out_of_range_is_an_error() {
        let alloc = Allocation::new(vec![0, 2]);
        assert!(egalitarian_welfare(&alloc, &toy_profile()).is_err());
    }

    #[test]
    fn bundle_lists_owned_resources() {
        let alloc = Allocation::new(vec![1, 0, 1, 1]);
        assert_eq!(alloc.bundle(1), vec![0, 2, 3]);
        assert_eq!(alloc.bundle(0), vec![1]);
    }

    #[test]
    fn validation_accepts_valid_limited_instance() {
        let inst = ProblemInstance {
            profile: PreferenceProfile {
                rows: vec![vec![50.0, 50.0], vec![30.0, 70.0]],
                mode: Mode::Limited { r: 100.0 },
            },
            liar: 0,
            truth: vec![50.0, 50.0],
        };
        assert!(validate_instance(&inst, SUM_TOLERANCE).is_empty());
    }

    #[test]
    fn validation_flags_bad_sum_and_range() {
        let inst = ProblemInstance {
            profile: PreferenceProfile {
                rows: vec![vec![50.0, 49.0], vec![0.0, 100.0]],
                mode: Mode::Limited { r: 100.0 },
            },
            liar: 0,
            truth: vec![50.0, 50.0],
        };
        let violations = validate_instance(&inst, SUM_TOLERANCE);
        assert!(violations.iter().any(|v| matches!(v, Violation::RowSum { row: RowRef::Agent(0), .. })));
        assert!(violations.iter().any(
            |v| matches!(v, Violation::ValueOutOfRange { row: RowRef::Agent(1), col: 0, .. })
        ));
        assert!(violations.iter().any(
            |v| matches!(v, Violation::ValueOutOfRange { row: RowRef::Agent(1), col: 1, .. })
        ));
    }

    #[test]
    fn validation_flags_liar_and_truth_rows() {
        let inst = ProblemInstance {
            profile: toy_profile(),
            liar: 2,
            truth: vec![60.0],
        };
        let violations = validate_instance(&inst, SUM_TOLERANCE);
        assert!(violations.iter().any(|v| matches!(v, Violation::LiarIndex { liar: 2, agents: 2 })));
        assert!(violations.iter().any(
            |v| matches!(v, Violation::RowLength { row: RowRef::Truth, len: 1, expected: 2 })
        ));
    }

    #[test]
    fn loose_tolerance_admits_rounded_rows() {
        let inst = ProblemInstance {
            profile: PreferenceProfile {
                rows: vec![vec![49.97, 49.98], vec![50.0, 50.0]],
                mode: Mode::Limited { r: 100.0 },
            },
            liar: 0,
            truth: vec![49.97, 49.98],
        };
        assert!(!validate_instance(&inst, SUM_TOLERANCE).is_empty());
        assert!(validate_instance(&inst, LOOSE_SUM_TOLERANCE).is_empty());
    }

    #[test]
    fn rival_rows_skip_the_liar() {
        let inst = ProblemInstance {
            profile: PreferenceProfile {
                rows: vec![vec![1.0], vec![2.0], vec![3.0]],
                mode: Mode::Unlimited,
            },
            liar: 1,
            truth: vec![2.0],
        };
        assert_eq!(inst.rival_rows(), vec![vec![1.0], vec![3.0]]);
        let swapped = inst.profile_with_liar_row(&[9.0]);
        assert_eq!(swapped.rows[1], vec![9.0]);
        assert_eq!(inst.profile.rows[1], vec![2.0]);
    }
}
