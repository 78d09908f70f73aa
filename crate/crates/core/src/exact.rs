//! Brute-force egalitarian optimizer over all n^m allocations.
//!
//! The enumeration walks owner sequences in lexicographic order (owner of
//! resource 0 most significant) keeping a stack of per-agent prefix
//! utilities, so each step touches only the digits that changed. Prefix
//! sums accumulate in ascending resource order, matching
//! [`crate::model::welfare_unchecked`] bit for bit; ties are therefore
//! exact, and the first maximum encountered is the lexicographically
//! smallest optimal allocation.

use crate::error::{Error, Result};
use crate::model::{Allocation, PreferenceProfile, Welfare};

/// Default enumeration budget: 2^24 allocations (a 4x10 instance needs 4^10).
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// An exact optimum with its welfare and, on request, the number of
/// allocations attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub best: Allocation,
    pub welfare: Welfare,
    pub optimal_set_size: Option<u64>,
}

/// Exhaustive egalitarian optimum of `profile`.
///
/// Errors when n^m exceeds `budget`. Ties break to the lexicographically
/// smallest owner sequence.
pub fn solve_exact(profile: &PreferenceProfile, budget: u128) -> Result<ExactSolution> {
    enumerate(profile, budget, false)
}

/// Like [`solve_exact`], additionally counting the optimal allocations.
pub fn solve_exact_counting(profile: &PreferenceProfile, budget: u128) -> Result<ExactSolution> {
    enumerate(profile, budget, true)
}

/// Whether some allocation gives every agent strictly positive utility.
///
/// With all preference values positive (a model invariant) this is exactly
/// the pigeonhole condition m >= n: distinct resources can cover every
/// agent, and with m < n some agent is always empty-handed.
pub fn exists_positive_allocation(profile: &PreferenceProfile) -> bool {
    profile.m_resources() >= profile.n_agents()
}

fn enumerate(profile: &PreferenceProfile, budget: u128, count_optima: bool) -> Result<ExactSolution> {
    let n = profile.n_agents();
    let m = profile.m_resources();
    if n == 0 {
        return Err(Error::Config("profile has no agents".into()));
    }
    if let Some(bad) = profile.rows.iter().position(|row| row.len() != m) {
        return Err(Error::Dimension(format!(
            "agent {} row has {} values, expected {m}",
            bad + 1,
            profile.rows[bad].len()
        )));
    }
    let candidates = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if candidates > budget {
        return Err(Error::Budget { candidates, budget });
    }
    if m == 0 {
        return Ok(ExactSolution {
            best: Allocation::new(Vec::new()),
            welfare: 0.0,
            optimal_set_size: count_optima.then_some(1),
        });
    }

    let rows = &profile.rows;
    // last[a]: agent a's value for the final resource, unrolled below.
    let last: Vec<f64> = rows.iter().map(|row| row[m - 1]).collect();
    // prefix[d*n..][..n]: per-agent utilities over resources 0..d.
    let mut prefix = vec![0.0f64; m * n];
    let mut owner = vec![0usize; m];
    for j in 0..m - 1 {
        extend_prefix(&mut prefix, rows, &owner, j, n);
    }

    let mut best_welfare = f64::NEG_INFINITY;
    let mut best_owner = vec![0usize; m];
    let mut optima = 0u64;

    loop {
        // Minimum and runner-up of the prefix utilities: assigning the last
        // resource to x only raises x's utility, so the other agents'
        // minimum is either the overall minimum or, when x holds it alone,
        // the runner-up.
        let base = &prefix[(m - 1) * n..m * n];
        let mut min = f64::INFINITY;
        let mut arg_min = 0;
        for (a, &u) in base.iter().enumerate() {
            if u < min {
                min = u;
                arg_min = a;
            }
        }
        let mut second = f64::INFINITY;
        for (a, &u) in base.iter().enumerate() {
            if a != arg_min && u < second {
                second = u;
            }
        }
        for x in 0..n {
            let own = base[x] + last[x];
            let others = if x == arg_min { second } else { min };
            let welfare = if own < others { own } else { others };
            if welfare > best_welfare {
                best_welfare = welfare;
                best_owner.copy_from_slice(&owner);
                best_owner[m - 1] = x;
                optima = 1;
            } else if count_optima && welfare == best_welfare {
                optima += 1;
            }
        }

        // Mixed-radix increment over the prefix digits, last digit fastest.
        if m == 1 {
            break;
        }
        let mut d = m - 2;
        loop {
            if owner[d] + 1 < n {
                owner[d] += 1;
                break;
            }
            owner[d] = 0;
            if d == 0 {
                return Ok(finish(best_owner, best_welfare, count_optima, optima));
            }
            d -= 1;
        }
        for j in d..m - 1 {
            extend_prefix(&mut prefix, rows, &owner, j, n);
        }
    }
    Ok(finish(best_owner, best_welfare, count_optima, optima))
}

/// Build prefix row j+1 from row j under the current owner of resource j.
#[inline]
fn extend_prefix(prefix: &mut [f64], rows: &[Vec<f64>], owner: &[usize], j: usize, n: usize) {
    prefix.copy_within(j * n..(j + 1) * n, (j + 1) * n);
    let o = owner[j];
    prefix[(j + 1) * n + o] += rows[o][j];
}

fn finish(owner: Vec<usize>, welfare: f64, count_optima: bool, optima: u64) -> ExactSolution {
    ExactSolution {
        best: Allocation::new(owner),
        welfare,
        optimal_set_size: count_optima.then_some(optima),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{egalitarian_welfare, Mode};

    fn profile(rows: Vec<Vec<f64>>) -> PreferenceProfile {
        PreferenceProfile { rows, mode: Mode::Unlimited }
    }

    #[test]
    fn single_resource_ties_break_to_first_agent() {
        let sol = solve_exact(&profile(vec![vec![5.0], vec![7.0]]), DEFAULT_BUDGET).unwrap();
        assert_eq!(sol.welfare, 0.0);
        assert_eq!(sol.best.owner, vec![0]);
    }

    #[test]
    fn symmetric_two_by_two_splits() {
        let sol = solve_exact(
            &profile(vec![vec![60.0, 40.0], vec![60.0, 40.0]]),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(sol.welfare, 40.0);
        assert_eq!(sol.best.owner, vec![0, 1]);
    }

    #[test]
    fn counting_finds_both_symmetric_optima() {
        let sol = solve_exact_counting(
            &profile(vec![vec![60.0, 40.0], vec![60.0, 40.0]]),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(sol.optimal_set_size, Some(2));
    }

    #[test]
    fn welfare_matches_model_evaluation() {
        let p = profile(vec![
            vec![10.0, 20.0, 30.0, 5.0],
            vec![25.0, 5.0, 10.0, 30.0],
            vec![15.0, 15.0, 15.0, 15.0],
        ]);
        let sol = solve_exact(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(sol.welfare, egalitarian_welfare(&sol.best, &p).unwrap());
    }

    #[test]
    fn budget_overflow_is_reported() {
        let p = profile(vec![vec![1.0; 25], vec![2.0; 25]]);
        match solve_exact(&p, DEFAULT_BUDGET) {
            Err(Error::Budget { candidates, budget }) => {
                assert_eq!(candidates, 1 << 25);
                assert_eq!(budget, DEFAULT_BUDGET);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn scale_covariance_with_exact_factor() {
        let p = profile(vec![
            vec![10.0, 20.0, 30.0, 5.0, 8.0],
            vec![25.0, 5.0, 10.0, 30.0, 12.0],
        ]);
        let scaled = profile(p.rows.iter().map(|r| r.iter().map(|v| v * 4.0).collect()).collect());
        let a = solve_exact(&p, DEFAULT_BUDGET).unwrap();
        let b = solve_exact(&scaled, DEFAULT_BUDGET).unwrap();
        assert_eq!(b.best.owner, a.best.owner);
        assert_eq!(b.welfare, 4.0 * a.welfare);
    }

    #[test]
    fn monotone_in_added_resources() {
        let base = vec![vec![10.0, 20.0], vec![15.0, 5.0], vec![8.0, 9.0]];
        let extended: Vec<Vec<f64>> = base
            .iter()
            .map(|r| {
                let mut row = r.clone();
                row.push(12.5);
                row
            })
            .collect();
        let w0 = solve_exact(&profile(base), DEFAULT_BUDGET).unwrap().welfare;
        let w1 = solve_exact(&profile(extended), DEFAULT_BUDGET).unwrap().welfare;
        assert!(w1 >= w0, "adding a resource lowered welfare: {w0} -> {w1}");
    }

    #[test]
    fn positive_allocation_is_pigeonhole() {
        assert!(exists_positive_allocation(&profile(vec![vec![1.0; 10]; 4])));
        assert!(exists_positive_allocation(&profile(vec![vec![1.0; 2]; 2])));
        assert!(!exists_positive_allocation(&profile(vec![vec![1.0; 2]; 3])));
    }

    #[test]
    fn ragged_profile_is_a_dimension_error() {
        let p = profile(vec![vec![1.0, 2.0], vec![3.0]]);
        assert!(matches!(solve_exact(&p, DEFAULT_BUDGET), Err(Error::Dimension(_))));
    }
}
