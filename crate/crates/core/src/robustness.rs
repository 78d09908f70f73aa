//! Imprecise-information experiments: perturb rival preferences with
//! Gaussian noise of growing standard deviation and measure whether a
//! precomputed lie stays profitable.
//!
//! Normal deviates come from `rand_distr::Normal` (Marsaglia-Tsang
//! ziggurat); the sampler name is recorded in report metadata because the
//! exact byte stream of results depends on it.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::deception::renormalize_limited;
use crate::error::{Error, Result};
use crate::model::{utility_unchecked, Mode, ProblemInstance, EPS, MAX_VALUE};
use crate::rng::substream;
use crate::solver::Solver;

/// Name of the normal sampler, for report provenance.
pub const NORMAL_SAMPLER: &str = "rand_distr::Normal (ziggurat)";

/// One robustness run: a noise grid, a replicate count, and a solver.
#[derive(Debug, Clone)]
pub struct RobustnessConfig {
    /// Noise standard deviations, non-negative and ascending.
    pub sigmas: Vec<f64>,
    /// Replicates per sigma.
    pub replicates: usize,
    pub seed: u64,
    pub solver: Solver,
}

impl RobustnessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.sigmas.is_empty() {
            return Err(Error::Config("at least one sigma is required".into()));
        }
        for pair in self.sigmas.windows(2) {
            if pair[1] < pair[0] {
                return Err(Error::Config(format!(
                    "sigmas must be ascending, found {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if self.sigmas[0] < 0.0 {
            return Err(Error::Config(format!("negative sigma {}", self.sigmas[0])));
        }
        Ok(())
    }
}

/// Aggregates for one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPoint {
    pub sigma: f64,
    pub mean_profit: f64,
    pub mean_truthful_utility: f64,
    pub mean_lying_utility: f64,
    /// Sample standard deviation of profit across replicates (0 when
    /// replicates == 1).
    pub sd_profit: f64,
}

/// Per-sigma aggregates over all replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessCurve {
    pub points: Vec<SigmaPoint>,
}

/// Resample every rival entry as Normal(mean = estimated value, sd =
/// sigma), clamped to the admissible range; limited-mode rows are then
/// rescaled (all coordinates free) back to sum r.
///
/// Sigma 0 returns the rows untouched, drawing nothing from the stream,
/// so noiseless results are bit-identical to the unperturbed instance
/// even when the estimated rows only sum to r approximately.
pub fn perturb_profile(
    estimated: &[Vec<f64>],
    sigma: f64,
    rng: &mut ChaCha8Rng,
    mode: Mode,
) -> Result<Vec<Vec<f64>>> {
    if sigma < 0.0 {
        return Err(Error::Config(format!("negative sigma {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(estimated.to_vec());
    }
    let mut rows = Vec::with_capacity(estimated.len());
    for row in estimated {
        let mut perturbed = Vec::with_capacity(row.len());
        for &mean in row {
            let normal = Normal::new(mean, sigma).expect("sigma is finite and positive");
            perturbed.push(normal.sample(rng).clamp(EPS, MAX_VALUE));
        }
        if let Mode::Limited { r } = mode {
            perturbed = renormalize_limited(&perturbed, &[], r)?;
        }
        rows.push(perturbed);
    }
    Ok(rows)
}

/// Measure a fixed lie against noisy rival estimates.
///
/// For each sigma and replicate, rivals are redrawn on the substream
/// keyed by (sigma index, replicate index), the instance is solved twice
/// (liar truthful, liar lying), and both outcomes are accounted at the
/// liar's true preferences. The lie itself is never recomputed.
pub fn robustness_experiment(
    inst: &ProblemInstance,
    lie: &[f64],
    cfg: &RobustnessConfig,
) -> Result<RobustnessCurve> {
    cfg.validate()?;
    let m = inst.profile.m_resources();
    if lie.len() != m {
        return Err(Error::Dimension(format!("lie has {} values, expected {m}", lie.len())));
    }
    let rivals = inst.rival_rows();
    let rival_indices: Vec<usize> =
        (0..inst.profile.n_agents()).filter(|&i| i != inst.liar).collect();

    let mut points = Vec::with_capacity(cfg.sigmas.len());
    for (si, &sigma) in cfg.sigmas.iter().enumerate() {
        let mut profits = Vec::with_capacity(cfg.replicates);
        let mut truthful_sum = 0.0;
        let mut lying_sum = 0.0;
        for rep in 0..cfg.replicates {
            let mut rng = substream(cfg.seed, &[si as u64, rep as u64]);
            let perturbed = perturb_profile(&rivals, sigma, &mut rng, inst.profile.mode)?;

            let mut profile = inst.profile.clone();
            for (row, &agent) in perturbed.into_iter().zip(&rival_indices) {
                profile.rows[agent] = row;
            }
            profile.rows[inst.liar] = inst.truth.clone();
            let (alloc_truth, _) = cfg.solver.solve(&profile)?;
            profile.rows[inst.liar] = lie.to_vec();
            let (alloc_lie, _) = cfg.solver.solve(&profile)?;

            let u_truth = utility_unchecked(&alloc_truth.owner, &inst.truth, inst.liar);
            let u_lie = utility_unchecked(&alloc_lie.owner, &inst.truth, inst.liar);
            truthful_sum += u_truth;
            lying_sum += u_lie;
            profits.push(u_lie - u_truth);
        }
        let count = cfg.replicates as f64;
        let mean_profit = profits.iter().sum::<f64>() / count;
        let sd_profit = if cfg.replicates > 1 {
            let ss: f64 = profits.iter().map(|p| (p - mean_profit).powi(2)).sum();
            (ss / (count - 1.0)).sqrt()
        } else {
            0.0
        };
        points.push(SigmaPoint {
            sigma,
            mean_profit,
            mean_truthful_utility: truthful_sum / count,
            mean_lying_utility: lying_sum / count,
            sd_profit,
        });
    }
    Ok(RobustnessCurve { points })
}
