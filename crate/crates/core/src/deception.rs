//! Strategic misreporting: profit evaluation of a lie, the ten predefined
//! lying strategies with progressive levels, limited-mode renormalization,
//! the closed-form optimal lie for the unlimited scenario, and the bilevel
//! ULGA search over lies.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ga::{evolve_generic, GAConfig, GenomeSpec};
use crate::model::{
    check_vector, utility_unchecked, Allocation, Mode, ProblemInstance, SUM_TOLERANCE, EPS,
    MAX_VALUE,
};
use crate::rng::substream;
use crate::solver::Solver;

/// Substream tag under which a sweep's random target sets are drawn.
const TARGET_TAG: u64 = 0x7461_7267;

/// Standard deviation of ULGA's per-gene Gaussian mutation, in utility
/// points.
const ULGA_MUTATION_SIGMA: f64 = 5.0;

/// Whether a strategy raises or lowers its targeted preferences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Decrease,
    Increase,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Decrease => "decrease",
            Direction::Increase => "increase",
        }
    }
}

/// How a strategy picks the resources it distorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    RandomResources,
    MostValuedByOthers,
    LeastValuedByOthers,
    MostValuedBySelf,
    LeastValuedBySelf,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::RandomResources => "random",
            Target::MostValuedByOthers => "most-others",
            Target::LeastValuedByOthers => "least-others",
            Target::MostValuedBySelf => "most-self",
            Target::LeastValuedBySelf => "least-self",
        }
    }
}

/// One of the ten predefined lying strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategy {
    /// 1-based strategy number.
    pub id: u8,
    pub direction: Direction,
    pub target: Target,
    /// How many resources the strategy distorts.
    pub top_k: usize,
}

/// Default number of targeted resources.
pub const DEFAULT_TOP_K: usize = 3;

impl Strategy {
    /// The fixed id -> (direction, target) table.
    pub fn by_id(id: u8, top_k: usize) -> Result<Strategy> {
        use Direction::*;
        use Target::*;
        let (direction, target) = match id {
            1 => (Decrease, RandomResources),
            2 => (Increase, RandomResources),
            3 => (Increase, MostValuedByOthers),
            4 => (Increase, LeastValuedByOthers),
            5 => (Increase, MostValuedBySelf),
            6 => (Increase, LeastValuedBySelf),
            7 => (Decrease, MostValuedByOthers),
            8 => (Decrease, LeastValuedByOthers),
            9 => (Decrease, MostValuedBySelf),
            10 => (Decrease, LeastValuedBySelf),
            _ => return Err(Error::Config(format!("strategy id {id} outside 1..=10"))),
        };
        if top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        Ok(Strategy { id, direction, target, top_k })
    }

    /// All ten strategies in id order.
    pub fn all(top_k: usize) -> Result<Vec<Strategy>> {
        (1..=10).map(|id| Strategy::by_id(id, top_k)).collect()
    }

    /// Human-readable summary, e.g. "decrease random (top 3)".
    pub fn describe(&self) -> String {
        format!("{} {} (top {})", self.direction.label(), self.target.label(), self.top_k)
    }
}

/// Indices sorted by score (descending or ascending), ties by lower index.
fn ranked(scores: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = if descending {
            scores[b].total_cmp(&scores[a])
        } else {
            scores[a].total_cmp(&scores[b])
        };
        ord.then(a.cmp(&b))
    });
    idx
}

/// The resources a strategy distorts, in ascending index order.
///
/// Self rankings use `truth`; other rankings use the column sums of
/// `estimated_others`. Random strategies draw `top_k` distinct resources
/// from a substream of `sweep_seed` keyed by the strategy id, so every
/// level of a sweep targets the same set.
pub fn strategy_targets(
    strat: &Strategy,
    truth: &[f64],
    estimated_others: &[Vec<f64>],
    sweep_seed: u64,
) -> Result<Vec<usize>> {
    let m = truth.len();
    if strat.top_k > m {
        return Err(Error::Config(format!(
            "top_k {} exceeds the {m} available resources",
            strat.top_k
        )));
    }
    let mut targets = match strat.target {
        Target::RandomResources => {
            let mut rng = substream(sweep_seed, &[TARGET_TAG, strat.id as u64]);
            let mut pool: Vec<usize> = (0..m).collect();
            for i in 0..strat.top_k {
                let j = rng.gen_range(i..m);
                pool.swap(i, j);
            }
            pool.truncate(strat.top_k);
            pool
        }
        Target::MostValuedBySelf => ranked(truth, true)[..strat.top_k].to_vec(),
        Target::LeastValuedBySelf => ranked(truth, false)[..strat.top_k].to_vec(),
        Target::MostValuedByOthers | Target::LeastValuedByOthers => {
            let mut column_sums = vec![0.0f64; m];
            for row in estimated_others {
                if row.len() != m {
                    return Err(Error::Dimension(format!(
                        "rival row has {} values, expected {m}",
                        row.len()
                    )));
                }
                for (j, &v) in row.iter().enumerate() {
                    column_sums[j] += v;
                }
            }
            let descending = strat.target == Target::MostValuedByOthers;
            ranked(&column_sums, descending)[..strat.top_k].to_vec()
        }
    };
    targets.sort_unstable();
    Ok(targets)
}

/// Rescale the non-targeted coordinates of `values` proportionally so the
/// vector sums to `r`, leaving `targeted` coordinates untouched.
///
/// Coordinates pushed outside [EPS, 100 - EPS] are clamped and pinned, and
/// the remainder is redistributed over the still-free coordinates; this
/// repeats at most m times. A vector already within [`SUM_TOLERANCE`] of
/// `r` is returned unchanged.
pub fn renormalize_limited(values: &[f64], targeted: &[usize], r: f64) -> Result<Vec<f64>> {
    let m = values.len();
    let mut vals = values.to_vec();
    let mut pinned = vec![false; m];
    for &j in targeted {
        if j >= m {
            return Err(Error::Config(format!("targeted index {j} outside 0..{m}")));
        }
        pinned[j] = true;
    }
    let total: f64 = vals.iter().sum();
    if (total - r).abs() <= SUM_TOLERANCE {
        return Ok(vals);
    }

    for _ in 0..=m {
        let pinned_sum: f64 = (0..m).filter(|&j| pinned[j]).map(|j| vals[j]).sum();
        let free: Vec<usize> = (0..m).filter(|&j| !pinned[j]).collect();
        let need = r - pinned_sum;
        if free.is_empty() {
            return if need.abs() <= SUM_TOLERANCE {
                Ok(vals)
            } else {
                Err(Error::Renormalize(format!(
                    "every coordinate is pinned and the sum misses {r} by {need}"
                )))
            };
        }
        let free_sum: f64 = free.iter().map(|&j| vals[j]).sum();
        if need <= 0.0 || free_sum <= 0.0 {
            return Err(Error::Renormalize(format!(
                "free coordinates would need total mass {need} (have {free_sum})"
            )));
        }
        let scale = need / free_sum;
        let mut clamped = false;
        for &j in &free {
            let v = vals[j] * scale;
            if v < EPS {
                vals[j] = EPS;
                pinned[j] = true;
                clamped = true;
            } else if v > MAX_VALUE {
                vals[j] = MAX_VALUE;
                pinned[j] = true;
                clamped = true;
            } else {
                vals[j] = v;
            }
        }
        if !clamped {
            let sum: f64 = vals.iter().sum();
            return if (sum - r).abs() <= SUM_TOLERANCE {
                Ok(vals)
            } else {
                Err(Error::Renormalize(format!("rescaled sum {sum} misses the target {r}")))
            };
        }
    }
    Err(Error::Renormalize("clamping failed to converge".into()))
}

/// Distort `truth` at `targets` by `level` percent in `direction`, clamp,
/// and (in limited mode) renormalize the free coordinates back to sum r.
pub fn apply_strategy_at_level(
    truth: &[f64],
    targets: &[usize],
    direction: Direction,
    level: u32,
    mode: Mode,
) -> Result<Vec<f64>> {
    if level == 0 || level > 100 {
        return Err(Error::Config(format!("level {level} outside 1..=100")));
    }
    let factor = match direction {
        Direction::Decrease => 1.0 - level as f64 / 100.0,
        Direction::Increase => 1.0 + level as f64 / 100.0,
    };
    let mut lie = truth.to_vec();
    for &j in targets {
        if j >= lie.len() {
            return Err(Error::Config(format!("targeted index {j} outside 0..{}", lie.len())));
        }
        lie[j] = (truth[j] * factor).clamp(EPS, MAX_VALUE);
    }
    match mode {
        Mode::Unlimited => Ok(lie),
        Mode::Limited { r } => renormalize_limited(&lie, targets, r),
    }
}

/// [`strategy_targets`] and [`apply_strategy_at_level`] in one call.
pub fn apply_strategy(
    truth: &[f64],
    estimated_others: &[Vec<f64>],
    strat: &Strategy,
    level: u32,
    mode: Mode,
    sweep_seed: u64,
) -> Result<Vec<f64>> {
    let targets = strategy_targets(strat, truth, estimated_others, sweep_seed)?;
    apply_strategy_at_level(truth, &targets, strat.direction, level, mode)
}

/// Everything [`lie_profit`] computes, kept for reporting.
#[derive(Debug, Clone)]
pub struct LieEvaluation {
    pub u_truth: f64,
    pub u_lie: f64,
    pub profit: f64,
    pub alloc_truth: Allocation,
    pub alloc_lie: Allocation,
}

/// Solve the instance twice, with the liar reporting its truth and then
/// `lie`, and account both allocations at the liar's true preferences.
pub fn evaluate_lie(
    inst: &ProblemInstance,
    lie: &[f64],
    solver: &Solver,
    sum_tolerance: f64,
) -> Result<LieEvaluation> {
    let m = inst.profile.m_resources();
    check_vector(lie, m, inst.profile.mode, sum_tolerance)?;
    let (alloc_truth, _) = solver.solve(&inst.profile_with_liar_row(&inst.truth))?;
    let (alloc_lie, _) = solver.solve(&inst.profile_with_liar_row(lie))?;
    let u_truth = utility_unchecked(&alloc_truth.owner, &inst.truth, inst.liar);
    let u_lie = utility_unchecked(&alloc_lie.owner, &inst.truth, inst.liar);
    Ok(LieEvaluation { u_truth, u_lie, profit: u_lie - u_truth, alloc_truth, alloc_lie })
}

/// The liar's true-utility gain from reporting `lie` instead of its truth.
pub fn lie_profit(inst: &ProblemInstance, lie: &[f64], solver: &Solver, sum_tolerance: f64) -> Result<f64> {
    Ok(evaluate_lie(inst, lie, solver, sum_tolerance)?.profit)
}

/// Profit of one (strategy, level) cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strategy: u8,
    pub level: u32,
    pub profit: f64,
}

/// All ten strategies swept over levels 1..=levels.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Per strategy id: the targeted resources (ascending, 0-based).
    pub targets: Vec<(u8, Vec<usize>)>,
    /// Strategy-major, level-minor.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Mean profit of one strategy over all swept levels.
    pub fn mean_profit(&self, strategy: u8) -> f64 {
        let profits: Vec<f64> =
            self.rows.iter().filter(|r| r.strategy == strategy).map(|r| r.profit).collect();
        profits.iter().sum::<f64>() / profits.len() as f64
    }

    /// Profit of one (strategy, level) cell.
    pub fn profit_at(&self, strategy: u8, level: u32) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.strategy == strategy && r.level == level)
            .map(|r| r.profit)
    }
}

/// Run every predefined strategy at every level against one instance.
///
/// The truthful baseline is solved once; each (strategy, level) cell costs
/// one further solve. `seed` fixes the random strategies' target sets.
pub fn strategy_sweep(
    inst: &ProblemInstance,
    levels: u32,
    top_k: usize,
    solver: &Solver,
    seed: u64,
) -> Result<SweepResult> {
    if levels == 0 || levels > 100 {
        return Err(Error::Config(format!("levels {levels} outside 1..=100")));
    }
    let rivals = inst.rival_rows();
    let (alloc_truth, _) = solver.solve(&inst.profile_with_liar_row(&inst.truth))?;
    let u_truth = utility_unchecked(&alloc_truth.owner, &inst.truth, inst.liar);

    let mut targets = Vec::with_capacity(10);
    let mut rows = Vec::with_capacity(10 * levels as usize);
    for strat in Strategy::all(top_k)? {
        let strat_targets = strategy_targets(&strat, &inst.truth, &rivals, seed)?;
        for level in 1..=levels {
            let lie = apply_strategy_at_level(
                &inst.truth,
                &strat_targets,
                strat.direction,
                level,
                inst.profile.mode,
            )
            .map_err(|e| match e {
                Error::Renormalize(msg) => {
                    Error::Renormalize(format!("strategy {} level {level}: {msg}", strat.id))
                }
                other => other,
            })?;
            let (alloc_lie, _) = solver.solve(&inst.profile_with_liar_row(&lie))?;
            let u_lie = utility_unchecked(&alloc_lie.owner, &inst.truth, inst.liar);
            rows.push(SweepRow { strategy: strat.id, level, profit: u_lie - u_truth });
        }
        targets.push((strat.id, strat_targets));
    }
    Ok(SweepResult { targets, rows })
}

/// The scaled-truth lie that is optimal in the unlimited scenario.
#[derive(Debug, Clone)]
pub struct UnlimitedOptimalLie {
    pub lie: Vec<f64>,
    /// The scaling constant applied to the truth.
    pub c: f64,
}

/// Scale the whole truth vector by c = (min rival entry) / (2 * sum of
/// truth), so the reported total falls strictly below every rival's
/// smallest valuation and the solver must hand the liar whatever the
/// rivals can spare.
pub fn optimal_lie_unlimited(
    truth: &[f64],
    estimated_others: &[Vec<f64>],
) -> Result<UnlimitedOptimalLie> {
    let min_rival = estimated_others
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(f64::INFINITY, f64::min);
    if !min_rival.is_finite() {
        return Err(Error::Config("no rival preferences to scale against".into()));
    }
    let truth_sum: f64 = truth.iter().sum();
    if truth_sum <= 0.0 {
        return Err(Error::Config("truth vector has no positive mass".into()));
    }
    let c = 0.5 * min_rival / truth_sum;
    let lie = truth.iter().map(|&v| (c * v).max(EPS)).collect();
    Ok(UnlimitedOptimalLie { lie, c })
}

/// A lie found by the bilevel search, with its accounting.
#[derive(Debug, Clone)]
pub struct UlgaOutcome {
    pub lie: Vec<f64>,
    pub profit: f64,
    pub u_truth: f64,
    pub u_lie: f64,
    pub alloc_truth: Allocation,
    pub alloc_lie: Allocation,
    /// Best fitness (liar's true utility under the inner solve) per
    /// generation.
    pub history: Vec<f64>,
}

/// Real-valued lie genome: arithmetic-blend crossover and Gaussian
/// mutation, kept inside the mode's constraint set.
struct LieGenome {
    m: usize,
    mode: Mode,
    sigma: f64,
}

impl LieGenome {
    fn rescale(&self, genome: &mut Vec<f64>) {
        if let Mode::Limited { r } = self.mode {
            *genome = renormalize_limited(genome, &[], r)
                .expect("mode feasibility checked before evolving");
        }
    }
}

impl GenomeSpec for LieGenome {
    type Genome = Vec<f64>;

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut genome: Vec<f64> = (0..self.m).map(|_| rng.gen_range(EPS..MAX_VALUE)).collect();
        self.rescale(&mut genome);
        genome
    }

    fn crossover(&self, a: &Vec<f64>, b: &Vec<f64>, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let mut ca = Vec::with_capacity(self.m);
        let mut cb = Vec::with_capacity(self.m);
        for j in 0..self.m {
            ca.push(lambda * a[j] + (1.0 - lambda) * b[j]);
            cb.push((1.0 - lambda) * a[j] + lambda * b[j]);
        }
        self.rescale(&mut ca);
        self.rescale(&mut cb);
        (ca, cb)
    }

    fn mutate(&self, genome: &mut Vec<f64>, rate: f64, rng: &mut ChaCha8Rng) {
        let normal = Normal::new(0.0, self.sigma).expect("sigma is positive");
        let mut changed = false;
        for gene in genome.iter_mut() {
            if rng.gen_bool(rate) {
                *gene = (*gene + normal.sample(rng)).clamp(EPS, MAX_VALUE);
                changed = true;
            }
        }
        if changed {
            self.rescale(genome);
        }
    }
}

/// Search the space of lies with an outer GA whose fitness is the liar's
/// true utility under an inner egalitarian solve of the lied-to profile.
///
/// The truthful baseline is solved once; maximizing the liar's utility
/// under the lie therefore maximizes profit.
pub fn optimal_lie_ulga(
    inst: &ProblemInstance,
    ulga_cfg: &GAConfig,
    inner: &Solver,
) -> Result<UlgaOutcome> {
    let m = inst.profile.m_resources();
    if let Mode::Limited { r } = inst.profile.mode {
        if r < EPS * m as f64 || r > MAX_VALUE * m as f64 {
            return Err(Error::Config(format!(
                "sum target {r} infeasible for {m} values in [{EPS}, {MAX_VALUE}]"
            )));
        }
    }
    let (alloc_truth, _) = inner.solve(&inst.profile_with_liar_row(&inst.truth))?;
    let u_truth = utility_unchecked(&alloc_truth.owner, &inst.truth, inst.liar);

    let spec = LieGenome { m, mode: inst.profile.mode, sigma: ULGA_MUTATION_SIGMA };
    let mut scratch = inst.profile.clone();
    let mut inner_error = None;
    let result = evolve_generic(
        |genome: &Vec<f64>| {
            scratch.rows[inst.liar].copy_from_slice(genome);
            match inner.solve(&scratch) {
                Ok((alloc, _)) => utility_unchecked(&alloc.owner, &inst.truth, inst.liar),
                Err(e) => {
                    inner_error.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        &spec,
        ulga_cfg,
    )?;
    if let Some(e) = inner_error {
        return Err(e);
    }

    let (alloc_lie, _) = inner.solve(&inst.profile_with_liar_row(&result.best))?;
    let u_lie = utility_unchecked(&alloc_lie.owner, &inst.truth, inst.liar);
    Ok(UlgaOutcome {
        lie: result.best,
        profit: u_lie - u_truth,
        u_truth,
        u_lie,
        alloc_truth,
        alloc_lie,
        history: result.history,
    })
}
