//! Command-line front end: seeded experiment commands over instance files,
//! emitting deterministic CSV reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use egalloc::deception::{
    evaluate_lie, optimal_lie_ulga, optimal_lie_unlimited, strategy_sweep, Strategy, DEFAULT_TOP_K,
};
use egalloc::error::Error;
use egalloc::ga::GAConfig;
use egalloc::io::{
    emit_instance, fmt_sig, owners_one_based, parse_instance, parse_vector, random_instance,
    Report,
};
use egalloc::model::{check_instance, check_vector, LOOSE_SUM_TOLERANCE};
use egalloc::robustness::{robustness_experiment, RobustnessConfig, NORMAL_SAMPLER};
use egalloc::solver::Solver;
use egalloc::{Allocation, Mode, ProblemInstance, Result};

#[derive(Parser)]
#[command(
    name = "egalloc",
    version,
    about = "Egalitarian allocation, lying strategies, and robustness experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a max-min allocation for an instance.
    Solve(SolveArgs),
    /// Evaluate the profit of a stated lie vector.
    LieEval(LieEvalArgs),
    /// Sweep the predefined lying strategies over distortion levels.
    StrategySweep(SweepArgs),
    /// Compute an optimal or near-optimal lie.
    BestLie(BestLieArgs),
    /// Measure lie profit under Gaussian misestimation of the rivals.
    Robustness(RobustnessArgs),
    /// Generate a random instance file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Exact,
    Llga,
}

#[derive(Args)]
struct SolverArgs {
    /// Solver for allocation problems.
    #[arg(long, value_enum, default_value = "exact")]
    solver: SolverKind,
    /// Enumeration budget for the exact solver (number of allocations).
    #[arg(long, default_value_t = egalloc::exact::DEFAULT_BUDGET)]
    budget: u128,
    /// Population size for the genetic solver.
    #[arg(long, default_value_t = 50)]
    pop: usize,
    /// Generation count for the genetic solver.
    #[arg(long, default_value_t = 50)]
    gens: usize,
    /// Tournament size for the genetic solver.
    #[arg(long, default_value_t = 3)]
    tournament: usize,
    /// Crossover rate for the genetic solver.
    #[arg(long, default_value_t = 0.9)]
    crossover_rate: f64,
    /// Per-gene mutation rate; defaults to 1/m.
    #[arg(long)]
    mutation_rate: Option<f64>,
    /// Elite individuals preserved per generation.
    #[arg(long, default_value_t = 1)]
    elitism: usize,
}

impl SolverArgs {
    fn ga_config(&self, genome_len: usize, seed: u64) -> GAConfig {
        let mut cfg = GAConfig::with_defaults(genome_len, seed);
        cfg.population_size = self.pop;
        cfg.generations = self.gens;
        cfg.tournament_size = self.tournament;
        cfg.crossover_rate = self.crossover_rate;
        if let Some(rate) = self.mutation_rate {
            cfg.mutation_rate = rate;
        }
        cfg.elitism = self.elitism;
        cfg
    }

    fn build(&self, genome_len: usize, seed: u64) -> Solver {
        match self.solver {
            SolverKind::Exact => Solver::Exact { budget: self.budget },
            SolverKind::Llga => Solver::Llga(self.ga_config(genome_len, seed)),
        }
    }

    fn describe(&self, report: &mut Report, solver: &Solver) {
        report.meta("solver", solver.name());
        match solver {
            Solver::Exact { budget } => {
                report.meta("budget", budget);
            }
            Solver::Llga(cfg) => {
                report.meta("population", cfg.population_size);
                report.meta("generations", cfg.generations);
                report.meta("tournament", cfg.tournament_size);
                report.meta("crossover_rate", fmt_sig(cfg.crossover_rate, 6));
                report.meta("mutation_rate", fmt_sig(cfg.mutation_rate, 6));
                report.meta("elitism", cfg.elitism);
            }
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Instance file to load.
    #[arg(long)]
    instance: PathBuf,
    /// Row-sum tolerance for limited-mode validation.
    #[arg(long, default_value_t = LOOSE_SUM_TOLERANCE)]
    sum_tolerance: f64,
    /// Seed for all randomized components.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn load(&self) -> Result<ProblemInstance> {
        let text = std::fs::read_to_string(&self.instance)?;
        let inst = parse_instance(&text)?;
        check_instance(&inst, self.sum_tolerance)?;
        Ok(inst)
    }

    fn describe(&self, report: &mut Report) {
        report.meta("instance", self.instance.display());
        report.meta("sum_tolerance", fmt_sig(self.sum_tolerance, 6));
        report.meta("seed", self.seed);
    }

    fn deliver(&self, report: &Report) -> Result<()> {
        let text = report.render();
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct LieEvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// File holding the lie vector (whitespace-separated numbers).
    #[arg(long)]
    lie: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Highest distortion level to evaluate.
    #[arg(long, default_value_t = 100)]
    levels: u32,
    /// Resources each strategy distorts.
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LieVariant {
    /// Closed-form optimal lie for unlimited instances.
    Prop2,
    /// Bilevel genetic search.
    Ulga,
}

#[derive(Args)]
struct UlgaArgs {
    /// Population size of the outer lie search.
    #[arg(long, default_value_t = 50)]
    ulga_pop: usize,
    /// Generation count of the outer lie search.
    #[arg(long, default_value_t = 300)]
    ulga_gens: usize,
}

#[derive(Args)]
struct BestLieArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Inner solver configuration (used by the ulga variant).
    #[command(flatten)]
    solver: SolverArgs,
    /// How to search for the lie.
    #[arg(long, value_enum)]
    variant: LieVariant,
    #[command(flatten)]
    ulga: UlgaArgs,
}

#[derive(Args)]
struct RobustnessArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Lie to stress: 'prop2', 'ulga', or a path to a lie vector file.
    #[arg(long)]
    lie: String,
    /// Noise levels: comma-separated or start:end:step.
    #[arg(long)]
    sigmas: String,
    /// Replicates per noise level.
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[command(flatten)]
    ulga: UlgaArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeKind {
    Unlimited,
    Limited,
}

#[derive(Args)]
struct GenArgs {
    /// Agent count.
    #[arg(long)]
    agents: usize,
    /// Resource count.
    #[arg(long)]
    resources: usize,
    /// Preference mode.
    #[arg(long, value_enum, default_value = "unlimited")]
    mode: ModeKind,
    /// Row-sum target (limited mode only).
    #[arg(long)]
    r: Option<f64>,
    /// Seed for the draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the instance here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::LieEval(args) => cmd_lie_eval(args),
        Command::StrategySweep(args) => cmd_sweep(args),
        Command::BestLie(args) => cmd_best_lie(args),
        Command::Robustness(args) => cmd_robustness(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let inst = args.common.load()?;
    let solver = args.solver.build(inst.profile.m_resources(), args.common.seed);
    let (alloc, welfare) = solver.solve(&inst.profile)?;

    let mut report = Report::new("solve");
    args.common.describe(&mut report);
    args.solver.describe(&mut report, &solver);
    report.meta("welfare", fmt_sig(welfare, 6));
    report.meta("allocation", owners_one_based(&alloc.owner));
    report.columns(&["agent", "utility", "bundle"]);
    for agent in 0..inst.profile.n_agents() {
        let utility = egalloc::model::agent_utility(&alloc, &inst.profile.rows[agent], agent)?;
        report.row(&[
            (agent + 1).to_string(),
            fmt_sig(utility, 6),
            bundle_one_based(&alloc, agent),
        ]);
    }
    args.common.deliver(&report)
}

fn bundle_one_based(alloc: &Allocation, agent: usize) -> String {
    alloc
        .bundle(agent)
        .into_iter()
        .map(|j| (j + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_lie_eval(args: LieEvalArgs) -> Result<()> {
    let inst = args.common.load()?;
    let lie = parse_vector(&std::fs::read_to_string(&args.lie)?)?;
    let solver = args.solver.build(inst.profile.m_resources(), args.common.seed);
    let eval = evaluate_lie(&inst, &lie, &solver, args.common.sum_tolerance)?;

    let mut report = Report::new("lie-eval");
    args.common.describe(&mut report);
    args.solver.describe(&mut report, &solver);
    report.meta("lie_file", args.lie.display());
    report.meta("lie", join_sig(&lie));
    report.meta("allocation_truthful", owners_one_based(&eval.alloc_truth.owner));
    report.meta("allocation_lying", owners_one_based(&eval.alloc_lie.owner));
    report.columns(&["quantity", "value"]);
    report.row(&["u_truthful".into(), fmt_sig(eval.u_truth, 6)]);
    report.row(&["u_lying".into(), fmt_sig(eval.u_lie, 6)]);
    report.row(&["profit".into(), fmt_sig(eval.profit, 6)]);
    args.common.deliver(&report)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let inst = args.common.load()?;
    let solver = args.solver.build(inst.profile.m_resources(), args.common.seed);
    let sweep = strategy_sweep(&inst, args.levels, args.top_k, &solver, args.common.seed)?;

    let mut report = Report::new("strategy-sweep");
    args.common.describe(&mut report);
    args.solver.describe(&mut report, &solver);
    report.meta("levels", args.levels);
    report.meta("top_k", args.top_k);
    for strategy in Strategy::all(args.top_k)? {
        report.meta(&format!("strategy_{}", strategy.id), strategy.describe());
    }
    for (id, targets) in &sweep.targets {
        let shown: Vec<String> = targets.iter().map(|j| (j + 1).to_string()).collect();
        report.meta(&format!("targets_{id}"), shown.join(" "));
    }
    report.columns(&["strategy", "level", "profit"]);
    for row in &sweep.rows {
        report.row(&[
            row.strategy.to_string(),
            row.level.to_string(),
            fmt_sig(row.profit, 6),
        ]);
    }
    args.common.deliver(&report)
}

fn cmd_best_lie(args: BestLieArgs) -> Result<()> {
    let inst = args.common.load()?;
    let mut report = Report::new("best-lie");
    args.common.describe(&mut report);

    let (lie, summary): (Vec<f64>, Vec<(&str, String)>) = match args.variant {
        LieVariant::Prop2 => {
            let best = optimal_lie_unlimited(&inst.truth, &inst.rival_rows())?;
            check_vector(&best.lie, inst.profile.m_resources(), inst.profile.mode, args.common.sum_tolerance)?;
            let solver = args.solver.build(inst.profile.m_resources(), args.common.seed);
            args.solver.describe(&mut report, &solver);
            let eval = evaluate_lie(&inst, &best.lie, &solver, args.common.sum_tolerance)?;
            report.meta("variant", "prop2");
            report.meta("c", fmt_sig(best.c, 6));
            (
                best.lie,
                vec![
                    ("u_truthful", fmt_sig(eval.u_truth, 6)),
                    ("u_lying", fmt_sig(eval.u_lie, 6)),
                    ("profit", fmt_sig(eval.profit, 6)),
                    ("allocation_truthful", owners_one_based(&eval.alloc_truth.owner)),
                    ("allocation_lying", owners_one_based(&eval.alloc_lie.owner)),
                ],
            )
        }
        LieVariant::Ulga => {
            let inner = args.solver.build(inst.profile.m_resources(), args.common.seed);
            args.solver.describe(&mut report, &inner);
            let mut cfg = args.solver.ga_config(inst.profile.m_resources(), args.common.seed);
            cfg.population_size = args.ulga.ulga_pop;
            cfg.generations = args.ulga.ulga_gens;
            let outcome = optimal_lie_ulga(&inst, &cfg, &inner)?;
            report.meta("variant", "ulga");
            report.meta("ulga_population", cfg.population_size);
            report.meta("ulga_generations", cfg.generations);
            (
                outcome.lie,
                vec![
                    ("u_truthful", fmt_sig(outcome.u_truth, 6)),
                    ("u_lying", fmt_sig(outcome.u_lie, 6)),
                    ("profit", fmt_sig(outcome.profit, 6)),
                    ("allocation_truthful", owners_one_based(&outcome.alloc_truth.owner)),
                    ("allocation_lying", owners_one_based(&outcome.alloc_lie.owner)),
                ],
            )
        }
    };
    for (key, value) in summary {
        report.meta(key, value);
    }
    report.columns(&["resource", "truth", "lie"]);
    for (j, (&t, &l)) in inst.truth.iter().zip(lie.iter()).enumerate() {
        report.row(&[(j + 1).to_string(), fmt_sig(t, 6), fmt_sig(l, 6)]);
    }
    args.common.deliver(&report)
}

fn cmd_robustness(args: RobustnessArgs) -> Result<()> {
    let inst = args.common.load()?;
    let sigmas = parse_sigmas(&args.sigmas)?;
    let solver = args.solver.build(inst.profile.m_resources(), args.common.seed);

    let mut report = Report::new("robustness");
    args.common.describe(&mut report);
    args.solver.describe(&mut report, &solver);

    let lie = match args.lie.as_str() {
        "prop2" => {
            report.meta("lie_source", "prop2");
            optimal_lie_unlimited(&inst.truth, &inst.rival_rows())?.lie
        }
        "ulga" => {
            let mut cfg = args.solver.ga_config(inst.profile.m_resources(), args.common.seed);
            cfg.population_size = args.ulga.ulga_pop;
            cfg.generations = args.ulga.ulga_gens;
            report.meta("lie_source", "ulga");
            report.meta("ulga_population", cfg.population_size);
            report.meta("ulga_generations", cfg.generations);
            optimal_lie_ulga(&inst, &cfg, &solver)?.lie
        }
        path => {
            report.meta("lie_source", path);
            parse_vector(&std::fs::read_to_string(path)?)?
        }
    };
    check_vector(&lie, inst.profile.m_resources(), inst.profile.mode, args.common.sum_tolerance)?;

    let cfg = RobustnessConfig {
        sigmas,
        replicates: args.replicates,
        seed: args.common.seed,
        solver,
    };
    let curve = robustness_experiment(&inst, &lie, &cfg)?;

    report.meta("lie", join_sig(&lie));
    report.meta("replicates", args.replicates);
    report.meta("normal_sampler", NORMAL_SAMPLER);
    report.columns(&[
        "sigma",
        "mean_profit",
        "mean_truthful_utility",
        "mean_lying_utility",
        "sd_profit",
    ]);
    for point in &curve.points {
        report.row(&[
            fmt_sig(point.sigma, 6),
            fmt_sig(point.mean_profit, 6),
            fmt_sig(point.mean_truthful_utility, 6),
            fmt_sig(point.mean_lying_utility, 6),
            fmt_sig(point.sd_profit, 6),
        ]);
    }
    args.common.deliver(&report)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let mode = match (args.mode, args.r) {
        (ModeKind::Unlimited, None) => Mode::Unlimited,
        (ModeKind::Unlimited, Some(_)) => {
            return Err(Error::Config("--r is only meaningful with --mode limited".into()))
        }
        (ModeKind::Limited, r) => Mode::Limited { r: r.unwrap_or(100.0) },
    };
    let inst = random_instance(args.agents, args.resources, mode, args.seed)?;
    let mut text = String::new();
    text.push_str(&format!(
        "# generated by egalloc gen: {} agents, {} resources, seed {}\n",
        args.agents, args.resources, args.seed
    ));
    text.push_str("# distribution: i.i.d. Uniform(eps, 100-eps) per entry");
    if matches!(mode, Mode::Limited { .. }) {
        text.push_str(", rows renormalized to the sum target");
    }
    text.push('\n');
    text.push_str(&emit_instance(&inst));
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn join_sig(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_sig(v, 6)).collect::<Vec<_>>().join(" ")
}

/// Parse `--sigmas`: either a comma list ("0,8,16") or start:end:step
/// ("0:99:33" gives 0, 33, 66, 99).
fn parse_sigmas(spec: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| Error::Config(msg);
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("sigma range must be start:end:step, found '{spec}'")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad(format!("bad number '{p}' in '{spec}'"))))
            .collect::<Result<_>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || end < start {
            return Err(bad(format!("sigma range '{spec}' must ascend with positive step")));
        }
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let v = start + f64::from(k) * step;
            if v > end + 1e-12 {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        let out: Vec<f64> = spec
            .split(',')
            .map(|p| {
                let p = p.trim();
                p.parse::<f64>().map_err(|_| bad(format!("bad sigma '{p}' in '{spec}'")))
            })
            .collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(bad("no sigmas given".into()));
        }
        Ok(out)
    }
}
