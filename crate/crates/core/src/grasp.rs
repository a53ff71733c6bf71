//! The GRASP driver: randomized construction, local search, elite pool upkeep,
//! then a path-relinking phase over the pool.
//!
//! Every iteration draws from its own random stream derived from
//! `(seed, run, iteration)`, and results are folded into the incumbent and the
//! pool in iteration order. Running iterations on several threads therefore
//! yields exactly the same report as running them on one.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{self, Construction, DecodeMode, PickRecord, PriorityRule, RclConfig};
use crate::error::{Error, Result};
use crate::local_search::{local_search, LocalSearchConfig};
use crate::model::{BatchSchedule, Instance, SolutionSummary};
use crate::path_relinking::{run_path_relinking, sequence_fitness, EliteEntry, ElitePool, DEFAULT_POOL_CAPACITY};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspConfig {
    pub max_iters: usize,
    pub pr_iters: usize,
    pub rcl: RclConfig,
    /// Threshold parameter of the mean-based insertion move.
    pub alpha: f64,
    /// Consecutive non-improving local-search samples; `None` means `50 * n`.
    pub ls_budget: Option<usize>,
    pub num_runs: usize,
    /// Stop a run after this many iterations without improving the incumbent.
    pub no_improve_limit: Option<usize>,
    pub pool_capacity: usize,
    pub seed: u64,
    pub threads: usize,
    /// Wall-clock safety valve; budgets are the primary stopping rule.
    pub time_limit: Option<Duration>,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            max_iters: 1000,
            pr_iters: 1000,
            rcl: RclConfig::Fraction(0.10),
            alpha: 0.0,
            ls_budget: None,
            num_runs: 1,
            no_improve_limit: None,
            pool_capacity: DEFAULT_POOL_CAPACITY,
            seed: 0,
            threads: 1,
            time_limit: None,
        }
    }
}

impl GraspConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if self.num_runs == 0 {
            return bad("num_runs must be at least 1");
        }
        if self.ls_budget == Some(0) {
            return bad("ls_budget must be at least 1");
        }
        if self.no_improve_limit == Some(0) {
            return bad("no_improve_limit must be at least 1");
        }
        if self.pool_capacity < 2 {
            return bad("pool_capacity must be at least 2");
        }
        if self.threads == 0 {
            return bad("threads must be at least 1");
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be a non-negative number");
        }
        self.rcl.validate().map_err(Error::Config)
    }

    fn local_search_config(&self, n: usize) -> LocalSearchConfig {
        let mut cfg = LocalSearchConfig::for_instance(n);
        if let Some(b) = self.ls_budget {
            cfg.budget = b;
        }
        cfg.alpha = self.alpha;
        cfg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Grasp,
    PathRelinking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRow {
    pub iter: usize,
    pub phase: Phase,
    pub best_tardy: usize,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub best: BatchSchedule,
    pub summary: SolutionSummary,
    /// Best single construction seen in any iteration.
    pub construction_best: usize,
    pub local_search_best: usize,
    pub path_relinking_best: Option<usize>,
    /// Best-of-rules construction of the first iteration.
    pub first_iteration_construction: usize,
    /// Rule and pick trace of the best construction seen.
    pub construction_rule: PriorityRule,
    pub construction_trace: Vec<PickRecord>,
    pub log: Vec<LogRow>,
    pub iterations_run: usize,
    pub pool: Vec<EliteEntry>,
    pub elapsed: Duration,
}

/// Splitmix64 finalizer over a seed and stream coordinates.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    for _ in 0..2 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

const PR_STREAM: u64 = u64::MAX;

/// Random stream of one GRASP iteration.
pub fn iteration_rng(seed: u64, run: usize, iter: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, run as u64, iter as u64))
}

struct IterationOutcome {
    constructions: Vec<Construction>,
    best_rule: usize,
    local: BatchSchedule,
}

fn run_iteration(instance: &Instance, config: &GraspConfig, ls: &LocalSearchConfig, run: usize, iter: usize) -> IterationOutcome {
    let mut rng = iteration_rng(config.seed, run, iter);
    let constructions = construction::construct_all(instance, config.rcl, &mut rng);
    let best_rule = (0..constructions.len()).min_by_key(|&i| constructions[i].tardy_count()).expect("ten rules");
    let local = local_search(instance, &constructions[best_rule].schedule, ls, &mut rng).schedule;
    IterationOutcome { constructions, best_rule, local }
}

/// Runs GRASP followed by path relinking.
pub fn solve(instance: &Instance, config: &GraspConfig) -> Result<SolveReport> {
    config.validate()?;
    let start = Instant::now();
    let floor = instance.tardy_lower_bound();
    let ls = config.local_search_config(instance.len());
    let pool_threads = if config.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let chunk = if config.threads > 1 { config.threads * 4 } else { 1 };

    let mut pool = ElitePool::new(config.pool_capacity);
    let mut incumbent: Option<BatchSchedule> = None;
    let mut construction_best = usize::MAX;
    let mut construction_rule = PriorityRule::Edd;
    let mut construction_trace = Vec::new();
    let mut local_best = usize::MAX;
    let mut first_iteration_construction = None;
    let mut log = Vec::new();
    let mut iterations_run = 0;
    let elapsed_ms = |s: &Instant| s.elapsed().as_millis() as u64;
    let out_of_time = |s: &Instant| config.time_limit.is_some_and(|t| s.elapsed() >= t);

    'runs: for run in 0..config.num_runs {
        let mut no_improve = 0usize;
        let mut next = 0;
        while next < config.max_iters {
            let end = (next + chunk).min(config.max_iters);
            let outcomes: Vec<IterationOutcome> = match &pool_threads {
                Some(tp) => tp.install(|| {
                    (next..end).into_par_iter().map(|i| run_iteration(instance, config, &ls, run, i)).collect()
                }),
                None => (next..end).map(|i| run_iteration(instance, config, &ls, run, i)).collect(),
            };
            next = end;
            for outcome in outcomes {
                iterations_run += 1;
                let best_c = &outcome.constructions[outcome.best_rule];
                if first_iteration_construction.is_none() {
                    first_iteration_construction = Some(best_c.tardy_count());
                    for c in &outcome.constructions {
                        pool.insert(EliteEntry { sequence: c.sequence.clone(), tardy_count: c.tardy_count() });
                    }
                } else {
                    pool.insert(EliteEntry { sequence: best_c.sequence.clone(), tardy_count: best_c.tardy_count() });
                }
                pool.insert(EliteEntry::scored(instance, outcome.local.job_sequence(instance)));

                if best_c.tardy_count() < construction_best {
                    construction_best = best_c.tardy_count();
                    construction_rule = best_c.rule.unwrap_or(PriorityRule::Edd);
                    construction_trace = best_c.trace.clone();
                }
                let local_tardy = outcome.local.tardy_count();
                local_best = local_best.min(local_tardy);
                if incumbent.as_ref().is_none_or(|inc| local_tardy < inc.tardy_count()) {
                    incumbent = Some(outcome.local);
                    no_improve = 0;
                } else {
                    no_improve += 1;
                }
                let best_tardy = incumbent.as_ref().map_or(usize::MAX, BatchSchedule::tardy_count);
                log.push(LogRow { iter: iterations_run, phase: Phase::Grasp, best_tardy, elapsed_ms: elapsed_ms(&start) });

                if best_tardy <= floor || out_of_time(&start) {
                    break 'runs;
                }
                if config.no_improve_limit.is_some_and(|l| no_improve >= l) {
                    continue 'runs;
                }
            }
        }
    }

    let mut incumbent = incumbent.expect("at least one iteration ran");
    let mut path_relinking_best = None;
    if config.pr_iters > 0 && pool.len() >= 2 && incumbent.tardy_count() > floor && !out_of_time(&start) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, PR_STREAM, 0));
        let (entry, _) = run_path_relinking(&mut pool, config.pr_iters, &mut rng, |s| sequence_fitness(instance, s))?;
        let schedule = construction::decode(instance, &entry.sequence, DecodeMode::Improved);
        path_relinking_best = Some(schedule.tardy_count());
        if schedule.tardy_count() < incumbent.tardy_count() {
            incumbent = schedule;
        }
        log.push(LogRow {
            iter: iterations_run + 1,
            phase: Phase::PathRelinking,
            best_tardy: incumbent.tardy_count(),
            elapsed_ms: elapsed_ms(&start),
        });
    }

    let summary = incumbent.summary();
    Ok(SolveReport {
        best: incumbent,
        summary,
        construction_best,
        local_search_best: local_best,
        path_relinking_best,
        first_iteration_construction: first_iteration_construction.expect("at least one iteration ran"),
        construction_rule,
        construction_trace,
        log,
        iterations_run,
        pool: pool.entries().to_vec(),
        elapsed: start.elapsed(),
    })
}

/// Best-of-rules improved construction of the first GRASP iteration, without
/// local search. This is the baseline that `solve` can only improve on.
pub fn construction_baseline(instance: &Instance, config: &GraspConfig) -> Construction {
    let mut rng = iteration_rng(config.seed, 0, 0);
    let all = construction::construct_all(instance, config.rcl, &mut rng);
    construction::best_of(&all).expect("ten rules").clone()
}

/// Relative improvement of `candidate` over `reference` tardy counts. `None`
/// when the reference is zero and the candidate is not.
pub fn improvement_pct(reference_tardy: usize, candidate_tardy: usize) -> Option<f64> {
    if reference_tardy == 0 {
        return (candidate_tardy == 0).then_some(0.0);
    }
    Some((reference_tardy as f64 - candidate_tardy as f64) / reference_tardy as f64)
}
