//! Random instance generation with due dates calibrated against a full-batch
//! LPT makespan.
//!
//! Draw order is fixed so that a seed reproduces an instance bit for bit: for
//! each job in id order `s, p, r, w`, then the due-date offsets `z` in id order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Job, JobId};

/// Name of the generator algorithm, recorded in instance metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

// Absorbs binary representation error before rounding half up.
const ROUNDING_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub capacity: u64,
    pub size_range: (u64, u64),
    pub p_range: (u64, u64),
    pub r_range: (u64, u64),
    pub w_range: (u64, u64),
    /// Due-date tightness `R`.
    pub tightness: f64,
    /// Due-date spread `T`.
    pub spread: f64,
    /// Due-date adjustment factor.
    pub gamma: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 50,
            capacity: 40,
            size_range: (1, 30),
            p_range: (8, 48),
            r_range: (0, 48),
            w_range: (1, 11),
            tightness: 0.5,
            spread: 0.3,
            gamma: 0.5,
            seed: 0,
        }
    }
}

/// Due-date adjustment factors used in benchmark sweeps.
pub const GAMMA_LEVELS: [f64; 3] = [0.2, 0.33, 0.5];

impl GenConfig {
    pub fn new(n: usize, gamma: f64, seed: u64) -> Self {
        GenConfig { n, gamma, seed, ..GenConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n == 0 {
            return bad("job count must be at least 1".into());
        }
        if self.capacity == 0 {
            return bad("capacity must be at least 1".into());
        }
        for (name, (lo, hi), min) in [
            ("size", self.size_range, 1),
            ("processing time", self.p_range, 1),
            ("ready time", self.r_range, 0),
            ("weight", self.w_range, 1),
        ] {
            if lo > hi || lo < min {
                return bad(format!("{name} range [{lo}, {hi}] is empty or below {min}"));
            }
        }
        if self.size_range.1 > self.capacity {
            return bad(format!(
                "size range upper bound {} exceeds capacity {}",
                self.size_range.1, self.capacity
            ));
        }
        if !(self.tightness > 0.0 && self.tightness < 2.0) {
            return bad(format!("tightness must lie in (0, 2), got {}", self.tightness));
        }
        if !(self.spread >= 0.0 && self.spread < 1.0) {
            return bad(format!("spread must lie in [0, 1), got {}", self.spread));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        Ok(())
    }
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5 + ROUNDING_EPS).floor().max(0.0) as u64
}

/// Makespan of the full-batch LPT schedule with every job treated as unit
/// sized: sort by processing time descending, cut into runs of `capacity`
/// jobs, and sum the head of each run.
pub fn fblpt_makespan(processing_times: &[u64], capacity: u64) -> u64 {
    let mut sorted = processing_times.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let step = capacity.max(1) as usize;
    sorted.iter().step_by(step).sum()
}

/// Inclusive bounds of the due-date offset `z`.
pub fn due_date_offset_window(
    processing_times: &[u64],
    ready_times: &[u64],
    capacity: u64,
    tightness: f64,
    spread: f64,
) -> (u64, u64) {
    let min_ready = ready_times.iter().copied().min().unwrap_or(0);
    let reference_makespan = (min_ready + fblpt_makespan(processing_times, capacity)) as f64;
    let mu = (1.0 - spread) * reference_makespan;
    (round_half_up(mu * (1.0 - tightness / 2.0)), round_half_up(mu * (1.0 + tightness / 2.0)))
}

/// `round(gamma * (r + p + z))`, at least 1.
pub fn due_date(gamma: f64, ready: u64, processing: u64, offset: u64) -> u64 {
    round_half_up(gamma * (ready + processing + offset) as f64).max(1)
}

pub fn generate(config: &GenConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut jobs: Vec<Job> = (0..config.n)
        .map(|i| {
            let size = rng.gen_range(config.size_range.0..=config.size_range.1);
            let processing = rng.gen_range(config.p_range.0..=config.p_range.1);
            let ready = rng.gen_range(config.r_range.0..=config.r_range.1);
            let weight = rng.gen_range(config.w_range.0..=config.w_range.1);
            Job { id: JobId::from_index(i), processing, size, due: 0, ready, weight }
        })
        .collect();
    let p: Vec<u64> = jobs.iter().map(|j| j.processing).collect();
    let r: Vec<u64> = jobs.iter().map(|j| j.ready).collect();
    let (lo, hi) = due_date_offset_window(&p, &r, config.capacity, config.tightness, config.spread);
    for job in &mut jobs {
        let z = rng.gen_range(lo..=hi);
        job.due = due_date(config.gamma, job.ready, job.processing, z);
    }
    Ok(Instance::new(config.capacity, jobs)?)
}

/// Metadata block written next to generated instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenMeta {
    pub rng: String,
    pub config: GenConfig,
}

impl GenMeta {
    pub fn new(config: &GenConfig) -> Self {
        GenMeta { rng: RNG_ALGORITHM.to_string(), config: config.clone() }
    }
}
