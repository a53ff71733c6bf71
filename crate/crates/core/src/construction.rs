//! Greedy randomized construction.
//!
//! A priority rule orders the jobs; the next job is drawn uniformly from the
//! first `k` entries of what remains (the restricted candidate list) and put
//! into the first batch that can hold it. The classic variant processes batches
//! in creation order. The improved variant keeps jobs that can still finish on
//! time in a leading zone of batches and pushes jobs that will be late anyway
//! into trailing batches.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ScheduleError;
use crate::model::{Batch, BatchSchedule, Instance, JobId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorityRule {
    /// Earliest due date.
    Edd,
    MinSize,
    MaxSize,
    /// Shortest processing time.
    Spt,
    /// Smallest `s * p`.
    MinSp,
    /// Smallest `s * d`.
    MinSd,
    /// Smallest `s * (d - p)`; may be negative.
    MinSdp,
    /// Smallest `p * d`.
    MinPd,
    Random1,
    Random2,
}

impl PriorityRule {
    pub const ALL: [PriorityRule; 10] = [
        PriorityRule::Edd,
        PriorityRule::MinSize,
        PriorityRule::MaxSize,
        PriorityRule::Spt,
        PriorityRule::MinSp,
        PriorityRule::MinSd,
        PriorityRule::MinSdp,
        PriorityRule::MinPd,
        PriorityRule::Random1,
        PriorityRule::Random2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PriorityRule::Edd => "edd",
            PriorityRule::MinSize => "min-size",
            PriorityRule::MaxSize => "max-size",
            PriorityRule::Spt => "spt",
            PriorityRule::MinSp => "min-sp",
            PriorityRule::MinSd => "min-sd",
            PriorityRule::MinSdp => "min-sdp",
            PriorityRule::MinPd => "min-pd",
            PriorityRule::Random1 => "random1",
            PriorityRule::Random2 => "random2",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, PriorityRule::Random1 | PriorityRule::Random2)
    }

    fn key(self, instance: &Instance, id: JobId) -> i128 {
        let j = instance.job(id);
        let (p, s, d) = (j.processing as i128, j.size as i128, j.due as i128);
        match self {
            PriorityRule::Edd => d,
            PriorityRule::MinSize => s,
            PriorityRule::MaxSize => -s,
            PriorityRule::Spt => p,
            PriorityRule::MinSp => s * p,
            PriorityRule::MinSd => s * d,
            PriorityRule::MinSdp => s * (d - p),
            PriorityRule::MinPd => p * d,
            PriorityRule::Random1 | PriorityRule::Random2 => 0,
        }
    }
}

impl fmt::Display for PriorityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorityRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PriorityRule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown priority rule `{s}`"))
    }
}

/// Size of the restricted candidate list, absolute or as a fraction of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum RclConfig {
    Absolute(usize),
    Fraction(f64),
}

impl RclConfig {
    /// Candidate-list size for an instance of `n` jobs, before clamping to the
    /// remaining list length. Fractions round half up; the result is at least 1.
    pub fn resolve(&self, n: usize) -> usize {
        let k = match *self {
            RclConfig::Absolute(k) => k,
            RclConfig::Fraction(f) => (f * n as f64 + 0.5).floor() as usize,
        };
        k.max(1)
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            RclConfig::Absolute(0) => Err("rcl size must be at least 1".into()),
            RclConfig::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                Err(format!("rcl fraction must lie in (0, 1], got {f}"))
            }
            _ => Ok(()),
        }
    }
}

impl Default for RclConfig {
    fn default() -> Self {
        RclConfig::Fraction(0.10)
    }
}

impl FromStr for RclConfig {
    type Err = String;

    /// Accepts `3` (absolute) or `10%` (fraction of the job count).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let rcl = if let Some(pct) = s.strip_suffix('%') {
            let v: f64 = pct.trim().parse().map_err(|_| format!("bad rcl percentage `{s}`"))?;
            RclConfig::Fraction(v / 100.0)
        } else {
            RclConfig::Absolute(s.parse().map_err(|_| format!("bad rcl size `{s}`"))?)
        };
        rcl.validate()?;
        Ok(rcl)
    }
}

/// Source of candidate-list choices: returns a 0-based index below `window`.
pub trait Picker {
    fn pick(&mut self, window: usize) -> usize;
}

/// Uniform choice driven by a random number generator.
pub struct RandomPicker<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> Picker for RandomPicker<'_, R> {
    fn pick(&mut self, window: usize) -> usize {
        if window == 1 {
            0
        } else {
            self.0.gen_range(0..window)
        }
    }
}

/// Always takes the head of the list.
pub struct HeadPicker;

impl Picker for HeadPicker {
    fn pick(&mut self, _window: usize) -> usize {
        0
    }
}

/// One recorded candidate-list draw. `chosen` is 1-based within the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickRecord {
    pub step: usize,
    pub window: usize,
    pub chosen: usize,
}

/// Which first-fit variant turns a pick order into batches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    Classic,
    Improved,
}

/// Result of one construction run.
#[derive(Clone, Debug)]
pub struct Construction {
    pub rule: Option<PriorityRule>,
    pub schedule: BatchSchedule,
    /// Jobs in the order they were drawn; decoding it with the same mode and
    /// `k = 1` reproduces `schedule`.
    pub sequence: Vec<JobId>,
    pub trace: Vec<PickRecord>,
}

impl Construction {
    pub fn tardy_count(&self) -> usize {
        self.schedule.tardy_count()
    }
}

/// Orders the jobs by a priority rule, ties by ascending id. Random rules
/// return a uniform permutation.
pub fn priority_sequence<R: Rng + ?Sized>(instance: &Instance, rule: PriorityRule, rng: &mut R) -> Vec<JobId> {
    let mut ids: Vec<JobId> = instance.ids().collect();
    if rule.is_random() {
        ids.shuffle(rng);
    } else {
        ids.sort_by_key(|&id| (rule.key(instance, id), id));
    }
    ids
}

/// Draws one job from the first `min(k, len)` entries and removes it.
pub fn rcl_pick<P: Picker + ?Sized>(remaining: &mut Vec<JobId>, k: usize, picker: &mut P) -> (JobId, PickRecord) {
    assert!(!remaining.is_empty(), "rcl_pick on an empty list");
    let window = k.clamp(1, remaining.len());
    let index = picker.pick(window);
    assert!(index < window, "picker returned {index} for window {window}");
    let job = remaining.remove(index);
    (job, PickRecord { step: 0, window, chosen: index + 1 })
}

fn build<P: Picker + ?Sized>(
    instance: &Instance,
    mut list: Vec<JobId>,
    k: usize,
    picker: &mut P,
    mode: DecodeMode,
    record: bool,
) -> (Vec<Batch>, Vec<JobId>, Vec<PickRecord>) {
    let n = list.len();
    let mut sequence = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(if record { n } else { 0 });
    let mut classic = ClassicPacker::new(instance);
    let mut improved = ImprovedPacker::new(instance);
    let mut step = 0;
    while !list.is_empty() {
        step += 1;
        let (job, mut rec) = rcl_pick(&mut list, k, picker);
        match mode {
            DecodeMode::Classic => classic.place(job),
            DecodeMode::Improved => improved.place(job),
        }
        sequence.push(job);
        if record {
            rec.step = step;
            trace.push(rec);
        }
    }
    let batches = match mode {
        DecodeMode::Classic => classic.finish(),
        DecodeMode::Improved => improved.finish(),
    };
    (batches, sequence, trace)
}

fn construct<R: Rng + ?Sized>(
    instance: &Instance,
    rule: PriorityRule,
    rcl: RclConfig,
    rng: &mut R,
    mode: DecodeMode,
) -> Construction {
    let list = priority_sequence(instance, rule, rng);
    let k = rcl.resolve(instance.len());
    let (batches, sequence, trace) = build(instance, list, k, &mut RandomPicker(rng), mode, true);
    Construction { rule: Some(rule), schedule: BatchSchedule::evaluate_unchecked(instance, batches), sequence, trace }
}

/// Randomized greedy with plain first-fit; batches run in creation order.
pub fn classic_greedy<R: Rng + ?Sized>(
    instance: &Instance,
    rule: PriorityRule,
    rcl: RclConfig,
    rng: &mut R,
) -> Construction {
    construct(instance, rule, rcl, rng, DecodeMode::Classic)
}

/// Randomized greedy that keeps on-time jobs in leading batches and sends jobs
/// that cannot finish on time to trailing batches.
pub fn improved_greedy<R: Rng + ?Sized>(
    instance: &Instance,
    rule: PriorityRule,
    rcl: RclConfig,
    rng: &mut R,
) -> Construction {
    construct(instance, rule, rcl, rng, DecodeMode::Improved)
}

/// Replays a recorded construction: `list` is the priority order and `picks`
/// the 1-based candidate-list choices, one per step.
pub fn replay(
    instance: &Instance,
    list: &[JobId],
    k: usize,
    picks: &[usize],
    mode: DecodeMode,
) -> Result<Construction, ScheduleError> {
    crate::model::check_permutation(instance, list)?;
    if picks.len() != list.len() {
        return Err(ScheduleError::NotAPermutation(format!(
            "trace has {} picks for {} jobs",
            picks.len(),
            list.len()
        )));
    }
    for (step, &chosen) in picks.iter().enumerate() {
        let window = k.clamp(1, list.len() - step);
        if chosen == 0 || chosen > window {
            return Err(ScheduleError::InvalidPosition { position: chosen, len: window });
        }
    }
    let mut picker = TracePicker { picks, next: 0 };
    let (batches, sequence, trace) = build(instance, list.to_vec(), k, &mut picker, mode, true);
    Ok(Construction { rule: None, schedule: BatchSchedule::evaluate_unchecked(instance, batches), sequence, trace })
}

struct TracePicker<'a> {
    picks: &'a [usize],
    next: usize,
}

impl Picker for TracePicker<'_> {
    fn pick(&mut self, _window: usize) -> usize {
        let i = self.picks[self.next] - 1;
        self.next += 1;
        i
    }
}

/// Deterministic decode of a job sequence (`k = 1`). The caller guarantees a
/// permutation.
pub fn decode(instance: &Instance, sequence: &[JobId], mode: DecodeMode) -> BatchSchedule {
    BatchSchedule::evaluate_unchecked(instance, decode_batches(instance, sequence, mode))
}

pub(crate) fn decode_batches(instance: &Instance, sequence: &[JobId], mode: DecodeMode) -> Vec<Batch> {
    match mode {
        DecodeMode::Classic => {
            let mut packer = ClassicPacker::new(instance);
            sequence.iter().for_each(|&id| packer.place(id));
            packer.finish()
        }
        DecodeMode::Improved => {
            let mut packer = ImprovedPacker::new(instance);
            sequence.iter().for_each(|&id| packer.place(id));
            packer.finish()
        }
    }
}

/// Runs the improved construction once per priority rule, in rule order.
pub fn construct_all<R: Rng + ?Sized>(instance: &Instance, rcl: RclConfig, rng: &mut R) -> Vec<Construction> {
    PriorityRule::ALL.iter().map(|&rule| improved_greedy(instance, rule, rcl, rng)).collect()
}

/// Lowest tardy count; the earliest rule wins ties.
pub fn best_of(constructions: &[Construction]) -> Option<&Construction> {
    constructions.iter().min_by_key(|c| c.tardy_count())
}

struct ClassicPacker<'a> {
    instance: &'a Instance,
    batches: Vec<Batch>,
    loads: Vec<u64>,
}

impl<'a> ClassicPacker<'a> {
    fn new(instance: &'a Instance) -> Self {
        ClassicPacker { instance, batches: Vec::new(), loads: Vec::new() }
    }

    fn place(&mut self, id: JobId) {
        let size = self.instance.job(id).size;
        let cap = self.instance.capacity();
        match self.loads.iter().position(|&l| l + size <= cap) {
            Some(b) => {
                self.batches[b].push(id);
                self.loads[b] += size;
            }
            None => {
                self.batches.push(vec![id]);
                self.loads.push(size);
            }
        }
    }

    fn finish(self) -> Vec<Batch> {
        self.batches
    }
}

struct Slot {
    members: Batch,
    load: u64,
    processing: u64,
    /// Earliest due date among members placed as on time.
    min_due: u64,
    /// Position in the on-time zone, if the slot belongs to it.
    zone_pos: Option<usize>,
}

/// First-fit packer with an on-time zone (creation order) followed by a tardy
/// zone (creation order).
///
/// Invariant: every job placed as on time still completes by its due date when
/// the on-time zone runs first. A placement into an on-time slot is only
/// allowed if the growth of that slot's processing time fits within the
/// smallest slack of it and every later on-time slot.
struct ImprovedPacker<'a> {
    instance: &'a Instance,
    slots: Vec<Slot>,
    on_time: Vec<usize>,
    tardy_zone: Vec<usize>,
    completion: Vec<u64>,
    slack_suffix: Vec<u64>,
}

impl<'a> ImprovedPacker<'a> {
    fn new(instance: &'a Instance) -> Self {
        ImprovedPacker {
            instance,
            slots: Vec::new(),
            on_time: Vec::new(),
            tardy_zone: Vec::new(),
            completion: Vec::new(),
            slack_suffix: vec![u64::MAX],
        }
    }

    fn refresh_timing(&mut self) {
        let m = self.on_time.len();
        self.completion.clear();
        let mut clock = 0;
        for &s in &self.on_time {
            clock += self.slots[s].processing;
            self.completion.push(clock);
        }
        self.slack_suffix.clear();
        self.slack_suffix.resize(m + 1, u64::MAX);
        for pos in (0..m).rev() {
            let slot = &self.slots[self.on_time[pos]];
            let slack = slot.min_due.saturating_sub(self.completion[pos]);
            self.slack_suffix[pos] = slack.min(self.slack_suffix[pos + 1]);
        }
    }

    fn fits(&self, slot: usize, size: u64) -> bool {
        self.slots[slot].load + size <= self.instance.capacity()
    }

    /// Growth of a slot's processing time caused by adding a job of length `p`.
    fn growth(&self, slot: usize, p: u64) -> u64 {
        p.saturating_sub(self.slots[slot].processing)
    }

    /// Whether adding the job keeps every on-time job of the zone on time.
    fn harmless(&self, slot: usize, p: u64) -> bool {
        match self.slots[slot].zone_pos {
            Some(pos) => self.growth(slot, p) <= self.slack_suffix[pos],
            None => true,
        }
    }

    fn add(&mut self, slot: usize, id: JobId, on_time: bool) {
        let job = *self.instance.job(id);
        let s = &mut self.slots[slot];
        s.members.push(id);
        s.load += job.size;
        s.processing = s.processing.max(job.processing);
        if on_time {
            s.min_due = s.min_due.min(job.due);
        }
    }

    fn open(&mut self, id: JobId, on_time: bool) {
        let job = *self.instance.job(id);
        let idx = self.slots.len();
        let zone_pos = if on_time {
            self.on_time.push(idx);
            Some(self.on_time.len() - 1)
        } else {
            self.tardy_zone.push(idx);
            None
        };
        self.slots.push(Slot {
            members: vec![id],
            load: job.size,
            processing: job.processing,
            min_due: if on_time { job.due } else { u64::MAX },
            zone_pos,
        });
    }

    fn place(&mut self, id: JobId) {
        let job = *self.instance.job(id);
        if job.intrinsically_tardy() {
            let target = self.tardy_zone.iter().copied().find(|&s| self.fits(s, job.size));
            match target {
                Some(s) => self.add(s, id, false),
                None => self.open(id, false),
            }
            return;
        }

        let on_time_slot = self.on_time.iter().enumerate().find_map(|(pos, &s)| {
            let grow = self.growth(s, job.processing);
            (self.fits(s, job.size)
                && self.completion[pos] + grow <= job.due
                && grow <= self.slack_suffix[pos])
                .then_some(s)
        });
        if let Some(s) = on_time_slot {
            self.add(s, id, true);
            self.refresh_timing();
            return;
        }
        let zone_end = self.completion.last().copied().unwrap_or(0);
        if zone_end + job.processing <= job.due {
            self.open(id, true);
            self.refresh_timing();
            return;
        }

        // Late wherever it goes: first fit over all slots in creation order.
        let target = (0..self.slots.len())
            .find(|&s| self.fits(s, job.size) && self.harmless(s, job.processing));
        match target {
            Some(s) => {
                self.add(s, id, false);
                if self.slots[s].zone_pos.is_some() {
                    self.refresh_timing();
                }
            }
            None => self.open(id, false),
        }
    }

    fn finish(mut self) -> Vec<Batch> {
        let order: Vec<usize> = self.on_time.iter().chain(&self.tardy_zone).copied().collect();
        order.into_iter().map(|s| std::mem::take(&mut self.slots[s].members)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{greedy_example, moves_example};
    use crate::model::count_tardy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ids(v: &[u32]) -> Vec<JobId> {
        v.iter().map(|&i| JobId(i)).collect()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn edd_orders() {
        assert_eq!(priority_sequence(&greedy_example(), PriorityRule::Edd, &mut rng()), ids(&[3, 4, 5, 2, 1, 6, 7, 9, 8]));
        assert_eq!(priority_sequence(&moves_example(), PriorityRule::Edd, &mut rng()), ids(&[2, 3, 6, 7, 4, 9, 5, 1, 8]));
    }

    #[test]
    fn rule_keys() {
        let inst = moves_example();
        let seq = priority_sequence(&inst, PriorityRule::MaxSize, &mut rng());
        assert_eq!(seq[0], JobId(1));
        let seq = priority_sequence(&inst, PriorityRule::MinSdp, &mut rng());
        // job 6: 2 * (15 - 50) = -70 is the only negative key
        assert_eq!(seq[0], JobId(6));
        let seq = priority_sequence(&inst, PriorityRule::MinSize, &mut rng());
        assert_eq!(seq[0], JobId(6));
        assert_eq!(seq[1], JobId(8));
        let seq = priority_sequence(&inst, PriorityRule::Spt, &mut rng());
        assert_eq!(&seq[..3], &ids(&[4, 3, 2])[..]);
    }

    #[test]
    fn spt_reversed_matches_descending_p_on_distinct_keys() {
        let inst = Instance::from_triples(40, &[(5, 1, 9), (2, 1, 9), (7, 1, 9), (3, 1, 9)]).unwrap();
        let mut spt = priority_sequence(&inst, PriorityRule::Spt, &mut rng());
        spt.reverse();
        let mut desc: Vec<JobId> = inst.ids().collect();
        desc.sort_by_key(|&id| std::cmp::Reverse(inst.job(id).processing));
        assert_eq!(spt, desc);
    }

    #[test]
    fn random_rules_are_permutations() {
        let inst = greedy_example();
        let mut r = rng();
        let mut a = priority_sequence(&inst, PriorityRule::Random1, &mut r);
        a.sort();
        assert_eq!(a, inst.ids().collect::<Vec<_>>());
    }

    #[test]
    fn rcl_pick_window() {
        struct Fixed(usize);
        impl Picker for Fixed {
            fn pick(&mut self, _w: usize) -> usize {
                self.0
            }
        }
        let mut list = ids(&[3, 4, 5, 2, 1, 6, 7, 9, 8]);
        let (job, rec) = rcl_pick(&mut list, 3, &mut Fixed(2));
        assert_eq!(job, JobId(5));
        assert_eq!(rec.window, 3);
        assert_eq!(rec.chosen, 3);
        assert_eq!(list, ids(&[3, 4, 2, 1, 6, 7, 9, 8]));

        let (job, _) = rcl_pick(&mut list, 1, &mut HeadPicker);
        assert_eq!(job, JobId(3));

        let mut short = ids(&[6, 9]);
        let mut r = rng();
        let (_, rec) = rcl_pick(&mut short, 3, &mut RandomPicker(&mut r));
        assert_eq!(rec.window, 2);
    }

    #[test]
    fn classic_replay_of_greedy_example() {
        let inst = greedy_example();
        let list = ids(&[3, 4, 5, 2, 1, 6, 7, 9, 8]);
        let c = replay(&inst, &list, 3, &[3, 2, 1, 2, 3, 1, 3, 2, 1], DecodeMode::Classic).unwrap();
        assert_eq!(c.sequence, ids(&[5, 4, 3, 1, 7, 2, 8, 9, 6]));
        assert_eq!(
            c.schedule.batches(),
            &[ids(&[5, 4, 1]), ids(&[3, 2]), ids(&[7, 8]), ids(&[9]), ids(&[6])]
        );
        assert_eq!(c.tardy_count(), 6);
    }

    #[test]
    fn improved_replay_of_greedy_example() {
        let inst = greedy_example();
        let list = ids(&[3, 4, 5, 2, 1, 6, 7, 9, 8]);
        let c = replay(&inst, &list, 3, &[2, 3, 2, 2, 1, 2, 3, 2, 1], DecodeMode::Improved).unwrap();
        assert_eq!(c.sequence, ids(&[4, 2, 5, 1, 3, 7, 8, 9, 6]));
        assert_eq!(
            c.schedule.batches(),
            &[ids(&[4, 2, 5, 8]), ids(&[1, 6]), ids(&[3]), ids(&[7]), ids(&[9])]
        );
        assert_eq!(c.schedule.batch_completion(), &[28, 51, 95, 132, 175]);
        assert_eq!(c.tardy_count(), 5);
    }

    #[test]
    fn replay_rejects_bad_traces() {
        let inst = greedy_example();
        let list = ids(&[3, 4, 5, 2, 1, 6, 7, 9, 8]);
        assert!(replay(&inst, &list, 3, &[4, 1, 1, 1, 1, 1, 1, 1, 1], DecodeMode::Classic).is_err());
        assert!(replay(&inst, &list, 3, &[1, 1, 1, 1, 1, 1, 1, 1, 2], DecodeMode::Classic).is_err());
        assert!(replay(&inst, &list, 3, &[1, 1], DecodeMode::Classic).is_err());
    }

    #[test]
    fn classic_edd_pure_greedy_on_moves_example() {
        let inst = moves_example();
        let c = classic_greedy(&inst, PriorityRule::Edd, RclConfig::Absolute(1), &mut rng());
        assert_eq!(
            c.schedule.batches(),
            &[ids(&[2, 3, 6, 7, 8]), ids(&[4, 9]), ids(&[5]), ids(&[1])]
        );
        assert_eq!(c.tardy_count(), 9);
    }

    #[test]
    fn single_job() {
        let inst = Instance::from_triples(5, &[(3, 2, 1)]).unwrap();
        let c = improved_greedy(&inst, PriorityRule::Edd, RclConfig::Absolute(3), &mut rng());
        assert_eq!(c.schedule.batches(), &[ids(&[1])]);
        let c = classic_greedy(&inst, PriorityRule::Edd, RclConfig::Absolute(3), &mut rng());
        assert_eq!(c.schedule.batches(), &[ids(&[1])]);
    }

    #[test]
    fn everything_on_time_when_it_fits() {
        let inst = Instance::from_triples(40, &[(5, 10, 9), (7, 10, 9), (3, 10, 8), (9, 10, 30)]).unwrap();
        for rule in PriorityRule::ALL {
            let c = improved_greedy(&inst, rule, RclConfig::Absolute(2), &mut rng());
            assert_eq!(c.tardy_count(), 0, "{rule}");
        }
    }

    #[test]
    fn decode_reproduces_construction() {
        let inst = greedy_example();
        let mut r = rng();
        for c in construct_all(&inst, RclConfig::Absolute(3), &mut r) {
            let d = decode(&inst, &c.sequence, DecodeMode::Improved);
            assert_eq!(d.batches(), c.schedule.batches());
        }
    }

    #[test]
    fn rcl_parsing_and_resolution() {
        assert_eq!("3".parse::<RclConfig>().unwrap(), RclConfig::Absolute(3));
        assert_eq!("10%".parse::<RclConfig>().unwrap(), RclConfig::Fraction(0.10));
        assert!("0".parse::<RclConfig>().is_err());
        assert!("0%".parse::<RclConfig>().is_err());
        assert!("150%".parse::<RclConfig>().is_err());
        assert_eq!(RclConfig::Fraction(0.10).resolve(9), 1);
        assert_eq!(RclConfig::Fraction(0.10).resolve(100), 10);
        assert_eq!(RclConfig::Fraction(0.25).resolve(50), 13);
        assert_eq!(RclConfig::Absolute(5).resolve(3), 5);
    }

    #[test]
    fn improved_keeps_lower_bound() {
        let inst = moves_example();
        let mut r = rng();
        for c in construct_all(&inst, RclConfig::Absolute(3), &mut r) {
            assert!(c.tardy_count() >= inst.tardy_lower_bound());
            assert_eq!(count_tardy(&inst, c.schedule.batches()), c.tardy_count());
        }
    }
}
