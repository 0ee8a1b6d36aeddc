//! Randomized rounding of relaxation solutions into feasible interval
//! schedules: clustering one batch of jobs with close fractional completion
//! indices, repeating the clustering until a batch is fully placed, and
//! sweeping the batches in bucket order.
//!
//! The batch parameter is `delta = 1 / (64 ln(4c))`: within a bucket of
//! fractional width delta, comparable jobs sit within distance delta of each
//! other, and a diameter-1/4 clustering separates any job from its in-batch
//! ancestors with probability at most 1/2. Each clustering round therefore
//! schedules at least half of the surviving jobs in expectation, and
//! `2 ceil(log2 m)` rounds leave at most a 1/m fraction behind (retried until
//! that holds, with a bounded retry count so worst-case time stays
//! polynomial).

use thiserror::Error;

use crate::ckr::ckr_partition;
use crate::instance::{verify_interval_schedule, Instance, IntervalSchedule};
use crate::relax::{extract_semimetric, neighborhood, FractionalSolution, RelaxError, Semimetric};
use crate::rng::mix;

/// Fractional width of one rounding bucket.
pub fn delta_for(c: i64) -> f64 {
    1.0 / (64.0 * (4.0 * c as f64).ln())
}

/// Clustering diameter used for batch scheduling.
pub const BATCH_DELTA: f64 = 0.25;
/// Retry cap of the batch repetition loop; beyond it the residue is emitted
/// one job per interval (degraded, but still feasible).
const MAX_RETRIES: usize = 64;
/// Slack accepted on the delta precondition on top of the LP tolerance.
const DELTA_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RoundingError {
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error("batch precondition broken: comparable jobs {j1:?}, {j2:?} at distance {d} > delta = {delta} (caller bug)")]
    DeltaPrecondition { j1: String, j2: String, d: f64, delta: f64 },
    #[error("internal invariant failed: {0}")]
    InternalInvariant(String),
}

/// Outcome of one clustering round over a batch J*: blocks that each fit one
/// machine within a length-2c window, the scheduled set, and the leftover.
#[derive(Debug, Clone)]
pub struct BatchResult {
    /// positions into the batch slice handed to [`single_batch`]
    pub blocks: Vec<Vec<usize>>,
    pub scheduled: Vec<usize>,
    pub leftover: Vec<usize>,
    pub beta: f64,
}

/// One clustering round (diameter 1/4) over the batch. `metric` is the
/// semimetric restricted to `jstar`: point k stands for job `jstar[k]`.
/// A job survives when all of its in-batch predecessors share its cluster.
pub fn single_batch(
    inst: &Instance,
    jstar: &[u32],
    metric: &Semimetric,
    seed: u64,
) -> Result<BatchResult, RoundingError> {
    assert_eq!(metric.n(), jstar.len(), "metric must be restricted to the batch");
    let c = inst.c();
    let delta = delta_for(c);
    for (ka, &a) in jstar.iter().enumerate() {
        for (kb, &b) in jstar.iter().enumerate() {
            if ka < kb && inst.comparable(a, b) {
                let d = metric.dist(ka, kb);
                if d > delta + DELTA_SLACK {
                    return Err(RoundingError::DeltaPrecondition {
                        j1: inst.id(a).to_string(),
                        j2: inst.id(b).to_string(),
                        d,
                        delta,
                    });
                }
            }
        }
    }
    let partition = ckr_partition(metric, BATCH_DELTA, seed);
    let block_of: Vec<usize> = (0..jstar.len())
        .map(|k| partition.blocks.iter().position(|b| b.contains(&k)).unwrap())
        .collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (bi, members) in partition.blocks.iter().enumerate() {
        let survivors: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&k| {
                inst.preds(jstar[k]).iter().all(|&q| {
                    match jstar.iter().position(|&x| x == q) {
                        Some(kq) => block_of[kq] == bi,
                        None => true, // predecessor outside the batch
                    }
                })
            })
            .collect();
        if !survivors.is_empty() {
            // topological order within the block
            let mut ordered = survivors;
            ordered.sort_by_key(|&k| {
                inst.topo_order()
                    .iter()
                    .position(|&j| j == jstar[k])
                    .unwrap()
            });
            blocks.push(ordered);
        }
    }
    let scheduled: Vec<usize> = {
        let mut s: Vec<usize> = blocks.iter().flatten().copied().collect();
        s.sort_unstable();
        s
    };
    let leftover: Vec<usize> = (0..jstar.len()).filter(|k| !scheduled.contains(k)).collect();

    // size bound: every block fits a 2c window
    for block in &blocks {
        if block.len() as i64 > 2 * c {
            return Err(RoundingError::InternalInvariant(format!(
                "cluster of {} jobs exceeds 2c = {}",
                block.len(),
                2 * c
            )));
        }
    }
    // no precedence crosses distinct blocks
    for (bi, block) in blocks.iter().enumerate() {
        for (bj, other) in blocks.iter().enumerate() {
            if bi == bj {
                continue;
            }
            for &ka in block {
                for &kb in other {
                    if inst.comparable(jstar[ka], jstar[kb]) {
                        return Err(RoundingError::InternalInvariant(format!(
                            "precedence crosses clusters: {} and {}",
                            inst.id(jstar[ka]),
                            inst.id(jstar[kb])
                        )));
                    }
                }
            }
        }
    }
    // neighborhood bound feeding the success-probability analysis
    for &k in &scheduled {
        let mut set: Vec<usize> = inst
            .preds(jstar[k])
            .iter()
            .filter_map(|&q| jstar.iter().position(|&x| x == q))
            .collect();
        set.push(k);
        let ball = neighborhood(metric, &set, BATCH_DELTA / 2.0);
        if ball.len() as i64 > 2 * c {
            return Err(RoundingError::InternalInvariant(format!(
                "ancestor neighborhood of {} holds {} > 2c points",
                inst.id(jstar[k]),
                ball.len()
            )));
        }
    }
    Ok(BatchResult { blocks, scheduled, leftover, beta: partition.beta })
}

/// Length-c intervals produced for one batch: interval -> machine groups ->
/// jobs in topological order. Machine labels are interval-local.
pub type CIntervals = Vec<Vec<Vec<u32>>>;

#[derive(Debug, Clone, Default)]
pub struct BatchStats {
    pub size: usize,
    pub iterations: usize,
    pub retries: usize,
    pub leftover: usize,
    pub intervals: usize,
    pub degraded: bool,
}

/// Schedules the whole batch: clustering rounds pack survivors into 2c
/// windows (two c-intervals each), the loop retries until the residue is at
/// most |J*|/m, and the residue runs consecutively on one machine.
///
/// All predecessors of the batch outside it must already be scheduled by the
/// caller in strictly earlier intervals.
pub fn schedule_batch(
    inst: &Instance,
    jstar: &[u32],
    metric: &Semimetric,
    m: usize,
    seed: u64,
) -> Result<(CIntervals, BatchStats), RoundingError> {
    let c = inst.c() as usize;
    let mut stats = BatchStats { size: jstar.len(), ..Default::default() };
    if jstar.is_empty() {
        return Ok((Vec::new(), stats));
    }
    let topo_pos = |j: u32| inst.topo_order().iter().position(|&x| x == j).unwrap();
    if m == 1 {
        // no point clustering for one machine: emit the batch in
        // topological order, c jobs per interval
        let mut ordered = jstar.to_vec();
        ordered.sort_by_key(|&j| topo_pos(j));
        let intervals: CIntervals = ordered.chunks(c).map(|ch| vec![ch.to_vec()]).collect();
        stats.intervals = intervals.len();
        return Ok((intervals, stats));
    }
    let rounds = (2.0 * (m as f64).log2()).ceil() as usize;
    let threshold = jstar.len() / m;
    for attempt in 0..=MAX_RETRIES {
        let attempt_seed = mix(seed, 0x5eed_0000 + attempt as u64);
        let mut intervals: CIntervals = Vec::new();
        let mut survivors: Vec<usize> = (0..jstar.len()).collect();
        let mut iterations = 0usize;
        for round in 0..rounds {
            if survivors.is_empty() {
                break;
            }
            iterations += 1;
            let sub_jobs: Vec<u32> = survivors.iter().map(|&k| jstar[k]).collect();
            let sub_metric = metric.restrict(&survivors);
            let result = single_batch(inst, &sub_jobs, &sub_metric, mix(attempt_seed, round as u64))?;
            // one 2c window per round: split each block across two c-intervals
            let mut first: Vec<Vec<u32>> = Vec::new();
            let mut second: Vec<Vec<u32>> = Vec::new();
            for block in &result.blocks {
                let jobs: Vec<u32> = block.iter().map(|&k| sub_jobs[k]).collect();
                let head: Vec<u32> = jobs.iter().take(c).copied().collect();
                let tail: Vec<u32> = jobs.iter().skip(c).copied().collect();
                first.push(head);
                if !tail.is_empty() {
                    second.push(tail);
                }
            }
            intervals.push(first);
            intervals.push(second);
            let leftover_set: Vec<usize> =
                result.leftover.iter().map(|&k| survivors[k]).collect();
            survivors = leftover_set;
        }
        if survivors.len() <= threshold {
            stats.iterations = iterations;
            stats.retries = attempt;
            stats.leftover = survivors.len();
            let mut ordered: Vec<u32> = survivors.iter().map(|&k| jstar[k]).collect();
            ordered.sort_by_key(|&j| topo_pos(j));
            for chunk in ordered.chunks(c) {
                intervals.push(vec![chunk.to_vec()]);
            }
            stats.intervals = intervals.len();
            return Ok((intervals, stats));
        }
        if attempt == MAX_RETRIES {
            // practically unreachable (each attempt succeeds with
            // probability >= 1/2); keep feasibility by emitting the
            // residue one job per interval
            stats.iterations = iterations;
            stats.retries = attempt;
            stats.leftover = survivors.len();
            stats.degraded = true;
            let mut ordered: Vec<u32> = survivors.iter().map(|&k| jstar[k]).collect();
            ordered.sort_by_key(|&j| topo_pos(j));
            for job in ordered {
                intervals.push(vec![vec![job]]);
            }
            stats.intervals = intervals.len();
            return Ok((intervals, stats));
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, Default)]
pub struct RoundStats {
    pub intervals_used: u32,
    pub budget: u32,
    pub buckets: Vec<(usize, BatchStats)>,
    pub degraded: bool,
}

/// Closed-form interval budget published for the rounding:
/// `ceil(S/delta) * (2 ceil(2 log2 m) + 1) + S`.
pub fn interval_budget(m: usize, c: i64, s_intervals: u32) -> u32 {
    let delta = delta_for(c);
    let per_bucket = 2 * (2.0 * (m as f64).log2()).ceil() as u32 + 1;
    (s_intervals as f64 / delta).ceil() as u32 * per_bucket + s_intervals
}

/// The complete rounding: bucket jobs by fractional completion index with
/// width delta, schedule buckets in order, concatenate their intervals.
/// The output is re-verified; the interval count always stays within
/// [`interval_budget`].
pub fn round_intervals(
    inst: &Instance,
    m: usize,
    sol: &FractionalSolution,
    seed: u64,
) -> Result<(IntervalSchedule, RoundStats), RoundingError> {
    let n = inst.n();
    let mut stats = RoundStats {
        budget: interval_budget(m, inst.c(), sol.s_intervals),
        ..Default::default()
    };
    if n == 0 {
        let schedule = IntervalSchedule { assign: Default::default() };
        return Ok((schedule, stats));
    }
    let metric = extract_semimetric(sol)?;
    let delta = delta_for(inst.c());
    let mut buckets: Vec<(usize, Vec<u32>)> = Vec::new();
    for j in 0..n {
        let k = (sol.c_times[j] / delta).floor() as usize;
        match buckets.iter_mut().find(|(bk, _)| *bk == k) {
            Some((_, list)) => list.push(j as u32),
            None => buckets.push((k, vec![j as u32])),
        }
    }
    buckets.sort_by_key(|&(k, _)| k);

    let mut assign = std::collections::BTreeMap::new();
    let mut base = 0u32;
    for (k, jobs) in buckets {
        let positions: Vec<usize> = jobs.iter().map(|&j| j as usize).collect();
        let sub_metric = metric.restrict(&positions);
        let (intervals, bstats) =
            schedule_batch(inst, &jobs, &sub_metric, m, mix(seed, k as u64))?;
        stats.degraded |= bstats.degraded;
        for (offset, interval) in intervals.iter().enumerate() {
            for (machine0, group) in interval.iter().enumerate() {
                for &j in group {
                    assign.insert(j, (base + offset as u32, machine0 as u32 + 1));
                }
            }
        }
        base += intervals.len() as u32;
        stats.buckets.push((k, bstats));
    }
    stats.intervals_used = base;
    let schedule = IntervalSchedule { assign };
    let report = verify_interval_schedule(inst, &schedule)
        .map_err(|e| RoundingError::InternalInvariant(e.to_string()))?;
    if !report.feasible {
        return Err(RoundingError::InternalInvariant(format!(
            "rounding produced an infeasible schedule: {:?}",
            report.violations
        )));
    }
    if stats.intervals_used > stats.budget {
        return Err(RoundingError::InternalInvariant(format!(
            "interval budget exceeded: {} > {}",
            stats.intervals_used, stats.budget
        )));
    }
    Ok((schedule, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::testutil::{sample10, units};
    use crate::instance::MachineCount;
    use crate::relax::{min_feasible_s, pair_count, solution_from_interval_schedule};

    fn colocated_metric(n: usize) -> Semimetric {
        Semimetric::from_upper(n, &vec![0.0; pair_count(n)]).unwrap()
    }

    #[test]
    fn colocated_batch_lands_in_one_block() {
        let c = 4;
        let inst = units(4, &[(0, 1), (1, 2)], c, MachineCount::Finite(2));
        let jstar: Vec<u32> = (0..4).collect();
        let metric = colocated_metric(4);
        let result = single_batch(&inst, &jstar, &metric, 3).unwrap();
        assert_eq!(result.blocks.len(), 1);
        assert_eq!(result.scheduled.len(), 4);
        assert!(result.leftover.is_empty());
        // topological order within the block
        let block = &result.blocks[0];
        let pos0 = block.iter().position(|&k| jstar[k] == 0).unwrap();
        let pos2 = block.iter().position(|&k| jstar[k] == 2).unwrap();
        assert!(pos0 < pos2);
    }

    #[test]
    fn incomparable_distant_jobs_both_schedule() {
        let inst = units(2, &[], 2, MachineCount::Finite(2));
        let metric = Semimetric::from_upper(2, &[1.0]).unwrap();
        let result = single_batch(&inst, &[0, 1], &metric, 5).unwrap();
        assert_eq!(result.blocks.len(), 2);
        assert_eq!(result.scheduled.len(), 2);
    }

    #[test]
    fn delta_precondition_is_enforced() {
        let inst = units(2, &[(0, 1)], 2, MachineCount::Finite(2));
        let metric = Semimetric::from_upper(2, &[0.9]).unwrap();
        assert!(matches!(
            single_batch(&inst, &[0, 1], &metric, 1),
            Err(RoundingError::DeltaPrecondition { .. })
        ));
    }

    /// Line metric with six 4-job chain groups 0.4 apart plus one distractor
    /// point 0.08 off each group. Comparable pairs stay within delta while
    /// the distractors sit in the [beta*Delta] annulus, so cluster boundaries
    /// genuinely cut groups sometimes. Every 1/8-ball holds at most five
    /// points, matching the capacity shape of LP metrics.
    fn grouped_line_instance() -> (Instance, Semimetric, Vec<u32>) {
        let c = 4i64;
        let groups = 6usize;
        let n = groups * 5;
        let delta = delta_for(c);
        let mut edges = Vec::new();
        for g in 0..groups as u32 {
            for i in 0..3u32 {
                edges.push((5 * g + i, 5 * g + i + 1));
            }
        }
        let inst = units(n, &edges, c, MachineCount::Finite(4));
        let pos = |j: usize| -> f64 {
            let g = j / 5;
            let i = j % 5;
            if i < 4 {
                0.4 * g as f64 + 0.3 * delta * i as f64
            } else {
                0.4 * g as f64 + 0.08
            }
        };
        let mut upper = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                upper.push((pos(a) - pos(b)).abs().min(1.0));
            }
        }
        let metric = Semimetric::from_upper(n, &upper).unwrap();
        (inst, metric, (0..n as u32).collect())
    }

    #[test]
    fn batch_success_rate_at_least_half() {
        let (inst, metric, jstar) = grouped_line_instance();
        let n = jstar.len();
        let trials = 2_000u64;
        let mut counts = vec![0u64; n];
        let mut some_leftover = false;
        for t in 0..trials {
            let result = single_batch(&inst, &jstar, &metric, mix(404, t)).unwrap();
            some_leftover |= !result.leftover.is_empty();
            for &k in &result.scheduled {
                counts[k] += 1;
            }
        }
        assert!(some_leftover, "test metric should produce real separations");
        for (k, &cnt) in counts.iter().enumerate() {
            let p = cnt as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                p >= 0.5 - 3.0 * sigma,
                "job {k} scheduled with frequency {p}"
            );
        }
    }

    #[test]
    fn schedule_batch_small_fits_two_intervals() {
        let c = 4;
        let inst = units(3, &[(0, 1)], c, MachineCount::Finite(4));
        let metric = colocated_metric(3);
        let (intervals, stats) = schedule_batch(&inst, &[0, 1, 2], &metric, 4, 9).unwrap();
        assert_eq!(intervals.len(), 2, "one 2c window = two c-intervals");
        assert_eq!(stats.retries, 0);
        assert_eq!(stats.leftover, 0);
        let placed: usize = intervals.iter().flatten().map(Vec::len).sum();
        assert_eq!(placed, 3);
    }

    #[test]
    fn schedule_batch_empty() {
        let inst = units(1, &[], 2, MachineCount::Finite(2));
        let metric = colocated_metric(0);
        let (intervals, stats) = schedule_batch(&inst, &[], &metric, 2, 0).unwrap();
        assert!(intervals.is_empty());
        assert_eq!(stats.intervals, 0);
    }

    #[test]
    fn schedule_batch_respects_interval_count_bound() {
        let (inst, metric, jstar) = grouped_line_instance();
        let n = jstar.len();
        let m = 4usize;
        let c = inst.c();
        let mut multi_round_seen = false;
        for seed in 0..20 {
            let (intervals, stats) = schedule_batch(&inst, &jstar, &metric, m, seed).unwrap();
            let bound = 2 * (2.0 * (m as f64).log2()).ceil() as usize
                + stats.leftover.div_ceil(c as usize);
            assert!(
                intervals.len() <= bound,
                "{} intervals > bound {bound}",
                intervals.len()
            );
            assert!(stats.leftover <= n / m);
            // leftovers are appended as trailing intervals, so every job lands
            let placed: usize = intervals.iter().flatten().map(Vec::len).sum();
            assert_eq!(placed, n);
            multi_round_seen |= stats.iterations > 1;
        }
        assert!(multi_round_seen, "test metric should exercise multiple rounds");
    }

    #[test]
    fn round_intervals_single_job() {
        let inst = units(1, &[], 3, MachineCount::Finite(1));
        let (s, sol) = min_feasible_s(&inst, 1).unwrap();
        assert_eq!(s, 1);
        let (sched, stats) = round_intervals(&inst, 1, &sol, 7).unwrap();
        assert_eq!(sched.s_used(), 1);
        assert_eq!(stats.intervals_used, 1);
    }

    #[test]
    fn round_intervals_sample10_feasible_within_budget() {
        let inst = sample10(MachineCount::Finite(10));
        let (s, sol) = min_feasible_s(&inst, 10).unwrap();
        assert_eq!(s, 2);
        for seed in 0..5 {
            let (sched, stats) = round_intervals(&inst, 10, &sol, seed).unwrap();
            let report = verify_interval_schedule(&inst, &sched).unwrap();
            assert!(report.feasible);
            assert!(stats.intervals_used <= stats.budget);
        }
    }

    #[test]
    fn round_intervals_chain_one_machine_prefixes() {
        // chain of n jobs, c = 1, m = 1: each batch must be a prefix of the
        // chain and the schedule stays feasible
        let n = 8usize;
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|k| (k, k + 1)).collect();
        let inst = units(n, &edges, 1, MachineCount::Finite(1));
        let (_, sol) = min_feasible_s(&inst, 1).unwrap();
        let (sched, _) = round_intervals(&inst, 1, &sol, 3).unwrap();
        let report = verify_interval_schedule(&inst, &sched).unwrap();
        assert!(report.feasible);
        // interval index must be monotone along the chain
        for k in 0..n as u32 - 1 {
            assert!(sched.assign[&k].0 <= sched.assign[&(k + 1)].0);
        }
    }

    #[test]
    fn round_intervals_integral_solution_roundtrip() {
        let inst = sample10(MachineCount::Finite(10));
        let sol = solution_from_interval_schedule(
            &inst,
            &crate::instance::testutil::sample10_schedule(),
            2,
        );
        let (sched, stats) = round_intervals(&inst, 10, &sol, 11).unwrap();
        let report = verify_interval_schedule(&inst, &sched).unwrap();
        assert!(report.feasible);
        assert!(stats.intervals_used <= stats.budget);
    }
}
