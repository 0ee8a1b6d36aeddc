//! Random low-diameter decomposition of a semimetric space, with separation
//! probability diagnostics.
//!
//! The clustering draws a radius scale beta uniformly from [1/4, 1/2] and a
//! uniform random priority order, then assigns every point to the
//! earliest-priority point within distance beta * delta. The two draws come
//! from independent streams split off the seed, so partitions replay exactly
//! from (seed) or from an explicit (beta, order) pair.

use rand::Rng;

use crate::relax::Semimetric;
use crate::rng::{mix, stream};

/// A clustering outcome: disjoint blocks covering all points, the center of
/// each block, and the randomness that produced it.
#[derive(Debug, Clone)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub centers: Vec<usize>,
    pub beta: f64,
    /// order[v] = priority rank of point v (0 = first)
    pub order: Vec<usize>,
}

impl Partition {
    pub fn block_of(&self, v: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&v))
            .expect("point must belong to a block")
    }
}

fn draw_beta(seed: u64) -> f64 {
    0.25 + 0.25 * stream(seed, 0).gen::<f64>()
}

fn draw_order(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = stream(seed, 1);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let mut rank = vec![0usize; n];
    for (k, &v) in perm.iter().enumerate() {
        rank[v] = k;
    }
    rank
}

/// Center assignment for explicit randomness: every point goes to the
/// minimum-rank point within distance beta * delta (itself qualifies at
/// distance zero, so the assignment always exists).
pub fn assign_centers(metric: &Semimetric, delta: f64, beta: f64, order: &[usize]) -> Vec<usize> {
    let n = metric.n();
    let radius = beta * delta;
    (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| metric.dist(v, u) <= radius)
                .min_by_key(|&u| order[u])
                .expect("self-distance is zero")
        })
        .collect()
}

/// One random low-diameter partition. Every block has diameter at most delta
/// (checked on every run) and every member sits within beta * delta of its
/// center.
pub fn ckr_partition(metric: &Semimetric, delta: f64, seed: u64) -> Partition {
    assert!(delta > 0.0, "delta must be positive");
    let n = metric.n();
    let beta = draw_beta(seed);
    let order = draw_order(seed, n);
    let sigma = assign_centers(metric, delta, beta, &order);
    let mut centers: Vec<usize> = sigma.to_vec();
    centers.sort_unstable();
    centers.dedup();
    centers.sort_by_key(|&c| order[c]);
    let blocks: Vec<Vec<usize>> = centers
        .iter()
        .map(|&c| (0..n).filter(|&v| sigma[v] == c).collect())
        .collect();
    let partition = Partition { blocks, centers, beta, order };
    for (block, &center) in partition.blocks.iter().zip(&partition.centers) {
        for &v in block {
            debug_assert!(metric.dist(v, center) <= beta * delta + 1e-12);
        }
        assert!(
            metric.diameter(block) <= delta + 1e-9,
            "block diameter exceeds delta"
        );
    }
    partition
}

#[derive(Debug, Clone, Copy)]
pub struct SeparationEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub separated: u64,
}

/// Monte Carlo estimate of the probability that `set` meets two or more
/// blocks. Each trial replays the exact partition distribution but only
/// evaluates assignments on `set`.
pub fn estimate_separation(
    metric: &Semimetric,
    set: &[usize],
    delta: f64,
    trials: u64,
    seed: u64,
) -> SeparationEstimate {
    assert!(trials >= 1);
    assert!(delta > 0.0, "delta must be positive");
    let n = metric.n();
    let mut separated = 0u64;
    for t in 0..trials {
        let trial_seed = mix(seed, t);
        let beta = draw_beta(trial_seed);
        let order = draw_order(trial_seed, n);
        let radius = beta * delta;
        let mut first: Option<usize> = None;
        let mut split = false;
        for &u in set {
            let sigma = (0..n)
                .filter(|&w| metric.dist(u, w) <= radius)
                .min_by_key(|&w| order[w])
                .expect("self-distance is zero");
            match first {
                None => first = Some(sigma),
                Some(f) if f != sigma => {
                    split = true;
                    break;
                }
                _ => {}
            }
        }
        if split {
            separated += 1;
        }
    }
    let p_hat = separated as f64 / trials as f64;
    let stderr = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    SeparationEstimate { p_hat, stderr, trials, separated }
}

/// The first separator of `set` under explicit randomness: the
/// earliest-priority point that captured some but not all of `set`.
/// Returns `None` exactly when `set` lies in a single block.
pub fn first_separator(
    metric: &Semimetric,
    delta: f64,
    beta: f64,
    order: &[usize],
    set: &[usize],
) -> Option<usize> {
    let radius = beta * delta;
    let n = metric.n();
    let sigmas: Vec<usize> = set
        .iter()
        .map(|&u| {
            (0..n)
                .filter(|&w| metric.dist(u, w) <= radius)
                .min_by_key(|&w| order[w])
                .expect("self-distance is zero")
        })
        .collect();
    let mut seps: Vec<usize> = sigmas
        .iter()
        .copied()
        .filter(|&w| sigmas.iter().any(|&s| s != w))
        .collect();
    seps.sort_unstable();
    seps.dedup();
    seps.into_iter().min_by_key(|&w| order[w])
}

/// Points ordered by distance to `set` (ties by index), the order in which
/// the first-separator tail bound is stated.
pub fn points_by_distance(metric: &Semimetric, set: &[usize]) -> Vec<usize> {
    let mut points: Vec<usize> = (0..metric.n()).collect();
    points.sort_by(|&a, &b| {
        metric
            .dist_to_set(a, set)
            .partial_cmp(&metric.dist_to_set(b, set))
            .unwrap()
            .then(a.cmp(&b))
    });
    points
}

/// Monte Carlo frequencies of "point w is the first separator of `set`",
/// indexed by point.
pub fn first_separator_frequencies(
    metric: &Semimetric,
    set: &[usize],
    delta: f64,
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    assert!(trials >= 1);
    let n = metric.n();
    let mut counts = vec![0u64; n];
    for t in 0..trials {
        let trial_seed = mix(seed, t);
        let beta = draw_beta(trial_seed);
        let order = draw_order(trial_seed, n);
        if let Some(w) = first_separator(metric, delta, beta, &order, set) {
            counts[w] += 1;
        }
    }
    counts.into_iter().map(|c| c as f64 / trials as f64).collect()
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Random points in the unit square under scaled Euclidean distance;
    /// always a metric with entries in [0, 1].
    pub fn random_euclidean_metric(n: usize, seed: u64) -> Semimetric {
        let mut rng = stream(seed, 7);
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
            .collect();
        let scale = 2f64.sqrt();
        let mut upper = Vec::with_capacity(crate::relax::pair_count(n));
        for a in 0..n {
            for b in a + 1..n {
                let dx = points[a].0 - points[b].0;
                let dy = points[a].1 - points[b].1;
                upper.push((dx * dx + dy * dy).sqrt() / scale);
            }
        }
        Semimetric::from_upper(n, &upper).unwrap()
    }

    /// Path metric on n evenly spaced points of a unit segment.
    pub fn path_metric(n: usize) -> Semimetric {
        let mut upper = Vec::with_capacity(crate::relax::pair_count(n));
        for a in 0..n {
            for b in a + 1..n {
                upper.push((b - a) as f64 / (n - 1) as f64);
            }
        }
        Semimetric::from_upper(n, &upper).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::instance::testutil::{sample10, sample10_schedule};
    use crate::instance::MachineCount;
    use crate::relax::{extract_semimetric, neighborhood, solution_from_interval_schedule};

    #[test]
    fn zero_metric_gives_one_block() {
        let metric = Semimetric::from_upper(4, &vec![0.0; 6]).unwrap();
        for seed in 0..20 {
            let p = ckr_partition(&metric, 0.7, seed);
            assert_eq!(p.blocks.len(), 1);
            assert_eq!(p.blocks[0].len(), 4);
        }
    }

    #[test]
    fn distant_pair_always_splits() {
        let metric = Semimetric::from_upper(2, &[0.9]).unwrap();
        for seed in 0..50 {
            let p = ckr_partition(&metric, 0.8, seed);
            assert_eq!(p.blocks.len(), 2, "beta*delta <= 0.4 < 0.9 forbids capture");
        }
    }

    #[test]
    fn cut_metric_recovers_schedule_blocks() {
        let inst = sample10(MachineCount::Finite(10));
        let sol = solution_from_interval_schedule(&inst, &sample10_schedule(), 2);
        let metric = extract_semimetric(&sol).unwrap();
        for seed in 0..25 {
            let p = ckr_partition(&metric, 0.25, seed);
            assert_eq!(p.blocks.len(), 3);
            let mut sizes: Vec<usize> = p.blocks.iter().map(Vec::len).collect();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![3, 3, 4]);
        }
    }

    #[test]
    fn replay_determinism() {
        let metric = random_euclidean_metric(20, 99);
        let a = ckr_partition(&metric, 0.5, 1234);
        let b = ckr_partition(&metric, 0.5, 1234);
        assert_eq!(a.blocks, b.blocks);
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.order, b.order);
    }

    #[test]
    fn diameter_bound_on_random_metrics() {
        for seed in 0..30 {
            let n = 5 + (seed as usize % 20);
            let metric = random_euclidean_metric(n, seed);
            let delta = 0.1 + 0.5 * (seed as f64 / 30.0);
            // ckr_partition asserts the diameter bound internally
            let p = ckr_partition(&metric, delta, seed * 31 + 1);
            let covered: usize = p.blocks.iter().map(Vec::len).sum();
            assert_eq!(covered, n);
        }
    }

    #[test]
    fn singleton_and_colocated_sets_never_separate() {
        let metric = random_euclidean_metric(12, 5);
        let est = estimate_separation(&metric, &[3], 0.5, 200, 9);
        assert_eq!(est.p_hat, 0.0);

        // two points at distance zero share eligibility everywhere
        let mut upper = vec![0.5; crate::relax::pair_count(3)];
        upper[crate::relax::pair_index(3, 0, 1)] = 0.0;
        let co = Semimetric::from_upper(3, &upper).unwrap();
        let est = estimate_separation(&co, &[0, 1], 0.6, 200, 11);
        assert_eq!(est.p_hat, 0.0);
    }

    #[test]
    fn separation_rate_obeys_the_log_bound_on_a_path() {
        // adjacent pair on an 8-point path, delta = 1/2; the bound
        // ln(2 |N(U, delta/2)|) * 4 diam(U) / delta must cover the estimate
        let metric = path_metric(8);
        let set = [3usize, 4];
        let delta = 0.5;
        let est = estimate_separation(&metric, &set, delta, 20_000, 77);
        let diam = metric.diameter(&set);
        let n_halfdelta = neighborhood(&metric, &set, delta / 2.0).len();
        let bound = (2.0 * n_halfdelta as f64).ln() * 4.0 * diam / delta;
        assert!(
            est.p_hat <= bound + 3.0 * est.stderr,
            "p_hat {} vs bound {bound}",
            est.p_hat
        );
    }

    #[test]
    fn first_separator_consistent_with_partition() {
        let metric = random_euclidean_metric(15, 21);
        let set = [0usize, 7, 11];
        for seed in 0..40 {
            let p = ckr_partition(&metric, 0.4, seed);
            let blocks_hit: std::collections::HashSet<usize> =
                set.iter().map(|&u| p.block_of(u)).collect();
            let sep = first_separator(&metric, 0.4, p.beta, &p.order, &set);
            assert_eq!(blocks_hit.len() > 1, sep.is_some());
            if let Some(w) = sep {
                // the first separator captured at least one member of the set
                let radius = p.beta * 0.4;
                let captured = set.iter().any(|&u| {
                    (0..metric.n())
                        .filter(|&x| metric.dist(u, x) <= radius)
                        .min_by_key(|&x| p.order[x])
                        == Some(w)
                });
                assert!(captured);
            }
        }
    }

    #[test]
    fn first_separator_tail_bound_on_path() {
        // Pr[w_s is first separator] <= (4/s) * diam(U) / delta
        let metric = path_metric(8);
        let set = [2usize, 3];
        let delta = 0.5;
        let trials = 20_000;
        let freqs = first_separator_frequencies(&metric, &set, delta, trials, 13);
        let ordered = points_by_distance(&metric, &set);
        let diam = metric.diameter(&set);
        for (rank0, &w) in ordered.iter().enumerate() {
            let s = rank0 + 1;
            let p = freqs[w];
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let bound = (4.0 / s as f64) * diam / delta;
            assert!(
                p <= bound + 3.0 * sigma + 1e-12,
                "s = {s}: frequency {p} exceeds bound {bound}"
            );
        }
    }
}
