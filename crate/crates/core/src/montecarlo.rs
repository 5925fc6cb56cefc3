//! Seeded simulation of the collision process.
//!
//! Reproducibility contract: trial `t` draws from its own ChaCha8 stream,
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(t)`. Trials are
//! independent of how they are partitioned across threads, so serial and
//! parallel runs give bit-identical reports.
//!
//! Each collision draws one `u64` and A survives iff it is below
//! `floor(2^64 · a/(a+b))`, computed exactly from the rational speeds.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{u64_threshold, Rational};

const BATCH: u64 = 4096;

/// How the next colliding pair is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// The last remaining A meets the first remaining B: the physical
    /// interface collision for initially separated groups.
    #[default]
    Frontmost,
    /// A uniformly random surviving A meets a uniformly random surviving B.
    RandomAdjacent,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Frontmost => "frontmost",
            Policy::RandomAdjacent => "random-adjacent",
        })
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "frontmost" => Ok(Policy::Frontmost),
            "random-adjacent" => Ok(Policy::RandomAdjacent),
            other => Err(format!("unknown policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub policy: Policy,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            policy: Policy::Frontmost,
        }
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimReport {
    pub a_wins: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
    pub policy: Policy,
}

impl SimReport {
    fn from_counts(a_wins: u64, cfg: &SimConfig) -> Self {
        let (estimate, std_error) = binomial_estimate(a_wins, cfg.trials);
        Self {
            a_wins,
            trials: cfg.trials,
            estimate,
            std_error,
            seed: cfg.seed,
            policy: cfg.policy,
        }
    }

    pub fn b_wins(&self) -> u64 {
        self.trials - self.a_wins
    }

    /// `|estimate − exact| ≤ sigmas · stdError`.
    pub fn agrees_with(&self, exact: &Rational, sigmas: f64) -> bool {
        within_sigmas(self.estimate, self.std_error, exact, sigmas)
    }
}

pub(crate) fn binomial_estimate(hits: u64, total: u64) -> (f64, f64) {
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

pub(crate) fn within_sigmas(estimate: f64, std_error: f64, exact: &Rational, sigmas: f64) -> bool {
    let exact = num_traits::ToPrimitive::to_f64(exact).unwrap_or(f64::NAN);
    (estimate - exact).abs() <= sigmas * std_error
}

/// Per-trial random stream.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// Resolves one collision: A survives with probability `a/(a+b)`.
pub fn collide<R: RngCore + ?Sized>(a: &Rational, b: &Rational, rng: &mut R) -> Side {
    let threshold = u64_threshold(&(a / (a + b)));
    if rng.next_u64() < threshold {
        Side::A
    } else {
        Side::B
    }
}

/// `thresholds[i][j] = floor(2^64 · a_i/(a_i+b_j))`.
struct ThresholdTable {
    n: usize,
    cells: Vec<u64>,
}

impl ThresholdTable {
    fn new(a: &[Rational], b: &[Rational]) -> Self {
        let cells = a
            .iter()
            .flat_map(|ai| b.iter().map(move |bj| u64_threshold(&(ai / (ai + bj)))))
            .collect();
        Self { n: b.len(), cells }
    }

    fn get(&self, i: usize, j: usize) -> u64 {
        self.cells[i * self.n + j]
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub winner: Side,
    pub collisions: usize,
    pub survivors: usize,
}

fn run_trial_with(table: &ThresholdTable, m: usize, n: usize, policy: Policy, rng: &mut ChaCha8Rng) -> TrialOutcome {
    let mut collisions = 0;
    match policy {
        Policy::Frontmost => {
            // A particles 0..alive_a remain; the frontmost is alive_a − 1.
            let (mut alive_a, mut next_b) = (m, 0);
            while alive_a > 0 && next_b < n {
                collisions += 1;
                if rng.next_u64() < table.get(alive_a - 1, next_b) {
                    next_b += 1;
                } else {
                    alive_a -= 1;
                }
            }
            let survivors = alive_a + (n - next_b);
            let winner = if next_b == n { Side::A } else { Side::B };
            TrialOutcome { winner, collisions, survivors }
        }
        Policy::RandomAdjacent => {
            let mut a: Vec<usize> = (0..m).collect();
            let mut b: Vec<usize> = (0..n).collect();
            while !a.is_empty() && !b.is_empty() {
                collisions += 1;
                let i = rng.random_range(0..a.len());
                let j = rng.random_range(0..b.len());
                if rng.next_u64() < table.get(a[i], b[j]) {
                    b.swap_remove(j);
                } else {
                    a.swap_remove(i);
                }
            }
            let winner = if b.is_empty() { Side::A } else { Side::B };
            TrialOutcome {
                winner,
                collisions,
                survivors: a.len() + b.len(),
            }
        }
    }
}

/// Runs trial `index` of `simulate(inst, cfg)` on its own.
pub fn run_trial(inst: &Instance, cfg: &SimConfig, index: u64) -> Result<TrialOutcome> {
    inst.require_both_sides()?;
    let table = ThresholdTable::new(inst.a(), inst.b());
    let mut rng = trial_rng(cfg.seed, index);
    Ok(run_trial_with(&table, inst.m(), inst.n(), cfg.policy, &mut rng))
}

/// Estimates `P(A wins)` over `cfg.trials` independent runs.
pub fn simulate(inst: &Instance, cfg: &SimConfig) -> Result<SimReport> {
    inst.require_both_sides()?;
    if cfg.trials == 0 {
        return Err(Error::ZeroCount("trials"));
    }
    let table = ThresholdTable::new(inst.a(), inst.b());
    let (m, n) = (inst.m(), inst.n());
    let batches = cfg.trials.div_ceil(BATCH);
    let a_wins: u64 = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let start = batch * BATCH;
            let end = (start + BATCH).min(cfg.trials);
            (start..end)
                .filter(|&t| {
                    let mut rng = trial_rng(cfg.seed, t);
                    run_trial_with(&table, m, n, cfg.policy, &mut rng).winner == Side::A
                })
                .count() as u64
        })
        .sum();
    Ok(SimReport::from_counts(a_wins, cfg))
}

/// Simulates random reorderings of both sides.
///
/// Up to `permutations` distinct orderings are drawn (fewer if the speed
/// multisets admit fewer). Ordering `k` runs with seed `cfg.seed + k + 1`.
pub fn order_invariance_probe(inst: &Instance, cfg: &SimConfig, permutations: usize) -> Result<Vec<(Instance, SimReport)>> {
    inst.require_both_sides()?;
    if permutations == 0 {
        return Err(Error::ZeroCount("permutations"));
    }
    let available = distinct_orderings(inst.a()).saturating_mul(distinct_orderings(inst.b()));
    let wanted = permutations.min(usize::try_from(available).unwrap_or(usize::MAX));

    let mut shuffler = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffler.set_stream(u64::MAX);
    let mut seen = HashSet::new();
    let mut orderings = Vec::with_capacity(wanted);
    while orderings.len() < wanted {
        let mut a = inst.a().to_vec();
        let mut b = inst.b().to_vec();
        a.shuffle(&mut shuffler);
        b.shuffle(&mut shuffler);
        if seen.insert((a.clone(), b.clone())) {
            orderings.push(Instance::new(a, b)?);
        }
    }

    orderings
        .into_iter()
        .enumerate()
        .map(|(k, ordering)| {
            let sub = SimConfig {
                seed: cfg.seed.wrapping_add(k as u64 + 1),
                ..*cfg
            };
            let report = simulate(&ordering, &sub)?;
            Ok((ordering, report))
        })
        .collect()
}

/// Number of distinct orderings of a multiset, saturating at `u128::MAX`.
fn distinct_orderings(speeds: &[Rational]) -> u128 {
    let mut sorted = speeds.to_vec();
    sorted.sort();
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    let mut run: u128 = 0;
    for (i, s) in sorted.iter().enumerate() {
        run = if i > 0 && sorted[i - 1] == *s { run + 1 } else { 1 };
        placed += 1;
        // total *= placed / run, kept integral: C(placed, run) pattern.
        total = match total.checked_mul(placed) {
            Some(t) => t / run,
            None => return u128::MAX,
        };
    }
    total
}

/// `a · P(A survives) − b · P(B survives)`, exactly. Equals `a − b`.
pub fn expected_momentum(a: &Rational, b: &Rational) -> Rational {
    let total = a + b;
    a * (a / &total) - b * (b / &total)
}
