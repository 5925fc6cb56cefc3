//! Monte Carlo volume of `{ (x, y) ∈ (0,1]^(m+n) : ∏ x_i^{a_i} < ∏ y_j^{b_j} }`.
//!
//! The region's volume equals `P(A wins)`, so this is a geometric cross-check
//! of the exact solvers that shares nothing with them but the speeds.
//! The test runs in log space, `Σ a_i ln x_i < Σ b_j ln y_j`, so high powers
//! never underflow. Ties count as misses; they have probability zero.
//!
//! Sample `s` draws its `m + n` coordinates (A coordinates first) from
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(s)`.

use num_traits::ToPrimitive;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::montecarlo::{binomial_estimate, trial_rng, within_sigmas};
use crate::rational::Rational;

const BATCH: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VolumeEstimate {
    pub hits: u64,
    pub samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl VolumeEstimate {
    pub fn agrees_with(&self, exact: &Rational, sigmas: f64) -> bool {
        within_sigmas(self.estimate, self.std_error, exact, sigmas)
    }
}

/// Uniform draw in `(0, 1]` with 53 random bits; never zero, so `ln` is finite.
pub fn unit_open_closed<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Hit test for one point: `Σ a_i ln x_i < Σ b_j ln y_j`.
pub fn is_hit(a: &[f64], b: &[f64], xs: &[f64], ys: &[f64]) -> bool {
    let lhs: f64 = a.iter().zip(xs).map(|(w, x)| w * x.ln()).sum();
    let rhs: f64 = b.iter().zip(ys).map(|(w, y)| w * y.ln()).sum();
    lhs < rhs
}

fn to_f64(speeds: &[Rational]) -> Vec<f64> {
    speeds.iter().map(|s| s.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Coordinates of sample `index`: A coordinates then B coordinates.
pub fn sample_point(seed: u64, index: u64, m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = trial_rng(seed, index);
    let xs = (0..m).map(|_| unit_open_closed(&mut rng)).collect();
    let ys = (0..n).map(|_| unit_open_closed(&mut rng)).collect();
    (xs, ys)
}

pub fn estimate_volume(inst: &Instance, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    inst.require_both_sides()?;
    if samples == 0 {
        return Err(Error::ZeroCount("samples"));
    }
    let (a, b) = (to_f64(inst.a()), to_f64(inst.b()));
    let (m, n) = (a.len(), b.len());
    let batches = samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let start = batch * BATCH;
            let end = (start + BATCH).min(samples);
            let mut xs = vec![0.0; m];
            let mut ys = vec![0.0; n];
            (start..end)
                .filter(|&s| {
                    let mut rng = trial_rng(seed, s);
                    xs.iter_mut().for_each(|x| *x = unit_open_closed(&mut rng));
                    ys.iter_mut().for_each(|y| *y = unit_open_closed(&mut rng));
                    is_hit(&a, &b, &xs, &ys)
                })
                .count() as u64
        })
        .sum();
    let (estimate, std_error) = binomial_estimate(hits, samples);
    Ok(VolumeEstimate {
        hits,
        samples,
        estimate,
        std_error,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn symmetric_pair_is_half() {
        let inst = Instance::from_ints(&[1], &[1]).unwrap();
        let v = estimate_volume(&inst, 200_000, 1).unwrap();
        assert!(v.agrees_with(&ratio(1, 2), 4.0), "{v:?}");
    }

    #[test]
    fn single_vs_pair() {
        let inst = Instance::from_ints(&[1], &[1, 1]).unwrap();
        let v = estimate_volume(&inst, 200_000, 2).unwrap();
        assert!(v.agrees_with(&ratio(1, 4), 4.0), "{v:?}");
    }

    #[test]
    fn degenerate_inputs() {
        let inst = Instance::from_ints(&[], &[1]).unwrap();
        assert_eq!(estimate_volume(&inst, 10, 1), Err(Error::EmptySide('A')));
        let inst = Instance::from_ints(&[1], &[1]).unwrap();
        assert_eq!(estimate_volume(&inst, 0, 1), Err(Error::ZeroCount("samples")));
    }

    #[test]
    fn deterministic() {
        let inst = Instance::from_ints(&[30, 20], &[15, 36]).unwrap();
        assert_eq!(
            estimate_volume(&inst, 10_000, 5).unwrap(),
            estimate_volume(&inst, 10_000, 5).unwrap()
        );
    }

    #[test]
    fn complement_per_sample() {
        let (a, b) = ([30.0, 20.0], [15.0, 36.0]);
        for s in 0..2_000 {
            let (xs, ys) = sample_point(3, s, 2, 2);
            assert_ne!(is_hit(&a, &b, &xs, &ys), is_hit(&b, &a, &ys, &xs), "sample {s}");
        }
    }

    #[test]
    fn permuting_speeds_with_coordinates_keeps_hits() {
        let (a, b) = ([3.0, 1.0, 2.5], [2.0, 7.0]);
        let (pa, pb) = ([2.5, 3.0, 1.0], [7.0, 2.0]);
        for s in 0..2_000 {
            let (xs, ys) = sample_point(8, s, 3, 2);
            let pxs = [xs[2], xs[0], xs[1]];
            let pys = [ys[1], ys[0]];
            assert_eq!(is_hit(&a, &b, &xs, &ys), is_hit(&pa, &pb, &pxs, &pys));
        }
    }

    #[test]
    fn draws_stay_in_unit_interval() {
        let mut rng = trial_rng(0, 0);
        for _ in 0..10_000 {
            let x = unit_open_closed(&mut rng);
            assert!(x > 0.0 && x <= 1.0);
        }
    }
}
