//! Matching and beating between particle groups.
//!
//! Group P beats group Q when `P(P wins against Q) > 1/2`, and they are
//! matched when it is exactly `1/2`. All classification is by exact rational
//! comparison.

use std::fmt::Write as _;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{format_decimal, int, ratio, serde_rational_vec, Probability, Rational};
use crate::recursive::p_a_wins_recursive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Beats,
    Matched,
    Loses,
}

impl Verdict {
    pub fn mirror(self) -> Self {
        match self {
            Verdict::Beats => Verdict::Loses,
            Verdict::Matched => Verdict::Matched,
            Verdict::Loses => Verdict::Beats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationVerdict {
    /// Probability that the first group wins.
    pub p: Probability,
    pub verdict: Verdict,
}

impl RelationVerdict {
    fn from_probability(p: Probability) -> Self {
        let verdict = match p.cmp(&Probability::half()) {
            std::cmp::Ordering::Greater => Verdict::Beats,
            std::cmp::Ordering::Equal => Verdict::Matched,
            std::cmp::Ordering::Less => Verdict::Loses,
        };
        Self { p, verdict }
    }
}

fn require_group(group: &[Rational]) -> Result<()> {
    if group.is_empty() {
        return Err(Error::ZeroCount("group size"));
    }
    Ok(())
}

/// Exact outcome of `g1` (moving right) against `g2`.
pub fn relate(g1: &[Rational], g2: &[Rational]) -> Result<RelationVerdict> {
    require_group(g1)?;
    require_group(g2)?;
    let inst = Instance::new(g1.to_vec(), g2.to_vec())?;
    Ok(RelationVerdict::from_probability(p_a_wins_recursive(&inst)?))
}

/// Three groups and their cyclic pairwise win probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleWitness {
    #[serde(with = "serde_rational_vec")]
    pub p: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub q: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub r: Vec<Rational>,
    pub p_pq: Probability,
    pub p_qr: Probability,
    pub p_rp: Probability,
    /// True iff P beats Q, Q beats R and R beats P.
    pub is_cycle: bool,
}

pub fn verify_cycle(p: &[Rational], q: &[Rational], r: &[Rational]) -> Result<CycleWitness> {
    let pq = relate(p, q)?;
    let qr = relate(q, r)?;
    let rp = relate(r, p)?;
    let is_cycle = [&pq, &qr, &rp].iter().all(|v| v.verdict == Verdict::Beats);
    Ok(CycleWitness {
        p: p.to_vec(),
        q: q.to_vec(),
        r: r.to_vec(),
        p_pq: pq.p,
        p_qr: qr.p,
        p_rp: rp.p,
        is_cycle,
    })
}

/// Points `(x, y)` such that the pair `(x, y)` is matched with a single
/// particle of speed `speed`.
///
/// For `speed = 1` the single particle wins with `1/((1+x)(1+y))`, so the
/// curve is `y = (1 − x)/(1 + x)` on `0 < x < 1`. Other speeds follow by
/// scaling: `y = speed · (1 − x/speed)/(1 + x/speed)`.
pub fn matching_curve_single_vs_pair(speed: &Rational, xs: &[Rational]) -> Result<Vec<(Rational, Rational)>> {
    if !speed.is_positive() {
        return Err(Error::NonPositiveSpeed(speed.to_string()));
    }
    xs.iter()
        .map(|x| {
            let t = x / speed;
            if !t.is_positive() || t >= Rational::one() {
                return Err(Error::CurveOutOfRange(x.to_string()));
            }
            let y = speed * (Rational::one() - &t) / (Rational::one() + &t);
            Ok((x.clone(), y))
        })
        .collect()
}

/// `points` evenly spaced abscissae `k/(points+1)·speed`, `k = 1..=points`.
pub fn curve_grid(speed: &Rational, points: usize) -> Vec<Rational> {
    let denom = int(points as i64 + 1);
    (1..=points)
        .map(|k| speed * int(k as i64) / &denom)
        .collect()
}

/// CSV with header `x,y`, decimals to 12 significant digits.
pub fn curve_csv(points: &[(Rational, Rational)]) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in points {
        writeln!(out, "{},{}", format_decimal(x), format_decimal(y)).expect("write to string");
    }
    out
}

/// Win probability of the pair `(x, sum − x)` against `opponent` for each
/// `x` on a grid of `steps − 1` interior points of `(0, sum)`.
pub fn pair_strength_profile(sum: &Rational, opponent: &[Rational], steps: usize) -> Result<Vec<(Rational, Probability)>> {
    (1..steps)
        .map(|k| {
            let x = sum * ratio(k as i64, steps as i64);
            let y = sum - &x;
            let v = relate(&[x.clone(), y], opponent)?;
            Ok((x, v.p))
        })
        .collect()
}
