//! `P(A wins)` as a residue sum.
//!
//! With speeds grouped as `(a_i, x_i)` and `(b_j, y_j)`,
//!
//! ```text
//! Φ(w) = 1/w · ∏_i (1 − a_i w)^(−x_i) · ∏_j (1 + b_j w)^(−y_j)
//! P(A wins) = −Σ_i Res(Φ, 1/a_i)
//! ```
//!
//! Everything stays in the rational field. Simple poles use the product
//! formula directly; a pole of order `x` is handled by expanding the regular
//! part of `Φ` around it as a [`TruncatedSeries`] to degree `x − 1`.
//! The residues over a-poles, b-poles and the origin sum to zero, which is
//! the same statement as `P(a; b) + P(b; a) = 1`.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::{group, GroupedInstance, Instance, SpeedGroup};
use crate::rational::{format_decimal, int, Probability, Rational};
use crate::recursive::p_a_wins_recursive;
use crate::series::{binomial, TruncatedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Recursive,
    Distinct,
    Series,
    AllEqual,
    PerTypeEqual,
    Epsilon,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Recursive => "recursive",
            Method::Distinct => "distinct",
            Method::Series => "series",
            Method::AllEqual => "all-equal",
            Method::PerTypeEqual => "per-type-equal",
            Method::Epsilon => "epsilon",
        }
    }
}

/// Result of one solver: the probability plus the a-pole residues it came from.
///
/// For [`Method::Epsilon`] the report also carries the `epsilon` used and the
/// exact unperturbed `reference` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodReport {
    pub value: Probability,
    pub method: Method,
    pub residues: Vec<Rational>,
    pub epsilon: Option<Rational>,
    pub reference: Option<Probability>,
}

impl MethodReport {
    fn new(value: Rational, method: Method, residues: Vec<Rational>) -> Result<Self> {
        Ok(Self {
            value: Probability::new(value)?,
            method,
            residues,
            epsilon: None,
            reference: None,
        })
    }

    pub fn residue_sum(&self) -> Rational {
        self.residues.iter().fold(Rational::zero(), |acc, r| acc + r)
    }

    /// Absolute error against the reference, when one is attached.
    pub fn error(&self) -> Option<Rational> {
        self.reference
            .as_ref()
            .map(|r| (self.value.value() - r.value()).abs())
    }
}

#[derive(Serialize)]
struct ReportJson {
    value: String,
    decimal: String,
    method: &'static str,
    residues: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl Serialize for MethodReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            value: self.value.to_string(),
            decimal: self.value.decimal(),
            method: self.method.as_str(),
            residues: self.residues.iter().map(|r| r.to_string()).collect(),
            epsilon: self.epsilon.as_ref().map(|e| e.to_string()),
            reference: self.reference.as_ref().map(|r| r.to_string()),
            error: self.error().map(|e| format_decimal(&e)),
        }
        .serialize(s)
    }
}

/// The recursive oracle wrapped as a report (no residues).
pub fn recursive_report(inst: &Instance) -> Result<MethodReport> {
    let value = p_a_wins_recursive(inst)?;
    MethodReport::new(value.into_inner(), Method::Recursive, Vec::new())
}

fn check_distinct(side: char, speeds: &[Rational]) -> Result<()> {
    for (i, x) in speeds.iter().enumerate() {
        if speeds[..i].contains(x) {
            return Err(Error::DuplicateSpeed {
                side,
                speed: x.to_string(),
            });
        }
    }
    Ok(())
}

/// Simple-pole sum for pairwise distinct A speeds:
/// `Σ_i ∏_{k≠i} a_i/(a_i − a_k) · ∏_j a_i/(a_i + b_j)`.
///
/// B speeds may repeat; only a-poles are summed.
pub fn p_a_wins_distinct(inst: &Instance) -> Result<MethodReport> {
    let (a, b) = (inst.a(), inst.b());
    check_distinct('A', a)?;
    let terms: Vec<Rational> = a
        .iter()
        .enumerate()
        .map(|(i, ai)| {
            let same_side = a
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .fold(Rational::one(), |acc, (_, ak)| acc * ai / (ai - ak));
            b.iter().fold(same_side, |acc, bj| acc * ai / (ai + bj))
        })
        .collect();
    let value = terms.iter().fold(Rational::zero(), |acc, t| acc + t);
    let residues = terms.into_iter().map(|t| -t).collect();
    MethodReport::new(value, Method::Distinct, residues)
}

/// Factor `(1 + beta·w)^(−exponent)` of Φ. A-groups have `beta = −a`,
/// B-groups `beta = b`; the pole sits at `w = −1/beta`.
#[derive(Debug, Clone)]
struct PoleFactor {
    beta: Rational,
    exponent: usize,
}

fn pole_factors(g: &GroupedInstance) -> (Vec<PoleFactor>, usize) {
    let a = g.a_groups().iter().map(|SpeedGroup { speed, multiplicity }| PoleFactor {
        beta: -speed,
        exponent: *multiplicity,
    });
    let b = g.b_groups().iter().map(|SpeedGroup { speed, multiplicity }| PoleFactor {
        beta: speed.clone(),
        exponent: *multiplicity,
    });
    (a.chain(b).collect(), g.a_groups().len())
}

/// Exact residue of Φ at the pole of `factors[p]`.
///
/// Writing `w = w0 + u` with `w0 = −1/beta_p`, the pole factor becomes
/// `(beta_p·u)^(−e)` and the rest of Φ is analytic at `u = 0`. The residue
/// is `beta_p^(−e)` times the `u^(e−1)` coefficient of that regular part.
fn residue_at(factors: &[PoleFactor], p: usize) -> Rational {
    let pole = &factors[p];
    let degree = pole.exponent - 1;
    let w0 = -pole.beta.recip();

    // Denominator of the regular part: w · ∏_{k≠p} (1 + beta_k w)^{e_k}.
    let mut denom = TruncatedSeries::linear(w0.clone(), Rational::one(), degree);
    for (k, f) in factors.iter().enumerate() {
        if k == p {
            continue;
        }
        let base = TruncatedSeries::linear(Rational::one() + &f.beta * &w0, f.beta.clone(), degree);
        denom = &denom * &base.pow(f.exponent as u64);
    }
    let regular = denom
        .inv()
        .expect("poles of distinct groups never coincide");
    let scale = num_traits::Pow::pow(pole.beta.recip(), pole.exponent);
    regular.coeff(degree) * scale
}

/// All residues of Φ: a-poles and b-poles in group order, plus the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleResidues {
    pub a_poles: Vec<Rational>,
    pub b_poles: Vec<Rational>,
    pub origin: Rational,
}

impl PoleResidues {
    pub fn total(&self) -> Rational {
        self.a_poles
            .iter()
            .chain(&self.b_poles)
            .fold(self.origin.clone(), |acc, r| acc + r)
    }
}

pub fn pole_residues(g: &GroupedInstance) -> PoleResidues {
    let (factors, split) = pole_factors(g);
    let mut all: Vec<Rational> = (0..factors.len())
        .into_par_iter()
        .map(|p| residue_at(&factors, p))
        .collect();
    let b_poles = all.split_off(split);
    PoleResidues {
        a_poles: all,
        b_poles,
        // Φ(w) = 1/w · (1 + O(w)) near the origin.
        origin: Rational::one(),
    }
}

/// Exact `P(A wins)` for any multiplicities via series residues at the a-poles.
pub fn p_a_wins_series(g: &GroupedInstance) -> Result<MethodReport> {
    let (factors, split) = pole_factors(g);
    let residues: Vec<Rational> = (0..split)
        .into_par_iter()
        .map(|p| residue_at(&factors, p))
        .collect();
    let value = -residues.iter().fold(Rational::zero(), |acc, r| acc + r);
    MethodReport::new(value, Method::Series, residues)
}

fn check_counts(m: u64, n: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroCount("m"));
    }
    if n == 0 {
        return Err(Error::ZeroCount("n"));
    }
    Ok(())
}

/// `s(m, n) = Σ_{i=0}^{m−1} C(n+i−1, i) · 2^(−n−i)`: `m` vs `n` particles,
/// all of the same speed.
pub fn s_equal_speed(m: u64, n: u64) -> Result<Probability> {
    check_counts(m, n)?;
    let mut sum = Rational::zero();
    for i in 0..m {
        let weight = Rational::new(
            binomial(n + i - 1, i),
            num_bigint::BigInt::one() << (n + i),
        );
        sum += weight;
    }
    Probability::new(sum)
}

/// `s_v(m, n) = Σ_{i=0}^{m−1} C(n+i−1, i) · v^i / (1+v)^(n+i)`: `m` particles
/// of speed 1 against `n` particles of speed `v`.
pub fn s_two_speeds(m: u64, n: u64, v: &Rational) -> Result<Probability> {
    check_counts(m, n)?;
    if !v.is_positive() {
        return Err(Error::NonPositiveSpeed(v.to_string()));
    }
    let a_share = Rational::one() / (Rational::one() + v);
    let b_share = v * &a_share;
    let mut sum = Rational::zero();
    // term_i = C(n+i−1, i) · b_share^i · a_share^n
    let mut power = num_traits::Pow::pow(&a_share, n);
    for i in 0..m {
        sum += Rational::from_integer(binomial(n + i - 1, i)) * &power;
        power *= &b_share;
    }
    Probability::new(sum)
}

/// Closed form for one speed group per side, reduced by scaling to
/// speed-1 A particles against speed-`b/a` B particles.
pub fn p_a_wins_closed_form(g: &GroupedInstance) -> Result<MethodReport> {
    let (ag, bg) = match (g.a_groups(), g.b_groups()) {
        ([ag], [bg]) => (ag, bg),
        _ => return Err(Error::ClosedFormNotApplicable),
    };
    let (m, n) = (ag.multiplicity as u64, bg.multiplicity as u64);
    if ag.speed == bg.speed {
        let value = s_equal_speed(m, n)?;
        return MethodReport::new(value.into_inner(), Method::AllEqual, Vec::new());
    }
    let v = &bg.speed / &ag.speed;
    let value = s_two_speeds(m, n, &v)?;
    MethodReport::new(value.into_inner(), Method::PerTypeEqual, Vec::new())
}

/// Splits repeated speeds: the `q`-th copy of each speed `s` becomes
/// `s + q·eps` (`q = 1..multiplicity`), on both sides.
pub fn perturb(g: &GroupedInstance, eps: &Rational) -> Result<Instance> {
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let spread = |groups: &[SpeedGroup]| -> Vec<Rational> {
        groups
            .iter()
            .flat_map(|grp| (1..=grp.multiplicity).map(move |q| &grp.speed + eps * int(q as i64)))
            .collect()
    };
    let (a, b) = (spread(g.a_groups()), spread(g.b_groups()));
    for side in [&a, &b] {
        let mut sorted = side.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::EpsilonCollision(eps.to_string()));
        }
    }
    Instance::new(a, b)
}

/// Distinct-case value on the ε-perturbed instance. Approximates the exact
/// value, which is attached as `reference`.
pub fn p_a_wins_epsilon(g: &GroupedInstance, eps: &Rational) -> Result<MethodReport> {
    let perturbed = perturb(g, eps)?;
    let distinct = p_a_wins_distinct(&perturbed)?;
    let reference = p_a_wins_series(g)?.value;
    Ok(MethodReport {
        value: distinct.value,
        method: Method::Epsilon,
        residues: distinct.residues,
        epsilon: Some(eps.clone()),
        reference: Some(reference),
    })
}

/// `gap / (1000·(N+1))`, where `gap` is the smallest spacing among the
/// distinct values of all speeds and all pairwise sums `a_i + b_j`, and `N`
/// is the particle count. With a single distinct value the gap is that value.
pub fn default_epsilon(g: &GroupedInstance) -> Rational {
    let a = g.a_groups().iter().map(|x| &x.speed);
    let b = g.b_groups().iter().map(|x| &x.speed);
    let mut values: Vec<Rational> = a.clone().chain(b.clone()).cloned().collect();
    for x in a {
        for y in b.clone() {
            values.push(x + y);
        }
    }
    values.sort();
    values.dedup();
    let gap = values
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
        .unwrap_or_else(|| values[0].clone());
    let n = g.particle_count() as i64;
    gap / int(1000 * (n + 1))
}

/// Distinct A speeds use the simple-pole formula, repeated ones the series
/// residues.
pub fn p_a_wins_auto(inst: &Instance) -> Result<MethodReport> {
    if check_distinct('A', inst.a()).is_ok() {
        p_a_wins_distinct(inst)
    } else {
        p_a_wins_series(&group(inst))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn inst(a: &[i64], b: &[i64]) -> Instance {
        Instance::from_ints(a, b).unwrap()
    }

    fn grouped(a: &[(i64, usize)], b: &[(i64, usize)]) -> GroupedInstance {
        let conv = |xs: &[(i64, usize)]| xs.iter().map(|&(s, k)| ((s, 1), k)).collect::<Vec<_>>();
        GroupedInstance::from_pairs(&conv(a), &conv(b)).unwrap()
    }

    fn oracle(i: &Instance) -> Rational {
        p_a_wins_recursive(i).unwrap().into_inner()
    }

    #[test]
    fn distinct_examples() {
        let r = p_a_wins_distinct(&inst(&[2, 1], &[1])).unwrap();
        assert_eq!(r.value.value(), &ratio(5, 6));
        // (2/(2−1))·(2/3) and (1/(1−2))·(1/2), negated.
        assert_eq!(r.residues, vec![ratio(-4, 3), ratio(1, 2)]);
        assert_eq!(r.residue_sum(), -r.value.value().clone());

        let r = p_a_wins_distinct(&inst(&[60], &[20, 30])).unwrap();
        assert_eq!(r.value, Probability::half());
        let r = p_a_wins_distinct(&inst(&[30, 20], &[15, 36])).unwrap();
        assert_eq!(r.value.value(), &ratio(270, 539));
        assert_eq!(r.method, Method::Distinct);
    }

    #[test]
    fn distinct_rejects_repeated_a_but_not_b() {
        assert!(matches!(
            p_a_wins_distinct(&inst(&[1, 1], &[1])),
            Err(Error::DuplicateSpeed { side: 'A', .. })
        ));
        let i = inst(&[3, 1], &[2, 2, 2]);
        assert_eq!(p_a_wins_distinct(&i).unwrap().value.value(), &oracle(&i));
    }

    #[test]
    fn series_examples() {
        let r = p_a_wins_series(&grouped(&[(1, 2)], &[(1, 2)])).unwrap();
        assert_eq!(r.value, Probability::half());
        let r = p_a_wins_series(&grouped(&[(1, 2)], &[(1, 1)])).unwrap();
        assert_eq!(r.value.value(), &ratio(3, 4));
        let g = grouped(&[(2, 2), (3, 1)], &[(5, 1)]);
        let r = p_a_wins_series(&g).unwrap();
        assert_eq!(r.value.value(), &oracle(&inst(&[2, 2, 3], &[5])));
        assert_eq!(r.residues.len(), 2);
    }

    #[test]
    fn series_handles_empty_sides() {
        let r = p_a_wins_series(&grouped(&[(1, 3), (2, 1)], &[])).unwrap();
        assert_eq!(r.value, Probability::one());
        let r = p_a_wins_series(&grouped(&[], &[(4, 2)])).unwrap();
        assert_eq!(r.value, Probability::zero());
    }

    #[test]
    fn residues_sum_to_zero_with_origin() {
        let g = grouped(&[(2, 2), (3, 1)], &[(5, 3), (1, 1)]);
        let res = pole_residues(&g);
        assert_eq!(res.origin, Rational::one());
        assert!(res.total().is_zero());
        let p_b = -res.b_poles.iter().fold(Rational::zero(), |acc, r| acc + r);
        assert_eq!(p_b, p_a_wins_series(&g.swapped()).unwrap().value.into_inner());
    }

    #[test]
    fn degree_zero_series_matches_simple_poles() {
        let i = inst(&[30, 20, 7], &[15, 36, 36]);
        let d = p_a_wins_distinct(&i).unwrap();
        let s = p_a_wins_series(&group(&i)).unwrap();
        assert_eq!(d.value, s.value);
        // Group order is ascending speed: 7, 20, 30 vs given order 30, 20, 7.
        let mut dr = d.residues.clone();
        dr.reverse();
        assert_eq!(dr, s.residues);
    }

    #[test]
    fn equal_speed_examples() {
        assert_eq!(s_equal_speed(1, 1).unwrap(), Probability::half());
        assert_eq!(s_equal_speed(2, 2).unwrap(), Probability::half());
        assert_eq!(s_equal_speed(2, 1).unwrap().into_inner(), ratio(3, 4));
        assert_eq!(s_equal_speed(0, 1), Err(Error::ZeroCount("m")));
        assert_eq!(s_equal_speed(1, 0), Err(Error::ZeroCount("n")));
        for k in 1..=10 {
            assert_eq!(s_equal_speed(k, k).unwrap(), Probability::half(), "k = {k}");
        }
    }

    #[test]
    fn two_speed_examples() {
        assert_eq!(s_two_speeds(1, 1, &int(3)).unwrap().into_inner(), ratio(1, 4));
        assert_eq!(s_two_speeds(3, 2, &int(1)).unwrap(), s_equal_speed(3, 2).unwrap());
        assert_eq!(s_two_speeds(2, 1, &int(2)).unwrap().into_inner(), ratio(5, 9));
        assert_eq!(
            s_two_speeds(2, 1, &int(2)).unwrap().into_inner(),
            oracle(&inst(&[1, 1], &[2]))
        );
        assert!(matches!(s_two_speeds(1, 1, &int(0)), Err(Error::NonPositiveSpeed(_))));
    }

    #[test]
    fn closed_form_dispatch() {
        let r = p_a_wins_closed_form(&grouped(&[(3, 4)], &[(3, 4)])).unwrap();
        assert_eq!((r.method, r.value), (Method::AllEqual, Probability::half()));
        let g = grouped(&[(2, 3)], &[(5, 2)]);
        let r = p_a_wins_closed_form(&g).unwrap();
        assert_eq!(r.method, Method::PerTypeEqual);
        assert_eq!(r.value.value(), &oracle(&g.expand()));
        assert_eq!(
            p_a_wins_closed_form(&grouped(&[(1, 1), (2, 1)], &[(1, 1)])),
            Err(Error::ClosedFormNotApplicable)
        );
        assert_eq!(
            p_a_wins_closed_form(&grouped(&[(1, 1)], &[])),
            Err(Error::ClosedFormNotApplicable)
        );
    }

    #[test]
    fn epsilon_examples() {
        let g = grouped(&[(1, 2)], &[(1, 1)]);
        let r = p_a_wins_epsilon(&g, &ratio(1, 1000)).unwrap();
        assert_eq!(r.reference.as_ref().unwrap().value(), &ratio(3, 4));
        assert!(r.error().unwrap() < ratio(1, 100));

        let g = grouped(&[(1, 1)], &[(2, 1)]);
        let eps = ratio(1, 7);
        let r = p_a_wins_epsilon(&g, &eps).unwrap();
        let expected = (int(1) + &eps) / (int(3) + &eps * int(2));
        assert_eq!(r.value.value(), &expected);
        assert_eq!(r.reference.unwrap().into_inner(), ratio(1, 3));
        assert_eq!(r.epsilon, Some(eps));
    }

    #[test]
    fn epsilon_converges() {
        let g = grouped(&[(1, 3)], &[(1, 2)]);
        let eps = default_epsilon(&g);
        let errors: Vec<Rational> = [1, 10, 100]
            .iter()
            .map(|&k| p_a_wins_epsilon(&g, &(&eps / int(k))).unwrap().error().unwrap())
            .collect();
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    }

    #[test]
    fn epsilon_errors() {
        let g = grouped(&[(1, 2)], &[(1, 1)]);
        assert_eq!(p_a_wins_epsilon(&g, &int(0)), Err(Error::NonPositiveEpsilon));
        // 1 + 2·1 == 2 + 1·1
        let g = grouped(&[(1, 2), (2, 1)], &[(5, 1)]);
        assert!(matches!(perturb(&g, &int(1)), Err(Error::EpsilonCollision(_))));
        assert!(perturb(&g, &ratio(1, 10)).is_ok());
    }

    #[test]
    fn default_epsilon_examples() {
        assert_eq!(default_epsilon(&grouped(&[(1, 3)], &[(1, 2)])), ratio(1, 6000));
        assert_eq!(
            default_epsilon(&grouped(&[(1, 1), (2, 1)], &[(5, 1)])),
            ratio(1, 4000)
        );
        let g = GroupedInstance::from_pairs(&[((1, 1), 2)], &[((11, 10), 1)]).unwrap();
        assert_eq!(default_epsilon(&g), ratio(1, 40000));
        assert_eq!(default_epsilon(&grouped(&[(4, 3)], &[])), ratio(4, 4000));
    }

    #[test]
    fn auto_picks_by_a_distinctness() {
        assert_eq!(p_a_wins_auto(&inst(&[30, 20], &[15, 36])).unwrap().method, Method::Distinct);
        assert_eq!(p_a_wins_auto(&inst(&[1, 1, 1], &[1, 1])).unwrap().method, Method::Series);
    }

    #[test]
    fn report_json_shape() {
        let r = p_a_wins_distinct(&inst(&[30, 20], &[15, 36])).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["value"], "270/539");
        assert_eq!(v["decimal"], "0.500927643785");
        assert_eq!(v["method"], "distinct");
        assert_eq!(v["residues"].as_array().unwrap().len(), 2);
        assert!(v.get("epsilon").is_none());
    }
}
