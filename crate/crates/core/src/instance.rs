//! Scattering instances: validation, grouping, canonical keys, and JSON ingestion.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{parse_rational, serde_rational, serde_rational_vec, Rational};

/// Ordered particle speeds for both sides. Side A moves right, side B left.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    #[serde(with = "serde_rational_vec")]
    a: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    b: Vec<Rational>,
}

#[derive(Deserialize)]
struct RawInstance {
    #[serde(with = "serde_rational_vec")]
    a: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    b: Vec<Rational>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.a, raw.b)
    }
}

fn check_speed(speed: &Rational) -> Result<()> {
    if !speed.is_positive() {
        return Err(Error::NonPositiveSpeed(speed.to_string()));
    }
    Ok(())
}

impl Instance {
    /// Every speed must be strictly positive and at least one side non-empty.
    pub fn new(a: Vec<Rational>, b: Vec<Rational>) -> Result<Self> {
        if a.is_empty() && b.is_empty() {
            return Err(Error::EmptyInstance);
        }
        a.iter().chain(&b).try_for_each(check_speed)?;
        Ok(Self { a, b })
    }

    /// Convenience constructor from integer speeds.
    pub fn from_ints(a: &[i64], b: &[i64]) -> Result<Self> {
        let conv = |xs: &[i64]| xs.iter().map(|&x| crate::rational::int(x)).collect();
        Self::new(conv(a), conv(b))
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn particle_count(&self) -> usize {
        self.a.len() + self.b.len()
    }

    /// The mirrored instance: B becomes the right-moving side.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Multiplies every speed by `factor`, which must be positive.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        check_speed(factor)?;
        Ok(Self {
            a: self.a.iter().map(|x| x * factor).collect(),
            b: self.b.iter().map(|x| x * factor).collect(),
        })
    }

    pub fn require_both_sides(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(Error::EmptySide('A'));
        }
        if self.b.is_empty() {
            return Err(Error::EmptySide('B'));
        }
        Ok(())
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_key(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

/// A distinct speed with its particle count.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpeedGroup {
    #[serde(with = "serde_rational")]
    pub speed: Rational,
    pub multiplicity: usize,
}

impl SpeedGroup {
    pub fn new(speed: Rational, multiplicity: usize) -> Self {
        Self { speed, multiplicity }
    }
}

/// Distinct speeds with multiplicities, one list per side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupedInstance {
    a_groups: Vec<SpeedGroup>,
    b_groups: Vec<SpeedGroup>,
}

impl GroupedInstance {
    pub fn new(a_groups: Vec<SpeedGroup>, b_groups: Vec<SpeedGroup>) -> Result<Self> {
        for (side, groups) in [('A', &a_groups), ('B', &b_groups)] {
            for (idx, g) in groups.iter().enumerate() {
                check_speed(&g.speed)?;
                if g.multiplicity == 0 {
                    return Err(Error::ZeroMultiplicity);
                }
                if groups[..idx].iter().any(|h| h.speed == g.speed) {
                    return Err(Error::DuplicateSpeed {
                        side,
                        speed: g.speed.to_string(),
                    });
                }
            }
        }
        if a_groups.is_empty() && b_groups.is_empty() {
            return Err(Error::EmptyInstance);
        }
        Ok(Self { a_groups, b_groups })
    }

    /// Builds from `(speed, multiplicity)` pairs with integer-ratio speeds `(num, den)`.
    pub fn from_pairs(a: &[((i64, i64), usize)], b: &[((i64, i64), usize)]) -> Result<Self> {
        let conv = |xs: &[((i64, i64), usize)]| {
            xs.iter()
                .map(|&((p, q), k)| SpeedGroup::new(crate::rational::ratio(p, q), k))
                .collect()
        };
        Self::new(conv(a), conv(b))
    }

    pub fn a_groups(&self) -> &[SpeedGroup] {
        &self.a_groups
    }

    pub fn b_groups(&self) -> &[SpeedGroup] {
        &self.b_groups
    }

    pub fn particle_count(&self) -> usize {
        self.a_groups
            .iter()
            .chain(&self.b_groups)
            .map(|g| g.multiplicity)
            .sum()
    }

    pub fn swapped(&self) -> Self {
        Self {
            a_groups: self.b_groups.clone(),
            b_groups: self.a_groups.clone(),
        }
    }

    /// Expands multiplicities back into an [`Instance`], groups in order.
    pub fn expand(&self) -> Instance {
        let expand = |groups: &[SpeedGroup]| {
            groups
                .iter()
                .flat_map(|g| std::iter::repeat_n(g.speed.clone(), g.multiplicity))
                .collect()
        };
        Instance {
            a: expand(&self.a_groups),
            b: expand(&self.b_groups),
        }
    }

    pub fn has_repeats(&self) -> bool {
        self.a_groups.iter().chain(&self.b_groups).any(|g| g.multiplicity > 1)
    }
}

fn group_side(speeds: &[Rational]) -> Vec<SpeedGroup> {
    let mut counts: BTreeMap<&Rational, usize> = BTreeMap::new();
    for s in speeds {
        *counts.entry(s).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(speed, multiplicity)| SpeedGroup::new(speed.clone(), multiplicity))
        .collect()
}

/// Merges identical speeds, listing distinct speeds in ascending order.
pub fn group(inst: &Instance) -> GroupedInstance {
    GroupedInstance {
        a_groups: group_side(&inst.a),
        b_groups: group_side(&inst.b),
    }
}

/// Order-insensitive identity of an instance: the sorted speed multisets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    a: Vec<Rational>,
    b: Vec<Rational>,
}

pub fn canonical_key(inst: &Instance) -> CanonicalKey {
    let mut a = inst.a.clone();
    let mut b = inst.b.clone();
    a.sort();
    b.sort();
    CanonicalKey { a, b }
}

fn speed_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::MalformedRational(other.to_string())),
    }
}

/// Parses `{"a": [speed...], "b": [speed...]}` where each speed is a JSON
/// number or a string such as `"30"`, `"3/7"` or `"0.9"`.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidDocument(e.to_string()))?;
    let side = |name: &str| -> Result<Vec<Rational>> {
        let list = doc
            .get(name)
            .ok_or_else(|| Error::InvalidDocument(format!("missing field {name:?}")))?
            .as_array()
            .ok_or_else(|| Error::InvalidDocument(format!("field {name:?} must be a list")))?;
        list.iter().map(speed_from_value).collect()
    };
    Instance::new(side("a")?, side("b")?)
}

/// Parses a comma-separated speed list; an empty or blank string is an empty side.
pub fn parse_speed_list(text: &str) -> Result<Vec<Rational>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parse_instance_examples() {
        let inst = parse_instance(r#"{"a":["30","20"],"b":["15","36"]}"#).unwrap();
        assert_eq!(inst, Instance::from_ints(&[30, 20], &[15, 36]).unwrap());

        let inst = parse_instance(r#"{"a":["1"],"b":[]}"#).unwrap();
        assert_eq!(inst.a(), &[int(1)]);
        assert!(inst.b().is_empty());

        let inst = parse_instance(r#"{"a":["0.9","0.0526317"],"b":["1"]}"#).unwrap();
        assert_eq!(inst.a(), &[ratio(9, 10), ratio(526_317, 10_000_000)]);
        assert_eq!(inst.b(), &[int(1)]);
    }

    #[test]
    fn parse_instance_accepts_numbers_exactly() {
        let inst = parse_instance(r#"{"a":[30, 0.1, "3/7"],"b":[1e-1]}"#).unwrap();
        assert_eq!(inst.a(), &[int(30), ratio(1, 10), ratio(3, 7)]);
        assert_eq!(inst.b(), &[ratio(1, 10)]);
    }

    #[test]
    fn parse_instance_errors() {
        assert_eq!(
            parse_instance(r#"{"a":["0"],"b":["1"]}"#),
            Err(Error::NonPositiveSpeed("0".into()))
        );
        assert!(matches!(
            parse_instance(r#"{"a":["-2"],"b":[]}"#),
            Err(Error::NonPositiveSpeed(_))
        ));
        assert!(matches!(
            parse_instance(r#"{"a":["x"],"b":["1"]}"#),
            Err(Error::MalformedRational(_))
        ));
        assert_eq!(parse_instance(r#"{"a":[],"b":[]}"#), Err(Error::EmptyInstance));
        assert!(matches!(parse_instance(r#"{"a":[]}"#), Err(Error::InvalidDocument(_))));
        assert!(matches!(parse_instance("not json"), Err(Error::InvalidDocument(_))));
        assert!(matches!(
            parse_instance(r#"{"a":"1","b":[]}"#),
            Err(Error::InvalidDocument(_))
        ));
    }

    #[test]
    fn serde_round_trip_validates() {
        let inst = Instance::new(vec![ratio(3, 7)], vec![int(2)]).unwrap();
        let json = inst.to_json();
        assert_eq!(json, r#"{"a":["3/7"],"b":["2"]}"#);
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst);
        assert!(serde_json::from_str::<Instance>(r#"{"a":[],"b":[]}"#).is_err());
    }

    #[test]
    fn group_examples() {
        let g = group(&Instance::from_ints(&[1, 1, 1], &[1, 1]).unwrap());
        assert_eq!(g.a_groups(), &[SpeedGroup::new(int(1), 3)]);
        assert_eq!(g.b_groups(), &[SpeedGroup::new(int(1), 2)]);

        let g = group(&Instance::from_ints(&[30, 20], &[15, 36]).unwrap());
        assert_eq!(
            g.a_groups(),
            &[SpeedGroup::new(int(20), 1), SpeedGroup::new(int(30), 1)]
        );
        assert_eq!(
            g.b_groups(),
            &[SpeedGroup::new(int(15), 1), SpeedGroup::new(int(36), 1)]
        );

        let g = group(&Instance::from_ints(&[2, 2, 3], &[5]).unwrap());
        assert_eq!(
            g.a_groups(),
            &[SpeedGroup::new(int(2), 2), SpeedGroup::new(int(3), 1)]
        );
        assert_eq!(g.b_groups(), &[SpeedGroup::new(int(5), 1)]);
    }

    #[test]
    fn grouped_instance_validation() {
        assert_eq!(
            GroupedInstance::from_pairs(&[((1, 1), 0)], &[]),
            Err(Error::ZeroMultiplicity)
        );
        assert!(matches!(
            GroupedInstance::from_pairs(&[((1, 1), 1), ((2, 2), 1)], &[]),
            Err(Error::DuplicateSpeed { side: 'A', .. })
        ));
        assert_eq!(GroupedInstance::from_pairs(&[], &[]), Err(Error::EmptyInstance));
        // The same speed on opposite sides is fine.
        assert!(GroupedInstance::from_pairs(&[((1, 1), 2)], &[((1, 1), 1)]).is_ok());
    }

    #[test]
    fn canonical_key_examples() {
        let k1 = Instance::from_ints(&[30, 20], &[15, 36]).unwrap().canonical_key();
        let k2 = Instance::from_ints(&[20, 30], &[36, 15]).unwrap().canonical_key();
        assert_eq!(k1, k2);

        let k1 = Instance::from_ints(&[1], &[2]).unwrap().canonical_key();
        let k2 = Instance::from_ints(&[2], &[1]).unwrap().canonical_key();
        assert_ne!(k1, k2);

        let k1 = Instance::from_ints(&[1, 1], &[]).unwrap().canonical_key();
        let k2 = Instance::from_ints(&[1], &[]).unwrap().canonical_key();
        assert_ne!(k1, k2);
    }

    #[test]
    fn speed_lists() {
        assert_eq!(parse_speed_list("").unwrap(), Vec::<Rational>::new());
        assert_eq!(parse_speed_list("1, 3/2,0.5").unwrap(), vec![int(1), ratio(3, 2), ratio(1, 2)]);
        assert!(parse_speed_list("1,,2").is_err());
    }
}
