//! Finite unions of intervals on the extended real line.
//!
//! Used both for focal sets of scalar parameters and for assertions. The
//! text form is a union of intervals such as `(-inf,9] u [11,inf)`, with
//! `{x}` for a singleton and `{}` for the empty set.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ImError, Result};

/// One end of an interval. Infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub value: f64,
    pub closed: bool,
}

impl Endpoint {
    pub fn closed(value: f64) -> Self {
        Endpoint { value, closed: value.is_finite() }
    }

    pub fn open(value: f64) -> Self {
        Endpoint { value, closed: false }
    }

    pub fn new(value: f64, closed: bool) -> Self {
        Endpoint { value, closed: closed && value.is_finite() }
    }
}

/// A nonempty interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    /// Returns `None` when the endpoints describe an empty interval.
    pub fn new(lo: Endpoint, hi: Endpoint) -> Option<Interval> {
        if lo.value.is_nan() || hi.value.is_nan() {
            return None;
        }
        let lo = Endpoint::new(lo.value, lo.closed);
        let hi = Endpoint::new(hi.value, hi.closed);
        match lo.value.partial_cmp(&hi.value)? {
            Ordering::Less => Some(Interval { lo, hi }),
            Ordering::Equal if lo.closed && hi.closed => Some(Interval { lo, hi }),
            _ => None,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Option<Interval> {
        Interval::new(Endpoint::closed(lo), Endpoint::closed(hi))
    }

    pub fn open(lo: f64, hi: f64) -> Option<Interval> {
        Interval::new(Endpoint::open(lo), Endpoint::open(hi))
    }

    pub fn point(x: f64) -> Option<Interval> {
        Interval::closed(x, x)
    }

    pub fn is_point(&self) -> bool {
        self.lo.value == self.hi.value
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.value.is_finite() && self.hi.value.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lo.value || (x == self.lo.value && self.lo.closed);
        let below = x < self.hi.value || (x == self.hi.value && self.hi.closed);
        above && below
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = tighter_lower(self.lo, other.lo);
        let hi = tighter_upper(self.hi, other.hi);
        Interval::new(lo, hi)
    }

    fn contains_interval(&self, inner: &Interval) -> bool {
        let lo_ok = self.lo.value < inner.lo.value
            || (self.lo.value == inner.lo.value && (self.lo.closed || !inner.lo.closed));
        let hi_ok = self.hi.value > inner.hi.value
            || (self.hi.value == inner.hi.value && (self.hi.closed || !inner.hi.closed));
        lo_ok && hi_ok
    }
}

fn tighter_lower(a: Endpoint, b: Endpoint) -> Endpoint {
    match a.value.total_cmp(&b.value) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => Endpoint::new(a.value, a.closed && b.closed),
    }
}

fn tighter_upper(a: Endpoint, b: Endpoint) -> Endpoint {
    match a.value.total_cmp(&b.value) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => Endpoint::new(a.value, a.closed && b.closed),
    }
}

/// Sorted, pairwise disjoint union of nonempty intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamSet {
    components: Vec<Interval>,
}

impl ParamSet {
    pub fn empty() -> Self {
        ParamSet { components: Vec::new() }
    }

    pub fn real_line() -> Self {
        ParamSet::from(Interval::open(f64::NEG_INFINITY, f64::INFINITY).expect("nonempty"))
    }

    pub fn point(x: f64) -> Self {
        Interval::point(x).map_or_else(ParamSet::empty, ParamSet::from)
    }

    /// Normalizes an arbitrary list of intervals: sorts and merges
    /// overlapping or abutting components.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(parts: I) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().collect();
        parts.sort_by(|a, b| {
            a.lo.value
                .total_cmp(&b.lo.value)
                .then_with(|| b.lo.closed.cmp(&a.lo.closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            if let Some(last) = out.last_mut() {
                let touches = next.lo.value < last.hi.value
                    || (next.lo.value == last.hi.value && (next.lo.closed || last.hi.closed));
                if touches {
                    last.hi = match next.hi.value.total_cmp(&last.hi.value) {
                        Ordering::Greater => next.hi,
                        Ordering::Less => last.hi,
                        Ordering::Equal => Endpoint::new(last.hi.value, last.hi.closed || next.hi.closed),
                    };
                    continue;
                }
            }
            out.push(next);
        }
        ParamSet { components: out }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// True when some component reaches `-inf` or `inf`.
    pub fn is_unbounded(&self) -> bool {
        self.components.iter().any(|c| !c.is_bounded())
    }

    /// Membership; `inf` and `-inf` count as members when a component
    /// extends to them.
    pub fn contains(&self, x: f64) -> bool {
        if x == f64::INFINITY {
            return self.components.last().is_some_and(|c| c.hi.value == f64::INFINITY);
        }
        if x == f64::NEG_INFINITY {
            return self.components.first().is_some_and(|c| c.lo.value == f64::NEG_INFINITY);
        }
        self.components.iter().any(|c| c.contains(x))
    }

    pub fn union(&self, other: &ParamSet) -> ParamSet {
        ParamSet::from_intervals(self.components.iter().chain(&other.components).copied())
    }

    pub fn intersection(&self, other: &ParamSet) -> ParamSet {
        let mut parts = Vec::new();
        for a in &self.components {
            for b in &other.components {
                if let Some(c) = a.intersection(b) {
                    parts.push(c);
                }
            }
        }
        ParamSet::from_intervals(parts)
    }

    /// Complement within the real line.
    pub fn complement(&self) -> ParamSet {
        let mut parts = Vec::with_capacity(self.components.len() + 1);
        let mut lo = Endpoint::open(f64::NEG_INFINITY);
        for c in &self.components {
            let hi = Endpoint::new(c.lo.value, !c.lo.closed);
            if let Some(gap) = Interval::new(lo, hi) {
                parts.push(gap);
            }
            lo = Endpoint::new(c.hi.value, !c.hi.closed);
        }
        if let Some(gap) = Interval::new(lo, Endpoint::open(f64::INFINITY)) {
            parts.push(gap);
        }
        ParamSet::from_intervals(parts)
    }

    /// Topological closure in the real line.
    pub fn closure(&self) -> ParamSet {
        ParamSet::from_intervals(self.components.iter().filter_map(|c| {
            Interval::new(Endpoint::closed(c.lo.value), Endpoint::closed(c.hi.value))
        }))
    }

    /// Topological interior in the real line.
    pub fn interior(&self) -> ParamSet {
        ParamSet::from_intervals(
            self.components
                .iter()
                .filter_map(|c| Interval::open(c.lo.value, c.hi.value)),
        )
    }

    pub fn is_subset_of(&self, other: &ParamSet) -> bool {
        self.components
            .iter()
            .all(|c| other.components.iter().any(|o| o.contains_interval(c)))
    }

    pub fn intersects(&self, other: &ParamSet) -> bool {
        self.components
            .iter()
            .any(|a| other.components.iter().any(|b| a.intersection(b).is_some()))
    }

    /// Image of the interval `lo..hi` (in `ψ`) under `θ = 1/ψ`.
    ///
    /// `ψ = 0` has no finite image; an interval with `0` inside maps to the
    /// two unbounded pieces `(-inf, 1/lo] ∪ [1/hi, inf)`.
    pub fn reciprocal_image(lo: Endpoint, hi: Endpoint) -> ParamSet {
        let Some(iv) = Interval::new(lo, hi) else {
            return ParamSet::empty();
        };
        let (lo, hi) = (iv.lo, iv.hi);
        let inv = |e: Endpoint| Endpoint::new(1.0 / e.value, e.closed);
        if lo.value > 0.0 || hi.value < 0.0 {
            // infinite ends map to an open end at 0
            let a = if hi.value.is_infinite() { Endpoint::open(0.0) } else { inv(hi) };
            let b = if lo.value.is_infinite() { Endpoint::open(0.0) } else { inv(lo) };
            return Interval::new(a, b).map_or_else(ParamSet::empty, ParamSet::from);
        }
        let mut parts = Vec::new();
        if lo.value < 0.0 {
            let b = if lo.value.is_infinite() { Endpoint::open(0.0) } else { inv(lo) };
            parts.extend(Interval::new(Endpoint::open(f64::NEG_INFINITY), b));
        }
        if hi.value > 0.0 {
            let a = if hi.value.is_infinite() { Endpoint::open(0.0) } else { inv(hi) };
            parts.extend(Interval::new(a, Endpoint::open(f64::INFINITY)));
        }
        ParamSet::from_intervals(parts)
    }
}

impl From<Interval> for ParamSet {
    fn from(iv: Interval) -> Self {
        ParamSet { components: vec![iv] }
    }
}

fn fmt_number(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            if c.is_point() {
                write!(f, "{{{}}}", fmt_number(c.lo.value))?;
            } else {
                write!(
                    f,
                    "{}{},{}{}",
                    if c.lo.closed { '[' } else { '(' },
                    fmt_number(c.lo.value),
                    fmt_number(c.hi.value),
                    if c.hi.closed { ']' } else { ')' }
                )?;
            }
        }
        Ok(())
    }
}

fn parse_number(s: &str) -> Result<f64> {
    let v = match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => f64::INFINITY,
        "-inf" | "-infinity" => f64::NEG_INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| ImError::InvalidInterval(format!("bad number {s:?}")))?,
    };
    if v.is_nan() {
        return Err(ImError::InvalidInterval("NaN endpoint".into()));
    }
    Ok(v)
}

fn parse_component(s: &str) -> Result<Option<Interval>> {
    if s.is_empty() {
        return Err(ImError::InvalidInterval("empty component".into()));
    }
    if s.starts_with('{') {
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| ImError::InvalidInterval(format!("unterminated singleton {s:?}")))?;
        if inner.is_empty() {
            return Ok(None);
        }
        let x = parse_number(inner)?;
        if !x.is_finite() {
            return Err(ImError::InvalidInterval("singleton must be finite".into()));
        }
        return Ok(Interval::point(x));
    }
    let lo_closed = match s.as_bytes()[0] {
        b'[' => true,
        b'(' => false,
        _ => return Err(ImError::InvalidInterval(format!("expected '(' or '[' in {s:?}"))),
    };
    let hi_closed = match s.as_bytes()[s.len() - 1] {
        b']' => true,
        b')' => false,
        _ => return Err(ImError::InvalidInterval(format!("expected ')' or ']' in {s:?}"))),
    };
    let body = &s[1..s.len() - 1];
    let (a, b) = body
        .split_once(',')
        .ok_or_else(|| ImError::InvalidInterval(format!("missing ',' in {s:?}")))?;
    let lo = parse_number(a)?;
    let hi = parse_number(b)?;
    if lo > hi {
        return Err(ImError::InvalidInterval(format!("lower end exceeds upper end in {s:?}")));
    }
    Ok(Interval::new(Endpoint::new(lo, lo_closed), Endpoint::new(hi, hi_closed)))
}

impl FromStr for ParamSet {
    type Err = ImError;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact.eq_ignore_ascii_case("empty") {
            return Ok(ParamSet::empty());
        }
        let mut parts = Vec::new();
        let mut rest = compact.as_str();
        loop {
            // a component ends at the first closing bracket
            let end = rest
                .find([')', ']', '}'])
                .ok_or_else(|| ImError::InvalidInterval(format!("unterminated interval in {s:?}")))?;
            parts.extend(parse_component(&rest[..=end])?);
            rest = &rest[end + 1..];
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix(['u', 'U', '∪'])
                .ok_or_else(|| ImError::InvalidInterval(format!("expected 'u' between intervals in {s:?}")))?;
        }
        Ok(ParamSet::from_intervals(parts))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireNumber {
    Finite(f64),
    Named(String),
}

impl WireNumber {
    fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            WireNumber::Finite(x)
        } else {
            WireNumber::Named(fmt_number(x))
        }
    }

    fn to_f64(&self) -> Result<f64> {
        match self {
            WireNumber::Finite(x) => Ok(*x),
            WireNumber::Named(s) => parse_number(s),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WireInterval {
    lower: WireNumber,
    lower_closed: bool,
    upper: WireNumber,
    upper_closed: bool,
}

#[derive(Serialize, Deserialize)]
struct WireSet {
    components: Vec<WireInterval>,
    #[serde(default, skip_deserializing)]
    text: String,
    #[serde(default, skip_deserializing)]
    bounded: bool,
}

impl Serialize for ParamSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireSet {
            components: self
                .components
                .iter()
                .map(|c| WireInterval {
                    lower: WireNumber::from_f64(c.lo.value),
                    lower_closed: c.lo.closed,
                    upper: WireNumber::from_f64(c.hi.value),
                    upper_closed: c.hi.closed,
                })
                .collect(),
            text: self.to_string(),
            bounded: !self.is_unbounded(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParamSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let wire = WireSet::deserialize(deserializer)?;
        let mut parts = Vec::new();
        for c in wire.components {
            let lo = c.lower.to_f64().map_err(D::Error::custom)?;
            let hi = c.upper.to_f64().map_err(D::Error::custom)?;
            let iv = Interval::new(Endpoint::new(lo, c.lower_closed), Endpoint::new(hi, c.upper_closed))
                .ok_or_else(|| D::Error::custom("empty interval component"))?;
            parts.push(iv);
        }
        Ok(ParamSet::from_intervals(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> ParamSet {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(ps("(-inf,9]").to_string(), "(-inf,9]");
        assert_eq!(ps(" ( -inf , 9 ]  U [ 11 , inf ) ").to_string(), "(-inf,9] u [11,inf)");
        assert_eq!(ps("{3}").to_string(), "{3}");
        assert!(ps("{}").is_empty());
        assert!(ps("(1,1)").is_empty());
        assert_eq!(ps("[0,2] u [1,3)").to_string(), "[0,3)");
        assert_eq!(ps("[-inf,inf]"), ParamSet::real_line());
        assert!("(2,1)".parse::<ParamSet>().is_err());
        assert!("(1,2".parse::<ParamSet>().is_err());
        assert!("(1,2) (3,4)".parse::<ParamSet>().is_err());
        assert!("(a,2)".parse::<ParamSet>().is_err());
    }

    #[test]
    fn abutting_open_intervals_stay_apart() {
        let s = ps("(0,1) u (1,2)");
        assert_eq!(s.components().len(), 2);
        assert!(!s.contains(1.0));
        assert_eq!(s.closure().to_string(), "[0,2]");
        assert_eq!(ps("[0,1) u [1,2]").components().len(), 1);
    }

    #[test]
    fn complement_and_membership() {
        let a = ps("(-inf,9]");
        assert_eq!(a.complement().to_string(), "(9,inf)");
        let s = ps("(-inf,-5] u [3,inf)");
        assert_eq!(s.complement().to_string(), "(-5,3)");
        assert!(s.contains(f64::INFINITY) && s.contains(f64::NEG_INFINITY));
        assert!(!ps("[0,1]").contains(f64::INFINITY));
        assert_eq!(ps("{2}").complement().to_string(), "(-inf,2) u (2,inf)");
        assert_eq!(ParamSet::empty().complement(), ParamSet::real_line());
        assert!(ParamSet::real_line().complement().is_empty());
    }

    #[test]
    fn subset_and_intersection() {
        let a = ps("(-inf,9]");
        assert!(ps("[1,9]").is_subset_of(&a));
        assert!(!ps("[1,9]").is_subset_of(&a.interior()));
        assert!(ps("[9,10]").intersects(&a));
        assert!(!ps("(9,10]").intersects(&a));
        assert!(ParamSet::empty().is_subset_of(&ParamSet::empty()));
        assert!(!ps("(-inf,-5] u [3,inf)").is_subset_of(&a));
        assert_eq!(ps("[0,5] u [7,8]").intersection(&ps("(4,7]")).to_string(), "(4,5] u {7}");
    }

    #[test]
    fn reciprocal_images() {
        let r = ParamSet::reciprocal_image(Endpoint::closed(-0.2), Endpoint::closed(0.3));
        assert_eq!(r.components().len(), 2);
        assert_eq!(r.components()[0].hi.value, -5.0);
        assert!((r.components()[1].lo.value - 10.0 / 3.0).abs() < 1e-15);
        let r = ParamSet::reciprocal_image(Endpoint::closed(0.1), Endpoint::closed(0.2));
        assert_eq!(r.to_string(), "[5,10]");
        let r = ParamSet::reciprocal_image(Endpoint::closed(0.0), Endpoint::closed(0.5));
        assert_eq!(r.to_string(), "[2,inf)");
        let r = ParamSet::reciprocal_image(Endpoint::closed(-0.5), Endpoint::closed(0.0));
        assert_eq!(r.to_string(), "(-inf,-2]");
        assert!(ParamSet::reciprocal_image(Endpoint::closed(0.0), Endpoint::closed(0.0)).is_empty());
        let r = ParamSet::reciprocal_image(Endpoint::closed(0.25), Endpoint::open(f64::INFINITY));
        assert_eq!(r.to_string(), "(0,4]");
    }

    #[test]
    fn json_uses_string_infinities() {
        let s = ps("(-inf,-5] u [3,inf)");
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["components"][0]["lower"], "-inf");
        assert_eq!(j["components"][1]["upper"], "inf");
        assert_eq!(j["bounded"], false);
        let back: ParamSet = serde_json::from_value(j).unwrap();
        assert_eq!(back, s);
    }

    fn arb_set() -> impl Strategy<Value = ParamSet> {
        let end = prop_oneof![
            4 => (-5i32..=5).prop_map(|v| v as f64),
            1 => Just(f64::INFINITY),
            1 => Just(f64::NEG_INFINITY),
        ];
        prop::collection::vec((end.clone(), any::<bool>(), end, any::<bool>()), 0..4).prop_map(|v| {
            ParamSet::from_intervals(v.into_iter().filter_map(|(a, ac, b, bc)| {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                Interval::new(Endpoint::new(a, ac), Endpoint::new(b, bc))
            }))
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(s in arb_set()) {
            prop_assert_eq!(s.to_string().parse::<ParamSet>().unwrap(), s);
        }

        #[test]
        fn complement_partitions_the_line(s in arb_set(), x in -6i32..=6, half in any::<bool>()) {
            let x = x as f64 + if half { 0.5 } else { 0.0 };
            prop_assert!(s.contains(x) != s.complement().contains(x));
            prop_assert_eq!(s.complement().complement(), s.clone());
        }

        #[test]
        fn closure_interior_duality(a in arb_set(), f in arb_set()) {
            // closure(F) ⊆ int(A)  <=>  closure(F) ∩ closure(Aᶜ) = ∅
            let lhs = f.closure().is_subset_of(&a.interior());
            let rhs = !f.closure().intersects(&a.complement().closure());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
