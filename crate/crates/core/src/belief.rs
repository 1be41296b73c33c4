//! Dempster–Shafer belief and plausibility on finite frames.
//!
//! Subsets of a frame are bitsets over atom indices, so frames hold at most
//! [`MAX_ATOMS`] atoms. A mass function assigns positive mass to nonempty
//! focal subsets; belief of `A` sums the mass of focal sets inside `A` and
//! plausibility sums the mass of focal sets meeting `A`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ImError, Result};

/// Largest supported frame.
pub const MAX_ATOMS: usize = 62;

/// Absolute tolerance on the total mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A subset of a finite frame, one bit per atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, atom: usize) -> bool {
        atom < 64 && self.0 & (1 << atom) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }
}

/// Ordered set of distinct atom labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteFrame {
    labels: Vec<String>,
}

impl FiniteFrame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ImError::InvalidFrame("a frame needs at least one atom".into()));
        }
        if labels.len() > MAX_ATOMS {
            return Err(ImError::InvalidFrame(format!(
                "{} atoms exceed the limit of {MAX_ATOMS}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ImError::InvalidFrame(format!("duplicate atom {l:?}")));
            }
        }
        Ok(FiniteFrame { labels })
    }

    /// Frame with atoms `"0"`, `"1"`, ... .
    pub fn with_size(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full(&self) -> Subset {
        Subset(if self.len() == 64 { u64::MAX } else { (1u64 << self.len()) - 1 })
    }

    pub fn complement(&self, a: Subset) -> Subset {
        Subset(!a.0 & self.full().0)
    }

    /// Subset made of the named atoms.
    pub fn subset<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<Subset> {
        let mut bits = 0u64;
        for name in names {
            let i = self
                .labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| ImError::InvalidFrame(format!("unknown atom {name:?}")))?;
            bits |= 1 << i;
        }
        Ok(Subset(bits))
    }

    /// Every subset of the frame, in bit order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (0..=self.full().0).map(Subset)
    }

    fn check(&self, a: Subset) -> Result<()> {
        if a.is_subset_of(self.full()) {
            Ok(())
        } else {
            Err(ImError::SubsetOutOfFrame { bits: a.0, size: self.len() })
        }
    }

    pub fn describe(&self, a: Subset) -> String {
        let names: Vec<&str> = (0..self.len())
            .filter(|&i| a.contains(i))
            .map(|i| self.labels[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Mass function over the subsets of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassFunction {
    frame: FiniteFrame,
    focal: Vec<(Subset, f64)>,
}

impl MassFunction {
    pub fn frame(&self) -> &FiniteFrame {
        &self.frame
    }

    /// Focal elements with their masses, ordered by bit pattern.
    pub fn focal_elements(&self) -> &[(Subset, f64)] {
        &self.focal
    }

    pub fn mass(&self, a: Subset) -> f64 {
        self.focal
            .iter()
            .find(|(s, _)| *s == a)
            .map_or(0.0, |&(_, m)| m)
    }
}

/// Validates `(subset, mass)` pairs and merges duplicates.
pub fn mass_from_focal_list<I>(frame: FiniteFrame, entries: I) -> Result<MassFunction>
where
    I: IntoIterator<Item = (Subset, f64)>,
{
    let mut merged: BTreeMap<Subset, f64> = BTreeMap::new();
    for (subset, mass) in entries {
        if subset.is_empty() {
            return Err(ImError::EmptyFocalSet);
        }
        frame.check(subset)?;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(ImError::InvalidMass { mass });
        }
        *merged.entry(subset).or_insert(0.0) += mass;
    }
    let sum: f64 = merged.values().sum();
    if (sum - 1.0).abs() > MASS_TOLERANCE {
        return Err(ImError::MassNotNormalized { sum });
    }
    Ok(MassFunction { frame, focal: merged.into_iter().collect() })
}

/// Belief function induced by a mass function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteBeliefFunction {
    mass: MassFunction,
}

impl From<MassFunction> for FiniteBeliefFunction {
    fn from(mass: MassFunction) -> Self {
        FiniteBeliefFunction { mass }
    }
}

impl FiniteBeliefFunction {
    pub fn mass_function(&self) -> &MassFunction {
        &self.mass
    }

    pub fn frame(&self) -> &FiniteFrame {
        &self.mass.frame
    }

    /// Total mass of focal elements contained in `a`.
    pub fn belief(&self, a: Subset) -> f64 {
        self.mass
            .focal
            .iter()
            .filter(|(s, _)| s.is_subset_of(a))
            .map(|&(_, m)| m)
            .sum()
    }

    /// `1 − belief(complement of a)`.
    pub fn plausibility(&self, a: Subset) -> f64 {
        1.0 - self.belief(self.frame().complement(a))
    }

    /// Total mass of focal elements meeting `a`; equals [`Self::plausibility`]
    /// up to rounding.
    pub fn plausibility_by_intersection(&self, a: Subset) -> f64 {
        self.mass
            .focal
            .iter()
            .filter(|(s, _)| s.intersects(a))
            .map(|&(_, m)| m)
            .sum()
    }

    /// True when every focal element is a single atom, i.e. the belief
    /// function is an ordinary probability measure.
    pub fn is_bayesian(&self) -> bool {
        self.mass.focal.iter().all(|(s, _)| s.len() == 1)
    }
}

/// The belief function that commits no mass to any proper subset.
pub fn vacuous(frame: FiniteFrame) -> FiniteBeliefFunction {
    let full = frame.full();
    FiniteBeliefFunction { mass: MassFunction { frame, focal: vec![(full, 1.0)] } }
}

pub fn belief(f: &FiniteBeliefFunction, a: Subset) -> f64 {
    f.belief(a)
}

pub fn plausibility(f: &FiniteBeliefFunction, a: Subset) -> f64 {
    f.plausibility(a)
}

/// Probability that a random subset with the given law lies inside `a`,
/// computed by tabulating the law over all `2^|frame|` subsets and summing
/// the cells contained in `a`. Kept independent of [`FiniteBeliefFunction::belief`]
/// so it can serve as its oracle.
pub fn belief_via_random_set_oracle(
    frame: &FiniteFrame,
    set_distribution: &[(Subset, f64)],
    a: Subset,
) -> Result<f64> {
    // Same validation contract as the mass function constructor.
    mass_from_focal_list(frame.clone(), set_distribution.iter().copied())?;
    frame.check(a)?;
    let mut law = vec![0.0; 1usize << frame.len()];
    for &(s, p) in set_distribution {
        law[s.bits() as usize] += p;
    }
    Ok(frame
        .subsets()
        .filter(|b| (0..frame.len()).all(|i| !b.contains(i) || a.contains(i)))
        .map(|b| law[b.bits() as usize])
        .sum())
}

impl fmt::Display for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .focal
            .iter()
            .map(|&(s, m)| format!("{}: {m}", self.frame.describe(s)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> FiniteFrame {
        FiniteFrame::new(["a", "b", "c"]).unwrap()
    }

    fn example() -> FiniteBeliefFunction {
        let fr = abc();
        let entries = vec![
            (fr.subset(["a"]).unwrap(), 0.3),
            (fr.subset(["a", "b"]).unwrap(), 0.5),
            (fr.full(), 0.2),
        ];
        mass_from_focal_list(fr, entries).unwrap().into()
    }

    #[test]
    fn focal_list_validation() {
        let bel = example();
        assert_eq!(bel.mass_function().focal_elements().len(), 3);

        let one = FiniteFrame::new(["a"]).unwrap();
        let m = mass_from_focal_list(one.clone(), [(one.full(), 1.0)]).unwrap();
        assert_eq!(FiniteBeliefFunction::from(m).belief(one.full()), 1.0);

        let fr = abc();
        let err = mass_from_focal_list(fr.clone(), [(Subset::EMPTY, 0.5), (fr.subset(["a"]).unwrap(), 0.5)]);
        assert_eq!(err, Err(ImError::EmptyFocalSet));
        let err = mass_from_focal_list(fr.clone(), [(fr.subset(["a"]).unwrap(), 0.5)]);
        assert!(matches!(err, Err(ImError::MassNotNormalized { .. })));
        let err = mass_from_focal_list(fr.clone(), [(Subset::from_bits(0b1000), 1.0)]);
        assert!(matches!(err, Err(ImError::SubsetOutOfFrame { .. })));
    }

    #[test]
    fn duplicates_are_merged() {
        let fr = abc();
        let a = fr.subset(["a"]).unwrap();
        let m = mass_from_focal_list(fr.clone(), [(a, 0.25), (fr.full(), 0.5), (a, 0.25)]).unwrap();
        assert_eq!(m.focal_elements().len(), 2);
        assert_eq!(m.mass(a), 0.5);
    }

    #[test]
    fn frame_rules() {
        assert!(FiniteFrame::new(Vec::<String>::new()).is_err());
        assert!(FiniteFrame::new(["x", "x"]).is_err());
        assert!(FiniteFrame::with_size(63).is_err());
        assert_eq!(FiniteFrame::with_size(62).unwrap().full().len(), 62);
    }

    #[test]
    fn belief_and_plausibility_examples() {
        let bel = example();
        let fr = abc();
        let s = |names: &[&str]| fr.subset(names.iter().copied()).unwrap();
        assert!((bel.belief(s(&["a"])) - 0.3).abs() < 1e-15);
        assert!((bel.belief(s(&["a", "b"])) - 0.8).abs() < 1e-15);
        assert_eq!(bel.belief(fr.full()), 1.0);
        assert_eq!(bel.belief(Subset::EMPTY), 0.0);
        assert!((bel.plausibility(s(&["c"])) - 0.2).abs() < 1e-15);
        assert_eq!(bel.plausibility(s(&["a"])), 1.0);
        assert_eq!(bel.plausibility(Subset::EMPTY), 0.0);
    }

    #[test]
    fn vacuous_weekdays() {
        let week = FiniteFrame::new(["Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"]).unwrap();
        let bel = vacuous(week.clone());
        for a in week.subsets() {
            if a.is_empty() || a == week.full() {
                continue;
            }
            assert_eq!(bel.belief(a), 0.0);
            assert_eq!(bel.plausibility(a), 1.0);
        }
        let one = FiniteFrame::new(["a"]).unwrap();
        assert_eq!(vacuous(one.clone()).belief(one.full()), 1.0);
        let two = FiniteFrame::new(["a", "b"]).unwrap();
        let a = two.subset(["a"]).unwrap();
        assert_eq!(vacuous(two.clone()).belief(a), 0.0);
        assert_eq!(vacuous(two).plausibility(a), 1.0);
    }

    #[test]
    fn random_set_oracle_examples() {
        let fr = abc();
        let dist = vec![
            (fr.subset(["a"]).unwrap(), 0.3),
            (fr.subset(["a", "b"]).unwrap(), 0.5),
            (fr.full(), 0.2),
        ];
        let ab = fr.subset(["a", "b"]).unwrap();
        let v = belief_via_random_set_oracle(&fr, &dist, ab).unwrap();
        assert!((v - 0.8).abs() < 1e-15);
        assert_eq!(belief_via_random_set_oracle(&fr, &[(fr.full(), 1.0)], ab).unwrap(), 0.0);
        let a = fr.subset(["a"]).unwrap();
        assert_eq!(belief_via_random_set_oracle(&fr, &[(a, 1.0)], ab).unwrap(), 1.0);
        assert!(belief_via_random_set_oracle(&fr, &[(Subset::EMPTY, 1.0)], ab).is_err());
    }

    #[test]
    fn bayesian_case_has_equal_bounds() {
        let fr = abc();
        let m = mass_from_focal_list(
            fr.clone(),
            [(Subset::from_indices([0]), 0.2), (Subset::from_indices([1]), 0.3), (Subset::from_indices([2]), 0.5)],
        )
        .unwrap();
        let bel = FiniteBeliefFunction::from(m);
        assert!(bel.is_bayesian());
        for a in fr.subsets() {
            assert!((bel.belief(a) - bel.plausibility(a)).abs() < 1e-12);
        }
    }
}
