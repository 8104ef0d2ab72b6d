use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn unit() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then(|| Self { lo, hi })
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Finite union of closed intervals, kept sorted with no two intervals
/// overlapping or touching.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet(Vec<RationalInterval>);

impl IntervalSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn unit() -> Self {
        Self(vec![RationalInterval::unit()])
    }

    pub fn from_intervals(mut v: Vec<RationalInterval>) -> Self {
        v.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut out: Vec<RationalInterval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        Self(out)
    }

    pub fn intervals(&self) -> &[RationalInterval] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.0.iter().any(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.0 {
            for b in &other.0 {
                out.extend(a.intersect(b));
            }
        }
        Self::from_intervals(out)
    }

    /// Smallest member, if any.
    pub fn min(&self) -> Option<&BigRational> {
        self.0.first().map(|iv| &iv.lo)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" U "))
    }
}

#[cfg(test)]
pub(crate) fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: (i64, i64), b: (i64, i64)) -> RationalInterval {
        RationalInterval::new(q(a.0, a.1), q(b.0, b.1))
    }

    #[test]
    fn normalization_merges_overlaps_and_touches() {
        let s = IntervalSet::from_intervals(vec![iv((1, 2), (3, 4)), iv((0, 1), (1, 4)), iv((1, 4), (1, 3)), iv((7, 8), (1, 1))]);
        assert_eq!(s.intervals(), &[iv((0, 1), (1, 3)), iv((1, 2), (3, 4)), iv((7, 8), (1, 1))]);
        assert!(s.contains(&q(1, 3)) && !s.contains(&q(2, 5)));
    }

    #[test]
    fn intersection() {
        let a = IntervalSet::from_intervals(vec![iv((0, 1), (1, 2)), iv((3, 4), (1, 1))]);
        let b = IntervalSet::from_intervals(vec![iv((1, 2), (4, 5))]);
        assert_eq!(a.intersect(&b).intervals(), &[RationalInterval::point(q(1, 2)), iv((3, 4), (4, 5))]);
        assert!(a.intersect(&IntervalSet::empty()).is_empty());
        assert_eq!(a.union(&b), IntervalSet::unit());
    }
}
