use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::{IntervalSet, RationalInterval};
use crate::game::PlayerId;

/// Exact table of a non-root vertex over (child value, own value).
///
/// The child axis is cut at sorted breakpoints from 0 to 1. Each breakpoint
/// and each open gap between neighbors carries the set of own values
/// allowed there. Cells are stored point, gap, point, ..., point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripTable {
    pub owner: PlayerId,
    pub child: PlayerId,
    breakpoints: Vec<BigRational>,
    cells: Vec<IntervalSet>,
}

/// One cell of a breakpoint partition of `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Point(BigRational),
    Gap(BigRational, BigRational),
}

impl Cell {
    /// Closure of the cell.
    pub fn span(&self) -> RationalInterval {
        match self {
            Cell::Point(p) => RationalInterval::point(p.clone()),
            Cell::Gap(a, b) => RationalInterval::new(a.clone(), b.clone()),
        }
    }

    /// A value inside the cell.
    pub fn probe(&self) -> BigRational {
        match self {
            Cell::Point(p) => p.clone(),
            Cell::Gap(a, b) => (a + b) / BigRational::from_integer(2.into()),
        }
    }
}

/// Cells of the partition of `[0, 1]` at `breakpoints`.
pub fn partition(breakpoints: &[BigRational]) -> Vec<Cell> {
    let mut out = Vec::with_capacity(2 * breakpoints.len());
    for (i, b) in breakpoints.iter().enumerate() {
        if i > 0 {
            out.push(Cell::Gap(breakpoints[i - 1].clone(), b.clone()));
        }
        out.push(Cell::Point(b.clone()));
    }
    out
}

/// Sorted, deduplicated union of `points` with 0 and 1.
pub fn merge_breakpoints<'a>(points: impl IntoIterator<Item = &'a BigRational>) -> Vec<BigRational> {
    let mut all: Vec<BigRational> = points.into_iter().cloned().collect();
    all.push(BigRational::zero());
    all.push(BigRational::one());
    all.sort();
    all.dedup();
    all
}

impl StripTable {
    /// Table whose 1-region is the union of closed rectangles
    /// `child_range × own_range`.
    pub fn from_rectangles(owner: PlayerId, child: PlayerId, rects: &[(RationalInterval, RationalInterval)]) -> Self {
        let breakpoints = merge_breakpoints(rects.iter().flat_map(|(c, _)| [&c.lo, &c.hi]));
        let cells = partition(&breakpoints)
            .iter()
            .map(|cell| {
                let span = cell.span();
                IntervalSet::from_intervals(
                    rects
                        .iter()
                        .filter(|(c, _)| c.lo <= span.lo && span.hi <= c.hi)
                        .map(|(_, own)| own.clone())
                        .collect(),
                )
            })
            .collect();
        let mut t = Self { owner, child, breakpoints, cells };
        t.canonicalize();
        t
    }

    /// Drops interior breakpoints across which nothing changes.
    fn canonicalize(&mut self) {
        let mut i = 1;
        while i + 1 < self.breakpoints.len() {
            let p = 2 * i;
            if self.cells[p] == self.cells[p - 1] && self.cells[p] == self.cells[p + 1] {
                self.breakpoints.remove(i);
                self.cells.drain(p..p + 2);
            } else {
                i += 1;
            }
        }
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    /// Cells with their own-value sets, in order.
    pub fn cells(&self) -> impl Iterator<Item = (Cell, &IntervalSet)> {
        partition(&self.breakpoints).into_iter().zip(&self.cells)
    }

    /// Own values allowed when the child plays `x`.
    pub fn set_at(&self, x: &BigRational) -> &IntervalSet {
        match self.breakpoints.binary_search(x) {
            Ok(i) => &self.cells[2 * i],
            Err(i) => &self.cells[2 * i - 1],
        }
    }

    pub fn contains(&self, child_value: &BigRational, own_value: &BigRational) -> bool {
        self.set_at(child_value).contains(own_value)
    }

    /// The 1-region as closed strips over the child axis, each with its
    /// own-value intervals. A breakpoint shows up as its own strip only for
    /// the parts its neighbors' closures do not already cover.
    pub fn closed_strips(&self) -> Vec<(RationalInterval, IntervalSet)> {
        let n = self.breakpoints.len();
        let mut out: Vec<(RationalInterval, IntervalSet)> = Vec::new();
        let mut last_gap: Option<usize> = None;
        for i in 0..n {
            let point = &self.cells[2 * i];
            let left = (i > 0).then(|| &self.cells[2 * i - 1]);
            let right = (i + 1 < n).then(|| &self.cells[2 * i + 1]);
            let covered = match (left, right) {
                (Some(l), Some(r)) => l.union(r),
                (Some(s), None) | (None, Some(s)) => s.clone(),
                (None, None) => IntervalSet::empty(),
            };
            let extra: Vec<RationalInterval> = point
                .intervals()
                .iter()
                .filter(|iv| !covered.intervals().iter().any(|c| c.lo <= iv.lo && iv.hi <= c.hi))
                .cloned()
                .collect();
            if !extra.is_empty() {
                out.push((RationalInterval::point(self.breakpoints[i].clone()), IntervalSet::from_intervals(extra)));
                last_gap = None;
            }
            if let Some(r) = right {
                let span = RationalInterval::new(self.breakpoints[i].clone(), self.breakpoints[i + 1].clone());
                let joins = last_gap.is_some_and(|g| out[g].1 == *r) && point == r;
                if joins {
                    let g = last_gap.expect("checked");
                    out[g].0.hi = span.hi;
                } else if !r.is_empty() {
                    out.push((span, r.clone()));
                    last_gap = Some(out.len() - 1);
                } else {
                    last_gap = None;
                }
            }
        }
        out
    }

    /// The same region with the axes swapped: strips over the own value,
    /// each carrying child-value intervals.
    pub fn transposed(&self) -> StripTable {
        let rects: Vec<(RationalInterval, RationalInterval)> = self
            .cells()
            .flat_map(|(cell, set)| {
                let span = cell.span();
                set.intervals().iter().map(move |own| (own.clone(), span.clone())).collect::<Vec<_>>()
            })
            .collect();
        StripTable::from_rectangles(self.child, self.owner, &rects)
    }

    /// Size of the smaller of the two strip covers of the 1-region (strips
    /// cut along the child axis or along the own axis).
    pub fn rectangle_count(&self) -> usize {
        let count = |t: &StripTable| t.closed_strips().iter().map(|(_, s)| s.len()).sum::<usize>();
        count(self).min(count(&self.transposed()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::interval::q;

    fn iv(a: BigRational, b: BigRational) -> RationalInterval {
        RationalInterval::new(a, b)
    }

    #[test]
    fn coordination_leaf_shape() {
        let (z, h, o) = (q(0, 1), q(1, 2), q(1, 1));
        let rects = vec![
            (iv(z.clone(), h.clone()), RationalInterval::point(z.clone())),
            (RationalInterval::point(h.clone()), RationalInterval::unit()),
            (iv(h.clone(), o.clone()), RationalInterval::point(o.clone())),
        ];
        let t = StripTable::from_rectangles(0, 1, &rects);
        assert_eq!(t.breakpoints(), &[z.clone(), h.clone(), o.clone()]);
        assert_eq!(
            t.closed_strips(),
            vec![
                (iv(z.clone(), h.clone()), IntervalSet::from_intervals(vec![RationalInterval::point(z.clone())])),
                (RationalInterval::point(h.clone()), IntervalSet::unit()),
                (iv(h.clone(), o.clone()), IntervalSet::from_intervals(vec![RationalInterval::point(o.clone())])),
            ]
        );
        assert_eq!(t.rectangle_count(), 3);
        assert!(t.contains(&q(1, 4), &z) && !t.contains(&q(1, 4), &o));
        assert!(t.contains(&h, &q(1, 3)));
    }

    #[test]
    fn redundant_breakpoints_are_dropped() {
        let rects = vec![
            (iv(q(0, 1), q(1, 3)), RationalInterval::unit()),
            (iv(q(1, 3), q(1, 1)), RationalInterval::unit()),
        ];
        let t = StripTable::from_rectangles(0, 1, &rects);
        assert_eq!(t.breakpoints(), &[q(0, 1), q(1, 1)]);
        assert_eq!(t.rectangle_count(), 1);
    }

    #[test]
    fn touching_strips_keep_both_rectangles() {
        let rects = vec![
            (iv(q(0, 1), q(1, 2)), RationalInterval::point(q(0, 1))),
            (iv(q(1, 2), q(1, 1)), RationalInterval::point(q(1, 1))),
        ];
        let t = StripTable::from_rectangles(0, 1, &rects);
        assert_eq!(t.rectangle_count(), 2);
        assert_eq!(t.set_at(&q(1, 2)).len(), 2);
    }

    #[test]
    fn transpose_round_trips() {
        let rects = vec![
            (iv(q(0, 1), q(4, 17)), RationalInterval::point(q(1, 1))),
            (RationalInterval::point(q(4, 17)), iv(q(0, 1), q(9, 14))),
            (iv(q(4, 17), q(9, 10)), RationalInterval::point(q(9, 14))),
            (iv(q(4, 17), q(1, 1)), RationalInterval::point(q(0, 1))),
            (iv(q(0, 1), q(9, 10)), RationalInterval::point(q(1, 1))),
            (RationalInterval::point(q(9, 10)), iv(q(9, 14), q(1, 1))),
        ];
        let t = StripTable::from_rectangles(0, 1, &rects);
        assert_eq!(t.transposed().transposed(), t);
        // Cut along the child axis the rows v = 0 and v = 1 are split at
        // every breakpoint; along the own axis each is one rectangle.
        assert_eq!(t.closed_strips().iter().map(|(_, s)| s.len()).sum::<usize>(), 7);
        assert_eq!(t.rectangle_count(), 5);
    }

    #[test]
    fn partition_cells() {
        let cells = partition(&[q(0, 1), q(1, 2), q(1, 1)]);
        assert_eq!(cells.len(), 5);
        assert_eq!(cells[1].probe(), q(1, 4));
        assert_eq!(cells[2], Cell::Point(q(1, 2)));
    }
}
