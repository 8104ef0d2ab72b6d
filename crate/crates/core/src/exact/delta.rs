use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{IntervalSet, RationalInterval};
use crate::error::{Result, SolverError};
use crate::game::multilinear::{contract_leading, permute_vars};
use crate::game::{GraphicalGame, PlayerId};

/// Which best-response condition an own value imposes on `Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Own value strictly between 0 and 1: `Δ = 0`.
    Interior,
    /// Own value 0 (always action 1): `Δ ≤ 0`.
    VZero,
    /// Own value 1 (always action 0): `Δ ≥ 0`.
    VOne,
}

impl Kind {
    pub fn of(v: &BigRational) -> Self {
        if v.is_zero() {
            Kind::VZero
        } else if v.is_one() {
            Kind::VOne
        } else {
            Kind::Interior
        }
    }

    pub fn accepts(self, delta: &BigRational) -> bool {
        match self {
            Kind::Interior => delta.is_zero(),
            Kind::VZero => !delta.is_positive(),
            Kind::VOne => !delta.is_negative(),
        }
    }
}

/// `Δ = M(0, ·) − M(1, ·)` of one vertex as a multilinear table over its
/// parents (ascending) and then its child, first variable most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaForm {
    pub owner: PlayerId,
    pub parents: Vec<PlayerId>,
    pub child: Option<PlayerId>,
    table: Vec<BigRational>,
}

impl DeltaForm {
    pub fn new(game: &GraphicalGame, owner: PlayerId, parents: &[PlayerId], child: Option<PlayerId>) -> Result<Self> {
        let m = game.matrix(owner);
        let exact = m.exact_payoffs().ok_or(SolverError::NonRationalPayoffs)?;
        let half = exact.len() / 2;
        let diff: Vec<BigRational> = exact[..half].iter().zip(&exact[half..]).map(|(a, b)| a - b).collect();
        let to: Vec<PlayerId> = parents.iter().copied().chain(child).collect();
        let table = permute_vars(&diff, &m.neighborhood()[1..], &to);
        Ok(Self { owner, parents: parents.to_vec(), child, table })
    }

    /// A form given directly by its table over `parents` parent variables
    /// followed by a child variable when `has_child`.
    pub fn from_table(parents: usize, has_child: bool, table: Vec<BigRational>) -> Result<Self> {
        let vars = parents + usize::from(has_child);
        if table.len() != 1 << vars {
            return Err(SolverError::ArityMismatch { expected: 1 << vars, got: table.len() });
        }
        Ok(Self { owner: 0, parents: (1..=parents).collect(), child: has_child.then_some(parents + 1), table })
    }

    pub fn arity(&self) -> usize {
        self.parents.len()
    }

    fn check_arity(&self, u: &[BigRational]) -> Result<()> {
        if u.len() == self.parents.len() {
            Ok(())
        } else {
            Err(SolverError::ArityMismatch { expected: self.parents.len(), got: u.len() })
        }
    }

    /// `(a, b)` with `Δ(u, w) = a + b·w`; `b = 0` without a child.
    pub fn delta_in_w(&self, u: &[BigRational]) -> Result<(BigRational, BigRational)> {
        self.check_arity(u)?;
        let rest = contract_leading(&self.table, u);
        Ok(match rest.as_slice() {
            [d0, d1] => (d1.clone(), d0 - d1),
            [d] => (d.clone(), BigRational::zero()),
            _ => unreachable!("at most one variable remains"),
        })
    }

    pub fn delta_eval(&self, u: &[BigRational], w: &BigRational) -> Result<BigRational> {
        let (a, b) = self.delta_in_w(u)?;
        Ok(a + b * w)
    }

    /// Coefficients `(a, b)` at every corner of `bx`, corners ordered
    /// lexicographically (lower end first, first parent most significant).
    pub fn corners(&self, bx: &[RationalInterval]) -> Vec<(Vec<BigRational>, BigRational, BigRational)> {
        let k = bx.len();
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0..1usize << k {
            if (0..k).any(|i| mask >> (k - 1 - i) & 1 == 1 && bx[i].is_point()) {
                continue;
            }
            let u: Vec<BigRational> = (0..k)
                .map(|i| if mask >> (k - 1 - i) & 1 == 1 { bx[i].hi.clone() } else { bx[i].lo.clone() })
                .collect();
            let (a, b) = self.delta_in_w(&u).expect("box matches the parents");
            out.push((u, a, b));
        }
        out
    }

    /// Child values `w ∈ [0, 1]` for which some `u` in `bx` meets the
    /// condition of `kind`.
    pub fn solve_w(&self, bx: &[RationalInterval], kind: Kind) -> Result<IntervalSet> {
        if bx.len() != self.parents.len() {
            return Err(SolverError::ArityMismatch { expected: self.parents.len(), got: bx.len() });
        }
        let corners = self.corners(bx);
        let half_lines = |nonneg: bool| {
            IntervalSet::from_intervals(corners.iter().filter_map(|(_, a, b)| half_line(a, b, nonneg)).collect())
        };
        let out = match kind {
            Kind::VZero => half_lines(false),
            Kind::VOne => half_lines(true),
            // The box is connected and Δ continuous, so Δ = 0 is reachable
            // iff Δ ≥ 0 and Δ ≤ 0 both are.
            Kind::Interior => half_lines(true).intersect(&half_lines(false)),
        };
        if out.len() > 2 {
            return Err(SolverError::Internal(format!("solve_w produced {} intervals: {out}", out.len())));
        }
        Ok(out)
    }
}

/// `{w ∈ [0, 1] : a + b·w ≥ 0}` (or `≤ 0` when `!nonneg`).
pub(crate) fn half_line(a: &BigRational, b: &BigRational, nonneg: bool) -> Option<RationalInterval> {
    let (a, b) = if nonneg { (a.clone(), b.clone()) } else { (-a, -b) };
    let zero = BigRational::zero();
    let one = BigRational::one();
    if b.is_zero() {
        return (!a.is_negative()).then(RationalInterval::unit);
    }
    let root = -&a / &b;
    if b.is_positive() {
        (root <= one).then(|| RationalInterval::new(root.max(zero), one))
    } else {
        (root >= zero).then(|| RationalInterval::new(zero, root.min(one)))
    }
}

/// A point of `bx` with `Δ(·, w) = 0`, found by walking from a corner with
/// `Δ ≥ 0` to one with `Δ ≤ 0` one coordinate at a time.
pub fn zero_on_box(form: &DeltaForm, bx: &[RationalInterval], w: &BigRational) -> Option<Vec<BigRational>> {
    let corners = form.corners(bx);
    let value = |(a, b): (&BigRational, &BigRational)| a + b * w;
    let start = corners.iter().find(|(_, a, b)| !value((a, b)).is_negative())?;
    let end = corners.iter().find(|(_, a, b)| !value((a, b)).is_positive())?;
    let eval = |u: &[BigRational]| form.delta_eval(u, w).expect("arity checked");
    let mut cur = start.0.clone();
    let mut d_cur = eval(&cur);
    if d_cur.is_zero() {
        return Some(cur);
    }
    for i in 0..cur.len() {
        if cur[i] == end.0[i] {
            continue;
        }
        let mut next = cur.clone();
        next[i] = end.0[i].clone();
        let d_next = eval(&next);
        if !d_next.is_positive() {
            // Affine in coordinate i between cur (Δ > 0) and next (Δ ≤ 0).
            let t = &d_cur / (&d_cur - &d_next);
            let mut u = cur.clone();
            u[i] = &cur[i] + t * (&next[i] - &cur[i]);
            debug_assert!(eval(&u).is_zero());
            return Some(u);
        }
        cur = next;
        d_cur = d_next;
    }
    None
}
