//! Which child values admit a parent witness, for one own value.
//!
//! Parent candidate sets come as runs of consecutive grid indices. When the
//! best-response window for the own value is at least as wide as the largest
//! change of `Δ` between neighboring grid points, every value between the
//! extremes of `Δ` over a box of runs is hit (up to that step) by some grid
//! point of the box, so testing the box corners is exact. Narrow windows fall
//! back to visiting every grid point.

use super::grid::TauGrid;
use super::local::{br_window, LocalForm};

pub(crate) type Runs = Vec<(usize, usize)>;

/// `v` is a best response up to `eps` when the payoff difference is `delta`.
#[inline]
pub(crate) fn br_ok(v: f64, delta: f64, eps: f64) -> bool {
    (1.0 - v) * delta <= eps && -v * delta <= eps
}

/// Whether corner tests are exact for this own value.
pub(crate) fn use_corners(form: &LocalForm, grid: &TauGrid, v: f64, eps: f64) -> bool {
    let (lo, hi) = br_window(v, eps);
    hi - lo >= form.step_bound(grid.tau())
}

/// Leading count of indices in `0..n` for which the monotone `pred` holds.
#[inline]
fn leading(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Union over a set of affine forms `a + b·w` of the child indices where
/// `Δ ≤ hi` and where `Δ ≥ lo`, each kept as prefix/suffix bounds.
#[derive(Clone, Copy, Debug)]
pub(crate) struct HalfLines {
    le_prefix: usize,
    le_suffix: usize,
    ge_prefix: usize,
    ge_suffix: usize,
}

impl HalfLines {
    pub fn empty(nw: usize) -> Self {
        Self { le_prefix: 0, le_suffix: nw, ge_prefix: 0, ge_suffix: nw }
    }

    /// Adds the form `a + b·w`.
    pub fn add(&mut self, a: f64, b: f64, v: f64, eps: f64, grid: &TauGrid, nw: usize) {
        let delta = |j: usize| a + b * grid.value(j);
        let le = |j: usize| (1.0 - v) * delta(j) <= eps;
        let ge = |j: usize| -v * delta(j) <= eps;
        if b >= 0.0 {
            self.le_prefix = self.le_prefix.max(leading(nw, le));
            self.ge_suffix = self.ge_suffix.min(leading(nw, |j| !ge(j)));
        } else {
            self.le_suffix = self.le_suffix.min(leading(nw, |j| !le(j)));
            self.ge_prefix = self.ge_prefix.max(leading(nw, ge));
        }
    }

    /// Calls `mark(lo, hi)` for half-open ranges covering
    /// `{Δ ≤ hi for some form} ∩ {Δ ≥ lo for some form}`.
    pub fn ranges(&self, nw: usize, mut mark: impl FnMut(usize, usize)) {
        let Self { le_prefix, le_suffix, ge_prefix, ge_suffix } = *self;
        let mut emit = |lo: usize, hi: usize| {
            if lo < hi {
                mark(lo, hi)
            }
        };
        emit(0, le_prefix.min(ge_prefix));
        emit(le_suffix.max(ge_suffix), nw);
        emit(le_suffix, ge_prefix);
        emit(ge_suffix, le_prefix);
    }

    pub fn contains(&self, j: usize) -> bool {
        let le = j < self.le_prefix || j >= self.le_suffix;
        let ge = j < self.ge_prefix || j >= self.ge_suffix;
        le && ge
    }
}

/// Visits every box of the runs product (one run per parent).
pub(crate) fn for_each_box(sets: &[Runs], mut f: impl FnMut(&[(usize, usize)]) -> bool) {
    if sets.iter().any(|s| s.is_empty()) {
        return;
    }
    let k = sets.len();
    let mut idx = vec![0usize; k];
    let mut cur: Vec<(usize, usize)> = sets.iter().map(|s| s[0]).collect();
    loop {
        if !f(&cur) {
            return;
        }
        let mut t = k;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < sets[t].len() {
                cur[t] = sets[t][idx[t]];
                break;
            }
            idx[t] = 0;
            cur[t] = sets[t][0];
        }
    }
}

/// Visits every grid point of the runs product in lexicographic order.
pub(crate) fn for_each_point(sets: &[Runs], mut f: impl FnMut(&[usize]) -> bool) {
    let points: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().flat_map(|&(a, b)| a..=b).collect()).collect();
    if points.iter().any(|p| p.is_empty()) {
        return;
    }
    let k = points.len();
    let mut idx = vec![0usize; k];
    let mut cur: Vec<usize> = points.iter().map(|p| p[0]).collect();
    loop {
        if !f(&cur) {
            return;
        }
        let mut t = k;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < points[t].len() {
                cur[t] = points[t][idx[t]];
                break;
            }
            idx[t] = 0;
            cur[t] = points[t][0];
        }
    }
}

/// Coefficients of `Δ` at every corner of a box.
pub(crate) fn box_corners(form: &LocalForm, grid: &TauGrid, bx: &[(usize, usize)], mut f: impl FnMut(f64, f64)) {
    let k = bx.len();
    let mut u = vec![0.0; k];
    for mask in 0..1usize << k {
        if (0..k).any(|i| mask >> i & 1 == 1 && bx[i].0 == bx[i].1) {
            continue;
        }
        for i in 0..k {
            u[i] = grid.value(if mask >> i & 1 == 1 { bx[i].1 } else { bx[i].0 });
        }
        let (a, b) = form.delta_in_w(&u);
        f(a, b);
    }
}

pub(crate) fn point_values(grid: &TauGrid, point: &[usize]) -> Vec<f64> {
    point.iter().map(|&j| grid.value(j)).collect()
}

/// Child indices in `0..nw` for which own value `v` has a witness in the
/// product of `sets`; reported as half-open ranges (possibly overlapping).
pub(crate) fn feasible_children(
    form: &LocalForm,
    grid: &TauGrid,
    sets: &[Runs],
    v: f64,
    eps: f64,
    nw: usize,
    mut mark: impl FnMut(usize, usize),
) {
    if use_corners(form, grid, v, eps) {
        for_each_box(sets, |bx| {
            let mut h = HalfLines::empty(nw);
            box_corners(form, grid, bx, |a, b| h.add(a, b, v, eps, grid, nw));
            h.ranges(nw, &mut mark);
            true
        });
    } else {
        for_each_point(sets, |pt| {
            let (a, b) = form.delta_in_w(&point_values(grid, pt));
            let mut h = HalfLines::empty(nw);
            h.add(a, b, v, eps, grid, nw);
            h.ranges(nw, &mut mark);
            true
        });
    }
}

/// Whether own value `v` has a witness in the product of `sets` against
/// child index `w`.
pub(crate) fn has_witness(form: &LocalForm, grid: &TauGrid, sets: &[Runs], v: f64, eps: f64, w: usize) -> bool {
    let wv = grid.value(w);
    let mut found = false;
    if use_corners(form, grid, v, eps) {
        for_each_box(sets, |bx| {
            let (mut le, mut ge) = (false, false);
            box_corners(form, grid, bx, |a, b| {
                let d = a + b * wv;
                le |= (1.0 - v) * d <= eps;
                ge |= -v * d <= eps;
            });
            found = le && ge;
            !found
        });
    } else {
        for_each_point(sets, |pt| {
            let (a, b) = form.delta_in_w(&point_values(grid, pt));
            found = br_ok(v, a + b * wv, eps);
            !found
        });
    }
    found
}
