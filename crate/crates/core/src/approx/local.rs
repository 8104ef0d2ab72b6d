//! A vertex's payoff difference as a function of its parents and child.

use crate::game::multilinear::{contract_f64_tail, permute_vars};
use crate::game::{GraphicalGame, PlayerId};

/// Payoff tables of one vertex re-indexed by (parents ascending, child),
/// first variable most significant.
#[derive(Clone, Debug)]
pub(crate) struct LocalForm {
    pub parents: Vec<PlayerId>,
    pub child: Option<PlayerId>,
    /// `M_V(0, ·) - M_V(1, ·)`.
    diff: Vec<f64>,
    pay0: Vec<f64>,
    pay1: Vec<f64>,
    max_abs_diff: f64,
}

impl LocalForm {
    pub fn new(game: &GraphicalGame, owner: PlayerId, parents: &[PlayerId], child: Option<PlayerId>) -> Self {
        let m = game.matrix(owner);
        let from = &m.neighborhood()[1..];
        let to: Vec<PlayerId> = parents.iter().copied().chain(child).collect();
        let pay0 = permute_vars(m.owner_slice(0), from, &to);
        let pay1 = permute_vars(m.owner_slice(1), from, &to);
        let diff: Vec<f64> = pay0.iter().zip(&pay1).map(|(a, b)| a - b).collect();
        let max_abs_diff = diff.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        Self { parents: parents.to_vec(), child, diff, pay0, pay1, max_abs_diff }
    }

    /// Coefficients `(a, b)` with `Δ(u, w) = a + b·w`; `b = 0` at the root.
    #[inline]
    pub fn delta_in_w(&self, u: &[f64]) -> (f64, f64) {
        let [d0, d1] = contract_f64_tail(&self.diff, u);
        if self.child.is_some() { (d1, d0 - d1) } else { (d0, 0.0) }
    }

    /// Expected payoff to the owner playing `v`, as `c + d·w`.
    pub fn payoff_in_w(&self, v: f64, u: &[f64]) -> (f64, f64) {
        let [p00, p01] = contract_f64_tail(&self.pay0, u);
        let [p10, p11] = contract_f64_tail(&self.pay1, u);
        let (e0, e1) = (v * p00 + (1.0 - v) * p10, v * p01 + (1.0 - v) * p11);
        if self.child.is_some() { (e1, e0 - e1) } else { (e0, 0.0) }
    }

    /// Upper bound on the change of `Δ` when one parent moves by `tau`.
    pub fn step_bound(&self, tau: f64) -> f64 {
        2.0 * self.max_abs_diff * tau + 1e-12
    }
}

/// Range of `Δ` for which `v` is an `eps`-best response:
/// `(1 - v)·Δ ≤ eps` and `-v·Δ ≤ eps`.
#[inline]
pub(crate) fn br_window(v: f64, eps: f64) -> (f64, f64) {
    let lo = if v > 0.0 { -eps / v } else { f64::NEG_INFINITY };
    let hi = if v < 1.0 { eps / (1.0 - v) } else { f64::INFINITY };
    (lo, hi)
}
