//! Approximate equilibria of tree games on a uniform grid of mixed
//! strategies.
//!
//! The downstream pass builds, for every vertex, a bit table over (child
//! value, own value) marking pairs that extend to an approximate equilibrium
//! of the subtree above the vertex. The upstream pass reads one equilibrium
//! back out; with witness retention the tables also enumerate all of them.

mod bits;
mod downstream;
mod enumerate;
mod grid;
pub(crate) mod local;
mod policy;
pub(crate) mod scan;
mod upstream;

pub use bits::BitGrid;
pub use downstream::{downstream_pass, ApproxTable, DownstreamResult, RootTable, WitnessLists, WITNESS_LIMIT};
pub use enumerate::{enumerate_grid_equilibria, enumerate_grid_indices, ENUMERATION_LIMIT};
pub use grid::{compute_tau, klogk, payoff_bound, product_bound, rounding_regret_bound, tau_cap, TauGrid};
pub use policy::{Chooser, FirstChooser, Policy, RandomChooser};
pub use upstream::{upstream_indices, upstream_pass};

use crate::error::{Result, SolverError};
use crate::game::{max_regret, GraphicalGame, MixedProfile, PlayerId};
use crate::tree::orient;

/// How the grid resolution is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GridChoice {
    /// The resolution from [`compute_tau`], which guarantees a non-empty
    /// root table.
    #[default]
    Guaranteed,
    /// A caller-supplied resolution; may find nothing.
    Fixed(usize),
    /// Coarse grids first, stopping at the first that yields an equilibrium
    /// and falling back to the guaranteed resolution.
    Adaptive,
}

impl GridChoice {
    /// Resolutions tried in order, given the guaranteed one.
    pub fn schedule(self, guaranteed: usize) -> Vec<usize> {
        match self {
            GridChoice::Guaranteed => vec![guaranteed],
            GridChoice::Fixed(m) => vec![m],
            GridChoice::Adaptive => adaptive_schedule(guaranteed),
        }
    }
}

/// `1..=8`, then alternately ×1.5 and ×4/3 (12, 16, 24, 32, ...), ending at
/// `guaranteed`.
pub fn adaptive_schedule(guaranteed: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=8).take_while(|&m| m < guaranteed).collect();
    let mut m = 8;
    loop {
        m = if m % 3 == 0 { m * 4 / 3 } else { m * 3 / 2 };
        if m >= guaranteed {
            break;
        }
        out.push(m);
    }
    out.push(guaranteed);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxConfig {
    pub eps: f64,
    pub root: PlayerId,
    pub policy: Policy,
    pub grid: GridChoice,
}

impl ApproxConfig {
    pub fn new(eps: f64) -> Self {
        Self { eps, root: 0, policy: Policy::First, grid: GridChoice::Guaranteed }
    }
}

/// What a solve used and what it achieved.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub m: usize,
    pub tau: f64,
    pub eps_local: f64,
    /// Largest closed neighborhood, which sets the guaranteed resolution.
    pub k_max: usize,
    /// Measured on the returned profile.
    pub max_regret: f64,
}

/// Approximate equilibrium with regret at most `eps`, on the guaranteed grid.
pub fn approximate_tree_nash(
    game: &GraphicalGame,
    eps: f64,
    root: PlayerId,
    policy: Policy,
) -> Result<(MixedProfile, Certificate)> {
    approximate_tree_nash_with(game, &ApproxConfig { eps, root, policy, grid: GridChoice::Guaranteed })
}

pub fn approximate_tree_nash_with(game: &GraphicalGame, config: &ApproxConfig) -> Result<(MixedProfile, Certificate)> {
    let k_max = game.max_closed_neighborhood();
    let guaranteed = compute_tau(k_max, config.eps)?;
    let orientation = orient(game, config.root)?;
    for m in config.grid.schedule(guaranteed.m()) {
        let grid = TauGrid::new(m)?;
        let res = downstream_pass(game, &orientation, grid, config.eps, false)?;
        if res.root_table.is_empty() {
            if m == guaranteed.m() {
                return Err(SolverError::Internal("guaranteed grid produced an empty root table".into()));
            }
            continue;
        }
        let profile = upstream_pass(game, &res, &mut *config.policy.chooser())?;
        let certificate =
            Certificate { m, tau: grid.tau(), eps_local: config.eps, k_max, max_regret: max_regret(game, &profile)? };
        return Ok((profile, certificate));
    }
    Err(SolverError::NoEquilibriumFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{coordination_edge, generate_random_tree_game, is_eps_nash, matching_pennies_edge};

    #[test]
    fn schedule_shape() {
        assert_eq!(adaptive_schedule(100), vec![1, 2, 3, 4, 5, 6, 7, 8, 12, 16, 24, 32, 48, 64, 96, 100]);
        assert_eq!(adaptive_schedule(5), vec![1, 2, 3, 4, 5]);
        assert_eq!(GridChoice::Fixed(9).schedule(320), vec![9]);
    }

    #[test]
    fn matching_pennies_near_half() {
        let g = matching_pennies_edge();
        let (p, cert) = approximate_tree_nash(&g, 0.05, 0, Policy::First).unwrap();
        assert!(cert.max_regret <= 0.05 + 1e-12);
        // With regret allowed, each player may sit up to eps/2 off center
        // (the opponent's regret is |2x - 1| times its distance to a pure
        // strategy).
        for &x in p.as_slice() {
            assert!((x - 0.5).abs() <= 0.05, "{x}");
        }
        // With exact best responses on the same grid only the center survives.
        let o = orient(&g, 0).unwrap();
        let res = downstream_pass(&g, &o, TauGrid::new(cert.m).unwrap(), 0.0, false).unwrap();
        let q = upstream_pass(&g, &res, &mut FirstChooser).unwrap();
        assert_eq!(q.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn coordination_is_pure() {
        let g = coordination_edge();
        let (p, cert) = approximate_tree_nash(&g, 0.05, 1, Policy::First).unwrap();
        assert_eq!(cert.max_regret, 0.0);
        assert!(p.as_slice() == [0.0, 0.0] || p.as_slice() == [1.0, 1.0]);
    }

    #[test]
    fn random_trees_small() {
        for seed in 0..5 {
            let g = generate_random_tree_game(6, 3, seed).unwrap();
            let (p, _) = approximate_tree_nash(&g, 0.1, 0, Policy::First).unwrap();
            assert!(is_eps_nash(&g, &p, 0.1).unwrap());
            let cfg = ApproxConfig { grid: GridChoice::Adaptive, ..ApproxConfig::new(0.1) };
            let (q, _) = approximate_tree_nash_with(&g, &cfg).unwrap();
            assert!(is_eps_nash(&g, &q, 0.1).unwrap());
        }
    }
}
