//! Grid equilibria that maximize a global objective.
//!
//! The downstream pass is rerun with a value per table entry: the best
//! objective over the subtree above the vertex, given the vertex's own value
//! and its child's. Each player's payoff is charged at its own vertex, where
//! its whole neighborhood (own value, parents, child) is in scope.

use std::fmt;
use std::str::FromStr;

use crate::approx::local::LocalForm;
use crate::approx::scan::{for_each_point, point_values, HalfLines, Runs};
use crate::approx::{compute_tau, GridChoice, TauGrid};
use crate::error::{Result, SolverError};
use crate::game::{expected_payoff, GraphicalGame, MixedProfile, PlayerId, REGRET_TOL};
use crate::tree::{orient, TreeOrientation};

/// Upper limit on witnesses plus (witness, child value) pairs visited by one
/// selection.
pub const SELECT_WORK_LIMIT: u128 = 2_000_000_000;
/// Upper limit on stored value-table entries.
pub const SELECT_MEMORY_LIMIT: u128 = 60_000_000;

/// Tie margin when comparing objective values.
const TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Sum of all expected payoffs.
    Social,
    /// Smallest expected payoff.
    Welfare,
    /// Expected payoff of one player.
    Player(PlayerId),
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Social => write!(f, "social"),
            Objective::Welfare => write!(f, "welfare"),
            Objective::Player(p) => write!(f, "player:{p}"),
        }
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "social" => Ok(Objective::Social),
            "welfare" => Ok(Objective::Welfare),
            _ => s
                .strip_prefix("player:")
                .and_then(|id| id.parse().ok())
                .map(Objective::Player)
                .ok_or_else(|| format!("unknown objective '{s}' (expected social, welfare or player:<id>)")),
        }
    }
}

impl Objective {
    fn check(self, game: &GraphicalGame) -> Result<()> {
        match self {
            Objective::Player(p) if p >= game.n() => Err(SolverError::InvalidPlayer { player: p, n: game.n() }),
            _ => Ok(()),
        }
    }

    /// Combines the owner's payoff with the parents' subtree values.
    fn combine(self, owner: PlayerId, own_payoff: f64, parents: &[f64]) -> f64 {
        match self {
            Objective::Social => own_payoff + parents.iter().sum::<f64>(),
            Objective::Welfare => parents.iter().fold(own_payoff, |acc, &x| acc.min(x)),
            Objective::Player(t) => parents.iter().sum::<f64>() + if owner == t { own_payoff } else { 0.0 },
        }
    }
}

/// Objective evaluated directly on a profile.
pub fn objective_value(game: &GraphicalGame, profile: &MixedProfile, objective: Objective) -> Result<f64> {
    objective.check(game)?;
    match objective {
        Objective::Social => (0..game.n()).map(|i| expected_payoff(game, i, profile)).sum(),
        Objective::Welfare => {
            (0..game.n()).try_fold(f64::INFINITY, |acc, i| Ok(acc.min(expected_payoff(game, i, profile)?)))
        }
        Objective::Player(p) => expected_payoff(game, p, profile),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub profile: MixedProfile,
    /// Recomputed from the profile.
    pub value: f64,
    /// As propagated to the root by the tables.
    pub table_value: f64,
    pub grid: TauGrid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectConfig {
    pub eps: f64,
    pub objective: Objective,
    pub root: PlayerId,
    pub grid: GridChoice,
}

/// Best grid equilibrium for `objective`, on the first grid of the adaptive
/// schedule that has one.
///
/// Selection visits every witness of every entry, roughly `n·m^(k+1)` steps,
/// so the guaranteed resolution is only practical for tiny `k` and large
/// `eps`. Use [`select_equilibrium_with`] to pick the grid.
pub fn select_equilibrium(game: &GraphicalGame, eps: f64, objective: Objective, root: PlayerId) -> Result<Selection> {
    select_equilibrium_with(game, &SelectConfig { eps, objective, root, grid: GridChoice::Adaptive })
}

pub fn select_equilibrium_with(game: &GraphicalGame, config: &SelectConfig) -> Result<Selection> {
    config.objective.check(game)?;
    let guaranteed = compute_tau(game.max_closed_neighborhood(), config.eps)?;
    let orientation = orient(game, config.root)?;
    for m in config.grid.schedule(guaranteed.m()) {
        match select_equilibrium_on_grid(game, &orientation, TauGrid::new(m)?, config.eps, config.objective) {
            Err(SolverError::NoEquilibriumFound) if m != guaranteed.m() => continue,
            other => return other,
        }
    }
    Err(SolverError::NoEquilibriumFound)
}

/// Per-vertex objective values, indexed `child_value * (m + 1) + own_value`.
struct Values {
    forms: Vec<LocalForm>,
    tables: Vec<Vec<f64>>,
    stride: usize,
}

impl Values {
    fn runs(&self, parent: PlayerId, v: usize) -> Runs {
        let row = &self.tables[parent][v * self.stride..(v + 1) * self.stride];
        let mut runs: Runs = Vec::new();
        for (u, x) in row.iter().enumerate() {
            if x.is_finite() {
                match runs.last_mut() {
                    Some(last) if last.1 + 1 == u => last.1 = u,
                    _ => runs.push((u, u)),
                }
            }
        }
        runs
    }

    fn parent_values(&self, parents: &[PlayerId], v: usize, u: &[usize], out: &mut Vec<f64>) {
        out.clear();
        out.extend(parents.iter().zip(u).map(|(&p, &x)| self.tables[p][v * self.stride + x]));
    }
}

/// Best grid equilibrium for `objective` on a given grid, with best
/// responses up to `eps_local`.
pub fn select_equilibrium_on_grid(
    game: &GraphicalGame,
    orientation: &TreeOrientation,
    grid: TauGrid,
    eps_local: f64,
    objective: Objective,
) -> Result<Selection> {
    objective.check(game)?;
    if !(eps_local.is_finite() && eps_local >= 0.0) {
        return Err(SolverError::InvalidEpsilon(eps_local));
    }
    let n = game.n();
    let stride = grid.len();
    let memory = n as u128 * (stride as u128) * (stride as u128);
    if memory > SELECT_MEMORY_LIMIT {
        return Err(SolverError::SizeGuard { size: memory, limit: SELECT_MEMORY_LIMIT });
    }
    let eps = eps_local + REGRET_TOL;
    let mut values = Values {
        forms: (0..n).map(|v| LocalForm::new(game, v, orientation.parents(v), orientation.child(v))).collect(),
        tables: vec![Vec::new(); n],
        stride,
    };
    let mut work: u128 = 0;
    let mut pv = Vec::new();
    for &v in orientation.order() {
        let form = &values.forms[v];
        let nw = if form.child.is_some() { stride } else { 1 };
        let mut table = vec![f64::NEG_INFINITY; nw * stride];
        for own in 0..stride {
            let x = grid.value(own);
            let sets: Vec<Runs> = form.parents.iter().map(|&p| values.runs(p, own)).collect();
            for_each_point(&sets, |pt| {
                work += 1;
                let u = point_values(&grid, pt);
                let (a, b) = form.delta_in_w(&u);
                let (c, d) = form.payoff_in_w(x, &u);
                values.parent_values(&form.parents, own, pt, &mut pv);
                let mut h = HalfLines::empty(nw);
                h.add(a, b, x, eps, &grid, nw);
                h.ranges(nw, |lo, hi| {
                    work += (hi - lo) as u128;
                    for w in lo..hi {
                        let cand = objective.combine(v, c + d * grid.value(w), &pv);
                        let slot = &mut table[w * stride + own];
                        if cand > *slot + TIE || slot.is_infinite() {
                            *slot = cand;
                        }
                    }
                });
                work <= SELECT_WORK_LIMIT
            });
            if work > SELECT_WORK_LIMIT {
                return Err(SolverError::SizeGuard { size: work, limit: SELECT_WORK_LIMIT });
            }
        }
        values.tables[v] = table;
    }

    let root = orientation.root();
    let root_values = &values.tables[root];
    let mut best: Option<usize> = None;
    for z in 0..stride {
        if root_values[z].is_finite() && best.is_none_or(|b| root_values[z] > root_values[b] + TIE) {
            best = Some(z);
        }
    }
    let z = best.ok_or(SolverError::NoEquilibriumFound)?;
    let table_value = root_values[z];

    // Trace back: at each vertex take the first witness achieving the
    // stored value.
    let mut idx = vec![usize::MAX; n];
    idx[root] = z;
    for &v in orientation.order().iter().rev() {
        let form = &values.forms[v];
        let own = idx[v];
        let x = grid.value(own);
        let w = orientation.child(v).map_or(0, |c| idx[c]);
        let target = values.tables[v][w * stride + own];
        let sets: Vec<Runs> = form.parents.iter().map(|&p| values.runs(p, own)).collect();
        let nw = if form.child.is_some() { stride } else { 1 };
        let mut chosen: Option<Vec<usize>> = None;
        for_each_point(&sets, |pt| {
            let u = point_values(&grid, pt);
            let (a, b) = form.delta_in_w(&u);
            let mut h = HalfLines::empty(nw);
            h.add(a, b, x, eps, &grid, nw);
            if !h.contains(w) {
                return true;
            }
            let (c, d) = form.payoff_in_w(x, &u);
            values.parent_values(&form.parents, own, pt, &mut pv);
            let cand = objective.combine(v, c + d * grid.value(w), &pv);
            if cand >= target - TIE {
                chosen = Some(pt.to_vec());
                return false;
            }
            true
        });
        let pt = chosen.ok_or_else(|| SolverError::Internal(format!("no argmax witness at vertex {v}")))?;
        for (&p, x) in form.parents.iter().zip(pt) {
            idx[p] = x;
        }
    }
    let profile = MixedProfile::new(idx.iter().map(|&j| grid.value(j)).collect())?;
    let value = objective_value(game, &profile, objective)?;
    Ok(Selection { profile, value, table_value, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{battle_of_sexes_edge, is_eps_nash, path_coordination, single_player};

    #[test]
    fn parses_objectives() {
        assert_eq!("social".parse::<Objective>().unwrap(), Objective::Social);
        assert_eq!("player:3".parse::<Objective>().unwrap(), Objective::Player(3));
        assert!("player:x".parse::<Objective>().is_err());
        assert!("utilitarian".parse::<Objective>().is_err());
        assert_eq!(Objective::Player(2).to_string(), "player:2");
    }

    #[test]
    fn objective_values() {
        let g = path_coordination(3);
        let ones = MixedProfile::uniform(3, 1.0).unwrap();
        assert_eq!(objective_value(&g, &ones, Objective::Social).unwrap(), 3.0);
        assert_eq!(objective_value(&g, &ones, Objective::Welfare).unwrap(), 1.0);
        let zero = GraphicalGame::with_payoffs(2, [(0, 1)], vec![vec![0.0; 4], vec![0.0; 4]]).unwrap();
        let p = MixedProfile::new(vec![0.3, 0.9]).unwrap();
        assert_eq!(objective_value(&zero, &p, Objective::Social).unwrap(), 0.0);
        let s = single_player(0.25, 0.75);
        let q = MixedProfile::new(vec![0.4]).unwrap();
        assert_eq!(
            objective_value(&s, &q, Objective::Player(0)).unwrap(),
            expected_payoff(&s, 0, &q).unwrap()
        );
        assert!(objective_value(&g, &ones, Objective::Player(3)).is_err());
    }

    #[test]
    fn path_social_and_welfare() {
        let g = path_coordination(3);
        for objective in [Objective::Social, Objective::Welfare] {
            let cfg = SelectConfig { eps: 0.05, objective, root: 0, grid: GridChoice::Fixed(8) };
            let s = select_equilibrium_with(&g, &cfg).unwrap();
            let want = if objective == Objective::Social { 3.0 } else { 1.0 };
            assert!((s.value - want).abs() < 1e-9);
            assert!((s.table_value - s.value).abs() < 1e-9);
            assert!(is_eps_nash(&g, &s.profile, 0.05).unwrap());
            let p = s.profile.as_slice();
            assert!(p == [0.0; 3] || p == [1.0; 3]);
        }
    }

    #[test]
    fn battle_of_sexes_player_optimum() {
        let g = battle_of_sexes_edge();
        // Player 0 prefers both playing action 0, player 1 both playing action 1.
        let cfg = |t| SelectConfig { eps: 0.01, objective: Objective::Player(t), root: 0, grid: GridChoice::Fixed(6) };
        let s0 = select_equilibrium_with(&g, &cfg(0)).unwrap();
        assert_eq!(s0.profile.as_slice(), &[1.0, 1.0]);
        let s1 = select_equilibrium_with(&g, &cfg(1)).unwrap();
        assert_eq!(s1.profile.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn guard_rejects_huge_grids() {
        let g = path_coordination(3);
        let o = orient(&g, 0).unwrap();
        let err = select_equilibrium_on_grid(&g, &o, TauGrid::new(20_000).unwrap(), 0.1, Objective::Social);
        assert!(matches!(err, Err(SolverError::SizeGuard { .. })));
    }
}
