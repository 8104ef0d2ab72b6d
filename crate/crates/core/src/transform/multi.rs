//! Games where players may have more than two actions.
//!
//! Mixed strategies live on the simplex grid: every distribution whose
//! probabilities are multiples of `1/m`.

use crate::approx::{compute_tau, GridChoice, Policy};
use crate::error::{Result, SolverError};
use crate::game::multilinear::contract_radix;
use crate::game::{GraphicalGame, PlayerId, Violation, REGRET_TOL};
use crate::tree::TreeOrientation;

use super::finite::{finite_downstream, finite_upstream, LocalProblem};

/// One distribution per player.
pub type MultiProfile = Vec<Vec<f64>>;

/// A graphical game with `actions[i] ≥ 2` actions for player `i`.
///
/// Payoff tables are indexed by the actions of the owner and then its
/// neighbors in ascending order, the owner being the most significant digit.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiActionGame {
    actions: Vec<usize>,
    neighbors: Vec<Vec<PlayerId>>,
    payoffs: Vec<Vec<f64>>,
}

fn violation(location: String, message: String) -> SolverError {
    SolverError::Validation(vec![Violation { location, message }])
}

impl MultiActionGame {
    pub fn new(
        actions: Vec<usize>,
        edges: impl IntoIterator<Item = (PlayerId, PlayerId)>,
        payoffs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = actions.len();
        if payoffs.len() != n {
            return Err(SolverError::ArityMismatch { expected: n, got: payoffs.len() });
        }
        let mut neighbors = vec![Vec::new(); n];
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(violation(format!("edge ({a},{b})"), "bad endpoint".into()));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let game = Self { actions, neighbors, payoffs };
        for i in 0..n {
            if game.actions[i] < 2 {
                return Err(violation(format!("player {i}"), "needs at least two actions".into()));
            }
            let expected = game.table_len(i);
            if game.payoffs[i].len() != expected {
                return Err(violation(
                    format!("player {i}"),
                    format!("expected {expected} payoffs, found {}", game.payoffs[i].len()),
                ));
            }
            if let Some(x) = game.payoffs[i].iter().find(|x| !(x.is_finite() && x.abs() <= 1.0)) {
                return Err(violation(format!("player {i}"), format!("payoff {x} outside [-1, 1]")));
            }
        }
        Ok(game)
    }

    /// The same game with every player's two actions made explicit.
    pub fn from_binary(game: &GraphicalGame) -> Self {
        Self {
            actions: vec![2; game.n()],
            neighbors: (0..game.n()).map(|i| game.neighbors(i).to_vec()).collect(),
            payoffs: game.matrices().iter().map(|m| m.payoffs().to_vec()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self, i: PlayerId) -> usize {
        self.actions[i]
    }

    pub fn neighbors(&self, i: PlayerId) -> &[PlayerId] {
        &self.neighbors[i]
    }

    pub fn payoffs(&self, i: PlayerId) -> &[f64] {
        &self.payoffs[i]
    }

    pub fn max_closed_neighborhood(&self) -> usize {
        self.neighbors.iter().map(|n| n.len() + 1).max().unwrap_or(1)
    }

    fn table_len(&self, i: PlayerId) -> usize {
        self.actions[i] * self.neighbors[i].iter().map(|&j| self.actions[j]).product::<usize>()
    }

    fn check_profile(&self, profile: &[Vec<f64>]) -> Result<()> {
        if profile.len() != self.n() {
            return Err(SolverError::ArityMismatch { expected: self.n(), got: profile.len() });
        }
        for (i, p) in profile.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            if p.len() != self.actions[i] || p.iter().any(|x| !(0.0..=1.0).contains(x)) || (sum - 1.0).abs() > 1e-9 {
                return Err(SolverError::InvalidProfile(format!("player {i} has no valid distribution {p:?}")));
            }
        }
        Ok(())
    }

    /// Expected payoff of each of player `i`'s actions against `profile`.
    pub fn action_payoffs(&self, i: PlayerId, profile: &[Vec<f64>]) -> Result<Vec<f64>> {
        if i >= self.n() {
            return Err(SolverError::InvalidPlayer { player: i, n: self.n() });
        }
        self.check_profile(profile)?;
        let rest = self.payoffs[i].len() / self.actions[i];
        Ok(self.payoffs[i]
            .chunks(rest)
            .map(|slice| {
                self.neighbors[i].iter().fold(slice.to_vec(), |t, &j| contract_radix(&t, &profile[j]))[0]
            })
            .collect())
    }

    pub fn expected_payoff(&self, i: PlayerId, profile: &[Vec<f64>]) -> Result<f64> {
        let pay = self.action_payoffs(i, profile)?;
        Ok(pay.iter().zip(&profile[i]).map(|(a, p)| a * p).sum())
    }

    /// Gain from the best pure deviation.
    pub fn regret(&self, i: PlayerId, profile: &[Vec<f64>]) -> Result<f64> {
        Ok(regret_of(&self.action_payoffs(i, profile)?, &profile[i]))
    }

    pub fn max_regret(&self, profile: &[Vec<f64>]) -> Result<f64> {
        (0..self.n()).try_fold(0.0f64, |acc, i| Ok(acc.max(self.regret(i, profile)?)))
    }

    pub fn is_eps_nash(&self, profile: &[Vec<f64>], eps: f64) -> Result<bool> {
        Ok(self.max_regret(profile)? <= eps + REGRET_TOL)
    }

    fn adjacency(&self) -> Vec<Vec<PlayerId>> {
        self.neighbors.clone()
    }
}

/// `max_a Σ_b σ_b (pay[a] - pay[b])`.
fn regret_of(pay: &[f64], sigma: &[f64]) -> f64 {
    pay.iter()
        .map(|&best| sigma.iter().zip(pay).map(|(s, &p)| s * (best - p)).sum::<f64>())
        .fold(0.0f64, f64::max)
}

/// Count vectors of `a` parts summing to `m`, lexicographically ascending.
pub fn simplex_counts(a: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(a: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if a == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(a - 1, left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if a > 0 {
        rec(a, m, &mut Vec::with_capacity(a), &mut out);
    }
    out
}

/// Grid distributions over `a` actions at resolution `m`, in the order of
/// [`simplex_counts`]. The last coordinate is one minus the others, so for
/// `a = 2` point `j` is `(j/m, 1 - j/m)` as on the binary grid.
pub fn simplex_grid(a: usize, m: usize) -> Vec<Vec<f64>> {
    simplex_counts(a, m)
        .into_iter()
        .map(|counts| {
            let mut p: Vec<f64> = counts[..a - 1].iter().map(|&c| c as f64 / m as f64).collect();
            let head: f64 = p.iter().sum();
            p.push(if counts[a - 1] == 0 { 0.0 } else { 1.0 - head });
            p
        })
        .collect()
}

/// Rock-paper-scissors between players 0 and 1 (win 1, loss -1, tie 0).
pub fn rock_paper_scissors_edge() -> MultiActionGame {
    // Action order rock, paper, scissors; entry (own, other).
    let beats = |x: usize, y: usize| -> f64 {
        if x == y {
            0.0
        } else if (x + 3 - y) % 3 == 1 {
            1.0
        } else {
            -1.0
        }
    };
    let table: Vec<f64> = (0..9).map(|k| beats(k / 3, k % 3)).collect();
    MultiActionGame::new(vec![3, 3], [(0, 1)], vec![table.clone(), table]).expect("rock-paper-scissors is well formed")
}

/// Moves the variables of a mixed-radix table from order `from` to `to`.
fn permute_radix(table: &[f64], radix: &[usize], from: &[usize], to: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let k = from.len();
    let pos: Vec<usize> = to.iter().map(|v| from.iter().position(|f| f == v).expect("same variables")).collect();
    let new_radix: Vec<usize> = pos.iter().map(|&p| radix[p]).collect();
    let mut stride = vec![1usize; k];
    for t in (0..k.saturating_sub(1)).rev() {
        stride[t] = stride[t + 1] * radix[t + 1];
    }
    let mut digits = vec![0usize; k];
    let mut out = Vec::with_capacity(table.len());
    for _ in 0..table.len() {
        let x: usize = (0..k).map(|t| digits[t] * stride[pos[t]]).sum();
        out.push(table[x]);
        for t in (0..k).rev() {
            digits[t] += 1;
            if digits[t] < new_radix[t] {
                break;
            }
            digits[t] = 0;
        }
    }
    (out, new_radix)
}

struct MultiProblem<'g> {
    game: &'g MultiActionGame,
    orientation: &'g TreeOrientation,
    /// Simplex grid per distinct action count.
    grids: Vec<Vec<Vec<f64>>>,
    /// Per vertex, the payoff table reordered to (owner, parents, child).
    tables: Vec<Vec<f64>>,
    eps: f64,
}

impl<'g> MultiProblem<'g> {
    fn new(game: &'g MultiActionGame, orientation: &'g TreeOrientation, m: usize, eps_local: f64) -> Self {
        let max_a = game.actions.iter().copied().max().unwrap_or(2);
        let grids = (0..=max_a).map(|a| if a >= 2 { simplex_grid(a, m) } else { Vec::new() }).collect();
        let tables = (0..game.n())
            .map(|v| {
                let from: Vec<usize> = std::iter::once(v).chain(game.neighbors[v].iter().copied()).collect();
                let to: Vec<usize> =
                    std::iter::once(v).chain(orientation.parents(v).iter().copied()).chain(orientation.child(v)).collect();
                let radix: Vec<usize> = from.iter().map(|&j| game.actions[j]).collect();
                permute_radix(&game.payoffs[v], &radix, &from, &to).0
            })
            .collect();
        Self { game, orientation, grids, tables, eps: eps_local + REGRET_TOL }
    }

    fn point(&self, v: usize, idx: usize) -> &[f64] {
        &self.grids[self.game.actions[v]][idx]
    }
}

impl LocalProblem for MultiProblem<'_> {
    fn size(&self, v: usize) -> usize {
        self.grids[self.game.actions[v]].len()
    }

    fn check<'a>(&'a self, v: usize, own: usize, parents: &[usize]) -> Box<dyn Fn(Option<usize>) -> bool + 'a> {
        let table = &self.tables[v];
        let rest = table.len() / self.game.actions[v];
        // Per own action, payoff as a function of the child's action.
        let by_action: Vec<Vec<f64>> = table
            .chunks(rest)
            .map(|slice| {
                self.orientation
                    .parents(v)
                    .iter()
                    .zip(parents)
                    .fold(slice.to_vec(), |t, (&p, &u)| contract_radix(&t, self.point(p, u)))
            })
            .collect();
        let sigma = self.point(v, own);
        let child = self.orientation.child(v);
        Box::new(move |w| {
            let pay: Vec<f64> = match (child, w) {
                (Some(c), Some(w)) => {
                    let dist = self.point(c, w);
                    by_action.iter().map(|row| row.iter().zip(dist).map(|(x, p)| x * p).sum()).collect()
                }
                _ => by_action.iter().map(|row| row[0]).collect(),
            };
            regret_of(&pay, sigma) <= self.eps
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiConfig {
    pub eps: f64,
    pub root: PlayerId,
    pub policy: Policy,
    pub grid: GridChoice,
}

impl MultiConfig {
    pub fn new(eps: f64) -> Self {
        Self { eps, root: 0, policy: Policy::First, grid: GridChoice::Adaptive }
    }
}

/// What a multi-action solve used. The resolution comes from the binary
/// formula and is not a proven bound beyond two actions, so `max_regret`
/// is measured.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiCertificate {
    pub m: usize,
    pub tau: f64,
    pub eps_local: f64,
    pub k_max: usize,
    pub max_regret: f64,
}

/// Approximate equilibrium of a tree game with many actions, searching the
/// adaptive grid schedule.
pub fn approximate_tree_nash_multi(
    game: &MultiActionGame,
    eps: f64,
    root: PlayerId,
    policy: Policy,
) -> Result<(MultiProfile, MultiCertificate)> {
    approximate_tree_nash_multi_with(game, &MultiConfig { eps, root, policy, grid: GridChoice::Adaptive })
}

pub fn approximate_tree_nash_multi_with(
    game: &MultiActionGame,
    config: &MultiConfig,
) -> Result<(MultiProfile, MultiCertificate)> {
    let k_max = game.max_closed_neighborhood();
    let guaranteed = compute_tau(k_max, config.eps)?;
    let orientation = TreeOrientation::from_adjacency(&game.adjacency(), config.root)?;
    if game.neighbors.iter().map(Vec::len).sum::<usize>() != 2 * (game.n() - 1) {
        return Err(SolverError::NotATree);
    }
    for m in config.grid.schedule(guaranteed.m()) {
        if m == 0 {
            return Err(SolverError::Unsatisfiable("grid resolution must be positive".into()));
        }
        let problem = MultiProblem::new(game, &orientation, m, config.eps);
        let res = finite_downstream(&problem, &orientation)?;
        if res.root_ones().is_empty() {
            continue;
        }
        let idx = finite_upstream(&problem, &res, &mut *config.policy.chooser())?;
        let profile: MultiProfile = idx.iter().enumerate().map(|(v, &j)| problem.point(v, j).to_vec()).collect();
        let certificate = MultiCertificate {
            m,
            tau: 1.0 / m as f64,
            eps_local: config.eps,
            k_max,
            max_regret: game.max_regret(&profile)?,
        };
        return Ok((profile, certificate));
    }
    Err(SolverError::NoEquilibriumFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{approximate_tree_nash_with, ApproxConfig};
    use crate::game::{expected_payoff, generate_random_tree_game, regret, MixedProfile};

    #[test]
    fn simplex_grid_sizes() {
        assert_eq!(simplex_grid(2, 4), (0..=4).map(|j| vec![j as f64 / 4.0, 1.0 - j as f64 / 4.0]).collect::<Vec<_>>());
        let g = simplex_grid(3, 2);
        assert_eq!(g.len(), 6);
        for p in [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.0, 0.0, 1.0]] {
            assert!(g.contains(&p.to_vec()));
        }
        assert_eq!(simplex_grid(2, 1), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let binom = |n: u64, k: u64| (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i);
        for a in 2..=5 {
            for m in 1..=8 {
                let pts = simplex_grid(a, m);
                assert_eq!(pts.len() as u64, binom((m + a - 1) as u64, (a - 1) as u64));
                assert!(pts.iter().all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
                assert!(simplex_counts(a, m).iter().all(|c| c.iter().sum::<usize>() == m));
            }
        }
    }

    #[test]
    fn radix_permutation() {
        // Variables x (2 values) and y (3 values), table[x*3 + y] = 10x + y.
        let t: Vec<f64> = (0..6).map(|i| (10 * (i / 3) + i % 3) as f64).collect();
        let (p, r) = permute_radix(&t, &[2, 3], &[0, 1], &[1, 0]);
        assert_eq!(r, vec![3, 2]);
        assert_eq!(p, vec![0.0, 10.0, 1.0, 11.0, 2.0, 12.0]);
    }

    #[test]
    fn binary_payoffs_agree() {
        let g = generate_random_tree_game(5, 3, 4).unwrap();
        let multi = MultiActionGame::from_binary(&g);
        let p = MixedProfile::new(vec![0.1, 0.5, 0.9, 0.3, 1.0]).unwrap();
        let mp: MultiProfile = p.as_slice().iter().map(|&x| vec![x, 1.0 - x]).collect();
        for i in 0..5 {
            assert!((multi.expected_payoff(i, &mp).unwrap() - expected_payoff(&g, i, &p).unwrap()).abs() < 1e-12);
            assert!((multi.regret(i, &mp).unwrap() - regret(&g, i, &p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_action_single_player() {
        let g = MultiActionGame::new(vec![3], [], vec![vec![0.1, 0.9, -0.5]]).unwrap();
        let (p, cert) = approximate_tree_nash_multi(&g, 0.01, 0, Policy::First).unwrap();
        assert_eq!(p, vec![vec![0.0, 1.0, 0.0]]);
        assert_eq!(cert.max_regret, 0.0);
    }

    #[test]
    fn rock_paper_scissors_is_near_uniform() {
        let g = rock_paper_scissors_edge();
        let (p, cert) = approximate_tree_nash_multi(&g, 0.1, 0, Policy::First).unwrap();
        assert!(cert.max_regret <= 0.1 + REGRET_TOL);
        for dist in &p {
            for &x in dist {
                assert!((x - 1.0 / 3.0).abs() <= cert.tau + 1e-12, "{p:?}");
            }
        }
    }

    #[test]
    fn two_actions_match_binary_solver() {
        for seed in 0..6 {
            let g = generate_random_tree_game(6, 3, seed).unwrap();
            let multi = MultiActionGame::from_binary(&g);
            for (grid, policy) in [(GridChoice::Fixed(5), Policy::First), (GridChoice::Adaptive, Policy::Random(seed))] {
                let cfg = ApproxConfig { eps: 0.2, root: 1, policy, grid };
                let binary = approximate_tree_nash_with(&g, &cfg);
                let mcfg = MultiConfig { eps: 0.2, root: 1, policy, grid };
                let got = approximate_tree_nash_multi_with(&multi, &mcfg);
                match (binary, got) {
                    (Ok((bp, _)), Ok((mp, _))) => {
                        let first: Vec<f64> = mp.iter().map(|d| d[0]).collect();
                        assert_eq!(bp.as_slice(), first.as_slice(), "seed {seed}");
                    }
                    (Err(a), Err(b)) => assert_eq!(a, b),
                    (a, b) => panic!("seed {seed}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn rejects_bad_games() {
        assert!(MultiActionGame::new(vec![3, 1], [(0, 1)], vec![vec![0.0; 3], vec![0.0; 3]]).is_err());
        assert!(MultiActionGame::new(vec![3, 2], [(0, 1)], vec![vec![0.0; 5], vec![0.0; 6]]).is_err());
        assert!(MultiActionGame::new(vec![2], [], vec![vec![2.0, 0.0]]).is_err());
        let cycle =
            MultiActionGame::new(vec![2; 3], [(0, 1), (1, 2), (2, 0)], vec![vec![0.0; 8]; 3]).unwrap();
        assert!(approximate_tree_nash_multi(&cycle, 0.1, 0, Policy::First).is_err());
    }
}
