//! Graphical games with two actions per player.
//!
//! Player `i` mixes by playing action 0 with probability `p[i]`. Its local
//! payoff matrix is indexed by the joint pure action of its closed
//! neighborhood, ordered owner first and then neighbors ascending, with the
//! owner's bit most significant. The two halves of a matrix are therefore
//! the payoffs when the owner plays 0 and when it plays 1.

mod catalog;
mod generate;
pub mod multilinear;

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SolverError};
use multilinear::{contract_all, contract_f64};

pub use catalog::{
    battle_of_sexes_edge, coordination_edge, cycle_coordination, matching_pennies_edge,
    path_coordination, single_player,
};
pub use generate::{
    cycle_edges, generate_random_rational_tree_game, generate_random_tree_game,
    random_connected_edges, random_tree_edges, GameRng,
};

/// Dense player index in `0..n`.
pub type PlayerId = usize;

/// Slack applied to every ε-best-response comparison so that payoff
/// differences that are zero in exact arithmetic are not misjudged after
/// floating-point rounding.
pub const REGRET_TOL: f64 = 1e-12;

/// Payoff matrix of one player over the joint actions of its closed
/// neighborhood.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMatrix {
    owner: PlayerId,
    neighborhood: Vec<PlayerId>,
    payoffs: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl LocalMatrix {
    pub fn new(owner: PlayerId, neighborhood: Vec<PlayerId>, payoffs: Vec<f64>) -> Self {
        Self { owner, neighborhood, payoffs, exact: None }
    }

    /// Builds a matrix whose payoffs are known exactly. The floating-point
    /// view is the nearest `f64` of each entry.
    pub fn from_rationals(
        owner: PlayerId,
        neighborhood: Vec<PlayerId>,
        payoffs: Vec<BigRational>,
    ) -> Self {
        let floats = payoffs.iter().map(rational_to_f64).collect();
        Self { owner, neighborhood, payoffs: floats, exact: Some(payoffs) }
    }

    pub fn owner(&self) -> PlayerId {
        self.owner
    }

    pub fn neighborhood(&self) -> &[PlayerId] {
        &self.neighborhood
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn exact_payoffs(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    /// Number of players indexing this matrix.
    pub fn arity(&self) -> usize {
        self.neighborhood.len()
    }

    /// Payoffs with the owner's action fixed, indexed by the remaining
    /// neighborhood members.
    pub fn owner_slice(&self, action: usize) -> &[f64] {
        let half = self.payoffs.len() / 2;
        &self.payoffs[action * half..(action + 1) * half]
    }
}

/// A two-action graphical game `(G, M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphicalGame {
    n: usize,
    edges: Vec<(PlayerId, PlayerId)>,
    adjacency: Vec<Vec<PlayerId>>,
    matrices: Vec<LocalMatrix>,
}

impl GraphicalGame {
    /// Assembles a game without checking its invariants. Use [`validate`] to
    /// list violations, or [`GraphicalGame::new`] to reject them.
    pub fn from_parts(
        n: usize,
        edges: impl IntoIterator<Item = (PlayerId, PlayerId)>,
        matrices: Vec<LocalMatrix>,
    ) -> Self {
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a != b && b < n {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self { n, edges, adjacency, matrices }
    }

    /// Assembles and validates a game.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (PlayerId, PlayerId)>,
        matrices: Vec<LocalMatrix>,
    ) -> Result<Self> {
        let game = Self::from_parts(n, edges, matrices);
        validate(&game).map_err(SolverError::Validation)?;
        Ok(game)
    }

    /// Builds a game from per-player payoff arrays, deriving each matrix's
    /// neighborhood from the edge set.
    pub fn with_payoffs(
        n: usize,
        edges: impl IntoIterator<Item = (PlayerId, PlayerId)>,
        payoffs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let skeleton = Self::from_parts(n, edges, Vec::new());
        if payoffs.len() != n {
            return Err(SolverError::ArityMismatch { expected: n, got: payoffs.len() });
        }
        let matrices = payoffs
            .into_iter()
            .enumerate()
            .map(|(i, p)| LocalMatrix::new(i, skeleton.closed_neighborhood(i), p))
            .collect();
        Self::new(n, skeleton.edges, matrices)
    }

    /// Exact-payoff counterpart of [`GraphicalGame::with_payoffs`].
    pub fn with_rational_payoffs(
        n: usize,
        edges: impl IntoIterator<Item = (PlayerId, PlayerId)>,
        payoffs: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        let skeleton = Self::from_parts(n, edges, Vec::new());
        if payoffs.len() != n {
            return Err(SolverError::ArityMismatch { expected: n, got: payoffs.len() });
        }
        let matrices = payoffs
            .into_iter()
            .enumerate()
            .map(|(i, p)| LocalMatrix::from_rationals(i, skeleton.closed_neighborhood(i), p))
            .collect();
        Self::new(n, skeleton.edges, matrices)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(PlayerId, PlayerId)] {
        &self.edges
    }

    pub fn matrices(&self) -> &[LocalMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: PlayerId) -> &LocalMatrix {
        &self.matrices[i]
    }

    /// Open neighborhood of `i`, ascending.
    pub fn neighbors(&self, i: PlayerId) -> &[PlayerId] {
        &self.adjacency[i]
    }

    /// `i` followed by its neighbors ascending.
    pub fn closed_neighborhood(&self, i: PlayerId) -> Vec<PlayerId> {
        std::iter::once(i).chain(self.adjacency[i].iter().copied()).collect()
    }

    pub fn degree(&self, i: PlayerId) -> usize {
        self.adjacency[i].len()
    }

    /// Largest closed-neighborhood size over all players.
    pub fn max_closed_neighborhood(&self) -> usize {
        (0..self.n).map(|i| self.degree(i) + 1).max().unwrap_or(1)
    }

    /// True when every matrix carries exact rational payoffs.
    pub fn is_rational(&self) -> bool {
        self.matrices.iter().all(|m| m.exact.is_some())
    }

    /// Replaces every payoff by its best rational approximation with
    /// denominator at most `max_denominator`.
    pub fn rationalize(&self, max_denominator: u64) -> Self {
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                let exact = m.payoffs.iter().map(|&x| approximate_rational(x, max_denominator)).collect();
                LocalMatrix::from_rationals(m.owner, m.neighborhood.clone(), exact)
            })
            .collect();
        Self { matrices, ..self.clone() }
    }

    fn check_player(&self, i: PlayerId) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(SolverError::InvalidPlayer { player: i, n: self.n })
        }
    }

    fn check_profile_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(SolverError::InvalidProfile(format!(
                "profile has {len} entries, game has {} players",
                self.n
            )))
        }
    }
}

/// Probability of action 0 for every player.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile(Vec<f64>);

impl MixedProfile {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some((i, x)) = p.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
            return Err(SolverError::InvalidProfile(format!("p[{i}] = {x} is outside [0,1]")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with player `i` switched to `value`.
    pub fn with(&self, i: PlayerId, value: f64) -> Result<Self> {
        let mut p = self.0.clone();
        p[i] = value;
        Self::new(p)
    }

    /// Rounds every coordinate to the nearest multiple of `1/m`.
    pub fn snap_to_grid(&self, m: usize) -> Vec<usize> {
        self.0.iter().map(|&x| (x * m as f64).round() as usize).collect()
    }
}

impl std::ops::Index<PlayerId> for MixedProfile {
    type Output = f64;
    fn index(&self, i: PlayerId) -> &f64 {
        &self.0[i]
    }
}

/// Expected payoff to `i` under the product distribution `profile`.
pub fn expected_payoff(game: &GraphicalGame, i: PlayerId, profile: &MixedProfile) -> Result<f64> {
    game.check_player(i)?;
    game.check_profile_len(profile.len())?;
    let m = &game.matrices[i];
    let probs: Vec<f64> = m.neighborhood.iter().map(|&j| profile[j]).collect();
    Ok(contract_f64(&m.payoffs, &probs))
}

/// Expected payoffs to `i` for its two pure actions, others fixed.
pub fn pure_payoffs(game: &GraphicalGame, i: PlayerId, profile: &MixedProfile) -> Result<(f64, f64)> {
    game.check_player(i)?;
    game.check_profile_len(profile.len())?;
    let m = &game.matrices[i];
    let probs: Vec<f64> = m.neighborhood[1..].iter().map(|&j| profile[j]).collect();
    Ok((contract_f64(m.owner_slice(0), &probs), contract_f64(m.owner_slice(1), &probs)))
}

/// Largest gain `i` can obtain by deviating unilaterally.
///
/// Expected payoff is affine in the player's own probability, so the best
/// deviation is one of the two pure actions.
pub fn regret(game: &GraphicalGame, i: PlayerId, profile: &MixedProfile) -> Result<f64> {
    let (a0, a1) = pure_payoffs(game, i, profile)?;
    let p = profile[i];
    let current = p * a0 + (1.0 - p) * a1;
    Ok((a0.max(a1) - current).max(0.0))
}

/// Per-player regrets.
pub fn regrets(game: &GraphicalGame, profile: &MixedProfile) -> Result<Vec<f64>> {
    (0..game.n).map(|i| regret(game, i, profile)).collect()
}

pub fn max_regret(game: &GraphicalGame, profile: &MixedProfile) -> Result<f64> {
    Ok(regrets(game, profile)?.into_iter().fold(0.0, f64::max))
}

/// Whether no player can gain more than `eps` (up to [`REGRET_TOL`]) by
/// deviating.
pub fn is_eps_nash(game: &GraphicalGame, profile: &MixedProfile, eps: f64) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(SolverError::InvalidEpsilon(eps));
    }
    Ok(max_regret(game, profile)? <= eps + REGRET_TOL)
}

fn exact_matrix(game: &GraphicalGame, i: PlayerId) -> Result<&[BigRational]> {
    game.matrices[i].exact_payoffs().ok_or(SolverError::NonRationalPayoffs)
}

/// Exact expected payoff; requires rational payoffs.
pub fn expected_payoff_exact(
    game: &GraphicalGame,
    i: PlayerId,
    profile: &[BigRational],
) -> Result<BigRational> {
    game.check_player(i)?;
    game.check_profile_len(profile.len())?;
    let probs: Vec<BigRational> =
        game.matrices[i].neighborhood.iter().map(|&j| profile[j].clone()).collect();
    Ok(contract_all(exact_matrix(game, i)?, &probs))
}

/// Exact regret of `i`; zero for every player characterizes an exact Nash
/// equilibrium.
pub fn regret_exact(game: &GraphicalGame, i: PlayerId, profile: &[BigRational]) -> Result<BigRational> {
    game.check_player(i)?;
    game.check_profile_len(profile.len())?;
    let table = exact_matrix(game, i)?;
    let half = table.len() / 2;
    let probs: Vec<BigRational> =
        game.matrices[i].neighborhood[1..].iter().map(|&j| profile[j].clone()).collect();
    let a0 = contract_all(&table[..half], &probs);
    let a1 = contract_all(&table[half..], &probs);
    let p = &profile[i];
    let current = p * &a0 + (BigRational::one() - p) * &a1;
    let best = if a0 > a1 { a0 } else { a1 };
    Ok(best - current)
}

/// True iff every player's exact regret is zero.
pub fn is_exact_nash(game: &GraphicalGame, profile: &[BigRational]) -> Result<bool> {
    for i in 0..game.n {
        if !regret_exact(game, i, profile)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One violated game invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Lists every violated structural invariant of `game`.
pub fn validate(game: &GraphicalGame) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let mut push = |location: String, message: String| out.push(Violation { location, message });

    for &(a, b) in &game.edges {
        if a == b {
            push(format!("edge ({a},{b})"), "self-loop".into());
        }
        if b >= game.n {
            push(format!("edge ({a},{b})"), format!("endpoint out of range 0..{}", game.n));
        }
    }
    if game.matrices.len() != game.n {
        push(
            "matrices".into(),
            format!("expected {} matrices, found {}", game.n, game.matrices.len()),
        );
    }
    for (i, m) in game.matrices.iter().enumerate() {
        let loc = format!("player {i}");
        if m.owner != i {
            push(loc.clone(), format!("matrix owner is {} instead of {i}", m.owner));
        }
        if i < game.n && m.neighborhood != game.closed_neighborhood(i) {
            push(
                loc.clone(),
                format!(
                    "neighborhood {:?} does not match closed neighborhood {:?}",
                    m.neighborhood,
                    game.closed_neighborhood(i)
                ),
            );
        }
        let k = m.neighborhood.len();
        if k >= usize::BITS as usize || m.payoffs.len() != 1usize << k {
            push(
                loc.clone(),
                format!("payoff array length ≠ 2^k (length {}, k = {k})", m.payoffs.len()),
            );
        }
        if let Some(exact) = &m.exact {
            if exact.len() != m.payoffs.len() {
                push(loc.clone(), "exact and floating payoff arrays differ in length".into());
            }
            if let Some(j) = exact.iter().position(|x| x.abs() > BigRational::one()) {
                push(format!("{loc}, entry {j}"), "payoff out of [−1,1]".into());
            }
        }
        for (j, &x) in m.payoffs.iter().enumerate() {
            if !x.is_finite() {
                push(format!("{loc}, entry {j}"), "payoff is not finite".into());
            } else if !(-1.0..=1.0).contains(&x) {
                push(format!("{loc}, entry {j}"), "payoff out of [−1,1]".into());
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Connected with exactly `n - 1` edges.
pub fn is_tree(game: &GraphicalGame) -> bool {
    game.n >= 1 && game.edges.len() == game.n - 1 && is_connected(game)
}

pub fn is_connected(game: &GraphicalGame) -> bool {
    if game.n == 0 {
        return false;
    }
    let mut seen = vec![false; game.n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &game.adjacency[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == game.n
}

pub(crate) fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued-fraction convergents and the best semiconvergent.
pub fn approximate_rational(x: f64, max_den: u64) -> BigRational {
    let max_den = max_den.max(1) as i128;
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a = a as i128;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            // Largest semiconvergent that still fits.
            let t = (max_den - q0) / q1.max(1);
            let (ps, qs) = (t * p1 + p0, t * q1 + q0);
            if qs > 0 && (ps as f64 / qs as f64 - x.abs()).abs() < (p1 as f64 / q1 as f64 - x.abs()).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = a * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = rest - a as f64;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    let num = if negative { -p1 } else { p1 };
    BigRational::new(BigInt::from(num), BigInt::from(q1.max(1)))
}
