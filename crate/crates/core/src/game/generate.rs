use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphicalGame, PlayerId};
use crate::error::{Result, SolverError};

/// Seeded random source shared by the generators.
pub struct GameRng(ChaCha8Rng);

impl GameRng {
    pub fn seed(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.0
    }

    /// `len` payoffs drawn uniformly from `[-1, 1]`.
    pub fn payoffs(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.0.gen_range(-1.0..=1.0)).collect()
    }

    /// `len` payoffs of the form `a / denominator` with `|a| <= denominator`.
    pub fn rational_payoffs(&mut self, len: usize, denominator: u32) -> Vec<BigRational> {
        let d = i64::from(denominator.max(1));
        (0..len)
            .map(|_| BigRational::new(BigInt::from(self.0.gen_range(-d..=d)), BigInt::from(d)))
            .collect()
    }
}

/// Random labelled tree on `n` vertices with every degree at most
/// `max_degree`.
pub fn random_tree_edges(n: usize, max_degree: usize, rng: &mut GameRng) -> Result<Vec<(PlayerId, PlayerId)>> {
    if n == 0 {
        return Err(SolverError::Unsatisfiable("a game needs at least one player".into()));
    }
    if (n >= 2 && max_degree < 1) || (n >= 3 && max_degree < 2) {
        return Err(SolverError::Unsatisfiable(format!(
            "no tree on {n} vertices has maximum degree {max_degree}"
        )));
    }
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| degree[u] < max_degree).collect();
        let u = open[rng.0.gen_range(0..open.len())];
        degree[u] += 1;
        degree[v] += 1;
        edges.push((u, v));
    }
    let mut labels: Vec<PlayerId> = (0..n).collect();
    labels.shuffle(&mut rng.0);
    Ok(edges.into_iter().map(|(a, b)| (labels[a], labels[b])).collect())
}

/// The cycle `0 - 1 - ... - (n-1) - 0`.
pub fn cycle_edges(n: usize) -> Vec<(PlayerId, PlayerId)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// A random tree plus up to `extra` additional edges, all respecting
/// `max_degree`. The result is always connected.
pub fn random_connected_edges(
    n: usize,
    max_degree: usize,
    extra: usize,
    rng: &mut GameRng,
) -> Result<Vec<(PlayerId, PlayerId)>> {
    let mut edges = random_tree_edges(n, max_degree, rng)?;
    let mut degree = vec![0usize; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut candidates: Vec<(PlayerId, PlayerId)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)))
        .collect();
    candidates.shuffle(&mut rng.0);
    let mut added = 0;
    for (a, b) in candidates {
        if added == extra {
            break;
        }
        if degree[a] < max_degree && degree[b] < max_degree {
            degree[a] += 1;
            degree[b] += 1;
            edges.push((a, b));
            added += 1;
        }
    }
    Ok(edges)
}

/// Random tree game with payoffs uniform on `[-1, 1]`. Deterministic in
/// `seed`.
pub fn generate_random_tree_game(n: usize, max_degree: usize, seed: u64) -> Result<GraphicalGame> {
    let mut rng = GameRng::seed(seed);
    let edges = random_tree_edges(n, max_degree, &mut rng)?;
    let skeleton = GraphicalGame::from_parts(n, edges.iter().copied(), Vec::new());
    let payoffs = (0..n).map(|i| rng.payoffs(1 << (skeleton.degree(i) + 1))).collect();
    GraphicalGame::with_payoffs(n, edges, payoffs)
}

/// Random tree game whose payoffs are multiples of `1/denominator`.
pub fn generate_random_rational_tree_game(
    n: usize,
    max_degree: usize,
    denominator: u32,
    seed: u64,
) -> Result<GraphicalGame> {
    let mut rng = GameRng::seed(seed);
    let edges = random_tree_edges(n, max_degree, &mut rng)?;
    let skeleton = GraphicalGame::from_parts(n, edges.iter().copied(), Vec::new());
    let payoffs = (0..n)
        .map(|i| rng.rational_payoffs(1 << (skeleton.degree(i) + 1), denominator))
        .collect();
    GraphicalGame::with_rational_payoffs(n, edges, payoffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{is_connected, is_tree};

    #[test]
    fn single_vertex_has_two_entries() {
        let g = generate_random_tree_game(1, 1, 0).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.matrix(0).payoffs().len(), 2);
    }

    #[test]
    fn same_seed_same_game() {
        let a = generate_random_tree_game(12, 3, 99).unwrap();
        let b = generate_random_tree_game(12, 3, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_ne!(a, generate_random_tree_game(12, 3, 100).unwrap());
    }

    #[test]
    fn large_tree_respects_degree_bound() {
        let g = generate_random_tree_game(50, 3, 7).unwrap();
        assert_eq!(g.edges().len(), 49);
        assert!((0..50).all(|i| g.degree(i) <= 3));
        assert!(is_tree(&g));
    }

    #[test]
    fn unsatisfiable_degree_is_rejected() {
        assert!(matches!(generate_random_tree_game(2, 0, 1), Err(SolverError::Unsatisfiable(_))));
        assert!(matches!(generate_random_tree_game(3, 1, 1), Err(SolverError::Unsatisfiable(_))));
        assert!(generate_random_tree_game(2, 1, 1).is_ok());
    }

    #[test]
    fn connected_generator_adds_edges() {
        let mut rng = GameRng::seed(3);
        let edges = random_connected_edges(8, 3, 3, &mut rng).unwrap();
        assert_eq!(edges.len(), 10);
        let g = GraphicalGame::from_parts(8, edges, Vec::new());
        assert!(is_connected(&g));
        assert!((0..8).all(|i| g.degree(i) <= 3));
    }

    #[test]
    fn rational_games_are_exact() {
        let g = generate_random_rational_tree_game(6, 3, 4, 1).unwrap();
        assert!(g.is_rational());
    }
}
