//! Small named games used in examples and tests.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{cycle_edges, GraphicalGame, LocalMatrix};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ints(values: &[i64]) -> Vec<BigRational> {
    values.iter().map(|&v| ratio(v, 1)).collect()
}

/// One player with payoff `m0` for action 0 and `m1` for action 1.
pub fn single_player(m0: f64, m1: f64) -> GraphicalGame {
    GraphicalGame::new(1, [], vec![LocalMatrix::new(0, vec![0], vec![m0, m1])])
        .expect("single-player game is well formed")
}

/// Two players, each paid 1 when their actions agree and 0 otherwise.
pub fn coordination_edge() -> GraphicalGame {
    GraphicalGame::with_rational_payoffs(2, [(0, 1)], vec![ints(&[1, 0, 0, 1]), ints(&[1, 0, 0, 1])])
        .expect("coordination game is well formed")
}

/// Player 0 wins (+1) on a match, player 1 wins on a mismatch.
pub fn matching_pennies_edge() -> GraphicalGame {
    GraphicalGame::with_rational_payoffs(
        2,
        [(0, 1)],
        vec![ints(&[1, -1, -1, 1]), ints(&[-1, 1, 1, -1])],
    )
    .expect("matching pennies is well formed")
}

/// Both players want to coordinate; player 0 prefers joint action 0 (payoff
/// 1 versus 1/2) and player 1 prefers joint action 1.
pub fn battle_of_sexes_edge() -> GraphicalGame {
    let half = ratio(1, 2);
    let zero = ratio(0, 1);
    let one = ratio(1, 1);
    GraphicalGame::with_rational_payoffs(
        2,
        [(0, 1)],
        vec![
            vec![one.clone(), zero.clone(), zero.clone(), half.clone()],
            vec![half, zero.clone(), zero, one],
        ],
    )
    .expect("battle of the sexes is well formed")
}

/// Each player is paid 1 iff its whole closed neighborhood plays the same
/// action, on the path `0 - 1 - ... - (n-1)`.
pub fn path_coordination(n: usize) -> GraphicalGame {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    unanimity_game(n, edges)
}

/// The unanimity payoff of [`path_coordination`] on a cycle.
pub fn cycle_coordination(n: usize) -> GraphicalGame {
    unanimity_game(n, cycle_edges(n))
}

fn unanimity_game(n: usize, edges: Vec<(usize, usize)>) -> GraphicalGame {
    let skeleton = GraphicalGame::from_parts(n, edges.iter().copied(), Vec::new());
    let payoffs = (0..n)
        .map(|i| {
            let len = 1usize << (skeleton.degree(i) + 1);
            (0..len).map(|x| if x == 0 || x == len - 1 { ratio(1, 1) } else { ratio(0, 1) }).collect()
        })
        .collect();
    GraphicalGame::with_rational_payoffs(n, edges, payoffs).expect("unanimity game is well formed")
}
