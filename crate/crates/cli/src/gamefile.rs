//! JSON game files.
//!
//! ```json
//! {"version": 1, "players": [
//!   {"id": 0, "actions": 2, "neighbors": [1], "payoffs": [1, 0, 0, 1]},
//!   {"id": 1, "actions": 2, "neighbors": [0], "payoffs": ["1/2", 0, 0, "1"]}
//! ]}
//! ```
//!
//! Payoffs are listed with the owner's action as the most significant digit,
//! followed by the neighbors in ascending order. Integers and strings
//! (`"a/b"`, `"a"`, `"0.25"`) are exact; other JSON numbers are decimals.
//! The game is exact only when every payoff is.

use graphnash::game::LocalMatrix;
use graphnash::transform::MultiActionGame;
use graphnash::{GraphicalGame, PlayerId};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn from_rational(x: &BigRational) -> Self {
        Number::Text(x.to_string())
    }

    /// The exact value, unless this is a decimal JSON number.
    pub fn exact(&self) -> CliResult<Option<BigRational>> {
        match self {
            Number::Int(i) => Ok(Some(BigRational::from_integer(BigInt::from(*i)))),
            Number::Float(_) => Ok(None),
            Number::Text(s) => parse_rational(s).map(Some),
        }
    }

    pub fn to_f64(&self) -> CliResult<f64> {
        match self {
            Number::Int(i) => Ok(*i as f64),
            Number::Float(x) => Ok(*x),
            Number::Text(s) => {
                let q = parse_rational(s)?;
                q.to_f64().ok_or_else(|| CliError::Parse(format!("'{s}' is not representable")))
            }
        }
    }
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> CliResult<BigRational> {
    let bad = || CliError::Parse(format!("'{s}' is not a number or fraction"));
    let t = s.trim();
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{frac}", int.trim_start_matches(['-', '+']));
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        let q = BigRational::new(num, den);
        return Ok(if negative { -q } else { q });
    }
    let q: BigRational = t.parse().map_err(|_| bad())?;
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerEntry {
    pub id: PlayerId,
    pub actions: usize,
    pub neighbors: Vec<PlayerId>,
    pub payoffs: Vec<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub version: u32,
    pub players: Vec<PlayerEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadedGame {
    Binary(GraphicalGame),
    Multi(MultiActionGame),
}

impl LoadedGame {
    /// The two-action game, or an engine error naming `what` needs it.
    pub fn binary(&self, what: &str) -> CliResult<&GraphicalGame> {
        match self {
            LoadedGame::Binary(g) => Ok(g),
            LoadedGame::Multi(_) => Err(CliError::Engine(format!("{what} needs every player to have two actions"))),
        }
    }
}

pub fn parse_game(text: &str) -> CliResult<LoadedGame> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("game file: {e}")))?;
    build_game(file)
}

pub fn build_game(mut file: GameFile) -> CliResult<LoadedGame> {
    if file.version != FORMAT_VERSION {
        return Err(CliError::Parse(format!("unsupported game file version {}", file.version)));
    }
    let n = file.players.len();
    file.players.sort_by_key(|p| p.id);
    for (i, p) in file.players.iter().enumerate() {
        if p.id != i {
            return Err(CliError::Invalid(format!("player ids must be 0..{n} without gaps (missing {i})")));
        }
        if let Some(&j) = p.neighbors.iter().find(|&&j| j >= n || j == i) {
            return Err(CliError::Invalid(format!("player {i}: bad neighbor {j}")));
        }
    }
    let mut edges = Vec::new();
    for p in &file.players {
        for &j in &p.neighbors {
            if !file.players[j].neighbors.contains(&p.id) {
                return Err(CliError::Invalid(format!("player {} lists {j} as a neighbor but not vice versa", p.id)));
            }
            if p.id < j {
                edges.push((p.id, j));
            }
        }
    }
    if file.players.iter().all(|p| p.actions == 2) {
        let exact: Vec<Option<Vec<BigRational>>> = file
            .players
            .iter()
            .map(|p| p.payoffs.iter().map(Number::exact).collect::<CliResult<Option<Vec<_>>>>())
            .collect::<CliResult<_>>()?;
        let all_exact = exact.iter().all(Option::is_some);
        let mut matrices = Vec::with_capacity(n);
        for (p, q) in file.players.iter().zip(exact) {
            let mut hood = vec![p.id];
            let mut rest = p.neighbors.clone();
            rest.sort_unstable();
            rest.dedup();
            hood.extend(rest);
            matrices.push(match q {
                Some(q) if all_exact => LocalMatrix::from_rationals(p.id, hood, q),
                _ => LocalMatrix::new(p.id, hood, p.payoffs.iter().map(Number::to_f64).collect::<CliResult<_>>()?),
            });
        }
        return Ok(LoadedGame::Binary(GraphicalGame::new(n, edges, matrices)?));
    }
    let actions = file.players.iter().map(|p| p.actions).collect();
    let payoffs = file
        .players
        .iter()
        .map(|p| p.payoffs.iter().map(Number::to_f64).collect::<CliResult<Vec<f64>>>())
        .collect::<CliResult<_>>()?;
    Ok(LoadedGame::Multi(MultiActionGame::new(actions, edges, payoffs)?))
}

pub fn to_file(game: &LoadedGame) -> GameFile {
    let players = match game {
        LoadedGame::Binary(g) => (0..g.n())
            .map(|i| {
                let m = g.matrix(i);
                let payoffs = match m.exact_payoffs() {
                    Some(q) => q
                        .iter()
                        .map(|x| if x.is_integer() { integer_number(x) } else { Number::from_rational(x) })
                        .collect(),
                    None => m.payoffs().iter().copied().map(Number::Float).collect(),
                };
                PlayerEntry { id: i, actions: 2, neighbors: g.neighbors(i).to_vec(), payoffs }
            })
            .collect(),
        LoadedGame::Multi(g) => (0..g.n())
            .map(|i| PlayerEntry {
                id: i,
                actions: g.actions(i),
                neighbors: g.neighbors(i).to_vec(),
                payoffs: g.payoffs(i).iter().copied().map(Number::Float).collect(),
            })
            .collect(),
    };
    GameFile { version: FORMAT_VERSION, players }
}

fn integer_number(x: &BigRational) -> Number {
    match x.to_integer().to_i64() {
        Some(i) => Number::Int(i),
        None => Number::from_rational(x),
    }
}

pub fn serialize_game(game: &LoadedGame) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(game)).expect("game files always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use graphnash::game::{coordination_edge, generate_random_tree_game};
    use graphnash::transform::rock_paper_scissors_edge;

    #[test]
    fn fractions_and_decimals() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_rational("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn round_trips() {
        for g in [
            LoadedGame::Binary(coordination_edge()),
            LoadedGame::Binary(generate_random_tree_game(7, 3, 5).unwrap()),
            LoadedGame::Multi(rock_paper_scissors_edge()),
        ] {
            assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
        }
    }

    #[test]
    fn decimals_make_the_game_inexact() {
        let text = r#"{"version":1,"players":[
            {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0,"1/2"]},
            {"id":1,"actions":2,"neighbors":[0],"payoffs":[0.5,0,0,1]}]}"#;
        let LoadedGame::Binary(g) = parse_game(text).unwrap() else { panic!() };
        assert!(!g.is_rational());
        assert_eq!(g.matrix(0).payoffs(), &[1.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn errors_are_classified() {
        assert_eq!(parse_game("{").unwrap_err().exit_code(), 2);
        let short = r#"{"version":1,"players":[
            {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0]},
            {"id":1,"actions":2,"neighbors":[0],"payoffs":[1,0,0,1]}]}"#;
        let err = parse_game(short).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("player 0"), "{err}");
        let one_sided = r#"{"version":1,"players":[
            {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0,1]},
            {"id":1,"actions":2,"neighbors":[],"payoffs":[1,0]}]}"#;
        assert_eq!(parse_game(one_sided).unwrap_err().exit_code(), 3);
        assert_eq!(parse_game(r#"{"version":2,"players":[]}"#).unwrap_err().exit_code(), 2);
    }
}
