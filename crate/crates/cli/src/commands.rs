use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use graphnash::approx::{
    approximate_tree_nash_with, compute_tau, downstream_pass, enumerate_grid_indices, rounding_regret_bound,
    ApproxConfig, GridChoice, Policy, TauGrid,
};
use graphnash::exact::{exact_downstream, exact_tree_nash};
use graphnash::game::{
    cycle_edges, generate_random_rational_tree_game, generate_random_tree_game, random_connected_edges,
    regret_exact, regrets, GameRng,
};
use graphnash::select::{select_equilibrium_with, Objective, SelectConfig};
use graphnash::transform::{approximate_tree_nash_multi_with, solve_sparse_with, MultiActionGame, MultiConfig, SparseConfig};
use graphnash::tree::orient;
use graphnash::{GraphicalGame, MixedProfile, PlayerId, SolverError};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::gamefile::{parse_game, serialize_game, LoadedGame, Number};
use crate::output::{emit, emit_json};
use crate::render::{Mark, Raster};

pub fn load_game(path: &Path) -> CliResult<LoadedGame> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_game(&text)
}

fn grid_choice(grid_m: Option<usize>) -> GridChoice {
    match grid_m {
        Some(m) => {
            log::warn!("--grid-m {m} overrides the computed resolution; the eps guarantee only holds for the computed one");
            GridChoice::Fixed(m)
        }
        None => GridChoice::Guaranteed,
    }
}

fn policy(name: PolicyName, seed: u64) -> Policy {
    match name {
        PolicyName::First => Policy::First,
        PolicyName::Random => Policy::Random(seed),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyName {
    First,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Approx,
    Exact,
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RenderEngine {
    Approx,
    Exact,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RenderFormat {
    Pgm,
    Txt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphKind {
    Tree,
    Cycle,
    Random,
}

fn fraction(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

fn grid_json(grid: TauGrid) -> Value {
    json!({ "m": grid.m(), "tau": grid.tau() })
}

pub struct SolveArgs {
    pub file: PathBuf,
    pub eps: f64,
    pub engine: Engine,
    pub root: PlayerId,
    pub policy: PolicyName,
    pub seed: u64,
    pub grid_m: Option<usize>,
    pub rationalize: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let loaded = load_game(&args.file)?;
    let policy = policy(args.policy, args.seed);
    let started = Instant::now();
    let doc = match (&loaded, args.engine) {
        (LoadedGame::Multi(game), Engine::Approx) => solve_multi(game, args, policy)?,
        (LoadedGame::Multi(_), _) => {
            return Err(CliError::Engine("games with more than two actions only support --engine approx".into()))
        }
        (LoadedGame::Binary(game), Engine::Approx) => {
            let config = ApproxConfig { eps: args.eps, root: args.root, policy, grid: grid_choice(args.grid_m) };
            let (profile, cert) = approximate_tree_nash_with(game, &config)?;
            let r = regrets(game, &profile)?;
            json!({
                "profile": profile.as_slice(),
                "regrets": r,
                "max_regret": cert.max_regret,
                "certificate": {
                    "engine": "approx", "eps": args.eps, "m": cert.m, "tau": cert.tau,
                    "eps_local": cert.eps_local, "k_max": cert.k_max,
                },
            })
        }
        (LoadedGame::Binary(game), Engine::Sparse) => {
            let grid = match args.grid_m {
                Some(_) => grid_choice(args.grid_m),
                None => GridChoice::Adaptive,
            };
            let config = SparseConfig { eps: args.eps, root: args.root, policy, grid };
            let (profile, cert) = solve_sparse_with(game, &config)?;
            json!({
                "profile": profile.as_slice(),
                "regrets": regrets(game, &profile)?,
                "max_regret": cert.max_regret,
                "certificate": {
                    "engine": "sparse", "eps": args.eps, "m": cert.m, "tau": cert.tau,
                    "eps_local": cert.eps_local, "k_max": cert.k_max, "cluster_sizes": cert.cluster_sizes,
                },
            })
        }
        (LoadedGame::Binary(game), Engine::Exact) => {
            let rationalized;
            let game = match args.rationalize {
                Some(den) if !game.is_rational() => {
                    rationalized = game.rationalize(den);
                    &rationalized
                }
                _ => game,
            };
            let profile = exact_tree_nash(game, args.root, policy)?;
            let r = (0..game.n()).map(|i| regret_exact(game, i, &profile)).collect::<Result<Vec<_>, _>>()?;
            let worst = r.iter().max().cloned().unwrap_or_else(BigRational::zero);
            json!({
                "profile": profile.iter().map(fraction).collect::<Vec<_>>(),
                "regrets": r.iter().map(fraction).collect::<Vec<_>>(),
                "max_regret": fraction(&worst),
                "certificate": { "engine": "exact", "eps": "0", "eps_local": "0", "k_max": game.max_closed_neighborhood() },
            })
        }
    };
    log::info!("solve ({:?}) took {:.3}s", args.engine, started.elapsed().as_secs_f64());
    emit_json(args.out.as_deref(), &doc)
}

fn solve_multi(game: &MultiActionGame, args: &SolveArgs, policy: Policy) -> CliResult<Value> {
    let grid = match args.grid_m {
        Some(_) => grid_choice(args.grid_m),
        None => GridChoice::Adaptive,
    };
    let config = MultiConfig { eps: args.eps, root: args.root, policy, grid };
    let (profile, cert) = approximate_tree_nash_multi_with(game, &config)?;
    let r = (0..game.n()).map(|i| game.regret(i, &profile)).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "profile": profile,
        "regrets": r,
        "max_regret": cert.max_regret,
        "certificate": {
            "engine": "approx", "eps": args.eps, "m": cert.m, "tau": cert.tau,
            "eps_local": cert.eps_local, "k_max": cert.k_max,
        },
    }))
}

pub struct EnumerateArgs {
    pub file: PathBuf,
    pub eps: f64,
    pub limit: usize,
    pub grid_m: Option<usize>,
    pub root: PlayerId,
    pub out: Option<PathBuf>,
}

pub fn enumerate(args: &EnumerateArgs) -> CliResult<()> {
    let loaded = load_game(&args.file)?;
    let game = loaded.binary("enumerate")?;
    let grid = match args.grid_m {
        Some(m) => {
            grid_choice(Some(m));
            TauGrid::new(m)?
        }
        None if args.eps > 0.0 => compute_tau(game.max_closed_neighborhood(), args.eps)?,
        None => return Err(CliError::Parse("--eps 0 needs an explicit --grid-m".into())),
    };
    let orientation = orient(game, args.root)?;
    let res = downstream_pass(game, &orientation, grid, args.eps, true)?;
    // One extra profile tells whether the limit cut the list short.
    let mut found = enumerate_grid_indices(&res, args.limit.saturating_add(1))?;
    let truncated = found.len() > args.limit;
    found.truncate(args.limit);
    let profiles: Vec<Vec<f64>> = found.iter().map(|idx| idx.iter().map(|&j| grid.value(j)).collect()).collect();
    let doc = json!({
        "grid": grid_json(grid),
        "eps": args.eps,
        "count": profiles.len(),
        "truncated": truncated,
        "profiles": profiles,
    });
    emit_json(args.out.as_deref(), &doc)
}

pub struct SelectArgs {
    pub file: PathBuf,
    pub objective: String,
    pub eps: f64,
    pub root: PlayerId,
    pub grid_m: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn select(args: &SelectArgs) -> CliResult<()> {
    let objective: Objective = args.objective.parse().map_err(CliError::Parse)?;
    let loaded = load_game(&args.file)?;
    let game = loaded.binary("select")?;
    let grid = match args.grid_m {
        Some(m) => grid_choice(Some(m)),
        None => GridChoice::Adaptive,
    };
    let config = SelectConfig { eps: args.eps, objective, root: args.root, grid };
    let selection = select_equilibrium_with(game, &config).map_err(|e| match e {
        SolverError::InvalidPlayer { .. } => CliError::Parse(format!("objective {objective}: {e}")),
        other => other.into(),
    })?;
    let doc = json!({
        "objective": objective.to_string(),
        "value": selection.value,
        "table_value": selection.table_value,
        "profile": selection.profile.as_slice(),
        "regrets": regrets(game, &selection.profile)?,
        "grid": grid_json(selection.grid),
    });
    emit_json(args.out.as_deref(), &doc)
}

pub struct RenderArgs {
    pub file: PathBuf,
    pub vertex: PlayerId,
    pub engine: RenderEngine,
    pub root: PlayerId,
    pub eps_local: Option<f64>,
    pub grid_m: usize,
    pub format: RenderFormat,
    pub out: Option<PathBuf>,
}

/// Table occupancy of `vertex` on the `m` grid. Without `eps_local` the
/// approximate table uses the rounding bound for the game's largest
/// neighborhood, the slack under which it covers the exact one.
pub fn render_raster(
    game: &GraphicalGame,
    vertex: PlayerId,
    root: PlayerId,
    engine: RenderEngine,
    m: usize,
    eps_local: Option<f64>,
) -> CliResult<Raster> {
    if vertex >= game.n() {
        return Err(CliError::Invalid(format!("unknown vertex {vertex} (game has {} players)", game.n())));
    }
    let grid = TauGrid::new(m)?;
    let orientation = orient(game, root)?;
    let child = orientation.child(vertex);

    let approx = match engine {
        RenderEngine::Exact => None,
        _ => {
            let slack = eps_local.unwrap_or_else(|| rounding_regret_bound(game.max_closed_neighborhood(), grid.tau()));
            Some(downstream_pass(game, &orientation, grid, slack, false)?)
        }
    };
    let exact = match engine {
        RenderEngine::Approx => None,
        _ => Some(exact_downstream(game, &orientation)?),
    };

    let q = |j: usize| BigRational::new(j.into(), m.into());
    let approx_bit = |w: Option<usize>, v: usize| {
        approx.as_ref().map(|res| match w {
            Some(w) => res.table(vertex).expect("non-root vertex").get(w, v),
            None => res.root_table.bits[v],
        })
    };
    let exact_bit = |w: Option<usize>, v: usize| {
        exact.as_ref().map(|tables| match w {
            Some(w) => tables.table(vertex).expect("non-root vertex").contains(&q(w), &q(v)),
            None => tables.root_set.contains(&q(v)),
        })
    };

    let title = match child {
        Some(c) => format!("vertex {vertex} (child {c}), engine {}", engine_name(engine)),
        None => format!("vertex {vertex} (root), engine {}", engine_name(engine)),
    };
    Ok(Raster::sample(title, m, child.is_some(), |w, v| match (exact_bit(w, v), approx_bit(w, v)) {
        (Some(true), Some(true)) | (Some(true), None) | (None, Some(true)) => Mark::Filled,
        (Some(false), Some(true)) => Mark::Approx,
        (Some(true), Some(false)) => Mark::Missing,
        _ => Mark::Empty,
    }))
}

fn engine_name(engine: RenderEngine) -> &'static str {
    match engine {
        RenderEngine::Approx => "approx",
        RenderEngine::Exact => "exact",
        RenderEngine::Both => "both",
    }
}

pub fn render_table(args: &RenderArgs) -> CliResult<()> {
    let loaded = load_game(&args.file)?;
    let game = loaded.binary("render-table")?;
    let raster = render_raster(game, args.vertex, args.root, args.engine, args.grid_m, args.eps_local)?;
    let missing = raster.count(Mark::Missing);
    if missing > 0 {
        log::warn!("{missing} exact cells are not covered by the approximate table");
    }
    let text = match args.format {
        RenderFormat::Pgm => raster.to_pgm(),
        RenderFormat::Txt => raster.to_text(),
    };
    emit(args.out.as_deref(), &text)
}

pub struct VerifyArgs {
    pub file: PathBuf,
    pub profile: PathBuf,
    pub eps: f64,
    pub out: Option<PathBuf>,
}

/// A profile document: a bare list, or an object with a `profile` field
/// such as `solve` writes.
fn read_profile(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("profile file: {e}")))?;
    match doc {
        Value::Object(mut map) => {
            map.remove("profile").ok_or_else(|| CliError::Parse("profile file has no \"profile\" field".into()))
        }
        other => Ok(other),
    }
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    if !(args.eps >= 0.0) {
        return Err(CliError::Parse(format!("--eps must be non-negative, got {}", args.eps)));
    }
    let loaded = load_game(&args.file)?;
    let raw = read_profile(&args.profile)?;
    let doc = match &loaded {
        LoadedGame::Binary(game) => verify_binary(game, raw, args.eps)?,
        LoadedGame::Multi(game) => verify_multi(game, raw, args.eps)?,
    };
    emit_json(args.out.as_deref(), &doc)
}

fn verify_binary(game: &GraphicalGame, raw: Value, eps: f64) -> CliResult<Value> {
    let entries: Vec<Number> =
        serde_json::from_value(raw).map_err(|e| CliError::Parse(format!("profile must be a list of numbers: {e}")))?;
    if entries.len() != game.n() {
        return Err(CliError::Invalid(format!("profile has {} entries but the game has {} players", entries.len(), game.n())));
    }
    let exact: Option<Vec<BigRational>> = entries.iter().map(Number::exact).collect::<CliResult<_>>()?;
    match exact {
        Some(p) if game.is_rational() => {
            let (zero, one) = (BigRational::zero(), BigRational::from_integer(1.into()));
            if let Some(bad) = p.iter().find(|x| **x < zero || **x > one) {
                return Err(CliError::Invalid(format!("probability {bad} is outside [0, 1]")));
            }
            let r = (0..game.n()).map(|i| regret_exact(game, i, &p)).collect::<Result<Vec<_>, _>>()?;
            let worst = r.iter().max().cloned().unwrap_or_else(BigRational::zero);
            let pass = worst.to_f64().is_some_and(|w| w <= eps);
            Ok(json!({
                "regrets": r.iter().map(fraction).collect::<Vec<_>>(),
                "max_regret": fraction(&worst),
                "eps": eps,
                "exact": true,
                "pass": pass,
            }))
        }
        _ => {
            let values = entries.iter().map(Number::to_f64).collect::<CliResult<Vec<_>>>()?;
            let profile = MixedProfile::new(values)?;
            let r = regrets(game, &profile)?;
            let worst = r.iter().copied().fold(0.0, f64::max);
            Ok(json!({
                "regrets": r,
                "max_regret": worst,
                "eps": eps,
                "exact": false,
                "pass": worst <= eps + graphnash::game::REGRET_TOL,
            }))
        }
    }
}

fn verify_multi(game: &MultiActionGame, raw: Value, eps: f64) -> CliResult<Value> {
    let profile: Vec<Vec<f64>> = serde_json::from_value(raw)
        .map_err(|e| CliError::Parse(format!("profile must be a list of probability vectors: {e}")))?;
    if profile.len() != game.n() {
        return Err(CliError::Invalid(format!("profile has {} entries but the game has {} players", profile.len(), game.n())));
    }
    let r = (0..game.n()).map(|i| game.regret(i, &profile)).collect::<Result<Vec<_>, _>>()?;
    let worst = r.iter().copied().fold(0.0, f64::max);
    Ok(json!({
        "regrets": r,
        "max_regret": worst,
        "eps": eps,
        "exact": false,
        "pass": worst <= eps + graphnash::game::REGRET_TOL,
    }))
}

pub struct GenArgs {
    pub n: usize,
    pub max_degree: usize,
    pub seed: u64,
    pub actions: usize,
    pub graph: GraphKind,
    pub extra: usize,
    pub denominator: Option<u32>,
    pub out: Option<PathBuf>,
}

pub fn generate(args: &GenArgs) -> CliResult<LoadedGame> {
    let unsat = |e: SolverError| match e {
        SolverError::Unsatisfiable(msg) => CliError::Parse(msg),
        other => other.into(),
    };
    if args.n == 0 {
        return Err(CliError::Parse("--n must be at least 1".into()));
    }
    if args.actions < 2 {
        return Err(CliError::Parse("--actions must be at least 2".into()));
    }
    if args.denominator == Some(0) {
        return Err(CliError::Parse("--denominator must be positive".into()));
    }
    if args.actions > 2 && args.denominator.is_some() {
        return Err(CliError::Parse("--denominator only applies to two-action games".into()));
    }
    if args.actions == 2 && args.graph == GraphKind::Tree {
        let game = match args.denominator {
            Some(d) => generate_random_rational_tree_game(args.n, args.max_degree, d, args.seed),
            None => generate_random_tree_game(args.n, args.max_degree, args.seed),
        }
        .map_err(unsat)?;
        return Ok(LoadedGame::Binary(game));
    }

    let mut rng = GameRng::seed(args.seed);
    let edges = match args.graph {
        GraphKind::Tree => graphnash::game::random_tree_edges(args.n, args.max_degree, &mut rng).map_err(unsat)?,
        GraphKind::Cycle => {
            let needed = if args.n >= 3 { 2 } else { usize::from(args.n == 2) };
            if args.max_degree < needed {
                return Err(CliError::Parse(format!("a cycle on {} vertices needs --max-degree {needed}", args.n)));
            }
            cycle_edges(args.n)
        }
        GraphKind::Random => random_connected_edges(args.n, args.max_degree, args.extra, &mut rng).map_err(unsat)?,
    };
    let mut degree = vec![0usize; args.n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    if args.actions > 2 {
        let payoffs = degree.iter().map(|&d| rng.payoffs(args.actions.pow(d as u32 + 1))).collect();
        return Ok(LoadedGame::Multi(MultiActionGame::new(vec![args.actions; args.n], edges, payoffs)?));
    }
    let game = match args.denominator {
        Some(den) => {
            let payoffs = degree.iter().map(|&d| rng.rational_payoffs(1 << (d + 1), den)).collect();
            GraphicalGame::with_rational_payoffs(args.n, edges, payoffs)?
        }
        None => GraphicalGame::with_payoffs(args.n, edges, degree.iter().map(|&d| rng.payoffs(1 << (d + 1))).collect())?,
    };
    Ok(LoadedGame::Binary(game))
}

pub fn gen(args: &GenArgs) -> CliResult<()> {
    let game = generate(args)?;
    emit(args.out.as_deref(), &serialize_game(&game))
}
