use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graphnash::exact::leaf_table;
use graphnash::game::{coordination_edge, generate_random_tree_game, is_exact_nash};
use num_rational::BigRational;
use serde_json::Value;
use tempfile::TempDir;

const COORDINATION: &str = r#"{"version":1,"players":[
  {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0,1]},
  {"id":1,"actions":2,"neighbors":[0],"payoffs":[1,0,0,1]}]}"#;

const PENNIES: &str = r#"{"version":1,"players":[
  {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,-1,-1,1]},
  {"id":1,"actions":2,"neighbors":[0],"payoffs":[-1,1,1,-1]}]}"#;

/// Coordination on the path 0 - 1 - 2: every player earns 1 per agreeing
/// neighbor.
const PATH3: &str = r#"{"version":1,"players":[
  {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0,1]},
  {"id":1,"actions":2,"neighbors":[0,2],"payoffs":["1","1/2","1/2",0,0,"1/2","1/2",1]},
  {"id":2,"actions":2,"neighbors":[1],"payoffs":[1,0,0,1]}]}"#;

struct Sandbox(TempDir);

impl Sandbox {
    fn new() -> Self {
        Sandbox(TempDir::new().unwrap())
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, contents).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphnash")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn run_json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn rational(v: &Value) -> BigRational {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn exact_solve_on_coordination() {
    let sb = Sandbox::new();
    let game = sb.file("g.json", COORDINATION);
    let doc = run_json(&["solve", s(&game), "--engine", "exact"]);
    let profile: Vec<BigRational> = doc["profile"].as_array().unwrap().iter().map(rational).collect();
    let allowed = ["0", "1", "1/2"].map(|x| x.parse::<BigRational>().unwrap());
    assert!(profile.iter().all(|p| allowed.contains(p)), "{profile:?}");
    assert!(is_exact_nash(&coordination_edge(), &profile).unwrap());
    assert_eq!(doc["regrets"], serde_json::json!(["0", "0"]));
    assert_eq!(doc["certificate"]["engine"], "exact");
}

#[test]
fn approx_solve_meets_eps() {
    let sb = Sandbox::new();
    let game = sb.file("g.json", COORDINATION);
    let doc = run_json(&["solve", s(&game), "--engine", "approx", "--eps", "0.05"]);
    assert!(floats(&doc["regrets"]).iter().all(|&r| r <= 0.05));
    let cert = &doc["certificate"];
    assert_eq!(cert["engine"], "approx");
    assert!(cert["tau"].as_f64().unwrap() > 0.0);
    assert_eq!(cert["eps_local"].as_f64().unwrap(), 0.05);
}

#[test]
fn solve_writes_out_file() {
    let sb = Sandbox::new();
    let game = sb.file("g.json", PATH3);
    let out = sb.path("sol.json");
    assert_eq!(run_ok(&["solve", s(&game), "--policy", "random", "--seed", "3", "--out", s(&out)]), "");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc["max_regret"].as_f64().unwrap() <= 0.1);
}

#[test]
fn solve_errors_have_stable_exit_codes() {
    let sb = Sandbox::new();
    let short = sb.file(
        "short.json",
        r#"{"version":1,"players":[
          {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0]},
          {"id":1,"actions":2,"neighbors":[0],"payoffs":[1,0,0,1]}]}"#,
    );
    let out = run(&["solve", s(&short)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("player 0"));

    assert_eq!(code(&["solve", s(&sb.file("junk.json", "{not json"))]), 2);
    assert_eq!(code(&["solve", s(&sb.path("missing.json"))]), 1);
    assert_eq!(code(&["solve", s(&sb.file("g.json", COORDINATION)), "--engine", "bogus"]), 2);

    let decimal = sb.file(
        "dec.json",
        r#"{"version":1,"players":[
          {"id":0,"actions":2,"neighbors":[1],"payoffs":[0.3,0,0,1]},
          {"id":1,"actions":2,"neighbors":[0],"payoffs":[1,0,0,1]}]}"#,
    );
    assert_eq!(code(&["solve", s(&decimal), "--engine", "exact"]), 4);
    let doc = run_json(&["solve", s(&decimal), "--engine", "exact", "--rationalize", "10"]);
    assert_eq!(doc["max_regret"], "0");
}

#[test]
fn enumerate_matches_oracle_example() {
    let sb = Sandbox::new();
    let game = sb.file("g.json", COORDINATION);
    let doc = run_json(&["enumerate", s(&game), "--eps", "0", "--grid-m", "2"]);
    assert_eq!(doc["profiles"], serde_json::json!([[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]]));
    assert_eq!(doc["truncated"], false);

    let doc = run_json(&["enumerate", s(&game), "--eps", "0", "--grid-m", "2", "--limit", "1"]);
    assert_eq!(doc["profiles"], serde_json::json!([[0.0, 0.0]]));
    assert_eq!(doc["truncated"], true);

    assert_eq!(code(&["enumerate", s(&game), "--eps", "0"]), 2);
}

#[test]
fn enumerate_indifferent_vertex() {
    let sb = Sandbox::new();
    let game = sb.file("one.json", r#"{"version":1,"players":[{"id":0,"actions":2,"neighbors":[],"payoffs":["1/4","1/4"]}]}"#);
    let doc = run_json(&["enumerate", s(&game), "--eps", "0", "--grid-m", "6"]);
    assert_eq!(doc["count"], 7);
}

#[test]
fn select_on_path() {
    let sb = Sandbox::new();
    let game = sb.file("p.json", PATH3);
    let social = run_json(&["select", s(&game), "--objective", "social", "--grid-m", "4"]);
    assert!((social["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let welfare = run_json(&["select", s(&game), "--objective", "welfare", "--grid-m", "4"]);
    assert!((welfare["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(code(&["select", s(&game), "--objective", "player:99"]), 2);
    assert_eq!(code(&["select", s(&game), "--objective", "fairness"]), 2);
}

fn grid_rows(text: &str) -> Vec<Vec<char>> {
    text.lines().filter(|l| !l.starts_with("# ")).map(|l| l.chars().collect()).collect()
}

#[test]
fn render_exact_leaf_matches_strip_table() {
    let sb = Sandbox::new();
    let game = sb.file("g.json", COORDINATION);
    let m = 10;
    let text = run_ok(&["render-table", s(&game), "--vertex", "1", "--engine", "exact", "--grid-m", "10"]);
    assert!(text.contains("vertex 1") && text.contains("exact") && text.contains("m = 10"));
    let rows = grid_rows(&text);
    assert_eq!(rows.len(), m + 1);
    let table = leaf_table(&coordination_edge(), 1, 0).unwrap();
    let q = |j: usize| BigRational::new(j.into(), m.into());
    for (r, row) in rows.iter().enumerate() {
        let w = m - r;
        for (v, &c) in row.iter().enumerate() {
            assert_eq!(c == '#', table.contains(&q(w), &q(v)), "cell w={w} v={v}");
        }
    }
}

#[test]
fn dominant_leaf_is_one_band() {
    let sb = Sandbox::new();
    // Player 1 always prefers action 0 (probability 1), whatever 0 does.
    let game = sb.file(
        "dom.json",
        r#"{"version":1,"players":[
          {"id":0,"actions":2,"neighbors":[1],"payoffs":[1,0,0,1]},
          {"id":1,"actions":2,"neighbors":[0],"payoffs":[1,1,0,0]}]}"#,
    );
    let text = run_ok(&["render-table", s(&game), "--vertex", "1", "--engine", "exact", "--grid-m", "4"]);
    for row in grid_rows(&text) {
        assert_eq!(row.iter().collect::<String>(), "....#");
    }
}

#[test]
fn overlay_covers_exact_cells() {
    let sb = Sandbox::new();
    let game = generate_random_tree_game(5, 3, 2).unwrap().rationalize(16);
    let file = sb.file("t.json", &game_json(&game));
    for v in 0..5 {
        let text = run_ok(&["render-table", s(&file), "--vertex", &v.to_string(), "--engine", "both", "--grid-m", "12"]);
        assert!(!text.contains('!'), "vertex {v}:\n{text}");
    }
    let pgm = run_ok(&["render-table", s(&file), "--vertex", "0", "--format", "pgm", "--grid-m", "3"]);
    assert!(pgm.starts_with("P2\n"));
    assert_eq!(code(&["render-table", s(&file), "--vertex", "9"]), 3);
}

/// Game file text for a two-action game with exact payoffs.
fn game_json(game: &graphnash::GraphicalGame) -> String {
    let players: Vec<Value> = (0..game.n())
        .map(|i| {
            let payoffs: Vec<String> =
                game.matrix(i).exact_payoffs().unwrap().iter().map(ToString::to_string).collect();
            serde_json::json!({"id": i, "actions": 2, "neighbors": game.neighbors(i), "payoffs": payoffs})
        })
        .collect();
    serde_json::json!({"version": 1, "players": players}).to_string()
}

#[test]
fn verify_reports() {
    let sb = Sandbox::new();
    let coord = sb.file("c.json", COORDINATION);
    let sol = sb.path("sol.json");
    run_ok(&["solve", s(&coord), "--engine", "exact", "--out", s(&sol)]);
    assert_eq!(run_json(&["verify", s(&coord), "--profile", s(&sol)])["pass"], true);

    let off = sb.file("off.json", "[1, 0]");
    let doc = run_json(&["verify", s(&coord), "--profile", s(&off), "--eps", "0.5"]);
    assert_eq!(doc["pass"], false);
    assert_eq!(doc["regrets"], serde_json::json!(["1", "1"]));

    let pennies = sb.file("mp.json", PENNIES);
    let half = sb.file("half.json", "[0.5, 0.5]");
    assert_eq!(run_json(&["verify", s(&pennies), "--profile", s(&half)])["pass"], true);

    let long = sb.file("long.json", "[0.5, 0.5, 0.5]");
    assert_eq!(code(&["verify", s(&pennies), "--profile", s(&long)]), 3);
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let sb = Sandbox::new();
    let a = run_ok(&["gen", "--n", "10", "--max-degree", "3", "--seed", "7"]);
    assert_eq!(a, run_ok(&["gen", "--n", "10", "--max-degree", "3", "--seed", "7"]));
    assert_ne!(a, run_ok(&["gen", "--n", "10", "--max-degree", "3", "--seed", "8"]));
    let file = sb.file("a.json", &a);
    let doc: Value = serde_json::from_str(&a).unwrap();
    let players = doc["players"].as_array().unwrap();
    assert_eq!(players.len(), 10);
    assert!(players.iter().all(|p| p["neighbors"].as_array().unwrap().len() <= 3));
    let edges: usize = players.iter().map(|p| p["neighbors"].as_array().unwrap().len()).sum::<usize>() / 2;
    assert_eq!(edges, 9);
    assert!(run_json(&["solve", s(&file)])["max_regret"].as_f64().unwrap() <= 0.1);

    let single = run_ok(&["gen", "--n", "1", "--max-degree", "0"]);
    assert!(single.contains("\"neighbors\": []"));
    assert_eq!(code(&["gen", "--n", "5", "--max-degree", "1"]), 2);
    assert_eq!(code(&["gen", "--n", "5", "--graph", "cycle", "--max-degree", "1"]), 2);
}

#[test]
fn gen_other_shapes() {
    let sb = Sandbox::new();
    let cycle = sb.file("c.json", &run_ok(&["gen", "--n", "4", "--graph", "cycle", "--denominator", "8"]));
    assert_eq!(code(&["solve", s(&cycle)]), 4);
    let doc = run_json(&["solve", s(&cycle), "--engine", "sparse"]);
    assert!(doc["max_regret"].as_f64().unwrap() <= 0.1);
    assert!(doc["certificate"]["cluster_sizes"].is_array());

    let multi = sb.file("m.json", &run_ok(&["gen", "--n", "3", "--actions", "3", "--max-degree", "2", "--seed", "4"]));
    let doc = run_json(&["solve", s(&multi), "--eps", "0.2"]);
    assert!(doc["max_regret"].as_f64().unwrap() <= 0.2);
    assert_eq!(code(&["solve", s(&multi), "--engine", "exact"]), 4);
    let sol = sb.path("msol.json");
    run_ok(&["solve", s(&multi), "--eps", "0.2", "--out", s(&sol)]);
    assert_eq!(run_json(&["verify", s(&multi), "--profile", s(&sol), "--eps", "0.2"])["pass"], true);
}
