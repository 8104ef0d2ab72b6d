//! Non-tree games solved by merging players into clusters whose quotient
//! graph is a tree.
//!
//! A cluster's strategy is one grid value per member. A cluster entry is
//! accepted only when every member best responds to its own neighbors,
//! wherever they sit (same cluster, parent clusters or the child cluster).

use std::collections::VecDeque;

use crate::approx::scan::br_ok;
use crate::approx::{approximate_tree_nash_with, compute_tau, ApproxConfig, GridChoice, Policy, TauGrid};
use crate::error::{Result, SolverError};
use crate::game::multilinear::contract_f64;
use crate::game::{is_connected, max_regret, GraphicalGame, MixedProfile, PlayerId, Violation, REGRET_TOL};
use crate::tree::TreeOrientation;

use super::finite::{finite_downstream, finite_upstream, LocalProblem};

/// A game together with a partition of its players whose quotient is a tree.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterGame {
    game: GraphicalGame,
    clusters: Vec<Vec<PlayerId>>,
    cluster_of: Vec<usize>,
    quotient: Vec<Vec<usize>>,
}

impl ClusterGame {
    pub fn game(&self) -> &GraphicalGame {
        &self.game
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> &[Vec<PlayerId>] {
        &self.clusters
    }

    pub fn cluster_of(&self, player: PlayerId) -> usize {
        self.cluster_of[player]
    }

    /// Adjacency lists of the quotient tree.
    pub fn quotient(&self) -> &[Vec<usize>] {
        &self.quotient
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.clusters.iter().all(|c| c.len() == 1)
    }
}

fn partition_error(message: String) -> SolverError {
    SolverError::Validation(vec![Violation { location: "clustering".into(), message }])
}

/// Builds the cluster game, rejecting clusterings that are not a partition
/// of the players or whose quotient is not a tree.
pub fn merge_vertices(game: &GraphicalGame, clustering: &[Vec<PlayerId>]) -> Result<ClusterGame> {
    let n = game.n();
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters = Vec::with_capacity(clustering.len());
    for (c, members) in clustering.iter().enumerate() {
        if members.is_empty() {
            return Err(partition_error(format!("cluster {c} is empty")));
        }
        let mut members = members.clone();
        members.sort_unstable();
        for &p in &members {
            if p >= n {
                return Err(SolverError::InvalidPlayer { player: p, n });
            }
            if cluster_of[p] != usize::MAX {
                return Err(partition_error(format!("player {p} is in more than one cluster")));
            }
            cluster_of[p] = c;
        }
        clusters.push(members);
    }
    if let Some(p) = cluster_of.iter().position(|&c| c == usize::MAX) {
        return Err(partition_error(format!("player {p} is in no cluster")));
    }
    let mut quotient = vec![Vec::new(); clusters.len()];
    for &(a, b) in game.edges() {
        let (ca, cb) = (cluster_of[a], cluster_of[b]);
        if ca != cb {
            quotient[ca].push(cb);
            quotient[cb].push(ca);
        }
    }
    for list in &mut quotient {
        list.sort_unstable();
        list.dedup();
    }
    let edges: usize = quotient.iter().map(Vec::len).sum::<usize>() / 2;
    if edges + 1 != clusters.len() {
        return Err(SolverError::QuotientNotTree(format!("{} clusters but {edges} quotient edges", clusters.len())));
    }
    TreeOrientation::from_adjacency(&quotient, 0)
        .map_err(|_| SolverError::QuotientNotTree("quotient is disconnected".into()))?;
    Ok(ClusterGame { game: game.clone(), clusters, cluster_of, quotient })
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
            self.parent[small] = big;
            self.size[big] += self.size[small];
        }
    }

    /// Size of the union of the clusters of `members`.
    fn merged_size(&mut self, members: &[usize]) -> usize {
        let mut roots: Vec<usize> = members.iter().map(|&x| self.find(x)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.iter().map(|&r| self.size[r]).sum()
    }
}

/// Clustering from one breadth-first spanning tree rooted at `root`.
///
/// Each non-tree edge `(a, b)` closes a cycle with the tree path between its
/// ends. Unless the edge already joins clusters linked by a tree edge, the
/// path minus one endpoint is merged (whichever leaves the smaller cluster),
/// which turns the edge into a duplicate of a tree edge.
fn condense_from(game: &GraphicalGame, root: PlayerId) -> Vec<Vec<PlayerId>> {
    let n = game.n();
    let mut up = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &u in game.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                up[u] = v;
                depth[u] = depth[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let tree_edge = |a: usize, b: usize| up[a] == b || up[b] == a;
    let mut uf = UnionFind::new(n);
    for &(a, b) in game.edges() {
        if tree_edge(a, b) || uf.find(a) == uf.find(b) {
            continue;
        }
        let (ca, cb) = (uf.find(a), uf.find(b));
        let parallel = (0..n).filter(|&x| up[x] != usize::MAX).any(|x| {
            let (cx, cy) = (uf.find(x), uf.find(up[x]));
            (cx, cy) == (ca, cb) || (cx, cy) == (cb, ca)
        });
        if parallel {
            continue;
        }
        // Tree path a = x0, ..., xL = b.
        let (mut x, mut y) = (a, b);
        let (mut left, mut right) = (vec![a], vec![b]);
        while x != y {
            if depth[x] >= depth[y] {
                x = up[x];
                left.push(x);
            } else {
                y = up[y];
                right.push(y);
            }
        }
        right.pop();
        let path: Vec<usize> = left.into_iter().chain(right.into_iter().rev()).collect();
        let without_a = &path[1..];
        let without_b = &path[..path.len() - 1];
        let pick = if uf.merged_size(without_b) < uf.merged_size(without_a) { without_b } else { without_a };
        for w in pick.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut clusters: Vec<Vec<PlayerId>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for p in 0..n {
        let r = uf.find(p);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(p);
    }
    clusters
}

/// Greedy clustering whose quotient is a tree; see [`condense_from`]. Every
/// player is tried as the spanning-tree root and the clustering with the
/// smallest largest cluster wins (then the most clusters, then the lowest
/// root). No optimality is claimed.
pub fn condense_to_tree(game: &GraphicalGame) -> Result<Vec<Vec<PlayerId>>> {
    if game.n() == 0 {
        return Ok(Vec::new());
    }
    if !is_connected(game) {
        return Err(SolverError::Disconnected);
    }
    let key = |c: &Vec<Vec<PlayerId>>| (c.iter().map(Vec::len).max().unwrap_or(0), usize::MAX - c.len());
    let best = (0..game.n())
        .map(|r| condense_from(game, r))
        .min_by_key(key)
        .expect("at least one player");
    Ok(best)
}

struct ClusterProblem<'g> {
    cg: &'g ClusterGame,
    orientation: &'g TreeOrientation,
    grid: TauGrid,
    /// `M_i(0, ·) - M_i(1, ·)` over player i's neighbors, ascending.
    diffs: Vec<Vec<f64>>,
    eps: f64,
}

impl ClusterProblem<'_> {
    fn digits(&self, c: usize, idx: usize) -> Vec<usize> {
        let base = self.grid.len();
        let k = self.cg.clusters[c].len();
        let mut out = vec![0; k];
        let mut x = idx;
        for slot in out.iter_mut().rev() {
            *slot = x % base;
            x /= base;
        }
        out
    }

    fn assign(&self, c: usize, idx: usize, values: &mut [f64]) {
        for (&p, d) in self.cg.clusters[c].iter().zip(self.digits(c, idx)) {
            values[p] = self.grid.value(d);
        }
    }
}

impl LocalProblem for ClusterProblem<'_> {
    fn size(&self, v: usize) -> usize {
        self.grid.len().pow(self.cg.clusters[v].len() as u32)
    }

    fn check<'a>(&'a self, v: usize, own: usize, parents: &[usize]) -> Box<dyn Fn(Option<usize>) -> bool + 'a> {
        let mut values = vec![f64::NAN; self.cg.game.n()];
        self.assign(v, own, &mut values);
        for (&p, &u) in self.orientation.parents(v).iter().zip(parents) {
            self.assign(p, u, &mut values);
        }
        let child = self.orientation.child(v);
        Box::new(move |w| {
            let mut values = values.clone();
            if let (Some(c), Some(w)) = (child, w) {
                self.assign(c, w, &mut values);
            }
            self.cg.clusters[v].iter().all(|&i| {
                let probs: Vec<f64> = self.cg.game.neighbors(i).iter().map(|&j| values[j]).collect();
                br_ok(values[i], contract_f64(&self.diffs[i], &probs), self.eps)
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseConfig {
    pub eps: f64,
    /// The cluster holding this player becomes the root.
    pub root: PlayerId,
    pub policy: Policy,
    pub grid: GridChoice,
}

impl SparseConfig {
    pub fn new(eps: f64) -> Self {
        Self { eps, root: 0, policy: Policy::First, grid: GridChoice::Adaptive }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCertificate {
    pub m: usize,
    pub tau: f64,
    pub eps_local: f64,
    pub k_max: usize,
    pub cluster_sizes: Vec<usize>,
    /// Measured on the original game.
    pub max_regret: f64,
}

/// Solves the cluster game and projects the result back to players.
pub fn solve_clusters(cg: &ClusterGame, config: &SparseConfig) -> Result<(MixedProfile, SparseCertificate)> {
    let game = &cg.game;
    if config.root >= game.n() {
        return Err(SolverError::InvalidPlayer { player: config.root, n: game.n() });
    }
    let k_max = game.max_closed_neighborhood();
    let guaranteed = compute_tau(k_max, config.eps)?;
    let orientation = TreeOrientation::from_adjacency(&cg.quotient, cg.cluster_of[config.root])?;
    let diffs: Vec<Vec<f64>> = (0..game.n())
        .map(|i| {
            let m = game.matrix(i);
            m.owner_slice(0).iter().zip(m.owner_slice(1)).map(|(a, b)| a - b).collect()
        })
        .collect();
    for m in config.grid.schedule(guaranteed.m()) {
        let grid = TauGrid::new(m)?;
        let states = (m as u128 + 1).checked_pow(cg.max_cluster_size() as u32).unwrap_or(u128::MAX);
        if states > super::finite::FINITE_TABLE_LIMIT {
            return Err(SolverError::SizeGuard { size: states, limit: super::finite::FINITE_TABLE_LIMIT });
        }
        let problem =
            ClusterProblem { cg, orientation: &orientation, grid, diffs: diffs.clone(), eps: config.eps + REGRET_TOL };
        let res = finite_downstream(&problem, &orientation)?;
        if res.root_ones().is_empty() {
            continue;
        }
        let idx = finite_upstream(&problem, &res, &mut *config.policy.chooser())?;
        let mut values = vec![f64::NAN; game.n()];
        for (c, &j) in idx.iter().enumerate() {
            problem.assign(c, j, &mut values);
        }
        let profile = MixedProfile::new(values)?;
        let certificate = SparseCertificate {
            m,
            tau: grid.tau(),
            eps_local: config.eps,
            k_max,
            cluster_sizes: cg.clusters.iter().map(Vec::len).collect(),
            max_regret: max_regret(game, &profile)?,
        };
        return Ok((profile, certificate));
    }
    Err(SolverError::NoEquilibriumFound)
}

/// Approximate equilibrium of a connected game via [`condense_to_tree`].
/// Trees go straight to the binary tree solver.
pub fn solve_sparse(game: &GraphicalGame, eps: f64, policy: Policy) -> Result<(MixedProfile, SparseCertificate)> {
    solve_sparse_with(game, &SparseConfig { policy, ..SparseConfig::new(eps) })
}

pub fn solve_sparse_with(game: &GraphicalGame, config: &SparseConfig) -> Result<(MixedProfile, SparseCertificate)> {
    let cg = merge_vertices(game, &condense_to_tree(game)?)?;
    if cg.is_trivial() {
        let approx = ApproxConfig { eps: config.eps, root: config.root, policy: config.policy, grid: config.grid };
        let (profile, cert) = approximate_tree_nash_with(game, &approx)?;
        let certificate = SparseCertificate {
            m: cert.m,
            tau: cert.tau,
            eps_local: cert.eps_local,
            k_max: cert.k_max,
            cluster_sizes: vec![1; game.n()],
            max_regret: cert.max_regret,
        };
        return Ok((profile, certificate));
    }
    solve_clusters(&cg, config)
}
