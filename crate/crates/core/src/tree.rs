//! Rooted orientation of a tree.
//!
//! Every non-root vertex has exactly one downstream neighbor (its child, on
//! the path to the root) and any number of upstream neighbors (parents).

use crate::error::{Result, SolverError};
use crate::game::{is_tree, GraphicalGame, PlayerId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeOrientation {
    root: PlayerId,
    child: Vec<Option<PlayerId>>,
    parents: Vec<Vec<PlayerId>>,
    order: Vec<PlayerId>,
}

/// Orients the tree underlying `game` toward `root`.
pub fn orient(game: &GraphicalGame, root: PlayerId) -> Result<TreeOrientation> {
    if root >= game.n() {
        return Err(SolverError::InvalidPlayer { player: root, n: game.n() });
    }
    if !is_tree(game) {
        return Err(SolverError::NotATree);
    }
    let adjacency: Vec<Vec<PlayerId>> = (0..game.n()).map(|i| game.neighbors(i).to_vec()).collect();
    TreeOrientation::from_adjacency(&adjacency, root)
}

impl TreeOrientation {
    /// Orients an arbitrary tree given by adjacency lists.
    pub fn from_adjacency(adjacency: &[Vec<usize>], root: usize) -> Result<Self> {
        let n = adjacency.len();
        if root >= n {
            return Err(SolverError::InvalidPlayer { player: root, n });
        }
        let mut child = vec![None; n];
        let mut parents = vec![Vec::new(); n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let sorted: Vec<Vec<usize>> = adjacency
            .iter()
            .map(|a| {
                let mut a = a.clone();
                a.sort_unstable();
                a
            })
            .collect();
        // Iterative post-order DFS; parents are visited in ascending order.
        let mut stack = vec![(root, 0usize)];
        visited[root] = true;
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            top.1 += 1;
            match sorted[v].get(next) {
                Some(&u) if Some(u) == child[v] => {}
                Some(&u) => {
                    if visited[u] {
                        return Err(SolverError::NotATree);
                    }
                    visited[u] = true;
                    child[u] = Some(v);
                    parents[v].push(u);
                    stack.push((u, 0));
                }
                None => {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        if order.len() != n {
            return Err(SolverError::Disconnected);
        }
        Ok(Self { root, child, parents, order })
    }

    pub fn root(&self) -> PlayerId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.child.len()
    }

    pub fn is_empty(&self) -> bool {
        self.child.is_empty()
    }

    /// Downstream neighbor of `v`; `None` for the root.
    pub fn child(&self, v: PlayerId) -> Option<PlayerId> {
        self.child[v]
    }

    /// Upstream neighbors of `v`, ascending.
    pub fn parents(&self, v: PlayerId) -> &[PlayerId] {
        &self.parents[v]
    }

    /// Post-order: every vertex appears after all vertices upstream of it.
    pub fn order(&self) -> &[PlayerId] {
        &self.order
    }

    pub fn is_leaf(&self, v: PlayerId) -> bool {
        self.parents[v].is_empty() && self.child[v].is_some()
    }

    /// `v` and every vertex upstream of it.
    pub fn upstream(&self, v: PlayerId) -> Vec<PlayerId> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.parents[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Counts of internal vertices and leaves in the subtree rooted at `v`
    /// (the upstream set). A lone vertex with no parents counts as a leaf.
    pub fn subtree_shape(&self, v: PlayerId) -> (usize, usize) {
        self.upstream(v).into_iter().fold((0, 0), |(a, b), u| {
            if self.parents[u].is_empty() { (a, b + 1) } else { (a + 1, b) }
        })
    }
}
