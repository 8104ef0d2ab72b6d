//! Extensions of the grid solver: many actions per player, and non-tree
//! graphs made into trees by merging players.

mod cluster;
mod finite;
mod multi;

pub use cluster::{
    condense_to_tree, merge_vertices, solve_clusters, solve_sparse, solve_sparse_with, ClusterGame,
    SparseCertificate, SparseConfig,
};
pub use finite::{FINITE_TABLE_LIMIT, FINITE_WORK_LIMIT};
pub use multi::{
    approximate_tree_nash_multi, approximate_tree_nash_multi_with, rock_paper_scissors_edge, simplex_counts,
    simplex_grid, MultiActionGame, MultiCertificate, MultiConfig, MultiProfile,
};
