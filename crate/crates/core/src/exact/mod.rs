//! Exact equilibria of tree games with rational payoffs.
//!
//! Tables are finite unions of axis-aligned rectangles over (child value,
//! own value) and every quantity stays rational, so the equilibrium read
//! back out has regret exactly zero.

mod delta;
mod interval;
mod solver;
mod table;

pub use delta::{zero_on_box, DeltaForm, Kind};
pub use interval::{IntervalSet, RationalInterval};
pub use solver::{exact_downstream, exact_tree_nash, exact_upstream, leaf_table, ExactTables};
pub use table::{merge_breakpoints, partition, Cell, StripTable};
