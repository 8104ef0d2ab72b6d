//! Table passes over a tree whose vertices have finite strategy lists.
//!
//! Used for multi-action grids and merged clusters, where strategies are
//! indices into a per-vertex list and acceptance is an arbitrary local test.

use crate::approx::Chooser;
use crate::error::{Result, SolverError};
use crate::tree::TreeOrientation;

/// Upper limit on (witness, child strategy) checks in one downstream pass.
pub const FINITE_WORK_LIMIT: u128 = 2_000_000_000;
/// Upper limit on table entries held at once.
pub const FINITE_TABLE_LIMIT: u128 = 200_000_000;

pub(crate) trait LocalProblem {
    /// Number of strategies of vertex `v`.
    fn size(&self, v: usize) -> usize;

    /// Acceptance test for `v` playing `own` against `parents` (in the
    /// orientation's parent order), as a function of the child's strategy
    /// (`None` at the root).
    fn check<'a>(&'a self, v: usize, own: usize, parents: &[usize]) -> Box<dyn Fn(Option<usize>) -> bool + 'a>;
}

/// Indexed `child * size(v) + own`; the root's table has one row.
pub(crate) struct FiniteTables {
    pub orientation: TreeOrientation,
    pub tables: Vec<Vec<bool>>,
}

impl FiniteTables {
    fn row<'a>(&'a self, problem: &dyn LocalProblem, v: usize, child_value: usize) -> &'a [bool] {
        let size = problem.size(v);
        &self.tables[v][child_value * size..(child_value + 1) * size]
    }

    fn parent_sets(&self, problem: &dyn LocalProblem, v: usize, own: usize) -> Vec<Vec<usize>> {
        self.orientation
            .parents(v)
            .iter()
            .map(|&p| self.row(problem, p, own).iter().enumerate().filter(|(_, &b)| b).map(|(u, _)| u).collect())
            .collect()
    }

    pub fn root_ones(&self) -> Vec<usize> {
        let root = self.orientation.root();
        self.tables[root].iter().enumerate().filter(|(_, &b)| b).map(|(z, _)| z).collect()
    }
}

/// Visits the product of `sets` lexicographically until `f` returns false.
fn for_each_tuple(sets: &[Vec<usize>], mut f: impl FnMut(&[usize]) -> bool) {
    if sets.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; sets.len()];
    let mut cur: Vec<usize> = sets.iter().map(|s| s[0]).collect();
    loop {
        if !f(&cur) {
            return;
        }
        let mut t = sets.len();
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < sets[t].len() {
                cur[t] = sets[t][idx[t]];
                break;
            }
            idx[t] = 0;
            cur[t] = sets[t][0];
        }
    }
}

pub(crate) fn finite_downstream(problem: &dyn LocalProblem, orientation: &TreeOrientation) -> Result<FiniteTables> {
    let n = orientation.len();
    let entries: u128 = (0..n)
        .map(|v| problem.size(v) as u128 * orientation.child(v).map_or(1, |c| problem.size(c)) as u128)
        .sum();
    if entries > FINITE_TABLE_LIMIT {
        return Err(SolverError::SizeGuard { size: entries, limit: FINITE_TABLE_LIMIT });
    }
    let mut res = FiniteTables { orientation: orientation.clone(), tables: vec![Vec::new(); n] };
    let mut work: u128 = 0;
    for &v in orientation.order() {
        let size = problem.size(v);
        let nw = orientation.child(v).map_or(1, |c| problem.size(c));
        let mut table = vec![false; nw * size];
        for own in 0..size {
            let sets = res.parent_sets(problem, v, own);
            let mut left = nw;
            for_each_tuple(&sets, |u| {
                let accepts = problem.check(v, own, u);
                work += nw as u128;
                for w in 0..nw {
                    let slot = &mut table[w * size + own];
                    if !*slot && accepts(orientation.child(v).map(|_| w)) {
                        *slot = true;
                        left -= 1;
                    }
                }
                left > 0 && work <= FINITE_WORK_LIMIT
            });
            if work > FINITE_WORK_LIMIT {
                return Err(SolverError::SizeGuard { size: work, limit: FINITE_WORK_LIMIT });
            }
        }
        res.tables[v] = table;
    }
    Ok(res)
}

/// Reads strategies out of the tables: the root first, then each vertex's
/// parents one at a time, offering the chooser only values that still
/// extend to a witness.
pub(crate) fn finite_upstream(
    problem: &dyn LocalProblem,
    res: &FiniteTables,
    chooser: &mut dyn Chooser,
) -> Result<Vec<usize>> {
    let o = &res.orientation;
    let ones = res.root_ones();
    if ones.is_empty() {
        return Err(SolverError::NoEquilibriumFound);
    }
    let mut value = vec![usize::MAX; o.len()];
    value[o.root()] = chooser.choose(&ones);
    for &v in o.order().iter().rev() {
        let own = value[v];
        let w = o.child(v).map(|c| value[c]);
        let mut sets = res.parent_sets(problem, v, own);
        for i in 0..sets.len() {
            let candidates: Vec<usize> = sets[i]
                .iter()
                .copied()
                .filter(|&x| {
                    let mut trial = sets.clone();
                    trial[i] = vec![x];
                    let mut found = false;
                    for_each_tuple(&trial, |u| {
                        found = problem.check(v, own, u)(w);
                        !found
                    });
                    found
                })
                .collect();
            if candidates.is_empty() {
                return Err(SolverError::Internal(format!("vertex {v} lost its witness")));
            }
            let x = chooser.choose(&candidates);
            sets[i] = vec![x];
            value[o.parents(v)[i]] = x;
        }
    }
    Ok(value)
}
