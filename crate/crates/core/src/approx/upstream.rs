use super::downstream::DownstreamResult;
use super::policy::Chooser;
use super::scan::{has_witness, Runs};
use crate::error::{Result, SolverError};
use crate::game::{GraphicalGame, MixedProfile, REGRET_TOL};

/// Reads one grid equilibrium out of the tables, returning grid indices.
///
/// The root value and then each vertex's parents are fixed one coordinate
/// at a time; the chooser only ever sees values that still extend to a
/// witness.
pub fn upstream_indices(res: &DownstreamResult, chooser: &mut dyn Chooser) -> Result<Vec<usize>> {
    let o = &res.orientation;
    let ones = res.root_table.ones();
    if ones.is_empty() {
        return Err(SolverError::NoEquilibriumFound);
    }
    let grid = res.grid;
    let eps = res.eps_local + REGRET_TOL;
    let mut value = vec![usize::MAX; o.len()];
    value[o.root()] = chooser.choose(&ones);
    for &v in o.order().iter().rev() {
        let form = &res.forms[v];
        let own = value[v];
        let w = o.child(v).map_or(0, |c| value[c]);
        let mut sets: Vec<Runs> = form.parents.iter().map(|&p| res.parent_runs(p, own)).collect();
        for i in 0..sets.len() {
            let candidates: Vec<usize> = sets[i]
                .iter()
                .flat_map(|&(a, b)| a..=b)
                .filter(|&x| {
                    let mut trial = sets.clone();
                    trial[i] = vec![(x, x)];
                    has_witness(form, &grid, &trial, grid.value(own), eps, w)
                })
                .collect();
            if candidates.is_empty() {
                return Err(SolverError::Internal(format!("vertex {v} lost its witness")));
            }
            let x = chooser.choose(&candidates);
            sets[i] = vec![(x, x)];
            value[form.parents[i]] = x;
        }
    }
    Ok(value)
}

/// [`upstream_indices`] mapped to grid values.
pub fn upstream_pass(game: &GraphicalGame, res: &DownstreamResult, chooser: &mut dyn Chooser) -> Result<MixedProfile> {
    if game.n() != res.orientation.len() {
        return Err(SolverError::Internal("tables do not match the game".into()));
    }
    let idx = upstream_indices(res, chooser)?;
    MixedProfile::new(idx.into_iter().map(|j| res.grid.value(j)).collect())
}
