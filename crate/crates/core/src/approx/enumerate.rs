use super::downstream::DownstreamResult;
use crate::error::{Result, SolverError};
use crate::game::MixedProfile;

/// Largest number of profiles materialized before sorting.
pub const ENUMERATION_LIMIT: usize = 5_000_000;

/// Every grid profile consistent with the tables, as grid indices, in
/// lexicographic order by player, truncated to `limit`.
pub fn enumerate_grid_indices(res: &DownstreamResult, limit: usize) -> Result<Vec<Vec<usize>>> {
    let lists = res.witnesses.as_ref().ok_or(SolverError::MissingWitnesses)?;
    if limit == 0 {
        return Ok(Vec::new());
    }
    let o = &res.orientation;
    // Vertices from the root outward; each vertex's parents get values from
    // one of its witnesses.
    let walk: Vec<usize> = o.order().iter().rev().copied().collect();
    let mut out = Vec::new();
    let mut value = vec![0usize; o.len()];

    fn descend(
        res: &DownstreamResult,
        lists: &[super::downstream::WitnessLists],
        walk: &[usize],
        pos: usize,
        value: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        let Some(&v) = walk.get(pos) else {
            if out.len() >= ENUMERATION_LIMIT {
                return Err(SolverError::SizeGuard { size: out.len() as u128 + 1, limit: ENUMERATION_LIMIT as u128 });
            }
            out.push(value.clone());
            return Ok(());
        };
        let w = res.orientation.child(v).map_or(0, |c| value[c]);
        let parents = res.orientation.parents(v);
        for witness in lists[v].get(w, value[v]) {
            for (&p, &x) in parents.iter().zip(witness.iter()) {
                value[p] = x;
            }
            descend(res, lists, walk, pos + 1, value, out)?;
        }
        Ok(())
    }

    for z in res.root_table.ones() {
        value[o.root()] = z;
        descend(res, lists, &walk, 0, &mut value, &mut out)?;
    }
    out.sort_unstable();
    out.truncate(limit);
    Ok(out)
}

/// [`enumerate_grid_indices`] mapped to grid values.
pub fn enumerate_grid_equilibria(res: &DownstreamResult, limit: usize) -> Result<Vec<MixedProfile>> {
    enumerate_grid_indices(res, limit)?
        .into_iter()
        .map(|idx| MixedProfile::new(idx.into_iter().map(|j| res.grid.value(j)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{downstream_pass, TauGrid};
    use crate::game::{max_regret, path_coordination, single_player};
    use crate::tree::orient;

    #[test]
    fn path_on_half_grid() {
        let g = path_coordination(3);
        let o = orient(&g, 0).unwrap();
        let res = downstream_pass(&g, &o, TauGrid::new(2).unwrap(), 0.0, true).unwrap();
        let all = enumerate_grid_indices(&res, usize::MAX).unwrap();
        assert!(all.contains(&vec![0, 0, 0]));
        assert!(all.contains(&vec![2, 2, 2]));
        let half = MixedProfile::new(vec![0.5; 3]).unwrap();
        assert_eq!(all.contains(&vec![1, 1, 1]), max_regret(&g, &half).unwrap() <= 1e-12);
        for idx in &all {
            let p = MixedProfile::new(idx.iter().map(|&j| j as f64 / 2.0).collect()).unwrap();
            assert!(max_regret(&g, &p).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn limit_is_a_prefix() {
        let g = crate::game::generate_random_tree_game(4, 3, 3).unwrap();
        let o = orient(&g, 1).unwrap();
        let res = downstream_pass(&g, &o, TauGrid::new(4).unwrap(), 0.3, true).unwrap();
        let all = enumerate_grid_indices(&res, usize::MAX).unwrap();
        for limit in [0, 1, 2, 5] {
            let some = enumerate_grid_indices(&res, limit).unwrap();
            assert_eq!(some, all[..limit.min(all.len())]);
        }
    }

    #[test]
    fn indifferent_vertex_gives_every_point() {
        let g = single_player(0.5, 0.5);
        let o = orient(&g, 0).unwrap();
        let res = downstream_pass(&g, &o, TauGrid::new(6).unwrap(), 0.0, true).unwrap();
        assert_eq!(enumerate_grid_equilibria(&res, 100).unwrap().len(), 7);
    }

    #[test]
    fn needs_witnesses() {
        let g = single_player(0.5, 0.5);
        let o = orient(&g, 0).unwrap();
        let res = downstream_pass(&g, &o, TauGrid::new(6).unwrap(), 0.0, false).unwrap();
        assert_eq!(enumerate_grid_indices(&res, 1), Err(SolverError::MissingWitnesses));
    }
}
