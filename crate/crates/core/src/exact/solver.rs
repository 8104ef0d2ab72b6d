use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::delta::{zero_on_box, DeltaForm, Kind};
use super::interval::{IntervalSet, RationalInterval};
use super::table::{merge_breakpoints, partition, Cell, StripTable};
use crate::approx::{Chooser, Policy};
use crate::error::{Result, SolverError};
use crate::game::{GraphicalGame, PlayerId};
use crate::tree::{orient, TreeOrientation};

/// Number of equal steps a randomly chosen root value can take inside its
/// interval.
const ROOT_STEPS: usize = 64;

#[derive(Clone, Debug)]
pub struct ExactTables {
    pub orientation: TreeOrientation,
    /// Indexed by vertex; `None` at the root.
    pub tables: Vec<Option<StripTable>>,
    /// Root values that extend to an equilibrium.
    pub root_set: IntervalSet,
    forms: Vec<DeltaForm>,
}

impl ExactTables {
    pub fn table(&self, v: PlayerId) -> Option<&StripTable> {
        self.tables.get(v).and_then(Option::as_ref)
    }

    pub fn form(&self, v: PlayerId) -> &DeltaForm {
        &self.forms[v]
    }
}

/// Visits every box with one interval per set, lexicographically.
fn for_each_box(sets: &[&IntervalSet], mut f: impl FnMut(Vec<RationalInterval>) -> Result<()>) -> Result<()> {
    if sets.iter().any(|s| s.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; sets.len()];
    loop {
        f(sets.iter().zip(&idx).map(|(s, &i)| s.intervals()[i].clone()).collect())?;
        let mut t = sets.len();
        loop {
            if t == 0 {
                return Ok(());
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < sets[t].len() {
                break;
            }
            idx[t] = 0;
        }
    }
}

fn cell_kind(cell: &Cell) -> Kind {
    match cell {
        Cell::Point(p) => Kind::of(p),
        Cell::Gap(..) => Kind::Interior,
    }
}

/// Rectangles `child range × own range` of one vertex, given its parents'
/// tables.
fn vertex_rectangles(form: &DeltaForm, parents: &[&StripTable]) -> Result<Vec<(RationalInterval, RationalInterval)>> {
    let cuts = merge_breakpoints(parents.iter().flat_map(|t| t.breakpoints()));
    let mut rects = Vec::new();
    for cell in partition(&cuts) {
        let probe = cell.probe();
        let sets: Vec<&IntervalSet> = parents.iter().map(|t| t.set_at(&probe)).collect();
        let span = cell.span();
        let kind = cell_kind(&cell);
        for_each_box(&sets, |bx| {
            for w in form.solve_w(&bx, kind)?.intervals() {
                rects.push((w.clone(), span.clone()));
            }
            Ok(())
        })?;
    }
    Ok(rects)
}

/// Exact best-response table of a vertex with no parents.
pub fn leaf_table(game: &GraphicalGame, leaf: PlayerId, child: PlayerId) -> Result<StripTable> {
    let form = DeltaForm::new(game, leaf, &[], Some(child))?;
    Ok(StripTable::from_rectangles(leaf, child, &vertex_rectangles(&form, &[])?))
}

/// Exact tables for every vertex toward the root of `orientation`.
pub fn exact_downstream(game: &GraphicalGame, orientation: &TreeOrientation) -> Result<ExactTables> {
    if !game.is_rational() {
        return Err(SolverError::NonRationalPayoffs);
    }
    let n = game.n();
    let forms: Vec<DeltaForm> = (0..n)
        .map(|v| DeltaForm::new(game, v, orientation.parents(v), orientation.child(v)))
        .collect::<Result<_>>()?;
    let mut tables: Vec<Option<StripTable>> = vec![None; n];
    let mut root_set = IntervalSet::empty();
    for &v in orientation.order() {
        let parents: Vec<&StripTable> =
            orientation.parents(v).iter().map(|&p| tables[p].as_ref().expect("parents come first")).collect();
        let rects = vertex_rectangles(&forms[v], &parents)?;
        match orientation.child(v) {
            Some(child) => tables[v] = Some(StripTable::from_rectangles(v, child, &rects)),
            None => root_set = IntervalSet::from_intervals(rects.into_iter().map(|(_, own)| own).collect()),
        }
    }
    if root_set.is_empty() {
        return Err(SolverError::Internal("exact root set is empty".into()));
    }
    Ok(ExactTables { orientation: orientation.clone(), tables, root_set, forms })
}

/// Parent values for vertex `v` playing `own` against a child playing `w`.
fn witness(
    res: &ExactTables,
    v: PlayerId,
    own: &BigRational,
    w: &BigRational,
    chooser: &mut dyn Chooser,
) -> Result<Vec<BigRational>> {
    let form = &res.forms[v];
    let parents = res.orientation.parents(v);
    let sets: Vec<&IntervalSet> =
        parents.iter().map(|&p| res.tables[p].as_ref().expect("non-root").set_at(own)).collect();
    let kind = Kind::of(own);
    let mut feasible = Vec::new();
    for_each_box(&sets, |bx| {
        if form.solve_w(&bx, kind)?.contains(w) {
            feasible.push(bx);
        }
        Ok(())
    })?;
    if feasible.is_empty() {
        return Err(SolverError::Internal(format!("vertex {v} has no witness box")));
    }
    let pick = chooser.choose(&(0..feasible.len()).collect::<Vec<_>>());
    let bx = &feasible[pick];
    let found = match kind {
        Kind::Interior => zero_on_box(form, bx, w),
        _ => form.corners(bx).into_iter().find(|(_, a, b)| kind.accepts(&(a + b * w))).map(|(u, _, _)| u),
    };
    found.ok_or_else(|| SolverError::Internal(format!("vertex {v} lost its witness")))
}

/// Reads an exact equilibrium out of the tables.
pub fn exact_upstream(res: &ExactTables, chooser: &mut dyn Chooser) -> Result<Vec<BigRational>> {
    let o = &res.orientation;
    let intervals = res.root_set.intervals();
    if intervals.is_empty() {
        return Err(SolverError::NoEquilibriumFound);
    }
    let iv = &intervals[chooser.choose(&(0..intervals.len()).collect::<Vec<_>>())];
    let step = if iv.is_point() { 0 } else { chooser.choose(&(0..=ROOT_STEPS).collect::<Vec<_>>()) };
    let z = &iv.lo + (&iv.hi - &iv.lo) * BigRational::new(step.into(), ROOT_STEPS.into());
    let mut value: Vec<Option<BigRational>> = vec![None; o.len()];
    value[o.root()] = Some(z);
    for &v in o.order().iter().rev() {
        let own = value[v].clone().expect("assigned from the child");
        let w = o.child(v).map_or_else(BigRational::zero, |c| value[c].clone().expect("assigned"));
        let u = witness(res, v, &own, &w, chooser)?;
        for (&p, x) in o.parents(v).iter().zip(u) {
            debug_assert!(!x.is_negative());
            value[p] = Some(x);
        }
    }
    Ok(value.into_iter().map(|x| x.expect("every vertex reached")).collect())
}

/// Exact equilibrium of a tree game with rational payoffs.
pub fn exact_tree_nash(game: &GraphicalGame, root: PlayerId, policy: Policy) -> Result<Vec<BigRational>> {
    let orientation = orient(game, root)?;
    let tables = exact_downstream(game, &orientation)?;
    exact_upstream(&tables, &mut *policy.chooser())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::interval::q;
    use crate::game::{
        coordination_edge, generate_random_rational_tree_game, is_exact_nash, matching_pennies_edge,
        path_coordination, GraphicalGame,
    };
    use num_traits::One;

    #[test]
    fn coordination_leaf() {
        let t = leaf_table(&coordination_edge(), 0, 1).unwrap();
        let strips = t.closed_strips();
        assert_eq!(strips.len(), 3);
        assert_eq!(strips[0].0, RationalInterval::new(q(0, 1), q(1, 2)));
        assert_eq!(strips[0].1.intervals(), &[RationalInterval::point(q(0, 1))]);
        assert_eq!(strips[1].0, RationalInterval::point(q(1, 2)));
        assert_eq!(strips[1].1, IntervalSet::unit());
        assert_eq!(strips[2].1.intervals(), &[RationalInterval::point(q(1, 1))]);
    }

    fn leaf_with_delta(d0: i64, d1: i64) -> GraphicalGame {
        // Player 0's payoff difference is d0 when the child plays 0 and d1 when it plays 1.
        let r = |x: i64| q(x, 1);
        GraphicalGame::with_rational_payoffs(
            2,
            [(0, 1)],
            vec![vec![r(d0), r(d1), r(0), r(0)], vec![r(0); 4]],
        )
        .unwrap()
    }

    #[test]
    fn dominant_and_indifferent_leaves() {
        let t = leaf_table(&leaf_with_delta(1, 1), 0, 1).unwrap();
        assert_eq!(t.closed_strips(), vec![(RationalInterval::unit(), IntervalSet::from_intervals(vec![RationalInterval::point(q(1, 1))]))]);
        let t = leaf_table(&leaf_with_delta(0, 0), 0, 1).unwrap();
        assert_eq!(t.closed_strips(), vec![(RationalInterval::unit(), IntervalSet::unit())]);
    }

    #[test]
    fn path_root_set() {
        let g = path_coordination(3);
        let o = orient(&g, 0).unwrap();
        let t = exact_downstream(&g, &o).unwrap();
        assert!(t.root_set.contains(&q(0, 1)) && t.root_set.contains(&q(1, 1)));
        let p = exact_upstream(&t, &mut *Policy::First.chooser()).unwrap();
        assert!(p.iter().all(|x| x.is_zero()) || p.iter().all(|x| x.is_one()));
        assert!(is_exact_nash(&g, &p).unwrap());
    }

    #[test]
    fn matching_pennies_is_half() {
        let p = exact_tree_nash(&matching_pennies_edge(), 0, Policy::First).unwrap();
        assert_eq!(p, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn random_rational_trees_are_exact() {
        for seed in 0..8 {
            let g = generate_random_rational_tree_game(7, 3, 8, seed).unwrap();
            for policy in [Policy::First, Policy::Random(seed)] {
                let p = exact_tree_nash(&g, (seed % 7) as usize, policy).unwrap();
                assert!(is_exact_nash(&g, &p).unwrap(), "seed {seed}");
            }
        }
    }

    #[test]
    fn float_payoffs_are_rejected() {
        let g = crate::game::generate_random_tree_game(3, 2, 1).unwrap();
        assert_eq!(exact_tree_nash(&g, 0, Policy::First), Err(SolverError::NonRationalPayoffs));
    }
}
