use super::bits::BitGrid;
use super::grid::TauGrid;
use super::local::LocalForm;
use super::scan::{feasible_children, for_each_point, point_values, Runs, HalfLines};
use crate::error::{Result, SolverError};
use crate::game::{GraphicalGame, PlayerId, REGRET_TOL};
use crate::tree::TreeOrientation;

/// Upper limit on stored witness entries.
pub const WITNESS_LIMIT: u128 = 50_000_000;

/// Grid table of a non-root vertex. Rows are indexed by the child's grid
/// value, columns by the owner's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxTable {
    pub owner: PlayerId,
    pub child: PlayerId,
    pub bits: BitGrid,
}

impl ApproxTable {
    pub fn get(&self, child_value: usize, own_value: usize) -> bool {
        self.bits.get(child_value, own_value)
    }
}

/// Grid values of the root that extend to a full equilibrium.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootTable {
    pub root: PlayerId,
    pub bits: Vec<bool>,
}

impl RootTable {
    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&z| self.bits[z]).collect()
    }
}

/// Parent grid tuples certifying each table entry of one vertex, indexed by
/// `child_value * (m + 1) + own_value` (child value 0 at the root).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessLists {
    lists: Vec<Vec<Box<[usize]>>>,
    stride: usize,
}

impl WitnessLists {
    pub fn get(&self, child_value: usize, own_value: usize) -> &[Box<[usize]>] {
        &self.lists[child_value * self.stride + own_value]
    }
}

#[derive(Clone, Debug)]
pub struct DownstreamResult {
    pub orientation: TreeOrientation,
    pub grid: TauGrid,
    pub eps_local: f64,
    /// Indexed by vertex; `None` at the root.
    pub tables: Vec<Option<ApproxTable>>,
    pub root_table: RootTable,
    /// Present when witness retention was requested.
    pub witnesses: Option<Vec<WitnessLists>>,
    pub(crate) forms: Vec<LocalForm>,
}

impl DownstreamResult {
    pub fn table(&self, v: PlayerId) -> Option<&ApproxTable> {
        self.tables.get(v).and_then(Option::as_ref)
    }

    /// Runs of owner values of `parent` allowed when its child plays `v`.
    pub(crate) fn parent_runs(&self, parent: PlayerId, v: usize) -> Runs {
        self.tables[parent].as_ref().expect("parents are never the root").bits.row_runs(v)
    }
}

/// Computes every vertex's table toward the root of `orientation`.
pub fn downstream_pass(
    game: &GraphicalGame,
    orientation: &TreeOrientation,
    grid: TauGrid,
    eps_local: f64,
    retain_witnesses: bool,
) -> Result<DownstreamResult> {
    if !(eps_local.is_finite() && eps_local >= 0.0) {
        return Err(SolverError::InvalidEpsilon(eps_local));
    }
    if orientation.len() != game.n() {
        return Err(SolverError::Internal("orientation does not match the game".into()));
    }
    let n = game.n();
    let eps = eps_local + REGRET_TOL;
    let forms: Vec<LocalForm> =
        (0..n).map(|v| LocalForm::new(game, v, orientation.parents(v), orientation.child(v))).collect();
    let mut result = DownstreamResult {
        orientation: orientation.clone(),
        grid,
        eps_local,
        tables: vec![None; n],
        root_table: RootTable { root: orientation.root(), bits: Vec::new() },
        witnesses: retain_witnesses.then(|| vec![WitnessLists::default(); n]),
        forms: Vec::new(),
    };
    let mut budget = WITNESS_LIMIT;
    for &v in orientation.order() {
        let form = &forms[v];
        let nw = if form.child.is_some() { grid.len() } else { 1 };
        let columns = if retain_witnesses {
            let (cols, lists) = columns_with_witnesses(&result, form, nw, eps, &mut budget)?;
            result.witnesses.as_mut().expect("retention enabled")[v] = lists;
            cols
        } else {
            columns(&result, form, nw, eps)
        };
        match form.child {
            Some(child) => {
                let bits = transpose(&columns, grid.len());
                result.tables[v] = Some(ApproxTable { owner: v, child, bits });
            }
            None => {
                result.root_table.bits = columns.iter().map(|r| !r.is_empty()).collect();
            }
        }
    }
    result.forms = forms;
    Ok(result)
}

/// For each own value, disjoint sorted ranges of admissible child values.
fn columns(res: &DownstreamResult, form: &LocalForm, nw: usize, eps: f64) -> Vec<Vec<(usize, usize)>> {
    let grid = res.grid;
    (0..grid.len())
        .map(|own| {
            let sets: Vec<Runs> = form.parents.iter().map(|&p| res.parent_runs(p, own)).collect();
            let mut ranges = Vec::new();
            feasible_children(form, &grid, &sets, grid.value(own), eps, nw, |lo, hi| ranges.push((lo, hi)));
            merge_ranges(ranges)
        })
        .collect()
}

fn merge_ranges(mut ranges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    ranges.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(ranges.len());
    for (lo, hi) in ranges {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Builds the (child, own) bit table from per-own-value child ranges.
fn transpose(columns: &[Vec<(usize, usize)>], rows: usize) -> BitGrid {
    let mut bits = BitGrid::new(rows, columns.len());
    let mut toggles = vec![0u64; rows + 1];
    for block in 0..bits.words_per_row() {
        toggles.iter_mut().for_each(|t| *t = 0);
        for (offset, ranges) in columns.iter().skip(block * 64).take(64).enumerate() {
            let bit = 1u64 << offset;
            for &(lo, hi) in ranges {
                toggles[lo] ^= bit;
                toggles[hi] ^= bit;
            }
        }
        let mut acc = 0u64;
        for (row, t) in toggles.iter().take(rows).enumerate() {
            acc ^= t;
            bits.set_word(row, block, acc);
        }
    }
    bits
}

/// Exhaustive variant of [`columns`] that also records every witness.
fn columns_with_witnesses(
    res: &DownstreamResult,
    form: &LocalForm,
    nw: usize,
    eps: f64,
    budget: &mut u128,
) -> Result<(Vec<Vec<(usize, usize)>>, WitnessLists)> {
    let grid = res.grid;
    let stride = grid.len();
    let mut lists: Vec<Vec<Box<[usize]>>> = vec![Vec::new(); nw * stride];
    let mut cols = Vec::with_capacity(stride);
    for own in 0..stride {
        let v = grid.value(own);
        let sets: Vec<Runs> = form.parents.iter().map(|&p| res.parent_runs(p, own)).collect();
        let size: u128 = sets.iter().map(|s| s.iter().map(|&(a, b)| (b - a + 1) as u128).sum::<u128>()).product();
        let cost = size * nw as u128;
        if cost > *budget {
            return Err(SolverError::SizeGuard { size: cost, limit: WITNESS_LIMIT });
        }
        *budget -= cost;
        let mut ranges = Vec::new();
        for_each_point(&sets, |pt| {
            let (a, b) = form.delta_in_w(&point_values(&grid, pt));
            let mut h = HalfLines::empty(nw);
            h.add(a, b, v, eps, &grid, nw);
            h.ranges(nw, |lo, hi| {
                ranges.push((lo, hi));
                for w in lo..hi {
                    lists[w * stride + own].push(pt.into());
                }
            });
            true
        });
        cols.push(merge_ranges(ranges));
    }
    Ok((cols, WitnessLists { lists, stride }))
}
