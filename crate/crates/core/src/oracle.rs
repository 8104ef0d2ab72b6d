//! Brute-force ground truth for small instances.
//!
//! Nothing here touches the solver tables; every answer comes from scanning
//! grid profiles and evaluating payoffs directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{payoff_bound, product_bound, rounding_regret_bound, tau_cap, TauGrid};
use crate::error::{Result, SolverError};
use crate::game::multilinear::contract_f64;
use crate::game::{regret, regrets, GraphicalGame, MixedProfile, PlayerId, REGRET_TOL};
use crate::tree::TreeOrientation;

/// Largest number of grid profiles a scan will visit.
pub const SCAN_LIMIT: u128 = 10_000_000;

/// Grid profiles whose regret is within the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub grid: TauGrid,
    /// Grid indices, sorted lexicographically.
    pub profiles: Vec<Vec<usize>>,
    /// Per-player regrets, aligned with `profiles`.
    pub regrets: Vec<Vec<f64>>,
}

impl ScanReport {
    pub fn mixed_profiles(&self) -> Vec<MixedProfile> {
        self.profiles
            .iter()
            .map(|idx| MixedProfile::new(idx.iter().map(|&j| self.grid.value(j)).collect()).expect("grid values"))
            .collect()
    }
}

fn guard(free: usize, grid: TauGrid) -> Result<()> {
    let size = (grid.len() as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if size > SCAN_LIMIT {
        return Err(SolverError::SizeGuard { size, limit: SCAN_LIMIT });
    }
    Ok(())
}

/// Steps `idx` (base `m + 1`, last digit fastest); false after the last.
fn next_digits(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Every grid profile whose regrets are all at most `eps`.
pub fn brute_force_equilibria(game: &GraphicalGame, grid: TauGrid, eps: f64) -> Result<ScanReport> {
    if !(eps >= 0.0) {
        return Err(SolverError::InvalidEpsilon(eps));
    }
    guard(game.n(), grid)?;
    let mut report = ScanReport { grid, profiles: Vec::new(), regrets: Vec::new() };
    let mut idx = vec![0usize; game.n()];
    loop {
        let profile = MixedProfile::new(idx.iter().map(|&j| grid.value(j)).collect())?;
        let r = regrets(game, &profile)?;
        if r.iter().all(|&x| x <= eps + REGRET_TOL) {
            report.profiles.push(idx.clone());
            report.regrets.push(r);
        }
        if !next_digits(&mut idx, grid.len()) {
            break;
        }
    }
    Ok(report)
}

/// Whether, with `child` of `owner` fixed to grid index `child_value`, the
/// players upstream of `owner` (itself included) have a grid assignment
/// where `owner` plays `own_value` and all of them are `eps_local`-best
/// responding.
pub fn verify_table_entry(
    game: &GraphicalGame,
    orientation: &TreeOrientation,
    edge: (PlayerId, PlayerId),
    child_value: usize,
    own_value: usize,
    grid: TauGrid,
    eps_local: f64,
) -> Result<bool> {
    let (owner, child) = edge;
    if owner >= game.n() || orientation.child(owner) != Some(child) {
        return Err(SolverError::Unsatisfiable(format!("({owner}, {child}) is not an edge toward the root")));
    }
    if child_value >= grid.len() || own_value >= grid.len() {
        return Err(SolverError::InvalidProfile("grid index out of range".into()));
    }
    let upstream = orientation.upstream(owner);
    let free: Vec<PlayerId> = upstream.iter().copied().filter(|&p| p != owner).collect();
    guard(free.len(), grid)?;
    // Players outside the upstream set other than `child` are never read.
    let mut values = vec![0.0; game.n()];
    values[child] = grid.value(child_value);
    values[owner] = grid.value(own_value);
    let mut idx = vec![0usize; free.len()];
    loop {
        for (&p, &j) in free.iter().zip(&idx) {
            values[p] = grid.value(j);
        }
        let profile = MixedProfile::new(values.clone())?;
        let mut ok = true;
        for &p in &upstream {
            if regret(game, p, &profile)? > eps_local + REGRET_TOL {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(true);
        }
        if !next_digits(&mut idx, grid.len()) {
            return Ok(false);
        }
    }
}

/// Outcome of randomized checks of the three perturbation bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub k: usize,
    pub trials: usize,
    /// Violations of the product, payoff and rounding-regret bounds.
    pub violations: [usize; 3],
    /// Smallest `bound / observed` seen for each bound (infinite when the
    /// observed change was always zero).
    pub min_ratio: [f64; 3],
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.violations == [0; 3]
    }
}

/// Samples `p`, a perturbation `q` with `|p_i - q_i| ≤ τ`, `τ` up to its
/// cap, and a random payoff matrix over `k` players; checks the product
/// bound, the payoff bound and, for the owner's regret,
/// `regret(q) ≤ regret(p) + rounding bound` (the equilibrium case is
/// `regret(p) = 0`).
pub fn check_lemma_bounds(k: usize, trials: usize, seed: u64) -> BoundsReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BoundsReport { k, trials, violations: [0; 3], min_ratio: [f64::INFINITY; 3] };
    let cap = tau_cap(k);
    for t in 0..trials {
        // Every fourth trial sits exactly at the cap, one in sixteen has p = q.
        let tau = if t % 4 == 0 { cap } else { rng.gen_range(0.0..=cap) };
        let p: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let q: Vec<f64> = if t % 16 == 1 {
            p.clone()
        } else {
            p.iter().map(|&x| (x + rng.gen_range(-tau..=tau)).clamp(0.0, 1.0)).collect()
        };
        let table: Vec<f64> = (0..1usize << k).map(|_| rng.gen_range(-1.0..=1.0)).collect();

        let product = |v: &[f64]| v.iter().product::<f64>();
        let observed = [
            (product(&p) - product(&q)).abs(),
            (contract_f64(&table, &p) - contract_f64(&table, &q)).abs(),
            (owner_regret(&table, &q) - owner_regret(&table, &p)).max(0.0),
        ];
        let bounds = [product_bound(k, tau), payoff_bound(k, tau), rounding_regret_bound(k, tau)];
        for i in 0..3 {
            if observed[i] > bounds[i] + 1e-12 {
                report.violations[i] += 1;
            }
            if observed[i] > 0.0 {
                report.min_ratio[i] = report.min_ratio[i].min(bounds[i] / observed[i]);
            }
        }
    }
    report
}

/// Regret of the player owning the first variable of `table`.
fn owner_regret(table: &[f64], probs: &[f64]) -> f64 {
    let half = table.len() / 2;
    let rest = &probs[1..];
    let (a0, a1) = (contract_f64(&table[..half], rest), contract_f64(&table[half..], rest));
    let v = probs[0];
    (a0.max(a1) - (v * a0 + (1.0 - v) * a1)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{coordination_edge, matching_pennies_edge, path_coordination, single_player};
    use crate::tree::orient;

    fn grid(m: usize) -> TauGrid {
        TauGrid::new(m).unwrap()
    }

    #[test]
    fn coordination_scan() {
        let r = brute_force_equilibria(&coordination_edge(), grid(2), 0.0).unwrap();
        assert_eq!(r.profiles, vec![vec![0, 0], vec![1, 1], vec![2, 2]]);
        assert!(r.regrets.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn indifferent_and_pennies_scans() {
        let r = brute_force_equilibria(&single_player(0.3, 0.3), grid(4), 0.0).unwrap();
        assert_eq!(r.profiles.len(), 5);
        let r = brute_force_equilibria(&matching_pennies_edge(), grid(2), 0.0).unwrap();
        assert_eq!(r.profiles, vec![vec![1, 1]]);
        assert_eq!(r.mixed_profiles()[0].as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn scan_guard() {
        let g = path_coordination(8);
        assert!(matches!(brute_force_equilibria(&g, grid(9), 0.1), Err(SolverError::SizeGuard { .. })));
    }

    #[test]
    fn leaf_entries() {
        let g = coordination_edge();
        let o = orient(&g, 1).unwrap();
        let m = grid(4);
        // Child plays action 1 for sure (index 0); the leaf must follow.
        assert!(verify_table_entry(&g, &o, (0, 1), 0, 0, m, 0.0).unwrap());
        assert!(!verify_table_entry(&g, &o, (0, 1), 0, 4, m, 0.0).unwrap());
        assert!(verify_table_entry(&g, &o, (1, 0), 0, 0, m, 0.0).is_err());
    }

    #[test]
    fn lemma_bounds_hold() {
        for k in [2, 4, 8] {
            let r = check_lemma_bounds(k, 2000, k as u64);
            assert!(r.holds(), "{r:?}");
            assert!(r.min_ratio.iter().all(|&x| x >= 1.0));
        }
    }

    #[test]
    fn identical_profiles_change_nothing() {
        let r = check_lemma_bounds(3, 16, 0);
        assert!(r.holds());
        assert_eq!(owner_regret(&[1.0, 0.0, 0.0, 1.0], &[1.0, 1.0]), 0.0);
    }
}
