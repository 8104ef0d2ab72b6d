use crate::error::{Result, SolverError};

/// Uniform grid `{0, 1/m, 2/m, ..., 1}` of mixed strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TauGrid {
    m: usize,
}

impl TauGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(SolverError::Unsatisfiable("grid resolution must be positive".into()));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Number of grid points, `m + 1`.
    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        j as f64 / self.m as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.m).map(|j| self.value(j)).collect()
    }

    /// Index of the grid point nearest to `x` (ties round up).
    pub fn nearest(&self, x: f64) -> usize {
        ((x.clamp(0.0, 1.0) * self.m as f64).round() as usize).min(self.m)
    }
}

/// `max(k·log₂k, 1)`.
pub fn klogk(k: usize) -> f64 {
    let k = k as f64;
    (k * k.log2()).max(1.0)
}

/// Largest step for which the product-perturbation bound is claimed to hold:
/// `2 / (k·max(log₂(k/2), 1)²)`.
pub fn tau_cap(k: usize) -> f64 {
    let l = ((k as f64) / 2.0).log2().max(1.0);
    2.0 / (k as f64 * l * l)
}

/// Bound on `|Πp_i − Πq_i|` when every coordinate moves by at most `tau`.
pub fn product_bound(k: usize, tau: f64) -> f64 {
    2.0 * klogk(k) * tau
}

/// Bound on the change of an expected payoff over `k` players.
pub fn payoff_bound(k: usize, tau: f64) -> f64 {
    2f64.powi(k as i32 + 1) * klogk(k) * tau
}

/// Regret bound for rounding an equilibrium to the grid.
pub fn rounding_regret_bound(k: usize, tau: f64) -> f64 {
    2f64.powi(k as i32 + 2) * klogk(k) * tau
}

/// Finest grid needed so that rounding any equilibrium of a game whose
/// closed neighborhoods have at most `k_max` players costs at most `eps`.
pub fn compute_tau(k_max: usize, eps: f64) -> Result<TauGrid> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(SolverError::InvalidEpsilon(eps));
    }
    let k = k_max.max(1);
    let bound = (eps / (2f64.powi(k as i32 + 2) * klogk(k))).min(tau_cap(k));
    let mut m = (1.0 / bound).ceil().max(1.0) as usize;
    while m > 1 && 1.0 / (m - 1) as f64 <= bound {
        m -= 1;
    }
    while 1.0 / m as f64 > bound {
        m += 1;
    }
    TauGrid::new(m)
}
