//! Contraction of payoff tensors against product distributions.
//!
//! A table over `k` binary variables is stored flat with the first variable
//! as the most significant bit. Contracting the leading variable with
//! probability `p` of action 0 replaces the table by
//! `p * first_half + (1 - p) * second_half`, which is the expected value of
//! the table over that variable.

use std::ops::{Add, Mul, Sub};

use num_traits::One;

/// Scalars the contraction works over: `f64` and exact rationals.
pub trait Scalar:
    Clone + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>
{
}

/// Contracts the leading `probs.len()` variables of `table`.
///
/// Returns the remaining table of length `table.len() >> probs.len()`.
pub fn contract_leading<T: Scalar>(table: &[T], probs: &[T]) -> Vec<T> {
    let mut buf = table.to_vec();
    for p in probs {
        let half = buf.len() / 2;
        debug_assert!(half > 0, "more probabilities than variables");
        let q = T::one() - p.clone();
        for j in 0..half {
            let hi = buf[j + half].clone();
            buf[j] = p.clone() * buf[j].clone() + q.clone() * hi;
        }
        buf.truncate(half);
    }
    buf
}

/// Fully contracts `table` and returns the scalar expectation.
pub fn contract_all<T: Scalar>(table: &[T], probs: &[T]) -> T {
    debug_assert_eq!(table.len(), 1usize << probs.len());
    contract_leading(table, probs)
        .into_iter()
        .next()
        .expect("contraction of a full table leaves one entry")
}

/// `f64` specialisation of [`contract_all`] that avoids the intermediate
/// allocation for small tables.
pub fn contract_f64(table: &[f64], probs: &[f64]) -> f64 {
    debug_assert_eq!(table.len(), 1usize << probs.len());
    if probs.is_empty() {
        return table[0];
    }
    let mut buf = [0.0f64; 64];
    let mut heap;
    let work: &mut [f64] = if table.len() <= 64 {
        buf[..table.len()].copy_from_slice(table);
        &mut buf[..table.len()]
    } else {
        heap = table.to_vec();
        &mut heap
    };
    let mut len = table.len();
    for &p in probs {
        let half = len / 2;
        let q = 1.0 - p;
        for j in 0..half {
            work[j] = p * work[j] + q * work[j + half];
        }
        len = half;
    }
    work[0]
}

/// Contracts the leading variables of a table that has at most one
/// variable left over, returning the remaining one or two entries (the
/// second entry is zero when nothing is left).
pub fn contract_f64_tail(table: &[f64], probs: &[f64]) -> [f64; 2] {
    let remaining = table.len() >> probs.len();
    debug_assert!(remaining == 1 || remaining == 2);
    let mut buf = [0.0f64; 64];
    let mut heap;
    let work: &mut [f64] = if table.len() <= 64 {
        buf[..table.len()].copy_from_slice(table);
        &mut buf[..table.len()]
    } else {
        heap = table.to_vec();
        &mut heap
    };
    let mut len = table.len();
    for &p in probs {
        let half = len / 2;
        let q = 1.0 - p;
        for j in 0..half {
            work[j] = p * work[j] + q * work[j + half];
        }
        len = half;
    }
    if remaining == 2 { [work[0], work[1]] } else { [work[0], 0.0] }
}

/// Reorders the variables of a binary table. `from` names the variables in
/// the table's current order (first = most significant bit), `to` the
/// desired order; both must list the same variables.
pub fn permute_vars<T: Clone>(table: &[T], from: &[usize], to: &[usize]) -> Vec<T> {
    let k = from.len();
    debug_assert_eq!(table.len(), 1usize << k);
    debug_assert_eq!(to.len(), k);
    let pos: Vec<usize> = to
        .iter()
        .map(|v| from.iter().position(|f| f == v).expect("variable sets must match"))
        .collect();
    (0..table.len())
        .map(|y| {
            let x = (0..k).fold(0usize, |x, t| {
                let bit = (y >> (k - 1 - t)) & 1;
                x | (bit << (k - 1 - pos[t]))
            });
            table[x].clone()
        })
        .collect()
}

/// Contracts a mixed-radix table whose leading variable has
/// `dist.len()` actions, weighting each slice by `dist`.
pub fn contract_radix(table: &[f64], dist: &[f64]) -> Vec<f64> {
    let rest = table.len() / dist.len();
    let mut out = vec![0.0; rest];
    for (x, &px) in dist.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let slice = &table[x * rest..(x + 1) * rest];
        for (o, &t) in out.iter_mut().zip(slice) {
            *o += px * t;
        }
    }
    out
}
