//! Brute-force reference solver for the two water-filling problems.
//!
//! The budget simplex `{x ≥ 0 : Σβᵢxᵢ = P2}` is discretized into
//! `K = 1/grid_step` budget quanta and searched exhaustively. The objective
//! is separable, so the exhaustive search over all quanta splits is carried
//! out as a min-plus recursion over modes, which visits the same set of grid
//! points as enumerating them one by one. The best grid point is then
//! polished by pairwise budget transfers with golden-section line searches.

use alloc::vec::Vec;

use crate::opt_capacity::{check_capacity_problem, check_ostbc_problem};
use crate::{Error, Result};

pub const ORACLE_MAX_MODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// `−Σ ln(1 − αᵢ/(1+xᵢ))`, nats.
    Capacity,
    /// `Σ αᵢ/(1+xᵢ)`.
    Ostbc,
}

fn mode_value(obj: Objective, alpha: f64, x: f64) -> f64 {
    match obj {
        Objective::Capacity => -libm::log(1.0 - alpha / (1.0 + x)),
        Objective::Ostbc => alpha / (1.0 + x),
    }
}

/// Objective to be minimized, evaluated at `x`.
pub fn objective_value(obj: Objective, alpha: &[f64], x: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(x)
        .map(|(&a, &xi)| mode_value(obj, a, xi))
        .sum()
}

const GOLDEN_ITERS: usize = 120;
const MAX_PASSES: usize = 500;

fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn oracle_solve(
    obj: Objective,
    alpha: &[f64],
    beta: &[f64],
    p2: f64,
    grid_step: f64,
) -> Result<(Vec<f64>, f64)> {
    match obj {
        Objective::Capacity => check_capacity_problem(alpha, beta, p2)?,
        Objective::Ostbc => check_ostbc_problem(alpha, beta, p2)?,
    }
    let n = alpha.len();
    if n > ORACLE_MAX_MODES {
        return Err(Error::OracleTooLarge { modes: n });
    }
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidGridStep(grid_step));
    }
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    if p2 == 0.0 {
        let x = alloc::vec![0.0; n];
        let v = objective_value(obj, alpha, &x);
        return Ok((x, v));
    }

    let quanta = libm::round(1.0 / grid_step).max(1.0) as usize;
    let unit = p2 / quanta as f64;
    let gain = |i: usize, q: usize| q as f64 * unit / beta[i];

    // best[k]: minimum over the first i modes spending exactly k quanta
    let mut best: Vec<f64> = (0..=quanta)
        .map(|q| mode_value(obj, alpha[0], gain(0, q)))
        .collect();
    let mut choice: Vec<Vec<usize>> = Vec::with_capacity(n);
    choice.push((0..=quanta).collect());
    for i in 1..n {
        let table: Vec<f64> = (0..=quanta)
            .map(|q| mode_value(obj, alpha[i], gain(i, q)))
            .collect();
        let mut next = alloc::vec![f64::INFINITY; quanta + 1];
        let mut pick = alloc::vec![0usize; quanta + 1];
        for k in 0..=quanta {
            for q in 0..=k {
                let v = best[k - q] + table[q];
                if v < next[k] {
                    next[k] = v;
                    pick[k] = q;
                }
            }
        }
        best = next;
        choice.push(pick);
    }
    let mut x = alloc::vec![0.0; n];
    let mut left = quanta;
    for i in (0..n).rev() {
        let q = choice[i][left];
        x[i] = gain(i, q);
        left -= q;
    }

    // pairwise refinement: move budget t from mode j to mode i
    let mut current = objective_value(obj, alpha, &x);
    for _ in 0..MAX_PASSES {
        let before = current;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (xi, xj) = (x[i], x[j]);
                let pair = |t: f64| {
                    mode_value(obj, alpha[i], (xi + t / beta[i]).max(0.0))
                        + mode_value(obj, alpha[j], (xj - t / beta[j]).max(0.0))
                };
                let hi = beta[j] * xj;
                if hi <= 0.0 {
                    continue;
                }
                let t = golden_min(0.0, hi, pair);
                if pair(t) < pair(0.0) {
                    x[i] = (xi + t / beta[i]).max(0.0);
                    x[j] = (xj - t / beta[j]).max(0.0);
                }
            }
        }
        current = objective_value(obj, alpha, &x);
        if before - current <= 1e-15 * current.abs().max(1.0) {
            break;
        }
    }
    Ok((x, current))
}
