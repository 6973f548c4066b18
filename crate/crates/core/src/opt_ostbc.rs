//! OSTBC-capacity-optimal relay transform matrix.
//!
//! Same structure as the capacity optimum but built from `Ǎ = H1H1ᴴ`, and
//! the mode gains solve `min Σ αᵢ/(1 + xᵢ)` under the same budget. The
//! optimal gains are `xᵢ = {ξ√(αᵢ/βᵢ) − 1}₊`, and the budget is piecewise
//! linear in `ξ`, so the level is found exactly.

use alloc::vec::Vec;

use crate::matalg::{outer_gram, DEFAULT_RANK_TOL};
use crate::network::{validate, ChannelSet, Dims, PowerBudget};
use crate::opt_capacity::{
    assemble_rtm, check_ostbc_problem, spectra_from, Criterion, RtmSolution, SpectraBundle,
    WaterLevel, WaterfillSolution,
};
use crate::{Error, Result};

pub fn build_ostbc_spectra(
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    rank_tol: f64,
) -> Result<SpectraBundle> {
    validate(dims, ch, pb)?;
    spectra_from(
        Criterion::Ostbc,
        &outer_gram(&ch.h1),
        ch,
        pb,
        dims,
        rank_tol,
    )
}

/// Activation thresholds `√(βᵢ/αᵢ)`; `+∞` for `αᵢ = 0`.
pub fn ostbc_thresholds(alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    alpha
        .iter()
        .zip(beta)
        .map(|(&a, &b)| {
            if a > 0.0 {
                libm::sqrt(b / a)
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// `ψ(ξ) = {ξ√(α/β) − 1}₊`.
pub fn psi(alpha: f64, beta: f64, xi: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    (xi * libm::sqrt(alpha / beta) - 1.0).max(0.0)
}

/// The linear segment of the budget function holding the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct OstbcSegment {
    /// Mode indices in activation order (increasing threshold).
    pub activation_order: Vec<usize>,
    /// Number of leading modes of `activation_order` that are active.
    pub active_count: usize,
    /// Threshold interval `(lower, upper]` containing the level.
    pub lower: f64,
    pub upper: f64,
}

/// Exact solve of `Σ βᵢψᵢ(ξ) = P2` plus the segment it landed on.
pub fn waterfill_ostbc_segment(
    alpha: &[f64],
    beta: &[f64],
    p2: f64,
) -> Result<(WaterfillSolution, Option<OstbcSegment>)> {
    check_ostbc_problem(alpha, beta, p2)?;
    let n = alpha.len();
    let thresholds = ostbc_thresholds(alpha, beta);
    let mut order: Vec<usize> = (0..n).filter(|&i| thresholds[i].is_finite()).collect();
    order.sort_by(|&a, &b| thresholds[a].total_cmp(&thresholds[b]));

    let zeros = |xi| WaterfillSolution {
        x: alloc::vec![0.0; n],
        xi,
        active: alloc::vec![false; n],
        achieved_budget: 0.0,
    };
    if order.is_empty() {
        return Ok((zeros(WaterLevel::NoWater), None));
    }
    if p2 == 0.0 {
        let seg = OstbcSegment {
            active_count: 0,
            lower: 0.0,
            upper: thresholds[order[0]],
            activation_order: order.clone(),
        };
        return Ok((zeros(WaterLevel::Level(thresholds[order[0]])), Some(seg)));
    }

    // on the segment with modes order[..k] active:
    //   budget(ξ) = ξ·Σ√(αᵢβᵢ) − Σβᵢ
    let mut sum_beta = 0.0;
    let mut sum_root = 0.0;
    let mut xi = 0.0;
    let mut k = 0;
    while k < order.len() {
        let i = order[k];
        sum_beta += beta[i];
        sum_root += libm::sqrt(alpha[i] * beta[i]);
        k += 1;
        xi = (p2 + sum_beta) / sum_root;
        let next = order.get(k).map_or(f64::INFINITY, |&j| thresholds[j]);
        if xi <= next {
            break;
        }
    }

    let mut x = alloc::vec![0.0; n];
    let mut active = alloc::vec![false; n];
    for &i in &order[..k] {
        x[i] = psi(alpha[i], beta[i], xi);
        active[i] = x[i] > 0.0;
    }
    let achieved_budget = crate::opt_capacity::neumaier_sum(x.iter().zip(beta).map(|(x, b)| x * b));
    let seg = OstbcSegment {
        lower: thresholds[order[k - 1]],
        upper: order.get(k).map_or(f64::INFINITY, |&j| thresholds[j]),
        active_count: k,
        activation_order: order,
    };
    Ok((
        WaterfillSolution {
            x,
            xi: WaterLevel::Level(xi),
            active,
            achieved_budget,
        },
        Some(seg),
    ))
}

pub fn waterfill_ostbc(alpha: &[f64], beta: &[f64], p2: f64) -> Result<WaterfillSolution> {
    waterfill_ostbc_segment(alpha, beta, p2).map(|(wf, _)| wf)
}

pub fn optimize_ostbc_rtm(ch: &ChannelSet, pb: &PowerBudget, dims: Dims) -> Result<RtmSolution> {
    let spectra = build_ostbc_spectra(ch, pb, dims, DEFAULT_RANK_TOL)?;
    let wf = waterfill_ostbc(&spectra.alpha, &spectra.beta, pb.p2)?;
    assemble_rtm(&spectra, &wf)
}

fn is_sorted_nonneg(v: &[f64]) -> bool {
    v.iter().all(|&x| x >= 0.0 && x.is_finite()) && v.windows(2).all(|w| w[0] >= w[1])
}

/// Rearrangement bounds for two nonnegative nonincreasing sequences:
/// `(Σ aᵢ b_{n+1−i}, Σ aᵢ bᵢ)`. Every pairing `Σ aᵢ b_{π(i)}` lies between.
pub fn rearrangement_bounds(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if !is_sorted_nonneg(a) {
        return Err(Error::Unsorted { which: "a" });
    }
    if !is_sorted_nonneg(b) {
        return Err(Error::Unsorted { which: "b" });
    }
    let upper = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let lower = a.iter().zip(b.iter().rev()).map(|(x, y)| x * y).sum();
    Ok((lower, upper))
}
