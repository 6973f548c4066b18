use crate::opt_capacity::{neumaier_sum, WaterLevel, WaterfillSolution};

/// Residuals of the KKT system of a water-filling problem, all reported as
/// nonnegative magnitudes.
///
/// `λ0 = 1/ξ` (capacity) or `1/ξ²` (OSTBC); the per-mode multipliers are
/// reconstructed from the gradient equations on inactive modes and are zero
/// on active ones. Gradient and multiplier residuals are scaled by the
/// magnitude of the terms involved; budget residuals by `max(1, P2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktReport {
    pub stationarity_residual: f64,
    pub complementary_slackness: f64,
    pub primal_feasibility: f64,
    pub dual_feasibility: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity_residual
            .max(self.complementary_slackness)
            .max(self.primal_feasibility)
            .max(self.dual_feasibility)
    }
}

fn verify(
    beta: &[f64],
    p2: f64,
    wf: &WaterfillSolution,
    lambda0: f64,
    // (objective gradient, magnitude of its terms) at mode i
    grad: impl Fn(usize, f64) -> (f64, f64),
) -> KktReport {
    let mut rep = KktReport::default();
    for (i, (&x, &b)) in wf.x.iter().zip(beta).enumerate() {
        let (g, mag) = grad(i, x);
        let r = g + lambda0 * b;
        let scale = mag.max(lambda0 * b).max(1.0);
        if x > 0.0 {
            rep.stationarity_residual = rep.stationarity_residual.max(r.abs() / scale);
        } else {
            rep.dual_feasibility = rep.dual_feasibility.max((-r).max(0.0) / scale);
        }
        rep.primal_feasibility = rep.primal_feasibility.max((-x).max(0.0));
    }
    let used = neumaier_sum(wf.x.iter().zip(beta).map(|(x, b)| x * b));
    let gap = (used - p2) / p2.max(1.0);
    let budget_violation = if lambda0 > 0.0 {
        gap.abs()
    } else {
        gap.max(0.0)
    };
    rep.primal_feasibility = rep.primal_feasibility.max(budget_violation);
    rep.complementary_slackness = lambda0 * gap.abs();
    rep.dual_feasibility = rep.dual_feasibility.max((-lambda0).max(0.0));
    rep
}

/// KKT residuals for `min −Σ ln(1 − αᵢ/(1+xᵢ))` s.t. `Σβᵢxᵢ ≤ P2`, `x ≥ 0`.
pub fn verify_kkt_capacity(
    alpha: &[f64],
    beta: &[f64],
    p2: f64,
    wf: &WaterfillSolution,
) -> KktReport {
    let lambda0 = match wf.xi {
        WaterLevel::Level(xi) if xi > 0.0 => 1.0 / xi,
        _ => 0.0,
    };
    verify(beta, p2, wf, lambda0, |i, x| {
        let a = alpha[i];
        let hi = 1.0 / (1.0 - a + x);
        (1.0 / (1.0 + x) - hi, hi)
    })
}

/// KKT residuals for `min Σ αᵢ/(1+xᵢ)` s.t. `Σβᵢxᵢ ≤ P2`, `x ≥ 0`.
pub fn verify_kkt_ostbc(alpha: &[f64], beta: &[f64], p2: f64, wf: &WaterfillSolution) -> KktReport {
    let lambda0 = match wf.xi {
        WaterLevel::Level(xi) if xi > 0.0 => 1.0 / (xi * xi),
        _ => 0.0,
    };
    verify(beta, p2, wf, lambda0, |i, x| {
        let g = alpha[i] / ((1.0 + x) * (1.0 + x));
        (-g, g)
    })
}
