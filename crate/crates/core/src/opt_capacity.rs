//! Capacity-optimal relay transform matrix.
//!
//! With `A = H1 (t/P1·I + H0ᴴH0 + H1ᴴH1)⁻¹ H1ᴴ`, `B = H2ᴴH2` and
//! `C = I + (P1/t)·H1H1ᴴ`, the optimal RTM has the form
//!
//! ```text
//! X = Ũ_B Λ̃_B^{-1/2} diag(x)^{1/2} Ũ_Aᴴ
//! ```
//!
//! where the mode gains `x` solve
//!
//! ```text
//! min  −Σ ln(1 − αᵢ/(1 + xᵢ))   s.t.  Σ βᵢxᵢ ≤ P2,  x ≥ 0
//! ```
//!
//! with `αᵢ` the eigenvalues of `A` and `βᵢ = (Ũ_AᴴCŨ_A)ᵢᵢ / (Λ̃_B)ᵢᵢ`.
//! The solution is `xᵢ = φᵢ(ξ)` for the unique water level `ξ` that spends
//! the whole budget.

use alloc::vec::Vec;

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::matalg::{self, gram, herm_eig, identity, outer_gram, CMatrix, DEFAULT_RANK_TOL};
use crate::network::{validate, ChannelSet, Dims, PowerBudget};
use crate::{Error, Result};

/// Which objective a set of spectra was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Capacity,
    Ostbc,
}

/// Mode spectra and eigenvector factors needed to assemble an RTM.
///
/// `alpha`, `beta` and `u_a` cover the `rho = min(s, rho_b)` usable modes;
/// `alpha` is zero-padded past the rank of `A`. `u_b`/`lam_b` hold the full
/// thin factorization of `B` (`rho_b` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraBundle {
    pub criterion: Criterion,
    pub alpha: Vec<f64>,
    /// Nonzero eigenvalues of `A` past the `rho` usable modes (only when
    /// `rho_a > rho`). They receive no relay power but still enter the
    /// capacity.
    pub alpha_tail: Vec<f64>,
    pub beta: Vec<f64>,
    pub u_a: CMatrix,
    pub u_b: CMatrix,
    pub lam_b: Vec<f64>,
    /// Relay power-constraint matrix `C` (s×s).
    pub c_matrix: CMatrix,
    pub rho: usize,
    pub rho_a: usize,
    pub rho_b: usize,
}

impl SpectraBundle {
    /// `alpha` followed by `alpha_tail`: every nonzero eigenvalue of `A`.
    pub fn full_alpha(&self) -> Vec<f64> {
        let mut v = self.alpha.clone();
        v.extend_from_slice(&self.alpha_tail);
        v
    }
}

/// Water level `ξ` of a water-filling solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaterLevel {
    Level(f64),
    /// Every `αᵢ` vanishes: nothing can be gained, no finite level exists.
    NoWater,
    /// Gains were not produced by water-filling (naive amplify-and-forward).
    NotApplicable,
}

impl WaterLevel {
    pub fn value(&self) -> Option<f64> {
        match self {
            WaterLevel::Level(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution {
    pub x: Vec<f64>,
    pub xi: WaterLevel,
    pub active: Vec<bool>,
    /// `Σ βᵢxᵢ`.
    pub achieved_budget: f64,
}

impl WaterfillSolution {
    fn empty(n: usize, xi: WaterLevel) -> Self {
        WaterfillSolution {
            x: alloc::vec![0.0; n],
            xi,
            active: alloc::vec![false; n],
            achieved_budget: 0.0,
        }
    }

    fn from_gains(x: Vec<f64>, beta: &[f64], xi: WaterLevel) -> Self {
        let active = x.iter().map(|&v| v > 0.0).collect();
        let achieved_budget = neumaier_sum(x.iter().zip(beta).map(|(x, b)| x * b));
        WaterfillSolution {
            x,
            xi,
            active,
            achieved_budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RtmKind {
    /// Capacity-optimal.
    Opt1,
    /// OSTBC-capacity-optimal.
    Opt2,
    /// Naive amplify-and-forward (scaled identity).
    Naf,
}

impl RtmKind {
    pub fn name(&self) -> &'static str {
        match self {
            RtmKind::Opt1 => "opt1",
            RtmKind::Opt2 => "opt2",
            RtmKind::Naf => "naf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtmSolution {
    pub kind: RtmKind,
    /// The u×s relay transform matrix.
    pub x_matrix: CMatrix,
    pub wf: WaterfillSolution,
    /// `None` for the naive baseline.
    pub spectra: Option<SpectraBundle>,
    /// `tr{X C Xᴴ}`.
    pub relay_power_used: f64,
    /// Set to `"naf-rect"` when the naive baseline had to use a rectangular
    /// identity pattern (s ≠ u).
    pub note: Option<&'static str>,
}

pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `C = I_s + (P1/t)·H1H1ᴴ`.
pub fn power_matrix(ch: &ChannelSet, pb: &PowerBudget, dims: Dims) -> CMatrix {
    identity(dims.s) + outer_gram(&ch.h1) * Complex64::new(pb.p1 / dims.t as f64, 0.0)
}

/// Largest float strictly below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Shared second half of the spectra construction: thin UD of `B`, sorted
/// eigenpairs of `a_mat`, zero padding and the `β` ratios.
pub(crate) fn spectra_from(
    criterion: Criterion,
    a_mat: &CMatrix,
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    rank_tol: f64,
) -> Result<SpectraBundle> {
    let b_ud = matalg::thin_ud(&gram(&ch.h2), rank_tol)?;
    if b_ud.rank == 0 {
        return Err(Error::RelayPathDead);
    }
    let rho_b = b_ud.rank;
    let rho = dims.s.min(rho_b);

    let eig_a = herm_eig(a_mat)?;
    let lmax = eig_a.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let thr = matalg::rank_threshold(lmax, rank_tol);
    let rho_a = eig_a.eigenvalues.iter().filter(|&&l| l > thr).count();

    let mut alpha = Vec::with_capacity(rho);
    for (i, &l) in eig_a.eigenvalues.iter().take(rho).enumerate() {
        let a = if l > thr { l } else { 0.0 };
        let a = match criterion {
            Criterion::Capacity if a >= 1.0 + 1e-12 => {
                return Err(Error::InvalidSpectrum {
                    what: "alpha",
                    index: i,
                    value: a,
                })
            }
            Criterion::Capacity => a.min(BELOW_ONE),
            Criterion::Ostbc => a,
        };
        alpha.push(a);
    }

    let alpha_tail = eig_a
        .eigenvalues
        .iter()
        .skip(rho)
        .filter(|&&l| l > thr)
        .map(|&l| match criterion {
            Criterion::Capacity => l.min(BELOW_ONE),
            Criterion::Ostbc => l,
        })
        .collect();

    let c_matrix = power_matrix(ch, pb, dims);
    let u_a = eig_a.eigenvectors.columns(0, rho).into_owned();
    let beta = (0..rho)
        .map(|i| {
            let col = u_a.column(i);
            let c_ii = (col.adjoint() * &c_matrix * col)[(0, 0)].re;
            c_ii / b_ud.lam_thin[i]
        })
        .collect();

    Ok(SpectraBundle {
        criterion,
        alpha,
        alpha_tail,
        beta,
        u_a,
        u_b: b_ud.u_thin,
        lam_b: b_ud.lam_thin,
        c_matrix,
        rho,
        rho_a,
        rho_b,
    })
}

/// `A = H1 (t/P1·I + H0ᴴH0 + H1ᴴH1)⁻¹ H1ᴴ`, formed as `WᴴW` with
/// `W = L⁻¹H1ᴴ` so it is PSD by construction.
pub fn capacity_a_matrix(ch: &ChannelSet, pb: &PowerBudget, dims: Dims) -> Result<CMatrix> {
    let bracket =
        identity(dims.t) * Complex64::new(dims.t as f64 / pb.p1, 0.0) + gram(&ch.h0) + gram(&ch.h1);
    let chol = Cholesky::new(bracket).ok_or(Error::Numerical {
        context: "Cholesky of the A-matrix bracket",
    })?;
    let w = chol
        .l_dirty()
        .solve_lower_triangular(&ch.h1.adjoint())
        .ok_or(Error::Numerical {
            context: "triangular solve for the A matrix",
        })?;
    Ok(gram(&w))
}

pub fn build_capacity_spectra(
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    rank_tol: f64,
) -> Result<SpectraBundle> {
    validate(dims, ch, pb)?;
    let a = capacity_a_matrix(ch, pb, dims)?;
    spectra_from(Criterion::Capacity, &a, ch, pb, dims, rank_tol)
}

/// Activation thresholds `ξᵢ = (1 − αᵢ)βᵢ/αᵢ`: `φᵢ(ξ) > 0` iff `ξ > ξᵢ`.
/// Modes with `αᵢ = 0` never activate and get `+∞`.
pub fn capacity_thresholds(alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    alpha
        .iter()
        .zip(beta)
        .map(|(&a, &b)| {
            if a > 0.0 {
                (1.0 - a) * b / a
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// `φ(ξ) = {α/2 − 1 + √(α²/4 + αξ/β)}₊`, evaluated in rationalized form to
/// avoid cancellation near the threshold.
pub fn phi(alpha: f64, beta: f64, xi: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    let q = alpha * xi / beta;
    let num = q - (1.0 - alpha);
    if num <= 0.0 {
        return 0.0;
    }
    num / ((1.0 - 0.5 * alpha) + libm::sqrt(0.25 * alpha * alpha + q))
}

fn check_problem(alpha: &[f64], beta: &[f64], p2: f64, criterion: Criterion) -> Result<()> {
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch {
            expected: alpha.len(),
            found: beta.len(),
        });
    }
    if p2.is_nan() || p2 < 0.0 {
        return Err(Error::NegativeBudget(p2));
    }
    if !p2.is_finite() {
        return Err(Error::InvalidPower {
            what: "p2",
            value: p2,
        });
    }
    for (index, &a) in alpha.iter().enumerate() {
        let ok = match criterion {
            Criterion::Capacity => (0.0..1.0).contains(&a),
            Criterion::Ostbc => a >= 0.0 && a.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidSpectrum {
                what: "alpha",
                index,
                value: a,
            });
        }
    }
    for (index, &b) in beta.iter().enumerate() {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidSpectrum {
                what: "beta",
                index,
                value: b,
            });
        }
    }
    Ok(())
}

pub(crate) fn check_capacity_problem(alpha: &[f64], beta: &[f64], p2: f64) -> Result<()> {
    check_problem(alpha, beta, p2, Criterion::Capacity)
}

pub(crate) fn check_ostbc_problem(alpha: &[f64], beta: &[f64], p2: f64) -> Result<()> {
    check_problem(alpha, beta, p2, Criterion::Ostbc)
}

const BISECTION_MAX_ITER: usize = 200;
const BUDGET_RTOL: f64 = 1e-12;

/// Solves `Σ βᵢφᵢ(ξ) = P2` for the capacity water-filling problem.
///
/// The budget is continuous and nondecreasing in `ξ` and has a square-root
/// kink at each activation threshold, so the root is bracketed between
/// consecutive sorted thresholds and then bisected.
pub fn waterfill_capacity(alpha: &[f64], beta: &[f64], p2: f64) -> Result<WaterfillSolution> {
    check_capacity_problem(alpha, beta, p2)?;
    let n = alpha.len();
    let thresholds = capacity_thresholds(alpha, beta);
    let mut sorted: Vec<f64> = thresholds
        .iter()
        .copied()
        .filter(|t| t.is_finite())
        .collect();
    if sorted.is_empty() {
        return Ok(WaterfillSolution::empty(n, WaterLevel::NoWater));
    }
    sorted.sort_by(f64::total_cmp);
    if p2 == 0.0 {
        return Ok(WaterfillSolution::empty(n, WaterLevel::Level(sorted[0])));
    }

    let budget = |xi: f64| neumaier_sum(alpha.iter().zip(beta).map(|(&a, &b)| b * phi(a, b, xi)));

    // budget(sorted[k]) only involves modes below the k-th threshold
    let mut lo = sorted[0];
    let mut hi = f64::INFINITY;
    for &t in &sorted[1..] {
        if budget(t) >= p2 {
            hi = t;
            break;
        }
        lo = t;
    }
    if hi.is_infinite() {
        let mut step = lo.abs().max(1.0);
        hi = lo + step;
        let mut guard = 0;
        while budget(hi) < p2 {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            guard += 1;
            if guard > 2000 || !hi.is_finite() {
                return Err(Error::Numerical {
                    context: "bracketing the capacity water level",
                });
            }
        }
    }

    let mut xi = lo;
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = budget(mid);
        if (g - p2).abs() <= BUDGET_RTOL * p2 {
            xi = mid;
            lo = mid;
            hi = mid;
            break;
        }
        if g < p2 {
            lo = mid;
        } else {
            hi = mid;
        }
        xi = lo;
    }
    if lo < hi {
        // interval exhausted: take whichever end is closer without overspending
        xi = if (budget(hi) - p2).abs() <= BUDGET_RTOL * p2 {
            hi
        } else {
            lo
        };
    }

    let x = alpha
        .iter()
        .zip(beta)
        .map(|(&a, &b)| phi(a, b, xi))
        .collect();
    Ok(WaterfillSolution::from_gains(
        x,
        beta,
        WaterLevel::Level(xi),
    ))
}

/// `X = Σ_{xᵢ>0} √(xᵢ/λ_B,ᵢ) · u_B,ᵢ u_A,ᵢᴴ`; zero modes are skipped.
pub fn assemble_rtm(spectra: &SpectraBundle, wf: &WaterfillSolution) -> Result<RtmSolution> {
    if wf.x.len() != spectra.rho {
        return Err(Error::LengthMismatch {
            expected: spectra.rho,
            found: wf.x.len(),
        });
    }
    let u = spectra.u_b.nrows();
    let s = spectra.u_a.nrows();
    let mut x_matrix = CMatrix::zeros(u, s);
    for (i, &xi) in wf.x.iter().enumerate() {
        if xi <= 0.0 {
            continue;
        }
        let g = Complex64::new(libm::sqrt(xi / spectra.lam_b[i]), 0.0);
        x_matrix += spectra.u_b.column(i) * g * spectra.u_a.column(i).adjoint();
    }
    let relay_power_used = matalg::trace_re(&(&x_matrix * &spectra.c_matrix * x_matrix.adjoint()));
    let kind = match spectra.criterion {
        Criterion::Capacity => RtmKind::Opt1,
        Criterion::Ostbc => RtmKind::Opt2,
    };
    Ok(RtmSolution {
        kind,
        x_matrix,
        wf: wf.clone(),
        spectra: Some(spectra.clone()),
        relay_power_used,
        note: None,
    })
}

pub fn optimize_capacity_rtm(ch: &ChannelSet, pb: &PowerBudget, dims: Dims) -> Result<RtmSolution> {
    let spectra = build_capacity_spectra(ch, pb, dims, DEFAULT_RANK_TOL)?;
    let wf = waterfill_capacity(&spectra.alpha, &spectra.beta, pb.p2)?;
    assemble_rtm(&spectra, &wf)
}
