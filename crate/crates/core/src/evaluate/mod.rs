//! Figures of merit: network capacity in two equivalent forms, OSTBC
//! capacity, direct-link capacity, the naive amplify-and-forward baseline,
//! KKT residuals and a brute-force oracle for the water-filling problems.
//! All capacities are in bit/s/Hz.

mod kkt;
mod oracle;

pub use kkt::{verify_kkt_capacity, verify_kkt_ostbc, KktReport};
pub use oracle::{objective_value, oracle_solve, Objective, ORACLE_MAX_MODES};

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::matalg::{self, gram, hpd_inverse, identity, log2_det_hpd, outer_gram, CMatrix};
use crate::network::{check_rtm, validate, ChannelSet, Dims, PowerBudget};
use crate::opt_capacity::{power_matrix, RtmKind, RtmSolution, WaterLevel, WaterfillSolution};
use crate::{Error, Result};

/// Agreement required between the direct and the rewritten capacity form,
/// in bits, scaled by `max(1, C)`.
pub const FORM_TOL_BITS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Capacity,
    Ostbc,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Capacity => "capacity",
            Metric::Ostbc => "ostbc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    pub bits: f64,
    pub metric: Metric,
    /// OSTBC symbol rate `R`; 1 for the capacity metric.
    pub symbol_rate: f64,
    pub relay_power_used: f64,
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn snr_per_antenna(pb: &PowerBudget, dims: Dims) -> f64 {
    pb.p1 / dims.t as f64
}

/// Whitened relay contribution `H1ᴴXᴴH2ᴴ(I_r + H2XXᴴH2ᴴ)⁻¹H2XH1` (t×t).
pub fn relay_inner(ch: &ChannelSet, x: &CMatrix) -> Result<CMatrix> {
    let k = &ch.h2 * x;
    let inv = hpd_inverse(&(identity(k.nrows()) + outer_gram(&k))).ok_or(Error::Numerical {
        context: "inverting I + H2XXᴴH2ᴴ",
    })?;
    let kh1 = k * &ch.h1;
    Ok(matalg::hermitian_part(&(kh1.adjoint() * inv * kh1)))
}

/// `tr{X C Xᴴ}`.
pub fn relay_power(ch: &ChannelSet, pb: &PowerBudget, dims: Dims, x: &CMatrix) -> f64 {
    matalg::trace_re(&(x * power_matrix(ch, pb, dims) * x.adjoint()))
}

fn checked_log_det(m: &CMatrix, context: &'static str) -> Result<f64> {
    match log2_det_hpd(m) {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Numerical { context }),
    }
}

/// Capacity through the direct expression and through the rewritten form
/// `I + (P1/t)(H0ᴴH0 + H1ᴴH1) − (P1/t)H1ᴴ(I_s + XᴴH2ᴴH2X)⁻¹H1`.
pub fn capacity_forms(
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    x: &CMatrix,
) -> Result<(f64, f64)> {
    validate(dims, ch, pb)?;
    check_rtm(dims, x)?;
    let g = re(snr_per_antenna(pb, dims));
    let h0g = gram(&ch.h0);

    let direct = identity(dims.t) + (&h0g + relay_inner(ch, x)?) * g;
    let direct = checked_log_det(&direct, "capacity (direct form)")?;

    let k = &ch.h2 * x;
    let inv = hpd_inverse(&(identity(dims.s) + gram(&k))).ok_or(Error::Numerical {
        context: "inverting I + XᴴBX",
    })?;
    let loss = matalg::hermitian_part(&(ch.h1.adjoint() * inv * &ch.h1));
    let rewritten = identity(dims.t) + (&h0g + gram(&ch.h1) - loss) * g;
    let rewritten = checked_log_det(&rewritten, "capacity (rewritten form)")?;
    Ok((direct, rewritten))
}

pub fn capacity(
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    x: &CMatrix,
) -> Result<CapacityReport> {
    let (direct, rewritten) = capacity_forms(ch, pb, dims, x)?;
    if (direct - rewritten).abs() > FORM_TOL_BITS * direct.abs().max(1.0) {
        return Err(Error::FormMismatch { direct, rewritten });
    }
    Ok(CapacityReport {
        bits: direct.max(0.0),
        metric: Metric::Capacity,
        symbol_rate: 1.0,
        relay_power_used: relay_power(ch, pb, dims, x),
    })
}

/// `tr[H0ᴴH0 + H1ᴴXᴴH2ᴴ(I + H2XXᴴH2ᴴ)⁻¹H2XH1]`.
pub fn ostbc_trace_argument(ch: &ChannelSet, x: &CMatrix) -> Result<f64> {
    Ok(matalg::trace_re(&gram(&ch.h0)) + matalg::trace_re(&relay_inner(ch, x)?))
}

/// `R·log2{1 + P1/(tR)·tr[…]}`.
pub fn ostbc_capacity(
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    x: &CMatrix,
    symbol_rate: f64,
) -> Result<CapacityReport> {
    if !(symbol_rate > 0.0 && symbol_rate <= 1.0) {
        return Err(Error::InvalidSymbolRate(symbol_rate));
    }
    validate(dims, ch, pb)?;
    check_rtm(dims, x)?;
    let tr = ostbc_trace_argument(ch, x)?;
    let bits = symbol_rate * libm::log2(1.0 + snr_per_antenna(pb, dims) / symbol_rate * tr);
    if !bits.is_finite() {
        return Err(Error::Numerical {
            context: "OSTBC capacity",
        });
    }
    Ok(CapacityReport {
        bits: bits.max(0.0),
        metric: Metric::Ostbc,
        symbol_rate,
        relay_power_used: relay_power(ch, pb, dims, x),
    })
}

/// `log2det{I + (P1/t)H0ᴴH0}`: the source-destination link alone.
pub fn direct_link_capacity(h0: &CMatrix, pb: &PowerBudget, dims: Dims) -> Result<CapacityReport> {
    let m = identity(dims.t) + gram(h0) * re(snr_per_antenna(pb, dims));
    Ok(CapacityReport {
        bits: checked_log_det(&m, "direct-link capacity")?.max(0.0),
        metric: Metric::Capacity,
        symbol_rate: 1.0,
        relay_power_used: 0.0,
    })
}

/// `log2det{I + (P1/t)(H0ᴴH0 + H1ᴴH1)}`: the capacity any relay matrix can
/// at most reach (second hop noiseless).
pub fn data_processing_ceiling(ch: &ChannelSet, pb: &PowerBudget, dims: Dims) -> Result<f64> {
    let m = identity(dims.t) + (gram(&ch.h0) + gram(&ch.h1)) * re(snr_per_antenna(pb, dims));
    checked_log_det(&m, "data-processing ceiling")
}

/// Capacity from the water-filling parameters:
/// `ceiling + Σ log2(1 − αᵢ/(1 + xᵢ))`.
///
/// `alpha` may be longer than `x` (see [`SpectraBundle::full_alpha`]); the
/// extra modes get zero gain.
///
/// [`SpectraBundle::full_alpha`]: crate::SpectraBundle::full_alpha
pub fn parametric_capacity(
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    alpha: &[f64],
    x: &[f64],
) -> Result<f64> {
    let base = data_processing_ceiling(ch, pb, dims)?;
    let loss: f64 = alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| libm::log2(1.0 - a / (1.0 + x.get(i).copied().unwrap_or(0.0))))
        .sum();
    Ok(base + loss)
}

/// Naive amplify-and-forward: `X = c·I` with `c` chosen so that
/// `tr{X C Xᴴ} = P2`. For `s ≠ u` the u×s identity pattern is used and the
/// solution is tagged `"naf-rect"`.
pub fn naf_rtm(ch: &ChannelSet, pb: &PowerBudget, dims: Dims) -> Result<RtmSolution> {
    validate(dims, ch, pb)?;
    let c_mat = power_matrix(ch, pb, dims);
    let m = dims.s.min(dims.u);
    let pattern_trace: f64 = (0..m).map(|i| c_mat[(i, i)].re).sum();
    let gain2 = pb.p2 / pattern_trace;
    let x_matrix = CMatrix::identity(dims.u, dims.s) * re(libm::sqrt(gain2));
    let relay_power_used = matalg::trace_re(&(&x_matrix * &c_mat * x_matrix.adjoint()));
    let x: Vec<f64> = alloc::vec![gain2; m];
    let wf = WaterfillSolution {
        active: x.iter().map(|&v| v > 0.0).collect(),
        x,
        xi: WaterLevel::NotApplicable,
        achieved_budget: relay_power_used,
    };
    Ok(RtmSolution {
        kind: RtmKind::Naf,
        x_matrix,
        wf,
        spectra: None,
        relay_power_used,
        note: (dims.s != dims.u).then_some("naf-rect"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_cmatrix;

    fn scalar() -> (ChannelSet, PowerBudget, Dims) {
        let one = CMatrix::from_element(1, 1, re(1.0));
        (
            ChannelSet {
                h0: CMatrix::zeros(1, 1),
                h1: one.clone(),
                h2: one,
            },
            PowerBudget::new(1.0, 2.0).unwrap(),
            Dims::square(1).unwrap(),
        )
    }

    fn seeded(dims: Dims, seed: u64) -> ChannelSet {
        ChannelSet {
            h0: random_cmatrix(dims.r, dims.t, seed),
            h1: random_cmatrix(dims.s, dims.t, seed + 1),
            h2: random_cmatrix(dims.r, dims.u, seed + 2),
        }
    }

    #[test]
    fn capacity_examples() {
        let dims = Dims::square(2).unwrap();
        let pb = PowerBudget::new(2.0, 2.0).unwrap();
        let mut ch = seeded(dims, 3);
        ch.h0 = CMatrix::zeros(2, 2);
        let zero = CMatrix::zeros(2, 2);
        assert!(capacity(&ch, &pb, dims, &zero).unwrap().bits.abs() < 1e-12);
        ch.h0 = identity(2);
        assert!((capacity(&ch, &pb, dims, &zero).unwrap().bits - 2.0).abs() < 1e-12);

        let (ch, pb, dims) = scalar();
        let x = CMatrix::from_element(1, 1, re(1.0));
        let r = capacity(&ch, &pb, dims, &x).unwrap();
        assert!((r.bits - libm::log2(1.5)).abs() < 1e-14);
        assert!((r.relay_power_used - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ostbc_examples() {
        let (ch, pb, dims) = scalar();
        let x = CMatrix::from_element(1, 1, re(1.0));
        let r = ostbc_capacity(&ch, &pb, dims, &x, 1.0).unwrap();
        assert!((r.bits - libm::log2(1.5)).abs() < 1e-14);
        let zero = CMatrix::zeros(1, 1);
        let mut ch0 = ch.clone();
        ch0.h0 = CMatrix::zeros(1, 1);
        for rate in [0.25, 0.5, 1.0] {
            assert_eq!(
                ostbc_capacity(&ch0, &pb, dims, &zero, rate).unwrap().bits,
                0.0
            );
        }
        assert_eq!(
            ostbc_capacity(&ch, &pb, dims, &x, 0.0),
            Err(Error::InvalidSymbolRate(0.0))
        );
        assert!(ostbc_capacity(&ch, &pb, dims, &x, 1.5).is_err());
    }

    #[test]
    fn ostbc_below_capacity_seeded() {
        let dims = Dims::square(4).unwrap();
        let pb = PowerBudget::new(4.0, 4.0).unwrap();
        for seed in 0..20 {
            let ch = seeded(dims, 10 * seed);
            let x = random_cmatrix(4, 4, 999 + seed);
            let c = capacity(&ch, &pb, dims, &x).unwrap().bits;
            let o = ostbc_capacity(&ch, &pb, dims, &x, 1.0).unwrap().bits;
            assert!(o <= c + 1e-12, "seed {seed}: {o} > {c}");
        }
    }

    #[test]
    fn direct_link_examples() {
        let dims = Dims::square(2).unwrap();
        let pb = PowerBudget::new(2.0, 1.0).unwrap();
        assert_eq!(
            direct_link_capacity(&CMatrix::zeros(2, 2), &pb, dims)
                .unwrap()
                .bits,
            0.0
        );
        let r = direct_link_capacity(&identity(2), &pb, dims).unwrap();
        assert!((r.bits - 2.0).abs() < 1e-14);

        let ch = seeded(dims, 8);
        let with_zero_x = capacity(&ch, &pb, dims, &CMatrix::zeros(2, 2))
            .unwrap()
            .bits;
        let direct = direct_link_capacity(&ch.h0, &pb, dims).unwrap().bits;
        assert!((with_zero_x - direct).abs() < 1e-12);
    }

    #[test]
    fn naf_examples() {
        let dims = Dims::square(2).unwrap();
        let pb = PowerBudget::new(2.0, 2.0).unwrap();
        let mut ch = seeded(dims, 4);
        ch.h1 = CMatrix::zeros(2, 2);
        let sol = naf_rtm(&ch, &pb, dims).unwrap();
        assert!(matalg::frobenius(&(&sol.x_matrix - identity(2))) < 1e-15);
        assert_eq!(sol.note, None);

        let (ch, pb, dims) = scalar();
        let sol = naf_rtm(&ch, &pb, dims).unwrap();
        assert!((sol.x_matrix[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((sol.relay_power_used - 2.0).abs() < 1e-15);

        let dims = Dims::new(2, 2, 3, 2).unwrap();
        let ch = seeded(dims, 5);
        let pb = PowerBudget::new(2.0, 2.0).unwrap();
        let sol = naf_rtm(&ch, &pb, dims).unwrap();
        assert_eq!(sol.note, Some("naf-rect"));
        assert_eq!(sol.x_matrix.shape(), (2, 3));
        assert!((sol.relay_power_used - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let (ch, pb, dims) = scalar();
        let bad = CMatrix::zeros(2, 1);
        assert!(matches!(
            capacity(&ch, &pb, dims, &bad),
            Err(Error::ShapeMismatch { matrix: "x", .. })
        ));
    }
}
