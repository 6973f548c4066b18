//! Relay network description: antenna counts, channel matrices, power
//! budgets, and the SNR-parameterized scenario used by the simulations.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::matalg::CMatrix;
use crate::{Error, Result};

/// Antenna counts: `t` source transmit, `r` destination receive, `s` relay
/// receive and `u` relay transmit antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub t: usize,
    pub r: usize,
    pub s: usize,
    pub u: usize,
}

impl Dims {
    pub fn new(t: usize, r: usize, s: usize, u: usize) -> Result<Self> {
        let d = Dims { t, r, s, u };
        d.check()?;
        Ok(d)
    }

    /// All four counts equal to `m`.
    pub fn square(m: usize) -> Result<Self> {
        Self::new(m, m, m, m)
    }

    pub fn check(&self) -> Result<()> {
        if self.t == 0 || self.r == 0 || self.s == 0 || self.u == 0 {
            return Err(Error::InvalidDims);
        }
        Ok(())
    }
}

/// One channel realization: `h0` is S→D (r×t), `h1` is S→R (s×t) and `h2`
/// is R→D (r×u).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h0: CMatrix,
    pub h1: CMatrix,
    pub h2: CMatrix,
}

impl ChannelSet {
    pub fn zeros(dims: Dims) -> Self {
        ChannelSet {
            h0: CMatrix::zeros(dims.r, dims.t),
            h1: CMatrix::zeros(dims.s, dims.t),
            h2: CMatrix::zeros(dims.r, dims.u),
        }
    }
}

/// Average transmit powers of the source (`p1`) and the relay (`p2`), linear
/// units. Noise at every receiver is unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub p1: f64,
    pub p2: f64,
}

impl PowerBudget {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let pb = PowerBudget { p1, p2 };
        pb.check()?;
        Ok(pb)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p1.is_finite() && self.p1 > 0.0) {
            return Err(Error::InvalidPower {
                what: "p1",
                value: self.p1,
            });
        }
        if !(self.p2.is_finite() && self.p2 >= 0.0) {
            return Err(Error::InvalidPower {
                what: "p2",
                value: self.p2,
            });
        }
        Ok(())
    }
}

/// SNR triple (dB) for a given antenna configuration.
///
/// `rho0` is the direct-link SNR, `rho1` the S→R SNR and `rho2` the R→D SNR.
/// With the direct link disabled `rho0_db` is ignored and H0 is forced to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrScenario {
    pub rho0_db: f64,
    pub rho1_db: f64,
    pub rho2_db: f64,
    pub dims: Dims,
    pub direct_link_enabled: bool,
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

fn scaled(m: &CMatrix, gain: f64) -> CMatrix {
    m * Complex64::new(libm::sqrt(gain), 0.0)
}

/// Maps an SNR scenario and a unit-variance channel draw onto the generic
/// network model.
///
/// The channels are scaled by `√ρ` per hop and the powers are fixed to
/// `P1 = t`, `P2 = u`, so every capacity and power expression of the generic
/// model reduces to its SNR form with the relay matrix `X̌ = √ρ1 · X`.
pub fn translate_scenario(scn: &SnrScenario, raw: &ChannelSet) -> (ChannelSet, PowerBudget) {
    let h0 = if scn.direct_link_enabled {
        scaled(&raw.h0, db_to_linear(scn.rho0_db))
    } else {
        CMatrix::zeros(raw.h0.nrows(), raw.h0.ncols())
    };
    let ch = ChannelSet {
        h0,
        h1: scaled(&raw.h1, db_to_linear(scn.rho1_db)),
        h2: scaled(&raw.h2, db_to_linear(scn.rho2_db)),
    };
    let pb = PowerBudget {
        p1: scn.dims.t as f64,
        p2: scn.dims.u as f64,
    };
    (ch, pb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// H1 is identically zero: the relay hears nothing.
    SourceRelayDead,
    /// H2 is identically zero: the relay cannot reach the destination.
    RelayDestinationDead,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Validation {
    pub warnings: Vec<Warning>,
}

impl Validation {
    pub fn relay_path_dead(&self) -> bool {
        !self.warnings.is_empty()
    }
}

fn check_matrix(name: &'static str, m: &CMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::ShapeMismatch {
            matrix: name,
            expected: (rows, cols),
            found: m.shape(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { what: name });
    }
    Ok(())
}

fn is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

pub fn validate(dims: Dims, ch: &ChannelSet, pb: &PowerBudget) -> Result<Validation> {
    dims.check()?;
    check_matrix("h0", &ch.h0, dims.r, dims.t)?;
    check_matrix("h1", &ch.h1, dims.s, dims.t)?;
    check_matrix("h2", &ch.h2, dims.r, dims.u)?;
    pb.check()?;

    let mut v = Validation::default();
    if is_zero(&ch.h1) {
        v.warnings.push(Warning::SourceRelayDead);
    }
    if is_zero(&ch.h2) {
        v.warnings.push(Warning::RelayDestinationDead);
    }
    Ok(v)
}

/// Shape check for a relay transform matrix (u×s).
pub(crate) fn check_rtm(dims: Dims, x: &CMatrix) -> Result<()> {
    check_matrix("x", x, dims.u, dims.s)
}
