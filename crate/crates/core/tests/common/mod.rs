#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use relay_rtm_core::network::{translate_scenario, SnrScenario};
use relay_rtm_core::{CMatrix, ChannelSet, Complex64, Dims, PowerBudget};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}

pub fn raw_channels(dims: Dims, rng: &mut impl Rng) -> ChannelSet {
    ChannelSet {
        h0: cn_matrix(dims.r, dims.t, rng),
        h1: cn_matrix(dims.s, dims.t, rng),
        h2: cn_matrix(dims.r, dims.u, rng),
    }
}

/// Channel set and powers for an SNR scenario, `rho0_db = None` disables the direct link.
pub fn snr_network(
    dims: Dims,
    rho0_db: Option<f64>,
    rho1_db: f64,
    rho2_db: f64,
    rng: &mut impl Rng,
) -> (ChannelSet, PowerBudget) {
    let scn = SnrScenario {
        rho0_db: rho0_db.unwrap_or(0.0),
        rho1_db,
        rho2_db,
        dims,
        direct_link_enabled: rho0_db.is_some(),
    };
    translate_scenario(&scn, &raw_channels(dims, rng))
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    cn_matrix(n, n, rng).qr().q()
}

/// `log2 |det m|` through LU, independent of the Cholesky path in the library.
pub fn log2_abs_det(m: &CMatrix) -> f64 {
    m.clone().determinant().norm().log2()
}
