use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matalg::{hermitian_part, CMatrix};
use crate::Complex64;

pub fn random_cmatrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng_cmatrix(rows, cols, &mut rng)
}

pub fn rng_cmatrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}

pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    hermitian_part(&random_cmatrix(n, n, seed))
}
