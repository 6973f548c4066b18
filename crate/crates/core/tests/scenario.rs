mod common;

use common::{cn_matrix, log2_abs_det, raw_channels, rng};
use relay_rtm_core::evaluate::{capacity, ostbc_capacity, relay_power};
use relay_rtm_core::network::{db_to_linear, translate_scenario, SnrScenario};
use relay_rtm_core::{CMatrix, Complex64, Dims};

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Capacity in SNR form, written out term by term for a relay matrix `x̌`.
fn snr_form_capacity(h0: &CMatrix, h1: &CMatrix, h2: &CMatrix, xc: &CMatrix, rho: [f64; 3]) -> f64 {
    let [r0, r1, r2] = rho;
    let m = h2.nrows();
    let inner = CMatrix::identity(m, m) + h2 * xc * xc.adjoint() * h2.adjoint() * c(r2 / r1);
    let inv = inner.try_inverse().unwrap();
    let t = h1.ncols();
    let arg = CMatrix::identity(t, t)
        + h0.adjoint() * h0 * c(r0)
        + h1.adjoint() * xc.adjoint() * h2.adjoint() * inv * h2 * xc * h1 * c(r2);
    log2_abs_det(&arg)
}

fn snr_form_ostbc(h0: &CMatrix, h1: &CMatrix, h2: &CMatrix, xc: &CMatrix, rho: [f64; 3]) -> f64 {
    let [r0, r1, r2] = rho;
    let m = h2.nrows();
    let inner = CMatrix::identity(m, m) + h2 * xc * xc.adjoint() * h2.adjoint() * c(r2 / r1);
    let inv = inner.try_inverse().unwrap();
    let arg = h0.adjoint() * h0 * c(r0)
        + h1.adjoint() * xc.adjoint() * h2.adjoint() * inv * h2 * xc * h1 * c(r2);
    (1.0 + arg.trace().re).log2()
}

#[test]
fn translated_network_matches_snr_form() {
    let mut r = rng(11);
    let dims = Dims::square(4).unwrap();
    for direct in [false, true] {
        let raw = raw_channels(dims, &mut r);
        let scn = SnrScenario {
            rho0_db: 3.0,
            rho1_db: 10.0,
            rho2_db: 10.0,
            dims,
            direct_link_enabled: direct,
        };
        let (ch, pb) = translate_scenario(&scn, &raw);
        let rho0 = if direct { db_to_linear(3.0) } else { 0.0 };
        let rho = [rho0, 10.0, 10.0];
        for _ in 0..20 {
            let xc = cn_matrix(4, 4, &mut r);
            let x = &xc * c(1.0 / rho[1].sqrt());
            let generic = capacity(&ch, &pb, dims, &x).unwrap().bits;
            let snr = snr_form_capacity(&raw.h0, &raw.h1, &raw.h2, &xc, rho);
            assert!((generic - snr).abs() < 1e-9, "{generic} vs {snr}");
            let generic = ostbc_capacity(&ch, &pb, dims, &x, 1.0).unwrap().bits;
            let snr = snr_form_ostbc(&raw.h0, &raw.h1, &raw.h2, &xc, rho);
            assert!((generic - snr).abs() < 1e-9, "{generic} vs {snr}");

            // tr{X̌(I + ρ1 H1H1ᴴ)X̌ᴴ} = ρ1 · tr{X C Xᴴ}
            let cm = CMatrix::identity(4, 4) + &raw.h1 * raw.h1.adjoint() * c(rho[1]);
            let snr_power = (&xc * cm * xc.adjoint()).trace().re;
            let generic_power = relay_power(&ch, &pb, dims, &x);
            assert!((snr_power - rho[1] * generic_power).abs() < 1e-9 * snr_power);
        }
    }
}

#[test]
fn budget_matches_snr_constraint() {
    let dims = Dims::new(2, 2, 8, 8).unwrap();
    let scn = SnrScenario {
        rho0_db: 10.0,
        rho1_db: 10.0,
        rho2_db: 20.0,
        dims,
        direct_link_enabled: true,
    };
    let (_, pb) = translate_scenario(&scn, &raw_channels(dims, &mut rng(1)));
    assert_eq!((pb.p1, pb.p2), (2.0, 8.0));
}
