//! Dense complex-matrix primitives: Hermitian eigendecomposition with a
//! deterministic ordering and phase convention, thin unitary
//! diagonalizations, and a few Hermitian positive-definite helpers.
//!
//! Problem sizes are a handful of antennas, so everything is dense
//! double-precision complex.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative eigenvalue threshold below which a mode counts as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Allowed elementwise asymmetry, relative to `max(1, max |m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Sorted eigendecomposition `m = U diag(λ) Uᴴ` of a Hermitian matrix.
///
/// Eigenvalues are nonincreasing. Equal eigenvalues keep the column order
/// returned by the underlying symmetric QR iteration (stable sort), and every
/// eigenvector is rotated so that its largest-magnitude component (first one
/// on exact ties) is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// Thin unitary diagonalization keeping only eigenvalues above the rank
/// threshold: `m ≈ u_thin diag(lam_thin) u_thinᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinUd {
    pub u_thin: CMatrix,
    pub lam_thin: Vec<f64>,
    pub rank: usize,
}

pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// `(m + mᴴ) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `aᴴ a`, symmetrized so the result is exactly Hermitian.
pub fn gram(a: &CMatrix) -> CMatrix {
    hermitian_part(&a.ad_mul(a))
}

/// `a aᴴ`, symmetrized so the result is exactly Hermitian.
pub fn outer_gram(a: &CMatrix) -> CMatrix {
    hermitian_part(&(a * a.adjoint()))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite {
            what: "Hermitian input",
        });
    }
    let asym = max_asymmetry(m);
    if asym > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    if rows == 0 {
        return Ok(HermEig {
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }

    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..rows).collect();
    // stable: ties keep factorization order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = CMatrix::zeros(rows, rows);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in col.iter().enumerate() {
            let a = z.norm();
            if a > best {
                best = a;
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            col[pivot].conj() / best
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..rows {
            eigenvectors[(i, dst)] = col[i] * phase;
        }
    }
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Absolute threshold for a relative rank tolerance, floored so that a
/// matrix with tiny entries is not treated as full rank.
pub fn rank_threshold(max_eigenvalue: f64, rank_tol: f64) -> f64 {
    rank_tol * max_eigenvalue.max(1.0)
}

/// Thin UD of a Hermitian PSD matrix. Negative round-off eigenvalues are
/// clamped to zero before thresholding.
pub fn thin_ud(m: &CMatrix, rank_tol: f64) -> Result<ThinUd> {
    let eig = herm_eig(m)?;
    let lmax = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let thr = rank_threshold(lmax, rank_tol);
    let rank = eig
        .eigenvalues
        .iter()
        .take_while(|&&l| l.max(0.0) > thr)
        .count();
    Ok(ThinUd {
        u_thin: eig.eigenvectors.columns(0, rank).into_owned(),
        lam_thin: eig.eigenvalues[..rank].to_vec(),
        rank,
    })
}

/// Elementwise `λ^{-1/2}`.
pub fn inv_sqrt_diag(lam: &[f64]) -> Result<Vec<f64>> {
    lam.iter()
        .enumerate()
        .map(|(index, &value)| {
            if value > 0.0 && value.is_finite() {
                Ok(1.0 / libm::sqrt(value))
            } else {
                Err(Error::NonPositive {
                    what: "eigenvalue",
                    index,
                    value,
                })
            }
        })
        .collect()
}

/// Inverse of a Hermitian positive-definite matrix, falling back to LU when
/// Cholesky breaks down.
pub fn hpd_inverse(m: &CMatrix) -> Option<CMatrix> {
    match Cholesky::new(m.clone()) {
        Some(ch) => Some(hermitian_part(&ch.inverse())),
        None => m.clone().try_inverse(),
    }
}

/// `log2 det m` for Hermitian positive-definite `m`.
pub fn log2_det_hpd(m: &CMatrix) -> Option<f64> {
    if let Some(ch) = Cholesky::new(m.clone()) {
        let l = ch.l_dirty();
        let mut acc = 0.0;
        for i in 0..m.nrows() {
            acc += libm::log2(l[(i, i)].re);
        }
        return Some(2.0 * acc);
    }
    // near-singular round-off: take the eigenvalues instead
    let eig = herm_eig(&hermitian_part(m)).ok()?;
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return None;
    }
    Some(eig.eigenvalues.iter().map(|&l| libm::log2(l)).sum())
}

/// Frobenius residual of `Kᴴ(I + KKᴴ)⁻¹K − [I − (I + KᴴK)⁻¹]`.
pub fn check_kk_identity(k: &CMatrix) -> f64 {
    let (m, n) = k.shape();
    let left_inner = hpd_inverse(&(identity(m) + outer_gram(k)));
    let right_inner = hpd_inverse(&(identity(n) + gram(k)));
    match (left_inner, right_inner) {
        (Some(li), Some(ri)) => {
            let lhs = k.adjoint() * li * k;
            let rhs = identity(n) - ri;
            frobenius(&(lhs - rhs))
        }
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_cmatrix, random_hermitian};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn reconstruct(u: &CMatrix, lam: &[f64]) -> CMatrix {
        let mut d = CMatrix::zeros(lam.len(), lam.len());
        for (i, &l) in lam.iter().enumerate() {
            d[(i, i)] = c(l);
        }
        u * d * u.adjoint()
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![c(1.0), c(2.0)]));
        let eig = herm_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, alloc::vec![2.0, 1.0]);
        assert!((eig.eigenvectors[(1, 0)] - c(1.0)).norm() < 1e-15);
        assert!((eig.eigenvectors[(0, 1)] - c(1.0)).norm() < 1e-15);
        assert!(eig.eigenvectors[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let eig = herm_eig(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(eig.eigenvalues, alloc::vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn seeded_reconstruction() {
        let m = random_hermitian(4, 11);
        let eig = herm_eig(&m).unwrap();
        let err = frobenius(&(reconstruct(&eig.eigenvectors, &eig.eigenvalues) - &m));
        assert!(err < 1e-10 * frobenius(&m));
        let uu = eig.eigenvectors.adjoint() * &eig.eigenvectors;
        assert!(frobenius(&(uu - identity(4))) < 1e-10);
    }

    #[test]
    fn phase_convention_and_determinism() {
        let m = random_hermitian(5, 3);
        let a = herm_eig(&m).unwrap();
        let b = herm_eig(&m).unwrap();
        assert_eq!(a, b);
        for j in 0..5 {
            let col = a.eigenvectors.column(j);
            let (k, _) = col
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                .unwrap();
            assert!(col[k].im.abs() < 1e-15 && col[k].re > 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            herm_eig(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn thin_ud_examples() {
        let t = thin_ud(&identity(2), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(t.rank, 2);
        assert_eq!(t.lam_thin, alloc::vec![1.0, 1.0]);

        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![c(5.0), c(0.0)]));
        let t = thin_ud(&m, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(t.rank, 1);
        assert_eq!(t.lam_thin, alloc::vec![5.0]);
        assert!((t.u_thin[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!(t.u_thin[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn thin_ud_of_tall_gram() {
        let h2 = random_cmatrix(3, 2, 5);
        let b = gram(&h2);
        let t = thin_ud(&b, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(t.rank, 2);
        let err = frobenius(&(reconstruct(&t.u_thin, &t.lam_thin) - &b));
        assert!(err < 1e-10 * frobenius(&b));

        // a wide factor gives a rank-deficient Gram matrix
        let h = random_cmatrix(2, 4, 6);
        let t = thin_ud(&gram(&h), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(t.rank, 2);
        assert_eq!(t.u_thin.shape(), (4, 2));
        let uu = t.u_thin.adjoint() * &t.u_thin;
        assert!(frobenius(&(uu - identity(2))) < 1e-10);
    }

    #[test]
    fn inv_sqrt_examples() {
        assert_eq!(inv_sqrt_diag(&[1.0]).unwrap(), alloc::vec![1.0]);
        assert_eq!(inv_sqrt_diag(&[4.0]).unwrap(), alloc::vec![0.5]);
        let v = inv_sqrt_diag(&[9.0, 0.25]).unwrap();
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        assert!(matches!(
            inv_sqrt_diag(&[1.0, 0.0]),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(inv_sqrt_diag(&[-2.0]).is_err());
    }

    #[test]
    fn kk_identity_examples() {
        assert_eq!(check_kk_identity(&CMatrix::zeros(2, 3)), 0.0);
        assert!(check_kk_identity(&identity(2)) < 1e-15);
        assert!(check_kk_identity(&random_cmatrix(3, 4, 9)) < 1e-12);
    }

    #[test]
    fn log_det_matches_eigenvalues() {
        let m = identity(4) + gram(&random_cmatrix(4, 4, 2));
        let eig = herm_eig(&m).unwrap();
        let want: f64 = eig.eigenvalues.iter().map(|l| libm::log2(*l)).sum();
        assert!((log2_det_hpd(&m).unwrap() - want).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn thin_ud_reconstructs_psd(seed in 0u64..10_000, n in 1usize..7, k in 1usize..7) {
            let h = random_cmatrix(k, n, seed);
            let m = gram(&h);
            let t = thin_ud(&m, DEFAULT_RANK_TOL).unwrap();
            prop_assert!(t.rank <= n.min(k));
            prop_assert!(t.lam_thin.iter().all(|&l| l > 0.0));
            prop_assert!(t.lam_thin.windows(2).all(|w| w[0] >= w[1]));
            let err = frobenius(&(reconstruct(&t.u_thin, &t.lam_thin) - &m));
            prop_assert!(err < 1e-10 * frobenius(&m).max(1e-300));
        }

        #[test]
        fn kk_identity_holds(seed in 0u64..10_000, m in 1usize..6, n in 1usize..6, scale in 0.01f64..5.0) {
            let k = random_cmatrix(m, n, seed) * Complex64::new(scale, 0.0);
            prop_assert!(check_kk_identity(&k) < 1e-10);
        }
    }
}
