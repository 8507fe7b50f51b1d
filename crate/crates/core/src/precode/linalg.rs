use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Gram matrices with a worse eigenvalue spread than this are treated as
/// rank deficient.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Eigenvalue check on a Hermitian PSD Gram matrix before it is inverted.
fn check_gram(gram: &DMatrix<C64>) -> Result<()> {
    let trace: f64 = (0..gram.nrows()).map(|i| gram[(i, i)].re).sum();
    let eig = gram.clone().symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    if !max.is_finite() || max <= 0.0 {
        return Err(Error::SingularEffectiveChannel { condition: f64::INFINITY });
    }
    if min < -1e-12 * trace {
        // not PSD beyond rounding: the input was not a Gram matrix of finite data
        return Err(Error::SingularEffectiveChannel { condition: f64::INFINITY });
    }
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if condition > CONDITION_LIMIT {
        return Err(Error::SingularEffectiveChannel { condition });
    }
    Ok(())
}

/// Solves `A X = H` for Hermitian positive-definite `A` and returns `X^H`,
/// i.e. `H^H A^{-1}`.
fn right_solve(a: DMatrix<C64>, h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let chol = a
        .cholesky()
        .ok_or(Error::SingularEffectiveChannel { condition: f64::INFINITY })?;
    Ok(chol.solve(h).adjoint())
}

/// Zero-forcing precoder `H^H (H H^H)^{-1}`; `H` is `n x r`, result `r x n`.
pub fn zf_precoder(h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if h.nrows() == 0 {
        return Ok(DMatrix::zeros(h.ncols(), 0));
    }
    let gram = h * h.adjoint();
    check_gram(&gram)?;
    right_solve(gram, h)
}

/// Regularized precoder `H^H ((p_T/K) H H^H + sigma^2 I)^{-1}`.
pub fn mmse_precoder(h: &DMatrix<C64>, p_t_w: f64, users: usize, noise_w: f64) -> Result<DMatrix<C64>> {
    let n = h.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(h.ncols(), 0));
    }
    let per_stream = p_t_w / users as f64;
    let mut a = (h * h.adjoint()) * C64::from(per_stream);
    if noise_w > 0.0 {
        for i in 0..n {
            a[(i, i)] += noise_w;
        }
    } else {
        check_gram(&a)?;
    }
    right_solve(a, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eye(n: usize) -> DMatrix<C64> {
        DMatrix::identity(n, n)
    }

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_h(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, r, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn zf_of_identity_and_scaled_identity() {
        assert!(max_abs(&(zf_precoder(&eye(2)).unwrap() - eye(2))) < 1e-15);
        let h = eye(2) * C64::from(2.0);
        assert!(max_abs(&(zf_precoder(&h).unwrap() - eye(2) * C64::from(0.5))) < 1e-15);
    }

    #[test]
    fn zf_matches_direct_inverse_on_square_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = random_h(&mut rng, 2, 2);
            let direct = h.clone().try_inverse().unwrap();
            let v = zf_precoder(&h).unwrap();
            assert!(max_abs(&(v - direct)) < 1e-9);
        }
    }

    #[test]
    fn zf_residual_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.random_range(1..=4);
            let r = rng.random_range(n..=6);
            let h = random_h(&mut rng, n, r);
            let v = zf_precoder(&h).unwrap();
            assert!(max_abs(&(&h * v - eye(n))) < 1e-9);
        }
    }

    #[test]
    fn zf_rejects_rank_deficient() {
        let row = DMatrix::from_row_slice(1, 2, &[C64::new(1.0, 0.5), C64::new(-0.3, 0.2)]);
        let h = DMatrix::from_fn(2, 2, |_, j| row[(0, j)]);
        assert!(matches!(zf_precoder(&h), Err(Error::SingularEffectiveChannel { .. })));
        assert!(zf_precoder(&DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn mmse_examples() {
        let v = mmse_precoder(&eye(2), 2.0, 2, 1.0).unwrap();
        assert!(max_abs(&(v - eye(2) * C64::from(0.5))) < 1e-15);
        let v = mmse_precoder(&DMatrix::zeros(2, 3), 1.0, 2, 1.0).unwrap();
        assert_eq!(max_abs(&v), 0.0);
        assert_eq!(v.shape(), (3, 2));
    }

    #[test]
    fn mmse_without_noise_needs_full_rank() {
        let h = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(mmse_precoder(&h, 1.0, 2, 0.0).is_err());
        assert!(mmse_precoder(&h, 1.0, 2, 1e-3).is_ok());
    }

    #[test]
    fn mmse_approaches_zf_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let h = random_h(&mut rng, 3, 4);
            let scale = h.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let zf = zf_precoder(&h).unwrap();
            let mmse = mmse_precoder(&h, 1.0, 1, 1e-12 * scale).unwrap();
            for j in 0..3 {
                let a = zf.column(j) / C64::from(zf.column(j).norm());
                let b = mmse.column(j) / C64::from(mmse.column(j).norm());
                assert!((a - b).norm() < 1e-6);
            }
        }
    }
}
