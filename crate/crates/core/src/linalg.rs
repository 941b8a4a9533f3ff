//! Small dense helpers for Hermitian matrices.

use crate::{CMat, Error, Result, C64};
use nalgebra::SymmetricEigen;

pub fn identity(r: usize) -> CMat {
    CMat::identity(r, r)
}

pub fn scalar(c: C64, r: usize) -> CMat {
    CMat::identity(r, r) * c
}

pub fn i_unit() -> C64 {
    C64::new(0.0, 1.0)
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    frob(&(m - m.adjoint()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn herm_apply<F: Fn(f64) -> f64>(m: &CMat, f: F) -> CMat {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let v = &eig.eigenvectors;
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|x| C64::new(f(x), 0.0)));
    v * d * v.adjoint()
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn herm_sqrt(m: &CMat) -> Result<CMat> {
    check_pd(m)?;
    Ok(herm_apply(m, f64::sqrt))
}

pub fn herm_inv_sqrt(m: &CMat) -> Result<CMat> {
    check_pd(m)?;
    Ok(herm_apply(m, |x| 1.0 / x.sqrt()))
}

pub fn herm_log(m: &CMat) -> Result<CMat> {
    check_pd(m)?;
    Ok(herm_apply(m, f64::ln))
}

pub fn herm_exp(m: &CMat) -> CMat {
    herm_apply(m, f64::exp)
}

pub fn check_pd(m: &CMat) -> Result<()> {
    let lo = min_eigenvalue(m);
    if lo > 0.0 && lo.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("metric is not positive definite (min eigenvalue {lo:e})")))
    }
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone().try_inverse().ok_or_else(|| Error::Domain("singular matrix".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn sqrt_squares_back() {
        let mut r = rng::seeded(3);
        let a = rng::matrix(&mut r, 3, 3);
        let h = &a * a.adjoint() + identity(3);
        let s = herm_sqrt(&h).unwrap();
        assert!(frob(&(&s * &s - &h)) < 1e-12);
    }

    #[test]
    fn exp_log_inverse() {
        let mut r = rng::seeded(4);
        let x = rng::hermitian(&mut r, 2);
        let back = herm_log(&herm_exp(&x)).unwrap();
        assert!(frob(&(back - x)) < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        assert!(herm_sqrt(&m).is_err());
    }
}
