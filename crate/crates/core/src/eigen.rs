//! Eigenvalues of general dense matrices.
//!
//! nalgebra's Francis iteration has no exceptional shifts and can cycle
//! forever on matrices with exactly repeated eigenvalues, such as `L(e,e)` at
//! a tripotent. Iterations are capped here and a stalled matrix is retried
//! after a fixed pseudo-random unitary similarity, which keeps the spectrum
//! and breaks the structure.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix};

use crate::rng::{complex_gaussian, gaussian, trial_rng};
use crate::C64;

const MAX_ITERATIONS_PER_ROW: usize = 200;
const RETRIES: u64 = 8;

/// Eigenvalues of a real matrix, or `None` if the iteration never settles.
pub fn real_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<C64>> {
    let n = m.nrows();
    let niter = MAX_ITERATIONS_PER_ROW * n.max(1);
    if let Some(s) = m.clone().try_schur(f64::EPSILON, niter) {
        return Some(s.complex_eigenvalues().iter().copied().collect());
    }
    (0..RETRIES).find_map(|attempt| {
        let mut rng = trial_rng(0x5eed, attempt);
        let q = DMatrix::from_fn(n, n, |_, _| gaussian(&mut rng)).qr().q();
        let similar = q.transpose() * m * &q;
        similar
            .try_schur(f64::EPSILON, niter)
            .map(|s| s.complex_eigenvalues().iter().copied().collect())
    })
}

/// Eigenvalues of a complex matrix, or `None` if the iteration never settles.
pub fn complex_eigenvalues(m: &DMatrix<C64>) -> Option<Vec<C64>> {
    let n = m.nrows();
    let niter = MAX_ITERATIONS_PER_ROW * n.max(1);
    let attempt = |a: DMatrix<C64>| {
        a.try_schur(f64::EPSILON, niter)
            .and_then(|s| s.eigenvalues())
            .map(|e| e.iter().copied().collect())
    };
    if let Some(e) = attempt(m.clone()) {
        return Some(e);
    }
    (0..RETRIES).find_map(|k| {
        let mut rng = trial_rng(0x5eed, k);
        let q = DMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng))
            .qr()
            .q();
        attempt(q.adjoint() * m * &q)
    })
}

/// `max |λ|`, NaN if the eigenvalues cannot be computed.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    match real_eigenvalues(m) {
        Some(e) => e.iter().map(|z| z.modulus()).fold(0.0, f64::max),
        None => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TripleSystem;

    #[test]
    fn structured_tripotent_operator_terminates() {
        // a custom copy of M(2,3) reaches the stalling case through random tripotents
        let m = TripleSystem::matrix(2, 3).unwrap();
        let sys = TripleSystem::custom(6, m.structure().to_vec()).unwrap();
        let e = m.random_tripotent(9).unwrap();
        let l = sys.l_operator(&e, &e).unwrap();
        let r = spectral_radius(l.matrix());
        assert!((r - 1.0).abs() < 1e-9, "{r}");
    }

    #[test]
    fn rotation_has_unit_modulus_eigenvalues() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut e = real_eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - C64::new(0.0, -1.0)).modulus() < 1e-14);
        assert!((e[1] - C64::new(0.0, 1.0)).modulus() < 1e-14);
        let c = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 1.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        );
        let mut e = complex_eigenvalues(&c).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((e[0] - C64::new(-1.0, 0.0)).modulus() < 1e-14);
        assert!((e[1] - C64::new(2.0, 1.0)).modulus() < 1e-14);
    }
}
