//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! nalgebra's bidiagonal SVD occasionally returns factors that do not
//! recompose the input when it is rank deficient, which is exactly the case
//! for Peirce projections and partial isometries. One-sided Jacobi is slower
//! but reliable at the sizes used here. Tall inputs are reduced with a QR
//! step first.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector};

const MAX_SWEEPS: usize = 100;

/// Relative off-diagonal size below which a column pair counts as orthogonal.
const JACOBI_TOL: f64 = 4.0 * f64::EPSILON;

/// Thin decomposition `A = U diag(s) V*` with `s` sorted in decreasing order.
/// Singular vectors belonging to zero singular values may be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd<T: ComplexField<RealField = f64>> {
    pub u: DMatrix<T>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64> + Copy> Svd<T> {
    pub fn new(a: &DMatrix<T>) -> Self {
        let (m, n) = a.shape();
        if m < n {
            let t = Self::new(&a.adjoint());
            return Self {
                u: t.v,
                singular_values: t.singular_values,
                v: t.u,
            };
        }
        if m > n && n > 0 {
            let qr = a.clone().qr();
            let inner = Self::new(&qr.r());
            return Self {
                u: qr.q() * inner.u,
                singular_values: inner.singular_values,
                v: inner.v,
            };
        }
        jacobi(a.clone())
    }

    pub fn len(&self) -> usize {
        self.singular_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.singular_values.is_empty()
    }

    /// Largest singular value, 0 for empty matrices.
    pub fn top(&self) -> f64 {
        self.singular_values.iter().copied().next().unwrap_or(0.0)
    }

    /// Number of singular values above `rel_tol` times the largest.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.top();
        if top == 0.0 {
            return 0;
        }
        self.singular_values
            .iter()
            .filter(|&&s| s > rel_tol * top)
            .count()
    }

    /// `u_i v_i*`.
    pub fn outer(&self, i: usize) -> DMatrix<T> {
        self.u.column(i) * self.v.column(i).adjoint()
    }

    pub fn recompose(&self) -> DMatrix<T> {
        let (m, n) = (self.u.nrows(), self.v.nrows());
        (0..self.len()).fold(DMatrix::zeros(m, n), |acc, i| {
            acc + self.outer(i) * T::from_real(self.singular_values[i])
        })
    }
}

/// Singular values in decreasing order.
pub fn singular_values<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> DVector<f64> {
    Svd::new(a).singular_values
}

/// Square or tall input.
fn jacobi<T: ComplexField<RealField = f64> + Copy>(mut w: DMatrix<T>) -> Svd<T> {
    let n = w.ncols();
    let mut v = DMatrix::<T>::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.modulus();
                if g == 0.0 || g <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // after removing the phase of gamma the pair is a real 2x2 problem
                let phase = gamma.unscale(g).conjugate();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let m = w.nrows();
    let mut u = DMatrix::zeros(m, n);
    let mut vs = DMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &(w.column(j) / T::from_real(norms[j])));
        }
        vs.set_column(k, &v.column(j));
    }
    Svd {
        u,
        singular_values: DVector::from_iterator(n, order.iter().map(|&j| norms[j])),
        v: vs,
    }
}

/// `x_p <- c x_p - s e x_q`, `x_q <- s x_p + c e x_q` with `e` a unit scalar.
fn rotate<T: ComplexField<RealField = f64> + Copy>(
    x: &mut DMatrix<T>,
    p: usize,
    q: usize,
    phase: T,
    c: f64,
    s: f64,
) {
    for i in 0..x.nrows() {
        let xp = x[(i, p)];
        let xq = x[(i, q)] * phase;
        x[(i, p)] = xp.scale(c) - xq.scale(s);
        x[(i, q)] = xp.scale(s) + xq.scale(c);
    }
}
