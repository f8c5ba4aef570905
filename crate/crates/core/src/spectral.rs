//! Odd-power functional calculus.
//!
//! Every element `a` of a finite-dimensional JB*-triple is a finite positive
//! combination `a = Σ λ_i e_i` of mutually orthogonal tripotents. Matrix
//! systems read this off the singular value decomposition. Custom systems work
//! inside the subtriple generated by `a`, the span of `a, a^[3], a^[5], ..`,
//! which is the Krylov space of `L(a,a)` started at `a`; there `L(a,a)` acts
//! diagonally with eigenvalues `λ_i^2` and eigenvectors proportional to `e_i`.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::operator::ComplexLinearMap;
use crate::svd::Svd;
use crate::{Element, Error, Result, TripleSystem, C64, CLUSTER_GAP, RANK_TOL};

/// Singular values closer than this (relative) are treated as equal.
const ROUNDOFF: f64 = 1e-13;

/// Arnoldi breakdown threshold relative to `‖L(a,a)‖`.
const KRYLOV_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub lambda: f64,
    pub tripotent: Element,
}

/// `a = Σ λ_i e_i` with `λ_i` strictly decreasing and `e_i` mutually
/// orthogonal tripotents.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub pairs: Vec<SpectralPair>,
    pub element: Element,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> Element {
        self.pairs
            .iter()
            .fold(Element::zeros(self.element.dim()), |acc, p| {
                &acc + &p.tripotent.scale_real(p.lambda)
            })
    }

    /// `Σ f(λ_i) e_i`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Element {
        self.pairs
            .iter()
            .fold(Element::zeros(self.element.dim()), |acc, p| {
                &acc + &p.tripotent.scale_real(f(p.lambda))
            })
    }
}

impl TripleSystem {
    /// `a^[2n-1]`, with `a^[1] = a` and `a^[2k+1] = {a, a^[2k-1], a}`.
    pub fn odd_power(&self, a: &Element, n: usize) -> Result<Element> {
        self.check(a.dim())?;
        if n == 0 {
            return Err(Error::InvalidDimension(
                "odd power index must be at least 1",
            ));
        }
        let mut p = a.clone();
        for _ in 1..n {
            p = self.product_unchecked(a, &p, a);
        }
        Ok(p)
    }

    /// The element `b` of the subtriple generated by `a` with `b^[2n-1] = a`.
    pub fn odd_root(&self, a: &Element, n: usize) -> Result<Element> {
        self.check(a.dim())?;
        if n == 0 {
            return Err(Error::InvalidDimension("odd root index must be at least 1"));
        }
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let exponent = 1.0 / (2 * n - 1) as f64;
        self.functional_calculus(a, |x| ComplexField::powf(x, exponent))
    }

    /// Range tripotent `r(a) = Σ e_i`, the limit of the odd roots of `a`;
    /// `r(0) = 0`. Only custom systems can fail, with `ClusterAmbiguity`.
    pub fn range_tripotent(&self, a: &Element) -> Result<Element> {
        self.check(a.dim())?;
        if a.is_zero() {
            return Ok(self.zero());
        }
        self.functional_calculus(a, |_| 1.0)
    }

    /// Support tripotent of a norm-one element: the tripotent of the top
    /// spectral value, the limit of `a^[2n-1]`.
    pub fn support_tripotent(&self, a: &Element, tol: f64) -> Result<Element> {
        self.check(a.dim())?;
        let norm = self.norm(a);
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormOne { norm });
        }
        let dec = self.spectral_decomposition(a, CLUSTER_GAP)?;
        Ok(dec
            .pairs
            .into_iter()
            .next()
            .map(|p| p.tripotent)
            .unwrap_or_else(|| self.zero()))
    }

    /// Split `a` into `Σ λ_i e_i`. Values whose relative gap is below `gap`
    /// but above roundoff raise `ClusterAmbiguity`.
    pub fn spectral_decomposition(&self, a: &Element, gap: f64) -> Result<SpectralDecomposition> {
        self.check(a.dim())?;
        let pairs = if a.is_zero() {
            Vec::new()
        } else {
            match self.to_matrix(a) {
                Some(m) => self.matrix_pairs(m, gap)?,
                None => self.krylov_pairs(a, gap)?,
            }
        };
        Ok(SpectralDecomposition {
            pairs,
            element: a.clone(),
        })
    }

    fn functional_calculus(&self, a: &Element, f: impl Fn(f64) -> f64) -> Result<Element> {
        match self.to_matrix(a) {
            // per singular value, no clustering needed
            Some(m) => {
                let (rows, cols) = m.shape();
                let svd = Svd::new(&m);
                let mut out = DMatrix::zeros(rows, cols);
                for i in 0..svd.rank(RANK_TOL) {
                    out += svd.outer(i) * C64::new(f(svd.singular_values[i]), 0.0);
                }
                self.from_matrix(&out)
            }
            None => Ok(self.spectral_decomposition(a, CLUSTER_GAP)?.apply(f)),
        }
    }

    fn matrix_pairs(&self, m: DMatrix<C64>, gap: f64) -> Result<Vec<SpectralPair>> {
        let (rows, cols) = m.shape();
        let svd = Svd::new(&m);
        let sv = &svd.singular_values;
        let order: Vec<usize> = (0..sv.len()).collect();
        let top = svd.top();
        if top == 0.0 {
            return Ok(Vec::new());
        }

        let mut pairs: Vec<SpectralPair> = Vec::new();
        let mut cluster: Vec<usize> = Vec::new();
        let mut flush = |cluster: &mut Vec<usize>| -> Result<()> {
            if cluster.is_empty() {
                return Ok(());
            }
            let mut t = DMatrix::zeros(rows, cols);
            let mut lambda = 0.0;
            for &i in cluster.iter() {
                t += svd.outer(i);
                lambda += sv[i];
            }
            lambda /= cluster.len() as f64;
            pairs.push(SpectralPair {
                lambda,
                tripotent: self.from_matrix(&t)?,
            });
            cluster.clear();
            Ok(())
        };
        for &i in order.iter().filter(|&&i| sv[i] > RANK_TOL * top) {
            if let Some(&prev) = cluster.last() {
                let diff = sv[prev] - sv[i];
                if diff > ROUNDOFF * top && diff < gap * top {
                    return Err(Error::ClusterAmbiguity {
                        first: sv[prev],
                        second: sv[i],
                    });
                }
                if diff > ROUNDOFF * top {
                    flush(&mut cluster)?;
                }
            }
            cluster.push(i);
        }
        flush(&mut cluster)?;
        Ok(pairs)
    }

    fn krylov_pairs(&self, a: &Element, gap: f64) -> Result<Vec<SpectralPair>> {
        let l = self.l_matrix_unchecked(a, a);
        let l_norm = ComplexLinearMap::new(l.clone()).norm();
        let d = self.dim();

        // Arnoldi with full reorthogonalization
        let mut basis: Vec<DVector<C64>> = alloc::vec![a.coords() / C64::new(a.coord_norm(), 0.0)];
        while basis.len() < d {
            let mut w = &l * basis.last().unwrap();
            for _ in 0..2 {
                for q in &basis {
                    let h = q.dotc(&w);
                    w -= q * h;
                }
            }
            let h = w.norm();
            if h <= KRYLOV_TOL * l_norm {
                break;
            }
            basis.push(w / C64::new(h, 0.0));
        }
        let k = basis.len();
        let q = DMatrix::from_columns(&basis);
        let h = q.adjoint() * &l * &q;

        let eig = crate::eigen::complex_eigenvalues(&h).ok_or(Error::ClusterAmbiguity {
            first: 0.0,
            second: 0.0,
        })?;
        let mut mus: Vec<f64> = eig.iter().map(|z| z.re.max(0.0)).collect();
        mus.sort_by(|x, y| y.total_cmp(x));
        let top = ComplexField::sqrt(mus[0]);
        if top == 0.0 {
            return Ok(Vec::new());
        }
        let lambdas: Vec<f64> = mus
            .iter()
            .map(|&m| ComplexField::sqrt(m))
            .filter(|&s| s > RANK_TOL * top)
            .collect();
        for w in lambdas.windows(2) {
            if w[0] - w[1] < gap * top {
                return Err(Error::ClusterAmbiguity {
                    first: w[0],
                    second: w[1],
                });
            }
        }

        // eigenvectors of H as null vectors of H - μ I
        let vecs: Vec<DVector<C64>> = lambdas
            .iter()
            .map(|&s| {
                let shifted = &h - DMatrix::<C64>::identity(k, k) * C64::new(s * s, 0.0);
                let svd = Svd::new(&shifted);
                svd.v.column(k - 1).into_owned()
            })
            .collect();
        let y = DMatrix::from_columns(&vecs);
        let coords = q.adjoint() * a.coords();
        // a lies in span{y_j} up to the dropped noise directions
        let beta = if y.ncols() == k {
            y.clone().lu().solve(&coords)
        } else {
            least_squares(&y, &coords)
        }
        .ok_or(Error::ClusterAmbiguity {
            first: top,
            second: 0.0,
        })?;

        Ok(lambdas
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let coeff = beta[j] / C64::new(s, 0.0);
                let e = &q * y.column(j) * coeff;
                SpectralPair {
                    lambda: s,
                    tripotent: Element::new(e),
                }
            })
            .collect())
    }
}

/// Least-squares solution of a full-column-rank tall system.
fn least_squares(y: &DMatrix<C64>, b: &DVector<C64>) -> Option<DVector<C64>> {
    let qr = y.clone().qr();
    qr.r().solve_upper_triangular(&(qr.q().adjoint() * b))
}
