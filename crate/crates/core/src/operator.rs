//! Real-linear operators on realified coordinates and complex-linear maps.
//!
//! Realified layout: a vector `x` in `C^d` is stored as
//! `(Re x_1, .., Re x_d, Im x_1, .., Im x_d)`. A complex-linear map `A + iB`
//! becomes `[[A, -B], [B, A]]` and a conjugate-linear map `x -> (A + iB) conj(x)`
//! becomes `[[A, B], [B, -A]]`.

use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::svd::Svd;
use crate::system::largest_singular_value;
use crate::{Element, Error, Result, TripleSystem, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearOperator {
    matrix: DMatrix<f64>,
}

impl RealLinearOperator {
    /// Wraps a `2d x 2d` real matrix.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_multiple_of(2) {
            return Err(Error::InvalidDimension(
                "realified operator must be 2d x 2d",
            ));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * dim, 2 * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(2 * dim, 2 * dim),
        }
    }

    /// Realification of the conjugate-linear map `x -> m conj(x)`.
    pub fn conjugate_linear(m: &DMatrix<C64>) -> Self {
        let d = m.nrows();
        let mut out = DMatrix::zeros(2 * d, 2 * d);
        for r in 0..d {
            for c in 0..d {
                let z = m[(r, c)];
                out[(r, c)] = z.re;
                out[(r, c + d)] = z.im;
                out[(r + d, c)] = z.im;
                out[(r + d, c + d)] = -z.re;
            }
        }
        Self { matrix: out }
    }

    /// Complex dimension `d`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element::from_realified(&(&self.matrix * x.realify()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Largest singular value of the realified matrix.
    pub fn norm(&self) -> f64 {
        if self.matrix.is_empty() {
            return 0.0;
        }
        Svd::new(&self.matrix).top()
    }

    /// `max |λ|` over the eigenvalues of the real matrix.
    pub fn spectral_radius(&self) -> f64 {
        if self.matrix.is_empty() {
            return 0.0;
        }
        crate::eigen::spectral_radius(&self.matrix)
    }

    /// Number of singular values above `rel_tol` times the largest one.
    pub fn rank(&self, rel_tol: f64) -> usize {
        Svd::new(&self.matrix).rank(rel_tol)
    }

    /// Complex matrix of the operator, if it commutes with multiplication by `i`.
    pub fn as_complex_linear(&self, tol: f64) -> Result<ComplexLinearMap> {
        let d = self.dim();
        let m = &self.matrix;
        let mut residual = 0.0f64;
        let entries = DMatrix::from_fn(d, d, |r, c| {
            let (a1, a2) = (m[(r, c)], m[(r + d, c + d)]);
            let (b1, b2) = (m[(r + d, c)], -m[(r, c + d)]);
            residual = residual.max((a1 - a2).abs()).max((b1 - b2).abs());
            C64::new(0.5 * (a1 + a2), 0.5 * (b1 + b2))
        });
        let scale = 1.0 + m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if residual > tol * scale {
            return Err(Error::NotComplexLinear { residual });
        }
        Ok(ComplexLinearMap::new(entries))
    }
}

impl Add for &RealLinearOperator {
    type Output = RealLinearOperator;
    fn add(self, rhs: &RealLinearOperator) -> RealLinearOperator {
        RealLinearOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &RealLinearOperator {
    type Output = RealLinearOperator;
    fn sub(self, rhs: &RealLinearOperator) -> RealLinearOperator {
        RealLinearOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<&RealLinearOperator> for f64 {
    type Output = RealLinearOperator;
    fn mul(self, rhs: &RealLinearOperator) -> RealLinearOperator {
        RealLinearOperator {
            matrix: &rhs.matrix * self,
        }
    }
}

/// A complex-linear map `E -> E` given by its `d x d` matrix in the basis of
/// the system.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLinearMap {
    matrix: DMatrix<C64>,
}

impl ComplexLinearMap {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "linear map must be square");
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element::new(&self.matrix * x.coords())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            matrix: &self.matrix * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
        }
    }

    /// Coordinate operator norm (largest singular value of the matrix).
    pub fn norm(&self) -> f64 {
        largest_singular_value(self.matrix.clone())
    }

    /// Real coordinates `(Re m_00, Im m_00, Re m_01, ..)` in row-major order.
    pub fn real_params(&self) -> DVector<f64> {
        let d = self.dim();
        DVector::from_fn(2 * d * d, |p, _| {
            let z = self.matrix[((p / 2) / d, (p / 2) % d)];
            if p % 2 == 0 {
                z.re
            } else {
                z.im
            }
        })
    }

    pub fn from_real_params(dim: usize, p: &[f64]) -> Self {
        assert_eq!(p.len(), 2 * dim * dim);
        Self {
            matrix: DMatrix::from_fn(dim, dim, |r, c| {
                C64::new(p[2 * (r * dim + c)], p[2 * (r * dim + c) + 1])
            }),
        }
    }

    pub fn realify(&self) -> RealLinearOperator {
        let d = self.dim();
        let mut out = DMatrix::zeros(2 * d, 2 * d);
        for r in 0..d {
            for c in 0..d {
                let z = self.matrix[(r, c)];
                out[(r, c)] = z.re;
                out[(r, c + d)] = -z.im;
                out[(r + d, c)] = z.im;
                out[(r + d, c + d)] = z.re;
            }
        }
        RealLinearOperator { matrix: out }
    }
}

impl Add for &ComplexLinearMap {
    type Output = ComplexLinearMap;
    fn add(self, rhs: &ComplexLinearMap) -> ComplexLinearMap {
        ComplexLinearMap {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &ComplexLinearMap {
    type Output = ComplexLinearMap;
    fn sub(self, rhs: &ComplexLinearMap) -> ComplexLinearMap {
        ComplexLinearMap {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Neg for &ComplexLinearMap {
    type Output = ComplexLinearMap;
    fn neg(self) -> ComplexLinearMap {
        ComplexLinearMap {
            matrix: -&self.matrix,
        }
    }
}

impl TripleSystem {
    /// Complex matrix of `x -> {a, b, x}`.
    pub fn l_matrix(&self, a: &Element, b: &Element) -> Result<DMatrix<C64>> {
        self.check_all(&[a, b])?;
        Ok(self.l_matrix_unchecked(a, b))
    }

    pub(crate) fn l_matrix_unchecked(&self, a: &Element, b: &Element) -> DMatrix<C64> {
        let d = self.dim();
        let (a, b) = (a.coords(), b.coords());
        let mut m = DMatrix::zeros(d, d);
        for &(i, j, k, l, c) in self.nonzeros() {
            m[(l as usize, k as usize)] += a[i as usize] * b[j as usize].conj() * c;
        }
        m
    }

    /// Matrix `M` with `Q(a)x = {a, x, a} = M conj(x)`.
    pub fn q_matrix(&self, a: &Element) -> Result<DMatrix<C64>> {
        self.check(a.dim())?;
        Ok(self.q_matrix_unchecked(a))
    }

    pub(crate) fn q_matrix_unchecked(&self, a: &Element) -> DMatrix<C64> {
        let d = self.dim();
        let a = a.coords();
        let mut m = DMatrix::zeros(d, d);
        for &(i, j, k, l, c) in self.nonzeros() {
            m[(l as usize, j as usize)] += a[i as usize] * a[k as usize] * c;
        }
        m
    }

    /// `L(a, b)` on realified coordinates.
    pub fn l_operator(&self, a: &Element, b: &Element) -> Result<RealLinearOperator> {
        self.check_all(&[a, b])?;
        Ok(self.l_operator_unchecked(a, b))
    }

    pub(crate) fn l_operator_unchecked(&self, a: &Element, b: &Element) -> RealLinearOperator {
        ComplexLinearMap::new(self.l_matrix_unchecked(a, b)).realify()
    }

    /// The conjugate-linear `Q(a) : x -> {a, x, a}` on realified coordinates.
    pub fn q_operator(&self, a: &Element) -> Result<RealLinearOperator> {
        self.check(a.dim())?;
        Ok(RealLinearOperator::conjugate_linear(
            &self.q_matrix_unchecked(a),
        ))
    }

    /// `Q(a)` applied directly.
    pub fn quadratic(&self, a: &Element, x: &Element) -> Element {
        self.product_unchecked(a, x, a)
    }
}
