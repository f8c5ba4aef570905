//! Triple systems, elements, and the triple product.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::Rng;

use crate::report::{CheckReport, Witness};
use crate::rng::{random_element, trial_rng};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// Rectangular complex matrices with `{a,b,c} = (ab*c + cb*a)/2`.
    Matrix {
        rows: usize,
        cols: usize,
    },
    Custom,
}

/// A coordinate vector in a triple system.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    coords: DVector<C64>,
}

impl Element {
    pub fn new(coords: DVector<C64>) -> Self {
        Self { coords }
    }

    pub fn from_slice(coords: &[C64]) -> Self {
        Self {
            coords: DVector::from_column_slice(coords),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: DVector::zeros(dim),
        }
    }

    /// The `i`-th basis vector of a `dim`-dimensional space.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut coords = DVector::zeros(dim);
        coords[i] = C64::new(1.0, 0.0);
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<C64> {
        self.coords
    }

    /// Euclidean norm of the coordinate vector (not the triple norm).
    pub fn coord_norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coords: &self.coords * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            coords: self.coords.map(|c| c * s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Coordinates as `(Re x_1 .. Re x_d, Im x_1 .. Im x_d)`.
    pub fn realify(&self) -> DVector<f64> {
        let d = self.dim();
        DVector::from_fn(2 * d, |r, _| {
            if r < d {
                self.coords[r].re
            } else {
                self.coords[r - d].im
            }
        })
    }

    pub fn from_realified(v: &DVector<f64>) -> Self {
        let d = v.len() / 2;
        Self {
            coords: DVector::from_fn(d, |i, _| C64::new(v[i], v[i + d])),
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        Element {
            coords: &self.coords + &rhs.coords,
        }
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        Element {
            coords: &self.coords - &rhs.coords,
        }
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            coords: -&self.coords,
        }
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        Element {
            coords: self.coords + rhs.coords,
        }
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        Element {
            coords: self.coords - rhs.coords,
        }
    }
}

impl Mul<&Element> for C64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

impl Mul<&Element> for f64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale_real(self)
    }
}

/// A finite-dimensional complex space with a triple product given by its
/// structure tensor `c[i][j][k][l]`, the `l`-th coordinate of `{e_i, e_j, e_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleSystem {
    dim: usize,
    kind: SystemKind,
    structure: Vec<C64>,
    // nonzero entries (i, j, k, l, c) in the same index order as `structure`
    nonzeros: Vec<(u32, u32, u32, u32, C64)>,
}

impl TripleSystem {
    /// The matrix triple `M(rows, cols)`; basis vectors are the matrix units
    /// `E_ab` in row-major order.
    pub fn matrix(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension("rows and cols must be at least 1"));
        }
        let d = rows * cols;
        let mut structure = alloc::vec![C64::new(0.0, 0.0); d * d * d * d];
        let unit = |r: usize, c: usize| r * cols + c;
        let half = C64::new(0.5, 0.0);
        // {E_ab, E_cd, E_ef} = (E_ab E_dc E_ef + E_ef E_dc E_ab) / 2
        for a in 0..rows {
            for b in 0..cols {
                for c in 0..rows {
                    for dd in 0..cols {
                        for e in 0..rows {
                            for f in 0..cols {
                                let i = unit(a, b);
                                let j = unit(c, dd);
                                let k = unit(e, f);
                                if b == dd && c == e {
                                    structure[tensor_index(d, i, j, k, unit(a, f))] += half;
                                }
                                if f == dd && c == a {
                                    structure[tensor_index(d, i, j, k, unit(e, b))] += half;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(Self::build(d, SystemKind::Matrix { rows, cols }, structure))
    }

    /// Complex Hilbert space `C^n`, realized as `1 x n` row matrices so that
    /// `{x,y,z} = (<x,y> z + <z,y> x) / 2`.
    pub fn hilbert(n: usize) -> Result<Self> {
        Self::matrix(1, n)
    }

    /// A system from an explicit structure tensor (flat, index
    /// `l + d*(k + d*(j + d*i))`). The axioms are not checked here; see
    /// [`TripleSystem::validate_axioms`].
    pub fn custom(dim: usize, structure: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("dim must be at least 1"));
        }
        let expected = dim.pow(4);
        if structure.len() != expected {
            return Err(Error::TensorSize {
                expected,
                got: structure.len(),
            });
        }
        Ok(Self::build(dim, SystemKind::Custom, structure))
    }

    fn build(dim: usize, kind: SystemKind, structure: Vec<C64>) -> Self {
        let mut nonzeros = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let c = structure[tensor_index(dim, i, j, k, l)];
                        if c.re != 0.0 || c.im != 0.0 {
                            nonzeros.push((i as u32, j as u32, k as u32, l as u32, c));
                        }
                    }
                }
            }
        }
        Self {
            dim,
            kind,
            structure,
            nonzeros,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn structure(&self) -> &[C64] {
        &self.structure
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.structure[tensor_index(self.dim, i, j, k, l)]
    }

    pub(crate) fn nonzeros(&self) -> &[(u32, u32, u32, u32, C64)] {
        &self.nonzeros
    }

    pub fn basis(&self, i: usize) -> Element {
        Element::basis(self.dim, i)
    }

    pub fn zero(&self) -> Element {
        Element::zeros(self.dim)
    }

    pub fn element(&self, coords: &[C64]) -> Result<Element> {
        self.check(coords.len())?;
        Ok(Element::from_slice(coords))
    }

    pub(crate) fn check(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    pub(crate) fn check_all(&self, elems: &[&Element]) -> Result<()> {
        elems.iter().try_for_each(|e| self.check(e.dim()))
    }

    /// `{x, y, z}`.
    pub fn product(&self, x: &Element, y: &Element, z: &Element) -> Result<Element> {
        self.check_all(&[x, y, z])?;
        Ok(self.product_unchecked(x, y, z))
    }

    pub(crate) fn product_unchecked(&self, x: &Element, y: &Element, z: &Element) -> Element {
        let (x, y, z) = (x.coords(), y.coords(), z.coords());
        let mut out = DVector::zeros(self.dim);
        for &(i, j, k, l, c) in &self.nonzeros {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            out[l as usize] += x[i] * y[j].conj() * z[k] * c;
        }
        Element::new(out)
    }

    /// Cube `{a, a, a}`.
    pub fn cube(&self, a: &Element) -> Element {
        self.product_unchecked(a, a, a)
    }

    /// The `rows x cols` matrix of an element of a matrix system.
    pub fn to_matrix(&self, a: &Element) -> Option<DMatrix<C64>> {
        match self.kind {
            SystemKind::Matrix { rows, cols } => Some(DMatrix::from_fn(rows, cols, |r, c| {
                a.coords()[r * cols + c]
            })),
            SystemKind::Custom => None,
        }
    }

    pub fn from_matrix(&self, m: &DMatrix<C64>) -> Result<Element> {
        match self.kind {
            SystemKind::Matrix { rows, cols } => {
                if m.nrows() != rows || m.ncols() != cols {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: m.len(),
                    });
                }
                Ok(Element::new(DVector::from_fn(self.dim, |i, _| {
                    m[(i / cols, i % cols)]
                })))
            }
            SystemKind::Custom => Err(Error::UnsupportedSystem),
        }
    }

    /// Triple norm `sqrt(rho(L(a,a)))`; the largest singular value for matrix
    /// systems.
    pub fn norm(&self, a: &Element) -> f64 {
        match self.to_matrix(a) {
            Some(m) => largest_singular_value(m),
            None => self
                .l_operator_unchecked(a, a)
                .spectral_radius()
                .max(0.0)
                .sqrt(),
        }
    }

    /// Numerical check of the JB*-triple axioms.
    ///
    /// Residuals here are normalized with Euclidean coordinate norms, since
    /// the triple norm is only meaningful once the axioms hold.
    pub fn validate_axioms(&self, samples: usize, seed: u64, tol: f64) -> CheckReport {
        let d = self.dim;
        let mut report = CheckReport::new("axioms", samples, seed, tol);

        let mut symmetry = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r =
                            (self.coefficient(i, j, k, l) - self.coefficient(k, j, i, l)).modulus();
                        symmetry = symmetry.max(r);
                    }
                }
            }
        }
        report.record(Witness::labeled("outer_symmetry", 0, symmetry));

        for trial in 0..samples {
            let mut rng = trial_rng(seed, trial as u64);
            let [x, y, a, b, c] = core::array::from_fn(|_| random_element(d, &mut rng));
            let lhs = self.cube_free_jordan_lhs(&x, &y, &a, &b, &c);
            let scale = 1.0
                + x.coord_norm()
                    * y.coord_norm()
                    * a.coord_norm()
                    * b.coord_norm()
                    * c.coord_norm();
            report.record(Witness::new(
                "jordan_identity",
                trial,
                lhs / scale,
                alloc::vec![x, y, a, b, c],
            ));

            // L(a,a) must have real non-negative spectrum
            let a = random_element(d, &mut rng);
            let laa = self.l_operator_unchecked(&a, &a);
            let scale = 1.0 + a.coord_norm().powi(2);
            let spectrum = match crate::eigen::real_eigenvalues(laa.matrix()) {
                Some(eig) => {
                    let min_re = eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                    let max_im = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                    (-min_re).max(max_im).max(0.0) / scale
                }
                None => f64::NAN,
            };
            report.record(Witness::new(
                "l_aa_spectrum",
                trial,
                spectrum,
                alloc::vec![a.clone()],
            ));

            if let Some(m) = self.to_matrix(&a) {
                let spectral = laa.spectral_radius().sqrt();
                let sigma = largest_singular_value(m);
                let r = (spectral - sigma).abs() / (1.0 + sigma);
                report.record(Witness::new("norm_consistency", trial, r, alloc::vec![a]));
            }
        }
        report
    }

    fn cube_free_jordan_lhs(
        &self,
        x: &Element,
        y: &Element,
        a: &Element,
        b: &Element,
        c: &Element,
    ) -> f64 {
        let p = |u: &Element, v: &Element, w: &Element| self.product_unchecked(u, v, w);
        let lhs = p(x, y, &p(a, b, c));
        let rhs = &(&p(&p(x, y, a), b, c) - &p(a, &p(y, x, b), c)) + &p(a, b, &p(x, y, c));
        (&lhs - &rhs).coord_norm()
    }

    /// A random element drawn from a seeded stream.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Element {
        random_element(self.dim, rng)
    }
}

pub(crate) fn tensor_index(d: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    l + d * (k + d * (j + d * i))
}

pub(crate) fn largest_singular_value(m: DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    crate::svd::Svd::new(&m).top()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_triple() {
        let sys = TripleSystem::matrix(1, 1).unwrap();
        let x = sys.element(&[c(1.0, 2.0)]).unwrap();
        let y = sys.element(&[c(-0.5, 1.0)]).unwrap();
        let z = sys.element(&[c(3.0, 0.25)]).unwrap();
        let p = sys.product(&x, &y, &z).unwrap();
        let expected = c(1.0, 2.0) * c(-0.5, 1.0).conj() * c(3.0, 0.25);
        assert_abs_diff_eq!((p.coords()[0] - expected).modulus(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn matrix_units_m2() {
        let sys = TripleSystem::matrix(2, 2).unwrap();
        assert_eq!(sys.dim(), 4);
        let (e11, e12) = (sys.basis(0), sys.basis(1));
        let p = sys.product(&e11, &e11, &e12).unwrap();
        assert_eq!(p, e12.scale_real(0.5));
        assert_eq!(sys.cube(&e11), e11);
    }

    #[test]
    fn tensor_matches_direct_formula() {
        for (m, n) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2)] {
            let sys = TripleSystem::matrix(m, n).unwrap();
            let d = sys.dim();
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let (a, b, cc) = (sys.basis(i), sys.basis(j), sys.basis(k));
                        let (ma, mb, mc) = (
                            sys.to_matrix(&a).unwrap(),
                            sys.to_matrix(&b).unwrap(),
                            sys.to_matrix(&cc).unwrap(),
                        );
                        let direct =
                            (&ma * mb.adjoint() * &mc + &mc * mb.adjoint() * &ma) * c(0.5, 0.0);
                        let via = sys.to_matrix(&sys.product(&a, &b, &cc).unwrap()).unwrap();
                        assert_eq!(direct, via);
                    }
                }
            }
        }
    }

    #[test]
    fn hilbert_product() {
        let sys = TripleSystem::hilbert(3).unwrap();
        let mut rng = trial_rng(7, 0);
        let (x, y, z) = (
            sys.random_element(&mut rng),
            sys.random_element(&mut rng),
            sys.random_element(&mut rng),
        );
        let inner = |u: &Element, v: &Element| u.coords().dot(&v.coords().conjugate());
        let expected = &(inner(&x, &y) * &z) + &(inner(&z, &y) * &x);
        let p = sys.product(&x, &y, &z).unwrap();
        assert!((&p - &expected.scale_real(0.5)).coord_norm() < 1e-13);
    }

    #[test]
    fn middle_slot_is_conjugate_linear() {
        let sys = TripleSystem::matrix(2, 3).unwrap();
        let mut rng = trial_rng(3, 0);
        let (x, y, z) = (
            sys.random_element(&mut rng),
            sys.random_element(&mut rng),
            sys.random_element(&mut rng),
        );
        let lhs = sys.product(&x, &y.scale(c(0.0, 1.0)), &z).unwrap();
        let rhs = sys.product(&x, &y, &z).unwrap().scale(c(0.0, -1.0));
        assert!((&lhs - &rhs).coord_norm() < 1e-13);
    }

    #[test]
    fn custom_errors_and_round_trip() {
        assert_eq!(
            TripleSystem::custom(2, alloc::vec![c(0.0, 0.0); 15]),
            Err(Error::TensorSize {
                expected: 16,
                got: 15
            })
        );
        assert!(TripleSystem::custom(0, Vec::new()).is_err());
        assert!(TripleSystem::matrix(0, 2).is_err());
        let m = TripleSystem::matrix(2, 2).unwrap();
        let copy = TripleSystem::custom(4, m.structure().to_vec()).unwrap();
        let mut rng = trial_rng(11, 0);
        for _ in 0..5 {
            let (x, y, z) = (
                m.random_element(&mut rng),
                m.random_element(&mut rng),
                m.random_element(&mut rng),
            );
            assert_eq!(
                m.product(&x, &y, &z).unwrap(),
                copy.product(&x, &y, &z).unwrap()
            );
        }
        assert!(m.product(&m.zero(), &Element::zeros(3), &m.zero()).is_err());
    }

    #[test]
    fn axioms_hold_for_matrix_triples() {
        for (m, n) in [(1, 1), (1, 2), (2, 2)] {
            let sys = TripleSystem::matrix(m, n).unwrap();
            let report = sys.validate_axioms(50, 1, 1e-9);
            assert!(report.pass, "{m}x{n}: {report:?}");
        }
    }

    #[test]
    fn perturbed_tensor_breaks_jordan_identity() {
        let m = TripleSystem::matrix(2, 2).unwrap();
        let mut structure = m.structure().to_vec();
        structure[0] += c(0.1, 0.0);
        let sys = TripleSystem::custom(4, structure).unwrap();
        let report = sys.validate_axioms(20, 1, 1e-9);
        assert!(!report.pass);
        assert!(report.worst("jordan_identity").unwrap() > 1e-9);
    }

    #[test]
    fn broken_outer_symmetry_is_reported() {
        let m = TripleSystem::matrix(2, 2).unwrap();
        let mut structure = m.structure().to_vec();
        structure[tensor_index(4, 0, 0, 1, 1)] += c(0.3, 0.0);
        let sys = TripleSystem::custom(4, structure).unwrap();
        let report = sys.validate_axioms(5, 1, 1e-9);
        assert!(report.worst("outer_symmetry").unwrap() > 0.29);
        assert!(!report.pass);
    }

    #[test]
    fn norms() {
        let sys = TripleSystem::matrix(2, 2).unwrap();
        let a = sys
            .element(&[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert_abs_diff_eq!(sys.norm(&a), 3.0, epsilon = 1e-12);
        assert_eq!(sys.norm(&sys.zero()), 0.0);
        assert_abs_diff_eq!(sys.norm(&sys.basis(2)), 1.0, epsilon = 1e-12);
        // spectral route through a custom copy
        let copy = TripleSystem::custom(4, sys.structure().to_vec()).unwrap();
        assert_abs_diff_eq!(copy.norm(&a), 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(copy.norm(&sys.basis(1)), 1.0, epsilon = 1e-10);
    }
}
