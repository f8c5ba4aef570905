//! Triple derivations: the Leibniz rule, the brute-force derivation space,
//! and identities every derivation satisfies.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::peirce::PeirceSpace;
use crate::report::{CheckReport, Witness};
use crate::rng::{gaussian, random_element, trial_rng};
use crate::svd::Svd;
use crate::{ComplexLinearMap, Element, Result, TripleSystem, C64, RANK_TOL};

/// A real basis of the Lie algebra of triple derivations, orthonormal under
/// the real Frobenius inner product `Re tr(S* T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationBasis {
    dim: usize,
    basis: Vec<ComplexLinearMap>,
}

impl DerivationBasis {
    /// Wraps maps that are assumed to be an orthonormal real basis.
    pub fn from_maps(dim: usize, basis: Vec<ComplexLinearMap>) -> Self {
        Self { dim, basis }
    }

    /// Complex dimension of the underlying system.
    pub fn system_dim(&self) -> usize {
        self.dim
    }

    pub fn dim_real(&self) -> usize {
        self.basis.len()
    }

    pub fn maps(&self) -> &[ComplexLinearMap] {
        &self.basis
    }

    /// `Σ c_i δ_i`.
    pub fn combine(&self, coeffs: &[f64]) -> ComplexLinearMap {
        self.basis
            .iter()
            .zip(coeffs)
            .fold(ComplexLinearMap::zero(self.dim), |acc, (b, &c)| {
                &acc + &b.scale_real(c)
            })
    }

    /// A Gaussian combination of the basis.
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexLinearMap {
        let coeffs: Vec<f64> = (0..self.basis.len()).map(|_| gaussian(rng)).collect();
        self.combine(&coeffs)
    }

    /// Frobenius distance from `t` to the real span of the basis.
    pub fn span_distance(&self, t: &ComplexLinearMap) -> f64 {
        let p = t.real_params();
        let residual = self.basis.iter().fold(p.clone(), |acc, b| {
            let q = b.real_params();
            acc - &q * q.dot(&p)
        });
        residual.norm()
    }

    /// `δ_i(a)` for every basis element.
    pub fn orbit(&self, a: &Element) -> Vec<Element> {
        self.basis.iter().map(|b| b.apply(a)).collect()
    }
}

impl TripleSystem {
    /// `T{x,y,z} - {Tx,y,z} - {x,Ty,z} - {x,y,Tz}`.
    pub fn leibniz_residual(
        &self,
        t: &ComplexLinearMap,
        x: &Element,
        y: &Element,
        z: &Element,
    ) -> Result<Element> {
        self.check(t.dim())?;
        self.check_all(&[x, y, z])?;
        Ok(self.leibniz_unchecked(t, x, y, z))
    }

    pub(crate) fn leibniz_unchecked(
        &self,
        t: &ComplexLinearMap,
        x: &Element,
        y: &Element,
        z: &Element,
    ) -> Element {
        let p = |a: &Element, b: &Element, c: &Element| self.product_unchecked(a, b, c);
        let lhs = t.apply(&p(x, y, z));
        let rhs = &(&p(&t.apply(x), y, z) + &p(x, &t.apply(y), z)) + &p(x, y, &t.apply(z));
        &lhs - &rhs
    }

    /// Exact test of the Leibniz rule on all basis triples `(e_i, e_j, e_k)`
    /// and `(e_i, i e_j, e_k)`; by multilinearity this decides the question.
    pub fn is_triple_derivation(&self, t: &ComplexLinearMap, tol: f64) -> CheckReport {
        let d = self.dim();
        let mut report = CheckReport::new("derivation", 2 * d * d * d, 0, tol);
        if self.check(t.dim()).is_err() {
            report.record(Witness::labeled("dimension", 0, f64::INFINITY));
            return report;
        }
        let t_norm = t.norm();
        let basis: Vec<Element> = (0..d).map(|i| self.basis(i)).collect();
        let norms: Vec<f64> = basis.iter().map(|b| self.norm(b)).collect();
        let i_unit = C64::new(0.0, 1.0);
        let mut trial = 0;
        for i in 0..d {
            for j in 0..d {
                let middles = [basis[j].clone(), basis[j].scale(i_unit)];
                for k in 0..d {
                    for y in &middles {
                        let r = self.leibniz_unchecked(t, &basis[i], y, &basis[k]);
                        let scale = 1.0 + t_norm * norms[i] * norms[j] * norms[k];
                        report.record(Witness::new(
                            "leibniz",
                            trial,
                            self.norm(&r) / scale,
                            alloc::vec![basis[i].clone(), y.clone(), basis[k].clone()],
                        ));
                        trial += 1;
                    }
                }
            }
        }
        report
    }

    /// Real-linear constraint matrix whose null space is the derivation
    /// space. Unknowns are `ComplexLinearMap::real_params`; rows are the real
    /// and imaginary parts of the Leibniz residual on basis triples with
    /// middle entry `e_j` and `i e_j`.
    pub fn derivation_constraints(&self) -> DMatrix<f64> {
        let d = self.dim();
        let n = 2 * d * d;
        let rows = 2 * d * d * d * 2 * d;
        let basis: Vec<Element> = (0..d).map(|i| self.basis(i)).collect();
        let i_unit = C64::new(0.0, 1.0);
        let mut a = DMatrix::zeros(rows, n);
        let mut unit = alloc::vec![0.0; n];
        for p in 0..n {
            unit[p] = 1.0;
            let t = ComplexLinearMap::from_real_params(d, &unit);
            unit[p] = 0.0;
            let mut row = 0;
            for i in 0..d {
                for j in 0..d {
                    let middles = [basis[j].clone(), basis[j].scale(i_unit)];
                    for k in 0..d {
                        for y in &middles {
                            let r = self.leibniz_unchecked(&t, &basis[i], y, &basis[k]);
                            for (l, z) in r.coords().iter().enumerate() {
                                a[(row + 2 * l, p)] = z.re;
                                a[(row + 2 * l + 1, p)] = z.im;
                            }
                            row += 2 * d;
                        }
                    }
                }
            }
        }
        a
    }

    /// Orthonormal real basis of all triple derivations, from the null space
    /// of [`TripleSystem::derivation_constraints`].
    pub fn derivation_basis(&self) -> DerivationBasis {
        let d = self.dim();
        let n = 2 * d * d;
        let a = self.derivation_constraints();
        // compress the tall system to an n x n triangle first
        let r = a.qr().r();
        let r = if r.nrows() < n {
            let mut padded = DMatrix::zeros(n, n);
            padded.rows_mut(0, r.nrows()).copy_from(&r);
            padded
        } else {
            r
        };
        let svd = Svd::new(&r);
        let mut null: Vec<DVector<f64>> = (svd.rank(RANK_TOL)..svd.len())
            .map(|i| svd.v.column(i).into_owned())
            .collect();
        for v in &mut null {
            canonical_sign(v);
        }
        let basis = null
            .iter()
            .map(|v| ComplexLinearMap::from_real_params(d, v.as_slice()))
            .collect();
        DerivationBasis { dim: d, basis }
    }

    /// The inner derivation `x -> {a,b,x} - {b,a,x}`.
    pub fn inner_derivation(&self, a: &Element, b: &Element) -> Result<ComplexLinearMap> {
        self.check_all(&[a, b])?;
        Ok(ComplexLinearMap::new(
            self.l_matrix_unchecked(a, b) - self.l_matrix_unchecked(b, a),
        ))
    }

    /// `‖T{a,a,a} - 2{T(a),a,a} - {a,T(a),a}‖`.
    pub fn check_cube_identity(&self, t: &ComplexLinearMap, a: &Element) -> Result<f64> {
        self.check(t.dim())?;
        self.check(a.dim())?;
        Ok(self.norm(&self.cube_identity_residual(t, a)))
    }

    pub(crate) fn cube_identity_residual(&self, t: &ComplexLinearMap, a: &Element) -> Element {
        let ta = t.apply(a);
        let lhs = t.apply(&self.cube(a));
        let rhs =
            &self.product_unchecked(&ta, a, a).scale_real(2.0) + &self.product_unchecked(a, &ta, a);
        &lhs - &rhs
    }

    /// Right-hand side of the polarization identity
    /// `{x,y,z} = 1/16 Σ_{k=0..3} Σ_{j=1,2} (-1)^j i^k (x + i^k y + (-1)^j z)^[3]`.
    pub fn polarization(&self, x: &Element, y: &Element, z: &Element) -> Element {
        let mut acc = self.zero();
        let mut ik = C64::new(1.0, 0.0);
        for _ in 0..4 {
            for sign in [-1.0, 1.0] {
                let w = &(x + &y.scale(ik)) + &z.scale_real(sign);
                acc = &acc + &self.cube(&w).scale(ik * sign);
            }
            ik *= C64::new(0.0, 1.0);
        }
        acc.scale_real(1.0 / 16.0)
    }

    pub fn polarization_check(&self, samples: usize, seed: u64, tol: f64) -> CheckReport {
        let mut report = CheckReport::new("polarization", samples, seed, tol);
        for trial in 0..samples {
            let mut rng = trial_rng(seed, trial as u64);
            let [x, y, z] = core::array::from_fn(|_| random_element(self.dim(), &mut rng));
            let r =
                self.norm(&(&self.product_unchecked(&x, &y, &z) - &self.polarization(&x, &y, &z)));
            let scale = 1.0 + self.norm(&x) * self.norm(&y) * self.norm(&z);
            report.record(Witness::new(
                "polarization",
                trial,
                r / scale,
                alloc::vec![x, y, z],
            ));
        }
        report
    }

    /// At a tripotent `e`: `P_0(e)T(e) = 0`, `P_2(e)T(e) = -Q(e)T(e)` and
    /// `T(e) = 2{T(e),e,e} + {e,T(e),e}`.
    pub fn derivation_at_tripotent_identities(
        &self,
        t: &ComplexLinearMap,
        e: &Element,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check(t.dim())?;
        self.require_tripotent(e, crate::DEFAULT_TOL)?;
        let mut report = CheckReport::new("tripotent_identities", 1, 0, tol);
        self.record_tripotent_identities(&mut report, t, e, 0);
        Ok(report)
    }

    pub(crate) fn record_tripotent_identities(
        &self,
        report: &mut CheckReport,
        t: &ComplexLinearMap,
        e: &Element,
        trial: usize,
    ) {
        let te = t.apply(e);
        let scale = 1.0 + t.norm() * self.norm(e);
        let p0 = self
            .peirce_projection_unchecked(e, PeirceSpace::Zero)
            .apply(&te);
        let p2 = self
            .peirce_projection_unchecked(e, PeirceSpace::Two)
            .apply(&te);
        let q = self.quadratic(e, &te);
        let cube = self.cube_identity_residual(t, e);
        let inputs = alloc::vec![e.clone()];
        report.record(Witness::new(
            "p0",
            trial,
            self.norm(&p0) / scale,
            inputs.clone(),
        ));
        report.record(Witness::new(
            "p2_plus_q",
            trial,
            self.norm(&(&p2 + &q)) / scale,
            inputs.clone(),
        ));
        report.record(Witness::new(
            "cube",
            trial,
            self.norm(&cube) / scale,
            inputs,
        ));
    }
}

// Fix the sign of a null vector so its largest entry is positive.
fn canonical_sign(v: &mut DVector<f64>) {
    let pivot = v.iter().copied().fold(
        0.0f64,
        |acc, x| if x.abs() > acc.abs() + 1e-12 { x } else { acc },
    );
    if pivot < 0.0 {
        v.neg_mut();
    }
}
