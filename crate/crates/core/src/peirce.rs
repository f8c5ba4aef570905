//! Tripotents, Peirce projections, orthogonality and the tripotent order.

use nalgebra::DMatrix;
use rand::Rng;

use crate::operator::{ComplexLinearMap, RealLinearOperator};
use crate::rng::{random_complex_matrix, trial_rng};
use crate::svd::Svd;
use crate::{Element, Error, Result, SystemKind, TripleSystem, C64, DEFAULT_TOL, RANK_TOL};

/// One of the three Peirce spaces `E_j(e) = {x : L(e,e)x = (j/2) x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeirceSpace {
    Zero,
    One,
    Two,
}

impl PeirceSpace {
    pub const ALL: [PeirceSpace; 3] = [PeirceSpace::Zero, PeirceSpace::One, PeirceSpace::Two];

    pub fn index(self) -> i32 {
        match self {
            PeirceSpace::Zero => 0,
            PeirceSpace::One => 1,
            PeirceSpace::Two => 2,
        }
    }

    pub fn from_index(j: i32) -> Option<Self> {
        match j {
            0 => Some(PeirceSpace::Zero),
            1 => Some(PeirceSpace::One),
            2 => Some(PeirceSpace::Two),
            _ => None,
        }
    }
}

/// `x = x_0 + x_1 + x_2` with `x_j` in `E_j(e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeirceDecomposition {
    pub tripotent: Element,
    pub parts: [Element; 3],
}

impl PeirceDecomposition {
    pub fn part(&self, space: PeirceSpace) -> &Element {
        &self.parts[space.index() as usize]
    }

    pub fn sum(&self) -> Element {
        &(&self.parts[0] + &self.parts[1]) + &self.parts[2]
    }
}

impl TripleSystem {
    /// Residual `‖{e,e,e} - e‖` in the triple norm.
    pub fn tripotent_residual(&self, e: &Element) -> f64 {
        self.norm(&(&self.cube(e) - e))
    }

    pub fn is_tripotent(&self, e: &Element, tol: f64) -> bool {
        if self.check(e.dim()).is_err() {
            return false;
        }
        self.tripotent_residual(e) <= tol * (1.0 + cube(self.norm(e)))
    }

    pub(crate) fn require_tripotent(&self, e: &Element, tol: f64) -> Result<()> {
        self.check(e.dim())?;
        if !self.is_tripotent(e, tol) {
            return Err(Error::NotATripotent {
                residual: self.tripotent_residual(e),
            });
        }
        Ok(())
    }

    /// Complex matrix of the Peirce projection `P_j(e)`:
    /// `P_2 = Q(e)^2`, `P_1 = 2L(e,e) - 2Q(e)^2`, `P_0 = Id - 2L(e,e) + Q(e)^2`.
    pub fn peirce_projection_map(
        &self,
        e: &Element,
        space: PeirceSpace,
    ) -> Result<ComplexLinearMap> {
        self.require_tripotent(e, DEFAULT_TOL)?;
        Ok(self.peirce_projection_unchecked(e, space))
    }

    pub(crate) fn peirce_projection_unchecked(
        &self,
        e: &Element,
        space: PeirceSpace,
    ) -> ComplexLinearMap {
        let m = self.q_matrix_unchecked(e);
        // Q(e)Q(e)x = M conj(M conj(x)) = M conj(M) x
        let q2 = &m * m.conjugate();
        let two_l = self.l_matrix_unchecked(e, e) * C64::new(2.0, 0.0);
        let matrix = match space {
            PeirceSpace::Two => q2,
            PeirceSpace::One => two_l - q2 * C64::new(2.0, 0.0),
            PeirceSpace::Zero => DMatrix::identity(self.dim(), self.dim()) - two_l + q2,
        };
        ComplexLinearMap::new(matrix)
    }

    /// `P_j(e)` on realified coordinates.
    pub fn peirce_projection(&self, e: &Element, space: PeirceSpace) -> Result<RealLinearOperator> {
        Ok(self.peirce_projection_map(e, space)?.realify())
    }

    pub fn peirce_decompose(&self, e: &Element, x: &Element) -> Result<PeirceDecomposition> {
        self.check(x.dim())?;
        self.require_tripotent(e, DEFAULT_TOL)?;
        let parts = PeirceSpace::ALL.map(|j| self.peirce_projection_unchecked(e, j).apply(x));
        Ok(PeirceDecomposition {
            tripotent: e.clone(),
            parts,
        })
    }

    /// `a ⊥ b`, i.e. `L(a,b) = 0`. Also requires `L(b,a) = 0` and
    /// `{a,a,b} = 0`, which are equivalent in exact arithmetic.
    pub fn are_orthogonal(&self, a: &Element, b: &Element, tol: f64) -> bool {
        if self.check_all(&[a, b]).is_err() {
            return false;
        }
        let scale = tol * (1.0 + self.norm(a) * self.norm(b));
        let op_norm = |m: DMatrix<C64>| ComplexLinearMap::new(m).norm();
        op_norm(self.l_matrix_unchecked(a, b)) <= scale
            && op_norm(self.l_matrix_unchecked(b, a)) <= scale
            && self.norm(&self.product_unchecked(a, a, b))
                <= tol * (1.0 + self.norm(a) * self.norm(a) * self.norm(b))
    }

    /// `u ≤ e`: `e - u` is a tripotent orthogonal to `u` (`u = e` included).
    pub fn tripotent_leq(&self, u: &Element, e: &Element, tol: f64) -> Result<bool> {
        self.require_tripotent(u, tol)?;
        self.require_tripotent(e, tol)?;
        let diff = e - u;
        Ok(self.is_tripotent(&diff, tol) && self.are_orthogonal(&diff, u, tol))
    }

    /// `E_2(e) = C e`, decided by the realified rank of `P_2(e)`.
    pub fn is_minimal(&self, e: &Element, tol: f64) -> Result<bool> {
        self.require_tripotent(e, tol)?;
        if self.norm(e) <= tol {
            return Err(Error::ZeroTripotent);
        }
        let p2 = self
            .peirce_projection_unchecked(e, PeirceSpace::Two)
            .realify();
        Ok(p2.rank(RANK_TOL) == 2)
    }

    /// A nonzero tripotent drawn from the stream `seed`.
    pub fn random_tripotent(&self, seed: u64) -> Result<Element> {
        self.random_tripotent_from(&mut trial_rng(seed, 0))
    }

    /// For matrix systems: the partial isometry formed by the top `r` singular
    /// pairs of a complex Gaussian matrix, `r` uniform in `1..=min(m,n)`.
    /// For custom systems: the sum of a random nonempty subset of the
    /// orthogonal tripotents in the spectral decomposition of a random element.
    pub fn random_tripotent_from<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Element> {
        const ATTEMPTS: usize = 16;
        for _ in 0..ATTEMPTS {
            let candidate = match self.kind() {
                SystemKind::Matrix { rows, cols } => {
                    let rank = rng.random_range(1..=rows.min(cols));
                    let g = random_complex_matrix(rows, cols, rng);
                    let svd = Svd::new(&g);
                    let mut t = DMatrix::zeros(rows, cols);
                    for i in 0..rank {
                        t += svd.outer(i);
                    }
                    self.from_matrix(&t)?
                }
                SystemKind::Custom => {
                    let a = self.random_element(rng);
                    let Ok(dec) = self.spectral_decomposition(&a, crate::CLUSTER_GAP) else {
                        continue;
                    };
                    let mut t = self.zero();
                    let mut any = false;
                    for pair in &dec.pairs {
                        if rng.random_bool(0.5) {
                            t = &t + &pair.tripotent;
                            any = true;
                        }
                    }
                    if !any {
                        match dec.pairs.first() {
                            Some(p) => t = p.tripotent.clone(),
                            None => continue,
                        }
                    }
                    t
                }
            };
            if !candidate.is_zero() && self.is_tripotent(&candidate, DEFAULT_TOL) {
                return Ok(candidate);
            }
        }
        Err(Error::DegenerateSample { attempts: ATTEMPTS })
    }

    /// A random element of `E_j(e)`.
    pub fn random_in_space<R: Rng + ?Sized>(
        &self,
        e: &Element,
        space: PeirceSpace,
        rng: &mut R,
    ) -> Element {
        let x = self.random_element(rng);
        self.peirce_projection_unchecked(e, space).apply(&x)
    }
}

fn cube(x: f64) -> f64 {
    x * x * x
}
