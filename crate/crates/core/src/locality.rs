//! Randomized batteries for the characterizations of triple derivations.
//!
//! A linear map `T` is a triple derivation iff it is local, iff it is
//! weak-local, iff it satisfies both
//!
//! * `(h1)`: `{a, T(b), c} = 0` whenever `a, c ⊥ b`, and
//! * `(h2)`: `P_2(e)T(a) = -Q(e)T(a)` for norm-one `a` and tripotents `e`
//!   with `P_2(e)a = e`.
//!
//! [`TripleSystem::is_triple_derivation`] decides the first condition exactly;
//! the samplers here look for counterexamples to the others. Every trial uses
//! the RNG stream `(seed, trial)`, so reports are reproducible bit for bit.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector};
use rand::Rng;

use crate::derivation::DerivationBasis;
use crate::peirce::PeirceSpace;
use crate::report::{CheckReport, Witness};
use crate::rng::{complex_gaussian, gaussian, random_map, trial_rng};
use crate::svd::Svd;
use crate::{ComplexLinearMap, Element, Error, Result, SystemKind, TripleSystem, C64, RANK_TOL};

/// Functionals shorter than this are redrawn.
const MIN_FUNCTIONAL_NORM: f64 = 1e-6;

impl TripleSystem {
    /// Condition `(h1)`: draws `b` supported on a random tripotent, sets
    /// `e = r(b)` and samples `a, c` in `E_0(e)`.
    pub fn check_h1(
        &self,
        t: &ComplexLinearMap,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check(t.dim())?;
        let t_norm = t.norm();
        let mut report = CheckReport::new("h1", trials, seed, tol);
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial as u64);
            let u = self.random_tripotent_from(&mut rng)?;
            let b = self.random_in_space(&u, PeirceSpace::Two, &mut rng);
            let e = self.range_tripotent(&b)?;
            let a = self.random_in_space(&e, PeirceSpace::Zero, &mut rng);
            let c = self.random_in_space(&e, PeirceSpace::Zero, &mut rng);
            let r = self.product_unchecked(&a, &t.apply(&b), &c);
            let scale = 1.0 + self.norm(&a) * t_norm * self.norm(&b) * self.norm(&c);
            report.record(Witness::new(
                "h1",
                trial,
                self.norm(&r) / scale,
                alloc::vec![a, b, c],
            ));
        }
        Ok(report)
    }

    /// Condition `(h2)`: `a = e + z` with `e` a random tripotent and `z` in
    /// `E_0(e)` of norm uniform in `[0, 1]`, so `‖a‖ = 1` and `P_2(e)a = e`.
    pub fn check_h2(
        &self,
        t: &ComplexLinearMap,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check(t.dim())?;
        let t_norm = t.norm();
        let mut report = CheckReport::new("h2", trials, seed, tol);
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial as u64);
            let e = self.random_tripotent_from(&mut rng)?;
            let mut z = self.random_in_space(&e, PeirceSpace::Zero, &mut rng);
            let z_norm = self.norm(&z);
            let target: f64 = rng.random_range(0.0..=1.0);
            z = if z_norm > RANK_TOL {
                z.scale_real(target / z_norm)
            } else {
                self.zero()
            };
            let a = &e + &z;
            let ta = t.apply(&a);
            let p2 = self
                .peirce_projection_unchecked(&e, PeirceSpace::Two)
                .apply(&ta);
            let r = &p2 + &self.quadratic(&e, &ta);
            let scale = 1.0 + t_norm * self.norm(&a);
            report.record(Witness::new(
                "h2",
                trial,
                self.norm(&r) / scale,
                alloc::vec![e, a],
            ));
        }
        Ok(report)
    }

    /// Distance from `T(a)` to the real span of `{δ_i(a)}` for random `a`,
    /// in realified Euclidean coordinates.
    pub fn check_local(
        &self,
        t: &ComplexLinearMap,
        basis: &DerivationBasis,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check(t.dim())?;
        self.check(basis.system_dim())?;
        let t_norm = t.norm();
        let mut report = CheckReport::new("local", trials, seed, tol);
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial as u64);
            let a = self.random_element(&mut rng);
            let span = RealSpan::new(basis.orbit(&a).iter().map(Element::realify).collect());
            let dist = span.distance(&t.apply(&a).realify());
            let scale = 1.0 + t_norm * a.coord_norm();
            report.record(Witness::new("local", trial, dist / scale, alloc::vec![a]));
        }
        Ok(report)
    }

    /// For random `a` and functionals `φ`, whether `φ(T(a))` lies in the real
    /// span of `{φ(δ_i(a))}` inside `C ≅ R^2`.
    ///
    /// Each trial uses one complex Gaussian functional and one functional
    /// whose real part annihilates `{δ(a)}`; for generic `φ` the span is all
    /// of `C`, so only the second kind can separate `T(a)` from the orbit.
    pub fn check_weak_local(
        &self,
        t: &ComplexLinearMap,
        basis: &DerivationBasis,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check(t.dim())?;
        self.check(basis.system_dim())?;
        let d = self.dim();
        let t_norm = t.norm();
        let mut report = CheckReport::new("weak_local", trials, seed, tol);
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial as u64);
            let a = self.random_element(&mut rng);
            let orbit = basis.orbit(&a);
            let ta = t.apply(&a);
            let scale = 1.0 + t_norm * a.coord_norm();

            let mut functionals = alloc::vec![gaussian_functional(d, &mut rng)];
            let span = RealSpan::new(orbit.iter().map(Element::realify).collect());
            if let Some(psi) = span.random_annihilator(&mut rng) {
                // Re φ(x) = ψ · realify(x)
                let phi = DVector::from_fn(d, |k, _| C64::new(psi[k], -psi[k + d]));
                functionals.push(&phi / C64::new(phi.norm(), 0.0));
            }
            for (label, phi) in ["gaussian", "annihilator"].iter().zip(functionals) {
                let eval = |x: &Element| -> DVector<f64> {
                    let z = phi.dot(x.coords());
                    DVector::from_column_slice(&[z.re, z.im])
                };
                let plane = RealSpan::new(orbit.iter().map(eval).collect());
                let dist = plane.distance(&eval(&ta));
                report.record(Witness::new(
                    label,
                    trial,
                    dist / scale,
                    alloc::vec![a.clone()],
                ));
            }
        }
        Ok(report)
    }

    /// `Re φ(T(a))` for random norm-one `a` with the norming functional
    /// `φ(x) = u_1* x v_1` built from the top singular pair of `a`.
    pub fn dissipation_values(
        &self,
        t: &ComplexLinearMap,
        trials: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        self.check(t.dim())?;
        let SystemKind::Matrix { .. } = self.kind() else {
            return Err(Error::UnsupportedSystem);
        };
        let mut values = Vec::with_capacity(trials);
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial as u64);
            let raw = self.random_element(&mut rng);
            let a = raw.scale_real(1.0 / self.norm(&raw));
            let m = self.to_matrix(&a).expect("matrix system");
            let svd = Svd::new(&m);
            let image = self.to_matrix(&t.apply(&a)).expect("matrix system");
            let phi = (svd.u.column(0).adjoint() * image * svd.v.column(0))[(0, 0)];
            values.push(phi.re);
        }
        Ok(values)
    }

    /// Dissipativity: `Re φ(T(a)) <= tol` for every sampled norming pair.
    pub fn check_dissipative(
        &self,
        t: &ComplexLinearMap,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<CheckReport> {
        let values = self.dissipation_values(t, trials, seed)?;
        let mut report = CheckReport::new("dissipative", trials, seed, tol);
        for (trial, v) in values.into_iter().enumerate() {
            report.record(Witness::labeled("re_phi_t", trial, v));
        }
        Ok(report)
    }

    /// The identities at random tripotents `e`, plus `P_0(e)T(a) = 0` for `a`
    /// in `E_2(e)`.
    pub fn check_tripotent_identities(
        &self,
        t: &ComplexLinearMap,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<CheckReport> {
        self.check(t.dim())?;
        let t_norm = t.norm();
        let mut report = CheckReport::new("tripotent_identities", trials, seed, tol);
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial as u64);
            let e = self.random_tripotent_from(&mut rng)?;
            self.record_tripotent_identities(&mut report, t, &e, trial);
            let a = self.random_in_space(&e, PeirceSpace::Two, &mut rng);
            let r = self
                .peirce_projection_unchecked(&e, PeirceSpace::Zero)
                .apply(&t.apply(&a));
            let scale = 1.0 + t_norm * self.norm(&a);
            report.record(Witness::new(
                "p0_on_peirce2",
                trial,
                self.norm(&r) / scale,
                alloc::vec![e, a],
            ));
        }
        Ok(report)
    }

    /// Runs the four equivalent characterizations on `t`.
    pub fn classify(
        &self,
        t: &ComplexLinearMap,
        basis: &DerivationBasis,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<Classification> {
        Ok(Classification {
            derivation: self.is_triple_derivation(t, tol),
            h1: self.check_h1(t, trials, seed, tol)?,
            h2: self.check_h2(t, trials, seed, tol)?,
            local: self.check_local(t, basis, trials, seed, tol)?,
            weak_local: self.check_weak_local(t, basis, trials, seed, tol)?,
        })
    }
}

/// Verdicts of the four equivalent conditions for one map.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub derivation: CheckReport,
    pub h1: CheckReport,
    pub h2: CheckReport,
    pub local: CheckReport,
    pub weak_local: CheckReport,
}

impl Classification {
    /// `[derivation, h1 ∧ h2, local, weak-local]`.
    pub fn verdicts(&self) -> [bool; 4] {
        [
            self.derivation.pass,
            self.h1.pass && self.h2.pass,
            self.local.pass,
            self.weak_local.pass,
        ]
    }

    pub fn agreement(&self) -> bool {
        let v = self.verdicts();
        v.iter().all(|&x| x == v[0])
    }

    pub fn reports(&self) -> [&CheckReport; 5] {
        [
            &self.derivation,
            &self.h1,
            &self.h2,
            &self.local,
            &self.weak_local,
        ]
    }
}

/// `a -> x_0 a - a x_0` on `M(n, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorMap {
    pub system: TripleSystem,
    pub x0: Element,
    pub map: ComplexLinearMap,
    /// `x_0` is normal, so the map may well be a derivation.
    pub normal: bool,
}

/// The commutator map `T(a) = [x_0, a]`, by default with `x_0 = E_12`.
pub fn commutator_counterexample(n: usize, x0: Option<&Element>) -> Result<CommutatorMap> {
    if n < 2 {
        return Err(Error::InvalidDimension(
            "commutator counterexample needs n >= 2",
        ));
    }
    let system = TripleSystem::matrix(n, n)?;
    let x0 = match x0 {
        Some(x) => {
            system.check(x.dim())?;
            x.clone()
        }
        None => system.basis(1),
    };
    let x = system.to_matrix(&x0).expect("matrix system");
    let d = system.dim();
    let mut m = DMatrix::zeros(d, d);
    for k in 0..d {
        let e = system.to_matrix(&system.basis(k)).expect("matrix system");
        let image = system.from_matrix(&(&x * &e - &e * &x))?;
        m.set_column(k, image.coords());
    }
    let defect = (&x * x.adjoint() - x.adjoint() * &x)
        .map(|z| z.re * z.re + z.im * z.im)
        .sum();
    let size = x.map(|z| z.re * z.re + z.im * z.im).sum();
    let normal = ComplexField::sqrt(defect) <= 1e-12 * (1.0 + size);
    Ok(CommutatorMap {
        system,
        x0,
        map: ComplexLinearMap::new(m),
        normal,
    })
}

/// Family a battery map was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFamily {
    Derivation,
    Generic,
    Perturbed,
    Commutator,
}

impl MapFamily {
    pub fn name(self) -> &'static str {
        match self {
            MapFamily::Derivation => "derivation",
            MapFamily::Generic => "generic",
            MapFamily::Perturbed => "perturbed",
            MapFamily::Commutator => "commutator",
        }
    }
}

/// How many maps of each family a battery draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatteryMix {
    pub derivations: usize,
    pub generic: usize,
    pub perturbed: usize,
    pub commutators: usize,
}

impl Default for BatteryMix {
    fn default() -> Self {
        Self {
            derivations: 30,
            generic: 30,
            perturbed: 30,
            commutators: 10,
        }
    }
}

/// Size of the random perturbation added to derivations.
pub const PERTURBATION: f64 = 1e-3;

/// Draws the battery maps: random members of the derivation span, generic
/// Gaussian maps, derivations plus `PERTURBATION` times a Gaussian map, and
/// commutators with random `x_0` (square matrix systems only).
pub fn battery_maps(
    system: &TripleSystem,
    basis: &DerivationBasis,
    mix: BatteryMix,
    seed: u64,
) -> Vec<(MapFamily, ComplexLinearMap)> {
    let d = system.dim();
    let mut rng = trial_rng(seed, u64::MAX);
    let mut out = Vec::new();
    for _ in 0..mix.derivations {
        out.push((MapFamily::Derivation, basis.random_member(&mut rng)));
    }
    for _ in 0..mix.generic {
        out.push((MapFamily::Generic, random_map(d, &mut rng)));
    }
    for _ in 0..mix.perturbed {
        let delta = basis.random_member(&mut rng);
        let noise = random_map(d, &mut rng).scale_real(PERTURBATION);
        out.push((MapFamily::Perturbed, &delta + &noise));
    }
    if let SystemKind::Matrix { rows, cols } = system.kind() {
        if rows == cols && rows >= 2 {
            for _ in 0..mix.commutators {
                let x0 = system.random_element(&mut rng);
                let c = commutator_counterexample(rows, Some(&x0)).expect("square matrix system");
                out.push((MapFamily::Commutator, c.map));
            }
        }
    }
    out
}

/// One classified battery map.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryEntry {
    pub index: usize,
    pub family: MapFamily,
    pub classification: Classification,
}

/// Classifies every battery map; map `i` is checked with seed `seed + i`.
pub fn run_battery(
    system: &TripleSystem,
    basis: &DerivationBasis,
    mix: BatteryMix,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<BatteryEntry>> {
    battery_maps(system, basis, mix, seed)
        .into_iter()
        .enumerate()
        .map(|(index, (family, map))| {
            let classification =
                system.classify(&map, basis, trials, seed.wrapping_add(index as u64), tol)?;
            Ok(BatteryEntry {
                index,
                family,
                classification,
            })
        })
        .collect()
}

/// Human-readable one-line summary of a classification.
pub fn summary(c: &Classification) -> String {
    let v = c.verdicts();
    let word = |b: bool| if b { "pass" } else { "fail" };
    alloc::format!(
        "derivation={} h1&h2={} local={} weak_local={} agreement={}",
        word(v[0]),
        word(v[1]),
        word(v[2]),
        word(v[3]),
        c.agreement()
    )
}

fn gaussian_functional<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let phi = DVector::from_fn(d, |_, _| complex_gaussian(rng));
        let n = phi.norm();
        if n >= MIN_FUNCTIONAL_NORM {
            return phi / C64::new(n, 0.0);
        }
    }
}

/// Orthonormal basis of the real span of a set of vectors.
struct RealSpan {
    ambient: usize,
    basis: Vec<DVector<f64>>,
}

impl RealSpan {
    fn new(vectors: Vec<DVector<f64>>) -> Self {
        let ambient = vectors.first().map_or(0, |v| v.len());
        if vectors.is_empty() || ambient == 0 {
            return Self {
                ambient,
                basis: Vec::new(),
            };
        }
        let m = DMatrix::from_columns(&vectors);
        let svd = Svd::new(&m);
        let basis = if svd.top() <= f64::MIN_POSITIVE {
            Vec::new()
        } else {
            (0..svd.rank(RANK_TOL))
                .map(|i| svd.u.column(i).into_owned())
                .collect()
        };
        Self { ambient, basis }
    }

    fn distance(&self, x: &DVector<f64>) -> f64 {
        let residual = self
            .basis
            .iter()
            .fold(x.clone(), |acc, q| acc - q * q.dot(x));
        residual.norm()
    }

    /// A random unit vector orthogonal to the span, if the span is proper.
    fn random_annihilator<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<DVector<f64>> {
        if self.basis.len() >= self.ambient {
            return None;
        }
        for _ in 0..8 {
            let g = DVector::from_fn(self.ambient, |_, _| gaussian(rng));
            let v = self
                .basis
                .iter()
                .fold(g.clone(), |acc, q| acc - q * q.dot(&g));
            let n = v.norm();
            if n > MIN_FUNCTIONAL_NORM {
                return Some(v / n);
            }
        }
        None
    }
}
