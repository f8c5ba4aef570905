//! JSON representations of systems, elements, maps and reports.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in the shortest
//! form that parses back to the same `f64`, so every round trip is exact.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context};
use jtriple_core::locality::{BatteryEntry, Classification};
use jtriple_core::nalgebra::DMatrix;
use jtriple_core::{
    CheckReport, ComplexLinearMap, DerivationBasis, Element, SpectralDecomposition, SpectralPair,
    SystemKind, TripleSystem, Witness, C64,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

type Pair = [f64; 2];

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemJson {
    Matrix { rows: usize, cols: usize },
    Custom { dim: usize, structure: Vec<Pair> },
}

impl From<&TripleSystem> for SystemJson {
    fn from(sys: &TripleSystem) -> Self {
        match sys.kind() {
            SystemKind::Matrix { rows, cols } => SystemJson::Matrix { rows, cols },
            SystemKind::Custom => SystemJson::Custom {
                dim: sys.dim(),
                structure: sys.structure().iter().copied().map(pair).collect(),
            },
        }
    }
}

impl TryFrom<SystemJson> for TripleSystem {
    type Error = anyhow::Error;

    fn try_from(json: SystemJson) -> anyhow::Result<Self> {
        Ok(match json {
            SystemJson::Matrix { rows, cols } => TripleSystem::matrix(rows, cols)?,
            SystemJson::Custom { dim, structure } => {
                TripleSystem::custom(dim, structure.into_iter().map(complex).collect())?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub coords: Vec<Pair>,
}

impl From<&Element> for ElementJson {
    fn from(e: &Element) -> Self {
        Self {
            coords: e.coords().iter().copied().map(pair).collect(),
        }
    }
}

impl From<ElementJson> for Element {
    fn from(json: ElementJson) -> Self {
        let coords: Vec<C64> = json.coords.into_iter().map(complex).collect();
        Element::from_slice(&coords)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub dim: usize,
    /// Row-major.
    pub entries: Vec<Pair>,
}

impl From<&ComplexLinearMap> for MapJson {
    fn from(t: &ComplexLinearMap) -> Self {
        let m = t.matrix();
        let d = t.dim();
        let entries = (0..d)
            .flat_map(|r| (0..d).map(move |c| pair(m[(r, c)])))
            .collect();
        Self { dim: d, entries }
    }
}

impl TryFrom<MapJson> for ComplexLinearMap {
    type Error = anyhow::Error;

    fn try_from(json: MapJson) -> anyhow::Result<Self> {
        let d = json.dim;
        ensure!(d > 0, "map dimension must be positive");
        ensure!(
            json.entries.len() == d * d,
            "map of dimension {d} needs {} entries, got {}",
            d * d,
            json.entries.len()
        );
        Ok(ComplexLinearMap::new(DMatrix::from_fn(d, d, |r, c| {
            complex(json.entries[r * d + c])
        })))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    pub dim_real: usize,
    pub basis: Vec<MapJson>,
}

impl From<&DerivationBasis> for BasisJson {
    fn from(b: &DerivationBasis) -> Self {
        Self {
            dim_real: b.dim_real(),
            basis: b.maps().iter().map(MapJson::from).collect(),
        }
    }
}

impl BasisJson {
    /// Rebuilds the basis for a system of complex dimension `dim`.
    pub fn into_basis(self, dim: usize) -> anyhow::Result<DerivationBasis> {
        ensure!(
            self.dim_real == self.basis.len(),
            "dim_real is {} but {} maps are listed",
            self.dim_real,
            self.basis.len()
        );
        let maps = self
            .basis
            .into_iter()
            .map(ComplexLinearMap::try_from)
            .collect::<anyhow::Result<Vec<_>>>()?;
        if let Some(bad) = maps.iter().find(|m| m.dim() != dim) {
            bail!("basis map has dimension {}, system has {dim}", bad.dim());
        }
        Ok(DerivationBasis::from_maps(dim, maps))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    pub lambda: f64,
    pub tripotent: ElementJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralJson {
    pub pairs: Vec<PairJson>,
}

impl From<&SpectralDecomposition> for SpectralJson {
    fn from(s: &SpectralDecomposition) -> Self {
        let pairs = s
            .pairs
            .iter()
            .map(|p| PairJson {
                lambda: p.lambda,
                tripotent: (&p.tripotent).into(),
            })
            .collect();
        Self { pairs }
    }
}

impl SpectralJson {
    pub fn into_decomposition(self, dim: usize) -> anyhow::Result<SpectralDecomposition> {
        let pairs: Vec<SpectralPair> = self
            .pairs
            .into_iter()
            .map(|p| SpectralPair {
                lambda: p.lambda,
                tripotent: p.tripotent.into(),
            })
            .collect();
        if let Some(bad) = pairs.iter().find(|p| p.tripotent.dim() != dim) {
            bail!(
                "tripotent has dimension {}, system has {dim}",
                bad.tripotent.dim()
            );
        }
        let mut dec = SpectralDecomposition {
            pairs,
            element: Element::zeros(dim),
        };
        dec.element = dec.reconstruct();
        Ok(dec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessJson {
    pub label: String,
    pub trial: usize,
    /// `null` when the residual is not finite.
    pub residual: Option<f64>,
    pub inputs: Vec<ElementJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub label: String,
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub name: String,
    pub trials: usize,
    pub max_residual: Option<f64>,
    pub pass: bool,
    pub seed: u64,
    pub tol: f64,
    pub components: Vec<ComponentJson>,
    pub witnesses: Vec<WitnessJson>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<&CheckReport> for ReportJson {
    fn from(r: &CheckReport) -> Self {
        Self {
            name: r.name.clone(),
            trials: r.trials,
            max_residual: finite(r.max_residual),
            pass: r.pass,
            seed: r.seed,
            tol: r.tol,
            components: r
                .components
                .iter()
                .map(|(label, v)| ComponentJson {
                    label: label.clone(),
                    max_residual: finite(*v),
                })
                .collect(),
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    label: w.label.clone(),
                    trial: w.trial,
                    residual: finite(w.residual),
                    inputs: w.inputs.iter().map(ElementJson::from).collect(),
                })
                .collect(),
        }
    }
}

impl From<ReportJson> for CheckReport {
    fn from(json: ReportJson) -> Self {
        let value = |x: Option<f64>| x.unwrap_or(f64::INFINITY);
        CheckReport {
            name: json.name,
            trials: json.trials,
            seed: json.seed,
            tol: json.tol,
            max_residual: value(json.max_residual),
            pass: json.pass,
            components: json
                .components
                .into_iter()
                .map(|c| (c.label, value(c.max_residual)))
                .collect(),
            witnesses: json
                .witnesses
                .into_iter()
                .map(|w| Witness {
                    label: w.label,
                    trial: w.trial,
                    residual: value(w.residual),
                    inputs: w.inputs.into_iter().map(Element::from).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictsJson {
    pub derivation: bool,
    pub h1_h2: bool,
    pub local: bool,
    pub weak_local: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationJson {
    pub verdicts: VerdictsJson,
    pub agreement: bool,
    pub reports: Vec<ReportJson>,
}

impl From<&Classification> for ClassificationJson {
    fn from(c: &Classification) -> Self {
        let [derivation, h1_h2, local, weak_local] = c.verdicts();
        Self {
            verdicts: VerdictsJson {
                derivation,
                h1_h2,
                local,
                weak_local,
            },
            agreement: c.agreement(),
            reports: c.reports().into_iter().map(ReportJson::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryMapJson {
    pub index: usize,
    pub family: String,
    #[serde(flatten)]
    pub classification: ClassificationJson,
}

impl From<&BatteryEntry> for BatteryMapJson {
    fn from(e: &BatteryEntry) -> Self {
        Self {
            index: e.index,
            family: e.family.name().into(),
            classification: (&e.classification).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryJson {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub maps: usize,
    pub agreeing: usize,
    pub all_agree: bool,
    pub results: Vec<BatteryMapJson>,
}

/// Reads and parses a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_system(path: &Path) -> anyhow::Result<TripleSystem> {
    read_json::<SystemJson>(path)?.try_into()
}

pub fn read_map(path: &Path) -> anyhow::Result<ComplexLinearMap> {
    read_json::<MapJson>(path)?.try_into()
}

pub fn read_element(path: &Path) -> anyhow::Result<Element> {
    Ok(read_json::<ElementJson>(path)?.into())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
