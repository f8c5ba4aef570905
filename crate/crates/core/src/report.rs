//! Verdicts of randomized and exhaustive check batteries.

use alloc::string::String;
use alloc::vec::Vec;

use crate::Element;

/// How many of the worst witnesses a report keeps.
pub const MAX_WITNESSES: usize = 3;

/// One recorded residual together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub label: String,
    pub trial: usize,
    pub residual: f64,
    pub inputs: Vec<Element>,
}

impl Witness {
    pub fn new(label: &str, trial: usize, residual: f64, inputs: Vec<Element>) -> Self {
        Self {
            label: label.into(),
            trial,
            residual,
            inputs,
        }
    }

    pub fn labeled(label: &str, trial: usize, residual: f64) -> Self {
        Self::new(label, trial, residual, Vec::new())
    }
}

/// Structured result of a check: pass iff `max_residual <= tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_residual: f64,
    pub pass: bool,
    /// Largest residual per label, in first-seen order.
    pub components: Vec<(String, f64)>,
    /// Worst cases, sorted by decreasing residual.
    pub witnesses: Vec<Witness>,
}

impl CheckReport {
    pub fn new(name: &str, trials: usize, seed: u64, tol: f64) -> Self {
        Self {
            name: name.into(),
            trials,
            seed,
            tol,
            max_residual: 0.0,
            pass: true,
            components: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn record(&mut self, witness: Witness) {
        // NaN never passes
        let residual = if witness.residual.is_nan() {
            f64::INFINITY
        } else {
            witness.residual
        };
        match self
            .components
            .iter_mut()
            .find(|(l, _)| *l == witness.label)
        {
            Some((_, worst)) => *worst = worst.max(residual),
            None => self.components.push((witness.label.clone(), residual)),
        }
        self.max_residual = self.max_residual.max(residual);
        self.pass = self.max_residual <= self.tol;

        let pos = self.witnesses.iter().position(|w| w.residual < residual);
        match pos {
            Some(p) => self.witnesses.insert(
                p,
                Witness {
                    residual,
                    ..witness
                },
            ),
            None if self.witnesses.len() < MAX_WITNESSES => self.witnesses.push(Witness {
                residual,
                ..witness
            }),
            None => {}
        }
        self.witnesses.truncate(MAX_WITNESSES);
    }

    /// Fold another report's residuals into this one.
    pub fn absorb(&mut self, other: &CheckReport) {
        for (label, r) in &other.components {
            self.record(Witness::labeled(label, 0, *r));
        }
        // keep the real witnesses of the other report instead of the placeholders
        self.witnesses.retain(|w| !w.inputs.is_empty());
        for w in &other.witnesses {
            self.record(w.clone());
        }
        self.witnesses.truncate(MAX_WITNESSES);
    }

    /// Largest residual recorded under `label`.
    pub fn worst(&self, label: &str) -> Option<f64> {
        self.components
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, r)| *r)
    }
}
