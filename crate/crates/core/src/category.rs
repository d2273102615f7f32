use alloc::format;
use alloc::vec::Vec;

use num_rational::BigRational;
use thiserror::Error;

use crate::fusion_ring::{FusionRing, RingError};
use crate::label::Label;
use crate::modular_data::{ModularData, ModularError};
use crate::report::{CheckReport, Outcome};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CategoryError {
    #[error("modular data failed validation")]
    Invalid(CheckReport),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Validated modular data together with its Verlinde ring and
/// Frobenius-Perron dimensions, computed once.
#[derive(Clone, Debug)]
pub struct Category {
    data: ModularData,
    ring: FusionRing,
    dims: Vec<f64>,
}

impl Category {
    pub fn new(data: ModularData, tol: &Tolerances) -> Result<Self, CategoryError> {
        let report = data.validate(tol);
        if !report.passed() {
            return Err(CategoryError::Invalid(report));
        }
        let ring = data.verlinde_fusion(tol)?;
        let dims = ring.fpdims()?;
        Ok(Category { data, ring, dims })
    }

    pub fn data(&self) -> &ModularData {
        &self.data
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.data.labels()
    }

    pub fn contains(&self, a: Label) -> bool {
        a.0 < self.len()
    }

    pub fn unit(&self) -> Label {
        self.data.unit()
    }

    pub fn name(&self, a: Label) -> &str {
        self.data.name(a)
    }

    pub fn label_by_name(&self, name: &str) -> Option<Label> {
        self.data.label_by_name(name)
    }

    pub fn dual(&self, a: Label) -> Label {
        self.ring.dual(a)
    }

    pub fn h(&self, a: Label) -> &BigRational {
        self.data.h(a)
    }

    pub fn fpdim(&self, a: Label) -> f64 {
        self.dims[a.0]
    }

    pub fn fpdims(&self) -> &[f64] {
        &self.dims
    }

    /// `Σ_{a ∈ labels} FPdim(a)^2`.
    pub fn fpdim_of(&self, labels: impl IntoIterator<Item = Label>) -> f64 {
        labels.into_iter().map(|a| self.dims[a.0] * self.dims[a.0]).sum()
    }

    /// Compares `S_1a / S_11` with the Frobenius-Perron dimensions; any
    /// mismatch is reported as a warning.
    pub fn quantum_dim_report(&self, tol: &Tolerances) -> CheckReport {
        let q = self.data.quantum_dims();
        let bad = self
            .labels()
            .filter(|a| (q[a.0] - self.dims[a.0]).abs() > tol.check)
            .map(|a| format!("{}: d={} FPdim={}", self.name(a), q[a.0], self.dims[a.0]))
            .collect();
        let mut report = CheckReport::new();
        report.verdict(
            "modular.qdim",
            "quantum dimensions agree with FPdim",
            Outcome::Warn,
            "",
            bad,
        );
        report
    }
}
