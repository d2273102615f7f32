//! Modular data: a unitary S-matrix together with exact conformal weights and
//! central charge. Fusion rules come from the Verlinde formula; duals come
//! from the permutation `S^2`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
// `Float` supplies sqrt/sin/round without std.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact;
use crate::fusion_ring::{FusionRing, RingError};
use crate::label::Label;
use crate::report::{CheckReport, Outcome};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ModularError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("S has a non-positive unit row entry at {0}; only pseudo-unitary data is supported")]
    NotPseudoUnitary(String),
    #[error("S^2 is not a permutation involution fixing the unit (row {0})")]
    NotPermutation(String),
    #[error("Verlinde value N_({a},{b})^{c} = {re}{im:+}i is not a nonnegative integer (residual {residual:e})")]
    Integrality {
        a: String,
        b: String,
        c: String,
        re: f64,
        im: f64,
        residual: f64,
    },
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularData {
    names: Vec<String>,
    /// Row-major `n × n`.
    s: Vec<Complex64>,
    h: Vec<BigRational>,
    c: BigRational,
    unit: Label,
}

/// Outcome of [`ModularData::twist_integral`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistIntegrality {
    pub integral: bool,
    pub offenders: Vec<Label>,
}

impl ModularData {
    pub fn new(
        names: Vec<String>,
        s: Vec<Vec<Complex64>>,
        h: Vec<BigRational>,
        c: BigRational,
        unit: Label,
    ) -> Result<Self, ModularError> {
        let n = names.len();
        if n == 0 {
            return Err(ModularError::Shape("no labels".into()));
        }
        if s.len() != n {
            return Err(ModularError::Shape(format!(
                "S has {} rows for {} labels",
                s.len(),
                n
            )));
        }
        if let Some((i, row)) = s.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(ModularError::Shape(format!(
                "S row {} has {} entries, expected {}",
                i,
                row.len(),
                n
            )));
        }
        if h.len() != n {
            return Err(ModularError::Shape(format!(
                "{} conformal weights for {} labels",
                h.len(),
                n
            )));
        }
        if unit.0 >= n {
            return Err(ModularError::UnknownLabel(format!("{}", unit)));
        }
        Ok(ModularData {
            names,
            s: s.into_iter().flatten().collect(),
            h,
            c,
            unit,
        })
    }

    /// One simple object, `S = [1]`, `h = 0`, `c = 0`.
    pub fn trivial() -> Self {
        ModularData {
            names: vec![String::from("1")],
            s: vec![Complex64::new(1.0, 0.0)],
            h: vec![exact::zero()],
            c: exact::zero(),
            unit: Label(0),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.len()).map(Label)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: Label) -> &str {
        &self.names[a.0]
    }

    pub fn label_by_name(&self, name: &str) -> Option<Label> {
        self.names.iter().position(|n| n == name).map(Label)
    }

    pub fn unit(&self) -> Label {
        self.unit
    }

    pub fn s(&self, a: Label, b: Label) -> Complex64 {
        self.s[a.0 * self.len() + b.0]
    }

    pub fn s_rows(&self) -> impl Iterator<Item = &[Complex64]> + '_ {
        self.s.chunks(self.len())
    }

    pub fn set_s(&mut self, a: Label, b: Label, value: Complex64) {
        let n = self.len();
        self.s[a.0 * n + b.0] = value;
    }

    pub fn h(&self, a: Label) -> &BigRational {
        &self.h[a.0]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.h
    }

    pub fn set_h(&mut self, a: Label, h: BigRational) {
        self.h[a.0] = h;
    }

    pub fn central_charge(&self) -> &BigRational {
        &self.c
    }

    /// `θ_a = e^{2πi h_a}`, derived from the exact weight.
    pub fn twist(&self, a: Label) -> Complex64 {
        exact::phase(&self.h[a.0])
    }

    fn require(&self, a: Label) -> Result<Label, ModularError> {
        if a.0 < self.len() {
            Ok(a)
        } else {
            Err(ModularError::UnknownLabel(format!("{}", a)))
        }
    }

    fn s_squared(&self) -> Vec<Complex64> {
        let n = self.len();
        let mut out = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.s[i * n + k];
                for j in 0..n {
                    out[i * n + j] += x * self.s[k * n + j];
                }
            }
        }
        out
    }

    /// Dual permutation read off `S^2`.
    pub fn dual_permutation(&self, tol: &Tolerances) -> Result<Vec<Label>, ModularError> {
        let n = self.len();
        let sq = self.s_squared();
        let mut dual = Vec::with_capacity(n);
        for a in 0..n {
            let row = &sq[a * n..(a + 1) * n];
            let hits: Vec<usize> = (0..n)
                .filter(|&b| (row[b] - Complex64::new(1.0, 0.0)).norm() < tol.check)
                .collect();
            let rest_small = (0..n)
                .filter(|b| !hits.contains(b))
                .all(|b| row[b].norm() < tol.check);
            match hits.as_slice() {
                [b] if rest_small => dual.push(Label(*b)),
                _ => return Err(ModularError::NotPermutation(self.names[a].clone())),
            }
        }
        let involution = (0..n).all(|a| dual[dual[a].0] == Label(a));
        if !involution || dual[self.unit.0] != self.unit {
            return Err(ModularError::NotPermutation(String::from("involution")));
        }
        Ok(dual)
    }

    fn check_pseudo_unitary(&self, tol: &Tolerances) -> Result<(), ModularError> {
        for b in self.labels() {
            let x = self.s(self.unit, b);
            if x.re <= tol.check || x.im.abs() > tol.check {
                return Err(ModularError::NotPseudoUnitary(String::from(self.name(b))));
            }
        }
        Ok(())
    }

    /// Unrounded Verlinde values `Σ_x S_ax S_bx conj(S_cx) / S_1x`, indexed
    /// `[(a * n + b) * n + c]`.
    fn verlinde_values(&self) -> Vec<Complex64> {
        let n = self.len();
        let inv_unit: Vec<Complex64> = self.labels().map(|x| self.s(self.unit, x).inv()).collect();
        let mut out = vec![Complex64::zero(); n * n * n];
        let mut w = vec![Complex64::zero(); n];
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    w[x] = self.s[a * n + x] * self.s[b * n + x] * inv_unit[x];
                }
                for c in 0..n {
                    out[(a * n + b) * n + c] = (0..n).map(|x| w[x] * self.s[c * n + x].conj()).sum();
                }
            }
        }
        out
    }

    /// Worst Verlinde offender as `(a, b, c, value, residual)`, where a
    /// negative rounded value counts as infinite residual.
    fn worst_verlinde(&self, values: &[Complex64]) -> Option<(usize, usize, usize, Complex64, f64)> {
        let n = self.len();
        let mut worst: Option<(usize, usize, usize, Complex64, f64)> = None;
        for (idx, v) in values.iter().enumerate() {
            let rounded = v.re.round();
            let residual = if rounded < 0.0 {
                f64::INFINITY
            } else {
                (v.re - rounded).abs().max(v.im.abs())
            };
            if worst.as_ref().map_or(true, |w| residual > w.4) {
                worst = Some((idx / (n * n), (idx / n) % n, idx % n, *v, residual));
            }
        }
        worst
    }

    /// Fusion ring from the Verlinde formula, with duals from `S^2`.
    pub fn verlinde_fusion(&self, tol: &Tolerances) -> Result<FusionRing, ModularError> {
        self.check_pseudo_unitary(tol)?;
        let dual = self.dual_permutation(tol)?;
        let values = self.verlinde_values();
        if let Some((a, b, c, v, residual)) = self.worst_verlinde(&values) {
            if !(residual <= tol.verlinde) {
                return Err(ModularError::Integrality {
                    a: self.names[a].clone(),
                    b: self.names[b].clone(),
                    c: self.names[c].clone(),
                    re: v.re,
                    im: v.im,
                    residual,
                });
            }
        }
        let n = self.len();
        let entries = values.iter().enumerate().filter_map(|(idx, v)| {
            let m = v.re.round() as u64;
            (m != 0).then(|| {
                (
                    Label(idx / (n * n)),
                    Label((idx / n) % n),
                    Label(idx % n),
                    BigUint::from(m),
                )
            })
        });
        Ok(FusionRing::with_duals(self.names.clone(), self.unit, dual, entries)?)
    }

    /// `d_a = S_{1a} / S_{11}`.
    pub fn quantum_dims(&self) -> Vec<f64> {
        let s00 = self.s(self.unit, self.unit);
        self.labels().map(|a| (self.s(self.unit, a) / s00).re).collect()
    }

    /// Checks symmetry, unitarity, positivity of the unit row, the `S^2`
    /// permutation, the unit twist and Verlinde integrality.
    pub fn validate(&self, tol: &Tolerances) -> CheckReport {
        let n = self.len();
        let mut report = CheckReport::new();
        let pair = |a: usize, b: usize| format!("({},{})", self.names[a], self.names[b]);

        let mut bad = Vec::new();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in (a + 1)..n {
                let d = (self.s[a * n + b] - self.s[b * n + a]).norm();
                worst = worst.max(d);
                if d > tol.check {
                    bad.push(pair(a, b));
                }
            }
        }
        report.verdict(
            "modular.symmetry",
            "S is symmetric",
            Outcome::Fail,
            format!("max |S_ab - S_ba| = {:.3e}", worst),
            bad,
        );

        let mut bad = Vec::new();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let dot: Complex64 = (0..n).map(|x| self.s[a * n + x] * self.s[b * n + x].conj()).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                let d = (dot - Complex64::new(target, 0.0)).norm();
                worst = worst.max(d);
                if d > tol.check {
                    bad.push(pair(a, b));
                }
            }
        }
        report.verdict(
            "modular.unitarity",
            "S is unitary",
            Outcome::Fail,
            format!("max |SS† - I| = {:.3e}", worst),
            bad,
        );

        let bad: Vec<String> = self
            .labels()
            .filter(|&b| {
                let x = self.s(self.unit, b);
                x.re <= tol.check || x.im.abs() > tol.check
            })
            .map(|b| String::from(self.name(b)))
            .collect();
        let positive = bad.is_empty();
        report.verdict(
            "modular.positivity",
            "unit row of S is positive (pseudo-unitary)",
            Outcome::Fail,
            "",
            bad,
        );

        let permutation = self.dual_permutation(tol);
        match &permutation {
            Ok(_) => report.pass(
                "modular.s2",
                "S^2 is a permutation involution fixing the unit",
                "",
            ),
            Err(e) => report.verdict(
                "modular.s2",
                "S^2 is a permutation involution fixing the unit",
                Outcome::Fail,
                format!("{}", e),
                vec![String::from("S^2")],
            ),
        }

        let mut bad = Vec::new();
        if !self.h[self.unit.0].is_zero() {
            bad.push(format!("h_{} = {}", self.name(self.unit), self.h[self.unit.0]));
        }
        if let Some((i, _)) = self.h.iter().enumerate().find(|(_, h)| h.is_negative()) {
            bad.push(format!("h_{} < 0", self.names[i]));
        }
        report.verdict(
            "modular.unit_twist",
            "h_1 = 0 so the unit twist is trivial",
            Outcome::Fail,
            "",
            bad,
        );

        if positive {
            let values = self.verlinde_values();
            let worst = self.worst_verlinde(&values);
            let (detail, bad) = match worst {
                Some((a, b, c, _, r)) if !(r <= tol.verlinde) => (
                    format!("worst residual {:.3e}", r),
                    vec![format!("({},{};{})", self.names[a], self.names[b], self.names[c])],
                ),
                Some((_, _, _, _, r)) => (format!("worst residual {:.3e}", r), Vec::new()),
                None => (String::new(), Vec::new()),
            };
            report.verdict(
                "modular.verlinde",
                "Verlinde numbers are nonnegative integers",
                Outcome::Fail,
                detail,
                bad,
            );
        } else {
            report.skip(
                "modular.verlinde",
                "Verlinde numbers are nonnegative integers",
                "unit row not positive",
            );
        }
        report
    }

    /// Deligne product: labels `(a, x)` at `a * other.len() + x`, Kronecker
    /// product S-matrix, additive weights and central charge.
    pub fn deligne(&self, other: &ModularData) -> ModularData {
        let (n1, n2) = (self.len(), other.len());
        let n = n1 * n2;
        let mut s = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] =
                    self.s[(i / n2) * n1 + j / n2] * other.s[(i % n2) * n2 + j % n2];
            }
        }
        let names = self
            .names
            .iter()
            .flat_map(|a| other.names.iter().map(move |x| format!("({},{})", a, x)))
            .collect();
        let h = self
            .h
            .iter()
            .flat_map(|a| other.h.iter().map(move |x| a + x))
            .collect();
        ModularData {
            names,
            s,
            h,
            c: &self.c + &other.c,
            unit: Label(self.unit.0 * n2 + other.unit.0),
        }
    }

    /// Whether every label in `subset` has an integral conformal weight.
    pub fn twist_integral(&self, subset: &[Label]) -> Result<TwistIntegrality, ModularError> {
        let mut offenders = Vec::new();
        for &a in subset {
            self.require(a)?;
            if !exact::is_integral(&self.h[a.0]) {
                offenders.push(a);
            }
        }
        Ok(TwistIntegrality {
            integral: offenders.is_empty(),
            offenders,
        })
    }
}
