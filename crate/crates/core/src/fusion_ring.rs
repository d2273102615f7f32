//! Fusion rings: the Grothendieck ring of a rigid braided category, stored as
//! a sparse tensor of nonnegative multiplicities `N_{ab}^c`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::label::Label;
use crate::report::{CheckReport, Outcome};
use crate::spectral::{self, PowerIteration};

pub type Multiplicity = BigUint;

static ZERO: BigUint = BigUint::ZERO;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("cannot infer duals: {0}")]
    Duality(String),
    #[error("Frobenius-Perron dimension of {0} did not converge")]
    Convergence(String),
    #[error("invalid ring data: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRing {
    names: Vec<String>,
    unit: Label,
    dual: Vec<Label>,
    /// `products[a * n + b]` lists `(c, N_{ab}^c)` with nonzero multiplicity,
    /// sorted by `c`.
    products: Vec<Vec<(Label, Multiplicity)>>,
}

impl FusionRing {
    /// Builds a ring from sparse `(a, b, c, N_{ab}^c)` entries and infers the
    /// duals from the unit channel.
    pub fn new<I>(names: Vec<String>, unit: Label, entries: I) -> Result<Self, RingError>
    where
        I: IntoIterator<Item = (Label, Label, Label, Multiplicity)>,
    {
        let n = names.len();
        let mut ring = Self::with_duals(names, unit, (0..n).map(Label).collect(), entries)?;
        ring.dual = ring.infer_duals()?;
        Ok(ring)
    }

    /// Builds a ring with an explicitly supplied dual map. The map is not
    /// checked here; [`FusionRing::validate`] reports inconsistencies.
    pub fn with_duals<I>(
        names: Vec<String>,
        unit: Label,
        dual: Vec<Label>,
        entries: I,
    ) -> Result<Self, RingError>
    where
        I: IntoIterator<Item = (Label, Label, Label, Multiplicity)>,
    {
        let n = names.len();
        if n == 0 {
            return Err(RingError::Invalid("a fusion ring needs at least one label".into()));
        }
        let check = |l: Label| {
            if l.0 < n {
                Ok(l)
            } else {
                Err(RingError::UnknownLabel(format!("{}", l)))
            }
        };
        check(unit)?;
        if dual.len() != n {
            return Err(RingError::Invalid(format!(
                "dual map has {} entries for {} labels",
                dual.len(),
                n
            )));
        }
        for &d in &dual {
            check(d)?;
        }
        let mut products: Vec<Vec<(Label, Multiplicity)>> = vec![Vec::new(); n * n];
        for (a, b, c, m) in entries {
            check(a)?;
            check(b)?;
            check(c)?;
            if m.is_zero() {
                continue;
            }
            let row = &mut products[a.0 * n + b.0];
            match row.binary_search_by_key(&c, |(l, _)| *l) {
                Ok(_) => {
                    return Err(RingError::Invalid(format!(
                        "duplicate entry N_({},{})^{}",
                        names[a.0], names[b.0], names[c.0]
                    )))
                }
                Err(pos) => row.insert(pos, (c, m)),
            }
        }
        Ok(FusionRing {
            names,
            unit,
            dual,
            products,
        })
    }

    /// The ring with a single object and `1 ⊗ 1 = 1`.
    pub fn trivial() -> Self {
        let one = Label(0);
        Self::with_duals(
            vec![String::from("1")],
            one,
            vec![one],
            [(one, one, one, BigUint::one())],
        )
        .expect("trivial ring")
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

    pub fn dual(&self, a: Label) -> Label {
        self.dual[a.0]
    }

    pub fn duals(&self) -> &[Label] {
        &self.dual
    }

    pub fn contains(&self, a: Label) -> bool {
        a.0 < self.len()
    }

    fn require(&self, a: Label) -> Result<Label, RingError> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(RingError::UnknownLabel(format!("{}", a)))
        }
    }

    /// Nonzero `(c, N_{ab}^c)` in label order. Panics on out-of-range labels.
    pub fn product(&self, a: Label, b: Label) -> &[(Label, Multiplicity)] {
        &self.products[a.0 * self.len() + b.0]
    }

    /// `N_{ab}^c`, zero when absent. Panics on out-of-range labels.
    pub fn multiplicity(&self, a: Label, b: Label, c: Label) -> &Multiplicity {
        let row = self.product(a, b);
        match row.binary_search_by_key(&c, |(l, _)| *l) {
            Ok(i) => &row[i].1,
            Err(_) => &ZERO,
        }
    }

    /// Overwrites one structure constant; used to build deliberately broken rings.
    pub fn set_multiplicity(&mut self, a: Label, b: Label, c: Label, m: Multiplicity) {
        let n = self.len();
        let row = &mut self.products[a.0 * n + b.0];
        match row.binary_search_by_key(&c, |(l, _)| *l) {
            Ok(i) if m.is_zero() => {
                row.remove(i);
            }
            Ok(i) => row[i].1 = m,
            Err(_) if m.is_zero() => {}
            Err(i) => row.insert(i, (c, m)),
        }
    }

    /// Sparse quadruples `(a, b, c, N_{ab}^c)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Label, Label, Label, &Multiplicity)> + '_ {
        let n = self.len();
        self.products.iter().enumerate().flat_map(move |(ab, row)| {
            let (a, b) = (Label(ab / n), Label(ab % n));
            row.iter().map(move |(c, m)| (a, b, *c, m))
        })
    }

    /// The unique involution `d` with `N_{a,d(a)}^1 = 1`.
    pub fn infer_duals(&self) -> Result<Vec<Label>, RingError> {
        let mut dual = Vec::with_capacity(self.len());
        for a in self.labels() {
            let partners: Vec<(Label, &Multiplicity)> = self
                .labels()
                .map(|b| (b, self.multiplicity(a, b, self.unit)))
                .filter(|(_, m)| !m.is_zero())
                .collect();
            match partners.as_slice() {
                [(b, m)] if m.is_one() => dual.push(*b),
                [(b, m)] => {
                    return Err(RingError::Duality(format!(
                        "N_({},{})^unit = {} exceeds 1",
                        self.name(a),
                        self.name(*b),
                        m
                    )))
                }
                [] => {
                    return Err(RingError::Duality(format!(
                        "{} has no dual partner",
                        self.name(a)
                    )))
                }
                _ => {
                    return Err(RingError::Duality(format!(
                        "{} has {} dual partners",
                        self.name(a),
                        partners.len()
                    )))
                }
            }
        }
        Ok(dual)
    }

    pub fn fuse(&self, a: Label, b: Label) -> Result<Vec<(Label, Multiplicity)>, RingError> {
        self.require(a)?;
        self.require(b)?;
        Ok(self.product(a, b).to_vec())
    }

    /// Fusion matrix `(N_a)_{bc} = N_{ab}^c` in sparse floating-point form.
    pub fn fusion_matrix(&self, a: Label) -> Vec<Vec<(usize, f64)>> {
        self.labels()
            .map(|b| {
                self.product(a, b)
                    .iter()
                    .map(|(c, m)| (c.0, m.to_f64().unwrap_or(f64::INFINITY)))
                    .collect()
            })
            .collect()
    }

    fn dense_fusion_matrix(&self, a: Label) -> Vec<Vec<BigInt>> {
        self.labels()
            .map(|b| {
                let mut row = vec![BigInt::zero(); self.len()];
                for (c, m) in self.product(a, b) {
                    row[c.0] = BigInt::from(m.clone());
                }
                row
            })
            .collect()
    }

    /// Frobenius-Perron dimension of one object: the spectral radius of its
    /// fusion matrix.
    pub fn fpdim_object(&self, a: Label) -> Result<f64, RingError> {
        self.fpdim_object_with(a, PowerIteration::default())
    }

    pub fn fpdim_object_with(&self, a: Label, cfg: PowerIteration) -> Result<f64, RingError> {
        self.require(a)?;
        if a == self.unit {
            return Ok(1.0);
        }
        spectral::spectral_radius(&self.dense_fusion_matrix(a), cfg)
            .ok_or_else(|| RingError::Convergence(String::from(self.name(a))))
    }

    /// Frobenius-Perron dimensions of all objects at once, read off the
    /// Perron-Frobenius eigenvector of `Σ_a N_a` (a strictly positive matrix
    /// for a valid ring), normalized at the unit.
    pub fn fpdims(&self) -> Result<Vec<f64>, RingError> {
        let n = self.len();
        let mut total = vec![vec![0.0f64; n]; n];
        for (_, b, c, m) in self.entries() {
            total[b.0][c.0] += m.to_f64().unwrap_or(f64::INFINITY);
        }
        let rows: Vec<Vec<(usize, f64)>> = total
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(_, x)| *x != 0.0).collect())
            .collect();
        let cfg = PowerIteration {
            tolerance: 1e-15,
            ..PowerIteration::default()
        };
        match spectral::perron_vector(&rows, self.unit.0, cfg) {
            Some(v) => Ok(v),
            None => self.labels().map(|a| self.fpdim_object(a)).collect(),
        }
    }

    /// `Σ FPdim(a)^2` over `subset` (all labels when `None`).
    pub fn fpdim_category(&self, subset: Option<&[Label]>) -> Result<f64, RingError> {
        let dims = self.fpdims()?;
        match subset {
            None => Ok(dims.iter().map(|d| d * d).sum()),
            Some(s) => s
                .iter()
                .map(|&a| self.require(a).map(|a| dims[a.0] * dims[a.0]))
                .sum(),
        }
    }

    /// Smallest set containing the unit and `seeds` that is closed under
    /// fusion and duals.
    pub fn subring_closure(&self, seeds: &[Label]) -> Result<BTreeSet<Label>, RingError> {
        let mut set: BTreeSet<Label> = BTreeSet::new();
        set.insert(self.unit);
        for &s in seeds {
            set.insert(self.require(s)?);
        }
        loop {
            let mut grown = set.clone();
            for &a in &set {
                grown.insert(self.dual(a));
                for &b in &set {
                    grown.extend(self.product(a, b).iter().map(|(c, _)| *c));
                }
            }
            if grown.len() == set.len() {
                return Ok(set);
            }
            set = grown;
        }
    }

    /// Deligne tensor product: labels are pairs `(a, x)` at index
    /// `a * other.len() + x`, with multiplicities multiplied factorwise.
    pub fn deligne_product(&self, other: &FusionRing) -> FusionRing {
        let (n1, n2) = (self.len(), other.len());
        let pair = |a: Label, x: Label| Label(a.0 * n2 + x.0);
        let names = self
            .names
            .iter()
            .flat_map(|a| other.names.iter().map(move |x| format!("({},{})", a, x)))
            .collect();
        let dual = (0..n1 * n2)
            .map(|i| pair(self.dual(Label(i / n2)), other.dual(Label(i % n2))))
            .collect();
        let mut products = vec![Vec::new(); n1 * n1 * n2 * n2];
        let n = n1 * n2;
        for a in self.labels() {
            for b in self.labels() {
                let left = self.product(a, b);
                if left.is_empty() {
                    continue;
                }
                for x in other.labels() {
                    for y in other.labels() {
                        let right = other.product(x, y);
                        let row: &mut Vec<(Label, Multiplicity)> =
                            &mut products[pair(a, x).0 * n + pair(b, y).0];
                        for (c, m1) in left {
                            for (z, m2) in right {
                                row.push((pair(*c, *z), m1 * m2));
                            }
                        }
                    }
                }
            }
        }
        FusionRing {
            names,
            unit: pair(self.unit, other.unit),
            dual,
            products,
        }
    }

    /// Checks every ring axiom; failures become report entries.
    pub fn validate(&self) -> CheckReport {
        let mut report = CheckReport::new();
        let name = |l: Label| self.name(l);
        let triple = |a: Label, b: Label, c: Label| format!("({},{};{})", name(a), name(b), name(c));

        let mut bad = Vec::new();
        for a in self.labels() {
            for b in self.labels() {
                let expect = if a == b { BigUint::one() } else { BigUint::zero() };
                if *self.multiplicity(self.unit, a, b) != expect {
                    bad.push(triple(self.unit, a, b));
                }
                if *self.multiplicity(a, self.unit, b) != expect {
                    bad.push(triple(a, self.unit, b));
                }
            }
        }
        report.verdict(
            "ring.unit",
            "unit is a two-sided identity",
            Outcome::Fail,
            "",
            bad,
        );

        let mut bad = Vec::new();
        if self.dual(self.unit) != self.unit {
            bad.push(String::from(name(self.unit)));
        }
        for a in self.labels() {
            if self.dual(self.dual(a)) != a {
                bad.push(String::from(name(a)));
            }
        }
        report.verdict(
            "ring.dual",
            "dual is an involution fixing the unit",
            Outcome::Fail,
            "",
            bad,
        );

        let mut bad = Vec::new();
        for a in self.labels() {
            for b in self.labels() {
                let expect = if b == self.dual(a) { BigUint::one() } else { BigUint::zero() };
                if *self.multiplicity(a, b, self.unit) != expect {
                    bad.push(triple(a, b, self.unit));
                }
            }
        }
        report.verdict(
            "ring.unit_channel",
            "N_ab^1 = 1 exactly when b is dual to a",
            Outcome::Fail,
            "",
            bad,
        );

        report.verdict(
            "ring.assoc",
            "associativity",
            Outcome::Fail,
            "",
            self.associativity_violations(),
        );

        let mut bad = Vec::new();
        for (a, b, c, _) in self.entries() {
            if a < b && self.multiplicity(a, b, c) != self.multiplicity(b, a, c) {
                bad.push(triple(a, b, c));
            }
        }
        for (a, b, c, _) in self.entries() {
            if a > b && self.multiplicity(b, a, c).is_zero() {
                bad.push(triple(b, a, c));
            }
        }
        report.verdict("ring.comm", "commutativity", Outcome::Fail, "", bad);

        let (mut sym, mut frob) = (Vec::new(), Vec::new());
        for a in self.labels() {
            for b in self.labels() {
                for c in self.labels() {
                    let m = self.multiplicity(a, b, c);
                    let d = |x: Label| self.dual(x);
                    if m != self.multiplicity(d(a), d(b), d(c)) {
                        sym.push(triple(a, b, c));
                    }
                    if m != self.multiplicity(d(a), c, b) || m != self.multiplicity(c, d(b), a) {
                        frob.push(triple(a, b, c));
                    }
                }
            }
        }
        report.verdict(
            "ring.dual_sym",
            "dual symmetry N_ab^c = N_a'b'^c'",
            Outcome::Fail,
            "",
            sym,
        );
        report.verdict(
            "ring.frobenius",
            "Frobenius reciprocity N_ab^c = N_a'c^b = N_cb'^a",
            Outcome::Fail,
            "",
            frob,
        );
        report
    }

    /// Quadruples `(a,b,c;d)` where `Σ_e N_ab^e N_ec^d ≠ Σ_f N_bc^f N_af^d`.
    fn associativity_violations(&self) -> Vec<String> {
        let n = self.len();
        let mut left = vec![BigUint::zero(); n];
        let mut right = vec![BigUint::zero(); n];
        let mut bad = Vec::new();
        for a in self.labels() {
            for b in self.labels() {
                for c in self.labels() {
                    left.iter_mut().for_each(BigUint::set_zero);
                    right.iter_mut().for_each(BigUint::set_zero);
                    for (e, m) in self.product(a, b) {
                        for (d, k) in self.product(*e, c) {
                            left[d.0] += m * k;
                        }
                    }
                    for (f, m) in self.product(b, c) {
                        for (d, k) in self.product(a, *f) {
                            right[d.0] += m * k;
                        }
                    }
                    for d in 0..n {
                        if left[d] != right[d] {
                            bad.push(format!(
                                "({},{},{};{})",
                                self.name(a),
                                self.name(b),
                                self.name(c),
                                self.names[d]
                            ));
                        }
                    }
                }
            }
        }
        bad
    }

    /// True when both rings have identical structure constants, units and
    /// duals under the identity relabeling (names are ignored).
    pub fn same_structure(&self, other: &FusionRing) -> bool {
        self.unit == other.unit && self.dual == other.dual && self.products == other.products
    }
}
