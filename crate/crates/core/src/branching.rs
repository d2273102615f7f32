//! Decomposition matrices `Z_{ij}` of an extension `U ⊃ V¹ ⊗ V²`,
//!
//! `U = ⊕ Z_{ij} M^i ⊗ N^j`,
//!
//! with the necessary conditions a genuine extension satisfies, and a
//! constraint search that enumerates every candidate meeting them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::category::Category;
use crate::exact;
use crate::fusion_ring::FusionRing;
use crate::label::Label;
use crate::mirror::Side;
use crate::report::{Check, CheckReport, Outcome, MAX_OFFENDERS};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BranchingError {
    #[error("invalid branching input: {0}")]
    InvalidInput(String),
    #[error("search budget exceeded after {explored} partial assignments (cap {cap})")]
    BudgetExceeded { explored: u64, cap: u64 },
}

/// The bijection `τ` between the two supports.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tau {
    forward: BTreeMap<Label, Label>,
    backward: BTreeMap<Label, Label>,
}

impl Tau {
    fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut tau = Tau::default();
        for (i, j) in pairs {
            tau.forward.insert(i, j);
            tau.backward.insert(j, i);
        }
        tau
    }

    pub fn get(&self, i: Label) -> Option<Label> {
        self.forward.get(&i).copied()
    }

    pub fn inverse(&self, j: Label) -> Option<Label> {
        self.backward.get(&j).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, Label)> + '_ {
        self.forward.iter().map(|(i, j)| (*i, *j))
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Map from side 2 to side 1.
    pub fn inverted(&self) -> Tau {
        Tau {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }
}

/// The named conditions checked by [`BranchingMatrix::validate`], in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BranchingCheck {
    UnitRowColumn,
    MultiplicityFree,
    Bijection,
    DualSymmetry,
    WeightIntegrality,
    FusionClosure,
    FusionRules,
    FpdimBalance,
    GlobalDimension,
}

impl BranchingCheck {
    pub const ALL: [BranchingCheck; 9] = [
        BranchingCheck::UnitRowColumn,
        BranchingCheck::MultiplicityFree,
        BranchingCheck::Bijection,
        BranchingCheck::DualSymmetry,
        BranchingCheck::WeightIntegrality,
        BranchingCheck::FusionClosure,
        BranchingCheck::FusionRules,
        BranchingCheck::FpdimBalance,
        BranchingCheck::GlobalDimension,
    ];

    pub fn code(self) -> &'static str {
        match self {
            BranchingCheck::UnitRowColumn => "branching.a",
            BranchingCheck::MultiplicityFree => "branching.b",
            BranchingCheck::Bijection => "branching.c",
            BranchingCheck::DualSymmetry => "branching.d",
            BranchingCheck::WeightIntegrality => "branching.e",
            BranchingCheck::FusionClosure => "branching.f",
            BranchingCheck::FusionRules => "branching.g",
            BranchingCheck::FpdimBalance => "branching.h",
            BranchingCheck::GlobalDimension => "branching.i",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BranchingCheck::UnitRowColumn => "vacuum row and column: Z_11 = 1 and no other vacuum pairing",
            BranchingCheck::MultiplicityFree => "multiplicity free: nonzero Z_ij equal 1",
            BranchingCheck::Bijection => "support is the graph of a bijection tau",
            BranchingCheck::DualSymmetry => "dual symmetry Z_ij = Z_i'j'",
            BranchingCheck::WeightIntegrality => "h_i + h_j is a nonnegative integer on the support",
            BranchingCheck::FusionClosure => "both supports closed under fusion",
            BranchingCheck::FusionRules => "tau preserves fusion rules",
            BranchingCheck::FpdimBalance => "FPdim balance across tau",
            BranchingCheck::GlobalDimension => "FPdim(C_A) FPdim_C(A) = FPdim(C) on the supports",
        }
    }

    fn needs_tau(self) -> bool {
        matches!(
            self,
            BranchingCheck::FusionRules | BranchingCheck::FpdimBalance | BranchingCheck::GlobalDimension
        )
    }
}

/// Decomposition matrix of `U` over `V¹ ⊗ V²`; `cat1` is the `V¹` side and
/// `cat2` the commutant side.
#[derive(Clone, Debug)]
pub struct BranchingMatrix {
    cat1: Arc<Category>,
    cat2: Arc<Category>,
    entries: BTreeMap<(Label, Label), BigUint>,
    tau: Option<Tau>,
}

impl BranchingMatrix {
    pub fn new(
        cat1: Arc<Category>,
        cat2: Arc<Category>,
        pairs: impl IntoIterator<Item = (Label, Label, BigUint)>,
    ) -> Result<Self, BranchingError> {
        let mut entries = BTreeMap::new();
        for (i, j, m) in pairs {
            if !cat1.contains(i) {
                return Err(BranchingError::InvalidInput(format!("side-1 label {} out of range", i)));
            }
            if !cat2.contains(j) {
                return Err(BranchingError::InvalidInput(format!("side-2 label {} out of range", j)));
            }
            if m.is_zero() {
                continue;
            }
            if entries.insert((i, j), m).is_some() {
                return Err(BranchingError::InvalidInput(format!(
                    "duplicate pair ({},{})",
                    cat1.name(i),
                    cat2.name(j)
                )));
            }
        }
        Ok(BranchingMatrix {
            cat1,
            cat2,
            entries,
            tau: None,
        })
    }

    /// `U = V¹ ⊗ V²` itself.
    pub fn vacuum(cat1: Arc<Category>, cat2: Arc<Category>) -> Self {
        let (u1, u2) = (cat1.unit(), cat2.unit());
        Self::new(cat1, cat2, [(u1, u2, BigUint::one())]).expect("units are valid labels")
    }

    pub fn cat1(&self) -> &Arc<Category> {
        &self.cat1
    }

    pub fn cat2(&self) -> &Arc<Category> {
        &self.cat2
    }

    pub fn cat(&self, side: Side) -> &Arc<Category> {
        match side {
            Side::First => &self.cat1,
            Side::Second => &self.cat2,
        }
    }

    /// Nonzero entries `((i, j), Z_ij)`.
    pub fn entries(&self) -> impl Iterator<Item = (Label, Label, &BigUint)> + '_ {
        self.entries.iter().map(|((i, j), m)| (*i, *j, m))
    }

    pub fn entry(&self, i: Label, j: Label) -> BigUint {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn support(&self, side: Side) -> BTreeSet<Label> {
        self.entries
            .keys()
            .map(|&(i, j)| match side {
                Side::First => i,
                Side::Second => j,
            })
            .collect()
    }

    pub fn tau(&self) -> Option<&Tau> {
        self.tau.as_ref()
    }

    pub fn is_validated(&self) -> bool {
        self.tau.is_some()
    }

    /// Runs every check in order and stores `τ` when all of them pass.
    pub fn validate(&mut self, tol: &Tolerances) -> CheckReport {
        let (report, tau) = self.run_checks(tol);
        self.tau = if report.passed() { tau } else { None };
        report
    }

    /// Consumes the matrix and returns it validated, or the failing report.
    pub fn validated(mut self, tol: &Tolerances) -> Result<Self, CheckReport> {
        let report = self.validate(tol);
        if report.passed() {
            Ok(self)
        } else {
            Err(report)
        }
    }

    pub fn run_checks(&self, tol: &Tolerances) -> (CheckReport, Option<Tau>) {
        let tau = self.bijection().ok();
        let mut report = CheckReport::new();
        for check in BranchingCheck::ALL {
            if check.needs_tau() && tau.is_none() {
                report.skip(check.code(), check.name(), "support is not a bijection");
            } else {
                report.push(self.evaluate(check, tau.as_ref(), tol));
            }
        }
        (report, tau)
    }

    /// Evaluates one condition on its own.
    pub fn check(&self, which: BranchingCheck, tol: &Tolerances) -> Check {
        match self.bijection() {
            Ok(tau) => self.evaluate(which, Some(&tau), tol),
            Err(_) if which.needs_tau() => Check {
                code: which.code(),
                name: which.name(),
                outcome: Outcome::Skipped,
                detail: "support is not a bijection".into(),
                offenders: Vec::new(),
            },
            Err(_) => self.evaluate(which, None, tol),
        }
    }

    fn pair_name(&self, i: Label, j: Label) -> String {
        format!("({},{})", self.cat1.name(i), self.cat2.name(j))
    }

    /// The support read as a partial bijection; offenders are rows or
    /// columns holding more than one pair.
    fn bijection(&self) -> Result<Tau, Vec<String>> {
        let mut rows: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
        let mut cols: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
        for &(i, j) in self.entries.keys() {
            rows.entry(i).or_default().push(j);
            cols.entry(j).or_default().push(i);
        }
        let mut bad: Vec<String> = rows
            .iter()
            .filter(|(_, js)| js.len() > 1)
            .map(|(i, _)| format!("row {}", self.cat1.name(*i)))
            .collect();
        bad.extend(
            cols.iter()
                .filter(|(_, is)| is.len() > 1)
                .map(|(j, _)| format!("column {}", self.cat2.name(*j))),
        );
        if bad.is_empty() {
            Ok(Tau::from_pairs(self.entries.keys().copied()))
        } else {
            Err(bad)
        }
    }

    fn evaluate(&self, which: BranchingCheck, tau: Option<&Tau>, tol: &Tolerances) -> Check {
        let (c1, c2) = (&self.cat1, &self.cat2);
        let (u1, u2) = (c1.unit(), c2.unit());
        let mut detail = String::new();
        let mut bad: Vec<String> = Vec::new();
        match which {
            BranchingCheck::UnitRowColumn => {
                if self.entry(u1, u2) != BigUint::one() {
                    bad.push(self.pair_name(u1, u2));
                }
                for (&(i, j), _) in &self.entries {
                    if (i == u1) != (j == u2) {
                        bad.push(self.pair_name(i, j));
                    }
                }
            }
            BranchingCheck::MultiplicityFree => {
                for (&(i, j), m) in &self.entries {
                    if !m.is_one() {
                        bad.push(format!("{} = {}", self.pair_name(i, j), m));
                    }
                }
            }
            BranchingCheck::Bijection => {
                if let Err(b) = self.bijection() {
                    bad = b;
                }
            }
            BranchingCheck::DualSymmetry => {
                for (&(i, j), m) in &self.entries {
                    if self.entry(c1.dual(i), c2.dual(j)) != *m {
                        bad.push(self.pair_name(i, j));
                    }
                }
            }
            BranchingCheck::WeightIntegrality => {
                for &(i, j) in self.entries.keys() {
                    let sum = c1.h(i) + c2.h(j);
                    if !exact::is_integral(&sum) || sum.is_negative() || c1.h(i).is_negative() || c2.h(j).is_negative() {
                        bad.push(format!("{}: {} + {} = {}", self.pair_name(i, j), c1.h(i), c2.h(j), sum));
                    }
                }
            }
            BranchingCheck::FusionClosure => {
                for (side, cat) in [(Side::First, c1), (Side::Second, c2)] {
                    let support = self.support(side);
                    let seeds: Vec<Label> = support.iter().copied().collect();
                    let closure = cat
                        .ring()
                        .subring_closure(&seeds)
                        .expect("support labels are in range");
                    for extra in closure.difference(&support) {
                        bad.push(format!("side {}: {}", side.number(), cat.name(*extra)));
                    }
                }
            }
            BranchingCheck::FusionRules => {
                let tau = tau.expect("tau required");
                let (r1, r2) = (c1.ring(), c2.ring());
                let support: Vec<(Label, Label)> = tau.iter().collect();
                'outer: for &(a, ta) in &support {
                    for &(b, tb) in &support {
                        for &(c, tc) in &support {
                            let left = r1.multiplicity(a, b, c);
                            let dualized = r2.multiplicity(c2.dual(ta), c2.dual(tb), c2.dual(tc));
                            let plain = r2.multiplicity(ta, tb, tc);
                            if left != dualized || left != plain {
                                bad.push(format!(
                                    "({},{};{}): {} vs {} / {}",
                                    c1.name(a),
                                    c1.name(b),
                                    c1.name(c),
                                    left,
                                    dualized,
                                    plain
                                ));
                                if bad.len() >= MAX_OFFENDERS {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            BranchingCheck::FpdimBalance => {
                let tau = tau.expect("tau required");
                for (i, j) in tau.iter() {
                    if (c1.fpdim(i) - c2.fpdim(j)).abs() >= tol.check {
                        bad.push(format!(
                            "{}: {} vs {}",
                            self.pair_name(i, j),
                            c1.fpdim(i),
                            c2.fpdim(j)
                        ));
                    }
                }
                let algebra = self.algebra_fpdim();
                let d1 = c1.fpdim_of(tau.iter().map(|(i, _)| i));
                let d2 = c2.fpdim_of(tau.iter().map(|(_, j)| j));
                detail = format!("FPdim_C(A) = {}, FPdim C1^0 = {}, FPdim C2^0 = {}", algebra, d1, d2);
                if (algebra - d1).abs() >= tol.check {
                    bad.push(String::from("FPdim_C(A) != FPdim C1^0"));
                }
                if (algebra - d2).abs() >= tol.check {
                    bad.push(String::from("FPdim_C(A) != FPdim C2^0"));
                }
            }
            BranchingCheck::GlobalDimension => {
                let tau = tau.expect("tau required");
                let d1 = c1.fpdim_of(tau.iter().map(|(i, _)| i));
                let d2 = c2.fpdim_of(tau.iter().map(|(_, j)| j));
                let total = d1 * d2;
                let algebra = self.algebra_fpdim();
                let modules = total / algebra;
                detail = format!("FPdim C = {}, FPdim_C(A) = {}, FPdim C_A = {}", total, algebra, modules);
                if (modules - d1).abs() >= tol.check {
                    bad.push(String::from("FPdim C_A != FPdim C1^0"));
                }
                if (modules - d2).abs() >= tol.check {
                    bad.push(String::from("FPdim C_A != FPdim C2^0"));
                }
                if modules < 1.0 - tol.check {
                    bad.push(String::from("FPdim C_A < 1"));
                }
            }
        }
        let outcome = if bad.is_empty() { Outcome::Pass } else { Outcome::Fail };
        bad.truncate(MAX_OFFENDERS);
        Check {
            code: which.code(),
            name: which.name(),
            outcome,
            detail,
            offenders: bad,
        }
    }

    /// `FPdim_C(A) = Σ Z_ij FPdim(M^i) FPdim(N^j)`.
    pub fn algebra_fpdim(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(i, j), m)| {
                let m = num_traits::ToPrimitive::to_f64(m).unwrap_or(f64::INFINITY);
                m * self.cat1.fpdim(i) * self.cat2.fpdim(j)
            })
            .sum()
    }

    /// Transpose with both sides dualized: `Z̃_{j,i} = Z_{i',j'}`, with the
    /// categories swapped. The result is not validated.
    pub fn transposed_dual(&self) -> BranchingMatrix {
        let entries = self
            .entries
            .iter()
            .map(|(&(i, j), m)| ((self.cat2.dual(j), self.cat1.dual(i)), m.clone()))
            .collect();
        BranchingMatrix {
            cat1: self.cat2.clone(),
            cat2: self.cat1.clone(),
            entries,
            tau: None,
        }
    }
}

/// `dim Hom_A(A ⊗ u, A ⊗ v) = Σ_a n_a N_{a v}^u` for an algebra object
/// `A = ⊕ n_a a`.
pub fn free_module_hom(
    ring: &FusionRing,
    algebra: &BTreeMap<Label, BigUint>,
    u: Label,
    v: Label,
) -> Result<BigUint, BranchingError> {
    for &l in algebra.keys().chain([&u, &v]) {
        if !ring.contains(l) {
            return Err(BranchingError::InvalidInput(format!("label {} out of range", l)));
        }
    }
    if algebra.get(&ring.unit()).map_or(true, Zero::is_zero) {
        return Err(BranchingError::InvalidInput(String::from(
            "algebra must contain the unit",
        )));
    }
    Ok(algebra
        .iter()
        .map(|(&a, n)| n * ring.multiplicity(a, v, u))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Largest number of pairs (vacuum included) in a candidate support.
    pub max_support: Option<usize>,
    /// Cap on explored partial assignments.
    pub budget: u64,
    pub tol: Tolerances,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_support: None,
            budget: 1_000_000,
            tol: Tolerances::DEFAULT,
        }
    }
}

struct Search<'a> {
    cat1: &'a Arc<Category>,
    cat2: &'a Arc<Category>,
    /// Side-1 labels in order, each with its admissible side-2 partners.
    candidates: Vec<(Label, Vec<Label>)>,
    opts: &'a SearchOptions,
    explored: u64,
    found: Vec<BranchingMatrix>,
}

impl Search<'_> {
    fn compatible(cat1: &Category, cat2: &Category, i: Label, j: Label, tol: &Tolerances) -> bool {
        let sum = cat1.h(i) + cat2.h(j);
        exact::is_integral(&sum)
            && !sum.is_negative()
            && (cat1.fpdim(i) - cat2.fpdim(j)).abs() < tol.check
            && (cat1.dual(i) == i) == (cat2.dual(j) == j)
    }

    fn run(
        &mut self,
        pos: usize,
        assigned: &mut BTreeMap<Label, Option<Label>>,
        used: &mut BTreeSet<Label>,
        size: usize,
    ) -> Result<(), BranchingError> {
        self.explored += 1;
        if self.explored > self.opts.budget {
            return Err(BranchingError::BudgetExceeded {
                explored: self.explored,
                cap: self.opts.budget,
            });
        }
        if pos == self.candidates.len() {
            self.leaf(assigned);
            return Ok(());
        }
        let i = self.candidates[pos].0;
        if assigned.contains_key(&i) {
            return self.run(pos + 1, assigned, used, size);
        }
        let di = self.cat1.dual(i);
        // leave i (and its dual) out of the support
        assigned.insert(i, None);
        assigned.insert(di, None);
        self.run(pos + 1, assigned, used, size)?;
        assigned.remove(&i);
        assigned.remove(&di);

        let added = if di == i { 1 } else { 2 };
        if self.opts.max_support.is_some_and(|cap| size + added > cap) {
            return Ok(());
        }
        let partners = self.candidates[pos].1.clone();
        for j in partners {
            let dj = self.cat2.dual(j);
            if used.contains(&j) || used.contains(&dj) {
                continue;
            }
            if di != i {
                let dual_ok = self
                    .candidates
                    .iter()
                    .find(|(l, _)| *l == di)
                    .is_some_and(|(_, ps)| ps.contains(&dj));
                if !dual_ok || dj == j {
                    continue;
                }
            }
            assigned.insert(i, Some(j));
            assigned.insert(di, Some(dj));
            used.insert(j);
            used.insert(dj);
            self.run(pos + 1, assigned, used, size + added)?;
            assigned.remove(&i);
            assigned.remove(&di);
            used.remove(&j);
            used.remove(&dj);
        }
        Ok(())
    }

    fn leaf(&mut self, assigned: &BTreeMap<Label, Option<Label>>) {
        let pairs = core::iter::once((self.cat1.unit(), self.cat2.unit(), BigUint::one())).chain(
            assigned
                .iter()
                .filter_map(|(&i, j)| j.map(|j| (i, j, BigUint::one()))),
        );
        let z = BranchingMatrix::new(self.cat1.clone(), self.cat2.clone(), pairs)
            .expect("search only produces in-range labels");
        if let Ok(z) = z.validated(&self.opts.tol) {
            self.found.push(z);
        }
    }
}

/// Every branching matrix over `cat1 ⊗ cat2` passing all checks, in
/// lexicographic order of the side-1 assignment (vacuum-only first).
///
/// Pairs are pruned by exact weight integrality and FPdim balance before the
/// closure and fusion-rule checks run on complete candidates.
pub fn search_branchings(
    cat1: &Arc<Category>,
    cat2: &Arc<Category>,
    opts: &SearchOptions,
) -> Result<Vec<BranchingMatrix>, BranchingError> {
    let candidates = cat1
        .labels()
        .filter(|&i| i != cat1.unit())
        .map(|i| {
            let partners = cat2
                .labels()
                .filter(|&j| j != cat2.unit() && Search::compatible(cat1, cat2, i, j, &opts.tol))
                .collect();
            (i, partners)
        })
        .collect();
    let mut search = Search {
        cat1,
        cat2,
        candidates,
        opts,
        explored: 0,
        found: Vec::new(),
    };
    if opts.max_support.is_some_and(|cap| cap == 0) {
        return Ok(vec![]);
    }
    search.run(0, &mut BTreeMap::new(), &mut BTreeSet::new(), 1)?;
    Ok(search.found)
}
