//! Extensions `V^e = V ⊕ ⊕ m_i M^i` on one side of a validated branching and
//! their mirrors `(V^c)^e = V^c ⊕ ⊕ m_i (N^{τ(i)})'` on the other.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::branching::{BranchingMatrix, Tau};
use crate::category::Category;
use crate::exact;
use crate::label::Label;
use crate::report::{CheckReport, Outcome};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn number(self) -> u8 {
        match self {
            Side::First => 1,
            Side::Second => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Side> {
        match n {
            1 => Some(Side::First),
            2 => Some(Side::Second),
            _ => None,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MirrorError {
    #[error("branching matrix has not been validated")]
    NotValidated,
    #[error("invalid extension: {0}")]
    InvalidInput(String),
    #[error("extension fails its checks")]
    Precondition(CheckReport),
}

/// Multiplicities `m` over the labels of one side of a branching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub side: Side,
    pub m: BTreeMap<Label, BigUint>,
    /// User-declared simplicity of the extension; carried, not checked.
    pub simple: bool,
}

impl ExtensionSpec {
    pub fn new(side: Side, m: impl IntoIterator<Item = (Label, BigUint)>) -> Self {
        ExtensionSpec {
            side,
            m: m.into_iter().filter(|(_, k)| !k.is_zero()).collect(),
            simple: true,
        }
    }

    /// `m = {unit: 1}` on the given side.
    pub fn trivial(z: &BranchingMatrix, side: Side) -> Self {
        Self::new(side, [(z.cat(side).unit(), BigUint::one())])
    }

    pub fn multiplicity(&self, a: Label) -> BigUint {
        self.m.get(&a).cloned().unwrap_or_default()
    }

    fn support(&self) -> impl Iterator<Item = Label> + '_ {
        self.m.iter().filter(|(_, k)| !k.is_zero()).map(|(a, _)| *a)
    }

    fn fpdim(&self, cat: &Category) -> f64 {
        self.m
            .iter()
            .map(|(a, k)| k.to_f64().unwrap_or(f64::INFINITY) * cat.fpdim(*a))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MirrorResult {
    /// Side of `m_prime`.
    pub side: Side,
    pub m_prime: BTreeMap<Label, BigUint>,
    /// `τ` oriented from the input side to the mirror side.
    pub tau_used: Tau,
    pub report: CheckReport,
    pub simple: bool,
}

impl MirrorResult {
    pub fn spec(&self) -> ExtensionSpec {
        ExtensionSpec {
            side: self.side,
            m: self.m_prime.clone(),
            simple: self.simple,
        }
    }
}

fn oriented_tau(z: &BranchingMatrix, side: Side) -> Result<Tau, MirrorError> {
    let tau = z.tau().ok_or(MirrorError::NotValidated)?;
    Ok(match side {
        Side::First => tau.clone(),
        Side::Second => tau.inverted(),
    })
}

/// Ring-level checks on an extension of the `side` category of `z`.
pub fn check_extension(
    z: &BranchingMatrix,
    spec: &ExtensionSpec,
    tol: &Tolerances,
) -> Result<CheckReport, MirrorError> {
    if !z.is_validated() {
        return Err(MirrorError::NotValidated);
    }
    let cat = z.cat(spec.side);
    if let Some(bad) = spec.m.keys().find(|a| !cat.contains(**a)) {
        return Err(MirrorError::InvalidInput(format!("label {} out of range", bad)));
    }
    let name = |a: Label| String::from(cat.name(a));
    let mut report = CheckReport::new();

    let unit_ok = spec.multiplicity(cat.unit()).is_one();
    report.verdict(
        "extension.a",
        "connected: the unit appears exactly once",
        Outcome::Fail,
        "",
        if unit_ok { Vec::new() } else { Vec::from([name(cat.unit())]) },
    );

    let support = z.support(spec.side);
    report.verdict(
        "extension.b",
        "constituents lie in the branching support",
        Outcome::Fail,
        "",
        spec.support().filter(|a| !support.contains(a)).map(name).collect(),
    );

    report.verdict(
        "extension.c",
        "trivial twist: every constituent has integral weight",
        Outcome::Fail,
        "",
        spec.support()
            .filter(|a| !exact::is_integral(cat.h(*a)))
            .map(|a| format!("h_{} = {}", cat.name(a), cat.h(a)))
            .collect(),
    );

    report.verdict(
        "extension.d",
        "self-dual: m_i = m_i'",
        Outcome::Fail,
        "",
        spec.support()
            .filter(|&a| spec.multiplicity(a) != spec.multiplicity(cat.dual(a)))
            .map(name)
            .collect(),
    );

    let algebra = spec.fpdim(cat);
    let bound = cat.fpdim_of(support.iter().copied());
    report.verdict(
        "extension.e",
        "FPdim_C(A) bounded by FPdim of the support subcategory",
        Outcome::Fail,
        format!("FPdim_C(A) = {}, bound = {}", algebra, bound),
        if algebra <= bound + tol.check {
            Vec::new()
        } else {
            Vec::from([format!("{} > {}", algebra, bound)])
        },
    );

    let seeds: Vec<Label> = spec.support().collect();
    let closure = cat
        .ring()
        .subring_closure(&seeds)
        .expect("labels checked above");
    report.verdict(
        "extension.f",
        "constituents closed under fusion",
        Outcome::Warn,
        "",
        closure.iter().filter(|a| !spec.m.contains_key(a)).map(|a| name(*a)).collect(),
    );
    Ok(report)
}

/// Mirror multiplicities `m'_{τ(i)'} = m_i` on the other side of `z`.
///
/// Fails with [`MirrorError::Precondition`] when [`check_extension`] reports
/// a hard failure; warnings do not block.
pub fn mirror_extend(
    z: &BranchingMatrix,
    spec: &ExtensionSpec,
    tol: &Tolerances,
) -> Result<MirrorResult, MirrorError> {
    let mut report = check_extension(z, spec, tol)?;
    if !report.passed() {
        return Err(MirrorError::Precondition(report));
    }
    let tau = oriented_tau(z, spec.side)?;
    let (source, target) = (z.cat(spec.side), z.cat(spec.side.other()));
    let mut m_prime = BTreeMap::new();
    for (&i, k) in &spec.m {
        let j = tau.get(i).expect("support checked above");
        m_prime.insert(target.dual(j), k.clone());
    }
    let mirrored = ExtensionSpec {
        side: spec.side.other(),
        m: m_prime,
        simple: spec.simple,
    };

    report.verdict(
        "mirror.p1",
        "mirror constituents have integral weight",
        Outcome::Fail,
        "",
        mirrored
            .support()
            .filter(|a| !exact::is_integral(target.h(*a)))
            .map(|a| format!("h_{} = {}", target.name(a), target.h(a)))
            .collect(),
    );

    let (before, after) = (spec.fpdim(source), mirrored.fpdim(target));
    report.verdict(
        "mirror.p2",
        "FPdim of the extension is preserved",
        Outcome::Fail,
        format!("{} vs {}", before, after),
        if (before - after).abs() < tol.check {
            Vec::new()
        } else {
            Vec::from([format!("|{} - {}|", before, after)])
        },
    );

    let again = check_extension(z, &mirrored, tol)?;
    let failures: Vec<String> = again.failures().map(|c| String::from(c.code)).collect();
    report.verdict(
        "mirror.p3",
        "mirror passes the extension checks",
        Outcome::Fail,
        "",
        failures,
    );
    for w in again.warnings() {
        let mut w = w.clone();
        w.detail = format!("mirror side: {}", w.detail);
        report.push(w);
    }

    Ok(MirrorResult {
        side: mirrored.side,
        m_prime: mirrored.m,
        tau_used: tau,
        report,
        simple: spec.simple,
    })
}

/// Whether mirroring twice, the second time through the transposed and
/// dualized branching, returns the original multiplicities.
pub fn mirror_involution(
    z: &BranchingMatrix,
    spec: &ExtensionSpec,
    tol: &Tolerances,
) -> Result<bool, MirrorError> {
    let first = mirror_extend(z, spec, tol)?;
    let flipped = z
        .transposed_dual()
        .validated(tol)
        .map_err(MirrorError::Precondition)?;
    // Side 2 of z is side 1 of the flipped matrix and vice versa.
    let back = ExtensionSpec {
        side: first.side.other(),
        m: first.m_prime,
        simple: first.simple,
    };
    let second = mirror_extend(&flipped, &back, tol)?;
    Ok(second.side.other() == spec.side && second.m_prime == spec.m)
}
