#![allow(dead_code)]

use std::sync::Arc;

use mirrorext_core::affine::{ising, sl2_modular, sln_modular};
use mirrorext_core::{BigUint, Category, FusionRing, Label, Tolerances};

pub const TOL: Tolerances = Tolerances::DEFAULT;

pub fn one() -> BigUint {
    BigUint::from(1u32)
}

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

pub fn l(i: usize) -> Label {
    Label(i)
}

/// Group ring of Z/n with labels 0..n.
pub fn cyclic_ring(n: usize) -> FusionRing {
    let names = (0..n).map(|i| format!("g{}", i)).collect();
    let entries = (0..n)
        .flat_map(|a| (0..n).map(move |b| (Label(a), Label(b), Label((a + b) % n), one())));
    FusionRing::new(names, Label(0), entries).unwrap()
}

/// Hand-entered Ising fusion rules: 1, eps, sigma.
pub fn ising_ring() -> FusionRing {
    let (u, e, s) = (l(0), l(1), l(2));
    let mut entries = vec![
        (e, e, u),
        (e, s, s),
        (s, e, s),
        (s, s, u),
        (s, s, e),
    ];
    for a in [u, e, s] {
        entries.push((u, a, a));
        if a != u {
            entries.push((a, u, a));
        }
    }
    FusionRing::new(
        vec!["1".into(), "eps".into(), "sigma".into()],
        u,
        entries.into_iter().map(|(a, b, c)| (a, b, c, one())),
    )
    .unwrap()
}

pub fn sl2(k: i64) -> Arc<Category> {
    Arc::new(Category::new(sl2_modular(k).unwrap(), &TOL).unwrap())
}

pub fn sln(n: i64, k: i64) -> Arc<Category> {
    Arc::new(Category::new(sln_modular(n, k).unwrap(), &TOL).unwrap())
}

pub fn ising_cat() -> Arc<Category> {
    Arc::new(Category::new(ising(), &TOL).unwrap())
}

/// Closed-form quantum dimension of spin-l/2 at level k.
pub fn sl2_qdim(l: usize, k: i64) -> f64 {
    let q = std::f64::consts::PI / (k + 2) as f64;
    ((l + 1) as f64 * q).sin() / q.sin()
}

use mirrorext_core::BranchingMatrix;

/// Builds a branching from label names.
pub fn branching(
    cat1: &Arc<Category>,
    cat2: &Arc<Category>,
    pairs: &[(&str, &str, u64)],
) -> BranchingMatrix {
    let pairs = pairs.iter().map(|(i, j, m)| {
        (
            cat1.label_by_name(i).unwrap_or_else(|| panic!("no label {i}")),
            cat2.label_by_name(j).unwrap_or_else(|| panic!("no label {j}")),
            big(*m),
        )
    });
    BranchingMatrix::new(cat1.clone(), cat2.clone(), pairs).unwrap()
}

/// Coset branching of sl2(2) against the Ising model.
pub fn gko() -> BranchingMatrix {
    branching(&sl2(2), &ising_cat(), &[("l0", "1", 1), ("l2", "eps", 1)])
}

/// sl2(4) ⊗ sl4(2) inside sl8(1).
pub fn level_rank() -> BranchingMatrix {
    branching(
        &sl2(4),
        &sln(4, 2),
        &[("l0", "(0,0,0)", 1), ("l2", "(1,0,1)", 1), ("l4", "(0,2,0)", 1)],
    )
}
