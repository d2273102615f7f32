//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`). The process fails when any
//! criterion fails, except those listed in `EXPECTED_RED`: they are computed
//! and printed like every other criterion but cannot be met by any input.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use mirrorext::bundle::load_category;
use mirrorext::{load_bundle, Payload};
use mirrorext_core::affine::{sl2_fusion_oracle, sl2_modular, sln_modular};
use mirrorext_core::branching::{free_module_hom, search_branchings};
use mirrorext_core::mirror::{check_extension, mirror_extend, mirror_involution};
use mirrorext_core::{
    exact, BigUint, BranchingMatrix, Category, ExtensionSpec, FusionRing, Label, SearchOptions,
    Side, Tolerances,
};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const TOL: Tolerances = Tolerances::DEFAULT;
/// Pinned tolerance for every real-valued comparison below.
const EPS: f64 = 1e-9;

/// Criteria that no input can satisfy (see the message printed with them).
const EXPECTED_RED: &[&str] = &["4b"];

struct Verdict {
    id: &'static str,
    title: &'static str,
    ok: bool,
    detail: String,
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn category(name: &str) -> Arc<Category> {
    load_category(&fixtures().join(name), &TOL).unwrap_or_else(|e| panic!("{e}"))
}

fn branching_fixture(name: &str) -> BranchingMatrix {
    match load_bundle(fixtures().join(name), &TOL).unwrap().payload {
        Payload::Branching(b) => b.z,
        _ => panic!("{name} is not a branching"),
    }
}

const MODULAR_FIXTURES: &[&str] = &[
    "sl2_k1.json", "sl2_k2.json", "sl2_k3.json", "sl2_k4.json", "sl2_k5.json", "sl2_k6.json",
    "sl2_k7.json", "sl2_k8.json", "sl2_k9.json", "sl2_k10.json", "sl3_k1.json", "sl4_k2.json",
    "sl5_k1.json", "ising.json",
];

const BRANCHING_FIXTURES: &[&str] = &[
    "gko_ising_branching.json",
    "sl4level1_branching.json",
    "levelrank_2_4.json",
];

fn pairs(cat1: &Arc<Category>, cat2: &Arc<Category>, names: &[(&str, &str, u64)]) -> BranchingMatrix {
    let entries = names.iter().map(|(i, j, m)| {
        (
            cat1.label_by_name(i).unwrap(),
            cat2.label_by_name(j).unwrap(),
            BigUint::from(*m),
        )
    });
    BranchingMatrix::new(cat1.clone(), cat2.clone(), entries).unwrap()
}

fn first_failure(z: &BranchingMatrix) -> Option<&'static str> {
    z.run_checks(&TOL).0.first_failure().map(|c| c.code)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 1..=12 {
        let ring = sl2_modular(k).unwrap().verlinde_fusion(&TOL).unwrap();
        if ring != sl2_fusion_oracle(k).unwrap() {
            bad.push(k);
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        id: "1",
        title: "Verlinde rings equal the closed-form sl2 oracle, k = 1..12, under 5 s",
        ok: bad.is_empty() && elapsed < Duration::from_secs(5),
        detail: format!("mismatched levels {:?}, {:.3} s", bad, elapsed.as_secs_f64()),
    }
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0f64;
    for k in 1..=12i64 {
        let ring = sl2_fusion_oracle(k).unwrap();
        let q = std::f64::consts::PI / (k + 2) as f64;
        for a in ring.labels() {
            let exact = ((a.0 + 1) as f64 * q).sin() / q.sin();
            worst = worst.max((ring.fpdim_object(a).unwrap() - exact).abs());
        }
    }
    Verdict {
        id: "2",
        title: "FPdim of every sl2 object matches sin((l+1)pi/(k+2))/sin(pi/(k+2)), k <= 12",
        ok: worst < EPS,
        detail: format!("max deviation {:.3e}", worst),
    }
}

fn criterion_3() -> Verdict {
    let cats: Vec<(&str, Arc<Category>)> = MODULAR_FIXTURES.iter().map(|n| (*n, category(n))).collect();
    let mut worst = 0.0f64;
    let mut dual_bad = Vec::new();
    let mut count = 0;
    for (n1, c1) in &cats {
        for (n2, c2) in &cats {
            let (r1, r2) = (c1.ring(), c2.ring());
            let product = r1.deligne_product(r2);
            let lhs = product.fpdim_category(None).unwrap();
            let rhs = r1.fpdim_category(None).unwrap() * r2.fpdim_category(None).unwrap();
            worst = worst.max((lhs - rhs).abs());
            for a in r1.labels() {
                for x in r2.labels() {
                    let pair = Label(a.0 * r2.len() + x.0);
                    let expect = Label(r1.dual(a).0 * r2.len() + r2.dual(x).0);
                    if product.dual(pair) != expect {
                        dual_bad.push(format!("{n1} x {n2}"));
                    }
                }
            }
            count += 1;
        }
    }
    dual_bad.dedup();
    Verdict {
        id: "3",
        title: "Deligne products: FPdim factorizes and duals factorize, all pairs of shipped categories",
        ok: worst < EPS && dual_bad.is_empty(),
        detail: format!("{} pairs, max |FPdim(C x D) - FPdim C FPdim D| = {:.3e}, dual mismatches {:?}", count, worst, dual_bad),
    }
}

/// The shipped GKO branching and one mutated variant per constructible check.
fn criterion_4a() -> Verdict {
    let mut gko = branching_fixture("gko_ising_branching.json");
    let report = gko.validate(&TOL);
    let mut problems = Vec::new();
    if !report.passed() || report.checks().len() != 9 {
        problems.push(format!("fixture: {}", report.to_string().replace('\n', "; ")));
    }
    let (k2, is) = (gko.cat1().clone(), gko.cat2().clone());
    let variants: Vec<(&str, BranchingMatrix)> = vec![
        ("branching.a", pairs(&k2, &is, &[("l0", "1", 1), ("l2", "eps", 1), ("l0", "eps", 1)])),
        ("branching.b", pairs(&k2, &is, &[("l0", "1", 1), ("l2", "eps", 2)])),
        ("branching.c", pairs(&k2, &is, &[("l0", "1", 1), ("l2", "eps", 1), ("l2", "sigma", 1)])),
        ("branching.d", pairs(&k2, &category("sl3_k1.json"), &[("l0", "(0,0)", 1), ("l2", "(1,0)", 1)])),
        ("branching.e", pairs(&k2, &is, &[("l0", "1", 1), ("l1", "sigma", 1)])),
        (
            "branching.f",
            pairs(&category("sl2_k4.json"), &category("sl4_k2.json"), &[("l0", "(0,0,0)", 1), ("l2", "(1,0,1)", 1)]),
        ),
        ("branching.g", {
            let c = category("sl5_k1.json");
            let names = ["(0,0,0,0)", "(1,0,0,0)", "(0,1,0,0)", "(0,0,1,0)", "(0,0,0,1)"];
            // a <-> a' swapped on the non-trivial labels: dual-preserving, h-integral, not a homomorphism
            let image = [0, 2, 1, 4, 3];
            let z: Vec<(&str, &str, u64)> = (0..5).map(|a| (names[a], names[image[a]], 1)).collect();
            pairs(&c, &c, &z)
        }),
    ];
    let mut hit = Vec::new();
    for (target, z) in &variants {
        match first_failure(z) {
            Some(code) if code == *target => hit.push(*target),
            other => problems.push(format!("{target} variant first fails at {:?}", other)),
        }
    }
    Verdict {
        id: "4a",
        title: "GKO fixture passes checks (a)-(i); variants for (a)-(g) fail first at their check",
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("fixture passes 9/9, variants {}", hit.join(" "))
        } else {
            problems.join("; ")
        },
    }
}

/// Exhaustive hunt for branchings whose first failing check is (h) or (i).
fn criterion_4b() -> Verdict {
    let small: Vec<Arc<Category>> = ["sl2_k1.json", "sl2_k2.json", "sl2_k3.json", "sl2_k4.json", "sl3_k1.json", "sl5_k1.json", "ising.json"]
        .iter()
        .map(|n| category(n))
        .collect();
    let mut examined = 0u64;
    let mut found: BTreeMap<&'static str, String> = BTreeMap::new();
    for c1 in &small {
        for c2 in &small {
            let rest1: Vec<Label> = c1.labels().filter(|&a| a != c1.unit()).collect();
            let rest2: Vec<Label> = c2.labels().filter(|&a| a != c2.unit()).collect();
            // every partial injection of size <= 3 on the non-unit labels, plus the vacuum pair
            let mut stack: Vec<Vec<(Label, Label)>> = vec![Vec::new()];
            while let Some(extra) = stack.pop() {
                let mut support = vec![(c1.unit(), c2.unit(), BigUint::from(1u32))];
                support.extend(extra.iter().map(|&(i, j)| (i, j, BigUint::from(1u32))));
                let z = BranchingMatrix::new(c1.clone(), c2.clone(), support).unwrap();
                examined += 1;
                if let Some(code @ ("branching.h" | "branching.i")) = first_failure(&z) {
                    found.entry(code).or_insert_with(|| format!("{:?}", extra));
                }
                if extra.len() < 3 {
                    let last = extra.last().map(|p| p.0);
                    for &i in rest1.iter().filter(|&&i| last.map_or(true, |l| i > l)) {
                        for &j in &rest2 {
                            if extra.iter().all(|&(_, jj)| jj != j) {
                                let mut next = extra.clone();
                                next.push((i, j));
                                stack.push(next);
                            }
                        }
                    }
                }
            }
        }
    }
    let ok = found.contains_key("branching.h") && found.contains_key("branching.i");
    Verdict {
        id: "4b",
        title: "variants for (h) and (i) fail first at their check",
        ok,
        detail: format!(
            "{} candidate branchings examined, first-failure (h): {}, (i): {}; once (f) and (g) hold, tau is an isomorphism of fusion subrings, so FPdims agree and (h), (i) cannot fail first",
            examined,
            found.get("branching.h").map_or("none", String::as_str),
            found.get("branching.i").map_or("none", String::as_str),
        ),
    }
}

fn criterion_5() -> Verdict {
    let k2 = category("sl2_k2.json");
    let start = Instant::now();
    let found = search_branchings(&k2, &k2, &SearchOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let supports: Vec<Vec<(String, String)>> = found
        .iter()
        .map(|z| z.entries().map(|(i, j, _)| (k2.name(i).to_string(), k2.name(j).to_string())).collect())
        .collect();
    let want = vec![
        vec![("l0".to_string(), "l0".to_string())],
        vec![("l0".to_string(), "l0".to_string()), ("l2".to_string(), "l2".to_string())],
    ];
    Verdict {
        id: "5",
        title: "search over sl2(2) x sl2(2) returns exactly {vacuum, {(l0,l0),(l2,l2)}} in under 1 s",
        ok: supports == want && elapsed < Duration::from_secs(1),
        detail: format!("{:?}, {:.3} s", supports, elapsed.as_secs_f64()),
    }
}

/// FPdim of the category of right A-modules, from free modules only:
/// decomposes every `A ⊗ x` against the candidate simples `A ⊗ (u ⊠ 1)`.
fn module_category_dim(product: &FusionRing, algebra: &BTreeMap<Label, BigUint>, n2: usize, dims: &[f64]) -> Result<f64, String> {
    let to_u64 = |b: BigUint| u64::try_from(&b).map_err(|_| String::from("huge Hom"));
    let n = product.len();
    let simples: Vec<Label> = (0..n / n2).map(|u| Label(u * n2)).collect();
    for &s in &simples {
        for &t in &simples {
            let h = to_u64(free_module_hom(product, algebra, s, t).map_err(|e| e.to_string())?)?;
            if h != (s == t) as u64 {
                return Err(format!("Hom_A(A{}, A{}) = {}", s, t, h));
            }
        }
    }
    for x in product.labels() {
        let mut fp = 0.0;
        let mut square = 0u64;
        for &s in &simples {
            let c = to_u64(free_module_hom(product, algebra, s, x).map_err(|e| e.to_string())?)?;
            fp += c as f64 * dims[s.0];
            square += c * c;
        }
        let end = to_u64(free_module_hom(product, algebra, x, x).map_err(|e| e.to_string())?)?;
        if square != end || (fp - dims[x.0]).abs() >= EPS {
            return Err(format!("A{} does not decompose over the free simples", x));
        }
    }
    Ok(simples.iter().map(|s| dims[s.0] * dims[s.0]).sum())
}

fn criterion_6() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in BRANCHING_FIXTURES {
        let z = branching_fixture(name).validated(&TOL).unwrap();
        let tau = z.tau().unwrap();
        let (c1, c2) = (z.cat1(), z.cat2());
        let (r1, r2) = (c1.ring(), c2.ring());
        let n2 = r2.len();
        // restrict both rings to the supports, then take the Deligne product
        let s1: Vec<Label> = tau.iter().map(|(i, _)| i).collect();
        let s2: Vec<Label> = tau.iter().map(|(_, j)| j).collect();
        let sub1 = restrict(r1, &s1);
        let sub2 = restrict(r2, &s2);
        let product = sub1.deligne_product(&sub2);
        let m2 = sub2.len();
        let pos1: BTreeMap<Label, usize> = s1.iter().enumerate().map(|(k, l)| (*l, k)).collect();
        let pos2: BTreeMap<Label, usize> = s2.iter().enumerate().map(|(k, l)| (*l, k)).collect();
        let dims = product.fpdims().unwrap();
        let algebra: BTreeMap<Label, BigUint> = tau
            .iter()
            .map(|(i, j)| (Label(pos1[&i] * m2 + pos2[&j]), BigUint::from(1u32)))
            .collect();
        let balance: f64 = algebra
            .keys()
            .map(|&l| product.fpdim_object(l).unwrap())
            .sum();
        let d1 = sub1.fpdim_category(None).unwrap();
        let d2 = sub2.fpdim_category(None).unwrap();
        let total = product.fpdim_category(None).unwrap();
        let identity = match module_category_dim(&product, &algebra, m2, &dims) {
            Ok(ca) => (balance * ca - total).abs(),
            Err(e) => {
                lines.push(format!("{name}: {e}"));
                f64::INFINITY
            }
        };
        let good = (balance - d1).abs() < EPS && (balance - d2).abs() < EPS && identity < EPS;
        ok &= good;
        let _ = n2;
        lines.push(format!(
            "{}: sum = {:.12}, C1^0 = {:.12}, C2^0 = {:.12}, |FPdim A * FPdim C_A - FPdim C| = {:.1e}",
            name, balance, d1, d2, identity
        ));
    }
    Verdict {
        id: "6",
        title: "FPdim balance and FPdim(A) FPdim(C_A) = FPdim(C) on every shipped branching",
        ok,
        detail: lines.join("; "),
    }
}

/// Fusion subring on `labels` (which must be fusion closed), relabeled 0..
fn restrict(ring: &FusionRing, labels: &[Label]) -> FusionRing {
    let pos: BTreeMap<Label, usize> = labels.iter().enumerate().map(|(k, l)| (*l, k)).collect();
    let names = labels.iter().map(|l| ring.name(*l).to_string()).collect();
    let entries = ring
        .entries()
        .filter(|(a, b, c, _)| pos.contains_key(a) && pos.contains_key(b) && pos.contains_key(c))
        .map(|(a, b, c, m)| (Label(pos[&a]), Label(pos[&b]), Label(pos[&c]), m.clone()));
    FusionRing::new(names, Label(pos[&ring.unit()]), entries).expect("support is a fusion subring")
}

/// Randomized valid extensions over every shipped branching and both sides.
fn random_cases(count: usize) -> (Vec<(usize, ExtensionSpec)>, u64) {
    let zs: Vec<BranchingMatrix> = BRANCHING_FIXTURES
        .iter()
        .map(|n| branching_fixture(n).validated(&TOL).unwrap())
        .collect();
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::from_seed(RngAlgorithm::ChaCha, &[7u8; 32]),
    );
    use proptest::strategy::{Strategy, ValueTree};
    let strategy = (
        0..zs.len(),
        proptest::bool::ANY,
        proptest::collection::vec(prop_weighted_mult(), 8),
    );
    let mut cases = Vec::new();
    let mut drawn = 0u64;
    while cases.len() < count && drawn < 100_000 {
        drawn += 1;
        let (zi, second, mults) = strategy.new_tree(&mut runner).unwrap().current();
        let z = &zs[zi];
        let side = if second { Side::Second } else { Side::First };
        let unit = z.cat(side).unit();
        let m = ExtensionSpec::new(
            side,
            z.support(side)
                .into_iter()
                .zip(&mults)
                .map(|(a, &k)| (a, BigUint::from(if a == unit { 1 } else { k }))),
        );
        if check_extension(z, &m, &TOL).unwrap().passed() {
            cases.push((zi, m));
        }
    }
    (cases, drawn)
}

fn prop_weighted_mult() -> impl proptest::strategy::Strategy<Value = u64> {
    use proptest::strategy::Strategy;
    (0u64..12).prop_map(|x| if x < 4 { 0 } else { x - 4 })
}

fn criterion_7_and_8() -> (Verdict, Verdict) {
    let zs: Vec<BranchingMatrix> = BRANCHING_FIXTURES
        .iter()
        .map(|n| branching_fixture(n).validated(&TOL).unwrap())
        .collect();
    let (mut cases, drawn) = random_cases(256);
    let randomized = cases.len();
    // shipped extension fixtures that pass their checks
    for (zi, ext) in [(0usize, "trivial_ext.json"), (2, "levelrank_ext.json")] {
        if let Payload::Extension(e) = load_bundle(fixtures().join(ext), &TOL).unwrap().payload {
            cases.push((zi, e.spec()));
        }
    }
    let mut not_involutive = Vec::new();
    let mut non_integral = Vec::new();
    let mut distinct = BTreeSet::new();
    for (zi, m) in &cases {
        let z = &zs[*zi];
        match mirror_involution(z, m, &TOL) {
            Ok(true) => {}
            other => not_involutive.push(format!("{:?} on {}: {:?}", m.m, BRANCHING_FIXTURES[*zi], other)),
        }
        match mirror_extend(z, m, &TOL) {
            Ok(r) => {
                let target = z.cat(r.side);
                for a in r.m_prime.keys() {
                    if !exact::is_integral(target.h(*a)) {
                        non_integral.push(format!("h_{} = {}", target.name(*a), target.h(*a)));
                    }
                }
            }
            Err(e) => non_integral.push(format!("mirror failed: {e}")),
        }
        distinct.insert((*zi, m.side, m.m.clone()));
    }
    (
        Verdict {
            id: "7",
            title: "mirroring twice is the identity on >= 200 randomized valid extensions plus fixtures",
            ok: randomized >= 200 && not_involutive.is_empty(),
            detail: format!(
                "{} randomized valid cases from {} draws ({} distinct), {} total, failures {:?}",
                randomized,
                drawn,
                distinct.len(),
                cases.len(),
                not_involutive
            ),
        },
        Verdict {
            id: "8",
            title: "every mirror constituent has exactly integral conformal weight",
            ok: non_integral.is_empty() && !cases.is_empty(),
            detail: format!("{} mirror runs, offenders {:?}", cases.len(), non_integral),
        },
    )
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let (k4, l42) = (category("sl2_k4.json"), category("sl4_k2.json"));
    let found = search_branchings(&k4, &l42, &SearchOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let ambient = sln_modular(8, 1).unwrap();
    let charge_ok = k4.data().central_charge() + l42.data().central_charge() == *ambient.central_charge();
    let l4 = k4.label_by_name("l4").unwrap();
    let mut detail = format!("{} branchings in {:.3} s, c = 2 + 5 = 7 {}", found.len(), elapsed.as_secs_f64(), if charge_ok { "ok" } else { "MISMATCH" });
    let mut ok = charge_ok && elapsed < Duration::from_secs(60);
    let chosen = found.iter().find(|z| z.is_validated() && z.tau().and_then(|t| t.get(l4)).is_some());
    match chosen {
        None => {
            ok = false;
            detail.push_str(", no validated branching carries l4");
        }
        Some(z) => {
            let m = ExtensionSpec::new(Side::First, [(k4.unit(), BigUint::from(1u32)), (l4, BigUint::from(1u32))]);
            match mirror_extend(z, &m, &TOL) {
                Ok(r) => {
                    let names: Vec<String> = r
                        .m_prime
                        .keys()
                        .map(|a| format!("{} (h = {})", l42.name(*a), l42.h(*a)))
                        .collect();
                    let integral = r.m_prime.keys().all(|a| exact::is_integral(l42.h(*a)));
                    ok &= integral && r.report.passed();
                    detail.push_str(&format!(", tau(l4) = {}, m' = {{{}}}", l42.name(z.tau().unwrap().get(l4).unwrap()), names.join(", ")));
                }
                Err(e) => {
                    ok = false;
                    detail.push_str(&format!(", mirror failed: {e}"));
                }
            }
        }
    }
    Verdict {
        id: "9",
        title: "level-rank search sl2(4) x sl4(2) in sl8(1) under 60 s and mirror of {l0, l4}",
        ok,
        detail,
    }
}

fn main() {
    let (v7, v8) = criterion_7_and_8();
    let verdicts = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4a(),
        criterion_4b(),
        criterion_5(),
        criterion_6(),
        v7,
        v8,
        criterion_9(),
    ];
    let mut unexpected = 0;
    for v in &verdicts {
        let mark = if v.ok { "PASS" } else { "FAIL" };
        let note = if !v.ok && EXPECTED_RED.contains(&v.id) { " (unattainable)" } else { "" };
        println!("{} {:<3} {}{} -- {}", mark, v.id, v.title, note, v.detail);
        if !v.ok && !EXPECTED_RED.contains(&v.id) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{} acceptance criteria failed", unexpected);
        std::process::exit(1);
    }
}
