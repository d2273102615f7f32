//! Regenerates the shipped fixture set.
//!
//! ```text
//! cargo run -p mirrorext --example freeze_fixtures -- crates/cli/fixtures
//! ```
//!
//! Modular data comes from `gen-affine`, rings from `verlinde` and
//! branchings from `search-branchings --emit-dir`, so every fixture is the
//! frozen output of the command line itself.

use std::fs;
use std::path::{Path, PathBuf};

use mirrorext::bundle::{modular_bundle, Hypotheses};
use mirrorext::{load_bundle, run_command, save_bundle, Payload};
use mirrorext_core::affine::ising;
use mirrorext_core::Tolerances;

fn run(args: &[&str]) {
    let mut argv = vec!["mirrorext"];
    argv.extend_from_slice(args);
    let out = run_command(&argv);
    assert_eq!(out.code, 0, "{:?} failed:\n{}", args, out.output);
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Runs a search and keeps the result whose support has `size` pairs.
fn freeze_search(dir: &Path, cat1: &str, cat2: &str, size: usize, name: &str) {
    let scratch = dir.join(".emit");
    let _ = fs::remove_dir_all(&scratch);
    fs::create_dir_all(&scratch).unwrap();
    // emitted files must reference the categories relative to the fixture dir
    for cat in [cat1, cat2] {
        fs::copy(dir.join(cat), scratch.join(cat)).unwrap();
    }
    run(&[
        "search-branchings",
        path_str(&scratch.join(cat1)),
        path_str(&scratch.join(cat2)),
        "--emit-dir",
        path_str(&scratch),
    ]);
    let tol = Tolerances::DEFAULT;
    let mut chosen = None;
    for k in 0.. {
        let p = scratch.join(format!("branching_{}.json", k));
        if !p.exists() {
            break;
        }
        let bundle = load_bundle(&p, &tol).unwrap();
        let Payload::Branching(b) = &bundle.payload else { unreachable!() };
        if b.z.entries().count() == size {
            chosen = Some(bundle);
        }
    }
    let mut bundle = chosen.unwrap_or_else(|| panic!("no {}-pair branching for {} / {}", size, cat1, cat2));
    if let Payload::Branching(b) = &mut bundle.payload {
        b.hypotheses = Some(Hypotheses {
            double_commutant: true,
            simple_self_dual_u: true,
        });
    }
    save_bundle(&bundle, dir.join(name)).unwrap();
    fs::remove_dir_all(&scratch).unwrap();
}

fn extension(dir: &Path, name: &str, category: &str, side: u8, m: &[(&str, u64)], provenance: &str) {
    let entries: Vec<String> = m.iter().map(|(l, k)| format!("{:?}: {}", l, k)).collect();
    let text = format!(
        "{{\n  \"kind\": \"extension\",\n  \"category\": {:?},\n  \"side\": {},\n  \"m\": {{{}}},\n  \"simple\": true,\n  \"meta\": {{\n    \"provenance\": {:?}\n  }}\n}}\n",
        category,
        side,
        entries.join(", "),
        provenance
    );
    fs::write(dir.join(name), text).unwrap();
    // round-trip through the loader so the file is in canonical form
    let bundle = load_bundle(dir.join(name), &Tolerances::DEFAULT).unwrap();
    save_bundle(&bundle, dir.join(name)).unwrap();
}

fn main() {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/cli/fixtures"));
    fs::create_dir_all(&dir).unwrap();

    for k in 1..=10 {
        let out = dir.join(format!("sl2_k{}.json", k));
        run(&["gen-affine", "--algebra", "sl2", "--level", &k.to_string(), "-o", path_str(&out)]);
    }
    for (n, k) in [(3, 1), (4, 2), (5, 1)] {
        let out = dir.join(format!("sl{}_k{}.json", n, k));
        run(&[
            "gen-affine", "--algebra", "sln", "--rank", &n.to_string(), "--level", &k.to_string(), "-o", path_str(&out),
        ]);
    }
    let ising_bundle = modular_bundle(
        ising(),
        "Ising model (c = 1/2): S = (1/2)[[1,1,r],[1,1,-r],[r,-r,0]] with r = sqrt 2, h = 0, 1/2, 1/16",
    );
    save_bundle(&ising_bundle, dir.join("ising.json")).unwrap();

    run(&["verlinde", path_str(&dir.join("sl2_k3.json")), "-o", path_str(&dir.join("sl2_k3_ring.json"))]);

    freeze_search(&dir, "sl2_k2.json", "ising.json", 2, "gko_ising_branching.json");
    freeze_search(&dir, "sl2_k2.json", "sl2_k2.json", 2, "sl4level1_branching.json");
    freeze_search(&dir, "sl2_k4.json", "sl4_k2.json", 3, "levelrank_2_4.json");

    extension(&dir, "trivial_ext.json", "sl2_k2.json", 1, &[("l0", 1)], "unit-only extension");
    extension(
        &dir,
        "ext_with_l2.json",
        "sl2_k2.json",
        1,
        &[("l0", 1), ("l2", 1)],
        "l2 has h = 1/2, so this extension must be rejected",
    );
    extension(
        &dir,
        "levelrank_ext.json",
        "sl2_k4.json",
        1,
        &[("l0", 1), ("l4", 1)],
        "simple-current extension of sl2 level 4 by l4 (h = 1)",
    );
}
