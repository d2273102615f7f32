//! Command-line surface. [`run_command`] does all the work and returns the
//! exit code with the rendered output so it can be driven from tests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use mirrorext_core::affine::{sl2_modular, sln_modular_with, AffineSpec};
use mirrorext_core::branching::search_branchings;
use mirrorext_core::mirror::{check_extension, mirror_extend};
use mirrorext_core::{
    BranchingError, BranchingMatrix, Category, ExtensionSpec, Label, MirrorError,
    ModularData, Outcome, SearchOptions, Side, Tolerances,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bundle::{
    load_bundle, load_category, modular_bundle, provenance_meta, reference_from, render_bundle,
    ring_bundle, BranchingBundle, Bundle, ExtensionBundle, Kind, LoadError, Payload,
};
use crate::render::{Format, Rendered};

#[derive(Debug, Parser)]
#[command(
    name = "mirrorext",
    version,
    about = "Check branchings and mirror extensions of rational VOAs at the level of fusion rings and modular data"
)]
pub struct Cli {
    /// Absolute tolerance for real-valued checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print only the final verdict line.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algebra {
    Sl2,
    Sln,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the axioms of a fusion ring file.
    CheckRing { file: PathBuf },
    /// Validate a modular data file.
    CheckModular { file: PathBuf },
    /// Compute the fusion ring of modular data by the Verlinde formula.
    Verlinde {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate Kac-Peterson modular data for sl2 or sl_n at level k.
    GenAffine {
        #[arg(long, value_enum)]
        algebra: Algebra,
        #[arg(long)]
        rank: Option<i64>,
        #[arg(long)]
        level: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate a branching matrix file.
    CheckBranching { file: PathBuf },
    /// Enumerate branching matrices between two categories.
    SearchBranchings {
        cat1: PathBuf,
        cat2: PathBuf,
        /// Largest support size, vacuum pair included.
        #[arg(long)]
        max_support: Option<usize>,
        /// Cap on explored partial assignments.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Write every result as `branching_<k>.json` into this directory.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
    },
    /// Check an extension against a branching.
    CheckExtension { branching: PathBuf, extension: PathBuf },
    /// Mirror an extension across a branching.
    Mirror {
        branching: PathBuf,
        extension: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{path}: expected a {expected} file, found {found}")]
    WrongKind {
        path: PathBuf,
        expected: Kind,
        found: Kind,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Exit code and everything that would be printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub output: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandOutput {
                code,
                output: e.render().to_string(),
            };
        }
    };
    let tol = Tolerances::with_check(cli.tol);
    match dispatch(&cli.command, &tol) {
        Ok(rendered) => CommandOutput {
            code: rendered.exit_code(),
            output: match cli.format {
                Format::Text => rendered.to_text(cli.quiet),
                Format::Machine => rendered.to_machine(),
            },
        },
        Err(err) => error_output(err, cli.format),
    }
}

fn error_output(err: CliError, format: Format) -> CommandOutput {
    // A referenced category that fails validation is a mathematical failure.
    let (code, report) = match &err {
        CliError::Load(LoadError::InvalidCategory { report, .. }) => (1, Some(report.clone())),
        _ => (2, None),
    };
    let class = match &err {
        CliError::Load(LoadError::Parse { .. }) => "ParseError",
        CliError::Load(LoadError::Schema { .. }) => "SchemaError",
        CliError::Load(LoadError::Resolution { .. }) => "ResolutionError",
        CliError::Load(LoadError::InvalidCategory { .. }) => "InvalidCategory",
        CliError::Load(LoadError::Io { .. }) | CliError::Write { .. } => "IoError",
        CliError::WrongKind { .. } | CliError::Usage(_) => "UsageError",
    };
    let output = match format {
        Format::Text => {
            let mut s = report.map(|r| r.to_string()).unwrap_or_default();
            s.push_str(&format!("error: {}: {}\n", class, err));
            s
        }
        Format::Machine => {
            let v = json!({
                "passed": false,
                "exit_code": code,
                "error": { "class": class, "message": err.to_string() },
                "checks": report.map(|r| r.checks().iter().map(|c| json!({
                    "code": c.code, "outcome": c.outcome.to_string(), "offenders": c.offenders,
                })).collect::<Vec<_>>()).unwrap_or_default(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json serializes"))
        }
    };
    CommandOutput { code, output }
}

fn dispatch(command: &Command, tol: &Tolerances) -> Result<Rendered, CliError> {
    match command {
        Command::CheckRing { file } => check_ring(file, tol),
        Command::CheckModular { file } => check_modular(file, tol),
        Command::Verlinde { file, output } => verlinde(file, output.as_deref(), tol),
        Command::GenAffine {
            algebra,
            rank,
            level,
            output,
        } => gen_affine(*algebra, *rank, *level, output.as_deref(), tol),
        Command::CheckBranching { file } => check_branching(file, tol),
        Command::SearchBranchings {
            cat1,
            cat2,
            max_support,
            budget,
            emit_dir,
        } => search(cat1, cat2, *max_support, *budget, emit_dir.as_deref(), tol),
        Command::CheckExtension {
            branching,
            extension,
        } => extension_check(branching, extension, tol),
        Command::Mirror {
            branching,
            extension,
            output,
        } => mirror(branching, extension, output.as_deref(), tol),
    }
}

fn expect_kind(path: &Path, bundle: &Bundle, expected: Kind) -> Result<(), CliError> {
    if bundle.kind == expected {
        Ok(())
    } else {
        Err(CliError::WrongKind {
            path: path.to_path_buf(),
            expected,
            found: bundle.kind,
        })
    }
}

fn load_modular(path: &Path, tol: &Tolerances) -> Result<ModularData, CliError> {
    let bundle = load_bundle(path, tol)?;
    expect_kind(path, &bundle, Kind::Modular)?;
    match bundle.payload {
        Payload::Modular(md) => Ok(md),
        _ => unreachable!("kind checked"),
    }
}

fn load_branching(path: &Path, tol: &Tolerances) -> Result<BranchingBundle, CliError> {
    let bundle = load_bundle(path, tol)?;
    expect_kind(path, &bundle, Kind::Branching)?;
    match bundle.payload {
        Payload::Branching(b) => Ok(b),
        _ => unreachable!("kind checked"),
    }
}

fn load_extension(path: &Path, tol: &Tolerances) -> Result<ExtensionBundle, CliError> {
    let bundle = load_bundle(path, tol)?;
    expect_kind(path, &bundle, Kind::Extension)?;
    match bundle.payload {
        Payload::Extension(e) => Ok(e),
        _ => unreachable!("kind checked"),
    }
}

fn write_or_show(
    rendered: &mut Rendered,
    bundle: &Bundle,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let text = render_bundle(bundle);
    match output {
        Some(path) => {
            fs::write(path, &text).map_err(|source| CliError::Write {
                path: path.to_path_buf(),
                source,
            })?;
            rendered.note(format!("wrote {}", path.display()));
            rendered.set("written", Value::String(path.display().to_string()));
        }
        None => {
            rendered.note(text.trim_end());
            let bundle_json: Value = serde_json::from_str(&text).expect("rendered bundle is json");
            rendered.set("bundle", bundle_json);
        }
    }
    Ok(())
}

fn check_ring(file: &Path, tol: &Tolerances) -> Result<Rendered, CliError> {
    let bundle = load_bundle(file, tol)?;
    expect_kind(file, &bundle, Kind::Ring)?;
    let Payload::Ring(rb) = bundle.payload else {
        unreachable!("kind checked")
    };
    let mut out = Rendered::new("check-ring");
    out.report = rb.ring.validate();
    if let Some(problem) = &rb.dual_problem {
        out.note(format!("note: duals could not be inferred ({}); identity duals assumed", problem));
        out.set("dual_problem", Value::String(problem.clone()));
    }
    out.set("labels", json!(rb.ring.names()));
    Ok(out)
}

fn check_modular(file: &Path, tol: &Tolerances) -> Result<Rendered, CliError> {
    let md = load_modular(file, tol)?;
    let mut out = Rendered::new("check-modular");
    out.report = md.validate(tol);
    if out.report.passed() {
        if let Ok(cat) = Category::new(md.clone(), tol) {
            out.report.extend(cat.quantum_dim_report(tol));
            let dims: Vec<Value> = cat.fpdims().iter().map(|&d| json!(d)).collect();
            out.set("fpdims", Value::Array(dims));
        }
    }
    out.set("labels", json!(md.names()));
    out.set("central_charge", Value::String(md.central_charge().to_string()));
    Ok(out)
}

fn verlinde(file: &Path, output: Option<&Path>, tol: &Tolerances) -> Result<Rendered, CliError> {
    let md = load_modular(file, tol)?;
    let mut out = Rendered::new("verlinde");
    match md.verlinde_fusion(tol) {
        Ok(ring) => {
            out.report.pass("verlinde", "Verlinde numbers are nonnegative integers", "");
            let provenance = format!("Verlinde formula applied to {}", file_name(file));
            write_or_show(&mut out, &ring_bundle(ring, provenance), output)?;
        }
        Err(e) => {
            out.report.verdict(
                "verlinde",
                "Verlinde numbers are nonnegative integers",
                Outcome::Fail,
                "",
                vec![e.to_string()],
            );
        }
    }
    Ok(out)
}

fn gen_affine(
    algebra: Algebra,
    rank: Option<i64>,
    level: i64,
    output: Option<&Path>,
    tol: &Tolerances,
) -> Result<Rendered, CliError> {
    let (md, provenance) = match algebra {
        Algebra::Sl2 => {
            if rank.is_some_and(|r| r != 2) {
                return Err(CliError::Usage(String::from("--algebra sl2 takes no --rank other than 2")));
            }
            let md = sl2_modular(level).map_err(|e| CliError::Usage(e.to_string()))?;
            (
                md,
                format!("Kac-Peterson data of sl2 at level {}: closed-form sine S-matrix, h = l(l+2)/(4(k+2)); generated by mirrorext gen-affine", level),
            )
        }
        Algebra::Sln => {
            let n = rank.ok_or_else(|| CliError::Usage(String::from("--algebra sln needs --rank")))?;
            let spec = AffineSpec::new(n, level).map_err(|e| CliError::Usage(e.to_string()))?;
            let md = sln_modular_with(spec, tol).map_err(|e| CliError::Usage(e.to_string()))?;
            (
                md,
                format!("Kac-Peterson data of sl{} at level {}: alternating Weyl-group sum, exact weights <l,l+2rho>/(2(k+n)); generated by mirrorext gen-affine", n, level),
            )
        }
    };
    let mut out = Rendered::new("gen-affine");
    out.report.pass("gen-affine", "modular data generated", format!("{} labels, c = {}", md.len(), md.central_charge()));
    write_or_show(&mut out, &modular_bundle(md, provenance), output)?;
    Ok(out)
}

fn pairs_json(z: &BranchingMatrix) -> Value {
    Value::Array(
        z.entries()
            .map(|(i, j, m)| json!([z.cat1().name(i), z.cat2().name(j), m.to_string()]))
            .collect(),
    )
}

fn tau_text(z: &BranchingMatrix) -> Option<String> {
    z.tau().map(|tau| {
        let parts: Vec<String> = tau
            .iter()
            .map(|(i, j)| format!("{} -> {}", z.cat1().name(i), z.cat2().name(j)))
            .collect();
        format!("tau: {{{}}}", parts.join(", "))
    })
}

fn hypothesis_notes(out: &mut Rendered, b: &BranchingBundle) {
    match b.hypotheses {
        Some(h) => {
            out.note(format!(
                "declared (unchecked): double_commutant = {}, simple_self_dual_U = {}",
                h.double_commutant, h.simple_self_dual_u
            ));
            out.set(
                "hypotheses",
                json!({"double_commutant": h.double_commutant, "simple_self_dual_U": h.simple_self_dual_u}),
            );
        }
        None => out.note("no hypotheses declared"),
    }
}

fn check_branching(file: &Path, tol: &Tolerances) -> Result<Rendered, CliError> {
    let mut b = load_branching(file, tol)?;
    let mut out = Rendered::new("check-branching");
    out.report = b.z.validate(tol);
    if let Some(t) = tau_text(&b.z) {
        out.note(t);
    }
    hypothesis_notes(&mut out, &b);
    out.set("pairs", pairs_json(&b.z));
    if let Some(tau) = b.z.tau() {
        let map: Map<String, Value> = tau
            .iter()
            .map(|(i, j)| (String::from(b.z.cat1().name(i)), Value::String(String::from(b.z.cat2().name(j)))))
            .collect();
        out.set("tau", Value::Object(map));
    }
    Ok(out)
}

fn search(
    cat1_path: &Path,
    cat2_path: &Path,
    max_support: Option<usize>,
    budget: u64,
    emit_dir: Option<&Path>,
    tol: &Tolerances,
) -> Result<Rendered, CliError> {
    let cat1 = load_category(cat1_path, tol)?;
    let cat2 = load_category(cat2_path, tol)?;
    let opts = SearchOptions {
        max_support,
        budget,
        tol: *tol,
    };
    let mut out = Rendered::new("search-branchings");
    let found = match search_branchings(&cat1, &cat2, &opts) {
        Ok(found) => found,
        Err(BranchingError::BudgetExceeded { explored, cap }) => {
            out.report.verdict(
                "search.budget",
                "search finished within budget",
                Outcome::Fail,
                "",
                vec![format!("explored {} partial assignments, cap {}", explored, cap)],
            );
            return Ok(out);
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    out.report.pass(
        "search.budget",
        "search finished within budget",
        format!("{} branching(s) found", found.len()),
    );
    let mut listed = Vec::new();
    for (k, z) in found.iter().enumerate() {
        let pairs: Vec<String> = z
            .entries()
            .map(|(i, j, _)| format!("({},{})", cat1.name(i), cat2.name(j)))
            .collect();
        out.note(format!("#{} support {{{}}}", k, pairs.join(", ")));
        listed.push(pairs_json(z));
    }
    out.set("branchings", Value::Array(listed));
    if let Some(dir) = emit_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        let total = found.len();
        for (k, z) in found.into_iter().enumerate() {
            let b = BranchingBundle {
                cat1_ref: reference_from(dir, cat1_path),
                cat2_ref: reference_from(dir, cat2_path),
                cat1_path: cat1_path.to_path_buf(),
                cat2_path: cat2_path.to_path_buf(),
                z,
                hypotheses: None,
            };
            let bundle = Bundle {
                kind: Kind::Branching,
                payload: Payload::Branching(b),
                meta: provenance_meta(format!(
                    "emitted by mirrorext search-branchings {} {} (result {} of {})",
                    file_name(cat1_path),
                    file_name(cat2_path),
                    k,
                    total
                )),
            };
            let path = dir.join(format!("branching_{}.json", k));
            fs::write(&path, render_bundle(&bundle)).map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
            out.note(format!("wrote {}", path.display()));
        }
    }
    Ok(out)
}

/// Checks that the extension file refers to the category on its side of `z`.
fn matching_side(b: &BranchingBundle, e: &ExtensionBundle, ext_path: &Path) -> Result<(), CliError> {
    if b.z.cat(e.side).data() == &e.category {
        Ok(())
    } else {
        Err(CliError::Load(LoadError::Resolution {
            path: ext_path.to_path_buf(),
            message: format!(
                "category {:?} is not side {} of the branching",
                e.category_ref,
                e.side.number()
            ),
        }))
    }
}

fn m_json(cat: &Category, m: &BTreeMap<Label, mirrorext_core::BigUint>) -> Value {
    Value::Object(
        m.iter()
            .map(|(a, k)| (String::from(cat.name(*a)), Value::String(k.to_string())))
            .collect(),
    )
}

fn m_text(cat: &Category, m: &BTreeMap<Label, mirrorext_core::BigUint>) -> String {
    let parts: Vec<String> = m.iter().map(|(a, k)| format!("{}:{}", cat.name(*a), k)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Validates the branching; a failing branching yields its report.
fn validated_branching(
    b: &mut BranchingBundle,
    out: &mut Rendered,
    tol: &Tolerances,
) -> bool {
    let report = b.z.validate(tol);
    if report.passed() {
        true
    } else {
        out.report = report;
        out.note("branching fails validation; extension not checked");
        false
    }
}

fn extension_check(z_path: &Path, ext_path: &Path, tol: &Tolerances) -> Result<Rendered, CliError> {
    let mut b = load_branching(z_path, tol)?;
    let e = load_extension(ext_path, tol)?;
    matching_side(&b, &e, ext_path)?;
    let mut out = Rendered::new("check-extension");
    if !validated_branching(&mut b, &mut out, tol) {
        return Ok(out);
    }
    out.report = check_extension(&b.z, &e.spec(), tol).map_err(mirror_usage)?;
    out.set("m", m_json(b.z.cat(e.side), &e.m));
    Ok(out)
}

fn mirror_usage(e: MirrorError) -> CliError {
    CliError::Usage(e.to_string())
}

fn mirror(z_path: &Path, ext_path: &Path, output: Option<&Path>, tol: &Tolerances) -> Result<Rendered, CliError> {
    let mut b = load_branching(z_path, tol)?;
    let e = load_extension(ext_path, tol)?;
    matching_side(&b, &e, ext_path)?;
    let mut out = Rendered::new("mirror");
    if !validated_branching(&mut b, &mut out, tol) {
        return Ok(out);
    }
    let spec: ExtensionSpec = e.spec();
    let result = match mirror_extend(&b.z, &spec, tol) {
        Ok(r) => r,
        Err(MirrorError::Precondition(report)) => {
            out.report = report;
            out.note("extension fails its checks; no mirror produced");
            return Ok(out);
        }
        Err(other) => return Err(mirror_usage(other)),
    };
    out.report = result.report.clone();
    let target: &Arc<Category> = b.z.cat(result.side);
    out.note(format!("m' (side {}) = {}", result.side.number(), m_text(target, &result.m_prime)));
    out.set("side", json!(result.side.number()));
    out.set("m_prime", m_json(target, &result.m_prime));
    let weights: Map<String, Value> = result
        .m_prime
        .keys()
        .map(|a| (String::from(target.name(*a)), Value::String(target.h(*a).to_string())))
        .collect();
    out.set("weights", Value::Object(weights));

    if let Some(path) = output {
        let target_path = match result.side {
            Side::First => &b.cat1_path,
            Side::Second => &b.cat2_path,
        };
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let bundle = Bundle {
            kind: Kind::Extension,
            payload: Payload::Extension(ExtensionBundle {
                category_ref: reference_from(dir, target_path),
                category_path: target_path.clone(),
                category: target.data().clone(),
                side: result.side,
                m: result.m_prime.clone(),
                simple: result.simple,
            }),
            meta: provenance_meta(format!(
                "mirror of {} across {}",
                file_name(ext_path),
                file_name(z_path)
            )),
        };
        fs::write(path, render_bundle(&bundle)).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })?;
        out.note(format!("wrote {}", path.display()));
    }
    Ok(out)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
