//! JSON bundle files: modular data, fusion rings, branchings and extensions.
//!
//! Every file is a single JSON object. `kind` is optional and inferred from
//! the fields present when missing; `meta` is a free-form map carried through
//! untouched. Paths to category files are resolved against the directory of
//! the file that mentions them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use mirrorext_core::{
    BigRational, BigUint, BranchingMatrix, Category, CheckReport, Complex64, ExtensionSpec,
    FusionRing, Label, ModularData, Side, Tolerances,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: parse error at `{field}`: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{path}: schema error: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{path}: unresolved reference: {message}")]
    Resolution { path: PathBuf, message: String },
    /// A referenced category is well-formed but fails modular validation.
    #[error("{path}: category data fails validation")]
    InvalidCategory { path: PathBuf, report: CheckReport },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ring,
    Modular,
    Branching,
    Extension,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Ring => "ring",
            Kind::Modular => "modular",
            Kind::Branching => "branching",
            Kind::Extension => "extension",
        })
    }
}

/// Declared, unchecked assumptions about the ambient VOA.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypotheses {
    pub double_commutant: bool,
    #[serde(rename = "simple_self_dual_U")]
    pub simple_self_dual_u: bool,
}

#[derive(Clone, Debug)]
pub struct RingBundle {
    pub ring: FusionRing,
    /// Set when the duals could not be read off the unit channel; the ring
    /// then carries identity duals so validation can report the defect.
    pub dual_problem: Option<String>,
}

#[derive(Clone, Debug)]
pub struct BranchingBundle {
    /// Paths as written in the file.
    pub cat1_ref: String,
    pub cat2_ref: String,
    /// Paths resolved against the branching file.
    pub cat1_path: PathBuf,
    pub cat2_path: PathBuf,
    pub z: BranchingMatrix,
    pub hypotheses: Option<Hypotheses>,
}

#[derive(Clone, Debug)]
pub struct ExtensionBundle {
    pub category_ref: String,
    pub category_path: PathBuf,
    pub category: ModularData,
    pub side: Side,
    pub m: BTreeMap<Label, BigUint>,
    pub simple: bool,
}

impl ExtensionBundle {
    pub fn spec(&self) -> ExtensionSpec {
        ExtensionSpec {
            side: self.side,
            m: self.m.clone(),
            simple: self.simple,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    Ring(RingBundle),
    Modular(ModularData),
    Branching(BranchingBundle),
    Extension(ExtensionBundle),
}

#[derive(Clone, Debug)]
pub struct Bundle {
    pub kind: Kind,
    pub payload: Payload,
    pub meta: Map<String, Value>,
}

/// Multiplicity as a JSON number or, when it does not fit, a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Mult {
    Small(u64),
    Big(String),
}

impl Mult {
    fn from_big(m: &BigUint) -> Mult {
        match u64::try_from(m) {
            Ok(x) => Mult::Small(x),
            Err(_) => Mult::Big(m.to_string()),
        }
    }

    fn value(&self) -> Result<BigUint, String> {
        match self {
            Mult::Small(x) => Ok(BigUint::from(*x)),
            Mult::Big(s) => BigUint::from_str(s.trim())
                .map_err(|_| format!("multiplicity {:?} is not a nonnegative integer", s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum UnitRef {
    Index(usize),
    Name(String),
}

/// Union of all four schemas; which fields are required depends on `kind`.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    s: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit: Option<UnitRef>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    n: Option<Vec<(usize, usize, usize, Mult)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cat1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cat2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<(usize, usize, Mult)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hypotheses: Option<Hypotheses>,
    #[serde(skip_serializing_if = "Option::is_none")]
    category: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    side: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<BTreeMap<String, Mult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simple: Option<bool>,
    #[serde(skip_serializing_if = "Map::is_empty", default)]
    meta: Map<String, Value>,
}

impl RawBundle {
    fn infer_kind(&self) -> Option<Kind> {
        if let Some(k) = self.kind {
            return Some(k);
        }
        if self.s.is_some() {
            Some(Kind::Modular)
        } else if self.n.is_some() {
            Some(Kind::Ring)
        } else if self.pairs.is_some() {
            Some(Kind::Branching)
        } else if self.m.is_some() {
            Some(Kind::Extension)
        } else {
            None
        }
    }
}

struct Ctx<'a> {
    path: &'a Path,
}

impl Ctx<'_> {
    fn schema(&self, message: impl Into<String>) -> LoadError {
        LoadError::Schema {
            path: self.path.to_path_buf(),
            message: message.into(),
        }
    }

    fn resolution(&self, message: impl Into<String>) -> LoadError {
        LoadError::Resolution {
            path: self.path.to_path_buf(),
            message: message.into(),
        }
    }

    fn require<T>(&self, field: Option<T>, name: &str, kind: Kind) -> Result<T, LoadError> {
        field.ok_or_else(|| self.schema(format!("{} file is missing field `{}`", kind, name)))
    }

    fn reject_extra(&self, raw: &RawBundle, kind: Kind) -> Result<(), LoadError> {
        let present: [(&str, bool, &[Kind]); 14] = [
            ("labels", raw.labels.is_some(), &[Kind::Modular, Kind::Ring]),
            ("S", raw.s.is_some(), &[Kind::Modular]),
            ("h", raw.h.is_some(), &[Kind::Modular]),
            ("c", raw.c.is_some(), &[Kind::Modular]),
            ("unit", raw.unit.is_some(), &[Kind::Ring]),
            ("N", raw.n.is_some(), &[Kind::Ring]),
            ("cat1", raw.cat1.is_some(), &[Kind::Branching]),
            ("cat2", raw.cat2.is_some(), &[Kind::Branching]),
            ("pairs", raw.pairs.is_some(), &[Kind::Branching]),
            ("hypotheses", raw.hypotheses.is_some(), &[Kind::Branching]),
            ("category", raw.category.is_some(), &[Kind::Extension]),
            ("side", raw.side.is_some(), &[Kind::Extension]),
            ("m", raw.m.is_some(), &[Kind::Extension]),
            ("simple", raw.simple.is_some(), &[Kind::Extension]),
        ];
        for (name, is_set, allowed) in present {
            if is_set && !allowed.contains(&kind) {
                return Err(self.schema(format!("field `{}` does not belong in a {} file", name, kind)));
            }
        }
        Ok(())
    }

    fn labels(&self, labels: Vec<String>) -> Result<Vec<String>, LoadError> {
        if labels.is_empty() {
            return Err(self.schema("`labels` is empty"));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(self.schema(format!("duplicate label {:?}", l)));
            }
        }
        Ok(labels)
    }

    fn rational(&self, text: &str, field: &str) -> Result<BigRational, LoadError> {
        BigRational::from_str(text.trim())
            .map_err(|_| self.schema(format!("{} = {:?} is not a rational \"p/q\"", field, text)))
    }

    fn index(&self, i: usize, n: usize, field: &str) -> Result<Label, LoadError> {
        if i < n {
            Ok(Label(i))
        } else {
            Err(self.schema(format!("{} index {} out of range (0..{})", field, i, n)))
        }
    }

    fn mult(&self, m: &Mult, field: &str) -> Result<BigUint, LoadError> {
        m.value().map_err(|e| self.schema(format!("{}: {}", field, e)))
    }
}

pub fn load_bundle(path: impl AsRef<Path>, tol: &Tolerances) -> Result<Bundle, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_bundle(&text, path, tol)
}

/// Parses bundle text as if it had been read from `path`.
pub fn parse_bundle(text: &str, path: &Path, tol: &Tolerances) -> Result<Bundle, LoadError> {
    let ctx = Ctx { path };
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawBundle = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        LoadError::Parse {
            path: path.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    let kind = raw
        .infer_kind()
        .ok_or_else(|| ctx.schema("cannot tell the bundle kind; add a `kind` field"))?;
    ctx.reject_extra(&raw, kind)?;
    let meta = raw.meta.clone();
    let payload = match kind {
        Kind::Modular => Payload::Modular(modular_from_raw(&ctx, raw)?),
        Kind::Ring => Payload::Ring(ring_from_raw(&ctx, raw)?),
        Kind::Branching => Payload::Branching(branching_from_raw(&ctx, raw, tol)?),
        Kind::Extension => Payload::Extension(extension_from_raw(&ctx, raw, tol)?),
    };
    Ok(Bundle {
        kind,
        payload,
        meta,
    })
}

fn modular_from_raw(ctx: &Ctx, raw: RawBundle) -> Result<ModularData, LoadError> {
    let kind = Kind::Modular;
    let labels = ctx.labels(ctx.require(raw.labels, "labels", kind)?)?;
    let s = ctx.require(raw.s, "S", kind)?;
    let h = ctx.require(raw.h, "h", kind)?;
    let c = ctx.require(raw.c, "c", kind)?;
    let n = labels.len();
    if s.len() != n || s.iter().any(|row| row.len() != n) {
        return Err(ctx.schema(format!("`S` must be {}×{}", n, n)));
    }
    if h.len() != n {
        return Err(ctx.schema(format!("`h` has {} entries for {} labels", h.len(), n)));
    }
    let h = h
        .iter()
        .enumerate()
        .map(|(i, x)| ctx.rational(x, &format!("h[{}]", i)))
        .collect::<Result<Vec<_>, _>>()?;
    if h[0] != BigRational::from_integer(0.into()) {
        return Err(ctx.schema(format!(
            "the unit label {:?} must have h = 0, found {}",
            labels[0], h[0]
        )));
    }
    let c = ctx.rational(&c, "c")?;
    let s = s
        .into_iter()
        .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ModularData::new(labels, s, h, c, Label(0)).map_err(|e| ctx.schema(e.to_string()))
}

fn ring_from_raw(ctx: &Ctx, raw: RawBundle) -> Result<RingBundle, LoadError> {
    let kind = Kind::Ring;
    let labels = ctx.labels(ctx.require(raw.labels, "labels", kind)?)?;
    let n = labels.len();
    let unit = match ctx.require(raw.unit, "unit", kind)? {
        UnitRef::Index(i) => ctx.index(i, n, "unit")?,
        UnitRef::Name(name) => Label(
            labels
                .iter()
                .position(|l| *l == name)
                .ok_or_else(|| ctx.schema(format!("unit {:?} is not a label", name)))?,
        ),
    };
    let mut entries = BTreeMap::new();
    for (k, (a, b, c, m)) in ctx.require(raw.n, "N", kind)?.iter().enumerate() {
        let field = format!("N[{}]", k);
        let key = (
            ctx.index(*a, n, &field)?,
            ctx.index(*b, n, &field)?,
            ctx.index(*c, n, &field)?,
        );
        let m = ctx.mult(m, &field)?;
        if entries.insert(key, m).is_some() {
            return Err(ctx.schema(format!("{} repeats the triple ({},{},{})", field, a, b, c)));
        }
    }
    let triples = || entries.iter().map(|(&(a, b, c), m)| (a, b, c, m.clone()));
    match FusionRing::new(labels.clone(), unit, triples()) {
        Ok(ring) => Ok(RingBundle {
            ring,
            dual_problem: None,
        }),
        Err(mirrorext_core::RingError::Duality(msg)) => {
            let ring = FusionRing::with_duals(labels, unit, (0..n).map(Label).collect(), triples())
                .map_err(|e| ctx.schema(e.to_string()))?;
            Ok(RingBundle {
                ring,
                dual_problem: Some(msg),
            })
        }
        Err(e) => Err(ctx.schema(e.to_string())),
    }
}

fn resolve(ctx: &Ctx, reference: &str) -> PathBuf {
    let p = Path::new(reference);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        ctx.path.parent().unwrap_or(Path::new("")).join(p)
    }
}

/// Loads a referenced modular-data file and builds its category.
pub fn load_category(path: &Path, tol: &Tolerances) -> Result<Arc<Category>, LoadError> {
    let data = load_modular(path, tol)?;
    category_from(path, data, tol)
}

fn category_from(path: &Path, data: ModularData, tol: &Tolerances) -> Result<Arc<Category>, LoadError> {
    Category::new(data, tol).map(Arc::new).map_err(|e| match e {
        mirrorext_core::CategoryError::Invalid(report) => LoadError::InvalidCategory {
            path: path.to_path_buf(),
            report,
        },
        other => LoadError::Schema {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

fn load_modular(path: &Path, tol: &Tolerances) -> Result<ModularData, LoadError> {
    match load_bundle(path, tol)?.payload {
        Payload::Modular(md) => Ok(md),
        _ => Err(LoadError::Resolution {
            path: path.to_path_buf(),
            message: String::from("referenced file is not modular data"),
        }),
    }
}

fn referenced(ctx: &Ctx, reference: &str, tol: &Tolerances) -> Result<(PathBuf, ModularData), LoadError> {
    let path = resolve(ctx, reference);
    if !path.is_file() {
        return Err(ctx.resolution(format!("category file {:?} not found", reference)));
    }
    let data = load_modular(&path, tol)?;
    Ok((path, data))
}

fn branching_from_raw(ctx: &Ctx, raw: RawBundle, tol: &Tolerances) -> Result<BranchingBundle, LoadError> {
    let kind = Kind::Branching;
    let cat1_ref = ctx.require(raw.cat1, "cat1", kind)?;
    let cat2_ref = ctx.require(raw.cat2, "cat2", kind)?;
    let pairs = ctx.require(raw.pairs, "pairs", kind)?;
    let (cat1_path, d1) = referenced(ctx, &cat1_ref, tol)?;
    let (cat2_path, d2) = referenced(ctx, &cat2_ref, tol)?;
    let (n1, n2) = (d1.len(), d2.len());
    let mut triples = Vec::with_capacity(pairs.len());
    for (k, (i, j, m)) in pairs.iter().enumerate() {
        let field = format!("pairs[{}]", k);
        triples.push((
            ctx.index(*i, n1, &field)?,
            ctx.index(*j, n2, &field)?,
            ctx.mult(m, &field)?,
        ));
    }
    let cat1 = category_from(&cat1_path, d1, tol)?;
    let cat2 = category_from(&cat2_path, d2, tol)?;
    let z = BranchingMatrix::new(cat1, cat2, triples).map_err(|e| ctx.schema(e.to_string()))?;
    Ok(BranchingBundle {
        cat1_ref,
        cat2_ref,
        cat1_path,
        cat2_path,
        z,
        hypotheses: raw.hypotheses,
    })
}

fn extension_from_raw(ctx: &Ctx, raw: RawBundle, tol: &Tolerances) -> Result<ExtensionBundle, LoadError> {
    let kind = Kind::Extension;
    let category_ref = ctx.require(raw.category, "category", kind)?;
    let side_number = ctx.require(raw.side, "side", kind)?;
    let side = Side::from_number(side_number)
        .ok_or_else(|| ctx.schema(format!("side must be 1 or 2, found {}", side_number)))?;
    let m_raw = ctx.require(raw.m, "m", kind)?;
    let (category_path, category) = referenced(ctx, &category_ref, tol)?;
    let mut m = BTreeMap::new();
    for (name, k) in &m_raw {
        let label = category
            .label_by_name(name)
            .ok_or_else(|| ctx.resolution(format!("label {:?} not in {}", name, category_ref)))?;
        let k = ctx.mult(k, &format!("m.{}", name))?;
        if k != BigUint::from(0u32) {
            m.insert(label, k);
        }
    }
    Ok(ExtensionBundle {
        category_ref,
        category_path,
        category,
        side,
        m,
        simple: raw.simple.unwrap_or(true),
    })
}

fn rational_text(q: &BigRational) -> String {
    q.to_string()
}

fn raw_modular(md: &ModularData) -> RawBundle {
    RawBundle {
        kind: Some(Kind::Modular),
        labels: Some(md.names().to_vec()),
        s: Some(
            md.s_rows()
                .map(|row| row.iter().map(|x| [x.re, x.im]).collect())
                .collect(),
        ),
        h: Some(md.weights().iter().map(rational_text).collect()),
        c: Some(rational_text(md.central_charge())),
        ..RawBundle::default()
    }
}

fn raw_ring(ring: &FusionRing) -> RawBundle {
    RawBundle {
        kind: Some(Kind::Ring),
        labels: Some(ring.names().to_vec()),
        unit: Some(UnitRef::Index(ring.unit().0)),
        n: Some(
            ring.entries()
                .map(|(a, b, c, m)| (a.0, b.0, c.0, Mult::from_big(m)))
                .collect(),
        ),
        ..RawBundle::default()
    }
}

fn raw_branching(b: &BranchingBundle) -> RawBundle {
    RawBundle {
        kind: Some(Kind::Branching),
        cat1: Some(b.cat1_ref.clone()),
        cat2: Some(b.cat2_ref.clone()),
        pairs: Some(
            b.z.entries()
                .map(|(i, j, m)| (i.0, j.0, Mult::from_big(m)))
                .collect(),
        ),
        hypotheses: b.hypotheses,
        ..RawBundle::default()
    }
}

fn raw_extension(e: &ExtensionBundle) -> RawBundle {
    RawBundle {
        kind: Some(Kind::Extension),
        category: Some(e.category_ref.clone()),
        side: Some(e.side.number()),
        m: Some(
            e.m.iter()
                .map(|(a, k)| (String::from(e.category.name(*a)), Mult::from_big(k)))
                .collect(),
        ),
        simple: Some(e.simple),
        ..RawBundle::default()
    }
}

/// Serializes a bundle: one top-level field per line, matrix rows and
/// tuple lists one element per line.
pub fn render_bundle(bundle: &Bundle) -> String {
    let mut raw = match &bundle.payload {
        Payload::Modular(md) => raw_modular(md),
        Payload::Ring(r) => raw_ring(&r.ring),
        Payload::Branching(b) => raw_branching(b),
        Payload::Extension(e) => raw_extension(e),
    };
    raw.meta = bundle.meta.clone();
    let value = serde_json::to_value(&raw).expect("bundle fields serialize");
    let Value::Object(fields) = value else {
        unreachable!("bundles serialize to objects")
    };
    let mut out = String::from("{\n");
    let last = fields.len().saturating_sub(1);
    for (k, (key, v)) in fields.iter().enumerate() {
        out.push_str(&format!("  {}: ", Value::String(key.clone())));
        match v {
            Value::Array(items) if items.iter().any(|x| x.is_array()) => {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str("    ");
                    out.push_str(&item.to_string());
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str("  ]");
            }
            Value::Object(map) if key == "meta" && !map.is_empty() => {
                out.push_str("{\n");
                for (i, (mk, mv)) in map.iter().enumerate() {
                    out.push_str(&format!("    {}: {}", Value::String(mk.clone()), mv));
                    out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
                }
                out.push_str("  }");
            }
            other => out.push_str(&other.to_string()),
        }
        out.push_str(if k < last { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

pub fn save_bundle(bundle: &Bundle, path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, render_bundle(bundle))
}

/// Bundle for freshly generated modular data.
pub fn modular_bundle(md: ModularData, provenance: impl Into<String>) -> Bundle {
    Bundle {
        kind: Kind::Modular,
        payload: Payload::Modular(md),
        meta: provenance_meta(provenance),
    }
}

pub fn ring_bundle(ring: FusionRing, provenance: impl Into<String>) -> Bundle {
    Bundle {
        kind: Kind::Ring,
        payload: Payload::Ring(RingBundle {
            ring,
            dual_problem: None,
        }),
        meta: provenance_meta(provenance),
    }
}

pub fn provenance_meta(provenance: impl Into<String>) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert(String::from("provenance"), Value::String(provenance.into()));
    meta
}

/// Spells `target` relative to the directory `from_dir` when it lives there,
/// otherwise as an absolute path.
pub fn reference_from(from_dir: &Path, target: &Path) -> String {
    let canon = |p: &Path| fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let (dir, target) = (canon(from_dir), canon(target));
    match target.strip_prefix(&dir) {
        Ok(rel) => rel.to_string_lossy().into_owned(),
        Err(_) => target.to_string_lossy().into_owned(),
    }
}
