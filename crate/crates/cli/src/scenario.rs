//! Scenario files: TOML with top-level `name`, `kind`, `seed`, an `[output]`
//! section and a kind-specific `[params]` section.
//!
//! ```toml
//! name = "two-peakon"
//! kind = "peakons"
//! seed = 0
//!
//! [output]
//! directory = "out/two-peakon"
//! stride = 10
//! formats = ["csv", "svg"]
//!
//! [params]
//! preset = "two-peakon"
//! t_end = 10.0
//! ```
//!
//! Validation collects every problem before reporting. Unknown keys are errors.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use epaut_core::lie::LieAlgebraSpec;
use epaut_core::verify::Module;
use toml::{Table, Value};

use crate::expr::Expr;
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Peakons,
    Ch2,
    Mch2,
    Euler2d,
    Rmhd2d,
    ClebschCheck,
    Verify,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Peakons,
        Kind::Ch2,
        Kind::Mch2,
        Kind::Euler2d,
        Kind::Rmhd2d,
        Kind::ClebschCheck,
        Kind::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Peakons => "peakons",
            Kind::Ch2 => "ch2",
            Kind::Mch2 => "mch2",
            Kind::Euler2d => "euler2d",
            Kind::Rmhd2d => "rmhd2d",
            Kind::ClebschCheck => "clebsch-check",
            Kind::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub directory: PathBuf,
    pub stride: usize,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Abelian(usize),
    So3,
}

impl Group {
    pub fn spec(self) -> LieAlgebraSpec {
        match self {
            Group::Abelian(k) => LieAlgebraSpec::abelian(k),
            Group::So3 => LieAlgebraSpec::so3(),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Group::Abelian(k) => k,
            Group::So3 => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Group::Abelian(_) => "abelian",
            Group::So3 => "so3",
        }
    }
}

/// Initial data given either by a named preset or by sampled expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Preset(String),
    /// one expression per component
    Expr(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Helmholtz,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialChoice {
    Zero,
    /// constant `A`, `n x d` row-major
    Constant(Vec<f64>),
    /// `A_ab(x) = amplitude sin(wavenumber x_1)` in every entry
    Wave { amplitude: f64, wavenumber: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PeakonInit {
    Preset { name: String, count: usize },
    Explicit { q: Vec<f64>, p: Vec<f64>, mu: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakonParams {
    pub dim: usize,
    pub group: Group,
    pub kernel1: KernelChoice,
    pub alpha1: f64,
    pub kernel2: KernelChoice,
    pub alpha2: f64,
    pub dt: f64,
    pub t_end: f64,
    pub init: PeakonInit,
    pub potential: PotentialChoice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field1DParams {
    pub length: f64,
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub group: Group,
    pub dt: f64,
    pub t_end: f64,
    pub m: Init,
    pub sigma: Init,
    pub a: Init,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2DParams {
    pub length: f64,
    pub n: usize,
    pub alpha_psi: f64,
    pub alpha_nu: f64,
    pub group: Group,
    pub dt: f64,
    pub t_end: f64,
    pub kmax: usize,
    /// radius of the circular material loop, centred in the box
    pub loop_radius: f64,
    pub varpi: Init,
    pub sigma: Init,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryChoice {
    Translation,
    Rotation,
}

impl SymmetryChoice {
    fn name(self) -> &'static str {
        match self {
            SymmetryChoice::Translation => "translation",
            SymmetryChoice::Rotation => "rotation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClebschParams {
    pub n: usize,
    pub group: Group,
    pub seed_preset: String,
    pub kmax: usize,
    pub dt: f64,
    pub t_end: f64,
    pub symmetries: Vec<SymmetryChoice>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Peakons(PeakonParams),
    Field1D(Field1DParams),
    Field2D(Field2DParams),
    Clebsch(ClebschParams),
    Verify(Vec<Module>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub seed: u64,
    pub output: Output,
    pub params: Params,
}

pub const PEAKON_PRESETS: [&str; 2] = ["two-peakon", "random"];
pub const M_PRESETS: [&str; 4] = ["gaussian", "peakon", "cosine", "zero"];
pub const SIGMA1D_PRESETS: [&str; 3] = ["bump", "constant", "zero"];
pub const A_PRESETS: [&str; 3] = ["zero", "constant", "wave"];
pub const VARPI_PRESETS: [&str; 4] = ["random", "shear", "dipole", "zero"];
pub const SIGMA2D_PRESETS: [&str; 2] = ["random", "zero"];
pub const CLEBSCH_SEEDS: [&str; 3] = ["euler", "charged", "generating"];

/// Typed access to one TOML table that records consumed keys and collects errors.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    used: BTreeSet<String>,
    errors: &'a mut Vec<String>,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, table: Option<&'a Table>, errors: &'a mut Vec<String>) -> Self {
        Self { name, table, used: BTreeSet::new(), errors }
    }

    fn key(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a Value> {
        self.used.insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn err(&mut self, key: &str, msg: impl fmt::Display) {
        let k = self.key(key);
        self.errors.push(format!("`{k}`: {msg}"));
    }

    fn float_opt(&mut self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.err(key, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn float(&mut self, key: &str, default: f64) -> f64 {
        self.float_opt(key).unwrap_or(default)
    }

    fn positive(&mut self, key: &str, default: f64) -> f64 {
        let v = self.float(key, default);
        if !(v > 0.0 && v.is_finite()) {
            self.err(key, format!("must be positive, got {v}"));
        }
        v
    }

    fn nonnegative(&mut self, key: &str, default: f64) -> f64 {
        let v = self.float(key, default);
        if !(v >= 0.0 && v.is_finite()) {
            self.err(key, format!("must be >= 0, got {v}"));
        }
        v
    }

    fn integer(&mut self, key: &str, default: i64) -> i64 {
        match self.get(key) {
            None => default,
            Some(Value::Integer(i)) => *i,
            Some(other) => {
                let t = other.type_str();
                self.err(key, format!("expected an integer, found {t}"));
                default
            }
        }
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> usize {
        let v = self.integer(key, default as i64);
        if v < min as i64 {
            self.err(key, format!("must be >= {min}, got {v}"));
            return default;
        }
        v as usize
    }

    /// FFT grid size: a power of two, at least 8.
    fn grid_size(&mut self, key: &str, default: usize) -> usize {
        let n = self.count(key, default, 8);
        if !n.is_power_of_two() {
            self.err(key, format!("grid size must be a power of two, got {n}"));
            return default;
        }
        n
    }

    fn string_opt(&mut self, key: &str) -> Option<String> {
        match self.get(key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                let t = other.type_str();
                self.err(key, format!("expected a string, found {t}"));
                None
            }
        }
    }

    fn choice(&mut self, key: &str, default: &str, allowed: &[&str]) -> String {
        let v = self.string_opt(key).unwrap_or_else(|| default.to_string());
        if !allowed.contains(&v.as_str()) {
            self.err(key, format!("unknown value `{v}` (expected one of {})", allowed.join(", ")));
            return default.to_string();
        }
        v
    }

    fn strings_opt(&mut self, key: &str) -> Option<Vec<String>> {
        match self.get(key)? {
            Value::String(s) => Some(vec![s.clone()]),
            Value::Array(a) => {
                let out: Option<Vec<String>> = a.iter().map(|v| v.as_str().map(str::to_string)).collect();
                if out.is_none() {
                    self.err(key, "expected an array of strings");
                }
                out
            }
            other => {
                let t = other.type_str();
                self.err(key, format!("expected a string or array of strings, found {t}"));
                None
            }
        }
    }

    fn floats_opt(&mut self, key: &str) -> Option<Vec<f64>> {
        match self.get(key)? {
            Value::Array(a) => {
                let out: Option<Vec<f64>> = a
                    .iter()
                    .map(|v| match v {
                        Value::Float(f) => Some(*f),
                        Value::Integer(i) => Some(*i as f64),
                        _ => None,
                    })
                    .collect();
                if out.is_none() {
                    self.err(key, "expected an array of numbers");
                }
                out
            }
            other => {
                let t = other.type_str();
                self.err(key, format!("expected an array of numbers, found {t}"));
                None
            }
        }
    }

    fn group(&mut self, default: Group) -> Group {
        let name = self.choice("group", default.name(), &["abelian", "so3"]);
        if name == "so3" {
            if self.get("rank").is_some() {
                self.err("rank", "only applies to the abelian group");
            }
            Group::So3
        } else {
            let k = self.count("rank", default.dim().max(1), 1);
            Group::Abelian(k)
        }
    }

    /// `<field>_preset` or `<field>_expr` (one expression per component), never both.
    fn init(&mut self, field: &str, default: &str, presets: &[&str], comps: usize, l: f64) -> Init {
        let pk = format!("{field}_preset");
        let ek = format!("{field}_expr");
        let preset = self.string_opt(&pk);
        let exprs = self.strings_opt(&ek);
        match (preset, exprs) {
            (Some(_), Some(_)) => {
                let k = self.key(&pk);
                let e = self.key(&ek);
                self.errors.push(format!("`{k}` and `{e}` conflict: give either a preset or expressions"));
                Init::Preset(default.to_string())
            }
            (None, Some(ex)) => {
                if ex.len() != comps {
                    self.err(&ek, format!("expected {comps} expression(s), got {}", ex.len()));
                }
                for e in &ex {
                    if let Err(msg) = Expr::parse(e).and_then(|c| c.eval(0.0, 0.0, l)) {
                        self.err(&ek, msg);
                    }
                }
                Init::Expr(ex)
            }
            (p, None) => {
                let v = p.unwrap_or_else(|| default.to_string());
                if !presets.contains(&v.as_str()) {
                    self.err(&pk, format!("unknown preset `{v}` (expected one of {})", presets.join(", ")));
                    return Init::Preset(default.to_string());
                }
                Init::Preset(v)
            }
        }
    }

    fn finish(self) {
        if let Some(t) = self.table {
            for k in t.keys() {
                if !self.used.contains(k) {
                    let key = if self.name.is_empty() { k.clone() } else { format!("{}.{k}", self.name) };
                    self.errors.push(format!("unknown key `{key}`"));
                }
            }
        }
    }
}

fn sub_table<'a>(root: &'a Table, key: &str, errors: &mut Vec<String>) -> Option<&'a Table> {
    match root.get(key) {
        None => None,
        Some(Value::Table(t)) => Some(t),
        Some(_) => {
            errors.push(format!("`{key}` must be a section"));
            None
        }
    }
}

fn kernel_choice(sec: &mut Section<'_>, key: &str) -> KernelChoice {
    match sec.choice(key, "helmholtz", &["helmholtz", "gaussian"]).as_str() {
        "gaussian" => KernelChoice::Gaussian,
        _ => KernelChoice::Helmholtz,
    }
}

fn time_params(sec: &mut Section<'_>, dt: f64, t_end: f64) -> (f64, f64) {
    let dt = sec.positive("dt", dt);
    let t_end = sec.positive("t_end", t_end);
    if dt > t_end {
        sec.err("dt", format!("time step {dt} exceeds t_end {t_end}"));
    }
    (dt, t_end)
}

fn parse_peakons(sec: &mut Section<'_>) -> PeakonParams {
    let dim = sec.count("dim", 1, 1);
    let group = sec.group(Group::Abelian(1));
    let d = group.dim();
    let kernel1 = kernel_choice(sec, "kernel1");
    let alpha1 = sec.positive("alpha1", 1.0);
    let kernel2 = kernel_choice(sec, "kernel2");
    let alpha2 = sec.positive("alpha2", 1.0);
    let (dt, t_end) = time_params(sec, 1e-3, 10.0);
    let preset = sec.string_opt("preset");
    let q = sec.floats_opt("q");
    let p = sec.floats_opt("p");
    let mu = sec.floats_opt("mu");
    let count_given = sec.table.is_some_and(|t| t.contains_key("count"));
    let count = sec.count("count", 2, 1);
    let init = if q.is_some() || p.is_some() || mu.is_some() {
        if preset.is_some() {
            sec.errors.push("`params.preset` and explicit `params.q`/`params.p`/`params.mu` conflict".into());
        }
        if count_given {
            sec.err("count", "is derived from `q` when particles are given explicitly");
        }
        let q = q.unwrap_or_default();
        let p = p.unwrap_or_default();
        if q.is_empty() || !q.len().is_multiple_of(dim) {
            sec.err("q", format!("needs a positive multiple of dim = {dim} entries, got {}", q.len()));
        }
        let count = q.len() / dim;
        if p.len() != q.len() {
            sec.err("p", format!("needs {} entries to match `q`, got {}", q.len(), p.len()));
        }
        let mu = mu.unwrap_or_else(|| vec![0.0; count * d]);
        if mu.len() != count * d {
            sec.err("mu", format!("needs {} entries ({count} particles x {d} charges), got {}", count * d, mu.len()));
        }
        PeakonInit::Explicit { q, p, mu }
    } else {
        let name = preset.unwrap_or_else(|| "two-peakon".into());
        if !PEAKON_PRESETS.contains(&name.as_str()) {
            sec.err("preset", format!("unknown preset `{name}` (expected one of {})", PEAKON_PRESETS.join(", ")));
        }
        if name == "two-peakon" && count_given && count != 2 {
            sec.err("count", "the two-peakon preset has exactly 2 particles");
        }
        PeakonInit::Preset { name, count }
    };
    let kind = sec.choice("potential", "zero", &["zero", "constant", "wave"]);
    let values = sec.floats_opt("potential_values");
    let amplitude = sec.float_opt("potential_amplitude");
    let wavenumber = sec.float_opt("potential_wavenumber");
    let potential = match kind.as_str() {
        "constant" => {
            let v = values.unwrap_or_else(|| vec![0.0; dim * d]);
            if v.len() != dim * d {
                sec.err("potential_values", format!("needs dim x group dimension = {} entries, got {}", dim * d, v.len()));
            }
            PotentialChoice::Constant(v)
        }
        "wave" => PotentialChoice::Wave { amplitude: amplitude.unwrap_or(0.5), wavenumber: wavenumber.unwrap_or(1.0) },
        _ => PotentialChoice::Zero,
    };
    if kind != "constant" && sec.table.is_some_and(|t| t.contains_key("potential_values")) {
        sec.err("potential_values", "only applies to potential = \"constant\"");
    }
    if kind != "wave" && (amplitude.is_some() || wavenumber.is_some()) {
        sec.errors.push("`params.potential_amplitude`/`params.potential_wavenumber` only apply to potential = \"wave\"".into());
    }
    PeakonParams { dim, group, kernel1, alpha1, kernel2, alpha2, dt, t_end, init, potential }
}

fn parse_field1d(sec: &mut Section<'_>, kind: Kind) -> Field1DParams {
    let length = sec.positive("L", 2.0 * std::f64::consts::PI);
    let n = sec.grid_size("N", 256);
    let alpha1 = sec.nonnegative("alpha1", 1.0);
    let alpha2 = sec.nonnegative("alpha2", if kind == Kind::Mch2 { 1.0 } else { 0.0 });
    if kind == Kind::Mch2 && alpha2 == 0.0 {
        sec.err("alpha2", "mch2 needs a positive alpha2 (use kind = \"ch2\" for alpha2 = 0)");
    }
    let group = sec.group(Group::Abelian(1));
    let d = group.dim();
    let (dt, t_end) = time_params(sec, 1e-3, 1.0);
    let m = sec.init("m", "gaussian", &M_PRESETS, 1, length);
    let sigma = sec.init("sigma", "bump", &SIGMA1D_PRESETS, d, length);
    let a = sec.init("a", "zero", &A_PRESETS, d, length);
    Field1DParams { length, n, alpha1, alpha2, group, dt, t_end, m, sigma, a }
}

fn parse_field2d(sec: &mut Section<'_>, kind: Kind) -> Field2DParams {
    let length = sec.positive("L", 2.0 * std::f64::consts::PI);
    let n = sec.grid_size("N", 64);
    let alpha_psi = sec.nonnegative("alpha_psi", 0.0);
    let alpha_nu = sec.nonnegative("alpha_nu", 0.0);
    let group = sec.group(Group::Abelian(1));
    if kind == Kind::Rmhd2d && group == Group::So3 {
        sec.err("group", "rmhd2d carries an abelian flux; use euler2d for so3 charges");
    }
    let d = group.dim();
    let (dt, t_end) = time_params(sec, 1e-3, 1.0);
    let kmax = sec.count("kmax", 4, 1);
    let loop_radius = sec.positive("loop_radius", 0.25 * length);
    if loop_radius >= 0.5 * length {
        sec.err("loop_radius", format!("must be below L/2 = {}", 0.5 * length));
    }
    let varpi = sec.init("varpi", "random", &VARPI_PRESETS, 1, length);
    let sigma_default = if kind == Kind::Rmhd2d { "random" } else { "zero" };
    let sigma = sec.init("sigma", sigma_default, &SIGMA2D_PRESETS, d, length);
    Field2DParams { length, n, alpha_psi, alpha_nu, group, dt, t_end, kmax, loop_radius, varpi, sigma }
}

fn parse_clebsch(sec: &mut Section<'_>) -> ClebschParams {
    let n = sec.grid_size("N", 32);
    let group = sec.group(Group::Abelian(1));
    let seed_preset = sec.choice("seed_preset", "euler", &CLEBSCH_SEEDS);
    let kmax = sec.count("kmax", 3, 1);
    let (dt, t_end) = time_params(sec, 1e-3, 0.1);
    let names = sec.strings_opt("symmetries").unwrap_or_else(|| vec!["translation".into(), "rotation".into()]);
    let mut symmetries = Vec::new();
    for s in names {
        match s.as_str() {
            "translation" => symmetries.push(SymmetryChoice::Translation),
            "rotation" => symmetries.push(SymmetryChoice::Rotation),
            other => sec.err("symmetries", format!("unknown symmetry `{other}` (expected translation, rotation)")),
        }
    }
    ClebschParams { n, group, seed_preset, kmax, dt, t_end, symmetries }
}

fn parse_verify(sec: &mut Section<'_>) -> Vec<Module> {
    let names = sec
        .strings_opt("modules")
        .unwrap_or_else(|| Module::ALL.iter().map(|m| m.name().to_string()).collect());
    let mut out = Vec::new();
    for n in names {
        match n.parse::<Module>() {
            Ok(m) => out.push(m),
            Err(e) => sec.err("modules", e),
        }
    }
    out
}

impl Scenario {
    /// Parses and validates scenario text; `origin` names the source in messages.
    pub fn parse_str(text: &str) -> Result<Self> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| CliError::Invalid(vec![e.to_string()]))?;
        let mut errors = Vec::new();
        let output_t = sub_table(&root, "output", &mut errors);
        let params_t = sub_table(&root, "params", &mut errors);

        let mut top = Section::new("", Some(&root), &mut errors);
        top.used.insert("output".into());
        top.used.insert("params".into());
        let name = top.string_opt("name");
        if name.is_none() {
            top.errors.push("missing required field `name`".into());
        }
        let name = name.unwrap_or_default();
        let bad_name = name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.');
        if bad_name && !top.errors.iter().any(|e| e.contains("`name`")) {
            top.err("name", "must be a non-empty file-name-safe string");
        }
        let kind_s = top.string_opt("kind");
        let kind = match kind_s.as_deref() {
            None => {
                top.errors.push("missing required field `kind`".into());
                None
            }
            Some(s) => {
                let k = Kind::parse(s);
                if k.is_none() {
                    let all: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
                    top.err("kind", format!("unknown kind `{s}` (expected one of {})", all.join(", ")));
                }
                k
            }
        };
        let seed = top.integer("seed", 0);
        if seed < 0 {
            top.err("seed", "must be >= 0");
        }
        top.finish();

        let mut out = Section::new("output", output_t, &mut errors);
        let directory = out
            .string_opt("directory")
            .map(PathBuf::from)
            .unwrap_or_else(|| Path::new("out").join(&name));
        let stride = out.count("stride", 10, 1);
        let fnames = out.strings_opt("formats").unwrap_or_else(|| vec!["csv".into()]);
        let mut formats = Vec::new();
        for f in fnames {
            match f.as_str() {
                "csv" => formats.push(Format::Csv),
                "svg" => formats.push(Format::Svg),
                other => out.err("formats", format!("unknown format `{other}` (expected csv, svg)")),
            }
        }
        if !formats.contains(&Format::Csv) {
            formats.insert(0, Format::Csv);
        }
        formats.dedup();
        out.finish();

        let mut sec = Section::new("params", params_t, &mut errors);
        let params = kind.map(|k| match k {
            Kind::Peakons => Params::Peakons(parse_peakons(&mut sec)),
            Kind::Ch2 | Kind::Mch2 => Params::Field1D(parse_field1d(&mut sec, k)),
            Kind::Euler2d | Kind::Rmhd2d => Params::Field2D(parse_field2d(&mut sec, k)),
            Kind::ClebschCheck => Params::Clebsch(parse_clebsch(&mut sec)),
            Kind::Verify => Params::Verify(parse_verify(&mut sec)),
        });
        if kind.is_some() {
            sec.finish();
        }

        if !errors.is_empty() {
            return Err(CliError::Invalid(errors));
        }
        Ok(Scenario {
            name,
            kind: kind.expect("checked above"),
            seed: seed as u64,
            output: Output { directory, stride, formats },
            params: params.expect("checked above"),
        })
    }

    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text).map_err(|e| match e {
            CliError::Invalid(v) => CliError::Invalid(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
            other => other,
        })
    }

    /// Canonical TOML with every default spelled out.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("name".into(), Value::String(self.name.clone()));
        root.insert("kind".into(), Value::String(self.kind.name().into()));
        root.insert("seed".into(), Value::Integer(self.seed as i64));
        let mut out = Table::new();
        out.insert("directory".into(), Value::String(self.output.directory.display().to_string()));
        out.insert("stride".into(), Value::Integer(self.output.stride as i64));
        out.insert(
            "formats".into(),
            Value::Array(self.output.formats.iter().map(|f| Value::String(f.name().into())).collect()),
        );
        root.insert("output".into(), Value::Table(out));
        let mut p = Table::new();
        let fl = |v: f64| Value::Float(v);
        let arr = |v: &[f64]| Value::Array(v.iter().map(|x| Value::Float(*x)).collect());
        let group = |p: &mut Table, g: Group| {
            p.insert("group".into(), Value::String(g.name().into()));
            if let Group::Abelian(k) = g {
                p.insert("rank".into(), Value::Integer(k as i64));
            }
        };
        let init = |p: &mut Table, field: &str, i: &Init| match i {
            Init::Preset(s) => {
                p.insert(format!("{field}_preset"), Value::String(s.clone()));
            }
            Init::Expr(e) => {
                p.insert(format!("{field}_expr"), Value::Array(e.iter().map(|s| Value::String(s.clone())).collect()));
            }
        };
        let kname = |k: KernelChoice| {
            Value::String(match k {
                KernelChoice::Helmholtz => "helmholtz".into(),
                KernelChoice::Gaussian => "gaussian".into(),
            })
        };
        match &self.params {
            Params::Peakons(q) => {
                p.insert("dim".into(), Value::Integer(q.dim as i64));
                group(&mut p, q.group);
                p.insert("kernel1".into(), kname(q.kernel1));
                p.insert("alpha1".into(), fl(q.alpha1));
                p.insert("kernel2".into(), kname(q.kernel2));
                p.insert("alpha2".into(), fl(q.alpha2));
                p.insert("dt".into(), fl(q.dt));
                p.insert("t_end".into(), fl(q.t_end));
                match &q.init {
                    PeakonInit::Preset { name, count } => {
                        p.insert("preset".into(), Value::String(name.clone()));
                        p.insert("count".into(), Value::Integer(*count as i64));
                    }
                    PeakonInit::Explicit { q: qq, p: pp, mu } => {
                        p.insert("q".into(), arr(qq));
                        p.insert("p".into(), arr(pp));
                        p.insert("mu".into(), arr(mu));
                    }
                }
                match &q.potential {
                    PotentialChoice::Zero => {
                        p.insert("potential".into(), Value::String("zero".into()));
                    }
                    PotentialChoice::Constant(v) => {
                        p.insert("potential".into(), Value::String("constant".into()));
                        p.insert("potential_values".into(), arr(v));
                    }
                    PotentialChoice::Wave { amplitude, wavenumber } => {
                        p.insert("potential".into(), Value::String("wave".into()));
                        p.insert("potential_amplitude".into(), fl(*amplitude));
                        p.insert("potential_wavenumber".into(), fl(*wavenumber));
                    }
                }
            }
            Params::Field1D(f) => {
                p.insert("L".into(), fl(f.length));
                p.insert("N".into(), Value::Integer(f.n as i64));
                p.insert("alpha1".into(), fl(f.alpha1));
                p.insert("alpha2".into(), fl(f.alpha2));
                group(&mut p, f.group);
                p.insert("dt".into(), fl(f.dt));
                p.insert("t_end".into(), fl(f.t_end));
                init(&mut p, "m", &f.m);
                init(&mut p, "sigma", &f.sigma);
                init(&mut p, "a", &f.a);
            }
            Params::Field2D(f) => {
                p.insert("L".into(), fl(f.length));
                p.insert("N".into(), Value::Integer(f.n as i64));
                p.insert("alpha_psi".into(), fl(f.alpha_psi));
                p.insert("alpha_nu".into(), fl(f.alpha_nu));
                group(&mut p, f.group);
                p.insert("dt".into(), fl(f.dt));
                p.insert("t_end".into(), fl(f.t_end));
                p.insert("kmax".into(), Value::Integer(f.kmax as i64));
                p.insert("loop_radius".into(), fl(f.loop_radius));
                init(&mut p, "varpi", &f.varpi);
                init(&mut p, "sigma", &f.sigma);
            }
            Params::Clebsch(c) => {
                p.insert("N".into(), Value::Integer(c.n as i64));
                group(&mut p, c.group);
                p.insert("seed_preset".into(), Value::String(c.seed_preset.clone()));
                p.insert("kmax".into(), Value::Integer(c.kmax as i64));
                p.insert("dt".into(), fl(c.dt));
                p.insert("t_end".into(), fl(c.t_end));
                p.insert(
                    "symmetries".into(),
                    Value::Array(c.symmetries.iter().map(|s| Value::String(s.name().into())).collect()),
                );
            }
            Params::Verify(m) => {
                p.insert("modules".into(), Value::Array(m.iter().map(|m| Value::String(m.name().into())).collect()));
            }
        }
        root.insert("params".into(), Value::Table(p));
        toml::to_string(&root).expect("scenario tables serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invalid(text: &str) -> Vec<String> {
        match Scenario::parse_str(text) {
            Err(CliError::Invalid(v)) => v,
            other => panic!("expected validation errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_peakons_file_uses_two_particle_defaults() {
        let s = Scenario::parse_str("name = \"p\"\nkind = \"peakons\"\n").unwrap();
        assert_eq!(s.output.directory, Path::new("out/p"));
        match s.params {
            Params::Peakons(p) => {
                assert_eq!(p.init, PeakonInit::Preset { name: "two-peakon".into(), count: 2 });
                assert_eq!(p.dim, 1);
            }
            _ => panic!("wrong params"),
        }
    }

    #[test]
    fn negative_alpha_names_the_field() {
        let errs = invalid("name = \"p\"\nkind = \"peakons\"\n[params]\nalpha1 = -1\n");
        assert!(errs.iter().any(|e| e.contains("params.alpha1")), "{errs:?}");
    }

    #[test]
    fn preset_and_expression_conflict() {
        let errs = invalid("name = \"c\"\nkind = \"ch2\"\n[params]\nm_preset = \"cosine\"\nm_expr = \"sin(x)\"\n");
        assert!(errs.iter().any(|e| e.contains("conflict")), "{errs:?}");
    }

    #[test]
    fn all_problems_are_reported() {
        let errs = invalid("kind = \"euler2d\"\ncolour = 3\n[params]\nN = 2\ndt = \"fast\"\nbogus = 1\n");
        assert!(errs.len() >= 4, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("`name`")));
        assert!(errs.iter().any(|e| e.contains("unknown key `colour`")));
        assert!(errs.iter().any(|e| e.contains("unknown key `params.bogus`")));
        assert!(errs.iter().any(|e| e.contains("params.dt")));
        let errs = invalid("name = \"g\"\nkind = \"ch2\"\n[params]\nN = 100\n");
        assert!(errs.iter().any(|e| e.contains("power of two")), "{errs:?}");
    }

    #[test]
    fn serialization_is_idempotent() {
        for text in [
            "name = \"a\"\nkind = \"peakons\"\n[params]\nq = [0.0, 1.0]\np = [1, 0.5]\n",
            "name = \"b\"\nkind = \"mch2\"\n[params]\nsigma_expr = \"1 + 0.1 * cos(x)\"\n",
            "name = \"c\"\nkind = \"euler2d\"\nseed = 4\n[output]\nformats = [\"svg\"]\n",
            "name = \"d\"\nkind = \"clebsch-check\"\n[params]\ngroup = \"so3\"\n",
            "name = \"e\"\nkind = \"verify\"\n[params]\nmodules = [\"lie\"]\n",
        ] {
            let s = Scenario::parse_str(text).unwrap();
            let once = s.to_toml();
            let s2 = Scenario::parse_str(&once).unwrap();
            assert_eq!(s2, s);
            assert_eq!(s2.to_toml(), once);
        }
    }
}
