//! JSON category files and machine-readable reports.
//!
//! A file declares `"convention": "sA"`: every degree is a degree on the
//! suspension, and operations are the components `b_n` of degree +1.
//! Coefficients are exact: integers or `"a/b"` strings.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::category::{AInfCategory, AInfFunctor};
use crate::constructions::{ConstructionError, DgModel};
use crate::dcoder::DoubleCoderivation;
use crate::quiver::{GenId, ObjId, Quiver};
use crate::report::Check;
use crate::scalar::{Field, Scalar};
use crate::tensor::{Elem, Family, Word};

pub const CONVENTION: &str = "sA";
pub const REPORT_FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{at}: {msg}")]
    Invalid { at: String, msg: String },
    #[error("missing '{0}' block")]
    MissingBlock(&'static str),
    #[error("{path}: {msg}")]
    Read { path: String, msg: String },
}

fn invalid(at: impl Into<String>, msg: impl Into<String>) -> InputError {
    InputError::Invalid { at: at.into(), msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn parse(&self, field: Field, at: &str) -> Result<Scalar, InputError> {
        let text = match self {
            Coeff::Int(n) => n.to_string(),
            Coeff::Text(t) => t.clone(),
        };
        Scalar::parse(&text, field).map_err(|e| invalid(at, e.to_string()))
    }
}

/// `[generator, coefficient]`.
pub type Term = (String, Coeff);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub name: String,
    pub src: String,
    pub tgt: String,
    pub degree: i32,
}

/// One component on one input word; `path` lists the objects along the word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationEntry {
    pub arity: usize,
    pub path: Vec<String>,
    pub inputs: Vec<String>,
    pub output: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryBlock {
    pub convention: String,
    pub field: String,
    pub truncation: usize,
    pub objects: Vec<String>,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default)]
    pub operations: Vec<OperationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<BTreeMap<String, Vec<Term>>>,
}

/// A functor out of the enclosing category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorBlock {
    pub target: CategoryBlock,
    pub objects: BTreeMap<String, String>,
    pub components: Vec<OperationEntry>,
}

/// `(D, φ, v)`; `φ` is the identity on objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgModelBlock {
    pub target: CategoryBlock,
    pub components: Vec<OperationEntry>,
    pub v: BTreeMap<String, Vec<Term>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleEntry {
    pub path: Vec<String>,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub output: Vec<Term>,
}

/// A double `(1,1)`-coderivation on the enclosing category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleBlock {
    pub degree: i32,
    pub components: Vec<DoubleEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryFile {
    #[serde(flatten)]
    pub category: CategoryBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functor: Option<FunctorBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dg_model: Option<DgModelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double_coderivation: Option<DoubleBlock>,
}

pub fn parse_category(text: &str) -> Result<CategoryFile, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() })
}

impl CategoryFile {
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// A category with its optional unit assignment.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub category: AInfCategory,
    pub units: Option<Vec<Elem>>,
}

/// The pieces of a DG model before validation against the source.
#[derive(Clone, Debug)]
pub struct ModelParts {
    pub target: AInfCategory,
    pub target_units: Vec<Elem>,
    pub functor: AInfFunctor,
    pub v: Vec<Elem>,
}

impl ModelParts {
    pub fn into_model(self, source: &AInfCategory, units: &[Elem]) -> Result<DgModel, ConstructionError> {
        DgModel::new(source, units, self.target, self.target_units, self.functor, self.v)
    }
}

fn object(q: &Quiver, name: &str, at: &str) -> Result<ObjId, InputError> {
    q.object_id(name).ok_or_else(|| invalid(at, format!("unknown object '{name}'")))
}

fn generator(q: &Quiver, name: &str, at: &str) -> Result<GenId, InputError> {
    q.gen_id(name).ok_or_else(|| invalid(at, format!("unknown generator '{name}'")))
}

/// Terms of an element of `hom(x, y)` in the given degree.
fn parse_elem(q: &Quiver, field: Field, terms: &[Term], hom: (ObjId, ObjId), degree: i32, at: &str) -> Result<Elem, InputError> {
    let mut e = Elem::new();
    for (i, (name, c)) in terms.iter().enumerate() {
        let here = format!("{at}[{i}]");
        let g = generator(q, name, &here)?;
        if (q.src(g), q.tgt(g)) != hom {
            return Err(invalid(here, format!("'{name}' is not in hom({}, {})", q.object_name(hom.0), q.object_name(hom.1))));
        }
        if q.degree(g) != degree {
            return Err(invalid(here, format!("'{name}' has degree {}, expected {degree}", q.degree(g))));
        }
        e.add_term(g, c.parse(field, &here)?);
    }
    Ok(e)
}

fn parse_word(q: &Quiver, path: &[String], inputs: &[String], at: &str) -> Result<Word, InputError> {
    if path.len() != inputs.len() + 1 {
        return Err(invalid(format!("{at}.path"), format!("expected {} objects, found {}", inputs.len() + 1, path.len())));
    }
    let start = object(q, &path[0], &format!("{at}.path[0]"))?;
    let mut gens = Vec::new();
    let mut x = start;
    for (i, name) in inputs.iter().enumerate() {
        let g = generator(q, name, &format!("{at}.inputs[{i}]"))?;
        let next = object(q, &path[i + 1], &format!("{at}.path[{}]", i + 1))?;
        if q.src(g) != x || q.tgt(g) != next {
            return Err(invalid(format!("{at}.inputs[{i}]"), format!("'{name}' does not run from '{}' to '{}'", path[i], path[i + 1])));
        }
        gens.push(g);
        x = next;
    }
    Ok(Word::new(start, &gens))
}

pub fn resolve_category(block: &CategoryBlock, at: &str) -> Result<Resolved, InputError> {
    if block.convention != CONVENTION {
        return Err(invalid(format!("{at}convention"), format!("expected \"{CONVENTION}\", found \"{}\"", block.convention)));
    }
    let field = Field::parse(&block.field).map_err(|e| invalid(format!("{at}field"), e.to_string()))?;
    if block.truncation == 0 {
        return Err(invalid(format!("{at}truncation"), "must be at least 1"));
    }
    let mut q = Quiver::new(block.objects.iter().cloned()).map_err(|e| invalid(format!("{at}objects"), e.to_string()))?;
    for (i, g) in block.generators.iter().enumerate() {
        let here = format!("{at}generators[{i}]");
        let (x, y) = (object(&q, &g.src, &here)?, object(&q, &g.tgt, &here)?);
        q.add_gen(g.name.clone(), x, y, g.degree).map_err(|e| invalid(here, e.to_string()))?;
    }
    let mut a = AInfCategory::new(q, field, block.truncation);
    for (i, op) in block.operations.iter().enumerate() {
        let here = format!("{at}operations[{i}]");
        let q = &a.quiver;
        if op.arity == 0 || op.arity != op.inputs.len() {
            return Err(invalid(&here, format!("arity {} does not match {} inputs", op.arity, op.inputs.len())));
        }
        let w = parse_word(q, &op.path, &op.inputs, &here)?;
        let e = parse_elem(q, field, &op.output, (w.start, w.end(q)), w.degree(q) + 1, &format!("{here}.output"))?;
        if a.b.get(&w.gens).is_some() {
            return Err(invalid(here, "duplicate entry"));
        }
        a.b.set(&w.gens, e);
    }
    let units = match &block.units {
        None => None,
        Some(map) => Some(parse_per_object(&a.quiver, field, map, -1, &format!("{at}units"))?),
    };
    Ok(Resolved { category: a, units })
}

fn parse_per_object(q: &Quiver, field: Field, map: &BTreeMap<String, Vec<Term>>, degree: i32, at: &str) -> Result<Vec<Elem>, InputError> {
    for name in map.keys() {
        object(q, name, at)?;
    }
    (0..q.num_objects() as ObjId)
        .map(|x| {
            let name = q.object_name(x);
            let terms = map.get(name).ok_or_else(|| invalid(at, format!("no entry for object '{name}'")))?;
            parse_elem(q, field, terms, (x, x), degree, &format!("{at}.{name}"))
        })
        .collect()
}

fn parse_components(source: &Quiver, target: &AInfCategory, obj_map: &[ObjId], entries: &[OperationEntry], at: &str) -> Result<Family, InputError> {
    let mut f = Family::new(0);
    for (i, op) in entries.iter().enumerate() {
        let here = format!("{at}[{i}]");
        if op.arity == 0 || op.arity != op.inputs.len() {
            return Err(invalid(&here, format!("arity {} does not match {} inputs", op.arity, op.inputs.len())));
        }
        let w = parse_word(source, &op.path, &op.inputs, &here)?;
        let hom = (obj_map[w.start as usize], obj_map[w.end(source) as usize]);
        let e = parse_elem(&target.quiver, target.field, &op.output, hom, w.degree(source), &format!("{here}.output"))?;
        if f.get(&w.gens).is_some() {
            return Err(invalid(here, "duplicate entry"));
        }
        f.set(&w.gens, e);
    }
    Ok(f)
}

pub fn resolve_functor(block: &FunctorBlock, source: &AInfCategory) -> Result<(AInfFunctor, Resolved), InputError> {
    let target = resolve_category(&block.target, "functor.target.")?;
    let (sq, tq) = (&source.quiver, &target.category.quiver);
    let mut obj_map = Vec::new();
    for x in 0..sq.num_objects() as ObjId {
        let name = sq.object_name(x);
        let t = block.objects.get(name).ok_or_else(|| invalid("functor.objects", format!("no image for object '{name}'")))?;
        obj_map.push(object(tq, t, "functor.objects")?);
    }
    for name in block.objects.keys() {
        object(sq, name, "functor.objects")?;
    }
    let f = parse_components(sq, &target.category, &obj_map, &block.components, "functor.components")?;
    let truncation = source.truncation.min(target.category.truncation);
    Ok((AInfFunctor { obj_map, f, truncation }, target))
}

pub fn resolve_model(block: &DgModelBlock, source: &AInfCategory) -> Result<ModelParts, InputError> {
    let target = resolve_category(&block.target, "dg_model.target.")?;
    let target_units = target.units.clone().ok_or_else(|| invalid("dg_model.target", "the model needs units"))?;
    let t = &target.category;
    if t.quiver.objects() != source.quiver.objects() {
        return Err(invalid("dg_model.target.objects", "the model must have the same objects"));
    }
    let obj_map: Vec<ObjId> = (0..source.quiver.num_objects() as ObjId).collect();
    let f = parse_components(&source.quiver, t, &obj_map, &block.components, "dg_model.components")?;
    let v = parse_per_object(&t.quiver, t.field, &block.v, -2, "dg_model.v")?;
    let functor = AInfFunctor { obj_map, f, truncation: source.truncation.min(t.truncation) };
    Ok(ModelParts { target: target.category, target_units, functor, v })
}

pub fn resolve_double(block: &DoubleBlock, a: &AInfCategory) -> Result<DoubleCoderivation, InputError> {
    let q = &a.quiver;
    let id = AInfFunctor::identity(a);
    let mut r = DoubleCoderivation::new(id.clone(), id, block.degree, a.truncation);
    let mut seen = HashMap::new();
    for (i, e) in block.components.iter().enumerate() {
        let here = format!("double_coderivation.components[{i}]");
        let inputs: Vec<String> = e.left.iter().chain(&e.right).cloned().collect();
        let w = parse_word(q, &e.path, &inputs, &here)?;
        if w.len() > a.truncation {
            return Err(invalid(&here, format!("length {} exceeds the truncation", w.len())));
        }
        let v = parse_elem(q, a.field, &e.output, (w.start, w.end(q)), w.degree(q) + block.degree, &format!("{here}.output"))?;
        if seen.insert((w.clone(), e.left.len()), ()).is_some() {
            return Err(invalid(here, "duplicate entry"));
        }
        r.set(&w, e.left.len(), v);
    }
    Ok(r)
}

fn emit_terms(q: &Quiver, e: &Elem) -> Vec<Term> {
    e.iter().map(|(g, c)| (q.name(*g).to_string(), Coeff::Text(c.to_string()))).collect()
}

fn emit_entries(source: &Quiver, target: &Quiver, f: &Family) -> Vec<OperationEntry> {
    f.sorted_keys()
        .into_iter()
        .map(|k| {
            let w = Word::of(source, &k);
            OperationEntry {
                arity: k.len(),
                path: w.path(source).into_iter().map(|x| source.object_name(x).to_string()).collect(),
                inputs: k.iter().map(|&g| source.name(g).to_string()).collect(),
                output: emit_terms(target, &f.value(&k)),
            }
        })
        .collect()
}

fn emit_per_object(q: &Quiver, elems: &[Elem]) -> BTreeMap<String, Vec<Term>> {
    elems.iter().enumerate().map(|(x, e)| (q.object_name(x as ObjId).to_string(), emit_terms(q, e))).collect()
}

pub fn emit_category(a: &AInfCategory, units: Option<&[Elem]>) -> CategoryBlock {
    let q = &a.quiver;
    CategoryBlock {
        convention: CONVENTION.to_string(),
        field: a.field.name(),
        truncation: a.truncation,
        objects: q.objects().to_vec(),
        generators: q
            .gens()
            .iter()
            .map(|g| GeneratorEntry { name: g.name.clone(), src: q.object_name(g.src).to_string(), tgt: q.object_name(g.tgt).to_string(), degree: g.degree })
            .collect(),
        operations: emit_entries(q, q, &a.b),
        units: units.map(|u| emit_per_object(q, u)),
    }
}

pub fn emit_file(a: &AInfCategory, units: Option<&[Elem]>) -> CategoryFile {
    CategoryFile { category: emit_category(a, units), functor: None, dg_model: None, double_coderivation: None }
}

pub fn emit_functor(f: &AInfFunctor, source: &AInfCategory, target: &AInfCategory, target_units: Option<&[Elem]>) -> FunctorBlock {
    let (sq, tq) = (&source.quiver, &target.quiver);
    FunctorBlock {
        target: emit_category(target, target_units),
        objects: (0..sq.num_objects()).map(|x| (sq.object_name(x as ObjId).to_string(), tq.object_name(f.obj_map[x]).to_string())).collect(),
        components: emit_entries(sq, tq, &f.f),
    }
}

pub fn emit_model(m: &DgModel, source: &AInfCategory) -> DgModelBlock {
    let tq = &m.target.quiver;
    DgModelBlock {
        target: emit_category(&m.target, Some(&m.target_units)),
        components: emit_entries(&source.quiver, tq, &m.functor.f),
        v: emit_per_object(tq, &m.v),
    }
}

pub fn emit_double(r: &DoubleCoderivation, a: &AInfCategory) -> DoubleBlock {
    let q = &a.quiver;
    let mut keys: Vec<&(Word, usize)> = r.comps.keys().collect();
    keys.sort();
    DoubleBlock {
        degree: r.degree,
        components: keys
            .into_iter()
            .map(|(w, s)| DoubleEntry {
                path: w.path(q).into_iter().map(|x| q.object_name(x).to_string()).collect(),
                left: w.gens[..*s].iter().map(|&g| q.name(g).to_string()).collect(),
                right: w.gens[*s..].iter().map(|&g| q.name(g).to_string()).collect(),
                output: emit_terms(q, &r.comps[&(w.clone(), *s)]),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest(path: &str, bytes: &[u8]) -> InputDigest {
    let hash = Sha256::digest(bytes);
    InputDigest { path: path.to_string(), sha256: hash.iter().map(|b| format!("{b:02x}")).collect() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub format: u32,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: BTreeMap<String, String>,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub facts: BTreeMap<String, String>,
    pub error: Option<String>,
    /// The produced file when it was not written to `--output`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<serde_json::Value>,
    pub timing_ms: u64,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            format: REPORT_FORMAT,
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            passed: true,
            checks: Vec::new(),
            facts: BTreeMap::new(),
            error: None,
            artifact: None,
            timing_ms: 0,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}
