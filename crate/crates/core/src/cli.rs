//! The `ainf` command line: one subcommand per construction or checker,
//! each producing a [`Report`] and an exit code (0 pass, 1 mathematical
//! failure, 2 input error).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::category::{
    check_ainfty, check_functor, compose_functors, envelope_su, find_units, functors_agree, is_strictly_unital, solve_unit_homotopies, verify_unit_data, AInfCategory,
    AInfFunctor,
};
use crate::constructions::{
    check_unit_homotopies, check_unital_extension, homotopy_unital_from_unital, units_from_homotopy_unital, units_from_weak_unit, verify_iota_equivalence,
    weak_unit_from_unital, ConstructionError, DgModel,
};
use crate::correspondence::check_e;
use crate::dcoder::{b1, check_double_coderivation, double_agree, is_zero_double, nu, verify_xin_identities, xi};
use crate::dg::dg_import;
use crate::fixtures::{dg_random, ground_field, twist};
use crate::io::{
    digest, emit_double, emit_file, emit_functor, emit_model, parse_category, resolve_category, resolve_double, resolve_functor, resolve_model, CategoryFile,
    InputError, Report,
};
use crate::report::{Check, Witness};
use crate::scalar::Field;
use crate::tensor::Elem;

#[derive(Parser, Debug, Clone)]
#[command(name = "ainf", version, about = "Exact checks and constructions for truncated A-infinity categories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation N (defaults to the file's value, or 4 for generated data).
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// "rational" or "prime:p".
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Where to write the produced category file; otherwise it is embedded in the report.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for generated fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// A∞ equations, plus unit homotopies when the file declares units.
    Check { file: PathBuf },
    /// The functor equations of the file's `functor` block.
    CheckFunctor { file: PathBuf },
    /// The strictly unital envelope and its embedding.
    Envelope { file: PathBuf },
    /// Solve for unit homotopies, searching for units if none are declared.
    Unitality { file: PathBuf },
    /// A weak unit built from the declared units and DG model.
    WeakUnit { file: PathBuf },
    /// A homotopy unital structure built from the declared units and DG model.
    HomotopyUnital { file: PathBuf },
    /// Coderivation law and `B₁² = 0` for the file's double coderivation, and
    /// `hB₁ = ν` when it has degree −1.
    DoubleCoder { file: PathBuf },
    /// The ν/ξ lemma suite, on a strictly unital file or on built-in fixtures.
    VerifyLemmas { file: Option<PathBuf> },
    /// Emit a generated category file.
    Fixtures {
        #[arg(long, value_enum, default_value_t = FixtureKind::DgRandom)]
        kind: FixtureKind,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    DgRandom,
    Twist,
    Envelope,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::CheckFunctor { .. } => "check-functor",
            Command::Envelope { .. } => "envelope",
            Command::Unitality { .. } => "unitality",
            Command::WeakUnit { .. } => "weak-unit",
            Command::HomotopyUnital { .. } => "homotopy-unital",
            Command::DoubleCoder { .. } => "double-coder",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::Fixtures { .. } => "fixtures",
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
}

enum Failure {
    Input(String),
    Math(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Failure {
        Failure::Math(e.to_string())
    }
}

struct Loaded {
    file: CategoryFile,
    category: AInfCategory,
    units: Option<Vec<Elem>>,
}

pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let mut report = Report::new(cli.command.name());
    report.parameters.insert("seed".into(), cli.seed.to_string());
    if let Some(n) = cli.truncation {
        report.parameters.insert("truncation".into(), n.to_string());
    }
    if let Some(f) = &cli.field {
        report.parameters.insert("field".into(), f.clone());
    }
    let result = dispatch(cli, &mut report);
    let code = match result {
        Err(Failure::Input(msg)) => {
            report.passed = false;
            report.error = Some(msg);
            2
        }
        Err(Failure::Math(msg)) => {
            report.passed = false;
            report.error = Some(msg);
            1
        }
        Ok(()) if report.passed => 0,
        Ok(()) => 1,
    };
    report.timing_ms = start.elapsed().as_millis() as u64;
    Outcome { report, code }
}

fn load(path: &Path, cli: &Cli, report: &mut Report) -> Result<Loaded, Failure> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| InputError::Read { path: shown.clone(), msg: e.to_string() })?;
    report.inputs.push(digest(&shown, &bytes));
    let text = String::from_utf8(bytes).map_err(|e| InputError::Read { path: shown.clone(), msg: e.to_string() })?;
    let file = parse_category(&text)?;
    let resolved = resolve_category(&file.category, "")?;
    let mut category = resolved.category;
    if let Some(f) = &cli.field {
        let want = Field::parse(f).map_err(|e| Failure::Input(e.to_string()))?;
        if want != category.field {
            return Err(Failure::Input(format!("--field {} conflicts with the file's field {}", want.name(), category.field.name())));
        }
    }
    if let Some(n) = cli.truncation {
        if n == 0 {
            return Err(Failure::Input("--truncation must be at least 1".into()));
        }
        category.truncation = n;
    }
    Ok(Loaded { file, category, units: resolved.units })
}

fn field_flag(cli: &Cli) -> Result<Field, Failure> {
    match &cli.field {
        None => Ok(Field::Rational),
        Some(f) => Field::parse(f).map_err(|e| Failure::Input(e.to_string())),
    }
}

fn require_units(l: &Loaded) -> Result<Vec<Elem>, Failure> {
    l.units.clone().ok_or(Failure::Input(InputError::MissingBlock("units").to_string()))
}

fn require_model(l: &Loaded, units: &[Elem]) -> Result<DgModel, Failure> {
    let block = l.file.dg_model.as_ref().ok_or(Failure::Input(InputError::MissingBlock("dg_model").to_string()))?;
    let parts = resolve_model(block, &l.category)?;
    Ok(parts.into_model(&l.category, units)?)
}

fn unit_search_failure(name: &str, msg: &str) -> Check {
    Check::fail(name, 0, Witness { equation: name.into(), arity: 1, path: Vec::new(), word: String::new(), residual: msg.into() })
}

fn emit(cli: &Cli, report: &mut Report, file: &CategoryFile) -> Result<(), Failure> {
    let text = file.to_text();
    match &cli.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| InputError::Read { path: path.display().to_string(), msg: e.to_string() })?;
            report.facts.insert("artifact_sha256".into(), digest("", text.as_bytes()).sha256);
        }
        None => report.artifact = Some(serde_json::to_value(file).expect("plain data serializes")),
    }
    Ok(())
}

fn push_unit_data(report: &mut Report, a: &AInfCategory, units: &[Elem]) -> Result<(), Failure> {
    match solve_unit_homotopies(a, units) {
        Err(e) => report.push(unit_search_failure("unit-data", &e.to_string())),
        Ok(None) => report.push(unit_search_failure("unit-data", "no unit homotopy exists for the declared units")),
        Ok(Some(ud)) => report.push(verify_unit_data(a, &ud)),
    }
    Ok(())
}

/// The lemma suite on a strictly unital category.
pub fn lemma_checks(a: &AInfCategory, units: &[Elem]) -> Vec<Check> {
    let q = &a.quiver;
    let nu_a = nu(a);
    let xi_a = xi(a, units);
    let mut out = vec![
        is_strictly_unital(a, units),
        rename(check_double_coderivation(&nu_a, q, q), "nu-coderivation"),
        rename(is_zero_double(&b1(&nu_a, a, a), q, q), "nu-b1-zero"),
        rename(check_double_coderivation(&xi_a, q, q), "xi-coderivation"),
        rename(double_agree(&b1(&xi_a, a, a), &nu_a, q, q), "xi-b1-equals-nu"),
        verify_xin_identities(a, units, a.truncation.min(3)),
    ];
    if a.truncation <= 3 {
        out.push(check_e(a));
    }
    out
}

fn rename(mut c: Check, name: &str) -> Check {
    c.name = name.into();
    c
}

fn dispatch(cli: &Cli, report: &mut Report) -> Result<(), Failure> {
    match &cli.command {
        Command::Check { file } => {
            let l = load(file, cli, report)?;
            report.push(check_ainfty(&l.category));
            if let Some(units) = &l.units {
                report.facts.insert("strictly_unital".into(), is_strictly_unital(&l.category, units).passed.to_string());
                push_unit_data(report, &l.category, units)?;
            }
        }
        Command::CheckFunctor { file } => {
            let l = load(file, cli, report)?;
            let block = l.file.functor.as_ref().ok_or(Failure::Input(InputError::MissingBlock("functor").to_string()))?;
            let (f, target) = resolve_functor(block, &l.category)?;
            report.push(rename(check_ainfty(&l.category), "source-ainfty"));
            report.push(rename(check_ainfty(&target.category), "target-ainfty"));
            report.push(check_functor(&f, &l.category, &target.category));
        }
        Command::Envelope { file } => {
            let l = load(file, cli, report)?;
            let a = &l.category;
            let env = envelope_su(a);
            report.push(check_ainfty(&env.cat));
            report.push(is_strictly_unital(&env.cat, &env.units()));
            report.push(rename(check_functor(&env.embedding, a, &env.cat), "embedding"));
            emit(cli, report, &emit_file(&env.cat, Some(&env.units())))?;
        }
        Command::Unitality { file } => {
            let l = load(file, cli, report)?;
            let a = &l.category;
            let units = match &l.units {
                Some(u) => {
                    push_unit_data(report, a, u)?;
                    u.clone()
                }
                None => match find_units(a) {
                    Some(ud) => {
                        report.push(verify_unit_data(a, &ud));
                        ud.units
                    }
                    None => {
                        report.push(unit_search_failure("unit-search", "no unit found among the bounded candidates"));
                        return Ok(());
                    }
                },
            };
            report.facts.insert("strictly_unital".into(), is_strictly_unital(a, &units).passed.to_string());
            emit(cli, report, &emit_file(a, Some(&units)))?;
        }
        Command::WeakUnit { file } => {
            let l = load(file, cli, report)?;
            let a = &l.category;
            let units = require_units(&l)?;
            let model = require_model(&l, &units)?;
            let (u, uh) = weak_unit_from_unital(a, &units, &model)?;
            let env = envelope_su(a);
            report.push(check_unit_homotopies(&uh, a, &units, &model));
            report.push(check_functor(&u, &env.cat, a));
            report.push(rename(functors_agree(&compose_functors(&env.embedding, &u, a), &AInfFunctor::identity(a), a, &a.quiver), "eU-identity"));
            let ud = units_from_weak_unit(a, &u)?;
            report.push(verify_unit_data(a, &ud));
            report.facts.insert("units_preserved".into(), (ud.units == units).to_string());
            let mut out = emit_file(&env.cat, Some(&env.units()));
            out.functor = Some(emit_functor(&u, &env.cat, a, Some(&units)));
            emit(cli, report, &out)?;
        }
        Command::HomotopyUnital { file } => {
            let l = load(file, cli, report)?;
            let a = &l.category;
            let units = require_units(&l)?;
            let model = require_model(&l, &units)?;
            let ud = match solve_unit_homotopies(a, &units) {
                Ok(Some(ud)) => ud,
                Ok(None) => return Err(Failure::Math("no unit homotopy exists for the declared units".into())),
                Err(e) => return Err(Failure::Math(e.to_string())),
            };
            let ext = homotopy_unital_from_unital(a, &ud, &model)?;
            report.push(check_unital_extension(&ext, &model));
            report.push(verify_iota_equivalence(&ext.source, &units));
            let back = units_from_homotopy_unital(&ext.source)?;
            report.push(verify_unit_data(a, &back));
            let mut out = emit_file(&ext.source.plus, Some(&ext.source.units()));
            out.functor = Some(emit_functor(&ext.functor, &ext.source.plus, &ext.target.plus, Some(&ext.target.units())));
            emit(cli, report, &out)?;
        }
        Command::DoubleCoder { file } => {
            let l = load(file, cli, report)?;
            let a = &l.category;
            let block = l.file.double_coderivation.as_ref().ok_or(Failure::Input(InputError::MissingBlock("double_coderivation").to_string()))?;
            let r = resolve_double(block, a)?;
            let q = &a.quiver;
            report.push(check_double_coderivation(&r, q, q));
            let once = b1(&r, a, a);
            report.push(rename(is_zero_double(&b1(&once, a, a), q, q), "b1-squared"));
            if r.degree == -1 {
                report.push(rename(double_agree(&once, &nu(a), q, q), "b1-equals-nu"));
            }
            let mut out = emit_file(a, l.units.as_deref());
            out.double_coderivation = Some(emit_double(&once, a));
            emit(cli, report, &out)?;
        }
        Command::VerifyLemmas { file } => match file {
            Some(file) => {
                let l = load(file, cli, report)?;
                let units = require_units(&l)?;
                for c in lemma_checks(&l.category, &units) {
                    report.push(c);
                }
            }
            None => {
                let field = field_flag(cli)?;
                let n = cli.truncation.unwrap_or(3);
                let (k, ku) = ground_field(field, n);
                for c in lemma_checks(&k, &ku) {
                    report.push(rename(c.clone(), &format!("ground/{}", c.name)));
                }
                for seed in cli.seed..cli.seed + 3 {
                    let (a, u) = dg_import(&dg_random(seed, field), n).map_err(|e| Failure::Math(e.to_string()))?;
                    for c in lemma_checks(&a, &u) {
                        report.push(rename(c.clone(), &format!("dg-random-{seed}/{}", c.name)));
                    }
                }
            }
        },
        Command::Fixtures { kind } => {
            let field = field_flag(cli)?;
            let n = cli.truncation.unwrap_or(4);
            if n == 0 {
                return Err(Failure::Input("--truncation must be at least 1".into()));
            }
            report.parameters.insert("kind".into(), format!("{kind:?}"));
            let out = match kind {
                FixtureKind::DgRandom => {
                    let (a, u) = dg_import(&dg_random(cli.seed, field), n).map_err(|e| Failure::Math(e.to_string()))?;
                    report.push(check_ainfty(&a));
                    report.push(is_strictly_unital(&a, &u));
                    emit_file(&a, Some(&u))
                }
                FixtureKind::Twist => {
                    let t = twist(cli.seed, n, field);
                    report.push(check_ainfty(&t.cat));
                    let model = DgModel::from_twist(&t)?;
                    report.facts.insert("strictly_unital".into(), is_strictly_unital(&t.cat, &t.units).passed.to_string());
                    let mut out = emit_file(&t.cat, Some(&t.units));
                    out.dg_model = Some(emit_model(&model, &t.cat));
                    out
                }
                FixtureKind::Envelope => {
                    let t = twist(cli.seed, n, field);
                    let env = envelope_su(&t.cat);
                    report.push(check_ainfty(&env.cat));
                    report.push(is_strictly_unital(&env.cat, &env.units()));
                    emit_file(&env.cat, Some(&env.units()))
                }
            };
            emit(cli, report, &out)?;
        }
    }
    Ok(())
}
