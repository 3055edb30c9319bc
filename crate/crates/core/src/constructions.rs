//! Passing between weak units, unit homotopies and homotopy unital
//! structures, and the two inductive constructions that start from a
//! strictly unital DG model.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::category::{
    add_strict_unit_rules, check_ainfty, check_functor, components_on, compose_functors, envelope_su, fresh_name, from_local, functors_agree, is_strictly_unital, local_row,
    verify_unit_data, word_witness, AInfCategory, AInfFunctor, CategoryError, UnitData,
};
use crate::correspondence::{family_to_functor, functor_to_family, phi1_double, phi1_table, CorrespondenceError, PhiFamily};
use crate::dcoder::{b1, b1_component, check_double_coderivation, display_pair, double_agree, multiwords, nu, pairs, post_component, pre_compose, xi, DoubleCoderivation, DoubleMap};
use crate::fixtures::Twist;
use crate::linalg::{is_quasi_iso, solve_cone, ConeProblem, GradedMap, LinalgError, SparseRow};
use crate::quiver::{GenId, ObjId, Quiver};
use crate::report::{Check, Tally, Witness};
use crate::scalar::Scalar;
use crate::tensor::{display_elem, odd, words_of_len, Chain, Elem, Family, Word};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("not a weak unit: {0}")]
    NotWeakUnit(String),
    #[error("not homotopy unital: {0}")]
    NotHomotopyUnital(String),
    #[error("cycle check failed at {stage}: {detail}")]
    CycleCheck { stage: String, detail: String },
    #[error("cone unsolvable at {stage}: {detail}")]
    ConeUnsolvable { stage: String, detail: String },
    #[error("{stage}: value on {word} leaves the base category")]
    OutsideBase { stage: String, word: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
}

fn describe(c: &Check) -> String {
    match &c.witness {
        Some(w) => format!("{}: {} fails at {} (residual {})", c.name, w.equation, w.word, w.residual),
        None => format!("{}: passed", c.name),
    }
}

fn require(c: Check, err: impl FnOnce(String) -> ConstructionError) -> Result<(), ConstructionError> {
    if c.passed {
        Ok(())
    } else {
        Err(err(describe(&c)))
    }
}

fn identity_objects(n: usize) -> Vec<ObjId> {
    (0..n as ObjId).collect()
}

/// A strictly unital DG model `φ: A → D` of a unital category: `D` has no
/// `b_n` for `n ≥ 3`, `φ` is the identity on objects, `φ₁` is a
/// quasi-isomorphism and `units·φ₁ = target_units + v·b₁`.
#[derive(Clone, Debug)]
pub struct DgModel {
    pub target: AInfCategory,
    pub target_units: Vec<Elem>,
    pub functor: AInfFunctor,
    pub v: Vec<Elem>,
}

impl DgModel {
    pub fn new(
        source: &AInfCategory,
        source_units: &[Elem],
        target: AInfCategory,
        target_units: Vec<Elem>,
        functor: AInfFunctor,
        v: Vec<Elem>,
    ) -> Result<DgModel, ConstructionError> {
        let m = DgModel { target, target_units, functor, v };
        m.validate(source, source_units)?;
        Ok(m)
    }

    /// A strictly unital DG category modelled by itself.
    pub fn trivial(a: &AInfCategory, units: &[Elem]) -> Result<DgModel, ConstructionError> {
        let n = a.quiver.num_objects();
        DgModel::new(a, units, a.clone(), units.to_vec(), AInfFunctor::identity(a), vec![Elem::new(); n])
    }

    pub fn from_twist(t: &Twist) -> Result<DgModel, ConstructionError> {
        DgModel::new(&t.cat, &t.units, t.base.clone(), t.base_units.clone(), t.functor.clone(), t.v.clone())
    }

    pub fn validate(&self, source: &AInfCategory, source_units: &[Elem]) -> Result<(), ConstructionError> {
        let bad = ConstructionError::InvalidModel;
        let n = source.quiver.num_objects();
        if self.functor.obj_map != identity_objects(n) || self.target.quiver.num_objects() != n {
            return Err(bad("the functor is not the identity on objects".into()));
        }
        if self.target_units.len() != n || self.v.len() != n || source_units.len() != n {
            return Err(bad("one unit and one witness per object expected".into()));
        }
        if let Some(k) = self.target.b.map.keys().find(|k| k.len() >= 3) {
            return Err(bad(format!("target has a nonzero b_{}", k.len())));
        }
        require(is_strictly_unital(&self.target, &self.target_units), bad)?;
        require(check_functor(&self.functor, source, &self.target), bad)?;
        let (sq, tq) = (&source.quiver, &self.target.quiver);
        for x in 0..n as ObjId {
            for y in 0..n as ObjId {
                let tgens = tq.hom(x, y);
                let mut rows = Vec::new();
                for &g in sq.hom(x, y) {
                    let e = self.functor.f.value(&[g]);
                    if e.iter().any(|(h, _)| !tgens.contains(h)) {
                        return Err(bad(format!("first component leaves hom({}, {})", sq.object_name(x), sq.object_name(y))));
                    }
                    rows.push(local_row(tgens, &e));
                }
                let m = GradedMap::new(sq.hom_space(x, y), tq.hom_space(x, y), 0, rows).map_err(|e| bad(e.to_string()))?;
                let qi = is_quasi_iso(&m, &source.hom_complex(x, y), &self.target.hom_complex(x, y)).map_err(|e| bad(e.to_string()))?;
                if !qi {
                    return Err(bad(format!("first component is not a quasi-isomorphism on hom({}, {})", sq.object_name(x), sq.object_name(y))));
                }
            }
        }
        for x in 0..n {
            let r = self.functor.apply1(&source_units[x]).sub(&self.target_units[x]).sub(&self.target.b1(&self.v[x]));
            if !r.is_zero() {
                return Err(bad(format!("unit of '{}' is not preserved up to v: residual {}", sq.object_name(x as ObjId), display_elem(tq, &r))));
            }
        }
        Ok(())
    }
}

/// `C⁺ ⊃ C`: per object a strict unit `i^su` of degree −1 and `j` of degree
/// −2 with `j·b₁ = i^su - i₀`. Generators of `C` come first in `plus`.
#[derive(Clone, Debug)]
pub struct HomotopyUnitalStructure {
    pub base: AInfCategory,
    pub plus: AInfCategory,
    pub unit_gens: Vec<GenId>,
    pub j_gens: Vec<GenId>,
}

impl HomotopyUnitalStructure {
    pub fn units(&self) -> Vec<Elem> {
        self.unit_gens.iter().map(|&g| Elem::term(g, Scalar::one())).collect()
    }

    pub fn is_base(&self, g: GenId) -> bool {
        (g as usize) < self.base.quiver.num_gens()
    }

    /// `i₀ = i^su - j·b₁`.
    pub fn base_units(&self) -> Vec<Elem> {
        self.unit_gens
            .iter()
            .zip(&self.j_gens)
            .map(|(&u, &j)| Elem::term(u, Scalar::one()).sub(&self.plus.b.value(&[j])))
            .collect()
    }

    pub fn embedding(&self) -> AInfFunctor {
        let mut f = AInfFunctor::identity(&self.base);
        f.truncation = self.plus.truncation;
        f
    }

    fn j_count(&self, w: &Word) -> usize {
        w.gens.iter().filter(|g| self.j_gens.contains(g)).count()
    }

    fn has_unit(&self, w: &Word) -> bool {
        w.gens.iter().any(|g| self.unit_gens.contains(g))
    }
}

fn extend_quiver(q: &Quiver) -> (Quiver, Vec<GenId>, Vec<GenId>) {
    let mut p = q.clone();
    let mut units = Vec::new();
    let mut js = Vec::new();
    for x in 0..q.num_objects() as ObjId {
        let name = fresh_name(&p, format!("i0su[{}]", q.object_name(x)));
        units.push(p.add_gen(name, x, x, -1).expect("fresh name"));
    }
    for x in 0..q.num_objects() as ObjId {
        let name = fresh_name(&p, format!("j[{}]", q.object_name(x)));
        js.push(p.add_gen(name, x, x, -2).expect("fresh name"));
    }
    (p, units, js)
}

/// `C⁺` with only `b` of `C`, the strict unit rules and `j·b₁`.
fn plus_skeleton(base: &AInfCategory, base_units: &[Elem]) -> HomotopyUnitalStructure {
    let (q, unit_gens, j_gens) = extend_quiver(&base.quiver);
    let mut b = base.b.clone();
    for &u in &unit_gens {
        add_strict_unit_rules(&q, &mut b, u);
    }
    for (x, &j) in j_gens.iter().enumerate() {
        b.set(&[j], Elem::term(unit_gens[x], Scalar::one()).sub(&base_units[x]));
    }
    let plus = AInfCategory { quiver: q, field: base.field, truncation: base.truncation, b };
    HomotopyUnitalStructure { base: base.clone(), plus, unit_gens, j_gens }
}

/// The structure on a strictly unital `D`: `b⁺` vanishes on every word with
/// a `j` except `j·b₁` and the unit rules.
pub fn canonical_hu(d: &AInfCategory, units: &[Elem]) -> Result<HomotopyUnitalStructure, ConstructionError> {
    require(is_strictly_unital(d, units), |s| CategoryError::NotStrictlyUnital(s).into())?;
    Ok(plus_skeleton(d, units))
}

/// The defining conditions of a homotopy unital structure: `C` sits inside
/// `C⁺` with the same `b`, `i₀` lies in `C`, `C⁺` is a strictly unital A∞
/// category, and `b⁺` sends words over `C` and the `j`'s with at least one
/// `j` into `C`.
pub fn check_fukaya(hu: &HomotopyUnitalStructure) -> Check {
    let (base, plus) = (&hu.base, &hu.plus);
    let (bq, pq) = (&base.quiver, &plus.quiver);
    let mut t = Tally::new();
    for w in base.words() {
        let r = plus.b.value(&w.gens).sub(&base.b.value(&w.gens));
        t.record(r.is_zero(), || word_witness(bq, pq, "fukaya-subcategory", &w, &r));
    }
    for (x, i0) in hu.base_units().iter().enumerate() {
        let outside: Elem = i0.iter().filter(|(g, _)| !hu.is_base(**g)).map(|(g, c)| (*g, c.clone())).collect();
        t.record(outside.is_zero(), || Witness {
            equation: "fukaya-unit-in-base".into(),
            arity: 1,
            path: vec![pq.object_name(x as ObjId).to_string(); 2],
            word: pq.name(hu.j_gens[x]).to_string(),
            residual: display_elem(pq, &outside),
        });
    }
    for w in plus.words() {
        if hu.j_count(&w) == 0 || hu.has_unit(&w) || w.len() < 2 {
            continue;
        }
        let outside: Elem = plus.b.value(&w.gens).iter().filter(|(g, _)| !hu.is_base(**g)).map(|(g, c)| (*g, c.clone())).collect();
        t.record(outside.is_zero(), || word_witness(pq, pq, "fukaya-j-words", &w, &outside));
        if t.failed() {
            break;
        }
    }
    Check::all("fukaya", [t.finish("fukaya-structure"), is_strictly_unital(plus, &hu.units()), check_ainfty(plus)])
}

/// `ι: C → C⁺` is a homotopy equivalence of `b₁`-complexes: with the
/// projection `π` (`i^su ↦ i₀` for the given units of `C`, `j ↦ 0`) and `h` (`i^su ↦ j`), `π` is a
/// chain map, `ιπ = 1` on `C` and `1 - πι = hb₁ + b₁h` on `C⁺`.
pub fn verify_iota_equivalence(hu: &HomotopyUnitalStructure, base_units: &[Elem]) -> Check {
    let pq = &hu.plus.quiver;
    let i0 = base_units;
    let project = |e: &Elem| -> Elem {
        let mut out = Elem::new();
        for (g, c) in e.iter() {
            if hu.is_base(*g) {
                out.add_term(*g, c.clone());
            } else if let Some(x) = hu.unit_gens.iter().position(|u| u == g) {
                out.add_lin(&i0[x], c);
            }
        }
        out
    };
    let homotopy = |e: &Elem| -> Elem {
        let mut out = Elem::new();
        for (g, c) in e.iter() {
            if let Some(x) = hu.unit_gens.iter().position(|u| u == g) {
                out.add_term(hu.j_gens[x], c.clone());
            }
        }
        out
    };
    let mut t = Tally::new();
    for g in 0..pq.num_gens() as GenId {
        let id = Elem::term(g, Scalar::one());
        let w = Word::of(pq, &[g]);
        let r = project(&hu.plus.b1(&id)).sub(&hu.base.b1(&project(&id)));
        t.record(r.is_zero(), || word_witness(pq, pq, "projection-chain-map", &w, &r));
        let mut r = id.sub(&project(&id));
        r = r.sub(&hu.plus.b1(&homotopy(&id))).sub(&homotopy(&hu.plus.b1(&id)));
        t.record(r.is_zero(), || word_witness(pq, pq, "iota-homotopy", &w, &r));
    }
    t.finish("iota-equivalence")
}

/// Units and homotopies of `C` read off from `C⁺`:
/// `i₀ = i^su - j·b₁`, `h(x) = b⁺₂(x, j)`, `h'(x) = -b⁺₂(j, x)`.
pub fn units_from_homotopy_unital(hu: &HomotopyUnitalStructure) -> Result<UnitData, ConstructionError> {
    require(check_fukaya(hu), ConstructionError::NotHomotopyUnital)?;
    let bq = &hu.base.quiver;
    let mut right = Family::new(-1);
    let mut left = Family::new(-1);
    for x in 0..bq.num_gens() as GenId {
        right.set(&[x], hu.plus.b.value(&[x, hu.j_gens[bq.tgt(x) as usize]]));
        left.set(&[x], hu.plus.b.value(&[hu.j_gens[bq.src(x) as usize], x]).scaled(&Scalar::int(-1)));
    }
    let ud = UnitData { units: hu.base_units(), right, left };
    require(verify_unit_data(&hu.base, &ud), ConstructionError::Verification)?;
    Ok(ud)
}

/// Both `C⁺` and `D⁺` with a strictly unital `φ⁺: C⁺ → D⁺` extending the
/// model functor.
#[derive(Clone, Debug)]
pub struct UnitalExtension {
    pub source: HomotopyUnitalStructure,
    pub target: HomotopyUnitalStructure,
    pub functor: AInfFunctor,
}

/// Build `C⁺`, `D⁺ = canonical_hu(D)` and `φ⁺`, solving one cone problem per
/// arity `n`, number of `j`'s `k` and pair of end objects.
pub fn homotopy_unital_from_unital(c: &AInfCategory, unit_data: &UnitData, model: &DgModel) -> Result<UnitalExtension, ConstructionError> {
    require(verify_unit_data(c, unit_data), ConstructionError::InvalidModel)?;
    model.validate(c, &unit_data.units)?;
    let mut cp = plus_skeleton(c, &unit_data.units);
    let dp = canonical_hu(&model.target, &model.target_units)?;

    let mut f = model.functor.f.clone();
    for x in 0..c.quiver.num_objects() {
        f.set(&[cp.unit_gens[x]], Elem::term(dp.unit_gens[x], Scalar::one()));
        // units·φ₁ = units_D + v·b₁ gives j ↦ j_D - v
        f.set(&[cp.j_gens[x]], Elem::term(dp.j_gens[x], Scalar::one()).sub(&model.v[x]));
    }
    let mut phi = AInfFunctor { obj_map: model.functor.obj_map.clone(), f, truncation: c.truncation };

    let pq = cp.plus.quiver.clone();
    for n in 2..=c.truncation {
        let words = words_of_len(&pq, n);
        check_theorem_residuals(&cp, &dp, &phi, words.iter().filter(|w| cp.j_count(w) == 0), n, 0)?;
        for k in 1..=n {
            let mut buckets: BTreeMap<(ObjId, ObjId), Vec<Word>> = BTreeMap::new();
            for w in words.iter().filter(|w| cp.j_count(w) == k && !cp.has_unit(w)) {
                buckets.entry((w.start, w.end(&pq))).or_default().push(w.clone());
            }
            for ((x, y), ws) in &buckets {
                solve_theorem_bucket(c, model, &mut cp, &dp, &mut phi, *x, *y, ws, n, k)?;
            }
            check_theorem_residuals(&cp, &dp, &phi, words.iter().filter(|w| cp.j_count(w) == k), n, k)?;
        }
    }
    let ext = UnitalExtension { source: cp, target: dp, functor: phi };
    require(check_unital_extension(&ext, model), ConstructionError::Verification)?;
    Ok(ext)
}

/// `λ` and `ν` residuals of the A∞ and functor equations on one word.
fn theorem_residuals(cp: &HomotopyUnitalStructure, dp: &HomotopyUnitalStructure, phi: &AInfFunctor, w: &Word) -> (Elem, Elem) {
    let bw = cp.plus.b_full(w);
    let lambda = components_on(&cp.plus.b, &bw);
    let lhs = components_on(&dp.plus.b, &phi.full(&cp.plus.quiver, w));
    let nu = lhs.sub(&components_on(&phi.f, &bw));
    (lambda, nu)
}

fn check_theorem_residuals<'a>(
    cp: &HomotopyUnitalStructure,
    dp: &HomotopyUnitalStructure,
    phi: &AInfFunctor,
    words: impl Iterator<Item = &'a Word>,
    n: usize,
    k: usize,
) -> Result<(), ConstructionError> {
    let pq = &cp.plus.quiver;
    for w in words {
        let (lambda, nu) = theorem_residuals(cp, dp, phi, w);
        if !lambda.is_zero() || !nu.is_zero() {
            return Err(ConstructionError::CycleCheck {
                stage: format!("arity {n} with {k} j's"),
                detail: format!("equations do not hold on {}", w.display(pq)),
            });
        }
    }
    Ok(())
}

fn outside(e: &Elem, limit: usize) -> bool {
    e.iter().any(|(g, _)| *g as usize >= limit)
}

/// Rows of `Σ (1⊗b₁⊗1)` restricted to the generators accepted by `keep`,
/// in the basis `words`.
fn word_differential(q: &Quiver, b: &Family, words: &[Word], keep: impl Fn(GenId) -> bool) -> Vec<SparseRow> {
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    words
        .iter()
        .map(|w| {
            let mut row: crate::lin::Lin<usize> = crate::lin::Lin::new();
            for p in 0..w.len() {
                if !keep(w.gens[p]) {
                    continue;
                }
                let sign = Scalar::sign(odd(w.prefix_degree(q, p)));
                for (g, c) in b.value(&[w.gens[p]]).iter() {
                    let mut gens = w.gens.clone();
                    gens[p] = *g;
                    let i = index[&Word::new(w.start, &gens)];
                    row.add_term(i, &sign * c);
                }
            }
            row.into_vec()
        })
        .collect()
}

fn cone_error(e: LinalgError, stage: String, detail: String) -> ConstructionError {
    match e {
        LinalgError::NotACycle => ConstructionError::CycleCheck { stage, detail },
        LinalgError::Unsolvable => ConstructionError::ConeUnsolvable { stage, detail },
        other => ConstructionError::InvalidModel(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_theorem_bucket(
    c: &AInfCategory,
    model: &DgModel,
    cp: &mut HomotopyUnitalStructure,
    dp: &HomotopyUnitalStructure,
    phi: &mut AInfFunctor,
    x: ObjId,
    y: ObjId,
    words: &[Word],
    n: usize,
    k: usize,
) -> Result<(), ConstructionError> {
    let pq = cp.plus.quiver.clone();
    let stage = format!("arity {n} with {k} j's");
    let detail = format!("hom({}, {})", pq.object_name(x), pq.object_name(y));
    let (sgens, tgens) = (c.quiver.hom(x, y), model.target.quiver.hom(x, y));
    let (nc, nd) = (c.quiver.num_gens(), model.target.quiver.num_gens());
    let mut lambda = Vec::new();
    let mut nu = Vec::new();
    for w in words {
        let (l, r) = theorem_residuals(cp, dp, phi, w);
        if outside(&l, nc) {
            return Err(ConstructionError::OutsideBase { stage: format!("{stage}, A∞ residual"), word: w.display(&pq) });
        }
        if outside(&r, nd) {
            return Err(ConstructionError::OutsideBase { stage: format!("{stage}, functor residual"), word: w.display(&pq) });
        }
        lambda.push(local_row(sgens, &l));
        nu.push(local_row(tgens, &r.scaled(&Scalar::int(-1))));
    }
    let source = c.hom_complex(x, y);
    let target = model.target.hom_complex(x, y);
    let u_rows = sgens.iter().map(|&g| local_row(tgens, &phi.f.value(&[g]).scaled(&Scalar::int(-1)))).collect();
    let u = GradedMap::new(source.space.clone(), target.space.clone(), 0, u_rows).map_err(|e| ConstructionError::InvalidModel(e.to_string()))?;
    let problem = ConeProblem {
        word_degrees: words.iter().map(|w| w.degree(&pq)).collect(),
        word_d: word_differential(&pq, &cp.plus.b, words, |g| (g as usize) < nc),
        source,
        target,
        u,
        degree: 1,
        lambda,
        nu,
    };
    let (xs, ys) = solve_cone(&problem).map_err(|e| cone_error(e, stage, detail))?;
    for (i, w) in words.iter().enumerate() {
        cp.plus.b.set(&w.gens, from_local(sgens, &xs[i]));
        phi.f.set(&w.gens, from_local(tgens, &ys[i]));
    }
    Ok(())
}

/// Everything claimed of an extension: both sides homotopy unital, `φ⁺` an
/// A∞-functor, strictly unital, with `φ⁺₁(j) - j_D` and all higher values
/// on words over `C` and the `j`'s in `D`, and `ιφ⁺ = φι`.
pub fn check_unital_extension(ext: &UnitalExtension, model: &DgModel) -> Check {
    let (cp, dp, phi) = (&ext.source, &ext.target, &ext.functor);
    let (pq, dq) = (&cp.plus.quiver, &dp.plus.quiver);
    let nd = dp.base.quiver.num_gens();
    let mut t = Tally::new();
    for x in 0..cp.unit_gens.len() {
        let w = Word::of(pq, &[cp.unit_gens[x]]);
        let r = phi.f.value(&[cp.unit_gens[x]]).sub(&Elem::term(dp.unit_gens[x], Scalar::one()));
        t.record(r.is_zero(), || word_witness(pq, dq, "extension-unit", &w, &r));
        let w = Word::of(pq, &[cp.j_gens[x]]);
        let r: Elem = phi.f.value(&[cp.j_gens[x]]).sub(&Elem::term(dp.j_gens[x], Scalar::one()));
        let r: Elem = r.iter().filter(|(g, _)| **g as usize >= nd).map(|(g, c)| (*g, c.clone())).collect();
        t.record(r.is_zero(), || word_witness(pq, dq, "extension-j", &w, &r));
    }
    for w in cp.plus.words().filter(|w| w.len() >= 2) {
        let v = phi.f.value(&w.gens);
        if cp.has_unit(&w) {
            t.record(v.is_zero(), || word_witness(pq, dq, "extension-strict", &w, &v));
        } else {
            let r: Elem = v.iter().filter(|(g, _)| **g as usize >= nd).map(|(g, c)| (*g, c.clone())).collect();
            t.record(r.is_zero(), || word_witness(pq, dq, "extension-values", &w, &r));
        }
        if t.failed() {
            break;
        }
    }
    let via_plus = compose_functors(&cp.embedding(), phi, &cp.base);
    let via_model = compose_functors(&model.functor, &dp.embedding(), &cp.base);
    Check::all(
        "unital-extension",
        [
            t.finish("extension-shape"),
            check_fukaya(cp),
            check_fukaya(dp),
            check_functor(phi, &cp.plus, &dp.plus),
            functors_agree(&via_plus, &via_model, &cp.base, dq),
        ],
    )
}

/// Homotopies `h` with `hB₁ = ν`, `h_{0,0} = i₀`, and `k` with
/// `kB₁ + (φ⊗φ)ξ = hφ`, `k_{0,0} = v`.
#[derive(Clone, Debug)]
pub struct UnitHomotopies {
    pub h: DoubleCoderivation,
    pub k: DoubleCoderivation,
}

/// Solve for `h` and `k` pair by pair, one cone problem per total length,
/// split and pair of end objects.
pub fn solve_h(a: &AInfCategory, units: &[Elem], model: &DgModel) -> Result<UnitHomotopies, ConstructionError> {
    model.validate(a, units)?;
    let q = &a.quiver;
    let d = &model.target;
    let f = &model.functor;
    let trunc = a.truncation.saturating_sub(1);
    let id = AInfFunctor::identity(a);
    let mut h = DoubleCoderivation::new(id.clone(), id, -1, trunc);
    let mut k = DoubleCoderivation::new(f.clone(), f.clone(), -2, trunc);
    for x in 0..q.num_objects() {
        h.set(&Word::empty(x as ObjId), 0, units[x].clone());
        k.set(&Word::empty(x as ObjId), 0, model.v[x].clone());
    }
    let iota = pre_compose(f, &xi(d, &model.target_units), a);
    let nu_a = nu(a);
    for len in 1..=trunc {
        let words = words_of_len(q, len);
        for split in 0..=len {
            let mut buckets: BTreeMap<(ObjId, ObjId), Vec<Word>> = BTreeMap::new();
            for w in &words {
                buckets.entry((w.start, w.end(q))).or_default().push(w.clone());
            }
            for ((x, y), ws) in &buckets {
                let stage = format!("length {len}, split {split}");
                let detail = format!("hom({}, {})", q.object_name(*x), q.object_name(*y));
                let (sgens, tgens) = (q.hom(*x, *y), d.quiver.hom(*x, *y));
                let mut lambda = Vec::new();
                let mut kappa = Vec::new();
                for w in ws {
                    let l = b1_component(&h, a, a, w, split).sub(&nu_a.component(w, split));
                    let mut r = b1_component(&k, a, d, w, split);
                    r.add_lin(&iota.component(w, split), &Scalar::one());
                    let r = r.sub(&post_component(&h, f, q, w, split));
                    lambda.push(local_row(sgens, &l));
                    kappa.push(local_row(tgens, &r));
                }
                let source = a.hom_complex(*x, *y);
                let target = d.hom_complex(*x, *y);
                let u_rows = sgens.iter().map(|&g| local_row(tgens, &f.f.value(&[g]))).collect();
                let u = GradedMap::new(source.space.clone(), target.space.clone(), 0, u_rows).map_err(|e| ConstructionError::InvalidModel(e.to_string()))?;
                let problem = ConeProblem {
                    word_degrees: ws.iter().map(|w| w.degree(q)).collect(),
                    word_d: word_differential(q, &a.b, ws, |_| true),
                    source,
                    target,
                    u,
                    degree: -1,
                    lambda,
                    nu: kappa,
                };
                let (xs, ys) = solve_cone(&problem).map_err(|e| cone_error(e, stage, detail))?;
                for (i, w) in ws.iter().enumerate() {
                    h.set(w, split, from_local(sgens, &xs[i]));
                    k.set(w, split, from_local(tgens, &ys[i]).scaled(&Scalar::int(-1)));
                }
            }
        }
    }
    let out = UnitHomotopies { h, k };
    require(check_unit_homotopies(&out, a, units, model), ConstructionError::Verification)?;
    Ok(out)
}

/// `hB₁ = ν`, `kB₁ + (φ⊗φ)ξ - hφ = 0` and both seeds.
pub fn check_unit_homotopies(uh: &UnitHomotopies, a: &AInfCategory, units: &[Elem], model: &DgModel) -> Check {
    let q = &a.quiver;
    let (d, f) = (&model.target, &model.functor);
    let iota = pre_compose(f, &xi(d, &model.target_units), a);
    let nu_a = nu(a);
    let mut t = Tally::new();
    for x in 0..q.num_objects() {
        let w = Word::empty(x as ObjId);
        let r = uh.h.component(&w, 0).sub(&units[x]);
        t.record(r.is_zero(), || pair_witness(q, q, "h-seed", &w, 0, &r));
        let r = uh.k.component(&w, 0).sub(&model.v[x]);
        t.record(r.is_zero(), || pair_witness(q, &d.quiver, "k-seed", &w, 0, &r));
    }
    for (w, split) in pairs(q, uh.h.truncation.min(uh.k.truncation)) {
        let r = b1_component(&uh.h, a, a, &w, split).sub(&nu_a.component(&w, split));
        t.record(r.is_zero(), || pair_witness(q, q, "h-equation", &w, split, &r));
        let mut r = b1_component(&uh.k, a, d, &w, split);
        r.add_lin(&iota.component(&w, split), &Scalar::one());
        let r = r.sub(&post_component(&uh.h, f, q, &w, split));
        t.record(r.is_zero(), || pair_witness(q, &d.quiver, "k-equation", &w, split, &r));
        if t.failed() {
            break;
        }
    }
    t.finish("unit-homotopies")
}

fn pair_witness(q: &Quiver, out: &Quiver, equation: &str, w: &Word, split: usize, residual: &Elem) -> Witness {
    Witness {
        equation: equation.to_string(),
        arity: w.len(),
        path: w.path(q).into_iter().map(|x| q.object_name(x).to_string()).collect(),
        word: display_pair(q, w, split),
        residual: display_elem(out, residual),
    }
}

fn require_weak_unit(a: &AInfCategory, u: &AInfFunctor) -> Result<(), ConstructionError> {
    let env = envelope_su(a);
    require(check_functor(u, &env.cat, a), ConstructionError::NotWeakUnit)?;
    let eu = compose_functors(&env.embedding, u, a);
    require(functors_agree(&eu, &AInfFunctor::identity(a), a, &a.quiver), ConstructionError::NotWeakUnit)
}

/// Units and homotopies of a weak unit `U: A^su → A`:
/// `i₀ = U₁(i^su)`, `h(x) = -(-1)^{|x|} U₂(x, i^su)`, `h'(x) = U₂(i^su, x)`.
pub fn units_from_weak_unit(a: &AInfCategory, u: &AInfFunctor) -> Result<UnitData, ConstructionError> {
    require_weak_unit(a, u)?;
    let env = envelope_su(a);
    let q = &a.quiver;
    let units: Vec<Elem> = env.unit_gens.iter().map(|&g| u.f.value(&[g])).collect();
    let mut right = Family::new(-1);
    let mut left = Family::new(-1);
    for x in 0..q.num_gens() as GenId {
        let s = -&Scalar::sign(odd(q.degree(x)));
        right.set(&[x], u.f.value(&[x, env.unit_gens[q.tgt(x) as usize]]).scaled(&s));
        left.set(&[x], u.f.value(&[env.unit_gens[q.src(x) as usize], x]));
    }
    let ud = UnitData { units, right, left };
    require(verify_unit_data(a, &ud), ConstructionError::Verification)?;
    Ok(ud)
}

/// `h = φ₁` of the family of a weak unit, checked to be a double coderivation
/// with `hB₁ = ν`.
pub fn h_from_weak_unit(a: &AInfCategory, u: &AInfFunctor) -> Result<DoubleCoderivation, ConstructionError> {
    require_weak_unit(a, u)?;
    let fam = functor_to_family(u, a);
    require(check_double_coderivation(&phi1_table(&fam, a), &a.quiver, &a.quiver), ConstructionError::Verification)?;
    let h = phi1_double(&fam, a);
    require(double_agree(&b1(&h, a, a), &nu(a), &a.quiver, &a.quiver), ConstructionError::Verification)?;
    Ok(h)
}

/// The weak unit with `φ₁ = h` and `φ_n = (φ_{n-1}⊗1)h`.
pub fn weak_unit_from_h(a: &AInfCategory, h: &DoubleCoderivation) -> Result<AInfFunctor, ConstructionError> {
    let q = &a.quiver;
    require(double_agree(&b1(h, a, a), &nu(a), q, q), ConstructionError::NotWeakUnit)?;
    let n_max = a.truncation;
    if h.truncation + 1 < n_max {
        return Err(ConstructionError::NotWeakUnit(format!("homotopy known to length {} only", h.truncation)));
    }
    let mut fam = PhiFamily { base: AInfFunctor::identity(a), truncation: n_max, higher: HashMap::new() };
    for n in 1..=n_max {
        for mw in multiwords(q, n, n_max - n) {
            let prev = if n == 1 { Chain::term(mw[0].clone(), Scalar::one()) } else { fam.value(q, &mw[..n]) };
            let mut v = Chain::new();
            for (p, c) in prev.iter() {
                let joined = if p.is_empty() { mw[n].clone() } else { p.concat(&mw[n]) };
                v.add_lin(&h.full(q, &joined, p.len()), c);
            }
            fam.higher.insert(mw, v);
        }
    }
    let u = family_to_functor(&fam, a, a)?;
    require_weak_unit(a, &u).map_err(|e| ConstructionError::Verification(e.to_string()))?;
    Ok(u)
}

/// A weak unit of a unital category with a strictly unital DG model, whose
/// first component on `i^su` is the given unit.
pub fn weak_unit_from_unital(a: &AInfCategory, units: &[Elem], model: &DgModel) -> Result<(AInfFunctor, UnitHomotopies), ConstructionError> {
    let uh = solve_h(a, units, model)?;
    let u = weak_unit_from_h(a, &uh.h)?;
    let env = envelope_su(a);
    for (x, &g) in env.unit_gens.iter().enumerate() {
        if u.f.value(&[g]) != units[x] {
            return Err(ConstructionError::Verification(format!("weak unit misses the unit of '{}'", a.quiver.object_name(x as ObjId))));
        }
    }
    Ok((u, uh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{solve_unit_homotopies, su_projection};
    use crate::dg::dg_import;
    use crate::fixtures::{dg_random, twist};
    use crate::scalar::Field;

    fn imported(seed: u64, n: usize) -> (AInfCategory, Vec<Elem>) {
        dg_import(&dg_random(seed, Field::Rational), n).expect("valid fixture")
    }

    #[test]
    fn canonical_structure_is_homotopy_unital() {
        for seed in 0..3 {
            let (d, units) = imported(seed, 3);
            let hu = canonical_hu(&d, &units).unwrap();
            assert!(check_fukaya(&hu).passed, "seed {seed}: {}", describe(&check_fukaya(&hu)));
            assert!(verify_iota_equivalence(&hu, &units).passed, "seed {seed}");
            let ud = units_from_homotopy_unital(&hu).unwrap();
            assert_eq!(ud.units, units);
            assert!(ud.right.map.is_empty() && ud.left.map.is_empty());
        }
    }

    #[test]
    fn corrupted_j_product_is_rejected() {
        let (d, units) = imported(1, 3);
        let mut hu = canonical_hu(&d, &units).unwrap();
        let pq = hu.plus.quiver.clone();
        let x = (0..pq.num_gens() as GenId).find(|&g| hu.is_base(g) && pq.tgt(g) == pq.src(g)).expect("a loop");
        let j = hu.j_gens[pq.tgt(x) as usize];
        hu.plus.b.set(&[x, j], Elem::term(x, Scalar::one()));
        assert!(matches!(units_from_homotopy_unital(&hu), Err(ConstructionError::NotHomotopyUnital(_))));
    }

    #[test]
    fn projection_weak_unit_has_zero_homotopies() {
        let (d, units) = imported(2, 3);
        let (_, pi) = su_projection(&d, &units).unwrap();
        let ud = units_from_weak_unit(&d, &pi).unwrap();
        assert_eq!(ud.units, units);
        assert!(ud.right.map.is_empty() && ud.left.map.is_empty());
        let h = h_from_weak_unit(&d, &pi).unwrap();
        let back = weak_unit_from_h(&d, &h).unwrap();
        assert_eq!(back.f, pi.f);
    }

    #[test]
    fn trivial_model_reproduces_the_canonical_structure() {
        for seed in 0..3 {
            let (d, units) = imported(seed, 3);
            let ud = solve_unit_homotopies(&d, &units).unwrap().expect("strict units");
            let model = DgModel::trivial(&d, &units).unwrap();
            let ext = homotopy_unital_from_unital(&d, &ud, &model).unwrap();
            let canon = canonical_hu(&d, &units).unwrap();
            assert_eq!(ext.source.plus.b, canon.plus.b, "seed {seed}");
            assert_eq!(ext.functor.f.value(&[ext.source.j_gens[0]]), Elem::term(ext.target.j_gens[0], Scalar::one()));
        }
    }

    #[test]
    fn twisted_fixture_extension() {
        for seed in 0..2 {
            let t = twist(seed, 3, Field::Rational);
            let model = DgModel::from_twist(&t).unwrap();
            let ud = solve_unit_homotopies(&t.cat, &t.units).unwrap().expect("unital");
            let ext = homotopy_unital_from_unital(&t.cat, &ud, &model).unwrap();
            assert!(check_unital_extension(&ext, &model).passed);
            let back = units_from_homotopy_unital(&ext.source).unwrap();
            assert_eq!(back.units, t.units);
        }
    }

    #[test]
    fn twisted_fixture_weak_unit() {
        for seed in 0..2 {
            let t = twist(seed, 3, Field::Rational);
            let model = DgModel::from_twist(&t).unwrap();
            let (u, uh) = weak_unit_from_unital(&t.cat, &t.units, &model).unwrap();
            assert!(check_unit_homotopies(&uh, &t.cat, &t.units, &model).passed);
            let ud = units_from_weak_unit(&t.cat, &u).unwrap();
            assert_eq!(ud.units, t.units);
            let h = h_from_weak_unit(&t.cat, &u).unwrap();
            assert!(double_agree(&h, &uh.h, &t.cat.quiver, &t.cat.quiver).passed);
        }
    }

    #[test]
    fn ground_field_structure() {
        let (k, units) = crate::fixtures::ground_field(Field::Rational, 4);
        let hu = canonical_hu(&k, &units).unwrap();
        assert_eq!(hu.plus.quiver.hom(0, 0).len(), 3);
        assert!(check_fukaya(&hu).passed);
        assert!(verify_iota_equivalence(&hu, &units).passed);
        assert!(hu.embedding().is_strict());
    }

    #[test]
    fn corrupted_j_differential_breaks_iota() {
        let (k, units) = crate::fixtures::ground_field(Field::Rational, 3);
        let mut hu = canonical_hu(&k, &units).unwrap();
        let j = hu.j_gens[0];
        let mut v = hu.plus.b.value(&[j]);
        v.add_term(0, Scalar::int(-1));
        hu.plus.b.set(&[j], v);
        let c = verify_iota_equivalence(&hu, &units);
        assert_eq!(c.witness.map(|w| w.equation).as_deref(), Some("iota-homotopy"));
    }

    #[test]
    fn projection_homotopy_is_xi() {
        for seed in 0..3 {
            let (d, units) = imported(seed, 3);
            let (_, pi) = su_projection(&d, &units).unwrap();
            let h = h_from_weak_unit(&d, &pi).unwrap();
            assert!(double_agree(&h, &xi(&d, &units), &d.quiver, &d.quiver).passed, "seed {seed}");
            let u = weak_unit_from_h(&d, &xi(&d, &units)).unwrap();
            assert_eq!(u.f, pi.f, "seed {seed}");
        }
    }

    #[test]
    fn solve_h_on_strictly_unital_input() {
        for seed in 0..3 {
            let (d, units) = imported(seed, 3);
            let model = DgModel::trivial(&d, &units).unwrap();
            let uh = solve_h(&d, &units, &model).unwrap();
            assert!(check_unit_homotopies(&uh, &d, &units, &model).passed);
            let (u, _) = weak_unit_from_unital(&d, &units, &model).unwrap();
            assert_eq!(units_from_weak_unit(&d, &u).unwrap().units, units);
        }
    }

    #[test]
    fn empty_category() {
        let q = Quiver::new(Vec::<String>::new()).unwrap();
        let a = AInfCategory::new(q, Field::Rational, 3);
        let model = DgModel::trivial(&a, &[]).unwrap();
        let ud = UnitData { units: vec![], right: Family::new(-1), left: Family::new(-1) };
        let ext = homotopy_unital_from_unital(&a, &ud, &model).unwrap();
        assert_eq!(ext.source.plus.quiver.num_gens(), 0);
        assert!(weak_unit_from_unital(&a, &[], &model).is_ok());
    }

    #[test]
    fn model_with_wrong_witness_is_rejected() {
        let (t, x, g) = (0..20)
            .find_map(|seed| {
                let t = twist(seed, 3, Field::Rational);
                let q = &t.base.quiver;
                let found = (0..q.num_objects() as ObjId).find_map(|x| q.hom(x, x).iter().copied().find(|&g| q.degree(g) == -2 && !t.base.b.value(&[g]).is_zero()).map(|g| (x, g)));
                found.map(|(x, g)| (t, x, g))
            })
            .expect("a fixture with a non-closed degree -2 loop");
        let mut v = t.v.clone();
        v[x as usize].add_term(g, Scalar::one());
        let r = DgModel::new(&t.cat, &t.units, t.base.clone(), t.base_units.clone(), t.functor.clone(), v);
        assert!(matches!(r, Err(ConstructionError::InvalidModel(m)) if m.contains("not preserved")));
    }
}
