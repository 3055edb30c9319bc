//! A∞-categories and functors truncated at a fixed arity: axiom checkers,
//! composition, the strictly unital envelope, unit homotopies and transport
//! of structure along an invertible family.

use thiserror::Error;

use crate::lin::Lin;
use crate::linalg::{cohomology, solve_sparse, Complex, SparseRow};
use crate::quiver::{GenId, ObjId, Quiver, QuiverError};
use crate::report::{Check, Tally, Witness};
use crate::scalar::{Field, Scalar};
use crate::tensor::{display_elem, expand_coderivation, expand_morphism, odd, words_of_len, Chain, Elem, Family, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CategoryError {
    #[error("unit candidate for object '{0}' is not a cycle")]
    NotACycle(String),
    #[error("not strictly unital: {0}")]
    NotStrictlyUnital(String),
    #[error("first component is not invertible on hom({0}, {1})")]
    NotInvertible(String, String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

#[derive(Clone, Debug)]
pub struct AInfCategory {
    pub quiver: Quiver,
    pub field: Field,
    pub truncation: usize,
    /// Components `b_n`, degree +1.
    pub b: Family,
}

impl AInfCategory {
    pub fn new(quiver: Quiver, field: Field, truncation: usize) -> AInfCategory {
        AInfCategory { quiver, field, truncation, b: Family::new(1) }
    }

    /// The coderivation on `w`, all output lengths.
    pub fn b_full(&self, w: &Word) -> Chain {
        expand_coderivation(&self.quiver, &self.b, w, None)
    }

    pub fn b1(&self, e: &Elem) -> Elem {
        apply_arity1(&self.b, e)
    }

    pub fn b2(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::new();
        for (g, c) in x.iter() {
            for (h, d) in y.iter() {
                out.add_lin(&self.b.value(&[*g, *h]), &(c * d));
            }
        }
        out
    }

    /// Words of length 1..=N.
    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (1..=self.truncation).flat_map(move |m| words_of_len(&self.quiver, m))
    }

    /// `(sA(X,Y), b₁)` in the local basis `hom(x, y)`.
    pub fn hom_complex(&self, x: ObjId, y: ObjId) -> Complex {
        let gens = self.quiver.hom(x, y);
        let rows = gens.iter().map(|&g| local_row(gens, &self.b.value(&[g]))).collect();
        Complex::new(self.quiver.hom_space(x, y), rows).expect("b1 squares to zero on a checked category")
    }
}

/// A degree 0 map given on generators, applied to an element.
pub fn apply_arity1(f: &Family, e: &Elem) -> Elem {
    let mut out = Elem::new();
    for (g, c) in e.iter() {
        out.add_lin(&f.value(&[*g]), c);
    }
    out
}

pub(crate) fn local_row(gens: &[GenId], e: &Elem) -> SparseRow {
    let mut row: Lin<usize> = Lin::new();
    for (g, c) in e.iter() {
        let i = gens.iter().position(|h| h == g).expect("element outside the hom space");
        row.add_term(i, c.clone());
    }
    row.into_vec()
}

pub(crate) fn from_local(gens: &[GenId], row: &[(usize, Scalar)]) -> Elem {
    row.iter().map(|(i, c)| (gens[*i], c.clone())).collect()
}

pub(crate) fn word_witness(q: &Quiver, out: &Quiver, equation: &str, w: &Word, residual: &Elem) -> Witness {
    Witness {
        equation: equation.to_string(),
        arity: w.len(),
        path: w.path(q).into_iter().map(|x| q.object_name(x).to_string()).collect(),
        word: w.display(q),
        residual: display_elem(out, residual),
    }
}

/// Value of `Σ_k b_k` applied componentwise to the words of a chain.
pub(crate) fn components_on(f: &Family, c: &Chain) -> Elem {
    let mut out = Elem::new();
    for (w, k) in c.iter() {
        if let Some(v) = f.get(&w.gens) {
            out.add_lin(v, k);
        }
    }
    out
}

/// The A∞ equations `Σ (1^p⊗b_k⊗1^q) b_{p+1+q} = 0` for every word of length ≤ N.
pub fn check_ainfty(a: &AInfCategory) -> Check {
    let mut t = Tally::new();
    for w in a.words() {
        let r = components_on(&a.b, &a.b_full(&w));
        t.record(r.is_zero(), || word_witness(&a.quiver, &a.quiver, "ainfty", &w, &r));
        if t.failed() {
            break;
        }
    }
    t.finish("ainfty")
}

#[derive(Clone, Debug, PartialEq)]
pub struct AInfFunctor {
    pub obj_map: Vec<ObjId>,
    /// Components `f_n`, degree 0.
    pub f: Family,
    pub truncation: usize,
}

impl AInfFunctor {
    pub fn identity(a: &AInfCategory) -> AInfFunctor {
        let mut f = Family::new(0);
        for g in 0..a.quiver.num_gens() as GenId {
            f.add_term(&[g], g, Scalar::one());
        }
        AInfFunctor { obj_map: (0..a.quiver.num_objects() as ObjId).collect(), f, truncation: a.truncation }
    }

    /// The cocategory morphism on `w`, all output lengths.
    pub fn full(&self, source: &Quiver, w: &Word) -> Chain {
        expand_morphism(source, &self.f, &self.obj_map, w, None)
    }

    pub fn apply1(&self, e: &Elem) -> Elem {
        apply_arity1(&self.f, e)
    }

    pub fn is_strict(&self) -> bool {
        self.f.map.keys().all(|k| k.len() == 1)
    }
}

/// `Σ (f_{i₁}⊗…⊗f_{i_n}) b_n = Σ (1^p⊗b_k⊗1^q) f_{p+1+q}` on words of length ≤ N.
pub fn check_functor(f: &AInfFunctor, a: &AInfCategory, b: &AInfCategory) -> Check {
    let n = f.truncation.min(a.truncation).min(b.truncation);
    let mut t = Tally::new();
    'outer: for m in 1..=n {
        for w in words_of_len(&a.quiver, m) {
            let lhs = components_on(&b.b, &f.full(&a.quiver, &w));
            let rhs = components_on(&f.f, &a.b_full(&w));
            let r = lhs.sub(&rhs);
            t.record(r.is_zero(), || word_witness(&a.quiver, &b.quiver, "functor", &w, &r));
            if t.failed() {
                break 'outer;
            }
        }
    }
    t.finish("functor")
}

/// `f` followed by `g`: `(fg)_m = Σ_n f_{mn} g_n`.
pub fn compose_functors(f: &AInfFunctor, g: &AInfFunctor, a: &AInfCategory) -> AInfFunctor {
    let n = f.truncation.min(g.truncation);
    let mut out = Family::new(0);
    for m in 1..=n {
        for w in words_of_len(&a.quiver, m) {
            out.set(&w.gens, components_on(&g.f, &f.full(&a.quiver, &w)));
        }
    }
    AInfFunctor { obj_map: f.obj_map.iter().map(|&x| g.obj_map[x as usize]).collect(), f: out, truncation: n }
}

/// Componentwise equality of two functors out of `a` on words of length ≤ N.
pub fn functors_agree(f: &AInfFunctor, g: &AInfFunctor, a: &AInfCategory, target: &Quiver) -> Check {
    let mut t = Tally::new();
    t.record(f.obj_map == g.obj_map, || Witness {
        equation: "object-map".into(),
        arity: 0,
        path: Vec::new(),
        word: String::new(),
        residual: "object maps differ".into(),
    });
    let n = f.truncation.min(g.truncation);
    'outer: for m in 1..=n {
        for w in words_of_len(&a.quiver, m) {
            let r = f.f.value(&w.gens).sub(&g.f.value(&w.gens));
            t.record(r.is_zero(), || word_witness(&a.quiver, target, "functor-equality", &w, &r));
            if t.failed() {
                break 'outer;
            }
        }
    }
    t.finish("functor-equality")
}

/// `(1⊗i₀)b₂` on a generator `x ∈ sA(X,Y)`; the insertion carries `(-1)^{|x|}`.
pub fn right_unit_action(a: &AInfCategory, units: &[Elem], x: GenId) -> Elem {
    let u = &units[a.quiver.tgt(x) as usize];
    a.b2(&Elem::term(x, Scalar::one()), u).scaled(&Scalar::sign(odd(a.quiver.degree(x))))
}

/// `-(i₀⊗1)b₂` on a generator.
pub fn left_unit_action(a: &AInfCategory, units: &[Elem], x: GenId) -> Elem {
    let u = &units[a.quiver.src(x) as usize];
    a.b2(u, &Elem::term(x, Scalar::one())).scaled(&Scalar::int(-1))
}

fn gen_witness(a: &AInfCategory, equation: &str, x: GenId, residual: &Elem) -> Witness {
    word_witness(&a.quiver, &a.quiver, equation, &Word::of(&a.quiver, &[x]), residual)
}

fn unit_cycle_witness(a: &AInfCategory, x: ObjId, residual: &Elem) -> Witness {
    Witness {
        equation: "unit-cycle".into(),
        arity: 1,
        path: vec![a.quiver.object_name(x).to_string(); 2],
        word: format!("i0[{}]", a.quiver.object_name(x)),
        residual: display_elem(&a.quiver, residual),
    }
}

/// Strict unitality with the given units: `i₀b₁ = 0`, `(1⊗i₀)b₂ = 1`,
/// `-(i₀⊗1)b₂ = 1` and `b_n` vanishing on words containing `i₀` for `n ≥ 3`.
pub fn is_strictly_unital(a: &AInfCategory, units: &[Elem]) -> Check {
    let q = &a.quiver;
    let mut t = Tally::new();
    for x in 0..q.num_objects() as ObjId {
        let r = a.b1(&units[x as usize]);
        t.record(r.is_zero(), || unit_cycle_witness(a, x, &r));
    }
    for x in 0..q.num_gens() as GenId {
        let id = Elem::term(x, Scalar::one());
        let r = right_unit_action(a, units, x).sub(&id);
        t.record(r.is_zero(), || gen_witness(a, "right-unit", x, &r));
        let r = left_unit_action(a, units, x).sub(&id);
        t.record(r.is_zero(), || gen_witness(a, "left-unit", x, &r));
    }
    for n in 3..=a.truncation {
        for w in words_of_len(q, n - 1) {
            for p in 0..n {
                let obj = w.obj_at(q, p);
                let mut r = Elem::new();
                for (u, c) in units[obj as usize].iter() {
                    let mut gens = w.gens.clone();
                    gens.insert(p, *u);
                    r.add_lin(&a.b.value(&gens), c);
                }
                t.record(r.is_zero(), || {
                    let mut wit = word_witness(q, q, "unit-higher", &w, &r);
                    wit.arity = n;
                    wit.word = format!("{} with i0 at slot {p}", wit.word);
                    wit
                });
            }
        }
    }
    t.finish("strict-unit")
}

/// The strictly unital envelope together with its inclusion.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub cat: AInfCategory,
    pub embedding: AInfFunctor,
    /// The new unit generators, one per object.
    pub unit_gens: Vec<GenId>,
}

impl Envelope {
    pub fn units(&self) -> Vec<Elem> {
        self.unit_gens.iter().map(|&g| Elem::term(g, Scalar::one())).collect()
    }
}

pub(crate) fn fresh_name(q: &Quiver, base: String) -> String {
    let mut name = base;
    while q.gen_id(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Make `unit` a strict unit for `b₂` against every generator, including itself.
pub(crate) fn add_strict_unit_rules(q: &Quiver, b: &mut Family, unit: GenId) {
    let y = q.src(unit);
    for x in (0..q.num_gens() as GenId).filter(|&g| q.tgt(g) == y) {
        b.set(&[x, unit], Elem::term(x, Scalar::sign(odd(q.degree(x)))));
    }
    for &x in q.outgoing(y) {
        b.set(&[unit, x], Elem::term(x, Scalar::int(-1)));
    }
}

/// `A^su`: one new degree −1 generator per object acting as a strict unit.
pub fn envelope_su(a: &AInfCategory) -> Envelope {
    let mut q = a.quiver.clone();
    let mut unit_gens = Vec::new();
    for x in 0..q.num_objects() as ObjId {
        let name = fresh_name(&q, format!("i0su[{}]", q.object_name(x)));
        unit_gens.push(q.add_gen(name, x, x, -1).expect("fresh name"));
    }
    let mut b = a.b.clone();
    for &u in &unit_gens {
        add_strict_unit_rules(&q, &mut b, u);
    }
    let mut f = Family::new(0);
    for g in 0..a.quiver.num_gens() as GenId {
        f.add_term(&[g], g, Scalar::one());
    }
    let embedding = AInfFunctor { obj_map: (0..q.num_objects() as ObjId).collect(), f, truncation: a.truncation };
    Envelope { cat: AInfCategory { quiver: q, field: a.field, truncation: a.truncation, b }, embedding, unit_gens }
}

/// The projection `A^su → A` sending each new unit to the given strict unit.
pub fn su_projection(a: &AInfCategory, units: &[Elem]) -> Result<(Envelope, AInfFunctor), CategoryError> {
    let c = is_strictly_unital(a, units);
    if let Some(w) = c.witness {
        return Err(CategoryError::NotStrictlyUnital(format!("{} at {}", w.equation, w.word)));
    }
    let env = envelope_su(a);
    let mut f = env.embedding.f.clone();
    for (x, &u) in env.unit_gens.iter().enumerate() {
        f.set(&[u], units[x].clone());
    }
    let pi = AInfFunctor { obj_map: env.embedding.obj_map.clone(), f, truncation: a.truncation };
    Ok((env, pi))
}

/// Units with their right and left homotopies.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitData {
    pub units: Vec<Elem>,
    /// `h` with `(1⊗i₀)b₂ - 1 = h·b₁ + b₁·h`.
    pub right: Family,
    /// `h'` with `-(i₀⊗1)b₂ - 1 = h'·b₁ + b₁·h'`.
    pub left: Family,
}

/// `h·b₁ + b₁·h` on a generator (maps act on the right).
pub fn homotopy_boundary(a: &AInfCategory, h: &Family, x: GenId) -> Elem {
    let mut r = a.b1(&h.value(&[x]));
    r.add_lin(&apply_arity1(h, &a.b.value(&[x])), &Scalar::one());
    r
}

pub fn verify_unit_data(a: &AInfCategory, ud: &UnitData) -> Check {
    let q = &a.quiver;
    let mut t = Tally::new();
    for x in 0..q.num_objects() as ObjId {
        let r = a.b1(&ud.units[x as usize]);
        t.record(r.is_zero(), || unit_cycle_witness(a, x, &r));
    }
    for x in 0..q.num_gens() as GenId {
        let id = Elem::term(x, Scalar::one());
        let r = right_unit_action(a, &ud.units, x).sub(&id).sub(&homotopy_boundary(a, &ud.right, x));
        t.record(r.is_zero(), || gen_witness(a, "right-homotopy", x, &r));
        let r = left_unit_action(a, &ud.units, x).sub(&id).sub(&homotopy_boundary(a, &ud.left, x));
        t.record(r.is_zero(), || gen_witness(a, "left-homotopy", x, &r));
    }
    t.finish("unit-data")
}

/// Solve `target(x) = h·b₁ + b₁·h` on `sA(X,Y)` for `h` of degree −1.
fn solve_null_homotopy(a: &AInfCategory, x: ObjId, y: ObjId, target: impl Fn(GenId) -> Elem) -> Option<Vec<(GenId, Elem)>> {
    let q = &a.quiver;
    let gens = q.hom(x, y);
    let n = gens.len();
    // unknown h[s][t] for deg t = deg s - 1
    let mut col = vec![vec![None; n]; n];
    let mut ncols = 0;
    for s in 0..n {
        for t in 0..n {
            if q.degree(gens[t]) == q.degree(gens[s]) - 1 {
                col[s][t] = Some(ncols);
                ncols += 1;
            }
        }
    }
    let d: Vec<SparseRow> = gens.iter().map(|&g| local_row(gens, &a.b.value(&[g]))).collect();
    let mut eqs = Vec::new();
    for s in 0..n {
        let rhs = local_row(gens, &target(gens[s]));
        for z in 0..n {
            if q.degree(gens[z]) != q.degree(gens[s]) {
                continue;
            }
            let mut row: Lin<usize> = Lin::new();
            // b₁(h(s)): Σ_t h[s][t] d[t][z]
            for t in 0..n {
                if let Some(cst) = col[s][t] {
                    if let Some((_, c)) = d[t].iter().find(|(j, _)| *j == z) {
                        row.add_term(cst, c.clone());
                    }
                }
            }
            // h(b₁(s)): Σ_{s'} d[s][s'] h[s'][z]
            for (s2, c) in &d[s] {
                if let Some(cz) = col[*s2][z] {
                    row.add_term(cz, c.clone());
                }
            }
            let r = rhs.iter().find(|(j, _)| *j == z).map_or_else(Scalar::zero, |(_, c)| c.clone());
            eqs.push((row.into_vec(), r));
        }
    }
    let sol = solve_sparse(ncols, eqs)?;
    let mut out = Vec::new();
    for s in 0..n {
        let e: Elem = (0..n).filter_map(|t| col[s][t].map(|c| (gens[t], sol[c].clone()))).collect();
        out.push((gens[s], e));
    }
    Some(out)
}

fn check_unit_cycles(a: &AInfCategory, units: &[Elem]) -> Result<(), CategoryError> {
    for x in 0..a.quiver.num_objects() as ObjId {
        if !a.b1(&units[x as usize]).is_zero() {
            return Err(CategoryError::NotACycle(a.quiver.object_name(x).to_string()));
        }
    }
    Ok(())
}

/// Right and left unit homotopies for the given unit candidates, or `None`
/// when some homotopy equation is inconsistent.
pub fn solve_unit_homotopies(a: &AInfCategory, units: &[Elem]) -> Result<Option<UnitData>, CategoryError> {
    check_unit_cycles(a, units)?;
    let k = a.quiver.num_objects() as ObjId;
    let mut right = Family::new(-1);
    let mut left = Family::new(-1);
    for x in 0..k {
        for y in 0..k {
            if a.quiver.hom(x, y).is_empty() {
                continue;
            }
            let id = |g: GenId| Elem::term(g, Scalar::one());
            let Some(h) = solve_null_homotopy(a, x, y, |g| right_unit_action(a, units, g).sub(&id(g))) else {
                return Ok(None);
            };
            let Some(h2) = solve_null_homotopy(a, x, y, |g| left_unit_action(a, units, g).sub(&id(g))) else {
                return Ok(None);
            };
            for (g, e) in h {
                right.set(&[g], e);
            }
            for (g, e) in h2 {
                left.set(&[g], e);
            }
        }
    }
    Ok(Some(UnitData { units: units.to_vec(), right, left }))
}

fn unit_works_at(a: &AInfCategory, units: &[Elem], x: ObjId) -> bool {
    let k = a.quiver.num_objects() as ObjId;
    let id = |g: GenId| Elem::term(g, Scalar::one());
    (0..k).all(|z| a.quiver.hom(z, x).is_empty() || solve_null_homotopy(a, z, x, |g| right_unit_action(a, units, g).sub(&id(g))).is_some())
        && (0..k).all(|z| a.quiver.hom(x, z).is_empty() || solve_null_homotopy(a, x, z, |g| left_unit_action(a, units, g).sub(&id(g))).is_some())
}

/// Bounded unit search: per object, each degree −1 cohomology representative
/// of `sA(X,X)` and each sum of two of them.
pub fn find_units(a: &AInfCategory) -> Option<UnitData> {
    let k = a.quiver.num_objects() as ObjId;
    let mut units = vec![Elem::new(); k as usize];
    for x in 0..k {
        let gens = a.quiver.hom(x, x);
        let h = cohomology(&a.hom_complex(x, x)).ok()?;
        let reps: Vec<Elem> = h.degrees.iter().filter(|d| d.degree == -1).flat_map(|d| d.reps.iter()).map(|r| from_local(gens, r)).collect();
        let mut candidates = Vec::new();
        if reps.is_empty() {
            candidates.push(Elem::new());
        }
        candidates.extend(reps.iter().cloned());
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                let mut s = reps[i].clone();
                s.add_lin(&reps[j], &Scalar::one());
                candidates.push(s);
            }
        }
        let found = candidates.into_iter().find(|c| {
            units[x as usize] = c.clone();
            unit_works_at(a, &units, x)
        })?;
        units[x as usize] = found;
    }
    solve_unit_homotopies(a, &units).ok().flatten()
}

/// Some `v ∈ sA(x,y)` of the given degree with `v·b₁ = target`.
pub fn solve_preimage(a: &AInfCategory, x: ObjId, y: ObjId, degree: i32, target: &Elem) -> Option<Elem> {
    let gens = a.quiver.hom(x, y);
    let vars: Vec<usize> = (0..gens.len()).filter(|&i| a.quiver.degree(gens[i]) == degree).collect();
    let tgt = local_row(gens, target);
    let mut eqs = Vec::new();
    for z in 0..gens.len() {
        let mut row: Lin<usize> = Lin::new();
        for (vi, &i) in vars.iter().enumerate() {
            if let Some(c) = a.b.value(&[gens[i]]).get(&gens[z]) {
                row.add_term(vi, c.clone());
            }
        }
        let r = tgt.iter().find(|(j, _)| *j == z).map_or_else(Scalar::zero, |(_, c)| c.clone());
        eqs.push((row.into_vec(), r));
    }
    let sol = solve_sparse(vars.len(), eqs)?;
    Some(vars.iter().zip(sol).map(|(&i, c)| (gens[i], c)).collect())
}

/// Witnesses `v_X` with `i₀^A f₁ - i₀^B = v_X·b₁`, or `None` if some unit
/// is not preserved up to a boundary.
pub fn is_unital_functor(f: &AInfFunctor, b: &AInfCategory, units_a: &[Elem], units_b: &[Elem]) -> Option<Vec<Elem>> {
    let mut out = Vec::new();
    for (x, u) in units_a.iter().enumerate() {
        let fx = f.obj_map[x];
        let target = f.apply1(u).sub(&units_b[fx as usize]);
        out.push(solve_preimage(b, fx, fx, -2, &target)?);
    }
    Some(out)
}

/// Inverse of a degree 0 map given by arity-1 components, hom by hom.
pub fn invert_arity1(q: &Quiver, g: &Family) -> Result<Family, CategoryError> {
    let k = q.num_objects() as ObjId;
    let mut inv = Family::new(0);
    for x in 0..k {
        for y in 0..k {
            let gens = q.hom(x, y);
            let n = gens.len();
            let rows: Vec<SparseRow> = gens.iter().map(|&h| local_row(gens, &g.value(&[h]))).collect();
            let err = || CategoryError::NotInvertible(q.object_name(x).into(), q.object_name(y).into());
            for j in 0..n {
                // c·M = e_j
                let eqs = (0..n)
                    .map(|col| {
                        let row: SparseRow = (0..n).filter_map(|i| rows[i].iter().find(|(c, _)| *c == col).map(|(_, v)| (i, v.clone()))).collect();
                        (row, if col == j { Scalar::one() } else { Scalar::zero() })
                    })
                    .collect();
                let c = solve_sparse(n, eqs).ok_or_else(err)?;
                let e: Elem = c.into_iter().enumerate().map(|(i, v)| (gens[i], v)).collect();
                inv.set(&[gens[j]], e);
            }
            for &h in gens {
                if apply_arity1(&inv, &g.value(&[h])) != Elem::term(h, Scalar::one()) {
                    return Err(err());
                }
            }
        }
    }
    Ok(inv)
}

/// Pull the structure of `a` back along a family `g` with invertible `g₁`:
/// returns `A'` on the same quiver and the functor `g: A' → A`.
pub fn transport_structure(a: &AInfCategory, g: &Family) -> Result<(AInfCategory, AInfFunctor), CategoryError> {
    let q = &a.quiver;
    let ginv = invert_arity1(q, g)?;
    let gf = AInfFunctor { obj_map: (0..q.num_objects() as ObjId).collect(), f: g.truncated(a.truncation), truncation: a.truncation };
    let mut b2 = AInfCategory::new(q.clone(), a.field, a.truncation);
    for m in 1..=a.truncation {
        for w in words_of_len(q, m) {
            let mut acc = components_on(&a.b, &gf.full(q, &w));
            // lower b' terms; the new component has k = m and is not yet stored
            let lower = b2.b_full(&w);
            acc.add_lin(&components_on(&gf.f, &lower), &Scalar::int(-1));
            b2.b.set(&w.gens, apply_arity1(&ginv, &acc));
        }
    }
    Ok((b2, gf))
}

/// Inverse A∞-functor of `g: A' → A` with identity object map.
pub fn invert_functor(g: &AInfFunctor, a: &AInfCategory) -> Result<AInfFunctor, CategoryError> {
    let q = &a.quiver;
    let ginv1 = invert_arity1(q, &g.f)?;
    let mut inv = AInfFunctor { obj_map: g.obj_map.clone(), f: ginv1.clone(), truncation: g.truncation };
    for m in 2..=g.truncation {
        for w in words_of_len(q, m) {
            let mut acc = Elem::new();
            for (v, c) in inv.full(q, &w).iter() {
                if v.len() >= 2 {
                    acc.add_lin(&g.f.value(&v.gens), c);
                }
            }
            inv.f.set(&w.gens, apply_arity1(&ginv1, &acc).scaled(&Scalar::int(-1)));
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One object, sA(X,X) spanned by the unit in degree −1.
    fn ground() -> (AInfCategory, Vec<Elem>) {
        let mut q = Quiver::new(["X"]).unwrap();
        let i = q.add_gen("i", 0, 0, -1).unwrap();
        let mut a = AInfCategory::new(q, Field::Rational, 4);
        a.b.set(&[i, i], Elem::term(i, Scalar::int(-1)));
        (a, vec![Elem::term(i, Scalar::one())])
    }

    #[test]
    fn ground_field_is_strictly_unital() {
        let (a, u) = ground();
        assert!(check_ainfty(&a).passed);
        assert!(is_strictly_unital(&a, &u).passed);
        let ud = solve_unit_homotopies(&a, &u).unwrap().unwrap();
        assert!(verify_unit_data(&a, &ud).passed);
    }

    #[test]
    fn zero_unit_is_rejected() {
        let (a, _) = ground();
        assert!(solve_unit_homotopies(&a, &[Elem::new()]).unwrap().is_none());
        assert_eq!(find_units(&a).unwrap().units, vec![Elem::term(0, Scalar::one())]);
    }

    #[test]
    fn envelope_of_empty_hom() {
        let q = Quiver::new(["X"]).unwrap();
        let a = AInfCategory::new(q, Field::Rational, 3);
        let env = envelope_su(&a);
        let u = env.unit_gens[0];
        assert_eq!(env.cat.b.value(&[u, u]), Elem::term(u, Scalar::int(-1)));
        assert!(check_ainfty(&env.cat).passed);
        assert!(is_strictly_unital(&env.cat, &env.units()).passed);
    }

    #[test]
    fn identity_transport_is_trivial() {
        let (a, _) = ground();
        let id = AInfFunctor::identity(&a);
        let (a2, g) = transport_structure(&a, &id.f).unwrap();
        assert_eq!(a2.b, a.b);
        assert!(check_functor(&g, &a2, &a).passed);
    }
}
