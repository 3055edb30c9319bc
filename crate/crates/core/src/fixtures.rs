//! Seeded fixture generators: endomorphism DG categories of small complexes,
//! transported (twisted) unital categories with their DG models, and
//! strictly unital envelopes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::{apply_arity1, invert_arity1, transport_structure, AInfCategory, AInfFunctor};
use crate::dcoder::{pairs, DoubleCoderivation};
use crate::dg::{dg_import, DgCategory};
use crate::quiver::{GenId, ObjId, Quiver};
use crate::scalar::{Field, Scalar};
use crate::tensor::{odd, Elem, Family};

/// A complex with one basis vector per entry of `degrees` and differential
/// entries `(from, to, coefficient)`.
#[derive(Clone, Debug)]
pub struct ComplexShape {
    pub degrees: Vec<i32>,
    pub d: Vec<(usize, usize, i64)>,
}

/// The DG category of the given complexes, keeping only homs allowed by `keep`
/// (which must be closed under composition).
pub fn endomorphism_dg(shapes: &[ComplexShape], keep: impl Fn(ObjId, ObjId) -> bool, field: Field) -> DgCategory {
    let k = shapes.len();
    let mut q = Quiver::new((0..k).map(|x| format!("X{x}"))).expect("distinct names");
    // basis[x][y][p][r] = generator e_pr : X_x → X_y
    let mut basis = vec![vec![Vec::new(); k]; k];
    for x in 0..k {
        for y in 0..k {
            if !keep(x as ObjId, y as ObjId) {
                continue;
            }
            let (sx, sy) = (&shapes[x], &shapes[y]);
            basis[x][y] = (0..sx.degrees.len())
                .map(|p| {
                    (0..sy.degrees.len())
                        .map(|r| q.add_gen(format!("m{x}{y}.{p}{r}"), x as ObjId, y as ObjId, sy.degrees[r] - sx.degrees[p]).expect("fresh"))
                        .collect::<Vec<_>>()
                })
                .collect();
        }
    }
    let mut dg = DgCategory::new(q, field);
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                if basis[x][y].is_empty() || basis[y][z].is_empty() || basis[x][z].is_empty() {
                    continue;
                }
                for p in 0..shapes[x].degrees.len() {
                    for r in 0..shapes[y].degrees.len() {
                        for t in 0..shapes[z].degrees.len() {
                            dg.mul.add_term(&[basis[x][y][p][r], basis[y][z][r][t]], basis[x][z][p][t], Scalar::one());
                        }
                    }
                }
            }
        }
    }
    for x in 0..k {
        if basis[x][x].is_empty() {
            continue;
        }
        dg.identities[x] = (0..shapes[x].degrees.len()).map(|p| (basis[x][x][p][p], Scalar::one())).collect();
    }
    // D(f) = d_X f - (-1)^{|f|} f d_Y
    let dmap: Vec<Elem> = (0..k)
        .map(|x| if basis[x][x].is_empty() { Elem::new() } else { shapes[x].d.iter().map(|&(p, r, c)| (basis[x][x][p][r], field.from_int(c))).collect() })
        .collect();
    for x in 0..k {
        for y in 0..k {
            for row in &basis[x][y] {
                for &g in row {
                    let f = Elem::term(g, Scalar::one());
                    let mut v = dg.mul_elem(&dmap[x], &f);
                    v.add_lin(&dg.mul_elem(&f, &dmap[y]), &Scalar::sign(!odd(dg.quiver.degree(g))));
                    dg.d.set(&[g], v);
                }
            }
        }
    }
    dg
}

/// Random degree-preserving unimodular map on every hom space, as arity-1
/// components (image of each generator).
fn random_unimodular(q: &Quiver, rng: &mut ChaCha8Rng, field: Field) -> Family {
    let mut g = Family::new(0);
    for x in 0..q.num_objects() as ObjId {
        for y in 0..q.num_objects() as ObjId {
            let gens = q.hom(x, y);
            let mut degs: Vec<i32> = gens.iter().map(|&h| q.degree(h)).collect();
            degs.sort();
            degs.dedup();
            for deg in degs {
                let block: Vec<GenId> = gens.iter().copied().filter(|&h| q.degree(h) == deg).collect();
                let n = block.len();
                let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
                for _ in 0..2 {
                    if n >= 2 {
                        let i = rng.gen_range(0..n);
                        let j = (i + rng.gen_range(1..n)) % n;
                        let c = rng.gen_range(-2..=2);
                        for t in 0..n {
                            m[i][t] += c * m[j][t];
                        }
                    }
                    if rng.gen_bool(0.3) {
                        let i = rng.gen_range(0..n);
                        m[i].iter_mut().for_each(|v| *v = -*v);
                    }
                }
                for i in 0..n {
                    g.set(&[block[i]], (0..n).map(|j| (block[j], field.from_int(m[i][j]))).collect());
                }
            }
        }
    }
    g
}

/// Change basis of every hom space: new generator `i` is the old vector `g(i)`.
fn change_basis(dg: &DgCategory, g: &Family) -> DgCategory {
    let ginv = invert_arity1(&dg.quiver, g).expect("unimodular");
    let to_new = |e: &Elem| apply_arity1(&ginv, e);
    let to_old = |h: GenId| g.value(&[h]);
    let mut out = DgCategory::new(dg.quiver.clone(), dg.field);
    for h in 0..dg.quiver.num_gens() as GenId {
        out.d.set(&[h], to_new(&dg.d_elem(&to_old(h))));
        for &k in dg.quiver.outgoing(dg.quiver.tgt(h)) {
            out.mul.set(&[h, k], to_new(&dg.mul_elem(&to_old(h), &to_old(k))));
        }
    }
    out.identities = dg.identities.iter().map(to_new).collect();
    out
}

pub fn dg_random(seed: u64, field: Field) -> DgCategory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = [
        ComplexShape { degrees: vec![0], d: vec![] },
        ComplexShape { degrees: vec![1], d: vec![] },
        ComplexShape { degrees: vec![0, 1], d: vec![] },
        ComplexShape { degrees: vec![0, 1], d: vec![(0, 1, 1)] },
        ComplexShape { degrees: vec![-1, 0], d: vec![] },
    ];
    let k = rng.gen_range(1..=3);
    let mut chosen: Vec<ComplexShape> = (0..k).map(|_| shapes.choose(&mut rng).expect("nonempty").clone()).collect();
    chosen[0].d.clear();
    let upper = rng.gen_bool(0.5);
    let dg = endomorphism_dg(&chosen, |x, y| !upper || x <= y, field);
    let g = random_unimodular(&dg.quiver, &mut rng, field);
    change_basis(&dg, &g)
}

/// The ground field as a one-object category: `s𝕜` spanned by the unit.
pub fn ground_field(field: Field, truncation: usize) -> (AInfCategory, Vec<Elem>) {
    let mut q = Quiver::new(["X"]).expect("one object");
    let i = q.add_gen("i", 0, 0, -1).expect("fresh quiver");
    let mut a = AInfCategory::new(q, field, truncation);
    a.b.set(&[i, i], Elem::term(i, Scalar::int(-1)));
    (a, vec![Elem::term(i, Scalar::one())])
}

/// A double `(1,1)`-coderivation of the given degree with random small
/// components on every pair of total length ≤ `max_len`.
pub fn random_double(a: &AInfCategory, degree: i32, max_len: usize, seed: u64) -> DoubleCoderivation {
    let q = &a.quiver;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = AInfFunctor::identity(a);
    let mut r = DoubleCoderivation::new(id.clone(), id, degree, max_len);
    for (w, split) in pairs(q, max_len) {
        let deg = w.degree(q) + degree;
        for &z in q.hom(w.start, w.end(q)) {
            if q.degree(z) == deg && rng.gen_bool(0.5) {
                let mut e = r.component(&w, split);
                e.add_term(z, a.field.from_int(rng.gen_range(-3..=3)));
                r.set(&w, split, e);
            }
        }
    }
    r
}

/// A unital, generally not strictly unital category `cat`, an A∞-isomorphism
/// `functor: cat → base` onto an imported DG category, and witnesses `v`
/// with `units·f₁ = base_units + v·b₁`.
#[derive(Clone, Debug)]
pub struct Twist {
    pub base_dg: DgCategory,
    pub base: AInfCategory,
    pub base_units: Vec<Elem>,
    pub cat: AInfCategory,
    pub units: Vec<Elem>,
    pub functor: AInfFunctor,
    pub v: Vec<Elem>,
}

pub fn twist(seed: u64, truncation: usize, field: Field) -> Twist {
    let base_dg = dg_random(seed, field);
    let (base, base_units) = dg_import(&base_dg, truncation).expect("generated DG categories are valid");
    let q = &base.quiver;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0074_7769_7374);
    let mut g = random_unimodular(q, &mut rng, field);
    let coeffs = [-2, -1, 1, 2];
    for a in 0..q.num_gens() as GenId {
        for &b in q.outgoing(q.tgt(a)) {
            let deg = q.degree(a) + q.degree(b);
            let targets: Vec<GenId> = q.hom(q.src(a), q.tgt(b)).iter().copied().filter(|&z| q.degree(z) == deg).collect();
            if !targets.is_empty() && rng.gen_bool(0.4) {
                let z = *targets.choose(&mut rng).expect("nonempty");
                g.add_term(&[a, b], z, field.from_int(*coeffs.choose(&mut rng).expect("nonempty")));
            }
        }
    }
    let (cat, functor) = transport_structure(&base, &g).expect("unimodular first component");
    let g1inv = invert_arity1(q, &g.truncated(1)).expect("unimodular");
    let mut units = Vec::new();
    let mut v = Vec::new();
    for x in 0..q.num_objects() as ObjId {
        let lowered: Vec<GenId> = q.hom(x, x).iter().copied().filter(|&h| q.degree(h) == -2).collect();
        let mut z = Elem::new();
        for &h in &lowered {
            if rng.gen_bool(0.7) {
                z.add_term(h, field.from_int(*coeffs.choose(&mut rng).expect("nonempty")));
            }
        }
        let mut u = apply_arity1(&g1inv, &base_units[x as usize]);
        u.add_lin(&cat.b1(&z), &Scalar::one());
        units.push(u);
        v.push(functor.apply1(&z));
    }
    Twist { base_dg, base, base_units, cat, units, functor, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_ainfty, check_functor, is_strictly_unital, is_unital_functor};

    #[test]
    fn random_dg_categories_are_valid() {
        for seed in 0..20 {
            let dg = dg_random(seed, Field::Rational);
            assert_eq!(dg.validate(), Ok(()), "seed {seed}");
        }
    }

    #[test]
    fn twist_is_consistent() {
        for seed in 0..4 {
            let t = twist(seed, 3, Field::Rational);
            assert!(check_ainfty(&t.cat).passed, "seed {seed}");
            assert!(check_functor(&t.functor, &t.cat, &t.base).passed, "seed {seed}");
            let v = is_unital_functor(&t.functor, &t.base, &t.units, &t.base_units).expect("unital functor");
            for (x, vx) in t.v.iter().enumerate() {
                let lhs = t.functor.apply1(&t.units[x]).sub(&t.base_units[x]);
                assert_eq!(lhs.sub(&t.base.b1(vx)), Elem::new());
                assert_eq!(t.base.b1(&v[x]), t.base.b1(vx));
            }
            assert!(!is_strictly_unital(&t.cat, &t.units).passed, "seed {seed}");
        }
    }
}
