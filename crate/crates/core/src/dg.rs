//! Differential graded categories in their unshifted grading, and their
//! import as A∞-categories on the suspension.
//!
//! Composition is written left to right: `mul(a, b)` is `a` followed by `b`.

use thiserror::Error;

use crate::category::{apply_arity1, AInfCategory, AInfFunctor};
use crate::quiver::{suspend, GenId, ObjId, Quiver};
use crate::scalar::{Field, Scalar};
use crate::tensor::{display_elem, odd, Elem, Family};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not a DG category: {axiom} fails at {at}")]
pub struct DgError {
    pub axiom: &'static str,
    pub at: String,
}

#[derive(Clone, Debug)]
pub struct DgCategory {
    /// Hom spaces in their own (unshifted) degrees.
    pub quiver: Quiver,
    pub field: Field,
    pub d: Family,
    pub mul: Family,
    pub identities: Vec<Elem>,
}

impl DgCategory {
    pub fn new(quiver: Quiver, field: Field) -> DgCategory {
        let identities = vec![Elem::new(); quiver.num_objects()];
        DgCategory { quiver, field, d: Family::new(1), mul: Family::new(0), identities }
    }

    pub fn d_elem(&self, e: &Elem) -> Elem {
        apply_arity1(&self.d, e)
    }

    pub fn mul_elem(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::new();
        for (g, c) in x.iter() {
            for (h, k) in y.iter() {
                if self.quiver.tgt(*g) == self.quiver.src(*h) {
                    out.add_lin(&self.mul.value(&[*g, *h]), &(c * k));
                }
            }
        }
        out
    }

    fn name(&self, gens: &[GenId]) -> String {
        gens.iter().map(|&g| self.quiver.name(g)).collect::<Vec<_>>().join("*")
    }

    /// Check degrees, `d² = 0`, the Leibniz rule, associativity and units.
    pub fn validate(&self) -> Result<(), DgError> {
        let q = &self.quiver;
        let gen = |g: GenId| Elem::term(g, Scalar::one());
        let fail = |axiom, at: String| Err(DgError { axiom, at });
        let homogeneous = |e: &Elem, x: ObjId, y: ObjId, deg: i32| e.iter().all(|(g, _)| q.src(*g) == x && q.tgt(*g) == y && q.degree(*g) == deg);
        for (k, v) in &self.d.map {
            if k.len() != 1 || !homogeneous(v, q.src(k[0]), q.tgt(k[0]), q.degree(k[0]) + 1) {
                return fail("degree", format!("d({})", self.name(k)));
            }
        }
        for (k, v) in &self.mul.map {
            if k.len() != 2 || q.tgt(k[0]) != q.src(k[1]) || !homogeneous(v, q.src(k[0]), q.tgt(k[1]), q.degree(k[0]) + q.degree(k[1])) {
                return fail("degree", self.name(k));
            }
        }
        if self.identities.len() != q.num_objects() {
            return fail("unit", "identity list length".into());
        }
        for (x, u) in self.identities.iter().enumerate() {
            if !homogeneous(u, x as ObjId, x as ObjId, 0) {
                return fail("unit", format!("identity of {}", q.object_name(x as ObjId)));
            }
        }
        let n = q.num_gens() as GenId;
        for a in 0..n {
            if !self.d_elem(&self.d.value(&[a])).is_zero() {
                return fail("differential", format!("d(d({}))", q.name(a)));
            }
        }
        for a in 0..n {
            for &b in q.outgoing(q.tgt(a)) {
                let ab = self.mul.value(&[a, b]);
                let mut r = self.d_elem(&ab);
                r.add_lin(&self.mul_elem(&self.d.value(&[a]), &gen(b)), &Scalar::int(-1));
                r.add_lin(&self.mul_elem(&gen(a), &self.d.value(&[b])), &Scalar::sign(!odd(q.degree(a))));
                if !r.is_zero() {
                    return fail("leibniz", self.name(&[a, b]));
                }
                for &c in q.outgoing(q.tgt(b)) {
                    let l = self.mul_elem(&ab, &gen(c));
                    let r = self.mul_elem(&gen(a), &self.mul.value(&[b, c]));
                    if !l.sub(&r).is_zero() {
                        return fail("associativity", self.name(&[a, b, c]));
                    }
                }
            }
        }
        for (x, u) in self.identities.iter().enumerate() {
            if !self.d_elem(u).is_zero() {
                return fail("unit", format!("d(identity of {})", q.object_name(x as ObjId)));
            }
        }
        for a in 0..n {
            let l = self.mul_elem(&self.identities[q.src(a) as usize], &gen(a));
            let r = self.mul_elem(&gen(a), &self.identities[q.tgt(a) as usize]);
            if l != gen(a) || r != gen(a) {
                return fail("unit", format!("{} (got {} and {})", q.name(a), display_elem(q, &l), display_elem(q, &r)));
            }
        }
        Ok(())
    }
}

/// Exponents of the import signs: `b₁(sa) = (-1)^{e0|sa| + e1} s(da)` and
/// `b₂(sa⊗sb) = (-1)^{e2|sa| + e3|sb| + e4} s(ab)`.
pub(crate) type ImportSigns = [bool; 5];

pub(crate) const IMPORT_SIGNS: ImportSigns = [false, false, true, false, false];

pub(crate) fn import_with_signs(dg: &DgCategory, truncation: usize, e: ImportSigns) -> (AInfCategory, Vec<Elem>) {
    let q = suspend(&dg.quiver, 1);
    let sdeg = |g: GenId| q.degree(g) as i64;
    let bit = |b: bool| b as i64;
    let mut a = AInfCategory::new(q.clone(), dg.field, truncation);
    if truncation >= 1 {
        for (k, v) in &dg.d.map {
            let s = bit(e[0]) * sdeg(k[0]) + bit(e[1]);
            a.b.set(k, v.scaled(&Scalar::sign(s.rem_euclid(2) == 1)));
        }
    }
    if truncation >= 2 {
        for (k, v) in &dg.mul.map {
            let s = bit(e[2]) * sdeg(k[0]) + bit(e[3]) * sdeg(k[1]) + bit(e[4]);
            a.b.set(k, v.scaled(&Scalar::sign(s.rem_euclid(2) == 1)));
        }
    }
    (a, dg.identities.clone())
}

/// The A∞-category on the suspension with `b₁(sa) = s(da)` and
/// `b₂(sa⊗sb) = (-1)^{|sa|} s(ab)`, and the identities as strict units.
pub fn dg_import(dg: &DgCategory, truncation: usize) -> Result<(AInfCategory, Vec<Elem>), DgError> {
    dg.validate()?;
    Ok(import_with_signs(dg, truncation, IMPORT_SIGNS))
}

/// A DG functor (given on generators, same object map) as a strict A∞-functor.
pub fn dg_functor_import(obj_map: Vec<ObjId>, f1: Family, truncation: usize) -> AInfFunctor {
    AInfFunctor { obj_map, f: f1.truncated(1), truncation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_ainfty, is_strictly_unital};

    /// Endomorphisms of `k → k` in degrees 0 and 1 with `d = id`: four basis
    /// maps `e_pq`, the first index in the source.
    fn acyclic_end() -> DgCategory {
        let mut q = Quiver::new(["K"]).unwrap();
        let deg = [0, 1];
        let mut ids = [[0; 2]; 2];
        for p in 0..2 {
            for r in 0..2 {
                ids[p][r] = q.add_gen(format!("e{p}{r}"), 0, 0, deg[r] - deg[p]).unwrap();
            }
        }
        let mut dg = DgCategory::new(q, Field::Rational);
        for p in 0..2 {
            for r in 0..2 {
                for t in 0..2 {
                    dg.mul.add_term(&[ids[p][r], ids[r][t]], ids[p][t], Scalar::one());
                }
            }
        }
        // D(f) = d f - (-1)^{|f|} f d with d = e01
        let dmap = Elem::term(ids[0][1], Scalar::one());
        for p in 0..2 {
            for r in 0..2 {
                let f = Elem::term(ids[p][r], Scalar::one());
                let mut v = dg.mul_elem(&dmap, &f);
                v.add_lin(&dg.mul_elem(&f, &dmap), &Scalar::sign(!odd(deg[r] - deg[p])));
                dg.d.set(&[ids[p][r]], v);
            }
        }
        let mut one = Elem::new();
        one.add_term(ids[0][0], Scalar::one());
        one.add_term(ids[1][1], Scalar::one());
        dg.identities[0] = one;
        dg
    }

    #[test]
    fn reference_fixture_is_dg() {
        assert_eq!(acyclic_end().validate(), Ok(()));
    }

    #[test]
    fn import_sign_search() {
        let dg = acyclic_end();
        let mut solutions = Vec::new();
        for bits in 0..32u32 {
            let e: ImportSigns = std::array::from_fn(|i| bits >> i & 1 == 1);
            let (a, u) = import_with_signs(&dg, 3, e);
            if check_ainfty(&a).passed && is_strictly_unital(&a, &u).passed {
                solutions.push(e);
            }
        }
        // the frozen choice, and its global b₁ negation
        assert_eq!(solutions, vec![IMPORT_SIGNS, [false, true, true, false, false]]);
    }

    #[test]
    fn ground_field_unit_squares_to_minus_itself() {
        let mut q = Quiver::new(["X"]).unwrap();
        let one = q.add_gen("1", 0, 0, 0).unwrap();
        let mut dg = DgCategory::new(q, Field::Rational);
        dg.mul.add_term(&[one, one], one, Scalar::one());
        dg.identities[0] = Elem::term(one, Scalar::one());
        let (a, u) = dg_import(&dg, 4).unwrap();
        assert_eq!(a.b.value(&[one, one]), Elem::term(one, Scalar::int(-1)));
        assert!(is_strictly_unital(&a, &u).passed);
    }

    #[test]
    fn associativity_failure_is_named() {
        let mut q = Quiver::new(["X"]).unwrap();
        let one = q.add_gen("1", 0, 0, 0).unwrap();
        let x = q.add_gen("x", 0, 0, 0).unwrap();
        let y = q.add_gen("y", 0, 0, 0).unwrap();
        let mut dg = DgCategory::new(q, Field::Rational);
        for g in [one, x, y] {
            dg.mul.add_term(&[one, g], g, Scalar::one());
            dg.mul.add_term(&[g, one], g, Scalar::one());
        }
        // (xx)x = yx = 0 but x(xx) = xy = x
        dg.mul.add_term(&[x, x], y, Scalar::one());
        dg.mul.add_term(&[x, y], x, Scalar::one());
        dg.identities[0] = Elem::term(one, Scalar::one());
        assert_eq!(dg.validate().unwrap_err().axiom, "associativity");
    }
}
