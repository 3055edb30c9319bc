//! The cocategory `E = ⊕ (TsA)^{⊗n+1}[n]`, the isomorphism `ζ: E → TsA^su`
//! and the dictionary between functors `A^su → B` and families `φ_n`.
//!
//! An element of the summand `(TsA)^{⊗n+1}[n]` is written as its `n+1`
//! underlying words; the shift only lowers the degree by `n`.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::category::{check_functor, compose_functors, envelope_su, AInfCategory, AInfFunctor, Envelope};
use crate::dcoder::{display_multichain, mw_witness, multiwords, nu_n, on_multi, tensor_chains, xi_n, DoubleCoderivation, FullTable};
use crate::lin::Lin;
use crate::quiver::Quiver;
use crate::report::{Check, Tally};
use crate::scalar::Scalar;
use crate::tensor::{display_chain, multiword_degree, odd, pr1, Chain, MultiChain, MultiWord, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorrespondenceError {
    #[error("incompatible family: {equation} fails at {word}")]
    Incompatible { equation: String, word: String },
}

/// Degree in `E`.
pub fn e_degree(q: &Quiver, mw: &[Word]) -> i32 {
    multiword_degree(q, mw) - (mw.len() as i32 - 1)
}

/// Basis of `E` whose image under `ζ` has length ≤ `max_len`.
pub fn e_basis(q: &Quiver, max_len: usize) -> Vec<MultiWord> {
    (0..=max_len).flat_map(|n| multiwords(q, n, max_len - n)).collect()
}

/// `ζ_n = e^{⊗n+1}ξ_n` on one basis element.
pub fn zeta(env: &Envelope, mw: &[Word]) -> Chain {
    xi_n(&env.cat.quiver, &env.units(), mw)
}

/// `Δ̃`: cut one of the words and split the tensor there.
pub fn e_delta(q: &Quiver, mw: &[Word]) -> Lin<Vec<MultiWord>> {
    let n = mw.len() - 1;
    let mut out = Lin::new();
    for (i, wi) in mw.iter().enumerate() {
        for s in 0..=wi.len() {
            let mut first: MultiWord = mw[..i].to_vec();
            first.push(wi.slice(q, 0, s));
            let mut second: MultiWord = vec![wi.slice(q, s, wi.len())];
            second.extend_from_slice(&mw[i + 1..]);
            let sign = Scalar::sign(odd((n - i) as i32 * e_degree(q, &first)));
            out.add_term(vec![first, second], sign);
        }
    }
    out
}

/// `b̃ = b̃_{n,n} + b̃_{n,n-1}`: `(-1)^n Σ (1^{⊗i}⊗b⊗1^{⊗n-i})` plus `ν_n`.
pub fn e_b(a: &AInfCategory, mw: &[Word]) -> MultiChain {
    let q = &a.quiver;
    let n = mw.len() - 1;
    let mut out = if n == 0 { MultiChain::new() } else { nu_n(mw) };
    let mut pre = 0;
    for i in 0..=n {
        let s = Scalar::sign(odd(n as i32 + pre));
        for (u, k) in a.b_full(&mw[i]).iter() {
            let mut m2 = mw.to_vec();
            m2[i] = u.clone();
            out.add_term(m2, &s * k);
        }
        pre += mw[i].degree(q);
    }
    out
}

fn e_b_lin(a: &AInfCategory, x: &MultiChain) -> MultiChain {
    let mut out = MultiChain::new();
    for (mw, c) in x.iter() {
        out.add_lin(&e_b(a, mw), c);
    }
    out
}

fn display_tensors(q: &Quiver, x: &Lin<Vec<MultiWord>>) -> String {
    let parts: Vec<String> = x.iter().map(|(t, c)| format!("{c}*{}", t.iter().map(|m| format!("({})", display_multichain(q, &MultiChain::term(m.clone(), Scalar::one())))).collect::<Vec<_>>().join("⊗"))).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Structure checks on `E` up to the truncation: `b̃² = 0`, coassociativity,
/// `b̃` a coderivation, and `ζ` an isomorphism intertwining `(Δ̃, b̃)` with
/// `(Δ₀, b)` of the envelope.
pub fn check_e(a: &AInfCategory) -> Check {
    let q = &a.quiver;
    let env = envelope_su(a);
    let eq = &env.cat.quiver;
    let big_n = a.truncation;
    let mut t = Tally::new();
    let mut images = HashSet::new();
    let mut counts: BTreeMap<(usize, i32), usize> = BTreeMap::new();
    for mw in e_basis(q, big_n) {
        let bb = e_b_lin(a, &e_b(a, &mw));
        t.record(bb.is_zero(), || mw_witness(q, "E-differential-squares".into(), &mw, display_multichain(q, &bb)));

        let dd = e_delta(q, &mw);
        let mut coass = Lin::<Vec<MultiWord>>::new();
        for (pair, c) in dd.iter() {
            for (l, k) in e_delta(q, &pair[0]).iter() {
                coass.add_term(vec![l[0].clone(), l[1].clone(), pair[1].clone()], c * k);
            }
            for (r, k) in e_delta(q, &pair[1]).iter() {
                coass.add_term(vec![pair[0].clone(), r[0].clone(), r[1].clone()], -&(c * k));
            }
        }
        t.record(coass.is_zero(), || mw_witness(q, "E-coassociativity".into(), &mw, display_tensors(q, &coass)));

        let mut coder = Lin::<Vec<MultiWord>>::new();
        for (m, c) in e_b(a, &mw).iter() {
            for (pair, k) in e_delta(q, m).iter() {
                coder.add_term(pair.clone(), c * k);
            }
        }
        for (pair, c) in dd.iter() {
            for (m, k) in e_b(a, &pair[0]).iter() {
                coder.add_term(vec![m.clone(), pair[1].clone()], -&(c * k));
            }
            let s = Scalar::sign(odd(e_degree(q, &pair[0])));
            for (m, k) in e_b(a, &pair[1]).iter() {
                coder.add_term(vec![pair[0].clone(), m.clone()], -&(&(c * k) * &s));
            }
        }
        t.record(coder.is_zero(), || mw_witness(q, "E-coderivation".into(), &mw, display_tensors(q, &coder)));

        let z = zeta(&env, &mw);
        let mut dz = MultiChain::new();
        for (v, c) in z.iter() {
            for s in 0..=v.len() {
                dz.add_term(vec![v.slice(eq, 0, s), v.slice(eq, s, v.len())], c.clone());
            }
        }
        for (pair, c) in dd.iter() {
            tensor_chains(&zeta(&env, &pair[0]), &zeta(&env, &pair[1]), &-c, &mut dz);
        }
        t.record(dz.is_zero(), || mw_witness(q, "zeta-delta".into(), &mw, display_multichain(eq, &dz)));

        let mut bz = Chain::new();
        for (v, c) in z.iter() {
            bz.add_lin(&env.cat.b_full(v), c);
        }
        bz.add_lin(&on_multi(&e_b(a, &mw), |m| zeta(&env, m)), &Scalar::int(-1));
        t.record(bz.is_zero(), || mw_witness(q, "zeta-b".into(), &mw, display_chain(eq, &bz)));

        let single = z.len() == 1 && z.first().is_some_and(|(w, c)| images.insert(w.clone()) && (c.is_one() || (-c).is_one()));
        t.record(single, || mw_witness(q, "zeta-injective".into(), &mw, display_chain(eq, &z)));
        if let Some((w, _)) = z.first() {
            *counts.entry((w.len(), e_degree(q, &mw))).or_default() += 1;
        }
        if t.failed() {
            return t.finish("cocategory-E");
        }
    }
    let mut target: BTreeMap<(usize, i32), usize> = BTreeMap::new();
    for w in env.cat.words().chain((0..eq.num_objects() as u32).map(Word::empty)) {
        *target.entry((w.len(), w.degree(eq))).or_default() += 1;
    }
    let onto = counts == target;
    t.record(onto, || crate::report::Witness {
        equation: "zeta-surjective".into(),
        arity: 0,
        path: Vec::new(),
        word: String::new(),
        residual: format!("E counts {counts:?} vs envelope {target:?}"),
    });
    t.finish("cocategory-E")
}

/// `φ₀` together with the full values of `φ_n`, `n ≥ 1`, on every basis
/// element of `E` whose `ζ`-image has length ≤ N.
#[derive(Clone, Debug)]
pub struct PhiFamily {
    pub base: AInfFunctor,
    pub truncation: usize,
    pub higher: HashMap<MultiWord, Chain>,
}

impl PhiFamily {
    pub fn value(&self, q: &Quiver, mw: &[Word]) -> Chain {
        if mw.len() == 1 {
            self.base.full(q, &mw[0])
        } else {
            self.higher.get(mw).cloned().unwrap_or_default()
        }
    }
}

/// `φ_n = ζ_nU`, `φ₀ = eU`.
pub fn functor_to_family(u: &AInfFunctor, a: &AInfCategory) -> PhiFamily {
    let env = envelope_su(a);
    let eq = &env.cat.quiver;
    let base = compose_functors(&env.embedding, u, a);
    let mut higher = HashMap::new();
    for n in 1..=a.truncation {
        for mw in multiwords(&a.quiver, n, a.truncation - n) {
            let mut v = Chain::new();
            for (w, c) in zeta(&env, &mw).iter() {
                v.add_lin(&u.full(eq, w), c);
            }
            higher.insert(mw, v);
        }
    }
    PhiFamily { base, truncation: a.truncation, higher }
}

/// Residuals of the comultiplication, differential and counit systems.
pub fn check_family(fam: &PhiFamily, a: &AInfCategory, b: &AInfCategory) -> Check {
    check_family_signed(fam, a, b, false)
}

/// `flip` negates the `(-1)^n` of the differential system (used to make sure
/// the check is sensitive to it).
pub(crate) fn check_family_signed(fam: &PhiFamily, a: &AInfCategory, b: &AInfCategory, flip: bool) -> Check {
    let base = check_functor(&fam.base, a, b);
    if !base.passed {
        return Check { name: "family".into(), ..base };
    }
    let q = &a.quiver;
    let mut t = Tally::new();
    t.evaluated = base.evaluated;
    for n in 1..=fam.truncation {
        for mw in multiwords(q, n, fam.truncation - n) {
            let phi = fam.value(q, &mw);
            let mut res = MultiChain::new();
            for (v, k) in phi.iter() {
                for s in 0..=v.len() {
                    res.add_term(vec![v.slice(&b.quiver, 0, s), v.slice(&b.quiver, s, v.len())], k.clone());
                }
            }
            for (pair, c) in e_delta(q, &mw).iter() {
                tensor_chains(&fam.value(q, &pair[0]), &fam.value(q, &pair[1]), &-c, &mut res);
            }
            t.record(res.is_zero(), || mw_witness(q, format!("family-delta(n={n})"), &mw, display_multichain(&b.quiver, &res)));

            let mut res = Chain::new();
            for (v, k) in phi.iter() {
                res.add_lin(&b.b_full(v), k);
            }
            for (m, c) in e_b(a, &mw).iter() {
                let sign = if flip && m.len() == mw.len() { -c } else { c.clone() };
                res.add_lin(&fam.value(q, m), &-&sign);
            }
            t.record(res.is_zero(), || mw_witness(q, format!("family-b(n={n})"), &mw, display_chain(&b.quiver, &res)));

            let counit: Chain = phi.iter().filter(|(v, _)| v.is_empty()).map(|(v, c)| (v.clone(), c.clone())).collect();
            t.record(counit.is_zero(), || mw_witness(q, format!("family-counit(n={n})"), &mw, display_chain(&b.quiver, &counit)));
            if t.failed() {
                return t.finish("family");
            }
        }
    }
    t.finish("family")
}

/// The functor `U: A^su → B` with `ζU = φ`: a word of the envelope factors
/// uniquely at its new units as `ζ_n(w₀⊗…⊗w_n)`.
pub fn family_to_functor(fam: &PhiFamily, a: &AInfCategory, b: &AInfCategory) -> Result<AInfFunctor, CorrespondenceError> {
    let c = check_family(fam, a, b);
    if let Some(w) = c.witness {
        return Err(CorrespondenceError::Incompatible { equation: w.equation, word: w.word });
    }
    let env = envelope_su(a);
    let eq = &env.cat.quiver;
    let mut f = crate::tensor::Family::new(0);
    for w in env.cat.words() {
        let mut mw = Vec::new();
        let mut from = 0;
        for (p, g) in w.gens.iter().enumerate() {
            if env.unit_gens.contains(g) {
                mw.push(w.slice(eq, from, p));
                from = p + 1;
            }
        }
        mw.push(w.slice(eq, from, w.len()));
        let z = zeta(&env, &mw);
        let (image, sign) = z.first().expect("ζ of a basis element is a signed word");
        debug_assert_eq!(image, &w);
        f.set(&w.gens, pr1(&fam.value(&a.quiver, &mw)).scaled(sign));
    }
    Ok(AInfFunctor { obj_map: fam.base.obj_map.clone(), f, truncation: a.truncation })
}

/// `φ₁` by its full values, as a double `(φ₀, φ₀)`-map of degree −1.
pub fn phi1_table(fam: &PhiFamily, a: &AInfCategory) -> FullTable {
    let q = &a.quiver;
    let trunc = fam.truncation.saturating_sub(1);
    let values = crate::dcoder::pairs(q, trunc)
        .into_iter()
        .map(|(w, s)| {
            let v = fam.value(q, &[w.slice(q, 0, s), w.slice(q, s, w.len())]);
            ((w, s), v)
        })
        .collect();
    FullTable { f: fam.base.clone(), g: fam.base.clone(), degree: -1, truncation: trunc, values }
}

/// `φ₁` by its components.
pub fn phi1_double(fam: &PhiFamily, a: &AInfCategory) -> DoubleCoderivation {
    let q = &a.quiver;
    let trunc = fam.truncation.saturating_sub(1);
    let mut r = DoubleCoderivation::new(fam.base.clone(), fam.base.clone(), -1, trunc);
    for (w, s) in crate::dcoder::pairs(q, trunc) {
        r.set(&w, s, pr1(&fam.value(q, &[w.slice(q, 0, s), w.slice(q, s, w.len())])));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_functor, functors_agree, su_projection};
    use crate::dcoder::{b1, check_double_coderivation, double_agree, nu};
    use crate::dg::dg_import;
    use crate::fixtures::dg_random;
    use crate::scalar::Field;

    fn import(seed: u64, n: usize) -> (AInfCategory, Vec<crate::tensor::Elem>) {
        dg_import(&dg_random(seed, Field::Rational), n).unwrap()
    }

    #[test]
    fn e_structure_on_imports() {
        for seed in 0..4 {
            let (a, _) = import(seed, 3);
            let c = check_e(&a);
            assert!(c.passed, "seed {seed}: {c:?}");
        }
    }

    #[test]
    fn zeta_of_empty_pair_is_the_new_unit() {
        let (a, _) = import(0, 3);
        let env = envelope_su(&a);
        let z = zeta(&env, &[Word::empty(0), Word::empty(0)]);
        assert_eq!(z, Chain::term(Word::new(0, &[env.unit_gens[0]]), Scalar::one()));
    }

    #[test]
    fn projection_family_roundtrip() {
        for seed in 0..4 {
            let (a, u) = import(seed, 3);
            let (env, pi) = su_projection(&a, &u).unwrap();
            let fam = functor_to_family(&pi, &a);
            assert!(functors_agree(&fam.base, &AInfFunctor::identity(&a), &a, &a.quiver).passed);
            let c = check_family(&fam, &a, &a);
            assert!(c.passed, "seed {seed}: {c:?}");

            let table = phi1_table(&fam, &a);
            assert!(check_double_coderivation(&table, &a.quiver, &a.quiver).passed);
            let r = phi1_double(&fam, &a);
            let c = double_agree(&b1(&r, &a, &a), &nu(&a), &a.quiver, &a.quiver);
            assert!(c.passed, "seed {seed}: {c:?}");

            let back = family_to_functor(&fam, &a, &a).unwrap();
            assert!(check_functor(&back, &env.cat, &a).passed);
            assert!(functors_agree(&back, &pi, &env.cat, &a.quiver).passed);
        }
    }

    #[test]
    fn flipped_differential_sign_is_detected() {
        let (a, u) = import(1, 3);
        let (_, pi) = su_projection(&a, &u).unwrap();
        let fam = functor_to_family(&pi, &a);
        let c = check_family_signed(&fam, &a, &a, true);
        assert!(!c.passed);
        assert_eq!(c.witness.unwrap().equation, "family-b(n=1)");
    }

    #[test]
    fn perturbed_family_is_rejected() {
        // A degree -1 element with nonzero differential spoils only the
        // differential system at n = 1.
        for seed in 0..20 {
            let (a, u) = import(seed, 3);
            let q = &a.quiver;
            let Some(z) = (0..q.num_gens() as u32).find(|&g| q.src(g) == q.tgt(g) && q.degree(g) == -1 && !a.b1(&crate::tensor::Elem::term(g, Scalar::one())).is_zero()) else {
                continue;
            };
            let x = q.src(z);
            let (_, pi) = su_projection(&a, &u).unwrap();
            let mut fam = functor_to_family(&pi, &a);
            fam.higher.entry(vec![Word::empty(x), Word::empty(x)]).or_default().add_term(Word::new(x, &[z]), Scalar::one());
            match family_to_functor(&fam, &a, &a) {
                Err(CorrespondenceError::Incompatible { equation, .. }) => assert_eq!(equation, "family-b(n=1)"),
                Ok(_) => panic!("accepted a perturbed family"),
            }
            return;
        }
        panic!("no fixture with a non-closed degree -1 loop");
    }
}
