//! Double `(f,g)`-coderivations `TsA⊗TsA → TsB`, the differential `B₁`,
//! composition with functors, and the families `ν_n`, `ξ_n`.
//!
//! A pair of words `w₁⊗w₂` is encoded as the concatenation `w₁w₂` together
//! with the split position `|w₁|`; an empty `w₁` starts at the middle object.

use std::collections::HashMap;

use crate::category::{components_on, compose_functors, AInfCategory, AInfFunctor};
use crate::quiver::{GenId, ObjId, Quiver};
use crate::report::{Check, Tally, Witness};
use crate::scalar::Scalar;
use crate::tensor::{display_elem, odd, words_of_len, Chain, Elem, MultiChain, MultiWord, Word};

/// Anything that can be evaluated on `w₁⊗w₂` with values in `TsB`.
pub trait DoubleMap {
    fn degree(&self) -> i32;
    fn left(&self) -> &AInfFunctor;
    fn right(&self) -> &AInfFunctor;
    fn truncation(&self) -> usize;
    /// The full value on the pair `(w[..split], w[split..])`.
    fn full(&self, q: &Quiver, w: &Word, split: usize) -> Chain;
}

#[derive(Clone, Debug)]
pub struct DoubleCoderivation {
    pub f: AInfFunctor,
    pub g: AInfFunctor,
    pub degree: i32,
    /// Components exist for `n + m ≤ truncation`.
    pub truncation: usize,
    pub comps: HashMap<(Word, usize), Elem>,
}

impl DoubleCoderivation {
    pub fn new(f: AInfFunctor, g: AInfFunctor, degree: i32, truncation: usize) -> DoubleCoderivation {
        DoubleCoderivation { f, g, degree, truncation, comps: HashMap::new() }
    }

    pub fn component(&self, w: &Word, split: usize) -> Elem {
        self.comps.get(&(w.clone(), split)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, w: &Word, split: usize, e: Elem) {
        if e.is_zero() {
            self.comps.remove(&(w.clone(), split));
        } else {
            self.comps.insert((w.clone(), split), e);
        }
    }

    /// Components of arity `n + m ≤ t` only.
    pub fn truncated(&self, t: usize) -> DoubleCoderivation {
        let mut out = DoubleCoderivation::new(self.f.clone(), self.g.clone(), self.degree, t.min(self.truncation));
        out.comps = self.comps.iter().filter(|((w, _), _)| w.len() <= t).map(|(k, v)| (k.clone(), v.clone())).collect();
        out
    }
}

impl DoubleMap for DoubleCoderivation {
    fn degree(&self) -> i32 {
        self.degree
    }

    fn left(&self) -> &AInfFunctor {
        &self.f
    }

    fn right(&self) -> &AInfFunctor {
        &self.g
    }

    fn truncation(&self) -> usize {
        self.truncation
    }

    /// `Σ f_{i₁}⊗…⊗f_{i_p}⊗r_{i,j}⊗g_{j₁}⊗…⊗g_{j_q}`.
    fn full(&self, q: &Quiver, w: &Word, split: usize) -> Chain {
        let n = w.len();
        let mut out = Chain::new();
        for i in 0..=split {
            let a = w.slice(q, 0, i);
            let sign = Scalar::sign(odd(self.degree * a.degree(q)));
            let fa = self.f.full(q, &a);
            for j in split..=n {
                let Some(e) = self.comps.get(&(w.slice(q, i, j), split - i)) else { continue };
                let gc = self.g.full(q, &w.slice(q, j, n));
                for (fw, c1) in fa.iter() {
                    for (gen, c2) in e.iter() {
                        for (gw, c3) in gc.iter() {
                            let mut v = fw.clone();
                            v.gens.push(*gen);
                            let v = v.concat(gw);
                            out.add_term(v, &(&(&sign * c1) * c2) * c3);
                        }
                    }
                }
            }
        }
        out
    }
}

/// A double map given by its full values; used to test the law checker on
/// data that does not come from components.
#[derive(Clone, Debug)]
pub struct FullTable {
    pub f: AInfFunctor,
    pub g: AInfFunctor,
    pub degree: i32,
    pub truncation: usize,
    pub values: HashMap<(Word, usize), Chain>,
}

impl FullTable {
    pub fn materialize(r: &impl DoubleMap, q: &Quiver) -> FullTable {
        let values = pairs(q, r.truncation()).into_iter().map(|(w, s)| {
            let v = r.full(q, &w, s);
            ((w, s), v)
        });
        FullTable { f: r.left().clone(), g: r.right().clone(), degree: r.degree(), truncation: r.truncation(), values: values.collect() }
    }
}

impl DoubleMap for FullTable {
    fn degree(&self) -> i32 {
        self.degree
    }

    fn left(&self) -> &AInfFunctor {
        &self.f
    }

    fn right(&self) -> &AInfFunctor {
        &self.g
    }

    fn truncation(&self) -> usize {
        self.truncation
    }

    fn full(&self, _q: &Quiver, w: &Word, split: usize) -> Chain {
        self.values.get(&(w.clone(), split)).cloned().unwrap_or_default()
    }
}

/// Every pair `w₁⊗w₂` with `|w₁| + |w₂| ≤ max_len`.
pub fn pairs(q: &Quiver, max_len: usize) -> Vec<(Word, usize)> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for w in words_of_len(q, len) {
            for s in 0..=len {
                out.push((w.clone(), s));
            }
        }
    }
    out
}

pub fn display_pair(q: &Quiver, w: &Word, split: usize) -> String {
    let show = |a: usize, b: usize| if a == b { "()".to_string() } else { w.slice(q, a, b).display(q) };
    format!("{} | {}", show(0, split), show(split, w.len()))
}

fn pair_witness(q: &Quiver, equation: String, w: &Word, split: usize, residual: String) -> Witness {
    Witness {
        equation,
        arity: w.len(),
        path: w.path(q).into_iter().map(|x| q.object_name(x).to_string()).collect(),
        word: display_pair(q, w, split),
        residual,
    }
}

pub(crate) fn display_multichain(q: &Quiver, mc: &MultiChain) -> String {
    let terms: Vec<String> = mc
        .iter()
        .map(|(mw, c)| format!("{c}*[{}]", mw.iter().map(|w| if w.is_empty() { "()".to_string() } else { w.display(q) }).collect::<Vec<_>>().join(" | ")))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub(crate) fn tensor_chains(a: &Chain, b: &Chain, sign: &Scalar, out: &mut MultiChain) {
    for (x, c) in a.iter() {
        for (y, d) in b.iter() {
            out.add_term(vec![x.clone(), y.clone()], &(sign * c) * d);
        }
    }
}

/// The law `rΔ₀ = (Δ₀⊗1)(f⊗r) + (1⊗Δ₀)(r⊗g)` on all pairs of total length ≤ N.
/// Failures report `(n, m, k)`: the input lengths and the output length.
pub fn check_double_coderivation(r: &impl DoubleMap, a: &Quiver, b: &Quiver) -> Check {
    let d = r.degree();
    let mut t = Tally::new();
    for (w, split) in pairs(a, r.truncation()) {
        let mut res = MultiChain::new();
        for (v, c) in r.full(a, &w, split).iter() {
            for s in 0..=v.len() {
                res.add_term(vec![v.slice(b, 0, s), v.slice(b, s, v.len())], c.clone());
            }
        }
        let minus = Scalar::int(-1);
        for i in 0..=split {
            let head = w.slice(a, 0, i);
            let sign = -&Scalar::sign(odd(d * head.degree(a)));
            tensor_chains(&r.left().full(a, &head), &r.full(a, &w.slice(a, i, w.len()), split - i), &sign, &mut res);
        }
        for j in split..=w.len() {
            tensor_chains(&r.full(a, &w.slice(a, 0, j), split), &r.right().full(a, &w.slice(a, j, w.len())), &minus, &mut res);
        }
        t.record(res.is_zero(), || {
            let k = res.iter().map(|(mw, _)| mw[0].len() + mw[1].len()).min().unwrap_or(0);
            let eq = format!("coderivation(n={}, m={}, k={k})", split, w.len() - split);
            pair_witness(a, eq, &w, split, display_multichain(b, &res))
        });
        if t.failed() {
            break;
        }
    }
    t.finish("double-coderivation")
}

/// `rB₁ = rb - (-1)^d (1⊗b + b⊗1) r`, with arity bounded by both `r` and `b`.
pub fn b1(r: &DoubleCoderivation, a: &AInfCategory, b: &AInfCategory) -> DoubleCoderivation {
    let trunc = r.truncation.min(b.truncation.saturating_sub(1));
    let mut out = DoubleCoderivation::new(r.f.clone(), r.g.clone(), r.degree + 1, trunc);
    for (w, split) in pairs(&a.quiver, trunc) {
        out.set(&w, split, b1_component(r, a, b, &w, split));
    }
    out
}

/// One component of `rB₁`; only components of `r` on shorter or equal pairs are read.
pub fn b1_component(r: &DoubleCoderivation, a: &AInfCategory, b: &AInfCategory, w: &Word, split: usize) -> Elem {
    let q = &a.quiver;
    let inner_sign = -&Scalar::sign(odd(r.degree));
    let mut v = components_on(&b.b, &r.full(q, w, split));
    let (w1, w2) = (w.slice(q, 0, split), w.slice(q, split, w.len()));
    for (u, c) in a.b_full(&w1).iter() {
        v.add_lin(&r.component(&u.concat(&w2), u.len()), &(&inner_sign * c));
    }
    let s2 = &inner_sign * &Scalar::sign(odd(w1.degree(q)));
    for (u, c) in a.b_full(&w2).iter() {
        let joined = if w1.is_empty() { u.clone() } else { w1.concat(u) };
        v.add_lin(&r.component(&joined, split), &(&s2 * c));
    }
    v
}

/// `rh` for a functor `h: B → C`, over `(fh, gh)`.
pub fn post_compose(r: &DoubleCoderivation, h: &AInfFunctor, a: &AInfCategory) -> DoubleCoderivation {
    let q = &a.quiver;
    let trunc = r.truncation.min(h.truncation.saturating_sub(1));
    let f = compose_functors(&r.f, h, a);
    let g = compose_functors(&r.g, h, a);
    let mut out = DoubleCoderivation::new(f, g, r.degree, trunc);
    for (w, split) in pairs(q, trunc) {
        out.set(&w, split, post_component(r, h, q, &w, split));
    }
    out
}

pub fn post_component(r: &DoubleCoderivation, h: &AInfFunctor, q: &Quiver, w: &Word, split: usize) -> Elem {
    components_on(&h.f, &r.full(q, w, split))
}

/// `(k⊗k)r` for a functor `k: D → A`, over `(kf, kg)`.
pub fn pre_compose(k: &AInfFunctor, r: &DoubleCoderivation, d: &AInfCategory) -> DoubleCoderivation {
    let q = &d.quiver;
    let f = compose_functors(k, &r.f, d);
    let g = compose_functors(k, &r.g, d);
    let trunc = r.truncation.min(k.truncation);
    let mut out = DoubleCoderivation::new(f, g, r.degree, trunc);
    for (w, split) in pairs(q, trunc) {
        let k1 = k.full(q, &w.slice(q, 0, split));
        let k2 = k.full(q, &w.slice(q, split, w.len()));
        let mut v = Elem::new();
        for (u1, c1) in k1.iter() {
            for (u2, c2) in k2.iter() {
                let joined = if u1.is_empty() { u2.clone() } else { u1.concat(u2) };
                v.add_lin(&r.component(&joined, u1.len()), &(c1 * c2));
            }
        }
        out.set(&w, split, v);
    }
    out
}

/// Componentwise comparison on pairs of total length ≤ the smaller truncation.
pub fn double_agree(r: &DoubleCoderivation, s: &DoubleCoderivation, a: &Quiver, b: &Quiver) -> Check {
    let mut t = Tally::new();
    for (w, split) in pairs(a, r.truncation.min(s.truncation)) {
        let res = r.component(&w, split).sub(&s.component(&w, split));
        t.record(res.is_zero(), || pair_witness(a, "double-equality".into(), &w, split, display_elem(b, &res)));
        if t.failed() {
            break;
        }
    }
    t.finish("double-equality")
}

pub fn is_zero_double(r: &DoubleCoderivation, a: &Quiver, b: &Quiver) -> Check {
    let zero = DoubleCoderivation::new(r.f.clone(), r.g.clone(), r.degree, r.truncation);
    let mut c = double_agree(r, &zero, a, b);
    c.name = "double-zero".into();
    c
}

/// `ν`: the double `(1,1)`-coderivation with `ν(w⊗()) = w`, `ν(()⊗w) = -w`.
pub fn nu(a: &AInfCategory) -> DoubleCoderivation {
    let id = AInfFunctor::identity(a);
    let mut r = DoubleCoderivation::new(id.clone(), id, 0, a.truncation);
    for x in 0..a.quiver.num_gens() as GenId {
        let w = Word::of(&a.quiver, &[x]);
        r.set(&w, 1, Elem::term(x, Scalar::one()));
        r.set(&w, 0, Elem::term(x, Scalar::int(-1)));
    }
    r
}

/// `ξ`: the degree −1 double `(1,1)`-coderivation whose only component is `ξ_{0,0} = i₀`.
pub fn xi(a: &AInfCategory, units: &[Elem]) -> DoubleCoderivation {
    let id = AInfFunctor::identity(a);
    let mut r = DoubleCoderivation::new(id.clone(), id, -1, a.truncation);
    for x in 0..a.quiver.num_objects() as ObjId {
        r.set(&Word::empty(x), 0, units[x as usize].clone());
    }
    r
}

/// `ν_n = Σ_i (-1)^{n-i} (1^{⊗i}⊗ε⊗1^{⊗n-i})` on `n+1` words.
pub fn nu_n(mw: &[Word]) -> MultiChain {
    let n = mw.len() - 1;
    let mut out = MultiChain::new();
    for i in 0..=n {
        if mw[i].is_empty() {
            let mut rest = mw.to_vec();
            rest.remove(i);
            out.add_term(rest, Scalar::sign(odd((n - i) as i32)));
        }
    }
    out
}

/// `ξ_n(w₀⊗…⊗w_n) = ± w₀ i₀ w₁ i₀ … i₀ w_n`, with `ξ₀ = 1` and
/// `ξ_n = (ξ_{n-1}⊗1)ξ`.
pub fn xi_n(q: &Quiver, units: &[Elem], mw: &[Word]) -> Chain {
    let mut acc = Chain::term(mw[0].clone(), Scalar::one());
    for w in mw.iter().skip(1) {
        let mut next = Chain::new();
        for (v, c) in acc.iter() {
            // the accumulated word has degree |w₀…w_{t-1}| - (t-1)
            let sign = Scalar::sign(odd(v.degree(q)));
            for (u, k) in units[w.start as usize].iter() {
                let mut gens = v.gens.clone();
                gens.push(*u);
                gens.extend_from_slice(&w.gens);
                let start = if v.is_empty() { q.src(*u) } else { v.start };
                next.add_term(Word { start, gens: gens.into_iter().collect() }, &(&sign * c) * k);
            }
        }
        acc = next;
    }
    acc
}

/// Every composable `(n+1)`-tuple of words with total length ≤ `max_len`.
pub fn multiwords(q: &Quiver, n: usize, max_len: usize) -> Vec<MultiWord> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for w in words_of_len(q, len) {
            out.extend(crate::tensor::cut(q, &w, n + 1));
        }
    }
    out
}

pub(crate) fn on_multi(mc: &MultiChain, mut f: impl FnMut(&MultiWord) -> Chain) -> Chain {
    let mut out = Chain::new();
    for (mw, c) in mc.iter() {
        out.add_lin(&f(mw), c);
    }
    out
}

pub(crate) fn mw_witness(q: &Quiver, equation: String, mw: &MultiWord, residual: String) -> Witness {
    let joined = mw.iter().skip(1).fold(mw[0].clone(), |acc, w| if acc.is_empty() { w.clone() } else { acc.concat(w) });
    Witness {
        equation,
        arity: joined.len(),
        path: joined.path(q).into_iter().map(|x| q.object_name(x).to_string()).collect(),
        word: mw.iter().map(|w| if w.is_empty() { "()".to_string() } else { w.display(q) }).collect::<Vec<_>>().join(" | "),
        residual,
    }
}

/// `ξ_nΔ₀ = Σ_i (1^{⊗i}⊗Δ₀⊗1^{⊗n-i})(ξ_i⊗ξ_{n-i})` (the tensor product of maps
/// evaluated as a composite, so `ξ_{n-i}` is signed past the output of `ξ_i`) and
/// `ξ_n b - (-1)^n Σ_i (1^{⊗i}⊗b⊗1^{⊗n-i}) ξ_n = ν_n ξ_{n-1}` for `n ≤ max_n`,
/// on inputs whose image stays within the truncation.
pub fn verify_xin_identities(c: &AInfCategory, units: &[Elem], max_n: usize) -> Check {
    let q = &c.quiver;
    let big_n = c.truncation;
    let mut t = Tally::new();
    for n in 0..=max_n {
        // comultiplication identity
        for mw in multiwords(q, n, big_n.saturating_sub(n)) {
            let mut res = MultiChain::new();
            for (v, k) in xi_n(q, units, &mw).iter() {
                for s in 0..=v.len() {
                    res.add_term(vec![v.slice(q, 0, s), v.slice(q, s, v.len())], k.clone());
                }
            }
            for i in 0..=n {
                let wi = &mw[i];
                for s in 0..=wi.len() {
                    let mut first: MultiWord = mw[..i].to_vec();
                    first.push(wi.slice(q, 0, s));
                    let mut second: MultiWord = vec![wi.slice(q, s, wi.len())];
                    second.extend_from_slice(&mw[i + 1..]);
                    let deg_first: i32 = first.iter().map(|w| w.degree(q)).sum();
                    // ξ_{n-i} passes the output of ξ_i, of degree |first| - i
                    let sign = -&Scalar::sign(odd((n - i) as i32 * (deg_first + i as i32)));
                    tensor_chains(&xi_n(q, units, &first), &xi_n(q, units, &second), &sign, &mut res);
                }
            }
            t.record(res.is_zero(), || mw_witness(q, format!("xi-delta(n={n})"), &mw, display_multichain(q, &res)));
        }
        if n == 0 {
            continue;
        }
        // differential identity
        for mw in multiwords(q, n, big_n.saturating_sub(n)) {
            let mut res = Chain::new();
            let xw = xi_n(q, units, &mw);
            for (v, k) in xw.iter() {
                res.add_lin(&c.b_full(v), k);
            }
            let outer = -&Scalar::sign(odd(n as i32));
            let mut pre = 0;
            for i in 0..=n {
                let s = &outer * &Scalar::sign(odd(pre));
                for (u, k) in c.b_full(&mw[i]).iter() {
                    let mut m2 = mw.clone();
                    m2[i] = u.clone();
                    res.add_lin(&xi_n(q, units, &m2), &(&s * k));
                }
                pre += mw[i].degree(q);
            }
            let rhs = on_multi(&nu_n(&mw), |m| xi_n(q, units, m));
            res.add_lin(&rhs, &Scalar::int(-1));
            t.record(res.is_zero(), || mw_witness(q, format!("xi-b(n={n})"), &mw, crate::tensor::display_chain(q, &res)));
        }
    }
    t.finish("xi-identities")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::AInfCategory;
    use crate::scalar::Field;

    fn ground() -> (AInfCategory, Vec<Elem>) {
        let mut q = Quiver::new(["X"]).unwrap();
        let i = q.add_gen("i", 0, 0, -1).unwrap();
        let mut a = AInfCategory::new(q, Field::Rational, 4);
        a.b.set(&[i, i], Elem::term(i, Scalar::int(-1)));
        (a, vec![Elem::term(i, Scalar::one())])
    }

    #[test]
    fn nu_and_xi_lemmas_on_ground_field() {
        let (a, u) = ground();
        let q = &a.quiver;
        let nu = nu(&a);
        let c = check_double_coderivation(&nu, q, q);
        assert!(c.passed, "{c:?}");
        let c = is_zero_double(&b1(&nu, &a, &a), q, q);
        assert!(c.passed, "{c:?}");
        let x = xi(&a, &u);
        let c = check_double_coderivation(&x, q, q);
        assert!(c.passed, "{c:?}");
        let c = double_agree(&b1(&x, &a, &a), &nu, q, q);
        assert!(c.passed, "{c:?}");
        let c = verify_xin_identities(&a, &u, 3);
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn nu_recursion() {
        let (a, _) = ground();
        let q = &a.quiver;
        // ν_n = (1^{⊗n}⊗ε) - (ν_{n-1}⊗1)
        for n in 1..=3 {
            for mw in multiwords(q, n, 3) {
                let mut rhs = MultiChain::new();
                if mw[n].is_empty() {
                    rhs.add_term(mw[..n].to_vec(), Scalar::one());
                }
                for (m, c) in nu_n(&mw[..n]).iter() {
                    let mut m2 = m.clone();
                    m2.push(mw[n].clone());
                    rhs.add_term(m2, -c);
                }
                assert_eq!(nu_n(&mw), rhs);
            }
        }
    }

    #[test]
    fn xi_lemmas_on_imports_and_envelopes() {
        for seed in 0..4 {
            let dg = crate::fixtures::dg_random(seed, Field::Rational);
            let (a, u) = crate::dg::dg_import(&dg, 3).unwrap();
            let c = verify_xin_identities(&a, &u, 2);
            assert!(c.passed, "seed {seed}: {c:?}");
            let t = crate::fixtures::twist(seed, 3, Field::Rational);
            let env = crate::category::envelope_su(&t.cat);
            let c = verify_xin_identities(&env.cat, &env.units(), 2);
            assert!(c.passed, "seed {seed}: {c:?}");
        }
    }

    #[test]
    fn corrupted_table_fails_at_the_corrupted_arity() {
        let (a, u) = ground();
        let q = &a.quiver;
        let mut table = FullTable::materialize(&xi(&a, &u), q);
        let i = q.gen_id("i").unwrap();
        let w = Word::of(q, &[i, i]);
        table.values.entry((w, 1)).or_default().add_term(Word::of(q, &[i, i]), Scalar::one());
        let c = check_double_coderivation(&table, q, q);
        assert!(!c.passed);
        assert_eq!(c.witness.unwrap().equation, "coderivation(n=1, m=1, k=2)");
    }
}
