//! Tensor words, the cut comultiplication and Koszul-signed evaluation.
//!
//! Operators act on the right. Evaluating `g₁⊗…⊗g_k` on a word split into
//! blocks picks up `(-1)^{deg g_j · deg block_i}` for every `i < j`.

use std::collections::HashMap;
use std::fmt::Write as _;

use smallvec::SmallVec;

use crate::lin::Lin;
use crate::quiver::{GenId, ObjId, Quiver};
use crate::scalar::Scalar;

pub type Gens = SmallVec<[GenId; 8]>;
/// Element of a single hom space of the quiver.
pub type Elem = Lin<GenId>;
/// Element of the tensor quiver.
pub type Chain = Lin<Word>;
pub type MultiWord = Vec<Word>;
pub type MultiChain = Lin<MultiWord>;

pub fn odd(k: i32) -> bool {
    k.rem_euclid(2) == 1
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub start: ObjId,
    pub gens: Gens,
}

impl Word {
    pub fn empty(x: ObjId) -> Word {
        Word { start: x, gens: Gens::new() }
    }

    pub fn new(start: ObjId, gens: &[GenId]) -> Word {
        Word { start, gens: Gens::from_slice(gens) }
    }

    /// Word of a nonempty generator sequence; start is the first source.
    pub fn of(q: &Quiver, gens: &[GenId]) -> Word {
        assert!(!gens.is_empty(), "use Word::empty for length 0");
        Word::new(q.src(gens[0]), gens)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Object before position `i`; `obj_at(len)` is the end.
    pub fn obj_at(&self, q: &Quiver, i: usize) -> ObjId {
        if i == 0 {
            self.start
        } else {
            q.tgt(self.gens[i - 1])
        }
    }

    pub fn end(&self, q: &Quiver) -> ObjId {
        self.obj_at(q, self.len())
    }

    pub fn degree(&self, q: &Quiver) -> i32 {
        self.gens.iter().map(|&g| q.degree(g)).sum()
    }

    pub fn prefix_degree(&self, q: &Quiver, p: usize) -> i32 {
        self.gens[..p].iter().map(|&g| q.degree(g)).sum()
    }

    pub fn slice(&self, q: &Quiver, a: usize, b: usize) -> Word {
        Word { start: self.obj_at(q, a), gens: Gens::from_slice(&self.gens[a..b]) }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut gens = self.gens.clone();
        gens.extend_from_slice(&other.gens);
        Word { start: self.start, gens }
    }

    pub fn is_composable(&self, q: &Quiver) -> bool {
        let mut x = self.start;
        for &g in &self.gens {
            if q.src(g) != x {
                return false;
            }
            x = q.tgt(g);
        }
        true
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.gens.is_empty() {
            return format!("1[{}]", q.object_name(self.start));
        }
        self.gens.iter().map(|&g| q.name(g)).collect::<Vec<_>>().join("⊗")
    }

    /// Object path `X₀, …, X_n`.
    pub fn path(&self, q: &Quiver) -> Vec<ObjId> {
        (0..=self.len()).map(|i| self.obj_at(q, i)).collect()
    }
}

pub fn multiword_degree(q: &Quiver, mw: &[Word]) -> i32 {
    mw.iter().map(|w| w.degree(q)).sum()
}

pub fn multiword_len(mw: &[Word]) -> usize {
    mw.iter().map(Word::len).sum()
}

pub fn display_multiword(q: &Quiver, mw: &[Word]) -> String {
    mw.iter().map(|w| format!("({})", w.display(q))).collect::<Vec<_>>().join(" | ")
}

pub fn display_elem(q: &Quiver, e: &Elem) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (g, c)) in e.iter().enumerate() {
        if i > 0 {
            s.push_str(" + ");
        }
        let _ = write!(s, "{c}*{}", q.name(*g));
    }
    s
}

pub fn display_chain(q: &Quiver, c: &Chain) -> String {
    if c.is_zero() {
        return "0".into();
    }
    c.iter().map(|(w, k)| format!("{k}*[{}]", w.display(q))).collect::<Vec<_>>().join(" + ")
}

/// Compositions of `total` into `parts` positive integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            cur.push(first);
            go(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Compositions of `total` into `parts` nonnegative integers.
pub fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    compositions(total + parts, parts).into_iter().map(|c| c.into_iter().map(|x| x - 1).collect()).collect()
}

/// Iterated cut comultiplication: every decomposition of `w` into `l`
/// consecutive (possibly empty) blocks, each with coefficient one.
pub fn cut(q: &Quiver, w: &Word, l: usize) -> Vec<MultiWord> {
    if l == 0 {
        return if w.is_empty() { vec![Vec::new()] } else { Vec::new() };
    }
    weak_compositions(w.len(), l)
        .into_iter()
        .map(|sizes| {
            let mut pos = 0;
            sizes
                .iter()
                .map(|&s| {
                    let b = w.slice(q, pos, pos + s);
                    pos += s;
                    b
                })
                .collect()
        })
        .collect()
}

/// Two-block cut `Δ₀`.
pub fn delta(q: &Quiver, w: &Word) -> Vec<(Word, Word)> {
    (0..=w.len()).map(|k| (w.slice(q, 0, k), w.slice(q, k, w.len()))).collect()
}

/// Sign exponent parity of `g₁⊗…⊗g_k` on blocks of the given degrees.
pub fn koszul_odd(map_degrees: &[i32], block_degrees: &[i32]) -> bool {
    let mut acc = 0i64;
    let mut left = 0i64;
    for (d, b) in map_degrees.iter().zip(block_degrees) {
        acc += (*d as i64) * left;
        left += *b as i64;
    }
    acc.rem_euclid(2) == 1
}

/// Evaluate `g₁⊗…⊗g_k` on `blocks`, returning the tensor of the outputs.
pub fn koszul_eval<F>(q: &Quiver, blocks: &[Word], degrees: &[i32], mut apply: F) -> MultiChain
where
    F: FnMut(usize, &Word) -> Chain,
{
    assert_eq!(blocks.len(), degrees.len(), "arity mismatch");
    let bdeg: Vec<i32> = blocks.iter().map(|b| b.degree(q)).collect();
    let sign = Scalar::sign(koszul_odd(degrees, &bdeg));
    let mut acc: Vec<(MultiWord, Scalar)> = vec![(Vec::new(), sign)];
    for (i, b) in blocks.iter().enumerate() {
        let out = apply(i, b);
        let mut next = Vec::new();
        for (mw, c) in &acc {
            for (w, k) in out.iter() {
                let mut m = mw.clone();
                m.push(w.clone());
                next.push((m, c * k));
            }
        }
        acc = next;
    }
    acc.into_iter().collect()
}

/// Concatenate a tensor of words into words (multiplication `μ`).
pub fn mu(mc: &MultiChain) -> Chain {
    let mut out = Chain::new();
    for (mw, c) in mc.iter() {
        let mut w = mw[0].clone();
        for x in &mw[1..] {
            w = w.concat(x);
        }
        out.add_term(w, c.clone());
    }
    out
}

/// Components `{F_k}` of a coderivation or cocategory morphism, keyed by
/// input generator sequence. Absent keys are zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Family {
    pub degree: i32,
    pub map: HashMap<Gens, Elem>,
}

impl Family {
    pub fn new(degree: i32) -> Family {
        Family { degree, map: HashMap::new() }
    }

    pub fn get(&self, gens: &[GenId]) -> Option<&Elem> {
        self.map.get(gens)
    }

    pub fn value(&self, gens: &[GenId]) -> Elem {
        self.map.get(gens).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, gens: &[GenId], value: Elem) {
        if value.is_zero() {
            self.map.remove(gens);
        } else {
            self.map.insert(Gens::from_slice(gens), value);
        }
    }

    pub fn add_term(&mut self, gens: &[GenId], out: GenId, c: Scalar) {
        let mut v = self.value(gens);
        v.add_term(out, c);
        self.set(gens, v);
    }

    /// Keys in a deterministic order (arity first).
    pub fn sorted_keys(&self) -> Vec<Gens> {
        let mut k: Vec<Gens> = self.map.keys().cloned().collect();
        k.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        k
    }

    pub fn max_arity(&self) -> usize {
        self.map.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    /// Drop every component of arity above `n`.
    pub fn truncated(&self, n: usize) -> Family {
        Family { degree: self.degree, map: self.map.iter().filter(|(k, _)| k.len() <= n).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub fn restricted_to_arity(&self, n: usize) -> Family {
        Family { degree: self.degree, map: self.map.iter().filter(|(k, _)| k.len() == n).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }
}

fn insert_elem(q: &Quiver, w: &Word, a: usize, b: usize, e: &Elem, coeff: &Scalar, out: &mut Chain) {
    for (g, c) in e.iter() {
        let mut gens = Gens::from_slice(&w.gens[..a]);
        gens.push(*g);
        gens.extend_from_slice(&w.gens[b..]);
        let start = if a == 0 { q.src(*g) } else { w.start };
        out.add_term(Word { start, gens }, coeff * c);
    }
}

/// `Σ 1^{⊗p}⊗b_k⊗1^{⊗q}` on `w`; restricted to output length `out_len` when given.
pub fn expand_coderivation(q: &Quiver, b: &Family, w: &Word, out_len: Option<usize>) -> Chain {
    let m = w.len();
    let mut out = Chain::new();
    let (klo, khi) = match out_len {
        None => (1, m),
        Some(n) if n == 0 || n > m => return out,
        Some(n) => (m + 1 - n, m + 1 - n),
    };
    let mut pre = 0;
    for p in 0..m {
        for k in klo..=khi.min(m - p) {
            if let Some(e) = b.get(&w.gens[p..p + k]) {
                insert_elem(q, w, p, p + k, e, &Scalar::sign(odd(b.degree * pre)), &mut out);
            }
        }
        pre += q.degree(w.gens[p]);
    }
    out
}

/// Cocategory morphism `f` applied to `w`: sum over compositions of
/// `f_{i₁}⊗…⊗f_{i_n}`. `target` is the codomain quiver.
pub fn expand_morphism(source: &Quiver, f: &Family, obj_map: &[ObjId], w: &Word, out_len: Option<usize>) -> Chain {
    let mut out = Chain::new();
    let m = w.len();
    if m == 0 {
        if out_len.is_none_or(|n| n == 0) {
            out.add_term(Word::empty(obj_map[w.start as usize]), Scalar::one());
        }
        return out;
    }
    let degs: Vec<i32> = w.gens.iter().map(|&g| source.degree(g)).collect();
    struct St<'a> {
        f: &'a Family,
        w: &'a Word,
        degs: &'a [i32],
        out_len: Option<usize>,
        start: ObjId,
    }
    fn go(st: &St, pos: usize, pre: i32, cur: &mut Gens, coeff: Scalar, out: &mut Chain) {
        let m = st.w.len();
        if pos == m {
            if st.out_len.is_none_or(|n| n == cur.len()) {
                out.add_term(Word { start: st.start, gens: cur.clone() }, coeff);
            }
            return;
        }
        if let Some(n) = st.out_len {
            if cur.len() >= n {
                return;
            }
        }
        let mut blockdeg = 0;
        for k in 1..=m - pos {
            blockdeg += st.degs[pos + k - 1];
            if let Some(n) = st.out_len {
                // remaining positions must still fill the remaining slots
                if m - pos - k < n - cur.len() - 1 {
                    break;
                }
            }
            if let Some(e) = st.f.get(&st.w.gens[pos..pos + k]) {
                let s = Scalar::sign(odd(st.f.degree * pre));
                for (g, c) in e.iter() {
                    cur.push(*g);
                    go(st, pos + k, pre + blockdeg, cur, &(&coeff * &s) * c, out);
                    cur.pop();
                }
            }
        }
    }
    let st = St { f, w, degs: &degs, out_len, start: obj_map[w.start as usize] };
    go(&st, 0, 0, &mut Gens::new(), Scalar::one(), &mut out);
    out
}

/// Extend a map on words linearly to chains.
pub fn on_chain<F: FnMut(&Word) -> Chain>(c: &Chain, mut f: F) -> Chain {
    let mut out = Chain::new();
    for (w, k) in c.iter() {
        out.add_lin(&f(w), k);
    }
    out
}

/// Length-1 part of a chain as a hom element.
pub fn pr1(c: &Chain) -> Elem {
    c.iter().filter(|(w, _)| w.len() == 1).map(|(w, k)| (w.gens[0], k.clone())).collect()
}

pub fn elem_to_chain(q: &Quiver, e: &Elem) -> Chain {
    e.iter().map(|(g, c)| (Word::new(q.src(*g), &[*g]), c.clone())).collect()
}

/// All composable words of length `n` starting at `x` (one empty word if `n = 0`).
pub fn words_from(q: &Quiver, x: ObjId, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur = Gens::new();
    fn go(q: &Quiver, x: ObjId, start: ObjId, left: usize, cur: &mut Gens, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(Word { start, gens: cur.clone() });
            return;
        }
        for &g in q.outgoing(x) {
            cur.push(g);
            go(q, q.tgt(g), start, left - 1, cur, out);
            cur.pop();
        }
    }
    go(q, x, x, n, &mut cur, &mut out);
    out
}

pub fn words_of_len(q: &Quiver, n: usize) -> Vec<Word> {
    (0..q.num_objects() as ObjId).flat_map(|x| words_from(q, x, n)).collect()
}

pub fn count_words(q: &Quiver, n: usize) -> usize {
    let k = q.num_objects();
    let mut v = vec![1usize; k];
    for _ in 0..n {
        let mut next = vec![0usize; k];
        for (x, item) in next.iter_mut().enumerate() {
            for &g in q.outgoing(x as ObjId) {
                *item += v[q.tgt(g) as usize];
            }
        }
        v = next;
    }
    v.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_quiver() -> Quiver {
        let mut q = Quiver::new(["X"]).unwrap();
        q.add_gen("x", 0, 0, 1).unwrap();
        q.add_gen("y", 0, 0, 0).unwrap();
        q
    }

    #[test]
    fn cut_counts() {
        let q = loop_quiver();
        let w = Word::new(0, &[0, 1]);
        assert_eq!(cut(&q, &w, 2).len(), 3);
        assert_eq!(cut(&q, &Word::new(0, &[0]), 3).len(), 3);
        assert_eq!(cut(&q, &w, 1), vec![vec![w.clone()]]);
        assert!(cut(&q, &w, 0).is_empty());
    }

    #[test]
    fn koszul_one_tensor_b1() {
        let q = loop_quiver();
        let blocks = vec![Word::new(0, &[0]), Word::new(0, &[1])];
        let r = koszul_eval(&q, &blocks, &[0, 1], |_, b| Chain::term(b.clone(), Scalar::one()));
        assert_eq!(r.iter().next().unwrap().1, &Scalar::int(-1));
        let r = koszul_eval(&q, &blocks, &[1, 0], |_, b| Chain::term(b.clone(), Scalar::one()));
        assert_eq!(r.iter().next().unwrap().1, &Scalar::one());
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert!(compositions(1, 2).is_empty());
        assert_eq!(weak_compositions(1, 3).len(), 3);
    }
}
