//! Exact linear algebra: sparse row echelon elimination, graded spaces and
//! maps, cohomology, quasi-isomorphism tests and the mapping-cone solver.
//!
//! Maps act on the right: a map is stored as one sparse row per source
//! basis vector, listing the image in target coordinates.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub type SparseRow = Vec<(usize, Scalar)>;

fn acc_add(acc: &mut BTreeMap<usize, Scalar>, col: usize, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(col).or_insert_with(Scalar::zero);
    *e = &*e + &c;
    if e.is_zero() {
        acc.remove(&col);
    }
}

fn acc_row(acc: BTreeMap<usize, Scalar>) -> SparseRow {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `a + coeff * b` for sorted sparse rows.
pub fn row_axpy(a: &[(usize, Scalar)], coeff: &Scalar, b: &[(usize, Scalar)]) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, coeff * &b[j].1));
            j += 1;
        } else {
            let s = &a[i].1 + &(coeff * &b[j].1);
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Apply a sparse vector (row) to a map given by rows: `v · M`.
pub fn row_times(v: &[(usize, Scalar)], m: &[SparseRow]) -> SparseRow {
    let mut acc = BTreeMap::new();
    for (i, c) in v {
        for (j, e) in &m[*i] {
            acc_add(&mut acc, *j, c * e);
        }
    }
    acc_row(acc)
}

pub fn row_from_dense(v: &[Scalar]) -> SparseRow {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inserted {
    Pivot(usize),
    Dependent,
    Inconsistent,
}

/// Incrementally built row echelon form of an augmented system.
///
/// The set of pivot columns is independent of the order in which rows are
/// inserted, so the solution with free variables set to zero is exactly the
/// one obtained from the reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, usize>,
    rows: Vec<(SparseRow, Scalar)>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn reduce(&self, mut row: SparseRow, mut rhs: Scalar) -> (SparseRow, Scalar) {
        let mut start = 0;
        loop {
            let hit = row[start..].iter().position(|(c, _)| self.pivots.contains_key(c));
            let Some(off) = hit else { break };
            let pos = start + off;
            let (col, coeff) = row[pos].clone();
            let (prow, prhs) = &self.rows[self.pivots[&col]];
            let neg = -&coeff;
            row = row_axpy(&row, &neg, prow);
            rhs = &rhs + &(&neg * prhs);
            start = row.iter().position(|(c, _)| *c > col).unwrap_or(row.len());
        }
        (row, rhs)
    }

    pub fn insert(&mut self, row: SparseRow, rhs: Scalar) -> Inserted {
        let (row, rhs) = self.reduce(row, rhs);
        if row.is_empty() {
            if rhs.is_zero() {
                return Inserted::Dependent;
            }
            self.inconsistent = true;
            return Inserted::Inconsistent;
        }
        let lead = row[0].0;
        let inv = row[0].1.inv();
        let row: SparseRow = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
        let rhs = &rhs * &inv;
        self.pivots.insert(lead, self.rows.len());
        self.rows.push((row, rhs));
        Inserted::Pivot(lead)
    }

    /// Solution with every free variable set to zero.
    pub fn solve(&self, ncols: usize) -> Option<Vec<Scalar>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Scalar::zero(); ncols];
        for (&col, &ri) in self.pivots.iter().rev() {
            let (row, rhs) = &self.rows[ri];
            let mut v = rhs.clone();
            for (c, a) in &row[1..] {
                if !x[*c].is_zero() {
                    v = &v - &(a * &x[*c]);
                }
            }
            x[col] = v;
        }
        Some(x)
    }
}

/// Solve `A x = b` exactly; free variables are set to zero with pivots in
/// column order. Returns `None` when the system is inconsistent.
pub fn solve_linear(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let ncols = a.first().map_or(0, |r| r.len());
    let mut ech = Echelon::new();
    for (row, rhs) in a.iter().zip(b) {
        assert_eq!(row.len(), ncols, "ragged matrix");
        ech.insert(row_from_dense(row), rhs.clone());
    }
    ech.solve(ncols)
}

/// Sparse variant: each equation is a sparse row over `ncols` unknowns.
pub fn solve_sparse(ncols: usize, equations: Vec<(SparseRow, Scalar)>) -> Option<Vec<Scalar>> {
    let mut ech = Echelon::new();
    for (row, rhs) in equations {
        if ech.insert(row, rhs) == Inserted::Inconsistent {
            return None;
        }
    }
    ech.solve(ncols)
}

/// Basis of `{ c : Σ c_i rows_i = 0 }`.
pub fn left_kernel(rows: &[SparseRow], ncols: usize) -> Vec<SparseRow> {
    let mut ech = Echelon::new();
    let mut kernel = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut aug = r.clone();
        aug.push((ncols + i, Scalar::one()));
        if let Inserted::Pivot(lead) = ech.insert(aug, Scalar::zero()) {
            if lead >= ncols {
                let (row, _) = &ech.rows[ech.pivots[&lead]];
                kernel.push(row.iter().map(|(c, v)| (c - ncols, v.clone())).collect());
            }
        }
    }
    kernel
}

pub fn rank(rows: &[SparseRow]) -> usize {
    let mut ech = Echelon::new();
    for r in rows {
        ech.insert(r.clone(), Scalar::zero());
    }
    ech.rank()
}

/// Finite graded vector space with labelled basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedSpace {
    pub basis: Vec<(String, i32)>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(String, i32)>) -> GradedSpace {
        GradedSpace { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].1
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for (_, d) in &self.basis {
            *m.entry(*d).or_insert(0) += 1;
        }
        m
    }

    pub fn in_degree(&self, k: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].1 == k).collect()
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.dims().keys().copied().collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("map of degree {degree} sends basis vector {vector} (degree {sdeg}) to a vector of degree {tdeg}")]
    DegreeMismatch { degree: i32, vector: usize, sdeg: i32, tdeg: i32 },
    #[error("differential does not square to zero (first failure at basis vector {0})")]
    NotDifferential(usize),
    #[error("map does not commute with the differentials (first failure at basis vector {0})")]
    NotChainMap(usize),
    #[error("cone right-hand side is not a cycle")]
    NotACycle,
    #[error("cone equations are unsolvable")]
    Unsolvable,
}

/// Linear map of fixed degree between graded spaces, stored row-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i32,
    pub rows: Vec<SparseRow>,
}

impl GradedMap {
    pub fn new(source: GradedSpace, target: GradedSpace, degree: i32, rows: Vec<SparseRow>) -> Result<GradedMap, LinalgError> {
        assert_eq!(rows.len(), source.dim());
        for (i, r) in rows.iter().enumerate() {
            for (j, _) in r {
                if target.degree(*j) != source.degree(i) + degree {
                    return Err(LinalgError::DegreeMismatch {
                        degree,
                        vector: i,
                        sdeg: source.degree(i),
                        tdeg: target.degree(*j),
                    });
                }
            }
        }
        Ok(GradedMap { source, target, degree, rows })
    }

    pub fn identity(space: &GradedSpace) -> GradedMap {
        let rows = (0..space.dim()).map(|i| vec![(i, Scalar::one())]).collect();
        GradedMap { source: space.clone(), target: space.clone(), degree: 0, rows }
    }

    pub fn zero(source: &GradedSpace, target: &GradedSpace, degree: i32) -> GradedMap {
        GradedMap { source: source.clone(), target: target.clone(), degree, rows: vec![Vec::new(); source.dim()] }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &GradedMap) -> GradedMap {
        let rows = self.rows.iter().map(|r| row_times(r, &other.rows)).collect();
        GradedMap { source: self.source.clone(), target: other.target.clone(), degree: self.degree + other.degree, rows }
    }

    pub fn apply(&self, v: &[(usize, Scalar)]) -> SparseRow {
        row_times(v, &self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn sub(&self, other: &GradedMap) -> GradedMap {
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| row_axpy(a, &Scalar::int(-1), b)).collect();
        GradedMap { source: self.source.clone(), target: self.target.clone(), degree: self.degree, rows }
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| row_axpy(a, &Scalar::one(), b)).collect();
        GradedMap { source: self.source.clone(), target: self.target.clone(), degree: self.degree, rows }
    }

    /// Rows restricted to source degree `k`, columns re-indexed to target degree `k + degree`.
    fn block(&self, k: i32) -> (Vec<usize>, Vec<usize>, Vec<SparseRow>) {
        let src = self.source.in_degree(k);
        let tgt = self.target.in_degree(k + self.degree);
        let pos: BTreeMap<usize, usize> = tgt.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let rows = src.iter().map(|&i| self.rows[i].iter().map(|(j, c)| (pos[j], c.clone())).collect()).collect();
        (src, tgt, rows)
    }
}

impl fmt::Display for GradedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            let terms: Vec<String> = r.iter().map(|(j, c)| format!("{c}*{}", self.target.basis[*j].0)).collect();
            writeln!(f, "{} -> {}", self.source.basis[i].0, terms.join(" + "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub space: GradedSpace,
    pub d: GradedMap,
}

impl Complex {
    pub fn new(space: GradedSpace, d_rows: Vec<SparseRow>) -> Result<Complex, LinalgError> {
        let d = GradedMap::new(space.clone(), space.clone(), 1, d_rows)?;
        let dd = d.then(&d);
        if let Some(i) = dd.rows.iter().position(|r| !r.is_empty()) {
            return Err(LinalgError::NotDifferential(i));
        }
        Ok(Complex { space, d })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// Cohomology in one degree: its dimension is `reps.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyDegree {
    pub degree: i32,
    pub cycles: usize,
    pub boundaries: usize,
    /// Representative cycles in the coordinates of the whole space.
    pub reps: Vec<SparseRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    pub degrees: Vec<CohomologyDegree>,
}

impl Cohomology {
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.degrees.iter().filter(|d| !d.reps.is_empty()).map(|d| (d.degree, d.reps.len())).collect()
    }

    pub fn dim(&self, k: i32) -> usize {
        self.degrees.iter().find(|d| d.degree == k).map_or(0, |d| d.reps.len())
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|d| d.reps.is_empty())
    }
}

fn boundary_rows(c: &Complex, k: i32) -> Vec<SparseRow> {
    c.space.in_degree(k - 1).iter().map(|&i| c.d.rows[i].clone()).filter(|r| !r.is_empty()).collect()
}

fn cycles_in_degree(c: &Complex, k: i32) -> Vec<SparseRow> {
    let (src, tgt, rows) = c.d.block(k);
    left_kernel(&rows, tgt.len())
        .into_iter()
        .map(|z| z.into_iter().map(|(i, v)| (src[i], v)).collect())
        .collect()
}

pub fn cohomology(c: &Complex) -> Result<Cohomology, LinalgError> {
    let dd = c.d.then(&c.d);
    if let Some(i) = dd.rows.iter().position(|r| !r.is_empty()) {
        return Err(LinalgError::NotDifferential(i));
    }
    let mut degrees = Vec::new();
    for k in c.space.degrees() {
        let cycles = cycles_in_degree(c, k);
        let bounds = boundary_rows(c, k);
        let mut ech = Echelon::new();
        for b in &bounds {
            ech.insert(b.clone(), Scalar::zero());
        }
        let nb = ech.rank();
        let mut reps = Vec::new();
        for z in &cycles {
            if let Inserted::Pivot(_) = ech.insert(z.clone(), Scalar::zero()) {
                reps.push(z.clone());
            }
        }
        degrees.push(CohomologyDegree { degree: k, cycles: cycles.len(), boundaries: nb, reps });
    }
    Ok(Cohomology { degrees })
}

pub fn is_chain_map(f: &GradedMap, s: &Complex, t: &Complex) -> Result<(), LinalgError> {
    let lhs = s.d.then(f);
    let rhs = f.then(&t.d);
    match lhs.rows.iter().zip(&rhs.rows).position(|(a, b)| a != b) {
        Some(i) => Err(LinalgError::NotChainMap(i)),
        None => Ok(()),
    }
}

/// True iff the chain map induces an isomorphism on cohomology.
pub fn is_quasi_iso(f: &GradedMap, s: &Complex, t: &Complex) -> Result<bool, LinalgError> {
    assert_eq!(f.degree, 0, "quasi-isomorphism test needs a degree 0 map");
    is_chain_map(f, s, t)?;
    let hs = cohomology(s)?;
    let ht = cohomology(t)?;
    let mut degs: Vec<i32> = s.space.degrees();
    degs.extend(t.space.degrees());
    degs.sort();
    degs.dedup();
    for k in degs {
        if hs.dim(k) != ht.dim(k) {
            return Ok(false);
        }
        let reps = hs.degrees.iter().find(|d| d.degree == k).map(|d| d.reps.clone()).unwrap_or_default();
        let mut ech = Echelon::new();
        for b in boundary_rows(t, k) {
            ech.insert(b, Scalar::zero());
        }
        for z in reps {
            if !matches!(ech.insert(f.apply(&z), Scalar::zero()), Inserted::Pivot(_)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The cone equations for an unknown pair `(x, y)` of maps out of a complex
/// of words `N`:
///
/// ```text
/// -D(x) = lambda,     D(y) + x·u = nu,
/// ```
///
/// where `x: N → S` has degree `degree`, `y: N → T` has degree `degree - 1`,
/// `u: S → T` is a chain map, and `D(z) = z·d - (-1)^{|z|} d_N·z` is the
/// differential of the hom complex.
#[derive(Clone, Debug)]
pub struct ConeProblem {
    pub word_degrees: Vec<i32>,
    pub word_d: Vec<SparseRow>,
    pub source: Complex,
    pub target: Complex,
    pub u: GradedMap,
    pub degree: i32,
    pub lambda: Vec<SparseRow>,
    pub nu: Vec<SparseRow>,
}

fn odd(k: i32) -> bool {
    k.rem_euclid(2) == 1
}

/// `D(z)` for a map `z` of degree `deg` from the words into a complex.
pub fn hom_differential(words_d: &[SparseRow], z: &[SparseRow], deg: i32, target: &Complex) -> Vec<SparseRow> {
    let s = Scalar::sign(!odd(deg));
    words_d
        .iter()
        .zip(z)
        .map(|(dw, zw)| {
            let a = target.d.apply(zw);
            let b = row_times(dw, z);
            row_axpy(&a, &s, &b)
        })
        .collect()
}

impl ConeProblem {
    /// Residuals of both cone equations for a candidate `(x, y)`.
    pub fn residuals(&self, x: &[SparseRow], y: &[SparseRow]) -> (Vec<SparseRow>, Vec<SparseRow>) {
        let dx = hom_differential(&self.word_d, x, self.degree, &self.source);
        let r1 = dx.iter().zip(&self.lambda).map(|(a, l)| row_axpy(&a.iter().map(|(c, v)| (*c, -v)).collect::<Vec<_>>(), &Scalar::int(-1), l)).collect();
        let dy = hom_differential(&self.word_d, y, self.degree - 1, &self.target);
        let r2 = dy
            .iter()
            .zip(x)
            .zip(&self.nu)
            .map(|((a, xw), n)| {
                let xu = self.u.apply(xw);
                row_axpy(&row_axpy(a, &Scalar::one(), &xu), &Scalar::int(-1), n)
            })
            .collect();
        (r1, r2)
    }

    /// The right-hand side is a cycle iff `D(lambda) = 0` and `D(nu) + lambda·u = 0`.
    pub fn is_cycle(&self) -> bool {
        let dl = hom_differential(&self.word_d, &self.lambda, self.degree + 1, &self.source);
        if dl.iter().any(|r| !r.is_empty()) {
            return false;
        }
        let dn = hom_differential(&self.word_d, &self.nu, self.degree, &self.target);
        dn.iter().zip(&self.lambda).all(|(a, l)| row_axpy(a, &Scalar::one(), &self.u.apply(l)).is_empty())
    }
}

/// Solve a cone problem; free unknowns are zero, ordered by (word, basis).
pub fn solve_cone(p: &ConeProblem) -> Result<(Vec<SparseRow>, Vec<SparseRow>), LinalgError> {
    if !p.is_cycle() {
        return Err(LinalgError::NotACycle);
    }
    let nw = p.word_degrees.len();
    // unknown indices
    let mut xcol: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); nw];
    let mut ycol: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); nw];
    let mut ncols = 0;
    for w in 0..nw {
        for t in p.source.space.in_degree(p.word_degrees[w] + p.degree) {
            xcol[w].insert(t, ncols);
            ncols += 1;
        }
    }
    for w in 0..nw {
        for s in p.target.space.in_degree(p.word_degrees[w] + p.degree - 1) {
            ycol[w].insert(s, ncols);
            ncols += 1;
        }
    }
    // both equations carry d_N with coefficient (-1)^p
    let ex = Scalar::sign(odd(p.degree));
    let mut eqs: Vec<(SparseRow, Scalar)> = Vec::new();
    for w in 0..nw {
        // -(x[w]·d_S) + (-1)^p Σ d_N[w][w'] x[w'] = lambda[w]
        let lam: BTreeMap<usize, Scalar> = p.lambda[w].iter().cloned().collect();
        for t2 in p.source.space.in_degree(p.word_degrees[w] + p.degree + 1) {
            let mut acc = BTreeMap::new();
            for (&t, &col) in &xcol[w] {
                for (j, c) in &p.source.d.rows[t] {
                    if *j == t2 {
                        acc_add(&mut acc, col, -c);
                    }
                }
            }
            for (w2, c) in &p.word_d[w] {
                if let Some(&col) = xcol[*w2].get(&t2) {
                    acc_add(&mut acc, col, &ex * c);
                }
            }
            eqs.push((acc_row(acc), lam.get(&t2).cloned().unwrap_or_else(Scalar::zero)));
        }
        // y[w]·d_T - (-1)^{p-1} Σ d_N[w][w'] y[w'] + x[w]·u = nu[w]
        let nu: BTreeMap<usize, Scalar> = p.nu[w].iter().cloned().collect();
        for s2 in p.target.space.in_degree(p.word_degrees[w] + p.degree) {
            let mut acc = BTreeMap::new();
            for (&s, &col) in &ycol[w] {
                for (j, c) in &p.target.d.rows[s] {
                    if *j == s2 {
                        acc_add(&mut acc, col, c.clone());
                    }
                }
            }
            for (w2, c) in &p.word_d[w] {
                if let Some(&col) = ycol[*w2].get(&s2) {
                    acc_add(&mut acc, col, &ex * c);
                }
            }
            for (&t, &col) in &xcol[w] {
                for (j, c) in &p.u.rows[t] {
                    if *j == s2 {
                        acc_add(&mut acc, col, c.clone());
                    }
                }
            }
            eqs.push((acc_row(acc), nu.get(&s2).cloned().unwrap_or_else(Scalar::zero)));
        }
    }
    let sol = solve_sparse(ncols, eqs).ok_or(LinalgError::Unsolvable)?;
    let x = xcol.iter().map(|m| m.iter().filter(|(_, &c)| !sol[c].is_zero()).map(|(&t, &c)| (t, sol[c].clone())).collect()).collect();
    let y = ycol.iter().map(|m| m.iter().filter(|(_, &c)| !sol[c].is_zero()).map(|(&s, &c)| (s, sol[c].clone())).collect()).collect();
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::int(n)
    }

    #[test]
    fn echelon_pivots_ignore_row_order() {
        let rows = vec![vec![q(0), q(1), q(1)], vec![q(1), q(1), q(0)], vec![q(1), q(2), q(1)]];
        let b = vec![q(1), q(2), q(3)];
        let x1 = solve_linear(&rows, &b).unwrap();
        let rev: Vec<_> = rows.iter().rev().cloned().collect();
        let brev: Vec<_> = b.iter().rev().cloned().collect();
        assert_eq!(x1, solve_linear(&rev, &brev).unwrap());
        assert_eq!(x1, vec![q(1), q(1), q(0)]);
    }

    #[test]
    fn left_kernel_dimension() {
        let rows = vec![vec![(0, q(1))], vec![(0, q(2))], vec![]];
        let k = left_kernel(&rows, 1);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(row_times(v, &rows).is_empty());
        }
    }
}
