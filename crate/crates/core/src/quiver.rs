//! Graded quivers with a global generator numbering.
//!
//! Every hom space is spanned by named generators. Names are unique across
//! the whole quiver so that files can refer to basis elements by name alone.

use std::collections::HashMap;

use thiserror::Error;

use crate::linalg::GradedSpace;

pub type ObjId = u32;
pub type GenId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
    pub degree: i32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuiverError {
    #[error("duplicate object '{0}'")]
    DuplicateObject(String),
    #[error("duplicate generator '{0}'")]
    DuplicateGenerator(String),
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error("object sets differ")]
    ObjectMismatch,
}

#[derive(Clone, Debug, Default)]
pub struct Quiver {
    objects: Vec<String>,
    gens: Vec<Generator>,
    hom: HashMap<(ObjId, ObjId), Vec<GenId>>,
    outgoing: Vec<Vec<GenId>>,
    by_name: HashMap<String, GenId>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Quiver) -> bool {
        self.objects == other.objects && self.gens == other.gens
    }
}

impl Eq for Quiver {}

impl Quiver {
    pub fn new<S: Into<String>>(objects: impl IntoIterator<Item = S>) -> Result<Quiver, QuiverError> {
        let mut q = Quiver::default();
        for o in objects {
            q.add_object(o.into())?;
        }
        Ok(q)
    }

    pub fn add_object(&mut self, name: String) -> Result<ObjId, QuiverError> {
        if self.objects.contains(&name) {
            return Err(QuiverError::DuplicateObject(name));
        }
        self.objects.push(name);
        self.outgoing.push(Vec::new());
        Ok((self.objects.len() - 1) as ObjId)
    }

    pub fn add_gen(&mut self, name: impl Into<String>, src: ObjId, tgt: ObjId, degree: i32) -> Result<GenId, QuiverError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(QuiverError::DuplicateGenerator(name));
        }
        assert!((src as usize) < self.objects.len() && (tgt as usize) < self.objects.len(), "object out of range");
        let id = self.gens.len() as GenId;
        self.by_name.insert(name.clone(), id);
        self.gens.push(Generator { name, src, tgt, degree });
        self.hom.entry((src, tgt)).or_default().push(id);
        self.outgoing[src as usize].push(id);
        Ok(id)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name).map(|i| i as ObjId)
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.objects[x as usize]
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen(&self, g: GenId) -> &Generator {
        &self.gens[g as usize]
    }

    pub fn degree(&self, g: GenId) -> i32 {
        self.gens[g as usize].degree
    }

    pub fn src(&self, g: GenId) -> ObjId {
        self.gens[g as usize].src
    }

    pub fn tgt(&self, g: GenId) -> ObjId {
        self.gens[g as usize].tgt
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.gens[g as usize].name
    }

    pub fn gen_id(&self, name: &str) -> Option<GenId> {
        self.by_name.get(name).copied()
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[GenId] {
        self.hom.get(&(x, y)).map_or(&[], |v| v.as_slice())
    }

    pub fn outgoing(&self, x: ObjId) -> &[GenId] {
        &self.outgoing[x as usize]
    }

    /// The hom space as a graded space; basis order is generator order.
    pub fn hom_space(&self, x: ObjId, y: ObjId) -> GradedSpace {
        GradedSpace::new(self.hom(x, y).iter().map(|&g| (self.name(g).to_string(), self.degree(g))).collect())
    }

    /// Degree histogram of one hom space.
    pub fn dims(&self, x: ObjId, y: ObjId) -> std::collections::BTreeMap<i32, usize> {
        self.hom_space(x, y).dims()
    }

    pub fn same_objects(&self, other: &Quiver) -> bool {
        self.objects == other.objects
    }
}

/// `(A⊗B)(X,Z) = ⊕_Y A(X,Y)⊗B(Y,Z)`, basis ordered by (Y, left, right).
pub fn tensor_quivers(a: &Quiver, b: &Quiver) -> Result<Quiver, QuiverError> {
    if !a.same_objects(b) {
        return Err(QuiverError::ObjectMismatch);
    }
    let mut out = Quiver::new(a.objects().iter().cloned())?;
    let n = a.num_objects() as ObjId;
    for x in 0..n {
        for z in 0..n {
            for y in 0..n {
                for &ga in a.hom(x, y) {
                    for &gb in b.hom(y, z) {
                        let name = format!("({}|{}|{})", a.name(ga), a.object_name(y), b.name(gb));
                        out.add_gen(name, x, z, a.degree(ga) + b.degree(gb))?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The unit for `tensor_quivers`: one degree 0 generator per object.
pub fn discrete_quiver<S: Into<String> + Clone>(objects: &[S]) -> Result<Quiver, QuiverError> {
    let mut q = Quiver::new(objects.iter().cloned().map(Into::into))?;
    for x in 0..q.num_objects() as ObjId {
        let name = format!("1_{}", q.object_name(x));
        q.add_gen(name, x, x, 0)?;
    }
    Ok(q)
}

/// Degree `n` of the result is degree `n + k` of the input.
pub fn suspend(a: &Quiver, k: i32) -> Quiver {
    let mut out = a.clone();
    for g in &mut out.gens {
        g.degree -= k;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suspension_shifts_down() {
        let q = discrete_quiver(&["X"]).unwrap();
        let s = suspend(&q, 1);
        assert_eq!(s.degree(0), -1);
        assert_eq!(suspend(&s, -1), q);
    }

    #[test]
    fn tensor_path_composition() {
        let mut a = Quiver::new(["X", "Y"]).unwrap();
        a.add_gen("f", 0, 1, 0).unwrap();
        let mut b = Quiver::new(["X", "Y"]).unwrap();
        b.add_gen("g", 1, 0, 0).unwrap();
        let t = tensor_quivers(&a, &b).unwrap();
        assert_eq!(t.hom(0, 0).len(), 1);
        assert_eq!(t.hom(0, 1).len() + t.hom(1, 0).len() + t.hom(1, 1).len(), 0);
    }
}
