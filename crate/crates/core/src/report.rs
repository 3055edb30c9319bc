use serde::Serialize;

/// First failing evaluation of an identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub equation: String,
    pub arity: usize,
    pub path: Vec<String>,
    pub word: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of basis inputs on which the identity was evaluated.
    pub evaluated: usize,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn pass(name: impl Into<String>, evaluated: usize) -> Check {
        Check { name: name.into(), passed: true, evaluated, witness: None }
    }

    pub fn fail(name: impl Into<String>, evaluated: usize, witness: Witness) -> Check {
        Check { name: name.into(), passed: false, evaluated, witness: Some(witness) }
    }

    /// Combine several checks; the first failure wins.
    pub fn all(name: impl Into<String>, checks: impl IntoIterator<Item = Check>) -> Check {
        let mut evaluated = 0;
        for c in checks {
            evaluated += c.evaluated;
            if !c.passed {
                return Check { name: name.into(), passed: false, evaluated, witness: c.witness };
            }
        }
        Check::pass(name, evaluated)
    }
}

/// Accumulates evaluations and keeps the first nonzero residual.
pub(crate) struct Tally {
    pub evaluated: usize,
    pub witness: Option<Witness>,
}

impl Tally {
    pub fn new() -> Tally {
        Tally { evaluated: 0, witness: None }
    }

    pub fn failed(&self) -> bool {
        self.witness.is_some()
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.evaluated += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    pub fn finish(self, name: impl Into<String>) -> Check {
        match self.witness {
            None => Check::pass(name, self.evaluated),
            Some(w) => Check::fail(name, self.evaluated, w),
        }
    }
}
