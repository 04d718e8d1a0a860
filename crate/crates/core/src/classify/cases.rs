//! Parameterised families of dimension-5 nilpotent algebras, one per case.
//!
//! Every basis element carries a weight `w`, the largest `n` with the element
//! in `A^[n]`. Since `A^[i]·A^[j] ⊆ A^[i+j]`, the constant `c[i][j][k]` can be
//! nonzero only when `w_k ≥ w_i + w_j`; each such slot is a free parameter
//! unless the case pins or fixes it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::word::{Condition, ConditionKind, Word};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::FpVector;
use crate::prelie::PreLieAlgebra;

pub const CASE_DIM: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Any,
    NonZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    /// `(i, j, k)`: coefficient of `e_k` in `e_i · e_j`.
    pub slot: (usize, usize, usize),
    pub domain: Domain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    Zero,
    Const(i64),
    Param(usize),
}

#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub id: String,
    /// Case id without the `/k` shape-variant suffix.
    pub family: String,
    pub generator_count: usize,
    pub weights: Vec<u32>,
    pub basis_names: Vec<String>,
    entries: Vec<Entry>,
    pub params: Vec<Param>,
    pub conditions: Vec<Condition>,
    /// Strong chain dimensions `A, A^[2], …` down to the first zero term.
    pub expected_strong: Vec<usize>,
}

impl CaseSpec {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> Entry {
        let n = self.dim();
        self.entries[(i * n + j) * n + k]
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Number of points in the declared parameter domain, saturating.
    pub fn parameter_space_size(&self, p: u32) -> u128 {
        self.params.iter().fold(1u128, |acc, q| {
            let d = match q.domain {
                Domain::Any => p as u128,
                Domain::NonZero => p as u128 - 1,
            };
            acc.saturating_mul(d)
        })
    }

    pub fn check_params(&self, field: PrimeField, params: &[u32]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::Usage(format!(
                "case {} takes {} parameters, got {}",
                self.id,
                self.params.len(),
                params.len()
            )));
        }
        for (q, &v) in self.params.iter().zip(params) {
            if v >= field.p() || (q.domain == Domain::NonZero && v == 0) {
                return Err(Error::ParamDomain {
                    name: q.name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Product table at a parameter point; domains are not checked.
    pub fn table_at(&self, field: PrimeField, params: &[u32]) -> Vec<FpVector> {
        let n = self.dim();
        let mut table = vec![FpVector::zero(field, n); n * n];
        for (ij, slot) in table.iter_mut().enumerate() {
            for k in 0..n {
                let v = match self.entries[ij * n + k] {
                    Entry::Zero => continue,
                    Entry::Const(c) => field.reduce(c),
                    Entry::Param(q) => params[q],
                };
                slot.set(k, v);
            }
        }
        table
    }

    pub fn algebra_at(&self, field: PrimeField, params: &[u32]) -> PreLieAlgebra {
        self.unnamed_algebra_at(field, params)
            .with_names(self.basis_names.clone())
            .expect("one name per basis element")
    }

    /// [`Self::algebra_at`] without basis names, for hot loops.
    pub fn unnamed_algebra_at(&self, field: PrimeField, params: &[u32]) -> PreLieAlgebra {
        PreLieAlgebra::from_table(field, self.dim(), self.table_at(field, params))
            .expect("case tables have the case dimension")
    }

    /// Parameter values reproducing `a`, if its table fits this case's shape.
    pub fn params_of(&self, a: &PreLieAlgebra) -> Option<Vec<u32>> {
        let n = self.dim();
        if a.dim() != n {
            return None;
        }
        let f = a.field();
        let mut out = vec![0u32; self.params.len()];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = a.structure_constant(i, j, k);
                    match self.entry(i, j, k) {
                        Entry::Zero if v != 0 => return None,
                        Entry::Const(c) if f.reduce(c) != v => return None,
                        Entry::Param(q) => out[q] = v,
                        _ => {}
                    }
                }
            }
        }
        self.check_params(f, &out).ok().map(|_| out)
    }
}

type Namer = fn(&[u32], &[String], usize, usize, usize) -> String;

struct CaseBuilder {
    id: String,
    family: String,
    generator_count: usize,
    weights: Vec<u32>,
    names: Vec<String>,
    pins: BTreeMap<(usize, usize), usize>,
    fixed: BTreeMap<(usize, usize, usize), i64>,
    nonzero: BTreeSet<(usize, usize, usize)>,
    aliases: BTreeMap<(usize, usize, usize), String>,
    conditions: Vec<Condition>,
    expected: Vec<usize>,
    namer: Namer,
}

impl CaseBuilder {
    fn new(id: &str, generator_count: usize, weights: &[u32], names: &[&str], namer: Namer) -> Self {
        let family = id.split('/').next().unwrap().to_string();
        CaseBuilder {
            id: id.to_string(),
            family,
            generator_count,
            weights: weights.to_vec(),
            names: names.iter().map(|s| s.to_string()).collect(),
            pins: BTreeMap::new(),
            fixed: BTreeMap::new(),
            nonzero: BTreeSet::new(),
            aliases: BTreeMap::new(),
            conditions: Vec::new(),
            expected: Vec::new(),
            namer,
        }
    }

    /// `e_i · e_j = e_k` exactly.
    fn pin(mut self, i: usize, j: usize, k: usize) -> Self {
        self.pins.insert((i, j), k);
        self
    }

    fn fix(mut self, slot: (usize, usize, usize), v: i64) -> Self {
        self.fixed.insert(slot, v);
        self
    }

    fn nonzero(mut self, slot: (usize, usize, usize)) -> Self {
        self.nonzero.insert(slot);
        self
    }

    fn alias(mut self, slot: (usize, usize, usize), name: &str) -> Self {
        self.aliases.insert(slot, name.to_string());
        self
    }

    fn conditions(mut self, texts: &[&str]) -> Self {
        for t in texts {
            let c = Condition::parse(t, &self.names).expect("case condition parses");
            self.conditions.push(c);
        }
        self
    }

    fn expect(mut self, dims: &[usize]) -> Self {
        self.expected = dims.to_vec();
        self
    }

    fn build(self) -> CaseSpec {
        let n = self.weights.len();
        let w = &self.weights;
        let mut entries = vec![Entry::Zero; n * n * n];
        let mut params = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let slot = (i, j, k);
                    let allowed = w[k] >= w[i] + w[j];
                    let e = if let Some(&t) = self.pins.get(&(i, j)) {
                        assert!(
                            w[t] >= w[i] + w[j],
                            "{}: pin {i}·{j} = e{t} breaks the weights",
                            self.id
                        );
                        if k == t {
                            Entry::Const(1)
                        } else {
                            Entry::Zero
                        }
                    } else if !allowed {
                        assert!(
                            !self.fixed.contains_key(&slot),
                            "{}: fixed slot outside weights",
                            self.id
                        );
                        Entry::Zero
                    } else if let Some(&v) = self.fixed.get(&slot) {
                        if v == 0 {
                            Entry::Zero
                        } else {
                            Entry::Const(v)
                        }
                    } else {
                        let name = self
                            .aliases
                            .get(&slot)
                            .cloned()
                            .unwrap_or_else(|| (self.namer)(w, &self.names, i, j, k));
                        let domain = if self.nonzero.contains(&slot) {
                            Domain::NonZero
                        } else {
                            Domain::Any
                        };
                        params.push(Param { name, slot, domain });
                        Entry::Param(params.len() - 1)
                    };
                    entries[(i * n + j) * n + k] = e;
                }
            }
        }
        let mut seen = BTreeSet::new();
        for p in &params {
            assert!(
                seen.insert(p.name.clone()),
                "{}: duplicate parameter name {}",
                self.id,
                p.name
            );
        }
        for s in self.nonzero.iter().chain(self.aliases.keys()) {
            assert!(
                params.iter().any(|p| p.slot == *s),
                "{}: slot {s:?} is not free",
                self.id
            );
        }
        CaseSpec {
            id: self.id,
            family: self.family,
            generator_count: self.generator_count,
            weights: self.weights,
            basis_names: self.names,
            entries,
            params,
            conditions: self.conditions,
            expected_strong: self.expected,
        }
    }
}

/// `c{i}{j}_{k}`, used for one-generator cases.
fn slot_name(_: &[u32], _: &[String], i: usize, j: usize, k: usize) -> String {
    format!("c{i}{j}_{k}")
}

/// Greek-letter names for cases with two or more generators:
/// products of generators are `alpha, beta, gamma` by target, a generator
/// times a weight-2 element is `delta, nu` by target, everything else `mu`.
fn greek_name(w: &[u32], names: &[String], i: usize, j: usize, k: usize) -> String {
    let gens = w.iter().filter(|&&x| x == 1).count();
    let letter = if w[i] == 1 && w[j] == 1 {
        ["alpha", "beta", "gamma"][k - gens]
    } else if (w[i] == 1) != (w[j] == 1) && w[i].max(w[j]) == 2 {
        let pos = (gens..k).filter(|&t| w[t] >= 3).count();
        ["delta", "nu"][pos]
    } else {
        "mu"
    };
    format!("{letter}_{}{}", names[i], names[j])
}

/// One-generator case from the words of its basis, written in `x` and `x2`.
fn one_generator(id: &str, words: [&str; 5], weights: [u32; 5]) -> CaseBuilder {
    let atoms = ["x".to_string(), "x2".to_string()];
    let x2 = Word::Mul(Box::new(Word::Basis(0)), Box::new(Word::Basis(0)));
    let expand = |w: &Word| -> Word {
        fn go(w: &Word, x2: &Word) -> Word {
            match w {
                Word::Basis(1) => x2.clone(),
                Word::Mul(a, b) => Word::Mul(Box::new(go(a, x2)), Box::new(go(b, x2))),
                other => other.clone(),
            }
        }
        go(w, &x2)
    };
    let trees: Vec<Word> = words
        .iter()
        .map(|t| expand(&Word::parse(t, &atoms).expect("basis word parses")))
        .collect();
    // Replace subtrees by basis elements, innermost first.
    fn collapse(w: &Word, trees: &[Word], skip: usize) -> Word {
        let inner = match w {
            Word::Mul(a, b) => Word::Mul(
                Box::new(collapse(a, trees, usize::MAX)),
                Box::new(collapse(b, trees, usize::MAX)),
            ),
            other => other.clone(),
        };
        match trees.iter().position(|t| t == w) {
            Some(k) if k != skip => Word::Basis(k),
            _ => inner,
        }
    }
    let mut b = CaseBuilder::new(id, 1, &weights, &words, slot_name);
    for k in 1..5 {
        let c = collapse(&trees[k], &trees, k);
        if let Some((i, j)) = c.as_basis_product() {
            b = b.pin(i, j, k);
        } else {
            b.conditions.push(Condition {
                text: format!("{} = e{k}", words[k]),
                kind: ConditionKind::Equal(c, Word::Basis(k)),
            });
        }
    }
    b
}

#[allow(clippy::vec_init_then_push)]
fn one_generator_cases() -> Vec<CaseSpec> {
    let mut out = Vec::new();
    out.push(
        one_generator(
            "G1-A7neq-A5neqA4",
            ["x", "x2", "x2*x", "(x2*x)*x", "(x2*x)*((x2*x)*x)"],
            [1, 2, 3, 4, 7],
        )
        .nonzero((0, 1, 2))
        .alias((0, 1, 2), "alpha")
        .conditions(&[
            "x*(x2*x) in A^[5]",
            "x*(x*x2) in A^[5]",
            "x*(x*(x*x2)) = 0",
            "x*(x*(x2*x)) = 0",
            "(x*(x*x2))*x = 0",
            "(x*(x2*x))*x = 0",
            "(x2*x)*x2 = ((x2*x)*x)*x + x*((x2*x)*x)",
        ])
        .expect(&[5, 4, 3, 2, 1, 1, 1, 0])
        .build(),
    );
    out.push(
        one_generator(
            "G1-A7neq-A5eqA4",
            ["x", "x2", "x2*x", "x2*(x2*x)", "x2*(x2*(x2*x))"],
            [1, 2, 3, 5, 7],
        )
        .fix((0, 1, 2), 0)
        .alias((0, 2, 3), "alpha1")
        .alias((2, 0, 3), "alpha2")
        .conditions(&[
            "x*x2 in A^[4]",
            "(x2*x)*x - x2*x2 = (x*x2)*x - x*(x2*x)",
            "x*(x*(x*x2)) = 0",
            "(x*(x*x2))*x = 0",
            "x*((x*x2)*x) = 0",
            "((x*x2)*x)*x = 0",
            "(x*x2)*x2 = 0",
        ])
        .expect(&[5, 4, 3, 2, 2, 1, 1, 0])
        .build(),
    );
    out.push(
        one_generator(
            "G1-A6neq-A5neqA4",
            ["x", "x2", "x2*x", "(x2*x)*x", "x2*((x2*x)*x)"],
            [1, 2, 3, 4, 6],
        )
        .fix((0, 1, 2), 0)
        .conditions(&[
            "x*x2 in A^[4]",
            "x*(x*x2) in A^[5]",
            "(x*x2)*x in A^[5]",
            "x*(x2*x) - (x2*x)*x in A^[5]",
            "x*((x2*x)*x) = x*(x*(x2*x))",
            "((x2*x)*x)*x = (x*(x2*x))*x",
            "x*((x*x2)*x) = 0",
            "x*(x*(x*x2)) = 0",
            "((x*x2)*x)*x = 0",
            "(x*(x*x2))*x = 0",
            "(x2*x2)*x = 2*(((x2*x)*x)*x)",
            "x*(x2*x2) = 2*(x*((x2*x)*x))",
            "x2*(x*x2) = (x2*x)*x2 + x*(x2*x2)",
        ])
        .expect(&[5, 4, 3, 2, 1, 1, 0])
        .build(),
    );
    out.push(
        one_generator(
            "G1-A6neq-A5eqA4",
            ["x", "x2", "x2*x", "x2*(x2*x)", "(x2*(x2*x))*x"],
            [1, 2, 3, 5, 6],
        )
        .fix((0, 1, 2), 0)
        .conditions(&[
            "x*x2 in A^[4]",
            "x*(x*x2) in A^[6]",
            "(x*x2)*x in A^[6]",
            "x*(x*(x*x2)) = 0",
            "(x*(x*x2))*x = 0",
            "x2*(x*x2) = 0",
            "(x*x2)*x2 = 0",
            "x*(x*(x2*x)) in A^[6]",
            "(x*(x2*x))*x in A^[6]",
            "x*((x2*x)*x) in A^[6]",
            "((x2*x)*x)*x in A^[6]",
            "(x2*x)*x2 in A^[6]",
            "(x2*(x2*x))*x = x*(x2*(x2*x))",
            "(x2*(x2*x))*x = -((x2*x)*(x2*x))",
        ])
        .expect(&[5, 4, 3, 2, 2, 1, 0])
        .build(),
    );
    // u in {x·x², x²·x}, v in {u·x, x·u}, w = l·x or x·l with l in {u·x, x·u}.
    let mut k = 0;
    for u in ["x*x2", "x2*x"] {
        for v in [format!("({u})*x"), format!("x*({u})")] {
            for l in [format!("({u})*x"), format!("x*({u})")] {
                for w in [format!("({l})*x"), format!("x*({l})")] {
                    let id = format!("G1-A5neq-A5neqA4/{k}");
                    out.push(
                        one_generator(&id, ["x", "x2", u, &v, &w], [1, 2, 3, 4, 5])
                            .expect(&[5, 4, 3, 2, 1, 0])
                            .build(),
                    );
                    k += 1;
                }
            }
        }
    }
    out.push(
        one_generator(
            "G1-A5neq-A5eqA4",
            ["x", "x2", "x2*x", "x*x2", "x2*(x2*x)"],
            [1, 2, 3, 3, 5],
        )
        .expect(&[5, 4, 3, 1, 1, 0])
        .build(),
    );
    let mut k = 0;
    for u in ["x2*x", "x*x2"] {
        for a in [format!("({u})*x"), format!("x*({u})")] {
            let id = format!("G1-A4neq-dim1/{k}");
            out.push(
                one_generator(&id, ["x", "x2", "x2*x", "x*x2", &a], [1, 2, 3, 3, 4])
                    .expect(&[5, 4, 3, 1, 0])
                    .build(),
            );
            k += 1;
        }
    }
    for (k, u) in ["x2*x", "x*x2"].into_iter().enumerate() {
        let id = format!("G1-A4neq-dim2/{k}");
        let xu = format!("x*({u})");
        let ux = format!("({u})*x");
        out.push(
            one_generator(&id, ["x", "x2", u, &xu, &ux], [1, 2, 3, 4, 4])
                .expect(&[5, 4, 3, 2, 0])
                .build(),
        );
    }
    out
}

fn several_generator_cases() -> Vec<CaseSpec> {
    let two = ["x", "y", "u", "v", "w"];
    let three = ["x", "y", "z", "u", "v"];
    let four = ["x", "y", "z", "u", "v"];
    vec![
        CaseBuilder::new("G2-A3zero", 2, &[1, 1, 2, 2, 2], &two, greek_name)
            .expect(&[5, 3, 0])
            .build(),
        CaseBuilder::new("G2-A4zero-dim2", 2, &[1, 1, 2, 3, 3], &two, greek_name)
            .expect(&[5, 3, 2, 0])
            .build(),
        CaseBuilder::new("G2-A4zero-dim1", 2, &[1, 1, 2, 2, 3], &two, greek_name)
            .expect(&[5, 3, 1, 0])
            .build(),
        CaseBuilder::new("G2-A5zero", 2, &[1, 1, 2, 3, 4], &two, greek_name)
            .expect(&[5, 3, 2, 1, 0])
            .build(),
        // v·u lies in A^[3]·A^[2], which vanishes when A^[4] = A^[5] and A^[6] = 0.
        CaseBuilder::new("G2-A5eqA4", 2, &[1, 1, 2, 3, 5], &two, greek_name)
            .fix((3, 2, 4), 0)
            .expect(&[5, 3, 2, 1, 1, 0])
            .build(),
        CaseBuilder::new("G3-A3zero", 3, &[1, 1, 1, 2, 2], &three, greek_name)
            .expect(&[5, 2, 0])
            .build(),
        CaseBuilder::new("G3-A4zero", 3, &[1, 1, 1, 2, 3], &three, greek_name)
            .expect(&[5, 2, 1, 0])
            .build(),
        CaseBuilder::new("G4", 4, &[1, 1, 1, 1, 2], &four, greek_name)
            .expect(&[5, 1, 0])
            .build(),
    ]
}

/// Every case and shape variant, one-generator cases first.
pub fn all_cases() -> Vec<CaseSpec> {
    let mut v = one_generator_cases();
    v.extend(several_generator_cases());
    v
}

/// Family ids, in the order of [`all_cases`].
pub fn case_ids() -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for c in all_cases() {
        if !ids.contains(&c.family) {
            ids.push(c.family);
        }
    }
    ids
}

/// All variants of a family id, or the single variant `family/k`.
pub fn expand(id: &str) -> Result<Vec<CaseSpec>> {
    let v: Vec<CaseSpec> = all_cases()
        .into_iter()
        .filter(|c| c.id == id || c.family == id)
        .collect();
    if v.is_empty() {
        Err(Error::UnknownCase(id.to_string()))
    } else {
        Ok(v)
    }
}

/// A single case or variant by exact id.
pub fn case(id: &str) -> Result<CaseSpec> {
    all_cases()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCase(id.to_string()))
}
