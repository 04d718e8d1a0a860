//! Level-by-level solution of the derived relations.
//!
//! A relation with output `e_m` is a sum of products `c[·][·][k] · c[·][·][m]`
//! with `w_k < w_m`. Once every parameter targeting a lower weight is fixed,
//! the relations at weight `w_m` are affine in the parameters targeting weight
//! `w_m`. The solution set is therefore a tower of affine spaces, walked
//! level by level.

use rand::Rng;

use super::cases::{CaseSpec, Domain};
use super::relations::Relation;
use crate::error::{Error, Result};
use crate::field::PrimeField;

/// `coef · lower · unknown`, where an absent factor counts as 1.
#[derive(Clone, Debug)]
struct Term {
    coef: i64,
    lower: Option<usize>,
    unknown: Option<usize>,
}

#[derive(Clone, Debug)]
struct Level {
    /// Parameter indices solved at this level.
    unknowns: Vec<usize>,
    nonzero: Vec<bool>,
    rows: Vec<Vec<Term>>,
}

/// Affine solution `x0 + span(basis)` of one level.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub x0: Vec<u32>,
    pub basis: Vec<Vec<u32>>,
}

impl AffineSolution {
    pub fn size(&self, p: u32) -> u128 {
        (p as u128).saturating_pow(self.basis.len() as u32)
    }

    /// Point with odometer index `idx` (digit `i` scales `basis[i]`).
    pub fn point(&self, field: PrimeField, mut idx: u128, out: &mut [u32]) {
        let p = field.p() as u128;
        out.copy_from_slice(&self.x0);
        for b in &self.basis {
            let t = (idx % p) as u32;
            idx /= p;
            if t != 0 {
                for (o, &v) in out.iter_mut().zip(b) {
                    *o = field.add(*o, field.mul(t, v));
                }
            }
        }
    }

    /// Visits the points with indices `lo..hi` in order. Stepping the
    /// odometer adds one basis vector per moved digit, since `p · b = 0`.
    pub fn for_each_in(&self, field: PrimeField, lo: u128, hi: u128, visit: &mut dyn FnMut(&[u32])) {
        if lo >= hi {
            return;
        }
        let p = field.p();
        let mut vals = vec![0u32; self.x0.len()];
        self.point(field, lo, &mut vals);
        let mut digits = Vec::with_capacity(self.basis.len());
        let mut idx = lo;
        for _ in &self.basis {
            digits.push((idx % p as u128) as u32);
            idx /= p as u128;
        }
        for _ in lo..hi {
            visit(&vals);
            for (d, b) in digits.iter_mut().zip(&self.basis) {
                for (o, &v) in vals.iter_mut().zip(b) {
                    *o = field.add(*o, v);
                }
                *d += 1;
                if *d < p {
                    break;
                }
                *d = 0;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    field: PrimeField,
    nparams: usize,
    levels: Vec<Level>,
}

impl Tower {
    /// `fixed` pins parameters to values with extra rows `x_q = v`.
    pub fn new(spec: &CaseSpec, rels: &[Relation], field: PrimeField, fixed: &[(usize, u32)]) -> Tower {
        let w = &spec.weights;
        let level_of_param = |q: usize| w[spec.params[q].slot.2];
        let mut weights: Vec<u32> = spec.params.iter().map(|p| w[p.slot.2]).collect();
        weights.extend(rels.iter().map(|r| w[r.output]));
        weights.sort_unstable();
        weights.dedup();
        let mut levels: Vec<Level> = weights
            .iter()
            .map(|&lw| {
                let unknowns: Vec<usize> = (0..spec.params.len()).filter(|&q| level_of_param(q) == lw).collect();
                let nonzero = unknowns
                    .iter()
                    .map(|&q| spec.params[q].domain == Domain::NonZero)
                    .collect();
                Level {
                    unknowns,
                    nonzero,
                    rows: Vec::new(),
                }
            })
            .collect();
        for r in rels {
            let lw = w[r.output];
            let li = weights.binary_search(&lw).unwrap();
            let level = &mut levels[li];
            let mut row = Vec::new();
            for (mono, coef) in r.poly.terms() {
                let mut t = Term {
                    coef,
                    lower: None,
                    unknown: None,
                };
                for &v in mono {
                    let v = v as usize;
                    let vw = level_of_param(v);
                    if vw == lw {
                        assert!(t.unknown.is_none(), "two same-level factors in a relation");
                        t.unknown = Some(level.unknowns.iter().position(|&u| u == v).unwrap());
                    } else {
                        assert!(vw < lw && t.lower.is_none(), "relation is not affine in its level");
                        t.lower = Some(v);
                    }
                }
                row.push(t);
            }
            level.rows.push(row);
        }
        for &(q, v) in fixed {
            let li = weights.binary_search(&level_of_param(q)).unwrap();
            let level = &mut levels[li];
            let pos = level.unknowns.iter().position(|&u| u == q).unwrap();
            level.rows.push(vec![
                Term {
                    coef: 1,
                    lower: None,
                    unknown: Some(pos),
                },
                Term {
                    coef: -(v as i64),
                    lower: None,
                    unknown: None,
                },
            ]);
        }
        Tower {
            field,
            nparams: spec.params.len(),
            levels,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    /// Solves level `li` given all lower parameters in `point`.
    pub fn solve_level(&self, li: usize, point: &[u32]) -> Option<AffineSolution> {
        let f = self.field;
        let level = &self.levels[li];
        let u = level.unknowns.len();
        let mut m: Vec<Vec<u32>> = level
            .rows
            .iter()
            .map(|row| {
                let mut r = vec![0u32; u + 1];
                for t in row {
                    let mut c = f.reduce(t.coef);
                    if let Some(l) = t.lower {
                        c = f.mul(c, point[l]);
                    }
                    match t.unknown {
                        Some(x) => r[x] = f.add(r[x], c),
                        // constant moves to the right-hand side
                        None => r[u] = f.sub(r[u], c),
                    }
                }
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..u {
            let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(row, pr);
            let inv = f.inv(m[row][col]).expect("nonzero pivot");
            for v in m[row].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for r in 0..m.len() {
                if r != row && m[r][col] != 0 {
                    let s = m[r][col];
                    let pivot = m[row].clone();
                    for (v, &q) in m[r].iter_mut().zip(&pivot) {
                        *v = f.sub(*v, f.mul(s, q));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if m[row..].iter().any(|r| r[u] != 0) {
            return None;
        }
        let mut x0 = vec![0u32; u];
        for (r, &c) in pivots.iter().enumerate() {
            x0[c] = m[r][u];
        }
        let basis = (0..u)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut b = vec![0u32; u];
                b[free] = 1;
                for (r, &c) in pivots.iter().enumerate() {
                    b[c] = f.neg(m[r][free]);
                }
                b
            })
            .collect();
        Some(AffineSolution { x0, basis })
    }

    /// Writes a level's values into the full point; false if a nonzero
    /// domain is violated.
    pub fn assign(&self, li: usize, values: &[u32], point: &mut [u32]) -> bool {
        let level = &self.levels[li];
        for ((&q, &nz), &v) in level.unknowns.iter().zip(&level.nonzero).zip(values) {
            if nz && v == 0 {
                return false;
            }
            point[q] = v;
        }
        true
    }

    fn has_nonzero(&self, li: usize) -> bool {
        self.levels[li].nonzero.iter().any(|&b| b)
    }

    /// Visits every solution below level `li`, given lower levels in `point`.
    pub fn walk(&self, li: usize, point: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if li == self.levels.len() {
            visit(point);
            return;
        }
        let Some(sol) = self.solve_level(li, point) else {
            return;
        };
        sol.for_each_in(self.field, 0, sol.size(self.field.p()), &mut |vals| {
            if self.assign(li, vals, point) {
                self.walk(li + 1, point, visit);
            }
        });
    }

    /// Number of solutions, or `Err(lower bound)` once it exceeds `limit`.
    pub fn count(&self, limit: u128) -> std::result::Result<u128, u128> {
        let mut point = vec![0u32; self.nparams];
        let mut total = 0u128;
        self.count_from(0, &mut point, limit, &mut total)
            .map(|_| total)
            .map_err(|_| total)
    }

    fn count_from(
        &self,
        li: usize,
        point: &mut Vec<u32>,
        limit: u128,
        total: &mut u128,
    ) -> std::result::Result<(), ()> {
        if li == self.levels.len() {
            *total += 1;
            return if *total > limit { Err(()) } else { Ok(()) };
        }
        let Some(sol) = self.solve_level(li, point) else {
            return Ok(());
        };
        if li + 1 == self.levels.len() && !self.has_nonzero(li) {
            *total = total.saturating_add(sol.size(self.field.p()));
            return if *total > limit { Err(()) } else { Ok(()) };
        }
        let mut vals = vec![0u32; sol.x0.len()];
        for idx in 0..sol.size(self.field.p()) {
            sol.point(self.field, idx, &mut vals);
            if self.assign(li, &vals, point) {
                self.count_from(li + 1, point, limit, total)?;
            }
        }
        Ok(())
    }

    /// One solution drawn by uniform choices level by level; `None` after
    /// `attempts` dead ends.
    pub fn sample<R: Rng>(&self, rng: &mut R, attempts: usize) -> Option<Vec<u32>> {
        let p = self.field.p();
        'outer: for _ in 0..attempts {
            let mut point = vec![0u32; self.nparams];
            for li in 0..self.levels.len() {
                let Some(sol) = self.solve_level(li, &point) else {
                    continue 'outer;
                };
                let mut vals = sol.x0.clone();
                for b in &sol.basis {
                    let t = rng.gen_range(0..p);
                    for (o, &v) in vals.iter_mut().zip(b) {
                        *o = self.field.add(*o, self.field.mul(t, v));
                    }
                }
                if !self.assign(li, &vals, &mut point) {
                    continue 'outer;
                }
            }
            return Some(point);
        }
        None
    }
}

/// Maps `name = value` overrides to parameter indices.
pub fn resolve_fixed(spec: &CaseSpec, field: PrimeField, fixed: &[(String, u32)]) -> Result<Vec<(usize, u32)>> {
    fixed
        .iter()
        .map(|(name, v)| {
            let q = spec
                .param_index(name)
                .ok_or_else(|| Error::Usage(format!("case {} has no parameter {name}", spec.id)))?;
            if *v >= field.p() || (spec.params[q].domain == Domain::NonZero && *v == 0) {
                return Err(Error::ParamDomain {
                    name: name.clone(),
                    value: *v,
                });
            }
            Ok((q, *v))
        })
        .collect()
}
