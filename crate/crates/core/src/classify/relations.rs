//! Scalar constraints obtained by expanding the pre-Lie defect symbolically.

use serde::Serialize;

use super::cases::{CaseSpec, Entry};
use super::poly::Poly;
use crate::field::PrimeField;

/// Coefficient of `e_m` in `D(e_a, e_b, e_c) = (ab)c − a(bc) − (ba)c + b(ac)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub triple: (usize, usize, usize),
    pub output: usize,
    #[serde(skip)]
    pub poly: Poly,
}

fn entry_poly(e: Entry) -> Poly {
    match e {
        Entry::Zero => Poly::zero(),
        Entry::Const(c) => Poly::constant(c),
        Entry::Param(q) => Poly::var(q),
    }
}

/// Nonzero defect coefficients over basis triples with `a < b`.
///
/// The defect is antisymmetric in `a, b`, so the remaining triples add nothing.
pub fn derived_relations(spec: &CaseSpec) -> Vec<Relation> {
    let n = spec.dim();
    let c = |i: usize, j: usize, k: usize| entry_poly(spec.entry(i, j, k));
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for cc in 0..n {
                for m in 0..n {
                    let mut d = Poly::zero();
                    for k in 0..n {
                        d = d
                            .add(&c(a, b, k).mul(&c(k, cc, m)))
                            .sub(&c(b, cc, k).mul(&c(a, k, m)))
                            .sub(&c(b, a, k).mul(&c(k, cc, m)))
                            .add(&c(a, cc, k).mul(&c(b, k, m)));
                    }
                    if !d.is_zero() {
                        out.push(Relation {
                            triple: (a, b, cc),
                            output: m,
                            poly: d,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn relations_hold(rels: &[Relation], field: PrimeField, point: &[u32]) -> bool {
    rels.iter().all(|r| r.poly.eval(field, point) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::cases::{all_cases, case};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_step_cases_have_no_relations() {
        for id in ["G2-A3zero", "G3-A3zero", "G4"] {
            assert!(derived_relations(&case(id).unwrap()).is_empty(), "{id}");
        }
    }

    #[test]
    fn relations_are_at_most_quadratic() {
        for c in all_cases() {
            for r in derived_relations(&c) {
                assert!(r.poly.degree() <= 2, "{} {:?}", c.id, r.triple);
            }
        }
    }

    /// Oracle: at any point the relations vanish exactly when the numeric
    /// axiom check passes.
    #[test]
    fn relations_agree_with_numeric_axiom_check() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for c in all_cases() {
            let rels = derived_relations(&c);
            for _ in 0..20 {
                let point: Vec<u32> = c.params.iter().map(|_| rng.gen_range(0..5)).collect();
                let a = c.algebra_at(f, &point);
                assert_eq!(relations_hold(&rels, f, &point), a.satisfies_prelie(), "{}", c.id);
            }
        }
    }
}
