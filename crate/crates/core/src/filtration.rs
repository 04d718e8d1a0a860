//! Left, right and strong radical chains, and the dimension-5 index bounds.

use serde::Serialize;

use crate::linalg::{FpVector, Subspace};
use crate::prelie::PreLieAlgebra;

pub const DEFAULT_MAX_N: usize = 10;

/// A product whose span on two subspaces can be computed.
///
/// Pre-Lie algebras are bilinear, so basis pairs suffice. Braces are only
/// right-linear and enumerate the left factor instead.
pub trait BilinearProduct {
    fn full_space(&self) -> Subspace;
    fn product_span(&self, u: &Subspace, v: &Subspace) -> Subspace;

    /// Adds the span of `u · v` to `acc`, stopping once `acc` has rank `cap`.
    fn accumulate_span(&self, u: &Subspace, v: &Subspace, acc: &mut Subspace, cap: usize) {
        if acc.rank() < cap {
            *acc = acc.sum(&self.product_span(u, v)).expect("same ambient");
        }
    }
}

impl BilinearProduct for PreLieAlgebra {
    fn full_space(&self) -> Subspace {
        Subspace::full(self.field(), self.dim())
    }

    fn product_span(&self, u: &Subspace, v: &Subspace) -> Subspace {
        product_span(self, u, v)
    }

    fn accumulate_span(&self, u: &Subspace, v: &Subspace, acc: &mut Subspace, cap: usize) {
        for x in u.basis() {
            for y in v.basis() {
                if acc.rank() >= cap {
                    return;
                }
                acc.insert_unchecked(self.mul(x, y));
            }
        }
    }
}

pub fn product_span(a: &PreLieAlgebra, u: &Subspace, v: &Subspace) -> Subspace {
    let mut out = Subspace::zero(a.field(), a.dim());
    // a full subspace is stored in reduced form, so its basis is e_0..e_{n-1}
    let mut push = |w: FpVector| {
        out.insert_unchecked(w);
        out.is_full()
    };
    match (u.is_full(), v.is_full()) {
        (true, true) => {
            for w in a.table() {
                if push(*w) {
                    break;
                }
            }
        }
        (true, false) => {
            'outer: for y in v.basis() {
                for i in 0..a.dim() {
                    if push(a.mul_basis_left(i, y)) {
                        break 'outer;
                    }
                }
            }
        }
        (false, true) => {
            'outer: for x in u.basis() {
                for j in 0..a.dim() {
                    if push(a.mul_basis_right(x, j)) {
                        break 'outer;
                    }
                }
            }
        }
        (false, false) => {
            'outer: for x in u.basis() {
                for y in v.basis() {
                    if push(a.mul(x, y)) {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Left,
    Right,
    Strong,
}

impl std::str::FromStr for ChainKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left" => Ok(ChainKind::Left),
            "right" => Ok(ChainKind::Right),
            "strong" => Ok(ChainKind::Strong),
            _ => Err(format!("unknown chain kind {s}")),
        }
    }
}

impl std::fmt::Display for ChainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChainKind::Left => "left",
            ChainKind::Right => "right",
            ChainKind::Strong => "strong",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub kind: ChainKind,
    /// `terms[i]` is the chain term with index `i + 1`.
    pub terms: Vec<Subspace>,
    /// First index from which every computed term is equal.
    pub stabilized_at: usize,
    /// Smallest index with a zero term.
    pub nilpotency_index: Option<usize>,
}

impl ChainReport {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::rank).collect()
    }

    /// Term with 1-based index `n`. Past the computed range the last term is
    /// returned, which is exact once the chain has reached zero.
    pub fn term(&self, n: usize) -> Option<&Subspace> {
        assert!(n >= 1);
        if n <= self.terms.len() {
            self.terms.get(n - 1)
        } else if self.nilpotency_index.is_some() {
            self.terms.last()
        } else {
            None
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_index.is_some()
    }
}

/// Computes chain terms up to index `max_n`.
///
/// Zero is absorbing in all three chains, so computation stops at the first
/// zero term. The left and right chains depend only on their previous term;
/// after two equal consecutive terms two more are computed to confirm the
/// repetition before stopping. The strong chain can stall and then drop again,
/// so it always runs to `max_n` unless it hits zero.
pub fn chain<P: BilinearProduct + ?Sized>(prod: &P, kind: ChainKind, max_n: usize) -> ChainReport {
    let max_n = max_n.max(2);
    let full = prod.full_space();
    let mut terms = vec![full.clone()];
    let mut confirm = 0usize;
    while terms.len() < max_n {
        let last = terms.last().unwrap();
        if last.is_zero() {
            break;
        }
        let next = match kind {
            ChainKind::Left => prod.product_span(&full, last),
            ChainKind::Right => prod.product_span(last, &full),
            ChainKind::Strong => {
                // every summand lies in the previous term, so reaching its
                // rank means the sum equals it
                let n = terms.len();
                let cap = if n == 1 { full.rank() } else { last.rank() };
                let mut acc = if n == 1 {
                    prod.product_span(&full, &full)
                } else {
                    Subspace::zero(full.field(), full.ambient_dim())
                };
                for j in 0..n {
                    if n == 1 || acc.rank() >= cap {
                        break;
                    }
                    prod.accumulate_span(&terms[j], &terms[n - 1 - j], &mut acc, cap);
                }
                acc
            }
        };
        let repeat = &next == last;
        terms.push(next);
        if kind != ChainKind::Strong && repeat {
            confirm += 1;
            if confirm > 2 {
                break;
            }
        }
    }
    let nilpotency_index = terms.iter().position(Subspace::is_zero).map(|i| i + 1);
    let mut stabilized_at = terms.len();
    while stabilized_at > 1 && terms[stabilized_at - 2] == terms[stabilized_at - 1] {
        stabilized_at -= 1;
    }
    ChainReport {
        kind,
        terms,
        stabilized_at,
        nilpotency_index,
    }
}

pub fn strong_chain(a: &PreLieAlgebra, max_n: usize) -> ChainReport {
    chain(a, ChainKind::Strong, max_n)
}

pub fn left_chain(a: &PreLieAlgebra, max_n: usize) -> ChainReport {
    chain(a, ChainKind::Left, max_n)
}

pub fn right_chain(a: &PreLieAlgebra, max_n: usize) -> ChainReport {
    chain(a, ChainKind::Right, max_n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    /// e.g. `A^[4] != 0`
    pub bound: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub generator_count: usize,
    pub strong_dims: Vec<usize>,
    pub skipped: Option<String>,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Bounds on the strong chain of a nilpotent dimension-5 algebra, keyed by
/// its number of generators: `A^[8] = 0` always, plus
///
/// | generators | bound |
/// |---|---|
/// | 1 | `A^[4] != 0` |
/// | 2 | `A^[2] != 0`, `A^[6] = 0` |
/// | 3 | `A^[2] != 0`, `A^[4] = 0` |
/// | 4 | `A^[2] != 0`, `A^[3] = 0` |
pub fn check_index_bounds(a: &PreLieAlgebra) -> BoundsReport {
    let generator_count = a.minimal_generator_count();
    let strong = strong_chain(a, DEFAULT_MAX_N);
    bounds_from_chain(a.dim(), generator_count, &strong)
}

pub fn bounds_from_chain(dim: usize, generator_count: usize, strong: &ChainReport) -> BoundsReport {
    let mut report = BoundsReport {
        generator_count,
        strong_dims: strong.dims(),
        skipped: None,
        checks: Vec::new(),
    };
    if dim != 5 {
        report.skipped = Some(format!("dimension {dim} is not 5"));
        return report;
    }
    if !strong.is_nilpotent() {
        report.skipped = Some(format!("not nilpotent within {} terms", strong.terms.len()));
        return report;
    }
    if !(1..=4).contains(&generator_count) {
        report.skipped = Some(format!("{generator_count} generators"));
        return report;
    }
    let zero_at = |n: usize| strong.term(n).map(Subspace::is_zero).unwrap_or(false);
    let mut push = |n: usize, want_zero: bool| {
        let op = if want_zero { "=" } else { "!=" };
        report.checks.push(BoundCheck {
            bound: format!("A^[{n}] {op} 0"),
            holds: zero_at(n) == want_zero,
        });
    };
    push(8, true);
    match generator_count {
        1 => push(4, false),
        2 => {
            push(2, false);
            push(6, true);
        }
        3 => {
            push(2, false);
            push(4, true);
        }
        _ => {
            push(2, false);
            push(3, true);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::fixtures;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn span(a: &PreLieAlgebra, idx: &[usize]) -> Subspace {
        let rows: Vec<_> = idx.iter().map(|&i| a.unit(i)).collect();
        Subspace::from_rows(a.field(), a.dim(), &rows).unwrap()
    }

    #[test]
    fn product_span_examples() {
        let a = fixtures::ex31(f(7));
        let full = a.full_space();
        assert_eq!(product_span(&a, &full, &full), span(&a, &[1, 2, 3, 4]));
        let zero = Subspace::zero(a.field(), 5);
        assert!(product_span(&a, &full, &zero).is_zero());
        assert_eq!(product_span(&a, &span(&a, &[1]), &span(&a, &[0, 2])), span(&a, &[2, 3]));
    }

    #[test]
    fn ex31_strong_chain() {
        for p in [7, 11, 13] {
            let a = fixtures::ex31(f(p));
            let c = strong_chain(&a, DEFAULT_MAX_N);
            assert_eq!(c.dims(), vec![5, 4, 3, 2, 2, 1, 0]);
            assert_eq!(c.nilpotency_index, Some(7));
            assert_eq!(c.terms[3], span(&a, &[3, 4]));
            assert_eq!(c.terms[4], span(&a, &[3, 4]));
            assert_eq!(c.terms[5], span(&a, &[4]));
        }
    }

    #[test]
    fn zero_and_dim2_chains() {
        let z = PreLieAlgebra::zero(f(5), 5).unwrap();
        for kind in [ChainKind::Left, ChainKind::Right, ChainKind::Strong] {
            assert_eq!(chain(&z, kind, 10).nilpotency_index, Some(2));
        }
        let d = fixtures::dim2(f(5));
        assert_eq!(strong_chain(&d, 10).nilpotency_index, Some(3));
    }

    #[test]
    fn ex31_left_and_right() {
        let a = fixtures::ex31(f(11));
        let r = right_chain(&a, 10);
        assert!(r.is_nilpotent());
        let l = left_chain(&a, 10);
        let s = strong_chain(&a, 10);
        for (n, st) in s.terms.iter().enumerate() {
            for other in [&l, &r] {
                if let Some(t) = other.term(n + 1) {
                    assert!(t.is_subspace_of(st).unwrap());
                }
            }
        }
    }

    #[test]
    fn non_nilpotent_stabilizes() {
        // e0·e0 = e0: an idempotent keeps every chain at rank 1.
        let a = PreLieAlgebra::from_products(f(5), 2, &[(0, 0, vec![1, 0])]).unwrap();
        for kind in [ChainKind::Left, ChainKind::Right, ChainKind::Strong] {
            let c = chain(&a, kind, 10);
            assert_eq!(c.nilpotency_index, None);
            assert_eq!(c.stabilized_at, 2);
            assert!(c.dims()[1..].iter().all(|&d| d == 1));
        }
    }

    #[test]
    fn bounds_examples() {
        let a = fixtures::ex31(f(7));
        let r = check_index_bounds(&a);
        assert_eq!(r.generator_count, 1);
        assert!(r.skipped.is_none());
        assert!(r.all_hold());
        assert_eq!(r.checks.len(), 2);
        let z = check_index_bounds(&PreLieAlgebra::zero(f(7), 5).unwrap());
        assert!(z.skipped.is_some());
        let d = check_index_bounds(&fixtures::dim2(f(7)));
        assert!(d.skipped.is_some());
    }

    proptest! {
        // Random strictly upper-triangular products are nilpotent, not
        // necessarily pre-Lie; the chain inclusions hold regardless.
        #[test]
        fn chain_inclusions(entries in prop::collection::vec(0i64..5, 5 * 5 * 5)) {
            let field = f(5);
            let mut products = Vec::new();
            for i in 0..5 {
                for j in 0..5 {
                    let lo = i.max(j) + 1;
                    let r: Vec<i64> = (0..5).map(|k| if k >= lo { entries[(i * 5 + j) * 5 + k] } else { 0 }).collect();
                    products.push((i, j, r));
                }
            }
            let a = PreLieAlgebra::from_products(field, 5, &products).unwrap();
            // Without the pre-Lie identity the strong index can pass 10.
            let s = strong_chain(&a, 40);
            let l = left_chain(&a, 40);
            let r = right_chain(&a, 40);
            prop_assert!(s.is_nilpotent() && l.is_nilpotent() && r.is_nilpotent());
            for n in 1..s.terms.len() {
                prop_assert!(s.terms[n].is_subspace_of(&s.terms[n - 1]).unwrap());
            }
            for n in 1..=s.terms.len() {
                let st = s.term(n).unwrap();
                prop_assert!(l.term(n).unwrap().is_subspace_of(st).unwrap());
                prop_assert!(r.term(n).unwrap().is_subspace_of(st).unwrap());
            }
        }
    }
}
