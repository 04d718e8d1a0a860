//! Set-theoretic Yang-Baxter solutions attached to braces.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::brace::{domain_size, Brace, CheckMode, CheckReport, LAMBDA_CACHE_LIMIT};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{FpMatrix, FpVector};

/// Largest number of triples (or pairs) an exhaustive check may visit.
pub const EXHAUSTIVE_EVALS: u64 = 100_000_000;
/// Number of fixed arguments probed per side by a sampled non-degeneracy check.
pub const NONDEGENERATE_PROBES: u64 = 8;

pub const CONVENTION: &str = "r(x,y) = (λ_x(y), λ_{λ_x(y)}^{-1}(x))";

/// A map `r: X × X → X × X` on `X = F_p^dim`.
pub trait YbeMap: Sync {
    fn field(&self) -> PrimeField;
    fn dim(&self) -> usize;
    fn apply(&self, x: &FpVector, y: &FpVector) -> (FpVector, FpVector);

    fn size(&self) -> u64 {
        domain_size(self.field(), self.dim())
    }

    fn element(&self, idx: u64) -> FpVector {
        FpVector::from_index(self.field(), self.dim(), idx)
    }
}

/// `r(x, y) = (y, x)`
pub struct Flip {
    pub field: PrimeField,
    pub dim: usize,
}

impl YbeMap for Flip {
    fn field(&self) -> PrimeField {
        self.field
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &FpVector, y: &FpVector) -> (FpVector, FpVector) {
        (*y, *x)
    }
}

pub struct SolutionMap<'a> {
    brace: &'a Brace,
    inverses: OnceLock<Vec<FpMatrix>>,
    pub convention: &'static str,
}

impl SolutionMap<'_> {
    pub fn brace(&self) -> &Brace {
        self.brace
    }

    /// `λ_x(y)`
    pub fn lambda(&self, x: &FpVector, y: &FpVector) -> FpVector {
        self.brace.lambda(x).apply(y)
    }

    fn lambda_inverse(&self, x: &FpVector) -> FpMatrix {
        match self.inverses.get() {
            Some(inv) => inv[x.to_index() as usize],
            None => self
                .brace
                .lambda(x)
                .inverse()
                .expect("λ maps were checked at construction"),
        }
    }
}

impl YbeMap for SolutionMap<'_> {
    fn field(&self) -> PrimeField {
        self.brace.field()
    }
    fn dim(&self) -> usize {
        self.brace.dim()
    }
    fn apply(&self, x: &FpVector, y: &FpVector) -> (FpVector, FpVector) {
        let u = self.lambda(x, y);
        let v = self.lambda_inverse(&u).apply(x);
        (u, v)
    }
}

/// The solution of a verified brace. Every λ_x is checked invertible on
/// domains up to 11^5 elements; larger ones are probed at 1000 seeded points.
pub fn build_solution(b: &Brace) -> Result<SolutionMap<'_>> {
    if !b.is_verified() {
        return Err(Error::Unverified);
    }
    let map = SolutionMap {
        brace: b,
        inverses: OnceLock::new(),
        convention: CONVENTION,
    };
    let invert = |i: u64| {
        let x = b.element(i);
        b.lambda(&x)
            .inverse()
            .ok_or_else(|| Error::NonBijectiveLambda(x.to_string()))
    };
    if b.size() <= LAMBDA_CACHE_LIMIT {
        let inv = (0..b.size()).into_par_iter().map(invert).collect::<Result<Vec<_>>>()?;
        let _ = map.inverses.set(inv);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            invert(rng.gen_range(0..b.size()))?;
        }
    }
    Ok(map)
}

fn exhaustive_guard(evals: u128) -> Result<()> {
    if evals > EXHAUSTIVE_EVALS as u128 {
        return Err(Error::OversizedExhaustive {
            size: evals,
            limit: EXHAUSTIVE_EVALS as u128,
        });
    }
    Ok(())
}

/// Compares `R12 R23 R12` with `R23 R12 R23` on triples of `X`.
pub fn verify_ybe<M: YbeMap + ?Sized>(r: &M, mode: CheckMode) -> Result<CheckReport> {
    let check = |x: &FpVector, y: &FpVector, z: &FpVector, rep: &mut CheckReport| {
        // R12 R23 R12, applied right to left.
        let (x1, y1) = r.apply(x, y);
        let (y2, z2) = r.apply(&y1, z);
        let (x3, y3) = r.apply(&x1, &y2);
        // R23 R12 R23
        let (b1, c1) = r.apply(y, z);
        let (a2, b2) = r.apply(x, &b1);
        let (b3, c3) = r.apply(&b2, &c1);
        if (x3, y3, z2) != (a2, b3, c3) {
            rep.record("braid relation", &[x, y, z]);
        }
        rep.tested += 1;
    };
    let mut report = CheckReport::new("yang-baxter", mode);
    let n = r.size();
    match mode {
        CheckMode::Exhaustive => {
            exhaustive_guard((n as u128).pow(3))?;
            let parts: Vec<CheckReport> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rep = CheckReport::new("yang-baxter", mode);
                    let x = r.element(i);
                    for j in 0..n {
                        let y = r.element(j);
                        for k in 0..n {
                            check(&x, &y, &r.element(k), &mut rep);
                        }
                    }
                    rep
                })
                .collect();
            for p in parts {
                report.merge(p);
            }
        }
        CheckMode::Sample { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let [x, y, z] = [0; 3].map(|_| r.element(rng.gen_range(0..n)));
                check(&x, &y, &z, &mut report);
            }
        }
    }
    Ok(report)
}

/// `r ∘ r = id` on pairs.
pub fn check_involutive<M: YbeMap + ?Sized>(r: &M, mode: CheckMode) -> Result<CheckReport> {
    let check = |x: &FpVector, y: &FpVector, rep: &mut CheckReport| {
        let (u, v) = r.apply(x, y);
        if r.apply(&u, &v) != (*x, *y) {
            rep.record("involutive", &[x, y]);
        }
        rep.tested += 1;
    };
    let mut report = CheckReport::new("involutive", mode);
    let n = r.size();
    match mode {
        CheckMode::Exhaustive => {
            exhaustive_guard((n as u128).pow(2))?;
            for i in 0..n {
                let x = r.element(i);
                for j in 0..n {
                    check(&x, &r.element(j), &mut report);
                }
            }
        }
        CheckMode::Sample { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let x = r.element(rng.gen_range(0..n));
                let y = r.element(rng.gen_range(0..n));
                check(&x, &y, &mut report);
            }
        }
    }
    Ok(report)
}

/// Bijectivity of `y ↦ first(r(x, y))` for fixed `x` and of
/// `x ↦ second(r(x, y))` for fixed `y`, by full enumeration of the free
/// argument. Exhaustive mode fixes every element; sample mode fixes
/// [`NONDEGENERATE_PROBES`] seeded elements per side.
pub fn check_nondegenerate<M: YbeMap + ?Sized>(r: &M, mode: CheckMode) -> Result<CheckReport> {
    let mut report = CheckReport::new("non-degenerate", mode);
    let n = r.size();
    let fixed: Vec<u64> = match mode {
        CheckMode::Exhaustive => {
            exhaustive_guard((n as u128).pow(2))?;
            (0..n).collect()
        }
        CheckMode::Sample { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples.min(NONDEGENERATE_PROBES))
                .map(|_| rng.gen_range(0..n))
                .collect()
        }
    };
    let bijective = |f: &dyn Fn(&FpVector) -> FpVector| {
        let mut seen = vec![false; n as usize];
        for k in 0..n {
            let idx = f(&r.element(k)).to_index() as usize;
            if std::mem::replace(&mut seen[idx], true) {
                return false;
            }
        }
        true
    };
    for &i in &fixed {
        let a = r.element(i);
        if !bijective(&|y| r.apply(&a, y).0) {
            report.record("left component", &[&a]);
        }
        if !bijective(&|x| r.apply(x, &a).1) {
            report.record("right component", &[&a]);
        }
        report.tested += 2;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brace::flow_brace;
    use crate::fixtures;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn verified(mut b: Brace) -> Brace {
        let mode = b.default_mode();
        b.verify(mode).unwrap();
        assert!(b.is_verified());
        b
    }

    /// Wraps a map and swaps the outputs at two inputs.
    struct Corrupted<'a, M: YbeMap> {
        inner: &'a M,
        p: (FpVector, FpVector),
        q: (FpVector, FpVector),
    }

    impl<M: YbeMap> YbeMap for Corrupted<'_, M> {
        fn field(&self) -> PrimeField {
            self.inner.field()
        }
        fn dim(&self) -> usize {
            self.inner.dim()
        }
        fn apply(&self, x: &FpVector, y: &FpVector) -> (FpVector, FpVector) {
            if (*x, *y) == self.p {
                self.inner.apply(&self.q.0, &self.q.1)
            } else if (*x, *y) == self.q {
                self.inner.apply(&self.p.0, &self.p.1)
            } else {
                self.inner.apply(x, y)
            }
        }
    }

    #[test]
    fn flip_passes() {
        let r = Flip { field: f(3), dim: 2 };
        assert!(verify_ybe(&r, CheckMode::Exhaustive).unwrap().passed());
        assert!(check_involutive(&r, CheckMode::Exhaustive).unwrap().passed());
        assert!(check_nondegenerate(&r, CheckMode::Exhaustive).unwrap().passed());
    }

    #[test]
    fn trivial_brace_gives_flip() {
        let b = verified(Brace::trivial(f(5), 2).unwrap());
        let r = build_solution(&b).unwrap();
        for i in 0..25 {
            for j in 0..25 {
                let (x, y) = (b.element(i), b.element(j));
                assert_eq!(r.apply(&x, &y), (y, x));
            }
        }
    }

    #[test]
    fn unverified_brace_rejected() {
        let b = flow_brace(fixtures::dim2(f(5))).unwrap();
        assert!(matches!(build_solution(&b), Err(Error::Unverified)));
    }

    #[test]
    fn lambdas_of_dim2_are_bijective() {
        let b = verified(flow_brace(fixtures::dim2(f(5))).unwrap());
        assert_eq!(b.lambda(&b.zero()), FpMatrix::identity(f(5), 2));
        for i in 0..25 {
            let a = b.element(i);
            let images: std::collections::HashSet<_> = (0..25).map(|j| b.lambda_apply(&a, &b.element(j))).collect();
            assert_eq!(images.len(), 25);
        }
    }

    #[test]
    fn dim2_solution_exhaustive() {
        let b = verified(flow_brace(fixtures::dim2(f(5))).unwrap());
        let r = build_solution(&b).unwrap();
        let rep = verify_ybe(&r, CheckMode::Exhaustive).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.tested, 15_625);
        assert!(check_involutive(&r, CheckMode::Exhaustive).unwrap().passed());
        assert!(check_nondegenerate(&r, CheckMode::Exhaustive).unwrap().passed());
    }

    #[test]
    fn corrupted_map_is_caught() {
        let b = verified(flow_brace(fixtures::dim2(f(5))).unwrap());
        let r = build_solution(&b).unwrap();
        let bad = Corrupted {
            inner: &r,
            p: (b.element(1), b.element(2)),
            q: (b.element(3), b.element(7)),
        };
        let rep = verify_ybe(&bad, CheckMode::Exhaustive).unwrap();
        assert!(!rep.passed());
        let again = verify_ybe(&bad, CheckMode::Exhaustive).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn ex31_sampled() {
        let b = verified(flow_brace(fixtures::ex31(f(11))).unwrap());
        let r = build_solution(&b).unwrap();
        let mode = CheckMode::Sample {
            samples: 20_000,
            seed: 5,
        };
        assert!(verify_ybe(&r, mode).unwrap().passed());
        assert!(check_involutive(&r, mode).unwrap().passed());
        assert!(check_nondegenerate(&r, mode).unwrap().passed());
        assert!(matches!(
            verify_ybe(&r, CheckMode::Exhaustive),
            Err(Error::OversizedExhaustive { .. })
        ));
    }
}
