//! Coarse isomorphism invariant used to group enumerated algebras.

use std::fmt;

use serde::Serialize;

use crate::filtration::{left_chain, right_chain, strong_chain, ChainReport, DEFAULT_MAX_N};
use crate::prelie::PreLieAlgebra;

/// Chain dimensions and the dimension of the commutator span. Equal
/// fingerprints are necessary, not sufficient, for isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    pub strong: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub commutator: usize,
}

fn dots(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s{}/l{}/r{}/c{}",
            dots(&self.strong),
            dots(&self.left),
            dots(&self.right),
            self.commutator
        )
    }
}

pub fn fingerprint(a: &PreLieAlgebra) -> Fingerprint {
    fingerprint_with_strong(a, &strong_chain(a, DEFAULT_MAX_N))
}

/// Same as [`fingerprint`] when the strong chain is already known.
pub fn fingerprint_with_strong(a: &PreLieAlgebra, strong: &ChainReport) -> Fingerprint {
    Fingerprint {
        strong: strong.dims(),
        left: left_chain(a, DEFAULT_MAX_N).dims(),
        right: right_chain(a, DEFAULT_MAX_N).dims(),
        commutator: a.commutator_span().rank(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::fixtures::ex31;
    use crate::linalg::FpMatrix;

    #[test]
    fn ex31_and_zero() {
        let f = PrimeField::new(11).unwrap();
        let fp = fingerprint(&ex31(f));
        assert_eq!(fp.strong, vec![5, 4, 3, 2, 2, 1, 0]);
        let z = PreLieAlgebra::zero(f, 5).unwrap();
        let fz = fingerprint(&z);
        assert_eq!(fz.strong, vec![5, 0]);
        assert_eq!(fz.to_string(), "s5.0/l5.0/r5.0/c0");
    }

    #[test]
    fn invariant_under_permutation() {
        let f = PrimeField::new(7).unwrap();
        let a = ex31(f);
        let mut m = FpMatrix::zero(f, 5);
        for (i, j) in [(0, 3), (1, 0), (2, 4), (3, 1), (4, 2)] {
            m.set(i, j, 1);
        }
        assert_eq!(fingerprint(&a.change_basis(&m).unwrap()), fingerprint(&a));
    }
}
