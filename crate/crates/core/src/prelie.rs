//! Pre-Lie algebras given by structure constants.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{FpMatrix, FpVector, Subspace, MAX_DIM};

/// A finite-dimensional algebra over F_p with `e_i · e_j = table[i * dim + j]`.
///
/// The `verified` flag is only ever set by [`PreLieAlgebra::verify`], after a
/// clean axiom check.
#[derive(Clone, PartialEq, Eq)]
pub struct PreLieAlgebra {
    field: PrimeField,
    dim: usize,
    table: Vec<FpVector>,
    basis_names: Option<Vec<String>>,
    verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub triple: (usize, usize, usize),
    /// `(a·b)·c − a·(b·c)`
    pub lhs: FpVector,
    /// `(b·a)·c − b·(a·c)`
    pub rhs: FpVector,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, k) = self.triple;
        write!(f, "{i} {j} {k} : {} != {}", self.lhs, self.rhs)
    }
}

impl PreLieAlgebra {
    pub fn zero(field: PrimeField, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension(dim));
        }
        Ok(PreLieAlgebra {
            field,
            dim,
            table: vec![FpVector::zero(field, dim); dim * dim],
            basis_names: None,
            verified: false,
        })
    }

    /// Builds the algebra from a row-major `dim * dim` table of products.
    pub fn from_table(field: PrimeField, dim: usize, table: Vec<FpVector>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::BadDimension(dim));
        }
        if table.len() != dim * dim {
            return Err(Error::Usage(format!(
                "product table has {} entries, expected {}",
                table.len(),
                dim * dim
            )));
        }
        for v in &table {
            if v.field() != field || v.dim() != dim {
                return Err(Error::AmbientMismatch {
                    expected_p: field.p(),
                    expected_dim: dim,
                    got_p: v.field().p(),
                    got_dim: v.dim(),
                });
            }
        }
        Ok(PreLieAlgebra {
            field,
            dim,
            table,
            basis_names: None,
            verified: false,
        })
    }

    /// Builds the algebra from the nonzero products `(i, j, coords)`.
    pub fn from_products(field: PrimeField, dim: usize, products: &[(usize, usize, Vec<i64>)]) -> Result<Self> {
        let mut a = Self::zero(field, dim)?;
        for (i, j, r) in products {
            if *i >= dim || *j >= dim || r.len() != dim {
                return Err(Error::Usage(format!(
                    "product entry ({i}, {j}) does not fit dimension {dim}"
                )));
            }
            a.table[i * dim + j] = FpVector::from_ints(field, r)?;
        }
        Ok(a)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim {
            return Err(Error::Usage(format!(
                "{} basis names for dimension {}",
                names.len(),
                self.dim
            )));
        }
        self.basis_names = Some(names);
        Ok(self)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> Option<&[String]> {
        self.basis_names.as_deref()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> &FpVector {
        &self.table[i * self.dim + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: FpVector) {
        self.table[i * self.dim + j] = v;
        self.verified = false;
    }

    pub fn table(&self) -> &[FpVector] {
        &self.table
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u32 {
        self.entry(i, j).get(k)
    }

    pub fn unit(&self, i: usize) -> FpVector {
        FpVector::unit(self.field, self.dim, i)
    }

    pub fn zero_vector(&self) -> FpVector {
        FpVector::zero(self.field, self.dim)
    }

    pub fn is_zero_algebra(&self) -> bool {
        self.table.iter().all(|v| v.is_zero())
    }

    fn check(&self, v: &FpVector) -> Result<()> {
        if v.field() != self.field || v.dim() != self.dim {
            return Err(Error::AmbientMismatch {
                expected_p: self.field.p(),
                expected_dim: self.dim,
                got_p: v.field().p(),
                got_dim: v.dim(),
            });
        }
        Ok(())
    }

    pub fn multiply(&self, x: &FpVector, y: &FpVector) -> Result<FpVector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// Bilinear product without ambient checks.
    ///
    /// Computes `Σ_i x_i (Σ_j y_j e_ij)`. Below `p = 2^28` the inner sums of
    /// at most eight products stay under `2^59` and are reduced once.
    #[inline]
    pub fn mul(&self, x: &FpVector, y: &FpVector) -> FpVector {
        let n = self.dim;
        let f = self.field;
        let lazy = (f.p() as u64) < 1 << 28;
        let mut acc = [0u64; MAX_DIM];
        for i in 0..n {
            let xi = x.get(i) as u64;
            if xi == 0 {
                continue;
            }
            let row = &self.table[i * n..(i + 1) * n];
            let mut w = [0u64; MAX_DIM];
            let mut any = false;
            for (j, e) in row.iter().enumerate() {
                let yj = y.get(j) as u64;
                if yj == 0 || e.is_zero() {
                    continue;
                }
                any = true;
                for (wk, &c) in w[..n].iter_mut().zip(e.coords()) {
                    *wk += yj * c as u64;
                    if !lazy {
                        *wk = f.reduce_u64(*wk) as u64;
                    }
                }
            }
            if !any {
                continue;
            }
            for (ak, &wk) in acc[..n].iter_mut().zip(&w[..n]) {
                *ak += xi * f.reduce_u64(wk) as u64;
                if !lazy {
                    *ak = f.reduce_u64(*ak) as u64;
                }
            }
        }
        let mut out = FpVector::zero(f, n);
        for (k, &a) in acc[..n].iter().enumerate() {
            out.set(k, f.reduce_u64(a));
        }
        out
    }

    /// `x · e_j`
    #[inline]
    pub fn mul_basis_right(&self, x: &FpVector, j: usize) -> FpVector {
        let n = self.dim;
        let mut out = FpVector::zero(self.field, n);
        for i in 0..n {
            let xi = x.get(i);
            if xi != 0 {
                out.add_scaled(xi, &self.table[i * n + j]);
            }
        }
        out
    }

    /// `e_i · y`
    #[inline]
    pub fn mul_basis_left(&self, i: usize, y: &FpVector) -> FpVector {
        let n = self.dim;
        let mut out = FpVector::zero(self.field, n);
        for j in 0..n {
            let yj = y.get(j);
            if yj != 0 {
                out.add_scaled(yj, &self.table[i * n + j]);
            }
        }
        out
    }

    /// Matrix of `b ↦ a·b`.
    pub fn left_mult_matrix(&self, a: &FpVector) -> FpMatrix {
        let cols: Vec<FpVector> = (0..self.dim).map(|j| self.mul(a, &self.unit(j))).collect();
        FpMatrix::from_columns(self.field, &cols)
    }

    /// Both sides of the axiom on basis elements `(e_a, e_b, e_c)`.
    #[inline]
    fn sides(&self, a: usize, b: usize, c: usize) -> (FpVector, FpVector) {
        let ab_c = self.mul_basis_right(self.entry(a, b), c);
        let a_bc = self.mul_basis_left(a, self.entry(b, c));
        let ba_c = self.mul_basis_right(self.entry(b, a), c);
        let b_ac = self.mul_basis_left(b, self.entry(a, c));
        (ab_c.sub(&a_bc), ba_c.sub(&b_ac))
    }

    /// All basis triples where the pre-Lie identity fails, in lexicographic order.
    ///
    /// The defect is antisymmetric in its first two arguments, so only `a < b`
    /// is evaluated and the mirrored triple is reported alongside.
    pub fn check_prelie_axiom(&self) -> Vec<AxiomViolation> {
        let n = self.dim;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    let (lhs, rhs) = self.sides(a, b, c);
                    if lhs != rhs {
                        out.push(AxiomViolation {
                            triple: (a, b, c),
                            lhs,
                            rhs,
                        });
                        out.push(AxiomViolation {
                            triple: (b, a, c),
                            lhs: rhs,
                            rhs: lhs,
                        });
                    }
                }
            }
        }
        out.sort_by_key(|v| v.triple);
        out
    }

    /// Fast yes/no form of the axiom check.
    pub fn satisfies_prelie(&self) -> bool {
        // at most 3·dim products below p² each are summed before reducing
        if (self.field.p() as u64) < 1 << 29 {
            self.defect_free::<u64>()
        } else {
            self.defect_free::<u128>()
        }
    }

    /// Accumulates `((ab) − (ba))c + b(ac) − a(bc)` per basis triple and
    /// reduces once per coordinate.
    fn defect_free<T>(&self) -> bool
    where
        T: Copy
            + Default
            + From<u32>
            + PartialEq
            + std::ops::AddAssign
            + std::ops::Mul<Output = T>
            + std::ops::Rem<Output = T>,
    {
        let n = self.dim;
        let f = self.field;
        let p = T::from(f.p());
        let t = &self.table;
        let mut live = [false; MAX_DIM * MAX_DIM];
        for (l, v) in live.iter_mut().zip(t) {
            *l = !v.is_zero();
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    let mut acc = [T::default(); MAX_DIM];
                    let mut add = |coef: u32, e: usize| {
                        if coef != 0 && live[e] {
                            let v = &t[e];
                            let coef = T::from(coef);
                            for (s, &x) in acc.iter_mut().zip(v.coords()) {
                                if x != 0 {
                                    *s += coef * T::from(x);
                                }
                            }
                        }
                    };
                    let (ab, ba, ac, bc) = (&t[a * n + b], &t[b * n + a], &t[a * n + c], &t[b * n + c]);
                    for k in 0..n {
                        add(f.sub(ab.get(k), ba.get(k)), k * n + c);
                        add(ac.get(k), b * n + k);
                        add(f.neg(bc.get(k)), a * n + k);
                    }
                    let zero = T::default();
                    if acc[..n].iter().any(|&s| s != zero && s % p != zero) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Runs the axiom check and marks the algebra verified when it is clean.
    pub fn verify(&mut self) -> Vec<AxiomViolation> {
        let v = self.check_prelie_axiom();
        self.verified = v.is_empty();
        v
    }

    pub fn verified(mut self) -> Result<Self> {
        let v = self.verify();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Precondition(format!(
                "pre-Lie identity fails on {} basis triples, first {}",
                v.len(),
                v[0]
            )))
        }
    }

    /// Span of all products `e_i · e_j`.
    pub fn square_span(&self) -> Subspace {
        Subspace::from_rows(self.field, self.dim, &self.table).expect("table lies in the ambient space")
    }

    /// Smallest subspace containing `gens` and closed under the product.
    pub fn subalgebra_generated(&self, gens: &[FpVector]) -> Result<Subspace> {
        for g in gens {
            self.check(g)?;
        }
        let mut s = Subspace::from_rows(self.field, self.dim, gens)?;
        loop {
            let basis: Vec<FpVector> = s.basis().to_vec();
            let mut grown = false;
            for x in &basis {
                for y in &basis {
                    grown |= s.insert_unchecked(self.mul(x, y));
                }
            }
            if !grown {
                return Ok(s);
            }
        }
    }

    /// `dim(A / A·A)`, the minimal number of generators of a nilpotent algebra.
    pub fn minimal_generator_count(&self) -> usize {
        self.dim - self.square_span().rank()
    }

    /// Span of `{a·b − b·a}` over basis pairs.
    pub fn commutator_span(&self) -> Subspace {
        let mut s = Subspace::zero(self.field, self.dim);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                s.insert_unchecked(self.entry(i, j).sub(self.entry(j, i)));
            }
        }
        s
    }

    /// Structure constants after the change of basis `e'_i = Σ_k m[k][i] e_k`.
    pub fn change_basis(&self, m: &FpMatrix) -> Result<PreLieAlgebra> {
        let inv = m
            .inverse()
            .ok_or_else(|| Error::Precondition("change of basis matrix is singular".into()))?;
        let cols: Vec<FpVector> = (0..self.dim).map(|i| m.column(i)).collect();
        let mut table = Vec::with_capacity(self.dim * self.dim);
        for x in &cols {
            for y in &cols {
                table.push(inv.apply(&self.mul(x, y)));
            }
        }
        PreLieAlgebra::from_table(self.field, self.dim, table)
    }

    pub(crate) fn mark_verified(&mut self) {
        self.verified = true;
    }
}

impl fmt::Debug for PreLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PreLieAlgebra(F_{}, dim {})", self.p(), self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.entry(i, j);
                if !e.is_zero() {
                    writeln!(f, "  e{i}*e{j} = {e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn vec(a: &PreLieAlgebra, xs: &[i64]) -> FpVector {
        FpVector::from_ints(a.field(), xs).unwrap()
    }

    #[test]
    fn ex31_products() {
        let a = fixtures::ex31(f(11));
        let (a1, a2, a3) = (a.unit(0), a.unit(1), a.unit(2));
        assert_eq!(a.multiply(&a1, &a1).unwrap(), a2);
        assert_eq!(a.multiply(&a1.add(&a2), &a1).unwrap(), a2.add(&a3));
        assert_eq!(a.multiply(&a.zero_vector(), &a2).unwrap(), a.zero_vector());
        assert!(a.multiply(&a1, &FpVector::zero(f(11), 4)).is_err());
    }

    #[test]
    fn ex31_satisfies_axiom() {
        let mut a = fixtures::ex31(f(7));
        assert!(a.verify().is_empty());
        assert!(a.is_verified());
        assert!(PreLieAlgebra::zero(f(7), 5).unwrap().check_prelie_axiom().is_empty());
    }

    // Full-triple brute force with no antisymmetry shortcut.
    fn brute_violations(a: &PreLieAlgebra) -> Vec<(usize, usize, usize)> {
        let n = a.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (ei, ej, ek) = (a.unit(i), a.unit(j), a.unit(k));
                    let l = a.mul(&a.mul(&ei, &ej), &ek).sub(&a.mul(&ei, &a.mul(&ej, &ek)));
                    let r = a.mul(&a.mul(&ej, &ei), &ek).sub(&a.mul(&ej, &a.mul(&ei, &ek)));
                    if l != r {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn sign_flipped_ex31_violates() {
        let field = f(7);
        let mut a = fixtures::ex31(field);
        a.set_entry(2, 2, vec(&a, &[0, 0, 0, 0, 1]));
        let found: Vec<_> = a.check_prelie_axiom().iter().map(|v| v.triple).collect();
        assert!(!found.is_empty());
        assert_eq!(found, brute_violations(&a));
        assert!(!a.satisfies_prelie());
    }

    fn all_elements(a: &PreLieAlgebra) -> Vec<FpVector> {
        let n = (a.p() as u64).pow(a.dim() as u32);
        (0..n).map(|i| FpVector::from_index(a.field(), a.dim(), i)).collect()
    }

    fn holds_on_all_elements(a: &PreLieAlgebra) -> bool {
        let els = all_elements(a);
        for x in &els {
            for y in &els {
                let xy = a.mul(x, y);
                let yx = a.mul(y, x);
                for z in &els {
                    let l = a.mul(&xy, z).sub(&a.mul(x, &a.mul(y, z)));
                    let r = a.mul(&yx, z).sub(&a.mul(y, &a.mul(x, z)));
                    if l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn basis_triples_suffice_for_every_dim2_algebra_mod3() {
        let field = f(3);
        for code in 0..3u64.pow(8) {
            let coeffs = FpVector::from_index(field, 8, code);
            let table: Vec<FpVector> = (0..4)
                .map(|e| FpVector::from_ints(field, &[coeffs.get(2 * e) as i64, coeffs.get(2 * e + 1) as i64]).unwrap())
                .collect();
            let a = PreLieAlgebra::from_table(field, 2, table).unwrap();
            assert_eq!(a.satisfies_prelie(), holds_on_all_elements(&a), "{a:?}");
        }
    }

    #[test]
    fn basis_triples_suffice_dim2_mod5_samples() {
        use rand::{Rng, SeedableRng};
        let field = f(5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut seen = [0usize; 2];
        for t in 0..40 {
            // Mix random tables with ones built to be pre-Lie.
            let a = if t % 2 == 0 {
                let table = (0..4)
                    .map(|_| FpVector::from_ints(field, &[rng.gen_range(0..5), rng.gen_range(0..5)]).unwrap())
                    .collect();
                PreLieAlgebra::from_table(field, 2, table).unwrap()
            } else {
                let c = rng.gen_range(0..5);
                PreLieAlgebra::from_products(field, 2, &[(0, 0, vec![0, c])]).unwrap()
            };
            let basis = a.satisfies_prelie();
            seen[basis as usize] += 1;
            assert_eq!(basis, holds_on_all_elements(&a));
        }
        assert!(seen[0] > 0 && seen[1] > 0);
    }

    #[test]
    fn generated_subalgebras() {
        let a = fixtures::ex31(f(7));
        assert!(a.subalgebra_generated(&[a.unit(0)]).unwrap().is_full());
        assert!(a.subalgebra_generated(&[a.zero_vector()]).unwrap().is_zero());
        let all: Vec<_> = (0..5).map(|i| a.unit(i)).collect();
        assert!(a.subalgebra_generated(&all).unwrap().is_full());
        let s = a.subalgebra_generated(&[a.unit(2)]).unwrap();
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn generator_counts() {
        let field = f(7);
        assert_eq!(fixtures::ex31(field).minimal_generator_count(), 1);
        assert_eq!(PreLieAlgebra::zero(field, 5).unwrap().minimal_generator_count(), 5);
        // dim-2 truncation x·x = y plus a zero line: product span is one line.
        let a = PreLieAlgebra::from_products(field, 3, &[(0, 0, vec![0, 1, 0])]).unwrap();
        let rank = Subspace::from_rows(field, 3, a.table()).unwrap().rank();
        assert_eq!(a.minimal_generator_count(), 3 - rank);
        assert_eq!(a.minimal_generator_count(), 2);
    }

    #[test]
    fn left_mult_matrix_of_generator() {
        let a = fixtures::ex31(f(11));
        let l = a.left_mult_matrix(&a.unit(0));
        assert_eq!(l.apply(&a.unit(0)), a.unit(1));
        assert_eq!(l.apply(&a.unit(3)), a.unit(4));
        for j in [1, 2, 4] {
            assert!(l.apply(&a.unit(j)).is_zero());
        }
    }

    #[test]
    fn change_basis_preserves_axiom() {
        let field = f(7);
        let a = fixtures::ex31(field);
        let mut m = FpMatrix::identity(field, 5);
        m.set(0, 1, 3);
        m.set(4, 0, 2);
        let b = a.change_basis(&m).unwrap();
        assert!(b.satisfies_prelie());
        assert_eq!(b.minimal_generator_count(), 1);
    }

    proptest! {
        #[test]
        fn multiply_is_bilinear(
            x in prop::collection::vec(0i64..11, 5),
            x2 in prop::collection::vec(0i64..11, 5),
            y in prop::collection::vec(0i64..11, 5),
            l in 0u32..11, m in 0u32..11,
        ) {
            let a = fixtures::ex31(f(11));
            let (x, x2, y) = (vec(&a, &x), vec(&a, &x2), vec(&a, &y));
            let comb = x.scale(l).add(&x2.scale(m));
            let lhs = a.mul(&comb, &y);
            let rhs = a.mul(&x, &y).scale(l).add(&a.mul(&x2, &y).scale(m));
            prop_assert_eq!(lhs, rhs);
            let lhs = a.mul(&y, &comb);
            let rhs = a.mul(&y, &x).scale(l).add(&a.mul(&y, &x2).scale(m));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn generation_is_monotone_and_idempotent(g in prop::collection::vec(prop::collection::vec(0i64..7, 5), 1..3)) {
            let a = fixtures::ex31(f(7));
            let gens: Vec<_> = g.iter().map(|v| vec(&a, v)).collect();
            let s = a.subalgebra_generated(&gens[..1]).unwrap();
            let t = a.subalgebra_generated(&gens).unwrap();
            prop_assert!(s.is_subspace_of(&t).unwrap());
            prop_assert_eq!(a.subalgebra_generated(t.basis()).unwrap(), t);
        }
    }
}
