//! Vectors, matrices and subspaces over F_p, capped at dimension 8.
//!
//! Everything here is `Copy` (or nearly so) and lives on the stack, which
//! keeps the enumeration kernels allocation-free.

use std::fmt;

use arrayvec::ArrayVec;

use crate::error::{Error, Result};
use crate::field::PrimeField;

pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    field: PrimeField,
    len: u8,
    coords: [u32; MAX_DIM],
}

impl FpVector {
    #[inline]
    pub fn zero(field: PrimeField, dim: usize) -> Self {
        debug_assert!(dim <= MAX_DIM);
        FpVector {
            field,
            len: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    pub fn unit(field: PrimeField, dim: usize, i: usize) -> Self {
        let mut v = Self::zero(field, dim);
        v.coords[i] = 1;
        v
    }

    /// Builds a vector from integers, reducing each modulo p.
    pub fn from_ints(field: PrimeField, values: &[i64]) -> Result<Self> {
        if values.len() > MAX_DIM {
            return Err(Error::BadDimension(values.len()));
        }
        let mut v = Self::zero(field, values.len());
        for (c, &x) in v.coords.iter_mut().zip(values) {
            *c = field.reduce(x);
        }
        Ok(v)
    }

    /// Element number `idx` of F_p^dim, reading the index in base p with
    /// coordinate 0 least significant.
    pub fn from_index(field: PrimeField, dim: usize, mut idx: u64) -> Self {
        let p = field.p() as u64;
        let mut v = Self::zero(field, dim);
        for c in v.coords[..dim].iter_mut() {
            *c = (idx % p) as u32;
            idx /= p;
        }
        v
    }

    pub fn to_index(&self) -> u64 {
        let p = self.field.p() as u64;
        self.coords().iter().rev().fold(0, |acc, &c| acc * p + c as u64)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords[..self.len as usize]
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.coords[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: u32) {
        debug_assert!(i < self.len as usize && value < self.field.p());
        self.coords[i] = value;
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    #[inline]
    pub fn add(&self, other: &FpVector) -> FpVector {
        let f = self.field();
        let mut out = *self;
        for i in 0..self.len as usize {
            out.coords[i] = f.add(self.coords[i], other.coords[i]);
        }
        out
    }

    #[inline]
    pub fn sub(&self, other: &FpVector) -> FpVector {
        let f = self.field();
        let mut out = *self;
        for i in 0..self.len as usize {
            out.coords[i] = f.sub(self.coords[i], other.coords[i]);
        }
        out
    }

    #[inline]
    pub fn neg(&self) -> FpVector {
        let f = self.field();
        let mut out = *self;
        for c in out.coords[..self.len as usize].iter_mut() {
            *c = f.neg(*c);
        }
        out
    }

    #[inline]
    pub fn scale(&self, s: u32) -> FpVector {
        let f = self.field();
        let mut out = *self;
        for c in out.coords[..self.len as usize].iter_mut() {
            *c = f.mul(*c, s);
        }
        out
    }

    /// `self += s * other`
    #[inline]
    pub fn add_scaled(&mut self, s: u32, other: &FpVector) {
        if s == 0 {
            return;
        }
        let f = self.field();
        for i in 0..self.len as usize {
            if other.coords[i] != 0 {
                self.coords[i] = f.add(self.coords[i], f.mul(s, other.coords[i]));
            }
        }
    }

    /// Index of the first nonzero coordinate.
    pub fn leading(&self) -> Option<usize> {
        self.coords().iter().position(|&c| c != 0)
    }

    fn same_ambient(&self, other: &FpVector) -> Result<()> {
        if self.field != other.field || self.len != other.len {
            return Err(Error::AmbientMismatch {
                expected_p: self.field.p(),
                expected_dim: self.len as usize,
                got_p: other.field.p(),
                got_dim: other.len as usize,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Square matrix acting on column vectors: `apply(v)[i] = Σ_j m[i][j] v[j]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    n: u8,
    m: [[u32; MAX_DIM]; MAX_DIM],
}

impl FpMatrix {
    pub fn zero(field: PrimeField, n: usize) -> Self {
        FpMatrix {
            field,
            n: n as u8,
            m: [[0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut out = Self::zero(field, n);
        for i in 0..n {
            out.m[i][i] = 1;
        }
        out
    }

    /// Matrix whose j-th column is `cols[j]`.
    pub fn from_columns(field: PrimeField, cols: &[FpVector]) -> Self {
        let mut out = Self::zero(field, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..cols.len() {
                out.m[i][j] = c.get(i);
            }
        }
        out
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.m[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.m[i][j] = v;
    }

    pub fn column(&self, j: usize) -> FpVector {
        let mut v = FpVector::zero(self.field(), self.dim());
        for i in 0..self.dim() {
            v.coords[i] = self.m[i][j];
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|r| r.iter().all(|&c| c == 0))
    }

    #[inline]
    pub fn apply(&self, v: &FpVector) -> FpVector {
        let n = self.dim();
        let p = self.field.p() as u64;
        let mut out = FpVector::zero(self.field(), n);
        for i in 0..n {
            let mut acc = 0u64;
            for j in 0..n {
                acc += self.m[i][j] as u64 * v.coords[j] as u64;
            }
            out.coords[i] = (acc % p) as u32;
        }
        out
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        let n = self.dim();
        let p = self.field.p() as u64;
        let mut out = Self::zero(self.field(), n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for k in 0..n {
                    acc += self.m[i][k] as u64 * other.m[k][j] as u64;
                }
                out.m[i][j] = (acc % p) as u32;
            }
        }
        out
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        let f = self.field();
        let mut out = *self;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.m[i][j] = f.add(self.m[i][j], other.m[i][j]);
            }
        }
        out
    }

    pub fn scale(&self, s: u32) -> FpMatrix {
        let f = self.field();
        let mut out = *self;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.m[i][j] = f.mul(self.m[i][j], s);
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<FpMatrix> {
        let n = self.dim();
        let f = self.field();
        let mut a = self.m;
        let mut inv = Self::identity(f, n).m;
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col] != 0)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let s = f.inv(a[col][col]).ok()?;
            for j in 0..n {
                a[col][j] = f.mul(a[col][j], s);
                inv[col][j] = f.mul(inv[col][j], s);
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let c = f.neg(a[r][col]);
                    for j in 0..n {
                        a[r][j] = f.add(a[r][j], f.mul(c, a[col][j]));
                        inv[r][j] = f.add(inv[r][j], f.mul(c, inv[col][j]));
                    }
                }
            }
        }
        Some(FpMatrix {
            field: self.field,
            n: self.n,
            m: inv,
        })
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<FpVector> = (0..self.dim())
            .map(|i| {
                let mut v = FpVector::zero(self.field(), self.dim());
                v.coords[..self.dim()].copy_from_slice(&self.m[i][..self.dim()]);
                v
            })
            .collect();
        Subspace::from_rows(self.field(), self.dim(), &rows)
            .expect("rows share the matrix ambient")
            .rank()
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[u32]> = (0..self.dim()).map(|i| &self.m[i][..self.dim()]).collect();
        write!(f, "{rows:?}")
    }
}

/// A linear subspace of F_p^dim held as a reduced row-echelon basis.
///
/// RREF bases are unique, so derived equality is subspace equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: PrimeField,
    dim: usize,
    basis: ArrayVec<FpVector, MAX_DIM>,
}

impl Subspace {
    pub fn zero(field: PrimeField, dim: usize) -> Self {
        Subspace {
            field,
            dim,
            basis: ArrayVec::new(),
        }
    }

    pub fn full(field: PrimeField, dim: usize) -> Self {
        Subspace {
            field,
            dim,
            basis: (0..dim).map(|i| FpVector::unit(field, dim, i)).collect(),
        }
    }

    /// Row-reduced span of `rows`.
    pub fn from_rows(field: PrimeField, dim: usize, rows: &[FpVector]) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::BadDimension(dim));
        }
        let mut s = Self::zero(field, dim);
        for r in rows {
            s.insert(*r)?;
        }
        Ok(s)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim
    }

    pub fn basis(&self) -> &[FpVector] {
        &self.basis
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().map(|b| b.leading().expect("basis rows are nonzero"))
    }

    fn check(&self, v: &FpVector) -> Result<()> {
        if v.field != self.field || v.dim() != self.dim {
            return Err(Error::AmbientMismatch {
                expected_p: self.field.p(),
                expected_dim: self.dim,
                got_p: v.field.p(),
                got_dim: v.dim(),
            });
        }
        Ok(())
    }

    fn check_space(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field || self.dim != other.dim {
            return Err(Error::AmbientMismatch {
                expected_p: self.field.p(),
                expected_dim: self.dim,
                got_p: other.field.p(),
                got_dim: other.dim,
            });
        }
        Ok(())
    }

    /// Remainder of `v` after elimination against the basis.
    #[inline]
    pub fn reduce(&self, v: &FpVector) -> FpVector {
        let f = self.field;
        let mut r = *v;
        for b in &self.basis {
            let piv = b.leading().expect("basis rows are nonzero");
            let c = r.coords[piv];
            if c != 0 {
                r.add_scaled(f.neg(c), b);
            }
        }
        r
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: FpVector) -> Result<bool> {
        self.check(&v)?;
        Ok(self.insert_unchecked(v))
    }

    #[inline]
    pub(crate) fn insert_unchecked(&mut self, v: FpVector) -> bool {
        if self.basis.len() == self.dim || v.is_zero() {
            return false;
        }
        let f = self.field;
        let mut r = self.reduce(&v);
        let Some(piv) = r.leading() else {
            return false;
        };
        r = r.scale(f.inv(r.coords[piv]).expect("pivot is nonzero"));
        for b in self.basis.iter_mut() {
            let c = b.coords[piv];
            if c != 0 {
                b.add_scaled(f.neg(c), &r);
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|b| b.leading().unwrap() > piv)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, r);
        true
    }

    pub fn contains(&self, v: &FpVector) -> Result<bool> {
        self.check(v)?;
        Ok(self.reduce(v).is_zero())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_space(other)?;
        let (big, small) = if self.rank() >= other.rank() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for b in &small.basis {
            out.insert_unchecked(*b);
        }
        Ok(out)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_space(other)?;
        Ok(self.basis.iter().all(|b| other.reduce(b).is_zero()))
    }

    /// Every element of the subspace, in coefficient order.
    pub fn elements(&self) -> Vec<FpVector> {
        let p = self.field.p() as u64;
        let count = p.pow(self.rank() as u32);
        let mut out = Vec::with_capacity(count as usize);
        for idx in 0..count {
            let coeffs = FpVector::from_index(self.field, self.rank(), idx);
            let mut v = FpVector::zero(self.field, self.dim);
            for (b, &c) in self.basis.iter().zip(coeffs.coords()) {
                v.add_scaled(c, b);
            }
            out.push(v);
        }
        out
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(F_{}^{}, {:?})", self.field.p(), self.dim, &self.basis[..])
    }
}

/// Row-reduced span of a nonempty list of rows.
pub fn rref(rows: &[FpVector]) -> Result<Subspace> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Usage("rref of an empty row list needs an explicit ambient".into()))?;
    for r in rows {
        first.same_ambient(r)?;
    }
    Subspace::from_rows(first.field(), first.dim(), rows)
}

pub fn subspace_sum(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    u.sum(v)
}

pub fn contains(u: &Subspace, v: &FpVector) -> Result<bool> {
    u.contains(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn v(field: PrimeField, xs: &[i64]) -> FpVector {
        FpVector::from_ints(field, xs).unwrap()
    }

    // Rank as the largest k with a nonzero k x k minor, determinants by
    // cofactor expansion. Shares no code with the elimination path.
    fn det(field: PrimeField, m: &[Vec<u32>]) -> u32 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut acc = 0u32;
        for j in 0..n {
            if m[0][j] == 0 {
                continue;
            }
            let minor: Vec<Vec<u32>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let term = field.mul(m[0][j], det(field, &minor));
            acc = if j % 2 == 0 {
                field.add(acc, term)
            } else {
                field.sub(acc, term)
            };
        }
        acc
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    fn minor_rank(field: PrimeField, rows: &[FpVector], dim: usize) -> usize {
        for k in (1..=dim.min(rows.len())).rev() {
            for rs in subsets(rows.len(), k) {
                for cs in subsets(dim, k) {
                    let m: Vec<Vec<u32>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| rows[r].get(c)).collect())
                        .collect();
                    if det(field, &m) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    fn assert_rref_shape(s: &Subspace) {
        let pivots: Vec<usize> = s.pivots().collect();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        for (row, &pc) in s.basis().iter().zip(&pivots) {
            assert_eq!(row.get(pc), 1);
            for other in s.basis() {
                if other != row {
                    assert_eq!(other.get(pc), 0);
                }
            }
        }
    }

    #[test]
    fn rref_small_examples() {
        let f5 = f(5);
        let s = Subspace::from_rows(f5, 2, &[]).unwrap();
        assert_eq!(s.rank(), 0);
        let s = rref(&[v(f5, &[2, 4]), v(f5, &[1, 2])]).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.basis(), &[v(f5, &[1, 2])]);
        assert!(rref(&[]).is_err());
        assert!(rref(&[v(f5, &[1, 2]), v(f5, &[1, 2, 3])]).is_err());
        assert!(rref(&[v(f5, &[1, 2]), v(f(7), &[1, 2])]).is_err());
    }

    #[test]
    fn rank_matches_minor_oracle() {
        let f7 = f(7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            // Low-rank inputs from products of thin factors, to hit every rank.
            let inner = trial % 6;
            let left: Vec<Vec<i64>> = (0..20)
                .map(|_| (0..inner).map(|_| rng.gen_range(0..7)).collect())
                .collect();
            let right: Vec<Vec<i64>> = (0..inner)
                .map(|_| (0..5).map(|_| rng.gen_range(0..7)).collect())
                .collect();
            let rows: Vec<FpVector> = left
                .iter()
                .map(|l| {
                    let xs: Vec<i64> = (0..5).map(|c| (0..inner).map(|k| l[k] * right[k][c]).sum()).collect();
                    v(f7, &xs)
                })
                .collect();
            let s = rref(&rows).unwrap();
            assert_eq!(s.rank(), minor_rank(f7, &rows, 5));
            assert_rref_shape(&s);
        }
    }

    #[test]
    fn sum_examples() {
        let f5 = f(5);
        let e1 = Subspace::from_rows(f5, 3, &[FpVector::unit(f5, 3, 0)]).unwrap();
        let e2 = Subspace::from_rows(f5, 3, &[FpVector::unit(f5, 3, 1)]).unwrap();
        let s = subspace_sum(&e1, &e2).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(contains(&s, &v(f5, &[1, 1, 0])).unwrap());
        assert_eq!(subspace_sum(&e1, &Subspace::zero(f5, 3)).unwrap(), e1);
        assert!(subspace_sum(&e1, &Subspace::zero(f5, 2)).is_err());
    }

    #[test]
    fn contains_examples() {
        let f5 = f(5);
        let u = Subspace::from_rows(f5, 2, &[v(f5, &[1, 0])]).unwrap();
        assert!(!contains(&u, &v(f5, &[0, 1])).unwrap());
        assert!(contains(&u, &FpVector::zero(f5, 2)).unwrap());
        assert!(contains(&u, &FpVector::zero(f5, 3)).is_err());
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let f11 = f(11);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut singular = 0;
        for _ in 0..200 {
            let cols: Vec<FpVector> = (0..4)
                .map(|_| v(f11, &(0..4).map(|_| rng.gen_range(0..11)).collect::<Vec<_>>()))
                .collect();
            let m = FpMatrix::from_columns(f11, &cols);
            match m.inverse() {
                Some(inv) => assert_eq!(m.mul(&inv), FpMatrix::identity(f11, 4)),
                None => {
                    singular += 1;
                    assert!(m.rank() < 4);
                }
            }
        }
        assert!(singular < 200);
    }

    #[test]
    fn index_round_trip() {
        let f5 = f(5);
        for idx in 0..125 {
            let x = FpVector::from_index(f5, 3, idx);
            assert_eq!(x.to_index(), idx);
        }
    }

    #[test]
    fn elements_enumerates_span() {
        let f5 = f(5);
        let s = rref(&[v(f5, &[1, 2, 0]), v(f5, &[0, 0, 1])]).unwrap();
        let els = s.elements();
        assert_eq!(els.len(), 25);
        assert!(els.iter().all(|e| s.contains(e).unwrap()));
    }

    fn arb_rows(p: u64, dim: usize, max_rows: usize) -> impl Strategy<Value = Vec<FpVector>> {
        let field = f(p);
        prop::collection::vec(prop::collection::vec(0..p as i64, dim), 0..=max_rows)
            .prop_map(move |rows| rows.iter().map(|r| v(field, r)).collect())
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(rows in arb_rows(7, 5, 8)) {
            let f7 = f(7);
            let s = Subspace::from_rows(f7, 5, &rows).unwrap();
            let again = Subspace::from_rows(f7, 5, s.basis()).unwrap();
            prop_assert_eq!(&s, &again);
            for r in &rows {
                prop_assert!(s.contains(r).unwrap());
            }
        }

        #[test]
        fn sum_laws(a in arb_rows(7, 5, 4), b in arb_rows(7, 5, 4), c in arb_rows(7, 5, 4)) {
            let f7 = f(7);
            let [u, w, x] = [a, b, c].map(|r| Subspace::from_rows(f7, 5, &r).unwrap());
            let uw = u.sum(&w).unwrap();
            prop_assert_eq!(&uw, &w.sum(&u).unwrap());
            prop_assert_eq!(&u.sum(&u).unwrap(), &u);
            prop_assert_eq!(uw.sum(&x).unwrap(), u.sum(&w.sum(&x).unwrap()).unwrap());
            prop_assert!(uw.rank() <= u.rank() + w.rank());
            prop_assert!(u.is_subspace_of(&uw).unwrap() && w.is_subspace_of(&uw).unwrap());
            let concat: Vec<FpVector> = u.basis().iter().chain(w.basis()).copied().collect();
            prop_assert_eq!(uw.rank(), Subspace::from_rows(f7, 5, &concat).unwrap().rank());
        }

        #[test]
        fn combinations_of_basis_are_members(rows in arb_rows(7, 5, 5), coeffs in prop::collection::vec(0u32..7, 5)) {
            let f7 = f(7);
            let s = Subspace::from_rows(f7, 5, &rows).unwrap();
            let mut x = FpVector::zero(f7, 5);
            for (b, &c) in s.basis().iter().zip(&coeffs) {
                x.add_scaled(c, b);
            }
            prop_assert!(s.contains(&x).unwrap());
        }
    }
}
