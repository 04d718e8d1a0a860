//! The group of flows: truncated exponentials of left multiplications.
//!
//! For a nilpotent pre-Lie algebra with index `k < p` every series below has
//! at most `k` nonzero terms, so truncation is exact.

use crate::error::{Error, Result};
use crate::filtration::{strong_chain, DEFAULT_MAX_N};
use crate::linalg::{FpMatrix, FpVector};
use crate::prelie::PreLieAlgebra;

#[derive(Clone, Debug)]
pub struct FlowsContext {
    algebra: PreLieAlgebra,
    index: usize,
    terms: usize,
    /// `inv_factorials[m] = 1/m!`
    inv_factorials: Vec<u32>,
}

impl FlowsContext {
    /// Validates the algebra and fixes the series length at the nilpotency index.
    pub fn new(algebra: PreLieAlgebra) -> Result<Self> {
        let index = Self::index_of(&algebra)?;
        Self::build(algebra, index, index)
    }

    /// Same as [`FlowsContext::new`] but summing `terms` series terms.
    /// Used to confirm that terms past the index contribute nothing.
    pub fn with_terms(algebra: PreLieAlgebra, terms: usize) -> Result<Self> {
        let index = Self::index_of(&algebra)?;
        Self::build(algebra, index, terms.max(index))
    }

    fn index_of(algebra: &PreLieAlgebra) -> Result<usize> {
        let algebra_ok = algebra.is_verified() || algebra.satisfies_prelie();
        if !algebra_ok {
            return Err(Error::Precondition(
                "algebra does not satisfy the pre-Lie identity".into(),
            ));
        }
        let chain = strong_chain(algebra, DEFAULT_MAX_N.max(algebra.dim() + 2));
        let index = chain
            .nilpotency_index
            .ok_or_else(|| Error::Precondition("algebra is not nilpotent".into()))?;
        let p = algebra.p() as usize;
        if p <= index {
            return Err(Error::Precondition(format!(
                "p = {p} must exceed the nilpotency index {index}"
            )));
        }
        Ok(index)
    }

    fn build(mut algebra: PreLieAlgebra, index: usize, terms: usize) -> Result<Self> {
        algebra.mark_verified();
        let inv_factorials = algebra.field().inverse_factorials(terms)?;
        Ok(FlowsContext {
            algebra,
            index,
            terms,
            inv_factorials,
        })
    }

    pub fn algebra(&self) -> &PreLieAlgebra {
        &self.algebra
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn left_mult_matrix(&self, a: &FpVector) -> FpMatrix {
        self.algebra.left_mult_matrix(a)
    }

    /// `Σ_{m<terms} L_a^m(b) / m!`
    pub fn exp_l(&self, a: &FpVector, b: &FpVector) -> FpVector {
        let mut sum = *b;
        let mut term = *b;
        for m in 1..self.terms {
            term = self.algebra.mul(a, &term);
            if term.is_zero() {
                break;
            }
            sum.add_scaled(self.inv_factorials[m], &term);
        }
        sum
    }

    /// `Σ_{m<terms} L_a^m(a) / (m+1)!`
    pub fn w(&self, a: &FpVector) -> FpVector {
        let mut sum = *a;
        let mut term = *a;
        for m in 1..self.terms {
            term = self.algebra.mul(a, &term);
            if term.is_zero() {
                break;
            }
            sum.add_scaled(self.inv_factorials[m + 1], &term);
        }
        sum
    }

    /// Inverse of [`FlowsContext::w`] by the iteration `x ← a − (W(x) − x)`.
    ///
    /// Each step fixes one more filtration degree of `x`, so `index` steps
    /// reach the fixed point.
    pub fn omega(&self, a: &FpVector) -> Result<FpVector> {
        let mut x = *a;
        for _ in 0..=self.index {
            let wx = self.w(&x);
            if &wx == a {
                return Ok(x);
            }
            x = a.sub(&wx.sub(&x));
        }
        Err(Error::NonConvergence(self.index + 1))
    }

    /// `a ∘ b = a + exp(L_Ω(a))(b)`
    pub fn circle(&self, a: &FpVector, b: &FpVector) -> Result<FpVector> {
        Ok(a.add(&self.exp_l(&self.omega(a)?, b)))
    }

    /// Matrix of `b ↦ a ∘ b − a`, i.e. `exp(L_Ω(a))`.
    pub fn lambda_matrix(&self, a: &FpVector) -> Result<FpMatrix> {
        let l = self.left_mult_matrix(&self.omega(a)?);
        let field = self.algebra.field();
        let n = self.algebra.dim();
        let mut sum = FpMatrix::identity(field, n);
        let mut power = sum;
        for m in 1..self.terms {
            power = l.mul(&power);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power.scale(self.inv_factorials[m]));
        }
        Ok(sum)
    }
}
