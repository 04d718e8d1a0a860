//! Braces on F_p^dim, their axiom checks, radical chains, and recovery of the
//! pre-Lie product from the brace.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::filtration::{chain, BilinearProduct, ChainKind, ChainReport, DEFAULT_MAX_N};
use crate::flows::FlowsContext;
use crate::linalg::{FpMatrix, FpVector, Subspace};
use crate::prelie::PreLieAlgebra;

/// Largest domain on which exhaustive triple checks are allowed.
pub const EXHAUSTIVE_LIMIT: u64 = 700;
/// Largest domain for which every λ matrix is precomputed.
pub const LAMBDA_CACHE_LIMIT: u64 = 161_051;
/// Largest domain for an explicit circle table.
pub const TABLE_LIMIT: u64 = 1024;
/// Violations kept verbatim in a report; the count covers all of them.
pub const VIOLATION_CAP: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sample { samples: u64, seed: u64 },
}

impl CheckMode {
    pub fn name(&self) -> &'static str {
        match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::Sample { .. } => "sample",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            CheckMode::Exhaustive => None,
            CheckMode::Sample { seed, .. } => Some(*seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: String,
    pub inputs: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub mode: String,
    pub seed: Option<u64>,
    pub tested: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub(crate) fn new(check: &str, mode: CheckMode) -> Self {
        CheckReport {
            check: check.into(),
            mode: mode.name().into(),
            seed: mode.seed(),
            tested: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub(crate) fn record(&mut self, law: &str, inputs: &[&FpVector]) {
        self.violation_count += 1;
        if self.violations.len() < VIOLATION_CAP {
            self.violations.push(Violation {
                law: law.into(),
                inputs: inputs.iter().map(|v| v.coords().to_vec()).collect(),
            });
        }
    }

    pub(crate) fn merge(&mut self, other: CheckReport) {
        self.tested += other.tested;
        self.violation_count += other.violation_count;
        let room = VIOLATION_CAP.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
    }
}

#[derive(Clone, Debug)]
pub enum Circle {
    /// `a ∘ b = a + exp(L_Ω(a))(b)` from a nilpotent pre-Lie algebra.
    Flows(Box<FlowsContext>),
    /// `table[i * size + j]` is the index of `x_i ∘ x_j`.
    Table(Vec<u32>),
    /// `a ∘ b = a + b`
    Trivial,
}

#[derive(Clone, Debug)]
pub struct Brace {
    field: PrimeField,
    dim: usize,
    circle: Circle,
    verified: bool,
    lambdas: OnceLock<Vec<FpMatrix>>,
}

impl Brace {
    pub fn from_flows(ctx: FlowsContext) -> Self {
        let a = ctx.algebra();
        Brace {
            field: a.field(),
            dim: a.dim(),
            circle: Circle::Flows(Box::new(ctx)),
            verified: false,
            lambdas: OnceLock::new(),
        }
    }

    pub fn trivial(field: PrimeField, dim: usize) -> Result<Self> {
        if dim == 0 || dim > crate::linalg::MAX_DIM {
            return Err(Error::BadDimension(dim));
        }
        Ok(Brace {
            field,
            dim,
            circle: Circle::Trivial,
            verified: false,
            lambdas: OnceLock::new(),
        })
    }

    pub fn from_table(field: PrimeField, dim: usize, table: Vec<u32>) -> Result<Self> {
        let size = domain_size(field, dim);
        if size > TABLE_LIMIT {
            return Err(Error::Usage(format!(
                "circle tables are limited to {TABLE_LIMIT} elements, got {size}"
            )));
        }
        if table.len() as u64 != size * size || table.iter().any(|&t| t as u64 >= size) {
            return Err(Error::Usage(format!(
                "circle table must be {size} x {size} element indices"
            )));
        }
        Ok(Brace {
            field,
            dim,
            circle: Circle::Table(table),
            verified: false,
            lambdas: OnceLock::new(),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> u64 {
        domain_size(self.field, self.dim)
    }

    pub fn construction(&self) -> &Circle {
        &self.circle
    }

    pub fn source_algebra(&self) -> Option<&PreLieAlgebra> {
        match &self.circle {
            Circle::Flows(ctx) => Some(ctx.algebra()),
            _ => None,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn element(&self, idx: u64) -> FpVector {
        FpVector::from_index(self.field, self.dim, idx)
    }

    pub fn zero(&self) -> FpVector {
        FpVector::zero(self.field, self.dim)
    }

    fn uncached_lambda(&self, a: &FpVector) -> FpMatrix {
        match &self.circle {
            Circle::Flows(ctx) => ctx
                .lambda_matrix(a)
                .expect("flows context was validated at construction"),
            Circle::Trivial => FpMatrix::identity(self.field, self.dim),
            Circle::Table(_) => {
                let cols: Vec<FpVector> = (0..self.dim)
                    .map(|j| self.circle(a, &FpVector::unit(self.field, self.dim, j)).sub(a))
                    .collect();
                FpMatrix::from_columns(self.field, &cols)
            }
        }
    }

    /// Matrix of `λ_a(b) = a ∘ b − a`. Exact when `λ_a` is linear, which holds
    /// for F_p-braces; for an explicit table it is built from basis images.
    pub fn lambda(&self, a: &FpVector) -> FpMatrix {
        if self.size() <= LAMBDA_CACHE_LIMIT && !matches!(self.circle, Circle::Trivial) {
            let cache = self.lambdas.get_or_init(|| {
                (0..self.size())
                    .into_par_iter()
                    .map(|i| self.uncached_lambda(&self.element(i)))
                    .collect()
            });
            cache[a.to_index() as usize]
        } else {
            self.uncached_lambda(a)
        }
    }

    pub fn circle(&self, a: &FpVector, b: &FpVector) -> FpVector {
        match &self.circle {
            Circle::Trivial => a.add(b),
            Circle::Table(t) => {
                let size = self.size();
                self.element(t[(a.to_index() * size + b.to_index()) as usize] as u64)
            }
            Circle::Flows(ctx) => ctx.circle(a, b).expect("flows context was validated at construction"),
        }
    }

    /// `a * b` through the cached λ matrix. Agrees with [`Brace::star`] on
    /// F_p-braces, where every λ_a is linear; the checks use the direct form.
    pub fn star_linear(&self, a: &FpVector, b: &FpVector) -> FpVector {
        match &self.circle {
            Circle::Flows(_) => self.lambda(a).apply(b).sub(b),
            _ => self.star(a, b),
        }
    }

    /// `a * b = a ∘ b − a − b`
    pub fn star(&self, a: &FpVector, b: &FpVector) -> FpVector {
        self.circle(a, b).sub(a).sub(b)
    }

    /// `λ_a(b) = a ∘ b − a`
    pub fn lambda_apply(&self, a: &FpVector, b: &FpVector) -> FpVector {
        self.circle(a, b).sub(a)
    }

    /// The `x` with `a ∘ x = x ∘ a = 0`.
    ///
    /// Iterates `x ← x − a ∘ x`, which converges when `λ_a − 1` is nilpotent,
    /// and falls back to a search of the whole group on small domains.
    pub fn circle_inverse(&self, a: &FpVector) -> Result<FpVector> {
        let zero = self.zero();
        let is_inverse = |x: &FpVector| self.circle(a, x) == zero && self.circle(x, a) == zero;
        let mut x = a.neg();
        for _ in 0..self.dim + 2 {
            if is_inverse(&x) {
                return Ok(x);
            }
            x = x.sub(&self.circle(a, &x));
        }
        if is_inverse(&x) {
            return Ok(x);
        }
        if self.size() <= TABLE_LIMIT * 16 {
            if let Some(x) = (0..self.size()).map(|i| self.element(i)).find(is_inverse) {
                return Ok(x);
            }
        }
        Err(Error::Precondition(format!(
            "{a} has no inverse under the circle operation"
        )))
    }

    fn exhaustive_guard(&self) -> Result<()> {
        if self.size() > EXHAUSTIVE_LIMIT {
            return Err(Error::OversizedExhaustive {
                size: self.size() as u128,
                limit: EXHAUSTIVE_LIMIT as u128,
            });
        }
        Ok(())
    }

    fn check_unary(&self, a: &FpVector, report: &mut CheckReport) {
        let zero = self.zero();
        if self.circle(&zero, a) != *a || self.circle(a, &zero) != *a {
            report.record("identity", &[a]);
        }
        if self.circle_inverse(a).is_err() {
            report.record("inverse", &[a]);
        }
    }

    fn check_triple(&self, a: &FpVector, b: &FpVector, c: &FpVector, report: &mut CheckReport) {
        let ab = self.circle(a, b);
        let bc = self.circle(b, c);
        if self.circle(&ab, c) != self.circle(a, &bc) {
            report.record("associativity", &[a, b, c]);
        }
        let lhs = self.circle(a, &b.add(c)).add(a);
        let rhs = ab.add(&self.circle(a, c));
        if lhs != rhs {
            report.record("left brace law", &[a, b, c]);
        }
        report.tested += 1;
    }

    /// Group axioms of `∘` (identity, inverses, associativity) and the left
    /// brace law `a ∘ (b + c) + a = a ∘ b + a ∘ c`.
    pub fn check_brace_axioms(&self, mode: CheckMode) -> Result<CheckReport> {
        let mut report = CheckReport::new("brace axioms", mode);
        match mode {
            CheckMode::Exhaustive => {
                self.exhaustive_guard()?;
                let n = self.size();
                let parts: Vec<CheckReport> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let mut r = CheckReport::new("brace axioms", mode);
                        let a = self.element(i);
                        self.check_unary(&a, &mut r);
                        for j in 0..n {
                            let b = self.element(j);
                            for k in 0..n {
                                self.check_triple(&a, &b, &self.element(k), &mut r);
                            }
                        }
                        r
                    })
                    .collect();
                for r in parts {
                    report.merge(r);
                }
            }
            CheckMode::Sample { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = self.size();
                for _ in 0..samples {
                    let [a, b, c] = [0; 3].map(|_| self.element(rng.gen_range(0..n)));
                    self.check_unary(&a, &mut report);
                    self.check_triple(&a, &b, &c, &mut report);
                }
            }
        }
        Ok(report)
    }

    /// Right linearity of the star operation, `a * (αb) = α (a * b)`.
    pub fn check_fp_brace(&self, mode: CheckMode) -> Result<CheckReport> {
        let mut report = CheckReport::new("F_p-brace law", mode);
        let p = self.field.p();
        let check = |a: &FpVector, b: &FpVector, r: &mut CheckReport| {
            let ab = self.star(a, b);
            for alpha in 0..p {
                if self.star(a, &b.scale(alpha)) != ab.scale(alpha) {
                    let s = FpVector::from_index(self.field, 1, alpha as u64);
                    r.record("right linearity", &[a, b, &s]);
                }
                r.tested += 1;
            }
        };
        match mode {
            CheckMode::Exhaustive => {
                self.exhaustive_guard()?;
                let n = self.size();
                let parts: Vec<CheckReport> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let mut r = CheckReport::new("F_p-brace law", mode);
                        let a = self.element(i);
                        for j in 0..n {
                            check(&a, &self.element(j), &mut r);
                        }
                        r
                    })
                    .collect();
                for r in parts {
                    report.merge(r);
                }
            }
            CheckMode::Sample { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = self.size();
                for _ in 0..samples {
                    let a = self.element(rng.gen_range(0..n));
                    let b = self.element(rng.gen_range(0..n));
                    check(&a, &b, &mut report);
                }
            }
        }
        Ok(report)
    }

    /// Exhaustive on small domains, otherwise 10^4 seeded samples.
    pub fn default_mode(&self) -> CheckMode {
        if self.size() <= EXHAUSTIVE_LIMIT {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sample {
                samples: 10_000,
                seed: 0,
            }
        }
    }

    /// Runs both checks and sets the verified flag when they are clean.
    pub fn verify(&mut self, mode: CheckMode) -> Result<(CheckReport, CheckReport)> {
        let axioms = self.check_brace_axioms(mode)?;
        let fp = self.check_fp_brace(mode)?;
        self.verified = axioms.passed() && fp.passed();
        Ok((axioms, fp))
    }

    pub fn chain(&self, kind: ChainKind, max_n: usize) -> ChainReport {
        chain(self, kind, max_n)
    }
}

impl BilinearProduct for Brace {
    fn full_space(&self) -> Subspace {
        Subspace::full(self.field, self.dim)
    }

    /// Span of `u * v` over every `u ∈ U` and basis vectors `v` of `V`.
    /// The star operation is right-linear but not left-linear.
    fn product_span(&self, u: &Subspace, v: &Subspace) -> Subspace {
        let mut out = Subspace::zero(self.field, self.dim);
        if u.is_zero() || v.is_zero() {
            return out;
        }
        for x in u.elements() {
            for y in v.basis() {
                out.insert_unchecked(self.star_linear(&x, y));
            }
            if out.is_full() {
                break;
            }
        }
        out
    }
}

pub fn domain_size(field: PrimeField, dim: usize) -> u64 {
    (field.p() as u64).saturating_pow(dim as u32)
}

/// Flows brace of a nilpotent pre-Lie algebra with `p` above its index.
pub fn flow_brace(algebra: PreLieAlgebra) -> Result<Brace> {
    Ok(Brace::from_flows(FlowsContext::new(algebra)?))
}

pub fn star(b: &Brace, x: &FpVector, y: &FpVector) -> FpVector {
    b.star(x, y)
}

pub fn check_brace_axioms(b: &Brace, mode: CheckMode) -> Result<CheckReport> {
    b.check_brace_axioms(mode)
}

pub fn check_fp_brace(b: &Brace, mode: CheckMode) -> Result<CheckReport> {
    b.check_fp_brace(mode)
}

pub fn brace_chains(b: &Brace, kind: ChainKind, max_n: usize) -> ChainReport {
    b.chain(kind, max_n)
}

pub fn circle_inverse(b: &Brace, a: &FpVector) -> Result<FpVector> {
    b.circle_inverse(a)
}

/// `Σ_{i=0}^{p−2} ζ^{p−1−i} ((ζ^i a) * b)`
///
/// On a brace coming from a pre-Lie algebra this picks out the part of `a * b`
/// linear in `a`, scaled by `p − 1`: the character sum over the powers of ζ
/// vanishes on every other degree below `p − 1`.
pub fn zeta_sum(b: &Brace, x: &FpVector, y: &FpVector, zeta: u32) -> FpVector {
    let f = b.field();
    let p = f.p() as u64;
    let mut out = b.zero();
    for i in 0..p - 1 {
        let zi = f.pow(zeta, i);
        let coeff = f.pow(zeta, p - 1 - i);
        out.add_scaled(coeff, &b.star(&x.scale(zi), y));
    }
    out
}

/// Recovers the pre-Lie product from a strongly nilpotent F_p-brace with
/// index `k` and dimension `n`, where `k < p` and `n + 1 < p`.
///
/// The product on basis pairs is `zeta_sum / (p − 1)`, using the smallest
/// primitive root.
pub fn brace_to_prelie(b: &Brace) -> Result<PreLieAlgebra> {
    brace_to_prelie_with_root(b, b.field().primitive_root())
}

pub fn brace_to_prelie_with_root(b: &Brace, zeta: u32) -> Result<PreLieAlgebra> {
    let f = b.field();
    let p = f.p() as usize;
    if !f.is_primitive_root(zeta) {
        return Err(Error::Usage(format!("{zeta} is not a primitive root modulo {p}")));
    }
    if b.dim() + 1 >= p {
        return Err(Error::Precondition(format!(
            "dimension {} needs p > {}, got {p}",
            b.dim(),
            b.dim() + 1
        )));
    }
    if !b.is_verified() {
        let axioms = b.check_brace_axioms(b.default_mode())?;
        let fp = b.check_fp_brace(b.default_mode())?;
        if !axioms.passed() || !fp.passed() {
            return Err(Error::Precondition(format!(
                "not an F_p-brace: {} axiom and {} right-linearity violations",
                axioms.violation_count, fp.violation_count
            )));
        }
    }
    let strong = b.chain(ChainKind::Strong, DEFAULT_MAX_N.max(p));
    let k = strong
        .nilpotency_index
        .ok_or_else(|| Error::Precondition("brace is not strongly nilpotent".into()))?;
    if k >= p {
        return Err(Error::Precondition(format!(
            "nilpotency index {k} must be below p = {p}"
        )));
    }
    let scale = f.inv(f.p() - 1)?;
    let n = b.dim();
    let mut table = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let ei = FpVector::unit(f, n, i);
            let ej = FpVector::unit(f, n, j);
            table.push(zeta_sum(b, &ei, &ej, zeta).scale(scale));
        }
    }
    PreLieAlgebra::from_table(f, n, table)?.verified()
}
