//! Candidate validation and parameter sweeps with a mergeable census.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cases::CaseSpec;
use super::fingerprint::{fingerprint_with_strong, Fingerprint};
use super::poly::Poly;
use super::relations::derived_relations;
use super::solve::{resolve_fixed, Tower};
use super::transcribed::printed_system;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::filtration::{bounds_from_chain, strong_chain, DEFAULT_MAX_N};
use crate::prelie::PreLieAlgebra;

pub const DEFAULT_BUDGET: u128 = 100_000_000;
pub const DEFAULT_RECORD_CAP: usize = 10_000;
const CHUNKS: u128 = 256;
const SAMPLE_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub axiom_violations: usize,
    pub strong_dims: Vec<usize>,
    pub generator_count: usize,
    pub bounds_hold: bool,
    pub failed_conditions: Vec<String>,
    /// `lhs − rhs` of each printed equation, when the case has a printed system.
    pub printed_residuals: Option<Vec<u32>>,
    pub fingerprint: Fingerprint,
    pub accepted: bool,
    /// First failed check of a rejected candidate.
    pub reason: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CandidateAlgebra {
    pub algebra: PreLieAlgebra,
    pub case_id: String,
    pub params: Vec<u32>,
    pub validation: Validation,
}

/// Runs every check of the case on `a`, built from `spec` at some point.
pub fn validate(spec: &CaseSpec, printed: Option<&[Poly]>, a: &PreLieAlgebra, params: &[u32]) -> Validation {
    let axiom_violations = if a.satisfies_prelie() {
        0
    } else {
        a.check_prelie_axiom().len()
    };
    let strong = strong_chain(a, DEFAULT_MAX_N);
    let strong_dims = strong.dims();
    let generator_count = a.dim() - strong_dims.get(1).copied().unwrap_or(0);
    let bounds_hold = bounds_from_chain(a.dim(), generator_count, &strong).all_hold();
    let failed_conditions: Vec<String> = spec
        .conditions
        .iter()
        .filter(|c| !c.holds(a, &strong))
        .map(|c| c.text.clone())
        .collect();
    let printed_residuals = printed.map(|sys| sys.iter().map(|e| e.eval(a.field(), params)).collect());
    let fingerprint = fingerprint_with_strong(a, &strong);
    let reason = if axiom_violations > 0 {
        Some("axiom".to_string())
    } else if strong_dims != spec.expected_strong {
        Some("strong dims".to_string())
    } else if generator_count != spec.generator_count {
        Some("generator count".to_string())
    } else if !bounds_hold {
        Some("index bound".to_string())
    } else {
        failed_conditions.first().map(|c| format!("condition: {c}"))
    };
    Validation {
        axiom_violations,
        strong_dims,
        generator_count,
        bounds_hold,
        failed_conditions,
        printed_residuals,
        fingerprint,
        accepted: reason.is_none(),
        reason,
    }
}

/// Builds and validates the algebra of `spec` at `params`.
pub fn build_candidate(spec: &CaseSpec, field: PrimeField, params: &[u32]) -> Result<CandidateAlgebra> {
    spec.check_params(field, params)?;
    let algebra = spec.algebra_at(field, params);
    let printed = printed_system(spec).ok();
    let validation = validate(spec, printed.as_deref(), &algebra, params);
    Ok(CandidateAlgebra {
        algebra,
        case_id: spec.id.clone(),
        params: params.to_vec(),
        validation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordPolicy {
    /// Every visited point, up to the record cap.
    All,
    /// One accepted point per fingerprint.
    Representatives,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sample { samples: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub mode: SweepMode,
    /// Largest number of solution points an exhaustive sweep may visit.
    pub budget: u128,
    /// Samples drawn instead when an exhaustive sweep is over budget;
    /// `None` makes that an error.
    pub fallback: Option<(u64, u64)>,
    /// Parameters held at given values.
    pub fixed: Vec<(String, u32)>,
    pub records: RecordPolicy,
    pub record_cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mode: SweepMode::Exhaustive,
            budget: DEFAULT_BUDGET,
            fallback: None,
            fixed: Vec::new(),
            records: RecordPolicy::Representatives,
            record_cap: DEFAULT_RECORD_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub case: String,
    pub params: Vec<u32>,
    pub fingerprint: String,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FingerprintStat {
    pub count: u64,
    /// Smallest accepted parameter tuple with this fingerprint.
    pub representative: Record,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VariantStat {
    pub mode: String,
    pub solution_points: Option<u128>,
    pub visited: u64,
    pub accepted: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub case: String,
    pub p: u32,
    pub budget: u128,
    pub seed: Option<u64>,
    pub parameter_space: u128,
    pub visited: u64,
    pub accepted: u64,
    pub rejected: BTreeMap<String, u64>,
    /// Visited points where printed equation `i` has a nonzero residual.
    pub printed_failures: Vec<u64>,
    pub fingerprints: BTreeMap<String, FingerprintStat>,
    #[serde(skip)]
    by_fingerprint: BTreeMap<Fingerprint, FingerprintStat>,
    pub variants: BTreeMap<String, VariantStat>,
    pub records: Vec<Record>,
    pub records_truncated: bool,
}

impl Census {
    fn empty(case: &str, p: u32, budget: u128) -> Census {
        Census {
            case: case.to_string(),
            p,
            budget,
            seed: None,
            parameter_space: 0,
            visited: 0,
            accepted: 0,
            rejected: BTreeMap::new(),
            printed_failures: Vec::new(),
            fingerprints: BTreeMap::new(),
            by_fingerprint: BTreeMap::new(),
            variants: BTreeMap::new(),
            records: Vec::new(),
            records_truncated: false,
        }
    }

    fn observe(&mut self, spec: &CaseSpec, params: &[u32], v: &Validation, policy: RecordPolicy, cap: usize) {
        self.visited += 1;
        let record = || Record {
            case: spec.id.clone(),
            params: params.to_vec(),
            fingerprint: v.fingerprint.to_string(),
            accepted: v.accepted,
        };
        if let Some(res) = &v.printed_residuals {
            if self.printed_failures.len() < res.len() {
                self.printed_failures.resize(res.len(), 0);
            }
            for (c, &r) in self.printed_failures.iter_mut().zip(res) {
                *c += (r != 0) as u64;
            }
        }
        match &v.reason {
            None => {
                self.accepted += 1;
                match self.by_fingerprint.get_mut(&v.fingerprint) {
                    Some(s) => s.count += 1,
                    None => {
                        self.by_fingerprint.insert(
                            v.fingerprint.clone(),
                            FingerprintStat {
                                count: 1,
                                representative: record(),
                            },
                        );
                    }
                }
            }
            Some(r) => *self.rejected.entry(r.clone()).or_insert(0) += 1,
        }
        if policy == RecordPolicy::All {
            if self.records.len() < cap {
                self.records.push(record());
            } else {
                self.records_truncated = true;
            }
        }
    }

    /// Folds `other` into `self`; the result does not depend on how the
    /// sweep was partitioned.
    pub fn merge(&mut self, other: Census, cap: usize) {
        self.visited += other.visited;
        self.accepted += other.accepted;
        for (k, n) in other.rejected {
            *self.rejected.entry(k).or_insert(0) += n;
        }
        if self.printed_failures.len() < other.printed_failures.len() {
            self.printed_failures.resize(other.printed_failures.len(), 0);
        }
        for (a, b) in self.printed_failures.iter_mut().zip(other.printed_failures) {
            *a += b;
        }
        for (k, s) in other.by_fingerprint {
            match self.by_fingerprint.get_mut(&k) {
                Some(mine) => {
                    mine.count += s.count;
                    let key = |r: &Record| (r.case.clone(), r.params.clone());
                    if key(&s.representative) < key(&mine.representative) {
                        mine.representative = s.representative;
                    }
                }
                None => {
                    self.by_fingerprint.insert(k, s);
                }
            }
        }
        for (k, v) in other.variants {
            let e = self.variants.entry(k).or_default();
            e.visited += v.visited;
            e.accepted += v.accepted;
            if e.mode.is_empty() {
                e.mode = v.mode;
            }
            e.solution_points = match (e.solution_points, v.solution_points) {
                (Some(a), Some(b)) => Some(a + b),
                (a, b) => a.or(b),
            };
        }
        self.records.extend(other.records);
        self.records_truncated |= other.records_truncated;
        self.records
            .sort_by(|a, b| (&a.case, &a.params).cmp(&(&b.case, &b.params)));
        if self.records.len() > cap {
            self.records.truncate(cap);
            self.records_truncated = true;
        }
        self.parameter_space = self.parameter_space.saturating_add(other.parameter_space);
        self.seed = self.seed.or(other.seed);
    }

    /// Publishes the fingerprint table and, for representative records,
    /// fills `records`.
    fn finish(&mut self, policy: RecordPolicy) {
        self.fingerprints = self
            .by_fingerprint
            .iter()
            .map(|(k, s)| (k.to_string(), s.clone()))
            .collect();
        if policy == RecordPolicy::Representatives {
            self.records = self.fingerprints.values().map(|s| s.representative.clone()).collect();
            self.records
                .sort_by(|a, b| (&a.case, &a.params).cmp(&(&b.case, &b.params)));
        }
    }
}

/// Called once per visited point; must be cheap and thread-safe.
pub type Hook<'a> = &'a (dyn Fn(&CaseSpec, &[u32], &PreLieAlgebra, &Validation) + Sync);

struct Ctx<'a> {
    spec: &'a CaseSpec,
    printed: Option<Vec<Poly>>,
    field: PrimeField,
    opts: &'a SweepOptions,
    hook: Option<Hook<'a>>,
}

impl Ctx<'_> {
    fn visit(&self, census: &mut Census, params: &[u32]) {
        let a = self.spec.unnamed_algebra_at(self.field, params);
        let v = validate(self.spec, self.printed.as_deref(), &a, params);
        if let Some(h) = self.hook {
            h(self.spec, params, &a, &v);
        }
        census.observe(self.spec, params, &v, self.opts.records, self.opts.record_cap);
    }

    fn fresh(&self) -> Census {
        Census::empty(&self.spec.id, self.field.p(), self.opts.budget)
    }
}

/// Sweeps one case variant. See [`enumerate`] for whole families.
pub fn enumerate_case(
    spec: &CaseSpec,
    field: PrimeField,
    opts: &SweepOptions,
    hook: Option<Hook<'_>>,
) -> Result<Census> {
    let fixed = resolve_fixed(spec, field, &opts.fixed)?;
    let rels = derived_relations(spec);
    let tower = Tower::new(spec, &rels, field, &fixed);
    let ctx = Ctx {
        spec,
        printed: printed_system(spec).ok(),
        field,
        opts,
        hook,
    };
    let mode = match opts.mode {
        SweepMode::Exhaustive => match tower.count(opts.budget) {
            Ok(n) => Ok(n),
            Err(lower) => match opts.fallback {
                Some((samples, seed)) => Err(SweepMode::Sample { samples, seed }),
                None => {
                    return Err(Error::BudgetExceeded {
                        required: lower,
                        exact: false,
                        budget: opts.budget,
                    })
                }
            },
        },
        m => Err(m),
    };
    let mut census = match mode {
        Ok(total) => {
            let mut c = exhaustive(&ctx, &tower);
            debug_assert_eq!(c.visited as u128, total);
            c.variants.insert(
                spec.id.clone(),
                VariantStat {
                    mode: "exhaustive".into(),
                    solution_points: Some(total),
                    visited: c.visited,
                    accepted: c.accepted,
                },
            );
            c
        }
        Err(SweepMode::Sample { samples, seed }) => {
            let mut c = sampled(&ctx, &tower, samples, seed)?;
            c.seed = Some(seed);
            c.variants.insert(
                spec.id.clone(),
                VariantStat {
                    mode: "sample".into(),
                    solution_points: None,
                    visited: c.visited,
                    accepted: c.accepted,
                },
            );
            c
        }
        Err(SweepMode::Exhaustive) => unreachable!(),
    };
    census.parameter_space = spec.parameter_space_size(field.p());
    census.finish(opts.records);
    Ok(census)
}

fn exhaustive(ctx: &Ctx<'_>, tower: &Tower) -> Census {
    let f = ctx.field;
    let np = tower.nparams();
    let mut census = ctx.fresh();
    if tower.depth() == 0 {
        ctx.visit(&mut census, &vec![0u32; np]);
        return census;
    }
    let root = vec![0u32; np];
    let Some(sol) = tower.solve_level(0, &root) else {
        return census;
    };
    let total = sol.size(f.p());
    let chunk = total.div_ceil(CHUNKS).max(1);
    let ranges: Vec<(u128, u128)> = (0..total.div_ceil(chunk))
        .map(|i| (i * chunk, ((i + 1) * chunk).min(total)))
        .collect();
    let parts: Vec<Census> = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut part = ctx.fresh();
            let mut point = root.clone();
            sol.for_each_in(f, lo, hi, &mut |vals| {
                if tower.assign(0, vals, &mut point) {
                    tower.walk(1, &mut point, &mut |pt| ctx.visit(&mut part, pt));
                }
            });
            part
        })
        .collect();
    for p in parts {
        census.merge(p, ctx.opts.record_cap);
    }
    census
}

fn sampled(ctx: &Ctx<'_>, tower: &Tower, samples: u64, seed: u64) -> Result<Census> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        match tower.sample(&mut rng, SAMPLE_ATTEMPTS) {
            Some(p) => points.push(p),
            None => {
                return Err(Error::Precondition(format!(
                    "no solution point of case {} found in {SAMPLE_ATTEMPTS} attempts",
                    ctx.spec.id
                )))
            }
        }
    }
    let size = points.len().div_ceil(CHUNKS as usize).max(1);
    let parts: Vec<Census> = points
        .par_chunks(size)
        .map(|chunk| {
            let mut part = ctx.fresh();
            for pt in chunk {
                ctx.visit(&mut part, pt);
            }
            part
        })
        .collect();
    let mut census = ctx.fresh();
    for p in parts {
        census.merge(p, ctx.opts.record_cap);
    }
    Ok(census)
}

/// Sweeps every variant of a case family (or a single variant) and merges
/// the results. The budget applies to each variant separately.
pub fn enumerate(id: &str, field: PrimeField, opts: &SweepOptions, hook: Option<Hook<'_>>) -> Result<Census> {
    let specs = super::cases::expand(id)?;
    let mut census = Census::empty(id, field.p(), opts.budget);
    for spec in &specs {
        let c = enumerate_case(spec, field, opts, hook)?;
        census.merge(c, opts.record_cap);
    }
    census.finish(opts.records);
    Ok(census)
}
