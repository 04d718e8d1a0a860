//! Scalar systems as printed for the two-, three- and four-generator cases,
//! kept verbatim (subscripts included) so they can be compared against the
//! derived relations rather than trusted.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cases::CaseSpec;
use super::poly::{parse_equation, Poly};
use super::relations::{derived_relations, relations_hold};
use super::solve::Tower;
use crate::error::{Error, Result};
use crate::field::PrimeField;

const G2_A4ZERO_DIM2: &[&str] = &[
    "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_ux - alpha_xx*delta_yu",
    "alpha_xy*nu_ux - alpha_yx*nu_xu = alpha_yx*nu_ux - alpha_xx*nu_yu",
    "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_uy - alpha_yy*delta_xu",
    "alpha_yx*nu_uy - alpha_xy*nu_yu = alpha_xy*nu_uy - alpha_yy*nu_xu",
];

const G2_A4ZERO_DIM1: &[&str] = &[
    "alpha_xy*delta_ux + beta_xy*delta_vx - alpha_yx*delta_xu - beta_yx*delta_xv = alpha_yx*delta_ux + beta_yx*delta_vx - alpha_xx*delta_yu - beta_xx*delta_yv",
    "alpha_yx*delta_uy + beta_yx*delta_vy - alpha_xy*delta_yu - beta_xy*delta_yv = alpha_xy*delta_uy + beta_xy*delta_vy - alpha_yy*delta_xu - beta_yy*delta_xv",
];

const G2_A5ZERO: &[&str] = &[
    "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_xu - alpha_xx*delta_uy",
    "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_yu - alpha_yy*delta_ux",
    "alpha_xy*nu_ux + beta_xy*mu_vx - alpha_yx*nu_xu - beta_yx*mu_xv = alpha_yx*nu_ux + beta_yx*mu_vx - alpha_xx*nu_uy - beta_xx*mu_yv",
    "alpha_yx*nu_uy + beta_yx*mu_vy - alpha_xy*nu_yu - beta_xy*mu_yv = alpha_xy*nu_uy + beta_xy*mu_vy - alpha_yy*nu_ux - beta_yy*mu_xv",
    "alpha_xy^2*mu_uu - alpha_xy*delta_yu*mu_xv = alpha_yx*alpha_xy*mu_uu - alpha_xy*delta_xu*mu_yv",
    "alpha_xy*alpha_yx*mu_uu - alpha_yx*delta_yu*mu_xv = alpha_yx^2*mu_uu - alpha_yx*delta_xu*mu_yv",
    "alpha_xy*alpha_xx*mu_uu - alpha_xx*delta_yu*mu_xv = alpha_yx*alpha_xx*mu_uu - alpha_xx*delta_xu*mu_yv",
    "alpha_xy*alpha_yy*mu_uu - alpha_yy*delta_yu*mu_xv = alpha_yx*alpha_yy*mu_uu - alpha_yy*delta_xu*mu_yv",
    "delta_xu*mu_vy - delta_uy*mu_xv = delta_ux*mu_vy - alpha_xy*mu_uu",
    "delta_xu*mu_vx - delta_ux*mu_xv = delta_ux*mu_vx - alpha_xx*mu_uu",
    "delta_yu*mu_vy - delta_uy*mu_yv = delta_uy*mu_vy - alpha_yy*mu_uu",
    "delta_yu*mu_vx - delta_ux*mu_yv = delta_uy*mu_vx - alpha_yx*mu_uu",
];

const G2_A5EQA4: &[&str] = &[
    "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_xu - alpha_xx*delta_uy",
    "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_yu - alpha_yy*delta_ux",
    "alpha_xy*nu_ux + beta_xy*mu_vx - alpha_yx*nu_xu - beta_yx*mu_xv = alpha_yx*nu_ux + beta_yx*mu_vx - alpha_xx*nu_uy - beta_xx*mu_yv",
    "alpha_yx*nu_uy + beta_yx*mu_vy - alpha_xy*nu_yu - beta_xy*mu_yv = alpha_xy*nu_uy + beta_xy*mu_vy - alpha_yy*nu_ux - beta_yy*mu_xv",
    "alpha_xy^2*mu_uu + alpha_xy*beta_xy*mu_uv - alpha_xy*delta_yu*mu_xv = alpha_yx*alpha_xy*mu_uu + alpha_yx*beta_xy*mu_uv - alpha_xy*delta_xu*mu_yv",
    "alpha_xy*alpha_yx*mu_uu + alpha_xy*beta_yx*mu_uv - alpha_yx*delta_yu*mu_xv = alpha_yx^2*mu_uu + alpha_yx*beta_yx*mu_uv - alpha_yx*delta_xu*mu_yv",
    "alpha_xy*alpha_xx*mu_uu + alpha_xy*beta_xx*mu_uv - alpha_xx*delta_yu*mu_xv = alpha_yx*alpha_xx*mu_uu + alpha_yx*beta_xx*mu_uv - alpha_xx*delta_xu*mu_yv",
    "alpha_xy*alpha_yy*mu_uu + alpha_xy*beta_yy*mu_uv - alpha_yy*delta_yu*mu_xv = alpha_yx*alpha_yy*mu_uu + alpha_yx*beta_yy*mu_uv - alpha_yy*delta_xu*mu_yv",
    "delta_xu*mu_vy - delta_uy*mu_xv = delta_ux*mu_vy - alpha_xy*mu_uu - beta_xy*mu_uv",
    "delta_xu*mu_vx - delta_ux*mu_xv = delta_ux*mu_vx - alpha_xx*mu_uu - beta_xx*mu_uv",
    "delta_yu*mu_vy - delta_uy*mu_yv = delta_uy*mu_vy - alpha_yy*mu_uu - beta_yy*mu_uv",
    "delta_yu*mu_vx - delta_ux*mu_yv = delta_uy*mu_vx - alpha_yx*mu_uu - beta_yx*mu_uv",
];

const G3_A4ZERO: &[&str] = &[
    "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_ux - alpha_xx*delta_yu",
    "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_uy - alpha_yy*delta_xu",
    "alpha_xz*delta_ux - alpha_zx*delta_xu = alpha_zx*delta_ux - alpha_xx*delta_zu",
    "alpha_zx*delta_uz - alpha_xz*delta_zu = alpha_xz*delta_uz - alpha_zz*delta_xu",
    "alpha_yz*delta_uy - alpha_zy*delta_yu = alpha_zy*delta_uy - alpha_yy*delta_zu",
    "alpha_zy*delta_uz - alpha_yz*delta_zu = alpha_yz*delta_uz - alpha_zz*delta_yu",
    "alpha_xy*delta_uz - alpha_yz*delta_xu = alpha_yx*delta_uz - alpha_xz*delta_yu",
    "alpha_yz*delta_ux - alpha_zx*delta_yu = alpha_zy*delta_ux - alpha_yx*delta_zu",
    "alpha_xz*delta_uy - alpha_zy*delta_xu = alpha_zx*delta_uy - alpha_xy*delta_zu",
];

/// Printed equations for a case family, or `None` if nothing is printed.
/// The four-generator case prints no relations, so its system is empty.
pub fn printed_equations(family: &str) -> Option<&'static [&'static str]> {
    Some(match family {
        "G2-A4zero-dim2" => G2_A4ZERO_DIM2,
        "G2-A4zero-dim1" => G2_A4ZERO_DIM1,
        "G2-A5zero" => G2_A5ZERO,
        "G2-A5eqA4" => G2_A5EQA4,
        "G3-A4zero" => G3_A4ZERO,
        "G4" => &[],
        _ => return None,
    })
}

/// Families with a printed system.
pub const PRINTED_FAMILIES: [&str; 6] = [
    "G2-A4zero-dim2",
    "G2-A4zero-dim1",
    "G2-A5zero",
    "G2-A5eqA4",
    "G3-A4zero",
    "G4",
];

/// Each printed equation as `lhs − rhs` over the case parameters.
pub fn printed_system(spec: &CaseSpec) -> Result<Vec<Poly>> {
    let eqs = printed_equations(&spec.family)
        .ok_or_else(|| Error::Usage(format!("no printed system for case {}", spec.id)))?;
    let lookup = |s: &str| spec.param_index(s);
    eqs.iter().map(|e| parse_equation(e, &lookup)).collect()
}

/// Printed equations evaluated as `lhs − rhs` mod p, in printed order.
pub fn printed_relation_residuals(spec: &CaseSpec, field: PrimeField, params: &[u32]) -> Result<Vec<u32>> {
    spec.check_params(field, params)?;
    Ok(printed_system(spec)?.iter().map(|e| e.eval(field, params)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub case_id: String,
    /// 0-based position in the printed list.
    pub equation_index: usize,
    pub equation: String,
    /// Points satisfying the derived relations where this equation fails.
    pub failures: u64,
    /// First such point, as `name=value` pairs.
    pub example: Vec<(String, u32)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub case_id: String,
    pub p: u32,
    pub seed: u64,
    pub points: u64,
    /// Points at which every printed equation vanishes.
    pub agreeing_points: u64,
    pub discrepancies: Vec<Discrepancy>,
}

/// Compares printed and derived systems at `points` points drawn from the
/// solution set of the derived relations.
pub fn cross_check(spec: &CaseSpec, field: PrimeField, points: usize, seed: u64) -> Result<CrossCheck> {
    let eqs = printed_equations(&spec.family)
        .ok_or_else(|| Error::Usage(format!("no printed system for case {}", spec.id)))?;
    let printed = printed_system(spec)?;
    let rels = derived_relations(spec);
    let tower = Tower::new(spec, &rels, field, &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = vec![0u64; printed.len()];
    let mut examples: Vec<Option<Vec<u32>>> = vec![None; printed.len()];
    let mut agreeing = 0;
    let mut tested = 0;
    for _ in 0..points {
        let Some(pt) = tower.sample(&mut rng, 1000) else {
            break;
        };
        debug_assert!(relations_hold(&rels, field, &pt));
        tested += 1;
        let mut ok = true;
        for (i, e) in printed.iter().enumerate() {
            if e.eval(field, &pt) != 0 {
                ok = false;
                failures[i] += 1;
                examples[i].get_or_insert_with(|| pt.clone());
            }
        }
        agreeing += ok as u64;
    }
    let names = spec.param_names();
    let discrepancies = failures
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(i, &n)| Discrepancy {
            case_id: spec.id.clone(),
            equation_index: i,
            equation: eqs[i].to_string(),
            failures: n,
            example: names
                .iter()
                .cloned()
                .zip(examples[i].clone().unwrap())
                .filter(|(_, v)| *v != 0)
                .collect(),
        })
        .collect();
    Ok(CrossCheck {
        case_id: spec.id.clone(),
        p: field.p(),
        seed,
        points: tested,
        agreeing_points: agreeing,
        discrepancies,
    })
}
