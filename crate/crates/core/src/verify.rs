//! Formula-versus-engine comparisons and the structural checks around them.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::arith::{euler_phi, factorize, is_prime, sl2_order};
use crate::error::{Error, Result};
use crate::families::{
    find_nonsplit_algebra, nonsplit_transversal, split_transversal_primepower, Family, SubgroupSpec,
};
use crate::formulas::{invariants_formula, InvariantSet};
use crate::matgrp::{close_group, invariants_bruteforce, EngineConfig, Mat2};

/// Outcome of comparing both computations for one spec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub spec: SubgroupSpec,
    pub formula: Option<InvariantSet>,
    pub bruteforce: Option<InvariantSet>,
    #[serde(rename = "match")]
    pub matched: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub matched: usize,
    pub mismatched: usize,
    pub errored: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn from_entries(entries: Vec<CheckEntry>) -> VerificationReport {
        let mut summary = Summary {
            total: entries.len(),
            ..Summary::default()
        };
        for e in &entries {
            if e.error.is_some() {
                summary.errored += 1;
            } else if e.matched {
                summary.matched += 1;
            } else {
                summary.mismatched += 1;
            }
        }
        VerificationReport { entries, summary }
    }

    pub fn all_match(&self) -> bool {
        self.summary.matched == self.summary.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.matched)
    }

    pub fn total_wall_time(&self) -> Duration {
        self.entries.iter().map(|e| e.wall_time).sum()
    }
}

/// Computes both invariant sets for `spec`. Failures are recorded in the
/// entry rather than returned.
pub fn cross_check(spec: &SubgroupSpec, config: &EngineConfig) -> CheckEntry {
    let start = Instant::now();
    let formula = invariants_formula(spec);
    let bruteforce = invariants_bruteforce(spec, config);
    let error = match (&formula, &bruteforce) {
        (Err(e), _) => Some(format!("formula: {e}")),
        (_, Err(e)) => Some(format!("bruteforce: {e}")),
        _ => None,
    };
    let formula = formula.ok();
    let bruteforce = bruteforce.ok();
    let matched = match (&formula, &bruteforce) {
        (Some(f), Some(b)) => f.same_values(b),
        _ => false,
    };
    CheckEntry {
        spec: spec.clone(),
        formula,
        bruteforce,
        matched,
        error,
        wall_time: start.elapsed(),
    }
}

/// Which specs a sweep covers.
///
/// One-parameter families run over `1..=max_level`, the arithmetic
/// families over moduli `M * N <= arith_max_modulus`, and `s4` over primes
/// `5 <= p <= s4_max_prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPlan {
    pub families: Vec<Family>,
    pub max_level: u64,
    pub arith_max_modulus: u64,
    pub s4_max_prime: u64,
}

impl SweepPlan {
    pub fn new(families: impl IntoIterator<Item = Family>, max_level: u64) -> SweepPlan {
        let mut families: Vec<Family> = families.into_iter().collect();
        families.sort_unstable();
        families.dedup();
        SweepPlan {
            families,
            max_level,
            arith_max_modulus: max_level,
            s4_max_prime: max_level,
        }
    }

    pub fn with_arith_max(mut self, max_modulus: u64) -> SweepPlan {
        self.arith_max_modulus = max_modulus;
        self
    }

    pub fn with_s4_max(mut self, max_prime: u64) -> SweepPlan {
        self.s4_max_prime = max_prime;
        self
    }

    pub fn specs(&self) -> Vec<SubgroupSpec> {
        self.families
            .iter()
            .flat_map(|&family| {
                let top = match family {
                    Family::Arith1 | Family::ArithPm1 => self.arith_max_modulus,
                    Family::S4 => self.s4_max_prime,
                    _ => self.max_level,
                };
                SubgroupSpec::admissible(family, 1, top)
            })
            .collect()
    }
}

/// Cross-checks every spec in the plan. Entries run in parallel and come
/// back in plan order.
pub fn sweep(plan: &SweepPlan, config: &EngineConfig) -> Result<VerificationReport> {
    if plan.max_level == 0 {
        return Err(Error::InvalidSpec("max level must be positive".into()));
    }
    let specs = plan.specs();
    let entries: Vec<CheckEntry> = specs.par_iter().map(|s| cross_check(s, config)).collect();
    Ok(VerificationReport::from_entries(entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransversalKind {
    Split,
    Nonsplit,
}

/// Whether the explicit representatives form a transversal: one per right
/// coset, and as many as the index.
///
/// Split representatives are checked against the split Cartan in `GL2`,
/// which needs a prime-power modulus. Nonsplit ones are checked against
/// the determinant-one part of the nonsplit Cartan in `SL2`.
pub fn transversal_check(kind: TransversalKind, modulus: u64) -> Result<bool> {
    if modulus < 2 {
        return Err(Error::InvalidSpec(format!("transversal modulus {modulus}")));
    }
    let (reps, cartan, index) = match kind {
        TransversalKind::Split => {
            let f = factorize(modulus)?;
            let &[(p, r)] = f.pairs() else {
                return Err(Error::InvalidSpec(format!(
                    "{modulus} is not a prime power"
                )));
            };
            debug_assert!(is_prime(p));
            let spec = SubgroupSpec::new(Family::Sp, modulus);
            let cartan = close_group(modulus, &crate::families::subgroup_generators(&spec)?)?;
            let gl2 = sl2_order(modulus)? * euler_phi(modulus)?;
            let index = gl2 / cartan.len() as u64;
            (split_transversal_primepower(p, r)?, cartan, index)
        }
        TransversalKind::Nonsplit => {
            let alg = find_nonsplit_algebra(modulus)?;
            let units = alg.units();
            let cartan: Vec<Mat2> = units
                .iter()
                .filter(|&&x| alg.norm(x) == 1)
                .map(|&x| alg.mult_matrix(x))
                .collect();
            let index = sl2_order(modulus)? / cartan.len() as u64;
            (nonsplit_transversal(modulus, &alg)?, cartan, index)
        }
    };
    if reps.len() as u64 != index {
        return Ok(false);
    }
    let members: FxHashSet<u64> = cartan.iter().map(Mat2::key).collect();
    let inverses: Vec<Mat2> = reps
        .iter()
        .map(|x| {
            x.inverse()
                .ok_or_else(|| Error::NonUnitDeterminant(x.to_string()))
        })
        .collect::<Result<_>>()?;
    let distinct = (0..reps.len())
        .into_par_iter()
        .all(|j| (0..j).all(|k| !members.contains(&(reps[j] * inverses[k]).key())));
    Ok(distinct)
}

/// Whether each of `(i, ε₂, ε₃, ε∞)` at `n` is the product of its values at
/// the prime-power parts of `n`.
pub fn multiplicativity_check(family: Family, n: u64) -> Result<bool> {
    if !matches!(
        family,
        Family::Sp | Family::SpStar | Family::Ns | Family::NsStar
    ) {
        return Err(Error::InvalidSpec(format!(
            "multiplicativity is only claimed for sp, sp*, ns, ns*, not {family}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "multiplicativity needs N >= 2, got {n}"
        )));
    }
    let whole = invariants_formula(&SubgroupSpec::new(family, n))?;
    let mut product = [1u64; 4];
    for pe in factorize(n)?.prime_powers() {
        let local = invariants_formula(&SubgroupSpec::new(family, pe))?;
        let parts = [local.psl2_index, local.eps2, local.eps3, local.eps_inf];
        for (acc, x) in product.iter_mut().zip(parts) {
            *acc = acc
                .checked_mul(x)
                .ok_or(Error::Overflow("multiplicativity"))?;
        }
    }
    Ok(product == [whole.psl2_index, whole.eps2, whole.eps3, whole.eps_inf])
}
