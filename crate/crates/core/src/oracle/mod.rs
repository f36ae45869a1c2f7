//! Brute-force verification on finite quotients `exp(Λ ⊗ o/p^N)`: conjugacy classes,
//! Burnside–Dixon character tables and twist-orbit counts, compared against the
//! Poincaré-series engine.

mod dixon;
mod group;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use dixon::{character_degrees, dixon_modulus, twist_isoclass_counts, CharacterTable};
pub use group::{build_group, conjugacy_classes, derived_subgroup_order, ConjugacyClasses, FiniteGroupTable};

use crate::lattice::LieLattice;
use crate::localring::{LocalRingSpec, RingError};
use crate::poincare::{self, PoincareError, ZetaOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Hausdorff series not integral at p = {p}: denominator {denominator}")]
    BchNotIntegral { p: u64, denominator: i64 },
    #[error("group of order {order} exceeds the cap {cap}")]
    GroupTooLarge { order: String, cap: usize },
    #[error("class {0} is not supported (at most 3)")]
    UnsupportedClass(usize),
    #[error("{classes} conjugacy classes exceed the cap {cap}")]
    CapExceeded { classes: usize, cap: usize },
    #[error("no Dixon modulus found")]
    NoSuitableModulus,
    #[error("class matrices did not split into lines")]
    SplitFailed,
    #[error("group axiom check failed: {0}")]
    AxiomViolated(String),
    #[error("n_cap = {n_cap} exceeds floor(N/2) at level {level}")]
    InvalidCap { n_cap: usize, level: u32 },
    #[error("mismatch at dimension {dimension}: oracle {oracle}, poincare {poincare}")]
    MismatchFound { dimension: u64, oracle: u128, poincare: u128 },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Poincare(#[from] PoincareError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleOptions {
    pub max_order: usize,
    pub max_classes: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_order: 4096, max_classes: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub level: u32,
    pub order: usize,
    pub exponent: u64,
    pub modulus: u64,
    pub classes: usize,
    pub degrees: BTreeMap<u64, usize>,
    pub twist_counts: BTreeMap<u64, usize>,
    pub matched: Option<bool>,
}

/// Group, classes, character table and twist counts at the level of `spec`.
pub fn oracle_report(lat: &LieLattice, spec: &LocalRingSpec, opts: &OracleOptions) -> Result<OracleReport, OracleError> {
    let g = build_group(lat, spec, opts)?;
    let classes = conjugacy_classes(&g);
    let table = character_degrees(&g, &classes, opts)?;
    Ok(OracleReport {
        p: g.p(),
        level: g.level(),
        order: g.order(),
        exponent: g.exponent(),
        modulus: table.modulus,
        classes: classes.len(),
        degrees: table.degree_multiset(),
        twist_counts: twist_isoclass_counts(&table),
        matched: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCounts {
    #[serde(rename = "N")]
    pub level: u32,
    /// Twist counts at dimensions `q^n`, `n ≤ n_cap`.
    pub counts: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub q: u64,
    pub n_cap: usize,
    pub poincare: Vec<u128>,
    pub oracle: Vec<u128>,
    /// Neighbouring levels that fit under the caps.
    pub levels: Vec<LevelCounts>,
    pub stable: bool,
    pub report: OracleReport,
}

fn counts_at_powers(report: &OracleReport, q: u64, n_cap: usize) -> Vec<u128> {
    (0..=n_cap as u32).map(|n| report.twist_counts.get(&q.pow(n)).copied().unwrap_or(0) as u128).collect()
}

/// Compares oracle twist counts at dimensions `q^n`, `n ≤ n_cap ≤ ⌊N/2⌋`, with the local
/// zeta coefficients, and records the same counts at levels `N - 1` and `N + 1` when those
/// groups fit under the caps.
pub fn compare_oracle_poincare(lat: &LieLattice, spec: &LocalRingSpec, n_cap: usize, opts: &OracleOptions) -> Result<ComparisonReport, OracleError> {
    let level = spec.n;
    if n_cap > (level / 2) as usize {
        return Err(OracleError::InvalidCap { n_cap, level });
    }
    let q = spec.q();
    let series = poincare::local_zeta(lat, &spec.with_level(1), n_cap, ZetaOptions::default())?;
    let poincare = series.coeffs_u128();
    let mut report = oracle_report(lat, spec, opts)?;
    let oracle = counts_at_powers(&report, q, n_cap);
    for (n, (&o, &e)) in oracle.iter().zip(&poincare).enumerate() {
        if o != e {
            return Err(OracleError::MismatchFound { dimension: q.pow(n as u32), oracle: o, poincare: e });
        }
    }
    report.matched = Some(true);
    let mut levels = Vec::new();
    for nb in [level.saturating_sub(1), level + 1] {
        if nb == 0 {
            continue;
        }
        match oracle_report(lat, &spec.with_level(nb), opts) {
            Ok(r) => levels.push(LevelCounts { level: nb, counts: counts_at_powers(&r, q, n_cap) }),
            Err(OracleError::GroupTooLarge { .. } | OracleError::CapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let stable = levels.iter().all(|lc| lc.counts == oracle);
    Ok(ComparisonReport { q, n_cap, poincare, oracle, levels, stable, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{validate, RawLattice};

    fn heis() -> LieLattice {
        validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap()
    }

    fn abelian2() -> LieLattice {
        LieLattice::abelian(2)
    }

    #[test]
    fn heisenberg_mod_3() {
        let g = build_group(&heis(), &LocalRingSpec::rational(3, 1), &OracleOptions::default()).unwrap();
        assert_eq!((g.order(), g.exponent()), (27, 3));
        let c = conjugacy_classes(&g);
        assert_eq!(c.len(), 11);
        assert_eq!(c.sizes.iter().filter(|&&s| s == 1).count(), 3);
        assert_eq!(c.sizes.iter().filter(|&&s| s == 3).count(), 8);
        let t = character_degrees(&g, &c, &OracleOptions::default()).unwrap();
        assert_eq!(t.modulus, 13);
        assert_eq!(t.degree_multiset(), BTreeMap::from([(1, 9), (3, 2)]));
        assert_eq!(twist_isoclass_counts(&t), BTreeMap::from([(1, 1), (3, 2)]));
        // degree-3 characters vanish off the centre and are 3ζ on it
        let z = c.class_of[g.element(&[[0, 0], [0, 0], [1, 0]]) as usize] as usize;
        let v = t.complex_value(&g, &c, 9, z);
        assert!((v.norm() - 3.0).abs() < 1e-9 && v.im.abs() > 1.0);
        let off = c.class_of[g.element(&[[1, 0], [0, 0], [0, 0]]) as usize] as usize;
        assert!(t.complex_value(&g, &c, 10, off).norm() < 1e-9);
    }

    #[test]
    fn abelian_and_small_cases() {
        let opts = OracleOptions::default();
        let r = oracle_report(&abelian2(), &LocalRingSpec::rational(3, 1), &opts).unwrap();
        assert_eq!((r.classes, r.degrees.clone(), r.twist_counts.clone()), (9, BTreeMap::from([(1, 9)]), BTreeMap::from([(1, 1)])));
        assert!(matches!(build_group(&heis(), &LocalRingSpec::rational(2, 1), &opts), Err(OracleError::BchNotIntegral { .. })));
        let r = oracle_report(&heis().rescale(1, 2), &LocalRingSpec::rational(2, 1), &opts).unwrap();
        // ½·[x, y] with brackets in 2Λ is [x, y] mod 2, which is symmetric: abelian at level 1
        assert_eq!((r.order, r.classes), (8, 8));
        let r = oracle_report(&heis().rescale(1, 2), &LocalRingSpec::rational(2, 2), &opts).unwrap();
        assert_eq!((r.order, r.classes), (64, 40));
        assert_eq!(r.degrees, BTreeMap::from([(1, 32), (2, 8)]));
        assert_eq!(build_group(&heis(), &LocalRingSpec::rational(3, 2), &opts).unwrap().order(), 729);
    }

    #[test]
    fn compare_heisenberg() {
        let opts = OracleOptions::default();
        let c = compare_oracle_poincare(&heis(), &LocalRingSpec::rational(3, 2), 1, &opts).unwrap();
        assert_eq!(c.oracle, vec![1, 2]);
        assert!(c.stable);
        assert!(matches!(
            compare_oracle_poincare(&heis(), &LocalRingSpec::rational(3, 2), 2, &opts),
            Err(OracleError::InvalidCap { .. })
        ));
    }

    #[test]
    fn dixon_modulus_rule() {
        assert_eq!(dixon_modulus(27, 3), Some(13));
        assert_eq!(dixon_modulus(15625, 25), Some(251));
    }
}
