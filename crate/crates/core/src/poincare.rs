//! Truncated local representation zeta functions via the Poincaré series
//!
//! ```text
//! ζ(s) = Σ_N Σ_{a,c} N_{N,a,c} · q^{-Σ(N - a_i)s - Σ(N - c_i)}
//! ```
//!
//! where `N_{N,a,c}` counts primitive `y ∈ W_N` with `ν(R(y)) = a` and
//! `ν̃(S(y)·diag(π^b)) = c`.
//!
//! For primitive `y` the matrix `R(y)` is nonzero modulo `p` (the map `y ↦ R(y)` is
//! injective over the residue field because the brackets of `e_1..e_r` span `Λ'`), so
//! `a_1 = 0` and level `N` only contributes to exponents `n ≥ N`. Enumerating levels
//! `1..=n_max` therefore certifies every coefficient up to `n_max`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{self, AdaptedBasis, GlobalBasis, LieLattice};
use crate::localring::{self, Elem, LocalRingSpec, OrbitReps, Ring, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoincareError {
    #[error("Kirillov orbit method does not apply at p=2 for class 3; rescale the lattice by 2 first")]
    KirillovInapplicable,
    #[error("p={p} divides the exclusion index {index}; choose a prime policy to proceed")]
    ExcludedPrime { p: u64, index: String },
    #[error("coefficient at n={n} is {value}, not a nonnegative integer")]
    NonIntegralCoefficient { n: usize, value: String },
    #[error("coefficient at n={n} changes from {before} to {after} when the level bound grows")]
    TruncationUnstable { n: usize, before: String, after: String },
    #[error("adapted basis has f outside the expected support; types are not reliable at p={0}")]
    UnsupportedBasis(u64),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Behaviour at primes dividing the exclusion index (or at `(p, c) = (2, 3)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimePolicy {
    /// Refuse excluded primes.
    #[default]
    Refuse,
    /// Compute with the adapted basis at `p` as is.
    Local,
    /// Compute for the smallest rescaling to which the orbit method applies and mark
    /// the result as meaningful for abscissae only.
    Commensurable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeVector {
    pub a: Vec<u32>,
    pub c: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCountTable {
    pub level: u32,
    pub counts: BTreeMap<TypeVector, u128>,
}

impl OrbitCountTable {
    pub fn total(&self) -> u128 {
        self.counts.values().sum()
    }
}

/// Per-`y` evaluation of `R(y)` and `S(y)·diag(π^b)`.
struct Evaluator<'a> {
    ring: &'a Ring,
    r: usize,
    d: usize,
    k: usize,
    lambda: Vec<i64>,
    pi_b: Vec<Elem>,
}

impl<'a> Evaluator<'a> {
    fn new(basis: &AdaptedBasis, ring: &'a Ring) -> Self {
        let m = basis.commutator_matrix();
        let p = ring.from_int(ring.p() as i64);
        let pi_b = basis.b[..basis.k()].iter().map(|&b| ring.pow(p, b as u64)).collect();
        Evaluator { ring, r: m.rows, d: m.nvars, k: basis.k(), lambda: m.coeffs.clone(), pi_b }
    }

    fn types(&self, y: &[Elem], rbuf: &mut Vec<Vec<Elem>>, sbuf: &mut Vec<Vec<Elem>>) -> Result<TypeVector, RingError> {
        let ring = self.ring;
        let (r, d) = (self.r, self.d);
        rbuf.resize(r, Vec::new());
        for (i, row) in rbuf.iter_mut().enumerate() {
            row.clear();
            for j in 0..r {
                let base = (i * r + j) * d;
                let mut acc = ring.zero();
                for l in 0..d {
                    let c = self.lambda[base + l];
                    if c != 0 {
                        acc = ring.add(acc, ring.scale(y[l], c));
                    }
                }
                row.push(acc);
            }
        }
        let c = if self.k > 0 {
            sbuf.resize(r, Vec::new());
            for i in 0..r {
                sbuf[i].clear();
                for j in 0..self.k {
                    sbuf[i].push(ring.mul(rbuf[i][r - self.k + j], self.pi_b[j]));
                }
            }
            localring::smith_type_in_place(ring, sbuf)
        } else {
            Vec::new()
        };
        let full = localring::smith_type_in_place(ring, rbuf);
        let a = localring::pair_up(&full, ring.level())?;
        Ok(TypeVector { a, c })
    }
}

const CHUNK: u128 = 2048;

fn merge(mut a: HashMap<TypeVector, u128>, b: HashMap<TypeVector, u128>) -> HashMap<TypeVector, u128> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Tallies types over one representative per unit-scaling orbit, weighting each by the
/// orbit size `q^{N-1}(q-1)`.
pub fn count_types(basis: &AdaptedBasis, ring: &Ring) -> Result<OrbitCountTable, PoincareError> {
    let n = ring.level();
    if n == 0 {
        return Ok(level_zero_table(basis));
    }
    let d = basis.d();
    let reps = OrbitReps::new(ring, d);
    let ev = Evaluator::new(basis, ring);
    let chunks = reps.len().div_ceil(CHUNK);
    let merged = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut local: HashMap<TypeVector, u128> = HashMap::new();
            let mut y = vec![[0u64; 2]; d];
            let (mut rb, mut sb) = (Vec::new(), Vec::new());
            let end = ((chunk + 1) * CHUNK).min(reps.len());
            for idx in chunk * CHUNK..end {
                reps.get(idx, &mut y);
                *local.entry(ev.types(&y, &mut rb, &mut sb)?).or_insert(0) += 1;
            }
            Ok(local)
        })
        .try_reduce(HashMap::new, |a, b| Ok(merge(a, b)))
        .map_err(PoincareError::Ring)?;
    let mult = reps.multiplier();
    Ok(OrbitCountTable { level: n, counts: merged.into_iter().map(|(k, v)| (k, v * mult)).collect() })
}

/// Tallies types over all of `W_N` without orbit reduction.
pub fn count_types_full(basis: &AdaptedBasis, ring: &Ring) -> Result<OrbitCountTable, PoincareError> {
    let n = ring.level();
    if n == 0 {
        return Ok(level_zero_table(basis));
    }
    let ev = Evaluator::new(basis, ring);
    let (mut rb, mut sb) = (Vec::new(), Vec::new());
    let mut counts = BTreeMap::new();
    for y in localring::enumerate_w(ring, basis.d()) {
        *counts.entry(ev.types(&y, &mut rb, &mut sb)?).or_insert(0) += 1;
    }
    Ok(OrbitCountTable { level: n, counts })
}

fn level_zero_table(basis: &AdaptedBasis) -> OrbitCountTable {
    let key = TypeVector { a: vec![0; basis.r() / 2], c: vec![0; basis.k()] };
    OrbitCountTable { level: 0, counts: BTreeMap::from([(key, 1)]) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalZetaSeries {
    pub q: u64,
    /// `coeffs[n] = r̃_n` for `n ≤ n_max`.
    #[serde(serialize_with = "ser_coeffs")]
    pub coeffs: Vec<BigInt>,
    pub n_max: usize,
    #[serde(rename = "N_max")]
    pub level_max: u32,
    /// Smallest level contributing to each `n` (None if nothing contributed).
    #[serde(serialize_with = "ser_levels")]
    pub levels: Vec<Option<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rescaled_by: Option<u32>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub abscissa_only: bool,
}

fn ser_coeffs<S: serde::Serializer>(c: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for (n, v) in c.iter().enumerate() {
        seq.serialize_element(&(n, v.to_string()))?;
    }
    seq.end()
}

fn ser_levels<S: serde::Serializer>(l: &[Option<u32>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(None)?;
    for (n, v) in l.iter().enumerate() {
        if let Some(v) = v {
            seq.serialize_element(&(n, v))?;
        }
    }
    seq.end()
}

impl LocalZetaSeries {
    /// Reads the serialized form (`{"q": …, "coeffs": [[n, "r"], …], …}`).
    pub fn from_json(v: &serde_json::Value) -> Option<LocalZetaSeries> {
        let q = v.get("q")?.as_u64()?;
        let mut coeffs = Vec::new();
        for (i, pair) in v.get("coeffs")?.as_array()?.iter().enumerate() {
            let pair = pair.as_array()?;
            if pair.first()?.as_u64()? != i as u64 {
                return None;
            }
            let c = pair.get(1)?;
            coeffs.push(match c.as_str() {
                Some(s) => s.parse().ok()?,
                None => BigInt::from(c.as_u64()?),
            });
        }
        if coeffs.is_empty() {
            return None;
        }
        let level_max = v.get("N_max").and_then(|x| x.as_u64()).unwrap_or(0) as u32;
        Some(LocalZetaSeries {
            q,
            n_max: coeffs.len() - 1,
            levels: vec![None; coeffs.len()],
            coeffs,
            level_max,
            rescaled_by: None,
            abscissa_only: false,
        })
    }

    pub fn coeffs_u128(&self) -> Vec<u128> {
        self.coeffs.iter().map(|c| c.to_u128().expect("coefficient fits in u128")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaOptions {
    /// Largest level enumerated; defaults to `n_max`.
    pub level_max: Option<u32>,
    pub policy: PrimePolicy,
    /// Disable unit-orbit reduction.
    pub full_enumeration: bool,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions { level_max: None, policy: PrimePolicy::Refuse, full_enumeration: false }
    }
}

/// Whether the orbit method applies to `lat` at `p` (class 3 at `p = 2` needs `Λ' ⊆ 12Λ`).
pub fn kirillov_applicable(lat: &LieLattice, p: u64) -> bool {
    if p != 2 || lat.class() != 3 {
        return true;
    }
    let h = lat.rank();
    (0..h).all(|i| (0..h).all(|j| lat.bracket(i, j).iter().all(|&x| x % 4 == 0)))
}

/// Truncated local zeta function of `G_Λ(o)` for the ring family of `spec` (its level is ignored).
pub fn local_zeta(
    lat: &LieLattice,
    spec: &LocalRingSpec,
    n_max: usize,
    opts: ZetaOptions,
) -> Result<LocalZetaSeries, PoincareError> {
    local_zeta_with(lat, None, spec, n_max, opts)
}

/// As [`local_zeta`], reusing a precomputed global basis of `lat` when no rescaling is needed.
pub fn local_zeta_with(
    lat: &LieLattice,
    global: Option<&GlobalBasis>,
    spec: &LocalRingSpec,
    n_max: usize,
    opts: ZetaOptions,
) -> Result<LocalZetaSeries, PoincareError> {
    let mut global = global.cloned();
    let mut lat = lat.clone();
    let mut rescaled_by = None;
    if !kirillov_applicable(&lat, spec.p) {
        if opts.policy != PrimePolicy::Commensurable {
            return Err(PoincareError::KirillovInapplicable);
        }
        lat = lat.rescale(1, 2);
        rescaled_by = Some(1);
        global = None;
    }
    let global = global.unwrap_or_else(|| lattice::global_basis(&lat));
    let basis = lattice::with_prime(&lat, global, spec.p);
    if basis.is_excluded() && opts.policy == PrimePolicy::Refuse {
        return Err(PoincareError::ExcludedPrime { p: spec.p, index: basis.exclusion_index().to_string() });
    }
    if !basis.global.f_supported {
        return Err(PoincareError::UnsupportedBasis(spec.p));
    }
    let level_max = opts.level_max.unwrap_or(n_max as u32);
    let q = spec.q();
    let qb = BigInt::from(q);
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); n_max + 1];
    let mut levels: Vec<Option<u32>> = vec![None; n_max + 1];
    acc[0] = BigRational::one();
    levels[0] = Some(0);
    for level in 1..=level_max {
        let ring = Ring::new(&spec.with_level(level))?;
        let table = if opts.full_enumeration { count_types_full(&basis, &ring)? } else { count_types(&basis, &ring)? };
        for (t, &count) in &table.counts {
            let n: u32 = t.a.iter().map(|&a| level - a).sum();
            let n = n as usize;
            if n > n_max || count == 0 {
                continue;
            }
            let w: u32 = t.c.iter().map(|&c| level - c).sum();
            acc[n] += BigRational::new(BigInt::from(count), qb.pow(w));
            levels[n].get_or_insert(level);
        }
    }
    let mut coeffs = Vec::with_capacity(n_max + 1);
    for (n, v) in acc.into_iter().enumerate() {
        if !v.is_integer() || v.is_negative() {
            return Err(PoincareError::NonIntegralCoefficient { n, value: v.to_string() });
        }
        coeffs.push(v.to_integer());
    }
    Ok(LocalZetaSeries {
        q,
        coeffs,
        n_max,
        level_max,
        levels,
        rescaled_by,
        abscissa_only: opts.policy == PrimePolicy::Commensurable && (rescaled_by.is_some() || basis.is_excluded()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub n_max: usize,
    #[serde(rename = "N_max")]
    pub level_max: u32,
    pub stable: bool,
    #[serde(serialize_with = "ser_levels")]
    pub first_level: Vec<Option<u32>>,
}

/// Compares the series enumerated to levels `level_max` and `level_max + 1`.
pub fn stabilization_check(
    lat: &LieLattice,
    spec: &LocalRingSpec,
    n_max: usize,
    level_max: u32,
    policy: PrimePolicy,
) -> Result<StabilityReport, PoincareError> {
    let base = ZetaOptions { level_max: Some(level_max), policy, full_enumeration: false };
    let lo = local_zeta(lat, spec, n_max, base)?;
    let hi = local_zeta(lat, spec, n_max, ZetaOptions { level_max: Some(level_max + 1), ..base })?;
    for n in 0..=n_max {
        if lo.coeffs[n] != hi.coeffs[n] {
            return Err(PoincareError::TruncationUnstable {
                n,
                before: lo.coeffs[n].to_string(),
                after: hi.coeffs[n].to_string(),
            });
        }
    }
    Ok(StabilityReport { n_max, level_max, stable: true, first_level: hi.levels })
}
