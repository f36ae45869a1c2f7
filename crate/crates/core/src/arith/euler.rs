//! Fine Euler products: one local factor per nonzero prime ideal, multiplied as
//! Dirichlet series in the ideal norm.

use rayon::prelude::*;
use serde::Serialize;

use super::field::{primes_up_to, split_prime, NumberField, PrimeIdeal};
use super::ArithError;
use crate::lattice::{self, LieLattice};
use crate::poincare::{self, PoincareError, PrimePolicy, ZetaOptions};
use crate::zetafit::{self, BivariateRational};

#[derive(Debug, Clone, Default)]
pub struct EulerOptions {
    pub policy: PrimePolicy,
    /// Fitted `W(X, Y)` used for primes above `enumerate_below` and for excluded primes.
    pub fitted: Option<BivariateRational>,
    /// Primes `p < enumerate_below` are enumerated; `None` enumerates every prime.
    pub enumerate_below: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorSource {
    Enumerated,
    Fitted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalFactor {
    pub p: u64,
    pub e: u8,
    pub f: u8,
    pub q: u64,
    pub source: FactorSource,
    pub excluded: bool,
    /// `coeffs[n]` for `q^n ≤ N_bound`.
    pub coeffs: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalCoefficients {
    pub n_bound: usize,
    /// `coeffs[n]` for `1 ≤ n ≤ n_bound`; `coeffs[0]` is unused and zero.
    pub coeffs: Vec<u128>,
    pub factors: Vec<LocalFactor>,
}

impl GlobalCoefficients {
    pub fn from_coeffs(coeffs: Vec<u128>) -> Self {
        GlobalCoefficients { n_bound: coeffs.len() - 1, coeffs, factors: Vec::new() }
    }

    /// Prefix sums `S(N) = Σ_{n ≤ N} r̃_n`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = 0f64;
        self.coeffs.iter().map(|&c| {
            acc += c as f64;
            acc
        }).collect()
    }

    /// Local factors flagged as coming from a fit rather than enumeration.
    pub fn overrides(&self) -> impl Iterator<Item = &LocalFactor> {
        self.factors.iter().filter(|f| f.source == FactorSource::Fitted)
    }
}

fn local_factor(
    lat: &LieLattice,
    global: &lattice::GlobalBasis,
    ideal: &PrimeIdeal,
    n_bound: usize,
    opts: &EulerOptions,
) -> Result<LocalFactor, ArithError> {
    let q = ideal.norm();
    let mut n_max = 0usize;
    while (q as u128).pow(n_max as u32 + 1) <= n_bound as u128 {
        n_max += 1;
    }
    let excluded = lattice::with_prime(lat, global.clone(), ideal.p).is_excluded()
        || !poincare::kirillov_applicable(lat, ideal.p);
    let enumerate = opts.enumerate_below.is_none_or(|b| ideal.p < b);
    let fitted = |excluded| -> Result<LocalFactor, ArithError> {
        let w = opts.fitted.as_ref().ok_or(ArithError::MissingLocalFactor { p: ideal.p, f: ideal.f })?;
        let s = zetafit::predict(w, q, n_max)?;
        Ok(LocalFactor {
            p: ideal.p,
            e: ideal.e,
            f: ideal.f,
            q,
            source: FactorSource::Fitted,
            excluded,
            coeffs: s.coeffs_u128(),
        })
    };
    if !enumerate {
        return fitted(excluded);
    }
    let zopts = ZetaOptions { policy: opts.policy, ..Default::default() };
    match poincare::local_zeta_with(lat, Some(global), &ideal.spec, n_max, zopts) {
        Ok(s) => Ok(LocalFactor {
            p: ideal.p,
            e: ideal.e,
            f: ideal.f,
            q,
            source: FactorSource::Enumerated,
            excluded,
            coeffs: s.coeffs_u128(),
        }),
        Err(PoincareError::ExcludedPrime { .. } | PoincareError::KirillovInapplicable) => fitted(true),
        Err(e) => Err(e.into()),
    }
}

/// Multiplies `A` in place by `Σ_n L_n (q^n)^{-s}` as Dirichlet series up to `A.len() - 1`.
pub fn dirichlet_multiply(a: &mut [u128], q: u64, local: &[u128]) -> Result<(), ArithError> {
    let bound = a.len() - 1;
    let q = q as usize;
    for m in (1..=bound).rev() {
        let mut add = 0u128;
        let mut qn = q;
        let mut n = 1;
        while n < local.len() && qn <= m {
            if m % qn == 0 && local[n] != 0 {
                let term = local[n].checked_mul(a[m / qn]).ok_or(ArithError::Overflow)?;
                add = add.checked_add(term).ok_or(ArithError::Overflow)?;
            }
            n += 1;
            qn = match qn.checked_mul(q) {
                Some(v) => v,
                None => break,
            };
        }
        a[m] = a[m].checked_add(add).ok_or(ArithError::Overflow)?;
    }
    Ok(())
}

/// Global coefficients `r̃_n`, `n ≤ n_bound`, of `ζ_{G(O_L)}(s)` from the fine Euler product
/// over prime ideals of norm `≤ n_bound` above rational primes `≤ prime_bound`.
pub fn euler_product(
    lat: &LieLattice,
    field: &NumberField,
    prime_bound: u64,
    n_bound: usize,
    opts: &EulerOptions,
) -> Result<GlobalCoefficients, ArithError> {
    let global = lattice::global_basis(lat);
    let ideals: Vec<PrimeIdeal> = primes_up_to(prime_bound.min(n_bound as u64))
        .into_iter()
        .flat_map(|p| split_prime(field, p).ideals)
        .filter(|i| i.norm() as usize <= n_bound)
        .collect();
    let factors: Vec<LocalFactor> = ideals
        .par_iter()
        .map(|ideal| local_factor(lat, &global, ideal, n_bound, opts))
        .collect::<Result<_, _>>()?;
    let mut coeffs = vec![0u128; n_bound + 1];
    coeffs[1] = 1;
    for f in &factors {
        dirichlet_multiply(&mut coeffs, f.q, &f.coeffs)?;
    }
    Ok(GlobalCoefficients { n_bound, coeffs, factors })
}

/// First coprime pair `(m, n)` with `r̃_{mn} ≠ r̃_m r̃_n`, if any.
pub fn multiplicativity_violation(g: &GlobalCoefficients) -> Option<(usize, usize)> {
    let n = g.n_bound;
    for a in 2..=n {
        for b in a..=n / a {
            if num_integer::gcd(a, b) == 1 && Some(g.coeffs[a * b]) != g.coeffs[a].checked_mul(g.coeffs[b]) {
                return Some((a, b));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoarseCheck {
    pub p: u64,
    /// Coefficients of the coarse factor at `p^0, p^1, …` from the fine factors.
    pub coarse: Vec<u128>,
    pub matches: bool,
}

/// Groups the fine factors by rational prime, multiplies them as power series in
/// `x = p^{-s}` (an ideal of residue degree `f` contributes `t = x^f`) and compares with the
/// global coefficients at prime powers.
pub fn coarse_factor_check(g: &GlobalCoefficients, prime_limit: u64) -> Vec<CoarseCheck> {
    let mut out = Vec::new();
    for p in primes_up_to(prime_limit) {
        if p as usize > g.n_bound {
            break;
        }
        let mut kmax = 0;
        while (p as u128).pow(kmax + 1) <= g.n_bound as u128 {
            kmax += 1;
        }
        let mut coarse = vec![0u128; kmax as usize + 1];
        coarse[0] = 1;
        for f in g.factors.iter().filter(|f| f.p == p) {
            let mut next = vec![0u128; coarse.len()];
            for (i, &c) in coarse.iter().enumerate() {
                for (n, &l) in f.coeffs.iter().enumerate() {
                    let j = i + n * f.f as usize;
                    if j < next.len() {
                        next[j] += c * l;
                    }
                }
            }
            coarse = next;
        }
        let matches = (0..=kmax).all(|k| coarse[k as usize] == g.coeffs[(p as usize).pow(k)]);
        out.push(CoarseCheck { p, coarse, matches });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{validate, RawLattice};

    fn heis() -> LieLattice {
        validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap()
    }

    fn totient(n: u128) -> u128 {
        (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u128
    }

    #[test]
    fn heisenberg_over_q_is_totient() {
        let g = euler_product(&heis(), &NumberField::Rationals, 10, 10, &EulerOptions::default()).unwrap();
        assert_eq!(&g.coeffs[1..], &[1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
        let g = euler_product(&heis(), &NumberField::Rationals, 500, 500, &EulerOptions::default()).unwrap();
        for n in 1..=500u128 {
            assert_eq!(g.coeffs[n as usize], totient(n));
        }
    }

    #[test]
    fn heisenberg_over_gaussian_integers() {
        let g = euler_product(&heis(), &NumberField::gaussian(), 200, 200, &EulerOptions::default()).unwrap();
        // two split ideals of norm 5, each (1 - t)/(1 - 5t): 4 + 4
        assert_eq!(g.coeffs[5], 8);
        assert_eq!(g.coeffs[1], 1);
        assert!(multiplicativity_violation(&g).is_none());
        assert!(coarse_factor_check(&g, 50).iter().all(|c| c.matches));
    }

    #[test]
    fn fitted_override_is_flagged() {
        let w = BivariateRational::from_json(&serde_json::json!({"num": [[0, 0, "1"], [0, 1, "-1"]], "den": [[1, 1]]})).unwrap();
        let opts = EulerOptions { fitted: Some(w), enumerate_below: Some(5), ..Default::default() };
        let g = euler_product(&heis(), &NumberField::Rationals, 100, 100, &opts).unwrap();
        let plain = euler_product(&heis(), &NumberField::Rationals, 100, 100, &EulerOptions::default()).unwrap();
        assert_eq!(g.coeffs, plain.coeffs);
        assert!(g.overrides().all(|f| f.p >= 5));
        assert_eq!(g.overrides().count(), 23);
    }

    #[test]
    fn excluded_prime_without_override_is_missing() {
        let lat = heis().rescale(1, 3);
        let r = euler_product(&lat, &NumberField::Rationals, 10, 10, &EulerOptions::default());
        assert!(matches!(r, Err(ArithError::MissingLocalFactor { p: 3, .. })));
    }
}
