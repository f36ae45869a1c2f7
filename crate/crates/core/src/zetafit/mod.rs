//! Exact rational-function fits to truncated local zeta series.
//!
//! Denominators are products of Denef-type factors `1 - X^b Y^a` (`a ≥ 1`), with
//! `X = q` and `Y = t = q^{-s}`. A candidate denominator is accepted when the
//! numerator it forces has degree `deg` with `deg + #factors + 1 ≤ n_max`, so at least
//! one certified coefficient beyond the unknowns is checked. Candidates are ranked by
//! number of factors, then numerator degree, then the sorted factor list.

mod poly;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::{expand, univariate_divisible, Poly2};

use crate::poincare::LocalZetaSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("no fit within bounds {bounds:?} using {available} coefficients; {residual}")]
    NoFitFound { bounds: FitBounds, available: usize, residual: String },
    #[error("two minimal fits disagree beyond the truncation; first by canonical order is {first}")]
    AmbiguousFit { first: Box<UnivariateRational>, second: Box<UnivariateRational> },
    #[error("no uniform fit: {reason}; inconsistent q values {inconsistent:?}")]
    NoUniformFit { reason: String, inconsistent: Vec<u64> },
    #[error("need at least 3 distinct residue cardinalities, got {0}")]
    TooFewPrimes(usize),
    #[error("prediction at q={q} has non-integral coefficient at n={n}")]
    NonIntegralPrediction { q: u64, n: usize },
    #[error("malformed rational-function JSON: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitBounds {
    pub a_max: u32,
    pub b_max: u32,
    pub max_factors: usize,
    /// Numerator degree in `t` (resp. `Y`).
    pub deg_max: usize,
    /// Numerator degree in `X` for uniform fits.
    pub deg_x_max: usize,
}

impl Default for FitBounds {
    fn default() -> Self {
        FitBounds { a_max: 4, b_max: 6, max_factors: 4, deg_max: 8, deg_x_max: 8 }
    }
}

/// `num(t) / Π(1 - q^b t^a)` for a fixed `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateRational {
    pub q: u64,
    pub num: Vec<BigRational>,
    /// Factors `(a, b)`, sorted.
    pub den: Vec<(u32, u32)>,
}

impl UnivariateRational {
    pub fn expand(&self, n: usize) -> Vec<BigRational> {
        poly::expand(&self.num, &self.den, self.q, n)
    }

    fn same_function(&self, other: &UnivariateRational) -> bool {
        // num_1·den_2 == num_2·den_1
        let d1 = poly::denominator_series(&self.den, self.q);
        let d2 = poly::denominator_series(&other.den, other.q);
        let lhs = mul_rat_int(&self.num, &d2);
        let rhs = mul_rat_int(&other.num, &d1);
        trim(lhs) == trim(rhs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "num": self.num.iter().map(rat_str).collect::<Vec<_>>(),
            "den": self.den,
        })
    }
}

impl std::fmt::Display for UnivariateRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let num = fmt_poly1(&self.num, "t");
        if self.den.is_empty() {
            return write!(f, "{num}");
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|&(a, b)| {
                let c = BigInt::from(self.q).pow(b);
                let ys = if a == 1 { "t".to_string() } else { format!("t^{a}") };
                if c.is_one() {
                    format!("(1 - {ys})")
                } else {
                    format!("(1 - {c}{ys})")
                }
            })
            .collect();
        write!(f, "({num}) / {}", den.concat())
    }
}

/// `N(X, Y) / Π(1 - X^b Y^a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateRational {
    pub num: Poly2,
    /// Factors `(a, b)`, sorted.
    pub den: Vec<(u32, u32)>,
}

impl BivariateRational {
    pub fn one() -> Self {
        BivariateRational { num: Poly2::one(), den: Vec::new() }
    }

    pub fn new(num: Poly2, mut den: Vec<(u32, u32)>) -> Self {
        den.sort_unstable();
        BivariateRational { num, den }
    }

    pub fn den_poly(&self) -> Poly2 {
        self.den.iter().fold(Poly2::one(), |acc, &(a, b)| acc.mul(&Poly2::denef_factor(a, b)))
    }

    /// Exact value at a point where the denominator does not vanish.
    pub fn eval(&self, x: &BigRational, y: &BigRational) -> Option<BigRational> {
        let d = self.den_poly().eval(x, y);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x, y) / d)
        }
    }

    pub fn specialize(&self, q: u64) -> UnivariateRational {
        UnivariateRational { q, num: self.num.specialize(q), den: self.den.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let num: Vec<serde_json::Value> = self
            .num
            .terms()
            .map(|((i, j), c)| serde_json::json!([i, j, rat_str(c)]))
            .collect();
        serde_json::json!({ "num": num, "den": self.den })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, FitError> {
        #[derive(Deserialize)]
        struct Raw {
            num: Vec<(u32, u32, String)>,
            den: Vec<(u32, u32)>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| FitError::Format(e.to_string()))?;
        let mut num = Poly2::zero();
        for (i, j, c) in raw.num {
            num.add_term(i, j, parse_rat(&c).ok_or_else(|| FitError::Format(format!("bad rational {c:?}")))?);
        }
        if raw.den.iter().any(|&(a, _)| a == 0) {
            return Err(FitError::Format("denominator factors need a ≥ 1".into()));
        }
        Ok(BivariateRational::new(num, raw.den))
    }
}

impl std::fmt::Display for BivariateRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for ((i, j), c) in self.num.terms() {
            let mono = match (i, j) {
                (0, 0) => String::new(),
                _ => fmt_mono(*i, *j),
            };
            parts.push(fmt_coeff(c, &mono));
        }
        let num = join_signed(&parts);
        if self.den.is_empty() {
            return write!(f, "{num}");
        }
        let den: Vec<String> = self.den.iter().map(|&(a, b)| format!("({})", fmt_factor("X", "Y", a, b))).collect();
        write!(f, "({num}) / {}", den.concat())
    }
}

fn fmt_mono(i: u32, j: u32) -> String {
    let mut s = String::new();
    if i > 0 {
        s.push('X');
        if i > 1 {
            s.push_str(&format!("^{i}"));
        }
    }
    if j > 0 {
        s.push('Y');
        if j > 1 {
            s.push_str(&format!("^{j}"));
        }
    }
    s
}

fn fmt_factor(x: &str, y: &str, a: u32, b: u32) -> String {
    let xs = match b {
        0 => String::new(),
        1 => x.to_string(),
        _ => format!("{x}^{b}"),
    };
    let ys = if a == 1 { y.to_string() } else { format!("{y}^{a}") };
    format!("1 - {xs}{ys}")
}

fn fmt_coeff(c: &BigRational, mono: &str) -> String {
    if mono.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        mono.to_string()
    } else if *c == -BigRational::one() {
        format!("-{mono}")
    } else {
        format!("{c}{mono}")
    }
}

fn join_signed(parts: &[String]) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts[0].clone();
    for p in &parts[1..] {
        if let Some(rest) = p.strip_prefix('-') {
            s.push_str(&format!(" - {rest}"));
        } else {
            s.push_str(&format!(" + {p}"));
        }
    }
    s
}

fn fmt_poly1(c: &[BigRational], var: &str) -> String {
    let parts: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| {
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            fmt_coeff(x, &mono)
        })
        .collect();
    join_signed(&parts)
}

pub fn rat_str(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn mul_rat_int(a: &[BigRational], b: &[BigInt]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * BigRational::from_integer(y.clone());
        }
    }
    out
}

/// All multisets of factors `(a, b)` with `1 ≤ a ≤ a_max`, `0 ≤ b ≤ b_max`, of the given
/// size, each sorted, in lexicographic order.
pub fn candidate_denominators(bounds: &FitBounds, size: usize) -> Vec<Vec<(u32, u32)>> {
    let factors: Vec<(u32, u32)> =
        (1..=bounds.a_max).flat_map(|a| (0..=bounds.b_max).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(f: &[(u32, u32)], start: usize, size: usize, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..f.len() {
            cur.push(f[i]);
            rec(f, i, size, cur, out);
            cur.pop();
        }
    }
    rec(&factors, 0, size, &mut cur, &mut out);
    out
}

/// `c · den` truncated to `t^n`, as integers.
fn numerator_for(c: &[BigInt], den: &[(u32, u32)], q: u64) -> Vec<BigInt> {
    let d = poly::denominator_series(den, q);
    let n = c.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, di) in d.iter().enumerate().take(n) {
        if di.is_zero() {
            continue;
        }
        for j in 0..n - i {
            out[i + j] += di * &c[j];
        }
    }
    out
}

fn last_nonzero(v: &[BigInt]) -> Option<usize> {
    v.iter().rposition(|x| !x.is_zero())
}

/// Minimal-complexity rational function in `t` matching the certified coefficients.
pub fn fit_univariate(series: &LocalZetaSeries, bounds: &FitBounds) -> Result<UnivariateRational, FitError> {
    fit_coefficients(series.q, &series.coeffs[..=series.n_max.min(series.coeffs.len() - 1)], bounds)
}

pub fn fit_coefficients(q: u64, c: &[BigInt], bounds: &FitBounds) -> Result<UnivariateRational, FitError> {
    let n = c.len() - 1;
    let mut best_residual: Option<(usize, Vec<(u32, u32)>)> = None;
    for size in 0..=bounds.max_factors {
        let cands = candidate_denominators(bounds, size);
        let accepted: Vec<(usize, UnivariateRational)> = cands
            .par_iter()
            .filter_map(|den| {
                let num = numerator_for(c, den, q);
                let deg = last_nonzero(&num).unwrap_or(0);
                if deg > bounds.deg_max || deg + size + 1 > n {
                    return None;
                }
                let num: Vec<BigRational> = num[..=deg].iter().cloned().map(BigRational::from_integer).collect();
                let coprime = den.iter().all(|&(a, b)| {
                    !poly::univariate_divisible(&num, a, &BigRational::from_integer(BigInt::from(q).pow(b)))
                });
                coprime.then(|| (deg, UnivariateRational { q, num, den: den.clone() }))
            })
            .collect();
        if accepted.is_empty() {
            // residual: fewest unmatched trailing coefficients among candidates of this size
            for den in cands.iter().take(64) {
                let num = numerator_for(c, den, q);
                let deg = last_nonzero(&num).unwrap_or(0);
                if best_residual.as_ref().is_none_or(|(d, _)| deg < *d) {
                    best_residual = Some((deg, den.clone()));
                }
            }
            continue;
        }
        let min_deg = accepted.iter().map(|x| x.0).min().unwrap();
        let mut minimal = accepted.into_iter().filter(|x| x.0 == min_deg).map(|x| x.1);
        let first = minimal.next().unwrap();
        for other in minimal {
            if !first.same_function(&other) {
                return Err(FitError::AmbiguousFit { first: Box::new(first), second: Box::new(other) });
            }
        }
        return Ok(first);
    }
    let residual = match best_residual {
        Some((deg, den)) => format!("best candidate {den:?} leaves a numerator of degree {deg}"),
        None => "no candidates".into(),
    };
    Err(FitError::NoFitFound { bounds: *bounds, available: c.len(), residual })
}

/// Coefficients of the interpolating polynomial through `(x_i, v_i)`.
fn interpolate(xs: &[BigRational], vs: &[BigRational]) -> Vec<BigRational> {
    let m = xs.len();
    let mut coef = vec![BigRational::zero(); m];
    for i in 0..m {
        // basis polynomial Π_{j≠i} (X - x_j)/(x_i - x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for j in 0..m {
            if j == i {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let scale = &vs[i] / denom;
        for (k, b) in basis.iter().enumerate() {
            coef[k] += b * &scale;
        }
    }
    coef
}

fn horner(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, v| acc * x + v)
}

/// Uniform `W(X, Y)` whose specializations at every supplied `q` reproduce the series.
pub fn fit_uniform(data: &[(u64, LocalZetaSeries)], bounds: &FitBounds) -> Result<BivariateRational, FitError> {
    let mut qs: Vec<u64> = data.iter().map(|d| d.0).collect();
    qs.sort_unstable();
    qs.dedup();
    if qs.len() < 3 || qs.len() != data.len() {
        return Err(FitError::TooFewPrimes(qs.len()));
    }
    let n = data.iter().map(|d| d.1.n_max.min(d.1.coeffs.len() - 1)).min().unwrap();
    let cs: Vec<(u64, Vec<BigInt>)> = data.iter().map(|(q, s)| (*q, s.coeffs[..=n].to_vec())).collect();
    let dx = bounds.deg_x_max.min(cs.len() - 2);
    let xs: Vec<BigRational> = cs.iter().map(|(q, _)| BigRational::from_integer((*q).into())).collect();

    for size in 0..=bounds.max_factors {
        let cands = candidate_denominators(bounds, size);
        let found: Vec<(usize, BivariateRational)> = cands
            .par_iter()
            .filter_map(|den| {
                let nums: Vec<Vec<BigInt>> = cs.iter().map(|(q, c)| numerator_for(c, den, *q)).collect();
                let deg = nums.iter().filter_map(|v| last_nonzero(v)).max().unwrap_or(0);
                if deg > bounds.deg_max || deg + size + 1 > n {
                    return None;
                }
                let mut num = Poly2::zero();
                for j in 0..=deg {
                    let vs: Vec<BigRational> = nums.iter().map(|v| BigRational::from_integer(v[j].clone())).collect();
                    let coef = interpolate(&xs[..=dx], &vs[..=dx]);
                    if (dx + 1..xs.len()).any(|i| horner(&coef, &xs[i]) != vs[i]) {
                        return None;
                    }
                    for (i, c) in coef.into_iter().enumerate() {
                        num.add_term(i as u32, j as u32, c);
                    }
                }
                if den.iter().any(|&(a, b)| num.divisible_by_factor(a, b)) {
                    return None;
                }
                Some((deg, BivariateRational::new(num, den.clone())))
            })
            .collect();
        if let Some(min_deg) = found.iter().map(|f| f.0).min() {
            return Ok(found.into_iter().find(|f| f.0 == min_deg).unwrap().1);
        }
    }

    // diagnose: per-q denominators, majority vote
    let per_q: Vec<(u64, Option<Vec<(u32, u32)>>)> =
        cs.iter().map(|(q, c)| (*q, fit_coefficients(*q, c, bounds).ok().map(|f| f.den))).collect();
    let mut votes: BTreeMap<Option<Vec<(u32, u32)>>, usize> = BTreeMap::new();
    for (_, d) in &per_q {
        *votes.entry(d.clone()).or_insert(0) += 1;
    }
    let majority = votes
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(d, _)| d.clone())
        .unwrap();
    let inconsistent: Vec<u64> = per_q.iter().filter(|(_, d)| *d != majority).map(|(q, _)| *q).collect();
    let reason = match &majority {
        Some(den) => format!("majority per-prime denominator {den:?} admits no numerator polynomial in X of degree ≤ {dx}"),
        None => "most primes have no univariate fit within bounds".into(),
    };
    Err(FitError::NoUniformFit { reason, inconsistent })
}

/// Certificate `W(1/X, 1/Y) = ε X^a Y^b W(X, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FunctionalEquation {
    pub sign: i8,
    pub a: i64,
    pub b: i64,
}

/// Decides the functional equation under `(X, Y) ↦ (1/X, 1/Y)` by exact algebra.
///
/// With `m` factors, `1 - X^{-b}Y^{-a} = -X^{-b}Y^{-a}(1 - X^b Y^a)`, so
/// `W(1/X,1/Y) = (-1)^m X^{ΣB - dx} Y^{ΣA - dy} Ñ / D` where `Ñ` is the reversed
/// numerator; the identity holds iff `Ñ = κ X^u Y^v N` for a constant `κ`.
pub fn check_functional_equation(w: &BivariateRational) -> Option<FunctionalEquation> {
    let n = &w.num;
    if n.is_zero() {
        return None;
    }
    let rev = n.reversed();
    let min_x = |p: &Poly2| p.terms().map(|t| t.0 .0).min().unwrap();
    let min_y = |p: &Poly2| p.terms().map(|t| t.0 .1).min().unwrap();
    let u = min_x(&rev) as i64 - min_x(n) as i64;
    let v = min_y(&rev) as i64 - min_y(n) as i64;
    let (lead_key, lead) = n.terms().next().map(|(k, c)| (*k, c.clone()))?;
    let rk = ((lead_key.0 as i64 + u) as u32, (lead_key.1 as i64 + v) as u32);
    let kappa = rev.coeff(rk.0, rk.1) / lead;
    if kappa.is_zero() {
        return None;
    }
    let mut shifted = Poly2::zero();
    for ((i, j), c) in n.terms() {
        let (si, sj) = (*i as i64 + u, *j as i64 + v);
        if si < 0 || sj < 0 {
            return None;
        }
        shifted.add_term(si as u32, sj as u32, c * &kappa);
    }
    if shifted != rev {
        return None;
    }
    let m = w.den.len();
    let sum_a: i64 = w.den.iter().map(|f| f.0 as i64).sum();
    let sum_b: i64 = w.den.iter().map(|f| f.1 as i64).sum();
    let eps = if m.is_multiple_of(2) { kappa } else { -kappa };
    let sign = if eps.is_one() {
        1
    } else if eps == -BigRational::one() {
        -1
    } else {
        return None;
    };
    let cert = FunctionalEquation {
        sign,
        a: sum_b - n.deg_x() as i64 + u,
        b: sum_a - n.deg_y() as i64 + v,
    };
    verify_functional_equation(w, &cert, 8, 0x5EED).then_some(cert)
}

/// Checks a certificate at random rational points.
pub fn verify_functional_equation(w: &BivariateRational, cert: &FunctionalEquation, points: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut tries = 0;
    while checked < points && tries < 20 * points {
        tries += 1;
        let x = BigRational::new(rng.gen_range(2..50i64).into(), rng.gen_range(1..50i64).into());
        let y = BigRational::new(rng.gen_range(1..50i64).into(), rng.gen_range(2..50i64).into());
        let (Some(lhs), Some(rhs)) = (w.eval(&x.recip(), &y.recip()), w.eval(&x, &y)) else { continue };
        let factor = ipow(&x, cert.a) * ipow(&y, cert.b) * BigRational::from_integer(cert.sign.into());
        if lhs != factor * rhs {
            return false;
        }
        checked += 1;
    }
    checked == points
}

fn ipow(x: &BigRational, e: i64) -> BigRational {
    let p = poly::pow(x, e.unsigned_abs() as u32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Series expansion of `W(q, t)` to `t^{n_max}`.
pub fn predict(w: &BivariateRational, q: u64, n_max: usize) -> Result<LocalZetaSeries, FitError> {
    let coeffs = w.specialize(q).expand(n_max);
    let mut out = Vec::with_capacity(coeffs.len());
    for (n, c) in coeffs.into_iter().enumerate() {
        if !c.is_integer() || c.is_negative() {
            return Err(FitError::NonIntegralPrediction { q, n });
        }
        out.push(c.to_integer());
    }
    Ok(LocalZetaSeries {
        q,
        levels: vec![None; out.len()],
        coeffs: out,
        n_max,
        level_max: 0,
        rescaled_by: None,
        abscissa_only: false,
    })
}

/// Orders fits canonically: fewer factors, then lower numerator degree, then factor list.
pub fn complexity_cmp(a: &BivariateRational, b: &BivariateRational) -> Ordering {
    a.den.len().cmp(&b.den.len()).then(a.num.deg_y().cmp(&b.num.deg_y())).then(a.den.cmp(&b.den))
}
