//! Floating-point diagnostics: Tauberian asymptotics, empirical abscissae, special
//! values and the `V_p` compensation.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::euler::GlobalCoefficients;
use super::field::{kronecker, split_prime, NumberField};
use super::{ArithError, RayData};
use crate::zetafit::BivariateRational;

/// Below this bound the top decade is too short for a tail fit.
pub const MIN_BOUND: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    /// `(N, S(N) / (N^a (log N)^{β-1}))` at geometric `N`.
    pub ratios: Vec<(usize, f64)>,
    pub c: f64,
    pub error: f64,
    /// Correction coefficient `κ` in the tail model `c + κ/N`.
    pub kappa: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se_slope = if sxx == 0.0 || xs.len() < 3 { f64::INFINITY } else { (rss / (n - 2.0) / sxx).sqrt() };
    (intercept, slope, se_slope)
}

/// Top-decade sample points `N ∈ [bound/10, bound]`.
fn top_decade(bound: usize) -> Vec<usize> {
    let lo = (bound / 10).max(2);
    let step = ((bound - lo) / 400).max(1);
    (lo..=bound).step_by(step).collect()
}

/// Estimates `c` in `Σ_{n ≤ N} r̃_n ∼ c N^a (log N)^{β-1}` by fitting `c + κ/N` over the
/// top decade; the error bar is the spread of the fitted model against the raw ratios.
pub fn asymptotics(g: &GlobalCoefficients, a: f64, beta: u32) -> Result<AsymptoticEstimate, ArithError> {
    if g.n_bound < MIN_BOUND || a <= 0.0 || beta == 0 {
        return Err(ArithError::InsufficientData(format!("need N_bound ≥ {MIN_BOUND}, a > 0, β ≥ 1")));
    }
    let s = g.partial_sums();
    let ratio = |n: usize| s[n] / ((n as f64).powf(a) * (n as f64).ln().powi(beta as i32 - 1));
    let mut ratios = Vec::new();
    let mut n = 10f64;
    while (n as usize) <= g.n_bound {
        ratios.push((n as usize, ratio(n as usize)));
        n *= 10f64.powf(0.25);
    }
    let pts = top_decade(g.n_bound);
    let xs: Vec<f64> = pts.iter().map(|&n| 1.0 / n as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|&n| ratio(n)).collect();
    let (c, kappa, _) = least_squares(&xs, &ys);
    let error = xs.iter().zip(&ys).map(|(x, y)| (y - c - kappa * x).abs()).fold(0.0, f64::max);
    if c.abs() < 1e-12 || s[g.n_bound] <= s[g.n_bound / 10] {
        return Err(ArithError::InsufficientData("partial sums do not grow; estimate degenerates".into()));
    }
    Ok(AsymptoticEstimate { ratios, c, error, kappa })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbscissaEstimate {
    pub slope: f64,
    pub low: f64,
    pub high: f64,
    pub degenerate: bool,
}

/// Slope of `log S(N)` against `log N` over the top decade with a two-sigma band.
pub fn estimate_abscissa_empirical(g: &GlobalCoefficients) -> Result<AbscissaEstimate, ArithError> {
    if g.n_bound < MIN_BOUND {
        return Err(ArithError::InsufficientData(format!("need N_bound ≥ {MIN_BOUND}")));
    }
    let s = g.partial_sums();
    let pts = top_decade(g.n_bound);
    let xs: Vec<f64> = pts.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&n| s[n].max(f64::MIN_POSITIVE).ln()).collect();
    let (_, slope, se) = least_squares(&xs, &ys);
    let se = if se.is_finite() { se } else { 0.0 };
    Ok(AbscissaEstimate { slope, low: slope - 2.0 * se, high: slope + 2.0 * se, degenerate: slope.abs() < 0.05 })
}

/// `ζ(2)` by Euler–Maclaurin on a partial sum.
pub fn zeta2() -> f64 {
    let m = 1000usize;
    let partial: f64 = (1..m).map(|k| 1.0 / (k * k) as f64).sum();
    let x = m as f64;
    // tail Σ_{k ≥ m} k^{-2} = 1/m + 1/(2m²) + 1/(6m³) - 1/(30m⁵) + …
    partial + 1.0 / x + 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x.powi(3)) - 1.0 / (30.0 * x.powi(5))
}

/// `L(s, χ_d)` for real `s ≥ 1` and the Kronecker character of discriminant `d`, by direct
/// summation. Partial sums of `χ_d` are bounded by `|d|`, so the tail after `M` terms is at
/// most `2|d| M^{-s}`; `M` is chosen to push this below `tol`.
pub fn dirichlet_l(s: f64, d: i64, tol: f64) -> f64 {
    let m = ((2.0 * d.unsigned_abs() as f64 / tol).powf(1.0 / s)).ceil() as u64;
    // sum over complete periods keeps the partial character sums small
    let period = d.unsigned_abs().max(1);
    let m = m.div_ceil(period) * period;
    let chi: Vec<f64> = (0..period).map(|k| kronecker_char(d, k)).collect();
    let mut acc = 0.0;
    for n in (1..=m).rev() {
        let c = chi[(n % period) as usize];
        if c != 0.0 {
            acc += c / (n as f64).powf(s);
        }
    }
    acc
}

/// `χ_d(n)` for the Kronecker symbol `(d / n)`.
pub fn kronecker_char(d: i64, n: u64) -> f64 {
    if n == 0 {
        return if d.unsigned_abs() == 1 { 1.0 } else { 0.0 };
    }
    let mut n = n;
    let mut acc = 1i32;
    let mut p = 2u64;
    while n > 1 {
        if p * p > n {
            acc *= kronecker(d, n);
            break;
        }
        while n.is_multiple_of(p) {
            acc *= kronecker(d, p);
            n /= p;
        }
        p += 1;
    }
    acc as f64
}

/// `ζ_L(2)` by direct summation: `ζ(2)` for `Q`, `ζ(2) L(2, χ_D)` for quadratic `L`.
pub fn dedekind_zeta2(field: &NumberField) -> f64 {
    match field {
        NumberField::Rationals => zeta2(),
        NumberField::Quadratic(_) => zeta2() * dirichlet_l(2.0, field.discriminant(), 1e-9),
    }
}

/// Residue of `ζ_L(s)` at `s = 1`: 1 for `Q`, `L(1, χ_D)` for quadratic `L`.
pub fn dedekind_residue(field: &NumberField) -> f64 {
    match field {
        NumberField::Rationals => 1.0,
        NumberField::Quadratic(_) => dirichlet_l(1.0, field.discriminant(), 1e-7),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VpRow {
    pub s: (f64, f64),
    /// Partial products after each prime (compensated and raw).
    pub compensated: Vec<(u64, (f64, f64))>,
    pub raw: Vec<(u64, (f64, f64))>,
    /// `|P_k - P_{k-1}|` for the last prime of the compensated product.
    pub last_step: f64,
}

fn cx(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

/// `V_p(s) = Π_{maximal rays} (1 - q^{-(A s + B)})` and the local factor `W(q, q^{-s})`
/// over the prime ideals above each rational prime; reports the partial products of
/// `Π W` and `Π W·V_p`.
pub fn vp_approximation(
    rays: &RayData,
    local: &BivariateRational,
    primes: &[u64],
    field: &NumberField,
    points: &[Complex64],
) -> Result<Vec<VpRow>, ArithError> {
    let a = rays.global_abscissa()?;
    let maximal: Vec<(f64, f64)> = rays
        .terms
        .iter()
        .filter(|t| t.alpha() == a.value)
        .flat_map(|t| t.rays.iter().map(|r| (r.0.to_f64().unwrap_or(f64::NAN), r.1.to_f64().unwrap_or(f64::NAN))))
        .collect();
    let mut rows = Vec::new();
    for &s in points {
        let (mut comp, mut raw) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let (mut comp_hist, mut raw_hist) = (Vec::new(), Vec::new());
        let mut last_step = 0.0;
        for &p in primes {
            for ideal in split_prime(field, p).ideals {
                let q = ideal.norm() as f64;
                let w = eval_w(local, q, s);
                let v: Complex64 = maximal.iter().map(|&(aa, bb)| Complex64::new(1.0, 0.0) - q_pow(q, -(s * aa + bb))).product();
                let before = comp;
                comp *= w * v;
                raw *= w;
                last_step = (comp - before).norm();
            }
            comp_hist.push((p, cx(comp)));
            raw_hist.push((p, cx(raw)));
        }
        rows.push(VpRow { s: cx(s), compensated: comp_hist, raw: raw_hist, last_step });
    }
    Ok(rows)
}

fn q_pow(q: f64, e: Complex64) -> Complex64 {
    (e * q.ln()).exp()
}

/// `W(q, q^{-s})` in floating point.
pub fn eval_w(w: &BivariateRational, q: f64, s: Complex64) -> Complex64 {
    let t = q_pow(q, -s);
    let mut num = Complex64::new(0.0, 0.0);
    for ((i, j), c) in w.num.terms() {
        let c = c.to_f64().unwrap_or(f64::NAN);
        num += Complex64::new(c * q.powi(*i as i32), 0.0) * t.powu(*j);
    }
    let den: Complex64 = w.den.iter().map(|&(a, b)| Complex64::new(1.0, 0.0) - t.powu(a) * q.powi(b as i32)).product();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta2() - pi * pi / 6.0).abs() < 1e-10);
        // Catalan's constant
        assert!((dirichlet_l(2.0, -4, 1e-9) - 0.915_965_594_177_219).abs() < 1e-8);
        assert!((dirichlet_l(1.0, -4, 1e-6) - pi / 4.0).abs() < 1e-5);
    }

    #[test]
    fn all_ones_has_slope_one() {
        let g = GlobalCoefficients::from_coeffs((0..=20000).map(|n| (n > 0) as u128).collect());
        let est = estimate_abscissa_empirical(&g).unwrap();
        assert!((0.95..=1.05).contains(&est.slope));
    }

    #[test]
    fn constant_series_degenerates() {
        let mut c = vec![0u128; 5001];
        c[1] = 1;
        let g = GlobalCoefficients::from_coeffs(c);
        assert!(estimate_abscissa_empirical(&g).unwrap().degenerate);
        assert!(matches!(asymptotics(&g, 2.0, 1), Err(ArithError::InsufficientData(_))));
        assert!(matches!(asymptotics(&GlobalCoefficients::from_coeffs(vec![0, 1, 0]), 2.0, 1), Err(ArithError::InsufficientData(_))));
    }
}
