//! Global arithmetic: prime splitting, fine Euler products, pole sets, abscissae,
//! pole orders and Tauberian asymptotics.
//!
//! Ray data from a fitted `W(X, Y)`: a denominator factor `1 - X^b Y^a` equals
//! `1 - q^{-(a s - b)}`, so it contributes the ray `(A, B) = (a, -b)` with a simple
//! `L`-factor (`l = 1`). For `W = (1 - Y)/(1 - XY)` this gives `(1, -1)`, hence
//! `a(G) = (1 - B)/A = 2` and the local pole set `{-B/A} = {1}`.

pub mod analytic;
pub mod euler;
pub mod field;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use analytic::{asymptotics, dedekind_residue, dedekind_zeta2, estimate_abscissa_empirical, vp_approximation};
pub use euler::{coarse_factor_check, euler_product, multiplicativity_violation, EulerOptions, GlobalCoefficients};
pub use field::{split_prime, NumberField, SplittingData};

use crate::zetafit::{BivariateRational, FitError, UnivariateRational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("no local factor for a prime ideal above {p} (residue degree {f}); supply a fitted W")]
    MissingLocalFactor { p: u64, f: u8 },
    #[error("ray data is empty")]
    EmptyRayData,
    #[error("ray with A = {0} is not positive")]
    NonPositiveA(String),
    #[error("abscissa {a} does not exceed max P = {max_p}")]
    AbscissaNotAbovePoles { a: String, max_p: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("coefficient overflow")]
    Overflow,
    #[error(transparent)]
    Poincare(#[from] crate::poincare::PoincareError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// One Denef-type term: its rays `(A_j, B_j)` (one for the terms that govern the abscissa),
/// codimension data `(|U|, d_U)` and the number `l` of `L`-factors it carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayTerm {
    pub rays: Vec<(Rational64, Rational64)>,
    #[serde(default)]
    pub u_size: u32,
    #[serde(default)]
    pub d_u: u32,
    #[serde(default = "one")]
    pub l: u32,
}

fn one() -> u32 {
    1
}

impl RayTerm {
    pub fn single(a: Rational64, b: Rational64) -> Self {
        RayTerm { rays: vec![(a, b)], u_size: 0, d_u: 0, l: 1 }
    }

    /// `α = max{(1 - ΣB)/ΣA, -B_j/A_j}`.
    pub fn alpha(&self) -> Rational64 {
        let sa: Rational64 = self.rays.iter().map(|r| r.0).sum();
        let sb: Rational64 = self.rays.iter().map(|r| r.1).sum();
        let mut best = (Rational64::one() - sb) / sa;
        for &(a, b) in &self.rays {
            if !a.is_zero() {
                best = best.max(-b / a);
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RayData {
    pub terms: Vec<RayTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Abscissa {
    pub value: Rational64,
    /// `α_i` per term.
    pub alphas: Vec<Rational64>,
}

impl RayData {
    /// Single-ray terms from `[[A, B], …]`.
    pub fn from_rays(rays: &[(i64, i64)]) -> Self {
        RayData { terms: rays.iter().map(|&(a, b)| RayTerm::single(a.into(), b.into())).collect() }
    }

    /// One ray `(a, -b)` per denominator factor `1 - X^b Y^a`.
    pub fn from_fit(w: &BivariateRational) -> Self {
        RayData {
            terms: w.den.iter().map(|&(a, b)| RayTerm::single((a as i64).into(), (-(b as i64)).into())).collect(),
        }
    }

    fn check(&self) -> Result<(), ArithError> {
        if self.terms.is_empty() || self.terms.iter().any(|t| t.rays.is_empty()) {
            return Err(ArithError::EmptyRayData);
        }
        for t in &self.terms {
            if let Some(r) = t.rays.iter().find(|r| r.0 <= Rational64::zero()) {
                return Err(ArithError::NonPositiveA(r.0.to_string()));
            }
        }
        Ok(())
    }

    /// `a(G) = max_i α_i`.
    pub fn global_abscissa(&self) -> Result<Abscissa, ArithError> {
        self.check()?;
        let alphas: Vec<Rational64> = self.terms.iter().map(|t| t.alpha()).collect();
        let value = *alphas.iter().max().unwrap();
        Ok(Abscissa { value, alphas })
    }

    /// As [`global_abscissa`](Self::global_abscissa), asserting `a(G) > max P`.
    pub fn global_abscissa_above(&self, poles: &[Rational64]) -> Result<Abscissa, ArithError> {
        let a = self.global_abscissa()?;
        if let Some(&m) = poles.iter().max() {
            if a.value <= m {
                return Err(ArithError::AbscissaNotAbovePoles { a: a.value.to_string(), max_p: m.to_string() });
            }
        }
        Ok(a)
    }

    /// `β = Σ l_i` over the terms attaining `a(G)`.
    pub fn pole_order(&self) -> Result<u32, ArithError> {
        let a = self.global_abscissa()?;
        Ok(self.terms.iter().zip(&a.alphas).filter(|(_, al)| **al == a.value).map(|(t, _)| t.l).sum())
    }
}

/// `P = {b/a}` over denominator factors `1 - X^b Y^a` not cancelled by the numerator.
pub fn local_pole_set(w: &BivariateRational) -> Vec<Rational64> {
    let mut poles: Vec<Rational64> = w
        .den
        .iter()
        .filter(|&&(a, b)| !w.num.divisible_by_factor(a, b))
        .map(|&(a, b)| Rational64::new(b as i64, a as i64))
        .collect();
    poles.sort();
    poles.dedup();
    poles
}

/// Univariate version: factors `1 - q^b t^a` not cancelled by the numerator.
pub fn local_pole_set_univariate(f: &UnivariateRational) -> Vec<Rational64> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let mut poles: Vec<Rational64> = f
        .den
        .iter()
        .filter(|&&(a, b)| {
            let c = BigRational::from_integer(BigInt::from(f.q).pow(b));
            !crate::zetafit::univariate_divisible(&f.num, a, &c)
        })
        .map(|&(a, b)| Rational64::new(b as i64, a as i64))
        .collect();
    poles.sort();
    poles.dedup();
    poles
}

pub fn rat_str(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zetafit::Poly2;
    use num_rational::BigRational;

    fn heis_w() -> BivariateRational {
        let mut num = Poly2::one();
        num.add_term(0, 1, -BigRational::one());
        BivariateRational::new(num, vec![(1, 1)])
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn pole_sets() {
        assert_eq!(local_pole_set(&heis_w()), vec![r(1, 1)]);
        assert!(local_pole_set(&BivariateRational::one()).is_empty());
        let w = BivariateRational::new(heis_w().num, vec![(1, 1), (2, 3)]);
        assert_eq!(local_pole_set(&w), vec![r(1, 1), r(3, 2)]);
        let cancelled = BivariateRational::new(Poly2::denef_factor(1, 1), vec![(1, 1)]);
        assert!(local_pole_set(&cancelled).is_empty());
    }

    #[test]
    fn abscissae() {
        assert_eq!(RayData::from_fit(&heis_w()), RayData::from_rays(&[(1, -1)]));
        assert_eq!(RayData::from_rays(&[(1, -1)]).global_abscissa().unwrap().value, r(2, 1));
        assert_eq!(RayData::from_rays(&[(1, -1), (2, -1)]).global_abscissa().unwrap().value, r(2, 1));
        assert_eq!(RayData::from_rays(&[(2, -1)]).global_abscissa().unwrap().value, r(1, 1));
        assert_eq!(RayData::default().global_abscissa(), Err(ArithError::EmptyRayData));
        assert!(RayData::from_rays(&[(1, -1)]).global_abscissa_above(&[r(1, 1)]).is_ok());
        assert!(RayData::from_rays(&[(1, 0)]).global_abscissa_above(&[r(1, 1)]).is_err());
    }

    #[test]
    fn pole_orders() {
        assert_eq!(RayData::from_rays(&[(1, -1)]).pole_order().unwrap(), 1);
        assert_eq!(RayData::from_rays(&[(1, -1), (1, -1)]).pole_order().unwrap(), 2);
        let mut d = RayData::from_rays(&[(1, -1)]);
        d.terms[0].l = 3;
        assert_eq!(d.pole_order().unwrap(), 3);
    }
}
