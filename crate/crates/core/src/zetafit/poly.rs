//! Sparse bivariate polynomials `Σ c_ij X^i Y^j` over `Q`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Poly2::monomial(0, 0, BigRational::one())
    }

    pub fn monomial(i: u32, j: u32, c: BigRational) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }

    /// `1 - X^b Y^a`.
    pub fn denef_factor(a: u32, b: u32) -> Self {
        let mut p = Poly2::one();
        p.add_term(b, a, -BigRational::one());
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in &self.terms {
            for ((k, l), d) in &other.terms {
                out.add_term(i + k, j + l, c * d);
            }
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for ((i, j), c) in &other.terms {
            out.add_term(*i, *j, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), d) in &self.terms {
            out.add_term(*i, *j, c * d);
        }
        out
    }

    /// `X^{deg_x} Y^{deg_y} P(1/X, 1/Y)`.
    pub fn reversed(&self) -> Poly2 {
        let (dx, dy) = (self.deg_x(), self.deg_y());
        let mut out = Poly2::zero();
        for ((i, j), c) in &self.terms {
            out.add_term(dx - i, dy - j, c.clone());
        }
        out
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for ((i, j), c) in &self.terms {
            acc += c * pow(x, *i) * pow(y, *j);
        }
        acc
    }

    /// Coefficients in `t` after substituting `X = q`, `Y = t`.
    pub fn specialize(&self, q: u64) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.deg_y() as usize + 1];
        let qr = BigRational::from_integer(BigInt::from(q));
        for ((i, j), c) in &self.terms {
            out[*j as usize] += c * pow(&qr, *i);
        }
        while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    /// Whether `1 - X^b Y^a` divides `self` (`a ≥ 1`).
    pub fn divisible_by_factor(&self, a: u32, b: u32) -> bool {
        if self.is_zero() {
            return true;
        }
        let dy = self.deg_y();
        if dy < a {
            return false;
        }
        // Q_j = N_j + X^b Q_{j-a}, rows indexed by Y-degree
        let mut q: Vec<BTreeMap<u32, BigRational>> = Vec::new();
        for j in 0..=(dy - a) {
            let mut row: BTreeMap<u32, BigRational> = BTreeMap::new();
            for ((i, jj), c) in &self.terms {
                if *jj == j {
                    row.insert(*i, c.clone());
                }
            }
            if j >= a {
                for (i, c) in q[(j - a) as usize].clone() {
                    *row.entry(i + b).or_insert_with(BigRational::zero) += c;
                }
            }
            q.push(row);
        }
        let mut quot = Poly2::zero();
        for (j, row) in q.into_iter().enumerate() {
            for (i, c) in row {
                quot.add_term(i, j as u32, c);
            }
        }
        quot.mul(&Poly2::denef_factor(a, b)) == *self
    }
}

pub fn pow(x: &BigRational, e: u32) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

/// Coefficients of `Π (1 - q^b t^a)` as integers.
pub fn denominator_series(den: &[(u32, u32)], q: u64) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for &(a, b) in den {
        let c = BigInt::from(q).pow(b);
        let mut next = out.clone();
        next.resize(out.len() + a as usize, BigInt::zero());
        for (i, v) in out.iter().enumerate() {
            next[i + a as usize] -= v * &c;
        }
        out = next;
    }
    out
}

/// Power series of `num / Π(1 - q^b t^a)` up to `t^n`.
pub fn expand(num: &[BigRational], den: &[(u32, u32)], q: u64, n: usize) -> Vec<BigRational> {
    let d = denominator_series(den, q);
    let mut out: Vec<BigRational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut v = num.get(k).cloned().unwrap_or_else(BigRational::zero);
        for i in 1..d.len().min(k + 1) {
            v -= BigRational::from_integer(d[i].clone()) * &out[k - i];
        }
        out.push(v);
    }
    out
}

/// Whether `1 - c t^a` divides the univariate polynomial `num`.
pub fn univariate_divisible(num: &[BigRational], a: u32, c: &BigRational) -> bool {
    let a = a as usize;
    let len = num.iter().rposition(|x| !x.is_zero()).map_or(0, |p| p + 1);
    if len == 0 {
        return true;
    }
    if len <= a {
        return false;
    }
    let mut q: Vec<BigRational> = Vec::with_capacity(len - a);
    for j in 0..len - a {
        let mut v = num[j].clone();
        if j >= a {
            v += c * &q[j - a];
        }
        q.push(v);
    }
    let mut back = vec![BigRational::zero(); len];
    for (j, v) in q.iter().enumerate() {
        back[j] += v;
        back[j + a] -= c * v;
    }
    back[..] == num[..len]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn factor_divisibility() {
        let f = Poly2::denef_factor(1, 1);
        let g = Poly2::denef_factor(2, 3);
        assert!(f.mul(&g).divisible_by_factor(1, 1));
        assert!(f.mul(&g).divisible_by_factor(2, 3));
        assert!(!g.divisible_by_factor(1, 1));
        assert!(!Poly2::denef_factor(1, 0).divisible_by_factor(1, 1));
    }

    #[test]
    fn expansion_of_geometric_quotient() {
        let s = expand(&[r(1), r(-1)], &[(1, 1)], 3, 4);
        assert_eq!(s, vec![r(1), r(2), r(6), r(18), r(54)]);
    }

    #[test]
    fn univariate_division() {
        // (1 - 3t)(1 + t) = 1 - 2t - 3t²
        assert!(univariate_divisible(&[r(1), r(-2), r(-3)], 1, &r(3)));
        assert!(!univariate_divisible(&[r(1), r(-1)], 1, &r(3)));
    }
}
