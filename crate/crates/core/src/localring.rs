//! Truncated local rings `o/p^N` for `o` the completion of `Z` or of a quadratic
//! ring of integers at a prime.
//!
//! Elements are pairs of integer coordinates `a0 + a1·x` where `x` is a root of the
//! defining polynomial `g`. For `e = 1` both coordinates live modulo `p^N`. For
//! `e = 2` (`g` Eisenstein, `π = x`) one has `π^N o = p^⌈N/2⌉ Z_p ⊕ p^⌊N/2⌋ Z_p·π`,
//! so the coordinates carry different moduli.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("invalid defining polynomial {g:?} for p={p}, e={e}, f={f}: {reason}")]
    InvalidDefiningPolynomial { p: u64, e: u8, f: u8, g: Vec<i64>, reason: &'static str },
    #[error("unsupported (e, f) = ({e}, {f})")]
    Unsupported { e: u8, f: u8 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p^N does not fit in 63 bits")]
    TooLarge,
    #[error("antisymmetric type has unpaired divisors {0:?}")]
    PairingViolation(Vec<u32>),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Hash)]
pub struct LocalRingSpec {
    pub p: u64,
    pub e: u8,
    pub f: u8,
    #[serde(rename = "N")]
    pub n: u32,
    /// Coefficients of the monic defining polynomial, constant term first.
    pub g: Vec<i64>,
}

impl LocalRingSpec {
    /// `Z_p / p^N`.
    pub fn rational(p: u64, n: u32) -> Self {
        LocalRingSpec { p, e: 1, f: 1, n, g: vec![0, 1] }
    }

    /// Unramified quadratic extension, with the first irreducible `x² + c1 x + c0`
    /// in lexicographic order of `(c1, c0)`.
    pub fn unramified(p: u64, n: u32) -> Self {
        for c1 in 0..p as i64 {
            for c0 in 1..p as i64 {
                if !has_root_mod_p(&[c0, c1, 1], p) {
                    return LocalRingSpec { p, e: 1, f: 2, n, g: vec![c0, c1, 1] };
                }
            }
        }
        unreachable!("an irreducible quadratic exists over every prime field")
    }

    /// Ramified quadratic extension with Eisenstein polynomial `x² + c1 x + c0`.
    pub fn ramified(p: u64, n: u32, c1: i64, c0: i64) -> Self {
        LocalRingSpec { p, e: 2, f: 1, n, g: vec![c0, c1, 1] }
    }

    pub fn with_level(&self, n: u32) -> Self {
        LocalRingSpec { n, ..self.clone() }
    }

    /// Residue field cardinality.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn validate(&self) -> Result<(), RingError> {
        let bad = |reason| RingError::InvalidDefiningPolynomial {
            p: self.p,
            e: self.e,
            f: self.f,
            g: self.g.clone(),
            reason,
        };
        if !crate::modp::is_prime(self.p) {
            return Err(RingError::NotPrime(self.p));
        }
        let deg = (self.e * self.f) as usize;
        match (self.e, self.f) {
            (1, 1) | (1, 2) | (2, 1) => {}
            (e, f) => return Err(RingError::Unsupported { e, f }),
        }
        if self.g.len() != deg + 1 || self.g[deg] != 1 {
            return Err(bad("expected a monic polynomial of degree e·f"));
        }
        if self.e == 1 && self.f == 2 && has_root_mod_p(&self.g, self.p) {
            return Err(bad("not irreducible mod p"));
        }
        if self.e == 2 {
            let p = self.p as i64;
            let (c0, c1) = (self.g[0], self.g[1]);
            if c0 % p != 0 || c1 % p != 0 || c0 % (p * p) == 0 {
                return Err(bad("not Eisenstein at p"));
            }
        }
        let m = self.n.div_ceil(self.e as u32);
        if (self.p as u128).pow(m) >= 1u128 << 63 {
            return Err(RingError::TooLarge);
        }
        Ok(())
    }
}

fn has_root_mod_p(g: &[i64], p: u64) -> bool {
    let p = p as i128;
    (0..p).any(|x| {
        let mut acc = 0i128;
        for &c in g.iter().rev() {
            acc = (acc * x + c as i128).rem_euclid(p);
        }
        acc == 0
    })
}

pub type Elem = [u64; 2];

/// Arithmetic handle for `o/p^N`; immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Ring {
    spec: LocalRingSpec,
    q: u64,
    // coordinate moduli
    m0: u64,
    m1: u64,
    // x² = -c1·x - c0, stored as nonnegative residues of -c0, -c1
    neg_c0: [u64; 2],
    neg_c1: [u64; 2],
    // ramified: inverse of c0/p modulo m0
    c0p_inv: u64,
}

impl Ring {
    pub fn new(spec: &LocalRingSpec) -> Result<Ring, RingError> {
        spec.validate()?;
        let p = spec.p;
        let (m0, m1) = match (spec.e, spec.f) {
            (1, 1) => (p.pow(spec.n), 1),
            (1, 2) => (p.pow(spec.n), p.pow(spec.n)),
            _ => (p.pow(spec.n.div_ceil(2)), p.pow(spec.n / 2)),
        };
        let red = |x: i64, m: u64| (x as i128).rem_euclid(m as i128) as u64;
        let (c0, c1) = if spec.g.len() == 3 { (spec.g[0], spec.g[1]) } else { (0, 0) };
        let neg_c0 = [red(-c0, m0), red(-c0, m1)];
        let neg_c1 = [red(-c1, m0), red(-c1, m1)];
        let c0p_inv = if spec.e == 2 && m0 > 1 {
            inv_mod(red(c0 / p as i64, m0), m0)
        } else {
            0
        };
        Ok(Ring { spec: spec.clone(), q: spec.q(), m0, m1, neg_c0, neg_c1, c0p_inv })
    }

    pub fn spec(&self) -> &LocalRingSpec {
        &self.spec
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn p(&self) -> u64 {
        self.spec.p
    }
    pub fn level(&self) -> u32 {
        self.spec.n
    }

    /// Number of elements, `q^N`.
    pub fn size(&self) -> u64 {
        self.m0 * self.m1
    }

    pub fn zero(&self) -> Elem {
        [0, 0]
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, x: i64) -> Elem {
        [(x as i128).rem_euclid(self.m0 as i128) as u64, 0]
    }

    /// The uniformizer (`p` or `x`).
    pub fn pi(&self) -> Elem {
        if self.spec.e == 2 {
            [0, 1 % self.m1]
        } else {
            self.from_int(self.spec.p as i64)
        }
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        [addm(a[0], b[0], self.m0), addm(a[1], b[1], self.m1)]
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        [addm(a[0], self.m0 - b[0] % self.m0, self.m0), addm(a[1], (self.m1 - b[1] % self.m1) % self.m1, self.m1)]
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(self.zero(), a)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let (m0, m1) = (self.m0 as u128, self.m1 as u128);
        if self.m1 == 1 && self.spec.e == 1 {
            return [(a[0] as u128 * b[0] as u128 % m0) as u64, 0];
        }
        // (a0 + a1 x)(b0 + b1 x) with x² = -c1 x - c0
        let hh = a[1] as u128 * b[1] as u128;
        let c0 = (a[0] as u128 * b[0] as u128 + (hh % m0) * self.neg_c0[0] as u128) % m0;
        let c1 = if m1 == 1 {
            0
        } else {
            let cross = (a[0] as u128 * b[1] as u128 + a[1] as u128 * b[0] as u128) % m1;
            (cross + (hh % m1) * self.neg_c1[1] as u128) % m1
        };
        [c0 as u64, c1 as u64]
    }

    /// Multiplication by an integer.
    pub fn scale(&self, a: Elem, k: i64) -> Elem {
        let k0 = (k as i128).rem_euclid(self.m0 as i128) as u128;
        let k1 = (k as i128).rem_euclid(self.m1 as i128) as u128;
        [(a[0] as u128 * k0 % self.m0 as u128) as u64, (a[1] as u128 * k1 % self.m1 as u128) as u64]
    }

    pub fn is_zero(&self, a: Elem) -> bool {
        a[0] == 0 && a[1] == 0
    }

    /// `π`-adic valuation, capped at `N`.
    pub fn valuation(&self, a: Elem) -> u32 {
        let n = self.spec.n;
        let p = self.spec.p;
        let v = if self.spec.e == 1 {
            vp_capped(a[0], p, n).min(vp_capped(a[1], p, n))
        } else {
            (2 * vp_capped(a[0], p, n)).min(2 * vp_capped(a[1], p, n) + 1)
        };
        v.min(n)
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.spec.n > 0 && self.valuation(a) == 0
    }

    /// Image in the residue field, as a pair of residues mod `p`.
    pub fn residue(&self, a: Elem) -> Elem {
        let p = self.spec.p;
        if self.spec.e == 2 {
            [a[0] % p, 0]
        } else {
            [a[0] % p, a[1] % p]
        }
    }

    /// Some `b` with `π·b = a`; requires `valuation(a) ≥ 1`.
    pub fn div_pi(&self, a: Elem) -> Elem {
        let p = self.spec.p;
        if self.spec.e == 1 {
            return [a[0] / p, a[1] / p];
        }
        // a/π = a1 - (a0/p)·(c0/p)^{-1}·(c1 + π)
        let t = ((a[0] / p) as u128 * self.c0p_inv as u128 % self.m0 as u128) as u64;
        let c1 = [(self.m0 - self.neg_c1[0]) % self.m0, 1 % self.m1];
        let lifted_a1 = [a[1] % self.m0, 0];
        self.sub(lifted_a1, self.mul([t, 0], c1))
    }

    pub fn inv_unit(&self, u: Elem) -> Elem {
        debug_assert!(self.is_unit(u));
        if self.spec.e == 1 && self.spec.f == 1 {
            return [inv_mod(u[0], self.m0), 0];
        }
        // residue-field inverse, then Newton lifting x ← x(2 - ux)
        let mut x = self.pow(u, self.q - 2);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.spec.n {
            x = self.mul(x, self.sub(two, self.mul(u, x)));
            prec *= 2;
        }
        x
    }

    /// Some `t` with `t·b = a`, given `valuation(a) ≥ valuation(b)`.
    pub fn div_exact(&self, a: Elem, b: Elem) -> Elem {
        let v = self.valuation(b);
        let (mut a, mut b) = (a, b);
        for _ in 0..v {
            a = self.div_pi(a);
            b = self.div_pi(b);
        }
        self.mul(a, self.inv_unit(b))
    }

    /// Element with the given index in `0..size()`.
    pub fn element(&self, idx: u64) -> Elem {
        [idx % self.m0, idx / self.m0]
    }

    pub fn index_of(&self, a: Elem) -> u64 {
        a[0] + a[1] * self.m0
    }

    /// Number of non-units, `q^{N-1}`.
    pub fn nonunit_count(&self) -> u64 {
        self.size() / self.q
    }

    /// Non-unit with the given index in `0..nonunit_count()`.
    pub fn nonunit(&self, idx: u64) -> Elem {
        let p = self.spec.p;
        if self.spec.e == 2 {
            let k = self.m0 / p;
            [(idx % k) * p, idx / k]
        } else if self.m1 == 1 {
            [idx * p, 0]
        } else {
            let k = self.m0 / p;
            [(idx % k) * p, (idx / k) * p]
        }
    }

    /// Elementary-divisor type of an `rows × cols` matrix, capped at `N`, nondecreasing,
    /// of length `min(rows, cols)`.
    pub fn elementary_divisor_type(&self, m: &[Vec<Elem>]) -> Vec<u32> {
        let mut a: Vec<Vec<Elem>> = m.to_vec();
        smith_type_in_place(self, &mut a)
    }

    /// Halved type `(a_1, …, a_⌊r/2⌋)` of an antisymmetric matrix.
    pub fn antisymmetric_type(&self, m: &[Vec<Elem>]) -> Result<Vec<u32>, RingError> {
        let t = self.elementary_divisor_type(m);
        pair_up(&t, self.spec.n)
    }
}

pub(crate) fn pair_up(t: &[u32], n: u32) -> Result<Vec<u32>, RingError> {
    let r = t.len();
    let paired = (0..r / 2).all(|i| t[2 * i] == t[2 * i + 1]);
    let odd_ok = r.is_multiple_of(2) || t[r - 1] == n;
    if !paired || !odd_ok {
        return Err(RingError::PairingViolation(t.to_vec()));
    }
    Ok((0..r / 2).map(|i| t[2 * i]).collect())
}

/// Smith reduction over the chain ring: pivot on the first minimal-valuation entry,
/// clear its row and column, recurse. Destroys `a`.
pub(crate) fn smith_type_in_place(ring: &Ring, a: &mut [Vec<Elem>]) -> Vec<u32> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let len = rows.min(cols);
    let n = ring.level();
    let mut out = Vec::with_capacity(len);
    let mut rused = vec![false; rows];
    let mut cused = vec![false; cols];
    for _ in 0..len {
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for i in 0..rows {
            if rused[i] {
                continue;
            }
            for j in 0..cols {
                if cused[j] {
                    continue;
                }
                let v = ring.valuation(a[i][j]);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let (v, pi, pj) = best.expect("nonempty submatrix");
        if v >= n {
            out.resize(len, n);
            break;
        }
        out.push(v);
        rused[pi] = true;
        cused[pj] = true;
        let piv = a[pi][pj];
        let piv_unit_inv = if v == 0 { Some(ring.inv_unit(piv)) } else { None };
        for i in 0..rows {
            if rused[i] || ring.is_zero(a[i][pj]) {
                continue;
            }
            let t = match piv_unit_inv {
                Some(iv) => ring.mul(a[i][pj], iv),
                None => ring.div_exact(a[i][pj], piv),
            };
            for j in 0..cols {
                if cused[j] {
                    continue;
                }
                let s = ring.mul(t, a[pi][j]);
                a[i][j] = ring.sub(a[i][j], s);
            }
            a[i][pj] = ring.zero();
        }
        // column clearing only touches the pivot row, which is now retired
    }
    out.sort_unstable();
    out
}

fn addm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn vp_capped(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x.is_multiple_of(p) && v < cap {
        x /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "not invertible");
    t0.rem_euclid(m as i128) as u64
}

/// Number of primitive `d`-tuples, `q^{dN} - q^{d(N-1)}` (and 1 for `N = 0`).
pub fn w_count(q: u64, d: usize, n: u32) -> u128 {
    if n == 0 {
        return 1;
    }
    (q as u128).pow(d as u32 * n) - (q as u128).pow(d as u32 * (n - 1))
}

/// Iterates over `W_N(o)` in lexicographic index order; for `N = 0` yields the zero tuple.
pub fn enumerate_w(ring: &Ring, d: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let size = ring.size();
    let total = (size as u128).pow(d as u32);
    (0..total).filter_map(move |mut idx| {
        let mut y = vec![[0u64; 2]; d];
        for slot in y.iter_mut().rev() {
            *slot = ring.element((idx % size as u128) as u64);
            idx /= size as u128;
        }
        if ring.level() == 0 || y.iter().any(|&c| ring.is_unit(c)) {
            Some(y)
        } else {
            None
        }
    })
}

/// Representatives of the unit-scaling orbits on `W_N(o)`: the first unit coordinate
/// is 1, earlier coordinates are non-units. Each orbit has `q^{N-1}(q-1)` elements.
#[derive(Debug, Clone)]
pub struct OrbitReps<'a> {
    ring: &'a Ring,
    d: usize,
    // (position of the leading 1, number of reps with that position)
    blocks: Vec<(usize, u128)>,
}

impl<'a> OrbitReps<'a> {
    pub fn new(ring: &'a Ring, d: usize) -> Self {
        let nu = ring.nonunit_count() as u128;
        let all = ring.size() as u128;
        let blocks = (0..d).map(|j| (j, nu.pow(j as u32) * all.pow((d - 1 - j) as u32))).collect();
        OrbitReps { ring, d, blocks }
    }

    pub fn len(&self) -> u128 {
        self.blocks.iter().map(|b| b.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multiplier(&self) -> u128 {
        let q = self.ring.q() as u128;
        q.pow(self.ring.level() - 1) * (q - 1)
    }

    /// Writes the representative with index `idx` into `y`.
    pub fn get(&self, mut idx: u128, y: &mut [Elem]) {
        let ring = self.ring;
        let size = ring.size() as u128;
        let nu = ring.nonunit_count() as u128;
        for &(j, count) in &self.blocks {
            if idx >= count {
                idx -= count;
                continue;
            }
            for slot in y[j + 1..self.d].iter_mut().rev() {
                *slot = ring.element((idx % size) as u64);
                idx /= size;
            }
            y[j] = ring.one();
            for slot in y[..j].iter_mut().rev() {
                *slot = ring.nonunit((idx % nu) as u64);
                idx /= nu;
            }
            return;
        }
        panic!("orbit representative index out of range");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, n: u32) -> Ring {
        Ring::new(&LocalRingSpec::rational(p, n)).unwrap()
    }

    fn mat(ring: &Ring, rows: &[&[i64]]) -> Vec<Vec<Elem>> {
        rows.iter().map(|r| r.iter().map(|&x| ring.from_int(x)).collect()).collect()
    }

    #[test]
    fn spec_examples() {
        let r = z(3, 3);
        assert_eq!(r.size(), 27);
        assert_eq!(r.pi(), [3, 0]);
        let g = Ring::new(&LocalRingSpec { p: 3, e: 1, f: 2, n: 2, g: vec![1, 0, 1] }).unwrap();
        assert_eq!((g.size(), g.q()), (81, 9));
        let ram = Ring::new(&LocalRingSpec::ramified(2, 2, 0, -2)).unwrap();
        let pi = ram.pi();
        assert!(ram.is_zero(ram.mul(pi, pi)));
        assert_eq!(ram.valuation(pi), 1);
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(Ring::new(&LocalRingSpec { p: 5, e: 1, f: 2, n: 2, g: vec![1, 0, 1] }).is_err());
        assert!(Ring::new(&LocalRingSpec::ramified(2, 2, 0, -4)).is_err());
        assert!(Ring::new(&LocalRingSpec::ramified(3, 2, 1, 3)).is_err());
    }

    #[test]
    fn valuations() {
        let r = z(3, 3);
        assert_eq!(r.valuation(r.from_int(9)), 2);
        assert_eq!(r.valuation(r.zero()), 3);
        let g = Ring::new(&LocalRingSpec { p: 3, e: 1, f: 2, n: 2, g: vec![1, 0, 1] }).unwrap();
        assert_eq!(g.valuation(g.scale([0, 1], 3)), 1);
    }

    #[test]
    fn w_counts() {
        assert_eq!(enumerate_w(&z(3, 1), 2).count(), 8);
        assert_eq!(enumerate_w(&z(3, 2), 1).count(), 6);
        let f4 = Ring::new(&LocalRingSpec::unramified(2, 1)).unwrap();
        assert_eq!(enumerate_w(&f4, 1).count(), 3);
    }

    #[test]
    fn divisor_types() {
        let r = z(3, 2);
        assert_eq!(r.elementary_divisor_type(&mat(&r, &[&[1, 0], &[0, 3]])), vec![0, 1]);
        assert_eq!(r.elementary_divisor_type(&mat(&r, &[&[3, 3], &[3, 3]])), vec![1, 2]);
        assert_eq!(r.elementary_divisor_type(&mat(&r, &[&[0, 0], &[0, 0], &[0, 0]])), vec![2, 2]);
        assert_eq!(r.antisymmetric_type(&mat(&r, &[&[0, 1], &[-1, 0]])).unwrap(), vec![0]);
        let r27 = z(3, 3);
        assert_eq!(r27.antisymmetric_type(&mat(&r27, &[&[0, 3], &[-3, 0]])).unwrap(), vec![1]);
        let odd = mat(&r, &[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        assert_eq!(r.elementary_divisor_type(&odd), vec![0, 0, 2]);
        assert_eq!(r.antisymmetric_type(&odd).unwrap(), vec![0]);
        assert!(matches!(
            r.antisymmetric_type(&mat(&r, &[&[1, 0], &[0, 3]])),
            Err(RingError::PairingViolation(_))
        ));
    }

    #[test]
    fn ramified_division_by_pi() {
        for spec in [LocalRingSpec::ramified(2, 5, 2, 2), LocalRingSpec::ramified(3, 5, 0, -3)] {
            let r = Ring::new(&spec).unwrap();
            for idx in 0..r.size() {
                let a = r.element(idx);
                if r.valuation(a) >= 1 {
                    let b = r.div_pi(a);
                    assert_eq!(r.mul(b, r.pi()), a, "{spec:?} {a:?}");
                } else {
                    assert_eq!(r.mul(a, r.inv_unit(a)), r.one());
                }
            }
        }
    }

    #[test]
    fn orbit_reps_cover_w() {
        for spec in [
            LocalRingSpec::rational(3, 2),
            LocalRingSpec::unramified(2, 2),
            LocalRingSpec::ramified(2, 3, 2, 2),
        ] {
            let r = Ring::new(&spec).unwrap();
            for d in 1..=3 {
                let reps = OrbitReps::new(&r, d);
                assert_eq!(reps.len() * reps.multiplier(), w_count(r.q(), d, r.level()));
                let mut y = vec![[0, 0]; d];
                for i in 0..reps.len() {
                    reps.get(i, &mut y);
                    assert!(y.iter().any(|&c| r.is_unit(c)));
                }
            }
        }
    }
}
