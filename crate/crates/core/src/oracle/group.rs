use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{OracleError, OracleOptions};
use crate::lattice::LieLattice;
use crate::localring::{Elem, LocalRingSpec, Ring};

const MAX_RANK: usize = 32;

/// `exp(Λ ⊗ o/p^N)` with the truncated Hausdorff law. Elements are indices in
/// `0..order`, read as base-`|o/p^N|` digit vectors of ring coefficients.
#[derive(Debug, Clone)]
pub struct FiniteGroupTable {
    ring: Ring,
    h: usize,
    order: usize,
    // coefficient of (x_i y_j - x_j y_i) in coordinate k
    half: Vec<(usize, usize, usize, Elem)>,
    // coefficient of (x_i x_j y_l + y_i y_j x_l) in coordinate m
    cubic: Vec<(usize, usize, usize, usize, Elem)>,
    gens: Vec<u32>,
    exponent: u64,
}

/// `n / d` in `o/p^N`, provided the `p`-part of `d` divides `n`.
fn ring_fraction(ring: &Ring, n: i128, d: i64) -> Option<Elem> {
    let p = ring.p() as i64;
    let (mut dp, mut du) = (1i64, d);
    while du % p == 0 {
        du /= p;
        dp *= p;
    }
    if n % dp as i128 != 0 {
        return None;
    }
    let num = i64::try_from(n / dp as i128).ok()?;
    Some(ring.mul(ring.from_int(num), ring.inv_unit(ring.from_int(du))))
}

impl FiniteGroupTable {
    pub fn p(&self) -> u64 {
        self.ring.p()
    }
    pub fn level(&self) -> u32 {
        self.ring.level()
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rank(&self) -> usize {
        self.h
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }
    pub fn identity(&self) -> u32 {
        0
    }

    fn decode(&self, x: u32, out: &mut [Elem; MAX_RANK]) {
        let s = self.ring.size();
        let mut x = x as u64;
        for c in out.iter_mut().take(self.h) {
            *c = self.ring.element(x % s);
            x /= s;
        }
    }

    fn encode(&self, v: &[Elem]) -> u32 {
        let s = self.ring.size();
        v.iter().rev().fold(0u64, |acc, &c| acc * s + self.ring.index_of(c)) as u32
    }

    pub fn coords(&self, x: u32) -> Vec<Elem> {
        let mut buf = [[0u64; 2]; MAX_RANK];
        self.decode(x, &mut buf);
        buf[..self.h].to_vec()
    }

    pub fn element(&self, coords: &[Elem]) -> u32 {
        self.encode(coords)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let r = &self.ring;
        let (mut x, mut y) = ([[0u64; 2]; MAX_RANK], [[0u64; 2]; MAX_RANK]);
        self.decode(a, &mut x);
        self.decode(b, &mut y);
        let mut out = [[0u64; 2]; MAX_RANK];
        for k in 0..self.h {
            out[k] = r.add(x[k], y[k]);
        }
        for &(i, j, k, c) in &self.half {
            let t = r.sub(r.mul(x[i], y[j]), r.mul(x[j], y[i]));
            out[k] = r.add(out[k], r.mul(c, t));
        }
        for &(i, j, l, m, c) in &self.cubic {
            let t = r.add(r.mul(r.mul(x[i], x[j]), y[l]), r.mul(r.mul(y[i], y[j]), x[l]));
            out[m] = r.add(out[m], r.mul(c, t));
        }
        self.encode(&out[..self.h])
    }

    /// `exp(-X)`.
    pub fn inv(&self, a: u32) -> u32 {
        let mut x = [[0u64; 2]; MAX_RANK];
        self.decode(a, &mut x);
        for c in x.iter_mut().take(self.h) {
            *c = self.ring.neg(*c);
        }
        self.encode(&x[..self.h])
    }

    pub fn pow(&self, a: u32, mut k: u64) -> u32 {
        let (mut base, mut acc) = (a, 0);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn conjugate(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let (mut x, mut n) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    fn check_axioms(&self) -> Result<(), OracleError> {
        let n = self.order as u32;
        for x in 0..n {
            if self.mul(0, x) != x || self.mul(x, 0) != x || self.mul(x, self.inv(x)) != 0 {
                return Err(OracleError::AxiomViolated(format!("identity or inverse fails at {x}")));
            }
        }
        let assoc = |a: u32, b: u32, c: u32| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if self.order <= 2000 {
            for a in 0..n {
                for b in 0..n {
                    if let Some(&c) = self.gens.iter().find(|&&c| !assoc(a, b, c)) {
                        return Err(OracleError::AxiomViolated(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x6f72_6163);
        for _ in 0..2000 {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if !assoc(a, b, c) {
                return Err(OracleError::AxiomViolated(format!("associativity fails at ({a}, {b}, {c})")));
            }
        }
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut stack = vec![0u32];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &g in &self.gens {
                let y = self.mul(x, g) as usize;
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y as u32);
                }
            }
        }
        if count != self.order {
            return Err(OracleError::AxiomViolated(format!("generators span {count} of {} elements", self.order)));
        }
        Ok(())
    }
}

/// Builds `exp(Λ ⊗ o/p^N)` for the ring described by `spec` (level `spec.n`) and verifies
/// the group axioms.
pub fn build_group(lat: &LieLattice, spec: &LocalRingSpec, opts: &OracleOptions) -> Result<FiniteGroupTable, OracleError> {
    if lat.class() > 3 {
        return Err(OracleError::UnsupportedClass(lat.class()));
    }
    let ring = Ring::new(spec)?;
    let h = lat.rank();
    let order = (ring.size() as u128).checked_pow(h as u32).unwrap_or(u128::MAX);
    if order > opts.max_order as u128 || h > MAX_RANK {
        return Err(OracleError::GroupTooLarge { order: order.to_string(), cap: opts.max_order });
    }
    let not_integral = |d| OracleError::BchNotIntegral { p: ring.p(), denominator: d };
    let mut half = Vec::new();
    for i in 0..h {
        for j in i + 1..h {
            for (k, &c) in lat.bracket(i, j).iter().enumerate() {
                if c != 0 {
                    let coef = ring_fraction(&ring, c as i128, 2).ok_or_else(|| not_integral(2))?;
                    half.push((i, j, k, coef));
                }
            }
        }
    }
    // [e_i, [e_j, e_l]] coordinates
    let nested = |i: usize, j: usize, l: usize, m: usize| -> i128 {
        (0..h).map(|k| lat.bracket(j, l)[k] as i128 * lat.bracket(i, k)[m] as i128).sum()
    };
    let mut cubic = Vec::new();
    if lat.class() == 3 {
        for i in 0..h {
            for j in i..h {
                for l in 0..h {
                    for m in 0..h {
                        let c = if i == j { nested(i, i, l, m) } else { nested(i, j, l, m) + nested(j, i, l, m) };
                        if c != 0 {
                            let coef = ring_fraction(&ring, c, 12).ok_or_else(|| not_integral(12))?;
                            cubic.push((i, j, l, m, coef));
                        }
                    }
                }
            }
        }
    }
    let mut g = FiniteGroupTable { ring, h, order: order as usize, half, cubic, gens: Vec::new(), exponent: 1 };
    let mut basis = vec![g.ring.one()];
    if g.ring.element(g.ring.size() - 1)[1] > 0 {
        basis.push([0, 1]);
    }
    for i in 0..h {
        for &r in &basis {
            let mut v = vec![g.ring.zero(); h];
            v[i] = r;
            g.gens.push(g.encode(&v));
        }
    }
    g.check_axioms()?;
    g.exponent = (0..g.order as u32).map(|x| g.element_order(x)).max().unwrap_or(1);
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClasses {
    /// Smallest element of each class; classes are ordered by representative.
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
    pub members: Vec<Vec<u32>>,
    pub class_of: Vec<u32>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Orbits of conjugation by the generators.
pub fn conjugacy_classes(g: &FiniteGroupTable) -> ConjugacyClasses {
    const NONE: u32 = u32::MAX;
    let mut class_of = vec![NONE; g.order()];
    let (mut reps, mut sizes, mut members) = (Vec::new(), Vec::new(), Vec::new());
    for x in 0..g.order() as u32 {
        if class_of[x as usize] != NONE {
            continue;
        }
        let c = reps.len() as u32;
        class_of[x as usize] = c;
        let mut orbit = vec![x];
        let mut i = 0;
        while i < orbit.len() {
            let y = orbit[i];
            for &s in g.generators() {
                let z = g.conjugate(s, y);
                if class_of[z as usize] == NONE {
                    class_of[z as usize] = c;
                    orbit.push(z);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        reps.push(x);
        sizes.push(orbit.len());
        members.push(orbit);
    }
    ConjugacyClasses { reps, sizes, members, class_of }
}

/// `|G'|` from the subgroup generated by all conjugates of commutators of generators.
pub fn derived_subgroup_order(g: &FiniteGroupTable, classes: &ConjugacyClasses) -> usize {
    let mut gens: Vec<u32> = Vec::new();
    for &a in g.generators() {
        for &b in g.generators() {
            let c = classes.class_of[g.commutator(a, b) as usize] as usize;
            gens.extend_from_slice(&classes.members[c]);
        }
    }
    gens.sort_unstable();
    gens.dedup();
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut stack = vec![0u32];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &s in &gens {
            let y = g.mul(x, s) as usize;
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y as u32);
            }
        }
    }
    count
}
