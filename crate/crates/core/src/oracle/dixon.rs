//! Burnside–Dixon character tables over `F_ℓ` with `ℓ ≡ 1 mod exp(G)`.
//!
//! Central characters `ω_χ(C_k) = |C_k| χ(g_k)/χ(1)` are the common eigenvectors of the
//! class matrices `(M_i)_{jk} = #{x ∈ C_i : x⁻¹ z_k ∈ C_j}`. Spaces are split by one class
//! matrix at a time, smallest classes first, until every space is a line.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::group::{derived_subgroup_order, ConjugacyClasses, FiniteGroupTable};
use super::{OracleError, OracleOptions};
use crate::modp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterTable {
    pub modulus: u64,
    pub exponent: u64,
    pub order: usize,
    pub class_sizes: Vec<usize>,
    /// Class of `g_k⁻¹`.
    pub inverse_class: Vec<usize>,
    /// Rows sorted by degree, then by values.
    pub degrees: Vec<u64>,
    /// `χ(g_k) mod ℓ`.
    pub values: Vec<Vec<u32>>,
}

impl CharacterTable {
    pub fn degree_multiset(&self) -> BTreeMap<u64, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    pub fn linear_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 1).count()
    }

    /// Multiplicities `μ_m` with `χ(g_k) = Σ_m μ_m ζ_e^m`, `ζ_e = e^{2πi/e}`.
    pub fn lift(&self, g: &FiniteGroupTable, classes: &ConjugacyClasses, chi: usize, k: usize) -> Vec<u64> {
        let (l, e) = (self.modulus as u128, self.exponent);
        let zeta = primitive_root_of_unity(self.modulus, e);
        let rep = classes.reps[k];
        let mut vals = Vec::with_capacity(e as usize);
        let mut x = 0u32;
        for _ in 0..e {
            vals.push(self.values[chi][classes.class_of[x as usize] as usize] as u128);
            x = g.mul(x, rep);
        }
        let e_inv = modp::inv(e as u128 % l, l);
        (0..e)
            .map(|m| {
                let zm = modp::inv(modp::pow(zeta as u128, m as u128, l), l);
                let s = vals.iter().enumerate().fold(0u128, |acc, (t, &v)| (acc + v * modp::pow(zm, t as u128, l)) % l);
                (s * e_inv % l) as u64
            })
            .collect()
    }

    /// Complex value from [`lift`](Self::lift).
    pub fn complex_value(&self, g: &FiniteGroupTable, classes: &ConjugacyClasses, chi: usize, k: usize) -> Complex64 {
        let e = self.exponent as f64;
        self.lift(g, classes, chi, k)
            .iter()
            .enumerate()
            .map(|(m, &mu)| Complex64::from_polar(mu as f64, 2.0 * std::f64::consts::PI * m as f64 / e))
            .sum()
    }
}

/// Smallest prime `ℓ ≡ 1 mod e` with `ℓ > 2⌈√|G|⌉`.
pub fn dixon_modulus(order: usize, exponent: u64) -> Option<u64> {
    let root = (order as f64).sqrt().ceil() as u64;
    let root = (root.saturating_sub(2)..=root + 2).find(|r| r * r >= order as u64).unwrap_or(root);
    let lower = 2 * root;
    let mut l = lower + 1;
    l += (exponent - (l - 1) % exponent) % exponent;
    for _ in 0..100_000 {
        if modp::is_prime(l) {
            return Some(l);
        }
        l += exponent;
    }
    None
}

fn primitive_root_of_unity(l: u64, e: u64) -> u64 {
    let lm = l as u128;
    let mut factors = Vec::new();
    let mut n = l - 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    let gen = (2..l).find(|&g| factors.iter().all(|&f| modp::pow(g as u128, ((l - 1) / f) as u128, lm) != 1)).unwrap();
    modp::pow(gen as u128, ((l - 1) / e) as u128, lm) as u64
}

struct Fp(u64);

impl Fp {
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn inv(&self, a: u64) -> u64 {
        modp::inv(a as u128, self.0 as u128) as u64
    }
}

/// Reduced row echelon form in place; drops zero rows and returns pivot columns.
fn rref(rows: &mut Vec<Vec<u64>>, f: &Fp) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(rank, piv);
        let iv = f.inv(rows[rank][c]);
        for v in rows[rank].iter_mut() {
            *v = f.mul(*v, iv);
        }
        let pivot_row = rows[rank].clone();
        rows.par_iter_mut().enumerate().filter(|(i, _)| *i != rank).for_each(|(_, row)| {
            let m = row[c];
            if m != 0 {
                for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = f.sub(*x, f.mul(m, y));
                }
            }
        });
        pivots.push(c);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

/// Basis of `{c : A c = 0}`.
fn kernel(a: &[Vec<u64>], f: &Fp) -> Vec<Vec<u64>> {
    let d = a.first().map_or(0, |r| r.len());
    let mut m = a.to_vec();
    let pivots = rref(&mut m, f);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; d];
            v[fc] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = f.sub(0, row[fc]);
            }
            v
        })
        .collect()
}

/// Minimal polynomial of `u` under `A` (monic, low degree first).
fn krylov_minpoly(a: &[Vec<u64>], u: Vec<u64>, f: &Fp) -> Vec<u64> {
    let d = u.len();
    let matvec = |v: &[u64]| -> Vec<u64> { a.iter().map(|row| row.iter().zip(v).fold(0, |s, (&x, &y)| (s + x * y) % f.0)).collect() };
    // stored: (vector, polynomial, pivot)
    let mut basis: Vec<(Vec<u64>, Vec<u64>, usize)> = Vec::new();
    let mut cur = u;
    for k in 0..=d {
        let next = matvec(&cur);
        let mut poly = vec![0u64; k + 1];
        poly[k] = 1;
        let mut v = cur;
        for (bv, bp, piv) in &basis {
            let m = v[*piv];
            if m != 0 {
                for (x, &y) in v.iter_mut().zip(bv) {
                    *x = f.sub(*x, f.mul(m, y));
                }
                for (x, &y) in poly.iter_mut().zip(bp) {
                    *x = f.sub(*x, f.mul(m, y));
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => return poly,
            Some(piv) => {
                let iv = f.inv(v[piv]);
                v.iter_mut().for_each(|x| *x = f.mul(*x, iv));
                poly.iter_mut().for_each(|x| *x = f.mul(*x, iv));
                basis.push((v, poly, piv));
            }
        }
        cur = next;
    }
    unreachable!("Krylov sequence longer than the dimension")
}

/// Class matrix stored by columns: `cols[k] = [(j, (M)_{jk})]`.
struct Sparse {
    cols: Vec<Vec<(usize, u64)>>,
}

impl Sparse {
    fn apply(&self, v: &[u64], l: u64) -> Vec<u64> {
        let mut out = vec![0u64; v.len()];
        for (k, col) in self.cols.iter().enumerate() {
            if v[k] != 0 {
                for &(j, c) in col {
                    out[j] = (out[j] + c * v[k]) % l;
                }
            }
        }
        out
    }
}

/// A subspace as RREF rows with their pivot columns.
struct Space {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Space {
    fn new(mut rows: Vec<Vec<u64>>, f: &Fp) -> Space {
        let pivots = rref(&mut rows, f);
        Space { rows, pivots }
    }
}

/// Splits `space` into eigenspaces of `M`; a scalar action returns the space unchanged.
fn split_space(space: Space, m: &Sparse, f: &Fp, rng: &mut ChaCha8Rng) -> Result<Vec<Space>, OracleError> {
    let d = space.rows.len();
    // A[s][t] = (M b_t)[pivot_s]
    let images: Vec<Vec<u64>> = space.rows.par_iter().map(|b| m.apply(b, f.0)).collect();
    let a: Vec<Vec<u64>> = space.pivots.iter().map(|&ps| images.iter().map(|w| w[ps]).collect()).collect();
    let lam0 = a[0][0];
    if (0..d).all(|s| (0..d).all(|t| a[s][t] == if s == t { lam0 } else { 0 })) {
        return Ok(vec![space]);
    }
    let mut roots: Vec<u64> = Vec::new();
    let mut spaces = Vec::new();
    let mut found = 0;
    for _ in 0..8 {
        let u: Vec<u64> = (0..d).map(|_| rng.gen_range(0..f.0)).collect();
        let poly = krylov_minpoly(&a, u, f);
        for lam in 0..f.0 {
            if roots.contains(&lam) || poly.iter().rev().fold(0, |acc, &c| (f.mul(acc, lam) + c) % f.0) != 0 {
                continue;
            }
            roots.push(lam);
            let shifted: Vec<Vec<u64>> = a
                .iter()
                .enumerate()
                .map(|(s, row)| row.iter().enumerate().map(|(t, &x)| if s == t { f.sub(x, lam) } else { x }).collect())
                .collect();
            let ker = kernel(&shifted, f);
            found += ker.len();
            let vecs: Vec<Vec<u64>> = ker
                .par_iter()
                .map(|c| {
                    let mut w = vec![0u64; space.rows[0].len()];
                    for (t, &ct) in c.iter().enumerate() {
                        if ct != 0 {
                            for (x, &y) in w.iter_mut().zip(&space.rows[t]) {
                                *x = (*x + ct * y) % f.0;
                            }
                        }
                    }
                    w
                })
                .collect();
            spaces.push(Space::new(vecs, f));
        }
        if found == d {
            return Ok(spaces);
        }
    }
    Err(OracleError::SplitFailed)
}

/// Eigenspaces of a permutation matrix on the whole space: a cycle `k_0 → k_1 → …` of
/// length `L` (with `M e_k = e_{σ(k)}`) carries the eigenvector `Σ_t λ^{-t} e_{k_t}` for every
/// `λ` with `λ^L = 1`.
fn permutation_split(m: &Sparse, f: &Fp) -> Option<Vec<Space>> {
    let r = m.cols.len();
    let mut sigma = vec![0usize; r];
    for (k, col) in m.cols.iter().enumerate() {
        match col.as_slice() {
            [(j, 1)] => sigma[k] = *j,
            _ => return None,
        }
    }
    let mut seen = vec![false; r];
    let mut cycles = Vec::new();
    for k in 0..r {
        if !seen[k] {
            let mut c = vec![k];
            seen[k] = true;
            let mut j = sigma[k];
            while j != k {
                seen[j] = true;
                c.push(j);
                j = sigma[j];
            }
            cycles.push(c);
        }
    }
    let mut spaces = Vec::new();
    for lam in 1..f.0 {
        let lam_inv = f.inv(lam);
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for c in &cycles {
            if modp::pow(lam as u128, c.len() as u128, f.0 as u128) == 1 {
                let mut v = vec![0u64; r];
                let mut w = 1;
                for &k in c {
                    v[k] = w;
                    w = f.mul(w, lam_inv);
                }
                rows.push(v);
            }
        }
        if !rows.is_empty() {
            spaces.push(Space::new(rows, f));
        }
    }
    Some(spaces)
}

/// Class matrix `M_i` modulo `ℓ`.
fn class_matrix(g: &FiniteGroupTable, classes: &ConjugacyClasses, i: usize, l: u64) -> Sparse {
    let r = classes.len();
    let inv: Vec<u32> = classes.members[i].iter().map(|&x| g.inv(x)).collect();
    let cols = (0..r)
        .into_par_iter()
        .map(|k| {
            let mut col: BTreeMap<usize, u64> = BTreeMap::new();
            for &xi in &inv {
                *col.entry(classes.class_of[g.mul(xi, classes.reps[k]) as usize] as usize).or_insert(0) += 1;
            }
            col.into_iter().map(|(j, c)| (j, c % l)).filter(|&(_, c)| c != 0).collect()
        })
        .collect();
    Sparse { cols }
}

/// Irreducible characters modulo `ℓ`, with degrees recovered from `Σ_k ω_k ω_{k*}/|C_k|`.
pub fn character_degrees(g: &FiniteGroupTable, classes: &ConjugacyClasses, opts: &OracleOptions) -> Result<CharacterTable, OracleError> {
    let r = classes.len();
    if r > opts.max_classes {
        return Err(OracleError::CapExceeded { classes: r, cap: opts.max_classes });
    }
    let e = g.exponent();
    let l = dixon_modulus(g.order(), e).ok_or(OracleError::NoSuitableModulus)?;
    let f = Fp(l);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6469_786f);
    let mut done: Vec<Vec<u64>> = Vec::new();
    let identity: Vec<Vec<u64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as u64).collect()).collect();
    let mut pending = vec![Space { rows: identity, pivots: (0..r).collect() }];
    let mut order: Vec<usize> = (1..r).collect();
    order.sort_by_key(|&i| (classes.sizes[i], i));
    for &i in &order {
        if pending.is_empty() {
            break;
        }
        let m = class_matrix(g, classes, i, l);
        let whole = pending.len() == 1 && pending[0].rows.len() == r;
        let split = match whole.then(|| permutation_split(&m, &f)).flatten() {
            Some(s) => s,
            None => {
                let mut out = Vec::new();
                for space in pending {
                    out.extend(split_space(space, &m, &f, &mut rng)?);
                }
                out
            }
        };
        pending = Vec::new();
        for s in split {
            if s.rows.len() == 1 {
                done.extend(s.rows);
            } else {
                pending.push(s);
            }
        }
    }
    if !pending.is_empty() || done.len() != r {
        return Err(OracleError::SplitFailed);
    }
    let inverse_class: Vec<usize> = classes.reps.iter().map(|&x| classes.class_of[g.inv(x) as usize] as usize).collect();
    let size_inv: Vec<u64> = classes.sizes.iter().map(|&s| f.inv(s as u64 % l)).collect();
    let order_mod = g.order() as u64 % l;
    let max_degree = (g.order() as f64).sqrt() as u64 + 1;
    let mut rows: Vec<(u64, Vec<u32>)> = Vec::with_capacity(r);
    for w in done {
        let w0 = f.inv(w[0]);
        let omega: Vec<u64> = w.iter().map(|&x| f.mul(x, w0)).collect();
        let s = (0..r).fold(0, |acc, k| (acc + f.mul(f.mul(omega[k], omega[inverse_class[k]]), size_inv[k])) % l);
        if s == 0 {
            return Err(OracleError::SplitFailed);
        }
        let target = f.mul(order_mod, f.inv(s));
        let degree = (1..=max_degree)
            .find(|&d| d * d % l == target && (g.order() as u64).is_multiple_of(d))
            .ok_or(OracleError::SplitFailed)?;
        let values = (0..r).map(|k| f.mul(f.mul(omega[k], degree % l), size_inv[k]) as u32).collect();
        rows.push((degree, values));
    }
    rows.sort();
    let table = CharacterTable {
        modulus: l,
        exponent: e,
        order: g.order(),
        class_sizes: classes.sizes.clone(),
        inverse_class,
        degrees: rows.iter().map(|r| r.0).collect(),
        values: rows.into_iter().map(|r| r.1).collect(),
    };
    verify_table(&table, g.order() / derived_subgroup_order(g, classes))?;
    Ok(table)
}

/// `Σ d² = |G|`, row count, linear count `|G/G'|`, and both orthogonality relations mod `ℓ`.
fn verify_table(t: &CharacterTable, abelianization: usize) -> Result<(), OracleError> {
    let r = t.class_sizes.len();
    let l = t.modulus;
    let fail = |what: &str| Err(OracleError::AxiomViolated(format!("character table: {what}")));
    if t.degrees.iter().map(|&d| (d * d) as usize).sum::<usize>() != t.order {
        return fail("sum of squared degrees differs from |G|");
    }
    if t.degrees.len() != r {
        return fail("row count differs from class count");
    }
    if t.linear_count() != abelianization {
        return fail("linear character count differs from |G/G'|");
    }
    let ord = t.order as u64 % l;
    let rows_ok = (0..r).into_par_iter().all(|a| {
        (0..r).all(|b| {
            let s = (0..r).fold(0u64, |acc, k| {
                (acc + (t.class_sizes[k] as u64 % l) * t.values[a][k] as u64 % l * t.values[b][t.inverse_class[k]] as u64) % l
            });
            s == if a == b { ord } else { 0 }
        })
    });
    if !rows_ok {
        return fail("row orthogonality");
    }
    let cols_ok = (0..r).into_par_iter().all(|k| {
        (0..r).all(|m| {
            let s = (0..r).fold(0u64, |acc, c| (acc + t.values[c][k] as u64 * t.values[c][t.inverse_class[m]] as u64) % l);
            let expect = if k == m { ord * modp::inv((t.class_sizes[k] as u64 % l) as u128, l as u128) as u64 % l } else { 0 };
            s == expect
        })
    });
    if !cols_ok {
        return fail("column orthogonality");
    }
    Ok(())
}

/// Orbits of the linear characters acting by pointwise product, counted by degree.
pub fn twist_isoclass_counts(t: &CharacterTable) -> BTreeMap<u64, usize> {
    let l = t.modulus;
    let index: HashMap<&[u32], usize> = t.values.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
    let linear: Vec<usize> = (0..t.degrees.len()).filter(|&i| t.degrees[i] == 1).collect();
    let mut seen = vec![false; t.degrees.len()];
    let mut counts = BTreeMap::new();
    for chi in 0..t.degrees.len() {
        if seen[chi] {
            continue;
        }
        *counts.entry(t.degrees[chi]).or_insert(0) += 1;
        for &lam in &linear {
            let prod: Vec<u32> = t.values[chi].iter().zip(&t.values[lam]).map(|(&a, &b)| (a as u64 * b as u64 % l) as u32).collect();
            if let Some(&j) = index.get(prod.as_slice()) {
                seen[j] = true;
            }
        }
    }
    counts
}
