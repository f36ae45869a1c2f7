#![allow(dead_code)]

use nilzeta::lattice::{self, LieLattice};
use nilzeta::localring::{Elem, LocalRingSpec, Ring};
use nilzeta::poincare::{self, PrimePolicy, ZetaOptions};
use rand::Rng;

pub fn corpus(name: &str) -> LieLattice {
    let path = format!("{}/corpus/{name}.json", env!("CARGO_MANIFEST_DIR"));
    LieLattice::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn heis() -> LieLattice {
    corpus("heisenberg")
}

/// Corpus lattices with a prime at which each is enumerated.
pub fn corpus_cases() -> Vec<(LieLattice, u64)> {
    vec![
        (corpus("heisenberg"), 3),
        (corpus("heisenberg_plus_abelian"), 3),
        (corpus("free_class2_3gen"), 3),
        (corpus("filiform_class3"), 5),
    ]
}

pub fn series(lat: &LieLattice, spec: &LocalRingSpec, n_max: usize, policy: PrimePolicy) -> Vec<u128> {
    let opts = ZetaOptions { policy, ..Default::default() };
    poincare::local_zeta(lat, spec, n_max, opts).unwrap().coeffs_u128()
}

pub fn series_to_level(lat: &LieLattice, spec: &LocalRingSpec, n_max: usize, level_max: u32) -> Vec<u128> {
    let opts = ZetaOptions { policy: PrimePolicy::Local, level_max: Some(level_max), ..Default::default() };
    poincare::local_zeta(lat, spec, n_max, opts).unwrap().coeffs_u128()
}

/// Whether the unit-orbit reduction agrees with full enumeration at levels `1..=levels`.
pub fn orbit_reduction_agrees(lat: &LieLattice, spec: &LocalRingSpec, levels: u32) -> bool {
    let basis = lattice::adapt_basis(lat, spec.p);
    (1..=levels).all(|n| {
        let ring = Ring::new(&spec.with_level(n)).unwrap();
        poincare::count_types(&basis, &ring).unwrap() == poincare::count_types_full(&basis, &ring).unwrap()
    })
}

fn mat_mul(ring: &Ring, a: &[Vec<Elem>], b: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(ring.zero(), |acc, k| ring.add(acc, ring.mul(row[k], b[k][j]))))
                .collect()
        })
        .collect()
}

pub fn random_elem(ring: &Ring, rng: &mut impl Rng) -> Elem {
    ring.element(rng.gen_range(0..ring.size()))
}

fn random_unit(ring: &Ring, rng: &mut impl Rng) -> Elem {
    loop {
        let u = random_elem(ring, rng);
        if ring.is_unit(u) {
            return u;
        }
    }
}

/// `L·D·U` with unit diagonal `D` and random unitriangular `L`, `U`, then a random
/// row permutation.
pub fn random_invertible(ring: &Ring, n: usize, rng: &mut impl Rng) -> Vec<Vec<Elem>> {
    let tri = |upper: bool, rng: &mut dyn rand::RngCore| -> Vec<Vec<Elem>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i == j, upper == (j > i)) {
                        (true, _) => ring.one(),
                        (false, true) => ring.element(rng.gen_range(0..ring.size())),
                        (false, false) => ring.zero(),
                    })
                    .collect()
            })
            .collect()
    };
    let l = tri(false, rng);
    let mut u = tri(true, rng);
    for row in u.iter_mut() {
        let d = random_unit(ring, rng);
        for x in row.iter_mut() {
            *x = ring.mul(d, *x);
        }
    }
    let mut m = mat_mul(ring, &l, &u);
    for i in (1..n).rev() {
        m.swap(i, rng.gen_range(0..=i));
    }
    m
}

/// Number of transforms `U M V` whose elementary-divisor type differs from that of `M`.
pub fn snf_type_changes(ring: &Ring, m: &[Vec<Elem>], transforms: usize, rng: &mut impl Rng) -> usize {
    let t = ring.elementary_divisor_type(m);
    let (rows, cols) = (m.len(), m[0].len());
    (0..transforms)
        .filter(|_| {
            let u = random_invertible(ring, rows, rng);
            let v = random_invertible(ring, cols, rng);
            ring.elementary_divisor_type(&mat_mul(ring, &mat_mul(ring, &u, m), &v)) != t
        })
        .count()
}

/// `m` random matrix of the given shape with entries scaled by random powers of `π`.
pub fn random_matrix(ring: &Ring, rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<Vec<Elem>> {
    let pi = ring.pi();
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    let k = rng.gen_range(0..=ring.level() as u64);
                    ring.mul(random_elem(ring, rng), ring.pow(pi, k))
                })
                .collect()
        })
        .collect()
}

/// `R̃_{q^n}(H) ≤ q^a·R̃_{q^{a+n}}(G)` for `H = rescale(Λ, 1, p)`, `a = f·h`, `n ≤ n_max`.
/// Returns the violating `n`, if any.
pub fn commensurability_violation(lat: &LieLattice, spec: &LocalRingSpec, n_max: usize) -> Option<usize> {
    let a = spec.f as usize * lat.rank();
    let g = series(lat, spec, a + n_max, PrimePolicy::Local);
    let h = series(&lat.rescale(1, spec.p), spec, n_max, PrimePolicy::Local);
    let cum = |c: &[u128], n: usize| c[..=n].iter().sum::<u128>();
    let qa = (spec.q() as u128).pow(a as u32);
    (0..=n_max).find(|&n| cum(&h, n) > qa * cum(&g, a + n))
}
