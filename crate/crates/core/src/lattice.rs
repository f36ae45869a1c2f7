//! Nilpotent Lie lattices over the integers.
//!
//! A [`LieLattice`] is `Z^h` with an integral, antisymmetric bracket satisfying
//! the Jacobi identity. Validation computes the lower central series, the
//! nilpotency class `c` and enforces `c >= 2` together with the divisibility
//! hypothesis `Λ' ⊆ c!Λ` for `c > 2`.
//!
//! [`adapt_basis`] constructs the bases `e`, `f` of the representation-theoretic
//! set-up: `e` is a Z-basis of `Λ` refining the flag
//! `ι(Λ'∩z) ⊆ z ⊆ ι(Λ'+z) ⊆ Λ`, and `f` is a Z-basis of `Λ'` whose elements sit
//! over elementary-divisor multiples of `e`. The construction is global (over
//! Z), so only the `b`-vector depends on the prime.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zmat::{self, IVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("rank must be positive")]
    ZeroRank,
    #[error("bracket index ({i}, {j}) out of range for rank {rank}")]
    IndexOutOfRange { i: usize, j: usize, rank: usize },
    #[error("bracket ({i}, {j}) has {len} coordinates, expected {rank}")]
    BadLength { i: usize, j: usize, len: usize, rank: usize },
    #[error("bracket [e{i}, e{i}] must vanish")]
    NonzeroDiagonal { i: usize },
    #[error("bracket ({i}, {j}) given twice with conflicting values")]
    ConflictingBracket { i: usize, j: usize },
    #[error("Jacobi identity fails for (e{}, e{}, e{}): residue {residue:?}", .triple.0, .triple.1, .triple.2)]
    JacobiViolation { triple: (usize, usize, usize), residue: Vec<i64> },
    #[error("lower central series stabilises at rank {stable_rank}: not nilpotent")]
    NotNilpotent { stable_rank: usize },
    #[error("nilpotency class {class} < 2 (abelian lattices are excluded)")]
    ClassTooSmall { class: usize },
    #[error("class {class} > 2 requires brackets in {factorial}Λ; [e{i}, e{j}] has coordinate {value} at e{l}")]
    ClassHypothesisViolation { class: usize, factorial: i64, i: usize, j: usize, l: usize, value: i64 },
    #[error("structure constant overflow")]
    Overflow,
}

/// Lattice input file: `{"name": …, "rank": h, "brackets": [[i, j, [c_1..c_h]], …]}`,
/// 1-based indices, omitted brackets are zero.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawLattice {
    #[serde(default)]
    pub name: Option<String>,
    pub rank: usize,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, Vec<i64>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieLattice {
    name: Option<String>,
    rank: usize,
    // table[(i * h + j) * h + l] = coordinate l of [e_i, e_j]
    table: Vec<i64>,
    class: usize,
    lcs_ranks: Vec<usize>,
}

impl LieLattice {
    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Hirsch rank `h`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Nilpotency class `c`.
    pub fn class(&self) -> usize {
        self.class
    }

    /// Ranks of `γ_1 = Λ, γ_2 = Λ', …` down to the first zero term.
    pub fn lower_central_ranks(&self) -> &[usize] {
        &self.lcs_ranks
    }

    /// Coordinates of `[e_i, e_j]` (0-based).
    pub fn bracket(&self, i: usize, j: usize) -> &[i64] {
        let h = self.rank;
        &self.table[(i * h + j) * h..(i * h + j + 1) * h]
    }

    pub fn bracket_vectors(&self, x: &[i128], y: &[i128]) -> IVec {
        bracket_with(&self.table, self.rank, x, y)
    }

    /// Lattice spanned by `p^m · e`, i.e. structure constants scaled by `p^m`.
    pub fn rescale(&self, m: u32, p: u64) -> LieLattice {
        let factor = (p as i64).pow(m);
        let table: Vec<i64> = self.table.iter().map(|&x| x * factor).collect();
        LieLattice {
            name: self.name.as_ref().map(|n| if m == 0 { n.clone() } else { format!("{n}[{p}^{m}]") }),
            rank: self.rank,
            table,
            class: self.class,
            lcs_ranks: self.lcs_ranks.clone(),
        }
    }

    /// The abelian lattice `Z^m`. Rejected by [`validate`]; useful for finite-group checks.
    pub fn abelian(m: usize) -> LieLattice {
        LieLattice { name: Some(format!("Z^{m}")), rank: m, table: vec![0; m * m * m], class: 1, lcs_ranks: vec![m] }
    }

    /// Direct sum with the abelian lattice `Z^m`.
    pub fn plus_abelian(&self, m: usize) -> LieLattice {
        let h = self.rank;
        let nh = h + m;
        let mut table = vec![0i64; nh * nh * nh];
        for i in 0..h {
            for j in 0..h {
                for l in 0..h {
                    table[(i * nh + j) * nh + l] = self.table[(i * h + j) * h + l];
                }
            }
        }
        let mut lcs = self.lcs_ranks.clone();
        if let Some(first) = lcs.first_mut() {
            *first += m;
        }
        LieLattice {
            name: self.name.as_ref().map(|n| format!("{n}+Z^{m}")),
            rank: nh,
            table,
            class: self.class,
            lcs_ranks: lcs,
        }
    }

    pub fn to_raw(&self) -> RawLattice {
        let h = self.rank;
        let mut brackets = Vec::new();
        for i in 0..h {
            for j in i + 1..h {
                let v = self.bracket(i, j);
                if v.iter().any(|&x| x != 0) {
                    brackets.push((i + 1, j + 1, v.to_vec()));
                }
            }
        }
        RawLattice { name: self.name.clone(), rank: h, brackets }
    }

    pub fn from_json(text: &str) -> Result<LieLattice, crate::Error> {
        let raw: RawLattice = serde_json::from_str(text)?;
        Ok(validate(&raw)?)
    }

    /// Generators of `Λ'` in HNF.
    pub fn derived(&self) -> Vec<IVec> {
        let h = self.rank;
        let mut gens = Vec::new();
        for i in 0..h {
            for j in i + 1..h {
                gens.push(self.bracket(i, j).iter().map(|&x| x as i128).collect());
            }
        }
        zmat::row_hnf(&gens, h)
    }

    /// Z-basis of the centre.
    pub fn centre(&self) -> Vec<IVec> {
        let h = self.rank;
        // x ∈ z iff Σ_i x_i [e_i, e_j]_l = 0 for all j, l
        let mut rows = Vec::new();
        for j in 0..h {
            for l in 0..h {
                rows.push((0..h).map(|i| self.bracket(i, j)[l] as i128).collect::<IVec>());
            }
        }
        zmat::kernel(&rows, h)
    }
}

fn bracket_with(table: &[i64], h: usize, x: &[i128], y: &[i128]) -> IVec {
    let mut out = vec![0i128; h];
    for i in 0..h {
        if x[i] == 0 {
            continue;
        }
        for j in 0..h {
            if y[j] == 0 || i == j {
                continue;
            }
            let base = (i * h + j) * h;
            for l in 0..h {
                let c = table[base + l];
                if c != 0 {
                    out[l] += x[i] * y[j] * c as i128;
                }
            }
        }
    }
    out
}

fn unit(h: usize, i: usize) -> IVec {
    let mut v = vec![0i128; h];
    v[i] = 1;
    v
}

/// Validates a raw structure tensor.
pub fn validate(raw: &RawLattice) -> Result<LieLattice, LatticeError> {
    let h = raw.rank;
    if h == 0 {
        return Err(LatticeError::ZeroRank);
    }
    let mut table = vec![0i64; h * h * h];
    let mut seen: BTreeMap<(usize, usize), Vec<i64>> = BTreeMap::new();
    for (i1, j1, coords) in &raw.brackets {
        let (i1, j1) = (*i1, *j1);
        if i1 == 0 || j1 == 0 || i1 > h || j1 > h {
            return Err(LatticeError::IndexOutOfRange { i: i1, j: j1, rank: h });
        }
        if coords.len() != h {
            return Err(LatticeError::BadLength { i: i1, j: j1, len: coords.len(), rank: h });
        }
        let (i, j) = (i1 - 1, j1 - 1);
        if i == j {
            if coords.iter().any(|&x| x != 0) {
                return Err(LatticeError::NonzeroDiagonal { i: i1 });
            }
            continue;
        }
        let (lo, hi, v): (usize, usize, Vec<i64>) = if i < j {
            (i, j, coords.clone())
        } else {
            (j, i, coords.iter().map(|&x| -x).collect())
        };
        if let Some(prev) = seen.get(&(lo, hi)) {
            if *prev != v {
                return Err(LatticeError::ConflictingBracket { i: lo + 1, j: hi + 1 });
            }
        }
        for l in 0..h {
            table[(lo * h + hi) * h + l] = v[l];
            table[(hi * h + lo) * h + l] = -v[l];
        }
        seen.insert((lo, hi), v);
    }

    // Jacobi on basis triples
    for i in 0..h {
        for j in i + 1..h {
            for k in j + 1..h {
                let (ei, ej, ek) = (unit(h, i), unit(h, j), unit(h, k));
                let t1 = bracket_with(&table, h, &ei, &bracket_with(&table, h, &ej, &ek));
                let t2 = bracket_with(&table, h, &ej, &bracket_with(&table, h, &ek, &ei));
                let t3 = bracket_with(&table, h, &ek, &bracket_with(&table, h, &ei, &ej));
                let res: Vec<i128> = (0..h).map(|l| t1[l] + t2[l] + t3[l]).collect();
                if res.iter().any(|&x| x != 0) {
                    return Err(LatticeError::JacobiViolation {
                        triple: (i + 1, j + 1, k + 1),
                        residue: res.iter().map(|&x| x as i64).collect(),
                    });
                }
            }
        }
    }

    // lower central series γ_{k+1} = [Λ, γ_k]
    let mut gamma: Vec<IVec> = zmat::identity(h);
    let mut ranks = vec![h];
    loop {
        let mut gens = Vec::new();
        for a in 0..h {
            let ea = unit(h, a);
            for g in &gamma {
                gens.push(bracket_with(&table, h, &ea, g));
            }
        }
        let next = zmat::row_hnf(&gens, h);
        if next.is_empty() {
            break;
        }
        if next.len() == gamma.len() {
            return Err(LatticeError::NotNilpotent { stable_rank: next.len() });
        }
        ranks.push(next.len());
        gamma = next;
    }
    let class = ranks.len();
    if class < 2 {
        return Err(LatticeError::ClassTooSmall { class });
    }
    if class > 2 {
        let factorial: i64 = (1..=class as i64).product();
        for i in 0..h {
            for j in i + 1..h {
                for l in 0..h {
                    let v = table[(i * h + j) * h + l];
                    if v % factorial != 0 {
                        return Err(LatticeError::ClassHypothesisViolation {
                            class,
                            factorial,
                            i: i + 1,
                            j: j + 1,
                            l: l + 1,
                            value: v,
                        });
                    }
                }
            }
        }
    }
    Ok(LieLattice { name: raw.name.clone(), rank: h, table, class, lcs_ranks: ranks })
}

/// Matrix of integral linear forms in `Y_1..Y_nvars`; entry `(i, j)` is `coeffs[(i*cols + j)*nvars ..]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormMatrix {
    pub rows: usize,
    pub cols: usize,
    pub nvars: usize,
    pub coeffs: Vec<i64>,
}

impl LinearFormMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &[i64] {
        let base = (i * self.cols + j) * self.nvars;
        &self.coeffs[base..base + self.nvars]
    }

    pub fn eval_int(&self, y: &[i128]) -> Vec<Vec<i128>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.entry(i, j).iter().zip(y).map(|(&c, &v)| c as i128 * v).sum())
                    .collect()
            })
            .collect()
    }

    /// Columns `from..cols`.
    pub fn column_block(&self, from: usize) -> LinearFormMatrix {
        let cols = self.cols - from;
        let mut coeffs = Vec::with_capacity(self.rows * cols * self.nvars);
        for i in 0..self.rows {
            for j in from..self.cols {
                coeffs.extend_from_slice(self.entry(i, j));
            }
        }
        LinearFormMatrix { rows: self.rows, cols, nvars: self.nvars, coeffs }
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    self.entry(i, j).iter().zip(self.entry(j, i)).all(|(a, b)| *a == -*b)
                })
            })
    }
}

/// Prime-independent part of the adapted basis construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalBasis {
    pub h: usize,
    pub d: usize,
    pub k: usize,
    pub r: usize,
    /// Rows: `e_1..e_h` in ambient coordinates (unimodular).
    pub e: Vec<IVec>,
    /// Rows: `f_1..f_d` in ambient coordinates (a Z-basis of `Λ'`).
    pub f: Vec<IVec>,
    /// Elementary divisors attached to `f_1..f_d`.
    pub divisors: Vec<i128>,
    /// `|ι(Λ'):Λ'|`.
    pub isolator_index: BigInt,
    /// Whether every `f_j` is supported on `e_{r-k+1}..e_{r-k+d}`.
    pub f_supported: bool,
    pub commutator: LinearFormMatrix,
}

/// Adapted basis data at a prime `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub p: u64,
    pub class: usize,
    pub global: GlobalBasis,
    /// p-adic valuations of the elementary divisors.
    pub b: Vec<u32>,
}

impl AdaptedBasis {
    pub fn d(&self) -> usize {
        self.global.d
    }
    pub fn k(&self) -> usize {
        self.global.k
    }
    pub fn r(&self) -> usize {
        self.global.r
    }
    pub fn h(&self) -> usize {
        self.global.h
    }

    /// Commutator matrix `R(Y)` (r × r).
    pub fn commutator_matrix(&self) -> &LinearFormMatrix {
        &self.global.commutator
    }

    /// `S(Y)`: the last `k` columns of `R(Y)`.
    pub fn s_matrix(&self) -> LinearFormMatrix {
        let r = self.global.r;
        self.global.commutator.column_block(r - self.global.k)
    }

    /// Product of `|ι(Λ'):Λ'|` and all elementary divisors; primes dividing it are
    /// outside the range where the global basis reduces to a local one with `b = 0`.
    pub fn exclusion_index(&self) -> BigInt {
        let mut idx = self.global.isolator_index.clone();
        for d in &self.global.divisors {
            idx *= BigInt::from(*d);
        }
        idx
    }

    pub fn is_excluded(&self) -> bool {
        (self.exclusion_index() % BigInt::from(self.p)).is_zero()
    }
}

fn vp(mut x: i128, p: u64) -> u32 {
    let p = p as i128;
    x = x.abs();
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Builds the prime-independent bases `e`, `f` and the commutator matrix.
pub fn global_basis(lat: &LieLattice) -> GlobalBasis {
    let h = lat.rank();
    let derived = lat.derived();
    let d = derived.len();
    let centre = lat.centre();
    let zr = centre.len();
    let r = h - zr;

    // Λ' ∩ z: combinations c·F with (c·F)·y = 0 for y ⟂ z
    let orth_z = zmat::kernel(&centre, h);
    let meet: Vec<IVec> = if orth_z.is_empty() {
        derived.clone()
    } else {
        let rows: Vec<IVec> = orth_z
            .iter()
            .map(|y| derived.iter().map(|f| f.iter().zip(y).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let cs = zmat::kernel(&rows, d);
        zmat::row_hnf(&cs.iter().map(|c| zmat::vec_mat(c, &derived, h)).collect::<Vec<_>>(), h)
    };
    let meet_rank = meet.len();
    let k = d - meet_rank;

    // ι(Λ'∩z) with an SNF-adapted basis u_i and divisors d_i (meet = span d_i u_i)
    let iso_meet = zmat::saturate(&meet, h);
    let (iso_meet_basis, meet_divs, meet_f) = snf_adapt(&iso_meet, &meet, h);

    // extend ι(Λ'∩z) to a basis of z
    let z_coords: Vec<IVec> = iso_meet_basis
        .iter()
        .map(|v| zmat::solve_integral(&centre, v).expect("isolator of Λ'∩z lies in z"))
        .collect();
    let z_ext_coords = zmat::complete_basis(&z_coords, zr);
    let z_ext: Vec<IVec> = z_ext_coords.iter().map(|c| zmat::vec_mat(c, &centre, h)).collect();
    let mut z_basis = iso_meet_basis.clone();
    z_basis.extend(z_ext.iter().cloned());

    // ι(Λ'+z) and an extension w of the z-basis to it
    let mut plus = derived.clone();
    plus.extend(centre.iter().cloned());
    let iso_plus = zmat::saturate(&plus, h);
    let zc_in_plus: Vec<IVec> = z_basis
        .iter()
        .map(|v| zmat::solve_integral(&iso_plus, v).expect("z ⊆ ι(Λ'+z)"))
        .collect();
    let w_coords = zmat::complete_basis(&zc_in_plus, iso_plus.len());
    let w: Vec<IVec> = w_coords.iter().map(|c| zmat::vec_mat(c, &iso_plus, h)).collect();
    debug_assert_eq!(w.len(), k);

    // image of Λ' in ι(Λ'+z)/z, in w-coordinates
    let mut zw = z_basis.clone();
    zw.extend(w.iter().cloned());
    let img: Vec<IVec> = derived
        .iter()
        .map(|f| {
            let c = zmat::solve_integral(&zw, f).expect("Λ' ⊆ ι(Λ'+z)");
            c[z_basis.len()..].to_vec()
        })
        .collect();
    let (u_img, img_divs, vinv_img) = if k > 0 {
        zmat::smith(&img, k)
    } else {
        (zmat::identity(d), Vec::new(), Vec::new())
    };
    let mut w_new: Vec<IVec> = vinv_img.iter().map(|c| zmat::vec_mat(c, &w, h)).collect();
    let uf: Vec<IVec> = u_img.iter().map(|c| zmat::vec_mat(c, &derived, h)).collect();
    let f_top: Vec<IVec> = uf[..k].to_vec();

    // try to choose lifts so that f_j - d_j w_j lies in ι(Λ'∩z)
    let mut f_supported = true;
    for j in 0..k {
        let dj = img_divs[j];
        let diff: IVec = (0..h).map(|l| f_top[j][l] - dj * w_new[j][l]).collect();
        let zc = zmat::solve_integral(&z_basis, &diff).expect("difference lies in z");
        let ext = &zc[iso_meet_basis.len()..];
        if ext.iter().all(|x| x % dj == 0) {
            let shift: IVec = ext.iter().map(|x| x / dj).collect();
            let s = zmat::vec_mat(&shift, &z_ext, h);
            for l in 0..h {
                w_new[j][l] += s[l];
            }
        } else {
            f_supported = false;
        }
    }

    // complement of ι(Λ'+z) in Λ
    let mut inner = w_new.clone();
    inner.extend(z_basis.iter().cloned());
    let outer = zmat::complete_basis(&zmat::row_hnf(&inner, h), h);
    // `complete_basis` needs a basis of the same span; use the HNF of `inner`'s span
    let mut e: Vec<IVec> = outer;
    e.extend(w_new.iter().cloned());
    e.extend(z_basis.iter().cloned());
    debug_assert_eq!(e.len(), h);

    let mut f = f_top.clone();
    f.extend(meet_f.iter().cloned());
    let mut divisors = img_divs.clone();
    divisors.extend(meet_divs.iter().cloned());

    // structure constants [e_i, e_j] = Σ λ_ij^l f_l, i, j < r
    let mut coeffs = vec![0i64; r * r * d];
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let br = lat.bracket_vectors(&e[i], &e[j]);
            let lam = zmat::solve_integral(&f, &br).expect("brackets lie in Λ' = span f");
            for l in 0..d {
                coeffs[(i * r + j) * d + l] = lam[l] as i64;
            }
        }
    }
    let commutator = LinearFormMatrix { rows: r, cols: r, nvars: d, coeffs };

    // f supported on e_{r-k+1}..e_{r-k+d}
    if f_supported {
        for fv in &f {
            let c = zmat::solve_integral(&e, fv).expect("e is a basis");
            if c.iter().enumerate().any(|(i, &x)| x != 0 && (i < r - k || i >= r - k + d)) {
                f_supported = false;
            }
        }
    }

    let iso_derived = zmat::saturate(&derived, h);
    let isolator_index = if d == 0 {
        BigInt::one()
    } else {
        let coords: Vec<IVec> = derived
            .iter()
            .map(|v| zmat::solve_integral(&iso_derived, v).expect("Λ' ⊆ ι(Λ')"))
            .collect();
        zmat::abs_det(&coords)
    };

    GlobalBasis { h, d, k, r, e, f, divisors, isolator_index, f_supported, commutator }
}

/// SNF-adapts `sub ⊆ iso` (iso saturated): returns a basis `u` of `iso`, divisors `d`,
/// and the basis `d_i u_i` of `sub`.
fn snf_adapt(iso: &[IVec], sub: &[IVec], h: usize) -> (Vec<IVec>, Vec<i128>, Vec<IVec>) {
    if iso.is_empty() {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    let s = iso.len();
    let coords: Vec<IVec> = sub
        .iter()
        .map(|v| zmat::solve_integral(iso, v).expect("sub ⊆ iso"))
        .collect();
    let (_, divs, vinv) = zmat::smith(&coords, s);
    let basis: Vec<IVec> = vinv.iter().map(|c| zmat::vec_mat(c, iso, h)).collect();
    let sub_basis: Vec<IVec> = basis
        .iter()
        .zip(&divs)
        .map(|(u, &dv)| u.iter().map(|x| x * dv).collect())
        .collect();
    (basis, divs, sub_basis)
}

/// Adapted basis data at the prime `p`.
pub fn adapt_basis(lat: &LieLattice, p: u64) -> AdaptedBasis {
    let global = global_basis(lat);
    with_prime(lat, global, p)
}

/// Attaches the `b`-vector for `p` to a precomputed global basis.
pub fn with_prime(lat: &LieLattice, global: GlobalBasis, p: u64) -> AdaptedBasis {
    let b = global.divisors.iter().map(|&x| vp(x, p)).collect();
    AdaptedBasis { p, class: lat.class(), global, b }
}

/// Generic ranks `(2u, v)` of `R(Y)` and `S(Y)` over the field of rational functions.
pub fn generic_ranks(basis: &AdaptedBasis) -> (usize, usize) {
    let r_rank = symbolic_rank(basis.commutator_matrix());
    let v = if basis.k() == 0 { 0 } else { symbolic_rank(&basis.s_matrix()) };
    (r_rank, v)
}

/// Exact rank of a matrix of linear forms over `Q(Y_1..Y_n)`.
///
/// Kronecker substitution `Y_i ↦ T^{(D+1)^{i-1}}` with `D` the matrix size is injective on
/// polynomials of degree `≤ D` in each variable, hence preserves the vanishing of every minor;
/// the rank is then computed by fraction-free elimination over `Z[T]`.
pub fn symbolic_rank(m: &LinearFormMatrix) -> usize {
    let bound = m.rows.max(m.cols) as u64 + 1;
    if let Some(fast) = random_rank_full(m) {
        return fast;
    }
    let exps: Vec<usize> = (0..m.nvars).map(|i| bound.pow(i as u32) as usize).collect();
    let mut a: Vec<Vec<Vec<BigInt>>> = (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| {
                    let mut poly = vec![BigInt::zero(); exps.last().copied().unwrap_or(0) + 1];
                    for (l, &c) in m.entry(i, j).iter().enumerate() {
                        poly[exps[l]] += BigInt::from(c);
                    }
                    trim(poly)
                })
                .collect()
        })
        .collect();
    bareiss_rank(&mut a)
}

// Evaluation at a pseudo-random point modulo a large prime; returns the rank only when it
// is already maximal (a lower bound cannot certify anything smaller).
fn random_rank_full(m: &LinearFormMatrix) -> Option<usize> {
    const P: u128 = 2_305_843_009_213_693_951; // 2^61 - 1
    let y: Vec<u128> = (0..m.nvars).map(|i| (0x9E37_79B9_7F4A_7C15u128 * (i as u128 + 3)) % P).collect();
    let mut a: Vec<Vec<u128>> = (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| {
                    m.entry(i, j).iter().zip(&y).fold(0u128, |acc, (&c, &v)| {
                        let c = if c >= 0 { c as u128 % P } else { P - ((-c) as u128 % P) };
                        (acc + c * v % P) % P
                    })
                })
                .collect()
        })
        .collect();
    let rank = crate::modp::rank_mod(&mut a, P);
    if rank == m.rows.min(m.cols) {
        Some(rank)
    } else {
        None
    }
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn pmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn psub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            x - y
        })
        .collect();
    trim(out)
}

// exact division in Z[T]
fn pdiv_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigInt::zero(); a.len() - db];
    while rem.len() > db && !rem.is_empty() {
        let k = rem.len() - 1 - db;
        let c = rem.last().unwrap() / &lead;
        debug_assert!((rem.last().unwrap() % &lead).is_zero());
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] -= &c * bi;
        }
        q[k] = c;
        rem = trim(rem);
    }
    debug_assert!(rem.is_empty());
    trim(q)
}

fn bareiss_rank(a: &mut [Vec<Vec<BigInt>>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev: Vec<BigInt> = vec![BigInt::one()];
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !a[i][col].is_empty()) else { continue };
        a.swap(rank, piv);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let t = psub(&pmul(&a[rank][col], &a[i][j]), &pmul(&a[i][col], &a[rank][j]));
                a[i][j] = pdiv_exact(&t, &prev);
            }
            a[i][col] = Vec::new();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    let _ = prev.iter().any(|c| c.is_negative());
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn heisenberg() -> LieLattice {
        validate(&RawLattice { name: Some("heisenberg".into()), rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] })
            .unwrap()
    }

    fn free_class2_3gen() -> LieLattice {
        validate(&RawLattice {
            name: None,
            rank: 6,
            brackets: vec![
                (1, 2, vec![0, 0, 0, 1, 0, 0]),
                (1, 3, vec![0, 0, 0, 0, 1, 0]),
                (2, 3, vec![0, 0, 0, 0, 0, 1]),
            ],
        })
        .unwrap()
    }

    fn filiform6() -> LieLattice {
        validate(&RawLattice {
            name: None,
            rank: 4,
            brackets: vec![(1, 2, vec![0, 0, 6, 0]), (1, 3, vec![0, 0, 0, 6])],
        })
        .unwrap()
    }

    #[test]
    fn heisenberg_validates_with_class_two() {
        let h = heisenberg();
        assert_eq!(h.class(), 2);
        assert_eq!(h.rank(), 3);
    }

    #[test]
    fn sl2_like_tensor_is_rejected() {
        let raw = RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1]), (1, 3, vec![0, 1, 0])] };
        match validate(&raw) {
            Err(LatticeError::NotNilpotent { .. }) | Err(LatticeError::JacobiViolation { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jacobi_violation_has_witness() {
        // [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1 fails Jacobi
        let raw = RawLattice {
            name: None,
            rank: 3,
            brackets: vec![(1, 2, vec![0, 0, 1]), (2, 3, vec![1, 0, 0]), (1, 3, vec![1, 0, 0])],
        };
        assert!(matches!(validate(&raw), Err(LatticeError::JacobiViolation { triple: (1, 2, 3), .. })));
    }

    #[test]
    fn abelian_is_rejected() {
        let raw = RawLattice { name: None, rank: 2, brackets: vec![] };
        assert_eq!(validate(&raw), Err(LatticeError::ClassTooSmall { class: 1 }));
    }

    #[test]
    fn class_three_needs_factorial_divisibility() {
        let raw = RawLattice {
            name: None,
            rank: 4,
            brackets: vec![(1, 2, vec![0, 0, 1, 0]), (1, 3, vec![0, 0, 0, 1])],
        };
        assert!(matches!(validate(&raw), Err(LatticeError::ClassHypothesisViolation { class: 3, .. })));
        assert_eq!(filiform6().class(), 3);
    }

    #[test]
    fn heisenberg_adapted_basis() {
        let b = adapt_basis(&heisenberg(), 3);
        assert_eq!((b.d(), b.k(), b.r()), (1, 0, 2));
        assert_eq!(b.b, vec![0]);
        let r = b.commutator_matrix();
        assert_eq!(r.entry(0, 0), &[0]);
        assert_eq!(r.entry(1, 1), &[0]);
        assert_eq!(r.entry(0, 1)[0].abs(), 1);
        assert_eq!(r.entry(1, 0)[0], -r.entry(0, 1)[0]);
    }

    #[test]
    fn abelian_summand_only_enlarges_centre() {
        let b = adapt_basis(&heisenberg().plus_abelian(1), 3);
        assert_eq!((b.d(), b.k(), b.r()), (1, 0, 2));
    }

    #[test]
    fn ranks_do_not_depend_on_prime() {
        for lat in [heisenberg(), free_class2_3gen(), filiform6()] {
            let b2 = adapt_basis(&lat, 2);
            let b3 = adapt_basis(&lat, 3);
            assert_eq!((b2.d(), b2.k(), b2.r()), (b3.d(), b3.k(), b3.r()));
        }
    }

    #[test]
    fn filiform_has_nontrivial_s_block() {
        let lat = filiform6();
        let b = adapt_basis(&lat, 2);
        assert_eq!((b.d(), b.k(), b.r()), (2, 1, 3));
        assert_eq!(b.b, vec![1, 1]);
        assert_eq!(adapt_basis(&lat, 5).b, vec![0, 0]);
        assert!(b.is_excluded());
        assert!(!adapt_basis(&lat, 5).is_excluded());
    }

    #[test]
    fn rescale_shifts_b_vector() {
        for lat in [heisenberg(), free_class2_3gen(), filiform6()] {
            for p in [2u64, 3, 5] {
                let base = adapt_basis(&lat, p).b;
                for m in 0..3 {
                    let shifted = adapt_basis(&lat.rescale(m, p), p).b;
                    let expect: Vec<u32> = base.iter().map(|x| x + m).collect();
                    assert_eq!(shifted, expect, "p={p} m={m}");
                }
            }
        }
    }

    #[test]
    fn rescale_composes() {
        let h = heisenberg();
        assert_eq!(h.rescale(0, 2), h);
        assert_eq!(h.rescale(1, 2).rescale(1, 2).bracket(0, 1), h.rescale(2, 2).bracket(0, 1));
        assert_eq!(h.rescale(1, 2).bracket(0, 1), &[0, 0, 2]);
    }

    #[test]
    fn generic_ranks_examples() {
        assert_eq!(generic_ranks(&adapt_basis(&heisenberg(), 3)), (2, 0));
        assert_eq!(generic_ranks(&adapt_basis(&heisenberg().plus_abelian(1), 3)), (2, 0));
        assert_eq!(generic_ranks(&adapt_basis(&free_class2_3gen(), 3)), (2, 0));
        assert_eq!(generic_ranks(&adapt_basis(&filiform6(), 5)), (2, 1));
    }

    #[test]
    fn generic_ranks_survive_rescaling() {
        for lat in [heisenberg(), free_class2_3gen(), filiform6()] {
            let base = generic_ranks(&adapt_basis(&lat, 3));
            assert_eq!(generic_ranks(&adapt_basis(&lat.rescale(2, 3), 3)), base);
        }
    }

    #[test]
    fn commutator_matrices_are_antisymmetric() {
        for lat in [heisenberg(), free_class2_3gen(), filiform6(), heisenberg().plus_abelian(2)] {
            let g = global_basis(&lat);
            assert!(g.commutator.is_antisymmetric());
            assert!(g.f_supported);
        }
    }
}
