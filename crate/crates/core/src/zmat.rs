//! Integer lattice utilities: Hermite and Smith normal forms, integer kernels,
//! isolators (saturations) and unimodular basis completion.
//!
//! Row vectors throughout. Entries are `i128`; the lattices handled here are
//! desk-scale (rank ≲ 12, small structure constants), so overflow would signal
//! a corrupt input rather than a legitimate computation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IVec = Vec<i128>;

fn is_zero(v: &[i128]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Row-style Hermite normal form of the Z-span of `rows`; zero rows are dropped.
///
/// Pivots are positive and entries above each pivot are reduced into `[0, pivot)`.
pub fn row_hnf(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    let mut m: Vec<IVec> = rows.iter().filter(|r| !is_zero(r)).cloned().collect();
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row >= m.len() {
            break;
        }
        loop {
            // smallest nonzero |entry| in this column at or below pivot_row
            let mut best: Option<usize> = None;
            for i in pivot_row..m.len() {
                if m[i][col] != 0 && best.is_none_or(|b| m[i][col].abs() < m[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..m.len() {
                if m[i][col] != 0 {
                    let qt = m[i][col].div_euclid(m[pivot_row][col]);
                    for j in 0..ncols {
                        m[i][j] -= qt * m[pivot_row][j];
                    }
                    if m[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col] == 0 {
            continue;
        }
        if m[pivot_row][col] < 0 {
            for x in m[pivot_row].iter_mut() {
                *x = -*x;
            }
        }
        let pv = m[pivot_row][col];
        for i in 0..pivot_row {
            let qt = m[i][col].div_euclid(pv);
            if qt != 0 {
                for j in 0..ncols {
                    m[i][j] -= qt * m[pivot_row][j];
                }
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m.retain(|r| !is_zero(r));
    m
}

/// Row reduction of `a` that also tracks the unimodular transform `u` (so `u * a_in = a_out`)
/// and its inverse. Returns the rank (number of leading nonzero rows).
fn echelon_with_transform(a: &mut [IVec], u: &mut [IVec], uinv: &mut [IVec]) -> usize {
    let nrows = a.len();
    let ncols = if nrows == 0 { 0 } else { a[0].len() };
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row >= nrows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..nrows {
                if a[i][col] != 0 && best.is_none_or(|b| a[i][col].abs() < a[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            if b != pivot_row {
                a.swap(pivot_row, b);
                u.swap(pivot_row, b);
                for row in uinv.iter_mut() {
                    row.swap(pivot_row, b);
                }
            }
            let mut done = true;
            for i in pivot_row + 1..nrows {
                if a[i][col] != 0 {
                    let qt = a[i][col].div_euclid(a[pivot_row][col]);
                    add_row_multiple(a, u, uinv, i, pivot_row, -qt);
                    if a[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[pivot_row][col] != 0 {
            pivot_row += 1;
        }
    }
    pivot_row
}

/// row_i += c * row_j on `a` and `u`; the matching inverse update on `uinv` is
/// column_j -= c * column_i.
fn add_row_multiple(a: &mut [IVec], u: &mut [IVec], uinv: &mut [IVec], i: usize, j: usize, c: i128) {
    if c == 0 {
        return;
    }
    for k in 0..a[i].len() {
        a[i][k] += c * a[j][k];
    }
    for k in 0..u[i].len() {
        u[i][k] += c * u[j][k];
    }
    for row in uinv.iter_mut() {
        row[j] -= c * row[i];
    }
}

pub fn identity(n: usize) -> Vec<IVec> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn transpose(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    (0..ncols).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Z-basis (in HNF) of `{x ∈ Z^ncols : r · x = 0 for every row r}`.
pub fn kernel(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    if rows.iter().all(|r| is_zero(r)) {
        return identity(ncols);
    }
    let mut at = transpose(rows, ncols);
    let mut u = identity(ncols);
    let mut uinv = identity(ncols);
    let rank = echelon_with_transform(&mut at, &mut u, &mut uinv);
    let ker: Vec<IVec> = u[rank..].to_vec();
    row_hnf(&ker, ncols)
}

/// Isolator of the span of `rows` in Z^ncols: the smallest saturated submodule containing it.
pub fn saturate(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    let orth = kernel(rows, ncols);
    if orth.is_empty() {
        return identity(ncols);
    }
    kernel(&orth, ncols)
}

/// Given a primitive (saturated) basis `c` of a rank-s submodule of Z^m, returns m - s
/// rows completing it to a unimodular basis of Z^m.
pub fn complete_basis(c: &[IVec], m: usize) -> Vec<IVec> {
    if c.is_empty() {
        return identity(m);
    }
    let mut ct = transpose(c, m);
    let mut u = identity(m);
    let mut uinv = identity(m);
    let s = echelon_with_transform(&mut ct, &mut u, &mut uinv);
    debug_assert_eq!(s, c.len());
    // columns s..m of uinv
    (s..m).map(|j| uinv.iter().map(|row| row[j]).collect()).collect()
}

/// Smith normal form with transforms: returns `(u, d, vinv)` such that
/// `u * c * v = diag(d)` where `c` is `nrows × ncols`. Divisors are positive, in
/// divisibility order, and only the nonzero ones are returned.
pub fn smith(c: &[IVec], ncols: usize) -> (Vec<IVec>, Vec<i128>, Vec<IVec>) {
    let nrows = c.len();
    let mut a: Vec<IVec> = c.to_vec();
    let mut u = identity(nrows);
    let mut uinv_unused = identity(nrows);
    let mut vinv = identity(ncols);
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot: smallest nonzero |entry| in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        if pi != t {
            a.swap(pi, t);
            u.swap(pi, t);
        }
        if pj != t {
            for row in a.iter_mut() {
                row.swap(pj, t);
            }
            vinv.swap(pj, t);
        }
        let mut clean = true;
        for i in t + 1..nrows {
            if a[i][t] != 0 {
                let qt = a[i][t].div_euclid(a[t][t]);
                add_row_multiple(&mut a, &mut u, &mut uinv_unused, i, t, -qt);
                if a[i][t] != 0 {
                    clean = false;
                }
            }
        }
        for j in t + 1..ncols {
            if a[t][j] != 0 {
                let qt = a[t][j].div_euclid(a[t][t]);
                // col_j -= qt * col_t  <=>  vinv: row_t += qt * row_j
                for row in a.iter_mut() {
                    row[j] -= qt * row[t];
                }
                for k in 0..ncols {
                    vinv[t][k] += qt * vinv[j][k];
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // divisibility: if some entry of the remaining block is not divisible by the pivot,
        // fold its row into the pivot row and redo this step.
        let pv = a[t][t];
        let mut fold: Option<usize> = None;
        'outer: for i in t + 1..nrows {
            for j in t + 1..ncols {
                if a[i][j] % pv != 0 {
                    fold = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = fold {
            add_row_multiple(&mut a, &mut u, &mut uinv_unused, t, i, 1);
            continue;
        }
        if pv < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let d: Vec<i128> = (0..t).map(|i| a[i][i]).collect();
    (u, d, vinv)
}

/// Solves `x · basis = target` over Q, returning `None` if `target` is not in the rational span.
pub fn solve_rational(basis: &[IVec], target: &[i128]) -> Option<Vec<BigRational>> {
    let s = basis.len();
    let n = target.len();
    // augmented system: columns are the unknowns x_1..x_s, rows are coordinates
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..s).map(|i| rat(basis[i][j])).collect();
            row.push(rat(target[j]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..s {
        let Some(pr) = (r..n).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for k in 0..=s {
                    let v = &m[r][k] * &f;
                    m[i][k] = &m[i][k] - v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[s].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); s];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = m[i][s].clone();
    }
    Some(x)
}

/// Integer solution of `x · basis = target`, or `None` if none exists (basis assumed independent).
pub fn solve_integral(basis: &[IVec], target: &[i128]) -> Option<IVec> {
    solve_rational(basis, target)?
        .into_iter()
        .map(|q| if q.is_integer() { q.to_integer().to_i128() } else { None })
        .collect()
}

pub fn rat(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Product of a row vector with a matrix given by rows: `x · m`.
pub fn vec_mat(x: &[i128], m: &[IVec], ncols: usize) -> IVec {
    let mut out = vec![0i128; ncols];
    for (xi, row) in x.iter().zip(m) {
        if *xi != 0 {
            for (o, v) in out.iter_mut().zip(row) {
                *o += xi * v;
            }
        }
    }
    out
}

pub fn mat_mul(a: &[IVec], b: &[IVec], ncols: usize) -> Vec<IVec> {
    a.iter().map(|r| vec_mat(r, b, ncols)).collect()
}

/// Absolute determinant of a square integer matrix (fraction-free elimination).
pub fn abs_det(m: &[IVec]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::one();
    let mut sign = 1;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let _ = sign;
    if n == 0 {
        BigInt::one()
    } else {
        a[n - 1][n - 1].abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_drops_dependent_rows() {
        let h = row_hnf(&[vec![2, 4], vec![1, 2], vec![3, 6]], 2);
        assert_eq!(h, vec![vec![1, 2]]);
    }

    #[test]
    fn kernel_of_single_row() {
        let k = kernel(&[vec![2, 3]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(2 * k[0][0] + 3 * k[0][1], 0);
        assert_eq!(k[0][0].abs(), 3);
    }

    #[test]
    fn saturation_recovers_isolator() {
        let s = saturate(&[vec![0, 6, 0]], 3);
        assert_eq!(s, vec![vec![0, 1, 0]]);
    }

    #[test]
    fn completion_is_unimodular() {
        let c = vec![vec![2, 3, 5]];
        let ext = complete_basis(&c, 3);
        let mut full = c.clone();
        full.extend(ext);
        assert_eq!(abs_det(&full), BigInt::one());
    }

    #[test]
    fn smith_transforms_are_consistent() {
        let c = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let (u, d, vinv) = smith(&c, 3);
        assert_eq!(d.iter().product::<i128>(), 144);
        assert!(d.windows(2).all(|w| w[1] % w[0] == 0));
        // u * c = diag(d) * vinv
        let uc = mat_mul(&u, &c, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(uc[i][j], d[i] * vinv[i][j]);
            }
        }
        assert_eq!(abs_det(&u), BigInt::one());
        assert_eq!(abs_det(&vinv), BigInt::one());
    }
}
