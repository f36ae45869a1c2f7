//! Arithmetic modulo a word-sized prime.

pub fn mul(a: u128, b: u128, p: u128) -> u128 {
    (a % p) * (b % p) % p
}

pub fn pow(mut a: u128, mut e: u128, p: u128) -> u128 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv(a: u128, p: u128) -> u128 {
    pow(a, p - 2, p)
}

pub fn from_i128(x: i128, p: u128) -> u128 {
    let r = x.rem_euclid(p as i128);
    r as u128
}

/// Rank by Gaussian elimination; `a` is destroyed. Requires `p < 2^63`.
pub fn rank_mod(a: &mut [Vec<u128>], p: u128) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_multiple_of(p)) else { continue };
        a.swap(rank, piv);
        let iv = inv(a[rank][c], p);
        for i in rank + 1..rows {
            let f = mul(a[i][c], iv, p);
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let s = mul(f, a[rank][j], p);
                a[i][j] = (a[i][j] + p - s) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let mut a = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(rank_mod(&mut a, 7), 2);
    }

    #[test]
    fn inverse_roundtrip() {
        for a in 1..13u128 {
            assert_eq!(mul(a, inv(a, 13), 13), 1);
        }
    }
}
