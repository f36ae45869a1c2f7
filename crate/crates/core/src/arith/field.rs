use serde::{Deserialize, Serialize};

use crate::localring::LocalRingSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumberField {
    Rationals,
    /// `Q(√D)` for squarefree `D ∉ {0, 1}`.
    Quadratic(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not a squarefree integer other than 0 and 1")]
pub struct BadDiscriminant(pub i64);

impl NumberField {
    pub fn quadratic(d: i64) -> Result<Self, BadDiscriminant> {
        if d == 0 || d == 1 || !squarefree(d) {
            return Err(BadDiscriminant(d));
        }
        Ok(NumberField::Quadratic(d))
    }

    /// `Q(i)`.
    pub fn gaussian() -> Self {
        NumberField::Quadratic(-1)
    }

    pub fn degree(&self) -> u32 {
        match self {
            NumberField::Rationals => 1,
            NumberField::Quadratic(_) => 2,
        }
    }

    pub fn discriminant(&self) -> i64 {
        match *self {
            NumberField::Rationals => 1,
            NumberField::Quadratic(d) if d.rem_euclid(4) == 1 => d,
            NumberField::Quadratic(d) => 4 * d,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            NumberField::Rationals => "Q".into(),
            NumberField::Quadratic(-1) => "Q(i)".into(),
            NumberField::Quadratic(d) => format!("Q(sqrt({d}))"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "Q" | "q" | "QQ" => Some(NumberField::Rationals),
            "Q(i)" | "Qi" | "gaussian" => Some(NumberField::gaussian()),
            other => {
                let inner = other.strip_prefix("Q(sqrt(")?.strip_suffix("))")?;
                NumberField::quadratic(inner.trim().parse().ok()?).ok()
            }
        }
    }
}

fn squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Kronecker symbol `(d / p)` for a prime `p`.
pub fn kronecker(d: i64, p: u64) -> i32 {
    if p == 2 {
        return match d.rem_euclid(8) {
            0 | 2 | 4 | 6 => 0,
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    let e = crate::modp::pow(r as u128, ((p - 1) / 2) as u128, p as u128);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// One prime ideal above `p`: ramification index, residue degree and the completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u8,
    pub f: u8,
    /// Ring family of the completion (level 1 placeholder).
    pub spec: LocalRingSpec,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingData {
    pub p: u64,
    pub ideals: Vec<PrimeIdeal>,
}

impl SplittingData {
    pub fn pairs(&self) -> Vec<(u8, u8)> {
        self.ideals.iter().map(|i| (i.e, i.f)).collect()
    }
}

/// Decomposition of `p` in the ring of integers, with defining polynomials for the completions.
pub fn split_prime(field: &NumberField, p: u64) -> SplittingData {
    let d = match *field {
        NumberField::Rationals => {
            let spec = LocalRingSpec::rational(p, 1);
            return SplittingData { p, ideals: vec![PrimeIdeal { p, e: 1, f: 1, spec }] };
        }
        NumberField::Quadratic(d) => d,
    };
    let disc = field.discriminant();
    let ideal = |e: u8, f: u8, spec: LocalRingSpec| PrimeIdeal { p, e, f, spec };
    let ideals = match kronecker(disc, p) {
        1 => {
            let s = LocalRingSpec::rational(p, 1);
            vec![ideal(1, 1, s.clone()), ideal(1, 1, s)]
        }
        -1 => {
            let g = if p == 2 { vec![(1 - d) / 4, 1, 1] } else { vec![-d, 0, 1] };
            vec![ideal(1, 2, LocalRingSpec { p, e: 1, f: 2, n: 1, g })]
        }
        _ => {
            let g = if p == 2 && d.rem_euclid(4) == 3 { vec![1 - d, 2, 1] } else { vec![-d, 0, 1] };
            vec![ideal(2, 1, LocalRingSpec { p, e: 2, f: 1, n: 1, g })]
        }
    };
    SplittingData { p, ideals }
}

/// Primes up to `bound` (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localring::Ring;

    #[test]
    fn gaussian_splitting() {
        let k = NumberField::gaussian();
        assert_eq!(k.discriminant(), -4);
        assert_eq!(split_prime(&k, 5).pairs(), vec![(1, 1), (1, 1)]);
        assert_eq!(split_prime(&k, 3).pairs(), vec![(1, 2)]);
        assert_eq!(split_prime(&k, 2).pairs(), vec![(2, 1)]);
    }

    #[test]
    fn degrees_add_up_and_specs_are_valid() {
        for d in [-5i64, -3, -2, -1, 2, 3, 5, 6, 7, 13, 17] {
            let k = NumberField::quadratic(d).unwrap();
            for p in primes_up_to(40) {
                let s = split_prime(&k, p);
                let total: u32 = s.ideals.iter().map(|i| (i.e * i.f) as u32).sum();
                assert_eq!(total, 2);
                let ramified = s.ideals.iter().any(|i| i.e == 2);
                assert_eq!(ramified, k.discriminant() % p as i64 == 0, "D={d} p={p}");
                for i in &s.ideals {
                    Ring::new(&i.spec.with_level(3)).unwrap();
                }
            }
        }
    }

    #[test]
    fn kronecker_at_two() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
    }

    #[test]
    fn field_parsing() {
        assert_eq!(NumberField::parse("Q(i)"), Some(NumberField::Quadratic(-1)));
        assert_eq!(NumberField::parse("Q(sqrt(-5))"), Some(NumberField::Quadratic(-5)));
        assert_eq!(NumberField::parse("Q(sqrt(4))"), None);
        assert_eq!(NumberField::quadratic(5).unwrap().discriminant(), 5);
        assert_eq!(NumberField::quadratic(3).unwrap().discriminant(), 12);
    }
}
