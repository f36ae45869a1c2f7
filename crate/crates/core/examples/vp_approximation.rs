use nilzeta::arith::{vp_approximation, NumberField, RayData};
use nilzeta::zetafit::{BivariateRational, Poly2};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

fn main() {
    let mut num = Poly2::one();
    num.add_term(0, 1, BigRational::from_integer(BigInt::from(-1)));
    let w = BivariateRational::new(num, vec![(1, 1)]);
    let rays = RayData::from_fit(&w);
    let primes: Vec<u64> = (2..3000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
    let points = [Complex64::new(1.75, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.75, 3.0)];
    for row in vp_approximation(&rays, &w, &primes, &NumberField::Rationals, &points).unwrap() {
        let tail = |h: &[(u64, (f64, f64))]| h.iter().rev().step_by(100).take(4).map(|(p, z)| format!("{p}: {:.5}+{:.5}i", z.0, z.1)).collect::<Vec<_>>();
        println!("s = {:?}", row.s);
        println!("  compensated {:?}", tail(&row.compensated));
        println!("  raw         {:?}", tail(&row.raw));
    }
}
