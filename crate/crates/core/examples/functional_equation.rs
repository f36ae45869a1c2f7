use nilzeta::zetafit::{check_functional_equation, verify_functional_equation, BivariateRational, Poly2};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() {
    let one = BigRational::from_integer(BigInt::from(1));
    let mut num = Poly2::one();
    num.add_term(0, 1, -one);
    // (1 - Y)/(1 - XY)
    let w = BivariateRational::new(num, vec![(1, 1)]);
    let cert = check_functional_equation(&w).unwrap();
    println!("W = {w}");
    println!("W(1/X, 1/Y) = {} X^{} Y^{} W(X, Y)", cert.sign, cert.a, cert.b);
    println!("random-point check: {}", verify_functional_equation(&w, &cert, 16, 1));

    let mut lopsided = Poly2::one();
    lopsided.add_term(1, 1, BigRational::from_integer(BigInt::from(2)));
    let v = BivariateRational::new(lopsided, vec![(1, 0)]);
    println!("{v}: {:?}", check_functional_equation(&v));
}
