use nilzeta::arith::{local_pole_set, RayData};
use nilzeta::zetafit::{BivariateRational, Poly2};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() {
    let mut num = Poly2::one();
    num.add_term(0, 1, BigRational::from_integer(BigInt::from(-1)));
    let w = BivariateRational::new(num, vec![(1, 1)]);

    let rays = RayData::from_fit(&w);
    let poles = local_pole_set(&w);
    let a = rays.global_abscissa_above(&poles).unwrap();
    println!("P = {poles:?}, a(G) = {}, beta = {}", a.value, rays.pole_order().unwrap());

    // two maximal rays give a double pole
    let twin = RayData::from_rays(&[(1, -1), (1, -1), (2, -1)]);
    let a = twin.global_abscissa().unwrap();
    println!("alphas {:?}, a = {}, beta = {}", a.alphas, a.value, twin.pole_order().unwrap());
}
