use nilzeta::lattice::{validate, RawLattice};
use nilzeta::localring::LocalRingSpec;
use nilzeta::poincare::{local_zeta, ZetaOptions};
use nilzeta::zetafit::{fit_uniform, fit_univariate, predict, FitBounds};

fn main() {
    let heis = validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap();
    let bounds = FitBounds::default();
    let data: Vec<_> = [2, 3, 5, 7]
        .into_iter()
        .map(|p| (p, local_zeta(&heis, &LocalRingSpec::rational(p, 1), 4, ZetaOptions::default()).unwrap()))
        .collect();
    for (p, s) in &data {
        println!("q = {p}: {}", fit_univariate(s, &bounds).unwrap());
    }

    let w = fit_uniform(&data, &bounds).unwrap();
    println!("W(X, Y) = {w}");

    let fresh = local_zeta(&heis, &LocalRingSpec::rational(11, 1), 3, ZetaOptions::default()).unwrap();
    let guess = predict(&w, 11, 3).unwrap();
    println!("q = 11 predicted {:?}, enumerated {:?}", guess.coeffs_u128(), fresh.coeffs_u128());
}
