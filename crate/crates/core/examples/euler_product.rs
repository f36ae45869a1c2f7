use nilzeta::arith::{coarse_factor_check, euler_product, multiplicativity_violation, split_prime, EulerOptions, NumberField};
use nilzeta::lattice::{validate, RawLattice};

fn main() {
    let heis = validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap();
    let gauss = NumberField::gaussian();
    for p in [2, 3, 5, 13] {
        println!("{p} splits as {:?}", split_prime(&gauss, p).pairs());
    }

    let g = euler_product(&heis, &gauss, 2000, 2000, &EulerOptions::default()).unwrap();
    println!("first coefficients: {:?}", &g.coeffs[1..=20]);
    println!("multiplicativity violation: {:?}", multiplicativity_violation(&g));
    for c in coarse_factor_check(&g, 13) {
        println!("coarse factor at {}: {:?} (matches: {})", c.p, c.coarse, c.matches);
    }
}
