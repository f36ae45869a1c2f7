use nilzeta::lattice::{validate, RawLattice};
use nilzeta::localring::LocalRingSpec;
use nilzeta::poincare::{local_zeta, stabilization_check, PrimePolicy, ZetaOptions};

fn main() {
    let heis = validate(&RawLattice { name: Some("heisenberg".into()), rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap();

    // (1 - t)/(1 - pt): 1, p - 1, p(p - 1), ...
    for p in [2, 3, 5] {
        let s = local_zeta(&heis, &LocalRingSpec::rational(p, 1), 4, ZetaOptions::default()).unwrap();
        println!("p = {p}: {:?}", s.coeffs_u128());
    }

    let st = stabilization_check(&heis, &LocalRingSpec::rational(3, 1), 3, 3, PrimePolicy::Refuse).unwrap();
    println!("stable from N_max = {}: {}", st.level_max, st.stable);

    // the unramified quadratic extension of Z_3 has residue field of size 9
    let s = local_zeta(&heis, &LocalRingSpec::unramified(3, 1), 2, ZetaOptions::default()).unwrap();
    println!("q = {}: {:?}", s.q, s.coeffs_u128());

    let s = local_zeta(&heis, &LocalRingSpec::ramified(3, 1, 0, 3), 2, ZetaOptions::default()).unwrap();
    println!("ramified, q = {}: {:?}", s.q, s.coeffs_u128());
}
