use std::time::Instant;

use nilzeta::lattice::{validate, RawLattice};
use nilzeta::localring::LocalRingSpec;
use nilzeta::poincare::{local_zeta, ZetaOptions};

fn main() {
    let free = validate(&RawLattice {
        name: None,
        rank: 6,
        brackets: vec![(1, 2, vec![0, 0, 0, 1, 0, 0]), (1, 3, vec![0, 0, 0, 0, 1, 0]), (2, 3, vec![0, 0, 0, 0, 0, 1])],
    })
    .unwrap();
    let spec = LocalRingSpec::rational(3, 1);
    for full in [false, true] {
        let t = Instant::now();
        let s = local_zeta(&free, &spec, 2, ZetaOptions { full_enumeration: full, ..Default::default() }).unwrap();
        println!("full = {full}: {:?} in {:.2?}", s.coeffs_u128(), t.elapsed());
    }
}
