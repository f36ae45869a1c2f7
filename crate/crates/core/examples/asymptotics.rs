use nilzeta::arith::{asymptotics, dedekind_residue, dedekind_zeta2, estimate_abscissa_empirical, euler_product, EulerOptions, NumberField};
use nilzeta::lattice::{validate, RawLattice};

fn main() {
    let heis = validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap();
    let n = 20_000;
    for field in [NumberField::Rationals, NumberField::gaussian()] {
        let g = euler_product(&heis, &field, n as u64, n, &EulerOptions::default()).unwrap();
        let slope = estimate_abscissa_empirical(&g).unwrap();
        let est = asymptotics(&g, 2.0, 1).unwrap();
        let z2 = dedekind_zeta2(&field);
        println!(
            "{}: slope {:.4} [{:.4}, {:.4}], c = {:.6} ± {:.1e}, 1/(2 zeta(2)) = {:.6}, residue-weighted {:.6}",
            field.name(),
            slope.slope,
            slope.low,
            slope.high,
            est.c,
            est.error,
            1.0 / (2.0 * z2),
            dedekind_residue(&field) / (2.0 * z2)
        );
    }
}
