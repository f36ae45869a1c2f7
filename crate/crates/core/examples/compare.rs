use nilzeta::lattice::{validate, RawLattice};
use nilzeta::localring::LocalRingSpec;
use nilzeta::oracle::{compare_oracle_poincare, OracleOptions};

fn main() {
    let heis = validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap();
    let opts = OracleOptions { max_order: 20_000, max_classes: 1000 };
    for (p, n) in [(3, 1), (3, 2), (5, 1)] {
        let c = compare_oracle_poincare(&heis, &LocalRingSpec::rational(p, n), (n / 2) as usize, &opts).unwrap();
        let neighbours: Vec<u32> = c.levels.iter().map(|l| l.level).collect();
        println!(
            "p = {p}, N = {n}: |G| = {}, {} classes, oracle {:?} = poincare {:?}, stable across {:?}: {}",
            c.report.order, c.report.classes, c.oracle, c.poincare, neighbours, c.stable
        );
    }
}
