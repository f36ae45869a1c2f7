use nilzeta::lattice::{validate, RawLattice};
use nilzeta::localring::LocalRingSpec;
use nilzeta::oracle::{build_group, character_degrees, conjugacy_classes, twist_isoclass_counts, OracleOptions};

fn main() {
    let heis = validate(&RawLattice { name: None, rank: 3, brackets: vec![(1, 2, vec![0, 0, 1])] }).unwrap();
    let opts = OracleOptions::default();
    let g = build_group(&heis, &LocalRingSpec::rational(3, 1), &opts).unwrap();
    let classes = conjugacy_classes(&g);
    let table = character_degrees(&g, &classes, &opts).unwrap();
    println!("|G| = {}, exponent {}, {} classes, Dixon prime {}", g.order(), g.exponent(), classes.len(), table.modulus);
    println!("degrees {:?}", table.degree_multiset());
    println!("twist isoclasses {:?}", twist_isoclass_counts(&table));

    for (i, d) in table.degrees.iter().enumerate() {
        let row: Vec<String> = (0..classes.len())
            .map(|k| {
                let z = table.complex_value(&g, &classes, i, k);
                format!("{:+.2}{:+.2}i", z.re, z.im)
            })
            .collect();
        println!("chi_{i} (deg {d}): {}", row.join(" "));
    }
}
