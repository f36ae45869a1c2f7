mod common;

use common::*;
use nilzeta::lattice::{validate, LieLattice, RawLattice};
use nilzeta::localring::{LocalRingSpec, Ring};
use nilzeta::poincare::{self, PrimePolicy, ZetaOptions};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Class-2 lattices on `e1, e2, e3` with brackets in the span of `centre` extra generators.
fn class_two(centre: usize) -> impl Strategy<Value = LieLattice> {
    proptest::collection::vec(proptest::collection::vec(-3i64..=3, centre), 3).prop_filter_map("abelian", move |rows| {
        let rank = 3 + centre;
        let pairs = [(1, 2), (1, 3), (2, 3)];
        let brackets = pairs
            .iter()
            .zip(&rows)
            .filter(|(_, r)| r.iter().any(|&x| x != 0))
            .map(|(&(i, j), r)| {
                let mut v = vec![0; 3];
                v.extend_from_slice(r);
                (i, j, v)
            })
            .collect();
        validate(&RawLattice { name: None, rank, brackets }).ok()
    })
}

fn ring_spec() -> impl Strategy<Value = LocalRingSpec> {
    prop_oneof![
        (prop_oneof![Just(2u64), Just(3), Just(5)], 1u32..=3).prop_map(|(p, n)| LocalRingSpec::rational(p, n)),
        (prop_oneof![Just(2u64), Just(3)], 1u32..=2).prop_map(|(p, n)| LocalRingSpec::unramified(p, n)),
        (1u32..=4).prop_map(|n| LocalRingSpec::ramified(3, n, 0, 3)),
        (1u32..=4).prop_map(|n| LocalRingSpec::ramified(2, n, 2, 2)),
    ]
}

fn try_series(lat: &LieLattice, spec: &LocalRingSpec, n_max: usize) -> Option<Vec<BigInt>> {
    let opts = ZetaOptions { policy: PrimePolicy::Local, ..Default::default() };
    poincare::local_zeta(lat, spec, n_max, opts).ok().map(|s| s.coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn coefficients_are_counts(lat in class_two(2), p in prop_oneof![Just(2u64), Just(3), Just(5)]) {
        let c = try_series(&lat, &LocalRingSpec::rational(p, 1), 2);
        prop_assume!(c.is_some());
        let c = c.unwrap();
        prop_assert_eq!(&c[0], &BigInt::from(1));
        prop_assert!(c.iter().all(|x| x >= &BigInt::from(0)));
    }

    #[test]
    fn orbit_reduction_is_exact(lat in class_two(2), p in prop_oneof![Just(2u64), Just(3)], unramified in any::<bool>()) {
        let spec = if unramified { LocalRingSpec::unramified(p, 1) } else { LocalRingSpec::rational(p, 1) };
        prop_assert!(orbit_reduction_agrees(&lat, &spec, 2));
    }

    #[test]
    fn direct_sum_with_z(lat in class_two(1), p in prop_oneof![Just(2u64), Just(3), Just(5)]) {
        let spec = LocalRingSpec::rational(p, 1);
        let a = try_series(&lat, &spec, 3);
        prop_assume!(a.is_some());
        prop_assert_eq!(a, try_series(&lat.plus_abelian(1), &spec, 3));
    }

    #[test]
    fn commensurability(lat in class_two(1), q in prop_oneof![Just(2u64), Just(3)]) {
        let spec = LocalRingSpec::rational(q, 1);
        prop_assume!(try_series(&lat, &spec, 1).is_some());
        prop_assert_eq!(commensurability_violation(&lat, &spec, 2), None);
    }

    #[test]
    fn smith_type_is_invariant(spec in ring_spec(), rows in 1usize..=4, cols in 1usize..=4, seed in any::<u64>()) {
        let ring = Ring::new(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&ring, rows, cols, &mut rng);
        prop_assert_eq!(snf_type_changes(&ring, &m, 100, &mut rng), 0);
    }

    #[test]
    fn antisymmetric_types_pair_up(spec in ring_spec(), seed in any::<u64>()) {
        let ring = Ring::new(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let mut m = vec![vec![ring.zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = random_elem(&ring, &mut rng);
                m[i][j] = x;
                m[j][i] = ring.neg(x);
            }
        }
        prop_assert!(ring.antisymmetric_type(&m).is_ok());
    }
}
