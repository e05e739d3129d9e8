//! Property tests over the enumerated pool of small algebras and seeded
//! random structures.

use proptest::prelude::*;
use rlsheaf::algebra::{
    are_isomorphic, check_morphism, quotient_by_filter, validate_residuated_lattice, FilterSubset,
};
use rlsheaf::bitset::BitSet;
use rlsheaf::generate::{random_presheaf, small_algebra_pool, SplitMix64};
use rlsheaf::json::{parse_algebra, AlgebraJson};
use rlsheaf::report::Budget;
use rlsheaf::spectra::{enumerate_filters, generated_filter};

proptest! {
    #[test]
    fn adjunction_holds_on_every_pool_algebra(idx in 0usize..64, x in 0usize..4, y in 0usize..4, z in 0usize..4) {
        let pool = small_algebra_pool();
        let a = &pool[idx % pool.len()];
        let (x, y, z) = (x % a.n(), y % a.n(), z % a.n());
        prop_assert_eq!(a.leq(a.prod(x, z), y), a.leq(z, a.imp(x, y)));
    }

    #[test]
    fn generated_filter_is_least(idx in 0usize..64, mask in 0usize..16) {
        let pool = small_algebra_pool();
        let a = &pool[idx % pool.len()];
        let subset = BitSet::from_indices(
            a.n(),
            &(0..a.n()).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>(),
        );
        let gen = generated_filter(a, &subset);
        prop_assert!(gen.is_filter());
        prop_assert!(subset.is_subset(&gen.members));
        let fl = enumerate_filters(a, &Budget::default()).unwrap();
        for f in &fl.filters {
            if subset.is_subset(&f.members) {
                prop_assert!(gen.members.is_subset(&f.members));
            }
        }
    }

    #[test]
    fn filter_intersections_are_filters(idx in 0usize..64, i in 0usize..8, j in 0usize..8) {
        let pool = small_algebra_pool();
        let a = &pool[idx % pool.len()];
        let fl = enumerate_filters(a, &Budget::default()).unwrap();
        let (i, j) = (i % fl.filters.len(), j % fl.filters.len());
        let inter = FilterSubset::new(
            a.clone(),
            fl.filters[i].members.intersection(&fl.filters[j].members),
        );
        prop_assert!(inter.is_filter());
    }

    #[test]
    fn quotient_projections_are_surjective_morphisms(idx in 0usize..64, f in 0usize..8) {
        let pool = small_algebra_pool();
        let a = &pool[idx % pool.len()];
        let fl = enumerate_filters(a, &Budget::default()).unwrap();
        let filt = &fl.filters[f % fl.filters.len()];
        let (q, proj) = quotient_by_filter(a, filt).unwrap();
        let chk = check_morphism(&proj);
        prop_assert!(chk.report.is_valid());
        prop_assert!(proj.is_surjective());
        prop_assert_eq!(chk.coker, filt.members.clone());
        prop_assert!(q.n() <= a.n());
    }

    #[test]
    fn algebra_json_roundtrip(idx in 0usize..64) {
        let pool = small_algebra_pool();
        let a = &pool[idx % pool.len()];
        let text = serde_json::to_string(&AlgebraJson::from_algebra(a)).unwrap();
        let v = validate_residuated_lattice(&parse_algebra(&text).unwrap()).unwrap();
        prop_assert!(v.report.is_valid());
        prop_assert!(are_isomorphic(&v.algebra.unwrap(), a));
    }

    #[test]
    fn random_presheaf_restrictions_compose(seed in 0u64..512) {
        let budget = Budget::default();
        let mut rng = SplitMix64::new(seed);
        let p = random_presheaf(&mut rng, &budget).unwrap();
        for (v, u) in p.inclusion_pairs().collect::<Vec<_>>() {
            for w in 0..p.opens.len() {
                if p.opens[w].is_subset(&p.opens[u]) {
                    for s in 0..p.values[v].n() {
                        let direct = p.restrict_elem(v, w, s);
                        let through = p.restrict_elem(u, w, p.restrict_elem(v, u, s));
                        prop_assert_eq!(direct, through);
                    }
                }
            }
        }
    }
}
