//! Finite topological spaces: validation, map properties, covers, and
//! neighborhood posets.
//!
//!     cargo run --example finite_spaces

use rlsheaf::bitset::BitSet;
use rlsheaf::report::Budget;
use rlsheaf::topology::{
    map_properties, minimal_open_neighborhood, neighborhood_poset, open_covers, validate_topology,
    ContinuousMap, CoverMode, FinTopSpace,
};
use std::sync::Arc;

fn main() {
    let budget = Budget::default();
    // The two-point space with opens {}, {x}, {x,y}.
    let points = vec!["x".to_string(), "y".to_string()];
    let opens = vec![
        BitSet::new(2),
        BitSet::from_indices(2, &[0]),
        BitSet::full(2),
    ];
    let v = validate_topology(&points, &opens).unwrap();
    print!("{}", v.report);
    let s = v.space.unwrap();

    for x in 0..2 {
        println!(
            "minimal open neighborhood of {}: {}",
            s.points[x],
            s.set_label(&minimal_open_neighborhood(&s, x))
        );
    }

    // A constant map into the closed point is continuous but not open.
    let d2 = Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]));
    let f = ContinuousMap::new(d2, s.clone(), vec![1, 1]).unwrap();
    let p = map_properties(&f, &budget);
    println!(
        "constant-to-y map: continuous={}, open={}, locally injective={}, local homeo={}",
        p.continuous, p.open, p.locally_injective, p.local_homeomorphism
    );
    println!("definitional route agrees: {}", p.routes_agree());

    // Every cover of the full open, in both modes.
    let full = s.full_set();
    for mode in [CoverMode::Strict, CoverMode::Paper] {
        let covers = open_covers(&s, &full, mode, &budget).unwrap();
        println!("covers of {} in {:?} mode: {}", s.set_label(&full), mode, covers.len());
    }

    // Neighborhood poset of {x}: two opens, directed by intersection.
    let (poset, members) = neighborhood_poset(&s, &BitSet::from_indices(2, &[0]), &budget).unwrap();
    println!(
        "neighborhoods of x (reverse inclusion): {:?}, directed = {}",
        members.iter().map(|m| s.set_label(m)).collect::<Vec<_>>(),
        poset.is_directed().is_ok()
    );
}
