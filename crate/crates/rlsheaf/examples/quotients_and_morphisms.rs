//! Morphism checking, filter quotients, and products.
//!
//!     cargo run --example quotients_and_morphisms

use rlsheaf::algebra::{
    are_isomorphic, check_morphism, lukasiewicz_chain, product_algebra, quotient_by_filter,
    FilterSubset,
};
use rlsheaf::bitset::BitSet;
use rlsheaf::fixtures;

fn main() {
    // The reference six-to-four morphism and its cokernel.
    let f = fixtures::mora6a4();
    let chk = check_morphism(&f);
    print!("{}", chk.report);
    println!(
        "coker = {}, injective = {}",
        FilterSubset::new(f.src.clone(), chk.coker.clone()).label(),
        chk.injective
    );

    // Quotient of A4 by the filter {a, 1}: two classes.
    let a4 = fixtures::a4();
    let f2 = FilterSubset::new(
        a4.clone(),
        BitSet::from_indices(a4.n(), &[a4.index_of("a").unwrap(), a4.top]),
    );
    let (q, proj) = quotient_by_filter(&a4, &f2).unwrap();
    println!("\nA4 / {}:", f2.label());
    for c in 0..q.n() {
        println!("  class {}", q.label(c));
    }
    let pchk = check_morphism(&proj);
    println!(
        "projection valid = {}, coker = {}",
        pchk.report.is_valid(),
        FilterSubset::new(a4.clone(), pchk.coker).label()
    );

    // The square of the two-element chain is the diamond.
    let two = lukasiewicz_chain(1);
    let (sq, _, _) = product_algebra(&two, &two);
    println!(
        "\ntwo-element chain squared is isomorphic to A4: {}",
        are_isomorphic(&sq, &a4)
    );
}
