//! Build a residuated lattice from raw tables and validate every axiom.
//!
//!     cargo run --example validate_algebra

use rlsheaf::algebra::{validate_residuated_lattice, RawAlgebra};

fn main() {
    // The four-element diamond 0 < a,b < 1 with idempotent product.
    let raw = RawAlgebra {
        name: "diamond".into(),
        elems: vec!["0".into(), "a".into(), "b".into(), "1".into()],
        order: vec![
            ("0".into(), "a".into()),
            ("0".into(), "b".into()),
            ("a".into(), "1".into()),
            ("b".into(), "1".into()),
        ],
        prod: vec![
            vec!["0".into(), "0".into(), "0".into(), "0".into()],
            vec!["0".into(), "a".into(), "0".into(), "a".into()],
            vec!["0".into(), "0".into(), "b".into(), "b".into()],
            vec!["0".into(), "a".into(), "b".into(), "1".into()],
        ],
        imp: None, // derived as the residuum of the product
        bot: "0".into(),
        top: "1".into(),
    };
    let v = validate_residuated_lattice(&raw).expect("well-formed input");
    print!("{}", v.report);
    let a = v.algebra.expect("the diamond validates");
    println!("derived implication column ->0 (negation):");
    for x in 0..a.n() {
        println!("  not {} = {}", a.label(x), a.label(a.neg(x)));
    }

    // Breaking one product entry produces a concrete adjunction witness.
    let mut broken = raw.clone();
    broken.prod[1][2] = "a".into();
    broken.prod[2][1] = "a".into();
    let v = validate_residuated_lattice(&broken).expect("well-formed input");
    println!();
    print!("{}", v.report);
}
