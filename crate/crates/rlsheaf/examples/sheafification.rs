//! Sheafification: sections of the stalk space, the universal morphism, and
//! idempotence.
//!
//!     cargo run --example sheafification

use rlsheaf::algebra::are_isomorphic;
use rlsheaf::fixtures;
use rlsheaf::presheaf::{constant_presheaf, skyscraper_presheaf};
use rlsheaf::report::Budget;
use rlsheaf::sheafify::sheafification;

fn main() {
    let budget = Budget::default();

    // The constant presheaf over a two-point discrete base glues to the
    // product algebra globally.
    let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &budget).unwrap();
    let sf = sheafification(&p, &budget).unwrap();
    println!("sheafification of '{}':", p.name);
    for u in 0..p.opens.len() {
        println!(
            "  {}: {} -> {} sections",
            p.open_label(u),
            p.values[u].n(),
            sf.plus.values[u].n()
        );
    }
    println!(
        "universal morphism is an isomorphism: {} (the presheaf was not a sheaf)",
        sf.iota.is_isomorphism()
    );
    print!("{}", sf.validation);

    // Idempotence: sheafifying the result changes nothing.
    let sf2 = sheafification(&sf.plus, &budget).unwrap();
    println!(
        "\nsecond sheafification is an isomorphism: {}",
        sf2.iota.is_isomorphism()
    );
    for u in 0..sf.plus.opens.len() {
        assert!(are_isomorphic(&sf.plus.values[u], &sf2.plus.values[u]));
    }

    // On a sheaf the universal morphism is already an isomorphism.
    let sky = skyscraper_presheaf(fixtures::sierpinski(), 1, &fixtures::a4(), &budget).unwrap();
    let sfs = sheafification(&sky, &budget).unwrap();
    println!(
        "\nskyscraper sheaf: universal morphism is an isomorphism: {}",
        sfs.iota.is_isomorphism()
    );
}
