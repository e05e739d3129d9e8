//! The stalk space of a presheaf: construction, full validation, section
//! enumeration, section algebras, and equalizers of sections.
//!
//!     cargo run --example etale_spaces

use rlsheaf::etale::{equalizer, section_algebra, sections, stalk_discreteness};
use rlsheaf::fixtures;
use rlsheaf::presheaf::constant_presheaf;
use rlsheaf::report::Budget;
use rlsheaf::sheafify::etale_of_presheaf;

fn main() {
    let budget = Budget::default();
    let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &budget).unwrap();
    let et = etale_of_presheaf(&p, &budget).unwrap();
    println!(
        "stalk space of '{}': {} points over {} base points",
        p.name,
        et.space.total.n(),
        et.space.base.n()
    );
    print!("{}", et.validation);
    print!("{}", stalk_discreteness(&et.space));

    // Sections over the whole base: all fiberwise choices, since the base is
    // discrete and the stalks are disconnected columns.
    let full = et.space.base.full_set();
    let secs = sections(&et.space, &full, &budget).unwrap();
    println!("\nsections over the whole base: {}", secs.len());
    let (alg, _) = section_algebra(&et.space, &full, &budget).unwrap();
    println!("their pointwise algebra: {} elements", alg.n());

    // Equalizers of sections are open; two sections differing at one point
    // leave the other point's singleton.
    let s = &secs[0];
    let t = secs
        .iter()
        .find(|t| t.values[0] == s.values[0] && t.values[1] != s.values[1])
        .unwrap();
    let eq = equalizer(&et.space, s, t).unwrap();
    println!(
        "equalizer of two sections agreeing only at p: {} (open = {})",
        et.space.base.set_label(&eq.set),
        eq.open
    );
}
