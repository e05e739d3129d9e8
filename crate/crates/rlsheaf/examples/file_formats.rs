//! Write an algebra and a presheaf to their JSON formats, read them back,
//! and export DOT diagrams.
//!
//!     cargo run --example file_formats

use rlsheaf::dot;
use rlsheaf::fixtures;
use rlsheaf::json::{parse_algebra, parse_presheaf, presheaf_to_json, AlgebraJson};
use rlsheaf::report::Budget;

fn main() {
    let budget = Budget::default();

    // Algebra file.
    let a6 = fixtures::a6();
    let text = serde_json::to_string_pretty(&AlgebraJson::from_algebra(&a6)).unwrap();
    println!("algebra file for {}:\n{text}\n", a6.name);
    let raw = parse_algebra(&text).unwrap();
    let v = rlsheaf::algebra::validate_residuated_lattice(&raw).unwrap();
    println!("parsed back: valid = {}", v.report.is_valid());

    // Presheaf file (cover restrictions are enough; composites derive).
    let p = fixtures::prsresexa4(&budget).unwrap();
    let j = presheaf_to_json(&p);
    let text = serde_json::to_string_pretty(&j).unwrap();
    let q = parse_presheaf(&text).unwrap();
    println!(
        "presheaf file round trip: {} opens, validates = {}",
        q.opens.len(),
        rlsheaf::presheaf::validate_presheaf(&q).is_valid()
    );

    // DOT artifacts.
    println!("\nHasse diagram of {}:", a6.name);
    print!("{}", dot::hasse_dot(&a6));
    let fl = rlsheaf::spectra::enumerate_filters(&a6, &budget).unwrap();
    println!("\nfilter lattice of {}:", a6.name);
    print!("{}", dot::filter_lattice_dot(&fl));
}
