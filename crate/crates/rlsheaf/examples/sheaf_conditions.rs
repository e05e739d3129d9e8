//! Separation, gluing, and the equalizer characterization, on presheaves
//! that satisfy them and ones that do not.
//!
//!     cargo run --example sheaf_conditions

use rlsheaf::fixtures;
use rlsheaf::presheaf::{
    check_equalizer, constant_presheaf, is_sheaf, skyscraper_presheaf, validate_presheaf,
};
use rlsheaf::report::Budget;
use rlsheaf::topology::{open_covers, CoverMode};

fn main() {
    let budget = Budget::default();

    // The skyscraper is a sheaf in both modes.
    let sky = skyscraper_presheaf(fixtures::sierpinski(), 1, &fixtures::a4(), &budget).unwrap();
    for mode in [CoverMode::Strict, CoverMode::Paper] {
        let rep = is_sheaf(&sky, mode, &budget).unwrap();
        println!("skyscraper, {:?} mode: sheaf = {}", mode, rep.is_sheaf);
    }

    // The constant presheaf over a disconnected base is not.
    let constant = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &budget).unwrap();
    println!();
    for mode in [CoverMode::Paper, CoverMode::Strict] {
        let rep = is_sheaf(&constant, mode, &budget).unwrap();
        print!("{}", rep.render(&constant));
    }

    // The equalizer diagram reaches the same verdicts, cover by cover.
    println!("\nequalizer diagram vs separation+gluing on every cover:");
    let mut agree = true;
    for open in 0..constant.opens.len() {
        for cover_sets in
            open_covers(&constant.base, &constant.opens[open], CoverMode::Strict, &budget).unwrap()
        {
            let cover: Vec<usize> = cover_sets
                .iter()
                .map(|o| constant.open_index(o).unwrap())
                .collect();
            let eq = check_equalizer(&constant, open, &cover, &budget).unwrap();
            let sep = rlsheaf::presheaf::check_separation(&constant, open, &cover, CoverMode::Strict);
            let glue =
                rlsheaf::presheaf::check_gluing(&constant, open, &cover, CoverMode::Strict, &budget)
                    .unwrap();
            agree &= eq.holds == (sep.holds && glue.holds);
        }
    }
    println!("  verdicts agree on every (open, cover): {agree}");

    // Validation catches the deliberately broken fixture with a witness.
    let broken = rlsheaf::presheaf::sierpinski_modified_presheaf(2, &budget).unwrap();
    println!();
    print!("{}", validate_presheaf(&broken));
}
