//! Stalks as directed colimits over neighborhood posets, with the
//! minimal-neighborhood fast path cross-checked against the full
//! construction.
//!
//!     cargo run --example stalks_and_germs

use rlsheaf::algebra::are_isomorphic;
use rlsheaf::colimit::{germs_separate_sections, stalk};
use rlsheaf::presheaf::sierpinski_fuzzy_presheaf;
use rlsheaf::report::Budget;

fn main() {
    let budget = Budget::default();
    let k = 10;
    let p = sierpinski_fuzzy_presheaf(k, &budget).unwrap();

    for (x, label) in [(0usize, "x"), (1, "y")] {
        let st = stalk(&p, x, &budget).unwrap();
        println!(
            "stalk at {label}: {} classes, minimal open {}",
            st.algebra.n(),
            p.open_label(st.min_open)
        );
        println!(
            "  colimit route gives {} classes; isomorphic = {}",
            st.colimit.algebra.n(),
            are_isomorphic(&st.algebra, &st.colimit.algebra)
        );
    }

    // Germs: the germ at x of a global assignment only remembers the first
    // coordinate.
    let full = p.open_index(&p.base.full_set()).unwrap();
    let x_only = p.open_index(&rlsheaf::bitset::BitSet::from_indices(2, &[0])).unwrap();
    let st_x = stalk(&p, 0, &budget).unwrap();
    let mu = p.values[full].index_of("(5/10,7/10)").unwrap();
    let nu = p.values[full].index_of("(5/10,0)").unwrap();
    println!(
        "\ngerms at x of (5/10,7/10) and (5/10,0): {} and {} (equal = {})",
        st_x.algebra.label(st_x.germ(full, mu).unwrap()),
        st_x.algebra.label(st_x.germ(full, nu).unwrap()),
        st_x.germ(full, mu).unwrap() == st_x.germ(full, nu).unwrap()
    );
    let restricted = p.restrict_elem(full, x_only, mu);
    println!(
        "germ of the restriction agrees: {}",
        st_x.germ(full, mu).unwrap() == st_x.germ(x_only, restricted).unwrap()
    );

    // On a separated presheaf, sections are equal exactly when all their
    // germs are.
    let r = germs_separate_sections(&p, full, mu, nu, &budget).unwrap();
    println!(
        "\nsections (5/10,7/10) vs (5/10,0): equal = {}, germs agree everywhere = {}",
        r.equal, r.germs_agree
    );
}
