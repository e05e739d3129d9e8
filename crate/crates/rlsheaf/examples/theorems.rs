//! The theorem dashboard: functor laws, reflection, equivalence, and
//! subcategory closure, verified on the built-in fixtures.
//!
//!     cargo run --example theorems

use rlsheaf::fixtures;
use rlsheaf::functors::{
    check_equivalence, check_ps_functor_laws, check_reflection, check_subcategory,
    EquivalenceInstance,
};
use rlsheaf::presheaf::PresheafMorphism;
use rlsheaf::report::Budget;
use rlsheaf::sheafify::{etale_of_presheaf, sheafification};

fn main() {
    let budget = Budget::default();
    let fixtures_at_2 = fixtures::builtin_presheaf_fixtures(2, &budget).unwrap();

    println!("reflection (universal morphisms):");
    for (name, p) in &fixtures_at_2 {
        let sf = sheafification(p, &budget).unwrap();
        let rep = check_reflection(p, &sf.plus, &sf.iota, &budget).unwrap();
        print!("  {}", rep.render().replace(rep.instance.as_str(), name));
    }

    println!("\nequivalence (evaluation isomorphisms):");
    for (name, p) in &fixtures_at_2 {
        let et = etale_of_presheaf(p, &budget).unwrap();
        let rep = check_equivalence(
            &EquivalenceInstance {
                space: &et.space,
                morphisms: vec![],
            },
            &budget,
        )
        .unwrap();
        println!(
            "  [{}] stalk space of {name}",
            if rep.passed { "pass" } else { "FAIL" }
        );
    }

    println!("\nfunctor laws on identity chains:");
    let (_, p) = &fixtures_at_2[0];
    let id = PresheafMorphism::identity(p);
    let rep = rlsheaf::functors::check_et_functor_laws(&id, &id, &budget).unwrap();
    print!("{}", rep.render());
    let et = etale_of_presheaf(p, &budget).unwrap();
    let idmap: Vec<usize> = (0..et.space.total.n()).collect();
    let rep =
        check_ps_functor_laws(&et.space, &et.space, &et.space, &idmap, &idmap, &budget).unwrap();
    print!("{}", rep.render());

    println!("\nsubcategory closure:");
    let spaces: Vec<_> = fixtures_at_2
        .iter()
        .map(|(_, p)| etale_of_presheaf(p, &budget).unwrap().space)
        .collect();
    let refs: Vec<&_> = spaces.iter().collect();
    let composable: Vec<(usize, usize, usize, Vec<usize>, Vec<usize>)> = (0..refs.len())
        .map(|i| {
            let id: Vec<usize> = (0..refs[i].total.n()).collect();
            (i, i, i, id.clone(), id)
        })
        .collect();
    let rep = check_subcategory(&refs, &composable, &budget).unwrap();
    print!("{}", rep.render());
}
