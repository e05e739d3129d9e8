//! Enumerate filters, classify them, and build the spectrum topologies for
//! the three reference algebras.
//!
//!     cargo run --example filters_and_spectra

use rlsheaf::fixtures;
use rlsheaf::report::Budget;
use rlsheaf::spectra::{classify_filters, enumerate_filters, spectrum_topology, SpectrumKind};

fn main() {
    let budget = Budget::default();
    for a in [fixtures::a4(), fixtures::a6(), fixtures::a8()] {
        let fl = enumerate_filters(&a, &budget).unwrap();
        println!("{}:", a.name);
        for (i, f) in fl.filters.iter().enumerate() {
            println!("  {} = {}", fl.name(i), f.label());
        }
        let c = classify_filters(&fl);
        let names = |v: &[usize]| v.iter().map(|&i| fl.name(i)).collect::<Vec<_>>().join(", ");
        println!("  prime: {}", names(&c.prime));
        println!("  maximal: {}", names(&c.maximal));
        println!("  minimal prime: {}", names(&c.minimal_prime));

        for (kind, carrier, label) in [
            (SpectrumKind::Hull, &c.prime, "hull topology on the primes"),
            (SpectrumKind::Dual, &c.maximal, "dual topology on the maximals"),
            (SpectrumKind::Patch, &c.minimal_prime, "patch topology on the minimal primes"),
        ] {
            let sp = spectrum_topology(&fl, &c, carrier, kind, false).unwrap();
            let opens: Vec<String> = sp
                .topology
                .opens(64)
                .unwrap()
                .iter()
                .map(|o| sp.topology.set_label(o))
                .collect();
            println!("  {label}: {}", opens.join(" "));
        }
        println!();
    }
}
