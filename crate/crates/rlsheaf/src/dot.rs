//! Deterministic DOT export: Hasse diagrams of algebras, specialization
//! orders of spaces, filter lattices, and étalé spaces with stalks grouped
//! by fiber. Node ordering is stable so identical inputs yield identical
//! bytes.

use crate::algebra::FinResLat;
use crate::etale::EtaleSpace;
use crate::spectra::FilterLattice;
use crate::topology::FinTopSpace;
use std::fmt::Write;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Hasse diagram of the order of an algebra (edges point upward).
pub fn hasse_dot(a: &FinResLat) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&a.name));
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=circle];");
    for e in &a.elems {
        let _ = writeln!(out, "  {};", quote(e));
    }
    for (x, y) in a.cover_pairs() {
        let _ = writeln!(out, "  {} -> {};", quote(&a.elems[x]), quote(&a.elems[y]));
    }
    let _ = writeln!(out, "}}");
    out
}

/// Specialization order of a finite space.
pub fn topology_dot(s: &FinTopSpace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph specialization {{");
    let _ = writeln!(out, "  rankdir=BT;");
    for p in &s.points {
        let _ = writeln!(out, "  {};", quote(p));
    }
    for (p, q) in s.specialization_edges() {
        let _ = writeln!(out, "  {} -> {};", quote(&s.points[p]), quote(&s.points[q]));
    }
    let _ = writeln!(out, "}}");
    out
}

/// Inclusion order of the filter lattice, nodes named F1..Fk with their
/// member sets.
pub fn filter_lattice_dot(fl: &FilterLattice) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph filters {{");
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=box];");
    for i in 0..fl.filters.len() {
        let _ = writeln!(
            out,
            "  {} [label={}];",
            quote(&fl.name(i)),
            quote(&format!("{} = {}", fl.name(i), fl.filters[i].label()))
        );
    }
    for (i, j) in fl.cover_edges() {
        let _ = writeln!(out, "  {} -> {};", quote(&fl.name(i)), quote(&fl.name(j)));
    }
    let _ = writeln!(out, "}}");
    out
}

/// Total space of an étalé space: one cluster per base point (the stalks as
/// columns), total points colored by fiber, plus dashed edges tracing each
/// basis open supplied by the caller.
pub fn etale_dot(e: &EtaleSpace, basis: &[(String, Vec<usize>)]) -> String {
    const PALETTE: [&str; 6] = [
        "lightblue",
        "lightyellow",
        "lightpink",
        "lightgreen",
        "lavender",
        "mistyrose",
    ];
    let mut out = String::new();
    let _ = writeln!(out, "digraph etale {{");
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [shape=ellipse, style=filled];");
    for b in 0..e.base.n() {
        let _ = writeln!(out, "  subgraph cluster_{b} {{");
        let _ = writeln!(out, "    label={};", quote(&e.base.points[b]));
        for &t in &e.fibers[b] {
            let _ = writeln!(
                out,
                "    {} [fillcolor={}];",
                quote(&e.total.points[t]),
                PALETTE[b % PALETTE.len()]
            );
        }
        let _ = writeln!(out, "  }}");
    }
    for (name, pts) in basis {
        for w in pts.windows(2) {
            let _ = writeln!(
                out,
                "  {} -> {} [style=dashed, dir=none, label={}];",
                quote(&e.total.points[w[0]]),
                quote(&e.total.points[w[1]]),
                quote(name)
            );
        }
    }
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::report::Budget;
    use crate::spectra::enumerate_filters;

    #[test]
    fn a6_hasse_has_six_nodes_and_six_cover_edges() {
        let dot = hasse_dot(&fixtures::a6());
        assert_eq!(dot.matches(" -> ").count(), 6);
        for e in ["0", "a", "b", "c", "d", "1"] {
            assert!(dot.contains(&format!("\"{e}\"")));
        }
    }

    #[test]
    fn a8_filter_lattice_has_five_nodes() {
        let fl = enumerate_filters(&fixtures::a8(), &Budget::default()).unwrap();
        let dot = filter_lattice_dot(&fl);
        assert_eq!(dot.matches("label=\"F").count(), 5);
    }

    #[test]
    fn dot_output_is_deterministic() {
        let a = fixtures::a4();
        assert_eq!(hasse_dot(&a), hasse_dot(&a));
        let s = FinTopSpace::sierpinski();
        assert_eq!(topology_dot(&s), topology_dot(&s));
    }
}
