//! Filter enumeration, generated filters, prime/maximal/minimal-prime
//! classification, and hull-kernel/dual/patch topologies on sets of prime
//! filters.

use crate::algebra::{AlgRef, FilterSubset};
use crate::bitset::BitSet;
use crate::report::{Budget, Error, Result};
use crate::topology::FinTopSpace;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Least filter containing `x`: upward closure of products, iterated to a
/// fixed point.
pub fn generated_filter(a: &AlgRef, x: &BitSet) -> FilterSubset {
    let n = a.n();
    let mut members = BitSet::new(n);
    members.insert(a.top);
    for i in x.iter() {
        members.insert(i);
    }
    loop {
        let mut next = members.clone();
        for i in members.iter() {
            for j in members.iter() {
                next.insert(a.prod(i, j));
            }
            for j in 0..n {
                next.insert(a.join(i, j));
            }
        }
        if next == members {
            break;
        }
        members = next;
    }
    FilterSubset::new(a.clone(), members)
}

/// The complete lattice of filters: meet is intersection, join is the filter
/// generated by the union.
pub struct FilterLattice {
    pub parent: AlgRef,
    pub filters: Vec<FilterSubset>,
}

impl FilterLattice {
    pub fn index_of(&self, members: &BitSet) -> Option<usize> {
        self.filters.iter().position(|f| f.members == *members)
    }

    /// Paper-style name, 1-based in the deterministic order.
    pub fn name(&self, i: usize) -> String {
        format!("F{}", i + 1)
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        let m = self.filters[i].members.intersection(&self.filters[j].members);
        self.index_of(&m).expect("filters are closed under intersection")
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        let u = self.filters[i].members.union(&self.filters[j].members);
        let g = generated_filter(&self.parent, &u);
        self.index_of(&g.members).expect("filters are closed under generated join")
    }

    /// Cover edges of the inclusion order, for DOT export.
    pub fn cover_edges(&self) -> Vec<(usize, usize)> {
        let below = |i: usize, j: usize| {
            i != j && self.filters[i].members.is_subset(&self.filters[j].members)
        };
        let mut edges = Vec::new();
        for i in 0..self.filters.len() {
            for j in 0..self.filters.len() {
                if below(i, j) && !(0..self.filters.len()).any(|k| below(i, k) && below(k, j)) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }
}

/// Every filter of a finite integral residuated lattice is the up-set of its
/// least element (the product of all members), so enumeration walks the
/// closure of single-generator extensions. The listing order pins the F1..Fk
/// names: the trivial filter {1} first, the improper filter last, and the
/// proper ones in between by their least element's index.
pub fn enumerate_filters(a: &AlgRef, budget: &Budget) -> Result<FilterLattice> {
    if a.n() > budget.filter_algebra {
        return Err(Error::Resource(format!(
            "filter enumeration limited to algebras of size {}, got {}",
            budget.filter_algebra,
            a.n()
        )));
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut found: Vec<FilterSubset> = Vec::new();
    let top_only = generated_filter(a, &BitSet::new(a.n()));
    seen.insert(top_only.members.indices());
    let mut frontier = vec![top_only.members.clone()];
    found.push(top_only);
    while let Some(f) = frontier.pop() {
        for x in 0..a.n() {
            if f.contains(x) {
                continue;
            }
            let mut gen = f.clone();
            gen.insert(x);
            let g = generated_filter(a, &gen);
            if seen.insert(g.members.indices()) {
                frontier.push(g.members.clone());
                found.push(g);
            }
        }
    }
    let sort_key = |f: &FilterSubset| {
        let least = f.members.min_index().expect("filters are nonempty");
        let band = if least == a.top {
            0
        } else if least == a.bot {
            2
        } else {
            1
        };
        (band, least, f.members.len(), f.members.indices())
    };
    found.sort_by_key(sort_key);
    for f in &found {
        debug_assert!(f.is_filter());
    }
    Ok(FilterLattice {
        parent: a.clone(),
        filters: found,
    })
}

#[derive(Clone, Debug)]
pub struct Classification {
    /// Indices into the filter lattice's listing.
    pub prime: Vec<usize>,
    pub maximal: Vec<usize>,
    pub minimal_prime: Vec<usize>,
}

pub fn classify_filters(fl: &FilterLattice) -> Classification {
    let a = &fl.parent;
    let is_prime = |f: &FilterSubset| {
        f.is_proper()
            && (0..a.n()).all(|x| {
                (0..a.n()).all(|y| {
                    !f.members.contains(a.join(x, y))
                        || f.members.contains(x)
                        || f.members.contains(y)
                })
            })
    };
    let prime: Vec<usize> = (0..fl.filters.len())
        .filter(|&i| is_prime(&fl.filters[i]))
        .collect();
    let maximal: Vec<usize> = (0..fl.filters.len())
        .filter(|&i| {
            fl.filters[i].is_proper()
                && !(0..fl.filters.len()).any(|j| {
                    j != i
                        && fl.filters[j].is_proper()
                        && fl.filters[i].members.is_subset(&fl.filters[j].members)
                })
        })
        .collect();
    let minimal_prime: Vec<usize> = prime
        .iter()
        .copied()
        .filter(|&i| {
            !prime.iter().any(|&j| {
                j != i && fl.filters[j].members.is_subset(&fl.filters[i].members)
            })
        })
        .collect();
    assert!(
        maximal.iter().all(|m| prime.contains(m)),
        "maximal filters must be prime"
    );
    Classification {
        prime,
        maximal,
        minimal_prime,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Hull,
    Dual,
    Patch,
}

impl SpectrumKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hull" => Some(SpectrumKind::Hull),
            "dual" => Some(SpectrumKind::Dual),
            "patch" => Some(SpectrumKind::Patch),
            _ => None,
        }
    }
}

pub struct SpectrumSpace {
    pub parent: AlgRef,
    /// Positions into the filter lattice listing; point i of the topology
    /// is the filter at position i of this carrier.
    pub carrier: Vec<usize>,
    pub kind: SpectrumKind,
    pub topology: Arc<FinTopSpace>,
}

/// `h(x) = { P in carrier | x in P }` restricted to the carrier.
fn hull_sets(fl: &FilterLattice, carrier: &[usize]) -> Vec<BitSet> {
    let a = &fl.parent;
    (0..a.n())
        .map(|x| {
            BitSet::from_indices(
                carrier.len(),
                &carrier
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| fl.filters[f].members.contains(x))
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

/// Builds the chosen topology on a carrier of prime filters. For the hull
/// kind the sets `h(x)` are taken as an open basis by default; passing
/// `hull_closed_basis` instead treats them as a closed basis (the diagnostic
/// variant).
pub fn spectrum_topology(
    fl: &FilterLattice,
    classification: &Classification,
    carrier: &[usize],
    kind: SpectrumKind,
    hull_closed_basis: bool,
) -> Result<SpectrumSpace> {
    for &c in carrier {
        if !classification.prime.contains(&c) {
            return Err(Error::Precondition(format!(
                "carrier member {} is not a prime filter",
                fl.name(c)
            )));
        }
    }
    let m = carrier.len();
    let h = hull_sets(fl, carrier);
    let d: Vec<BitSet> = h.iter().map(|s| s.complement()).collect();
    let subbasis: Vec<BitSet> = match kind {
        SpectrumKind::Hull => h,
        SpectrumKind::Dual => d,
        SpectrumKind::Patch => h.into_iter().chain(d).collect(),
    };
    let points: Vec<String> = carrier.iter().map(|&c| fl.name(c)).collect();
    let topology = if kind == SpectrumKind::Hull && hull_closed_basis {
        // Closed family generated by the h-sets: close under union and
        // intersection, seed with the empty set and the carrier; opens are
        // the complements.
        let mut closed: Vec<BitSet> = vec![BitSet::new(m), BitSet::full(m)];
        for s in &subbasis {
            if !closed.contains(s) {
                closed.push(s.clone());
            }
        }
        loop {
            let mut grew = false;
            let snapshot = closed.clone();
            for a1 in &snapshot {
                for b1 in &snapshot {
                    for c in [a1.union(b1), a1.intersection(b1)] {
                        if !closed.contains(&c) {
                            closed.push(c);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let opens: Vec<BitSet> = closed.iter().map(|c| c.complement()).collect();
        Arc::new(FinTopSpace::from_subbasis(points, &opens))
    } else {
        Arc::new(FinTopSpace::from_subbasis(points, &subbasis))
    };
    Ok(SpectrumSpace {
        parent: fl.parent.clone(),
        carrier: carrier.to_vec(),
        kind,
        topology,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn filters_as_label_sets(fl: &FilterLattice) -> Vec<Vec<String>> {
        fl.filters
            .iter()
            .map(|f| f.members.iter().map(|i| fl.parent.label(i).to_string()).collect())
            .collect()
    }

    #[test]
    fn filters_of_a4() {
        let fl = enumerate_filters(&fixtures::a4(), &Budget::default()).unwrap();
        assert_eq!(
            filters_as_label_sets(&fl),
            vec![
                vec!["1".to_string()],
                vec!["a".to_string(), "1".to_string()],
                vec!["b".to_string(), "1".to_string()],
                vec!["0".to_string(), "a".to_string(), "b".to_string(), "1".to_string()],
            ]
        );
    }

    #[test]
    fn filters_of_a6() {
        let fl = enumerate_filters(&fixtures::a6(), &Budget::default()).unwrap();
        let sets = filters_as_label_sets(&fl);
        assert_eq!(sets.len(), 5);
        assert_eq!(sets[0], vec!["1"]);
        assert_eq!(sets[1], vec!["a", "b", "d", "1"]);
        assert_eq!(sets[2], vec!["c", "d", "1"]);
        assert_eq!(sets[3], vec!["d", "1"]);
        assert_eq!(sets[4], vec!["0", "a", "b", "c", "d", "1"]);
    }

    #[test]
    fn filters_of_a8() {
        let fl = enumerate_filters(&fixtures::a8(), &Budget::default()).unwrap();
        let sets = filters_as_label_sets(&fl);
        assert_eq!(sets.len(), 5);
        assert_eq!(sets[1], vec!["a", "c", "d", "e", "f", "1"]);
        assert_eq!(sets[2], vec!["c", "e", "1"]);
        assert_eq!(sets[3], vec!["f", "1"]);
    }

    #[test]
    fn one_element_algebra_has_one_filter() {
        let fl = enumerate_filters(&crate::algebra::one_element("T"), &Budget::default()).unwrap();
        assert_eq!(fl.filters.len(), 1);
    }

    #[test]
    fn no_subset_outside_the_listing_is_a_filter() {
        // Exhaustive complement scan.
        for a in [fixtures::a4(), fixtures::a6(), fixtures::a8()] {
            let fl = enumerate_filters(&a, &Budget::default()).unwrap();
            let listed: BTreeSet<Vec<usize>> =
                fl.filters.iter().map(|f| f.members.indices()).collect();
            for mask in 0u32..(1 << a.n()) {
                let s = BitSet::from_indices(
                    a.n(),
                    &(0..a.n()).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>(),
                );
                let fs = FilterSubset::new(a.clone(), s.clone());
                assert_eq!(
                    fs.is_filter(),
                    listed.contains(&s.indices()),
                    "subset {:?} of {}",
                    s.indices(),
                    a.name
                );
            }
        }
    }

    #[test]
    fn generated_filter_examples() {
        // Oracle: fixed-point closure, which is the implementation itself;
        // cross-checked against membership expectations from the tables.
        let a4 = fixtures::a4();
        let g = generated_filter(&a4, &BitSet::singleton(4, a4.index_of("a").unwrap()));
        assert_eq!(g.members.indices(), vec![a4.index_of("a").unwrap(), a4.index_of("1").unwrap()]);
        let e = generated_filter(&a4, &BitSet::new(4));
        assert_eq!(e.members.indices(), vec![a4.top]);
        let a8 = fixtures::a8();
        let gf = generated_filter(&a8, &BitSet::singleton(8, a8.index_of("f").unwrap()));
        assert_eq!(
            gf.members.indices(),
            vec![a8.index_of("f").unwrap(), a8.index_of("1").unwrap()]
        );
    }

    #[test]
    fn filter_lattice_laws() {
        let a = fixtures::a6();
        let fl = enumerate_filters(&a, &Budget::default()).unwrap();
        for i in 0..fl.filters.len() {
            for j in 0..fl.filters.len() {
                let m = fl.meet(i, j);
                let jn = fl.join(i, j);
                assert!(fl.filters[m].members.is_subset(&fl.filters[i].members));
                assert!(fl.filters[i].members.is_subset(&fl.filters[jn].members));
                // Generated join is the least filter containing the union.
                for k in 0..fl.filters.len() {
                    if fl.filters[i].members.is_subset(&fl.filters[k].members)
                        && fl.filters[j].members.is_subset(&fl.filters[k].members)
                    {
                        assert!(fl.filters[jn].members.is_subset(&fl.filters[k].members));
                    }
                }
            }
        }
    }

    #[test]
    fn classification_of_a4_a6_a8() {
        let cases: Vec<(AlgRef, Vec<usize>, Vec<usize>)> = vec![
            // (algebra, maximal as F-numbers, minimal prime as F-numbers)
            (fixtures::a4(), vec![2, 3], vec![2, 3]),
            (fixtures::a6(), vec![2, 3], vec![1]),
            (fixtures::a8(), vec![2], vec![3, 4]),
        ];
        for (a, max_names, min_names) in cases {
            let fl = enumerate_filters(&a, &Budget::default()).unwrap();
            let c = classify_filters(&fl);
            let to_names = |v: &Vec<usize>| v.iter().map(|&i| i + 1).collect::<Vec<_>>();
            assert_eq!(to_names(&c.maximal), max_names, "{}", a.name);
            assert_eq!(to_names(&c.minimal_prime), min_names, "{}", a.name);
        }
    }

    #[test]
    fn two_chain_classification_is_trivial() {
        let two = crate::algebra::lukasiewicz_chain(1);
        let fl = enumerate_filters(&two, &Budget::default()).unwrap();
        let c = classify_filters(&fl);
        assert_eq!(c.prime.len(), 1);
        assert_eq!(c.prime, c.maximal);
        assert_eq!(c.prime, c.minimal_prime);
    }

    #[test]
    fn spec_h_of_a4_is_discrete_on_two_points() {
        let a = fixtures::a4();
        let fl = enumerate_filters(&a, &Budget::default()).unwrap();
        let c = classify_filters(&fl);
        let sp = spectrum_topology(&fl, &c, &c.prime, SpectrumKind::Hull, false).unwrap();
        let opens = sp.topology.opens(64).unwrap();
        assert_eq!(opens.len(), 4);
    }

    #[test]
    fn hull_basis_is_monotone() {
        // Filters are upward closed, so x <= y forces h(x) into h(y).
        let a = fixtures::a8();
        let fl = enumerate_filters(&a, &Budget::default()).unwrap();
        let c = classify_filters(&fl);
        let h = hull_sets(&fl, &c.prime);
        for x in 0..a.n() {
            for y in 0..a.n() {
                if a.leq(x, y) {
                    assert!(h[x].is_subset(&h[y]));
                }
            }
        }
    }

    #[test]
    fn non_prime_carrier_is_rejected() {
        let a = fixtures::a4();
        let fl = enumerate_filters(&a, &Budget::default()).unwrap();
        let c = classify_filters(&fl);
        // F1 = {1} is not prime in A4.
        assert!(matches!(
            spectrum_topology(&fl, &c, &[0], SpectrumKind::Hull, false),
            Err(Error::Precondition(_))
        ));
    }
}
