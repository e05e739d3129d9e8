//! Finite topological spaces, continuous/open maps, local-homeomorphism
//! checking, open covers, and neighborhood posets.
//!
//! A finite topology is stored canonically by the minimal open neighborhood
//! of each point: a set `O` is open iff it contains the minimal neighborhood
//! of each of its points. This keeps membership, continuity, and openness
//! checks cheap even when the full open family is astronomically large (as it
//! is for stalk spaces), while the explicit family is still enumerable on
//! demand for small spaces.

use crate::bitset::{set_order, BitSet};
use crate::report::{Budget, Error, Result, ValidationReport};
use std::sync::Arc;

pub type SpaceRef = Arc<FinTopSpace>;

#[derive(Clone, Debug)]
pub struct FinTopSpace {
    pub points: Vec<String>,
    min_nbhd: Vec<BitSet>,
}

impl FinTopSpace {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Topology generated by an arbitrary family of sets (subbasis). The
    /// minimal neighborhood of `x` is the intersection of all members
    /// containing `x` (the whole space if there are none).
    pub fn from_subbasis(points: Vec<String>, sets: &[BitSet]) -> Self {
        let n = points.len();
        let mut min_nbhd = Vec::with_capacity(n);
        for x in 0..n {
            let mut m = BitSet::full(n);
            for s in sets {
                if s.contains(x) {
                    m = m.intersection(s);
                }
            }
            min_nbhd.push(m);
        }
        FinTopSpace { points, min_nbhd }
    }

    pub fn discrete(points: Vec<String>) -> Self {
        let n = points.len();
        let min_nbhd = (0..n).map(|i| BitSet::singleton(n, i)).collect();
        FinTopSpace { points, min_nbhd }
    }

    pub fn indiscrete(points: Vec<String>) -> Self {
        let n = points.len();
        FinTopSpace {
            points,
            min_nbhd: vec![BitSet::full(n); n],
        }
    }

    pub fn one_point(label: &str) -> Self {
        FinTopSpace::discrete(vec![label.to_string()])
    }

    /// Points `x`, `y` with opens `{}, {x}, {x,y}`.
    pub fn sierpinski() -> Self {
        let sets = [BitSet::from_indices(2, &[0])];
        FinTopSpace::from_subbasis(vec!["x".into(), "y".into()], &sets)
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn min_nbhd(&self, x: usize) -> &BitSet {
        &self.min_nbhd[x]
    }

    pub fn is_open(&self, o: &BitSet) -> bool {
        o.iter().all(|x| self.min_nbhd[x].is_subset(o))
    }

    pub fn empty_set(&self) -> BitSet {
        BitSet::new(self.n())
    }

    pub fn full_set(&self) -> BitSet {
        BitSet::full(self.n())
    }

    /// All opens, ordered by size then lexicographically. Fails on spaces
    /// whose open family exceeds the budget.
    pub fn opens(&self, budget: usize) -> Result<Vec<BitSet>> {
        let mut family: Vec<BitSet> = vec![self.empty_set()];
        let mut frontier = family.clone();
        let mut seen: std::collections::BTreeSet<Vec<usize>> =
            family.iter().map(|s| s.indices()).collect();
        while let Some(o) = frontier.pop() {
            for m in &self.min_nbhd {
                let u = o.union(m);
                if seen.insert(u.indices()) {
                    if family.len() + 1 > budget {
                        return Err(Error::Resource(format!(
                            "open family exceeds {budget} sets"
                        )));
                    }
                    family.push(u.clone());
                    frontier.push(u);
                }
            }
        }
        family.sort_by(set_order);
        Ok(family)
    }

    pub fn is_discrete(&self) -> bool {
        self.min_nbhd.iter().all(|m| m.len() == 1)
    }

    /// Finite Hausdorff means discrete.
    pub fn is_hausdorff(&self) -> bool {
        self.is_discrete()
    }

    /// Minimal neighborhood of `x` within the subspace `dom`.
    pub fn subspace_min_nbhd(&self, x: usize, dom: &BitSet) -> BitSet {
        self.min_nbhd[x].intersection(dom)
    }

    /// Specialization cover edges (q covers p when `U(p)` is the smallest
    /// proper refinement), for DOT export of the specialization order.
    pub fn specialization_edges(&self) -> Vec<(usize, usize)> {
        // p -> q iff q lies in every open containing p, i.e. q in U(p).
        let n = self.n();
        let below = |p: usize, q: usize| p != q && self.min_nbhd[p].contains(q);
        let mut edges = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if below(p, q) {
                    let between = (0..n).any(|r| below(p, r) && below(r, q));
                    if !between {
                        edges.push((p, q));
                    }
                }
            }
        }
        edges
    }

    pub fn set_label(&self, s: &BitSet) -> String {
        let mut out = String::from("{");
        for (k, i) in s.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&self.points[i]);
        }
        out.push('}');
        out
    }
}

pub struct TopologyValidation {
    pub report: ValidationReport,
    pub space: Option<SpaceRef>,
}

/// Checks the closure axioms on an explicit family of subsets. In the finite
/// case pairwise unions and intersections suffice.
pub fn validate_topology(points: &[String], opens: &[BitSet]) -> Result<TopologyValidation> {
    let n = points.len();
    {
        let mut seen = std::collections::BTreeSet::new();
        for p in points {
            if !seen.insert(p) {
                return Err(Error::Format(format!("duplicate point label '{p}'")));
            }
        }
    }
    for o in opens {
        if o.universe() != n {
            return Err(Error::Format(
                "open set defined over a different point universe".into(),
            ));
        }
    }
    let mut rep = ValidationReport::new("topology");
    let have: std::collections::BTreeSet<Vec<usize>> = opens.iter().map(|o| o.indices()).collect();
    let label = |s: &BitSet| {
        let mut out = String::from("{");
        for (k, i) in s.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&points[i]);
        }
        out.push('}');
        out
    };
    rep.check(
        "contains the empty set",
        have.contains(&Vec::new()),
        "missing {}",
    );
    rep.check(
        "contains the full point set",
        have.contains(&(0..n).collect::<Vec<_>>()),
        "missing the whole space",
    );
    let mut closed = true;
    'outer: for a in opens {
        for b in opens {
            let u = a.union(b);
            if !have.contains(&u.indices()) {
                rep.fail(
                    "closed under union",
                    format!("{} u {} = {} is missing", label(a), label(b), label(&u)),
                );
                closed = false;
                break 'outer;
            }
            let i = a.intersection(b);
            if !have.contains(&i.indices()) {
                rep.fail(
                    "closed under intersection",
                    format!("{} n {} = {} is missing", label(a), label(b), label(&i)),
                );
                closed = false;
                break 'outer;
            }
        }
    }
    if closed {
        rep.pass("closed under pairwise union and intersection");
    }
    let space = if rep.is_valid() {
        Some(Arc::new(FinTopSpace::from_subbasis(
            points.to_vec(),
            opens,
        )))
    } else {
        None
    };
    Ok(TopologyValidation { report: rep, space })
}

// ---------------------------------------------------------------------------
// Maps

#[derive(Clone, Debug)]
pub struct ContinuousMap {
    pub src: SpaceRef,
    pub dst: SpaceRef,
    pub map: Vec<usize>,
}

impl ContinuousMap {
    pub fn new(src: SpaceRef, dst: SpaceRef, map: Vec<usize>) -> Result<Self> {
        if map.len() != src.n() {
            return Err(Error::Format(format!(
                "map has length {} but the source has {} points",
                map.len(),
                src.n()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= dst.n()) {
            return Err(Error::Format(format!("image point {bad} out of range")));
        }
        Ok(ContinuousMap { src, dst, map })
    }
}

/// In a finite space a map is continuous iff it preserves specialization:
/// the image of each minimal neighborhood lands in the minimal neighborhood
/// of the image point.
pub fn is_continuous(src: &FinTopSpace, dst: &FinTopSpace, map: &[usize]) -> bool {
    (0..src.n()).all(|x| {
        src.min_nbhd(x)
            .iter()
            .all(|q| dst.min_nbhd(map[x]).contains(map[q]))
    })
}

/// Open iff the image of each minimal neighborhood is open.
pub fn is_open_map(src: &FinTopSpace, dst: &FinTopSpace, map: &[usize]) -> bool {
    (0..src.n()).all(|x| {
        let mut img = BitSet::new(dst.n());
        for q in src.min_nbhd(x).iter() {
            img.insert(map[q]);
        }
        dst.is_open(&img)
    })
}

/// Locally injective iff injective on each minimal neighborhood (a witness
/// neighborhood can always be shrunk to the minimal one).
pub fn is_locally_injective(src: &FinTopSpace, map: &[usize]) -> bool {
    (0..src.n()).all(|x| {
        let pts = src.min_nbhd(x).indices();
        let mut imgs: Vec<usize> = pts.iter().map(|&q| map[q]).collect();
        imgs.sort_unstable();
        imgs.dedup();
        imgs.len() == pts.len()
    })
}

/// Does `f` restrict to a homeomorphism from the open set `u` onto an open
/// image? Checks injectivity, openness of the image, and bicontinuity of the
/// restriction between the subspaces.
fn restricts_to_homeo_onto_open(
    src: &FinTopSpace,
    dst: &FinTopSpace,
    map: &[usize],
    u: &BitSet,
) -> bool {
    let pts = u.indices();
    let mut img = BitSet::new(dst.n());
    for &p in &pts {
        img.insert(map[p]);
    }
    if img.len() != pts.len() || !dst.is_open(&img) {
        return false;
    }
    // Forward continuity on the subspace.
    for &p in &pts {
        for q in src.subspace_min_nbhd(p, u).iter() {
            if !dst.subspace_min_nbhd(map[p], &img).contains(map[q]) {
                return false;
            }
        }
    }
    // Inverse continuity.
    let mut inv = std::collections::BTreeMap::new();
    for &p in &pts {
        inv.insert(map[p], p);
    }
    for (&y, &p) in &inv {
        for z in dst.subspace_min_nbhd(y, &img).iter() {
            if !src.subspace_min_nbhd(p, u).contains(inv[&z]) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapProperties {
    pub continuous: bool,
    pub open: bool,
    pub locally_injective: bool,
    /// Continuous and open and locally injective.
    pub local_homeomorphism: bool,
    /// Straight from the definition: every point has an open neighborhood on
    /// which the map is a homeomorphism onto an open set.
    pub local_homeomorphism_definitional: bool,
}

impl MapProperties {
    pub fn routes_agree(&self) -> bool {
        self.local_homeomorphism == self.local_homeomorphism_definitional
    }
}

/// Computes the four properties, with the local-homeomorphism verdict taken
/// both as the conjunction characterization and independently from the
/// definition. The definitional route scans every open neighborhood when the
/// open family fits the budget and otherwise uses the minimal neighborhood,
/// which suffices as a witness: any witness neighborhood restricts to it.
pub fn map_properties(f: &ContinuousMap, budget: &Budget) -> MapProperties {
    let (src, dst, map) = (&*f.src, &*f.dst, &f.map[..]);
    let continuous = is_continuous(src, dst, map);
    let open = is_open_map(src, dst, map);
    let locally_injective = is_locally_injective(src, map);
    let definitional = match src.opens(budget.opens) {
        Ok(opens) => (0..src.n()).all(|t| {
            opens
                .iter()
                .any(|u| u.contains(t) && restricts_to_homeo_onto_open(src, dst, map, u))
        }),
        Err(_) => (0..src.n())
            .all(|t| restricts_to_homeo_onto_open(src, dst, map, src.min_nbhd(t))),
    };
    MapProperties {
        continuous,
        open,
        locally_injective,
        local_homeomorphism: continuous && open && locally_injective,
        local_homeomorphism_definitional: definitional,
    }
}

// ---------------------------------------------------------------------------
// Covers

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    /// All families of open subsets of `O` whose union is `O`, including the
    /// empty family for the empty open.
    Strict,
    /// Nonempty families of nonempty opens; downstream compatibility checks
    /// skip empty overlaps.
    Paper,
}

/// Enumerates the covers of `O`, deduplicated as sets of sets, ordered
/// deterministically.
pub fn open_covers(
    space: &FinTopSpace,
    o: &BitSet,
    mode: CoverMode,
    budget: &Budget,
) -> Result<Vec<Vec<BitSet>>> {
    if !space.is_open(o) {
        return Err(Error::Precondition(format!(
            "{} is not open",
            space.set_label(o)
        )));
    }
    let opens = space.opens(budget.opens)?;
    let candidates: Vec<&BitSet> = opens
        .iter()
        .filter(|u| {
            u.is_subset(o) && (mode == CoverMode::Strict || !u.is_empty())
        })
        .collect();
    if candidates.len() > 20 {
        return Err(Error::Resource(format!(
            "cover enumeration over {} candidate opens is out of budget",
            candidates.len()
        )));
    }
    let mut out = Vec::new();
    let total = 1usize << candidates.len();
    if total > budget.cover_families {
        return Err(Error::Resource(format!(
            "cover enumeration would consider {total} families (budget {})",
            budget.cover_families
        )));
    }
    for mask in 0..total {
        let family: Vec<BitSet> = (0..candidates.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| candidates[i].clone())
            .collect();
        if mode == CoverMode::Paper && family.is_empty() {
            continue;
        }
        let mut union = BitSet::new(space.n());
        for u in &family {
            union = union.union(u);
        }
        if union == *o {
            out.push(family);
        }
    }
    // Candidates are distinct opens, so each mask is already a set of sets.
    Ok(out)
}

pub fn minimal_open_neighborhood(space: &FinTopSpace, x: usize) -> BitSet {
    space.min_nbhd(x).clone()
}

// ---------------------------------------------------------------------------
// Directed posets and neighborhood posets

#[derive(Clone, Debug)]
pub struct DirectedPoset {
    pub labels: Vec<String>,
    leq: Vec<bool>,
}

impl DirectedPoset {
    pub fn new(labels: Vec<String>, leq: Vec<bool>) -> Result<Self> {
        let n = labels.len();
        if leq.len() != n * n {
            return Err(Error::Format("leq relation has the wrong size".into()));
        }
        let p = DirectedPoset { labels, leq };
        for i in 0..n {
            if !p.leq(i, i) {
                return Err(Error::Format(format!("index order not reflexive at {i}")));
            }
            for j in 0..n {
                for k in 0..n {
                    if p.leq(i, j) && p.leq(j, k) && !p.leq(i, k) {
                        return Err(Error::Format("index order not transitive".into()));
                    }
                }
                if i != j && p.leq(i, j) && p.leq(j, i) {
                    return Err(Error::Format("index order not antisymmetric".into()));
                }
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.n() + j]
    }

    /// First common upper bound in index order, if any.
    pub fn upper_bound(&self, i: usize, j: usize) -> Option<usize> {
        (0..self.n()).find(|&k| self.leq(i, k) && self.leq(j, k))
    }

    pub fn upper_bounds(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&k| self.leq(i, k) && self.leq(j, k))
            .collect()
    }

    pub fn is_directed(&self) -> std::result::Result<(), (usize, usize)> {
        if self.n() == 0 {
            // Directedness requires an upper bound for the empty subset too.
            return Err((0, 0));
        }
        for i in 0..self.n() {
            for j in 0..self.n() {
                if self.upper_bound(i, j).is_none() {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    pub fn greatest(&self) -> Option<usize> {
        (0..self.n()).find(|&g| (0..self.n()).all(|i| self.leq(i, g)))
    }
}

/// Opens containing `X`, ordered by reverse inclusion (the smaller open is
/// the larger index-order element). Directedness is certified by exhibiting
/// the intersection as an upper bound.
pub fn neighborhood_poset(
    space: &FinTopSpace,
    x: &BitSet,
    budget: &Budget,
) -> Result<(DirectedPoset, Vec<BitSet>)> {
    let opens = space.opens(budget.opens)?;
    let nbhd: Vec<BitSet> = opens.into_iter().filter(|u| x.is_subset(u)).collect();
    let n = nbhd.len();
    let mut leq = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            leq[i * n + j] = nbhd[j].is_subset(&nbhd[i]);
        }
    }
    let poset = DirectedPoset::new(
        nbhd.iter().map(|u| space.set_label(u)).collect(),
        leq,
    )?;
    if let Err((i, j)) = poset.is_directed() {
        return Err(Error::Precondition(format!(
            "neighborhood poset is not directed at ({}, {})",
            poset.labels.get(i).cloned().unwrap_or_default(),
            poset.labels.get(j).cloned().unwrap_or_default()
        )));
    }
    // The witness upper bound of U, V is U n V; verify it is present.
    for i in 0..n {
        for j in 0..n {
            let inter = nbhd[i].intersection(&nbhd[j]);
            debug_assert!(nbhd.contains(&inter));
        }
    }
    Ok((poset, nbhd))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski_ref() -> SpaceRef {
        Arc::new(FinTopSpace::sierpinski())
    }

    #[test]
    fn sierpinski_family_is_valid() {
        let pts = vec!["x".to_string(), "y".to_string()];
        let opens = vec![
            BitSet::new(2),
            BitSet::from_indices(2, &[0]),
            BitSet::full(2),
        ];
        let v = validate_topology(&pts, &opens).unwrap();
        assert!(v.report.is_valid(), "{}", v.report);
        let s = v.space.unwrap();
        assert_eq!(s.opens(64).unwrap().len(), 3);
    }

    #[test]
    fn missing_union_is_reported() {
        let pts = vec!["x".to_string(), "y".to_string()];
        let opens = vec![
            BitSet::new(2),
            BitSet::from_indices(2, &[0]),
            BitSet::from_indices(2, &[1]),
        ];
        let v = validate_topology(&pts, &opens).unwrap();
        assert!(!v.report.is_valid());
    }

    #[test]
    fn discrete_topology_is_valid_and_hausdorff() {
        let s = FinTopSpace::discrete(vec!["a".into(), "b".into(), "c".into()]);
        assert_eq!(s.opens(64).unwrap().len(), 8);
        assert!(s.is_hausdorff());
    }

    #[test]
    fn minimal_neighborhoods_in_sierpinski() {
        let s = FinTopSpace::sierpinski();
        assert_eq!(minimal_open_neighborhood(&s, 0).indices(), vec![0]);
        assert_eq!(minimal_open_neighborhood(&s, 1).indices(), vec![0, 1]);
        // Contained in every open containing the point.
        for o in s.opens(64).unwrap() {
            for x in o.iter() {
                assert!(s.min_nbhd(x).is_subset(&o));
            }
        }
    }

    #[test]
    fn identity_on_sierpinski_is_a_local_homeomorphism() {
        let s = sierpinski_ref();
        let f = ContinuousMap::new(s.clone(), s.clone(), vec![0, 1]).unwrap();
        let p = map_properties(&f, &Budget::default());
        assert!(p.continuous && p.open && p.locally_injective && p.local_homeomorphism);
        assert!(p.routes_agree());
    }

    #[test]
    fn constant_map_to_closed_point_is_continuous_not_open() {
        // Oracle: direct preimage/image reasoning on two tiny spaces.
        let d2 = Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]));
        let s = sierpinski_ref();
        let f = ContinuousMap::new(d2, s, vec![1, 1]).unwrap();
        let p = map_properties(&f, &Budget::default());
        assert!(p.continuous);
        assert!(!p.open);
        assert!(!p.local_homeomorphism);
        assert!(p.routes_agree());
    }

    #[test]
    fn doubled_sierpinski_projection_is_a_local_homeomorphism() {
        // Two disjoint copies of the Sierpinski space projecting down.
        let sets = [
            BitSet::from_indices(4, &[0]),
            BitSet::from_indices(4, &[0, 1]),
            BitSet::from_indices(4, &[2]),
            BitSet::from_indices(4, &[2, 3]),
        ];
        let doubled = Arc::new(FinTopSpace::from_subbasis(
            vec!["x0".into(), "y0".into(), "x1".into(), "y1".into()],
            &sets,
        ));
        let s = sierpinski_ref();
        let f = ContinuousMap::new(doubled, s, vec![0, 1, 0, 1]).unwrap();
        let p = map_properties(&f, &Budget::default());
        assert!(p.local_homeomorphism && p.routes_agree());
    }

    #[test]
    fn characterization_matches_definition_on_all_small_maps() {
        // Exhaustive over all maps between small spaces, per the equivalence
        // of the two formulations.
        let spaces: Vec<SpaceRef> = vec![
            sierpinski_ref(),
            Arc::new(FinTopSpace::discrete(vec!["a".into(), "b".into()])),
            Arc::new(FinTopSpace::indiscrete(vec!["a".into(), "b".into(), "c".into()])),
            Arc::new(FinTopSpace::from_subbasis(
                vec!["a".into(), "b".into(), "c".into()],
                &[BitSet::from_indices(3, &[0]), BitSet::from_indices(3, &[0, 1])],
            )),
            Arc::new(FinTopSpace::from_subbasis(
                (0..5).map(|i| format!("p{i}")).collect(),
                &[
                    BitSet::from_indices(5, &[0]),
                    BitSet::from_indices(5, &[0, 1]),
                    BitSet::from_indices(5, &[2, 3]),
                    BitSet::from_indices(5, &[3]),
                ],
            )),
        ];
        let budget = Budget::default();
        for src in &spaces {
            for dst in &spaces {
                let total = dst.n().pow(src.n() as u32);
                for code in 0..total {
                    let mut c = code;
                    let map: Vec<usize> = (0..src.n())
                        .map(|_| {
                            let v = c % dst.n();
                            c /= dst.n();
                            v
                        })
                        .collect();
                    let f = ContinuousMap::new(src.clone(), dst.clone(), map).unwrap();
                    let p = map_properties(&f, &budget);
                    assert!(p.routes_agree(), "{:?} vs {:?}: {:?}", src, dst, p);
                }
            }
        }
    }

    #[test]
    fn composition_and_restriction_preserve_local_homeomorphisms() {
        // Exhaustive over all maps between a family of small spaces: whenever
        // f and g are local homeomorphisms, so are g o f and the restriction
        // of f to any open subspace.
        let budget = Budget::default();
        let spaces: Vec<SpaceRef> = vec![
            sierpinski_ref(),
            Arc::new(FinTopSpace::discrete(vec!["a".into(), "b".into()])),
            Arc::new(FinTopSpace::from_subbasis(
                vec!["x0".into(), "y0".into(), "x1".into(), "y1".into()],
                &[
                    BitSet::from_indices(4, &[0]),
                    BitSet::from_indices(4, &[0, 1]),
                    BitSet::from_indices(4, &[2]),
                    BitSet::from_indices(4, &[2, 3]),
                ],
            )),
        ];
        let all_maps = |src: &SpaceRef, dst: &SpaceRef| -> Vec<Vec<usize>> {
            let total = dst.n().pow(src.n() as u32);
            (0..total)
                .map(|code| {
                    let mut c = code;
                    (0..src.n())
                        .map(|_| {
                            let v = c % dst.n();
                            c /= dst.n();
                            v
                        })
                        .collect()
                })
                .collect()
        };
        for s1 in &spaces {
            for s2 in &spaces {
                for f in all_maps(s1, s2) {
                    let fm = ContinuousMap::new(s1.clone(), s2.clone(), f.clone()).unwrap();
                    if !map_properties(&fm, &budget).local_homeomorphism {
                        continue;
                    }
                    // Restriction to every open subspace stays one.
                    for u in s1.opens(64).unwrap() {
                        if u.is_empty() {
                            continue;
                        }
                        let pts = u.indices();
                        let sub_nbhd: Vec<BitSet> = pts
                            .iter()
                            .map(|&p| {
                                BitSet::from_indices(
                                    pts.len(),
                                    &s1.subspace_min_nbhd(p, &u)
                                        .iter()
                                        .map(|q| pts.iter().position(|&r| r == q).unwrap())
                                        .collect::<Vec<_>>(),
                                )
                            })
                            .collect();
                        let sub = Arc::new(FinTopSpace::from_subbasis(
                            pts.iter().map(|&p| s1.points[p].clone()).collect(),
                            &sub_nbhd,
                        ));
                        let fr = ContinuousMap::new(
                            sub,
                            s2.clone(),
                            pts.iter().map(|&p| f[p]).collect(),
                        )
                        .unwrap();
                        assert!(map_properties(&fr, &budget).local_homeomorphism);
                    }
                    for s3 in &spaces {
                        for g in all_maps(s2, s3) {
                            let gm = ContinuousMap::new(s2.clone(), s3.clone(), g.clone()).unwrap();
                            if !map_properties(&gm, &budget).local_homeomorphism {
                                continue;
                            }
                            let comp = ContinuousMap::new(
                                s1.clone(),
                                s3.clone(),
                                f.iter().map(|&x| g[x]).collect(),
                            )
                            .unwrap();
                            assert!(map_properties(&comp, &budget).local_homeomorphism);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn covers_of_sierpinski_top() {
        let s = FinTopSpace::sierpinski();
        let full = s.full_set();
        let strict = open_covers(&s, &full, CoverMode::Strict, &Budget::default()).unwrap();
        // Every cover of {x,y} must contain {x,y} itself.
        assert_eq!(strict.len(), 4);
        let paper = open_covers(&s, &full, CoverMode::Paper, &Budget::default()).unwrap();
        assert_eq!(paper.len(), 2);
        let x_only = BitSet::from_indices(2, &[0]);
        let paper_x = open_covers(&s, &x_only, CoverMode::Paper, &Budget::default()).unwrap();
        assert_eq!(paper_x.len(), 1);
        assert_eq!(paper_x[0], vec![x_only.clone()]);
    }

    #[test]
    fn covers_of_the_empty_open() {
        let s = FinTopSpace::sierpinski();
        let empty = s.empty_set();
        let strict = open_covers(&s, &empty, CoverMode::Strict, &Budget::default()).unwrap();
        assert_eq!(strict.len(), 2); // the empty family and {∅}
        assert!(strict.iter().any(|f| f.is_empty()));
        let paper = open_covers(&s, &empty, CoverMode::Paper, &Budget::default()).unwrap();
        assert!(paper.is_empty());
    }

    #[test]
    fn neighborhood_posets_in_sierpinski() {
        let s = FinTopSpace::sierpinski();
        let b = Budget::default();
        let (p_y, nb_y) = neighborhood_poset(&s, &BitSet::from_indices(2, &[1]), &b).unwrap();
        assert_eq!(nb_y.len(), 1);
        assert!(p_y.greatest().is_some());
        let (p_x, nb_x) = neighborhood_poset(&s, &BitSet::from_indices(2, &[0]), &b).unwrap();
        assert_eq!(nb_x.len(), 2);
        assert!(p_x.is_directed().is_ok());
        let (_, nb_all) = neighborhood_poset(&s, &s.empty_set(), &b).unwrap();
        assert_eq!(nb_all.len(), 3);
    }
}
