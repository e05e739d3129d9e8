//! Direct systems of residuated lattices over directed posets, the direct
//! limit, and germs/stalks of presheaves.
//!
//! The stalk at a point is the directed colimit of the values over the
//! neighborhood poset under reverse inclusion. In a finite space the minimal
//! open neighborhood is a greatest index, so the stalk is also just the value
//! there; both computations run and their agreement is asserted.

use crate::algebra::{self, check_morphism, AlgRef, FinResLat, RLMorphism, BINARY_OPS};
use crate::presheaf::Presheaf;
use crate::report::{Budget, Error, Result, ValidationReport};
use crate::topology::DirectedPoset;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Algebras indexed by a directed poset with transition morphisms for every
/// related pair. Identities are filled in automatically.
pub struct DirectSystem {
    pub index: DirectedPoset,
    pub algebras: Vec<AlgRef>,
    transitions: BTreeMap<(usize, usize), Vec<usize>>,
}

impl DirectSystem {
    pub fn new(
        index: DirectedPoset,
        algebras: Vec<AlgRef>,
        mut transitions: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self> {
        let m = index.n();
        if algebras.len() != m {
            return Err(Error::Format("one algebra per index is required".into()));
        }
        for i in 0..m {
            transitions
                .entry((i, i))
                .or_insert_with(|| (0..algebras[i].n()).collect());
        }
        for i in 0..m {
            for j in 0..m {
                if index.leq(i, j) {
                    match transitions.get(&(i, j)) {
                        None => {
                            return Err(Error::Format(format!(
                                "missing transition {} -> {}",
                                index.labels[i], index.labels[j]
                            )))
                        }
                        Some(t) if t.len() != algebras[i].n() => {
                            return Err(Error::Format(format!(
                                "transition {} -> {} has the wrong arity",
                                index.labels[i], index.labels[j]
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(DirectSystem {
            index,
            algebras,
            transitions,
        })
    }

    pub fn transition(&self, i: usize, j: usize) -> &[usize] {
        &self.transitions[&(i, j)]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new("direct system");
        rep.check(
            "index poset is directed",
            self.index.is_directed().is_ok(),
            "a pair of indices has no upper bound",
        );
        let mut id_ok = true;
        for i in 0..self.index.n() {
            if self.transition(i, i) != (0..self.algebras[i].n()).collect::<Vec<_>>() {
                rep.fail("identity condition", format!("h at {} is not the identity", i));
                id_ok = false;
            }
        }
        if id_ok {
            rep.pass("identity condition");
        }
        let mut compat_ok = true;
        'compat: for i in 0..self.index.n() {
            for j in 0..self.index.n() {
                for k in 0..self.index.n() {
                    if self.index.leq(i, j) && self.index.leq(j, k) {
                        let direct = self.transition(i, k);
                        let through: Vec<usize> = self
                            .transition(i, j)
                            .iter()
                            .map(|&x| self.transition(j, k)[x])
                            .collect();
                        if direct != through {
                            rep.fail(
                                "compatibility condition",
                                format!(
                                    "{} -> {} -> {} differs from the direct transition",
                                    self.index.labels[i], self.index.labels[j], self.index.labels[k]
                                ),
                            );
                            compat_ok = false;
                            break 'compat;
                        }
                    }
                }
            }
        }
        if compat_ok {
            rep.pass("compatibility condition");
        }
        let mut morph_ok = true;
        for (&(i, j), table) in &self.transitions {
            let f = RLMorphism {
                src: self.algebras[i].clone(),
                dst: self.algebras[j].clone(),
                map: table.clone(),
            };
            if !check_morphism(&f).report.is_valid() {
                rep.fail(
                    "transitions are morphisms",
                    format!("{} -> {}", self.index.labels[i], self.index.labels[j]),
                );
                morph_ok = false;
            }
        }
        if morph_ok {
            rep.pass("transitions are morphisms");
        }
        rep
    }

    /// The defining equivalence: `(i, x) ~ (j, y)` iff some common upper
    /// bound maps them to the same element.
    pub fn equivalent(&self, i: usize, x: usize, j: usize, y: usize) -> bool {
        self.index
            .upper_bounds(i, j)
            .into_iter()
            .any(|k| self.transition(i, k)[x] == self.transition(j, k)[y])
    }
}

pub struct DirectLimit {
    pub algebra: AlgRef,
    /// `injections[i]` maps the i-th system algebra into the limit.
    pub injections: Vec<RLMorphism>,
    /// Canonical representative per limit element.
    pub class_reps: Vec<(usize, usize)>,
}

/// Quotient of the disjoint union by the eventual-equality relation, with
/// operations lifted to a common upper bound. Canonical representatives sit
/// in the greatest-index algebra when one exists, else the least
/// (index, element) pair.
pub fn direct_limit(s: &DirectSystem) -> Result<DirectLimit> {
    if let Err((i, j)) = s.index.is_directed() {
        return Err(Error::Precondition(format!(
            "index poset is not directed at ({}, {})",
            s.index.labels.get(i).cloned().unwrap_or_default(),
            s.index.labels.get(j).cloned().unwrap_or_default()
        )));
    }
    let m = s.index.n();
    let offsets: Vec<usize> = {
        let mut o = vec![0usize];
        for a in &s.algebras {
            o.push(o.last().unwrap() + a.n());
        }
        o
    };
    let total = offsets[m];

    // Union-find seeded by the transition edges; directedness makes its
    // closure coincide with the eventual-equality relation.
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..m {
        for j in 0..m {
            if i != j && s.index.leq(i, j) {
                let t = s.transition(i, j);
                for x in 0..s.algebras[i].n() {
                    let a = find(&mut parent, offsets[i] + x);
                    let b = find(&mut parent, offsets[j] + t[x]);
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }

    // Canonical representatives and class ids.
    let greatest = s.index.greatest();
    let mut root_to_class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class_reps: Vec<(usize, usize)> = Vec::new();
    match greatest {
        Some(g) => {
            for x in 0..s.algebras[g].n() {
                let r = find(&mut parent, offsets[g] + x);
                root_to_class.entry(r).or_insert_with(|| {
                    class_reps.push((g, x));
                    class_reps.len() - 1
                });
            }
        }
        None => {
            for i in 0..m {
                for x in 0..s.algebras[i].n() {
                    let r = find(&mut parent, offsets[i] + x);
                    root_to_class.entry(r).or_insert_with(|| {
                        class_reps.push((i, x));
                        class_reps.len() - 1
                    });
                }
            }
        }
    }
    // Every element must belong to a registered class (with a greatest index
    // this is automatic).
    for i in 0..m {
        for x in 0..s.algebras[i].n() {
            let r = find(&mut parent, offsets[i] + x);
            if !root_to_class.contains_key(&r) {
                return Err(Error::Precondition(
                    "an element misses every canonical class; the system is not directed".into(),
                ));
            }
        }
    }
    let n = class_reps.len();
    let class_of = |parent: &mut Vec<usize>, i: usize, x: usize| -> usize {
        let r = find(parent, offsets[i] + x);
        root_to_class[&r]
    };

    let mut elems = Vec::with_capacity(n);
    for &(i, x) in &class_reps {
        elems.push(format!("[{}@{}]", s.algebras[i].label(x), s.index.labels[i]));
    }
    let mut tables: BTreeMap<algebra::Op, Vec<usize>> = BTreeMap::new();
    for op in BINARY_OPS {
        tables.insert(op, vec![0; n * n]);
    }
    let mut leq = vec![false; n * n];
    let mut parent_mut = parent;
    for a in 0..n {
        for bq in 0..n {
            let (i, x) = class_reps[a];
            let (j, y) = class_reps[bq];
            let k = s
                .index
                .upper_bound(i, j)
                .expect("directedness was checked");
            let xk = s.transition(i, k)[x];
            let yk = s.transition(j, k)[y];
            for op in BINARY_OPS {
                let r = s.algebras[k].apply(op, xk, yk);
                tables.get_mut(&op).unwrap()[a * n + bq] = class_of(&mut parent_mut, k, r);
            }
            leq[a * n + bq] = s.algebras[k].leq(xk, yk);
        }
    }
    let (i0, x0) = class_reps[0];
    let bot = class_of(&mut parent_mut, i0, s.algebras[i0].bot);
    let top = class_of(&mut parent_mut, i0, s.algebras[i0].top);
    let _ = x0;
    let alg = FinResLat::from_parts(
        "colimit".to_string(),
        elems,
        leq,
        tables[&algebra::Op::Join].clone(),
        tables[&algebra::Op::Meet].clone(),
        tables[&algebra::Op::Prod].clone(),
        tables[&algebra::Op::Imp].clone(),
        bot,
        top,
    );
    let rep = algebra::revalidate(&alg);
    if !rep.is_valid() {
        return Err(Error::Precondition(format!(
            "colimit of an invalid system: {}",
            rep.first_failure().map(|c| c.name.clone()).unwrap_or_default()
        )));
    }
    let alg = Arc::new(alg);
    let mut injections = Vec::with_capacity(m);
    for i in 0..m {
        let map: Vec<usize> = (0..s.algebras[i].n())
            .map(|x| class_of(&mut parent_mut, i, x))
            .collect();
        injections.push(RLMorphism {
            src: s.algebras[i].clone(),
            dst: alg.clone(),
            map,
        });
    }
    Ok(DirectLimit {
        algebra: alg,
        injections,
        class_reps,
    })
}

/// Verifies the directed-colimit characterization of a candidate cocone:
/// joint surjectivity and eventual-equality separation. For each supplied
/// test cocone the unique factoring morphism is exhibited (or the report
/// carries the counterexample).
pub fn check_colimit_universal(
    s: &DirectSystem,
    candidate: &AlgRef,
    cocone: &[RLMorphism],
    test_cocones: &[(AlgRef, Vec<RLMorphism>)],
) -> Result<ValidationReport> {
    if cocone.len() != s.index.n() {
        return Err(Error::Precondition("one cocone leg per index is required".into()));
    }
    for i in 0..s.index.n() {
        for j in 0..s.index.n() {
            if s.index.leq(i, j) {
                let through: Vec<usize> = (0..s.algebras[i].n())
                    .map(|x| cocone[j].map[s.transition(i, j)[x]])
                    .collect();
                if through != cocone[i].map {
                    return Err(Error::Precondition(format!(
                        "candidate cocone is incompatible along {} -> {}",
                        s.index.labels[i], s.index.labels[j]
                    )));
                }
            }
        }
    }
    let mut rep = ValidationReport::new("colimit universal property");
    let mut hit = vec![false; candidate.n()];
    for leg in cocone {
        for &v in &leg.map {
            hit[v] = true;
        }
    }
    rep.check(
        "joint surjectivity",
        hit.iter().all(|&h| h),
        format!(
            "element {} is not in the image of any leg",
            hit.iter().position(|&h| !h).unwrap_or(0)
        ),
    );
    let mut sep_ok = true;
    'sep: for i in 0..s.index.n() {
        for j in 0..s.index.n() {
            for x in 0..s.algebras[i].n() {
                for y in 0..s.algebras[j].n() {
                    if cocone[i].map[x] == cocone[j].map[y] && !s.equivalent(i, x, j, y) {
                        rep.fail(
                            "separation (eventual equality)",
                            format!(
                                "legs identify {}@{} and {}@{} although no upper bound merges them",
                                s.algebras[i].label(x),
                                s.index.labels[i],
                                s.algebras[j].label(y),
                                s.index.labels[j]
                            ),
                        );
                        sep_ok = false;
                        break 'sep;
                    }
                }
            }
        }
    }
    if sep_ok {
        rep.pass("separation (eventual equality)");
    }
    for (ti, (target, legs)) in test_cocones.iter().enumerate() {
        if legs.len() != s.index.n() {
            return Err(Error::Precondition("test cocone has the wrong arity".into()));
        }
        for i in 0..s.index.n() {
            for j in 0..s.index.n() {
                if s.index.leq(i, j) {
                    let through: Vec<usize> = (0..s.algebras[i].n())
                        .map(|x| legs[j].map[s.transition(i, j)[x]])
                        .collect();
                    if through != legs[i].map {
                        return Err(Error::Precondition(format!(
                            "test cocone {ti} is incompatible along {} -> {}",
                            s.index.labels[i], s.index.labels[j]
                        )));
                    }
                }
            }
        }
        // The factoring morphism is forced on the image: h(psi_i(x)) = leg_i(x).
        let mut h = vec![usize::MAX; candidate.n()];
        let mut well_defined = true;
        for i in 0..s.index.n() {
            for x in 0..s.algebras[i].n() {
                let c = cocone[i].map[x];
                let v = legs[i].map[x];
                if h[c] == usize::MAX {
                    h[c] = v;
                } else if h[c] != v {
                    well_defined = false;
                }
            }
        }
        if !well_defined || h.contains(&usize::MAX) {
            rep.fail(
                format!("test cocone {ti}: unique factorization"),
                "no single-valued factoring map exists",
            );
            continue;
        }
        let f = RLMorphism {
            src: candidate.clone(),
            dst: target.clone(),
            map: h,
        };
        rep.check(
            format!("test cocone {ti}: unique factorization"),
            check_morphism(&f).report.is_valid(),
            "the forced factoring map is not a morphism",
        );
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Stalks and germs of presheaves

pub struct Stalk {
    pub point: usize,
    /// Open index (into the presheaf's listing) of the minimal neighborhood.
    pub min_open: usize,
    /// Stalk algebra; carried by the value on the minimal neighborhood.
    pub algebra: AlgRef,
    /// For each open containing the point: the germ map into the stalk.
    pub germ_maps: BTreeMap<usize, Vec<usize>>,
    /// The full colimit construction, kept for cross-checking.
    pub colimit: DirectLimit,
}

impl Stalk {
    pub fn germ(&self, open: usize, s: usize) -> Result<usize> {
        self.germ_maps
            .get(&open)
            .map(|t| t[s])
            .ok_or_else(|| Error::Precondition("the point does not lie in that open".into()))
    }
}

/// Builds the direct system of values over the neighborhood poset of `x`
/// (reverse inclusion; restrictions as transitions).
pub fn neighborhood_system(p: &Presheaf, x: usize) -> Result<(DirectSystem, Vec<usize>)> {
    let member_opens: Vec<usize> = (0..p.opens.len())
        .filter(|&u| p.opens[u].contains(x))
        .collect();
    let m = member_opens.len();
    let mut leq = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            leq[a * m + b] = p.opens[member_opens[b]].is_subset(&p.opens[member_opens[a]]);
        }
    }
    let poset = DirectedPoset::new(
        member_opens.iter().map(|&u| p.open_label(u)).collect(),
        leq,
    )?;
    let algebras: Vec<AlgRef> = member_opens.iter().map(|&u| p.values[u].clone()).collect();
    let mut transitions = BTreeMap::new();
    for a in 0..m {
        for b in 0..m {
            if poset.leq(a, b) {
                transitions.insert(
                    (a, b),
                    p.restriction_table(member_opens[a], member_opens[b]).to_vec(),
                );
            }
        }
    }
    Ok((DirectSystem::new(poset, algebras, transitions)?, member_opens))
}

/// Stalk at a point. Fast path: the value on the minimal open neighborhood
/// (a greatest index of the neighborhood poset). The full directed colimit
/// is also computed and the isomorphism between the two is asserted.
pub fn stalk(p: &Presheaf, x: usize, _budget: &Budget) -> Result<Stalk> {
    if x >= p.base.n() {
        return Err(Error::Precondition(format!("no point with index {x}")));
    }
    let (system, member_opens) = neighborhood_system(p, x)?;
    let limit = direct_limit(&system)?;
    let g = system
        .index
        .greatest()
        .expect("finite neighborhood posets have a minimal open");
    let min_open = member_opens[g];
    debug_assert_eq!(p.opens[min_open], *p.base.min_nbhd(x));
    let fast = p.values[min_open].clone();
    if algebra::find_isomorphism(&fast, &limit.algebra).is_none() {
        return Err(Error::Precondition(
            "fast-path stalk and colimit stalk are not isomorphic; the presheaf is inconsistent"
                .into(),
        ));
    }
    let mut germ_maps = BTreeMap::new();
    for (sys_idx, &u) in member_opens.iter().enumerate() {
        debug_assert!(system.index.leq(sys_idx, g));
        germ_maps.insert(u, p.restriction_table(u, min_open).to_vec());
    }
    Ok(Stalk {
        point: x,
        min_open,
        algebra: fast,
        germ_maps,
        colimit: limit,
    })
}

/// Germ of a section at a point: its class in the stalk, i.e. its
/// restriction to the minimal neighborhood.
pub fn germ(p: &Presheaf, open: usize, x: usize, s: usize) -> Result<usize> {
    if !p.opens[open].contains(x) {
        return Err(Error::Precondition(format!(
            "point {} is not in the open {}",
            p.base.points[x],
            p.open_label(open)
        )));
    }
    let st = stalk(p, x, &Budget::default())?;
    st.germ(open, s)
}

pub struct GermSeparation {
    pub equal: bool,
    pub germs_agree: bool,
}

/// On a presheaf separated over `U`'s covers, two sections are equal iff
/// their germs agree at every point of `U`. Both directions are computed.
pub fn germs_separate_sections(
    p: &Presheaf,
    open: usize,
    s: usize,
    t: usize,
    budget: &Budget,
) -> Result<GermSeparation> {
    // Precondition: separation over the covers of this open.
    let covers = crate::topology::open_covers(
        &p.base,
        &p.opens[open],
        crate::topology::CoverMode::Strict,
        budget,
    )?;
    for cover_sets in &covers {
        let cover: Vec<usize> = cover_sets.iter().map(|o| p.open_index(o).unwrap()).collect();
        let sep = crate::presheaf::check_separation(p, open, &cover, crate::topology::CoverMode::Strict);
        if !sep.holds {
            return Err(Error::Precondition(
                "the presheaf is not separated over this open's covers".into(),
            ));
        }
    }
    let mut germs_agree = true;
    for x in p.opens[open].iter() {
        let st = stalk(p, x, budget)?;
        if st.germ(open, s)? != st.germ(open, t)? {
            germs_agree = false;
            break;
        }
    }
    Ok(GermSeparation {
        equal: s == t,
        germs_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::BitSet;
    use crate::fixtures;
    use crate::presheaf::{sierpinski_fuzzy_presheaf, skyscraper_presheaf};
    use crate::topology::FinTopSpace;

    fn b() -> Budget {
        Budget::default()
    }

    fn chain_system(a: AlgRef, q: AlgRef, proj: Vec<usize>) -> DirectSystem {
        let poset = DirectedPoset::new(
            vec!["lo".into(), "hi".into()],
            vec![true, true, false, true],
        )
        .unwrap();
        let mut tr = BTreeMap::new();
        tr.insert((0, 1), proj);
        DirectSystem::new(poset, vec![a, q], tr).unwrap()
    }

    #[test]
    fn single_index_limit_is_the_algebra_itself() {
        let poset = DirectedPoset::new(vec!["*".into()], vec![true]).unwrap();
        let s = DirectSystem::new(poset, vec![fixtures::a4()], BTreeMap::new()).unwrap();
        assert!(s.validate().is_valid());
        let lim = direct_limit(&s).unwrap();
        assert!(algebra::are_isomorphic(&lim.algebra, &fixtures::a4()));
    }

    #[test]
    fn quotient_chain_limit_collapses_to_the_quotient() {
        let a = fixtures::a4();
        let f2 = crate::algebra::FilterSubset::new(
            a.clone(),
            BitSet::from_indices(4, &[a.index_of("a").unwrap(), a.top]),
        );
        let (q, proj) = crate::algebra::quotient_by_filter(&a, &f2).unwrap();
        let s = chain_system(a.clone(), q.clone(), proj.map.clone());
        assert!(s.validate().is_valid());
        let lim = direct_limit(&s).unwrap();
        assert!(algebra::are_isomorphic(&lim.algebra, &q));
        // Cocone law.
        for x in 0..a.n() {
            assert_eq!(lim.injections[0].map[x], lim.injections[1].map[proj.map[x]]);
        }
        // Limit operations agree across all upper bounds (here only "hi").
        assert!(check_colimit_universal(&s, &lim.algebra, &lim.injections, &[])
            .unwrap()
            .is_valid());
    }

    #[test]
    fn equivalence_relation_matches_union_find() {
        let a = fixtures::a4();
        let f2 = crate::algebra::FilterSubset::new(
            a.clone(),
            BitSet::from_indices(4, &[a.index_of("a").unwrap(), a.top]),
        );
        let (q, proj) = crate::algebra::quotient_by_filter(&a, &f2).unwrap();
        let s = chain_system(a.clone(), q, proj.map);
        let lim = direct_limit(&s).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for x in 0..s.algebras[i].n() {
                    for y in 0..s.algebras[j].n() {
                        assert_eq!(
                            s.equivalent(i, x, j, y),
                            lim.injections[i].map[x] == lim.injections[j].map[y]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn top_index_algebra_passes_with_identity_cocone() {
        let a = fixtures::a6();
        let f = crate::algebra::FilterSubset::new(a.clone(), BitSet::singleton(a.n(), a.top));
        let (q, proj) = crate::algebra::quotient_by_filter(&a, &f).unwrap();
        let s = chain_system(a.clone(), q.clone(), proj.map.clone());
        let cocone = vec![
            RLMorphism {
                src: a.clone(),
                dst: q.clone(),
                map: proj.map.clone(),
            },
            RLMorphism::identity(&q),
        ];
        let rep = check_colimit_universal(&s, &q, &cocone, &[(q.clone(), cocone.clone())]).unwrap();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn doubled_candidate_fails_separation() {
        // Candidate: A4 itself over the identity system on A4/F2-style chain
        // with a non-collapsing cocone is not even compatible, so instead use
        // the two-element quotient doubled into A4 via an embedding that
        // misses separation: legs send both indices into A4 with distinct
        // images for merged elements.
        let a = fixtures::a4();
        let f2 = crate::algebra::FilterSubset::new(
            a.clone(),
            BitSet::from_indices(4, &[a.index_of("a").unwrap(), a.top]),
        );
        let (q, proj) = crate::algebra::quotient_by_filter(&a, &f2).unwrap();
        let s = chain_system(a.clone(), q.clone(), proj.map.clone());
        // Candidate = A4 with legs (id, embedding of q): psi_lo = id misses
        // the collapse, so separation must fail.
        let embed: Vec<usize> = (0..q.n())
            .map(|c| proj.map.iter().position(|&v| v == c).unwrap())
            .collect();
        let cocone = vec![
            RLMorphism::identity(&a),
            RLMorphism {
                src: q.clone(),
                dst: a.clone(),
                map: embed,
            },
        ];
        // psi_lo = psi_hi o h requires id = embed o proj: false, so the
        // cocone is incompatible and rejected as a precondition.
        assert!(matches!(
            check_colimit_universal(&s, &a, &cocone, &[]),
            Err(Error::Precondition(_))
        ));
        // A compatible but non-separated candidate: target q x q with legs
        // duplicating the class.
        let (qq, p1, _) = crate::algebra::product_algebra(&q, &q);
        let diag: Vec<usize> = (0..q.n()).map(|c| c * q.n() + c).collect();
        let cocone = vec![
            RLMorphism {
                src: a.clone(),
                dst: qq.clone(),
                map: proj.map.iter().map(|&c| diag[c]).collect(),
            },
            RLMorphism {
                src: q.clone(),
                dst: qq.clone(),
                map: diag,
            },
        ];
        let rep = check_colimit_universal(&s, &qq, &cocone, &[]).unwrap();
        assert!(!rep.is_valid());
        let _ = p1;
    }

    #[test]
    fn sierpinski_fuzzy_stalks() {
        let p = sierpinski_fuzzy_presheaf(2, &b()).unwrap();
        let st_x = stalk(&p, 0, &b()).unwrap();
        let st_y = stalk(&p, 1, &b()).unwrap();
        assert!(algebra::are_isomorphic(
            &st_x.algebra,
            &algebra::lukasiewicz_chain(2)
        ));
        assert_eq!(st_y.algebra.n(), 9);
        // Cross-check against the colimit path is part of stalk(); also
        // check it agrees here.
        assert!(algebra::are_isomorphic(&st_x.algebra, &st_x.colimit.algebra));
        assert!(algebra::are_isomorphic(&st_y.algebra, &st_y.colimit.algebra));
    }

    #[test]
    fn skyscraper_stalk_at_the_point_is_the_algebra() {
        let base = Arc::new(FinTopSpace::sierpinski());
        let p = skyscraper_presheaf(base, 1, &fixtures::a4(), &b()).unwrap();
        let st = stalk(&p, 1, &b()).unwrap();
        assert!(algebra::are_isomorphic(&st.algebra, &fixtures::a4()));
    }

    #[test]
    fn germ_stability_under_restriction() {
        let p = sierpinski_fuzzy_presheaf(10, &b()).unwrap();
        let full = p.open_index(&p.base.full_set()).unwrap();
        let x_only = p.open_index(&BitSet::from_indices(2, &[0])).unwrap();
        let st = stalk(&p, 0, &b()).unwrap();
        // mu = (1/2, 7/10): germ at x equals the germ of its restriction.
        let mu = p.values[full].index_of("(5/10,7/10)").unwrap();
        let restricted = p.restrict_elem(full, x_only, mu);
        assert_eq!(
            st.germ(full, mu).unwrap(),
            st.germ(x_only, restricted).unwrap()
        );
        assert_eq!(p.values[x_only].label(restricted), "5/10");
    }

    #[test]
    fn limit_operations_are_independent_of_the_upper_bound() {
        // Three-index chain: both upper indices bound the lower pair, and
        // every operation must give the same class through either.
        let a = fixtures::a4();
        let f2 = crate::algebra::FilterSubset::new(
            a.clone(),
            BitSet::from_indices(4, &[a.index_of("a").unwrap(), a.top]),
        );
        let (q, proj) = crate::algebra::quotient_by_filter(&a, &f2).unwrap();
        let poset = DirectedPoset::new(
            vec!["0".into(), "1".into(), "2".into()],
            vec![
                true, true, true, //
                false, true, true, //
                false, false, true,
            ],
        )
        .unwrap();
        let mut tr = BTreeMap::new();
        tr.insert((0, 1), proj.map.clone());
        tr.insert((1, 2), (0..q.n()).collect::<Vec<_>>());
        tr.insert((0, 2), proj.map.clone());
        let s = DirectSystem::new(poset, vec![a.clone(), q.clone(), q.clone()], tr).unwrap();
        assert!(s.validate().is_valid());
        let lim = direct_limit(&s).unwrap();
        // Scan every common upper bound of every index pair.
        for i in 0..3 {
            for j in 0..3 {
                for x in 0..s.algebras[i].n() {
                    for y in 0..s.algebras[j].n() {
                        let mut results = std::collections::BTreeSet::new();
                        for k in s.index.upper_bounds(i, j) {
                            let xk = s.transition(i, k)[x];
                            let yk = s.transition(j, k)[y];
                            for op in crate::algebra::BINARY_OPS {
                                let r = s.algebras[k].apply(op, xk, yk);
                                results.insert((op as usize, lim.injections[k].map[r]));
                            }
                        }
                        // One class per operation, regardless of the bound.
                        assert_eq!(results.len(), crate::algebra::BINARY_OPS.len());
                    }
                }
            }
        }
    }

    #[test]
    fn germ_separation_requires_a_separated_presheaf() {
        // The constant presheaf over a disconnected base is not separated
        // (the empty cover of the empty open), so the check refuses to run.
        let p = crate::presheaf::constant_presheaf(
            Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()])),
            &fixtures::a4(),
            &b(),
        )
        .unwrap();
        let empty = p.open_index(&p.base.empty_set()).unwrap();
        assert!(matches!(
            germs_separate_sections(&p, empty, 0, 1, &b()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn germ_outside_the_open_is_a_precondition_error() {
        let p = skyscraper_presheaf(
            Arc::new(FinTopSpace::sierpinski()),
            1,
            &fixtures::a4(),
            &b(),
        )
        .unwrap();
        let x_only = p.open_index(&BitSet::from_indices(2, &[0])).unwrap();
        // y = point 1 does not lie in {x}.
        assert!(matches!(
            germ(&p, x_only, 1, 0),
            Err(Error::Precondition(_))
        ));
        // In range: the germ of any element at y over the full open.
        let full = p.open_index(&p.base.full_set()).unwrap();
        assert!(germ(&p, full, 1, 2).is_ok());
    }

    #[test]
    fn germs_separate_sections_on_sierpinski_fuzzy() {
        let p = sierpinski_fuzzy_presheaf(2, &b()).unwrap();
        let full = p.open_index(&p.base.full_set()).unwrap();
        let s = p.values[full].index_of("(1/2,0)").unwrap();
        let t = p.values[full].index_of("(1/2,1)").unwrap();
        let r = germs_separate_sections(&p, full, s, t, &b()).unwrap();
        assert!(!r.equal && !r.germs_agree);
        let r2 = germs_separate_sections(&p, full, s, s, &b()).unwrap();
        assert!(r2.equal && r2.germs_agree);
        // Exhaustive equivalence on this fixture.
        for s in 0..p.values[full].n() {
            for t in 0..p.values[full].n() {
                let r = germs_separate_sections(&p, full, s, t, &b()).unwrap();
                assert_eq!(r.equal, r.germs_agree);
            }
        }
    }
}
