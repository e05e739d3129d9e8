//! The stalk-space functor (presheaf to étalé space), the sections functor
//! (étalé space to sheaf), their action on morphisms, and sheafification
//! with its universal morphism.

use crate::algebra;
use crate::bitset::{set_order, BitSet};
use crate::colimit::{stalk, Stalk};
use crate::etale::{
    section_algebra, validate_etale_morphism, validate_etale_space, EtaleSpace, Section,
};
use crate::presheaf::{
    enumerate_presheaf_morphisms, is_sheaf, validate_presheaf, validate_presheaf_morphism,
    Presheaf, PresheafMorphism, PresheafRef,
};
use crate::report::{Budget, Error, Result, ValidationReport};
use crate::topology::{CoverMode, FinTopSpace};
use std::collections::BTreeMap;
use std::sync::Arc;

/// The étalé space of a presheaf: total set the disjoint union of stalks,
/// topology generated by the germ-map images.
pub struct EtaleOfPresheaf {
    pub presheaf: PresheafRef,
    pub space: EtaleSpace,
    pub stalks: Vec<Stalk>,
    /// `offsets[b]` is the first total index of the fiber over base point b.
    pub offsets: Vec<usize>,
    /// Germ-map images `Im(s_U)`, indexed by (open, section).
    pub basis: Vec<(usize, usize, BitSet)>,
    pub validation: ValidationReport,
}

impl EtaleOfPresheaf {
    pub fn total_index(&self, b: usize, stalk_elem: usize) -> usize {
        self.offsets[b] + stalk_elem
    }

    /// The germ map of section `s` over open `u`, as a section of the space.
    pub fn germ_map_section(&self, u: usize, s: usize) -> Section {
        let dom = self.presheaf.opens[u].clone();
        let values = dom
            .iter()
            .map(|x| self.total_index(x, self.stalks[x].germ(u, s).expect("x lies in u")))
            .collect();
        Section {
            domain: dom,
            values,
        }
    }
}

/// Builds the étalé space of a presheaf and fully validates it.
pub fn etale_of_presheaf(p: &PresheafRef, budget: &Budget) -> Result<EtaleOfPresheaf> {
    let base = p.base.clone();
    let mut stalks = Vec::with_capacity(base.n());
    for x in 0..base.n() {
        stalks.push(stalk(p, x, budget)?);
    }
    let mut offsets = vec![0usize];
    for st in &stalks {
        offsets.push(offsets.last().unwrap() + st.algebra.n());
    }
    let total_n = *offsets.last().unwrap();
    let mut labels = Vec::with_capacity(total_n);
    let mut proj = Vec::with_capacity(total_n);
    for (b, st) in stalks.iter().enumerate() {
        for e in 0..st.algebra.n() {
            labels.push(format!("{}:{}", base.points[b], st.algebra.label(e)));
            proj.push(b);
        }
    }
    let mut basis = Vec::new();
    for u in 0..p.opens.len() {
        for s in 0..p.values[u].n() {
            let mut im = BitSet::new(total_n);
            for x in p.opens[u].iter() {
                im.insert(offsets[x] + stalks[x].germ(u, s)?);
            }
            basis.push((u, s, im));
        }
    }
    let sets: Vec<BitSet> = basis.iter().map(|(_, _, im)| im.clone()).collect();
    let total = Arc::new(FinTopSpace::from_subbasis(labels, &sets));
    let stalk_algebras: Vec<algebra::AlgRef> = stalks.iter().map(|s| s.algebra.clone()).collect();
    let space = EtaleSpace::new(base, total, proj, Some(stalk_algebras))?;
    let mut validation = validate_etale_space(&space, budget)?;
    // The generated topology must be the final one for the germ maps: the
    // preimage of every basis set under every germ map is open in the base.
    let mut final_ok = true;
    'fin: for (u, s, im) in &basis {
        for (v, t, _) in &basis {
            let mut pre = BitSet::new(space.base.n());
            for x in p.opens[*v].iter() {
                let pt = offsets[x] + stalks[x].germ(*v, *t)?;
                if im.contains(pt) {
                    pre.insert(x);
                }
            }
            if !space.base.is_open(&pre) {
                validation.fail(
                    "germ-map preimages of basis sets are open (final topology)",
                    format!(
                        "preimage of the image of section {} over {} under the germ map of section {} over {} is not open",
                        p.values[*u].label(*s),
                        p.open_label(*u),
                        p.values[*v].label(*t),
                        p.open_label(*v)
                    ),
                );
                final_ok = false;
                break 'fin;
            }
        }
    }
    if final_ok {
        validation.pass("germ-map preimages of basis sets are open (final topology)");
    }
    if !validation.is_valid() {
        return Err(Error::Precondition(format!(
            "stalk space of '{}' failed validation: {}",
            p.name,
            validation
                .first_failure()
                .map(|c| c.name.clone())
                .unwrap_or_default()
        )));
    }
    Ok(EtaleOfPresheaf {
        presheaf: p.clone(),
        space,
        stalks,
        offsets,
        basis,
        validation,
    })
}

/// The action of the stalk-space functor on a presheaf morphism: germ
/// classes map through the components. Well-definedness on classes is
/// verified against every representing (open, section) pair, and the result
/// is validated as an étalé morphism.
pub fn etale_of_morphism(
    phi: &PresheafMorphism,
    src: &EtaleOfPresheaf,
    dst: &EtaleOfPresheaf,
) -> Result<(Vec<usize>, ValidationReport)> {
    let p = &src.presheaf;
    let g = &dst.presheaf;
    if !Arc::ptr_eq(&phi.src, p) || !Arc::ptr_eq(&phi.dst, g) {
        return Err(Error::Precondition(
            "the morphism does not connect the two given stalk spaces".into(),
        ));
    }
    let mut map = vec![usize::MAX; src.space.total.n()];
    for x in 0..p.base.n() {
        let min_open = src.stalks[x].min_open;
        for e in 0..src.stalks[x].algebra.n() {
            // Representative: the section e of value(min_open).
            let image_sec = phi.components[min_open][e];
            let img_class = dst.stalks[x].germ(min_open, image_sec)?;
            map[src.total_index(x, e)] = dst.total_index(x, img_class);
        }
    }
    let mut rep = ValidationReport::new("stalk-space morphism");
    // Well-definedness: for every representing pair the square with the germ
    // maps commutes.
    let mut well_defined = true;
    'wd: for u in 0..p.opens.len() {
        for s in 0..p.values[u].n() {
            for x in p.opens[u].iter() {
                let class_src = src.total_index(x, src.stalks[x].germ(u, s)?);
                let direct = map[class_src];
                let through = dst.total_index(x, dst.stalks[x].germ(u, phi.components[u][s])?);
                if direct != through {
                    rep.fail(
                        "well-defined on germ classes",
                        format!(
                            "section {} of {} at point {} maps inconsistently",
                            p.values[u].label(s),
                            p.open_label(u),
                            p.base.points[x]
                        ),
                    );
                    well_defined = false;
                    break 'wd;
                }
            }
        }
    }
    if well_defined {
        rep.pass("well-defined on germ classes");
    }
    let sub = validate_etale_morphism(&map, &src.space, &dst.space, &Budget::default())?;
    rep.merge(sub);
    Ok((map, rep))
}

/// The sheaf of sections of an étalé space, with the enumerated sections per
/// open returned alongside.
pub fn sections_presheaf(
    e: &EtaleSpace,
    name: impl Into<String>,
    budget: &Budget,
) -> Result<(PresheafRef, Vec<Vec<Section>>)> {
    let mut opens = e.base.opens(budget.opens)?;
    opens.sort_by(set_order);
    let mut values = Vec::with_capacity(opens.len());
    let mut section_lists = Vec::with_capacity(opens.len());
    for u in &opens {
        let (alg, secs) = section_algebra(e, u, budget)?;
        values.push(alg);
        section_lists.push(secs);
    }
    let index_of: Vec<BTreeMap<Vec<usize>, usize>> = section_lists
        .iter()
        .map(|secs| {
            secs.iter()
                .enumerate()
                .map(|(i, s)| (s.values.clone(), i))
                .collect()
        })
        .collect();
    let mut restrictions = BTreeMap::new();
    for (v, ov) in opens.iter().enumerate() {
        for (u, ou) in opens.iter().enumerate() {
            if ou.is_subset(ov) {
                let table: Vec<usize> = section_lists[v]
                    .iter()
                    .map(|sec| index_of[u][&sec.restrict(ou).values])
                    .collect();
                restrictions.insert((v, u), table);
            }
        }
    }
    let p = Presheaf::new(name, e.base.clone(), opens, values, restrictions)?;
    let rep = validate_presheaf(&p);
    if !rep.is_valid() {
        return Err(Error::Precondition(format!(
            "sections presheaf failed validation: {}",
            rep.first_failure().map(|c| c.name.clone()).unwrap_or_default()
        )));
    }
    Ok((p, section_lists))
}

pub struct Sheafification {
    pub plus: PresheafRef,
    pub iota: PresheafMorphism,
    pub etale: EtaleOfPresheaf,
    pub plus_sections: Vec<Vec<Section>>,
    /// Sheaf verdict of the plus presheaf (strict mode) and the local
    /// germ-map characterization of its sections.
    pub validation: ValidationReport,
}

/// Sheafification: sections of the stalk space, together with the universal
/// morphism sending a section to its germ map.
pub fn sheafification(p: &PresheafRef, budget: &Budget) -> Result<Sheafification> {
    let et = etale_of_presheaf(p, budget)?;
    let (plus, plus_sections) = sections_presheaf(&et.space, format!("{}+", p.name), budget)?;
    // plus.opens and p.opens agree: both are all opens sorted the same way.
    if plus.opens != p.opens {
        return Err(Error::Precondition(
            "open listings diverged between a presheaf and its sheafification".into(),
        ));
    }
    let mut components = Vec::with_capacity(p.opens.len());
    for u in 0..p.opens.len() {
        let mut comp = Vec::with_capacity(p.values[u].n());
        for s in 0..p.values[u].n() {
            let sec = et.germ_map_section(u, s);
            let idx = plus_sections[u]
                .iter()
                .position(|t| *t == sec)
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "germ map of section {} over {} is not continuous",
                        p.values[u].label(s),
                        p.open_label(u)
                    ))
                })?;
            comp.push(idx);
        }
        components.push(comp);
    }
    let iota = PresheafMorphism::new(p.clone(), plus.clone(), components)?;
    let mut validation = ValidationReport::new(format!("sheafification of '{}'", p.name));
    let iota_rep = validate_presheaf_morphism(&iota);
    validation.check(
        "universal morphism is a presheaf morphism",
        iota_rep.is_valid(),
        iota_rep
            .first_failure()
            .map(|c| c.name.clone())
            .unwrap_or_default(),
    );
    let sheaf_rep = is_sheaf(&plus, CoverMode::Strict, budget)?;
    validation.check(
        "the result is a sheaf (strict mode)",
        sheaf_rep.is_sheaf,
        format!("{} failures", sheaf_rep.failures.len()),
    );
    // Local germ-map characterization of the sections of the result: every
    // section is locally a germ map, and every fiberwise choice that is
    // locally a germ map is a section.
    let mut char_ok = true;
    let mut char_witness = String::new();
    'outer: for u in 0..plus.opens.len() {
        let locally_germ = |values_at: &dyn Fn(usize) -> usize| -> bool {
            plus.opens[u].iter().all(|x| {
                // Some open w with x in w inside u where the choice is the
                // germ map of a single section.
                (0..p.opens.len()).any(|w| {
                    p.opens[w].contains(x) && p.opens[w].is_subset(&plus.opens[u]) && {
                        (0..p.values[w].n()).any(|s| {
                            p.opens[w].iter().all(|y| {
                                values_at(y)
                                    == et.total_index(
                                        y,
                                        et.stalks[y].germ(w, s).expect("y lies in w"),
                                    )
                            })
                        })
                    }
                })
            })
        };
        for sec in &plus_sections[u] {
            let at = |y: usize| sec.value_at(y).expect("y in the domain");
            if !locally_germ(&at) {
                char_ok = false;
                char_witness = format!(
                    "a section over {} is not locally a germ map",
                    plus.open_label(u)
                );
                break 'outer;
            }
        }
        // Converse direction: scan all fiberwise choices over this open.
        let pts = plus.opens[u].indices();
        let mut space = 1usize;
        for &x in &pts {
            space = space.saturating_mul(et.stalks[x].algebra.n().max(1));
        }
        if space > budget.section_candidates {
            return Err(Error::Resource(
                "germ-map characterization scan exceeds the section budget".into(),
            ));
        }
        let mut choice = vec![0usize; pts.len()];
        loop {
            let values: Vec<usize> = pts
                .iter()
                .zip(&choice)
                .map(|(&x, &c)| et.total_index(x, c))
                .collect();
            let at = |y: usize| values[pts.iter().position(|&q| q == y).unwrap()];
            let is_section = plus_sections[u].iter().any(|s| s.values == values);
            if locally_germ(&at) != is_section {
                char_ok = false;
                char_witness = format!(
                    "a fiberwise choice over {} is locally a germ map but not a section (or vice versa)",
                    plus.open_label(u)
                );
                break 'outer;
            }
            let mut k = 0;
            loop {
                if k == pts.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < et.stalks[pts[k]].algebra.n() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == pts.len() {
                break;
            }
        }
    }
    validation.check(
        "sections are exactly the locally-germ-map choices",
        char_ok,
        char_witness,
    );
    Ok(Sheafification {
        plus,
        iota,
        etale: et,
        plus_sections,
        validation,
    })
}

/// The induced morphism between sheafifications: post-composition of
/// sections with the stalk-space morphism. Verifies the defining square and,
/// within budget, uniqueness among all presheaf morphisms satisfying it.
pub struct InducedPlus {
    pub morphism: PresheafMorphism,
    pub square_commutes: bool,
    /// None when the search space exceeded the budget.
    pub unique: Option<bool>,
}

pub fn induced_plus_morphism(
    phi: &PresheafMorphism,
    sf: &Sheafification,
    sg: &Sheafification,
    budget: &Budget,
) -> Result<InducedPlus> {
    let (et_map, et_rep) = etale_of_morphism(phi, &sf.etale, &sg.etale)?;
    if !et_rep.is_valid() {
        return Err(Error::Precondition(format!(
            "the stalk-space morphism is invalid: {}",
            et_rep.first_failure().map(|c| c.name.clone()).unwrap_or_default()
        )));
    }
    let plus_f = &sf.plus;
    let plus_g = &sg.plus;
    let mut components = Vec::with_capacity(plus_f.opens.len());
    for u in 0..plus_f.opens.len() {
        let mut comp = Vec::with_capacity(plus_f.values[u].n());
        for sec in &sf.plus_sections[u] {
            let mapped: Vec<usize> = sec.values.iter().map(|&t| et_map[t]).collect();
            let idx = sg.plus_sections[u]
                .iter()
                .position(|t| t.values == mapped)
                .ok_or_else(|| {
                    Error::Precondition("a mapped section is not continuous downstream".into())
                })?;
            comp.push(idx);
        }
        components.push(comp);
    }
    let plus_morphism = PresheafMorphism::new(plus_f.clone(), plus_g.clone(), components)?;
    let square_commutes = {
        let left = phi.then(&sg.iota)?;
        let right = sf.iota.then(&plus_morphism)?;
        left.components == right.components
    };
    let unique = match enumerate_presheaf_morphisms(plus_f, plus_g, budget) {
        Ok(all) => {
            let satisfying: Vec<_> = all
                .into_iter()
                .filter(|m| {
                    sf.iota
                        .then(m)
                        .map(|r| {
                            phi.then(&sg.iota)
                                .map(|l| l.components == r.components)
                                .unwrap_or(false)
                        })
                        .unwrap_or(false)
                })
                .collect();
            Some(satisfying.len() == 1 && satisfying[0].components == plus_morphism.components)
        }
        Err(Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(InducedPlus {
        morphism: plus_morphism,
        square_commutes,
        unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::presheaf::{constant_presheaf, sierpinski_fuzzy_presheaf, skyscraper_presheaf};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn sierpinski_fuzzy_stalk_space_has_the_expected_size() {
        let p = sierpinski_fuzzy_presheaf(2, &b()).unwrap();
        let et = etale_of_presheaf(&p, &b()).unwrap();
        // 3 germs over x plus 9 over y.
        assert_eq!(et.space.total.n(), 12);
        assert!(et.validation.is_valid());
        assert!(crate::etale::stalk_discreteness(&et.space).is_valid());
        // Nine sections over the whole base: one per global assignment.
        let secs =
            crate::etale::sections(&et.space, &et.space.base.full_set(), &b()).unwrap();
        assert_eq!(secs.len(), 9);
        let x_only = crate::bitset::BitSet::from_indices(2, &[0]);
        let (gx, _) = crate::etale::section_algebra(&et.space, &x_only, &b()).unwrap();
        assert!(algebra::are_isomorphic(&gx, &algebra::lukasiewicz_chain(2)));
    }

    #[test]
    fn distinct_morphisms_into_a_separated_presheaf_have_distinct_images() {
        // Faithfulness instance: the stalk-space functor separates the
        // morphisms when the target is separated.
        let a4 = fixtures::a4();
        let p = constant_presheaf(fixtures::discrete2(), &a4, &b()).unwrap();
        let id = PresheafMorphism::identity(&p);
        let (ai, bi) = (a4.index_of("a").unwrap(), a4.index_of("b").unwrap());
        let mut swap_map: Vec<usize> = (0..a4.n()).collect();
        swap_map.swap(ai, bi);
        let swap = PresheafMorphism::new(
            p.clone(),
            p.clone(),
            (0..p.opens.len()).map(|_| swap_map.clone()).collect(),
        )
        .unwrap();
        assert!(crate::presheaf::validate_presheaf_morphism(&swap).is_valid());
        let et = etale_of_presheaf(&p, &b()).unwrap();
        let (m1, _) = etale_of_morphism(&id, &et, &et).unwrap();
        let (m2, _) = etale_of_morphism(&swap, &et, &et).unwrap();
        assert_ne!(m1, m2);
    }

    #[test]
    fn quotient_morphism_maps_to_a_valid_etale_morphism() {
        let a4 = fixtures::a4();
        let f2 = crate::algebra::FilterSubset::new(
            a4.clone(),
            crate::bitset::BitSet::from_indices(4, &[a4.index_of("a").unwrap(), a4.top]),
        );
        let (q, proj) = algebra::quotient_by_filter(&a4, &f2).unwrap();
        let p_src = constant_presheaf(fixtures::discrete2(), &a4, &b()).unwrap();
        let p_dst = constant_presheaf(fixtures::discrete2(), &q, &b()).unwrap();
        let phi = PresheafMorphism::new(
            p_src.clone(),
            p_dst.clone(),
            (0..p_src.opens.len()).map(|_| proj.map.clone()).collect(),
        )
        .unwrap();
        let et_src = etale_of_presheaf(&p_src, &b()).unwrap();
        let et_dst = etale_of_presheaf(&p_dst, &b()).unwrap();
        let (_, rep) = etale_of_morphism(&phi, &et_src, &et_dst).unwrap();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn one_point_presheaf_stalk_space_is_the_algebra_fiber() {
        let p = crate::presheaf::one_point_presheaf(&fixtures::a4(), &b()).unwrap();
        let et = etale_of_presheaf(&p, &b()).unwrap();
        assert_eq!(et.space.total.n(), 4);
        let secs = crate::etale::sections(&et.space, &et.space.base.full_set(), &b()).unwrap();
        assert_eq!(secs.len(), 4);
    }

    #[test]
    fn skyscraper_stalk_space_concentrates_at_the_point() {
        let p = skyscraper_presheaf(fixtures::sierpinski(), 1, &fixtures::a4(), &b()).unwrap();
        let et = etale_of_presheaf(&p, &b()).unwrap();
        // Stalk at x is terminal (minimal nbhd {x} has the trivial value),
        // stalk at y is A4 (minimal nbhd {x,y}).
        assert_eq!(et.stalks[0].algebra.n(), 1);
        assert_eq!(et.stalks[1].algebra.n(), 4);
    }

    #[test]
    fn sections_presheaf_of_a_stalk_space_is_a_sheaf() {
        let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &b()).unwrap();
        let et = etale_of_presheaf(&p, &b()).unwrap();
        let (ps, _) = sections_presheaf(&et.space, "Ps", &b()).unwrap();
        let rep = is_sheaf(&ps, CoverMode::Strict, &b()).unwrap();
        assert!(rep.is_sheaf);
    }

    #[test]
    fn sheafification_of_a_sheaf_is_an_isomorphism() {
        let p = skyscraper_presheaf(fixtures::sierpinski(), 1, &fixtures::a4(), &b()).unwrap();
        let sf = sheafification(&p, &b()).unwrap();
        assert!(sf.validation.is_valid(), "{}", sf.validation);
        assert!(sf.iota.is_isomorphism());
    }

    #[test]
    fn sheafification_of_the_constant_presheaf_gives_the_product_globally() {
        let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &b()).unwrap();
        let sf = sheafification(&p, &b()).unwrap();
        assert!(sf.validation.is_valid(), "{}", sf.validation);
        assert!(!sf.iota.is_isomorphism());
        let full = sf.plus.open_index(&sf.plus.base.full_set()).unwrap();
        assert_eq!(sf.plus.values[full].n(), 16);
        let (prod, _, _) = algebra::product_algebra(&fixtures::a4(), &fixtures::a4());
        assert!(algebra::are_isomorphic(&sf.plus.values[full], &prod));
    }

    #[test]
    fn double_sheafification_is_an_isomorphism() {
        let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &b()).unwrap();
        let sf = sheafification(&p, &b()).unwrap();
        let sf2 = sheafification(&sf.plus, &b()).unwrap();
        assert!(sf2.iota.is_isomorphism());
    }

    #[test]
    fn induced_morphism_square_commutes_for_identity() {
        let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &b()).unwrap();
        let sf = sheafification(&p, &b()).unwrap();
        let id = PresheafMorphism::identity(&p);
        let ind = induced_plus_morphism(&id, &sf, &sf, &b()).unwrap();
        assert!(ind.square_commutes);
        // The induced morphism of the identity is the identity.
        assert_eq!(
            ind.morphism.components,
            PresheafMorphism::identity(&sf.plus).components
        );
        if let Some(u) = ind.unique {
            assert!(u);
        }
    }

    #[test]
    fn perturbed_candidate_fails_the_square() {
        let p = constant_presheaf(fixtures::discrete2(), &fixtures::a4(), &b()).unwrap();
        let sf = sheafification(&p, &b()).unwrap();
        let id = PresheafMorphism::identity(&p);
        let ind = induced_plus_morphism(&id, &sf, &sf, &b()).unwrap();
        // Perturb: swap two values in the global component, then recheck the
        // square by hand.
        let mut perturbed = ind.morphism.components.clone();
        let full = sf.plus.open_index(&sf.plus.base.full_set()).unwrap();
        perturbed[full].swap(0, 1);
        let psi = PresheafMorphism::new(sf.plus.clone(), sf.plus.clone(), perturbed).unwrap();
        let left = id.then(&sf.iota).unwrap();
        let right = sf.iota.then(&psi).unwrap();
        assert_ne!(left.components, right.components);
    }
}
