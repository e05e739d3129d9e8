//! Category-law and theorem verifiers, executed on concrete finite
//! instances: functoriality of the sections and stalk-space functors,
//! reflection triangles, the equivalence between étalé spaces and sheaves,
//! and subcategory closure. Reports quantify only over the supplied finite
//! instances and say so.

use crate::algebra::{check_morphism, RLMorphism};
use crate::etale::{sections, validate_etale_morphism, EtaleSpace};
use crate::presheaf::{
    enumerate_presheaf_morphisms, is_sheaf, validate_presheaf_morphism, PresheafMorphism,
    PresheafRef,
};
use crate::report::{Budget, Error, Result};
use crate::sheafify::{
    etale_of_morphism, etale_of_presheaf, induced_plus_morphism, sheafification, EtaleOfPresheaf,
};
use crate::topology::CoverMode;
use serde::Serialize;

/// Outcome of one theorem check on one instance. Failures carry concrete
/// witnesses; budget limitations are flagged, never silent.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub instance: String,
    pub passed: bool,
    pub witnesses: Vec<String>,
    pub budget_notes: Vec<String>,
}

impl TheoremReport {
    fn new(theorem: &str, instance: impl Into<String>) -> Self {
        TheoremReport {
            theorem: theorem.to_string(),
            instance: instance.into(),
            passed: true,
            witnesses: Vec::new(),
            budget_notes: Vec::new(),
        }
    }

    fn fail(&mut self, witness: impl Into<String>) {
        self.passed = false;
        self.witnesses.push(witness.into());
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "[{}] {} -- {}\n",
            if self.passed { "pass" } else { "FAIL" },
            self.theorem,
            self.instance
        );
        for w in &self.witnesses {
            out.push_str(&format!("    witness: {w}\n"));
        }
        for n in &self.budget_notes {
            out.push_str(&format!("    note: {n}\n"));
        }
        out
    }
}

/// Identity and composition preservation of the stalk-space functor on a
/// composable pair of presheaf morphisms.
pub fn check_et_functor_laws(
    phi: &PresheafMorphism,
    psi: &PresheafMorphism,
    budget: &Budget,
) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new(
        "stalk-space functor laws",
        format!(
            "{} -> {} -> {}",
            phi.src.name, phi.dst.name, psi.dst.name
        ),
    );
    if !std::sync::Arc::ptr_eq(&phi.dst, &psi.src) {
        return Err(Error::Precondition("the pair is not composable".into()));
    }
    let et_f = etale_of_presheaf(&phi.src, budget)?;
    let et_g = etale_of_presheaf(&phi.dst, budget)?;
    let et_h = etale_of_presheaf(&psi.dst, budget)?;

    let id = PresheafMorphism::identity(&phi.src);
    let (id_map, id_rep) = etale_of_morphism(&id, &et_f, &et_f)?;
    if !id_rep.is_valid() || id_map != (0..et_f.space.total.n()).collect::<Vec<_>>() {
        rep.fail("the identity morphism does not map to the identity");
    }

    let (map_phi, rep_phi) = etale_of_morphism(phi, &et_f, &et_g)?;
    let (map_psi, rep_psi) = etale_of_morphism(psi, &et_g, &et_h)?;
    if !rep_phi.is_valid() || !rep_psi.is_valid() {
        rep.fail("a component image fails étalé-morphism validation");
    }
    let composed = phi.then(psi)?;
    let (map_comp, rep_comp) = etale_of_morphism(&composed, &et_f, &et_h)?;
    if !rep_comp.is_valid() {
        rep.fail("the composite image fails étalé-morphism validation");
    }
    let chained: Vec<usize> = map_phi.iter().map(|&t| map_psi[t]).collect();
    if chained != map_comp {
        rep.fail("composition is not preserved on total points");
    }
    Ok(rep)
}

/// Identity and composition preservation of the sections functor on a
/// composable pair of étalé morphisms over the same base.
pub fn check_ps_functor_laws(
    t: &EtaleSpace,
    s: &EtaleSpace,
    r: &EtaleSpace,
    h: &[usize],
    k: &[usize],
    budget: &Budget,
) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new("sections functor laws", "composable étalé pair");
    for (name, space, map, dst) in [("h", t, h, s), ("k", s, k, r)] {
        let v = validate_etale_morphism(map, space, dst, budget)?;
        if !v.is_valid() {
            rep.fail(format!("input morphism {name} is not an étalé morphism"));
            return Ok(rep);
        }
    }
    let ps = |e: &EtaleSpace, m: &[usize], f: &EtaleSpace| -> Result<Vec<Vec<Vec<usize>>>> {
        // For each open: the list of mapped section value-vectors.
        let opens = e.base.opens(budget.opens)?;
        let mut out = Vec::new();
        for u in &opens {
            let secs = sections(e, u, budget)?;
            let mapped: Vec<Vec<usize>> = secs
                .iter()
                .map(|sec| sec.values.iter().map(|&x| m[x]).collect())
                .collect();
            let target = sections(f, u, budget)?;
            for v in &mapped {
                if !target.iter().any(|t| t.values == *v) {
                    rep_fail_outside()?;
                }
            }
            out.push(mapped);
        }
        Ok(out)
    };
    fn rep_fail_outside() -> Result<()> {
        Err(Error::Precondition(
            "a mapped section is not a section downstream".into(),
        ))
    }
    // Identity law.
    let idmap: Vec<usize> = (0..t.total.n()).collect();
    let ps_id = ps(t, &idmap, t)?;
    let opens = t.base.opens(budget.opens)?;
    for (ui, u) in opens.iter().enumerate() {
        let secs = sections(t, u, budget)?;
        for (si, sec) in secs.iter().enumerate() {
            if ps_id[ui][si] != sec.values {
                rep.fail("identity is not preserved on sections");
            }
        }
    }
    // Composition law: Ps(k o h) = Ps(k) o Ps(h) componentwise.
    let comp: Vec<usize> = h.iter().map(|&x| k[x]).collect();
    let ps_comp = ps(t, &comp, r)?;
    let ps_h = ps(t, h, s)?;
    for (ui, mapped_h) in ps_h.iter().enumerate() {
        for (si, v) in mapped_h.iter().enumerate() {
            let then_k: Vec<usize> = v.iter().map(|&x| k[x]).collect();
            if ps_comp[ui][si] != then_k {
                rep.fail("composition is not preserved on sections");
            }
        }
    }
    Ok(rep)
}

/// The reflection triangle: any morphism from a presheaf into a sheaf
/// factors uniquely through the sheafification.
pub fn check_reflection(
    p: &PresheafRef,
    g: &PresheafRef,
    phi: &PresheafMorphism,
    budget: &Budget,
) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new(
        "sheaves are reflective among presheaves",
        format!("{} -> {}", p.name, g.name),
    );
    if !std::sync::Arc::ptr_eq(&phi.src, p) || !std::sync::Arc::ptr_eq(&phi.dst, g) {
        return Err(Error::Precondition("morphism endpoints do not match".into()));
    }
    if !validate_presheaf_morphism(phi).is_valid() {
        return Err(Error::Precondition("the given map is not a presheaf morphism".into()));
    }
    let g_sheaf = is_sheaf(g, CoverMode::Strict, budget)?;
    if !g_sheaf.is_sheaf {
        return Err(Error::Precondition("the target is not a sheaf".into()));
    }
    let sf = sheafification(p, budget)?;
    let sg = sheafification(g, budget)?;
    if !sg.iota.is_isomorphism() {
        rep.fail("the universal morphism of the sheaf target is not an isomorphism");
        return Ok(rep);
    }
    let induced = induced_plus_morphism(phi, &sf, &sg, budget)?;
    if !induced.square_commutes {
        rep.fail("the defining square of the induced morphism does not commute");
    }
    // phi-hat = iota_G^{-1} after the induced morphism.
    let phi_hat = induced.morphism.then(&sg.iota.inverse()?)?;
    let left = sf.iota.then(&phi_hat)?;
    if left.components != phi.components {
        rep.fail("the reflection triangle does not commute");
    }
    // Uniqueness within budget: all morphisms plus(P) -> G with the triangle
    // property.
    match enumerate_presheaf_morphisms(&sf.plus, g, budget) {
        Ok(all) => {
            let satisfying: Vec<_> = all
                .into_iter()
                .filter(|m| {
                    sf.iota
                        .then(m)
                        .map(|c| c.components == phi.components)
                        .unwrap_or(false)
                })
                .collect();
            if satisfying.len() != 1 {
                rep.fail(format!(
                    "expected exactly one factorization, found {}",
                    satisfying.len()
                ));
            } else if satisfying[0].components != phi_hat.components {
                rep.fail("the unique factorization differs from the constructed one");
            }
        }
        Err(Error::Resource(m)) => {
            rep.budget_notes
                .push(format!("uniqueness not checked: {m}"));
        }
        Err(e) => return Err(e),
    }
    Ok(rep)
}

/// The equivalence: evaluation from the stalk space of the sections sheaf
/// back to the space is an isomorphism of étalé spaces of residuated
/// lattices, natural in the space.
pub struct EquivalenceInstance<'a> {
    pub space: &'a EtaleSpace,
    /// Optional étalé morphisms (target space, map on total points) for the
    /// naturality squares.
    pub morphisms: Vec<(&'a EtaleSpace, Vec<usize>)>,
}

/// The evaluation map from the stalk space of the sections sheaf: a germ of
/// a section at a point goes to the section's value there.
pub struct Evaluation {
    pub sections_sheaf: PresheafRef,
    pub section_lists: Vec<Vec<crate::etale::Section>>,
    pub stalk_space: EtaleOfPresheaf,
    /// Total point of the rebuilt space -> total point of the original.
    pub map: Vec<usize>,
}

pub fn evaluation_map(t: &EtaleSpace, budget: &Budget) -> Result<Evaluation> {
    let (ps, section_lists) = crate::sheafify::sections_presheaf(t, "Ps", budget)?;
    let stalk_space = etale_of_presheaf(&ps, budget)?;
    let mut map = vec![usize::MAX; stalk_space.space.total.n()];
    for x in 0..t.base.n() {
        let min_open = stalk_space.stalks[x].min_open;
        for e in 0..stalk_space.stalks[x].algebra.n() {
            // Class e is a section over the minimal neighborhood of x.
            let sec = &section_lists[min_open][e];
            map[stalk_space.total_index(x, e)] = sec.value_at(x).expect("x lies in its own nbhd");
        }
    }
    Ok(Evaluation {
        sections_sheaf: ps,
        section_lists,
        stalk_space,
        map,
    })
}

pub fn check_equivalence(inst: &EquivalenceInstance, budget: &Budget) -> Result<TheoremReport> {
    let t = inst.space;
    let mut rep = TheoremReport::new(
        "étalé spaces and sheaves are equivalent",
        format!("total of {} points", t.total.n()),
    );
    let ev = evaluation_map(t, budget)?;
    let (et_ps, eps) = (&ev.stalk_space, &ev.map);
    // Bijectivity.
    if eps.len() != t.total.n() {
        rep.fail("evaluation is not between equinumerous totals");
    } else {
        let mut seen = vec![false; t.total.n()];
        for &v in eps {
            if v == usize::MAX || seen[v] {
                rep.fail("evaluation is not a bijection");
                break;
            }
            seen[v] = true;
        }
        if !seen.iter().all(|&s| s) {
            rep.fail("evaluation is not surjective");
        }
    }
    // Étalé morphism (fiber-preserving, bicontinuous) and stalkwise
    // isomorphism.
    let v = validate_etale_morphism(eps, &et_ps.space, t, budget)?;
    if !v.is_valid() {
        rep.fail(format!(
            "evaluation fails étalé validation: {}",
            v.first_failure().map(|c| c.name.clone()).unwrap_or_default()
        ));
    }
    for b in 0..t.base.n() {
        let src_alg = et_ps.stalks[b].algebra.clone();
        let dst_alg = t.stalk(b)?.clone();
        let map: Vec<usize> = (0..src_alg.n())
            .map(|e| t.fiber_position(eps[et_ps.total_index(b, e)]))
            .collect();
        let f = RLMorphism {
            src: src_alg,
            dst: dst_alg,
            map,
        };
        if !(check_morphism(&f).report.is_valid() && f.is_bijective()) {
            rep.fail(format!(
                "evaluation is not a stalkwise isomorphism at {}",
                t.base.points[b]
            ));
        }
    }
    // Naturality squares for the supplied morphisms.
    for (i, (s, h)) in inst.morphisms.iter().enumerate() {
        let hv = validate_etale_morphism(h, t, s, budget)?;
        if !hv.is_valid() {
            return Err(Error::Precondition(format!(
                "supplied morphism {i} is not an étalé morphism"
            )));
        }
        let ev_s = evaluation_map(s, budget)?;
        // The rebuilt image of h on germ classes: class e at x (a section
        // over the minimal neighborhood) maps to (h after the section).
        'sq: for x in 0..t.base.n() {
            let mo = et_ps.stalks[x].min_open;
            for e in 0..et_ps.stalks[x].algebra.n() {
                let sec = &ev.section_lists[mo][e];
                let mapped: Vec<usize> = sec.values.iter().map(|&p| h[p]).collect();
                let idx = ev_s.section_lists[mo]
                    .iter()
                    .position(|c| c.values == mapped)
                    .ok_or_else(|| {
                        Error::Precondition("mapped section is not continuous".into())
                    })?;
                // Left route: rebuilt h then evaluation in the target.
                let left = ev_s.map[ev_s.stalk_space.total_index(x, idx)];
                // Right route: evaluation in the source then h.
                let right = h[eps[et_ps.total_index(x, e)]];
                if left != right {
                    rep.fail(format!("naturality square {i} fails at {}", t.base.points[x]));
                    break 'sq;
                }
            }
        }
    }
    Ok(rep)
}

/// Identities and composites of stalkwise-morphic étalé maps stay in the
/// subcategory. Composable entries are (i, j, l, h1, h2) with
/// `h1: spaces[i] -> spaces[j]` and `h2: spaces[j] -> spaces[l]`.
pub fn check_subcategory(
    spaces: &[&EtaleSpace],
    composable: &[(usize, usize, usize, Vec<usize>, Vec<usize>)],
    budget: &Budget,
) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new(
        "étalé spaces of residuated lattices form a subcategory",
        format!("{} spaces, {} composable pairs", spaces.len(), composable.len()),
    );
    for (i, e) in spaces.iter().enumerate() {
        let idmap: Vec<usize> = (0..e.total.n()).collect();
        let v = validate_etale_morphism(&idmap, e, e, budget)?;
        if !v.is_valid() {
            rep.fail(format!("identity on space {i} is not a morphism"));
        }
    }
    for (k, (i, j, l, h1, h2)) in composable.iter().enumerate() {
        let (a, b, c) = (spaces[*i], spaces[*j], spaces[*l]);
        let v1 = validate_etale_morphism(h1, a, b, budget)?;
        let v2 = validate_etale_morphism(h2, b, c, budget)?;
        if !v1.is_valid() || !v2.is_valid() {
            rep.fail(format!("pair {k}: a factor is rejected"));
            continue;
        }
        let comp: Vec<usize> = h1.iter().map(|&t| h2[t]).collect();
        let vc = validate_etale_morphism(&comp, a, c, budget)?;
        if !vc.is_valid() {
            rep.fail(format!("pair {k}: composite fails validation"));
        }
    }
    Ok(rep)
}
