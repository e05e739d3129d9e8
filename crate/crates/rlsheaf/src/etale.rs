//! Étalé spaces of sets and of residuated lattices over a finite base:
//! validation, section enumeration, section algebras, equalizers, stalk
//! discreteness, and étalé-morphism checking.
//!
//! Plain set-étalé spaces and algebra-valued ones share one type; the stalk
//! algebras are optional and the validation layers compose.

use crate::algebra::{self, check_morphism, AlgRef, FinResLat, RLMorphism, BINARY_OPS};
use crate::bitset::BitSet;
use crate::report::{Budget, Error, Result, ValidationReport};
use crate::topology::{self, ContinuousMap, SpaceRef};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone)]
pub struct EtaleSpace {
    pub base: SpaceRef,
    pub total: SpaceRef,
    /// Total point -> base point.
    pub proj: Vec<usize>,
    /// Base point -> total points of its fiber, ascending. Stalk algebra
    /// element `i` is fiber point `fibers[b][i]`.
    pub fibers: Vec<Vec<usize>>,
    pub stalk_algebras: Option<Vec<AlgRef>>,
}

impl EtaleSpace {
    pub fn new(
        base: SpaceRef,
        total: SpaceRef,
        proj: Vec<usize>,
        stalk_algebras: Option<Vec<AlgRef>>,
    ) -> Result<Self> {
        if proj.len() != total.n() {
            return Err(Error::Format(
                "projection length differs from the total point count".into(),
            ));
        }
        if let Some(&bad) = proj.iter().find(|&&b| b >= base.n()) {
            return Err(Error::Format(format!("projection hits unknown base point {bad}")));
        }
        let mut fibers = vec![Vec::new(); base.n()];
        for (t, &b) in proj.iter().enumerate() {
            fibers[b].push(t);
        }
        if let Some(stalks) = &stalk_algebras {
            if stalks.len() != base.n() {
                return Err(Error::Format("one stalk algebra per base point is required".into()));
            }
            for (b, s) in stalks.iter().enumerate() {
                if s.n() != fibers[b].len() {
                    return Err(Error::Format(format!(
                        "stalk at {} has {} elements but the fiber has {} points",
                        base.points[b],
                        s.n(),
                        fibers[b].len()
                    )));
                }
            }
        }
        Ok(EtaleSpace {
            base,
            total,
            proj,
            fibers,
            stalk_algebras,
        })
    }

    /// Identity projection with the one-element stalk everywhere.
    pub fn identity_over(base: SpaceRef) -> Self {
        let total = base.clone();
        let proj: Vec<usize> = (0..base.n()).collect();
        let stalks = Some(
            (0..base.n())
                .map(|_| algebra::one_element("1"))
                .collect::<Vec<_>>(),
        );
        EtaleSpace::new(base, total, proj, stalks).expect("identity space is well-formed")
    }

    /// Position of a total point within its fiber.
    pub fn fiber_position(&self, t: usize) -> usize {
        self.fibers[self.proj[t]]
            .iter()
            .position(|&u| u == t)
            .expect("fibers partition the total set")
    }

    pub fn stalk(&self, b: usize) -> Result<&AlgRef> {
        self.stalk_algebras
            .as_ref()
            .map(|s| &s[b])
            .ok_or_else(|| Error::Precondition("space carries no stalk algebras".into()))
    }

    /// Applies a stalk operation to two total points of the same fiber.
    fn op_at(&self, op: algebra::Op, t1: usize, t2: usize) -> Result<usize> {
        let b = self.proj[t1];
        if self.proj[t2] != b {
            return Err(Error::Precondition("operands lie in different fibers".into()));
        }
        let alg = self.stalk(b)?;
        let r = alg.apply(op, self.fiber_position(t1), self.fiber_position(t2));
        Ok(self.fibers[b][r])
    }

    fn constant_point(&self, b: usize, top: bool) -> Result<usize> {
        let alg = self.stalk(b)?;
        Ok(self.fibers[b][if top { alg.top } else { alg.bot }])
    }

    pub fn projection_map(&self) -> ContinuousMap {
        ContinuousMap::new(self.total.clone(), self.base.clone(), self.proj.clone())
            .expect("projection arity was checked at construction")
    }
}

/// A right inverse of the projection over a subset of the base, with values
/// aligned to the ascending listing of the domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Section {
    pub domain: BitSet,
    pub values: Vec<usize>,
}

impl Section {
    pub fn value_at(&self, p: usize) -> Option<usize> {
        self.domain
            .indices()
            .iter()
            .position(|&q| q == p)
            .map(|i| self.values[i])
    }

    pub fn restrict(&self, sub: &BitSet) -> Section {
        let values = self
            .domain
            .indices()
            .iter()
            .zip(&self.values)
            .filter(|(p, _)| sub.contains(**p))
            .map(|(_, &v)| v)
            .collect();
        Section {
            domain: self.domain.intersection(sub),
            values,
        }
    }

    /// Image of the section as a subset of the total space.
    pub fn image(&self, total_points: usize) -> BitSet {
        BitSet::from_indices(total_points, &self.values)
    }
}

/// Is `values` (aligned to `dom`) continuous as a map from the subspace
/// `dom` of the base into the total space? Finite-space criterion: the image
/// of each subspace minimal neighborhood sits inside the minimal
/// neighborhood of the image point.
fn section_continuous(e: &EtaleSpace, dom: &BitSet, values: &[usize]) -> bool {
    let pts = dom.indices();
    let at = |p: usize| values[pts.iter().position(|&q| q == p).unwrap()];
    pts.iter().all(|&p| {
        e.base
            .subspace_min_nbhd(p, dom)
            .iter()
            .all(|q| e.total.min_nbhd(at(p)).contains(at(q)))
    })
}

/// Enumerates all sections over `x` in lexicographic order of their value
/// tuples. Candidates are the product of the fibers, pruned by the
/// specialization constraints.
pub fn sections(e: &EtaleSpace, x: &BitSet, budget: &Budget) -> Result<Vec<Section>> {
    let pts = x.indices();
    let mut space = 1usize;
    for &p in &pts {
        space = space.saturating_mul(e.fibers[p].len().max(1));
        if space > budget.section_candidates {
            return Err(Error::Resource(format!(
                "section enumeration over {space}+ candidates exceeds the budget"
            )));
        }
        if e.fibers[p].is_empty() {
            return Ok(Vec::new());
        }
    }
    let mut out = Vec::new();
    let mut values: Vec<usize> = Vec::with_capacity(pts.len());

    fn consistent(e: &EtaleSpace, pts: &[usize], values: &[usize], i: usize, cand: usize) -> bool {
        for j in 0..i {
            let (p, q) = (pts[i], pts[j]);
            // q in minN(p) forces sigma(q) in minN(sigma(p)), and symmetrically.
            if e.base.min_nbhd(p).contains(q) && !e.total.min_nbhd(cand).contains(values[j]) {
                return false;
            }
            if e.base.min_nbhd(q).contains(p) && !e.total.min_nbhd(values[j]).contains(cand) {
                return false;
            }
        }
        true
    }

    fn rec(
        e: &EtaleSpace,
        pts: &[usize],
        values: &mut Vec<usize>,
        out: &mut Vec<Section>,
        dom: &BitSet,
    ) {
        let i = values.len();
        if i == pts.len() {
            debug_assert!(section_continuous(e, dom, values));
            out.push(Section {
                domain: dom.clone(),
                values: values.clone(),
            });
            return;
        }
        for &t in &e.fibers[pts[i]] {
            if consistent(e, pts, values, i, t) {
                values.push(t);
                rec(e, pts, values, out, dom);
                values.pop();
            }
        }
    }

    rec(e, &pts, &mut values, &mut out, x);
    Ok(out)
}

/// The pointwise algebra on `Γ(U, E)`. Fails when the section set is not
/// closed under the pointwise operations, which signals an invalid étalé
/// space of residuated lattices.
pub fn section_algebra(e: &EtaleSpace, u: &BitSet, budget: &Budget) -> Result<(AlgRef, Vec<Section>)> {
    if !e.base.is_open(u) {
        return Err(Error::Precondition(format!(
            "{} is not open in the base",
            e.base.set_label(u)
        )));
    }
    let secs = sections(e, u, budget)?;
    let n = secs.len();
    let index: BTreeMap<&Vec<usize>, usize> = secs
        .iter()
        .enumerate()
        .map(|(i, s)| (&s.values, i))
        .collect();
    let pts = u.indices();
    let pointwise = |op: algebra::Op, i: usize, j: usize| -> Result<Vec<usize>> {
        pts.iter()
            .enumerate()
            .map(|(k, _)| e.op_at(op, secs[i].values[k], secs[j].values[k]))
            .collect()
    };
    let label = |s: &Section| -> String {
        let mut out = String::from("<");
        for (k, &v) in s.values.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&e.total.points[v]);
        }
        out.push('>');
        out
    };
    let elems: Vec<String> = secs.iter().map(label).collect();
    if n == 0 {
        return Err(Error::Precondition(format!(
            "no sections over {}; the projection is not surjective there",
            e.base.set_label(u)
        )));
    }
    let mut leq = vec![false; n * n];
    let mut tables: BTreeMap<algebra::Op, Vec<usize>> = BTreeMap::new();
    for op in BINARY_OPS {
        tables.insert(op, vec![0; n * n]);
    }
    for i in 0..n {
        for j in 0..n {
            for op in BINARY_OPS {
                let vals = pointwise(op, i, j)?;
                let Some(&r) = index.get(&vals) else {
                    return Err(Error::Precondition(format!(
                        "sections over {} are not closed under {}: {} {} {} escapes",
                        e.base.set_label(u),
                        op.symbol(),
                        elems[i],
                        op.symbol(),
                        elems[j]
                    )));
                };
                tables.get_mut(&op).unwrap()[i * n + j] = r;
            }
            leq[i * n + j] = pts.iter().enumerate().all(|(k, _)| {
                let b = e.proj[secs[i].values[k]];
                let alg = e.stalk(b).expect("stalk algebras present");
                alg.leq(
                    e.fiber_position(secs[i].values[k]),
                    e.fiber_position(secs[j].values[k]),
                )
            });
        }
    }
    let bot_vals: Result<Vec<usize>> = pts.iter().map(|&p| e.constant_point(p, false)).collect();
    let top_vals: Result<Vec<usize>> = pts.iter().map(|&p| e.constant_point(p, true)).collect();
    let bot = *index.get(&bot_vals?).ok_or_else(|| {
        Error::Precondition(format!(
            "the zero section over {} is not continuous",
            e.base.set_label(u)
        ))
    })?;
    let top = *index.get(&top_vals?).ok_or_else(|| {
        Error::Precondition(format!(
            "the unit section over {} is not continuous",
            e.base.set_label(u)
        ))
    })?;
    let alg = FinResLat::from_parts(
        format!("Gamma({})", e.base.set_label(u)),
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
            "pointwise structure on sections over {} fails validation: {}",
            e.base.set_label(u),
            rep.first_failure().map(|c| c.name.clone()).unwrap_or_default()
        )));
    }
    Ok((Arc::new(alg), secs))
}

pub struct EqualizerResult {
    pub set: BitSet,
    pub open: bool,
    /// Closed as well, when the total space is Hausdorff (finite Hausdorff
    /// means discrete).
    pub clopen_in_hausdorff: Option<bool>,
}

/// `{ b in dom σ ∩ dom τ | σ(b) = τ(b) }`, with an openness certificate.
pub fn equalizer(e: &EtaleSpace, sigma: &Section, tau: &Section) -> Result<EqualizerResult> {
    if !e.base.is_open(&sigma.domain) || !e.base.is_open(&tau.domain) {
        return Err(Error::Precondition("section domains must be open".into()));
    }
    let common = sigma.domain.intersection(&tau.domain);
    let mut set = BitSet::new(e.base.n());
    for p in common.iter() {
        if sigma.value_at(p) == tau.value_at(p) {
            set.insert(p);
        }
    }
    let open = e.base.is_open(&set);
    let clopen = if e.total.is_hausdorff() {
        let complement_in_common = common.difference(&set);
        Some(open && e.base.is_open(&complement_in_common) || set == common)
    } else {
        None
    };
    Ok(EqualizerResult {
        set,
        open,
        clopen_in_hausdorff: clopen,
    })
}

/// Full validation of an étalé space of residuated lattices:
/// (i) the projection is a local homeomorphism (both formulations agree);
/// (ii) stalks are valid algebras carried exactly by the fibers;
/// (iii) sections over every base open are closed under pointwise operations;
/// (iv) the fiberwise operations are continuous on the pair space and the
/// constant sections are continuous. The (iii) and (iv) verdicts must agree.
pub fn validate_etale_space(e: &EtaleSpace, budget: &Budget) -> Result<ValidationReport> {
    let mut rep = ValidationReport::new("etale space");
    let props = topology::map_properties(&e.projection_map(), budget);
    rep.check(
        "projection is a local homeomorphism",
        props.local_homeomorphism,
        format!(
            "continuous={}, open={}, locally injective={}",
            props.continuous, props.open, props.locally_injective
        ),
    );
    rep.check(
        "local-homeomorphism formulations agree",
        props.routes_agree(),
        "conjunction and definitional verdicts differ",
    );

    let Some(stalks) = &e.stalk_algebras else {
        rep.note("no stalk algebras; set-level checks only");
        return Ok(rep);
    };
    let mut stalks_ok = true;
    for (b, s) in stalks.iter().enumerate() {
        let r = algebra::revalidate(s);
        if !r.is_valid() {
            rep.fail(
                format!("stalk at {} is a residuated lattice", e.base.points[b]),
                r.first_failure().map(|c| c.name.clone()).unwrap_or_default(),
            );
            stalks_ok = false;
        }
    }
    if stalks_ok {
        rep.pass("every stalk is a valid residuated lattice");
    }

    // (iii) sections over each open are closed under pointwise operations.
    let opens = e.base.opens(budget.opens)?;
    let mut closed_ok = true;
    let mut closed_witness = String::new();
    for u in &opens {
        match section_algebra(e, u, budget) {
            Ok(_) => {}
            Err(Error::Resource(m)) => return Err(Error::Resource(m)),
            Err(err) => {
                closed_ok = false;
                closed_witness = err.to_string();
                break;
            }
        }
    }
    rep.check(
        "sections over every open form an algebra (criterion 2)",
        closed_ok,
        closed_witness,
    );

    // (iv) operation continuity on the pair space, plus the 0/1 sections.
    let mut cont_ok = true;
    let mut cont_witness = String::new();
    'outer: for b in 0..e.base.n() {
        for &t1 in &e.fibers[b] {
            for &t2 in &e.fibers[b] {
                for op in BINARY_OPS {
                    let r = e.op_at(op, t1, t2)?;
                    for u1 in e.total.min_nbhd(t1).iter() {
                        for u2 in e.total.min_nbhd(t2).iter() {
                            if e.proj[u1] != e.proj[u2] {
                                continue;
                            }
                            let ru = e.op_at(op, u1, u2)?;
                            if !e.total.min_nbhd(r).contains(ru) {
                                cont_ok = false;
                                cont_witness = format!(
                                    "{} is discontinuous at ({}, {}): nearby pair ({}, {}) maps outside the neighborhood of {}",
                                    op.symbol(),
                                    e.total.points[t1],
                                    e.total.points[t2],
                                    e.total.points[u1],
                                    e.total.points[u2],
                                    e.total.points[r]
                                );
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    if cont_ok {
        for top in [false, true] {
            let map: Result<Vec<usize>> =
                (0..e.base.n()).map(|b| e.constant_point(b, top)).collect();
            let map = map?;
            if !topology::is_continuous(&e.base, &e.total, &map) {
                cont_ok = false;
                cont_witness = format!(
                    "the {} section is discontinuous",
                    if top { "unit" } else { "zero" }
                );
                break;
            }
        }
    }
    rep.check(
        "operations are continuous on the pair space (criterion 3)",
        cont_ok,
        cont_witness,
    );
    rep.check(
        "criteria 2 and 3 agree",
        closed_ok == cont_ok,
        format!("sections-closed={closed_ok}, operations-continuous={cont_ok}"),
    );
    Ok(rep)
}

/// Checks that `h` (a map on total points over the same base) is a morphism
/// of étalé spaces of residuated lattices: it preserves fibers, the three
/// topological verdicts (continuity, openness, local homeomorphism) agree
/// and hold, and each fiber restriction is an algebra morphism.
pub fn validate_etale_morphism(
    h: &[usize],
    e: &EtaleSpace,
    f: &EtaleSpace,
    budget: &Budget,
) -> Result<ValidationReport> {
    if h.len() != e.total.n() {
        return Err(Error::Format(format!(
            "map length {} does not match the source total size {}",
            h.len(),
            e.total.n()
        )));
    }
    if let Some(&bad) = h.iter().find(|&&t| t >= f.total.n()) {
        return Err(Error::Format(format!("image point {bad} out of range")));
    }
    let mut rep = ValidationReport::new("etale morphism");
    let fiber_ok = (0..e.total.n()).all(|t| f.proj[h[t]] == e.proj[t]);
    rep.check(
        "commutes with the projections",
        fiber_ok,
        "some point changes fiber",
    );
    let cmap = ContinuousMap::new(e.total.clone(), f.total.clone(), h.to_vec())?;
    let props = topology::map_properties(&cmap, budget);
    rep.check(
        "continuity, openness, and local homeomorphism agree",
        props.continuous == props.open
            && props.open == props.local_homeomorphism
            && props.routes_agree(),
        format!(
            "continuous={}, open={}, local homeomorphism={}",
            props.continuous, props.open, props.local_homeomorphism
        ),
    );
    rep.check("continuous", props.continuous, "preimage of an open is not open");
    if let (Some(se), Some(sf)) = (&e.stalk_algebras, &f.stalk_algebras) {
        let mut stalk_ok = true;
        for b in 0..e.base.n() {
            if !fiber_ok {
                break;
            }
            let map: Vec<usize> = e.fibers[b]
                .iter()
                .map(|&t| f.fiber_position(h[t]))
                .collect();
            let m = RLMorphism::new(se[b].clone(), sf[b].clone(), map)?;
            let chk = check_morphism(&m);
            if !chk.report.is_valid() {
                rep.fail(
                    format!("fiber map at {} is an algebra morphism", e.base.points[b]),
                    chk.report
                        .first_failure()
                        .map(|c| {
                            format!(
                                "{}{}",
                                c.name,
                                c.witness
                                    .as_deref()
                                    .map(|w| format!(" ({w})"))
                                    .unwrap_or_default()
                            )
                        })
                        .unwrap_or_default(),
                );
                stalk_ok = false;
            }
        }
        if stalk_ok {
            rep.pass("all fiber maps are algebra morphisms");
        }
    }
    Ok(rep)
}

/// Asserts discreteness of every fiber's subspace topology and that section
/// images form a basis of the total topology, by exhibiting for every total
/// point a section through it whose image is the point's minimal
/// neighborhood.
pub fn stalk_discreteness(e: &EtaleSpace) -> ValidationReport {
    let mut rep = ValidationReport::new("stalk discreteness");
    let mut discrete = true;
    for t in 0..e.total.n() {
        let overlap: Vec<usize> = e
            .total
            .min_nbhd(t)
            .iter()
            .filter(|&u| e.proj[u] == e.proj[t])
            .collect();
        if overlap != vec![t] {
            rep.fail(
                "fibers are discrete subspaces",
                format!(
                    "the fiber neighborhood of {} also contains {:?}",
                    e.total.points[t], overlap
                ),
            );
            discrete = false;
            break;
        }
    }
    if discrete {
        rep.pass("fibers are discrete subspaces");
    }
    let mut basis_ok = true;
    for t in 0..e.total.n() {
        // Candidate section: invert the projection on the minimal
        // neighborhood of t.
        let v = e.total.min_nbhd(t);
        let mut dom = BitSet::new(e.base.n());
        let mut values_by_point: BTreeMap<usize, usize> = BTreeMap::new();
        let mut unique = true;
        for u in v.iter() {
            if values_by_point.insert(e.proj[u], u).is_some() {
                unique = false;
            }
            dom.insert(e.proj[u]);
        }
        let values: Vec<usize> = values_by_point.values().copied().collect();
        let through = values_by_point.get(&e.proj[t]) == Some(&t);
        if !(unique
            && e.base.is_open(&dom)
            && section_continuous(e, &dom, &values)
            && through)
        {
            rep.fail(
                "section images form a basis",
                format!(
                    "no section through {} with image inside its minimal neighborhood",
                    e.total.points[t]
                ),
            );
            basis_ok = false;
            break;
        }
    }
    if basis_ok {
        rep.pass("section images form a basis and every point lies on a section");
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::FinTopSpace;
    use crate::fixtures;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn identity_space_is_valid_with_single_sections() {
        let base = Arc::new(FinTopSpace::sierpinski());
        let e = EtaleSpace::identity_over(base.clone());
        let rep = validate_etale_space(&e, &b()).unwrap();
        assert!(rep.is_valid(), "{rep}");
        for u in base.opens(64).unwrap() {
            let secs = sections(&e, &u, &b()).unwrap();
            assert_eq!(secs.len(), 1);
        }
        let empty = sections(&e, &base.empty_set(), &b()).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].values.is_empty());
    }

    #[test]
    fn mismatched_stalk_orientation_is_caught_by_both_criteria() {
        // Two two-element stalks over the Sierpinski base, glued along the
        // diagonal sections, with the y-stalk deliberately flipped.
        let base = Arc::new(FinTopSpace::sierpinski());
        let sets = [
            BitSet::from_indices(4, &[0]),
            BitSet::from_indices(4, &[1]),
            BitSet::from_indices(4, &[0, 2]),
            BitSet::from_indices(4, &[1, 3]),
        ];
        let total = Arc::new(FinTopSpace::from_subbasis(
            vec!["x:0".into(), "x:1".into(), "y:0".into(), "y:1".into()],
            &sets,
        ));
        let two = algebra::lukasiewicz_chain(1);
        // Same two-element algebra, but with top at fiber position 0.
        let flipped = crate::algebra::validate_residuated_lattice(&crate::algebra::RawAlgebra {
            name: "two-flipped".into(),
            elems: vec!["1".into(), "0".into()],
            order: vec![("0".into(), "1".into())],
            prod: vec![
                vec!["1".into(), "0".into()],
                vec!["0".into(), "0".into()],
            ],
            imp: None,
            bot: "0".into(),
            top: "1".into(),
        })
        .unwrap()
        .algebra
        .unwrap();
        let good = EtaleSpace::new(
            base.clone(),
            total.clone(),
            vec![0, 0, 1, 1],
            Some(vec![two.clone(), two.clone()]),
        )
        .unwrap();
        let rep = validate_etale_space(&good, &b()).unwrap();
        assert!(rep.is_valid(), "{rep}");

        let bad = EtaleSpace::new(base, total, vec![0, 0, 1, 1], Some(vec![two, flipped])).unwrap();
        let rep = validate_etale_space(&bad, &b()).unwrap();
        assert!(!rep.is_valid());
        // Criteria 2 and 3 must still agree on the failure.
        assert!(rep
            .checks
            .iter()
            .any(|c| c.name.contains("agree") && c.passed));
    }

    #[test]
    fn equalizers_of_sections_are_open() {
        let base = Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]));
        let e = crate::sheafify::etale_of_presheaf(
            &crate::presheaf::constant_presheaf(base, &fixtures::a4(), &b()).unwrap(),
            &b(),
        )
        .unwrap();
        let full = e.space.base.full_set();
        let secs = sections(&e.space, &full, &b()).unwrap();
        assert_eq!(secs.len(), 16);
        let mut seen_partial = false;
        for s in &secs {
            for t in &secs {
                let eq = equalizer(&e.space, s, t).unwrap();
                assert!(eq.open);
                if s == t {
                    assert_eq!(eq.set, full.intersection(&full));
                } else if eq.set.len() == 1 {
                    seen_partial = true;
                }
            }
        }
        // Two global sections differing at exactly one point witness the
        // singleton equalizer.
        assert!(seen_partial);
    }

    #[test]
    fn disjoint_valued_sections_have_empty_equalizer() {
        let base = Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]));
        let e = crate::sheafify::etale_of_presheaf(
            &crate::presheaf::constant_presheaf(base, &fixtures::a4(), &b()).unwrap(),
            &b(),
        )
        .unwrap();
        let full = e.space.base.full_set();
        let secs = sections(&e.space, &full, &b()).unwrap();
        let bot = secs
            .iter()
            .find(|s| s.values.iter().all(|&v| {
                let bpt = e.space.proj[v];
                e.space.fiber_position(v) == e.space.stalk(bpt).unwrap().bot
            }))
            .unwrap();
        let top = secs
            .iter()
            .find(|s| s.values.iter().all(|&v| {
                let bpt = e.space.proj[v];
                e.space.fiber_position(v) == e.space.stalk(bpt).unwrap().top
            }))
            .unwrap();
        let eq = equalizer(&e.space, bot, top).unwrap();
        assert!(eq.set.is_empty() && eq.open);
    }

    #[test]
    fn section_algebra_over_empty_open_is_terminal() {
        let e = EtaleSpace::identity_over(Arc::new(FinTopSpace::sierpinski()));
        let (alg, secs) = section_algebra(&e, &e.base.empty_set(), &b()).unwrap();
        assert_eq!(alg.n(), 1);
        assert_eq!(secs.len(), 1);
    }

    #[test]
    fn sections_over_a_disjoint_union_form_the_product() {
        // Γ(U ⊔ V) is isomorphic to Γ(U) x Γ(V) for disjoint opens,
        // checked by the isomorphism oracle.
        let base = Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]));
        let e = crate::sheafify::etale_of_presheaf(
            &crate::presheaf::constant_presheaf(base, &fixtures::a4(), &b()).unwrap(),
            &b(),
        )
        .unwrap();
        let u = BitSet::from_indices(2, &[0]);
        let v = BitSet::from_indices(2, &[1]);
        let (gu, _) = section_algebra(&e.space, &u, &b()).unwrap();
        let (gv, _) = section_algebra(&e.space, &v, &b()).unwrap();
        let (guv, _) = section_algebra(&e.space, &u.union(&v), &b()).unwrap();
        let (prod, _, _) = algebra::product_algebra(&gu, &gv);
        assert!(algebra::are_isomorphic(&guv, &prod));
        // And each factor is the stalk there.
        assert!(algebra::are_isomorphic(&gu, &fixtures::a4()));
    }

    #[test]
    fn equalizers_are_clopen_over_hausdorff_totals() {
        // The stalk space of a constant presheaf over a discrete base is
        // discrete, hence Hausdorff; equalizers must come out clopen.
        let base = Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]));
        let e = crate::sheafify::etale_of_presheaf(
            &crate::presheaf::constant_presheaf(base, &fixtures::a4(), &b()).unwrap(),
            &b(),
        )
        .unwrap();
        assert!(e.space.total.is_hausdorff());
        let full = e.space.base.full_set();
        let secs = sections(&e.space, &full, &b()).unwrap();
        for s in &secs {
            for t in &secs {
                let eq = equalizer(&e.space, s, t).unwrap();
                assert_eq!(eq.clopen_in_hausdorff, Some(true));
            }
        }
    }

    #[test]
    fn identity_morphism_is_valid() {
        let e = EtaleSpace::identity_over(Arc::new(FinTopSpace::sierpinski()));
        let idmap: Vec<usize> = (0..e.total.n()).collect();
        let rep = validate_etale_morphism(&idmap, &e, &e, &b()).unwrap();
        assert!(rep.is_valid(), "{rep}");
    }

    #[test]
    fn stalk_discreteness_holds_on_identity_space() {
        let e = EtaleSpace::identity_over(Arc::new(FinTopSpace::sierpinski()));
        assert!(stalk_discreteness(&e).is_valid());
    }

    #[test]
    fn fiber_permutation_breaking_the_operations_is_rejected() {
        // The stalk space of the one-point presheaf of A4 is a discrete
        // 4-point fiber; swapping bottom and top preserves the topology but
        // breaks the algebra on the stalk.
        let p = crate::presheaf::one_point_presheaf(&fixtures::a4(), &b()).unwrap();
        let e = crate::sheafify::etale_of_presheaf(&p, &b()).unwrap().space;
        let a = e.stalk(0).unwrap().clone();
        let mut map: Vec<usize> = (0..e.total.n()).collect();
        map.swap(a.bot, a.top);
        let rep = validate_etale_morphism(&map, &e, &e, &b()).unwrap();
        assert!(!rep.is_valid());
        let stalk_failure = rep
            .failures()
            .any(|c| c.name.contains("fiber map") && c.witness.is_some());
        assert!(stalk_failure, "{rep}");
        // A genuine stalk automorphism passes: swapping the two atoms.
        let (ai, bi) = (a.index_of("a").unwrap(), a.index_of("b").unwrap());
        let mut ok: Vec<usize> = (0..e.total.n()).collect();
        ok.swap(ai, bi);
        assert!(validate_etale_morphism(&ok, &e, &e, &b()).unwrap().is_valid());
    }
}
