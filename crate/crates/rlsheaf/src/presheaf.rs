//! Presheaves of residuated lattices as explicit finite functors, the
//! standard example constructors, and the separation/gluing/equalizer
//! sheaf-condition checkers.

use crate::algebra::{
    self, check_morphism, product_algebra, quotient_by_filter, AlgRef, FilterSubset, RLMorphism,
};
use crate::bitset::{set_order, BitSet};
use crate::report::{Budget, Error, Result, ValidationReport};
use crate::topology::{open_covers, CoverMode, FinTopSpace, SpaceRef};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type PresheafRef = Arc<Presheaf>;

/// An explicit contravariant assignment: every open of the base carries an
/// algebra, every inclusion a restriction map. All inclusion pairs are
/// materialized; composites not supplied at construction are derived.
pub struct Presheaf {
    pub name: String,
    pub base: SpaceRef,
    pub opens: Vec<BitSet>,
    pub values: Vec<AlgRef>,
    restrict: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Presheaf {
    /// `restrictions` maps `(v, u)` with `opens[u] ⊆ opens[v]` to the image
    /// table of the restriction `value(v) -> value(u)`. Missing composites
    /// are derived through intermediate opens; missing cover-relation maps
    /// are a format error.
    pub fn new(
        name: impl Into<String>,
        base: SpaceRef,
        opens: Vec<BitSet>,
        values: Vec<AlgRef>,
        mut restrictions: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<PresheafRef> {
        let name = name.into();
        if values.len() != opens.len() {
            return Err(Error::Format(format!(
                "presheaf '{name}': {} opens but {} values",
                opens.len(),
                values.len()
            )));
        }
        for (i, o) in opens.iter().enumerate() {
            if !base.is_open(o) {
                return Err(Error::Format(format!(
                    "presheaf '{name}': set {} is not open in the base",
                    base.set_label(o)
                )));
            }
            for o2 in opens.iter().skip(i + 1) {
                if o == o2 {
                    return Err(Error::Format(format!(
                        "presheaf '{name}': duplicate open {}",
                        base.set_label(o)
                    )));
                }
            }
        }
        let all_opens = base.opens(1 << 12)?;
        if opens.len() != all_opens.len() {
            return Err(Error::Format(format!(
                "presheaf '{name}': {} opens supplied but the base has {}",
                opens.len(),
                all_opens.len()
            )));
        }
        let m = opens.len();
        for i in 0..m {
            restrictions
                .entry((i, i))
                .or_insert_with(|| (0..values[i].n()).collect());
        }
        // Derive missing composites along intermediate opens.
        loop {
            let mut grew = false;
            for v in 0..m {
                for u in 0..m {
                    if u == v || !opens[u].is_subset(&opens[v]) {
                        continue;
                    }
                    if restrictions.contains_key(&(v, u)) {
                        continue;
                    }
                    for w in 0..m {
                        if w == u || w == v {
                            continue;
                        }
                        if opens[u].is_subset(&opens[w]) && opens[w].is_subset(&opens[v]) {
                            if let (Some(first), Some(second)) =
                                (restrictions.get(&(v, w)), restrictions.get(&(w, u)))
                            {
                                let composite: Vec<usize> =
                                    first.iter().map(|&x| second[x]).collect();
                                restrictions.insert((v, u), composite);
                                grew = true;
                                break;
                            }
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        for v in 0..m {
            for u in 0..m {
                if opens[u].is_subset(&opens[v]) {
                    match restrictions.get(&(v, u)) {
                        None => {
                            return Err(Error::Format(format!(
                                "presheaf '{name}': no restriction {} -> {} and none derivable",
                                base.set_label(&opens[v]),
                                base.set_label(&opens[u])
                            )))
                        }
                        Some(t) if t.len() != values[v].n() => {
                            return Err(Error::Format(format!(
                                "presheaf '{name}': restriction {} -> {} has arity {} (expected {})",
                                base.set_label(&opens[v]),
                                base.set_label(&opens[u]),
                                t.len(),
                                values[v].n()
                            )))
                        }
                        Some(t) if t.iter().any(|&x| x >= values[u].n()) => {
                            return Err(Error::Format(format!(
                                "presheaf '{name}': restriction {} -> {} hits an element out of range",
                                base.set_label(&opens[v]),
                                base.set_label(&opens[u])
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(Arc::new(Presheaf {
            name,
            base,
            opens,
            values,
            restrict: restrictions,
        }))
    }

    /// Builds a presheaf over all opens of `base` from two closures.
    pub fn from_fn(
        name: impl Into<String>,
        base: SpaceRef,
        budget: &Budget,
        value_of: impl Fn(&BitSet) -> AlgRef,
        restrict_elem: impl Fn(&BitSet, &BitSet, usize) -> usize,
    ) -> Result<PresheafRef> {
        let mut opens = base.opens(budget.opens)?;
        opens.sort_by(set_order);
        let values: Vec<AlgRef> = opens.iter().map(&value_of).collect();
        let mut restrictions = BTreeMap::new();
        for (v, ov) in opens.iter().enumerate() {
            for (u, ou) in opens.iter().enumerate() {
                if ou.is_subset(ov) {
                    let table: Vec<usize> = (0..values[v].n())
                        .map(|s| restrict_elem(ov, ou, s))
                        .collect();
                    restrictions.insert((v, u), table);
                }
            }
        }
        Presheaf::new(name, base, opens, values, restrictions)
    }

    pub fn open_index(&self, o: &BitSet) -> Option<usize> {
        self.opens.iter().position(|x| x == o)
    }

    pub fn value(&self, open: usize) -> &AlgRef {
        &self.values[open]
    }

    pub fn restriction_table(&self, v: usize, u: usize) -> &[usize] {
        &self.restrict[&(v, u)]
    }

    pub fn restrict_elem(&self, v: usize, u: usize, s: usize) -> usize {
        self.restrict[&(v, u)][s]
    }

    pub fn restriction(&self, v: usize, u: usize) -> RLMorphism {
        RLMorphism {
            src: self.values[v].clone(),
            dst: self.values[u].clone(),
            map: self.restrict[&(v, u)].clone(),
        }
    }

    pub fn open_label(&self, o: usize) -> String {
        self.base.set_label(&self.opens[o])
    }

    pub fn inclusion_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.restrict.keys().copied()
    }
}

/// Certifies the functor laws and that every restriction is a morphism of
/// residuated lattices.
pub fn validate_presheaf(p: &Presheaf) -> ValidationReport {
    let mut rep = ValidationReport::new(format!("presheaf '{}'", p.name));
    let mut morphisms_ok = true;
    for &(v, u) in p.restrict.keys() {
        let chk = check_morphism(&p.restriction(v, u));
        if !chk.report.is_valid() {
            let why = chk
                .report
                .first_failure()
                .map(|c| {
                    format!(
                        "{}{}",
                        c.name,
                        c.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
                    )
                })
                .unwrap_or_default();
            rep.fail(
                format!(
                    "restriction {} -> {} is a morphism",
                    p.open_label(v),
                    p.open_label(u)
                ),
                why,
            );
            morphisms_ok = false;
        }
    }
    if morphisms_ok {
        rep.pass("all restrictions are morphisms of residuated lattices");
    }
    let mut identity_ok = true;
    for u in 0..p.opens.len() {
        if p.restriction_table(u, u) != (0..p.values[u].n()).collect::<Vec<_>>() {
            rep.fail(
                "identity law",
                format!("restriction {} -> itself is not the identity", p.open_label(u)),
            );
            identity_ok = false;
        }
    }
    if identity_ok {
        rep.pass("identity law");
    }
    let mut comp_ok = true;
    'comp: for &(v, u) in p.restrict.keys() {
        for w in 0..p.opens.len() {
            if p.opens[w].is_subset(&p.opens[u]) {
                // w ⊆ u ⊆ v: going through u must equal going directly.
                let direct = p.restriction_table(v, w);
                let through: Vec<usize> = p
                    .restriction_table(v, u)
                    .iter()
                    .map(|&s| p.restrict_elem(u, w, s))
                    .collect();
                if direct != through {
                    rep.fail(
                        "composition law",
                        format!(
                            "{} -> {} -> {} differs from the direct restriction",
                            p.open_label(v),
                            p.open_label(u),
                            p.open_label(w)
                        ),
                    );
                    comp_ok = false;
                    break 'comp;
                }
            }
        }
    }
    if comp_ok {
        rep.pass("composition law");
    }
    rep
}

// ---------------------------------------------------------------------------
// Morphisms of presheaves

#[derive(Clone)]
pub struct PresheafMorphism {
    pub src: PresheafRef,
    pub dst: PresheafRef,
    /// One component table per open (indexed like `src.opens`).
    pub components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn new(src: PresheafRef, dst: PresheafRef, components: Vec<Vec<usize>>) -> Result<Self> {
        if src.opens != dst.opens {
            return Err(Error::Format(
                "presheaf morphism requires the same base opens on both sides".into(),
            ));
        }
        if components.len() != src.opens.len() {
            return Err(Error::Format("one component per open is required".into()));
        }
        for (u, c) in components.iter().enumerate() {
            if c.len() != src.values[u].n() || c.iter().any(|&x| x >= dst.values[u].n()) {
                return Err(Error::Format(format!(
                    "component at {} has the wrong arity",
                    src.open_label(u)
                )));
            }
        }
        Ok(PresheafMorphism { src, dst, components })
    }

    pub fn identity(p: &PresheafRef) -> Self {
        PresheafMorphism {
            src: p.clone(),
            dst: p.clone(),
            components: p.values.iter().map(|v| (0..v.n()).collect()).collect(),
        }
    }

    pub fn then(&self, other: &PresheafMorphism) -> Result<PresheafMorphism> {
        PresheafMorphism::new(
            self.src.clone(),
            other.dst.clone(),
            self.components
                .iter()
                .enumerate()
                .map(|(u, c)| c.iter().map(|&x| other.components[u][x]).collect())
                .collect(),
        )
    }

    pub fn component(&self, u: usize) -> RLMorphism {
        RLMorphism {
            src: self.src.values[u].clone(),
            dst: self.dst.values[u].clone(),
            map: self.components[u].clone(),
        }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().enumerate().all(|(u, c)| {
            self.src.values[u].n() == self.dst.values[u].n() && {
                let mut seen = vec![false; c.len()];
                c.iter().all(|&x| {
                    let fresh = !seen[x];
                    seen[x] = true;
                    fresh
                })
            }
        })
    }

    pub fn inverse(&self) -> Result<PresheafMorphism> {
        if !self.is_isomorphism() {
            return Err(Error::Precondition("presheaf morphism is not an isomorphism".into()));
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut inv = vec![0; c.len()];
                for (x, &y) in c.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        PresheafMorphism::new(self.dst.clone(), self.src.clone(), components)
    }
}

/// Componentwise morphism checks plus naturality squares.
pub fn validate_presheaf_morphism(m: &PresheafMorphism) -> ValidationReport {
    let mut rep = ValidationReport::new(format!(
        "presheaf morphism '{}' -> '{}'",
        m.src.name, m.dst.name
    ));
    let mut comps_ok = true;
    for u in 0..m.src.opens.len() {
        let chk = check_morphism(&m.component(u));
        if !chk.report.is_valid() {
            rep.fail(
                format!("component at {} is a morphism", m.src.open_label(u)),
                chk.report.first_failure().map(|c| c.name.clone()).unwrap_or_default(),
            );
            comps_ok = false;
        }
    }
    if comps_ok {
        rep.pass("all components are morphisms");
    }
    let mut nat_ok = true;
    'nat: for (v, u) in m.src.inclusion_pairs() {
        for s in 0..m.src.values[v].n() {
            let down_then_across = m.components[u][m.src.restrict_elem(v, u, s)];
            let across_then_down = m.dst.restrict_elem(v, u, m.components[v][s]);
            if down_then_across != across_then_down {
                rep.fail(
                    "naturality",
                    format!(
                        "square {} -> {} fails at section {}",
                        m.src.open_label(v),
                        m.src.open_label(u),
                        m.src.values[v].label(s)
                    ),
                );
                nat_ok = false;
                break 'nat;
            }
        }
    }
    if nat_ok {
        rep.pass("naturality squares commute");
    }
    rep
}

/// All presheaf morphisms `src -> dst`, by per-open morphism enumeration
/// filtered by naturality. Budgeted.
pub fn enumerate_presheaf_morphisms(
    src: &PresheafRef,
    dst: &PresheafRef,
    budget: &Budget,
) -> Result<Vec<PresheafMorphism>> {
    let m = src.opens.len();
    let mut per_open: Vec<Vec<RLMorphism>> = Vec::with_capacity(m);
    let mut space = 1usize;
    for u in 0..m {
        let hom = algebra::enumerate_rl_morphisms(&src.values[u], &dst.values[u], budget.morphism_search)?;
        space = space.saturating_mul(hom.len().max(1));
        if space > budget.morphism_search {
            return Err(Error::Resource(format!(
                "presheaf morphism space exceeds {} candidates",
                budget.morphism_search
            )));
        }
        per_open.push(hom);
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; m];
    'outer: loop {
        if per_open.iter().any(|h| h.is_empty()) {
            return Ok(out);
        }
        let components: Vec<Vec<usize>> = (0..m)
            .map(|u| per_open[u][choice[u]].map.clone())
            .collect();
        let cand = PresheafMorphism::new(src.clone(), dst.clone(), components)?;
        if validate_presheaf_morphism(&cand).is_valid() {
            out.push(cand);
        }
        // Mixed-radix increment.
        for u in 0..m {
            choice[u] += 1;
            if choice[u] < per_open[u].len() {
                continue 'outer;
            }
            choice[u] = 0;
        }
        break;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sheaf condition checkers

/// A family of sections over a cover that agrees on overlaps.
#[derive(Clone, Debug)]
pub struct CompatibleFamily {
    pub open: usize,
    pub cover: Vec<usize>,
    pub sections: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub holds: bool,
    /// A pair of distinct sections with equal restrictions, if any.
    pub witness: Option<(usize, usize)>,
    /// The unit-section criterion must reach the same verdict.
    pub unit_criterion_agrees: bool,
}

/// Two sections of `value(O)` agreeing on every cover member must be equal.
pub fn check_separation(
    p: &Presheaf,
    open: usize,
    cover: &[usize],
    _mode: CoverMode,
) -> SeparationReport {
    let val = &p.values[open];
    let agree = |s: usize, t: usize| {
        cover
            .iter()
            .all(|&u| p.restrict_elem(open, u, s) == p.restrict_elem(open, u, t))
    };
    let mut witness = None;
    'outer: for s in 0..val.n() {
        for t in (s + 1)..val.n() {
            if agree(s, t) {
                witness = Some((s, t));
                break 'outer;
            }
        }
    }
    // Unit-section criterion: locally 1 implies 1.
    let unit_holds = (0..val.n()).all(|s| {
        let locally_one = cover
            .iter()
            .all(|&u| p.restrict_elem(open, u, s) == p.values[u].top);
        !locally_one || s == val.top
    });
    SeparationReport {
        holds: witness.is_none(),
        witness,
        unit_criterion_agrees: (witness.is_none()) == unit_holds,
    }
}

#[derive(Clone, Debug)]
pub struct GluingReport {
    pub holds: bool,
    pub witness: Option<CompatibleFamily>,
    pub families_checked: usize,
}

fn pair_compatible(
    p: &Presheaf,
    cover: &[usize],
    mode: CoverMode,
    i: usize,
    j: usize,
    si: usize,
    sj: usize,
) -> bool {
    let inter = p.opens[cover[i]].intersection(&p.opens[cover[j]]);
    if mode == CoverMode::Paper && inter.is_empty() {
        return true;
    }
    let w = p
        .open_index(&inter)
        .expect("topologies are closed under intersection");
    p.restrict_elem(cover[i], w, si) == p.restrict_elem(cover[j], w, sj)
}

/// Every compatible family over the cover must glue to a section of
/// `value(O)`. Families are enumerated exhaustively (depth-first with
/// overlap pruning); the first family without a glue is the witness.
pub fn check_gluing(
    p: &Presheaf,
    open: usize,
    cover: &[usize],
    mode: CoverMode,
    budget: &Budget,
) -> Result<GluingReport> {
    let candidates: usize = cover
        .iter()
        .map(|&u| p.values[u].n())
        .try_fold(1usize, |acc, n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if candidates > budget.tuple_scan {
        return Err(Error::Resource(format!(
            "gluing enumeration over {candidates} candidate families exceeds the budget"
        )));
    }
    let mut family: Vec<usize> = Vec::with_capacity(cover.len());
    let mut checked = 0usize;
    let glue_exists = |family: &[usize]| {
        (0..p.values[open].n()).any(|s| {
            cover
                .iter()
                .enumerate()
                .all(|(i, &u)| p.restrict_elem(open, u, s) == family[i])
        })
    };

    fn rec(
        p: &Presheaf,
        open: usize,
        cover: &[usize],
        mode: CoverMode,
        family: &mut Vec<usize>,
        checked: &mut usize,
        glue_exists: &impl Fn(&[usize]) -> bool,
    ) -> Option<CompatibleFamily> {
        if family.len() == cover.len() {
            *checked += 1;
            if !glue_exists(family) {
                return Some(CompatibleFamily {
                    open,
                    cover: cover.to_vec(),
                    sections: family.clone(),
                });
            }
            return None;
        }
        let i = family.len();
        for s in 0..p.values[cover[i]].n() {
            let ok = (0..i).all(|j| pair_compatible(p, cover, mode, i, j, s, family[j]));
            if ok {
                family.push(s);
                if let Some(w) = rec(p, open, cover, mode, family, checked, glue_exists) {
                    return Some(w);
                }
                family.pop();
            }
        }
        None
    }

    let witness = rec(p, open, cover, mode, &mut family, &mut checked, &glue_exists);
    Ok(GluingReport {
        holds: witness.is_none(),
        witness,
        families_checked: checked,
    })
}

#[derive(Clone, Debug)]
pub struct EqualizerReport {
    pub holds: bool,
    pub injective: bool,
    pub image_is_equalizer: bool,
    pub witness: Option<String>,
    pub tuples_scanned: usize,
}

/// Checks that restriction into the product over the cover equalizes the two
/// overlap comparisons: the induced map must be injective with image exactly
/// the tuples whose two overlap restrictions agree. Products are kept
/// virtual; tuples are scanned exhaustively.
pub fn check_equalizer(
    p: &Presheaf,
    open: usize,
    cover: &[usize],
    budget: &Budget,
) -> Result<EqualizerReport> {
    let val = &p.values[open];
    let image: Vec<Vec<usize>> = (0..val.n())
        .map(|s| cover.iter().map(|&u| p.restrict_elem(open, u, s)).collect())
        .collect();
    let mut sorted = image.clone();
    sorted.sort();
    sorted.dedup();
    let injective = sorted.len() == val.n();
    let mut witness = if injective {
        None
    } else {
        // Name a collapsed pair.
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut w = None;
        for (s, img) in image.iter().enumerate() {
            if let Some(&t) = seen.get(img) {
                w = Some(format!(
                    "sections {} and {} of {} restrict identically",
                    val.label(t),
                    val.label(s),
                    p.open_label(open)
                ));
                break;
            }
            seen.insert(img.clone(), s);
        }
        w
    };

    let sizes: Vec<usize> = cover.iter().map(|&u| p.values[u].n()).collect();
    let total: usize = sizes
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if total > budget.tuple_scan {
        return Err(Error::Resource(format!(
            "equalizer scan over {total} tuples exceeds the budget"
        )));
    }
    let overlap: Vec<Vec<usize>> = cover
        .iter()
        .map(|&u| {
            cover
                .iter()
                .map(|&v| {
                    let inter = p.opens[u].intersection(&p.opens[v]);
                    p.open_index(&inter).expect("opens closed under intersection")
                })
                .collect()
        })
        .collect();
    let mut image_is_equalizer = true;
    let mut tuple = vec![0usize; cover.len()];
    let mut scanned = 0usize;
    loop {
        scanned += 1;
        let equalized = (0..cover.len()).all(|i| {
            (0..cover.len()).all(|j| {
                let w = overlap[i][j];
                p.restrict_elem(cover[i], w, tuple[i]) == p.restrict_elem(cover[j], w, tuple[j])
            })
        });
        if equalized && !image.contains(&tuple) {
            image_is_equalizer = false;
            if witness.is_none() {
                let parts: Vec<String> = cover
                    .iter()
                    .zip(&tuple)
                    .map(|(&u, &s)| format!("{}: {}", p.open_label(u), p.values[u].label(s)))
                    .collect();
                witness = Some(format!(
                    "equalized tuple [{}] is not a restriction of any section of {}",
                    parts.join(", "),
                    p.open_label(open)
                ));
            }
            break;
        }
        // Mixed-radix increment.
        let mut k = 0;
        loop {
            if k == cover.len() {
                return Ok(EqualizerReport {
                    holds: injective && image_is_equalizer,
                    injective,
                    image_is_equalizer,
                    witness,
                    tuples_scanned: scanned,
                });
            }
            tuple[k] += 1;
            if tuple[k] < sizes[k] {
                break;
            }
            tuple[k] = 0;
            k += 1;
        }
    }
    Ok(EqualizerReport {
        holds: injective && image_is_equalizer,
        injective,
        image_is_equalizer,
        witness,
        tuples_scanned: scanned,
    })
}

#[derive(Clone, Debug)]
pub enum SheafFailure {
    Separation {
        open: usize,
        cover: Vec<usize>,
        s: usize,
        t: usize,
    },
    Gluing(CompatibleFamily),
}

#[derive(Clone, Debug)]
pub struct SheafReport {
    pub mode: CoverMode,
    pub is_sheaf: bool,
    pub failures: Vec<SheafFailure>,
    pub covers_checked: usize,
}

impl SheafReport {
    pub fn render(&self, p: &Presheaf) -> String {
        let mut out = format!(
            "sheaf check ({:?} mode) for '{}': {} ({} covers checked)\n",
            self.mode,
            p.name,
            if self.is_sheaf { "sheaf" } else { "NOT a sheaf" },
            self.covers_checked
        );
        for f in &self.failures {
            match f {
                SheafFailure::Separation { open, cover, s, t } => {
                    let members: Vec<String> =
                        cover.iter().map(|&u| p.open_label(u)).collect();
                    out.push_str(&format!(
                        "  separation fails on {} with cover [{}]: sections {} and {} agree on every member\n",
                        p.open_label(*open),
                        members.join(", "),
                        p.values[*open].label(*s),
                        p.values[*open].label(*t),
                    ));
                }
                SheafFailure::Gluing(fam) => {
                    let parts: Vec<String> = fam
                        .cover
                        .iter()
                        .zip(&fam.sections)
                        .map(|(&u, &s)| {
                            format!("{} |- {}", p.open_label(u), p.values[u].label(s))
                        })
                        .collect();
                    out.push_str(&format!(
                        "  gluing fails on {}: compatible family [{}] has no glue\n",
                        p.open_label(fam.open),
                        parts.join("; "),
                    ));
                }
            }
        }
        out
    }
}

/// Quantifies separation and gluing over every open and every canonical
/// cover of it (deduplicated; in strict mode this includes the empty cover
/// of the empty open).
pub fn is_sheaf(p: &Presheaf, mode: CoverMode, budget: &Budget) -> Result<SheafReport> {
    let mut failures = Vec::new();
    let mut covers_checked = 0usize;
    for open in 0..p.opens.len() {
        let covers = open_covers(&p.base, &p.opens[open], mode, budget)?;
        for cover_sets in covers {
            let cover: Vec<usize> = cover_sets
                .iter()
                .map(|o| p.open_index(o).expect("cover members are opens"))
                .collect();
            covers_checked += 1;
            let sep = check_separation(p, open, &cover, mode);
            debug_assert!(
                sep.unit_criterion_agrees,
                "unit-section criterion diverged on a validated presheaf"
            );
            if let Some((s, t)) = sep.witness {
                failures.push(SheafFailure::Separation {
                    open,
                    cover: cover.clone(),
                    s,
                    t,
                });
            }
            let glue = check_gluing(p, open, &cover, mode, budget)?;
            if let Some(w) = glue.witness {
                failures.push(SheafFailure::Gluing(w));
            }
        }
    }
    Ok(SheafReport {
        mode,
        is_sheaf: failures.is_empty(),
        failures,
        covers_checked,
    })
}

// ---------------------------------------------------------------------------
// Constructors

/// Presheaf over the one-point space: the algebra globally, the terminal
/// algebra on the empty open.
pub fn one_point_presheaf(a: &AlgRef, budget: &Budget) -> Result<PresheafRef> {
    let base = Arc::new(FinTopSpace::one_point("*"));
    let one = algebra::one_element("1");
    let a = a.clone();
    Presheaf::from_fn(
        format!("P^{}", a.name),
        base,
        budget,
        |o| if o.is_empty() { one.clone() } else { a.clone() },
        |_, ou, s| if ou.is_empty() { 0 } else { s },
    )
}

/// Skyscraper at `b`: the algebra on opens containing `b`, terminal
/// elsewhere.
pub fn skyscraper_presheaf(base: SpaceRef, b: usize, a: &AlgRef, budget: &Budget) -> Result<PresheafRef> {
    if b >= base.n() {
        return Err(Error::Precondition(format!("no point with index {b}")));
    }
    let one = algebra::one_element("1");
    let a = a.clone();
    let point = base.points[b].clone();
    Presheaf::from_fn(
        format!("S^{},{}", point, a.name),
        base,
        budget,
        move |o| if o.contains(b) { a.clone() } else { one.clone() },
        move |ov, ou, s| {
            if ou.contains(b) {
                s
            } else if ov.contains(b) {
                0
            } else {
                s
            }
        },
    )
}

/// Constant presheaf: the same algebra on every open (including the empty
/// one), identity restrictions.
pub fn constant_presheaf(base: SpaceRef, a: &AlgRef, budget: &Budget) -> Result<PresheafRef> {
    let a = a.clone();
    Presheaf::from_fn(
        format!("C^{}", a.name),
        base,
        budget,
        move |_| a.clone(),
        |_, _, s| s,
    )
}

/// Quotient presheaf from a family of filters indexed by the points:
/// `value(U) = A / (intersection of F_b over b in U)`, with the empty
/// intersection read as the improper filter, and quotient-to-quotient
/// restrictions.
pub fn filter_quotient_presheaf(
    a: &AlgRef,
    base: SpaceRef,
    family: &[FilterSubset],
    budget: &Budget,
    name: impl Into<String>,
) -> Result<PresheafRef> {
    if family.len() != base.n() {
        return Err(Error::Precondition(
            "one filter per base point is required".into(),
        ));
    }
    for f in family {
        if let Err(w) = f.check() {
            return Err(Error::Precondition(format!(
                "family member {} is not a filter: {w}",
                f.label()
            )));
        }
    }
    let filter_of = |o: &BitSet| -> BitSet {
        let mut m = BitSet::full(a.n());
        for b in o.iter() {
            m = m.intersection(&family[b].members);
        }
        m
    };
    let mut opens = base.opens(budget.opens)?;
    opens.sort_by(set_order);
    let mut values = Vec::new();
    let mut projections = Vec::new();
    for o in &opens {
        let f = FilterSubset::new(a.clone(), filter_of(o));
        let (q, proj) = quotient_by_filter(a, &f)?;
        values.push(q);
        projections.push(proj);
    }
    let mut restrictions = BTreeMap::new();
    for (v, ov) in opens.iter().enumerate() {
        for (u, ou) in opens.iter().enumerate() {
            if ou.is_subset(ov) {
                // a/F_V maps to a/F_U; pick any preimage under the projection.
                let table: Vec<usize> = (0..values[v].n())
                    .map(|cls| {
                        let rep = projections[v]
                            .map
                            .iter()
                            .position(|&c| c == cls)
                            .expect("projections are surjective");
                        projections[u].map[rep]
                    })
                    .collect();
                restrictions.insert((v, u), table);
            }
        }
    }
    Presheaf::new(name, base, opens, values, restrictions)
}

/// Fuzzy truth assignments over the Sierpinski space at chain resolution
/// `k`: pairs of chain values globally, single chain values on `{x}`, the
/// terminal algebra on the empty open; the nontrivial restriction drops the
/// second coordinate.
pub fn sierpinski_fuzzy_presheaf(k: usize, budget: &Budget) -> Result<PresheafRef> {
    if k < 1 {
        return Err(Error::Precondition("chain resolution must be at least 1".into()));
    }
    let base = Arc::new(FinTopSpace::sierpinski());
    let chain = algebra::lukasiewicz_chain(k);
    let (square, _, _) = product_algebra(&chain, &chain);
    let one = algebra::one_element("1");
    let kk = k + 1;
    Presheaf::from_fn(
        format!("sirp(L{k})"),
        base,
        budget,
        move |o| match o.len() {
            0 => one.clone(),
            1 => chain.clone(),
            _ => square.clone(),
        },
        move |ov, ou, s| match (ov.len(), ou.len()) {
            (_, 0) => 0,
            (2, 1) => s / kk, // first coordinate of the pair
            _ => s,
        },
    )
}

/// The deliberately broken variant: sections over `{x}` are still pairs but
/// the restriction forces the second coordinate to zero. Ships as an invalid
/// fixture; validation rejects it with an implication-preservation witness.
pub fn sierpinski_modified_presheaf(k: usize, budget: &Budget) -> Result<PresheafRef> {
    if k < 1 {
        return Err(Error::Precondition("chain resolution must be at least 1".into()));
    }
    let base = Arc::new(FinTopSpace::sierpinski());
    let chain = algebra::lukasiewicz_chain(k);
    let (square, _, _) = product_algebra(&chain, &chain);
    let one = algebra::one_element("1");
    let kk = k + 1;
    Presheaf::from_fn(
        format!("sirp-mod(L{k})"),
        base,
        budget,
        move |o| match o.len() {
            0 => one.clone(),
            _ => square.clone(),
        },
        move |ov, ou, s| match (ov.len(), ou.len()) {
            (_, 0) => 0,
            (2, 1) => (s / kk) * kk, // (alpha, beta) goes to (alpha, 0)
            _ => s,
        },
    )
}
