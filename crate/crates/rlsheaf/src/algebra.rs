//! Finite residuated lattices: representation, axiom validation, residuum
//! derivation, morphisms, filter-congruence quotients, and products.
//!
//! A value of [`FinResLat`] is immutable after construction and safe to share
//! (`AlgRef = Arc<FinResLat>`). Element labels are I/O only; all semantics go
//! through indices `0..n`.

use crate::bitset::BitSet;
use crate::report::{Error, Result, ValidationReport};
use std::fmt;
use std::sync::Arc;

pub type AlgRef = Arc<FinResLat>;

/// A finite residuated lattice given by element list, order, and full
/// operation tables (row-major `n*n` index matrices).
#[derive(Clone)]
pub struct FinResLat {
    pub name: String,
    pub elems: Vec<String>,
    leq: Vec<bool>,
    join: Vec<usize>,
    meet: Vec<usize>,
    prod: Vec<usize>,
    imp: Vec<usize>,
    pub bot: usize,
    pub top: usize,
}

impl fmt::Debug for FinResLat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinResLat({}, n={})", self.name, self.n())
    }
}

impl FinResLat {
    pub fn n(&self) -> usize {
        self.elems.len()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n() + y]
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.n() + y]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.n() + y]
    }

    pub fn prod(&self, x: usize, y: usize) -> usize {
        self.prod[x * self.n() + y]
    }

    pub fn imp(&self, x: usize, y: usize) -> usize {
        self.imp[x * self.n() + y]
    }

    pub fn neg(&self, x: usize) -> usize {
        self.imp(x, self.bot)
    }

    pub fn apply(&self, op: Op, x: usize, y: usize) -> usize {
        match op {
            Op::Join => self.join(x, y),
            Op::Meet => self.meet(x, y),
            Op::Prod => self.prod(x, y),
            Op::Imp => self.imp(x, y),
        }
    }

    pub fn label(&self, x: usize) -> &str {
        &self.elems[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elems.iter().position(|e| e == label)
    }

    /// Join of a set of elements; `None` for the empty set.
    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> Option<usize> {
        xs.into_iter().reduce(|a, b| self.join(a, b))
    }

    /// Elements below `x`, as a bitset.
    pub fn down_set(&self, x: usize) -> BitSet {
        BitSet::from_indices(self.n(), &(0..self.n()).filter(|&y| self.leq(y, x)).collect::<Vec<_>>())
    }

    pub fn up_set(&self, x: usize) -> BitSet {
        BitSet::from_indices(self.n(), &(0..self.n()).filter(|&y| self.leq(x, y)).collect::<Vec<_>>())
    }

    /// Assembles a value from complete tables without checking; callers
    /// revalidate when validity is not a theorem of the construction.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        name: String,
        elems: Vec<String>,
        leq: Vec<bool>,
        join: Vec<usize>,
        meet: Vec<usize>,
        prod: Vec<usize>,
        imp: Vec<usize>,
        bot: usize,
        top: usize,
    ) -> FinResLat {
        FinResLat {
            name,
            elems,
            leq,
            join,
            meet,
            prod,
            imp,
            bot,
            top,
        }
    }

    /// Cover pairs (x, y) with x < y and nothing strictly between.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut covers = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq(x, y) {
                    let between = (0..n)
                        .any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y));
                    if !between {
                        covers.push((x, y));
                    }
                }
            }
        }
        covers
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Op {
    Join,
    Meet,
    Prod,
    Imp,
}

pub const BINARY_OPS: [Op; 4] = [Op::Join, Op::Meet, Op::Prod, Op::Imp];

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Join => "v",
            Op::Meet => "^",
            Op::Prod => "*",
            Op::Imp => "->",
        }
    }
}

/// Raw input for [`validate_residuated_lattice`]: order as cover pairs or a
/// full relation, a product table, and optionally an implication table.
#[derive(Clone, Debug)]
pub struct RawAlgebra {
    pub name: String,
    pub elems: Vec<String>,
    pub order: Vec<(String, String)>,
    pub prod: Vec<Vec<String>>,
    pub imp: Option<Vec<Vec<String>>>,
    pub bot: String,
    pub top: String,
}

/// Bounded-lattice layer extracted from an order relation. Join and meet are
/// derived as least upper / greatest lower bounds.
pub struct BoundedLattice {
    pub n: usize,
    pub leq: Vec<bool>,
    pub join: Vec<usize>,
    pub meet: Vec<usize>,
    pub bot: usize,
    pub top: usize,
}

impl BoundedLattice {
    pub fn leq_at(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n + y]
    }
}

fn transitive_reflexive_closure(n: usize, pairs: &[(usize, usize)]) -> Vec<bool> {
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    for &(a, b) in pairs {
        leq[a * n + b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i * n + k] {
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
    }
    leq
}

/// Builds the bounded-lattice layer from order pairs (Hasse covers or a full
/// relation; the closure is computed either way). Violations are reported on
/// `rep`; returns `None` if the order fails to be a bounded lattice.
pub fn lattice_from_order(
    n: usize,
    pairs: &[(usize, usize)],
    bot: usize,
    top: usize,
    rep: &mut ValidationReport,
    labels: &[String],
) -> Option<BoundedLattice> {
    let leq = transitive_reflexive_closure(n, pairs);
    for x in 0..n {
        for y in 0..n {
            if x != y && leq[x * n + y] && leq[y * n + x] {
                rep.fail(
                    "order antisymmetry",
                    format!("{} <= {} and {} <= {}", labels[x], labels[y], labels[y], labels[x]),
                );
                return None;
            }
        }
    }
    rep.pass("order is a partial order");

    let mut bounds_ok = true;
    for x in 0..n {
        if !leq[bot * n + x] {
            rep.fail("bottom is least", format!("bottom !<= {}", labels[x]));
            bounds_ok = false;
        }
        if !leq[x * n + top] {
            rep.fail("top is greatest", format!("{} !<= top", labels[x]));
            bounds_ok = false;
        }
    }
    if bounds_ok {
        rep.pass("bounds 0 <= x <= 1");
    }

    let mut join = vec![0; n * n];
    let mut meet = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            let uppers: Vec<usize> = (0..n)
                .filter(|&z| leq[x * n + z] && leq[y * n + z])
                .collect();
            let lub = uppers
                .iter()
                .copied()
                .find(|&u| uppers.iter().all(|&v| leq[u * n + v]));
            let lowers: Vec<usize> = (0..n)
                .filter(|&z| leq[z * n + x] && leq[z * n + y])
                .collect();
            let glb = lowers
                .iter()
                .copied()
                .find(|&l| lowers.iter().all(|&v| leq[v * n + l]));
            match (lub, glb) {
                (Some(u), Some(l)) => {
                    join[x * n + y] = u;
                    meet[x * n + y] = l;
                }
                _ => {
                    rep.fail(
                        "lattice completeness",
                        format!(
                            "pair ({}, {}) lacks a {}",
                            labels[x],
                            labels[y],
                            if lub.is_none() { "least upper bound" } else { "greatest lower bound" }
                        ),
                    );
                    return None;
                }
            }
        }
    }
    rep.pass("joins and meets exist");
    if !bounds_ok {
        return None;
    }
    Some(BoundedLattice { n, leq, join, meet, bot, top })
}

/// Least-upper-bound implication derived from the product:
/// `imp(x,y)` is the join of `{ z | x*z <= y }`, which must itself satisfy
/// `x * imp(x,y) <= y` for the structure to be residuated.
pub fn residuum_from_product(
    lat: &BoundedLattice,
    prod: &[usize],
    labels: &[String],
) -> Result<Vec<usize>> {
    let n = lat.n;
    let mut imp = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            let sat: Vec<usize> = (0..n)
                .filter(|&z| lat.leq_at(prod[x * n + z], y))
                .collect();
            let Some(j) = sat.iter().copied().reduce(|a, b| lat.join[a * n + b]) else {
                return Err(Error::Precondition(format!(
                    "product is not residuable at ({}, {}): no z with {}*z <= {}",
                    labels[x], labels[y], labels[x], labels[y]
                )));
            };
            if !lat.leq_at(prod[x * n + j], y) {
                return Err(Error::Precondition(format!(
                    "product is not residuable at ({}, {}): the join {} of the candidate set escapes it",
                    labels[x], labels[y], labels[j]
                )));
            }
            imp[x * n + y] = j;
        }
    }
    Ok(imp)
}

pub struct AlgebraValidation {
    pub report: ValidationReport,
    pub algebra: Option<AlgRef>,
}

fn resolve(labels: &[String], l: &str) -> Result<usize> {
    labels
        .iter()
        .position(|e| e == l)
        .ok_or_else(|| Error::Format(format!("unknown element label '{l}'")))
}

fn resolve_table(labels: &[String], table: &[Vec<String>], what: &str) -> Result<Vec<usize>> {
    let n = labels.len();
    if table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(Error::Format(format!(
            "{what} table must be {n}x{n} (got {} rows)",
            table.len()
        )));
    }
    let mut out = Vec::with_capacity(n * n);
    for row in table {
        for cell in row {
            out.push(resolve(labels, cell)?);
        }
    }
    Ok(out)
}

/// Validates a candidate structure against every residuated-lattice axiom.
/// Malformed input (labels, arity) is a format error; every axiom violation
/// is reported with a concrete witness. On success the canonicalized algebra
/// is returned.
pub fn validate_residuated_lattice(raw: &RawAlgebra) -> Result<AlgebraValidation> {
    let labels = &raw.elems;
    let n = labels.len();
    if n == 0 {
        return Err(Error::Format("empty element list".into()));
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for l in labels {
            if !seen.insert(l) {
                return Err(Error::Format(format!("duplicate element label '{l}'")));
            }
        }
    }
    let bot = resolve(labels, &raw.bot)?;
    let top = resolve(labels, &raw.top)?;
    let mut pairs = Vec::new();
    for (a, b) in &raw.order {
        pairs.push((resolve(labels, a)?, resolve(labels, b)?));
    }
    let prod = resolve_table(labels, &raw.prod, "prod")?;
    let imp_given = match &raw.imp {
        Some(t) => Some(resolve_table(labels, t, "imp")?),
        None => None,
    };

    let mut rep = ValidationReport::new(format!("residuated lattice '{}'", raw.name));
    let Some(lat) = lattice_from_order(n, &pairs, bot, top, &mut rep, labels) else {
        return Ok(AlgebraValidation { report: rep, algebra: None });
    };

    let mut monoid_ok = true;
    'comm: for x in 0..n {
        for y in 0..x {
            if prod[x * n + y] != prod[y * n + x] {
                rep.fail(
                    "product commutativity",
                    format!("{}*{} != {}*{}", labels[x], labels[y], labels[y], labels[x]),
                );
                monoid_ok = false;
                break 'comm;
            }
        }
    }
    if monoid_ok {
        rep.pass("product commutativity");
    }
    let mut assoc_ok = true;
    'assoc: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if prod[prod[x * n + y] * n + z] != prod[x * n + prod[y * n + z]] {
                    rep.fail(
                        "product associativity",
                        format!(
                            "({}*{})*{} != {}*({}*{})",
                            labels[x], labels[y], labels[z], labels[x], labels[y], labels[z]
                        ),
                    );
                    assoc_ok = false;
                    break 'assoc;
                }
            }
        }
    }
    if assoc_ok {
        rep.pass("product associativity");
    }
    let mut unit_ok = true;
    for x in 0..n {
        if prod[x * n + top] != x {
            rep.fail("product unit", format!("{}*1 != {}", labels[x], labels[x]));
            unit_ok = false;
            break;
        }
    }
    if unit_ok {
        rep.pass("product unit is top");
    }

    let imp = match imp_given {
        Some(t) => t,
        None => match residuum_from_product(&lat, &prod, labels) {
            Ok(t) => t,
            Err(e) => {
                rep.fail("residuation", e.to_string());
                return Ok(AlgebraValidation { report: rep, algebra: None });
            }
        },
    };

    // The adjunction scan over all triples is the authority: it subsumes
    // monotonicity and pins the implication table uniquely.
    let mut adj_ok = true;
    'adj: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = lat.leq_at(prod[x * n + z], y);
                let rhs = lat.leq_at(z, imp[x * n + y]);
                if lhs != rhs {
                    rep.fail(
                        "adjunction x*z <= y  iff  z <= x->y",
                        format!(
                            "witness (x={}, y={}, z={}): x*z={} {} y but z {} x->y={}",
                            labels[x],
                            labels[y],
                            labels[z],
                            labels[prod[x * n + z]],
                            if lhs { "<=" } else { "!<=" },
                            if rhs { "<=" } else { "!<=" },
                            labels[imp[x * n + y]]
                        ),
                    );
                    adj_ok = false;
                    break 'adj;
                }
            }
        }
    }
    if adj_ok {
        rep.pass("adjunction over all triples");
    }

    if !rep.is_valid() {
        return Ok(AlgebraValidation { report: rep, algebra: None });
    }
    let alg = FinResLat {
        name: raw.name.clone(),
        elems: raw.elems.clone(),
        leq: lat.leq,
        join: lat.join,
        meet: lat.meet,
        prod,
        imp,
        bot,
        top,
    };
    Ok(AlgebraValidation {
        report: rep,
        algebra: Some(Arc::new(alg)),
    })
}

/// Re-runs the axiom suite on an already-built algebra (used by constructions
/// that are supposed to output valid algebras). The stored join and meet
/// tables are also compared against the bounds derived from the order.
pub fn revalidate(a: &FinResLat) -> ValidationReport {
    let raw = RawAlgebra {
        name: a.name.clone(),
        elems: a.elems.clone(),
        order: a
            .cover_pairs()
            .into_iter()
            .map(|(x, y)| (a.elems[x].clone(), a.elems[y].clone()))
            .collect(),
        prod: (0..a.n())
            .map(|x| (0..a.n()).map(|y| a.elems[a.prod(x, y)].clone()).collect())
            .collect(),
        imp: Some(
            (0..a.n())
                .map(|x| (0..a.n()).map(|y| a.elems[a.imp(x, y)].clone()).collect())
                .collect(),
        ),
        bot: a.elems[a.bot].clone(),
        top: a.elems[a.top].clone(),
    };
    match validate_residuated_lattice(&raw) {
        Ok(v) => {
            let mut report = v.report;
            if let Some(canon) = v.algebra {
                let mut tables_ok = true;
                'scan: for x in 0..a.n() {
                    for y in 0..a.n() {
                        if a.join(x, y) != canon.join(x, y) || a.meet(x, y) != canon.meet(x, y) {
                            report.fail(
                                "stored join/meet tables match the order",
                                format!(
                                    "at ({}, {}): stored {}/{}, derived {}/{}",
                                    a.label(x),
                                    a.label(y),
                                    a.label(a.join(x, y)),
                                    a.label(a.meet(x, y)),
                                    canon.label(canon.join(x, y)),
                                    canon.label(canon.meet(x, y))
                                ),
                            );
                            tables_ok = false;
                            break 'scan;
                        }
                    }
                }
                if tables_ok {
                    report.pass("stored join/meet tables match the order");
                }
            }
            report
        }
        Err(e) => {
            let mut r = ValidationReport::new(format!("residuated lattice '{}'", a.name));
            r.fail("structure", e.to_string());
            r
        }
    }
}

/// Constructs a validated algebra directly from index tables. Panics if the
/// data fails validation; intended for internal constructions whose validity
/// is a theorem, with the panic as the guard.
pub(crate) fn from_tables_checked(
    name: String,
    elems: Vec<String>,
    leq: Vec<bool>,
    prod: Vec<usize>,
    bot: usize,
    top: usize,
) -> AlgRef {
    let n = elems.len();
    let mut rep = ValidationReport::new(name.clone());
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if leq[x * n + y] {
                pairs.push((x, y));
            }
        }
    }
    let lat = lattice_from_order(n, &pairs, bot, top, &mut rep, &elems)
        .unwrap_or_else(|| panic!("construction produced a non-lattice: {rep}"));
    let imp = residuum_from_product(&lat, &prod, &elems)
        .unwrap_or_else(|e| panic!("construction produced a non-residuable product: {e}"));
    let alg = FinResLat {
        name,
        elems,
        leq: lat.leq,
        join: lat.join,
        meet: lat.meet,
        prod,
        imp,
        bot,
        top,
    };
    let check = revalidate(&alg);
    assert!(check.is_valid(), "construction failed validation: {check}");
    Arc::new(alg)
}

/// The one-element (terminal) algebra. Admitted everywhere; it is forced by
/// quotients along the improper filter and by values on the empty open.
pub fn one_element(name: &str) -> AlgRef {
    Arc::new(FinResLat {
        name: name.to_string(),
        elems: vec!["1".to_string()],
        leq: vec![true],
        join: vec![0],
        meet: vec![0],
        prod: vec![0],
        imp: vec![0],
        bot: 0,
        top: 0,
    })
}

/// Chain 0 < 1/k < ... < 1 with `x*y = max(0, x+y-1)` and
/// `x->y = min(1, 1-x+y)`, in exact arithmetic over the common denominator.
pub fn lukasiewicz_chain(k: usize) -> AlgRef {
    assert!(k >= 1, "chain resolution must be at least 1");
    let n = k + 1;
    let elems: Vec<String> = (0..=k)
        .map(|i| {
            if i == 0 {
                "0".to_string()
            } else if i == k {
                "1".to_string()
            } else {
                format!("{i}/{k}")
            }
        })
        .collect();
    let mut leq = vec![false; n * n];
    let mut prod = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            leq[i * n + j] = i <= j;
            prod[i * n + j] = (i + j).saturating_sub(k);
        }
    }
    from_tables_checked(format!("L{k}"), elems, leq, prod, 0, k)
}

// ---------------------------------------------------------------------------
// Morphisms

/// A map between residuated lattices, given on element indices.
#[derive(Clone)]
pub struct RLMorphism {
    pub src: AlgRef,
    pub dst: AlgRef,
    pub map: Vec<usize>,
}

impl fmt::Debug for RLMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RLMorphism({} -> {}, {:?})", self.src.name, self.dst.name, self.map)
    }
}

impl RLMorphism {
    pub fn new(src: AlgRef, dst: AlgRef, map: Vec<usize>) -> Result<Self> {
        if map.len() != src.n() {
            return Err(Error::Format(format!(
                "morphism map has length {} but the source has {} elements",
                map.len(),
                src.n()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= dst.n()) {
            return Err(Error::Format(format!(
                "morphism image index {bad} out of range for target of size {}",
                dst.n()
            )));
        }
        Ok(RLMorphism { src, dst, map })
    }

    pub fn identity(a: &AlgRef) -> Self {
        RLMorphism {
            src: a.clone(),
            dst: a.clone(),
            map: (0..a.n()).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `other` after `self` (so `self: A -> B`, `other: B -> C`).
    pub fn then(&self, other: &RLMorphism) -> Result<RLMorphism> {
        if other.src.n() != self.dst.n() {
            return Err(Error::Format(
                "composition mismatch: codomain and domain sizes differ".into(),
            ));
        }
        RLMorphism::new(
            self.src.clone(),
            other.dst.clone(),
            self.map.iter().map(|&x| other.map[x]).collect(),
        )
    }

    /// Preimage of the target's top element.
    pub fn coker(&self) -> BitSet {
        BitSet::from_indices(
            self.src.n(),
            &(0..self.src.n())
                .filter(|&x| self.map[x] == self.dst.top)
                .collect::<Vec<_>>(),
        )
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.n()];
        self.map.iter().all(|&v| {
            let fresh = !seen[v];
            seen[v] = true;
            fresh
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.dst.n()];
        for &v in &self.map {
            seen[v] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.src.n() == self.dst.n() && self.is_injective()
    }

    /// Inverse of a bijective morphism.
    pub fn inverse(&self) -> Result<RLMorphism> {
        if !self.is_bijective() {
            return Err(Error::Precondition("morphism is not bijective".into()));
        }
        let mut inv = vec![0; self.dst.n()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        RLMorphism::new(self.dst.clone(), self.src.clone(), inv)
    }
}

pub struct MorphismCheck {
    pub report: ValidationReport,
    pub coker: BitSet,
    pub injective: bool,
}

/// Checks preservation of all six operations pointwise. Reports the first
/// violated operation with a witness pair, plus the cokernel and an
/// injectivity verdict.
pub fn check_morphism(f: &RLMorphism) -> MorphismCheck {
    let a = &f.src;
    let b = &f.dst;
    let mut rep = ValidationReport::new(format!(
        "morphism {} -> {}",
        a.name, b.name
    ));
    let mut broken = false;
    'outer: for op in BINARY_OPS {
        for x in 0..a.n() {
            for y in 0..a.n() {
                let lhs = f.map[a.apply(op, x, y)];
                let rhs = b.apply(op, f.map[x], f.map[y]);
                if lhs != rhs {
                    rep.fail(
                        format!("preserves {}", op.symbol()),
                        format!(
                            "witness pair ({}, {}): f({} {} {}) = {} but f({}) {} f({}) = {}",
                            a.label(x),
                            a.label(y),
                            a.label(x),
                            op.symbol(),
                            a.label(y),
                            b.label(lhs),
                            a.label(x),
                            op.symbol(),
                            a.label(y),
                            b.label(rhs)
                        ),
                    );
                    broken = true;
                    break 'outer;
                }
            }
        }
        rep.pass(format!("preserves {}", op.symbol()));
    }
    if !broken {
        rep.check(
            "preserves 0",
            f.map[a.bot] == b.bot,
            format!("f(0) = {}", b.label(f.map[a.bot])),
        );
        rep.check(
            "preserves 1",
            f.map[a.top] == b.top,
            format!("f(1) = {}", b.label(f.map[a.top])),
        );
    }
    MorphismCheck {
        coker: f.coker(),
        injective: f.is_injective(),
        report: rep,
    }
}

// ---------------------------------------------------------------------------
// Filters

/// Subset of an algebra claimed to be a filter: contains top, closed under
/// the product, and upward closed under joins with arbitrary elements.
#[derive(Clone)]
pub struct FilterSubset {
    pub parent: AlgRef,
    pub members: BitSet,
}

impl FilterSubset {
    pub fn new(parent: AlgRef, members: BitSet) -> Self {
        FilterSubset { parent, members }
    }

    /// `Err` carries a closure witness.
    pub fn check(&self) -> std::result::Result<(), String> {
        let a = &self.parent;
        if !self.members.contains(a.top) {
            return Err("top element is missing".to_string());
        }
        for x in self.members.iter() {
            for y in self.members.iter() {
                if !self.members.contains(a.prod(x, y)) {
                    return Err(format!(
                        "not closed under *: {} * {} = {} escapes",
                        a.label(x),
                        a.label(y),
                        a.label(a.prod(x, y))
                    ));
                }
            }
            for y in 0..a.n() {
                if !self.members.contains(a.join(x, y)) {
                    return Err(format!(
                        "not upward closed: {} v {} = {} escapes",
                        a.label(x),
                        a.label(y),
                        a.label(a.join(x, y))
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_filter(&self) -> bool {
        self.check().is_ok()
    }

    pub fn is_proper(&self) -> bool {
        self.members.len() < self.parent.n()
    }

    pub fn label(&self) -> String {
        let mut s = String::from("{");
        for (k, i) in self.members.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(self.parent.label(i));
        }
        s.push('}');
        s
    }
}

fn class_label(a: &FinResLat, class: &[usize]) -> String {
    if class.len() == 1 {
        a.label(class[0]).to_string()
    } else {
        let mut s = String::from("{");
        for (k, &i) in class.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(a.label(i));
        }
        s.push('}');
        s
    }
}

/// Quotient by the filter congruence `x ~ y  iff  x->y in F and y->x in F`,
/// together with the canonical projection. The improper filter is allowed and
/// collapses everything.
pub fn quotient_by_filter(a: &AlgRef, f: &FilterSubset) -> Result<(AlgRef, RLMorphism)> {
    if let Err(w) = f.check() {
        return Err(Error::Precondition(format!(
            "the given subset is not a filter: {w}"
        )));
    }
    let n = a.n();
    let in_f = |x: usize| f.members.contains(x);
    let related = |x: usize, y: usize| in_f(a.imp(x, y)) && in_f(a.imp(y, x));

    // Classes ordered by least member.
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let members: Vec<usize> = (x..n).filter(|&y| related(x, y)).collect();
        for &m in &members {
            class_of[m] = id;
        }
        classes.push(members);
    }
    let m = classes.len();
    let rep_of = |c: usize| classes[c][0];

    let elems: Vec<String> = classes.iter().map(|c| class_label(a, c)).collect();
    let mut leq = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            // [x] <= [y] in the quotient iff x->y lands in the filter.
            leq[i * m + j] = in_f(a.imp(rep_of(i), rep_of(j)));
        }
    }
    let mut prod = vec![0; m * m];
    for i in 0..m {
        for j in 0..m {
            prod[i * m + j] = class_of[a.prod(rep_of(i), rep_of(j))];
        }
    }
    let q = from_tables_checked(
        format!("{}/{}", a.name, f.label()),
        elems,
        leq,
        prod,
        class_of[a.bot],
        class_of[a.top],
    );
    let proj = RLMorphism::new(a.clone(), q.clone(), class_of)?;
    Ok((q, proj))
}

/// Componentwise product algebra with its two projections.
pub fn product_algebra(a: &AlgRef, b: &AlgRef) -> (AlgRef, RLMorphism, RLMorphism) {
    let (na, nb) = (a.n(), b.n());
    let n = na * nb;
    let idx = |x: usize, y: usize| x * nb + y;
    let mut elems = Vec::with_capacity(n);
    let mut p1 = Vec::with_capacity(n);
    let mut p2 = Vec::with_capacity(n);
    for x in 0..na {
        for y in 0..nb {
            elems.push(format!("({},{})", a.label(x), b.label(y)));
            p1.push(x);
            p2.push(y);
        }
    }
    let mut leq = vec![false; n * n];
    let mut prod = vec![0; n * n];
    for x1 in 0..na {
        for y1 in 0..nb {
            for x2 in 0..na {
                for y2 in 0..nb {
                    let i = idx(x1, y1);
                    let j = idx(x2, y2);
                    leq[i * n + j] = a.leq(x1, x2) && b.leq(y1, y2);
                    prod[i * n + j] = idx(a.prod(x1, x2), b.prod(y1, y2));
                }
            }
        }
    }
    let p = from_tables_checked(
        format!("{}x{}", a.name, b.name),
        elems,
        leq,
        prod,
        idx(a.bot, b.bot),
        idx(a.top, b.top),
    );
    let proj1 = RLMorphism::new(p.clone(), a.clone(), p1).expect("projection arity");
    let proj2 = RLMorphism::new(p.clone(), b.clone(), p2).expect("projection arity");
    (p, proj1, proj2)
}

// ---------------------------------------------------------------------------
// Isomorphism search

/// Stable coloring by iterated refinement over the operation tables, used to
/// cut the isomorphism search space.
fn wl_colors(a: &FinResLat) -> Vec<u64> {
    let n = a.n();
    let mut colors: Vec<u64> = (0..n)
        .map(|x| {
            let down = a.down_set(x).len() as u64;
            let up = a.up_set(x).len() as u64;
            (down << 32) | up
        })
        .collect();
    colors[a.bot] ^= 0x8000_0000_0000_0000;
    colors[a.top] ^= 0x4000_0000_0000_0000;
    for _ in 0..n {
        let mut sigs: Vec<(u64, Vec<u64>)> = Vec::with_capacity(n);
        for x in 0..n {
            let mut sig = Vec::with_capacity(4 * n * 2);
            for op in BINARY_OPS {
                let mut row: Vec<u64> = (0..n)
                    .map(|y| colors[y].wrapping_mul(31).wrapping_add(colors[a.apply(op, x, y)]))
                    .collect();
                row.sort_unstable();
                sig.extend(row);
            }
            sigs.push((colors[x], sig));
        }
        let mut sorted: Vec<&(u64, Vec<u64>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let new: Vec<u64> = sigs
            .iter()
            .map(|s| sorted.binary_search(&s).unwrap() as u64)
            .collect();
        if new == colors {
            break;
        }
        colors = new;
    }
    colors
}

fn iso_backtrack(
    a: &FinResLat,
    b: &FinResLat,
    ca: &[u64],
    cb: &[u64],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    pos: usize,
) -> bool {
    let n = a.n();
    if pos == n {
        return true;
    }
    'cand: for img in 0..n {
        if used[img] || ca[pos] != cb[img] {
            continue;
        }
        // Consistency with everything already assigned.
        for y in 0..pos {
            if a.leq(pos, y) != b.leq(img, map[y]) || a.leq(y, pos) != b.leq(map[y], img) {
                continue 'cand;
            }
            for op in BINARY_OPS {
                let r1 = a.apply(op, pos, y);
                if r1 < pos && map[r1] != b.apply(op, img, map[y]) {
                    continue 'cand;
                }
                if r1 == pos && img != b.apply(op, img, map[y]) {
                    continue 'cand;
                }
                let r2 = a.apply(op, y, pos);
                if r2 < pos && map[r2] != b.apply(op, map[y], img) {
                    continue 'cand;
                }
                if r2 == pos && img != b.apply(op, map[y], img) {
                    continue 'cand;
                }
            }
        }
        for op in BINARY_OPS {
            let r = a.apply(op, pos, pos);
            if r < pos && map[r] != b.apply(op, img, img) {
                continue 'cand;
            }
            if r == pos && img != b.apply(op, img, img) {
                continue 'cand;
            }
        }
        map.push(img);
        used[img] = true;
        if iso_backtrack(a, b, ca, cb, map, used, pos + 1) {
            return true;
        }
        map.pop();
        used[img] = false;
    }
    false
}

/// Explicit isomorphism search; label equality is never used.
pub fn find_isomorphism(a: &FinResLat, b: &FinResLat) -> Option<Vec<usize>> {
    if a.n() != b.n() {
        return None;
    }
    let ca = wl_colors(a);
    let cb = wl_colors(b);
    let mut sa = ca.clone();
    let mut sb = cb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let mut map = Vec::with_capacity(a.n());
    let mut used = vec![false; b.n()];
    if iso_backtrack(a, b, &ca, &cb, &mut map, &mut used, 0) {
        // Final full verification; the backtracker's pruning is partial.
        let f = RLMorphism::new(Arc::new(a.clone()), Arc::new(b.clone()), map.clone()).ok()?;
        if check_morphism(&f).report.is_valid() && f.is_bijective() {
            return Some(map);
        }
        None
    } else {
        None
    }
}

pub fn are_isomorphic(a: &FinResLat, b: &FinResLat) -> bool {
    find_isomorphism(a, b).is_some()
}

/// All morphisms `a -> b`, by backtracking with a node budget.
pub fn enumerate_rl_morphisms(a: &AlgRef, b: &AlgRef, budget: usize) -> Result<Vec<RLMorphism>> {
    let n = a.n();
    let mut out = Vec::new();
    let mut map: Vec<usize> = Vec::with_capacity(n);
    let mut nodes = 0usize;

    fn consistent(a: &FinResLat, b: &FinResLat, map: &[usize], pos: usize, img: usize) -> bool {
        if pos == a.bot && img != b.bot {
            return false;
        }
        if pos == a.top && img != b.top {
            return false;
        }
        for y in 0..pos {
            for op in BINARY_OPS {
                let r = a.apply(op, pos, y);
                if r < pos && map[r] != b.apply(op, img, map[y]) {
                    return false;
                }
                if r == pos && img != b.apply(op, img, map[y]) {
                    return false;
                }
                let r = a.apply(op, y, pos);
                if r < pos && map[r] != b.apply(op, map[y], img) {
                    return false;
                }
                if r == pos && img != b.apply(op, map[y], img) {
                    return false;
                }
            }
        }
        for op in BINARY_OPS {
            let r = a.apply(op, pos, pos);
            if r < pos && map[r] != b.apply(op, img, img) {
                return false;
            }
            if r == pos && img != b.apply(op, img, img) {
                return false;
            }
        }
        true
    }

    fn rec(
        a: &AlgRef,
        b: &AlgRef,
        map: &mut Vec<usize>,
        out: &mut Vec<RLMorphism>,
        nodes: &mut usize,
        budget: usize,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::Resource(format!(
                "morphism search exceeded {budget} nodes"
            )));
        }
        let pos = map.len();
        if pos == a.n() {
            let f = RLMorphism::new(a.clone(), b.clone(), map.clone())?;
            if check_morphism(&f).report.is_valid() {
                out.push(f);
            }
            return Ok(());
        }
        for img in 0..b.n() {
            if consistent(a, b, map, pos, img) {
                map.push(img);
                rec(a, b, map, out, nodes, budget)?;
                map.pop();
            }
        }
        Ok(())
    }

    rec(a, b, &mut map, &mut out, &mut nodes, budget)?;
    Ok(out)
}
