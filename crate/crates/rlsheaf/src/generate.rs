//! Seeded random instances for the property suites: small residuated
//! lattices (enumerated once per order shape, then sampled), random finite
//! topologies on up to three points, and random valid presheaves.
//!
//! Randomness is a SplitMix64 stream, so a seed pins the whole run.

use crate::algebra::{self, AlgRef, FilterSubset, RawAlgebra};
use crate::bitset::BitSet;
use crate::presheaf::{self, PresheafRef};
use crate::report::{Budget, Result};
use crate::spectra::enumerate_filters;
use crate::topology::FinTopSpace;
use std::sync::Arc;
use std::sync::OnceLock;

pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n.max(1) as u64) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// All residuated-lattice structures on a fixed bounded order, found by
/// exhaustive search over commutative unit-respecting product tables.
pub fn enumerate_rl_structures(
    name_prefix: &str,
    elems: &[&str],
    order: &[(&str, &str)],
    bot: &str,
    top: &str,
) -> Vec<AlgRef> {
    let n = elems.len();
    let raw_for = |prod: &Vec<Vec<usize>>| RawAlgebra {
        name: String::new(),
        elems: elems.iter().map(|s| s.to_string()).collect(),
        order: order
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        prod: prod
            .iter()
            .map(|row| row.iter().map(|&v| elems[v].to_string()).collect())
            .collect(),
        imp: None,
        bot: bot.to_string(),
        top: top.to_string(),
    };
    let top_i = elems.iter().position(|e| e == &top).unwrap();
    let bot_i = elems.iter().position(|e| e == &bot).unwrap();
    // Free unordered entries: pairs (i, j) with i <= j, both strictly between
    // the forced rows for bot and top.
    let mut free: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i != top_i && j != top_i && i != bot_i && j != bot_i {
                free.push((i, j));
            }
        }
    }
    let mut out = Vec::new();
    let mut assignment = vec![0usize; free.len()];
    loop {
        let mut prod = vec![vec![0usize; n]; n];
        for x in 0..n {
            prod[x][top_i] = x;
            prod[top_i][x] = x;
            prod[x][bot_i] = bot_i;
            prod[bot_i][x] = bot_i;
        }
        for (k, &(i, j)) in free.iter().enumerate() {
            prod[i][j] = assignment[k];
            prod[j][i] = assignment[k];
        }
        let raw = raw_for(&prod);
        if let Ok(v) = algebra::validate_residuated_lattice(&raw) {
            if let Some(a) = v.algebra {
                let mut named = (*a).clone();
                named.name = format!("{name_prefix}{}", out.len());
                out.push(Arc::new(named));
            }
        }
        // Mixed-radix increment over element indices.
        let mut k = 0;
        loop {
            if k == free.len() {
                return out;
            }
            assignment[k] += 1;
            if assignment[k] < n {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Pool of all residuated lattices with at most four elements (chains up to
/// length four plus the diamond), computed once.
pub fn small_algebra_pool() -> &'static Vec<AlgRef> {
    static POOL: OnceLock<Vec<AlgRef>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut pool = vec![algebra::one_element("T")];
        pool.extend(enumerate_rl_structures(
            "C2_",
            &["0", "1"],
            &[("0", "1")],
            "0",
            "1",
        ));
        pool.extend(enumerate_rl_structures(
            "C3_",
            &["0", "m", "1"],
            &[("0", "m"), ("m", "1")],
            "0",
            "1",
        ));
        pool.extend(enumerate_rl_structures(
            "C4_",
            &["0", "l", "m", "1"],
            &[("0", "l"), ("l", "m"), ("m", "1")],
            "0",
            "1",
        ));
        pool.extend(enumerate_rl_structures(
            "D4_",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
            "0",
            "1",
        ));
        pool
    })
}

/// Random topology on up to `max_points` points, generated from a random
/// subbasis.
pub fn random_topology(rng: &mut SplitMix64, max_points: usize) -> Arc<FinTopSpace> {
    let n = 1 + rng.below(max_points);
    let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let sets: Vec<BitSet> = (0..rng.below(4))
        .map(|_| {
            let mask = rng.below(1 << n);
            BitSet::from_indices(
                n,
                &(0..n).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>(),
            )
        })
        .collect();
    Arc::new(FinTopSpace::from_subbasis(points, &sets))
}

/// Random valid presheaf over a random small base. Mixes the constructor
/// families: constant, skyscraper, filter quotients, and binary products of
/// two quotient presheaves.
pub fn random_presheaf(rng: &mut SplitMix64, budget: &Budget) -> Result<PresheafRef> {
    let base = random_topology(rng, 3);
    let pool = small_algebra_pool();
    let a = rng.pick(pool).clone();
    match rng.below(4) {
        0 => presheaf::constant_presheaf(base, &a, budget),
        1 => {
            let b = rng.below(base.n());
            presheaf::skyscraper_presheaf(base, b, &a, budget)
        }
        2 => {
            let fl = enumerate_filters(&a, budget)?;
            let family: Vec<FilterSubset> = (0..base.n())
                .map(|_| rng.pick(&fl.filters).clone())
                .collect();
            presheaf::filter_quotient_presheaf(&a, base, &family, budget, "rand-quot")
        }
        _ => {
            // Componentwise product of two filter quotients of the same
            // algebra: values are products, restrictions are componentwise.
            let fl = enumerate_filters(&a, budget)?;
            let fam1: Vec<FilterSubset> = (0..base.n())
                .map(|_| rng.pick(&fl.filters).clone())
                .collect();
            let fam2: Vec<FilterSubset> = (0..base.n())
                .map(|_| rng.pick(&fl.filters).clone())
                .collect();
            let p1 = presheaf::filter_quotient_presheaf(&a, base.clone(), &fam1, budget, "q1")?;
            let p2 = presheaf::filter_quotient_presheaf(&a, base.clone(), &fam2, budget, "q2")?;
            product_presheaf(&p1, &p2, "rand-prod")
        }
    }
}

/// Componentwise product of two presheaves over the same base.
pub fn product_presheaf(
    p1: &PresheafRef,
    p2: &PresheafRef,
    name: &str,
) -> Result<PresheafRef> {
    let opens = p1.opens.clone();
    let mut values = Vec::with_capacity(opens.len());
    for u in 0..opens.len() {
        let (prod, _, _) = algebra::product_algebra(&p1.values[u], &p2.values[u]);
        values.push(prod);
    }
    let mut restrictions = std::collections::BTreeMap::new();
    for (v, u) in p1.inclusion_pairs() {
        let n2v = p2.values[v].n();
        let n2u = p2.values[u].n();
        let t1 = p1.restriction_table(v, u);
        let t2 = p2.restriction_table(v, u);
        let table: Vec<usize> = (0..p1.values[v].n() * n2v)
            .map(|s| {
                let (x, y) = (s / n2v, s % n2v);
                t1[x] * n2u + t2[y]
            })
            .collect();
        restrictions.insert((v, u), table);
    }
    presheaf::Presheaf::new(name, p1.base.clone(), opens, values, restrictions)
}
