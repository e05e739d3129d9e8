//! Built-in fixtures: the three reference algebras, Łukasiewicz chains,
//! small spaces, and the preset presheaves, all constructed and validated on
//! demand.

use crate::algebra::{
    lukasiewicz_chain, validate_residuated_lattice, AlgRef, FilterSubset, RLMorphism, RawAlgebra,
};
use crate::presheaf::{self, PresheafRef};
use crate::report::{Budget, Error, Result};
use crate::spectra::{classify_filters, enumerate_filters, spectrum_topology, SpectrumKind};
use crate::topology::FinTopSpace;
use std::sync::Arc;

fn rows(labels: &[&str], data: &[&[&str]]) -> Vec<Vec<String>> {
    assert_eq!(labels.len(), data.len());
    data.iter()
        .map(|row| row.iter().map(|s| s.to_string()).collect())
        .collect()
}

/// Four-element algebra on the diamond 0 < a,b < 1 with idempotent product.
pub fn a4_raw() -> RawAlgebra {
    let e = ["0", "a", "b", "1"];
    RawAlgebra {
        name: "A4".into(),
        elems: e.iter().map(|s| s.to_string()).collect(),
        order: vec![
            ("0".into(), "a".into()),
            ("0".into(), "b".into()),
            ("a".into(), "1".into()),
            ("b".into(), "1".into()),
        ],
        prod: rows(
            &e,
            &[
                &["0", "0", "0", "0"],
                &["0", "a", "0", "a"],
                &["0", "0", "b", "b"],
                &["0", "a", "b", "1"],
            ],
        ),
        imp: None,
        bot: "0".into(),
        top: "1".into(),
    }
}

/// Six-element algebra: chain 0 < a < b < d < 1 with a side element 0 < c < d.
pub fn a6_raw() -> RawAlgebra {
    let e = ["0", "a", "b", "c", "d", "1"];
    RawAlgebra {
        name: "A6".into(),
        elems: e.iter().map(|s| s.to_string()).collect(),
        order: vec![
            ("0".into(), "a".into()),
            ("a".into(), "b".into()),
            ("0".into(), "c".into()),
            ("c".into(), "d".into()),
            ("b".into(), "d".into()),
            ("d".into(), "1".into()),
        ],
        prod: rows(
            &e,
            &[
                &["0", "0", "0", "0", "0", "0"],
                &["0", "a", "a", "0", "a", "a"],
                &["0", "a", "a", "0", "a", "b"],
                &["0", "0", "0", "c", "c", "c"],
                &["0", "a", "a", "c", "d", "d"],
                &["0", "a", "b", "c", "d", "1"],
            ],
        ),
        imp: None,
        bot: "0".into(),
        top: "1".into(),
    }
}

/// Eight-element algebra on the cube-like order with atoms a, b. The row of
/// `a` uses the unique residuable reading (`a*a = a`, `a*b = 0`); the other
/// transposition fails integrality and the reference filter table.
pub fn a8_raw() -> RawAlgebra {
    let e = ["0", "a", "b", "c", "d", "e", "f", "1"];
    RawAlgebra {
        name: "A8".into(),
        elems: e.iter().map(|s| s.to_string()).collect(),
        order: vec![
            ("0".into(), "a".into()),
            ("0".into(), "b".into()),
            ("a".into(), "c".into()),
            ("a".into(), "d".into()),
            ("b".into(), "d".into()),
            ("c".into(), "e".into()),
            ("d".into(), "e".into()),
            ("d".into(), "f".into()),
            ("e".into(), "1".into()),
            ("f".into(), "1".into()),
        ],
        prod: rows(
            &e,
            &[
                &["0", "0", "0", "0", "0", "0", "0", "0"],
                &["0", "a", "0", "a", "a", "a", "a", "a"],
                &["0", "0", "0", "0", "0", "0", "b", "b"],
                &["0", "a", "0", "c", "a", "c", "a", "c"],
                &["0", "a", "0", "a", "a", "a", "d", "d"],
                &["0", "a", "0", "c", "a", "c", "d", "e"],
                &["0", "a", "b", "a", "d", "d", "f", "f"],
                &["0", "a", "b", "c", "d", "e", "f", "1"],
            ],
        ),
        imp: None,
        bot: "0".into(),
        top: "1".into(),
    }
}

fn build(raw: RawAlgebra) -> AlgRef {
    let v = validate_residuated_lattice(&raw).expect("fixture tables are well-formed");
    v.algebra
        .unwrap_or_else(|| panic!("fixture failed validation: {}", v.report))
}

pub fn a4() -> AlgRef {
    build(a4_raw())
}

pub fn a6() -> AlgRef {
    build(a6_raw())
}

pub fn a8() -> AlgRef {
    build(a8_raw())
}

/// The reference morphism A6 -> A4 (0, a, b, c, d, 1 to 0, a, a, b, 1, 1).
pub fn mora6a4() -> RLMorphism {
    let src = a6();
    let dst = a4();
    let img = |l: &str| dst.index_of(l).unwrap();
    let map = vec![img("0"), img("a"), img("a"), img("b"), img("1"), img("1")];
    RLMorphism::new(src, dst, map).unwrap()
}

pub fn sierpinski() -> Arc<FinTopSpace> {
    Arc::new(FinTopSpace::sierpinski())
}

pub fn discrete2() -> Arc<FinTopSpace> {
    Arc::new(FinTopSpace::discrete(vec!["p".into(), "q".into()]))
}

/// Quotient presheaf over the hull-kernel spectrum of A4, with each carrier
/// point contributing itself as the filter.
pub fn prsresexa4(budget: &Budget) -> Result<PresheafRef> {
    let a = a4();
    let fl = enumerate_filters(&a, budget)?;
    let c = classify_filters(&fl);
    let sp = spectrum_topology(&fl, &c, &c.prime, SpectrumKind::Hull, false)?;
    let family: Vec<FilterSubset> = sp.carrier.iter().map(|&i| fl.filters[i].clone()).collect();
    presheaf::filter_quotient_presheaf(&a, sp.topology.clone(), &family, budget, "prsresexa4")
}

/// Quotient presheaf over the dual spectrum of the maximal filters of A6.
pub fn prsresexa6(budget: &Budget) -> Result<PresheafRef> {
    let a = a6();
    let fl = enumerate_filters(&a, budget)?;
    let c = classify_filters(&fl);
    let sp = spectrum_topology(&fl, &c, &c.maximal, SpectrumKind::Dual, false)?;
    let family: Vec<FilterSubset> = sp.carrier.iter().map(|&i| fl.filters[i].clone()).collect();
    presheaf::filter_quotient_presheaf(&a, sp.topology.clone(), &family, budget, "prsresexa6")
}

/// Quotient presheaf over the dual spectrum of A8 (the five-open family on
/// all three prime filters; see the erratum notes on the reference minimal
/// spectrum).
pub fn prsresexa8(budget: &Budget) -> Result<PresheafRef> {
    let a = a8();
    let fl = enumerate_filters(&a, budget)?;
    let c = classify_filters(&fl);
    let sp = spectrum_topology(&fl, &c, &c.prime, SpectrumKind::Dual, false)?;
    let family: Vec<FilterSubset> = sp.carrier.iter().map(|&i| fl.filters[i].clone()).collect();
    presheaf::filter_quotient_presheaf(&a, sp.topology.clone(), &family, budget, "prsresexa8")
}

/// Every named algebra fixture.
pub fn algebra_fixture(name: &str) -> Option<AlgRef> {
    match name {
        "a4" => Some(a4()),
        "a6" => Some(a6()),
        "a8" => Some(a8()),
        "two" => Some(lukasiewicz_chain(1)),
        _ => {
            let inner = name
                .strip_prefix("lukasiewicz(")
                .and_then(|r| r.strip_suffix(')'))?;
            let k: usize = inner.parse().ok()?;
            if k >= 1 {
                Some(lukasiewicz_chain(k))
            } else {
                None
            }
        }
    }
}

/// Every named presheaf fixture, including parameterized ones like
/// `sierpinski_fuzzy(10)`, `constant(a4,discrete2)`, or
/// `skyscraper(sierpinski,y,a4)`.
pub fn presheaf_fixture(expr: &str, budget: &Budget) -> Result<PresheafRef> {
    let expr = expr.trim();
    let (head, args) = match expr.find('(') {
        Some(i) if expr.ends_with(')') => {
            let inner = &expr[i + 1..expr.len() - 1];
            (
                &expr[..i],
                inner
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect::<Vec<_>>(),
            )
        }
        _ => (expr, Vec::new()),
    };
    let space_by_name = |n: &str| -> Result<Arc<FinTopSpace>> {
        match n {
            "sierpinski" => Ok(sierpinski()),
            "discrete2" => Ok(discrete2()),
            "point" => Ok(Arc::new(FinTopSpace::one_point("*"))),
            _ => Err(Error::Format(format!("unknown space fixture '{n}'"))),
        }
    };
    let alg_by_name = |n: &str| -> Result<AlgRef> {
        algebra_fixture(n).ok_or_else(|| Error::Format(format!("unknown algebra fixture '{n}'")))
    };
    let arg_k = |args: &[String]| -> Result<usize> {
        args.first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("expected a chain resolution argument".into()))
    };
    match head {
        "sierpinski_fuzzy" => presheaf::sierpinski_fuzzy_presheaf(arg_k(&args)?, budget),
        "sierpinski_modified" => presheaf::sierpinski_modified_presheaf(arg_k(&args)?, budget),
        "prsresexa4" => prsresexa4(budget),
        "prsresexa6" => prsresexa6(budget),
        "prsresexa8" => prsresexa8(budget),
        "one_point" => {
            let a = alg_by_name(args.first().map(String::as_str).unwrap_or("a4"))?;
            presheaf::one_point_presheaf(&a, budget)
        }
        "constant" => {
            let a = alg_by_name(args.first().map(String::as_str).unwrap_or("a4"))?;
            let sp = space_by_name(args.get(1).map(String::as_str).unwrap_or("discrete2"))?;
            presheaf::constant_presheaf(sp, &a, budget)
        }
        "skyscraper" => {
            let sp = space_by_name(args.first().map(String::as_str).unwrap_or("sierpinski"))?;
            let pt = args.get(1).map(String::as_str).unwrap_or("y");
            let b = sp
                .point_index(pt)
                .ok_or_else(|| Error::Format(format!("unknown point '{pt}'")))?;
            let a = alg_by_name(args.get(2).map(String::as_str).unwrap_or("a4"))?;
            presheaf::skyscraper_presheaf(sp, b, &a, budget)
        }
        _ => Err(Error::Format(format!("unknown presheaf fixture '{expr}'"))),
    }
}

/// The registry of built-in presheaf fixtures used by the pipeline suites.
/// The modified Sierpinski presheaf is deliberately excluded: it fails
/// validation by design.
pub fn builtin_presheaf_fixtures(k: usize, budget: &Budget) -> Result<Vec<(String, PresheafRef)>> {
    Ok(vec![
        (
            "one_point(a4)".into(),
            presheaf::one_point_presheaf(&a4(), budget)?,
        ),
        (
            "skyscraper(sierpinski,y,a4)".into(),
            presheaf::skyscraper_presheaf(sierpinski(), 1, &a4(), budget)?,
        ),
        (
            "constant(a4,discrete2)".into(),
            presheaf::constant_presheaf(discrete2(), &a4(), budget)?,
        ),
        ("prsresexa4".into(), prsresexa4(budget)?),
        ("prsresexa6".into(), prsresexa6(budget)?),
        ("prsresexa8".into(), prsresexa8(budget)?),
        (
            format!("sierpinski_fuzzy({k})"),
            presheaf::sierpinski_fuzzy_presheaf(k, budget)?,
        ),
    ])
}
