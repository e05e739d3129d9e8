//! JSON file formats: algebras, topologies, and presheaves, plus the
//! versioned report payloads emitted by the command-line front end.
//!
//! Algebra file: `{ "name", "elements": [..], "order": [[a,b],..],
//! "prod": [[..],..], "imp": optional, "bottom", "top" }`. Order pairs may be
//! Hasse covers or a full relation; join/meet are derived from the order.
//!
//! Topology file: `{ "points": [..], "opens": [[..],..] }`.
//!
//! Presheaf file: `{ "name", "space": <topology>, "algebras": {name: <algebra>},
//! "values": {openKey: algebraName}, "restrictions": {"V->U": [labels]} }`
//! where openKey is the comma-joined sorted point labels ("" for the empty
//! open). Restrictions may be given on cover relations only; composites are
//! derived.

use crate::algebra::{validate_residuated_lattice, AlgRef, RawAlgebra};
use crate::bitset::{set_order, BitSet};
use crate::presheaf::{Presheaf, PresheafRef};
use crate::report::{Error, Result};
use crate::topology::{validate_topology, FinTopSpace, SpaceRef};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const REPORT_SCHEMA: &str = "rlsheaf-report/v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub elements: Vec<String>,
    pub order: Vec<(String, String)>,
    pub prod: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imp: Option<Vec<Vec<String>>>,
    pub bottom: String,
    pub top: String,
}

impl AlgebraJson {
    pub fn to_raw(&self) -> RawAlgebra {
        RawAlgebra {
            name: self.name.clone(),
            elems: self.elements.clone(),
            order: self.order.clone(),
            prod: self.prod.clone(),
            imp: self.imp.clone(),
            bot: self.bottom.clone(),
            top: self.top.clone(),
        }
    }

    pub fn from_algebra(a: &AlgRef) -> Self {
        AlgebraJson {
            name: a.name.clone(),
            elements: a.elems.clone(),
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
            bottom: a.elems[a.bot].clone(),
            top: a.elems[a.top].clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyJson {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresheafJson {
    #[serde(default)]
    pub name: String,
    pub space: TopologyJson,
    pub algebras: BTreeMap<String, AlgebraJson>,
    pub values: BTreeMap<String, String>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, Vec<String>>,
}

pub fn parse_algebra(text: &str) -> Result<RawAlgebra> {
    let j: AlgebraJson =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("algebra json: {e}")))?;
    Ok(j.to_raw())
}

fn point_set(space: &FinTopSpace, labels: &[String]) -> Result<BitSet> {
    let mut s = BitSet::new(space.n());
    for l in labels {
        let i = space
            .point_index(l)
            .ok_or_else(|| Error::Format(format!("unknown point label '{l}'")))?;
        s.insert(i);
    }
    Ok(s)
}

pub fn parse_topology(text: &str) -> Result<(ValidatedSpace, crate::ValidationReport)> {
    let j: TopologyJson =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("topology json: {e}")))?;
    build_topology(&j)
}

pub struct ValidatedSpace {
    pub space: Option<SpaceRef>,
    pub opens: Vec<BitSet>,
}

pub fn build_topology(j: &TopologyJson) -> Result<(ValidatedSpace, crate::ValidationReport)> {
    let n = j.points.len();
    let scratch = FinTopSpace::discrete(j.points.clone());
    let mut opens = Vec::new();
    for o in &j.opens {
        let mut s = BitSet::new(n);
        for l in o {
            let i = scratch
                .point_index(l)
                .ok_or_else(|| Error::Format(format!("unknown point label '{l}'")))?;
            s.insert(i);
        }
        opens.push(s);
    }
    let v = validate_topology(&j.points, &opens)?;
    Ok((
        ValidatedSpace {
            space: v.space,
            opens,
        },
        v.report,
    ))
}

/// Open key: comma-joined point labels in point order; empty string for the
/// empty open.
pub fn open_key(space: &FinTopSpace, o: &BitSet) -> String {
    o.iter()
        .map(|i| space.points[i].clone())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_open_key(space: &FinTopSpace, key: &str) -> Result<BitSet> {
    if key.is_empty() {
        return Ok(BitSet::new(space.n()));
    }
    let labels: Vec<String> = key.split(',').map(|s| s.trim().to_string()).collect();
    point_set(space, &labels)
}

/// Parses and assembles a presheaf file. The result still has to pass
/// `validate_presheaf`; this only resolves references and arities.
pub fn parse_presheaf(text: &str) -> Result<PresheafRef> {
    let j: PresheafJson =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("presheaf json: {e}")))?;
    build_presheaf(&j)
}

pub fn build_presheaf(j: &PresheafJson) -> Result<PresheafRef> {
    let (vs, rep) = build_topology(&j.space)?;
    let Some(space) = vs.space else {
        return Err(Error::Format(format!(
            "presheaf base is not a topology: {}",
            rep.first_failure()
                .and_then(|c| c.witness.clone())
                .unwrap_or_default()
        )));
    };
    let mut algebras: BTreeMap<String, AlgRef> = BTreeMap::new();
    for (name, aj) in &j.algebras {
        let v = validate_residuated_lattice(&aj.to_raw())?;
        let Some(a) = v.algebra else {
            return Err(Error::Format(format!(
                "algebra '{name}' fails validation: {}",
                v.report
                    .first_failure()
                    .map(|c| c.name.clone())
                    .unwrap_or_default()
            )));
        };
        algebras.insert(name.clone(), a);
    }
    let mut opens: Vec<BitSet> = space.opens(1 << 12)?;
    opens.sort_by(set_order);
    let mut values = Vec::with_capacity(opens.len());
    for o in &opens {
        let key = open_key(&space, o);
        let name = j.values.get(&key).ok_or_else(|| {
            Error::Format(format!("no value assigned to open '{{{key}}}'"))
        })?;
        let a = algebras
            .get(name)
            .ok_or_else(|| Error::Format(format!("unknown algebra reference '{name}'")))?;
        values.push(a.clone());
    }
    let mut restrictions = BTreeMap::new();
    for (key, table) in &j.restrictions {
        let (vk, uk) = key
            .split_once("->")
            .ok_or_else(|| Error::Format(format!("restriction key '{key}' is not 'V->U'")))?;
        let vo = parse_open_key(&space, vk.trim())?;
        let uo = parse_open_key(&space, uk.trim())?;
        let vi = opens
            .iter()
            .position(|o| *o == vo)
            .ok_or_else(|| Error::Format(format!("'{}' is not an open", vk.trim())))?;
        let ui = opens
            .iter()
            .position(|o| *o == uo)
            .ok_or_else(|| Error::Format(format!("'{}' is not an open", uk.trim())))?;
        if !opens[ui].is_subset(&opens[vi]) {
            return Err(Error::Format(format!(
                "restriction key '{key}' does not go down an inclusion"
            )));
        }
        let src = &values[vi];
        let dst = &values[ui];
        let mut map = Vec::with_capacity(table.len());
        for l in table {
            map.push(
                dst.index_of(l)
                    .ok_or_else(|| Error::Format(format!("unknown element label '{l}'")))?,
            );
        }
        if map.len() != src.n() {
            return Err(Error::Format(format!(
                "restriction '{key}' has {} entries, expected {}",
                map.len(),
                src.n()
            )));
        }
        restrictions.insert((vi, ui), map);
    }
    Presheaf::new(
        if j.name.is_empty() { "presheaf" } else { &j.name }.to_string(),
        space,
        opens,
        values,
        restrictions,
    )
}

pub fn presheaf_to_json(p: &Presheaf) -> PresheafJson {
    let opens_budget = 1 << 12;
    let space_opens = p.base.opens(opens_budget).unwrap_or_default();
    let mut algebras = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (u, alg) in p.values.iter().enumerate() {
        let name = format!("A_{}", open_key(&p.base, &p.opens[u]));
        algebras.insert(name.clone(), AlgebraJson::from_algebra(alg));
        values.insert(open_key(&p.base, &p.opens[u]), name);
    }
    let mut restrictions = BTreeMap::new();
    for (v, u) in p.inclusion_pairs() {
        if v == u {
            continue;
        }
        let key = format!(
            "{}->{}",
            open_key(&p.base, &p.opens[v]),
            open_key(&p.base, &p.opens[u])
        );
        let table = p
            .restriction_table(v, u)
            .iter()
            .map(|&x| p.values[u].label(x).to_string())
            .collect();
        restrictions.insert(key, table);
    }
    PresheafJson {
        name: p.name.clone(),
        space: TopologyJson {
            points: p.base.points.clone(),
            opens: space_opens
                .iter()
                .map(|o| o.iter().map(|i| p.base.points[i].clone()).collect())
                .collect(),
        },
        algebras,
        values,
        restrictions,
    }
}

/// JSON dump of the sections of an étalé space over one open.
#[derive(Debug, Clone, Serialize)]
pub struct SectionsJson {
    pub schema: &'static str,
    pub open: Vec<String>,
    pub sections: Vec<Vec<String>>,
}

pub fn sections_to_json(
    e: &crate::etale::EtaleSpace,
    u: &BitSet,
    secs: &[crate::etale::Section],
) -> SectionsJson {
    SectionsJson {
        schema: REPORT_SCHEMA,
        open: u.iter().map(|i| e.base.points[i].clone()).collect(),
        sections: secs
            .iter()
            .map(|s| s.values.iter().map(|&t| e.total.points[t].clone()).collect())
            .collect(),
    }
}

/// JSON dump of a stalk: classes with canonical representatives.
#[derive(Debug, Clone, Serialize)]
pub struct StalkJson {
    pub schema: &'static str,
    pub point: String,
    pub minimal_open: Vec<String>,
    pub classes: Vec<String>,
}

pub fn stalk_to_json(p: &Presheaf, st: &crate::colimit::Stalk) -> StalkJson {
    StalkJson {
        schema: REPORT_SCHEMA,
        point: p.base.points[st.point].clone(),
        minimal_open: p.opens[st.min_open]
            .iter()
            .map(|i| p.base.points[i].clone())
            .collect(),
        classes: (0..st.algebra.n())
            .map(|e| st.algebra.label(e).to_string())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::presheaf::validate_presheaf;
    use crate::report::Budget;

    #[test]
    fn algebra_roundtrip_preserves_validation() {
        for a in [fixtures::a4(), fixtures::a6(), fixtures::a8()] {
            let j = AlgebraJson::from_algebra(&a);
            let text = serde_json::to_string(&j).unwrap();
            let raw = parse_algebra(&text).unwrap();
            let v = validate_residuated_lattice(&raw).unwrap();
            assert!(v.report.is_valid());
            assert!(crate::algebra::are_isomorphic(&v.algebra.unwrap(), &a));
        }
    }

    #[test]
    fn unknown_labels_are_format_errors() {
        let mut j = AlgebraJson::from_algebra(&fixtures::a4());
        j.prod[0][0] = "zz".into();
        let text = serde_json::to_string(&j).unwrap();
        assert!(matches!(
            parse_algebra(&text).and_then(|r| validate_residuated_lattice(&r)),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn presheaf_roundtrip_with_cover_only_restrictions() {
        let p = fixtures::prsresexa4(&Budget::default()).unwrap();
        let mut j = presheaf_to_json(&p);
        // Drop non-cover restriction entries; composites must be derived.
        let full_keys: Vec<String> = j
            .restrictions
            .keys()
            .filter(|k| {
                let (v, u) = k.split_once("->").unwrap();
                v.split(',').filter(|s| !s.is_empty()).count()
                    > u.split(',').filter(|s| !s.is_empty()).count() + 1
            })
            .cloned()
            .collect();
        for k in full_keys {
            j.restrictions.remove(&k);
        }
        let text = serde_json::to_string(&j).unwrap();
        let q = parse_presheaf(&text).unwrap();
        assert!(validate_presheaf(&q).is_valid());
        for u in 0..p.opens.len() {
            assert!(crate::algebra::are_isomorphic(&p.values[u], &q.values[u]));
        }
    }

    #[test]
    fn topology_files_validate() {
        let good = r#"{"points":["x","y"],"opens":[[],["x"],["x","y"]]}"#;
        let (vs, rep) = parse_topology(good).unwrap();
        assert!(rep.is_valid());
        assert!(vs.space.is_some());
        let bad = r#"{"points":["x","y"],"opens":[[],["x"],["y"]]}"#;
        let (vs, rep) = parse_topology(bad).unwrap();
        assert!(!rep.is_valid());
        assert!(vs.space.is_none());
    }
}
