//! JSON interchange formats.
//!
//! Rationals are strings `"a/b"`. Emission goes through `serde_json::Value`,
//! whose maps are sorted, and is pretty-printed with a trailing newline, so
//! equal values produce byte-identical files.
//!
//! Spec file, pair mode:
//!
//! ```json
//! {"n": 2, "mode": "pair",
//!  "offspring": [{"parent": 1, "child": 1, "dist": [{"c": [0, 1], "p": "3/7"}, ...]}, ...]}
//! ```
//!
//! Plain mode uses `"type"` in place of `"parent"`/`"child"`, or gives the
//! multinomial form `"degree_dist": [{"type": 1, "dist": [{"d": 1, "p": "1/2"}]}]`
//! with `"params": [["1/3", ...], ...]`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constructor::ReversibilityReport;
use crate::dist::Distribution;
use crate::error::Error;
use crate::model::{GWSpec, Mode, RootMeasure, TypeKey};
use crate::norelabel::PlainSpec;
use crate::parametrizer::{ParameterAssignment, SupportTemplate};
use crate::rational::Rational;
use crate::vector::{Label, OffspringVector, SupportClass};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    c: Vec<u32>,
    p: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LawDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    child: Option<Label>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    plain_type: Option<Label>,
    dist: Vec<EntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeEntryDoc {
    d: u32,
    p: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeLawDoc {
    #[serde(rename = "type")]
    plain_type: Label,
    dist: Vec<DegreeEntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    n: usize,
    mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offspring: Option<Vec<LawDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree_dist: Option<Vec<DegreeLawDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Vec<Vec<Rational>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootEntryDoc {
    label: Label,
    p: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NeighborDoc {
    label: Label,
    dist: Vec<EntryDoc>,
}

/// Exact detailed-balance stamp written alongside a measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verification {
    pub passed: bool,
    pub checked_pairs: usize,
}

impl From<&ReversibilityReport> for Verification {
    fn from(report: &ReversibilityReport) -> Self {
        Verification { passed: report.passed(), checked_pairs: report.checked_pairs }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    n: usize,
    root: Vec<RootEntryDoc>,
    neighbors: Vec<NeighborDoc>,
    descendants: SpecDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    label: Label,
    c: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateDoc {
    n: usize,
    classes: Vec<ClassDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    label: Label,
    c: Vec<u32>,
    p: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    weights: Vec<WeightDoc>,
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, Error> {
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn dist_doc(dist: &Distribution) -> Vec<EntryDoc> {
    dist.iter()
        .map(|(c, p)| EntryDoc { c: c.counts().to_vec(), p: p.clone() })
        .collect()
}

fn dist_from_doc(n: usize, entries: &[EntryDoc]) -> Result<Distribution, Error> {
    Distribution::new(
        n,
        entries.iter().map(|e| (OffspringVector::new(e.c.clone()), e.p.clone())),
    )
}

fn spec_doc(nu: &GWSpec) -> SpecDoc {
    let offspring = nu
        .iter()
        .map(|(key, dist)| {
            let (parent, child, plain_type) = match *key {
                TypeKey::Pair(i, j) => (Some(i), Some(j), None),
                TypeKey::Plain(i) => (None, None, Some(i)),
            };
            LawDoc { parent, child, plain_type, dist: dist_doc(dist) }
        })
        .collect();
    SpecDoc { n: nu.n(), mode: nu.mode(), offspring: Some(offspring), degree_dist: None, params: None }
}

fn spec_from_doc(doc: &SpecDoc) -> Result<GWSpec, Error> {
    let n = doc.n;
    match (&doc.offspring, &doc.degree_dist, &doc.params) {
        (Some(laws), None, None) => match doc.mode {
            Mode::Pair => {
                let laws = laws
                    .iter()
                    .map(|law| match (law.parent, law.child, law.plain_type) {
                        (Some(i), Some(j), None) => Ok(((i, j), dist_from_doc(n, &law.dist)?)),
                        _ => Err(Error::Parse("pair-mode laws need \"parent\" and \"child\"".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GWSpec::pair(n, laws)
            }
            Mode::Plain => {
                let laws = laws
                    .iter()
                    .map(|law| match (law.parent, law.child, law.plain_type) {
                        (None, None, Some(i)) => Ok((i, dist_from_doc(n, &law.dist)?)),
                        _ => Err(Error::Parse("plain-mode laws need \"type\" only".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GWSpec::plain(n, laws)
            }
        },
        (None, Some(degrees), Some(params)) if doc.mode == Mode::Plain => {
            let mut degree_dist = vec![None; n];
            for law in degrees {
                let slot = law
                    .plain_type
                    .checked_sub(1)
                    .and_then(|k| degree_dist.get_mut(k))
                    .ok_or(Error::LabelOutOfRange { label: law.plain_type, n })?;
                if slot.is_some() {
                    return Err(Error::Parse(format!("label {} listed twice", law.plain_type)));
                }
                *slot = Some(law.dist.iter().map(|e| (e.d, e.p.clone())).collect());
            }
            let degree_dist = degree_dist
                .into_iter()
                .enumerate()
                .map(|(k, d)| d.ok_or_else(|| Error::Parse(format!("no degree law for label {}", k + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            PlainSpec::new(n, degree_dist, params.clone())?.to_gw()
        }
        _ => Err(Error::Parse(
            "give either \"offspring\", or (plain mode) \"degree_dist\" with \"params\"".into(),
        )),
    }
}

pub fn parse_spec(text: &str) -> Result<GWSpec, Error> {
    spec_from_doc(&parse(text)?)
}

pub fn emit_spec(nu: &GWSpec) -> Result<String, Error> {
    to_canonical_json(&spec_doc(nu))
}

/// A measure file: the measure and an optional verification stamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureFile {
    pub measure: RootMeasure,
    pub verification: Option<Verification>,
}

impl MeasureFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let doc: MeasureDoc = parse(text)?;
        let n = doc.n;
        let nu = spec_from_doc(&doc.descendants)?;
        if nu.n() != n {
            return Err(Error::InvalidMeasure("descendant law has a different n".into()));
        }
        let mut root = vec![None; n];
        for entry in &doc.root {
            let slot = entry
                .label
                .checked_sub(1)
                .and_then(|k| root.get_mut(k))
                .ok_or(Error::LabelOutOfRange { label: entry.label, n })?;
            *slot = Some(entry.p.clone());
        }
        let mut neighbors = vec![None; n];
        for entry in &doc.neighbors {
            let slot = entry
                .label
                .checked_sub(1)
                .and_then(|k| neighbors.get_mut(k))
                .ok_or(Error::LabelOutOfRange { label: entry.label, n })?;
            *slot = Some(dist_from_doc(n, &entry.dist)?);
        }
        let missing = |what: &str, k: usize| Error::InvalidMeasure(format!("no {what} for label {}", k + 1));
        let root = root
            .into_iter()
            .enumerate()
            .map(|(k, p)| p.ok_or_else(|| missing("root probability", k)))
            .collect::<Result<Vec<_>, _>>()?;
        let neighbors = neighbors
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| missing("neighbor law", k)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MeasureFile {
            measure: RootMeasure::new(root, neighbors, nu)?,
            verification: doc.verification,
        })
    }

    pub fn emit(&self) -> Result<String, Error> {
        let mu = &self.measure;
        let doc = MeasureDoc {
            n: mu.n(),
            root: (1..=mu.n())
                .map(|i| RootEntryDoc { label: i, p: mu.root_prob(i).clone() })
                .collect(),
            neighbors: (1..=mu.n())
                .map(|i| NeighborDoc { label: i, dist: dist_doc(mu.neighbor_dist(i)) })
                .collect(),
            descendants: spec_doc(mu.descendants()),
            verification: self.verification,
        };
        to_canonical_json(&doc)
    }
}

pub fn parse_measure(text: &str) -> Result<RootMeasure, Error> {
    MeasureFile::parse(text).map(|f| f.measure)
}

pub fn parse_template(text: &str) -> Result<SupportTemplate, Error> {
    let doc: TemplateDoc = parse(text)?;
    let n = doc.n;
    let classes = doc
        .classes
        .into_iter()
        .map(|c| SupportClass::new(c.label, OffspringVector::new(c.c)))
        .collect::<Vec<_>>();
    if let Some(bad) = classes.iter().find(|c| c.vector.len() != n || !(1..=n).contains(&c.label)) {
        return Err(Error::Parse(format!("class {bad} does not fit n = {n}")));
    }
    Ok(SupportTemplate::new(n, classes))
}

pub fn emit_template(template: &SupportTemplate) -> Result<String, Error> {
    to_canonical_json(&TemplateDoc {
        n: template.n(),
        classes: template
            .classes()
            .iter()
            .map(|c| ClassDoc { label: c.label, c: c.vector.counts().to_vec() })
            .collect(),
    })
}

pub fn parse_params(text: &str) -> Result<ParameterAssignment, Error> {
    let doc: ParamsDoc = parse(text)?;
    Ok(ParameterAssignment::new(
        doc.weights
            .into_iter()
            .map(|w| (SupportClass::new(w.label, OffspringVector::new(w.c)), w.p)),
    ))
}

pub fn emit_params(params: &ParameterAssignment) -> Result<String, Error> {
    to_canonical_json(&ParamsDoc {
        weights: params
            .weights()
            .iter()
            .map(|(c, p)| WeightDoc { label: c.label, c: c.vector.counts().to_vec(), p: p.clone() })
            .collect(),
    })
}
