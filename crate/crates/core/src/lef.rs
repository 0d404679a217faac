//! Witnesses for local embeddability into finite groups: a finite set `F` of
//! the subject group, a finite group `Q` and a partial map `φ` into `Q` that
//! is injective on `F` and multiplicative on `F × F`.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::finite::FiniteGroup;
use crate::free::FreeWord;
use crate::marked::{make_marked, ElementKey, GroupSpec, MarkedGroup};
use crate::topology::{ball_isomorphism, build_ball, GroupSequence, LabeledBall};
use crate::word::parse_in_rank;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Manual,
    /// Built from the member `G_r` whose `radius`-ball matches the limit's.
    Constructed {
        r: u64,
        #[serde(rename = "R")]
        radius: usize,
    },
}

/// `φ` sends the element represented by each word of `phi` to an element of
/// `Q`, numbered in the breadth-first order of `FiniteGroup::enumerate`.
/// Elements without an entry are outside the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefWitness {
    pub subject: String,
    pub subject_spec: Option<GroupSpec>,
    pub rank: usize,
    pub f: Vec<FreeWord>,
    pub q: GroupSpec,
    pub phi: Vec<(FreeWord, u32)>,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct WitnessDoc {
    schema: String,
    subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subject_spec: Option<GroupSpec>,
    rank: usize,
    #[serde(rename = "F")]
    f: Vec<String>,
    #[serde(rename = "Q")]
    q: GroupSpec,
    phi: Vec<(String, u32)>,
    provenance: Provenance,
}

impl LefWitness {
    pub fn to_json(&self) -> Value {
        let doc = WitnessDoc {
            schema: crate::SCHEMA.to_string(),
            subject: self.subject.clone(),
            subject_spec: self.subject_spec.clone(),
            rank: self.rank,
            f: self.f.iter().map(ToString::to_string).collect(),
            q: self.q.clone(),
            phi: self.phi.iter().map(|(w, q)| (w.to_string(), *q)).collect(),
            provenance: self.provenance.clone(),
        };
        serde_json::to_value(doc).expect("witness serializes")
    }

    pub fn from_json(value: &Value) -> Result<LefWitness> {
        let doc: WitnessDoc = serde_json::from_value(value.clone()).map_err(|e| Error::MalformedWitness(e.to_string()))?;
        if doc.schema != crate::SCHEMA {
            return Err(Error::MalformedWitness(format!("unknown schema {:?}", doc.schema)));
        }
        let parse = |t: &str| parse_in_rank(t, doc.rank).map_err(|e| Error::MalformedWitness(format!("{t:?}: {e}")));
        Ok(LefWitness {
            subject: doc.subject,
            subject_spec: doc.subject_spec,
            rank: doc.rank,
            f: doc.f.iter().map(|t| parse(t)).collect::<Result<_>>()?,
            q: doc.q,
            phi: doc.phi.iter().map(|(t, q)| Ok((parse(t)?, *q))).collect::<Result<_>>()?,
            provenance: doc.provenance,
        })
    }

    pub fn load(path: &Path) -> Result<LefWitness> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let value: Value = serde_json::from_str(&text).map_err(|e| Error::MalformedWitness(format!("{}: {e}", path.display())))?;
        LefWitness::from_json(&value)
    }
}

/// A finite partial map from a marked group into an enumerated finite group.
pub struct PartialMap<'g> {
    group: &'g MarkedGroup,
    keyed: HashMap<ElementKey, u32>,
    entries: Vec<(FreeWord, u32)>,
}

impl<'g> PartialMap<'g> {
    /// Rejects entries that are out of range for `q` or that give one
    /// element two different images.
    pub fn new(group: &'g MarkedGroup, q: &FiniteGroup, entries: &[(FreeWord, u32)]) -> Result<PartialMap<'g>> {
        let mut map = PartialMap { group, keyed: HashMap::new(), entries: Vec::new() };
        for (w, img) in entries {
            if w.rank() != group.rank() {
                return Err(Error::MalformedWitness(format!("{w} has rank {}, expected {}", w.rank(), group.rank())));
            }
            if *img as usize >= q.order() {
                return Err(Error::MalformedWitness(format!("image {img} of {w} is not an element of a group of order {}", q.order())));
            }
            match map.get(w)? {
                Some(prev) if prev != *img => {
                    return Err(Error::MalformedWitness(format!("{w} is mapped to both {prev} and {img}")));
                }
                Some(_) => continue,
                None => {}
            }
            match group.normal_form(w)? {
                Some(k) => {
                    map.keyed.insert(k, *img);
                }
                None => map.entries.push((w.clone(), *img)),
            }
        }
        Ok(map)
    }

    pub fn get(&self, w: &FreeWord) -> Result<Option<u32>> {
        if let Some(k) = self.group.normal_form(w)? {
            return Ok(self.keyed.get(&k).copied());
        }
        for (u, img) in &self.entries {
            if self.group.equal_elements(u, w)? {
                return Ok(Some(*img));
            }
        }
        Ok(None)
    }

    fn require(&self, w: &FreeWord) -> Result<u32> {
        self.get(w)?.ok_or_else(|| Error::IncompleteWitness(format!("φ is undefined at {w}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityViolation {
    /// Indices into `F`, `i < j`.
    pub i: usize,
    pub j: usize,
    pub image: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicativityViolation {
    /// Indices into the domain: `φ(d_i d_j) != φ(d_i) φ(d_j)`.
    pub i: usize,
    pub j: usize,
    pub image_of_product: u32,
    pub product_of_images: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomomorphismReport {
    pub holds: bool,
    pub violations: Vec<MultiplicativityViolation>,
}

fn multiplicativity(g: &MarkedGroup, q: &FiniteGroup, phi: &PartialMap<'_>, domain: &[FreeWord]) -> Result<Vec<MultiplicativityViolation>> {
    let images = domain.iter().map(|d| phi.require(d)).collect::<Result<Vec<u32>>>()?;
    let mut out = Vec::new();
    for (i, a) in domain.iter().enumerate() {
        for (j, b) in domain.iter().enumerate() {
            let image_of_product = phi.require(&a.mul(b)?)?;
            let product_of_images = q.mul(images[i], images[j]);
            if image_of_product != product_of_images {
                out.push(MultiplicativityViolation { i, j, image_of_product, product_of_images });
            }
        }
    }
    debug_assert!(domain.iter().all(|d| d.rank() == g.rank()));
    Ok(out)
}

/// Whether `φ(gh) = φ(g) φ(h)` for all ordered pairs from `domain`. An
/// undefined image is an `IncompleteWitness` error.
pub fn is_homomorphism_on(g: &MarkedGroup, q: &FiniteGroup, phi: &[(FreeWord, u32)], domain: &[FreeWord]) -> Result<HomomorphismReport> {
    let map = PartialMap::new(g, q, phi)?;
    let violations = multiplicativity(g, q, &map, domain)?;
    Ok(HomomorphismReport { holds: violations.is_empty(), violations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LefVerdict {
    pub pass: bool,
    pub injectivity: Vec<InjectivityViolation>,
    pub multiplicativity: Vec<MultiplicativityViolation>,
}

impl LefVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::SCHEMA,
            "pass": self.pass,
            "injectivity": self.injectivity,
            "multiplicativity": self.multiplicativity,
        })
    }
}

/// Checks a witness against the subject group: `φ` injective on `F` and
/// multiplicative on every ordered pair of `F`. Every violation is listed.
pub fn check_lef_witness(g: &MarkedGroup, wit: &LefWitness, caps: &Caps) -> Result<LefVerdict> {
    if wit.rank != g.rank() {
        return Err(Error::RankMismatch { left: g.rank(), right: wit.rank });
    }
    for (i, a) in wit.f.iter().enumerate() {
        for b in &wit.f[..i] {
            if g.equal_elements(a, b)? {
                return Err(Error::MalformedWitness(format!("{b} and {a} are the same element of F")));
            }
        }
    }
    let q = FiniteGroup::enumerate(&make_marked(&wit.q)?, caps.max_group_ball)?;
    let map = PartialMap::new(g, &q, &wit.phi)?;
    let images = wit.f.iter().map(|f| map.require(f)).collect::<Result<Vec<u32>>>()?;
    let mut injectivity = Vec::new();
    for j in 0..images.len() {
        for i in 0..j {
            if images[i] == images[j] {
                injectivity.push(InjectivityViolation { i, j, image: images[i] });
            }
        }
    }
    let multiplicativity = multiplicativity(g, &q, &map, &wit.f)?;
    Ok(LefVerdict { pass: injectivity.is_empty() && multiplicativity.is_empty(), injectivity, multiplicativity })
}

fn products(f: &[FreeWord]) -> Result<Vec<FreeWord>> {
    let mut out = Vec::with_capacity(f.len() * f.len());
    for a in f {
        for b in f {
            out.push(a.mul(b)?);
        }
    }
    Ok(out)
}

/// First `r` (lowest index) whose `radius`-ball matches `target`.
fn first_match(seq: &GroupSequence, target: &LabeledBall, radius: usize, r_max: u64, cap: u64) -> Result<Option<(u64, LabeledBall)>> {
    let code = target.canonical_code();
    let found = (1..=r_max)
        .into_par_iter()
        .map(|r| -> Result<Option<(u64, LabeledBall)>> {
            let ball = build_ball(&seq.member(r)?, radius, cap)?;
            Ok((ball.canonical_code() == code).then_some((r, ball)))
        })
        .find_first(|res| !matches!(res, Ok(None)));
    found.transpose().map(Option::flatten)
}

fn witness_at(seq: &GroupSequence, limit: &MarkedGroup, f: &[FreeWord], radius: usize, r_max: u64, caps: &Caps) -> Result<LefWitness> {
    let limit_ball = build_ball(limit, radius, caps.max_group_ball)?;
    let (r, ball) = first_match(seq, &limit_ball, radius, r_max, caps.max_group_ball)?.ok_or(Error::CapExceeded {
        what: "sequence index (no matching ball)",
        cap: r_max,
        radius: Some(radius),
    })?;
    let q_spec = seq.member_spec(r)?;
    let q = FiniteGroup::enumerate(&seq.member(r)?, caps.max_group_ball)?;
    let psi = ball_isomorphism(&limit_ball, &ball)?.expect("codes match");
    let phi = limit_ball
        .vertices
        .iter()
        .zip(&psi)
        .map(|(v, &t)| Ok((v.word.clone(), q.element_of(&ball.vertices[t].word)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LefWitness {
        subject: limit.name().to_string(),
        subject_spec: seq.limit_spec().cloned(),
        rank: limit.rank(),
        f: f.to_vec(),
        q: q_spec,
        phi,
        provenance: Provenance::Constructed { r, radius },
    })
}

/// Builds a witness for `F` in the limit of a sequence of finite groups:
/// `R` is the largest norm in `F ∪ F·F`, `Q` the first member whose `R`-ball
/// matches the limit's, and `φ` the ball isomorphism read as a map into `Q`,
/// undefined outside the ball. Should that map fail the check, `R` is raised
/// to `max(|f| + |h|)`, where every path spelling `f·h` stays in the ball.
/// No matching member up to `r_max` is reported as a cap error.
pub fn lef_witness_from_limit(seq: &GroupSequence, f: &[FreeWord], r_max: u64, caps: &Caps) -> Result<LefWitness> {
    let limit = seq.limit()?;
    if f.is_empty() {
        return Err(Error::InvalidArgument("F must be nonempty".into()));
    }
    for (i, a) in f.iter().enumerate() {
        for b in &f[..i] {
            if limit.equal_elements(a, b)? {
                return Err(Error::InvalidArgument(format!("{b} and {a} are the same element of the limit")));
            }
        }
    }
    let norm = |w: &FreeWord| limit.norm(w, caps.max_group_ball);
    let norms_f = f.iter().map(norm).collect::<Result<Vec<_>>>()?;
    let radius = products(f)?.iter().map(norm).chain(norms_f.iter().copied().map(Ok)).try_fold(0, |m, n| n.map(|n| m.max(n)))?;
    let wit = witness_at(seq, &limit, f, radius, r_max, caps)?;
    if check_lef_witness(&limit, &wit, caps)?.pass {
        return Ok(wit);
    }
    let safe = norms_f.iter().max().copied().unwrap_or(0) * 2;
    let wit = witness_at(seq, &limit, f, safe.max(radius), r_max, caps)?;
    let verdict = check_lef_witness(&limit, &wit, caps)?;
    if !verdict.pass {
        return Err(Error::SelfCheck(format!("constructed witness fails: {}", verdict.to_json())));
    }
    Ok(wit)
}
