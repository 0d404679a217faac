//! Word maps, value sets `w{G}`, verbal subgroups `G_w`, conciseness
//! records, empirical `δ`-profiles and the bounded-conciseness harness for
//! convergent sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::explore::Explorer;
use crate::finite::FiniteGroup;
use crate::free::FreeWord;
use crate::marked::{ElementKey, MarkedGroup};
use crate::topology::{ball_isomorphism, build_ball, matching_radius, GroupSequence};
use crate::word::parse_auto;

/// A word `w ∈ F_r` viewed as the evaluation map `G^r -> G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordMap {
    word: FreeWord,
    display: String,
}

impl WordMap {
    pub fn new(word: FreeWord) -> Result<WordMap> {
        if word.rank() == 0 {
            return Err(Error::InvalidArgument("word maps need arity at least 1".into()));
        }
        Ok(WordMap { display: word.to_string(), word })
    }

    /// Parses a word; the arity is the largest generator index used.
    pub fn parse(text: &str) -> Result<WordMap> {
        let word = parse_auto(text)?;
        Ok(WordMap { word, display: text.trim().to_string() })
    }

    pub fn word(&self) -> &FreeWord {
        &self.word
    }

    pub fn arity(&self) -> usize {
        self.word.rank()
    }

    /// `w(args)` as a word over the marking of the target group.
    pub fn apply(&self, args: &[FreeWord]) -> Result<FreeWord> {
        self.word.substitute(args)
    }
}

impl fmt::Display for WordMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}

impl Serialize for WordMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.display)
    }
}

/// A set of word values, keyed by element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueSet {
    /// Sorted element keys.
    pub values: Vec<ElementKey>,
    /// True when every tuple of `G^arity` was accounted for.
    pub exhaustive: bool,
    pub evaluations: u64,
}

impl ValueSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn evaluation_count(fg: &FiniteGroup, classes: usize, arity: usize) -> Option<u64> {
    let n = fg.order() as u64;
    n.checked_pow(arity as u32 - 1)?.checked_mul(classes as u64)
}

fn check_evaluations(count: Option<u64>, cap: u64) -> Result<()> {
    match count {
        Some(c) if c <= cap => Ok(()),
        _ => Err(Error::CapExceeded { what: "word evaluations", cap, radius: None }),
    }
}

/// Calls `f` on every tuple of `G^len` (as element indices).
fn for_each_tuple(order: u32, len: usize, mut f: impl FnMut(&[u32])) {
    let mut tuple = vec![0u32; len];
    loop {
        f(&tuple);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            tuple[i] += 1;
            if tuple[i] < order {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// `w{G}` as sorted element indices. The first argument only runs over
/// conjugacy class representatives; the result is then closed under
/// conjugation, since `w(g^h, ...) = w(g, ...^{h^-1})^h`. The cap bounds the
/// number of evaluations performed.
pub fn word_values(fg: &FiniteGroup, w: &WordMap, max_evaluations: u64) -> Result<Vec<u32>> {
    let reps = fg.class_representatives();
    let arity = w.arity();
    check_evaluations(evaluation_count(fg, reps.len(), arity), max_evaluations)?;
    let n = fg.order() as u32;
    let found = reps
        .par_iter()
        .map(|&c| {
            let mut hit = vec![false; n as usize];
            let mut args = vec![c; arity];
            for_each_tuple(n, arity - 1, |rest| {
                args[1..].copy_from_slice(rest);
                hit[fg.eval(w.word(), &args) as usize] = true;
            });
            hit
        })
        .reduce(
            || vec![false; n as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                a
            },
        );
    let seeds = (0..n).filter(|&a| found[a as usize]);
    Ok(fg.conjugation_closure(seeds))
}

/// `w{G}` by evaluating every tuple of `G^arity`.
pub fn word_values_naive(fg: &FiniteGroup, w: &WordMap, max_evaluations: u64) -> Result<Vec<u32>> {
    let arity = w.arity();
    check_evaluations(evaluation_count(fg, fg.order(), arity), max_evaluations)?;
    let mut found = BTreeSet::new();
    for_each_tuple(fg.order() as u32, arity, |args| {
        found.insert(fg.eval(w.word(), args));
    });
    Ok(found.into_iter().collect())
}

fn enumerate_finite(g: &MarkedGroup, caps: &Caps) -> Result<FiniteGroup> {
    if !g.is_finite() {
        return Err(Error::NotFinite(g.name().to_string()));
    }
    FiniteGroup::enumerate(g, caps.max_group_ball)
}

fn keys_of(fg: &FiniteGroup, set: &[u32]) -> Vec<ElementKey> {
    let mut keys: Vec<ElementKey> = set.iter().map(|&a| fg.key(a)).collect();
    keys.sort();
    keys
}

/// Exact `w{G}` for a finite group.
pub fn w_values(g: &MarkedGroup, w: &WordMap, caps: &Caps) -> Result<ValueSet> {
    let fg = enumerate_finite(g, caps)?;
    let values = word_values(&fg, w, caps.max_evaluations)?;
    let evaluations = evaluation_count(&fg, fg.class_representatives().len(), w.arity()).unwrap_or(u64::MAX);
    Ok(ValueSet { values: keys_of(&fg, &values), exhaustive: true, evaluations })
}

/// Vertices of the largest complete ball of radius `<= radius` within the cap.
fn partial_ball<'g>(g: &'g MarkedGroup, radius: usize, cap: u64) -> Result<Explorer<'g>> {
    let mut ex = Explorer::new(g);
    while ex.radius() < radius {
        match ex.grow(cap) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) if e.is_cap() => break,
            Err(e) => return Err(e),
        }
    }
    Ok(ex)
}

fn complete_vertices(ex: &Explorer<'_>) -> usize {
    ex.layer(ex.radius()).end
}

/// A lower bound for `w{G}`, for groups that may be infinite. Arguments range
/// over the ball of `radius` (truncated to fit `caps.max_group_ball`); all
/// tuples are evaluated when there are at most `budget`, otherwise `budget`
/// tuples are drawn with a ChaCha generator seeded by `seed`.
pub fn w_values_sampled(g: &MarkedGroup, w: &WordMap, budget: u64, radius: usize, seed: u64, caps: &Caps) -> Result<ValueSet> {
    if budget == 0 {
        return Err(Error::InvalidArgument("sample budget must be at least 1".into()));
    }
    let ex = partial_ball(g, radius, caps.max_group_ball)?;
    let words = &ex.words[..complete_vertices(&ex)];
    let arity = w.arity();
    let total = (words.len() as u64).checked_pow(arity as u32);
    let mut values = BTreeSet::new();
    let mut eval = |idx: &[u32]| -> Result<()> {
        let args: Vec<FreeWord> = idx.iter().map(|&i| words[i as usize].clone()).collect();
        values.insert(g.element_key(&w.apply(&args)?, caps.max_free_ball)?);
        Ok(())
    };
    let evaluations = match total {
        Some(t) if t <= budget => {
            let mut res = Ok(());
            for_each_tuple(words.len() as u32, arity, |idx| {
                if res.is_ok() {
                    res = eval(idx);
                }
            });
            res?;
            t
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = vec![0u32; arity];
            for _ in 0..budget {
                for slot in idx.iter_mut() {
                    *slot = rng.gen_range(0..words.len() as u32);
                }
                eval(&idx)?;
            }
            budget
        }
    };
    Ok(ValueSet { values: values.into_iter().collect(), exhaustive: false, evaluations })
}

/// The subgroup of a finite group generated by `seeds`, as sorted keys.
pub fn subgroup_closure(g: &MarkedGroup, seeds: &[ElementKey], caps: &Caps) -> Result<Vec<ElementKey>> {
    let fg = enumerate_finite(g, caps)?;
    let idx = seeds
        .iter()
        .map(|k| fg.find_key(k).ok_or_else(|| Error::InvalidArgument(format!("{k:?} is not an element of {}", g.name()))))
        .collect::<Result<Vec<u32>>>()?;
    Ok(keys_of(&fg, &fg.subgroup_closure(&idx)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcisenessRecord {
    pub group: String,
    pub group_order: Option<u64>,
    /// `|w{G}|`.
    pub m: usize,
    /// `|G_w|`.
    pub verbal_order: usize,
    pub values: Vec<ElementKey>,
    pub exhaustive: bool,
}

/// Value set and verbal subgroup of an enumerated group, as indices.
pub fn verbal_subgroup(fg: &FiniteGroup, w: &WordMap, max_evaluations: u64) -> Result<(Vec<u32>, Vec<u32>)> {
    let values = word_values(fg, w, max_evaluations)?;
    let closure = fg.subgroup_closure(&values);
    Ok((values, closure))
}

pub fn conciseness_record(g: &MarkedGroup, w: &WordMap, caps: &Caps) -> Result<ConcisenessRecord> {
    let fg = enumerate_finite(g, caps)?;
    let (values, closure) = verbal_subgroup(&fg, w, caps.max_evaluations)?;
    Ok(ConcisenessRecord {
        group: g.name().to_string(),
        group_order: Some(fg.order() as u64),
        m: values.len(),
        verbal_order: closure.len(),
        values: keys_of(&fg, &values),
        exhaustive: true,
    })
}

/// Observed `m -> max |G_w|` over a family, with the records behind it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaProfile {
    pub word: String,
    pub family: String,
    pub records: Vec<ConcisenessRecord>,
    /// `(group, message)` for members that could not be evaluated.
    pub errors: Vec<(String, String)>,
    pub delta: BTreeMap<usize, usize>,
}

impl DeltaProfile {
    pub fn new(word: impl Into<String>, family: impl Into<String>) -> DeltaProfile {
        DeltaProfile { word: word.into(), family: family.into(), ..DeltaProfile::default() }
    }

    pub fn add(&mut self, record: ConcisenessRecord) {
        let bound = self.delta.entry(record.m).or_insert(0);
        *bound = (*bound).max(record.verbal_order);
        self.records.push(record);
    }

    pub fn merge(&mut self, other: DeltaProfile) {
        for r in other.records {
            self.add(r);
        }
        self.errors.extend(other.errors);
    }

    pub fn bound(&self, m: usize) -> Option<usize> {
        self.delta.get(&m).copied()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::SCHEMA,
            "word": self.word,
            "family": self.family,
            "records": self.records.iter().map(|r| json!({
                "group": r.group,
                "m": r.m,
                "verbal_order": r.verbal_order,
                "exhaustive": r.exhaustive,
            })).collect::<Vec<_>>(),
            "delta": self.delta.iter().map(|(m, b)| [m, b]).collect::<Vec<_>>(),
            "errors": self.errors.iter().map(|(g, e)| json!({"group": g, "error": e})).collect::<Vec<_>>(),
        })
    }

    pub fn to_table(&self) -> String {
        let header = ["group", "|G|", "m", "|G_w|", "exhaustive"];
        let rows: Vec<[String; 5]> = self
            .records
            .iter()
            .map(|r| {
                [
                    r.group.clone(),
                    r.group_order.map_or("?".into(), |o| o.to_string()),
                    r.m.to_string(),
                    r.verbal_order.to_string(),
                    r.exhaustive.to_string(),
                ]
            })
            .collect();
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[&str]| {
            let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&header);
        for row in &rows {
            line(&row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        let _ = writeln!(out, "\nword {}  family {}", self.word, self.family);
        for (m, b) in &self.delta {
            let _ = writeln!(out, "delta({m}) >= {b}");
        }
        for (g, e) in &self.errors {
            let _ = writeln!(out, "error {g}: {e}");
        }
        out
    }
}

/// Records for every member of the family, evaluated in parallel and kept in
/// family order. Per-member failures are recorded, not returned.
pub fn delta_profile(family: &str, groups: &[MarkedGroup], w: &WordMap, caps: &Caps) -> DeltaProfile {
    let results: Vec<Result<ConcisenessRecord>> = groups.par_iter().map(|g| conciseness_record(g, w, caps)).collect();
    let mut profile = DeltaProfile::new(w.to_string(), family);
    for (g, res) in groups.iter().zip(results) {
        match res {
            Ok(r) => profile.add(r),
            Err(e) => profile.errors.push((g.name().to_string(), e.to_string())),
        }
    }
    profile
}

/// Ball-restricted search for a finite set of arguments realizing `w{G}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    /// Distinct argument elements realizing the values found.
    pub support: Vec<FreeWord>,
    /// Values found, each with a word representing it.
    pub values: Vec<(ElementKey, FreeWord)>,
    /// Number of values known after each radius of the schedule.
    pub history: Vec<(usize, usize)>,
    /// Stable over the last `k` radii. A heuristic, not a proof.
    pub stabilized: bool,
    /// The whole (finite) group was covered, so the values are all of `w{G}`.
    pub exact: bool,
}

/// Evaluates `w` on tuples from growing balls until `stable_k` consecutive
/// radii of `schedule` add no new value. Only tuples with an argument outside
/// the previous ball are evaluated at each radius.
pub fn finite_support(g: &MarkedGroup, w: &WordMap, schedule: &[usize], stable_k: usize, caps: &Caps) -> Result<SupportReport> {
    let arity = w.arity();
    let mut ex = Explorer::new(g);
    let mut found: HashMap<ElementKey, (FreeWord, Vec<usize>)> = HashMap::new();
    let mut order: Vec<ElementKey> = Vec::new();
    let mut history = Vec::new();
    let mut quiet = 0;
    let mut evaluated_upto = 0usize;
    let mut evaluations = 0u64;
    let mut stabilized = false;
    let mut exact = false;
    for &radius in schedule {
        ex.grow_to(radius, caps.max_group_ball)?;
        let n = complete_vertices(&ex);
        let mut added = 0;
        let mut err = None;
        for_each_tuple(n as u32, arity, |idx| {
            if err.is_some() || idx.iter().all(|&i| (i as usize) < evaluated_upto) {
                return;
            }
            evaluations += 1;
            if evaluations > caps.max_evaluations {
                err = Some(Error::CapExceeded { what: "word evaluations", cap: caps.max_evaluations, radius: Some(radius) });
                return;
            }
            let args: Vec<FreeWord> = idx.iter().map(|&i| ex.words[i as usize].clone()).collect();
            let res = w.apply(&args).and_then(|v| Ok((g.element_key(&v, caps.max_free_ball)?, v)));
            match res {
                Ok((key, v)) => {
                    if !found.contains_key(&key) {
                        found.insert(key.clone(), (v, idx.iter().map(|&i| i as usize).collect()));
                        order.push(key);
                        added += 1;
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let first = evaluated_upto == 0;
        evaluated_upto = n;
        history.push((radius, order.len()));
        if ex.is_exhausted() || (ex.radius() < radius) {
            stabilized = true;
            exact = true;
            break;
        }
        if !first && added == 0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= stable_k {
            stabilized = true;
            break;
        }
    }
    let mut support_idx: Vec<usize> = order.iter().flat_map(|k| found[k].1.iter().copied()).collect();
    support_idx.sort_unstable();
    support_idx.dedup();
    Ok(SupportReport {
        support: support_idx.into_iter().map(|i| ex.words[i].clone()).collect(),
        values: order.iter().map(|k| (k.clone(), found[k].0.clone())).collect(),
        history,
        stabilized,
        exact,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Pass,
    Fail,
    NotMet,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub step: &'static str,
    pub status: StepStatus,
    pub detail: String,
    pub witness: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremAReport {
    pub schema: &'static str,
    pub sequence: String,
    pub word: String,
    /// "for all r >= r̄" is checked on sampled indices `r̄..=r_max` only.
    pub scale: &'static str,
    pub r_max: u64,
    pub verdict: Verdict,
    pub m: Option<usize>,
    pub delta: Option<usize>,
    pub radius: Option<usize>,
    pub r_bar: Option<u64>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremAConfig {
    pub caps: Caps,
    /// Largest radius tried when searching for a finite support in the limit.
    pub support_radius: usize,
    /// Consecutive quiet radii that count as stabilized.
    pub stable_k: usize,
}

impl Default for TheoremAConfig {
    fn default() -> TheoremAConfig {
        TheoremAConfig { caps: Caps::default(), support_radius: 12, stable_k: 2 }
    }
}

enum Halt {
    Stop(StepStatus, String, Value),
    Error(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Halt {
        if e.is_cap() {
            Halt::Stop(StepStatus::Inconclusive, e.to_string(), Value::Null)
        } else {
            Halt::Error(e)
        }
    }
}

struct Harness<'a> {
    seq: &'a GroupSequence,
    w: &'a WordMap,
    cfg: &'a TheoremAConfig,
    report: TheoremAReport,
}

impl Harness<'_> {
    fn pass(&mut self, step: &'static str, detail: String, witness: Value) {
        self.report.steps.push(Step { step, status: StepStatus::Pass, detail, witness });
    }

    fn members(&self, from: u64) -> std::result::Result<Vec<(u64, FiniteGroup)>, Halt> {
        let r_max = self.cfg.caps.r_max;
        Ok((from..=r_max)
            .into_par_iter()
            .map(|r| Ok((r, enumerate_finite(&self.seq.member(r)?, &self.cfg.caps)?)))
            .collect::<Result<Vec<_>>>()?)
    }

    fn run(&mut self) -> std::result::Result<(), Halt> {
        let caps = &self.cfg.caps;
        let r_max = caps.r_max;
        let limit = self.seq.limit()?;

        // (a) finite support of w{G} in the limit, and a radius containing it
        let schedule: Vec<usize> = (0..=self.cfg.support_radius).collect();
        let support = finite_support(&limit, self.w, &schedule, self.cfg.stable_k, caps)?;
        if !support.stabilized {
            return Err(Halt::Stop(
                StepStatus::NotMet,
                format!("values of the limit did not stabilize up to radius {}", self.cfg.support_radius),
                json!({ "history": support.history }),
            ));
        }
        let norms = support
            .values
            .iter()
            .map(|(_, v)| limit.norm(v, caps.max_group_ball))
            .collect::<Result<Vec<_>>>()?;
        let radius = norms.iter().copied().max().unwrap_or(0);
        let m = support.values.len();
        self.report.m = Some(m);
        self.report.radius = Some(radius);
        self.pass(
            "a",
            format!("{m} values in the limit, all within B({radius})"),
            json!({
                "m": m,
                "R": radius,
                "values": support.values.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>(),
                "support": support.support.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "history": support.history,
                "exact": support.exact,
            }),
        );

        // (b) R-balls of the members match the limit's from r̄ on
        let matching = matching_radius(self.seq, radius, r_max, caps.max_group_ball)?;
        let Some(r_bar) = matching.r_bar else {
            return Err(Halt::Stop(
                StepStatus::Inconclusive,
                format!("no sampled index up to {r_max} has matching {radius}-balls from there on"),
                json!({ "matches": matching.matches }),
            ));
        };
        self.report.r_bar = Some(r_bar);
        self.pass("b", format!("{radius}-balls match for every sampled r >= {r_bar}"), json!({ "r_bar": r_bar, "R": radius }));

        // (c) |w{G_r}| = m and (d) uniform bound on |(G_r)_w|
        let members = self.members(r_bar)?;
        let verbal = members
            .par_iter()
            .map(|(_, fg)| verbal_subgroup(fg, self.w, caps.max_evaluations))
            .collect::<Result<Vec<_>>>()?;
        let ms: Vec<(u64, usize)> = members.iter().zip(&verbal).map(|((r, _), (v, _))| (*r, v.len())).collect();
        if let Some(&(r, mr)) = ms.iter().find(|(_, mr)| *mr != m) {
            return Err(Halt::Stop(StepStatus::Fail, format!("|w{{G_{r}}}| = {mr}, expected {m}"), json!({ "m_r": ms })));
        }
        self.pass("c", format!("|w{{G_r}}| = {m} for r = {r_bar}..={r_max}"), json!({ "m_r": ms }));
        let orders: Vec<(u64, usize)> = members.iter().zip(&verbal).map(|((r, _), (_, c))| (*r, c.len())).collect();
        let delta = orders.iter().map(|&(_, o)| o).max().unwrap_or(1);
        self.report.delta = Some(delta);
        self.pass("d", format!("|(G_r)_w| <= {delta} for r = {r_bar}..={r_max}"), json!({ "delta": delta, "orders": orders }));

        // (e) a radius containing every (G_r)_w, and the limit's verbal
        // subgroup inside the matched ball
        let radius_e = members
            .iter()
            .zip(&verbal)
            .flat_map(|((_, fg), (_, c))| c.iter().map(|&a| fg.norm(a)))
            .fold(radius, usize::max);
        let matching_e = matching_radius(self.seq, radius_e, r_max, caps.max_group_ball)?;
        let Some(r_bar_e) = matching_e.r_bar else {
            return Err(Halt::Stop(
                StepStatus::Inconclusive,
                format!("no sampled index has matching {radius_e}-balls from there on"),
                json!({ "R_e": radius_e }),
            ));
        };
        let start = r_bar.max(r_bar_e);
        let closure = key_closure(&limit, &support.values.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(), caps)?;
        let limit_ball = build_ball(&limit, radius_e, caps.max_group_ball)?;
        let in_ball = closure
            .iter()
            .map(|u| locate_in_ball(&limit, &limit_ball.vertices, u))
            .collect::<Result<Vec<Option<usize>>>>()?;
        if let Some(pos) = in_ball.iter().position(Option::is_none) {
            return Err(Halt::Stop(
                StepStatus::Fail,
                format!("{} of the limit's verbal subgroup lies outside B({radius_e})", closure[pos]),
                json!({ "R_e": radius_e }),
            ));
        }
        let in_ball: Vec<usize> = in_ball.into_iter().flatten().collect();
        for ((r, fg), (_, c)) in members.iter().zip(&verbal) {
            if *r < start {
                continue;
            }
            if c.len() != closure.len() {
                return Err(Halt::Stop(
                    StepStatus::Fail,
                    format!("|(G_{r})_w| = {} but the limit's verbal subgroup has order {}", c.len(), closure.len()),
                    json!({ "R_e": radius_e, "r": r }),
                ));
            }
            let ball = build_ball(&self.seq.member(*r)?, radius_e, caps.max_group_ball)?;
            let Some(psi) = ball_isomorphism(&limit_ball, &ball)? else {
                return Err(Halt::Stop(StepStatus::Inconclusive, format!("{radius_e}-balls of G_{r} and the limit differ"), Value::Null));
            };
            let mut image = in_ball
                .iter()
                .map(|&v| fg.element_of(&ball.vertices[psi[v]].word))
                .collect::<Result<Vec<u32>>>()?;
            image.sort_unstable();
            if &image != c {
                return Err(Halt::Stop(
                    StepStatus::Fail,
                    format!("the ball isomorphism does not carry the limit's verbal subgroup onto (G_{r})_w"),
                    json!({ "R_e": radius_e, "r": r }),
                ));
            }
        }
        self.pass(
            "e",
            format!(
                "(G_r)_w lies in B({radius_e}); the limit's verbal subgroup has order {} and maps onto (G_r)_w for r = {start}..={r_max}",
                closure.len()
            ),
            json!({ "R_e": radius_e, "r_bar_e": start, "limit_verbal_order": closure.len() }),
        );
        Ok(())
    }
}

fn locate_in_ball(g: &MarkedGroup, vertices: &[crate::topology::BallVertex], u: &FreeWord) -> Result<Option<usize>> {
    if let Some(k) = g.normal_form(u)? {
        return Ok(vertices.iter().position(|v| v.key.as_ref() == Some(&k)));
    }
    for (i, v) in vertices.iter().enumerate() {
        if g.equal_elements(&v.word, u)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// The subgroup generated by `seeds` in a group with normal forms, as
/// representative words; fails if it exceeds `caps.max_group_ball`.
fn key_closure(g: &MarkedGroup, seeds: &[FreeWord], caps: &Caps) -> Result<Vec<FreeWord>> {
    let id = FreeWord::identity(g.rank());
    let key = |w: &FreeWord| g.element_key(w, caps.max_free_ball);
    let mut seen: HashSet<ElementKey> = HashSet::from([key(&id)?]);
    let mut elements = vec![id];
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for s in seeds {
            let next = elements[i].mul(s)?;
            if seen.insert(key(&next)?) {
                if elements.len() as u64 >= caps.max_group_ball {
                    return Err(Error::CapExceeded { what: "verbal subgroup", cap: caps.max_group_ball, radius: None });
                }
                elements.push(next);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    Ok(elements)
}

/// Replays the bounded-conciseness argument on a sequence of finite groups
/// converging to its limit: (a) a finite support of `w{G}` inside `B(R)`,
/// (b) matching `R`-balls from `r̄` on, (c) `|w{G_r}| = |w{G}|`, (d) a
/// uniform bound on `|(G_r)_w|`, and (e) the verbal subgroups inside an
/// enlarged matched ball. Caps make the report inconclusive, never a pass.
pub fn theorem_a_check(seq: &GroupSequence, w: &WordMap, cfg: &TheoremAConfig) -> Result<TheoremAReport> {
    let mut h = Harness {
        seq,
        w,
        cfg,
        report: TheoremAReport {
            schema: crate::SCHEMA,
            sequence: seq.name().to_string(),
            word: w.to_string(),
            scale: "desk",
            r_max: cfg.caps.r_max,
            verdict: Verdict::Pass,
            m: None,
            delta: None,
            radius: None,
            r_bar: None,
            steps: Vec::new(),
        },
    };
    let names = ["a", "b", "c", "d", "e"];
    match h.run() {
        Ok(()) => {}
        Err(Halt::Error(e)) => return Err(e),
        Err(Halt::Stop(status, detail, witness)) => {
            let step = names[h.report.steps.len()];
            h.report.verdict = match status {
                StepStatus::Fail => Verdict::Fail,
                StepStatus::NotMet => Verdict::HypothesisNotMet,
                _ => Verdict::Inconclusive,
            };
            h.report.steps.push(Step { step, status, detail, witness });
        }
    }
    Ok(h.report)
}
