//! Sequences of marked groups and the three equivalent convergence
//! conditions, checked on sampled indices `1..=r_max`.

use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::free::FreeWord;
use crate::marked::{catalog, make_marked, GroupSpec, MarkedGroup};

use super::ball::{build_ball, LabeledBall};
use super::nu::{nu, NuResult};

#[derive(Clone, Debug)]
enum Template {
    Json(serde_json::Value),
    Catalog(String),
}

/// Indexed family `r -> (G_r, S_r)`, `r >= 1`, with an optional candidate
/// limit. Members are built on demand from a template carrying `$r`.
#[derive(Clone, Debug)]
pub struct GroupSequence {
    name: String,
    template: Template,
    limit: Option<GroupSpec>,
}

impl GroupSequence {
    /// From a JSON `GroupSpec` template with `"$r"` placeholders.
    pub fn from_template(name: impl Into<String>, template: serde_json::Value, limit: Option<GroupSpec>) -> GroupSequence {
        GroupSequence { name: name.into(), template: Template::Json(template), limit }
    }

    /// From catalog expressions, e.g. `("q8 * cyclic($r)", "q8 * z")`.
    pub fn from_catalog(member: &str, limit: Option<&str>) -> Result<GroupSequence> {
        let limit = limit.map(catalog::spec).transpose()?;
        let name = match &limit {
            Some(_) => format!("{member} -> {}", limit_expr(limit.as_ref())),
            None => member.to_string(),
        };
        Ok(GroupSequence { name, template: Template::Catalog(member.to_string()), limit })
    }

    /// The constant sequence at `spec`, converging to itself.
    pub fn constant(spec: GroupSpec) -> GroupSequence {
        let template = serde_json::to_value(&spec).expect("spec serializes");
        GroupSequence { name: format!("const {}", spec.describe()), template: Template::Json(template), limit: Some(spec) }
    }

    /// Replaces the candidate limit.
    pub fn with_limit(mut self, limit: GroupSpec) -> GroupSequence {
        if let Template::Catalog(expr) = &self.template {
            self.name = format!("{expr} -> {}", limit.describe());
        }
        self.limit = Some(limit);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn member_spec(&self, r: u64) -> Result<GroupSpec> {
        match &self.template {
            Template::Json(v) => GroupSpec::instantiate(v, r),
            Template::Catalog(expr) => catalog::spec(&expr.replace("$r", &r.to_string())),
        }
    }

    pub fn member(&self, r: u64) -> Result<MarkedGroup> {
        let g = make_marked(&self.member_spec(r)?)?;
        let g = match &self.template {
            Template::Catalog(expr) => g.with_name(expr.replace("$r", &r.to_string())),
            Template::Json(_) => g,
        };
        if let Some(limit) = &self.limit {
            if limit.rank() != g.rank() {
                return Err(Error::RankMismatch { left: limit.rank(), right: g.rank() });
            }
        }
        Ok(g)
    }

    pub fn limit_spec(&self) -> Option<&GroupSpec> {
        self.limit.as_ref()
    }

    pub fn limit(&self) -> Result<MarkedGroup> {
        let spec = self.limit.as_ref().ok_or(Error::NoLimit)?;
        Ok(make_marked(spec)?.with_name(format!("limit {}", spec.describe())))
    }

    /// Members `1..=r_max`, built in parallel, in index order.
    pub fn members(&self, r_max: u64) -> Result<Vec<MarkedGroup>> {
        (1..=r_max).into_par_iter().map(|r| self.member(r)).collect()
    }
}

fn limit_expr(spec: Option<&GroupSpec>) -> String {
    spec.map(GroupSpec::describe).unwrap_or_default()
}

/// Least `r̄` such that `agrees[r-1]` holds for every sampled `r >= r̄`.
fn tail_start(agrees: &[bool]) -> Option<u64> {
    let bad = agrees.iter().rposition(|&ok| !ok);
    match bad {
        None if agrees.is_empty() => None,
        None => Some(1),
        Some(i) if i + 1 == agrees.len() => None,
        Some(i) => Some(i as u64 + 2),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub word: String,
    pub in_limit: bool,
    /// Membership in `N_r` for `r = 1..=r_max`.
    pub memberships: Vec<bool>,
    /// Least index from which membership agrees with the limit on every
    /// sampled index; `None` if the last sample disagrees.
    pub r_bar: Option<u64>,
    pub r_max: u64,
}

/// Condition (2): eventual agreement of `w ∈ N_r` with `w ∈ N`.
pub fn eventual_membership(seq: &GroupSequence, w: &FreeWord, r_max: u64) -> Result<MembershipReport> {
    let limit = seq.limit()?;
    let in_limit = limit.contains(w)?;
    let memberships = (1..=r_max)
        .into_par_iter()
        .map(|r| seq.member(r)?.contains(w))
        .collect::<Result<Vec<_>>>()?;
    let agrees: Vec<bool> = memberships.iter().map(|&m| m == in_limit).collect();
    Ok(MembershipReport { word: w.to_string(), in_limit, r_bar: tail_start(&agrees), memberships, r_max })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingReport {
    pub radius: usize,
    /// Whether the `R`-ball of `G_r` is isomorphic to the limit's.
    pub matches: Vec<bool>,
    pub r_bar: Option<u64>,
    pub r_max: u64,
}

/// Condition (3): eventual isomorphism of `R`-balls with the limit's.
pub fn matching_radius(seq: &GroupSequence, radius: usize, r_max: u64, cap: u64) -> Result<MatchingReport> {
    let limit_ball = build_ball(&seq.limit()?, radius, cap)?;
    let code = limit_ball.canonical_code();
    let matches = (1..=r_max)
        .into_par_iter()
        .map(|r| Ok(build_ball(&seq.member(r)?, radius, cap)?.canonical_code() == code))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatchingReport { radius, r_bar: tail_start(&matches), matches, r_max })
}

/// Member balls for `r = 1..=r_max`, in index order.
pub fn member_balls(seq: &GroupSequence, radius: usize, r_max: u64, cap: u64) -> Result<Vec<LabeledBall>> {
    (1..=r_max)
        .into_par_iter()
        .map(|r| build_ball(&seq.member(r)?, radius, cap))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub cap: usize,
    /// `nu(N, N_r)` for `r = 1..=r_max`.
    pub nu: Vec<NuResult>,
    /// Least index from which every sampled `nu` reaches the cap.
    pub r_bar: Option<u64>,
    /// True when some `r̄` exists with `nu >= cap` on all sampled `r >= r̄`;
    /// this is agreement with convergence at cap resolution, not a proof.
    pub consistent: bool,
    pub r_max: u64,
}

/// Condition (1): the table `r -> nu(N, N_r)`.
pub fn verify_convergence(seq: &GroupSequence, cap: usize, r_max: u64, caps: &Caps) -> Result<ConvergenceReport> {
    let limit = seq.limit()?;
    let values = (1..=r_max)
        .into_par_iter()
        .map(|r| nu(&limit, &seq.member(r)?, cap, caps))
        .collect::<Result<Vec<_>>>()?;
    let reached: Vec<bool> = values.iter().map(|v| v.lower() >= cap).collect();
    let r_bar = tail_start(&reached);
    Ok(ConvergenceReport { cap, nu: values, r_bar, consistent: r_bar.is_some(), r_max })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreeConditions {
    pub sequence: String,
    pub metric: ConvergenceReport,
    pub membership: Vec<MembershipReport>,
    pub balls: Vec<MatchingReport>,
    /// All three conditions hold on the sampled data.
    pub consistent: bool,
}

/// Runs all three conditions on the same data: nu up to `caps.nu_cap`,
/// membership of every reduced word of length `<= word_radius`, and ball
/// matching for `R = 0..=max_radius`.
pub fn three_conditions(seq: &GroupSequence, word_radius: usize, max_radius: usize, caps: &Caps) -> Result<ThreeConditions> {
    let metric = verify_convergence(seq, caps.nu_cap, caps.r_max, caps)?;
    let limit = seq.limit()?;
    let words = crate::free::enumerate_ball(limit.rank(), word_radius, caps.max_free_ball)?;
    let membership = words
        .iter()
        .map(|w| eventual_membership(seq, w, caps.r_max))
        .collect::<Result<Vec<_>>>()?;
    let balls = (0..=max_radius)
        .map(|r| matching_radius(seq, r, caps.r_max, caps.max_group_ball))
        .collect::<Result<Vec<_>>>()?;
    let consistent = metric.consistent
        && membership.iter().all(|m| m.r_bar.is_some())
        && balls.iter().all(|b| b.r_bar.is_some());
    Ok(ThreeConditions { sequence: seq.name().to_string(), metric, membership, balls, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_auto;

    fn zr() -> GroupSequence {
        GroupSequence::from_catalog("cyclic($r)", Some("z")).unwrap()
    }

    #[test]
    fn tail_start_cases() {
        assert_eq!(tail_start(&[true, true]), Some(1));
        assert_eq!(tail_start(&[false, true, false, true, true]), Some(4));
        assert_eq!(tail_start(&[true, false]), None);
        assert_eq!(tail_start(&[]), None);
    }

    #[test]
    fn membership_of_cube() {
        let rep = eventual_membership(&zr(), &parse_auto("x1^3").unwrap(), 20).unwrap();
        assert!(!rep.in_limit);
        assert_eq!(rep.r_bar, Some(4));
        let rep = eventual_membership(&zr(), &FreeWord::identity(1), 20).unwrap();
        assert!(rep.in_limit);
        assert_eq!(rep.r_bar, Some(1));
    }

    #[test]
    fn constant_sequence() {
        let seq = GroupSequence::constant(catalog::q8_spec());
        let w = parse_auto("[x1,x2]").unwrap();
        assert_eq!(eventual_membership(&seq, &w, 5).unwrap().r_bar, Some(1));
        assert_eq!(matching_radius(&seq, 3, 5, 1000).unwrap().r_bar, Some(1));
        let conv = verify_convergence(&seq, 8, 5, &Caps::default()).unwrap();
        assert!(conv.nu.iter().all(|v| *v == NuResult::AtLeast(8)));
        assert!(conv.consistent);
    }

    #[test]
    fn matching_radius_for_cyclic() {
        assert_eq!(matching_radius(&zr(), 2, 30, 1000).unwrap().r_bar, Some(6));
        assert_eq!(matching_radius(&zr(), 0, 30, 1000).unwrap().r_bar, Some(1));
    }

    #[test]
    fn convergence_table() {
        let rep = verify_convergence(&zr(), 16, 30, &Caps::default()).unwrap();
        for (i, v) in rep.nu.iter().enumerate() {
            let r = i + 1;
            if r <= 16 {
                assert_eq!(*v, NuResult::Exact(r - 1));
            } else {
                assert_eq!(*v, NuResult::AtLeast(16));
            }
        }
        assert!(rep.consistent);
        assert_eq!(rep.r_bar, Some(17));
    }

    #[test]
    fn wrong_limit_is_not_consistent() {
        let seq = GroupSequence::from_catalog("cyclic($r)", Some("cyclic(5)")).unwrap();
        let rep = verify_convergence(&seq, 16, 30, &Caps::default()).unwrap();
        assert!(!rep.consistent);
        assert_eq!(rep.nu[9], NuResult::Exact(4));
        assert_eq!(rep.nu[4], NuResult::AtLeast(16));
    }

    #[test]
    fn no_limit() {
        let seq = GroupSequence::from_catalog("cyclic($r)", None).unwrap();
        assert!(matches!(eventual_membership(&seq, &parse_auto("x1").unwrap(), 3), Err(Error::NoLimit)));
    }
}
