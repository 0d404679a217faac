use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::free::{enumerate_ball, FreeWord, Letter};
use crate::marked::{ElementKey, MarkedGroup};

/// Agreement radius of two kernels. `Exact(v)`: they agree on every reduced
/// word of length `<= v` and disagree on some word of length `v + 1`.
/// `AtLeast(cap)`: no disagreement up to the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuResult {
    Exact(usize),
    AtLeast(usize),
}

impl NuResult {
    pub fn lower(self) -> usize {
        match self {
            NuResult::Exact(v) | NuResult::AtLeast(v) => v,
        }
    }

    /// `None` stands for an unbounded agreement radius.
    pub fn upper(self) -> Option<usize> {
        match self {
            NuResult::Exact(v) => Some(v),
            NuResult::AtLeast(_) => None,
        }
    }

    pub fn distance(self) -> Distance {
        Distance { nu: self }
    }
}

impl fmt::Display for NuResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NuResult::Exact(v) => write!(f, "{v}"),
            NuResult::AtLeast(c) => write!(f, ">= {c}"),
        }
    }
}

/// `d = 2^-nu`, or the bound `d <= 2^-cap` when only a lower bound on nu is
/// known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Distance {
    pub nu: NuResult,
}

impl Distance {
    pub fn is_bound(&self) -> bool {
        matches!(self.nu, NuResult::AtLeast(_))
    }

    pub fn exponent(&self) -> usize {
        self.nu.lower()
    }

    /// The exact value, or the upper bound when `is_bound`.
    pub fn value(&self) -> f64 {
        (-(self.exponent() as f64)).exp2()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nu": self.nu,
            "d": format!("2^-{}", self.exponent()),
            "bound": self.is_bound(),
        })
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bound() {
            write!(f, "<= 2^-{}", self.exponent())
        } else {
            write!(f, "2^-{}", self.exponent())
        }
    }
}

fn check_args(g: &MarkedGroup, h: &MarkedGroup, cap: usize) -> Result<()> {
    if g.rank() != h.rank() {
        return Err(Error::RankMismatch { left: g.rank(), right: h.rank() });
    }
    if cap == 0 {
        return Err(Error::InvalidArgument("nu cap must be at least 1".into()));
    }
    Ok(())
}

/// `nu(N, N')` by comparing memberships over every reduced word of length
/// `<= cap`.
pub fn nu_enumerated(g: &MarkedGroup, h: &MarkedGroup, cap: usize, max_free_ball: u64) -> Result<NuResult> {
    check_args(g, h, cap)?;
    let first_disagreement = enumerate_ball(g.rank(), cap, max_free_ball)?
        .into_iter()
        .filter(|w| g.oracle().contains(w) != h.oracle().contains(w))
        .map(|w| w.len())
        .min();
    Ok(match first_disagreement {
        Some(len) => NuResult::Exact(len - 1),
        None => NuResult::AtLeast(cap),
    })
}

/// `nu(N, N')` by breadth-first search of the diagonal Cayley graph: the
/// states are pairs `(pi(w), pi'(w))`, and the shortest word reaching a pair
/// with exactly one trivial coordinate is a shortest reduced word in the
/// symmetric difference of the kernels. Needs normal forms on both sides.
pub fn nu_diagonal(g: &MarkedGroup, h: &MarkedGroup, cap: usize, max_states: u64) -> Result<NuResult> {
    check_args(g, h, cap)?;
    let rank = g.rank();
    let id = FreeWord::identity(rank);
    let (Some(g0), Some(h0)) = (g.oracle().normal_form(&id), h.oracle().normal_form(&id)) else {
        return Err(Error::NoNormalForm(format!("{} / {}", g.name(), h.name())));
    };
    let alphabet: Vec<Letter> = Letter::alphabet(rank).collect();
    let mut seen: HashSet<(ElementKey, ElementKey)> = HashSet::new();
    seen.insert((g0.clone(), h0.clone()));
    // (g key, h key, representative word)
    let mut frontier = vec![(g0.clone(), h0.clone(), id)];
    for depth in 1..=cap {
        let mut next = Vec::new();
        for (gk, hk, w) in &frontier {
            for &l in &alphabet {
                if w.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                let gn = g.step_key(gk, w, l);
                let hn = h.step_key(hk, w, l);
                if (gn == g0) != (hn == h0) {
                    return Ok(NuResult::Exact(depth - 1));
                }
                if seen.insert((gn.clone(), hn.clone())) {
                    if seen.len() as u64 > max_states {
                        return Err(Error::CapExceeded { what: "diagonal ball", cap: max_states, radius: Some(depth - 1) });
                    }
                    next.push((gn, hn, w.push(l)));
                }
            }
        }
        if next.is_empty() {
            // the diagonal group is finite and fully explored
            break;
        }
        frontier = next;
    }
    Ok(NuResult::AtLeast(cap))
}

/// `nu(N, N')` up to `cap`: the diagonal search when both groups have normal
/// forms and it fits in `caps.max_group_ball`, free-ball enumeration
/// otherwise.
pub fn nu(g: &MarkedGroup, h: &MarkedGroup, cap: usize, caps: &Caps) -> Result<NuResult> {
    check_args(g, h, cap)?;
    if g.has_normal_form() && h.has_normal_form() {
        match nu_diagonal(g, h, cap, caps.max_group_ball) {
            Err(e) if e.is_cap() => {}
            other => return other,
        }
    }
    nu_enumerated(g, h, cap, caps.max_free_ball)
}

pub fn distance(g: &MarkedGroup, h: &MarkedGroup, cap: usize, caps: &Caps) -> Result<Distance> {
    Ok(nu(g, h, cap, caps)?.distance())
}

/// Distance between groups of possibly different ranks, padding the smaller
/// marking with identities first.
pub fn distance_any_rank(g: &MarkedGroup, h: &MarkedGroup, cap: usize, caps: &Caps) -> Result<Distance> {
    let rank = g.rank().max(h.rank());
    distance(&g.pad_to(rank)?, &h.pad_to(rank)?, cap, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marked::catalog;

    #[test]
    fn integers_vs_cyclic() {
        let caps = Caps::default();
        let z = catalog::integers().unwrap();
        for n in 2..=10u64 {
            let zn = catalog::cyclic(n).unwrap();
            assert_eq!(nu(&z, &zn, 16, &caps).unwrap(), NuResult::Exact(n as usize - 1));
            assert_eq!(nu_enumerated(&z, &zn, 16, 1000).unwrap(), NuResult::Exact(n as usize - 1));
        }
        assert_eq!(nu(&z, &z, 16, &caps).unwrap(), NuResult::AtLeast(16));
    }

    #[test]
    fn z4_vs_z2() {
        let d = distance(&catalog::cyclic(4).unwrap(), &catalog::cyclic(2).unwrap(), 8, &Caps::default()).unwrap();
        assert_eq!(d.nu, NuResult::Exact(1));
        assert_eq!(d.value(), 0.5);
        assert_eq!(d.to_string(), "2^-1");
    }

    #[test]
    fn bound_is_flagged() {
        let q = catalog::q8().unwrap();
        let d = distance(&q, &q, 10, &Caps::default()).unwrap();
        assert!(d.is_bound());
        assert_eq!(d.to_string(), "<= 2^-10");
    }

    #[test]
    fn membership_only_falls_back() {
        let caps = Caps::default();
        let a = catalog::symmetric(3).unwrap();
        let b = catalog::dihedral(3).unwrap();
        let direct = nu(&a, &b, 8, &caps).unwrap();
        let slow = nu(&a.membership_only(), &b, 8, &caps).unwrap();
        assert_eq!(direct, slow);
    }

    #[test]
    fn argument_errors() {
        let caps = Caps::default();
        let z = catalog::integers().unwrap();
        assert!(matches!(nu(&z, &catalog::q8().unwrap(), 4, &caps), Err(Error::RankMismatch { .. })));
        assert!(matches!(nu(&z, &z, 0, &caps), Err(Error::InvalidArgument(_))));
    }
}
