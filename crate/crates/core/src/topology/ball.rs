use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::Explorer;
use crate::free::{FreeWord, Letter};
use crate::marked::{ElementKey, MarkedGroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallVertex {
    /// Geodesic representative.
    pub word: FreeWord,
    pub key: Option<ElementKey>,
    pub depth: usize,
}

/// Directed edge `source -> source * s_label`, `label` 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: usize,
}

/// The radius-`R` ball of a Cayley graph, rooted at the identity (vertex 0),
/// as a generator-labelled directed graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledBall {
    pub rank: usize,
    pub radius: usize,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<Edge>,
}

/// Canonical serialization of a rooted labelled digraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallCode(Vec<u8>);

impl BallCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

/// Builds the ball by breadth-first search. Edges are kept only when both
/// endpoints lie in the ball; generators equal to the identity produce no
/// edges.
pub fn build_ball(group: &MarkedGroup, radius: usize, cap: u64) -> Result<LabeledBall> {
    let mut ex = Explorer::new(group);
    ex.grow_to(radius, cap)?;
    let rank = group.rank();
    let live: Vec<usize> = (1..=rank).filter(|&i| !group.generator_is_trivial(i)).collect();
    let mut edges = Vec::new();
    for v in 0..ex.len() {
        for &i in &live {
            if let Some(t) = ex.neighbor(v, Letter::new(i, false)) {
                edges.push(Edge { source: v, target: t, label: i });
            }
        }
    }
    let vertices = (0..ex.len())
        .map(|v| BallVertex {
            word: ex.words[v].clone(),
            key: ex.keys.get(v).cloned(),
            depth: ex.depth(v),
        })
        .collect();
    Ok(LabeledBall { rank, radius, vertices, edges })
}

impl LabeledBall {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edge counts per label, index `label - 1`.
    pub fn label_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.rank];
        for e in &self.edges {
            h[e.label - 1] += 1;
        }
        h
    }

    /// Canonical number of each vertex: breadth-first from the root, visiting
    /// for each label in order the out-neighbour and then the in-neighbour.
    /// Both are unique, so the numbering depends only on the isomorphism
    /// class of the rooted labelled graph.
    pub fn canonical_numbering(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut out = vec![vec![None; self.rank]; n];
        let mut inc = vec![vec![None; self.rank]; n];
        for e in &self.edges {
            debug_assert!(out[e.source][e.label - 1].is_none());
            out[e.source][e.label - 1] = Some(e.target);
            inc[e.target][e.label - 1] = Some(e.source);
        }
        let mut number = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        if n > 0 {
            number[0] = 0;
            next = 1;
            queue.push_back(0);
        }
        while let Some(u) = queue.pop_front() {
            for label in 0..self.rank {
                for nb in [out[u][label], inc[u][label]].into_iter().flatten() {
                    if number[nb] == usize::MAX {
                        number[nb] = next;
                        next += 1;
                        queue.push_back(nb);
                    }
                }
            }
        }
        // unreachable vertices cannot occur in a ball, but keep the map total
        for slot in number.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = next;
            next += 1;
        }
        number
    }

    pub fn canonical_code(&self) -> BallCode {
        let number = self.canonical_numbering();
        let mut edges: Vec<(u32, u32, u32)> = self
            .edges
            .iter()
            .map(|e| (number[e.source] as u32, number[e.target] as u32, e.label as u32))
            .collect();
        edges.sort_unstable();
        let mut bytes = Vec::with_capacity(16 + 12 * edges.len());
        for v in [self.rank as u32, self.radius as u32, self.vertices.len() as u32, edges.len() as u32] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        for (a, b, l) in edges {
            bytes.extend_from_slice(&a.to_le_bytes());
            bytes.extend_from_slice(&b.to_le_bytes());
            bytes.extend_from_slice(&l.to_le_bytes());
        }
        BallCode(bytes)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph ball {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", v.word);
        }
        for e in &self.edges {
            let _ = writeln!(s, "  n{} -> n{} [label=\"s{}\"];", e.source, e.target, e.label);
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": crate::SCHEMA,
            "radius": self.radius,
            "vertices": self.vertices.iter().map(|v| v.word.to_string()).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| [e.source, e.target, e.label]).collect::<Vec<_>>(),
        })
    }
}

/// Root-preserving, label-preserving isomorphism test.
pub fn balls_isomorphic(a: &LabeledBall, b: &LabeledBall) -> Result<bool> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch { left: a.rank, right: b.rank });
    }
    Ok(a.canonical_code() == b.canonical_code())
}

/// The isomorphism itself, as `map[vertex of a] = vertex of b`.
pub fn ball_isomorphism(a: &LabeledBall, b: &LabeledBall) -> Result<Option<Vec<usize>>> {
    if !balls_isomorphic(a, b)? {
        return Ok(None);
    }
    let na = a.canonical_numbering();
    let nb = b.canonical_numbering();
    let mut by_number = vec![0; nb.len()];
    for (v, &c) in nb.iter().enumerate() {
        by_number[c] = v;
    }
    Ok(Some(na.iter().map(|&c| by_number[c]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marked::catalog;

    #[test]
    fn integers_radius_two_is_a_path() {
        let b = build_ball(&catalog::integers().unwrap(), 2, 1000).unwrap();
        assert_eq!(b.vertex_count(), 5);
        assert_eq!(b.edges.len(), 4);
    }

    #[test]
    fn z6_radius_two() {
        let g = catalog::cyclic(6).unwrap();
        let b = build_ball(&g, 2, 1000).unwrap();
        let val = |v: usize| match b.vertices[v].key {
            Some(ElementKey::Int(k)) => k,
            _ => unreachable!(),
        };
        let mut verts: Vec<i64> = (0..b.vertex_count()).map(val).collect();
        verts.sort();
        assert_eq!(verts, vec![0, 1, 2, 4, 5]);
        let mut edges: Vec<(i64, i64)> = b.edges.iter().map(|e| (val(e.source), val(e.target))).collect();
        edges.sort();
        assert_eq!(edges, vec![(0, 1), (1, 2), (4, 5), (5, 0)]);
    }

    #[test]
    fn radius_zero() {
        let b = build_ball(&catalog::q8().unwrap(), 0, 10).unwrap();
        assert_eq!(b.vertex_count(), 1);
        assert!(b.edges.is_empty());
    }

    #[test]
    fn codes_path_vs_cycle() {
        let z = build_ball(&catalog::integers().unwrap(), 2, 100).unwrap();
        let z6 = build_ball(&catalog::cyclic(6).unwrap(), 2, 100).unwrap();
        let z5 = build_ball(&catalog::cyclic(5).unwrap(), 2, 100).unwrap();
        assert_eq!(z.canonical_code(), z6.canonical_code());
        assert_ne!(z.canonical_code(), z5.canonical_code());
        assert!(balls_isomorphic(&z, &z6).unwrap());
        let map = ball_isomorphism(&z, &z6).unwrap().unwrap();
        assert_eq!(map[0], 0);
    }

    #[test]
    fn rank_mismatch() {
        let a = build_ball(&catalog::integers().unwrap(), 1, 100).unwrap();
        let b = build_ball(&catalog::q8().unwrap(), 1, 100).unwrap();
        assert!(matches!(balls_isomorphic(&a, &b), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn cap_reports_radius() {
        let err = build_ball(&catalog::free(2).unwrap(), 10, 100).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { radius: Some(3), .. }), "{err}");
    }

    #[test]
    fn membership_only_ball_matches() {
        let g = catalog::group("q8 * cyclic(4)").unwrap();
        let a = build_ball(&g, 3, 1000).unwrap();
        let b = build_ball(&g.membership_only(), 3, 1000).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        assert_eq!(a.edges, b.edges);
    }

    #[test]
    fn trivial_generator_has_no_edges() {
        let b = build_ball(&catalog::cyclic(3).unwrap().pad(), 2, 100).unwrap();
        assert_eq!(b.label_histogram(), vec![3, 0]);
    }
}
