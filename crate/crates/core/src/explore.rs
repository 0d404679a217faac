//! Breadth-first exploration of a marked group from the identity, over
//! `S ∪ S^-1`. Elements are identified by normal-form keys when the oracle
//! has them, and by pairwise membership tests otherwise.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::free::{FreeWord, Letter};
use crate::marked::{ElementKey, MarkedGroup};

pub(crate) struct Explorer<'g> {
    group: &'g MarkedGroup,
    keyed: bool,
    alphabet: Vec<Letter>,
    /// Geodesic representative of each vertex, in discovery order.
    pub words: Vec<FreeWord>,
    pub keys: Vec<ElementKey>,
    /// `layers[d]..layers[d+1]` are the vertices at distance `d`.
    layers: Vec<usize>,
    index: HashMap<ElementKey, usize>,
    exhausted: bool,
}

impl<'g> Explorer<'g> {
    pub fn new(group: &'g MarkedGroup) -> Explorer<'g> {
        let rank = group.rank();
        let id = FreeWord::identity(rank);
        let root_key = group.oracle().normal_form(&id);
        let keyed = root_key.is_some();
        let mut index = HashMap::new();
        let mut keys = Vec::new();
        if let Some(k) = root_key {
            index.insert(k.clone(), 0);
            keys.push(k);
        }
        Explorer {
            group,
            keyed,
            alphabet: Letter::alphabet(rank).collect(),
            words: vec![id],
            keys,
            layers: vec![0, 1],
            index,
            exhausted: false,
        }
    }

    pub fn is_keyed(&self) -> bool {
        self.keyed
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Radius of the fully explored ball.
    pub fn radius(&self) -> usize {
        self.layers.len() - 2
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn depth(&self, v: usize) -> usize {
        self.layers.partition_point(|&start| start <= v) - 1
    }

    pub fn layer(&self, d: usize) -> std::ops::Range<usize> {
        self.layers[d]..self.layers[d + 1]
    }

    fn same_element(&self, a: &FreeWord, b: &FreeWord) -> bool {
        self.group
            .oracle()
            .contains(&a.mul(&b.inverse()).expect("same rank"))
    }

    /// Index of the vertex equal to `word` among vertices with depth in
    /// `lo..=hi` (clamped to what has been explored).
    fn scan(&self, word: &FreeWord, lo: usize, hi: usize) -> Option<usize> {
        let hi = hi.min(self.layers.len() - 2);
        if lo > hi {
            return None;
        }
        let range = self.layers[lo]..self.layers[hi + 1].min(self.words.len());
        range.into_iter().find(|&v| self.same_element(&self.words[v], word))
    }

    /// Neighbour `v * letter` if it is already a vertex.
    pub fn neighbor(&self, v: usize, letter: Letter) -> Option<usize> {
        if self.keyed {
            let k = self.group.step_key(&self.keys[v], &self.words[v], letter);
            self.index.get(&k).copied()
        } else {
            let d = self.depth(v);
            let w = self.words[v].push(letter);
            self.scan(&w, d.saturating_sub(1), d + 1)
        }
    }

    /// Locates an arbitrary element among explored vertices.
    pub fn locate(&self, word: &FreeWord) -> Option<usize> {
        if self.keyed {
            let k = self.group.oracle().normal_form(word)?;
            self.index.get(&k).copied()
        } else {
            self.scan(word, 0, usize::MAX)
        }
    }

    /// Adds the next sphere. Returns `false` when it is empty, i.e. the whole
    /// (finite) group has been explored.
    pub fn grow(&mut self, cap: u64) -> Result<bool> {
        if self.exhausted {
            return Ok(false);
        }
        let d = self.radius();
        let frontier = self.layer(d);
        for v in frontier {
            for i in 0..self.alphabet.len() {
                let letter = self.alphabet[i];
                // the geodesic parent is never new
                if self.words[v].letters().last() == Some(&letter.inverse()) {
                    continue;
                }
                let word = self.words[v].push(letter);
                if self.keyed {
                    let key = self.group.step_key(&self.keys[v], &self.words[v], letter);
                    if self.index.contains_key(&key) {
                        continue;
                    }
                    self.index.insert(key.clone(), self.words.len());
                    self.keys.push(key);
                } else {
                    let lo = d.saturating_sub(1);
                    let existing = (self.layers[lo]..self.words.len())
                        .any(|u| self.same_element(&self.words[u], &word));
                    if existing {
                        continue;
                    }
                }
                self.words.push(word);
                if self.words.len() as u64 > cap {
                    return Err(Error::CapExceeded { what: "group ball", cap, radius: Some(d) });
                }
            }
        }
        let grew = self.words.len() > self.layers[d + 1];
        if grew {
            self.layers.push(self.words.len());
        } else {
            self.exhausted = true;
        }
        Ok(grew)
    }

    /// Explores until the ball of `radius` is complete (or the group is).
    pub fn grow_to(&mut self, radius: usize, cap: u64) -> Result<()> {
        while self.radius() < radius && self.grow(cap)? {}
        Ok(())
    }

    pub fn grow_all(&mut self, cap: u64) -> Result<()> {
        while self.grow(cap)? {}
        Ok(())
    }
}
