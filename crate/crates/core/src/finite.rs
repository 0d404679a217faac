//! Fully enumerated finite marked groups with dense multiplication.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::explore::Explorer;
use crate::free::{FreeWord, Letter};
use crate::marked::{ElementKey, MarkedGroup};

/// Groups up to this order get a precomputed multiplication table.
const DENSE_TABLE_LIMIT: usize = 2048;

/// Element `0` is the identity; elements are numbered in breadth-first
/// discovery order over `S ∪ S^-1`, so index order is also norm order.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    rank: usize,
    words: Vec<FreeWord>,
    keys: Option<Vec<ElementKey>>,
    key_index: HashMap<ElementKey, u32>,
    depth: Vec<u32>,
    /// `act[a * 2rank + j]` = `a * letter_j` in `Letter::alphabet` order.
    act: Vec<u32>,
    mul: Option<Vec<u32>>,
    inv: Vec<u32>,
}

fn letter_slot(l: Letter) -> usize {
    2 * (l.generator() - 1) + l.is_inverse() as usize
}

impl FiniteGroup {
    /// Enumerates `group` completely; fails if it has more than `cap`
    /// elements.
    pub fn enumerate(group: &MarkedGroup, cap: u64) -> Result<FiniteGroup> {
        let mut ex = Explorer::new(group);
        ex.grow_all(cap)?;
        let n = ex.len();
        let rank = group.rank();
        let alphabet: Vec<Letter> = Letter::alphabet(rank).collect();
        let mut act = Vec::with_capacity(n * alphabet.len());
        for v in 0..n {
            for &l in &alphabet {
                let t = ex
                    .neighbor(v, l)
                    .ok_or_else(|| Error::SelfCheck(format!("{} not closed under multiplication", group.name())))?;
                act.push(t as u32);
            }
        }
        let depth = (0..n).map(|v| ex.depth(v) as u32).collect();
        let keys = ex.is_keyed().then(|| ex.keys.clone());
        let key_index = ex.keys.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect();
        let mut fg = FiniteGroup {
            name: group.name().to_string(),
            rank,
            words: ex.words,
            keys,
            key_index,
            depth,
            act,
            mul: None,
            inv: Vec::new(),
        };
        fg.inv = (0..n as u32).map(|a| fg.eval_word_from(0, &fg.words[a as usize].inverse())).collect();
        if n <= DENSE_TABLE_LIMIT {
            let mut mul = Vec::with_capacity(n * n);
            for a in 0..n as u32 {
                for b in 0..n {
                    mul.push(fg.eval_word_from(a, &fg.words[b]));
                }
            }
            fg.mul = Some(mul);
        }
        Ok(fg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn identity(&self) -> u32 {
        0
    }

    /// Geodesic representative word of element `a`.
    pub fn word(&self, a: u32) -> &FreeWord {
        &self.words[a as usize]
    }

    /// `|a|_S`.
    pub fn norm(&self, a: u32) -> usize {
        self.depth[a as usize] as usize
    }

    pub fn diameter(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// Canonical key of `a`; the representative word when the oracle has no
    /// normal forms.
    pub fn key(&self, a: u32) -> ElementKey {
        match &self.keys {
            Some(k) => k[a as usize].clone(),
            None => ElementKey::Word(self.words[a as usize].signed()),
        }
    }

    /// Element with the given key. Without normal forms, keys are
    /// representative words and any equal word is resolved.
    pub fn find_key(&self, key: &ElementKey) -> Option<u32> {
        match (&self.keys, key) {
            (Some(_), k) => self.key_index.get(k).copied(),
            (None, ElementKey::Word(w)) => FreeWord::from_signed(self.rank, w).ok().and_then(|w| self.element_of(&w).ok()),
            (None, _) => None,
        }
    }

    pub fn step(&self, a: u32, l: Letter) -> u32 {
        self.act[a as usize * 2 * self.rank + letter_slot(l)]
    }

    fn eval_word_from(&self, start: u32, w: &FreeWord) -> u32 {
        w.letters().iter().fold(start, |cur, &l| self.step(cur, l))
    }

    /// Element represented by a word in the marking.
    pub fn element_of(&self, w: &FreeWord) -> Result<u32> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: w.rank() });
        }
        Ok(self.eval_word_from(0, w))
    }

    /// Image of the `i`-th marked generator (1-based).
    pub fn generator(&self, i: usize) -> u32 {
        self.step(0, Letter::new(i, false))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul {
            Some(t) => t[a as usize * self.words.len() + b as usize],
            None => self.eval_word_from(a, &self.words[b as usize]),
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// `g^-1 a g`.
    pub fn conjugate(&self, a: u32, g: u32) -> u32 {
        self.mul(self.mul(self.inv(g), a), g)
    }

    /// Evaluates a word map at a tuple of elements.
    pub fn eval(&self, w: &FreeWord, args: &[u32]) -> u32 {
        debug_assert_eq!(args.len(), w.rank());
        w.letters().iter().fold(0, |cur, &l| {
            let g = args[l.generator() - 1];
            self.mul(cur, if l.is_inverse() { self.inv(g) } else { g })
        })
    }

    /// The subgroup generated by `seeds`, sorted.
    pub fn subgroup_closure(&self, seeds: &[u32]) -> Vec<u32> {
        let n = self.order();
        let mut member = vec![false; n];
        member[0] = true;
        let mut elements = vec![0u32];
        let mut gens: Vec<u32> = Vec::new();
        for &s in seeds {
            if member[s as usize] {
                continue;
            }
            gens.push(s);
            // re-close from scratch over the enlarged generating set
            let mut queue: VecDeque<u32> = elements.iter().copied().collect();
            while let Some(a) = queue.pop_front() {
                for &g in &gens {
                    let b = self.mul(a, g);
                    if !member[b as usize] {
                        member[b as usize] = true;
                        elements.push(b);
                        queue.push_back(b);
                    }
                }
            }
        }
        elements.sort_unstable();
        elements
    }

    /// Whether `set` is closed under conjugation by the marked generators
    /// (equivalently, by all of the group).
    pub fn is_normal_set(&self, set: &[u32]) -> bool {
        let mut member = vec![false; self.order()];
        for &a in set {
            member[a as usize] = true;
        }
        set.iter().all(|&a| (1..=self.rank).all(|i| member[self.conjugate(a, self.generator(i)) as usize]))
    }

    /// Closes `set` under conjugation, returning it sorted.
    pub fn conjugation_closure(&self, set: impl IntoIterator<Item = u32>) -> Vec<u32> {
        let mut seen: HashSet<u32> = HashSet::new();
        let mut queue: VecDeque<u32> = VecDeque::new();
        for a in set {
            if seen.insert(a) {
                queue.push_back(a);
            }
        }
        let gens: Vec<u32> = (1..=self.rank).map(|i| self.generator(i)).collect();
        while let Some(a) = queue.pop_front() {
            for &g in &gens {
                let b = self.conjugate(a, g);
                if seen.insert(b) {
                    queue.push_back(b);
                }
            }
        }
        let mut out: Vec<u32> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// One representative (the smallest index) of each conjugacy class.
    pub fn class_representatives(&self) -> Vec<u32> {
        let mut done = vec![false; self.order()];
        let mut reps = Vec::new();
        for a in 0..self.order() as u32 {
            if done[a as usize] {
                continue;
            }
            reps.push(a);
            for b in self.conjugation_closure([a]) {
                done[b as usize] = true;
            }
        }
        reps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marked::catalog;

    #[test]
    fn enumerate_and_multiply() {
        let g = catalog::symmetric(3).unwrap();
        let fg = FiniteGroup::enumerate(&g, 100).unwrap();
        assert_eq!(fg.order(), 6);
        for a in 0..6 {
            assert_eq!(fg.mul(a, fg.inv(a)), 0);
            for b in 0..6 {
                for c in 0..6 {
                    assert_eq!(fg.mul(fg.mul(a, b), c), fg.mul(a, fg.mul(b, c)));
                }
            }
        }
        assert_eq!(fg.class_representatives().len(), 3);
        let s = fg.generator(1);
        let t = fg.generator(2);
        assert_eq!(fg.subgroup_closure(&[t, s]).len(), 6);
        assert_eq!(fg.subgroup_closure(&[0]), vec![0]);
    }

    #[test]
    fn membership_route_agrees() {
        let g = catalog::q8().unwrap();
        let a = FiniteGroup::enumerate(&g, 100).unwrap();
        let b = FiniteGroup::enumerate(&g.membership_only(), 100).unwrap();
        assert_eq!(a.order(), b.order());
        for x in 0..8u32 {
            assert_eq!(a.word(x), b.word(x));
            for y in 0..8u32 {
                assert_eq!(a.mul(x, y), b.mul(x, y));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = catalog::symmetric(5).unwrap();
        assert!(FiniteGroup::enumerate(&g, 50).unwrap_err().is_cap());
    }
}
