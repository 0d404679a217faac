use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::free::{FreeWord, Letter};

use super::MarkedGroup;

/// Canonical identifier of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKey {
    Int(i64),
    Perm(Vec<u32>),
    Word(Vec<i32>),
    Tuple(Vec<ElementKey>),
}

/// Word-problem oracle for a marked group. Semantically this is the normal
/// subgroup `N` of the free group: `contains(w)` iff `w` evaluates to the
/// identity.
pub trait GroupOracle: Send + Sync + fmt::Debug {
    fn rank(&self) -> usize;

    fn contains(&self, w: &FreeWord) -> bool;

    /// Canonical key of the element `w` represents, when the oracle can
    /// produce one.
    fn normal_form(&self, _w: &FreeWord) -> Option<ElementKey> {
        None
    }

    /// Key of `g * letter` given the key of `g`.
    fn step(&self, _key: &ElementKey, _letter: Letter) -> Option<ElementKey> {
        None
    }

    /// Group order, when finite and known.
    fn order(&self) -> Option<u64> {
        None
    }
}

fn signed_sum(w: &FreeWord, values: &[i64]) -> i128 {
    w.letters()
        .iter()
        .map(|l| {
            let v = values[l.generator() - 1] as i128;
            if l.is_inverse() {
                -v
            } else {
                v
            }
        })
        .sum()
}

/// `Z/m` (or `Z` for `m = 0`) marked by integers.
#[derive(Debug, Clone)]
pub struct CyclicOracle {
    modulus: u64,
    marking: Vec<i64>,
}

impl CyclicOracle {
    pub fn new(modulus: u64, marking: Vec<i64>) -> CyclicOracle {
        let marking = marking.into_iter().map(|v| Self::reduce_mod(modulus, v as i128)).collect();
        CyclicOracle { modulus, marking }
    }

    fn reduce_mod(modulus: u64, v: i128) -> i64 {
        if modulus == 0 {
            v as i64
        } else {
            v.rem_euclid(modulus as i128) as i64
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn marking(&self) -> &[i64] {
        &self.marking
    }

    fn eval(&self, w: &FreeWord) -> i64 {
        Self::reduce_mod(self.modulus, signed_sum(w, &self.marking))
    }
}

impl GroupOracle for CyclicOracle {
    fn rank(&self) -> usize {
        self.marking.len()
    }
    fn contains(&self, w: &FreeWord) -> bool {
        self.eval(w) == 0
    }
    fn normal_form(&self, w: &FreeWord) -> Option<ElementKey> {
        Some(ElementKey::Int(self.eval(w)))
    }
    fn step(&self, key: &ElementKey, letter: Letter) -> Option<ElementKey> {
        let ElementKey::Int(v) = key else { return None };
        let s = self.marking[letter.generator() - 1] as i128;
        let d = if letter.is_inverse() { -s } else { s };
        Some(ElementKey::Int(Self::reduce_mod(self.modulus, *v as i128 + d)))
    }
    fn order(&self) -> Option<u64> {
        (self.modulus > 0).then_some(self.modulus)
    }
}

/// Group given by a validated Cayley table; element 0 is the identity.
#[derive(Debug, Clone)]
pub struct TableOracle {
    table: Vec<Vec<u32>>,
    inverse: Vec<u32>,
    marking: Vec<u32>,
}

impl TableOracle {
    /// `table` must already be validated.
    pub(crate) fn new(table: Vec<Vec<u32>>, marking: Vec<u32>) -> TableOracle {
        let inverse = (0..table.len())
            .map(|a| table[a].iter().position(|&p| p == 0).expect("latin row") as u32)
            .collect();
        TableOracle { table, inverse, marking }
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }

    fn apply(&self, cur: u32, l: Letter) -> u32 {
        let s = self.marking[l.generator() - 1];
        let s = if l.is_inverse() { self.inverse[s as usize] } else { s };
        self.table[cur as usize][s as usize]
    }

    fn eval(&self, w: &FreeWord) -> u32 {
        w.letters().iter().fold(0, |cur, &l| self.apply(cur, l))
    }
}

impl GroupOracle for TableOracle {
    fn rank(&self) -> usize {
        self.marking.len()
    }
    fn contains(&self, w: &FreeWord) -> bool {
        self.eval(w) == 0
    }
    fn normal_form(&self, w: &FreeWord) -> Option<ElementKey> {
        Some(ElementKey::Int(self.eval(w) as i64))
    }
    fn step(&self, key: &ElementKey, letter: Letter) -> Option<ElementKey> {
        let ElementKey::Int(v) = key else { return None };
        Some(ElementKey::Int(self.apply(*v as u32, letter) as i64))
    }
    fn order(&self) -> Option<u64> {
        Some(self.table.len() as u64)
    }
}

/// Permutation of `0..degree` acting on the right: `p * q` applies `p` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u32).collect())
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn apply_in_place(&self, buf: &mut [u32]) {
        for v in buf.iter_mut() {
            *v = self.0[*v as usize];
        }
    }

    /// Cycle notation with 1-based points, `()` for the identity.
    pub fn to_cycles(&self) -> String {
        let mut seen = vec![false; self.0.len()];
        let mut out = String::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut j = self.0[start] as usize;
            while j != start {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.0[j] as usize;
            }
            let parts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("({})", parts.join(",")));
        }
        if out.is_empty() {
            "()".to_string()
        } else {
            out
        }
    }
}

#[derive(Debug, Clone)]
pub struct PermutationOracle {
    degree: usize,
    marking: Vec<Perm>,
    inverses: Vec<Perm>,
    order: u64,
}

impl PermutationOracle {
    pub(crate) fn new(degree: usize, marking: Vec<Perm>, order: u64) -> PermutationOracle {
        let inverses = marking.iter().map(Perm::inverse).collect();
        PermutationOracle { degree, marking, inverses, order }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn marking(&self) -> &[Perm] {
        &self.marking
    }

    fn letter_perm(&self, l: Letter) -> &Perm {
        if l.is_inverse() {
            &self.inverses[l.generator() - 1]
        } else {
            &self.marking[l.generator() - 1]
        }
    }

    pub fn eval(&self, w: &FreeWord) -> Perm {
        let mut cur = Perm::identity(self.degree);
        for &l in w.letters() {
            self.letter_perm(l).apply_in_place(&mut cur.0);
        }
        cur
    }
}

impl GroupOracle for PermutationOracle {
    fn rank(&self) -> usize {
        self.marking.len()
    }
    fn contains(&self, w: &FreeWord) -> bool {
        self.eval(w).is_identity()
    }
    fn normal_form(&self, w: &FreeWord) -> Option<ElementKey> {
        Some(ElementKey::Perm(self.eval(w).0))
    }
    fn step(&self, key: &ElementKey, letter: Letter) -> Option<ElementKey> {
        let ElementKey::Perm(v) = key else { return None };
        let mut out = v.clone();
        self.letter_perm(letter).apply_in_place(&mut out);
        Some(ElementKey::Perm(out))
    }
    fn order(&self) -> Option<u64> {
        Some(self.order)
    }
}

/// Direct product of marked factors. The product marking is given by
/// words over the concatenated factor generators.
#[derive(Debug, Clone)]
pub struct ProductOracle {
    factors: Vec<MarkedGroup>,
    marking: Vec<FreeWord>,
    /// For each marking letter (index `2*(g-1) + inverse`), its expansion
    /// into (factor, local letter) steps.
    expansions: Vec<Vec<(usize, Letter)>>,
}

impl ProductOracle {
    pub(crate) fn new(factors: Vec<MarkedGroup>, marking: Vec<FreeWord>) -> ProductOracle {
        let mut offsets = Vec::with_capacity(factors.len());
        let mut total = 0;
        for f in &factors {
            offsets.push(total);
            total += f.rank();
        }
        let locate = |l: Letter| -> (usize, Letter) {
            let g = l.generator() - 1;
            let k = offsets.iter().rposition(|&o| o <= g).expect("in range");
            (k, Letter::new(g - offsets[k] + 1, l.is_inverse()))
        };
        let mut expansions = Vec::with_capacity(2 * marking.len());
        for m in &marking {
            expansions.push(m.letters().iter().map(|&l| locate(l)).collect());
            expansions.push(m.inverse().letters().iter().map(|&l| locate(l)).collect());
        }
        ProductOracle { factors, marking, expansions }
    }

    pub fn factors(&self) -> &[MarkedGroup] {
        &self.factors
    }

    fn expansion(&self, l: Letter) -> &[(usize, Letter)] {
        &self.expansions[2 * (l.generator() - 1) + l.is_inverse() as usize]
    }

    /// Projects `w` onto each factor.
    pub fn project(&self, w: &FreeWord) -> Vec<FreeWord> {
        let mut raw: Vec<Vec<Letter>> = vec![Vec::new(); self.factors.len()];
        for &l in w.letters() {
            for &(k, local) in self.expansion(l) {
                raw[k].push(local);
            }
        }
        raw.into_iter()
            .zip(&self.factors)
            .map(|(letters, f)| FreeWord::reduce(f.rank(), letters).expect("local letters in range"))
            .collect()
    }
}

impl GroupOracle for ProductOracle {
    fn rank(&self) -> usize {
        self.marking.len()
    }
    fn contains(&self, w: &FreeWord) -> bool {
        self.project(w)
            .iter()
            .zip(&self.factors)
            .all(|(p, f)| f.oracle().contains(p))
    }
    fn normal_form(&self, w: &FreeWord) -> Option<ElementKey> {
        let parts = self
            .project(w)
            .iter()
            .zip(&self.factors)
            .map(|(p, f)| f.oracle().normal_form(p))
            .collect::<Option<Vec<_>>>()?;
        Some(ElementKey::Tuple(parts))
    }
    fn step(&self, key: &ElementKey, letter: Letter) -> Option<ElementKey> {
        let ElementKey::Tuple(parts) = key else { return None };
        let mut parts = parts.clone();
        for &(k, local) in self.expansion(letter) {
            parts[k] = self.factors[k].oracle().step(&parts[k], local)?;
        }
        Some(ElementKey::Tuple(parts))
    }
    fn order(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, f| f.oracle().order().and_then(|o| acc.checked_mul(o)))
    }
}

/// The free group itself: `N = {e}`.
#[derive(Debug, Clone)]
pub struct FreeOracle {
    rank: usize,
}

impl FreeOracle {
    pub fn new(rank: usize) -> FreeOracle {
        FreeOracle { rank }
    }
}

impl GroupOracle for FreeOracle {
    fn rank(&self) -> usize {
        self.rank
    }
    fn contains(&self, w: &FreeWord) -> bool {
        w.is_identity()
    }
    fn normal_form(&self, w: &FreeWord) -> Option<ElementKey> {
        Some(ElementKey::Word(w.signed()))
    }
    fn step(&self, key: &ElementKey, letter: Letter) -> Option<ElementKey> {
        let ElementKey::Word(v) = key else { return None };
        let mut v = v.clone();
        if v.last() == Some(&-letter.signed()) {
            v.pop();
        } else {
            v.push(letter.signed());
        }
        Some(ElementKey::Word(v))
    }
}

/// Marking extended by a trailing identity generator.
#[derive(Debug, Clone)]
pub struct PaddedOracle {
    inner: Arc<dyn GroupOracle>,
}

impl PaddedOracle {
    pub fn new(inner: Arc<dyn GroupOracle>) -> PaddedOracle {
        PaddedOracle { inner }
    }

    fn erase(&self, w: &FreeWord) -> FreeWord {
        let n = self.inner.rank();
        FreeWord::reduce(n, w.letters().iter().copied().filter(|l| l.generator() <= n))
            .expect("remaining letters in range")
    }
}

impl GroupOracle for PaddedOracle {
    fn rank(&self) -> usize {
        self.inner.rank() + 1
    }
    fn contains(&self, w: &FreeWord) -> bool {
        self.inner.contains(&self.erase(w))
    }
    fn normal_form(&self, w: &FreeWord) -> Option<ElementKey> {
        self.inner.normal_form(&self.erase(w))
    }
    fn step(&self, key: &ElementKey, letter: Letter) -> Option<ElementKey> {
        if letter.generator() > self.inner.rank() {
            Some(key.clone())
        } else {
            self.inner.step(key, letter)
        }
    }
    fn order(&self) -> Option<u64> {
        self.inner.order()
    }
}

/// Hides every capability except membership, memoizing answers. Used to
/// exercise the pairwise-membership code paths.
pub struct MembershipOracle {
    inner: Arc<dyn GroupOracle>,
    memo: Mutex<HashMap<FreeWord, bool>>,
}

impl MembershipOracle {
    pub fn new(inner: Arc<dyn GroupOracle>) -> MembershipOracle {
        MembershipOracle { inner, memo: Mutex::new(HashMap::new()) }
    }
}

impl fmt::Debug for MembershipOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MembershipOracle").field("inner", &self.inner).finish()
    }
}

impl GroupOracle for MembershipOracle {
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn contains(&self, w: &FreeWord) -> bool {
        if let Some(&hit) = self.memo.lock().get(w) {
            return hit;
        }
        let answer = self.inner.contains(w);
        self.memo.lock().insert(w.clone(), answer);
        answer
    }
    fn order(&self) -> Option<u64> {
        self.inner.order()
    }
}
