//! Marked groups: a rank together with a word-problem oracle.

pub mod catalog;
mod oracle;
mod spec;

use std::fmt;
use std::sync::Arc;

pub use oracle::{
    CyclicOracle, ElementKey, FreeOracle, GroupOracle, MembershipOracle, PaddedOracle, Perm,
    PermutationOracle, ProductOracle, TableOracle,
};
pub use spec::{load_table_csv, make_marked, parse_cycles, GroupSpec, MAX_PERM_DEGREE, VALIDATION_CAP};

use crate::error::{Error, Result};
use crate::explore::Explorer;
use crate::free::{enumerate_ball, FreeWord, Letter};

/// An `n`-marked group. The `i`-th free generator `x_i` maps to the `i`-th
/// marked generator; repeats and the identity are allowed in the marking.
#[derive(Clone)]
pub struct MarkedGroup {
    name: String,
    oracle: Arc<dyn GroupOracle>,
    spec: Option<GroupSpec>,
}

impl fmt::Debug for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedGroup").field("name", &self.name).field("rank", &self.rank()).finish()
    }
}

impl MarkedGroup {
    pub fn from_parts(name: String, oracle: Arc<dyn GroupOracle>, spec: Option<GroupSpec>) -> MarkedGroup {
        MarkedGroup { name, oracle, spec }
    }

    pub fn from_oracle(name: impl Into<String>, oracle: impl GroupOracle + 'static) -> MarkedGroup {
        MarkedGroup { name: name.into(), oracle: Arc::new(oracle), spec: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> MarkedGroup {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> Option<&GroupSpec> {
        self.spec.as_ref()
    }

    pub fn oracle(&self) -> &dyn GroupOracle {
        self.oracle.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.oracle.rank()
    }

    pub fn order(&self) -> Option<u64> {
        self.oracle.order()
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn has_normal_form(&self) -> bool {
        self.oracle.normal_form(&FreeWord::identity(self.rank())).is_some()
    }

    fn check_rank(&self, w: &FreeWord) -> Result<()> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: w.rank() });
        }
        Ok(())
    }

    /// Whether `w` lies in the kernel `N` of the marking, i.e. evaluates to
    /// the identity.
    pub fn contains(&self, w: &FreeWord) -> Result<bool> {
        self.check_rank(w)?;
        Ok(self.oracle.contains(w))
    }

    pub fn normal_form(&self, w: &FreeWord) -> Result<Option<ElementKey>> {
        self.check_rank(w)?;
        Ok(self.oracle.normal_form(w))
    }

    /// Key of `g * letter`, where `word` represents `g`.
    pub(crate) fn step_key(&self, key: &ElementKey, word: &FreeWord, letter: Letter) -> ElementKey {
        self.oracle
            .step(key, letter)
            .or_else(|| self.oracle.normal_form(&word.push(letter)))
            .expect("keyed oracle")
    }

    /// Whether the `i`-th marked generator (1-based) is the identity.
    pub fn generator_is_trivial(&self, i: usize) -> bool {
        let x = FreeWord::generator(self.rank(), i).expect("index in range");
        self.oracle.contains(&x)
    }

    pub fn equal_elements(&self, u: &FreeWord, v: &FreeWord) -> Result<bool> {
        self.check_rank(u)?;
        self.check_rank(v)?;
        if let (Some(a), Some(b)) = (self.oracle.normal_form(u), self.oracle.normal_form(v)) {
            return Ok(a == b);
        }
        Ok(self.oracle.contains(&u.mul(&v.inverse())?))
    }

    /// Stable key of the element `w` represents. Without a normal form the
    /// key is the shortlex-least word equal to `w`, found by searching the
    /// free ball of radius `|w|` (bounded by `max_free_ball`).
    pub fn element_key(&self, w: &FreeWord, max_free_ball: u64) -> Result<ElementKey> {
        self.check_rank(w)?;
        if let Some(k) = self.oracle.normal_form(w) {
            return Ok(k);
        }
        let mut best: Option<FreeWord> = None;
        for u in enumerate_ball(self.rank(), w.len(), max_free_ball)? {
            let better = match &best {
                None => true,
                Some(b) => (u.len(), u.signed()) < (b.len(), b.signed()),
            };
            if better && self.oracle.contains(&u.mul(&w.inverse())?) {
                best = Some(u);
            }
        }
        Ok(ElementKey::Word(best.expect("w itself qualifies").signed()))
    }

    /// `|g|_S`: distance from the identity in the Cayley graph over
    /// `S ∪ S^-1`.
    pub fn norm(&self, w: &FreeWord, max_ball: u64) -> Result<usize> {
        self.check_rank(w)?;
        let mut ex = Explorer::new(self);
        loop {
            if let Some(v) = ex.locate(w) {
                return Ok(ex.depth(v));
            }
            if !ex.grow(max_ball)? {
                return Err(Error::SelfCheck(format!("{w} not reached in the finite group {}", self.name)));
            }
        }
    }

    /// The same group viewed in `G_{n+1}` by appending the identity to the
    /// marking.
    pub fn pad(&self) -> MarkedGroup {
        MarkedGroup {
            name: format!("pad({})", self.name),
            oracle: Arc::new(PaddedOracle::new(self.oracle.clone())),
            spec: None,
        }
    }

    /// Pads until the rank is `rank`.
    pub fn pad_to(&self, rank: usize) -> Result<MarkedGroup> {
        if rank < self.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: rank });
        }
        let mut g = self.clone();
        while g.rank() < rank {
            g = g.pad();
        }
        Ok(g)
    }

    /// A view exposing only memoized membership.
    pub fn membership_only(&self) -> MarkedGroup {
        MarkedGroup {
            name: self.name.clone(),
            oracle: Arc::new(MembershipOracle::new(self.oracle.clone())),
            spec: None,
        }
    }
}
