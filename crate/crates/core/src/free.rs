//! Reduced words in the free group `F_n` on generators `x1..xn`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse. Stored as a nonzero signed 1-based index:
/// `+i` is `x_i`, `-i` is `x_i^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are 1-indexed");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn from_signed(value: i32) -> Option<Letter> {
        (value != 0).then_some(Letter(value))
    }

    /// 1-based generator index.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    /// The `2n` letters of rank `n` in the fixed traversal order
    /// `x1, x1^-1, x2, x2^-1, ...`.
    pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> {
        (1..=rank).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity(rank: usize) -> FreeWord {
        FreeWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, index: usize) -> Result<FreeWord> {
        if index == 0 {
            return Err(Error::LetterOutOfRange { index: 0, rank });
        }
        FreeWord::reduce(rank, [Letter::new(index, false)])
    }

    pub fn letter(rank: usize, letter: Letter) -> Result<FreeWord> {
        FreeWord::reduce(rank, [letter])
    }

    /// Freely reduces a raw letter sequence.
    pub fn reduce(rank: usize, raw: impl IntoIterator<Item = Letter>) -> Result<FreeWord> {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            if l.generator() > rank {
                return Err(Error::LetterOutOfRange { index: l.0 as i64, rank });
            }
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Ok(FreeWord { rank, letters })
    }

    /// Builds from signed indices, e.g. `[1, 2, -1]` for `x1 x2 x1^-1`.
    pub fn from_signed(rank: usize, raw: &[i32]) -> Result<FreeWord> {
        let letters = raw
            .iter()
            .map(|&v| Letter::from_signed(v).ok_or(Error::LetterOutOfRange { index: 0, rank }))
            .collect::<Result<Vec<_>>>()?;
        FreeWord::reduce(rank, letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length `|w|_X` of the reduced form.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.0).collect()
    }

    fn check_rank(&self, other: &FreeWord) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn mul(&self, other: &FreeWord) -> Result<FreeWord> {
        self.check_rank(other)?;
        let mut letters = self.letters.clone();
        let mut rest = other.letters.as_slice();
        while let (Some(&a), Some(&b)) = (letters.last(), rest.first()) {
            if a != b.inverse() {
                break;
            }
            letters.pop();
            rest = &rest[1..];
        }
        letters.extend_from_slice(rest);
        Ok(FreeWord { rank: self.rank, letters })
    }

    /// Appends a single letter, reducing at the seam.
    pub fn push(&self, letter: Letter) -> FreeWord {
        debug_assert!(letter.generator() <= self.rank);
        let mut letters = self.letters.clone();
        if letters.last() == Some(&letter.inverse()) {
            letters.pop();
        } else {
            letters.push(letter);
        }
        FreeWord { rank: self.rank, letters }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, exponent: i64) -> FreeWord {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let n = base.letters.len() * exponent.unsigned_abs() as usize;
        FreeWord::reduce(self.rank, base.letters.iter().copied().cycle().take(n)).expect("same rank")
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(a: &FreeWord, b: &FreeWord) -> Result<FreeWord> {
        a.inverse().mul(&b.inverse())?.mul(a)?.mul(b)
    }

    pub fn conjugate_by(&self, g: &FreeWord) -> Result<FreeWord> {
        g.mul(self)?.mul(&g.inverse())
    }

    /// Reinterprets the word in a larger (or equal) rank.
    pub fn widen(&self, rank: usize) -> Result<FreeWord> {
        if let Some(max) = self.max_generator() {
            if max > rank {
                return Err(Error::LetterOutOfRange { index: max as i64, rank });
            }
        }
        Ok(FreeWord { rank, letters: self.letters.clone() })
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator()).max()
    }

    /// Substitutes `args[i]` for `x_{i+1}` and reduces. All arguments must
    /// share one rank, which becomes the rank of the result.
    pub fn substitute(&self, args: &[FreeWord]) -> Result<FreeWord> {
        if args.len() != self.rank {
            return Err(Error::ArityMismatch { expected: self.rank, got: args.len() });
        }
        let target = match args.first() {
            Some(a) => a.rank,
            None => return Ok(FreeWord::identity(0)),
        };
        if let Some(bad) = args.iter().find(|a| a.rank != target) {
            return Err(Error::RankMismatch { left: target, right: bad.rank });
        }
        let inverses: Vec<FreeWord> = args.iter().map(FreeWord::inverse).collect();
        let raw = self.letters.iter().flat_map(|l| {
            let src = if l.is_inverse() { &inverses } else { args };
            src[l.generator() - 1].letters.iter().copied()
        });
        FreeWord::reduce(target, raw)
    }

    /// Removes every occurrence of `x_{generator}^{±1}`, keeping the rank.
    pub fn erase_generator(&self, generator: usize) -> FreeWord {
        FreeWord::reduce(
            self.rank,
            self.letters.iter().copied().filter(|l| l.generator() != generator),
        )
        .expect("letters already in range")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let exp = if l.is_inverse() { -(run as i64) } else { run as i64 };
            if exp == 1 {
                write!(f, "x{}", l.generator())?;
            } else {
                write!(f, "x{}^{}", l.generator(), exp)?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Number of reduced words of length at most `radius` in `F_rank`.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    if rank == 0 {
        return 1;
    }
    if rank == 1 {
        return 2 * radius as u128 + 1;
    }
    let k = 2 * rank as u128 - 1;
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * rank as u128;
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(k);
    }
    total
}

/// All reduced words of length `<= radius`, by depth-first extension of
/// reduced prefixes. Output order: length-lexicographic is not guaranteed,
/// but the order is fixed for given arguments.
pub fn enumerate_ball(rank: usize, radius: usize, max_size: u64) -> Result<Vec<FreeWord>> {
    let expected = ball_size(rank, radius);
    if expected > max_size as u128 {
        return Err(Error::CapExceeded { what: "free ball", cap: max_size, radius: None });
    }
    let mut out = Vec::with_capacity(expected as usize);
    let alphabet: Vec<Letter> = Letter::alphabet(rank).collect();
    let mut stack: Vec<Letter> = Vec::with_capacity(radius);
    fn dfs(
        rank: usize,
        radius: usize,
        alphabet: &[Letter],
        stack: &mut Vec<Letter>,
        out: &mut Vec<FreeWord>,
    ) {
        out.push(FreeWord { rank, letters: stack.clone() });
        if stack.len() == radius {
            return;
        }
        for &l in alphabet {
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            stack.push(l);
            dfs(rank, radius, alphabet, stack, out);
            stack.pop();
        }
    }
    dfs(rank, radius, &alphabet, &mut stack, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, raw: &[i32]) -> FreeWord {
        FreeWord::from_signed(rank, raw).unwrap()
    }

    #[test]
    fn reduce_cancels() {
        assert!(w(1, &[1, -1]).is_identity());
        assert_eq!(w(2, &[1, 2, -2, 1]).signed(), vec![1, 1]);
        let r = w(2, &[1, 2, -1]);
        assert_eq!(FreeWord::reduce(2, r.letters().iter().copied()).unwrap(), r);
    }

    #[test]
    fn reduce_rejects_out_of_range() {
        assert!(matches!(
            FreeWord::from_signed(2, &[3]),
            Err(Error::LetterOutOfRange { index: 3, rank: 2 })
        ));
    }

    #[test]
    fn arithmetic() {
        let x1 = w(2, &[1]);
        assert!(x1.mul(&x1.inverse()).unwrap().is_identity());
        assert_eq!(w(2, &[1, 2]).inverse().signed(), vec![-2, -1]);
        assert_eq!(w(2, &[1, 1, -2]).len(), 3);
        assert!(matches!(x1.mul(&w(3, &[1])), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn ball_examples() {
        let b = enumerate_ball(1, 2, 1000).unwrap();
        let mut s: Vec<_> = b.iter().map(|w| w.signed()).collect();
        s.sort();
        assert_eq!(s, vec![vec![], vec![-1], vec![-1, -1], vec![1], vec![1, 1]]);
        assert_eq!(enumerate_ball(2, 1, 1000).unwrap().len(), 5);
        assert_eq!(enumerate_ball(2, 2, 1000).unwrap().len(), 17);
        assert!(enumerate_ball(3, 10, 1000).unwrap_err().is_cap());
    }

    #[test]
    fn substitution() {
        let comm = FreeWord::commutator(&w(2, &[1]), &w(2, &[2])).unwrap();
        let x1 = w(2, &[1]);
        assert!(comm.substitute(&[x1.clone(), x1]).unwrap().is_identity());
        assert_eq!(w(1, &[1, 1]).substitute(&[w(2, &[2])]).unwrap().signed(), vec![2, 2]);
        assert!(matches!(comm.substitute(&[w(2, &[1])]), Err(Error::ArityMismatch { .. })));
        let gens = [w(2, &[1]), w(2, &[2])];
        assert_eq!(comm.substitute(&gens).unwrap(), comm);
    }

    #[test]
    fn display_runs() {
        assert_eq!(w(2, &[1, 1, -2]).to_string(), "x1^2*x2^-1");
        assert_eq!(FreeWord::identity(3).to_string(), "e");
        assert_eq!(w(2, &[-1, 2, 1]).to_string(), "x1^-1*x2*x1");
    }
}
