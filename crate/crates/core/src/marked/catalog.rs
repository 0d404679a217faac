//! Built-in groups with default markings.
//!
//! | expression        | group                  | default marking                         |
//! |-------------------|------------------------|-----------------------------------------|
//! | `z`               | integers               | `(1)`                                   |
//! | `cyclic(n)`       | `Z/n`                  | `(1)`                                   |
//! | `dihedral(n)`     | symmetries of an n-gon | rotation `(1,..,n)`, reflection          |
//! | `symmetric(n)`    | `S_n`, n ≤ 6           | `(1,2)`, `(1,..,n)`                     |
//! | `alternating(n)`  | `A_n`, 3 ≤ n ≤ 6       | `(1,2,3)`, then `(1,..,n)` / `(2,..,n)` |
//! | `q8`              | quaternions            | `(i, j)` in the right regular action    |
//! | `free(n)`         | `F_n`                  | basis                                   |
//!
//! Products are written `a * b`; their marking concatenates the factor
//! markings. The short forms `c`, `d`, `s`, `a` are accepted too.

use crate::error::{Error, Result};

use super::{make_marked, GroupSpec, MarkedGroup};

fn cycle(points: impl IntoIterator<Item = usize>) -> String {
    let parts: Vec<String> = points.into_iter().map(|p| p.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn cyclic_spec(modulus: u64) -> GroupSpec {
    GroupSpec::Cyclic { modulus, marking: None }
}

pub fn dihedral_spec(n: usize) -> Result<GroupSpec> {
    if !(3..=crate::marked::MAX_PERM_DEGREE).contains(&n) {
        return Err(Error::InvalidSpec(format!("dihedral({n}) needs 3 <= n <= 32")));
    }
    let mut reflection = String::new();
    for i in 1..=n / 2 {
        let j = n + 1 - i;
        if i < j {
            reflection.push_str(&cycle([i, j]));
        }
    }
    Ok(GroupSpec::Perm { degree: n, gens: vec![cycle(1..=n), reflection], marking: None })
}

pub fn symmetric_spec(n: usize) -> Result<GroupSpec> {
    let gens = match n {
        2 => vec![cycle([1, 2])],
        3..=6 => vec![cycle([1, 2]), cycle(1..=n)],
        _ => return Err(Error::InvalidSpec(format!("symmetric({n}) needs 2 <= n <= 6"))),
    };
    Ok(GroupSpec::Perm { degree: n, gens, marking: None })
}

pub fn alternating_spec(n: usize) -> Result<GroupSpec> {
    let gens = match n {
        3 => vec![cycle([1, 2, 3])],
        4..=6 if n % 2 == 1 => vec![cycle([1, 2, 3]), cycle(1..=n)],
        4..=6 => vec![cycle([1, 2, 3]), cycle(2..=n)],
        _ => return Err(Error::InvalidSpec(format!("alternating({n}) needs 3 <= n <= 6"))),
    };
    Ok(GroupSpec::Perm { degree: n, gens, marking: None })
}

/// Quaternion units are indexed `1, i, j, k, -1, -i, -j, -k` as points
/// `1..=8`; the generators act by right multiplication.
pub fn q8_spec() -> GroupSpec {
    // unit products u*v = sign * unit, units 0=1, 1=i, 2=j, 3=k
    const UNIT: [[(i8, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    let mul = |a: usize, b: usize| -> usize {
        let (sa, ua) = (if a < 4 { 1 } else { -1 }, a % 4);
        let (sb, ub) = (if b < 4 { 1 } else { -1 }, b % 4);
        let (s, u) = UNIT[ua][ub];
        let sign = sa * sb * s as i32;
        if sign > 0 {
            u
        } else {
            u + 4
        }
    };
    let regular = |g: usize| -> String {
        let images: Vec<u32> = (0..8).map(|x| mul(x, g) as u32).collect();
        super::Perm(images).to_cycles()
    };
    GroupSpec::Perm { degree: 8, gens: vec![regular(1), regular(2)], marking: None }
}

pub fn product_spec(factors: Vec<GroupSpec>) -> GroupSpec {
    GroupSpec::Product { factors, marking: None }
}

fn named(spec: &GroupSpec, name: String) -> Result<MarkedGroup> {
    Ok(make_marked(spec)?.with_name(name))
}

pub fn integers() -> Result<MarkedGroup> {
    named(&cyclic_spec(0), "Z".into())
}

pub fn cyclic(n: u64) -> Result<MarkedGroup> {
    named(&cyclic_spec(n), if n == 0 { "Z".into() } else { format!("Z/{n}") })
}

pub fn dihedral(n: usize) -> Result<MarkedGroup> {
    named(&dihedral_spec(n)?, format!("D{n}"))
}

pub fn symmetric(n: usize) -> Result<MarkedGroup> {
    named(&symmetric_spec(n)?, format!("S{n}"))
}

pub fn alternating(n: usize) -> Result<MarkedGroup> {
    named(&alternating_spec(n)?, format!("A{n}"))
}

pub fn q8() -> Result<MarkedGroup> {
    named(&q8_spec(), "Q8".into())
}

pub fn free(rank: usize) -> Result<MarkedGroup> {
    named(&GroupSpec::Free { rank }, format!("F{rank}"))
}

/// Parses a catalog expression such as `q8 * cyclic(5)` into a spec.
pub fn spec(expr: &str) -> Result<GroupSpec> {
    let terms: Vec<&str> = expr.split('*').map(str::trim).collect();
    let mut specs = terms.iter().map(|t| term_spec(t)).collect::<Result<Vec<_>>>()?;
    Ok(if specs.len() == 1 { specs.pop().unwrap() } else { product_spec(specs) })
}

/// Builds a catalog expression, naming the group after the expression.
pub fn group(expr: &str) -> Result<MarkedGroup> {
    named(&spec(expr)?, expr.trim().to_string())
}

fn term_spec(term: &str) -> Result<GroupSpec> {
    let lower = term.to_ascii_lowercase();
    match lower.as_str() {
        "z" => return Ok(cyclic_spec(0)),
        "q8" => return Ok(q8_spec()),
        _ => {}
    }
    let bad = || Error::InvalidSpec(format!("unknown catalog term '{term}'"));
    let open = lower.find('(').ok_or_else(bad)?;
    let inner = lower[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let n: u64 = inner.trim().parse().map_err(|_| bad())?;
    match &lower[..open] {
        "cyclic" | "c" => Ok(cyclic_spec(n)),
        "dihedral" | "d" => dihedral_spec(n as usize),
        "symmetric" | "s" => symmetric_spec(n as usize),
        "alternating" | "a" => alternating_spec(n as usize),
        "free" | "f" => Ok(GroupSpec::Free { rank: n as usize }),
        _ => Err(bad()),
    }
}

/// The finite part of the catalog used by property sweeps, as
/// `(expression, spec)` pairs in a fixed order.
pub fn finite_catalog() -> Vec<(String, GroupSpec)> {
    let mut exprs: Vec<String> = Vec::new();
    exprs.extend((1..=12).map(|n| format!("cyclic({n})")));
    exprs.extend((3..=8).map(|n| format!("dihedral({n})")));
    exprs.extend((2..=6).map(|n| format!("symmetric({n})")));
    exprs.extend((3..=6).map(|n| format!("alternating({n})")));
    exprs.push("q8".into());
    for p in [
        "cyclic(2) * cyclic(2)",
        "cyclic(2) * cyclic(4)",
        "cyclic(3) * cyclic(3)",
        "symmetric(3) * cyclic(2)",
        "q8 * cyclic(2)",
        "q8 * cyclic(3)",
        "dihedral(4) * cyclic(3)",
        "alternating(4) * cyclic(2)",
    ] {
        exprs.push(p.into());
    }
    exprs
        .into_iter()
        .map(|e| {
            let s = spec(&e).expect("catalog expression");
            (e, s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{parse_auto, parse_in_rank};

    #[test]
    fn orders() {
        assert_eq!(q8().unwrap().order(), Some(8));
        assert_eq!(symmetric(4).unwrap().order(), Some(24));
        assert_eq!(alternating(5).unwrap().order(), Some(60));
        assert_eq!(alternating(6).unwrap().order(), Some(360));
        assert_eq!(dihedral(5).unwrap().order(), Some(10));
        assert_eq!(group("q8 * cyclic(5)").unwrap().order(), Some(40));
        assert_eq!(group("q8 * z").unwrap().order(), None);
    }

    #[test]
    fn q8_relations() {
        let g = q8().unwrap();
        // [i,j] = -1, so its square is trivial but it is not
        assert!(!g.contains(&parse_auto("[x1,x2]").unwrap()).unwrap());
        assert!(g.contains(&parse_auto("[x1,x2]^2").unwrap()).unwrap());
        assert!(g.contains(&parse_in_rank("x1^4", 2).unwrap()).unwrap());
        let i2 = parse_auto("x1^2*x2^0").unwrap().widen(2).unwrap();
        let j2 = parse_auto("x2^2").unwrap();
        assert!(g.equal_elements(&i2, &j2).unwrap());
        let comm = parse_auto("[x1,x2]").unwrap();
        assert!(g.equal_elements(&comm, &j2).unwrap());
    }

    #[test]
    fn catalog_is_valid() {
        for (e, s) in finite_catalog() {
            let g = make_marked(&s).unwrap_or_else(|err| panic!("{e}: {err}"));
            assert!(g.is_finite(), "{e}");
        }
        assert!(spec("banana(3)").is_err());
        assert!(symmetric_spec(7).is_err());
    }
}
