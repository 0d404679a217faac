//! JSON-compatible group descriptions and their validation.

use std::collections::{HashSet, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free::FreeWord;
use crate::word::parse_in_rank;

use super::oracle::{
    CyclicOracle, FreeOracle, GroupOracle, Perm, PermutationOracle, ProductOracle, TableOracle,
};
use super::MarkedGroup;

/// Permutation groups above this degree are rejected.
pub const MAX_PERM_DEGREE: usize = 32;
/// Element cap for the closure computations done while validating a spec.
pub const VALIDATION_CAP: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic {
        modulus: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marking: Option<Vec<String>>,
    },
    Table {
        order: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
        marking: Vec<usize>,
    },
    Perm {
        degree: usize,
        gens: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marking: Option<Vec<String>>,
    },
    Product {
        factors: Vec<GroupSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        marking: Option<Vec<String>>,
    },
    Free {
        rank: usize,
    },
}

impl GroupSpec {
    pub fn from_json(text: &str) -> Result<GroupSpec> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<GroupSpec> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        GroupSpec::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Fills every `"$r"` placeholder of a template with `r`. A string that
    /// is exactly `"$r"` becomes a number; other strings get textual
    /// substitution.
    pub fn instantiate(template: &serde_json::Value, r: u64) -> Result<GroupSpec> {
        fn fill(v: &serde_json::Value, r: u64) -> serde_json::Value {
            use serde_json::Value;
            match v {
                Value::String(s) if s == "$r" => Value::from(r),
                Value::String(s) => Value::String(s.replace("$r", &r.to_string())),
                Value::Array(a) => Value::Array(a.iter().map(|x| fill(x, r)).collect()),
                Value::Object(o) => {
                    Value::Object(o.iter().map(|(k, x)| (k.clone(), fill(x, r))).collect())
                }
                other => other.clone(),
            }
        }
        Ok(serde_json::from_value(fill(template, r))?)
    }

    /// Short human-readable label.
    pub fn describe(&self) -> String {
        let marking_suffix = |m: &Option<Vec<String>>| match m {
            Some(words) => format!("<{}>", words.join(",")),
            None => String::new(),
        };
        match self {
            GroupSpec::Cyclic { modulus: 0, marking } => format!("Z{}", marking_suffix(marking)),
            GroupSpec::Cyclic { modulus, marking } => format!("Z/{modulus}{}", marking_suffix(marking)),
            GroupSpec::Table { order, marking, .. } => format!("table({order})<{marking:?}>"),
            GroupSpec::Perm { degree, gens, marking } => {
                format!("perm({degree};{}){}", gens.join(","), marking_suffix(marking))
            }
            GroupSpec::Product { factors, marking } => {
                let parts: Vec<String> = factors.iter().map(|f| f.describe()).collect();
                format!("({}){}", parts.join(" x "), marking_suffix(marking))
            }
            GroupSpec::Free { rank } => format!("F{rank}"),
        }
    }

    /// Number of marked generators this spec declares.
    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::Cyclic { marking, .. } => marking.as_ref().map_or(1, Vec::len),
            GroupSpec::Table { marking, .. } => marking.len(),
            GroupSpec::Perm { gens, marking, .. } => marking.as_ref().map_or(gens.len(), Vec::len),
            GroupSpec::Product { factors, marking } => marking
                .as_ref()
                .map_or_else(|| factors.iter().map(GroupSpec::rank).sum(), Vec::len),
            GroupSpec::Free { rank } => *rank,
        }
    }
}

/// Reads a headerless CSV Cayley table.
pub fn load_table_csv(path: &Path) -> Result<Vec<Vec<usize>>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(file);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|s| s.parse::<usize>().map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn parse_marking(words: &[String], native_rank: usize) -> Result<Vec<FreeWord>> {
    if words.is_empty() {
        return Err(Error::EmptyMarking);
    }
    words.iter().map(|w| parse_in_rank(w, native_rank)).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Parses `(1,2,3)(4,5)` / `(1 2 3)` / `()` into a permutation of
/// `0..degree`.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm> {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    let mut seen = vec![false; degree];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('(') else {
            return Err(Error::InvalidSpec(format!("bad cycle notation: {text}")));
        };
        let close = body
            .find(')')
            .ok_or_else(|| Error::InvalidSpec(format!("unclosed cycle: {text}")))?;
        let points = body[..close]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                let p: usize = s.parse().map_err(|_| Error::InvalidSpec(format!("bad point '{s}' in {text}")))?;
                if p == 0 || p > degree {
                    return Err(Error::PermutationDegree { point: p, degree });
                }
                Ok(p - 1)
            })
            .collect::<Result<Vec<_>>>()?;
        for &p in &points {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSpec(format!("point {} repeated in {text}", p + 1)));
            }
        }
        for (i, &p) in points.iter().enumerate() {
            images[p] = points[(i + 1) % points.len()] as u32;
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(Perm(images))
}

fn perm_closure_order(degree: usize, gens: &[Perm]) -> Result<u64> {
    let start = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                if seen.len() as u64 > VALIDATION_CAP {
                    return Err(Error::CapExceeded { what: "permutation group order", cap: VALIDATION_CAP, radius: None });
                }
                queue.push_back(q);
            }
        }
    }
    Ok(seen.len() as u64)
}

fn validate_table(order: usize, table: &[Vec<usize>], marking: &[usize]) -> Result<Vec<Vec<u32>>> {
    if order == 0 {
        return Err(Error::InvalidSpec("order must be positive".into()));
    }
    if table.len() != order {
        return Err(Error::NotLatinSquare(format!("{} rows for order {order}", table.len())));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != order {
            return Err(Error::NotLatinSquare(format!("row {i} has {} entries", row.len())));
        }
        let mut seen = vec![false; order];
        for &v in row {
            if v >= order || std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotLatinSquare(format!("row {i} is not a permutation of 0..{order}")));
            }
        }
    }
    for j in 0..order {
        let mut seen = vec![false; order];
        for row in table {
            if std::mem::replace(&mut seen[row[j]], true) {
                return Err(Error::NotLatinSquare(format!("column {j} repeats an entry")));
            }
        }
    }
    if (0..order).any(|i| table[0][i] != i || table[i][0] != i) {
        return Err(Error::InvalidSpec("row and column 0 must be the identity".into()));
    }
    // Light's test: the elements z with (ab)z = a(bz) for all a, b form a
    // submagma containing the identity, so it suffices to test the marking
    // when right multiplication by it reaches every element.
    let mut reached = vec![false; order];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for &m in marking {
            let y = table[x][m];
            if !std::mem::replace(&mut reached[y], true) {
                stack.push(y);
            }
        }
    }
    let probes: Vec<usize> = if reached.iter().all(|&r| r) { marking.to_vec() } else { (0..order).collect() };
    for a in 0..order {
        for b in 0..order {
            let ab = table[a][b];
            for &c in &probes {
                if table[ab][c] != table[a][table[b][c]] {
                    return Err(Error::InvalidSpec(format!("table is not associative at ({a},{b},{c})")));
                }
            }
        }
    }
    Ok(table.iter().map(|r| r.iter().map(|&v| v as u32).collect()).collect())
}

/// Number of elements reachable from the identity under the marking.
fn reachable_count(oracle: &dyn GroupOracle, cap: u64) -> Result<u64> {
    let id = oracle
        .normal_form(&FreeWord::identity(oracle.rank()))
        .ok_or_else(|| Error::NoNormalForm(format!("{oracle:?}")))?;
    let letters: Vec<_> = crate::free::Letter::alphabet(oracle.rank()).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(k) = queue.pop_front() {
        for &l in &letters {
            let next = oracle.step(&k, l).expect("keyed oracle steps");
            if seen.insert(next.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::CapExceeded { what: "generation check", cap, radius: None });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen.len() as u64)
}

fn build_oracle(spec: &GroupSpec) -> Result<Arc<dyn GroupOracle>> {
    Ok(match spec {
        GroupSpec::Cyclic { modulus, marking } => {
            let words = match marking {
                Some(m) => parse_marking(m, 1)?,
                None => vec![FreeWord::generator(1, 1)?],
            };
            let values: Vec<i64> = words
                .iter()
                .map(|w| w.letters().iter().map(|l| if l.is_inverse() { -1 } else { 1 }).sum())
                .collect();
            if *modulus > 0 {
                let g = values.iter().fold(*modulus, |acc, &v| gcd(acc, v.unsigned_abs()));
                if g != 1 {
                    return Err(Error::NotGenerating { reached: modulus / g, order: *modulus });
                }
            }
            Arc::new(CyclicOracle::new(*modulus, values))
        }
        GroupSpec::Table { order, table, csv, marking } => {
            let rows = match (table, csv) {
                (Some(t), None) => t.clone(),
                (None, Some(path)) => load_table_csv(path)?,
                _ => return Err(Error::InvalidSpec("table spec needs exactly one of 'table' or 'csv'".into())),
            };
            if marking.is_empty() {
                return Err(Error::EmptyMarking);
            }
            if let Some(&bad) = marking.iter().find(|&&m| m >= *order) {
                return Err(Error::InvalidSpec(format!("marking element {bad} outside 0..{order}")));
            }
            let rows = validate_table(*order, &rows, marking)?;
            let oracle = TableOracle::new(rows, marking.iter().map(|&m| m as u32).collect());
            let reached = reachable_count(&oracle, *order as u64)?;
            if reached != *order as u64 {
                return Err(Error::NotGenerating { reached, order: *order as u64 });
            }
            Arc::new(oracle)
        }
        GroupSpec::Perm { degree, gens, marking } => {
            if *degree == 0 || *degree > MAX_PERM_DEGREE {
                return Err(Error::InvalidSpec(format!("degree must be in 1..={MAX_PERM_DEGREE}")));
            }
            if gens.is_empty() {
                return Err(Error::InvalidSpec("permutation group needs at least one generator".into()));
            }
            let native = gens.iter().map(|g| parse_cycles(g, *degree)).collect::<Result<Vec<_>>>()?;
            let native_oracle = PermutationOracle::new(*degree, native.clone(), 0);
            let marked = match marking {
                Some(m) => parse_marking(m, native.len())?
                    .iter()
                    .map(|w| native_oracle.eval(w))
                    .collect(),
                None => native.clone(),
            };
            let order = perm_closure_order(*degree, &native)?;
            let reached = perm_closure_order(*degree, &marked)?;
            if reached != order {
                return Err(Error::NotGenerating { reached, order });
            }
            Arc::new(PermutationOracle::new(*degree, marked, order))
        }
        GroupSpec::Product { factors, marking } => {
            if factors.is_empty() {
                return Err(Error::InvalidSpec("product needs at least one factor".into()));
            }
            let groups = factors.iter().map(make_marked).collect::<Result<Vec<_>>>()?;
            let total: usize = groups.iter().map(MarkedGroup::rank).sum();
            let words = match marking {
                Some(m) => parse_marking(m, total)?,
                None => (1..=total).map(|i| FreeWord::generator(total, i)).collect::<Result<_>>()?,
            };
            let oracle = ProductOracle::new(groups, words);
            if let Some(order) = oracle.order() {
                if order <= VALIDATION_CAP {
                    let reached = reachable_count(&oracle, order)?;
                    if reached != order {
                        return Err(Error::NotGenerating { reached, order });
                    }
                }
            }
            Arc::new(oracle)
        }
        GroupSpec::Free { rank } => {
            if *rank == 0 {
                return Err(Error::EmptyMarking);
            }
            Arc::new(FreeOracle::new(*rank))
        }
    })
}

fn self_check(oracle: &dyn GroupOracle) -> Result<()> {
    let rank = oracle.rank();
    if !oracle.contains(&FreeWord::identity(rank)) {
        return Err(Error::SelfCheck("identity not in the kernel".into()));
    }
    let radius = if rank <= 3 { 2 } else { 1 };
    for w in crate::free::enumerate_ball(rank, radius, 10_000)? {
        if oracle.contains(&w) != oracle.contains(&w.inverse()) {
            return Err(Error::SelfCheck(format!("kernel not closed under inverse at {w}")));
        }
    }
    Ok(())
}

/// Builds and validates a marked group from its description.
pub fn make_marked(spec: &GroupSpec) -> Result<MarkedGroup> {
    let oracle = build_oracle(spec)?;
    self_check(oracle.as_ref())?;
    Ok(MarkedGroup::from_parts(spec.describe(), oracle, Some(spec.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_auto;

    #[test]
    fn cyclic_basics() {
        let g = make_marked(&GroupSpec::Cyclic { modulus: 6, marking: None }).unwrap();
        assert_eq!(g.rank(), 1);
        assert!(!g.contains(&parse_auto("x1^5").unwrap()).unwrap());
        let z5 = make_marked(&GroupSpec::Cyclic { modulus: 5, marking: None }).unwrap();
        assert!(z5.contains(&parse_auto("x1^5").unwrap()).unwrap());
        let z = make_marked(&GroupSpec::Cyclic { modulus: 0, marking: None }).unwrap();
        assert!(!z.contains(&parse_auto("x1^5").unwrap()).unwrap());
    }

    #[test]
    fn cyclic_non_generating_marking() {
        let err = make_marked(&GroupSpec::Cyclic { modulus: 6, marking: Some(vec!["x1^2".into()]) });
        assert!(matches!(err, Err(Error::NotGenerating { reached: 3, order: 6 })));
    }

    #[test]
    fn table_validation() {
        let bad = GroupSpec::Table { order: 2, table: Some(vec![vec![0, 1], vec![1, 1]]), csv: None, marking: vec![1] };
        assert!(matches!(make_marked(&bad), Err(Error::NotLatinSquare(_))));
        let good = GroupSpec::Table { order: 2, table: Some(vec![vec![0, 1], vec![1, 0]]), csv: None, marking: vec![1] };
        assert!(make_marked(&good).is_ok());
        let empty = GroupSpec::Table { order: 2, table: Some(vec![vec![0, 1], vec![1, 0]]), csv: None, marking: vec![] };
        assert!(matches!(make_marked(&empty), Err(Error::EmptyMarking)));
    }

    #[test]
    fn non_associative_loop_is_rejected() {
        // a loop of order 5 with 1*1 = 0, so not Z/5
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        for marking in [vec![1], vec![1, 2]] {
            let spec = GroupSpec::Table { order: 5, table: Some(table.clone()), csv: None, marking };
            let err = make_marked(&spec).unwrap_err();
            assert!(err.to_string().contains("associative"), "{err}");
        }
    }

    #[test]
    fn perm_degree_mismatch() {
        let spec = GroupSpec::Perm { degree: 3, gens: vec!["(1,4)".into()], marking: None };
        assert!(matches!(make_marked(&spec), Err(Error::PermutationDegree { point: 4, degree: 3 })));
    }

    #[test]
    fn s3_commutator_cubed() {
        let spec = GroupSpec::Perm { degree: 3, gens: vec!["(1,2)".into(), "(1,2,3)".into()], marking: None };
        let g = make_marked(&spec).unwrap();
        assert!(g.contains(&parse_auto("[x1,x2]^3").unwrap()).unwrap());
        assert!(!g.contains(&parse_auto("[x1,x2]").unwrap()).unwrap());
    }

    #[test]
    fn cycles_round_trip() {
        let p = parse_cycles("(1 3)(2,4,5)", 5).unwrap();
        assert_eq!(p.to_cycles(), "(1,3)(2,4,5)");
        assert_eq!(parse_cycles("()", 3).unwrap(), Perm::identity(3));
    }

    #[test]
    fn template_instantiation() {
        let t: serde_json::Value = serde_json::json!({"kind": "cyclic", "modulus": "$r"});
        assert_eq!(GroupSpec::instantiate(&t, 7).unwrap(), GroupSpec::Cyclic { modulus: 7, marking: None });
    }

    #[test]
    fn csv_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c3.csv");
        std::fs::write(&path, "0,1,2\n1,2,0\n2,0,1\n").unwrap();
        let spec = GroupSpec::Table { order: 3, table: None, csv: Some(path), marking: vec![1] };
        let g = make_marked(&spec).unwrap();
        assert!(g.contains(&parse_auto("x1^3").unwrap()).unwrap());
    }
}
