use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mgl_core::marked::catalog;
use mgl_core::topology::GroupSequence;
use mgl_core::{make_marked, GroupSpec, MarkedGroup};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

fn looks_like_file(arg: &str) -> bool {
    arg.ends_with(".json") || Path::new(arg).is_file()
}

/// Parses a JSON file straight into `T`, so errors carry line and column.
fn read_json<T: DeserializeOwned>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| path.to_string())?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{path}: {e}"))
}

/// A group argument: a JSON spec file or a catalog expression.
pub fn spec(arg: &str) -> Result<GroupSpec> {
    if looks_like_file(arg) {
        return read_json(arg);
    }
    catalog::spec(arg).with_context(|| format!("group expression {arg:?}"))
}

pub fn group(arg: &str) -> Result<(GroupSpec, MarkedGroup)> {
    let spec = spec(arg)?;
    let g = make_marked(&spec).with_context(|| arg.to_string())?;
    let g = if looks_like_file(arg) { g } else { g.with_name(arg.trim()) };
    Ok((spec, g))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    #[serde(default)]
    name: Option<String>,
    member: Value,
    #[serde(default)]
    limit: Option<GroupSpec>,
}

/// A sequence argument: a JSON file `{"name", "member", "limit"}` whose
/// member is a spec template with `"$r"`, or a catalog expression with `$r`.
/// `limit` overrides the file's limit.
pub fn sequence(arg: &str, limit: Option<&str>) -> Result<GroupSequence> {
    let limit = limit.map(spec).transpose()?;
    if looks_like_file(arg) {
        let doc: SequenceDoc = read_json(arg)?;
        let name = doc.name.unwrap_or_else(|| arg.to_string());
        GroupSpec::instantiate(&doc.member, 1).with_context(|| format!("{arg}: member template"))?;
        let seq = GroupSequence::from_template(name, doc.member, doc.limit);
        return Ok(match limit {
            Some(l) => seq.with_limit(l),
            None => seq,
        });
    }
    if !arg.contains("$r") {
        bail!("sequence expression {arg:?} has no $r placeholder");
    }
    catalog::spec(&arg.replace("$r", "1")).with_context(|| format!("sequence expression {arg:?}"))?;
    let seq = GroupSequence::from_catalog(arg, None)?;
    Ok(match limit {
        Some(l) => seq.with_limit(l),
        None => seq,
    })
}
