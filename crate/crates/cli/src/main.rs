mod config;
mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mgl_core::lef::{check_lef_witness, lef_witness_from_limit, LefWitness, Provenance};
use mgl_core::marked::catalog;
use mgl_core::topology::{build_ball, distance_any_rank, three_conditions};
use mgl_core::verbal::{
    conciseness_record, delta_profile, theorem_a_check, w_values, w_values_sampled, TheoremAConfig, Verdict, WordMap,
};
use mgl_core::word::parse_in_rank;
use mgl_core::{ElementKey, FiniteGroup, MarkedGroup, SCHEMA};
use serde_json::{json, Value};

use config::{ExperimentConfig, Format};

const EXIT_USAGE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_FAIL: u8 = 3;

#[derive(Parser)]
#[command(name = "mgl", version, about = "Marked groups: distances, Cayley balls, word maps and LEF witnesses")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// JSON config file; flags given on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Do not read or write the ball cache
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_free_ball: Option<u64>,
    #[arg(long, global = true)]
    max_group_ball: Option<u64>,
    #[arg(long, global = true)]
    max_evaluations: Option<u64>,
    /// Last sequence index sampled
    #[arg(long, global = true)]
    rmax: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Cayley ball of radius R
    Ball {
        group: String,
        radius: usize,
        /// Graphviz output
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Agreement radius nu and distance d = 2^-nu
    Distance {
        a: String,
        b: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Metric, membership and ball-matching conditions along a sequence
    Converge {
        /// Catalog expression with $r, or a JSON sequence file
        sequence: String,
        #[arg(long)]
        limit: Option<String>,
        #[arg(long)]
        cap: Option<usize>,
        /// Words of length up to this radius are tracked for eventual membership
        #[arg(long, default_value_t = 4)]
        word_radius: usize,
        /// Balls of radius 0..=this are matched
        #[arg(long, default_value_t = 3)]
        ball_radius: usize,
    },
    /// Value set w{G}
    Wvalues {
        group: String,
        word: String,
        #[arg(long, conflicts_with = "sample")]
        exhaustive: bool,
        /// Evaluate at most N tuples drawn from a Cayley ball
        #[arg(long, value_name = "N")]
        sample: Option<u64>,
        /// Ball radius for sampling
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// |w{G}| and |G_w| for a finite group
    Concise { group: String, word: String },
    /// Observed bound delta(m) over a family
    Delta {
        word: String,
        /// Members of the family
        groups: Vec<String>,
        /// Family given as a catalog template with $r, taken for r = 1..=rmax
        #[arg(long)]
        template: Option<String>,
        /// JSON list of catalog expressions or specs
        #[arg(long)]
        family_file: Option<PathBuf>,
    },
    /// Step-by-step check of the bounded-verbal-subgroup argument on a sequence
    TheoremA {
        sequence: String,
        word: String,
        #[arg(long)]
        limit: Option<String>,
        #[arg(long)]
        support_radius: Option<usize>,
    },
    /// Construct a LEF witness from a convergent sequence, or verify one
    Lef {
        sequence: Option<String>,
        /// Words of the finite subset F
        words: Vec<String>,
        #[arg(long)]
        limit: Option<String>,
        /// Witness file to verify
        #[arg(long, value_name = "WITNESS", conflicts_with_all = ["sequence", "limit"])]
        verify: Option<PathBuf>,
        /// Subject group for --verify, overriding the one named in the witness
        #[arg(long, requires = "verify")]
        group: Option<String>,
        /// Write the witness here instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

struct Outcome {
    text: String,
    json: Value,
    code: u8,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Outcome {
        Outcome { text, json, code: 0 }
    }
}

fn settings(g: &GlobalOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if g.json {
        cfg.format = Format::Json;
    }
    if g.no_cache {
        cfg.cache = false;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    let c = &mut cfg.caps;
    c.max_free_ball = g.max_free_ball.unwrap_or(c.max_free_ball);
    c.max_group_ball = g.max_group_ball.unwrap_or(c.max_group_ball);
    c.max_evaluations = g.max_evaluations.unwrap_or(c.max_evaluations);
    c.r_max = g.rmax.unwrap_or(c.r_max);
    cfg.validate()?;
    Ok(cfg)
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

fn word_map(text: &str) -> Result<WordMap> {
    WordMap::parse(text).with_context(|| format!("word {text:?}"))
}

fn cmd_ball(cfg: &ExperimentConfig, group: &str, radius: usize, dot: bool) -> Result<Outcome> {
    let (spec, g) = input::group(group)?;
    let cap = cfg.caps.max_group_ball;
    let ball = match cfg.ball_cache() {
        Some(cache) => cache.ball(&spec, radius, cap)?,
        None => build_ball(&g, radius, cap)?,
    };
    let code = ball.canonical_code().to_hex();
    let text = if dot {
        ball.to_dot()
    } else {
        format!(
            "group {}\nradius {}\nvertices {}\nedges {}\ncode {}\n",
            g.name(),
            radius,
            ball.vertex_count(),
            ball.edges.len(),
            code
        )
    };
    let mut json = ball.to_json();
    json["group"] = json!(g.name());
    json["code"] = json!(code);
    Ok(Outcome::ok(text, json))
}

fn cmd_distance(cfg: &ExperimentConfig, a: &str, b: &str, cap: Option<usize>) -> Result<Outcome> {
    let (_, g) = input::group(a)?;
    let (_, h) = input::group(b)?;
    let cap = cap.unwrap_or(cfg.caps.nu_cap);
    let d = distance_any_rank(&g, &h, cap, &cfg.caps)?;
    let text = if d.is_bound() {
        format!("nu >= {}\nd <= 2^-{} (bound at cap {cap})\n", d.exponent(), d.exponent())
    } else {
        format!("nu = {}\nd = {d}\n", d.exponent())
    };
    let mut json = with_schema(d.to_json());
    json["cap"] = json!(cap);
    Ok(Outcome::ok(text, json))
}

fn cmd_converge(cfg: &ExperimentConfig, seq: &str, limit: Option<&str>, cap: Option<usize>, wr: usize, br: usize) -> Result<Outcome> {
    let seq = input::sequence(seq, limit)?;
    let mut caps = cfg.caps;
    caps.nu_cap = cap.unwrap_or(caps.nu_cap);
    let rep = three_conditions(&seq, wr, br, &caps)?;
    let show = |r: Option<u64>| r.map_or("none".to_string(), |r| r.to_string());
    let mut text = String::new();
    let _ = writeln!(text, "sequence {}", rep.sequence);
    let _ = writeln!(text, "sampled r = 1..={}", caps.r_max);
    let _ = writeln!(text, "metric: nu >= {} from r = {}", caps.nu_cap, show(rep.metric.r_bar));
    let late = rep.membership.iter().filter_map(|m| m.r_bar).max();
    let missing = rep.membership.iter().filter(|m| m.r_bar.is_none()).count();
    let _ = writeln!(
        text,
        "membership: {} words of length <= {wr}, all settled from r = {}{}",
        rep.membership.len(),
        show(late),
        if missing > 0 { format!(" ({missing} unsettled)") } else { String::new() }
    );
    for b in &rep.balls {
        let _ = writeln!(text, "balls: R = {} matches from r = {}", b.radius, show(b.r_bar));
    }
    let _ = writeln!(text, "consistent {}", rep.consistent);
    let code = if rep.consistent { 0 } else { EXIT_FAIL };
    Ok(Outcome { text, json: with_schema(serde_json::to_value(&rep)?), code })
}

fn key_labels(g: &MarkedGroup, keys: &[ElementKey], cfg: &ExperimentConfig) -> Vec<String> {
    let fg = g.is_finite().then(|| FiniteGroup::enumerate(g, cfg.caps.max_group_ball).ok()).flatten();
    keys.iter()
        .map(|k| match fg.as_ref().and_then(|fg| fg.find_key(k).map(|i| fg.word(i).to_string())) {
            Some(w) => w,
            None => match k {
                ElementKey::Int(n) => n.to_string(),
                other => serde_json::to_string(other).expect("key serializes"),
            },
        })
        .collect()
}

fn cmd_wvalues(cfg: &ExperimentConfig, group: &str, word: &str, sample: Option<u64>, radius: usize) -> Result<Outcome> {
    let (_, g) = input::group(group)?;
    let w = word_map(word)?;
    let set = match sample {
        Some(n) => w_values_sampled(&g, &w, n, radius, cfg.seed, &cfg.caps)?,
        None => w_values(&g, &w, &cfg.caps)?,
    };
    let labels = key_labels(&g, &set.values, cfg);
    let mut text = format!(
        "group {}\nword {}\nvalues {}{} ({} evaluations)\n",
        g.name(),
        w,
        set.len(),
        if set.exhaustive { "" } else { " found, not exhaustive" },
        set.evaluations
    );
    for l in &labels {
        let _ = writeln!(text, "  {l}");
    }
    let json = json!({
        "schema": SCHEMA,
        "group": g.name(),
        "word": w.to_string(),
        "count": set.len(),
        "values": set.values,
        "representatives": labels,
        "exhaustive": set.exhaustive,
        "evaluations": set.evaluations,
        "seed": sample.map(|_| cfg.seed),
    });
    Ok(Outcome::ok(text, json))
}

fn cmd_concise(cfg: &ExperimentConfig, group: &str, word: &str) -> Result<Outcome> {
    let (_, g) = input::group(group)?;
    let w = word_map(word)?;
    let rec = conciseness_record(&g, &w, &cfg.caps)?;
    let text = format!(
        "group {}\nword {}\n|G| {}\nm {}\n|G_w| {}\n",
        rec.group,
        w,
        rec.group_order.map_or("?".into(), |o| o.to_string()),
        rec.m,
        rec.verbal_order
    );
    let mut json = with_schema(serde_json::to_value(&rec)?);
    json["word"] = json!(w.to_string());
    Ok(Outcome::ok(text, json))
}

fn family_members(cfg: &ExperimentConfig, groups: &[String], template: Option<&str>, file: Option<&PathBuf>) -> Result<(String, Vec<MarkedGroup>)> {
    let mut members = Vec::new();
    let mut names = Vec::new();
    for arg in groups {
        members.push(input::group(arg)?.1);
    }
    if !groups.is_empty() {
        names.push(groups.join(", "));
    }
    if let Some(t) = template {
        let seq = input::sequence(t, None)?;
        for r in 1..=cfg.caps.r_max {
            members.push(seq.member(r)?);
        }
        names.push(format!("{t}, r = 1..={}", cfg.caps.r_max));
    }
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
        let list: Vec<Value> = serde_json::from_str(&text).with_context(|| path.display().to_string())?;
        for (i, item) in list.into_iter().enumerate() {
            let at = || format!("{}: entry {i}", path.display());
            let g = match item {
                Value::String(expr) => catalog::group(&expr).with_context(at)?,
                spec => {
                    let spec = serde_json::from_value(spec).with_context(at)?;
                    mgl_core::make_marked(&spec).with_context(at)?
                }
            };
            members.push(g);
        }
        names.push(path.display().to_string());
    }
    if members.is_empty() {
        bail!("empty family: give groups, --template or --family-file");
    }
    Ok((names.join("; "), members))
}

fn cmd_delta(cfg: &ExperimentConfig, word: &str, groups: &[String], template: Option<&str>, file: Option<&PathBuf>) -> Result<Outcome> {
    let w = word_map(word)?;
    let (family, members) = family_members(cfg, groups, template, file)?;
    let profile = delta_profile(&family, &members, &w, &cfg.caps);
    let code = if profile.errors.is_empty() { 0 } else { EXIT_INCONCLUSIVE };
    Ok(Outcome { text: profile.to_table(), json: profile.to_json(), code })
}

fn cmd_theorem_a(cfg: &ExperimentConfig, seq: &str, word: &str, limit: Option<&str>, support: Option<usize>) -> Result<Outcome> {
    let seq = input::sequence(seq, limit)?;
    let w = word_map(word)?;
    let mut tc = TheoremAConfig { caps: cfg.caps, ..TheoremAConfig::default() };
    if let Some(s) = support {
        tc.support_radius = s;
    }
    let rep = theorem_a_check(&seq, &w, &tc)?;
    let verdict = serde_json::to_value(rep.verdict)?;
    let show = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    let mut text = format!(
        "sequence {}\nword {}\nverdict {}\nm {}\ndelta {}\nR {}\nr_bar {}\n",
        rep.sequence,
        rep.word,
        verdict.as_str().unwrap_or_default(),
        show(rep.m),
        show(rep.delta),
        show(rep.radius),
        rep.r_bar.map_or("-".to_string(), |r| r.to_string()),
    );
    for s in &rep.steps {
        let status = serde_json::to_value(s.status)?;
        let _ = writeln!(text, "({}) {}: {}", s.step, status.as_str().unwrap_or_default(), s.detail);
    }
    let code = match rep.verdict {
        Verdict::Pass => 0,
        Verdict::Inconclusive | Verdict::HypothesisNotMet => EXIT_INCONCLUSIVE,
        Verdict::Fail => EXIT_FAIL,
    };
    Ok(Outcome { text, json: serde_json::to_value(&rep)?, code })
}

fn cmd_lef_build(cfg: &ExperimentConfig, seq: &str, words: &[String], limit: Option<&str>, out: Option<&PathBuf>) -> Result<Outcome> {
    let seq = input::sequence(seq, limit)?;
    let limit = seq.limit()?;
    if words.is_empty() {
        bail!("no words given for F");
    }
    let f = words
        .iter()
        .map(|t| parse_in_rank(t, limit.rank()).with_context(|| format!("word {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    let wit = lef_witness_from_limit(&seq, &f, cfg.caps.r_max, &cfg.caps)?;
    let json = wit.to_json();
    let doc = serde_json::to_string_pretty(&json)? + "\n";
    let text = match out {
        Some(path) => {
            std::fs::write(path, &doc).with_context(|| path.display().to_string())?;
            let (r, radius) = match wit.provenance {
                Provenance::Constructed { r, radius } => (r, radius),
                Provenance::Manual => unreachable!("constructed witness"),
            };
            format!(
                "witness written to {}\nQ = member r = {r} ({}), matched on the radius-{radius} ball\nphi defined on {} elements\n",
                path.display(),
                wit.q.describe(),
                wit.phi.len()
            )
        }
        None => doc,
    };
    Ok(Outcome::ok(text, json))
}

fn cmd_lef_verify(cfg: &ExperimentConfig, path: &Path, group: Option<&str>) -> Result<Outcome> {
    let wit = LefWitness::load(path)?;
    let g = match (group, &wit.subject_spec) {
        (Some(arg), _) => input::group(arg)?.1,
        (None, Some(spec)) => mgl_core::make_marked(spec).with_context(|| format!("{}: subject_spec", path.display()))?,
        (None, None) => catalog::group(&wit.subject)
            .with_context(|| format!("{}: subject {:?} is not a catalog expression; pass --group", path.display(), wit.subject))?,
    };
    let verdict = check_lef_witness(&g, &wit, &cfg.caps)?;
    let mut text = format!("{}\n", if verdict.pass { "pass" } else { "FAIL" });
    for v in &verdict.injectivity {
        let _ = writeln!(text, "injectivity: phi({}) = phi({}) = {}", wit.f[v.i], wit.f[v.j], v.image);
    }
    for v in &verdict.multiplicativity {
        let _ = writeln!(
            text,
            "multiplicativity: phi({} * {}) = {} but phi({}) * phi({}) = {}",
            wit.f[v.i], wit.f[v.j], v.image_of_product, wit.f[v.i], wit.f[v.j], v.product_of_images
        );
    }
    let code = if verdict.pass { 0 } else { EXIT_FAIL };
    Ok(Outcome { text, json: verdict.to_json(), code })
}

fn run(cli: Cli) -> Result<(Format, Outcome)> {
    let cfg = settings(&cli.global)?;
    let out = match &cli.command {
        Command::Ball { group, radius, dot } => cmd_ball(&cfg, group, *radius, *dot),
        Command::Distance { a, b, cap } => cmd_distance(&cfg, a, b, *cap),
        Command::Converge { sequence, limit, cap, word_radius, ball_radius } => {
            cmd_converge(&cfg, sequence, limit.as_deref(), *cap, *word_radius, *ball_radius)
        }
        Command::Wvalues { group, word, exhaustive: _, sample, radius } => cmd_wvalues(&cfg, group, word, *sample, *radius),
        Command::Concise { group, word } => cmd_concise(&cfg, group, word),
        Command::Delta { word, groups, template, family_file } => {
            cmd_delta(&cfg, word, groups, template.as_deref(), family_file.as_ref())
        }
        Command::TheoremA { sequence, word, limit, support_radius } => {
            cmd_theorem_a(&cfg, sequence, word, limit.as_deref(), *support_radius)
        }
        Command::Lef { verify: Some(path), group, words, .. } => {
            if !words.is_empty() {
                bail!("--verify takes no F words");
            }
            cmd_lef_verify(&cfg, path, group.as_deref())
        }
        Command::Lef { sequence: Some(seq), words, limit, out, .. } => cmd_lef_build(&cfg, seq, words, limit.as_deref(), out.as_ref()),
        Command::Lef { .. } => bail!("lef needs a sequence and F words, or --verify WITNESS"),
    }?;
    Ok((cfg.format, out))
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<mgl_core::Error>() {
        Some(e) if e.is_cap() => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok((format, out)) => {
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json output") + "\n",
                Format::Text => out.text,
            };
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
