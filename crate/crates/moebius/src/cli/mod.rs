//! Command-line front end. `run` is the whole program; the binary only wires
//! it to the process streams.

pub mod suites;

use std::io::{Read, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify::{
    classify, connected_coverings, default_order_bound, ClassRecord, TriangulationTriple,
};
use crate::cn::Autoequivalence;
use crate::frobenius::{
    is_distinguished, lift, normalized_scalars, positive_triangle, triangle_from,
    universal_virtual_triangle, Coord, MFObject, Model, StableMorphism, Triangle,
};
use crate::par::Exec;
use crate::scalars::{Cyclotomic, RootOfUnity};
use suites::{run_suite, SuiteConfig, SUITES};

pub const SCHEMA: &str = "moebius.report/v1";

#[derive(Parser, Debug)]
#[command(
    name = "moebius",
    version,
    about = "Triangulated coverings of the Moebius band category"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strong-isomorphism classes of triangulation triples on C_n.
    Classify(Common),
    /// Connected coverings (σ an n-cycle).
    Connected(Common),
    /// Builds a triangle from a JSON payload on stdin.
    Triangle(Common),
    /// Runs verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    /// Coefficients are searched in the roots of unity of this order.
    #[arg(long)]
    order_bound: Option<u64>,
    #[arg(long)]
    sample_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// One suite, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

/// Echo of the effective configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: Option<usize>,
    pub order_bound: Option<u64>,
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Timing is kept out of the JSON so that reruns are byte-identical; `run`
/// prints it on the error stream.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: RunConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
}

type Outcome = Result<(Value, Vec<Check>, Vec<String>), Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let start = Instant::now();
    let (name, common, suite) = match &cli.command {
        Command::Classify(c) => ("classify", c.clone(), None),
        Command::Connected(c) => ("connected", c.clone(), None),
        Command::Triangle(c) => ("triangle", c.clone(), None),
        Command::Verify(v) => ("verify", v.common.clone(), Some(v.suite.clone())),
    };
    let result = validate(&common).and_then(|_| match &cli.command {
        Command::Classify(c) => cmd_classify(c),
        Command::Connected(c) => cmd_connected(c),
        Command::Triangle(_) => cmd_triangle(stdin),
        Command::Verify(v) => cmd_verify(v),
    });
    let (results, checks, table) = match result {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            return 2;
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = Report {
        schema: SCHEMA,
        command: RunConfig {
            command: name.into(),
            n: common.n,
            order_bound: common.order_bound,
            sample_size: common.sample_size,
            seed: common.seed,
            format: common.format,
            suite,
        },
        results,
        checks,
        passed,
    };
    let _ = match common.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        ),
        Format::Table => write_table(out, &report, &table),
    };
    let _ = writeln!(err, "elapsed: {:.3}s", start.elapsed().as_secs_f64());
    i32::from(!passed)
}

fn write_table(out: &mut dyn Write, r: &Report, lines: &[String]) -> std::io::Result<()> {
    writeln!(out, "{}", r.command.command)?;
    for l in lines {
        writeln!(out, "  {l}")?;
    }
    for c in &r.checks {
        writeln!(
            out,
            "  [{}] {}: {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        )?;
    }
    writeln!(
        out,
        "{}",
        if r.passed {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    )
}

fn validate(c: &Common) -> Result<(), Failure> {
    if c.n == Some(0) {
        return usage("--n must be at least 1");
    }
    if let Some(b) = c.order_bound {
        if b < 2 || b % 2 != 0 {
            return usage(format!(
                "--order-bound must be even and at least 2, got {b}"
            ));
        }
    }
    Ok(())
}

fn need_two(n: usize) -> Result<(), Failure> {
    if n < 2 {
        return usage(format!(
            "n = {n}: a triangulated covering needs an anti-compatible pair σ, τ, and on a single object \
             every pair of functors is compatible, so n must be at least 2"
        ));
    }
    Ok(())
}

fn class_line(k: usize, r: &ClassRecord) -> String {
    let s = &r.summary;
    let mut l = format!(
        "{:>3}  σ={:<10} τ={:<10} members={}",
        k + 1,
        s.sigma_pattern,
        s.tau_pattern,
        r.members
    );
    if let Some(p) = &s.two_fold {
        l += &format!(
            "  a12={} b12={} c1/c2={}",
            show_root(p.a12),
            show_root(p.b12),
            show_root(p.c1_over_c2)
        );
    }
    l
}

fn show_root(z: RootOfUnity) -> String {
    Cyclotomic::from(z).to_string()
}

fn cmd_classify(c: &Common) -> Outcome {
    let n = c.n.unwrap_or(2);
    need_two(n)?;
    let bound = c.order_bound.unwrap_or_else(|| default_order_bound(n));
    let classes = classify(n, bound, Exec::default()).map_err(|e| Failure::Usage(e.to_string()))?;
    let valid = classes.iter().all(|r| r.representative.validate().is_ok());
    let table = classes
        .iter()
        .enumerate()
        .map(|(k, r)| class_line(k, r))
        .collect();
    let checks = vec![Check {
        name: "triples valid".into(),
        passed: valid,
        detail: format!("{} classes", classes.len()),
    }];
    let results =
        json!({ "n": n, "order_bound": bound, "count": classes.len(), "classes": classes });
    Ok((results, checks, table))
}

fn cmd_connected(c: &Common) -> Outcome {
    let n = c.n.unwrap_or(2);
    need_two(n)?;
    let classes = connected_coverings(n).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut table: Vec<String> = classes
        .iter()
        .enumerate()
        .map(|(k, r)| class_line(k, r))
        .collect();
    let note = (n % 2 == 1).then(|| "odd n: there are no connected coverings".to_string());
    if let Some(m) = &note {
        table.push(m.clone());
    }
    let checks = vec![Check {
        name: "class count".into(),
        passed: classes.len() == if n % 2 == 0 { n } else { 0 },
        detail: format!("{} classes", classes.len()),
    }];
    let mut results = json!({ "n": n, "count": classes.len(), "classes": classes });
    if let Some(m) = note {
        results["note"] = Value::String(m);
    }
    Ok((results, checks, table))
}

fn cmd_verify(v: &VerifyArgs) -> Outcome {
    let c = &v.common;
    let names: Vec<&str> = if v.suite == "all" {
        SUITES.to_vec()
    } else {
        vec![v.suite.as_str()]
    };
    let cfg = SuiteConfig {
        seed: c.seed,
        sample_size: c.sample_size,
        n: c.n,
        exec: Exec::default(),
        corrupt: v.inject_fault,
    };
    let mut outcomes = Vec::new();
    for s in names {
        outcomes.push(run_suite(s, &cfg).map_err(Failure::Usage)?);
    }
    let checks = outcomes
        .iter()
        .map(|o| Check {
            name: o.name.clone(),
            passed: o.passed,
            detail: o.detail.clone(),
        })
        .collect();
    Ok((json!({ "suites": outcomes }), checks, Vec::new()))
}

// ---- triangle payloads ----

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum TripleChoice {
    Class {
        n: usize,
        class: usize,
    },
    Explicit {
        sigma: Autoequivalence,
        tau: Autoequivalence,
    },
}

#[derive(Deserialize, Serialize, Debug, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct ObjectJson {
    #[serde(with = "coord_str")]
    pub x: Coord,
    #[serde(with = "coord_str")]
    pub y: Coord,
    /// 1-indexed.
    pub sheet: usize,
}

#[derive(Deserialize, Debug)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Request {
    Positive {
        #[serde(with = "coord_str")]
        x: Coord,
        #[serde(with = "coord_str")]
        y: Coord,
        #[serde(with = "coord_str")]
        z: Coord,
        sheet: usize,
    },
    Virtual {
        object: ObjectJson,
        eps: [String; 2],
    },
    Morphism {
        source: Vec<ObjectJson>,
        target: Vec<ObjectJson>,
        /// `scalars[l][k]`: root-of-unity exponent `"p/q"` or null.
        scalars: Vec<Vec<Option<RootOfUnity>>>,
    },
}

#[derive(Deserialize, Debug)]
struct Payload {
    triple: TripleChoice,
    #[serde(flatten)]
    request: Request,
}

mod coord_str {
    use super::Coord;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Coord, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&c.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Coord, D::Error> {
        let s = String::deserialize(d)?;
        s.trim()
            .parse()
            .map_err(|_| serde::de::Error::custom(format!("bad coordinate `{s}`")))
    }
}

fn parse_coord(s: &str) -> Result<Coord, Failure> {
    s.trim()
        .parse()
        .or_else(|_| usage(format!("bad coordinate `{s}`")))
}

fn object(n: usize, o: &ObjectJson) -> Result<MFObject, Failure> {
    if o.sheet == 0 || o.sheet > n {
        return usage(format!("sheet {} out of range 1..={n}", o.sheet));
    }
    let m = MFObject::new(o.x, o.y, o.sheet - 1);
    if (o.y - o.x).abs() > Coord::from_integer(1) {
        return usage(format!("{m}: ends are more than one turn apart"));
    }
    Ok(m)
}

fn obj_json(m: &MFObject) -> ObjectJson {
    ObjectJson {
        x: m.x,
        y: m.y,
        sheet: m.sheet + 1,
    }
}

fn resolve(choice: &TripleChoice) -> Result<TriangulationTriple, Failure> {
    match choice {
        TripleChoice::Class { n, class } => {
            need_two(*n)?;
            let all = classify(*n, default_order_bound(*n), Exec::default())
                .map_err(|e| Failure::Usage(e.to_string()))?;
            match class.checked_sub(1).and_then(|k| all.get(k)) {
                Some(r) => Ok(r.representative.clone()),
                None => usage(format!("class {class} out of range 1..={}", all.len())),
            }
        }
        TripleChoice::Explicit { sigma, tau } => {
            TriangulationTriple::new(sigma.clone(), tau.clone())
                .map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn stable_json(f: &StableMorphism) -> Vec<Vec<String>> {
    f.s.iter()
        .map(|row| row.iter().map(|c| c.to_string()).collect())
        .collect()
}

fn strings(v: &[Cyclotomic]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

fn cmd_triangle(stdin: &mut dyn Read) -> Outcome {
    let mut buf = String::new();
    stdin
        .read_to_string(&mut buf)
        .or_else(|e| usage(format!("reading stdin: {e}")))?;
    let payload: Payload =
        serde_json::from_str(&buf).or_else(|e| usage(format!("malformed payload: {e}")))?;
    let triple = resolve(&payload.triple)?;
    let n = triple.n();
    let md = Model::new(&triple).map_err(|e| Failure::Usage(e.to_string()))?;
    let input = |e: crate::frobenius::FrobeniusError| Failure::Usage(e.to_string());
    let mut checks = Vec::new();
    let (t, expected, kind): (
        Triangle,
        Option<(Vec<Cyclotomic>, Vec<Cyclotomic>, Cyclotomic)>,
        &str,
    ) = match &payload.request {
        Request::Positive { x, y, z, sheet } => {
            let o = object(
                n,
                &ObjectJson {
                    x: *x,
                    y: *y,
                    sheet: *sheet,
                },
            )?;
            let t = positive_triangle(&md, *x, *y, *z, o.sheet).map_err(input)?;
            let one = vec![Cyclotomic::one()];
            (
                t,
                Some((one.clone(), one, triple.c(o.sheet).into())),
                "positive",
            )
        }
        Request::Virtual { object: ob, eps } => {
            let m = object(n, ob)?;
            let t =
                universal_virtual_triangle(&md, &m, parse_coord(&eps[0])?, parse_coord(&eps[1])?)
                    .map_err(input)?;
            let one = Cyclotomic::one();
            (
                t,
                Some((
                    vec![one.clone(), one.clone()],
                    vec![-one.clone(), one],
                    triple.c(m.sheet).into(),
                )),
                "virtual",
            )
        }
        Request::Morphism {
            source,
            target,
            scalars,
        } => {
            let src = source
                .iter()
                .map(|o| object(n, o))
                .collect::<Result<Vec<_>, _>>()?;
            let tgt = target
                .iter()
                .map(|o| object(n, o))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(m) = src.iter().chain(&tgt).find(|m| m.is_proj_inj()) {
                return usage(format!("{m} is projective-injective and vanishes stably"));
            }
            if scalars.len() != tgt.len() || scalars.iter().any(|r| r.len() != src.len()) {
                return usage(format!(
                    "scalars must be a {} x {} matrix",
                    tgt.len(),
                    src.len()
                ));
            }
            let mut s = vec![vec![Cyclotomic::zero(); src.len()]; tgt.len()];
            for (l, row) in scalars.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    if let Some(z) = v {
                        if crate::frobenius::fit_rep(&md.cv, &src[k], &tgt[l]).is_none() {
                            return usage(format!(
                                "no stably nonzero map {} -> {}",
                                src[k], tgt[l]
                            ));
                        }
                        s[l][k] = (*z).into();
                    }
                }
            }
            let f = lift(
                &md.cv,
                &StableMorphism {
                    source: src,
                    target: tgt,
                    s,
                },
            );
            (triangle_from(&md, &f).map_err(input)?, None, "morphism")
        }
    };
    let dist = is_distinguished(&md, &t).map_err(input)?;
    checks.push(Check {
        name: "distinguished".into(),
        passed: dist,
        detail: "agrees with the pushout of its first map".into(),
    });
    let normalized = normalized_scalars(&md, &t).ok();
    if let (Some((ef, eg, eh)), Some(ns)) = (&expected, &normalized) {
        checks.push(Check {
            name: format!("{kind} pattern"),
            passed: &ns.f == ef && &ns.g == eg && &ns.h == eh,
            detail: format!("expected f={:?} g={:?} h={eh}", strings(ef), strings(eg)),
        });
    } else if expected.is_some() {
        checks.push(Check {
            name: format!("{kind} pattern"),
            passed: false,
            detail: "scalars could not be normalized".into(),
        });
    }
    let objs = |v: &[MFObject]| v.iter().map(obj_json).collect::<Vec<_>>();
    let mut table = vec![
        format!(
            "X = {:?}",
            t.x.iter().map(|m| m.to_string()).collect::<Vec<_>>()
        ),
        format!(
            "Y = {:?}",
            t.y.iter().map(|m| m.to_string()).collect::<Vec<_>>()
        ),
        format!(
            "Z = {:?}",
            t.z.iter().map(|m| m.to_string()).collect::<Vec<_>>()
        ),
        format!(
            "f = {:?}  g = {:?}  h = {:?}",
            stable_json(&t.f),
            stable_json(&t.g),
            stable_json(&t.h)
        ),
    ];
    if t.z.is_empty() {
        table.push("contractible: Z is zero in the stable category".into());
    }
    let norm = normalized
        .as_ref()
        .map(|s| json!({ "f": strings(&s.f), "g": strings(&s.g), "h": s.h.to_string() }));
    if let Some(s) = &normalized {
        table.push(format!(
            "normalized: f={:?} g={:?} h={}",
            strings(&s.f),
            strings(&s.g),
            s.h
        ));
    }
    let results = json!({
        "kind": kind,
        "triple": { "sigma": triple.sigma, "tau": triple.tau, "c": triple.phi.c },
        "x": objs(&t.x), "y": objs(&t.y), "z": objs(&t.z), "dropped": objs(&t.dropped),
        "contractible": t.z.is_empty(),
        "f": stable_json(&t.f), "g": stable_json(&t.g), "h": stable_json(&t.h),
        "normalized": norm,
    });
    Ok((results, checks, table))
}
