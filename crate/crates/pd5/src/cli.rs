//! Command-line front end. `run` is the whole program; the binary only
//! wires it to the process.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 validation error,
//! 4 oracle mismatch.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blocks::prime_power_u64;
use crate::invariants::{
    char_class_consistency, classify_spin, generalized_cohomology, pi2_structure, pi3_mod_k, pi3_with, pi4,
    pi4_mod_k, pi_simple, sq2_onto, sq_module, BlockTheory, Declared, SecondaryOp,
};
use crate::manifolds::{builtin, connected_sum, InputData, NAMES};
use crate::oracle::{confluence_probe, random_script, verify_split};
use crate::splitter::{build_w4, split, Coeffs4, Coeffs5, HomologyTable, SplitResult, WedgeClass};

#[derive(Debug, Parser)]
#[command(name = "pd5", about = "Split the suspension of a Poincare duality 5-complex into a wedge")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split Sigma X and classify f.
    Split {
        #[command(flatten)]
        input: InputArgs,
        /// Print each basis before the record indexed against it.
        #[arg(long)]
        explain: bool,
    },
    /// Evaluate invariants; with no selection, report everything.
    Invariants {
        #[command(flatten)]
        input: InputArgs,
        /// Cohomotopy degree (1 to 5), repeatable.
        #[arg(long = "pi")]
        pi: Vec<u32>,
        /// Coefficients Z/k for the cohomotopy groups.
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// integral, mod:K, stable, or a theory table file.
        #[arg(long)]
        cohomology: Vec<String>,
        #[arg(long)]
        spin: bool,
        #[arg(long)]
        steenrod: bool,
        #[arg(long)]
        consistency: bool,
        /// Value of the secondary operation in the spin case.
        #[arg(long, value_parser = ["trivial", "nontrivial", "unknown"])]
        secondary: Option<String>,
    },
    /// Check the splitting against the cellular oracle and probe confluence.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Random move scripts to try (seeded by PD5_SEED).
        #[arg(long, default_value_t = 16)]
        probes: usize,
    },
    /// List the builtin manifolds.
    Library {
        #[arg(long)]
        json: bool,
    },
    /// Connected sum of builtins, echoed as an input document.
    Sum {
        #[arg(required = true)]
        names: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Builtin name, e.g. X-1, Xinf, M'4.
    #[arg(long, conflicts_with = "file")]
    manifold: Option<String>,
    /// Input document; `-` or no input option reads stdin.
    #[arg(long)]
    file: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validate(String),
    Breach(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validate(_) => 3,
            CliError::Breach(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validate(m) | CliError::Breach(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimePowerDoc {
    pub p: u64,
    pub r: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomologyDoc {
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub torsion: Vec<PrimePowerDoc>,
}

/// The input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub homology: HomologyDoc,
    #[serde(default)]
    pub phi4: Vec<Coeffs4>,
    #[serde(default)]
    pub phi5: Coeffs5,
    #[serde(default)]
    pub declared: Declared,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Document {
    pub fn from_input(d: &InputData) -> Self {
        let torsion = d
            .homology
            .torsion
            .iter()
            .map(|t| {
                let (p, r) = prime_power_u64(*t).expect("validated torsion");
                PrimePowerDoc { p, r }
            })
            .collect();
        Document {
            provenance: Some(d.provenance.clone()),
            homology: HomologyDoc { m: d.homology.m, n: d.homology.n, torsion },
            phi4: d.phi4.clone(),
            phi5: d.phi5.clone(),
            declared: d.declared,
        }
    }

    pub fn to_input(&self) -> Result<InputData, CliError> {
        let mut torsion = Vec::new();
        for (i, t) in self.homology.torsion.iter().enumerate() {
            if !is_prime(t.p) || t.r == 0 {
                return Err(CliError::Parse(format!("homology.torsion[{i}]: need a prime p and r >= 1")));
            }
            let q = t.p.checked_pow(t.r).ok_or_else(|| CliError::Parse(format!("homology.torsion[{i}]: p^r overflows")))?;
            torsion.push(q);
        }
        Ok(InputData {
            homology: HomologyTable { m: self.homology.m, n: self.homology.n, torsion },
            phi4: self.phi4.clone(),
            phi5: self.phi5.clone(),
            provenance: self.provenance.clone().unwrap_or_else(|| "input".into()),
            declared: self.declared,
        })
    }
}

fn load(args: &InputArgs, stdin: &mut dyn Read) -> Result<InputData, CliError> {
    if let Some(name) = &args.manifold {
        return builtin(name).map_err(|e| CliError::Parse(e.to_string()));
    }
    let text = match args.file.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
            s
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{path}: {e}")))?,
    };
    let doc: Document = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("schema: {e}")))?;
    doc.to_input()
}

fn run_split(d: &InputData) -> Result<SplitResult, CliError> {
    split(&d.homology, &d.phi4, &d.phi5).map_err(|e| CliError::Validate(e.to_string()))
}

fn bits(v: &[u8]) -> String {
    format!("[{}]", v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "))
}

fn labels(names: Vec<String>) -> String {
    if names.is_empty() {
        "(none)".into()
    } else {
        names.join(", ")
    }
}

fn phi4_basis(w: &WedgeClass) -> String {
    let x = vec!["S^3".to_string(); w.n3];
    let y: Vec<String> = w.evens.iter().map(|r| format!("P^4(2^{r})")).collect();
    format!("x over {}; y over {}", labels(x), labels(y))
}

fn phi5_basis(w: &WedgeClass) -> String {
    let mut x: Vec<String> = w.evens.iter().map(|r| format!("P^4(2^{r})[{r}]")).collect();
    x.extend(std::iter::repeat_n("S^3[w]".to_string(), w.n3));
    x.extend(std::iter::repeat_n("S^4[w+1]".to_string(), w.n4));
    let y: Vec<String> = w.evens.iter().map(|r| format!("P^4(2^{r})")).collect();
    let z: Vec<String> = w.tw.iter().map(|s| format!("SigmaCP2(2^{s})")).collect();
    format!("x over {}; y over {}; z over {}", labels(x), labels(y), labels(z))
}

fn describe_input(d: &InputData) -> String {
    let t: Vec<String> = d.homology.sorted_torsion().iter().map(|t| t.to_string()).collect();
    format!("input: {} (m={}, n={}, T={{{}}})", d.provenance, d.homology.m, d.homology.n, t.join(", "))
}

/// Text rendering of a split; the basis echo is always included.
pub fn render_split(d: &InputData, s: &SplitResult, explain: bool) -> String {
    let tr = &s.trace;
    let mut out = vec![describe_input(d), format!("W2 = {}", tr.w2), format!("W3 = {}", tr.w3)];
    let mut cur = tr.w3.clone();
    for (i, (rec, next)) in d.phi4.iter().zip(&tr.after_5cells).enumerate() {
        if explain {
            out.push(format!("  basis for phi4[{i}]: {}", phi4_basis(&cur)));
            out.push(format!("  phi4[{i}]: x={} y={}", bits(&rec.x), bits(&rec.y)));
        }
        out.push(format!("after phi4[{i}]: {next}"));
        cur = next.clone();
    }
    out.push(format!("W4 = {}", tr.w4));
    if explain {
        out.push(format!("  basis for phi5: {}", phi5_basis(&tr.w4)));
        out.push(format!("  phi5: x={} y={} z={}", bits(&d.phi5.x), bits(&d.phi5.y), bits(&d.phi5.z)));
    }
    let n = &tr.phi5_normalized;
    out.push(format!("phi5 normalized: x={} y={} z={}", bits(&n.x), bits(&n.y), bits(&n.z)));
    out.push(s.to_string());
    out.join("\n")
}

fn split_json(d: &InputData, s: &SplitResult) -> Value {
    let summands: Vec<String> = s.free_blocks().iter().map(|b| b.to_string()).collect();
    let f = s.f.map(|f| {
        json!({
            "family": f.family, "x": f.x, "y": f.y, "z": f.z,
            "rho": f.rho, "r": f.r, "s": f.s,
            "expression": f.expression(),
            "components": f.target_blocks().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        })
    });
    let tr = &s.trace;
    json!({
        "input": Document::from_input(d),
        "splitting": s.to_string(),
        "summands": summands,
        "f": f,
        "stages": {
            "w2": tr.w2.to_string(),
            "w3": tr.w3.to_string(),
            "after_phi4": tr.after_5cells.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "w4": tr.w4.to_string(),
            "phi4_bases": std::iter::once(&tr.w3).chain(&tr.after_5cells).take(d.phi4.len()).map(phi4_basis).collect::<Vec<_>>(),
            "phi5_basis": phi5_basis(&tr.w4),
        },
        "phi5_normalized": tr.phi5_normalized,
    })
}

fn oracle_check(d: &InputData, s: &SplitResult) -> Result<(), CliError> {
    let v = verify_split(&d.homology, s);
    if v.pass {
        Ok(())
    } else {
        Err(CliError::Breach(format!(
            "oracle mismatch at degree {:?}: expected {}, got {}",
            v.first_mismatch, v.expected, v.actual
        )))
    }
}

fn theory(spec: &str) -> Result<BlockTheory, CliError> {
    match spec {
        "integral" => Ok(BlockTheory::integral()),
        "stable" => Ok(BlockTheory::stable_cohomotopy()),
        _ => {
            if let Some(k) = spec.strip_prefix("mod:") {
                let k: u64 = k.parse().map_err(|_| CliError::Parse(format!("bad modulus in {spec:?}")))?;
                if k < 2 {
                    return Err(CliError::Parse(format!("modulus must be >= 2 in {spec:?}")));
                }
                return Ok(BlockTheory::mod_k(k));
            }
            let text = std::fs::read_to_string(spec).map_err(|e| CliError::Parse(format!("{spec}: {e}")))?;
            BlockTheory::from_json(&text).map_err(|e| CliError::Parse(e.to_string()))
        }
    }
}

struct InvariantSelection {
    pi: Vec<u32>,
    modulus: Option<u64>,
    cohomology: Vec<String>,
    spin: bool,
    steenrod: bool,
    consistency: bool,
    secondary: Option<SecondaryOp>,
}

fn invariants_report(d: &InputData, s: &SplitResult, sel: &InvariantSelection) -> Result<Vec<(String, Value)>, CliError> {
    let h = &d.homology;
    let everything = sel.pi.is_empty() && sel.cohomology.is_empty() && !sel.spin && !sel.steenrod && !sel.consistency;
    let pis = if everything { vec![1, 2, 3, 4, 5] } else { sel.pi.clone() };
    let cohs = if everything { vec!["integral".to_string()] } else { sel.cohomology.clone() };
    let usage = |e: crate::invariants::InvariantError| match e {
        crate::invariants::InvariantError::Unsupported(m) => CliError::Parse(m),
        other => CliError::Validate(other.to_string()),
    };
    let mut out: Vec<(String, Value)> = Vec::new();
    for n in pis {
        let suffix = sel.modulus.map(|k| format!(";Z/{k}")).unwrap_or_default();
        let key = format!("pi^{n}{suffix}");
        let value = match (n, sel.modulus) {
            (1 | 5, k) => json!(pi_simple(h, n, k).map_err(usage)?.to_string()),
            (2, None) => {
                let r = pi2_structure(s, h);
                let product = r.simply_connected_product.map(|(h2, p3)| format!("H^2 x pi^3 = ({h2}) x ({p3})"));
                json!({
                    "regime": format!("{:?}", r.regime),
                    "product": product,
                    "fibers": r.fiber_description,
                })
            }
            (3, None) => json!(pi3_with(s, sel.secondary).to_string()),
            (3, Some(k)) => json!(pi3_mod_k(s, h, k, sel.secondary).map_err(usage)?.to_string()),
            (4, None) => json!(pi4(s, h).to_string()),
            (4, Some(k)) => json!(pi4_mod_k(s, h, k).map_err(usage)?.to_string()),
            _ => return Err(CliError::Parse(format!("no evaluator for {key}"))),
        };
        out.push((key, value));
    }
    for c in cohs {
        let th = theory(&c)?;
        let g = generalized_cohomology(s, &th).map_err(usage)?;
        out.push((format!("cohomology {}", th.name), json!(g.to_string())));
    }
    if everything || sel.spin {
        out.push(("spin".into(), serde_json::to_value(classify_spin(s)).expect("serializable")));
    }
    if everything || sel.steenrod {
        let t = sq_module(s);
        let dims: Vec<String> = (0..=5).map(|d| format!("{d}:{}", t.dim(d))).collect();
        out.push((
            "steenrod".into(),
            json!({
                "dims": dims.join(" "),
                "sq1_ranks": (0..=4).map(|d| t.sq1(d).rank()).collect::<Vec<_>>(),
                "sq2_ranks": (0..=3).map(|d| t.sq2(d).rank()).collect::<Vec<_>>(),
                "sq2_onto_top": sq2_onto(&t),
            }),
        ));
    }
    if everything || sel.consistency {
        out.push(("consistency".into(), json!(char_class_consistency(h, s, &d.declared))));
    }
    Ok(out)
}

fn render_value(v: &Value, indent: usize) -> String {
    let pad = " ".repeat(indent);
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if a.is_empty() => "none".into(),
        Value::Array(a) => a.iter().map(|x| format!("\n{pad}- {}", render_value(x, indent + 2))).collect(),
        Value::Object(o) => o
            .iter()
            .map(|(k, x)| format!("\n{pad}{k}: {}", render_value(x, indent + 2)))
            .collect(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn library_entries() -> Vec<(&'static str, &'static str)> {
    let notes = [
        "S^5",
        "Wu manifold SU(3)/SO(3)",
        "nontrivial S^3-bundle over S^2",
        "S^2 x S^3",
        "H_2 = Z, f = eta^2",
        "H_2 = Z/k (+) Z/k, k > 1, spin",
        "as M{k} with f = iota_k . eta^2",
        "H_2 = Z/2^k (+) Z/2^k, f = xi_k",
        "H_2 = Z/2^k (+) Z/2^k, f = xi_k + iota_k . eta^2",
    ];
    NAMES.iter().copied().zip(notes).collect()
}

fn execute(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match cli.cmd {
        Command::Split { input, explain } => {
            let d = load(&input, stdin)?;
            let s = run_split(&d)?;
            oracle_check(&d, &s)?;
            if input.json {
                serde_json::to_string_pretty(&split_json(&d, &s)).expect("serializable")
            } else {
                render_split(&d, &s, explain)
            }
        }
        Command::Invariants { input, pi, modulus, cohomology, spin, steenrod, consistency, secondary } => {
            let d = load(&input, stdin)?;
            let s = run_split(&d)?;
            let secondary = secondary.map(|v| match v.as_str() {
                "trivial" => SecondaryOp::Trivial,
                "nontrivial" => SecondaryOp::Nontrivial,
                _ => SecondaryOp::Unknown,
            });
            let sel = InvariantSelection { pi, modulus, cohomology, spin, steenrod, consistency, secondary };
            let report = invariants_report(&d, &s, &sel)?;
            if input.json {
                let map: serde_json::Map<String, Value> = report.into_iter().collect();
                serde_json::to_string_pretty(&json!({ "input": d.provenance, "invariants": map })).expect("serializable")
            } else {
                let lines: Vec<String> = report.iter().map(|(k, v)| format!("{k} = {}", render_value(v, 2))).collect();
                format!("{}\n{}", describe_input(&d), lines.join("\n"))
            }
        }
        Command::Verify { input, probes } => {
            let d = load(&input, stdin)?;
            let s = run_split(&d)?;
            let report = verify_split(&d.homology, &s);
            let seed = match std::env::var("PD5_SEED") {
                Ok(v) => v.trim().parse::<u64>().map_err(|_| CliError::Parse(format!("PD5_SEED={v:?} is not an integer")))?,
                Err(_) => 0,
            };
            let mut rng = StdRng::seed_from_u64(seed);
            let w4 = build_w4(&d.homology, &d.phi4).map_err(|e| CliError::Validate(e.to_string()))?;
            let w4 = w4.2.last().cloned().unwrap_or(w4.1);
            let mut failed = Vec::new();
            for _ in 0..probes {
                let script = random_script(&mut rng, &w4, 6);
                let ok = confluence_probe(&d.homology, &d.phi4, &d.phi5, &script)
                    .map_err(|e| CliError::Validate(e.to_string()))?;
                if !ok {
                    failed.push(script.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "));
                }
            }
            let pass = report.pass && failed.is_empty();
            let text = if input.json {
                serde_json::to_string_pretty(&json!({
                    "input": d.provenance, "pass": pass, "oracle": report,
                    "probes": probes, "seed": seed, "failed_scripts": failed,
                }))
                .expect("serializable")
            } else {
                let mut lines = vec![
                    describe_input(&d),
                    format!("oracle: {} (expected {}, got {})", if report.pass { "pass" } else { "FAIL" }, report.expected, report.actual),
                    format!("confluence: {}/{probes} probes agree (seed {seed})", probes - failed.len()),
                ];
                lines.extend(failed.iter().map(|f| format!("  diverging script: {f}")));
                lines.join("\n")
            };
            writeln!(out, "{text}").map_err(|e| CliError::Parse(e.to_string()))?;
            return if pass { Ok(()) } else { Err(CliError::Breach("verification failed".into())) };
        }
        Command::Library { json } => {
            let entries = library_entries();
            if json {
                let v: Vec<Value> = entries.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect();
                serde_json::to_string_pretty(&v).expect("serializable")
            } else {
                entries.iter().map(|(n, d)| format!("{n:8} {d}")).collect::<Vec<_>>().join("\n")
            }
        }
        Command::Sum { names } => {
            let parts = names
                .iter()
                .map(|n| builtin(n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let d = connected_sum(&parts).map_err(|e| CliError::Validate(e.to_string()))?;
            serde_json::to_string_pretty(&Document::from_input(&d)).expect("serializable")
        }
    };
    writeln!(out, "{text}").map_err(|e| CliError::Parse(e.to_string()))
}

/// Run the program on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli, stdin, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
