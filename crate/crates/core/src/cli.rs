//! Command-line frontend. [`run`] does all the work and returns the exit
//! code with the captured output, so the binary is a thin shell around it.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 usage or input error,
//! 3 budget exhausted.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::braid::{braid_orbit_capped, certify_capped, Mode, Verdict, DEFAULT_MAX_ORBIT};
use crate::census::{run_census_from, to_tsv, Census, CensusBudget, Checkpoint, DEFAULT_MAX_WORK};
use crate::error::{Error, Result};
use crate::family::{
    build_family, even_degree_impossible, verify_counterexample_with, ImpossibilityReport,
    VerificationReport, VerifyOptions, DEFAULT_EXHAUSTIVE_CAP,
};
use crate::grouper::{identify_with_seed, GroupReport, DEFAULT_SEED};
use crate::perm::Permutation;
use crate::triple::PtsTriple;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub const ORBIT_SCHEMA: &str = "pillowtile.orbit.v1";
pub const GROUP_SCHEMA: &str = "pillowtile.group.v1";
pub const FAMILY_SCHEMA: &str = "pillowtile.family.v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(
    name = "pillowtile",
    version,
    about = "Pillowcase-tiled surfaces as permutation triples"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Seed for the randomized part of the alternating-group search.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "PILLOWTILE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the odd-degree non-cyclic 1-cylinder triple.
    Family {
        n: usize,
        /// Run the full verification report.
        #[arg(long)]
        verify: bool,
        /// Largest degree that also gets an exhaustive orbit cross-check.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        exhaustive_cap: usize,
    },
    /// Decide whether a triple, written "n: a; b; c", is 1-cylinder.
    Certify {
        triple: String,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_MAX_ORBIT)]
        max_orbit: usize,
    },
    /// List the braid orbit of a triple up to conjugation.
    Orbit {
        triple: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ORBIT)]
        max_orbit: usize,
    },
    /// Report the monodromy group generated by a triple.
    Group { triple: String },
    /// Enumerate 1-cylinder triples of degree n, one row per braid orbit.
    Census {
        n: usize,
        /// Work units, i.e. (a, w) pairs, allowed in this run.
        #[arg(long, default_value_t = DEFAULT_MAX_WORK)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ORBIT)]
        max_orbit: usize,
        /// Checkpoint file; read if present, rewritten after the run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(code, text)
            };
        }
    };
    match cli.threads {
        Some(0) => input_error(&Error::PreconditionFailed(
            "--threads must be positive".into(),
        )),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => input_error(&Error::PreconditionFailed(e.to_string())),
        },
        None => dispatch(&cli),
    }
}

fn input_error(e: &Error) -> Outcome {
    Outcome {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Family {
            n,
            verify,
            exhaustive_cap,
        } => cmd_family(cli, *n, *verify, *exhaustive_cap),
        Command::Certify {
            triple,
            mode,
            max_orbit,
        } => cmd_certify(cli, triple, *mode, *max_orbit),
        Command::Orbit { triple, max_orbit } => cmd_orbit(cli, triple, *max_orbit),
        Command::Group { triple } => cmd_group(cli, triple),
        Command::Census {
            n,
            budget,
            max_orbit,
            resume,
        } => cmd_census(cli, *n, *budget, *max_orbit, resume.as_ref()),
    };
    result.unwrap_or_else(|e| match e {
        Error::BudgetExceeded { .. } => Outcome {
            code: EXIT_BUDGET,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        e => input_error(&e),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn parse_triple(text: &str) -> Result<PtsTriple> {
    text.parse()
}

fn cmd_family(cli: &Cli, n: usize, verify: bool, exhaustive_cap: usize) -> Result<Outcome> {
    if n.is_multiple_of(2) {
        let report = even_degree_impossible(n)?;
        let stdout = match cli.format {
            Format::Json => to_json(&report)?,
            _ => even_text(&report),
        };
        return Ok(Outcome {
            code: EXIT_INPUT,
            stdout,
            stderr: format!(
                "error: no 1-cylinder pillowcase-tiled surface of even degree {n} exists\n"
            ),
        });
    }
    if n < 5 {
        return Err(Error::UnsupportedDegree {
            degree: n,
            reason: "the counterexample family starts at degree 5".into(),
        });
    }
    let family = build_family(n)?;
    if !verify {
        let stdout = match cli.format {
            Format::Json => to_json(&json!({
                "schema": FAMILY_SCHEMA,
                "degree": n,
                "m": family.m,
                "variant": family.variant,
                "triple": family.triple,
            }))?,
            _ => triple_text(&family.triple),
        };
        return Ok(Outcome::ok(EXIT_OK, stdout));
    }
    let opts = VerifyOptions {
        exhaustive_cap,
        seed: cli.seed,
        ..VerifyOptions::default()
    };
    let report = verify_counterexample_with(&family, &opts)?;
    let code = if report.counterexample {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let stdout = match cli.format {
        Format::Json => to_json(&report)?,
        _ => verify_text(&report, cli.seed),
    };
    Ok(Outcome::ok(code, stdout))
}

fn triple_text(t: &PtsTriple) -> String {
    let [a, b, c] = t.coords();
    format!(
        "degree {}\na = {a}\nb = {b}\nc = {c}\nd = {}\n",
        t.degree(),
        t.fourth_element()
    )
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

fn verify_text(r: &VerificationReport, seed: u64) -> String {
    let mut out = format!("# {} degree={} m={} seed={seed}\n", r.schema, r.degree, r.m);
    out += &triple_text(&r.triple);
    let _ = writeln!(out, "one_cylinder: {}", mark(r.one_cylinder));
    if let Some(case) = r.structural.structural_case {
        let _ = writeln!(out, "structural_case: {}", json_token(&case));
    }
    if let Some(x) = &r.exhaustive {
        let _ = writeln!(
            out,
            "exhaustive: {} orbit_size={} agrees={}",
            json_token(&x.verdict),
            x.orbit_size.unwrap_or(0),
            mark(r.exhaustive_agrees == Some(true))
        );
    }
    let _ = writeln!(out, "non_cyclic: {}", mark(r.non_cyclic));
    if let Some((p, q)) = &r.noncommuting_pair {
        let _ = writeln!(out, "noncommuting_pair: {p} {q}");
    }
    let _ = writeln!(out, "[a, b^2] = {}", r.commutator_a_b2);
    out += &group_text(&r.monodromy);
    let _ = writeln!(out, "counterexample: {}", mark(r.counterexample));
    out
}

fn even_text(r: &ImpossibilityReport) -> String {
    let mut out = format!("# {} degree={}\n", r.schema, r.degree);
    for line in &r.argument {
        let _ = writeln!(out, "- {line}");
    }
    if let Some(scan) = &r.exhaustive {
        let _ = writeln!(
            out,
            "scan: raw_triples={} pairs_examined={} triples_examined={} pruned={} survivors={}",
            scan.raw_triples,
            scan.pairs_examined,
            scan.triples_examined,
            scan.pruned,
            scan.survivors
        );
    }
    out
}

/// Serde name of a unit enum value, without quotes.
fn json_token<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|x| x.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn cmd_certify(cli: &Cli, text: &str, mode: Mode, max_orbit: usize) -> Result<Outcome> {
    let t = parse_triple(text)?;
    let cert = certify_capped(&t, mode, max_orbit)?;
    let code = match cert.verdict {
        Verdict::OneCylinder => EXIT_OK,
        Verdict::NotOneCylinder | Verdict::Undecided => EXIT_NEGATIVE,
    };
    let stdout = match cli.format {
        Format::Json => to_json(&cert)?,
        _ => {
            let mut out = format!("# {} degree={}\n", cert.schema, cert.degree);
            let _ = writeln!(out, "triple: {}", cert.triple);
            let _ = writeln!(out, "verdict: {}", json_token(&cert.verdict));
            let _ = writeln!(out, "mode: {}", json_token(&cert.mode));
            if let Some(r) = cert.reason {
                let _ = writeln!(out, "reason: {}", json_token(&r));
            }
            if let Some(c) = cert.structural_case {
                let _ = writeln!(out, "structural_case: {}", json_token(&c));
            }
            if let Some(s) = cert.orbit_size {
                let _ = writeln!(out, "orbit_size: {s}");
            }
            if let Some(w) = &cert.witness_word {
                let _ = writeln!(out, "witness_word: {w}");
            }
            if let Some(w) = &cert.witness_triple {
                let _ = writeln!(out, "witness_triple: {w}");
            }
            out
        }
    };
    Ok(Outcome::ok(code, stdout))
}

fn cmd_orbit(cli: &Cli, text: &str, max_orbit: usize) -> Result<Outcome> {
    let t = parse_triple(text)?;
    let orbit = braid_orbit_capped(&t, max_orbit)?;
    let stdout = match cli.format {
        Format::Json => {
            let members: Vec<_> = orbit
                .members()
                .iter()
                .map(|(k, w)| json!({ "key": k, "word": w, "triple": k.to_triple() }))
                .collect();
            to_json(&json!({
                "schema": ORBIT_SCHEMA,
                "degree": t.degree(),
                "start": orbit.start(),
                "size": orbit.len(),
                "least_key": orbit.least_key(),
                "members": members,
            }))?
        }
        _ => {
            let mut out = format!(
                "# {ORBIT_SCHEMA} degree={} size={}\n",
                t.degree(),
                orbit.len()
            );
            let _ = writeln!(out, "start\t{}", orbit.start());
            let _ = writeln!(out, "key\tword\ttriple");
            for (k, w) in orbit.members() {
                let word = if w.is_empty() {
                    "-".to_string()
                } else {
                    w.to_string()
                };
                let _ = writeln!(out, "{k}\t{word}\t{}", k.to_triple());
            }
            out
        }
    };
    Ok(Outcome::ok(EXIT_OK, stdout))
}

fn group_text(g: &GroupReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "group: {}", g.name);
    let _ = writeln!(out, "order: {}", g.order);
    let _ = writeln!(out, "transitive: {}", mark(g.transitive));
    let _ = writeln!(out, "primitive: {}", mark(g.primitive));
    for b in &g.minimal_block_systems {
        let _ = writeln!(out, "block_system: {b}");
    }
    if let Some(j) = &g.jordan {
        let _ = write!(
            out,
            "jordan: {} tried={}",
            json_token(&j.verdict),
            j.candidates_tried
        );
        if let Some(w) = &j.witness {
            let _ = write!(out, " witness={}", w.format_cycles());
        }
        out.push('\n');
    }
    out
}

fn cmd_group(cli: &Cli, text: &str) -> Result<Outcome> {
    let t = parse_triple(text)?;
    let gens: Vec<Permutation> = t.coords().into_iter().cloned().collect();
    let report = identify_with_seed(&gens, cli.seed)?;
    let stdout = match cli.format {
        Format::Json => to_json(&json!({
            "schema": GROUP_SCHEMA,
            "seed": cli.seed,
            "triple": t,
            "report": report,
        }))?,
        _ => format!(
            "# {GROUP_SCHEMA} degree={} seed={}\ntriple: {t}\n{}",
            t.degree(),
            cli.seed,
            group_text(&report)
        ),
    };
    Ok(Outcome::ok(EXIT_OK, stdout))
}

fn cmd_census(
    cli: &Cli,
    n: usize,
    budget: u64,
    max_orbit: usize,
    resume: Option<&PathBuf>,
) -> Result<Outcome> {
    let budget = CensusBudget {
        max_work: budget,
        max_orbit,
        seed: cli.seed,
    };
    let previous: Option<Checkpoint> = match resume {
        Some(path) if path.exists() => {
            let text = std::fs::read_to_string(path)?;
            Some(serde_json::from_str(&text)?)
        }
        _ => None,
    };
    let run = run_census_from(n, &budget, previous.as_ref())?;
    if let Some(path) = resume {
        std::fs::write(path, to_json(&run.checkpoint)?)?;
    }
    let census = run.census;
    let code = if census.complete {
        EXIT_OK
    } else {
        EXIT_BUDGET
    };
    let stdout = match cli.format {
        Format::Json => to_json(&census)?,
        Format::Tsv => to_tsv(&census),
        Format::Text => census_text(&census),
    };
    let stderr = if census.complete {
        String::new()
    } else {
        format!(
            "warning: census incomplete, {} of {} partitions processed\n",
            census.partitions_processed, census.partitions_total
        )
    };
    Ok(Outcome {
        code,
        stdout,
        stderr,
    })
}

fn census_text(c: &Census) -> String {
    let mut out = to_tsv(c);
    let s = &c.summary;
    let _ = writeln!(
        out,
        "# partitions {}/{} curves={}",
        c.partitions_processed, c.partitions_total, s.curves
    );
    for (name, count) in &s.counts {
        let _ = writeln!(out, "# {name}: {count}");
    }
    if let Some(rate) = s.same_sign_rate() {
        let _ = writeln!(
            out,
            "# same_sign: {}/{} ({:.1}%)",
            s.same_sign_passed,
            s.same_sign_checked,
            rate * 100.0
        );
    }
    if let (Some(lo), Some(hi)) = (s.min_orbit, s.max_orbit) {
        let _ = writeln!(out, "# orbit_size: min={lo} max={hi}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run(std::iter::once("pillowtile").chain(args.iter().copied()))
    }

    #[test]
    fn family_text_and_exit_codes() {
        let out = go(&["family", "5"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("b = (1 4 2 3 5)"));
        assert_eq!(go(&["family", "3"]).code, EXIT_INPUT);
        let even = go(&["family", "4"]);
        assert_eq!(even.code, EXIT_INPUT);
        assert!(even.stderr.contains("even degree 4"));
        assert!(even.stdout.contains("survivors=0"));
    }

    #[test]
    fn certify_exit_codes() {
        assert_eq!(
            go(&["certify", "5: (1 2 3 4 5); (1 4 2 3 5); (1 3 4 2 5)"]).code,
            EXIT_OK
        );
        let neg = go(&["certify", "4: (1 2 3 4); (1 2 3 4); (1 2 3 4)"]);
        assert_eq!(neg.code, EXIT_NEGATIVE);
        assert!(neg.stdout.contains("witness_word"));
        let disc = go(&["certify", "5: (1 2); (3 4); ()"]);
        assert_eq!(disc.code, EXIT_INPUT);
        assert!(disc.stderr.contains("transitive"));
        let bad = go(&["certify", "5: (1 2"]);
        assert_eq!(bad.code, EXIT_INPUT);
        assert_ne!(bad.stderr, disc.stderr);
        let big = go(&[
            "certify",
            "--max-orbit",
            "2",
            "--mode",
            "exhaustive",
            "7: (1 2 3 4 5 6 7); (1 6 2 5 3 4 7); (1 4 5 3 6 2 7)",
        ]);
        assert_eq!(big.code, EXIT_INPUT);
        assert!(big.stderr.contains("orbit"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(go(&[]).code, EXIT_INPUT);
        assert_eq!(go(&["family"]).code, EXIT_INPUT);
        assert_eq!(go(&["--threads", "0", "family", "5"]).code, EXIT_INPUT);
        assert_eq!(go(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn census_budget_exit_code() {
        let out = go(&["census", "5", "--budget", "0"]);
        assert_eq!(out.code, EXIT_BUDGET);
        assert!(out.stdout.contains("complete=false"));
        assert_eq!(go(&["census", "4"]).code, EXIT_OK);
    }
}
