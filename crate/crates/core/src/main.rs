use std::cmp::Ordering;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value as Json;

use zariski::action::{apply, orbit_witness};
use zariski::checks;
use zariski::json::{
    automorphism_from_json, automorphism_to_json, field_from_json, fingerprint_to_json, int_vector,
    polynomial_from_json, preorder_from_json, preorder_to_json, rows_from_json, value_to_json,
};
use zariski::lattice::{meet, refines};
use zariski::topology::{distance, enumerate_fragment, fingerprint, perturb_in_ball, same_type_neighbors};
use zariski::valuation::valuate;
use zariski::{Error, NumberField};

/// Exact computations with preorders on Q^n.
///
/// Inputs are JSON documents given as a file path, `-` for stdin, or inline
/// text starting with `{`.
#[derive(Parser)]
#[command(name = "zr", version)]
struct Cli {
    /// Number field for all inputs: {"min_poly": [...], "isolating": [lo, hi]}, inline or @file.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form with rank, degree and type.
    Canon { input: Option<String> },
    /// Compare two integer vectors: prints <, ~ or >.
    Compare {
        preorder: String,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Greatest common coarsening.
    Meet { p: String, q: String },
    /// Whether Q refines P.
    Refines { p: String, q: String },
    /// Ultrametric distance, searched over boxes up to m-max.
    Distance {
        p: String,
        q: String,
        #[arg(long, default_value_t = 5)]
        m_max: u64,
    },
    /// A different preorder within distance 1/(m+1).
    Witness {
        preorder: String,
        #[arg(long)]
        m: u64,
        /// Require the same type as the input.
        #[arg(long)]
        same_type: bool,
        /// Number of pairwise distinct same-type neighbours.
        #[arg(long)]
        count: Option<usize>,
    },
    /// DOT graph of preorders generated by candidate rows.
    Fragment {
        candidates: String,
        #[arg(long)]
        max_rank: Option<usize>,
    },
    /// Apply an automorphism {"matrix": ...} to a preorder.
    Act { phi: String, preorder: String },
    /// An automorphism carrying P to Q.
    Orbit { p: String, q: String },
    /// Monomial valuation of a Laurent polynomial.
    Valuate { preorder: String, polynomial: String },
    /// Signs on the box {-level..level}^n.
    Fingerprint {
        preorder: String,
        #[arg(long)]
        level: i64,
    },
    /// Run property suites: axioms, lattice, metric, action, valuation or all.
    Check {
        suite: String,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
    /// A property suite failed; carries the JSON report.
    Suite(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Domain(Error::Parse(_)) => 1,
            Failure::Domain(Error::Isolated | Error::WitnessNotFound(_) | Error::TypeMismatch(..)) => 3,
            Failure::Domain(_) | Failure::Suite(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Suite(_) => "property suite failed".into(),
            Failure::Domain(Error::Isolated) => "isolated".into(),
            Failure::Domain(e) => e.to_string(),
        }
    }
}

fn read_source(arg: &str) -> Result<String, Failure> {
    let arg = arg.trim_start();
    if arg.starts_with('{') || arg.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    let path = arg.strip_prefix('@').unwrap_or(arg);
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

fn read_json(arg: &str) -> Result<Json, Failure> {
    let text = read_source(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed JSON: {e}")))
}

fn pretty(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let field = match &cli.field {
        None => NumberField::rationals(),
        Some(f) => field_from_json(&read_json(f)?)?,
    };
    let preorder = |arg: &str| -> Result<_, Failure> { Ok(preorder_from_json(&field, &read_json(arg)?)?) };
    Ok(match &cli.command {
        Command::Canon { input } => pretty(&preorder_to_json(&preorder(input.as_deref().unwrap_or("-"))?)),
        Command::Compare { preorder: p, u, v } => {
            let p = preorder(p)?;
            let (u, v) = (int_vector(u)?, int_vector(v)?);
            if u.len() != v.len() {
                return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() }.into());
            }
            let symbol = match p.compare(&u, &v)? {
                Ordering::Less => "<",
                Ordering::Equal => "~",
                Ordering::Greater => ">",
            };
            format!("{symbol}\n")
        }
        Command::Meet { p, q } => pretty(&preorder_to_json(&meet(&preorder(p)?, &preorder(q)?)?)),
        Command::Refines { p, q } => format!("{}\n", refines(&preorder(p)?, &preorder(q)?)?),
        Command::Distance { p, q, m_max } => {
            format!("{}\n", distance(&preorder(p)?, &preorder(q)?, *m_max)?)
        }
        Command::Witness { preorder: p, m, same_type, count } => {
            let p = preorder(p)?;
            match count {
                Some(c) => {
                    let found = same_type_neighbors(&p, *m, *c)?;
                    pretty(&Json::Array(found.iter().map(preorder_to_json).collect()))
                }
                None => pretty(&preorder_to_json(&perturb_in_ball(&p, *m, *same_type)?)),
            }
        }
        Command::Fragment { candidates, max_rank } => {
            let (n, rows) = rows_from_json(&field, &read_json(candidates)?)?;
            enumerate_fragment(&field, &rows, n, max_rank.unwrap_or(n))?.to_dot()
        }
        Command::Act { phi, preorder: p } => {
            let phi = automorphism_from_json(&read_json(phi)?)?;
            pretty(&preorder_to_json(&apply(&phi, &preorder(p)?)?))
        }
        Command::Orbit { p, q } => pretty(&automorphism_to_json(&orbit_witness(&preorder(p)?, &preorder(q)?)?)),
        Command::Valuate { preorder: p, polynomial } => {
            let f = polynomial_from_json(&read_json(polynomial)?)?;
            pretty(&value_to_json(&valuate(&preorder(p)?, &f)?))
        }
        Command::Fingerprint { preorder: p, level } => {
            if *level < 0 {
                return Err(Failure::Usage("level must be non-negative".into()));
            }
            pretty(&fingerprint_to_json(&fingerprint(&preorder(p)?, *level)))
        }
        Command::Check { suite, cases } => {
            let reports = checks::run(suite, cli.seed, *cases).ok_or_else(|| {
                Failure::Usage(format!("unknown suite {suite:?}; expected one of {:?} or all", checks::SUITES))
            })?;
            let out = pretty(&checks::report_json(cli.seed, *cases, &reports));
            if !reports.iter().all(|r| r.passed()) {
                return Err(Failure::Suite(out));
            }
            out
        }
    })
}

/// Exit code, stdout and stderr of one invocation.
struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 1, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let (code, out, stderr) = match run(&cli) {
        Ok(out) => (0, out, String::new()),
        Err(Failure::Suite(report)) => (2, report, "zr: property suite failed\n".into()),
        Err(f) => return Outcome { code: f.exit_code(), stdout: String::new(), stderr: format!("zr: {}\n", f.message()) },
    };
    match &cli.out {
        Some(path) => match fs::write(path, &out) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("zr: {}: {e}\n", path.display()) },
        },
        None => Outcome { code, stdout: out, stderr },
    }
}

fn main() -> ExitCode {
    let outcome = execute(std::env::args_os());
    let _ = io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: &str = r#"{"min_poly":[-2,0,1],"isolating":["1","2"]}"#;

    fn zr(args: &[&str]) -> (u8, String, String) {
        let o = execute(std::iter::once("zr").chain(args.iter().copied()));
        (o.code, o.stdout, o.stderr)
    }

    fn json(s: &str) -> Json {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn canon_scales_and_summarizes() {
        let (code, out, _) = zr(&["canon", r#"{"n":2,"rows":[["2","0"]]}"#]);
        assert_eq!(code, 0);
        let v = json(&out);
        assert_eq!(v["rows"], json(r#"[["1","0"]]"#));
        assert_eq!(v["summary"]["rank"], 1);
        let (_, out, _) = zr(&["canon", r#"{"n":3,"rows":[]}"#]);
        assert_eq!(json(&out)["summary"]["degree"], 3);
        let (_, out, _) = zr(&["--field", SQRT2, "canon", r#"{"n":2,"rows":[["1","a"],["0","1"]]}"#]);
        let v = json(&out);
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
        assert_eq!(v["summary"]["type"], json("[2]"));
    }

    #[test]
    fn canon_round_trip() {
        let (_, first, _) = zr(&["--field", SQRT2, "canon", r#"{"n":3,"rows":[["3","a","1"],[0,0,"-2"]]}"#]);
        let (_, second, _) = zr(&["--field", SQRT2, "canon", &first]);
        assert_eq!(second, first);
    }

    #[test]
    fn exit_codes() {
        let (code, _, _) = zr(&["canon", "{not json"]);
        assert_eq!(code, 1);
        let (code, _, err) = zr(&["--field", r#"{"min_poly":[-4,0,1],"isolating":["1","3"]}"#, "canon", r#"{"n":1}"#]);
        assert_eq!(code, 2, "{err}");
        let (code, _, _) = zr(&["--field", r#"{"min_poly":[-2,0,1],"isolating":["-2","2"]}"#, "canon", r#"{"n":1}"#]);
        assert_eq!(code, 2);
        let (code, _, err) = zr(&["witness", r#"{"n":2,"rows":[[1,0]]}"#, "--m", "3"]);
        assert_eq!(code, 3);
        assert!(err.contains("isolated"));
        let (code, _, _) = zr(&["--field", SQRT2, "orbit", r#"{"n":2,"rows":[["1","a"]]}"#, r#"{"n":2,"rows":[[1,0],[0,1]]}"#]);
        assert_eq!(code, 3);
        let (code, _, _) = zr(&["check", "nonsense"]);
        assert_eq!(code, 1);
        let (code, _, _) = zr(&["frobnicate"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn small_commands() {
        let lex = r#"{"n":2,"rows":[[1,0],[0,1]]}"#;
        let e1 = r#"{"n":2,"rows":[[1,0]]}"#;
        assert_eq!(zr(&["compare", lex, "--u", "0,5", "--v", "1,-7"]).1, "<\n");
        assert_eq!(zr(&["compare", e1, "--u", "2,5", "--v", "2,-7"]).1, "~\n");
        assert_eq!(zr(&["refines", e1, lex]).1, "true\n");
        assert_eq!(zr(&["refines", lex, e1]).1, "false\n");
        assert_eq!(zr(&["distance", lex, lex, "--m-max", "5"]).1, "0\n");
        assert_eq!(zr(&["distance", lex, e1, "--m-max", "5"]).1, "1/1\n");
        let (_, out, _) = zr(&["meet", lex, r#"{"n":2,"rows":[[1,0],[0,-1]]}"#]);
        assert_eq!(json(&out)["rows"], json(r#"[["1","0"]]"#));
        let (_, out, _) = zr(&["act", r#"{"matrix":[["0","1"],["1","0"]]}"#, e1]);
        assert_eq!(json(&out)["rows"], json(r#"[["0","1"]]"#));
        let f = r#"{"n":2,"terms":[{"e":[1,0],"c":1},{"e":[0,1],"c":"1/2"}]}"#;
        let (_, out, _) = zr(&["valuate", lex, f]);
        assert_eq!(json(&out)["value"], json(r#"["0","1"]"#));
        let (_, out, _) = zr(&["valuate", lex, r#"{"n":2,"terms":[]}"#]);
        assert_eq!(json(&out)["value"], "inf");
        let (_, out, _) = zr(&["fingerprint", e1, "--level", "1"]);
        assert_eq!(json(&out)["signs"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn fragment_dot() {
        let (code, dot, _) = zr(&["fragment", r#"{"n":1,"rows":[["1"],["-1"]]}"#]);
        assert_eq!(code, 0);
        assert!(dot.starts_with("digraph zr {"));
        assert!(dot.contains(r#"n1 [label="lex[(1)]\nrank 1, degree 0, type (1)"];"#));
        let (_, dot, _) = zr(&["fragment", r#"{"n":2,"rows":[[1,0],[-1,0],[0,1],[0,-1]]}"#]);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 13);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 12);
    }

    #[test]
    fn witnesses_and_output_file() {
        let dir = std::env::temp_dir().join(format!("zr-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.json");
        let (code, stdout, _) = zr(&[
            "--field",
            SQRT2,
            "--out",
            path.to_str().unwrap(),
            "witness",
            r#"{"n":2,"rows":[["1","a"]]}"#,
            "--m",
            "4",
            "--count",
            "3",
        ]);
        assert_eq!(code, 0);
        assert!(stdout.is_empty());
        let v = json(&std::fs::read_to_string(&path).unwrap());
        assert_eq!(v.as_array().unwrap().len(), 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn check_reports() {
        let (code, out, _) = zr(&["--seed", "1", "check", "metric", "--cases", "100"]);
        assert_eq!(code, 0);
        let v = json(&out);
        assert_eq!(v["passed"], true);
        assert_eq!(v["suites"][0]["name"], "metric");
        let (code, out, _) = zr(&["check", "all", "--cases", "5"]);
        assert_eq!(code, 0);
        assert_eq!(json(&out)["suites"].as_array().unwrap().len(), 5);
    }
}
