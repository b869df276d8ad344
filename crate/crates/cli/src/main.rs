use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use resring::machines::{self, SimVerdict, WordContext};
use resring::parse::{parse_term_with, parse_wiring, VarScope};
use resring::queries::{self, OracleVerdict};
use resring::semiring::{naive_nilpotency, NaiveVerdict};
use resring::stack::{flatten, saturate, stack_nilpotent_with, StackConfig};
use resring::{unify, Signature, StackWiring, Term, Wiring};

#[derive(Parser)]
#[command(name = "resring", version, about = "Flows, wirings and stack nilpotency in the resolution semiring")]
struct Cli {
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for products and saturation (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Flatten stack wirings taller than this before deciding them.
    #[arg(long, global = true, value_name = "H", default_value_t = 8)]
    flatten_threshold: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Most general unifier of two terms.
    Unify { t: String, u: String },
    /// Product of two wirings.
    Product { f: String, g: String },
    /// Decide nilpotency of a wiring.
    Nilpotent {
        f: String,
        /// Iterate powers instead of saturating.
        #[arg(long)]
        naive: bool,
        #[arg(long, value_name = "N", default_value_t = 1000)]
        max_iter: usize,
    },
    /// Saturation of a unary wiring.
    Saturate { f: String },
    /// Height-2 flattening of a unary wiring.
    Flatten { f: String },
    /// Word representation over an alphabet such as `ab`.
    WordRep { alphabet: String, word: String },
    /// Check that a wiring is a balanced observation with stack.
    CheckObs { o: String },
    /// Whether an observation accepts a word.
    Accept { o: String, word: String },
    /// The stack wiring an observation and a word reduce to.
    Reduce { o: String, word: String },
    /// Encode an automaton as an observation.
    EncodeAutomaton { m: String },
    /// Run an automaton on a word.
    Simulate { m: String, word: String },
    /// Decide a unary query.
    Query {
        q: String,
        /// Search derivations breadth first instead of saturating.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_name = "N", default_value_t = 64)]
        depth: usize,
    },
    /// Encode a circuit as a unary query.
    CvpEncode { c: String },
    /// Evaluate a circuit.
    CvpEval { c: String },
}

/// What a command prints: body lines, a verdict, and whether it is a yes.
struct Report {
    lines: Vec<String>,
    verdict: Option<String>,
    yes: bool,
    extra: Value,
}

impl Report {
    fn text(body: impl ToString) -> Report {
        Report {
            lines: body.to_string().lines().map(String::from).collect(),
            verdict: None,
            yes: true,
            extra: Value::Null,
        }
    }

    fn verdict(mut self, v: &str, yes: bool) -> Report {
        self.verdict = Some(v.to_string());
        self.yes = yes;
        self
    }
}

fn read(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

/// Prefixes library errors with the input they come from.
fn located(path: &str) -> impl Fn(resring::Error) -> anyhow::Error + '_ {
    move |e| match e {
        resring::Error::Parse { .. } => anyhow!("{path}:{e}"),
        other => anyhow!("{path}: {other}"),
    }
}

fn load_wiring(path: &str) -> Result<Wiring> {
    parse_wiring(&read(path)?).map_err(located(path))
}

fn load_stack(path: &str) -> Result<StackWiring> {
    StackWiring::from_wiring(&load_wiring(path)?).map_err(located(path))
}

fn load_obs(path: &str) -> Result<machines::Observation> {
    machines::validate_observation(&load_wiring(path)?).map_err(located(path))
}

fn load_automaton(path: &str) -> Result<machines::Automaton> {
    machines::parse_automaton(&read(path)?).map_err(located(path))
}

fn load_circuit(path: &str) -> Result<queries::Circuit> {
    queries::parse_circuit(&read(path)?).map_err(located(path))
}

fn run(cli: &Cli) -> Result<Report> {
    let cfg = StackConfig {
        flatten_threshold: cli.flatten_threshold,
        ..StackConfig::default()
    };
    Ok(match &cli.command {
        Command::Unify { t, u } => {
            let mut sig = Signature::new();
            let mut vars = VarScope::new();
            let t = parse_term_with(t, &mut sig, &mut vars).map_err(located("T"))?;
            let u = parse_term_with(u, &mut sig, &mut vars).map_err(located("U"))?;
            let names = vars.names();
            match unify(&t, &u) {
                Some(s) => {
                    let bindings: Vec<String> =
                        s.iter().map(|(v, t)| format!("{} ↦ {}", Term::Var(*v).display_with(names), t.display_with(names))).collect();
                    let mut r = Report::text(format!("{{{}}}", bindings.join(", "))).verdict("unifiable", true);
                    r.extra = json!({ "substitution": bindings });
                    r
                }
                None => Report::text("").verdict("not unifiable", false),
            }
        }
        Command::Product { f, g } => {
            let p = load_wiring(f)?.product(&load_wiring(g)?);
            let zero = p.is_empty();
            Report::text(&p).verdict(if zero { "zero" } else { "nonzero" }, true)
        }
        Command::Nilpotent { f, naive, max_iter } => {
            if *naive {
                if *max_iter == 0 {
                    bail!("--max-iter must be positive");
                }
                match naive_nilpotency(&load_wiring(f)?, *max_iter) {
                    NaiveVerdict::Nilpotent(k) => Report::text(format!("F^{k} = 0")).verdict("nilpotent", true),
                    NaiveVerdict::CycleFound(k) => Report::text(format!("F^{k} contains a cycle")).verdict("cyclic", false),
                    NaiveVerdict::Inconclusive(k) => Report::text(format!("F^{k} ≠ 0")).verdict("inconclusive", false),
                }
            } else if stack_nilpotent_with(&load_stack(f)?, &cfg) {
                Report::text("").verdict("nilpotent", true)
            } else {
                Report::text("").verdict("cyclic", false)
            }
        }
        Command::Saturate { f } => Report::text(saturate(&load_stack(f)?)),
        Command::Flatten { f } => Report::text(flatten(&load_stack(f)?)),
        Command::WordRep { alphabet, word } => {
            if let Some(c) = word.chars().find(|c| !alphabet.contains(*c)) {
                bail!("letter `{c}` is not in the alphabet `{alphabet}`");
            }
            let ctx = WordContext::canonical(word).map_err(located("WORD"))?;
            Report::text(machines::word_rep(&ctx))
        }
        Command::CheckObs { o } => match machines::validate_observation(&load_wiring(o)?) {
            Ok(obs) => Report::text(format!("{} flows", obs.flows().len())).verdict("observation", true),
            Err(e @ resring::Error::Observation { .. }) => Report::text(e).verdict("not an observation", false),
            Err(e) => return Err(located(o)(e)),
        },
        Command::Accept { o, word } => {
            let obs = load_obs(o)?;
            let ctx = WordContext::canonical(word).map_err(located("WORD"))?;
            if machines::accepts_with(&obs, &ctx, &cfg) {
                Report::text("").verdict("accept", true)
            } else {
                Report::text("").verdict("reject", false)
            }
        }
        Command::Reduce { o, word } => Report::text(machines::reduce(&load_obs(o)?, word).map_err(located("WORD"))?),
        Command::EncodeAutomaton { m } => {
            let obs = machines::encode_automaton(&load_automaton(m)?).map_err(located(m))?;
            Report::text(obs.wiring())
        }
        Command::Simulate { m, word } => {
            let sim = machines::simulate(&load_automaton(m)?, word).map_err(located("WORD"))?;
            let mut r = match sim.verdict {
                SimVerdict::Accept => Report::text("").verdict("accept", true),
                SimVerdict::Reject => Report::text("").verdict("reject", false),
            };
            r.extra = json!({ "explored": sim.explored });
            r
        }
        Command::Query { q, oracle, depth } => {
            let query = queries::parse_query(&read(q)?).map_err(located(q))?;
            if *oracle {
                match queries::derivation_oracle(&query, *depth) {
                    OracleVerdict::Derived(d) => {
                        let rules: Vec<_> = query.program.iter().collect();
                        let mut lines = vec![format!("{}", d.datum)];
                        lines.extend(d.steps.iter().map(|s| format!("{}    by {}", s.fact, rules[s.rule])));
                        Report::text(lines.join("\n")).verdict("success", true)
                    }
                    OracleVerdict::Exhausted => Report::text("").verdict("fail", false),
                    OracleVerdict::Unknown => Report::text(format!("no derivation within depth {depth}")).verdict("unknown", false),
                }
            } else if queries::query_succeeds_with(&query, &cfg) {
                Report::text("").verdict("success", true)
            } else {
                Report::text("").verdict("fail", false)
            }
        }
        Command::CvpEncode { c } => Report::text(queries::encode_cvp(&load_circuit(c)?)),
        Command::CvpEval { c } => {
            let v = queries::eval_circuit(&load_circuit(c)?);
            Report::text(if v { "1" } else { "0" }).verdict(if v { "1" } else { "0" }, v)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                let v = json!({
                    "verdict": r.verdict,
                    "yes": r.yes,
                    "output": r.lines,
                    "details": r.extra,
                });
                println!("{v}");
            } else {
                for l in &r.lines {
                    println!("{l}");
                }
                if let Some(v) = &r.verdict {
                    println!("VERDICT: {v}");
                }
            }
            ExitCode::from(if r.yes { 0 } else { 1 })
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
