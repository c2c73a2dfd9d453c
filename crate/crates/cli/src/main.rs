//! `dmg`: generate graphs, solve small games, play matches and run the
//! packaged claims.
//!
//! Exit codes: 0 ok, 1 a verified claim failed, 2 bad input, 3 resource
//! budget exhausted, 4 a policy made an illegal move.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cops_damage::arena::{run_match, run_suite, standard_suite, ArenaError, MatchOptions};
use cops_damage::families::{generate, FamilySpec, Landmarks};
use cops_damage::solver::{best_response_robbers, solve, Limits, SolveError};
use cops_damage::strategies::{CopPolicy, RobberTeamPolicy};
use cops_damage::verify::{claims, find_claim, run_claims, Budget, Status};
use cops_damage::Graph;
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_POLICY: u8 = 4;

#[derive(Parser)]
#[command(name = "dmg", version, about = "Cops and robbers with damage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct LimitArgs {
    /// Stop after this many explored positions.
    #[arg(long, default_value_t = Limits::default().max_states)]
    limit_states: usize,
    /// Stop after this many seconds.
    #[arg(long, default_value_t = Limits::default().max_seconds)]
    limit_seconds: f64,
}

impl From<LimitArgs> for Limits {
    fn from(a: LimitArgs) -> Limits {
        Limits {
            max_states: a.limit_states,
            max_seconds: a.limit_seconds,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a family graph as an edge list.
    ///
    /// Families: star, path, cycle, complete, gprime, g. Landmarks of gprime
    /// and g go to stderr as JSON, and next to --out as
    /// <base>.landmarks.json.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        param: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact damage number; prints a JSON report.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        robbers: usize,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Play one match and print "damaged=D saved=K stop=REASON".
    ///
    /// Cop specs: guard:v, patrol:u-v, greedy, stationary:v, random:seed,
    /// guard+endgame:v, optimal. Robber-team specs: optimal,
    /// best-response:<cop spec>, stationary, cautious:v,v,..,
    /// cycleattack:i-j, allout, allout2, script:gprime, script:g.
    Play {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        robbers: usize,
        #[arg(long)]
        cop: String,
        #[arg(long)]
        robber_team: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_rounds: Option<u32>,
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Robber best response against a fixed cop policy; prints JSON.
    Respond {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        robbers: usize,
        #[arg(long)]
        cop: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run a robber team against the standard cop suite.
    Suite {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        robbers: usize,
        #[arg(long)]
        robber_team: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Check packaged claims; prints per-claim JSON sorted by id.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present_any = ["all", "list"])]
        claim: Option<String>,
        #[arg(long)]
        all: bool,
        /// List claim ids and exit.
        #[arg(long)]
        list: bool,
        /// Override every claim's state budget.
        #[arg(long)]
        budget_states: Option<usize>,
        /// Override every claim's time budget in seconds.
        #[arg(long)]
        budget_seconds: Option<f64>,
    },
}

/// Error carrying its exit code; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { family, param, out } => gen(&family, param, out.as_deref()),
        Command::Solve { graph, robbers, limits } => cmd_solve(&graph, robbers, limits.into()),
        Command::Play {
            graph,
            robbers,
            cop,
            robber_team,
            seed,
            max_rounds,
            transcript,
            limits,
        } => play(&graph, robbers, &cop, &robber_team, seed, max_rounds, transcript.as_deref(), limits.into()),
        Command::Respond {
            graph,
            robbers,
            cop,
            limits,
        } => respond(&graph, robbers, &cop, limits.into()),
        Command::Suite {
            graph,
            robbers,
            robber_team,
            seed,
            csv,
        } => suite(&graph, robbers, &robber_team, seed, csv),
        Command::Verify {
            claim,
            all,
            list,
            budget_states,
            budget_seconds,
        } => verify(claim.as_deref(), all, list, budget_states, budget_seconds),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("dmg: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

/// `g8.txt` -> `g8.landmarks.json`.
fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("landmarks.json")
}

fn gen(family: &str, param: usize, out: Option<&Path>) -> CmdResult {
    let spec = FamilySpec::from_parts(family, param).map_err(|e| input(e.to_string()))?;
    let gen = generate(spec).map_err(|e| input(e.to_string()))?;
    let text = gen.graph.to_edge_list();
    let landmarks = gen
        .landmarks
        .as_ref()
        .map(|lm| serde_json::to_string_pretty(lm).expect("landmarks serialize"));
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| input(format!("{}: {e}", path.display())))?;
            if let Some(lm) = &landmarks {
                let side = sidecar(path);
                fs::write(&side, lm).map_err(|e| input(format!("{}: {e}", side.display())))?;
            }
        }
        None => print!("{text}"),
    }
    if let Some(lm) = landmarks {
        eprintln!("{lm}");
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<(Graph, Option<Landmarks>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let g = Graph::parse_edge_list(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let side = sidecar(path);
    let landmarks = if side.exists() {
        let raw = fs::read_to_string(&side).map_err(|e| input(format!("{}: {e}", side.display())))?;
        let lm: Landmarks = serde_json::from_str(&raw).map_err(|e| input(format!("{}: {e}", side.display())))?;
        if lm.paths.iter().flatten().any(|&v| v >= g.n()) {
            return Err(input(format!("{}: landmarks do not fit the graph", side.display())));
        }
        Some(lm)
    } else {
        None
    };
    Ok((g, landmarks))
}

fn solver_failure(e: SolveError) -> Failure {
    match e {
        SolveError::LimitExceeded { reason, stats } => {
            let partial = json!({
                "status": "limit_exceeded",
                "reason": reason,
                "explored_states": stats.explored_states,
                "class_count": stats.class_count,
                "peak_memo_entries": stats.peak_memo_entries,
            });
            println!("{}", serde_json::to_string_pretty(&partial).expect("json"));
            Failure {
                code: EXIT_BUDGET,
                message: format!("resource limit exceeded ({reason})"),
            }
        }
        other => input(other.to_string()),
    }
}

fn cmd_solve(path: &Path, robbers: usize, limits: Limits) -> CmdResult {
    let (g, _) = load_graph(path)?;
    let report = solve(&g, robbers, &limits).map_err(solver_failure)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn play(
    path: &Path,
    robbers: usize,
    cop: &str,
    team: &str,
    seed: u64,
    max_rounds: Option<u32>,
    transcript: Option<&Path>,
    limits: Limits,
) -> CmdResult {
    let (g, landmarks) = load_graph(path)?;
    let cop: CopPolicy = cop.parse().map_err(|e| input(format!("{e}")))?;
    let team: RobberTeamPolicy = team.parse().map_err(|e| input(format!("{e}")))?;
    let opts = MatchOptions {
        max_rounds,
        seed,
        limits,
    };
    let write = |json: String| -> CmdResult {
        if let Some(p) = transcript {
            fs::write(p, json).map_err(|e| input(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    };
    match run_match(&g, landmarks.as_ref(), robbers, &cop, &team, &opts) {
        Ok(t) => {
            write(t.to_json())?;
            println!("{}", t.summary_line());
            Ok(())
        }
        Err(ArenaError::IllegalMove { transcript: t, policy, round, detail }) => {
            write(t.to_json())?;
            println!("{}", t.summary_line());
            Err(Failure {
                code: EXIT_POLICY,
                message: format!("{policy} failed in round {round}: {detail}"),
            })
        }
        Err(e @ ArenaError::Setup(_)) => Err(input(e.to_string())),
    }
}

fn respond(path: &Path, robbers: usize, cop: &str, limits: Limits) -> CmdResult {
    let (g, _) = load_graph(path)?;
    let cop: CopPolicy = cop.parse().map_err(|e| input(format!("{e}")))?;
    let br = best_response_robbers(&g, robbers, &cop, &limits).map_err(solver_failure)?;
    println!("{}", serde_json::to_string_pretty(&br).expect("json"));
    Ok(())
}

fn suite(path: &Path, robbers: usize, team: &str, seed: u64, csv: bool) -> CmdResult {
    let (g, landmarks) = load_graph(path)?;
    let team: RobberTeamPolicy = team.parse().map_err(|e| input(format!("{e}")))?;
    let cops = standard_suite(&g, landmarks.as_ref());
    let opts = MatchOptions {
        seed,
        ..MatchOptions::default()
    };
    match run_suite(&g, landmarks.as_ref(), robbers, &team, &cops, &opts) {
        Ok((summary, _)) => {
            if csv {
                print!("{}", summary.to_csv());
            } else {
                println!("{}", summary.to_json());
            }
            Ok(())
        }
        Err(e @ ArenaError::IllegalMove { .. }) => Err(Failure {
            code: EXIT_POLICY,
            message: e.to_string(),
        }),
        Err(e) => Err(input(e.to_string())),
    }
}

fn verify(
    claim: Option<&str>,
    all: bool,
    list: bool,
    budget_states: Option<usize>,
    budget_seconds: Option<f64>,
) -> CmdResult {
    if list {
        for c in claims() {
            println!("{}\t{}\t{}", c.id, c.instance.family, c.predicate);
        }
        return Ok(());
    }
    let selected = match (claim, all) {
        (Some(id), _) => vec![find_claim(id).map_err(|e| input(e.to_string()))?],
        (None, true) => claims(),
        (None, false) => return Err(input("pass --claim ID or --all")),
    };
    let budget = match (budget_states, budget_seconds) {
        (None, None) => None,
        (states, seconds) => {
            let d = Limits::default();
            Some(Budget {
                max_states: states.unwrap_or(d.max_states),
                max_seconds: seconds.unwrap_or(d.max_seconds),
            })
        }
    };
    let results = run_claims(&selected, budget);
    println!("{}", serde_json::to_string_pretty(&results).expect("json"));
    for r in &results {
        let status = serde_json::to_value(r.status).expect("json");
        eprintln!("{} {} ({})", status.as_str().unwrap_or("?"), r.id, r.detail);
    }
    if results.iter().any(|r| r.status == Status::Fail) {
        Err(Failure {
            code: EXIT_FAIL,
            message: String::new(),
        })
    } else if results.iter().any(|r| r.status == Status::Skipped) {
        Err(Failure {
            code: EXIT_BUDGET,
            message: "budget exhausted for at least one claim".into(),
        })
    } else {
        Ok(())
    }
}
