//! Packaged, machine-checkable claims about small instances.
//!
//! Each claim fixes an instance, a mode of evidence and a predicate. Running
//! a claim yields a [`ClaimResult`]; results are reported in id order.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arena::{run_match, run_suite, standard_suite, MatchOptions};
use crate::families::{generate, FamilySpec, Generated};
use crate::solver::{best_response_robbers, solve, Limits, SolveError};
use crate::strategies::{central_edge, CopPolicy, RobberTeamPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ExactSolve,
    BestResponse,
    SuiteSimulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    /// Only the fallback one-sided checks ran, and both held.
    #[serde(rename = "PASS(weak)")]
    PassWeak,
    #[serde(rename = "FAIL")]
    Fail,
    /// Budget exhausted before a verdict.
    #[serde(rename = "SKIPPED")]
    Skipped,
}

impl Status {
    pub fn passed(self) -> bool {
        matches!(self, Status::Pass | Status::PassWeak)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub family: String,
    pub n: usize,
    pub s: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_states: usize,
    pub max_seconds: f64,
}

impl From<Budget> for Limits {
    fn from(b: Budget) -> Limits {
        Limits {
            max_states: b.max_states,
            max_seconds: b.max_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Check {
    ValueEq(usize),
    ValueAtMost(usize),
    /// Exact value, falling back to one-sided best-response checks when the
    /// solve runs out of budget.
    ExactOrBracket(usize),
    /// Best response vs guard(center) damages at most `bound`, never the center.
    GuardStar { bound: usize },
    SuiteMinAtLeast { team: RobberTeamPolicy, bound: usize },
    CycleAttacks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationClaim {
    pub id: String,
    /// Short quotation of the statement being checked.
    pub anchor: String,
    pub instance: Instance,
    pub mode: Mode,
    pub predicate: String,
    pub budget: Budget,
    #[serde(skip)]
    spec: Option<FamilySpec>,
    #[serde(skip)]
    check: Option<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: String,
    pub anchor: String,
    pub instance: Instance,
    pub mode: Mode,
    pub predicate: String,
    pub status: Status,
    pub measured: Value,
    pub detail: String,
    pub runtime_seconds: f64,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown claim {0}")]
    UnknownClaim(String),
}

const DEFAULT_BUDGET: Budget = Budget {
    max_states: 20_000_000,
    max_seconds: 1800.0,
};

fn claim(
    id: &str,
    anchor: &str,
    spec: FamilySpec,
    s: usize,
    mode: Mode,
    predicate: &str,
    check: Check,
) -> VerificationClaim {
    let n = generate(spec).map(|g| g.graph.n()).unwrap_or(0);
    VerificationClaim {
        id: id.into(),
        anchor: anchor.into(),
        instance: Instance {
            family: spec.to_string(),
            n,
            s,
        },
        mode,
        predicate: predicate.into(),
        budget: DEFAULT_BUDGET,
        spec: Some(spec),
        check: Some(check),
    }
}

/// All packaged claims, sorted by id.
pub fn claims() -> Vec<VerificationClaim> {
    use Mode::*;
    let mut out = vec![
        claim(
            "patrol-p2",
            "save two vertices",
            FamilySpec::Path(2),
            2,
            ExactSolve,
            "value = 0",
            Check::ValueEq(0),
        ),
        claim(
            "star3-save-three-s2",
            "the cop can indeed save three",
            FamilySpec::Star(3),
            2,
            ExactSolve,
            "value <= n-3 = 1",
            Check::ValueAtMost(1),
        ),
        claim(
            "star-lemma-s2-t3",
            "the robbers damage at most",
            FamilySpec::Star(3),
            2,
            BestResponse,
            "damage <= 1 vs guard(center), center never damaged",
            Check::GuardStar { bound: 1 },
        ),
        claim(
            "star-lemma-s2-t4",
            "the robbers damage at most",
            FamilySpec::Star(4),
            2,
            BestResponse,
            "damage <= 1 vs guard(center), center never damaged",
            Check::GuardStar { bound: 1 },
        ),
        claim(
            "star-lemma-s3",
            "the robbers damage at most",
            FamilySpec::Star(5),
            3,
            BestResponse,
            "damage <= 3 vs guard(center), center never damaged",
            Check::GuardStar { bound: 3 },
        ),
        claim(
            "c14-exact",
            "damage all but at most two vertices",
            FamilySpec::Gprime(2),
            2,
            ExactSolve,
            "value = 12",
            Check::ExactOrBracket(12),
        ),
        claim(
            "gprime4-script-s3",
            "damage all but at most two vertices",
            FamilySpec::Gprime(4),
            3,
            SuiteSimulation,
            "min suite damage >= 24, one closed neighborhood at the boundary",
            Check::SuiteMinAtLeast {
                team: RobberTeamPolicy::ScriptGprime,
                bound: 24,
            },
        ),
        claim(
            "g8-script-s4",
            "damage all but at most two vertices",
            FamilySpec::G(8),
            4,
            SuiteSimulation,
            "min suite damage >= 48",
            Check::SuiteMinAtLeast {
                team: RobberTeamPolicy::ScriptG,
                bound: 48,
            },
        ),
        claim(
            "cycle-attack-gprime4",
            "in finitely many moves without",
            FamilySpec::Gprime(4),
            3,
            SuiteSimulation,
            "no captures on any great cycle; stationary off-cycle cop loses the whole cycle",
            Check::CycleAttacks,
        ),
        claim(
            "cycle-attack-g4",
            "in finitely many moves without",
            FamilySpec::G(4),
            3,
            SuiteSimulation,
            "no captures on any great cycle; stationary off-cycle cop loses the whole cycle",
            Check::CycleAttacks,
        ),
    ];
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

pub fn find_claim(id: &str) -> Result<VerificationClaim, VerifyError> {
    claims()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| VerifyError::UnknownClaim(id.into()))
}

struct Outcome {
    status: Status,
    measured: Value,
    detail: String,
}

fn verdict(ok: bool, measured: Value, detail: impl Into<String>) -> Outcome {
    Outcome {
        status: if ok { Status::Pass } else { Status::Fail },
        measured,
        detail: detail.into(),
    }
}

fn skipped(e: &SolveError) -> Outcome {
    Outcome {
        status: Status::Skipped,
        measured: Value::Null,
        detail: e.to_string(),
    }
}

fn failed(detail: String) -> Outcome {
    Outcome {
        status: Status::Fail,
        measured: Value::Null,
        detail,
    }
}

/// Runs one claim. `budget` overrides the claim's own budget.
pub fn run_claim(c: &VerificationClaim, budget: Option<Budget>) -> ClaimResult {
    let started = Instant::now();
    let budget = budget.unwrap_or(c.budget);
    let limits: Limits = budget.into();
    let outcome = match (c.spec, &c.check) {
        (Some(spec), Some(check)) => match generate(spec) {
            Ok(gen) => evaluate(&gen, c.instance.s, check, &limits),
            Err(e) => failed(e.to_string()),
        },
        _ => failed("claim has no instance".into()),
    };
    ClaimResult {
        id: c.id.clone(),
        anchor: c.anchor.clone(),
        instance: c.instance.clone(),
        mode: c.mode,
        predicate: c.predicate.clone(),
        status: outcome.status,
        measured: outcome.measured,
        detail: outcome.detail,
        runtime_seconds: started.elapsed().as_secs_f64(),
    }
}

/// Runs claims in id order.
pub fn run_claims(cs: &[VerificationClaim], budget: Option<Budget>) -> Vec<ClaimResult> {
    let mut out: Vec<ClaimResult> = cs.iter().map(|c| run_claim(c, budget)).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

fn evaluate(gen: &Generated, s: usize, check: &Check, limits: &Limits) -> Outcome {
    let g = &gen.graph;
    let lm = gen.landmarks.as_ref();
    match check {
        Check::ValueEq(want) => match solve(g, s, limits) {
            Ok(r) => verdict(r.value == *want, json!({ "value": r.value }), format!("value {}", r.value)),
            Err(e) => skipped(&e),
        },
        Check::ValueAtMost(bound) => match solve(g, s, limits) {
            Ok(r) => verdict(r.value <= *bound, json!({ "value": r.value }), format!("value {}", r.value)),
            Err(e) => skipped(&e),
        },
        Check::ExactOrBracket(value) => match solve(g, s, limits) {
            Ok(r) => verdict(r.value == *value, json!({ "value": r.value }), format!("value {}", r.value)),
            Err(SolveError::LimitExceeded { .. }) => bracket(gen, s, *value, limits),
            Err(e) => skipped(&e),
        },
        Check::GuardStar { bound } => match best_response_robbers(g, s, &CopPolicy::Guard(0), limits) {
            Ok(br) => {
                let center_safe = !br.ever_damaged.contains(&0);
                verdict(
                    br.value <= *bound && center_safe,
                    json!({ "damage": br.value, "center_damaged": !center_safe }),
                    format!("best response damage {}", br.value),
                )
            }
            Err(e) => skipped(&e),
        },
        Check::SuiteMinAtLeast { team, bound } => {
            let suite = standard_suite(g, lm);
            let opts = MatchOptions {
                limits: *limits,
                ..MatchOptions::default()
            };
            match run_suite(g, lm, s, team, &suite, &opts) {
                Ok((sum, _)) => {
                    let nb_ok = sum.matches.iter().all(|m| m.neighborhood_ok != Some(false));
                    let worst: Vec<String> = sum
                        .matches
                        .iter()
                        .filter(|m| m.damage < *bound)
                        .map(|m| format!("{}={}", m.cop_policy, m.damage))
                        .collect();
                    let detail = if worst.is_empty() {
                        format!("min damage {}", sum.min_damage)
                    } else {
                        format!("below bound: {}", worst.join(", "))
                    };
                    verdict(
                        sum.min_damage >= *bound && nb_ok,
                        json!({ "min_damage": sum.min_damage, "max_damage": sum.max_damage, "neighborhood_ok": nb_ok }),
                        detail,
                    )
                }
                Err(e) => failed(e.to_string()),
            }
        }
        Check::CycleAttacks => cycle_attacks(gen, s, limits),
    }
}

/// One-sided checks for an exact value: the patrol best response bounds it
/// from above, and best responses to every finite-memory suite cop must all
/// reach it.
fn bracket(gen: &Generated, s: usize, value: usize, limits: &Limits) -> Outcome {
    let g = &gen.graph;
    let Some((u, v)) = central_edge(g) else {
        return failed("graph has no edge".into());
    };
    let upper = match best_response_robbers(g, s, &CopPolicy::Patrol(u, v), limits) {
        Ok(br) => br.value,
        Err(e) => return skipped(&e),
    };
    let mut lower = usize::MAX;
    for cop in standard_suite(g, gen.landmarks.as_ref()) {
        if matches!(cop, CopPolicy::RandomWalk(_)) {
            continue;
        }
        match best_response_robbers(g, s, &cop, limits) {
            Ok(br) => lower = lower.min(br.value),
            Err(e) => return skipped(&e),
        }
    }
    let ok = upper <= value && lower >= value;
    Outcome {
        status: if ok { Status::PassWeak } else { Status::Fail },
        measured: json!({ "patrol_best_response": upper, "suite_best_response_min": lower }),
        detail: format!("exact solve over budget; bracket [{lower}, {upper}]"),
    }
}

fn cycle_attacks(gen: &Generated, s: usize, limits: &Limits) -> Outcome {
    let g = &gen.graph;
    let Some(lm) = gen.landmarks.as_ref() else {
        return failed("family has no landmarks".into());
    };
    let suite = standard_suite(g, Some(lm));
    let opts = MatchOptions {
        limits: *limits,
        ..MatchOptions::default()
    };
    let mut captures = 0;
    let mut incomplete = Vec::new();
    let mut cycles = 0;
    for c in lm.great_cycles() {
        cycles += 1;
        let (i, j) = c.path_indices;
        let team = RobberTeamPolicy::CycleAttack(i, j);
        let (_, transcripts) = match run_suite(g, Some(lm), s, &team, &suite, &opts) {
            Ok(r) => r,
            Err(e) => return failed(e.to_string()),
        };
        captures += transcripts.iter().map(|t| t.robbers_caught).sum::<usize>();
        let off = (0..lm.path_count()).find(|&k| k != i && k != j);
        let Some(off) = off else { continue };
        let interior = lm.interior(off);
        let cop = CopPolicy::Stationary(interior[interior.len() / 2]);
        match run_match(g, Some(lm), s, &cop, &team, &opts) {
            Ok(t) if c.vertices.iter().all(|v| t.final_damaged.contains(v)) => {}
            Ok(_) => incomplete.push(format!("{i}-{j}")),
            Err(e) => return failed(e.to_string()),
        }
    }
    verdict(
        captures == 0 && incomplete.is_empty(),
        json!({ "cycles": cycles, "captures": captures, "incomplete_vs_stationary": incomplete }),
        format!("{cycles} cycles, {captures} captures"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claims_sorted_and_unique() {
        let cs = claims();
        assert!(cs.windows(2).all(|w| w[0].id < w[1].id));
        assert!(cs.iter().all(|c| !c.anchor.is_empty() && !c.predicate.is_empty() && c.instance.n > 0));
    }

    #[test]
    fn unknown_claim() {
        assert!(matches!(find_claim("nope"), Err(VerifyError::UnknownClaim(_))));
    }

    #[test]
    fn small_claims_pass() {
        for id in ["patrol-p2", "star3-save-three-s2", "star-lemma-s2-t3"] {
            let r = run_claim(&find_claim(id).unwrap(), None);
            assert_eq!(r.status, Status::Pass, "{id}: {}", r.detail);
        }
    }

    #[test]
    fn tiny_budget_skips() {
        let tiny = Budget {
            max_states: 3,
            max_seconds: 60.0,
        };
        let r = run_claim(&find_claim("star3-save-three-s2").unwrap(), Some(tiny));
        assert_eq!(r.status, Status::Skipped);
    }

    #[test]
    fn bracket_is_weak_pass_on_c14() {
        let gen = generate(FamilySpec::Gprime(2)).unwrap();
        let out = bracket(&gen, 2, 12, &Limits::default());
        assert_eq!(out.status, Status::PassWeak, "{}", out.detail);
    }
}
