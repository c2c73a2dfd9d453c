//! Deterministic matches between a cop policy and a robber team, with
//! transcripts that replay through the rules.

use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::Landmarks;
use crate::graph::{Graph, Vertex};
use crate::rules::{GameState, JointRobberMove, RulesError};
use crate::solver::Limits;
use crate::strategies::{
    central_edge, graph_center, Boundary, CopAgent, CopMemory, CopPolicy, PolicyError, RobberAgent, RobberMemory,
    RobberTeamPolicy,
};

pub const TRANSCRIPT_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    AllCaught,
    StableCycle,
    MaxRounds,
    ScriptComplete,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::AllCaught => "all_caught",
            StopReason::StableCycle => "stable_cycle",
            StopReason::MaxRounds => "max_rounds",
            StopReason::ScriptComplete => "script_complete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    pub landmarks: Option<Landmarks>,
}

impl GraphRecord {
    pub fn new(g: &Graph, landmarks: Option<&Landmarks>) -> GraphRecord {
        GraphRecord {
            n: g.n(),
            edges: g.edges(),
            landmarks: landmarks.cloned(),
        }
    }

    pub fn graph(&self) -> Result<Graph, crate::graph::GraphError> {
        Graph::new(self.n, &self.edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub cop_move: Vertex,
    /// Robbers caught by the cop's move.
    pub cop_captures: Vec<usize>,
    /// Vertices newly damaged by this round's assessment.
    pub damaged: Vec<Vertex>,
    /// Absent when the cop's move caught the last robber.
    pub robber_move: Option<JointRobberMove>,
    /// Robbers that stepped onto the cop.
    pub robber_captures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub version: String,
    pub graph: GraphRecord,
    pub s: usize,
    pub cop_policy: String,
    pub robber_policy: String,
    pub seed: u64,
    pub max_rounds: u32,
    pub cop_start: Option<Vertex>,
    pub placement: Vec<Vertex>,
    pub placement_captures: Vec<usize>,
    pub rounds: Vec<RoundRecord>,
    pub stop: Option<StopReason>,
    pub final_damaged: Vec<Vertex>,
    pub damage: usize,
    pub saved: usize,
    pub robbers_caught: usize,
    pub flags: Vec<String>,
    pub cop_memory: Option<CopMemory>,
    pub robber_memory: Option<RobberMemory>,
    /// Phase boundary recorded by the composite scripts.
    pub boundary: Option<Boundary>,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    pub fn summary_line(&self) -> String {
        let stop = self.stop.map(|s| s.to_string()).unwrap_or_else(|| "error".into());
        format!("damaged={} saved={} stop={stop}", self.damage, self.saved)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArenaError {
    #[error("{policy} failed in round {round}: {detail}")]
    IllegalMove {
        policy: String,
        round: u32,
        detail: String,
        transcript: Box<Transcript>,
    },
    #[error("bad match setup: {0}")]
    Setup(String),
}

impl ArenaError {
    pub fn transcript(&self) -> Option<&Transcript> {
        match self {
            ArenaError::IllegalMove { transcript, .. } => Some(transcript),
            ArenaError::Setup(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    /// Defaults to `40 * n`.
    pub max_rounds: Option<u32>,
    /// Offsets the seeds of randomized policies.
    pub seed: u64,
    pub limits: Limits,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            max_rounds: None,
            seed: 0,
            limits: Limits::default(),
        }
    }
}

fn seeded(policy: &CopPolicy, seed: u64) -> CopPolicy {
    match policy {
        CopPolicy::RandomWalk(s) => CopPolicy::RandomWalk(s ^ seed),
        other => other.clone(),
    }
}

struct Recorder {
    t: Transcript,
    flags: Vec<String>,
}

impl Recorder {
    fn fail(mut self, policy: String, round: u32, state: &GameState, detail: String) -> ArenaError {
        self.finish(state, None, None, None);
        ArenaError::IllegalMove {
            policy,
            round,
            detail,
            transcript: Box::new(self.t),
        }
    }

    fn finish(&mut self, state: &GameState, stop: Option<StopReason>, cmem: Option<CopMemory>, rmem: Option<RobberMemory>) {
        let t = &mut self.t;
        t.stop = stop;
        t.final_damaged = state.damaged().to_vec();
        t.damage = t.final_damaged.len();
        t.saved = t.graph.n - t.damage;
        t.robbers_caught = state.robbers().iter().filter(|r| r.position().is_none()).count();
        t.flags = std::mem::take(&mut self.flags);
        t.boundary = rmem.as_ref().and_then(|m| m.script()).and_then(|m| m.boundary.clone());
        t.cop_memory = cmem;
        t.robber_memory = rmem;
    }

    fn flag(&mut self, mem: &CopMemory) {
        for f in mem.flags() {
            if !self.flags.iter().any(|x| x == f) {
                self.flags.push(f.to_string());
            }
        }
    }
}

/// Plays one match. Policy errors and illegal moves abort with the
/// transcript so far.
pub fn run_match(
    g: &Graph,
    landmarks: Option<&Landmarks>,
    s: usize,
    cop_policy: &CopPolicy,
    robber_policy: &RobberTeamPolicy,
    opts: &MatchOptions,
) -> Result<Transcript, ArenaError> {
    let max_rounds = opts.max_rounds.unwrap_or(40 * g.n() as u32);
    if max_rounds == 0 {
        return Err(ArenaError::Setup("max_rounds must be at least 1".into()));
    }
    let mut cop = CopAgent::new(seeded(cop_policy, opts.seed), s, opts.limits);
    let mut robbers = RobberAgent::new(robber_policy.clone(), s, opts.limits, landmarks.cloned());
    let cop_name = cop_policy.to_string();
    let robber_name = robber_policy.to_string();
    let mut rec = Recorder {
        t: Transcript {
            version: TRANSCRIPT_VERSION.into(),
            graph: GraphRecord::new(g, landmarks),
            s,
            cop_policy: cop_name.clone(),
            robber_policy: robber_name.clone(),
            seed: opts.seed,
            max_rounds,
            cop_start: None,
            placement: Vec::new(),
            placement_captures: Vec::new(),
            rounds: Vec::new(),
            stop: None,
            final_damaged: Vec::new(),
            damage: 0,
            saved: g.n(),
            robbers_caught: 0,
            flags: Vec::new(),
            cop_memory: None,
            robber_memory: None,
            boundary: None,
        },
        flags: Vec::new(),
    };
    let state = GameState::initial(g, s).map_err(|e| ArenaError::Setup(e.to_string()))?;
    let policy_fail = |e: PolicyError| e.to_string();
    let (start, mut cmem) = match cop.start(g) {
        Ok(x) => x,
        Err(e) => return Err(rec.fail(cop_name, 0, &state, policy_fail(e))),
    };
    let state = match state.place_cop(start) {
        Ok(st) => st,
        Err(e) => return Err(rec.fail(cop_name, 0, &state, e.to_string())),
    };
    rec.t.cop_start = Some(start);
    let (placement, mut rmem) = match robbers.place(g, &state) {
        Ok(x) => x,
        Err(e) => return Err(rec.fail(robber_name, 0, &state, policy_fail(e))),
    };
    let (mut state, events) = match state.place_robbers(&placement) {
        Ok(x) => x,
        Err(e) => return Err(rec.fail(robber_name, 0, &state, format!("placement {placement:?}: {e}"))),
    };
    rec.t.placement = placement;
    rec.t.placement_captures = events.captured;

    let mut seen: FxHashSet<(GameState, CopMemory, RobberMemory)> = FxHashSet::default();
    let stop = loop {
        if state.is_settled() {
            break StopReason::AllCaught;
        }
        if robbers.is_complete(&rmem) {
            break StopReason::ScriptComplete;
        }
        if !seen.insert((state.position_key(), cmem, rmem.clone())) {
            break StopReason::StableCycle;
        }
        let round = state.round();
        if round > max_rounds {
            break StopReason::MaxRounds;
        }
        let (dest, cmem2) = match cop.decide(g, &state, &cmem) {
            Ok(x) => x,
            Err(e) => return Err(rec.fail(cop_name, round, &state, policy_fail(e))),
        };
        let (after_cop, cev) = match state.apply_cop_move(g, dest) {
            Ok(x) => x,
            Err(e) => return Err(rec.fail(cop_name, round, &state, format!("move to {dest}: {e}"))),
        };
        cmem = cmem2;
        rec.flag(&cmem);
        let mut record = RoundRecord {
            round,
            cop_move: dest,
            cop_captures: cev.captured,
            damaged: cev.damaged,
            robber_move: None,
            robber_captures: Vec::new(),
        };
        if after_cop.is_settled() {
            rec.t.rounds.push(record);
            state = after_cop;
            continue;
        }
        let (mv, rmem2) = match robbers.decide(g, &after_cop, &rmem) {
            Ok(x) => x,
            Err(e) => {
                rec.t.rounds.push(record);
                return Err(rec.fail(robber_name, round, &after_cop, policy_fail(e)));
            }
        };
        let (next, rev) = match after_cop.apply_robber_move(g, &mv) {
            Ok(x) => x,
            Err(e) => {
                rec.t.rounds.push(record);
                return Err(rec.fail(robber_name, round, &after_cop, format!("move {:?}: {e}", mv.dests)));
            }
        };
        rmem = rmem2;
        record.robber_move = Some(mv);
        record.robber_captures = rev.captured;
        rec.t.rounds.push(record);
        state = next;
    };
    rec.finish(&state, Some(stop), Some(cmem), Some(rmem));
    Ok(rec.t)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("transcript graph is invalid: {0}")]
    Graph(String),
    #[error("round {round}: {detail}")]
    Mismatch { round: u32, detail: String },
    #[error(transparent)]
    Rules(#[from] RulesError),
}

/// Replays a transcript through the rules and checks every recorded
/// capture and damage addition, and the final damaged set.
pub fn replay(t: &Transcript) -> Result<(), ReplayError> {
    let g = t.graph.graph().map_err(|e| ReplayError::Graph(e.to_string()))?;
    let Some(start) = t.cop_start else {
        return Ok(());
    };
    let state = GameState::initial(&g, t.s)?.place_cop(start)?;
    if t.placement.is_empty() {
        return Ok(());
    }
    let (mut state, ev) = state.place_robbers(&t.placement)?;
    let mismatch = |round: u32, what: &str| ReplayError::Mismatch {
        round,
        detail: what.to_string(),
    };
    if ev.captured != t.placement_captures {
        return Err(mismatch(0, "placement captures differ"));
    }
    let mut last_round = 0;
    for r in &t.rounds {
        if r.round <= last_round || r.round != state.round() {
            return Err(mismatch(r.round, "round numbers out of sequence"));
        }
        last_round = r.round;
        let (after, cev) = state.apply_cop_move(&g, r.cop_move)?;
        if cev.captured != r.cop_captures {
            return Err(mismatch(r.round, "cop captures differ"));
        }
        if cev.damaged != r.damaged {
            return Err(mismatch(r.round, "damage additions differ"));
        }
        state = match &r.robber_move {
            Some(mv) => {
                let (next, rev) = after.apply_robber_move(&g, mv)?;
                if rev.captured != r.robber_captures {
                    return Err(mismatch(r.round, "robber captures differ"));
                }
                next
            }
            None => after,
        };
    }
    if t.stop.is_some() && state.damaged().to_vec() != t.final_damaged {
        return Err(mismatch(last_round, "final damaged set differs"));
    }
    Ok(())
}

/// Hubs of a landmarked graph, otherwise a center and a vertex farthest
/// from it.
pub fn reference_vertices(g: &Graph, landmarks: Option<&Landmarks>) -> (Vertex, Vertex) {
    if let Some(lm) = landmarks {
        return (lm.v1, lm.v2);
    }
    let c = graph_center(g);
    let far = g
        .bfs(c, None)
        .iter()
        .enumerate()
        .filter_map(|(v, d)| d.map(|d| (d, std::cmp::Reverse(v))))
        .max()
        .map(|(_, std::cmp::Reverse(v))| v)
        .unwrap_or(c);
    (c, far)
}

pub const SUITE_RANDOM_WALKS: u64 = 20;

/// guard(v1), guard(v2), greedy, patrol of a central edge, stationary(v2)
/// and 20 seeded random walks.
pub fn standard_suite(g: &Graph, landmarks: Option<&Landmarks>) -> Vec<CopPolicy> {
    let (v1, v2) = reference_vertices(g, landmarks);
    let mut suite = vec![CopPolicy::Guard(v1), CopPolicy::Guard(v2), CopPolicy::Greedy];
    if let Some((u, v)) = central_edge(g) {
        suite.push(CopPolicy::Patrol(u, v));
    }
    suite.push(CopPolicy::Stationary(v2));
    suite.extend((0..SUITE_RANDOM_WALKS).map(CopPolicy::RandomWalk));
    suite
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub cop_policy: String,
    pub damage: usize,
    pub saved: usize,
    pub stop: StopReason,
    pub rounds: usize,
    pub robbers_caught: usize,
    pub neighborhood_ok: Option<bool>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub robber_policy: String,
    pub s: usize,
    pub n: usize,
    pub seed: u64,
    pub min_damage: usize,
    pub max_damage: usize,
    pub mean_damage: f64,
    pub matches: Vec<MatchSummary>,
}

impl SuiteSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries serialize")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("cop_policy,damage,saved,stop,rounds,robbers_caught,neighborhood_ok,flags\n");
        for m in &self.matches {
            let nb = m.neighborhood_ok.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m.cop_policy,
                m.damage,
                m.saved,
                m.stop,
                m.rounds,
                m.robbers_caught,
                nb,
                m.flags.join(";")
            ));
        }
        out
    }
}

/// One match per suite cop, run in parallel; results keep suite order.
pub fn run_suite(
    g: &Graph,
    landmarks: Option<&Landmarks>,
    s: usize,
    robber_policy: &RobberTeamPolicy,
    suite: &[CopPolicy],
    opts: &MatchOptions,
) -> Result<(SuiteSummary, Vec<Transcript>), ArenaError> {
    if suite.is_empty() {
        return Err(ArenaError::Setup("empty cop suite".into()));
    }
    let results: Vec<Result<Transcript, ArenaError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = suite
            .iter()
            .map(|cop| scope.spawn(move || run_match(g, landmarks, s, cop, robber_policy, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("match thread panicked")).collect()
    });
    let transcripts = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let matches: Vec<MatchSummary> = transcripts
        .iter()
        .map(|t| MatchSummary {
            cop_policy: t.cop_policy.clone(),
            damage: t.damage,
            saved: t.saved,
            stop: t.stop.expect("finished match"),
            rounds: t.rounds.len(),
            robbers_caught: t.robbers_caught,
            neighborhood_ok: t.boundary.as_ref().map(|b| b.neighborhood_ok),
            flags: t.flags.clone(),
        })
        .collect();
    let damages: Vec<usize> = matches.iter().map(|m| m.damage).collect();
    let summary = SuiteSummary {
        robber_policy: robber_policy.to_string(),
        s,
        n: g.n(),
        seed: opts.seed,
        min_damage: *damages.iter().min().expect("nonempty"),
        max_damage: *damages.iter().max().expect("nonempty"),
        mean_damage: damages.iter().sum::<usize>() as f64 / damages.len() as f64,
        matches,
    };
    Ok((summary, transcripts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};

    #[test]
    fn patrol_on_p2_saves_both() {
        let g = generate(FamilySpec::Path(2)).unwrap().graph;
        let t = run_match(&g, None, 2, &CopPolicy::Patrol(0, 1), &RobberTeamPolicy::Optimal, &MatchOptions::default()).unwrap();
        assert_eq!(t.damage, 0);
        assert!(matches!(t.stop, Some(StopReason::AllCaught | StopReason::StableCycle)));
        replay(&t).unwrap();
    }

    #[test]
    fn guard_vs_best_response_witness() {
        let g = generate(FamilySpec::Star(3)).unwrap().graph;
        let cop = CopPolicy::Guard(0);
        let t = run_match(&g, None, 2, &cop, &RobberTeamPolicy::BestResponse(cop.clone()), &MatchOptions::default()).unwrap();
        assert!(t.damage <= 1);
        replay(&t).unwrap();
    }

    #[test]
    fn same_seed_same_transcript() {
        let g = generate(FamilySpec::Cycle(7)).unwrap().graph;
        let run = || {
            run_match(&g, None, 2, &CopPolicy::RandomWalk(3), &RobberTeamPolicy::Cautious(vec![0, 3]), &MatchOptions {
                seed: 9,
                ..MatchOptions::default()
            })
            .unwrap()
            .to_json()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn stationary_robbers_vs_greedy_on_p4() {
        let g = generate(FamilySpec::Path(4)).unwrap().graph;
        let t = run_match(&g, None, 2, &CopPolicy::Greedy, &RobberTeamPolicy::Stationary, &MatchOptions::default()).unwrap();
        assert!(t.damage <= 2);
        replay(&t).unwrap();
    }

    #[test]
    fn replay_detects_tampering() {
        let g = generate(FamilySpec::Cycle(6)).unwrap().graph;
        let mut t = run_match(&g, None, 1, &CopPolicy::Stationary(0), &RobberTeamPolicy::Cautious(vec![3]), &MatchOptions::default()).unwrap();
        replay(&t).unwrap();
        t.rounds[0].damaged.push(5);
        assert!(replay(&t).is_err());
    }

    #[test]
    fn illegal_policy_reports_round() {
        let g = generate(FamilySpec::Path(3)).unwrap().graph;
        let err = run_match(&g, None, 1, &CopPolicy::Guard(7), &RobberTeamPolicy::Stationary, &MatchOptions::default()).unwrap_err();
        match err {
            ArenaError::IllegalMove { policy, round, .. } => {
                assert_eq!(policy, "guard:7");
                assert_eq!(round, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn suite_shape() {
        let gen = generate(FamilySpec::Gprime(4)).unwrap();
        let suite = standard_suite(&gen.graph, gen.landmarks.as_ref());
        assert_eq!(suite.len(), 25);
        assert_eq!(suite[0], CopPolicy::Guard(0));
        assert_eq!(suite[4], CopPolicy::Stationary(1));
    }
}
