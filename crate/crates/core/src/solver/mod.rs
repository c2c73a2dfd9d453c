//! Exact damage values and optimal play.

mod best_response;
pub(crate) mod encode;
mod engine;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::rules::{GameState, JointRobberMove, Phase, RulesError};

pub use best_response::{
    best_response_cop, best_response_cop_from, best_response_robbers, best_response_table, BestResponseTable, CopBestResponse,
    RobberBestResponse,
};
use encode::{joint_destinations, Key, Position, MAX_ROBBERS, MAX_VERTICES};
use engine::{solve_layered, LayeredGame, Outcome, Table};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_states: usize,
    pub max_seconds: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 20_000_000,
            max_seconds: 1800.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Positions visited: cop-to-move nodes plus the robber-to-move
    /// positions reached through each cop option.
    pub explored_states: usize,
    pub class_count: usize,
    pub peak_memo_entries: usize,
}

/// Result of [`solve`]. Field names are part of the CLI's JSON contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub value: usize,
    pub optimal_cop_start: Vertex,
    pub explored_states: usize,
    pub class_count: usize,
    pub peak_memo_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("resource limit exceeded ({reason}) after {} states", stats.explored_states)]
    LimitExceeded { reason: String, stats: SolveStats },
    #[error("solver supports at most {MAX_VERTICES} vertices, graph has {0}")]
    TooManyVertices(usize),
    #[error("solver supports between 1 and {MAX_ROBBERS} robbers, got {0}")]
    RobberCount(usize),
    #[error("state must be past placement")]
    NotPlaced,
    #[error("policy {0} has unbounded memory and cannot be searched exhaustively")]
    UnboundedPolicy(String),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error("policy error: {0}")]
    Policy(String),
}

fn check_size(g: &Graph, s: usize) -> Result<(), SolveError> {
    if g.n() > MAX_VERTICES {
        return Err(SolveError::TooManyVertices(g.n()));
    }
    if s == 0 || s > MAX_ROBBERS {
        return Err(SolveError::RobberCount(s));
    }
    if g.n() == 0 {
        return Err(RulesError::EmptyGraph.into());
    }
    Ok(())
}

/// Robber replies to the cop standing on `cop` with robbers at `robbers`
/// (already past capture and assessment).
fn robber_replies(g: &Graph, cop: Vertex, robbers: &[u8], damaged: u64, scratch: &mut Vec<Vec<Vertex>>) -> Vec<Outcome<Key>> {
    let dmg = damaged.count_ones() as u8;
    if robbers.is_empty() {
        return vec![Outcome::Terminal(dmg)];
    }
    let opts: Vec<Vec<Vertex>> = robbers.iter().map(|&r| g.closed_neighborhood(r as Vertex)).collect();
    let refs: Vec<&[Vertex]> = opts.iter().map(Vec::as_slice).collect();
    joint_destinations(&refs, scratch);
    scratch
        .iter()
        .map(|dests| {
            let alive: Vec<Vertex> = dests.iter().copied().filter(|&d| d != cop).collect();
            if alive.is_empty() {
                Outcome::Terminal(dmg)
            } else {
                Outcome::Node(Position::new(cop, &alive, damaged).pack())
            }
        })
        .collect()
}

/// Capture and assessment for a cop move to `dest`.
fn after_cop_move(pos: &Position, dest: Vertex) -> (Vec<u8>, u64) {
    let mut damaged = pos.damaged;
    let survivors: Vec<u8> = pos.robbers().iter().copied().filter(|&r| r as Vertex != dest).collect();
    for &r in &survivors {
        damaged |= 1 << r;
    }
    (survivors, damaged)
}

struct ExactGame<'g> {
    graph: &'g Graph,
    scratch: Vec<Vec<Vertex>>,
}

impl LayeredGame for ExactGame<'_> {
    type Node = Key;

    fn class(&self, node: &Key) -> (u8, u64) {
        Position::unpack(*node).class()
    }

    fn expand(&mut self, node: &Key, out: &mut Vec<Vec<Outcome<Key>>>) -> Result<(), SolveError> {
        let pos = Position::unpack(*node);
        out.clear();
        for dest in self.graph.closed_neighborhood(pos.cop as Vertex) {
            let (survivors, damaged) = after_cop_move(&pos, dest);
            out.push(robber_replies(self.graph, dest, &survivors, damaged, &mut self.scratch));
        }
        Ok(())
    }
}

/// A solved game: exact values of every position reachable from the roots.
pub struct SolvedGame {
    table: Table<Key>,
    s: usize,
}

impl SolvedGame {
    pub fn stats(&self) -> &SolveStats {
        &self.table.stats
    }

    fn node_value(&self, key: Key) -> Option<(u8, u32)> {
        self.table.lookup(&key)
    }

    fn outcome_value(&self, o: &Outcome<Key>) -> Option<(u8, u32, (u8, u64))> {
        match o {
            Outcome::Terminal(v) => Some((*v, 0, (0, 0))),
            Outcome::Node(k) => {
                let (v, r) = self.node_value(*k)?;
                Some((v, r, Position::unpack(*k).class()))
            }
        }
    }

    /// Value of a cop-to-move or robbers-to-move state, if the state lies in
    /// the solved region.
    pub fn value_of(&self, g: &Graph, state: &GameState) -> Option<usize> {
        if state.is_settled() {
            return Some(state.damaged().len());
        }
        match state.phase() {
            Phase::CopToMove => self.node_value(Position::from_state(state).pack()).map(|(v, _)| v as usize),
            Phase::RobbersToMove => {
                let pos = Position::from_state(state);
                let mut scratch = Vec::new();
                robber_replies(g, pos.cop as Vertex, pos.robbers(), pos.damaged, &mut scratch)
                    .iter()
                    .map(|o| self.outcome_value(o).map(|t| t.0 as usize))
                    .try_fold(0usize, |acc, v| v.map(|v| acc.max(v)))
            }
            _ => None,
        }
    }

    /// Minimizing cop move, lowest vertex on ties.
    pub fn cop_move(&self, g: &Graph, state: &GameState) -> Option<Vertex> {
        let pos = Position::from_state(state);
        let mut scratch = Vec::new();
        let mut best: Option<(u8, Vertex)> = None;
        for dest in g.closed_neighborhood(pos.cop as Vertex) {
            let (survivors, damaged) = after_cop_move(&pos, dest);
            let mut v = 0u8;
            for o in robber_replies(g, dest, &survivors, damaged, &mut scratch) {
                v = v.max(self.outcome_value(&o)?.0);
            }
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, dest));
            }
        }
        best.map(|(_, d)| d)
    }

    /// Maximizing robber move. Among maximizers, prefer successors that
    /// leave the current class or reached their value in an earlier sweep,
    /// which guarantees progress; then the least destination multiset.
    pub fn robber_move(&self, g: &Graph, state: &GameState) -> Option<JointRobberMove> {
        if state.phase() != Phase::RobbersToMove {
            return None;
        }
        let here = (state.live_count() as u8, state.damaged().low_word());
        let cop = state.cop_vertex();
        let mut best: Option<((u8, std::cmp::Reverse<u32>, std::cmp::Reverse<Vec<Vertex>>), JointRobberMove)> = None;
        for mv in state.legal_joint_robber_moves(g).ok()? {
            let alive: Vec<Vertex> = mv.dests.iter().flatten().copied().filter(|&d| d != cop).collect();
            let outcome = if alive.is_empty() {
                Outcome::Terminal(state.damaged().len() as u8)
            } else {
                Outcome::Node(Position::new(cop, &alive, here.1).pack())
            };
            let (v, r, class) = self.outcome_value(&outcome)?;
            let eff_rank = if class == here { r } else { 0 };
            let score = (v, std::cmp::Reverse(eff_rank), std::cmp::Reverse(mv.multiset()));
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, mv));
            }
        }
        best.map(|(_, mv)| mv)
    }

    /// Best robber placement against a placed cop; least multiset on ties.
    pub fn robber_placement(&self, g: &Graph, cop: Vertex) -> Option<(usize, Vec<Vertex>)> {
        let mut best: Option<(u8, Vec<Vertex>)> = None;
        for placement in multisets(g.n(), self.s) {
            let alive: Vec<Vertex> = placement.iter().copied().filter(|&v| v != cop).collect();
            let v = if alive.is_empty() {
                0
            } else {
                self.node_value(Position::new(cop, &alive, 0).pack())?.0
            };
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, placement));
            }
        }
        best.map(|(v, p)| (v as usize, p))
    }
}

/// All sorted multisets of size `k` over `0..n`, lexicographic.
pub fn multisets(n: usize, k: usize) -> Vec<Vec<Vertex>> {
    fn rec(n: usize, k: usize, lo: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in lo..n {
            cur.push(v);
            rec(n, k, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

fn placement_roots(g: &Graph, s: usize) -> Vec<Key> {
    let mut roots = Vec::new();
    for cop in 0..g.n() {
        for p in multisets(g.n(), s) {
            let alive: Vec<Vertex> = p.into_iter().filter(|&v| v != cop).collect();
            if !alive.is_empty() {
                roots.push(Position::new(cop, &alive, 0).pack());
            }
        }
    }
    roots
}

/// Solves the whole game from placement.
pub fn solve_game(g: &Graph, s: usize, limits: &Limits) -> Result<SolvedGame, SolveError> {
    check_size(g, s)?;
    let mut game = ExactGame {
        graph: g,
        scratch: Vec::new(),
    };
    let table = solve_layered(&mut game, placement_roots(g, s), limits)?;
    Ok(SolvedGame { table, s })
}

/// The s-robber damage number with the cop's optimal starting vertex.
pub fn solve(g: &Graph, s: usize, limits: &Limits) -> Result<SolveReport, SolveError> {
    let solved = solve_game(g, s, limits)?;
    let mut best: Option<(usize, Vertex)> = None;
    for cop in 0..g.n() {
        let (v, _) = solved
            .robber_placement(g, cop)
            .expect("every placement is a solved root");
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, cop));
        }
    }
    let (value, optimal_cop_start) = best.expect("graph is nonempty");
    let stats = solved.stats();
    Ok(SolveReport {
        value,
        optimal_cop_start,
        explored_states: stats.explored_states,
        class_count: stats.class_count,
        peak_memo_entries: stats.peak_memo_entries,
    })
}

/// Solves the sub-game reachable from a post-placement state.
pub fn solve_game_from(g: &Graph, state: &GameState, limits: &Limits) -> Result<SolvedGame, SolveError> {
    check_size(g, state.robber_count())?;
    let pos = match state.phase() {
        Phase::CopToMove | Phase::RobbersToMove => Position::from_state(state),
        _ => return Err(SolveError::NotPlaced),
    };
    let roots = if state.is_settled() {
        Vec::new()
    } else if state.phase() == Phase::CopToMove {
        vec![pos.pack()]
    } else {
        let mut scratch = Vec::new();
        robber_replies(g, pos.cop as Vertex, pos.robbers(), pos.damaged, &mut scratch)
            .into_iter()
            .filter_map(|o| match o {
                Outcome::Node(k) => Some(k),
                Outcome::Terminal(_) => None,
            })
            .collect()
    };
    let mut game = ExactGame {
        graph: g,
        scratch: Vec::new(),
    };
    let table = solve_layered(&mut game, roots, limits)?;
    Ok(SolvedGame {
        table,
        s: state.robber_count(),
    })
}

/// Game value of a post-placement state.
pub fn solve_from(g: &Graph, state: &GameState, limits: &Limits) -> Result<usize, SolveError> {
    let solved = solve_game_from(g, state, limits)?;
    Ok(solved
        .value_of(g, state)
        .expect("root state lies in the solved region"))
}
