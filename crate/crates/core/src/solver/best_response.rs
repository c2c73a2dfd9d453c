//! Exact best responses against fixed deterministic policies.
//!
//! Against a fixed cop policy the robbers face the same loopy game as in
//! [`super::solve_game`], except that every cop-to-move node carries the
//! policy's memory and offers a single cop option. Against a fixed robber
//! policy the cop faces a one-player problem: the least damage over all
//! plays, where a play either settles or eventually circles inside one class.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::encode::{Key, Position};
use super::engine::{solve_layered, LayeredGame, Outcome, Table};
use super::{after_cop_move, check_size, multisets, robber_replies, Limits, SolveError, SolveStats};
use crate::graph::{Graph, Vertex};
use crate::rules::{GameState, JointRobberMove, Phase};
use crate::strategies::{CopAgent, CopMemory, CopPolicy, PolicyError, RobberAgent, RobberMemory, RobberTeamPolicy};
use crate::families::Landmarks;

fn policy_err(e: PolicyError) -> SolveError {
    match e {
        PolicyError::Solve(e) => e,
        other => SolveError::Policy(other.to_string()),
    }
}

type Node = (Key, CopMemory);

struct VsCop<'g> {
    graph: &'g Graph,
    agent: CopAgent,
    scratch: Vec<Vec<Vertex>>,
    ever_damaged: u64,
}

impl LayeredGame for VsCop<'_> {
    type Node = Node;

    fn class(&self, node: &Node) -> (u8, u64) {
        Position::unpack(node.0).class()
    }

    fn expand(&mut self, node: &Node, out: &mut Vec<Vec<Outcome<Node>>>) -> Result<(), SolveError> {
        let pos = Position::unpack(node.0);
        let state = pos.to_state(self.graph, 1);
        let (dest, mem) = self.agent.decide(self.graph, &state, &node.1).map_err(policy_err)?;
        let cop = pos.cop as Vertex;
        if dest != cop && !self.graph.has_edge(cop, dest) {
            return Err(SolveError::Policy(format!(
                "{} moved illegally from {cop} to {dest}",
                self.agent.policy()
            )));
        }
        let (survivors, damaged) = after_cop_move(&pos, dest);
        self.ever_damaged |= damaged;
        out.clear();
        out.push(
            robber_replies(self.graph, dest, &survivors, damaged, &mut self.scratch)
                .into_iter()
                .map(|o| match o {
                    Outcome::Terminal(v) => Outcome::Terminal(v),
                    Outcome::Node(k) => Outcome::Node((k, mem)),
                })
                .collect(),
        );
        Ok(())
    }
}

/// Solved robber side against a fixed cop policy.
pub struct BestResponseTable {
    table: Table<Node>,
    value: usize,
    cop_start: Vertex,
    placement: Vec<Vertex>,
    ever_damaged: u64,
}

/// Summary of [`best_response_robbers`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobberBestResponse {
    pub value: usize,
    pub cop_start: Vertex,
    pub placement: Vec<Vertex>,
    /// Vertices damaged in at least one reachable position.
    pub ever_damaged: Vec<Vertex>,
    pub stats: SolveStats,
}

impl BestResponseTable {
    pub fn value(&self) -> usize {
        self.value
    }

    pub fn placement(&self) -> (usize, &[Vertex]) {
        (self.value, &self.placement)
    }

    pub fn stats(&self) -> &SolveStats {
        &self.table.stats
    }

    fn outcome_value(&self, o: &Outcome<Node>) -> Option<(u8, u32, (u8, u64))> {
        match o {
            Outcome::Terminal(v) => Some((*v, 0, (0, 0))),
            Outcome::Node(n) => {
                let (v, r) = self.table.lookup(n)?;
                Some((v, r, Position::unpack(n.0).class()))
            }
        }
    }

    /// Maximizing reply in a robbers-to-move state, where `cop_mem` is the
    /// cop's memory after its move. Ties as in [`super::SolvedGame::robber_move`].
    pub fn robber_move(&self, g: &Graph, state: &GameState, cop_mem: &CopMemory) -> Option<JointRobberMove> {
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
                Outcome::Node((Position::new(cop, &alive, here.1).pack(), *cop_mem))
            };
            let (v, r, class) = self.outcome_value(&outcome)?;
            let eff = if class == here { r } else { 0 };
            let score = (v, std::cmp::Reverse(eff), std::cmp::Reverse(mv.multiset()));
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, mv));
            }
        }
        best.map(|(_, mv)| mv)
    }

    pub fn summary(&self) -> RobberBestResponse {
        RobberBestResponse {
            value: self.value,
            cop_start: self.cop_start,
            placement: self.placement.clone(),
            ever_damaged: (0..64).filter(|b| self.ever_damaged >> b & 1 == 1).collect(),
            stats: self.table.stats.clone(),
        }
    }
}

/// Solves the robbers' side against `cop` (which must have finite memory).
pub fn best_response_table(
    g: &Graph,
    s: usize,
    cop: &mut CopAgent,
    limits: &Limits,
) -> Result<BestResponseTable, SolveError> {
    check_size(g, s)?;
    if !cop.has_finite_memory() {
        return Err(SolveError::UnboundedPolicy(cop.policy().to_string()));
    }
    let (start, mem0) = cop.start(g).map_err(policy_err)?;
    let placements = multisets(g.n(), s);
    let roots: Vec<Node> = placements
        .iter()
        .filter_map(|p| {
            let alive: Vec<Vertex> = p.iter().copied().filter(|&v| v != start).collect();
            (!alive.is_empty()).then(|| (Position::new(start, &alive, 0).pack(), mem0))
        })
        .collect();
    let mut game = VsCop {
        graph: g,
        agent: cop.clone(),
        scratch: Vec::new(),
        ever_damaged: 0,
    };
    let table = solve_layered(&mut game, roots, limits)?;
    let mut best: Option<(u8, Vec<Vertex>)> = None;
    for p in placements {
        let alive: Vec<Vertex> = p.iter().copied().filter(|&v| v != start).collect();
        let v = if alive.is_empty() {
            0
        } else {
            table
                .lookup(&(Position::new(start, &alive, 0).pack(), mem0))
                .expect("root is solved")
                .0
        };
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, p));
        }
    }
    let (value, placement) = best.expect("at least one placement");
    Ok(BestResponseTable {
        table,
        value: value as usize,
        cop_start: start,
        placement,
        ever_damaged: game.ever_damaged,
    })
}

/// Maximum damage the robbers can force against a fixed cop policy.
pub fn best_response_robbers(
    g: &Graph,
    s: usize,
    cop_policy: &CopPolicy,
    limits: &Limits,
) -> Result<RobberBestResponse, SolveError> {
    let mut agent = CopAgent::new(cop_policy.clone(), s, *limits);
    Ok(best_response_table(g, s, &mut agent, limits)?.summary())
}

/// Result of a horizon-capped cop best response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopBestResponse {
    /// Least final damage found; an upper bound on the true value.
    pub value: usize,
    /// True when no play cut off by the horizon could end lower.
    pub exact: bool,
    pub cop_start: Option<Vertex>,
    pub explored_states: usize,
}

/// Cop best response from a post-placement, cop-to-move state against a
/// deterministic robber team whose memory is `rmem`.
pub fn best_response_cop_from(
    g: &Graph,
    state: &GameState,
    robbers: &mut RobberAgent,
    rmem: &RobberMemory,
    horizon: u32,
    limits: &Limits,
) -> Result<CopBestResponse, SolveError> {
    if state.phase() != Phase::CopToMove {
        return Err(SolveError::NotPlaced);
    }
    let n = g.n();
    let mut index: FxHashMap<(GameState, RobberMemory), u32> = FxHashMap::default();
    let mut nodes: Vec<(GameState, RobberMemory, u32)> = Vec::new();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    let mut best = usize::MAX;
    let mut frontier = usize::MAX;
    let root = (state.position_key(), rmem.clone());
    index.insert(root.clone(), 0);
    nodes.push((root.0, root.1, 0));
    succ.push(Vec::new());
    let mut queue = VecDeque::from([0u32]);
    while let Some(id) = queue.pop_front() {
        let (st, mem, depth) = nodes[id as usize].clone();
        let dmg = st.damaged().len();
        if st.is_settled() {
            best = best.min(dmg);
            continue;
        }
        if depth >= horizon {
            frontier = frontier.min(dmg);
            continue;
        }
        for dest in st.legal_cop_moves(g)? {
            let (s1, _) = st.apply_cop_move(g, dest)?;
            if s1.is_settled() {
                best = best.min(s1.damaged().len());
                continue;
            }
            let (mv, mem1) = robbers.decide(g, &s1, &mem).map_err(policy_err)?;
            let (s2, _) = s1
                .apply_robber_move(g, &mv)
                .map_err(|e| SolveError::Policy(format!("{}: {e}", robbers.policy())))?;
            if s2.is_settled() {
                best = best.min(s2.damaged().len());
                continue;
            }
            let key = (s2.position_key(), mem1);
            let child = match index.get(&key) {
                Some(&c) => c,
                None => {
                    let c = nodes.len() as u32;
                    index.insert(key.clone(), c);
                    nodes.push((key.0, key.1, depth + 1));
                    succ.push(Vec::new());
                    queue.push_back(c);
                    if nodes.len() > limits.max_states {
                        return Err(SolveError::LimitExceeded {
                            reason: format!("state limit {}", limits.max_states),
                            stats: SolveStats {
                                explored_states: nodes.len(),
                                class_count: 0,
                                peak_memo_entries: nodes.len(),
                            },
                        });
                    }
                    c
                }
            };
            succ[id as usize].push(child);
        }
    }
    for (id, on_cycle) in cyclic_nodes(&succ).into_iter().enumerate() {
        if on_cycle {
            best = best.min(nodes[id].0.damaged().len());
        }
    }
    let exact = best <= frontier;
    Ok(CopBestResponse {
        value: if best == usize::MAX { n } else { best },
        exact: exact && best != usize::MAX,
        cop_start: None,
        explored_states: nodes.len(),
    })
}

/// Cop best response over all cop starts against a robber team policy.
pub fn best_response_cop(
    g: &Graph,
    s: usize,
    policy: &RobberTeamPolicy,
    landmarks: Option<&Landmarks>,
    horizon: u32,
    limits: &Limits,
) -> Result<CopBestResponse, SolveError> {
    check_size(g, s)?;
    let mut best: Option<CopBestResponse> = None;
    let mut explored = 0;
    for c in 0..g.n() {
        let mut agent = RobberAgent::new(policy.clone(), s, *limits, landmarks.cloned());
        let st = GameState::initial(g, s)?.place_cop(c)?;
        let (placement, mem) = agent.place(g, &st).map_err(policy_err)?;
        let (st, _) = st.place_robbers(&placement)?;
        let r = if st.is_settled() {
            CopBestResponse {
                value: 0,
                exact: true,
                cop_start: None,
                explored_states: 0,
            }
        } else {
            best_response_cop_from(g, &st, &mut agent, &mem, horizon, limits)?
        };
        explored += r.explored_states;
        if best.as_ref().is_none_or(|b| r.value < b.value || (r.value == b.value && r.exact && !b.exact)) {
            best = Some(CopBestResponse { cop_start: Some(c), ..r });
        }
    }
    let mut best = best.expect("graph is nonempty");
    best.explored_states = explored;
    Ok(best)
}

/// Marks nodes lying on a directed cycle (iterative Tarjan).
fn cyclic_nodes(succ: &[Vec<u32>]) -> Vec<bool> {
    let n = succ.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut cyclic = vec![false; n];
    let mut counter = 0u32;
    for root in 0..n {
        if index[root] != u32::MAX {
            continue;
        }
        let mut work: Vec<(u32, usize)> = vec![(root as u32, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            let v = v as usize;
            if *next < succ[v].len() {
                let w = succ[v][*next] as usize;
                *next += 1;
                if w == v {
                    cyclic[v] = true;
                }
                if index[w] == u32::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    work.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack") as usize;
                    on_stack[w] = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                if members.len() > 1 {
                    for w in members {
                        cyclic[w] = true;
                    }
                }
            }
        }
    }
    cyclic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};
    use crate::rules::RobberStatus;

    fn fam(spec: FamilySpec) -> Graph {
        generate(spec).unwrap().graph
    }

    #[test]
    fn tarjan_marks_cycles() {
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![3], vec![]];
        assert_eq!(cyclic_nodes(&succ), vec![false, true, true, true, false]);
    }

    #[test]
    fn guard_on_star3_two_robbers() {
        let g = fam(FamilySpec::Star(3));
        let r = best_response_robbers(&g, 2, &CopPolicy::Guard(0), &Limits::default()).unwrap();
        assert!(r.value <= 1);
        assert!(!r.ever_damaged.contains(&0));
    }

    #[test]
    fn stationary_cop_on_path_end() {
        // Cop parked on an end of P3: the lone robber damages the far end and
        // also the middle vertex only if it can stay there uncaught, which it
        // can since the cop never moves.
        let g = fam(FamilySpec::Path(3));
        let r = best_response_robbers(&g, 1, &CopPolicy::Stationary(0), &Limits::default()).unwrap();
        assert_eq!(r.value, 2);
    }

    #[test]
    fn random_walk_is_rejected() {
        let g = fam(FamilySpec::Path(3));
        let err = best_response_robbers(&g, 1, &CopPolicy::RandomWalk(1), &Limits::default()).unwrap_err();
        assert!(matches!(err, SolveError::UnboundedPolicy(_)));
    }

    #[test]
    fn best_response_dominates_solve() {
        let g = fam(FamilySpec::Cycle(5));
        let exact = super::super::solve(&g, 2, &Limits::default()).unwrap().value;
        for cop in [CopPolicy::Guard(0), CopPolicy::Patrol(0, 1), CopPolicy::Greedy, CopPolicy::Optimal] {
            let r = best_response_robbers(&g, 2, &cop, &Limits::default()).unwrap();
            assert!(r.value >= exact, "{cop}");
        }
    }

    #[test]
    fn cop_response_to_stationary_robbers_on_damage() {
        let g = fam(FamilySpec::Path(4));
        let st = GameState::from_parts(
            &g,
            0,
            vec![RobberStatus::Live(2), RobberStatus::Live(3)],
            &[2, 3],
            Phase::CopToMove,
            3,
        )
        .unwrap();
        let mut agent = RobberAgent::new(RobberTeamPolicy::Stationary, 2, Limits::default(), None);
        let r = best_response_cop_from(&g, &st, &mut agent, &RobberMemory::None, 10, &Limits::default()).unwrap();
        assert_eq!(r.value, 2);
        assert!(r.exact);
    }

    #[test]
    fn cop_intercepts_walking_robber() {
        // P4, robber heading for vertex 3 from 1, cop on 2 ahead of it: the
        // cop steps onto 1 and ends the game with only the starting vertex
        // lost... the robber's start is assessed only if it survives the
        // cop's first move, so the value is 0.
        let g = fam(FamilySpec::Path(4));
        let st = GameState::from_parts(&g, 2, vec![RobberStatus::Live(1)], &[], Phase::CopToMove, 1).unwrap();
        let mut agent = RobberAgent::new(RobberTeamPolicy::Cautious(vec![3]), 1, Limits::default(), None);
        let r = best_response_cop_from(&g, &st, &mut agent, &RobberMemory::None, 6, &Limits::default()).unwrap();
        assert_eq!(r.value, 0);
        assert!(r.exact);
    }

    #[test]
    fn cop_response_monotone_in_horizon() {
        let g = fam(FamilySpec::Cycle(6));
        let mut last = usize::MAX;
        for h in [1, 2, 4, 8] {
            let r = best_response_cop(&g, 1, &RobberTeamPolicy::Cautious(vec![0, 3]), None, h, &Limits::default()).unwrap();
            assert!(r.value <= last);
            last = r.value;
        }
    }
}
