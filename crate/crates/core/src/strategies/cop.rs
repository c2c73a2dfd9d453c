use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CopPolicy, PolicyError};
use crate::bitset::VertexSet;
use crate::graph::{Graph, Vertex};
use crate::rules::GameState;
use crate::solver::{solve_game, solve_game_from, Limits, SolvedGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndgameMode {
    /// Guarding; `returning` after a capture sortie.
    Guard { returning: bool },
    /// Solver-optimal play.
    Solving,
    /// The residual game exceeded the solver limits; guarding continues.
    Unsolved { returning: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopMemory {
    None,
    Guard { returning: bool },
    Walk { steps: u64 },
    Endgame(EndgameMode),
}

impl CopMemory {
    /// Transcript flags implied by this memory.
    pub fn flags(&self) -> Vec<&'static str> {
        match self {
            CopMemory::Endgame(EndgameMode::Unsolved { .. }) => vec!["endgame-unsolved"],
            CopMemory::Endgame(EndgameMode::Solving) => vec!["endgame-solved"],
            _ => Vec::new(),
        }
    }
}

/// A cop policy plus its caches.
#[derive(Clone)]
pub struct CopAgent {
    policy: CopPolicy,
    s: usize,
    limits: Limits,
    solved: Option<Arc<SolvedGame>>,
    endgames: Vec<Arc<SolvedGame>>,
}

impl CopAgent {
    pub fn new(policy: CopPolicy, s: usize, limits: Limits) -> CopAgent {
        CopAgent {
            policy,
            s,
            limits,
            solved: None,
            endgames: Vec::new(),
        }
    }

    pub fn policy(&self) -> &CopPolicy {
        &self.policy
    }

    /// Whether the memory ranges over a finite set, so exhaustive search
    /// against this policy terminates.
    pub fn has_finite_memory(&self) -> bool {
        !matches!(self.policy, CopPolicy::RandomWalk(_))
    }

    fn check(&self, g: &Graph, v: Vertex) -> Result<Vertex, PolicyError> {
        g.check_vertex(v)
            .map(|_| v)
            .map_err(|_| PolicyError::Precondition(format!("{}: vertex {v} not in graph", self.policy)))
    }

    pub fn start(&mut self, g: &Graph) -> Result<(Vertex, CopMemory), PolicyError> {
        Ok(match self.policy {
            CopPolicy::Guard(v) => (self.check(g, v)?, CopMemory::Guard { returning: false }),
            CopPolicy::GuardThenEndgame(v) => (
                self.check(g, v)?,
                CopMemory::Endgame(EndgameMode::Guard { returning: false }),
            ),
            CopPolicy::Patrol(u, v) => {
                self.check(g, u)?;
                self.check(g, v)?;
                if !g.has_edge(u, v) {
                    return Err(PolicyError::Precondition(format!("patrol: {u}-{v} is not an edge")));
                }
                (u, CopMemory::None)
            }
            CopPolicy::Stationary(v) => (self.check(g, v)?, CopMemory::None),
            CopPolicy::Greedy => (graph_center(g), CopMemory::None),
            CopPolicy::RandomWalk(seed) => {
                let mut rng = walk_rng(seed, 0);
                (rng.gen_range(0..g.n()), CopMemory::Walk { steps: 1 })
            }
            CopPolicy::Optimal => {
                let solved = self.full_solution(g)?;
                let mut best: Option<(usize, Vertex)> = None;
                for c in 0..g.n() {
                    let (v, _) = solved
                        .robber_placement(g, c)
                        .ok_or_else(|| PolicyError::NoDecision(self.policy.to_string()))?;
                    if best.is_none_or(|(bv, _)| v < bv) {
                        best = Some((v, c));
                    }
                }
                (best.map(|b| b.1).unwrap_or(0), CopMemory::None)
            }
        })
    }

    fn full_solution(&mut self, g: &Graph) -> Result<Arc<SolvedGame>, PolicyError> {
        if let Some(s) = &self.solved {
            return Ok(s.clone());
        }
        let solved = Arc::new(solve_game(g, self.s, &self.limits)?);
        self.solved = Some(solved.clone());
        Ok(solved)
    }

    pub fn decide(
        &mut self,
        g: &Graph,
        state: &GameState,
        mem: &CopMemory,
    ) -> Result<(Vertex, CopMemory), PolicyError> {
        let cop = state.cop_vertex();
        Ok(match (&self.policy, *mem) {
            (CopPolicy::Guard(home), CopMemory::Guard { returning }) => {
                let (dest, returning) = guard_step(g, state, *home, returning);
                (dest, CopMemory::Guard { returning })
            }
            (CopPolicy::GuardThenEndgame(home), CopMemory::Endgame(mode)) => {
                let home = *home;
                match mode {
                    EndgameMode::Guard { returning } => {
                        if !returning && cop == home && state.live_count() <= 2 {
                            match solve_game_from(g, state, &self.limits) {
                                Ok(solved) => {
                                    let solved = Arc::new(solved);
                                    let dest = solved
                                        .cop_move(g, state)
                                        .ok_or_else(|| PolicyError::NoDecision(self.policy.to_string()))?;
                                    self.endgames.push(solved);
                                    (dest, CopMemory::Endgame(EndgameMode::Solving))
                                }
                                Err(crate::solver::SolveError::LimitExceeded { .. })
                                | Err(crate::solver::SolveError::TooManyVertices(_)) => {
                                    let (dest, returning) = guard_step(g, state, home, false);
                                    (dest, CopMemory::Endgame(EndgameMode::Unsolved { returning }))
                                }
                                Err(e) => return Err(e.into()),
                            }
                        } else {
                            let (dest, returning) = guard_step(g, state, home, returning);
                            (dest, CopMemory::Endgame(EndgameMode::Guard { returning }))
                        }
                    }
                    EndgameMode::Solving => {
                        let dest = match self.endgames.iter().find_map(|t| t.cop_move(g, state)) {
                            Some(d) => d,
                            None => {
                                let solved = Arc::new(solve_game_from(g, state, &self.limits)?);
                                let d = solved
                                    .cop_move(g, state)
                                    .ok_or_else(|| PolicyError::NoDecision(self.policy.to_string()))?;
                                self.endgames.push(solved);
                                d
                            }
                        };
                        (dest, CopMemory::Endgame(EndgameMode::Solving))
                    }
                    EndgameMode::Unsolved { returning } => {
                        let (dest, returning) = guard_step(g, state, home, returning);
                        (dest, CopMemory::Endgame(EndgameMode::Unsolved { returning }))
                    }
                }
            }
            (CopPolicy::Patrol(u, v), _) => {
                let dest = if cop == *u {
                    *v
                } else if cop == *v {
                    *u
                } else {
                    step_toward(g, cop, *u)
                };
                (dest, CopMemory::None)
            }
            (CopPolicy::Stationary(_), _) => (cop, CopMemory::None),
            (CopPolicy::Greedy, _) => (greedy_step(g, state), CopMemory::None),
            (CopPolicy::RandomWalk(seed), CopMemory::Walk { steps }) => {
                let options = g.closed_neighborhood(cop);
                let mut rng = walk_rng(*seed, steps);
                (options[rng.gen_range(0..options.len())], CopMemory::Walk { steps: steps + 1 })
            }
            (CopPolicy::Optimal, _) => {
                let solved = self.full_solution(g)?;
                let dest = solved
                    .cop_move(g, state)
                    .ok_or_else(|| PolicyError::NoDecision(self.policy.to_string()))?;
                (dest, CopMemory::None)
            }
            (policy, mem) => {
                return Err(PolicyError::Precondition(format!(
                    "{policy}: memory {mem:?} does not belong to this policy"
                )))
            }
        })
    }
}

fn walk_rng(seed: u64, step: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step);
    rng
}

/// Waiting at `home`: pounce on the lowest robber-occupied neighbor. After a
/// pounce: go straight back, even past other adjacent robbers.
fn guard_step(g: &Graph, state: &GameState, home: Vertex, returning: bool) -> (Vertex, bool) {
    let cop = state.cop_vertex();
    if cop != home {
        return (step_toward(g, cop, home), false);
    }
    if returning {
        return (home, false);
    }
    let target = state
        .live_positions()
        .into_iter()
        .find(|&r| g.has_edge(home, r));
    match target {
        Some(t) => (t, true),
        None => (home, false),
    }
}

/// First step of the lowest-id shortest path (stays when unreachable).
pub(crate) fn step_toward(g: &Graph, from: Vertex, to: Vertex) -> Vertex {
    match g.shortest_path(from, to, &VertexSet::new(g.n())) {
        Ok(Some(p)) if p.len() > 1 => p[1],
        _ => from,
    }
}

/// Chase the nearest live robber (lowest vertex on ties).
fn greedy_step(g: &Graph, state: &GameState) -> Vertex {
    let cop = state.cop_vertex();
    let dist = g.bfs(cop, None);
    let target = state
        .live_positions()
        .into_iter()
        .filter_map(|r| dist[r].map(|d| (d, r)))
        .min();
    match target {
        Some((_, r)) => step_toward(g, cop, r),
        None => cop,
    }
}

/// Vertex of minimum eccentricity, lowest id on ties.
pub fn graph_center(g: &Graph) -> Vertex {
    (0..g.n())
        .min_by_key(|&v| {
            let ecc = g
                .bfs(v, None)
                .iter()
                .map(|d| d.unwrap_or(usize::MAX))
                .max()
                .unwrap_or(0);
            (ecc, v)
        })
        .unwrap_or(0)
}

/// The edge whose worse endpoint eccentricity is smallest, lexicographically
/// least on ties.
pub fn central_edge(g: &Graph) -> Option<(Vertex, Vertex)> {
    let ecc: Vec<usize> = (0..g.n())
        .map(|v| {
            g.bfs(v, None)
                .iter()
                .map(|d| d.unwrap_or(usize::MAX))
                .max()
                .unwrap_or(0)
        })
        .collect();
    g.edges()
        .into_iter()
        .min_by_key(|&(u, v)| (ecc[u].max(ecc[v]), ecc[u].min(ecc[v]), u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};
    use crate::rules::{Phase, RobberStatus};

    fn star(t: usize) -> Graph {
        generate(FamilySpec::Star(t)).unwrap().graph
    }

    fn state(g: &Graph, cop: Vertex, robbers: &[Vertex]) -> GameState {
        let rs = robbers.iter().map(|&r| RobberStatus::Live(r)).collect();
        GameState::from_parts(g, cop, rs, &[], Phase::CopToMove, 1).unwrap()
    }

    #[test]
    fn guard_pounces_on_lowest() {
        let g = star(3);
        let mut agent = CopAgent::new(CopPolicy::Guard(0), 2, Limits::default());
        let (start, mem) = agent.start(&g).unwrap();
        assert_eq!(start, 0);
        let (dest, mem) = agent.decide(&g, &state(&g, 0, &[2, 1]), &mem).unwrap();
        assert_eq!((dest, mem), (1, CopMemory::Guard { returning: true }));
    }

    #[test]
    fn guard_returns_despite_adjacent_robber() {
        let g = star(3);
        let mut agent = CopAgent::new(CopPolicy::Guard(0), 2, Limits::default());
        let (dest, mem) = agent
            .decide(&g, &state(&g, 1, &[2]), &CopMemory::Guard { returning: true })
            .unwrap();
        assert_eq!((dest, mem), (0, CopMemory::Guard { returning: false }));
    }

    #[test]
    fn guard_stays_without_neighbors() {
        let g = generate(FamilySpec::Path(4)).unwrap().graph;
        let mut agent = CopAgent::new(CopPolicy::Guard(0), 1, Limits::default());
        let (dest, _) = agent
            .decide(&g, &state(&g, 0, &[3]), &CopMemory::Guard { returning: false })
            .unwrap();
        assert_eq!(dest, 0);
    }

    #[test]
    fn patrol_alternates() {
        let g = generate(FamilySpec::Path(3)).unwrap().graph;
        let mut agent = CopAgent::new(CopPolicy::Patrol(1, 2), 1, Limits::default());
        let (start, mem) = agent.start(&g).unwrap();
        assert_eq!(start, 1);
        assert_eq!(agent.decide(&g, &state(&g, 1, &[0]), &mem).unwrap().0, 2);
        assert_eq!(agent.decide(&g, &state(&g, 2, &[0]), &mem).unwrap().0, 1);
        let mut bad = CopAgent::new(CopPolicy::Patrol(0, 2), 1, Limits::default());
        assert!(bad.start(&g).is_err());
    }

    #[test]
    fn greedy_chases_nearest() {
        let g = generate(FamilySpec::Path(6)).unwrap().graph;
        let mut agent = CopAgent::new(CopPolicy::Greedy, 2, Limits::default());
        assert_eq!(agent.start(&g).unwrap().0, 2);
        assert_eq!(agent.decide(&g, &state(&g, 2, &[0, 5]), &CopMemory::None).unwrap().0, 1);
    }

    #[test]
    fn random_walk_is_seeded() {
        let g = generate(FamilySpec::Cycle(9)).unwrap().graph;
        let run = |seed| {
            let mut agent = CopAgent::new(CopPolicy::RandomWalk(seed), 1, Limits::default());
            let (mut cop, mut mem) = agent.start(&g).unwrap();
            let mut trail = vec![cop];
            for _ in 0..20 {
                let (d, m) = agent.decide(&g, &state(&g, cop, &[0]), &mem).unwrap();
                assert!(d == cop || g.has_edge(cop, d));
                cop = d;
                mem = m;
                trail.push(cop);
            }
            trail
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn central_edge_of_path() {
        let g = generate(FamilySpec::Path(5)).unwrap().graph;
        assert_eq!(central_edge(&g), Some((1, 2)));
        assert_eq!(graph_center(&g), 2);
    }
}
