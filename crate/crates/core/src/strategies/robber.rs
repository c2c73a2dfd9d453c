use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cop::CopMemory;
use super::nav::View;
use super::scripts::{self, Ctx, ScriptKind, ScriptMemory};
use super::{CopAgent, PolicyError, RobberTeamPolicy};
use crate::families::{GreatCycle, Landmarks};
use crate::graph::{Graph, Vertex};
use crate::rules::{GameState, JointRobberMove, Phase};
use crate::solver::{solve_game, BestResponseTable, Limits, SolvedGame};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobberMemory {
    None,
    /// The opposing cop's memory after its latest move, tracked by replaying
    /// its (deterministic) policy.
    Witness(CopMemory),
    Script(ScriptMemory),
}

impl RobberMemory {
    pub fn script(&self) -> Option<&ScriptMemory> {
        match self {
            RobberMemory::Script(m) => Some(m),
            _ => None,
        }
    }
}

/// A robber-team policy plus its caches.
#[derive(Clone)]
pub struct RobberAgent {
    policy: RobberTeamPolicy,
    s: usize,
    limits: Limits,
    landmarks: Option<Landmarks>,
    cycles: Vec<GreatCycle>,
    dist: Vec<Vec<usize>>,
    solved: Option<Arc<SolvedGame>>,
    response: Option<(Arc<BestResponseTable>, CopAgent)>,
    goals_at_start: Vec<Vertex>,
}

impl RobberAgent {
    pub fn new(policy: RobberTeamPolicy, s: usize, limits: Limits, landmarks: Option<Landmarks>) -> RobberAgent {
        let cycles = landmarks.as_ref().map(Landmarks::great_cycles).unwrap_or_default();
        RobberAgent {
            policy,
            s,
            limits,
            landmarks,
            cycles,
            dist: Vec::new(),
            solved: None,
            response: None,
            goals_at_start: Vec::new(),
        }
    }

    pub fn policy(&self) -> &RobberTeamPolicy {
        &self.policy
    }

    pub fn is_complete(&self, mem: &RobberMemory) -> bool {
        mem.script().is_some_and(ScriptMemory::is_done)
    }

    fn script_kind(&self) -> Option<ScriptKind> {
        Some(match self.policy {
            RobberTeamPolicy::CycleAttack(i, j) => ScriptKind::CycleAttack(i, j),
            RobberTeamPolicy::AllOutAttack => ScriptKind::AllOut { pairs: false },
            RobberTeamPolicy::AllOutAttack2 => ScriptKind::AllOut { pairs: true },
            RobberTeamPolicy::ScriptGprime => ScriptKind::LowerBound { pairs: false },
            RobberTeamPolicy::ScriptG => ScriptKind::LowerBound { pairs: true },
            _ => return None,
        })
    }

    fn landmarks(&self) -> Result<&Landmarks, PolicyError> {
        self.landmarks
            .as_ref()
            .ok_or_else(|| PolicyError::MissingLandmarks(self.policy.to_string()))
    }

    fn check_script(&self, g: &Graph, kind: ScriptKind) -> Result<(), PolicyError> {
        let lm = self.landmarks()?;
        let name = self.policy.to_string();
        let fail = |msg: String| Err(PolicyError::Precondition(format!("{name}: {msg}")));
        if lm.paths.iter().flatten().any(|&v| v >= g.n()) {
            return fail("landmarks do not fit the graph".into());
        }
        match kind {
            ScriptKind::CycleAttack(i, j) => {
                if i >= lm.path_count() || j >= lm.path_count() || !lm.forms_great_cycle(i, j) {
                    return fail(format!("paths {i} and {j} do not form a great cycle"));
                }
                if self.s < 3 {
                    return fail("needs at least three robbers".into());
                }
            }
            ScriptKind::AllOut { pairs } => {
                if pairs && !lm.matched {
                    return fail("pair attack needs matched path ends".into());
                }
            }
            ScriptKind::LowerBound { pairs } => {
                if pairs != lm.matched {
                    return fail(format!("wrong graph family {}", lm.family));
                }
                if self.s < 3 {
                    return fail("needs at least three robbers".into());
                }
                if self.cycles.is_empty() {
                    return fail("graph has no great cycle".into());
                }
            }
        }
        Ok(())
    }

    fn full_solution(&mut self, g: &Graph) -> Result<Arc<SolvedGame>, PolicyError> {
        if let Some(s) = &self.solved {
            return Ok(s.clone());
        }
        let solved = Arc::new(solve_game(g, self.s, &self.limits)?);
        self.solved = Some(solved.clone());
        Ok(solved)
    }

    /// Joint placement after the cop has been placed.
    pub fn place(&mut self, g: &Graph, state: &GameState) -> Result<(Vec<Vertex>, RobberMemory), PolicyError> {
        if state.phase() != Phase::RobberPlacement {
            return Err(PolicyError::Precondition("robbers place after the cop".into()));
        }
        let cop = state.cop_vertex();
        self.dist = g.distance_matrix();
        match self.policy.clone() {
            RobberTeamPolicy::Optimal => {
                let solved = self.full_solution(g)?;
                let (_, placement) = solved
                    .robber_placement(g, cop)
                    .ok_or_else(|| PolicyError::NoDecision(self.policy.to_string()))?;
                Ok((placement, RobberMemory::None))
            }
            RobberTeamPolicy::BestResponse(cop_policy) => {
                let mut cop_agent = CopAgent::new(cop_policy, self.s, self.limits);
                let table = Arc::new(crate::solver::best_response_table(g, self.s, &mut cop_agent.clone(), &self.limits)?);
                let (_, placement) = table.placement();
                let (cop_start, mem0) = cop_agent.start(g)?;
                if cop_start != cop {
                    return Err(PolicyError::Precondition(format!(
                        "cop started at {cop}, its policy starts at {cop_start}"
                    )));
                }
                let placement = placement.to_vec();
                let (placed, _) = state.place_robbers(&placement).map_err(|e| PolicyError::Precondition(e.to_string()))?;
                let mem = if placed.is_settled() {
                    mem0
                } else {
                    cop_agent.decide(g, &placed, &mem0)?.1
                };
                self.response = Some((table, cop_agent));
                Ok((placement, RobberMemory::Witness(mem)))
            }
            RobberTeamPolicy::Stationary => {
                Ok((scripts::place_far(&self.dist, cop, self.s, None), RobberMemory::None))
            }
            RobberTeamPolicy::Cautious(goals) => {
                if goals.is_empty() || goals.iter().any(|&v| v >= g.n()) {
                    return Err(PolicyError::Precondition(format!("{}: goals outside the graph", self.policy)));
                }
                self.goals_at_start = goals;
                Ok((scripts::place_far(&self.dist, cop, self.s, None), RobberMemory::None))
            }
            _ => {
                let kind = self.script_kind().expect("remaining policies are scripts");
                self.check_script(g, kind)?;
                let lm = self.landmarks()?.clone();
                let mem = scripts::initial(kind, self.s, &lm, &self.cycles);
                let placement = match kind {
                    ScriptKind::AllOut { .. } if self.dist[cop][lm.v1] >= 2 => vec![lm.v1; self.s],
                    _ => {
                        let cycle = match &mem.phase {
                            scripts::ScriptPhase::Cycle { cycle, .. } => self.cycles.get(*cycle),
                            _ => None,
                        };
                        scripts::place_far(&self.dist, cop, self.s, cycle)
                    }
                };
                Ok((placement, RobberMemory::Script(mem)))
            }
        }
    }

    pub fn decide(
        &mut self,
        g: &Graph,
        state: &GameState,
        mem: &RobberMemory,
    ) -> Result<(JointRobberMove, RobberMemory), PolicyError> {
        if state.phase() != Phase::RobbersToMove {
            return Err(PolicyError::Precondition("not the robbers' turn".into()));
        }
        if self.dist.len() != g.n() {
            self.dist = g.distance_matrix();
        }
        let cop = state.cop_vertex();
        match (&self.policy, mem) {
            (RobberTeamPolicy::Optimal, _) => {
                let solved = self.full_solution(g)?;
                let mv = solved
                    .robber_move(g, state)
                    .ok_or_else(|| PolicyError::NoDecision(self.policy.to_string()))?;
                Ok((mv, RobberMemory::None))
            }
            (RobberTeamPolicy::BestResponse(_), RobberMemory::Witness(cop_mem)) => {
                let (table, cop_agent) = self
                    .response
                    .as_mut()
                    .ok_or_else(|| PolicyError::Precondition("best response used before placement".into()))?;
                let mv = table
                    .robber_move(g, state, cop_mem)
                    .ok_or_else(|| PolicyError::NoDecision(format!("{}", self.policy)))?;
                let (next, _) = state
                    .apply_robber_move(g, &mv)
                    .map_err(|e| PolicyError::Precondition(e.to_string()))?;
                let mem = if next.is_settled() {
                    *cop_mem
                } else {
                    cop_agent.decide(g, &next, cop_mem)?.1
                };
                Ok((mv, RobberMemory::Witness(mem)))
            }
            (RobberTeamPolicy::Stationary, _) => Ok((JointRobberMove::stay(state), RobberMemory::None)),
            (RobberTeamPolicy::Cautious(goals), _) => {
                let view = View::new(g, &self.dist, cop);
                let goals = if self.goals_at_start.is_empty() { goals } else { &self.goals_at_start };
                let dests = state
                    .robbers()
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r.position().map(|p| view.cautious_toward(p, goals[i % goals.len()])))
                    .collect();
                Ok((JointRobberMove { dests }, RobberMemory::None))
            }
            (_, RobberMemory::Script(sm)) => {
                let lm = self.landmarks()?;
                let ctx = Ctx {
                    view: View::new(g, &self.dist, cop),
                    state,
                    lm,
                    cycles: &self.cycles,
                };
                let (dests, sm) = scripts::decide(&ctx, sm);
                Ok((JointRobberMove { dests }, RobberMemory::Script(sm)))
            }
            (policy, mem) => Err(PolicyError::Precondition(format!(
                "{policy}: memory {mem:?} does not belong to this policy"
            ))),
        }
    }
}
