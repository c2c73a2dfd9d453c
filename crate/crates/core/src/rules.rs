//! The damage game state machine for one cop and `s` robbers.
//!
//! A round is a cop move followed by one joint move of the robber team.
//! Right after the cop moves, robbers on the cop's vertex are caught and every
//! vertex still occupied by a live robber becomes damaged: those robbers held
//! the vertex at the end of the previous round and survived this round's cop
//! move. A robber that steps onto the cop is caught at once; the damage
//! assessed earlier in the same round stands.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::graph::{DotOverlay, Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    CopPlacement,
    RobberPlacement,
    CopToMove,
    RobbersToMove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobberStatus {
    Live(Vertex),
    Caught,
}

impl RobberStatus {
    pub fn position(self) -> Option<Vertex> {
        match self {
            RobberStatus::Live(v) => Some(v),
            RobberStatus::Caught => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("the game needs at least one robber")]
    NoRobbers,
    #[error("the game needs a nonempty graph")]
    EmptyGraph,
    #[error("action requires phase {expected:?} but the game is in {found:?}")]
    WrongPhase { expected: Phase, found: Phase },
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(Vertex),
    #[error("expected {expected} robber entries, got {got}")]
    WrongRobberCount { expected: usize, got: usize },
    #[error("cop cannot move from {from} to {to}")]
    IllegalCopMove { from: Vertex, to: Vertex },
    #[error("robber {robber} cannot move from {from} to {to}")]
    IllegalRobberMove {
        robber: usize,
        from: Vertex,
        to: Vertex,
    },
    #[error("robber {robber} is caught and cannot be given a move")]
    MoveForCaughtRobber { robber: usize },
    #[error("live robber {robber} has no destination")]
    MissingRobberMove { robber: usize },
}

/// Destinations for the whole robber team: `dests[i]` is `Some` exactly for
/// live robbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointRobberMove {
    pub dests: Vec<Option<Vertex>>,
}

impl JointRobberMove {
    /// Every live robber stays put.
    pub fn stay(state: &GameState) -> Self {
        JointRobberMove {
            dests: state.robbers.iter().map(|r| r.position()).collect(),
        }
    }

    /// Sorted multiset of destinations.
    pub fn multiset(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.dests.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

/// What a cop move did.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopEvents {
    pub captured: Vec<usize>,
    pub damaged: Vec<Vertex>,
}

/// What a robber move did.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobberEvents {
    pub captured: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    n: usize,
    s: usize,
    cop: Option<Vertex>,
    robbers: Vec<RobberStatus>,
    damaged: VertexSet,
    phase: Phase,
    round: u32,
}

impl GameState {
    pub fn initial(g: &Graph, s: usize) -> Result<GameState, RulesError> {
        if s == 0 {
            return Err(RulesError::NoRobbers);
        }
        if g.n() == 0 {
            return Err(RulesError::EmptyGraph);
        }
        Ok(GameState {
            n: g.n(),
            s,
            cop: None,
            robbers: Vec::new(),
            damaged: VertexSet::new(g.n()),
            phase: Phase::CopPlacement,
            round: 0,
        })
    }

    /// A post-placement state with the cop to move; robbers given as
    /// statuses. No damage is recorded beyond `damaged`.
    pub fn from_parts(
        g: &Graph,
        cop: Vertex,
        robbers: Vec<RobberStatus>,
        damaged: &[Vertex],
        phase: Phase,
        round: u32,
    ) -> Result<GameState, RulesError> {
        let check = |v: Vertex| {
            if v < g.n() {
                Ok(())
            } else {
                Err(RulesError::VertexOutOfRange(v))
            }
        };
        check(cop)?;
        for r in &robbers {
            if let Some(v) = r.position() {
                check(v)?;
            }
        }
        for &d in damaged {
            check(d)?;
        }
        if robbers.is_empty() {
            return Err(RulesError::NoRobbers);
        }
        Ok(GameState {
            n: g.n(),
            s: robbers.len(),
            cop: Some(cop),
            robbers,
            damaged: VertexSet::from_vertices(g.n(), damaged.iter().copied()),
            phase,
            round,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn robber_count(&self) -> usize {
        self.s
    }

    pub fn cop(&self) -> Option<Vertex> {
        self.cop
    }

    /// Cop position; panics before placement.
    pub fn cop_vertex(&self) -> Vertex {
        self.cop.expect("cop has been placed")
    }

    pub fn robbers(&self) -> &[RobberStatus] {
        &self.robbers
    }

    pub fn damaged(&self) -> &VertexSet {
        &self.damaged
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    /// `(robber id, vertex)` for every live robber.
    pub fn live_robbers(&self) -> impl Iterator<Item = (usize, Vertex)> + '_ {
        self.robbers
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.position().map(|v| (i, v)))
    }

    /// Sorted multiset of live robber positions.
    pub fn live_positions(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.live_robbers().map(|(_, v)| v).collect();
        v.sort_unstable();
        v
    }

    pub fn live_count(&self) -> usize {
        self.live_robbers().count()
    }

    pub fn is_live(&self, robber: usize) -> bool {
        matches!(self.robbers.get(robber), Some(RobberStatus::Live(_)))
    }

    /// The solver's progress measure: (live robbers, damaged set). Along any
    /// transition the first component never grows and, while it stays
    /// equal, the second never shrinks.
    pub fn class_key(&self) -> (usize, VertexSet) {
        (self.live_count(), self.damaged.clone())
    }

    /// True once no live robber remains (after placement); the final damage
    /// is then frozen.
    pub fn is_settled(&self) -> bool {
        matches!(self.phase, Phase::CopToMove | Phase::RobbersToMove) && self.live_count() == 0
    }

    /// The same position with the round counter cleared, for repetition
    /// detection.
    pub fn position_key(&self) -> GameState {
        GameState {
            round: 0,
            ..self.clone()
        }
    }

    pub fn dot_overlay(&self) -> DotOverlay {
        DotOverlay {
            cop: self.cop,
            robbers: self.live_positions(),
            damaged: self.damaged.clone(),
        }
    }

    fn expect_phase(&self, expected: Phase) -> Result<(), RulesError> {
        if self.phase == expected {
            Ok(())
        } else {
            Err(RulesError::WrongPhase {
                expected,
                found: self.phase,
            })
        }
    }

    pub fn place_cop(&self, v: Vertex) -> Result<GameState, RulesError> {
        self.expect_phase(Phase::CopPlacement)?;
        if v >= self.n {
            return Err(RulesError::VertexOutOfRange(v));
        }
        Ok(GameState {
            cop: Some(v),
            phase: Phase::RobberPlacement,
            ..self.clone()
        })
    }

    /// Places all robbers (one joint choice). A robber placed on the cop is
    /// caught immediately. Play continues with the cop's move of round 1.
    pub fn place_robbers(&self, vertices: &[Vertex]) -> Result<(GameState, RobberEvents), RulesError> {
        self.expect_phase(Phase::RobberPlacement)?;
        if vertices.len() != self.s {
            return Err(RulesError::WrongRobberCount {
                expected: self.s,
                got: vertices.len(),
            });
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= self.n) {
            return Err(RulesError::VertexOutOfRange(v));
        }
        let cop = self.cop_vertex();
        let mut events = RobberEvents::default();
        let robbers = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == cop {
                    events.captured.push(i);
                    RobberStatus::Caught
                } else {
                    RobberStatus::Live(v)
                }
            })
            .collect();
        Ok((
            GameState {
                robbers,
                phase: Phase::CopToMove,
                round: 1,
                ..self.clone()
            },
            events,
        ))
    }

    pub fn legal_cop_moves(&self, g: &Graph) -> Result<Vec<Vertex>, RulesError> {
        self.expect_phase(Phase::CopToMove)?;
        Ok(g.closed_neighborhood(self.cop_vertex()))
    }

    /// Cop moves to `dest`; captures, then damage assessment.
    pub fn apply_cop_move(&self, g: &Graph, dest: Vertex) -> Result<(GameState, CopEvents), RulesError> {
        self.expect_phase(Phase::CopToMove)?;
        let from = self.cop_vertex();
        if dest >= self.n || (dest != from && !g.has_edge(from, dest)) {
            return Err(RulesError::IllegalCopMove { from, to: dest });
        }
        let mut next = self.clone();
        let mut events = CopEvents::default();
        next.cop = Some(dest);
        for (i, r) in next.robbers.iter_mut().enumerate() {
            if *r == RobberStatus::Live(dest) {
                *r = RobberStatus::Caught;
                events.captured.push(i);
            }
        }
        for r in &next.robbers {
            if let RobberStatus::Live(v) = *r {
                if next.damaged.insert(v) {
                    events.damaged.push(v);
                }
            }
        }
        events.damaged.sort_unstable();
        next.phase = Phase::RobbersToMove;
        Ok((next, events))
    }

    /// All joint robber moves, one per multiset of destinations. The
    /// representative of each multiset is the first one met in the product
    /// order (robber 0 slowest-varying, neighbors ascending).
    pub fn legal_joint_robber_moves(&self, g: &Graph) -> Result<Vec<JointRobberMove>, RulesError> {
        self.expect_phase(Phase::RobbersToMove)?;
        let live: Vec<(usize, Vertex)> = self.live_robbers().collect();
        let options: Vec<Vec<Vertex>> = live.iter().map(|&(_, v)| g.closed_neighborhood(v)).collect();
        let mut seen = rustc_hash::FxHashSet::default();
        let mut out = Vec::new();
        let mut idx = vec![0usize; live.len()];
        loop {
            let mut dests = vec![None; self.s];
            for (k, &(rid, _)) in live.iter().enumerate() {
                dests[rid] = Some(options[k][idx[k]]);
            }
            let mv = JointRobberMove { dests };
            if seen.insert(mv.multiset()) {
                out.push(mv);
            }
            // Odometer increment, last robber fastest.
            let mut k = live.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    pub fn check_robber_move(&self, g: &Graph, mv: &JointRobberMove) -> Result<(), RulesError> {
        if mv.dests.len() != self.s {
            return Err(RulesError::WrongRobberCount {
                expected: self.s,
                got: mv.dests.len(),
            });
        }
        for (i, (status, dest)) in self.robbers.iter().zip(&mv.dests).enumerate() {
            match (*status, *dest) {
                (RobberStatus::Caught, Some(_)) => {
                    return Err(RulesError::MoveForCaughtRobber { robber: i })
                }
                (RobberStatus::Live(_), None) => {
                    return Err(RulesError::MissingRobberMove { robber: i })
                }
                (RobberStatus::Live(from), Some(to)) => {
                    if to >= self.n || (to != from && !g.has_edge(from, to)) {
                        return Err(RulesError::IllegalRobberMove { robber: i, from, to });
                    }
                }
                (RobberStatus::Caught, None) => {}
            }
        }
        Ok(())
    }

    /// Robbers move; any robber stepping onto the cop is caught. Starts the
    /// next round.
    pub fn apply_robber_move(
        &self,
        g: &Graph,
        mv: &JointRobberMove,
    ) -> Result<(GameState, RobberEvents), RulesError> {
        self.expect_phase(Phase::RobbersToMove)?;
        self.check_robber_move(g, mv)?;
        let cop = self.cop_vertex();
        let mut next = self.clone();
        let mut events = RobberEvents::default();
        for (i, dest) in mv.dests.iter().enumerate() {
            if let Some(d) = *dest {
                next.robbers[i] = if d == cop {
                    events.captured.push(i);
                    RobberStatus::Caught
                } else {
                    RobberStatus::Live(d)
                };
            }
        }
        next.phase = Phase::CopToMove;
        next.round += 1;
        Ok((next, events))
    }
}
