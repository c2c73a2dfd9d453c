//! Cop policies and robber-team policies.
//!
//! Policies are deterministic functions of the observed state, an explicit
//! serializable memory value, and (for the random walk) a seed. Agents wrap a
//! policy with the caches it needs (solved tables, distance matrices) but
//! expose no other mutable state.

mod cop;
pub mod nav;
mod robber;
mod scripts;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Vertex;
use crate::solver::SolveError;

pub use cop::{central_edge, graph_center, CopAgent, CopMemory, EndgameMode};
pub use robber::{RobberAgent, RobberMemory};
pub use scripts::{Boundary, ScriptKind, ScriptMemory, ScriptPhase};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("bad policy spec {0:?}")]
    BadSpec(String),
    #[error("policy {0} needs a graph with hub-and-path landmarks")]
    MissingLandmarks(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("policy {0} was asked to act in a state it has no answer for")]
    NoDecision(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CopPolicy {
    Guard(Vertex),
    Patrol(Vertex, Vertex),
    Greedy,
    Stationary(Vertex),
    RandomWalk(u64),
    GuardThenEndgame(Vertex),
    Optimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RobberTeamPolicy {
    /// Exact optimal play from the full solved game.
    Optimal,
    /// Exact best response to a fixed cop policy.
    BestResponse(CopPolicy),
    /// Stay on the placement vertices forever.
    Stationary,
    /// Each robber cautiously heads to its goal (goals reused cyclically).
    Cautious(Vec<Vertex>),
    /// Cycle attack on the great cycle formed by paths `i` and `j`.
    CycleAttack(usize, usize),
    AllOutAttack,
    AllOutAttack2,
    ScriptGprime,
    ScriptG,
}

fn parse_vertex(s: &str, spec: &str) -> Result<Vertex, PolicyError> {
    s.trim().parse().map_err(|_| PolicyError::BadSpec(spec.to_string()))
}

fn parse_pair(s: &str, spec: &str) -> Result<(usize, usize), PolicyError> {
    let (a, b) = s.split_once('-').ok_or_else(|| PolicyError::BadSpec(spec.to_string()))?;
    Ok((parse_vertex(a, spec)?, parse_vertex(b, spec)?))
}

impl FromStr for CopPolicy {
    type Err = PolicyError;

    /// `guard:v`, `patrol:u-v`, `greedy`, `stationary:v`, `random:seed`,
    /// `guard+endgame:v`, `optimal`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let need = || arg.ok_or_else(|| PolicyError::BadSpec(spec.to_string()));
        Ok(match head {
            "guard" => CopPolicy::Guard(parse_vertex(need()?, spec)?),
            "patrol" => {
                let (u, v) = parse_pair(need()?, spec)?;
                CopPolicy::Patrol(u, v)
            }
            "greedy" if arg.is_none() => CopPolicy::Greedy,
            "stationary" => CopPolicy::Stationary(parse_vertex(need()?, spec)?),
            "random" => CopPolicy::RandomWalk(
                need()?.trim().parse().map_err(|_| PolicyError::BadSpec(spec.to_string()))?,
            ),
            "guard+endgame" => CopPolicy::GuardThenEndgame(parse_vertex(need()?, spec)?),
            "optimal" if arg.is_none() => CopPolicy::Optimal,
            _ => return Err(PolicyError::BadSpec(spec.to_string())),
        })
    }
}

impl fmt::Display for CopPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CopPolicy::Guard(v) => write!(f, "guard:{v}"),
            CopPolicy::Patrol(u, v) => write!(f, "patrol:{u}-{v}"),
            CopPolicy::Greedy => write!(f, "greedy"),
            CopPolicy::Stationary(v) => write!(f, "stationary:{v}"),
            CopPolicy::RandomWalk(seed) => write!(f, "random:{seed}"),
            CopPolicy::GuardThenEndgame(v) => write!(f, "guard+endgame:{v}"),
            CopPolicy::Optimal => write!(f, "optimal"),
        }
    }
}

impl FromStr for RobberTeamPolicy {
    type Err = PolicyError;

    /// `optimal`, `best-response:<cop spec>`, `stationary`,
    /// `cautious:v,v,...`, `cycleattack:i-j`, `allout`, `allout2`,
    /// `script:gprime`, `script:g`.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let bad = || PolicyError::BadSpec(spec.to_string());
        Ok(match spec.split_once(':') {
            None => match spec {
                "optimal" => RobberTeamPolicy::Optimal,
                "stationary" => RobberTeamPolicy::Stationary,
                "allout" => RobberTeamPolicy::AllOutAttack,
                "allout2" => RobberTeamPolicy::AllOutAttack2,
                _ => return Err(bad()),
            },
            Some(("best-response", cop)) => RobberTeamPolicy::BestResponse(cop.parse()?),
            Some(("cautious", goals)) => RobberTeamPolicy::Cautious(
                goals
                    .split(',')
                    .map(|g| parse_vertex(g, spec))
                    .collect::<Result<_, _>>()?,
            ),
            Some(("cycleattack", pair)) => {
                let (i, j) = parse_pair(pair, spec)?;
                RobberTeamPolicy::CycleAttack(i, j)
            }
            Some(("script", "gprime")) => RobberTeamPolicy::ScriptGprime,
            Some(("script", "g")) => RobberTeamPolicy::ScriptG,
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for RobberTeamPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobberTeamPolicy::Optimal => write!(f, "optimal"),
            RobberTeamPolicy::BestResponse(c) => write!(f, "best-response:{c}"),
            RobberTeamPolicy::Stationary => write!(f, "stationary"),
            RobberTeamPolicy::Cautious(goals) => {
                let g: Vec<String> = goals.iter().map(ToString::to_string).collect();
                write!(f, "cautious:{}", g.join(","))
            }
            RobberTeamPolicy::CycleAttack(i, j) => write!(f, "cycleattack:{i}-{j}"),
            RobberTeamPolicy::AllOutAttack => write!(f, "allout"),
            RobberTeamPolicy::AllOutAttack2 => write!(f, "allout2"),
            RobberTeamPolicy::ScriptGprime => write!(f, "script:gprime"),
            RobberTeamPolicy::ScriptG => write!(f, "script:g"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cop_specs_roundtrip() {
        for s in ["guard:3", "patrol:0-1", "greedy", "stationary:2", "random:17", "guard+endgame:0", "optimal"] {
            let p: CopPolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        for bad in ["guard", "guard:x", "patrol:1", "greedy:1", "teleport:3"] {
            assert!(bad.parse::<CopPolicy>().is_err(), "{bad}");
        }
    }

    #[test]
    fn robber_specs_roundtrip() {
        for s in [
            "optimal",
            "best-response:guard:0",
            "stationary",
            "cautious:1,2",
            "cycleattack:0-2",
            "allout",
            "allout2",
            "script:gprime",
            "script:g",
        ] {
            let p: RobberTeamPolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("script:h".parse::<RobberTeamPolicy>().is_err());
        assert!("cycleattack:1".parse::<RobberTeamPolicy>().is_err());
    }
}
