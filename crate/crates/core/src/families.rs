//! Graph families: stars, paths, cycles, cliques, and the two hub-and-paths
//! constructions used for the lower bounds.
//!
//! `gprime(l)` joins two hubs `v1` and `v2` by `l` internally disjoint paths
//! with 7 edges each. `g(l)` (even `l`) adds the matching edges
//! `w_{2i} w_{2i+1}` and `u_{2i} u_{2i+1}` (0-based), where `w_i` / `u_i` is
//! the neighbor of `v1` / `v2` on path `i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Number of edges on each hub-to-hub path.
pub const PATH_LEN: usize = 7;
/// Length of a great cycle.
pub const GREAT_CYCLE_LEN: usize = 2 * PATH_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "param", rename_all = "lowercase")]
pub enum FamilySpec {
    Star(usize),
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Gprime(usize),
    G(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("invalid parameter {param} for family {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        param: usize,
        reason: &'static str,
    },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("graph carries no hub-and-path landmarks")]
    NoLandmarks,
}

impl FamilySpec {
    pub fn name(self) -> &'static str {
        match self {
            FamilySpec::Star(_) => "star",
            FamilySpec::Path(_) => "path",
            FamilySpec::Cycle(_) => "cycle",
            FamilySpec::Complete(_) => "complete",
            FamilySpec::Gprime(_) => "gprime",
            FamilySpec::G(_) => "g",
        }
    }

    pub fn param(self) -> usize {
        match self {
            FamilySpec::Star(p)
            | FamilySpec::Path(p)
            | FamilySpec::Cycle(p)
            | FamilySpec::Complete(p)
            | FamilySpec::Gprime(p)
            | FamilySpec::G(p) => p,
        }
    }

    pub fn from_parts(family: &str, param: usize) -> Result<FamilySpec, FamilyError> {
        let spec = match family {
            "star" => FamilySpec::Star(param),
            "path" => FamilySpec::Path(param),
            "cycle" => FamilySpec::Cycle(param),
            "complete" => FamilySpec::Complete(param),
            "gprime" => FamilySpec::Gprime(param),
            "g" => FamilySpec::G(param),
            other => return Err(FamilyError::UnknownFamily(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(self) -> Result<(), FamilyError> {
        let bad = |reason| {
            Err(FamilyError::InvalidParameter {
                family: self.name(),
                param: self.param(),
                reason,
            })
        };
        match self {
            FamilySpec::Star(0) => bad("star needs t >= 1"),
            FamilySpec::Path(0) | FamilySpec::Complete(0) => bad("need n >= 1"),
            FamilySpec::Cycle(n) if n < 3 => bad("cycle needs n >= 3"),
            FamilySpec::Gprime(l) if l < 2 => bad("gprime needs l >= 2"),
            FamilySpec::G(l) if l < 2 => bad("g needs l >= 2"),
            FamilySpec::G(l) if l % 2 == 1 => bad("g needs l even"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.param())
    }
}

impl FromStr for FamilySpec {
    type Err = FamilyError;

    /// Accepts `name(param)` or `name:param`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, param) = s
            .strip_suffix(')')
            .and_then(|r| r.split_once('('))
            .or_else(|| s.split_once(':'))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))?;
        let param = param
            .trim()
            .parse()
            .map_err(|_| FamilyError::UnknownFamily(s.to_string()))?;
        FamilySpec::from_parts(name.trim(), param)
    }
}

/// Named vertices of a hub-and-paths graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Landmarks {
    pub family: FamilySpec,
    pub v1: Vertex,
    pub v2: Vertex,
    /// `paths[i]` lists path `i` from `v1` to `v2` inclusive (8 vertices).
    pub paths: Vec<Vec<Vertex>>,
    /// Whether the `w`/`u` matching edges are present (family `g`).
    pub matched: bool,
}

impl Landmarks {
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    /// Neighbor of `v1` on path `i`.
    pub fn w(&self, i: usize) -> Vertex {
        self.paths[i][1]
    }

    /// Neighbor of `v2` on path `i`.
    pub fn u(&self, i: usize) -> Vertex {
        self.paths[i][PATH_LEN - 1]
    }

    /// Internal vertices of path `i`, ordered from `v1` towards `v2`.
    pub fn interior(&self, i: usize) -> &[Vertex] {
        &self.paths[i][1..PATH_LEN]
    }

    /// The path index containing an internal vertex, with its offset from `v1`.
    pub fn locate(&self, v: Vertex) -> Option<(usize, usize)> {
        self.paths
            .iter()
            .enumerate()
            .find_map(|(i, p)| p[1..PATH_LEN].iter().position(|&x| x == v).map(|k| (i, k + 1)))
    }

    /// Whether paths `i` and `j` form a great cycle.
    pub fn forms_great_cycle(&self, i: usize, j: usize) -> bool {
        i != j && (!self.matched || i / 2 != j / 2)
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.matched.then_some(i ^ 1)
    }

    /// Great cycles in ascending `(i, j)` order.
    pub fn great_cycles(&self) -> Vec<GreatCycle> {
        let l = self.path_count();
        let mut out = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                if self.forms_great_cycle(i, j) {
                    let mut vertices = self.paths[i][..PATH_LEN].to_vec();
                    vertices.extend(self.paths[j][1..].iter().rev());
                    out.push(GreatCycle {
                        path_indices: (i, j),
                        vertices,
                    });
                }
            }
        }
        out
    }
}

/// A chordless 14-cycle through both hubs: `v1`, path `i` to `v2`, then path
/// `j` back. Position 0 is `v1` and position 7 is `v2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreatCycle {
    pub path_indices: (usize, usize),
    pub vertices: Vec<Vertex>,
}

impl GreatCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    /// Vertex `steps` positions clockwise (negative: counter-clockwise).
    pub fn step(&self, pos: usize, steps: isize) -> Vertex {
        let n = self.len() as isize;
        self.vertices[(pos as isize + steps).rem_euclid(n) as usize]
    }

    /// True when consecutive vertices are adjacent and no other pair is.
    pub fn is_chordless_cycle_in(&self, g: &Graph) -> bool {
        let n = self.len();
        let mut distinct = self.vertices.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != n || n < 3 {
            return false;
        }
        for a in 0..n {
            for b in a + 1..n {
                let consecutive = b == a + 1 || (a == 0 && b == n - 1);
                if g.has_edge(self.vertices[a], self.vertices[b]) != consecutive {
                    return false;
                }
            }
        }
        true
    }
}

/// A generated graph together with its landmarks (hub-and-path families only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub graph: Graph,
    pub landmarks: Option<Landmarks>,
}

impl Generated {
    pub fn landmarks(&self) -> Result<&Landmarks, FamilyError> {
        self.landmarks.as_ref().ok_or(FamilyError::NoLandmarks)
    }

    pub fn great_cycles(&self) -> Result<Vec<GreatCycle>, FamilyError> {
        Ok(self.landmarks()?.great_cycles())
    }
}

pub fn generate(spec: FamilySpec) -> Result<Generated, FamilyError> {
    spec.validate()?;
    let plain = |n: usize, edges: Vec<(Vertex, Vertex)>| Generated {
        graph: Graph::new(n, &edges).expect("family edges are simple"),
        landmarks: None,
    };
    Ok(match spec {
        FamilySpec::Star(t) => plain(t + 1, (1..=t).map(|i| (0, i)).collect()),
        FamilySpec::Path(n) => plain(n, (1..n).map(|i| (i - 1, i)).collect()),
        FamilySpec::Cycle(n) => plain(n, (0..n).map(|i| (i, (i + 1) % n)).collect()),
        FamilySpec::Complete(n) => plain(
            n,
            (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect(),
        ),
        FamilySpec::Gprime(l) => hub_graph(spec, l, false),
        FamilySpec::G(l) => hub_graph(spec, l, true),
    })
}

fn hub_graph(family: FamilySpec, l: usize, matched: bool) -> Generated {
    let (v1, v2) = (0, 1);
    let inner = PATH_LEN - 1;
    let n = 2 + inner * l;
    let mut edges = Vec::with_capacity(PATH_LEN * l + if matched { l } else { 0 });
    let mut paths = Vec::with_capacity(l);
    for i in 0..l {
        let mut path = vec![v1];
        path.extend((0..inner).map(|k| 2 + inner * i + k));
        path.push(v2);
        edges.extend(path.windows(2).map(|w| (w[0], w[1])));
        paths.push(path);
    }
    let landmarks = Landmarks {
        family,
        v1,
        v2,
        paths,
        matched,
    };
    if matched {
        for i in (0..l).step_by(2) {
            edges.push((landmarks.w(i), landmarks.w(i + 1)));
            edges.push((landmarks.u(i), landmarks.u(i + 1)));
        }
    }
    Generated {
        graph: Graph::new(n, &edges).expect("hub graph edges are simple"),
        landmarks: Some(landmarks),
    }
}
