//! Simple undirected graphs with dense vertex ids, breadth-first queries,
//! induced-star search, and the plain edge-list text format.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bitset::VertexSet;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected \"n m\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed edge line, expected \"u v\"")]
    MalformedEdge { line: usize },
    #[error("line {line}: token {token:?} is not a non-negative integer")]
    NotAnInteger { line: usize, token: String },
    #[error("line {line}: wrong edge count, header declares {expected} edges but found {found}")]
    WrongEdgeCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

/// Immutable simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Adjacency lists are sorted.
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph {
            adj,
            edge_count: edges.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// Sorted open neighborhood. Panics on an out-of-range vertex.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    /// Closed neighborhood N[v], ascending.
    pub fn closed_neighborhood(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.adj[v].len() + 1);
        let mut placed = false;
        for &u in &self.adj[v] {
            if !placed && v < u {
                out.push(v);
                placed = true;
            }
            out.push(u);
        }
        if !placed {
            out.push(v);
        }
        out
    }

    pub fn closed_neighborhood_set(&self, v: Vertex) -> VertexSet {
        VertexSet::from_vertices(self.n(), self.closed_neighborhood(v))
    }

    pub fn degree(&self, v: Vertex) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.adj[v].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs(0, None).iter().all(Option::is_some)
    }

    /// BFS distances from `src`; vertices in `forbidden` (other than `src`)
    /// are never entered.
    pub fn bfs(&self, src: Vertex, forbidden: Option<&VertexSet>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &v in &self.adj[u] {
                if dist[v].is_none() && !forbidden.is_some_and(|f| f.contains(v)) {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<Option<usize>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs(u, None)[v])
    }

    /// All-pairs distances, `usize::MAX` for unreachable pairs.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.n())
            .map(|u| {
                self.bfs(u, None)
                    .into_iter()
                    .map(|d| d.unwrap_or(usize::MAX))
                    .collect()
            })
            .collect()
    }

    /// Shortest path `u = p0, p1, ..., pk = v` avoiding `forbidden`.
    ///
    /// The start vertex is exempt from the forbidden set; a forbidden target
    /// is unreachable. Among shortest paths, each step takes the lowest-id
    /// admissible neighbor.
    pub fn shortest_path(
        &self,
        u: Vertex,
        v: Vertex,
        forbidden: &VertexSet,
    ) -> Result<Option<Vec<Vertex>>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(vec![u]));
        }
        if forbidden.contains(v) {
            return Ok(None);
        }
        let mut blocked = forbidden.clone();
        blocked.remove(u);
        let to_target = self.bfs(v, Some(&blocked));
        let Some(mut d) = to_target[u] else {
            return Ok(None);
        };
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            let next = self.adj[cur]
                .iter()
                .copied()
                .find(|&x| to_target[x] == Some(d - 1) && (x == v || !blocked.contains(x)))
                .expect("BFS layers guarantee a predecessor");
            path.push(next);
            cur = next;
            d -= 1;
        }
        Ok(Some(path))
    }

    /// A vertex with `t` pairwise non-adjacent neighbors, if any.
    ///
    /// Centers are tried in ascending order. Neighborhoods of graphs with at
    /// most 32 vertices are searched exhaustively; larger graphs first try a
    /// min-degree greedy pick and fall back to the exhaustive search.
    pub fn find_induced_star(&self, t: usize) -> Option<(Vertex, Vec<Vertex>)> {
        if t == 0 {
            return None;
        }
        for center in 0..self.n() {
            let nbrs = &self.adj[center];
            if nbrs.len() < t {
                continue;
            }
            if self.n() > 32 {
                if let Some(leaves) = self.greedy_independent(nbrs, t) {
                    return Some((center, leaves));
                }
            }
            let mut chosen = Vec::with_capacity(t);
            if self.independent_search(nbrs, t, &mut chosen) {
                return Some((center, chosen));
            }
        }
        None
    }

    fn greedy_independent(&self, cands: &[Vertex], t: usize) -> Option<Vec<Vertex>> {
        let inner_degree = |v: Vertex| cands.iter().filter(|&&u| self.has_edge(u, v)).count();
        let mut order = cands.to_vec();
        order.sort_by_key(|&v| (inner_degree(v), v));
        let mut picked: Vec<Vertex> = Vec::new();
        for v in order {
            if picked.iter().all(|&p| !self.has_edge(p, v)) {
                picked.push(v);
                if picked.len() == t {
                    picked.sort_unstable();
                    return Some(picked);
                }
            }
        }
        None
    }

    fn independent_search(&self, cands: &[Vertex], t: usize, chosen: &mut Vec<Vertex>) -> bool {
        if chosen.len() == t {
            return true;
        }
        for (i, &v) in cands.iter().enumerate() {
            if chosen.len() + (cands.len() - i) < t {
                return false;
            }
            if chosen.iter().any(|&c| self.has_edge(c, v)) {
                continue;
            }
            chosen.push(v);
            if self.independent_search(&cands[i + 1..], t, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges().into_iter().all(|(u, v)| {
            let (a, b) = (&self.adj[u], &self.adj[v]);
            !a.iter().any(|x| b.binary_search(x).is_ok())
        })
    }

    /// Serializes to the edge-list format: `"n m\n"` followed by one
    /// `"u v\n"` line per edge with `u < v`, in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or(ParseError::MalformedHeader { line: 1 })?;
        let head: Vec<&str> = header.split_ascii_whitespace().collect();
        if head.len() != 2 {
            return Err(ParseError::MalformedHeader { line: 1 });
        }
        let n = parse_int(head[0], 1)?;
        let m = parse_int(head[1], 1)?;
        let mut edges = Vec::with_capacity(m);
        let mut seen = std::collections::HashSet::new();
        let mut last_line = 1;
        for (line, raw) in lines {
            last_line = line;
            if raw.trim().is_empty() {
                continue;
            }
            if edges.len() == m {
                return Err(ParseError::WrongEdgeCount {
                    line,
                    expected: m,
                    found: m + 1,
                });
            }
            let toks: Vec<&str> = raw.split_ascii_whitespace().collect();
            if toks.len() != 2 {
                return Err(ParseError::MalformedEdge { line });
            }
            let (u, v) = (parse_int(toks[0], line)?, parse_int(toks[1], line)?);
            let err = |source| ParseError::Graph { line, source };
            for x in [u, v] {
                if x >= n {
                    return Err(err(GraphError::VertexOutOfRange { vertex: x, n }));
                }
            }
            if u == v {
                return Err(err(GraphError::SelfLoop(u)));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(err(GraphError::DuplicateEdge(u.min(v), u.max(v))));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            // Report the line where the next edge was expected.
            let line = if text.ends_with('\n') {
                last_line
            } else {
                last_line + 1
            };
            return Err(ParseError::WrongEdgeCount {
                line,
                expected: m,
                found: edges.len(),
            });
        }
        Graph::new(n, &edges).map_err(|source| ParseError::Graph {
            line: last_line,
            source,
        })
    }

    /// Graphviz rendering. With an overlay, damaged vertices are filled,
    /// the cop's vertex is drawn as a box and robber-occupied vertices are
    /// outlined in red.
    pub fn to_dot(&self, overlay: Option<&DotOverlay>) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.n() {
            let mut attrs: Vec<String> = Vec::new();
            if let Some(o) = overlay {
                if o.damaged.contains(v) {
                    attrs.push("style=filled".into());
                    attrs.push("fillcolor=gray".into());
                }
                if o.cop == Some(v) {
                    attrs.push("shape=box".into());
                }
                let robbers = o.robbers.iter().filter(|&&r| r == v).count();
                if robbers > 0 {
                    attrs.push("color=red".into());
                    attrs.push(format!("xlabel=\"R{robbers}\""));
                }
            }
            if attrs.is_empty() {
                let _ = writeln!(out, "  {v};");
            } else {
                let _ = writeln!(out, "  {v} [{}];", attrs.join(", "));
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Game-state annotations for [`Graph::to_dot`].
#[derive(Debug, Clone, Default)]
pub struct DotOverlay {
    pub cop: Option<Vertex>,
    pub robbers: Vec<Vertex>,
    pub damaged: VertexSet,
}

fn parse_int(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError::NotAnInteger {
        line,
        token: tok.to_string(),
    })
}
