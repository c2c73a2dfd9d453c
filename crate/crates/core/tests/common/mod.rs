//! Shared test helpers: an independent depth-capped minimax for the game
//! and small-graph enumeration.
#![allow(dead_code)]

use std::collections::HashMap;

use cops_damage::Graph;
use rand::Rng;

/// Post-placement position with the cop to move. Robbers are a sorted
/// multiset of live positions; caught robbers are dropped.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Pos {
    cop: u8,
    robbers: Vec<u8>,
    damaged: u64,
}

enum Succ {
    Done(u32),
    Node(usize),
}

/// The game tree of one graph and team size, flattened to reachable
/// positions so that depth-capped minimax can be computed bottom-up.
pub struct Oracle {
    closed: Vec<Vec<u8>>,
    index: HashMap<Pos, usize>,
    positions: Vec<Pos>,
    /// `moves[i][c]`: outcomes of the robbers' replies after cop option `c`.
    moves: Vec<Vec<Vec<Succ>>>,
    roots: Vec<Vec<Succ>>,
}

fn multisets(n: usize, k: usize) -> Vec<Vec<u8>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v as u8);
            rec(v, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl Oracle {
    pub fn new(g: &Graph, s: usize) -> Oracle {
        let n = g.n();
        let closed = (0..n)
            .map(|v| {
                let mut c: Vec<u8> = g.neighbors(v).iter().map(|&u| u as u8).collect();
                c.push(v as u8);
                c.sort_unstable();
                c
            })
            .collect();
        let mut o = Oracle {
            closed,
            index: HashMap::new(),
            positions: Vec::new(),
            moves: Vec::new(),
            roots: Vec::new(),
        };
        for cop in 0..n as u8 {
            let mut replies = Vec::new();
            for placement in multisets(n, s) {
                let robbers: Vec<u8> = placement.into_iter().filter(|&r| r != cop).collect();
                replies.push(o.outcome(cop, robbers, 0));
            }
            o.roots.push(replies);
        }
        let mut next = 0;
        while next < o.positions.len() {
            let pos = o.positions[next].clone();
            let options = o.expand(&pos);
            o.moves.push(options);
            next += 1;
        }
        o
    }

    fn outcome(&mut self, cop: u8, mut robbers: Vec<u8>, damaged: u64) -> Succ {
        if robbers.is_empty() {
            return Succ::Done(damaged.count_ones());
        }
        robbers.sort_unstable();
        let pos = Pos { cop, robbers, damaged };
        let len = self.positions.len();
        let id = *self.index.entry(pos.clone()).or_insert(len);
        if id == len {
            self.positions.push(pos);
        }
        Succ::Node(id)
    }

    fn expand(&mut self, pos: &Pos) -> Vec<Vec<Succ>> {
        let mut options = Vec::new();
        for &dest in &self.closed[pos.cop as usize].clone() {
            let survivors: Vec<u8> = pos.robbers.iter().copied().filter(|&r| r != dest).collect();
            let damaged = survivors.iter().fold(pos.damaged, |d, &r| d | 1 << r);
            if survivors.is_empty() {
                options.push(vec![Succ::Done(damaged.count_ones())]);
                continue;
            }
            let mut replies = Vec::new();
            let mut idx = vec![0usize; survivors.len()];
            loop {
                let moved: Vec<u8> = survivors
                    .iter()
                    .zip(&idx)
                    .map(|(&r, &k)| self.closed[r as usize][k])
                    .filter(|&v| v != dest)
                    .collect();
                replies.push(self.outcome(dest, moved, damaged));
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < self.closed[survivors[k] as usize].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
            options.push(replies);
        }
        options
    }

    pub fn position_count(&self) -> usize {
        self.positions.len()
    }

    /// Game values with at most `cap` rounds played after placement, for
    /// each cap in `caps`; play cut off by the cap scores its current damage.
    pub fn values(&self, caps: &[usize]) -> Vec<usize> {
        let max_cap = caps.iter().copied().max().unwrap_or(0);
        let mut v: Vec<u32> = self.positions.iter().map(|p| p.damaged.count_ones()).collect();
        let mut out = vec![0; caps.len()];
        let mut depth = 0;
        loop {
            for (i, &c) in caps.iter().enumerate() {
                if c == depth {
                    out[i] = self.root_value(&v);
                }
            }
            if depth == max_cap {
                break;
            }
            let next: Vec<u32> = self
                .moves
                .iter()
                .map(|options| {
                    options
                        .iter()
                        .map(|replies| max_reply(replies, &v))
                        .min()
                        .expect("the cop can always stay")
                })
                .collect();
            depth += 1;
            if next == v {
                // Converged: every deeper cap has the same values.
                for (i, &c) in caps.iter().enumerate() {
                    if c >= depth {
                        out[i] = self.root_value(&v);
                    }
                }
                break;
            }
            v = next;
        }
        out
    }

    fn root_value(&self, v: &[u32]) -> usize {
        self.roots
            .iter()
            .map(|replies| max_reply(replies, v))
            .min()
            .expect("graph is nonempty") as usize
    }
}

fn max_reply(replies: &[Succ], v: &[u32]) -> u32 {
    replies
        .iter()
        .map(|s| match *s {
            Succ::Done(d) => d,
            Succ::Node(i) => v[i],
        })
        .max()
        .unwrap_or(0)
}

/// The depth cap used for a graph: `4 n (s + 1)` rounds.
pub fn depth_cap(n: usize, s: usize) -> usize {
    4 * n * (s + 1)
}

fn edge_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == u && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices (1, 1, 2, 6, 21, 112 classes for n = 1..6).
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs = edge_pairs(n);
    let slot: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let perms = permutations(n);
    let mut canon_seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if edges.len() + 1 < n || !connected(n, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                edges.iter().fold(0u32, |m, &(a, b)| {
                    let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                    m | 1 << slot[&(x, y)]
                })
            })
            .min()
            .expect("at least one permutation");
        if canon_seen.insert(canon) {
            out.push(Graph::new(n, &edges).expect("simple graph"));
        }
    }
    out
}

/// A random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra_p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for (u, v) in edge_pairs(n) {
        if !edges.contains(&(u, v)) && rng.gen_bool(extra_p) {
            edges.push((u, v));
        }
    }
    Graph::new(n, &edges).expect("simple graph")
}
