//! Class-layered least-fixpoint evaluation of loopy cop/robber game graphs.
//!
//! Nodes are cop-to-move positions. A node's value is the minimum over cop
//! options of the maximum over robber replies. Every transition either stays
//! inside the node's class (same live count, same damaged set) or moves to a
//! class that is strictly smaller in the well-founded order "fewer live
//! robbers, or same live robbers and strictly more damage". Classes are
//! therefore processed in order of increasing live count and decreasing
//! damage, and each class is solved by Jacobi value iteration from the
//! bottom value |damaged|, which converges to the least fixpoint: play that
//! never leaves a class ends with exactly the class's damage.

use std::hash::Hash;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;

use super::{Limits, SolveError, SolveStats};

pub enum Outcome<N> {
    Terminal(u8),
    Node(N),
}

pub trait LayeredGame {
    type Node: Clone + Eq + Hash;

    /// (live robbers, damaged bits).
    fn class(&self, node: &Self::Node) -> (u8, u64);

    /// One entry per cop option, each listing every robber reply.
    fn expand(
        &mut self,
        node: &Self::Node,
        out: &mut Vec<Vec<Outcome<Self::Node>>>,
    ) -> Result<(), SolveError>;
}

pub struct Table<N> {
    pub index: FxHashMap<N, u32>,
    pub value: Vec<u8>,
    /// Jacobi sweep at which the node reached its final value (0 = initial).
    pub rank: Vec<u32>,
    pub stats: SolveStats,
}

impl<N: Clone + Eq + Hash> Table<N> {
    pub fn lookup(&self, node: &N) -> Option<(u8, u32)> {
        self.index
            .get(node)
            .map(|&i| (self.value[i as usize], self.rank[i as usize]))
    }
}

struct Clock {
    start: Instant,
    limit: Duration,
    ticks: u32,
}

impl Clock {
    fn check(&mut self, stats: &SolveStats) -> Result<(), SolveError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 1024 == 0 && self.start.elapsed() > self.limit {
            return Err(SolveError::LimitExceeded {
                reason: "time limit".into(),
                stats: stats.clone(),
            });
        }
        Ok(())
    }
}

fn admit<G: LayeredGame>(
    node: G::Node,
    index: &mut FxHashMap<G::Node, u32>,
    nodes: &mut Vec<G::Node>,
    classes: &mut FxHashMap<(u8, u64), Vec<u32>>,
    game: &G,
) {
    if index.contains_key(&node) {
        return;
    }
    let id = nodes.len() as u32;
    classes.entry(game.class(&node)).or_default().push(id);
    index.insert(node.clone(), id);
    nodes.push(node);
}

pub fn solve_layered<G: LayeredGame>(
    game: &mut G,
    roots: Vec<G::Node>,
    limits: &Limits,
) -> Result<Table<G::Node>, SolveError> {
    let mut clock = Clock {
        start: Instant::now(),
        limit: Duration::from_secs_f64(limits.max_seconds),
        ticks: 0,
    };
    let mut stats = SolveStats::default();
    let mut index: FxHashMap<G::Node, u32> = FxHashMap::default();
    let mut nodes: Vec<G::Node> = Vec::new();
    let mut classes: FxHashMap<(u8, u64), Vec<u32>> = FxHashMap::default();
    let mut buf: Vec<Vec<Outcome<G::Node>>> = Vec::new();

    for r in roots {
        admit(r, &mut index, &mut nodes, &mut classes, &*game);
    }

    // Discovery.
    let mut cursor = 0;
    while cursor < nodes.len() {
        let node = nodes[cursor].clone();
        cursor += 1;
        game.expand(&node, &mut buf)?;
        stats.explored_states += 1 + buf.len();
        for option in buf.drain(..) {
            for o in option {
                if let Outcome::Node(m) = o {
                    admit(m, &mut index, &mut nodes, &mut classes, &*game);
                }
            }
        }
        stats.class_count = classes.len();
        stats.peak_memo_entries = nodes.len();
        if nodes.len() > limits.max_states {
            return Err(SolveError::LimitExceeded {
                reason: format!("state limit {}", limits.max_states),
                stats,
            });
        }
        clock.check(&stats)?;
    }

    let mut order: Vec<(u8, u64)> = classes.keys().copied().collect();
    order.sort_unstable_by_key(|&(live, dmg)| (live, std::cmp::Reverse(dmg.count_ones()), dmg));

    let mut value = vec![0u8; nodes.len()];
    let mut rank = vec![0u32; nodes.len()];
    let mut local = vec![u32::MAX; nodes.len()];

    // Per-class flattened successor summary.
    let mut opt_start: Vec<u32> = Vec::new();
    let mut opt_exit: Vec<i16> = Vec::new();
    let mut inner_start: Vec<u32> = Vec::new();
    let mut inner: Vec<u32> = Vec::new();

    for key in order {
        let members = &classes[&key];
        let base = key.1.count_ones() as u8;
        for (li, &gi) in members.iter().enumerate() {
            local[gi as usize] = li as u32;
        }
        opt_start.clear();
        opt_exit.clear();
        inner_start.clear();
        inner.clear();
        for &gi in members {
            opt_start.push(opt_exit.len() as u32);
            game.expand(&nodes[gi as usize], &mut buf)?;
            for option in buf.drain(..) {
                let mut exit: i16 = -1;
                inner_start.push(inner.len() as u32);
                for o in option {
                    match o {
                        Outcome::Terminal(v) => exit = exit.max(v as i16),
                        Outcome::Node(m) => {
                            let id = index[&m];
                            if game.class(&m) == key {
                                inner.push(local[id as usize]);
                            } else {
                                exit = exit.max(value[id as usize] as i16);
                            }
                        }
                    }
                }
                opt_exit.push(exit);
            }
            clock.check(&stats)?;
        }
        opt_start.push(opt_exit.len() as u32);
        inner_start.push(inner.len() as u32);

        let k = members.len();
        let mut cur = vec![base; k];
        let mut next = vec![base; k];
        let mut local_rank = vec![0u32; k];
        let mut sweep = 0u32;
        loop {
            sweep += 1;
            let mut changed = false;
            for x in 0..k {
                let mut best = u8::MAX;
                for o in opt_start[x] as usize..opt_start[x + 1] as usize {
                    let mut v = opt_exit[o].max(base as i16) as u8;
                    for &y in &inner[inner_start[o] as usize..inner_start[o + 1] as usize] {
                        v = v.max(cur[y as usize]);
                    }
                    best = best.min(v);
                }
                if best != cur[x] {
                    debug_assert!(best > cur[x], "value iteration is monotone");
                    changed = true;
                    local_rank[x] = sweep;
                }
                next[x] = best;
            }
            std::mem::swap(&mut cur, &mut next);
            if !changed {
                break;
            }
            clock.check(&stats)?;
        }
        for (li, &gi) in members.iter().enumerate() {
            value[gi as usize] = cur[li];
            rank[gi as usize] = local_rank[li];
        }
    }

    Ok(Table {
        index,
        value,
        rank,
        stats,
    })
}
