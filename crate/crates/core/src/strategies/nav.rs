//! Movement helpers for cautious robbers.
//!
//! A vertex is safe when it lies outside the closed neighborhood of the
//! cop's current vertex, evaluated at the robbers' turn (the cop has already
//! moved this round). A robber that moves onto a safe vertex cannot be
//! caught by the cop's next move.

use crate::bitset::VertexSet;
use crate::families::GreatCycle;
use crate::graph::{Graph, Vertex};

/// What a robber sees at its turn.
pub struct View<'a> {
    pub g: &'a Graph,
    pub dist: &'a [Vec<usize>],
    pub cop: Vertex,
    danger: VertexSet,
}

impl<'a> View<'a> {
    pub fn new(g: &'a Graph, dist: &'a [Vec<usize>], cop: Vertex) -> View<'a> {
        View {
            g,
            dist,
            cop,
            danger: g.closed_neighborhood_set(cop),
        }
    }

    pub fn safe(&self, v: Vertex) -> bool {
        !self.danger.contains(v)
    }

    pub fn danger(&self) -> &VertexSet {
        &self.danger
    }

    pub fn d(&self, u: Vertex, v: Vertex) -> usize {
        self.dist[u][v]
    }

    /// Follow `intended` if it is safe; otherwise the safe neighbor farthest
    /// from the cop (lowest id on ties); otherwise stay if that is safe;
    /// otherwise the move farthest from the cop.
    pub fn cautious_step(&self, from: Vertex, intended: Vertex) -> Vertex {
        if self.safe(intended) {
            return intended;
        }
        let far = |v: &Vertex| (self.d(self.cop, *v), std::cmp::Reverse(*v));
        if let Some(v) = self.g.neighbors(from).iter().copied().filter(|&v| self.safe(v)).max_by_key(far) {
            return v;
        }
        if self.safe(from) {
            return from;
        }
        self.g
            .closed_neighborhood(from)
            .into_iter()
            .max_by_key(far)
            .unwrap_or(from)
    }

    /// Stay if safe, else step away.
    pub fn idle(&self, from: Vertex) -> Vertex {
        self.cautious_step(from, from)
    }

    /// A safe step toward `goal`: along a shortest route that avoids the
    /// cop's closed neighborhood when one exists, otherwise to the safe
    /// vertex of `N[from]` nearest the goal.
    pub fn cautious_toward(&self, from: Vertex, goal: Vertex) -> Vertex {
        if from == goal {
            return self.idle(from);
        }
        if let Ok(Some(path)) = self.g.shortest_path(from, goal, &self.danger) {
            if path.len() > 1 {
                return path[1];
            }
        }
        let best = self
            .g
            .closed_neighborhood(from)
            .into_iter()
            .filter(|&v| self.safe(v))
            .min_by_key(|&v| (self.d(v, goal), std::cmp::Reverse(self.d(self.cop, v)), v));
        match best {
            Some(v) => v,
            None => self.idle(from),
        }
    }

    /// A non-cautious step toward `goal` that never walks onto the cop.
    pub fn dash_toward(&self, from: Vertex, goal: Vertex) -> Vertex {
        if from == goal {
            return from;
        }
        let next = self
            .g
            .neighbors(from)
            .iter()
            .copied()
            .filter(|&v| v != self.cop)
            .min_by_key(|&v| (self.d(v, goal), v));
        match next {
            Some(v) if self.d(v, goal) < self.d(from, goal) => v,
            _ => from,
        }
    }

    /// Rotation step on a cycle: advance in direction `dir` when the next
    /// vertex is safe (returns `halted = false`); otherwise hold position if
    /// safe, else retreat along the cycle, else leave it cautiously.
    pub fn rotate(&self, cycle: &GreatCycle, from: Vertex, dir: isize) -> (Vertex, bool) {
        let Some(pos) = cycle.position(from) else {
            return (self.idle(from), true);
        };
        let next = cycle.step(pos, dir);
        if self.safe(next) {
            return (next, false);
        }
        (self.hold_on_cycle(cycle, from), true)
    }

    /// Stay on the cycle without moving forward if possible.
    pub fn hold_on_cycle(&self, cycle: &GreatCycle, from: Vertex) -> Vertex {
        if self.safe(from) {
            return from;
        }
        if let Some(pos) = cycle.position(from) {
            let back = [cycle.step(pos, 1), cycle.step(pos, -1)];
            if let Some(v) = back
                .into_iter()
                .filter(|&v| self.safe(v))
                .max_by_key(|&v| (self.d(self.cop, v), std::cmp::Reverse(v)))
            {
                return v;
            }
        }
        self.idle(from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};

    #[test]
    fn cautious_step_rules() {
        let g = generate(FamilySpec::Cycle(8)).unwrap().graph;
        let dist = g.distance_matrix();
        let v = View::new(&g, &dist, 0);
        // Intended vertex 1 is next to the cop; the detour goes away.
        assert_eq!(v.cautious_step(2, 1), 3);
        assert_eq!(v.cautious_step(3, 4), 4);
        assert_eq!(v.idle(4), 4);
    }

    #[test]
    fn cornered_robber_still_moves() {
        let g = generate(FamilySpec::Path(2)).unwrap().graph;
        let dist = g.distance_matrix();
        let v = View::new(&g, &dist, 0);
        let m = v.cautious_step(1, 1);
        assert!(m == 0 || m == 1);
    }

    #[test]
    fn cycle_robber_evades_forever() {
        // A cop walking toward a cautious robber on a great cycle never
        // catches it.
        let gen = generate(FamilySpec::Gprime(3)).unwrap();
        let g = &gen.graph;
        let dist = g.distance_matrix();
        let c = &gen.great_cycles().unwrap()[0];
        for start in 0..c.len() {
            let mut cop = c.vertices[start];
            let mut robber = c.step(start, 7);
            for _ in 0..60 {
                let next = crate::strategies::cop::step_toward(g, cop, robber);
                cop = next;
                assert_ne!(cop, robber);
                let view = View::new(g, &dist, cop);
                robber = view.hold_on_cycle(c, robber);
                assert!(view.safe(robber));
                assert!(c.contains(robber));
            }
        }
    }

    #[test]
    fn toward_avoids_cop() {
        let g = generate(FamilySpec::Cycle(10)).unwrap().graph;
        let dist = g.distance_matrix();
        let v = View::new(&g, &dist, 2);
        // Short way to 4 passes the cop; go around.
        assert_eq!(v.cautious_toward(0, 4), 9);
        assert_eq!(v.dash_toward(4, 2), 3);
        assert_eq!(v.dash_toward(3, 2), 3);
    }
}
