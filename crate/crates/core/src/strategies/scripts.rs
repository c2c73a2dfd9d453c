//! Scripted robber teams for the hub-and-path graphs: cycle attacks, the
//! two all-out attacks, targeted strikes, and the composite programs that
//! chain them.
//!
//! Every decision is a function of the observed state and the explicit
//! [`ScriptMemory`]. Roles are bound to robber ids (lowest ids first).

use serde::{Deserialize, Serialize};

use super::nav::View;
use crate::families::{GreatCycle, Landmarks, PATH_LEN};
use crate::graph::{Graph, Vertex};
use crate::rules::GameState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptKind {
    /// One cycle attack on the great cycle of paths `(i, j)`.
    CycleAttack(usize, usize),
    /// One all-out attack toward `v2` (pairs of matched ends if `pairs`).
    AllOut { pairs: bool },
    /// Cycle attacks on every great cycle, then attacks on the residue.
    /// `pairs` selects the matched-graph variant.
    LowerBound { pairs: bool },
}

/// Snapshot taken when the composite programs finish their cycle attacks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Boundary {
    pub round: u32,
    pub undamaged: Vec<Vertex>,
    /// Vertex whose closed neighborhood holds the undamaged vertices (or
    /// covers the most of them when none holds all).
    pub x: Vertex,
    pub neighborhood_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScriptMemory {
    pub kind: ScriptKind,
    pub phase: ScriptPhase,
    pub boundary: Option<Boundary>,
    /// Robber turns since the damage count last grew.
    pub idle_rounds: u32,
    pub last_damage: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptPhase {
    Cycle { cycle: usize, attack: CycleAttack },
    Attack { x: Vertex, mode: AttackMode },
    Strike { x: Vertex },
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleAttack {
    pub team: Vec<usize>,
    pub stage: Stage,
    /// Robber turns without progress in the current stage.
    pub flat: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Two team robbers make their way onto the cycle.
    Enter { to_v1: Option<usize>, to_v2: Option<usize> },
    /// `r1` rotates clockwise and `r2` counter-clockwise (reversed once
    /// `swapped`).
    Rotate { r1: usize, r2: usize, swapped: bool },
    /// `r3` walks each path from `hub` as far as is safe.
    Traverse { r1: usize, r2: usize, r3: usize, hub: Vertex, path: usize, leg: Leg },
    Concluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    ToHub,
    Down,
    Back,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    Gather,
    Dash { runs: Vec<Run> },
    Intermission,
    Complete,
}

/// One robber's dash: the route from the gathering hub to its target(s)
/// and back, with the index of its current vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub robber: usize,
    pub route: Vec<Vertex>,
    pub at: usize,
}

/// Scale for the stall cut-offs.
fn patience(n: usize) -> u32 {
    4 * n as u32
}

pub(crate) struct Ctx<'a> {
    pub view: View<'a>,
    pub state: &'a GameState,
    pub lm: &'a Landmarks,
    pub cycles: &'a [GreatCycle],
}

impl Ctx<'_> {
    fn g(&self) -> &Graph {
        self.view.g
    }

    fn pos(&self, robber: usize) -> Option<Vertex> {
        self.state.robbers().get(robber).and_then(|r| r.position())
    }

    fn damaged(&self, v: Vertex) -> bool {
        self.state.damaged().contains(v)
    }

    fn undamaged(&self) -> Vec<Vertex> {
        (0..self.g().n()).filter(|&v| !self.damaged(v)).collect()
    }

    fn cycle_done(&self, c: &GreatCycle) -> bool {
        c.vertices.iter().all(|&v| self.damaged(v))
    }

    /// Path `p` listed from `hub` to the other hub.
    fn path_from(&self, p: usize, hub: Vertex) -> Vec<Vertex> {
        let mut seq = self.lm.paths[p].clone();
        if hub != self.lm.v1 {
            seq.reverse();
        }
        seq
    }

    fn other_hub(&self, hub: Vertex) -> Vertex {
        if hub == self.lm.v1 {
            self.lm.v2
        } else {
            self.lm.v1
        }
    }

    /// Cautious step toward the nearest undamaged vertex.
    fn sweep(&self, from: Vertex) -> Vertex {
        let v = &self.view;
        let target = self
            .undamaged()
            .into_iter()
            .filter(|&u| v.safe(u))
            .min_by_key(|&u| (v.d(from, u), u))
            .or_else(|| {
                self.undamaged()
                    .into_iter()
                    .filter(|&u| u != v.cop)
                    .min_by_key(|&u| (v.d(from, u), u))
            });
        match target {
            Some(t) => v.cautious_toward(from, t),
            None => v.idle(from),
        }
    }
}

/// A vertex whose closed neighborhood contains every vertex of `set`:
/// hubs first, then lowest id. Falls back to the best cover.
pub fn covering_vertex(g: &Graph, lm: &Landmarks, set: &[Vertex]) -> (Vertex, bool) {
    let covers = |y: Vertex| set.iter().filter(|&&u| u == y || g.has_edge(u, y)).count();
    let order = [lm.v1, lm.v2].into_iter().chain((0..g.n()).filter(|&y| y != lm.v1 && y != lm.v2));
    let mut best = (lm.v1, 0usize);
    for y in order {
        let c = covers(y);
        if c == set.len() {
            return (y, true);
        }
        if c > best.1 {
            best = (y, c);
        }
    }
    (best.0, false)
}

/// Robbers `0..s` sorted into far vertices: the first two on `cycle`.
pub(crate) fn place_far(dist: &[Vec<usize>], cop: Vertex, s: usize, cycle: Option<&GreatCycle>) -> Vec<Vertex> {
    let n = dist.len();
    let key = |v: &Vertex| (std::cmp::Reverse(dist[cop][*v]), *v);
    let mut used = Vec::new();
    if let Some(c) = cycle {
        let mut on: Vec<Vertex> = c.vertices.clone();
        on.sort_by_key(key);
        let first = on[0];
        // Second rotator: far from the cop and from the first one.
        let second = on
            .iter()
            .copied()
            .filter(|&v| v != first)
            .max_by_key(|&v| (dist[cop][v].min(dist[first][v]), std::cmp::Reverse(v)))
            .unwrap_or(first);
        used.push(first);
        used.push(second);
    }
    let mut rest: Vec<Vertex> = (0..n).filter(|v| !used.contains(v)).collect();
    rest.sort_by_key(key);
    used.extend(rest);
    used.truncate(s);
    while used.len() < s {
        used.push(used[0]);
    }
    used
}

pub(crate) fn initial(kind: ScriptKind, s: usize, lm: &Landmarks, cycles: &[GreatCycle]) -> ScriptMemory {
    let phase = match kind {
        ScriptKind::CycleAttack(i, j) => {
            let idx = cycles
                .iter()
                .position(|c| c.path_indices == (i.min(j), i.max(j)))
                .unwrap_or(0);
            ScriptPhase::Cycle {
                cycle: idx,
                attack: CycleAttack::new((0..s.min(3)).collect()),
            }
        }
        ScriptKind::AllOut { .. } => ScriptPhase::Attack {
            x: lm.v2,
            mode: AttackMode::Gather,
        },
        ScriptKind::LowerBound { .. } => ScriptPhase::Cycle {
            cycle: 0,
            attack: CycleAttack::new((0..s.min(3)).collect()),
        },
    };
    ScriptMemory {
        kind,
        phase,
        boundary: None,
        idle_rounds: 0,
        last_damage: 0,
    }
}

impl CycleAttack {
    fn new(team: Vec<usize>) -> CycleAttack {
        CycleAttack {
            team,
            stage: Stage::Enter { to_v1: None, to_v2: None },
            flat: 0,
        }
    }
}

impl ScriptMemory {
    pub fn is_done(&self) -> bool {
        self.phase == ScriptPhase::Done
    }

    fn pairs(&self) -> bool {
        matches!(
            self.kind,
            ScriptKind::AllOut { pairs: true } | ScriptKind::LowerBound { pairs: true }
        )
    }
}

/// One robber turn: destinations for every robber (None for caught ones).
pub(crate) fn decide(ctx: &Ctx<'_>, mem: &ScriptMemory) -> (Vec<Option<Vertex>>, ScriptMemory) {
    let mut mem = mem.clone();
    let state = ctx.state;
    let mut dests: Vec<Option<Vertex>> = state.robbers().iter().map(|r| r.position()).collect();
    if mem.is_done() {
        for (i, d) in dests.iter_mut().enumerate() {
            if let Some(p) = ctx.pos(i) {
                *d = Some(ctx.view.idle(p));
            }
        }
        return (dests, mem);
    }
    let damage = state.damaged().len();
    if damage > mem.last_damage {
        mem.last_damage = damage;
        mem.idle_rounds = 0;
    } else {
        mem.idle_rounds += 1;
    }
    // Default: unassigned robbers sweep cautiously.
    for (i, d) in dests.iter_mut().enumerate() {
        if let Some(p) = ctx.pos(i) {
            *d = Some(ctx.sweep(p));
        }
    }
    let n = ctx.g().n();
    let composite = matches!(mem.kind, ScriptKind::LowerBound { .. });
    loop {
        match mem.phase.clone() {
            ScriptPhase::Done => {
                for (i, d) in dests.iter_mut().enumerate() {
                    if let Some(p) = ctx.pos(i) {
                        *d = Some(ctx.view.idle(p));
                    }
                }
                break;
            }
            ScriptPhase::Cycle { cycle, mut attack } => {
                let undamaged = ctx.undamaged();
                let early = composite && covering_vertex(ctx.g(), ctx.lm, &undamaged).1;
                let team_live = attack.team.iter().all(|&r| state.is_live(r)) && attack.team.len() == 3;
                if !early && team_live && !ctx.cycle_done(&ctx.cycles[cycle]) && attack.stage != Stage::Concluded {
                    if step_cycle_attack(ctx, &ctx.cycles[cycle], &mut attack, &mut dests) {
                        mem.phase = ScriptPhase::Cycle { cycle, attack };
                        break;
                    }
                }
                if !composite {
                    mem.phase = ScriptPhase::Done;
                    continue;
                }
                let next = (cycle + 1..ctx.cycles.len()).find(|&c| !ctx.cycle_done(&ctx.cycles[c]));
                match next {
                    Some(c) if !early && team_live => {
                        mem.phase = ScriptPhase::Cycle {
                            cycle: c,
                            attack: CycleAttack::new(attack.team.clone()),
                        };
                    }
                    _ => {
                        let (x, ok) = covering_vertex(ctx.g(), ctx.lm, &undamaged);
                        mem.boundary = Some(Boundary {
                            round: state.round(),
                            undamaged,
                            x,
                            neighborhood_ok: ok,
                        });
                        mem.idle_rounds = 0;
                        mem.phase = ScriptPhase::Attack {
                            x,
                            mode: AttackMode::Gather,
                        };
                    }
                }
            }
            ScriptPhase::Attack { x, mode } => {
                let pairs = mem.pairs();
                let live = state.live_count();
                if composite && (ctx.undamaged().len() <= 2 || mem.idle_rounds > patience(n) || live == 0) {
                    mem.phase = ScriptPhase::Done;
                    continue;
                }
                let hubside = x == ctx.lm.v1 || x == ctx.lm.v2;
                let threshold = if pairs { 4 } else { 2 };
                let starting = matches!(mode, AttackMode::Gather | AttackMode::Complete);
                if composite && (!hubside || (starting && live < threshold) || end_targets(ctx, x, false).is_empty()) {
                    mem.phase = ScriptPhase::Strike { x };
                    continue;
                }
                if !composite && mem.idle_rounds > patience(n) {
                    mem.phase = ScriptPhase::Done;
                    continue;
                }
                let mode = step_all_out(ctx, x, pairs, mode, &mut dests);
                if mode == AttackMode::Complete && !composite {
                    mem.phase = ScriptPhase::Done;
                    continue;
                }
                mem.phase = ScriptPhase::Attack { x, mode };
                break;
            }
            ScriptPhase::Strike { .. } => {
                if ctx.undamaged().len() <= 2 || mem.idle_rounds > patience(n) || state.live_count() == 0 {
                    mem.phase = ScriptPhase::Done;
                    continue;
                }
                let attackers = if mem.pairs() { 3 } else { 2 };
                step_strike(ctx, attackers, &mut dests);
                break;
            }
        }
    }
    (dests, mem)
}

/// Advances a cycle attack by one robber turn. Returns false once the
/// attack has concluded (no moves written).
fn step_cycle_attack(ctx: &Ctx<'_>, c: &GreatCycle, attack: &mut CycleAttack, dests: &mut [Option<Vertex>]) -> bool {
    let v = &ctx.view;
    let lm = ctx.lm;
    let n = ctx.g().n();
    attack.flat += 1;
    loop {
        match attack.stage.clone() {
            Stage::Concluded => return false,
            Stage::Enter { mut to_v1, mut to_v2 } => {
                let on: Vec<usize> = attack
                    .team
                    .iter()
                    .copied()
                    .filter(|&r| ctx.pos(r).is_some_and(|p| c.contains(p)))
                    .collect();
                if on.len() >= 2 {
                    attack.stage = Stage::Rotate {
                        r1: on[0],
                        r2: on[1],
                        swapped: false,
                    };
                    attack.flat = 0;
                    continue;
                }
                if attack.flat > patience(n) {
                    attack.stage = Stage::Concluded;
                    continue;
                }
                let off: Vec<usize> = attack.team.iter().copied().filter(|r| !on.contains(r)).collect();
                let stale = |r: Option<usize>| r.is_none_or(|r| on.contains(&r));
                if stale(to_v1) || stale(to_v2) {
                    let (a, b) = (off[0], off[1]);
                    let pa = ctx.pos(a).unwrap_or(lm.v1);
                    let pb = ctx.pos(b).unwrap_or(lm.v1);
                    if v.d(pa, lm.v1) <= v.d(pb, lm.v1) {
                        (to_v1, to_v2) = (Some(a), Some(b));
                    } else {
                        (to_v1, to_v2) = (Some(b), Some(a));
                    }
                    attack.flat = 0;
                }
                for &r in &on {
                    if let Some(p) = ctx.pos(r) {
                        dests[r] = Some(v.hold_on_cycle(c, p));
                    }
                }
                for (r, hub) in [(to_v1, lm.v1), (to_v2, lm.v2)] {
                    if let Some(r) = r {
                        if let Some(p) = ctx.pos(r) {
                            dests[r] = Some(v.cautious_toward(p, hub));
                        }
                    }
                }
                attack.stage = Stage::Enter { to_v1, to_v2 };
                return true;
            }
            Stage::Rotate { r1, r2, swapped } => {
                let dir = if swapped { -1 } else { 1 };
                let h1 = rotate_one(ctx, c, r1, dir, dests);
                let h2 = rotate_one(ctx, c, r2, -dir, dests);
                if attack.flat > 2 * c.len() as u32 || (h1 && h2) {
                    attack.flat = 0;
                    if swapped {
                        let hub = if v.d(v.cop, lm.v2) <= v.d(v.cop, lm.v1) { lm.v1 } else { lm.v2 };
                        let r3 = attack.team.iter().copied().find(|&r| r != r1 && r != r2).unwrap_or(r1);
                        attack.stage = Stage::Traverse {
                            r1,
                            r2,
                            r3,
                            hub,
                            path: 0,
                            leg: Leg::ToHub,
                        };
                        // The rotators' holds for this turn stand; r3 starts now.
                        traverse_r3(ctx, attack, dests);
                        return true;
                    }
                    attack.stage = Stage::Rotate { r1, r2, swapped: true };
                }
                return true;
            }
            Stage::Traverse { r1, r2, .. } => {
                rotate_one(ctx, c, r1, -1, dests);
                rotate_one(ctx, c, r2, 1, dests);
                if attack.flat > patience(n) {
                    attack.stage = Stage::Concluded;
                    return false;
                }
                traverse_r3(ctx, attack, dests);
                return true;
            }
        }
    }
}

/// One rotator step; returns whether it was halted.
fn rotate_one(ctx: &Ctx<'_>, c: &GreatCycle, r: usize, dir: isize, dests: &mut [Option<Vertex>]) -> bool {
    let Some(p) = ctx.pos(r) else { return true };
    if !c.contains(p) {
        let entry = c
            .vertices
            .iter()
            .copied()
            .min_by_key(|&u| (ctx.view.d(p, u), u))
            .unwrap_or(p);
        dests[r] = Some(ctx.view.cautious_toward(p, entry));
        return false;
    }
    let (d, halted) = ctx.view.rotate(c, p, dir);
    dests[r] = Some(d);
    halted
}

fn traverse_r3(ctx: &Ctx<'_>, attack: &mut CycleAttack, dests: &mut [Option<Vertex>]) {
    let v = &ctx.view;
    let Stage::Traverse { r1, r2, r3, hub, mut path, mut leg } = attack.stage.clone() else {
        return;
    };
    let Some(p) = ctx.pos(r3) else {
        attack.stage = Stage::Concluded;
        return;
    };
    let l = ctx.lm.path_count();
    // Bounded: each pass either moves, or advances leg/path.
    for _ in 0..3 * l + 3 {
        while path < l && ctx.lm.interior(path).iter().all(|&u| ctx.damaged(u)) {
            path += 1;
        }
        if path >= l {
            attack.stage = Stage::Concluded;
            return;
        }
        match leg {
            Leg::ToHub | Leg::Back => {
                if p == hub {
                    if leg == Leg::Back {
                        path += 1;
                    }
                    leg = Leg::Down;
                    attack.flat = 0;
                    continue;
                }
                dests[r3] = Some(v.cautious_toward(p, hub));
            }
            Leg::Down => {
                let seq = ctx.path_from(path, hub);
                let idx = seq.iter().position(|&u| u == p);
                let go = idx.filter(|&i| i + 1 < PATH_LEN).map(|i| seq[i + 1]);
                let rest_done = idx.is_some_and(|i| seq[i + 1..PATH_LEN].iter().all(|&u| ctx.damaged(u)));
                match go {
                    Some(next) if v.safe(next) && !rest_done => dests[r3] = Some(next),
                    _ => {
                        leg = Leg::Back;
                        if p == hub {
                            continue;
                        }
                        dests[r3] = Some(v.cautious_toward(p, hub));
                    }
                }
            }
        }
        break;
    }
    attack.stage = Stage::Traverse { r1, r2, r3, hub, path, leg };
}

/// Path-end vertices next to `x` that are undamaged, as path indices (or
/// matched pairs of path indices).
fn end_targets(ctx: &Ctx<'_>, x: Vertex, pairs: bool) -> Vec<Vec<usize>> {
    let lm = ctx.lm;
    let end = |p: usize| if x == lm.v2 { lm.u(p) } else { lm.w(p) };
    let open: Vec<usize> = (0..lm.path_count()).filter(|&p| !ctx.damaged(end(p))).collect();
    if !(pairs && lm.matched) {
        return open.into_iter().map(|p| vec![p]).collect();
    }
    // Full pairs first, then ends whose partner is already damaged.
    let full = |p: usize| open.contains(&(p ^ 1));
    let mut groups: Vec<Vec<usize>> = open.iter().filter(|&&p| p % 2 == 0 && full(p)).map(|&p| vec![p, p + 1]).collect();
    groups.extend(open.iter().filter(|&&p| !full(p)).map(|&p| vec![p]));
    groups
}

fn step_all_out(ctx: &Ctx<'_>, x: Vertex, pairs: bool, mode: AttackMode, dests: &mut [Option<Vertex>]) -> AttackMode {
    let v = &ctx.view;
    let hub = ctx.other_hub(x);
    let live: Vec<(usize, Vertex)> = ctx.state.live_robbers().collect();
    let near_x = v.cop == x || ctx.g().has_edge(v.cop, x);
    let threatened = live.iter().any(|&(_, p)| v.d(p, v.cop) <= 2);
    let mut mode = mode;
    if !near_x && threatened && matches!(mode, AttackMode::Gather | AttackMode::Dash { .. }) {
        mode = AttackMode::Intermission;
    }
    loop {
        match mode {
            AttackMode::Complete => mode = AttackMode::Gather,
            AttackMode::Intermission => {
                if v.cop == x {
                    mode = AttackMode::Gather;
                    continue;
                }
                let mut targets: Vec<Vertex> = ctx
                    .g()
                    .closed_neighborhood(x)
                    .into_iter()
                    .filter(|&u| !ctx.damaged(u) && u != v.cop)
                    .collect();
                targets.sort_unstable();
                for (k, &(r, p)) in live.iter().enumerate() {
                    dests[r] = Some(match targets.get(k % targets.len().max(1)) {
                        Some(&t) => v.cautious_toward(p, t),
                        None => v.idle(p),
                    });
                }
                return AttackMode::Intermission;
            }
            AttackMode::Gather => {
                if live.iter().all(|&(_, p)| p == hub) {
                    let groups = end_targets(ctx, x, pairs);
                    let runs: Vec<Run> = live
                        .iter()
                        .zip(&groups)
                        .map(|(&(r, _), grp)| Run {
                            robber: r,
                            route: route(ctx, hub, grp),
                            at: 0,
                        })
                        .collect();
                    mode = AttackMode::Dash { runs };
                    continue;
                }
                for &(r, p) in &live {
                    dests[r] = Some(if p == hub { v.idle(p) } else { v.cautious_toward(p, hub) });
                }
                return AttackMode::Gather;
            }
            AttackMode::Dash { mut runs } => {
                let mut finished = true;
                for run in runs.iter_mut() {
                    let Some(p) = ctx.pos(run.robber) else { continue };
                    if run.route[run.at] != p {
                        // Off the route: head back to the hub cautiously.
                        dests[run.robber] = Some(v.cautious_toward(p, hub));
                        finished = false;
                        continue;
                    }
                    if run.at + 1 >= run.route.len() {
                        dests[run.robber] = Some(p);
                        continue;
                    }
                    finished = false;
                    let next = run.route[run.at + 1];
                    if next == v.cop {
                        dests[run.robber] = Some(p);
                    } else {
                        dests[run.robber] = Some(next);
                        run.at += 1;
                    }
                }
                for &(r, p) in &live {
                    if !runs.iter().any(|run| run.robber == r) {
                        dests[r] = Some(if p == hub { v.idle(p) } else { v.cautious_toward(p, hub) });
                    }
                }
                if finished {
                    return AttackMode::Complete;
                }
                return AttackMode::Dash { runs };
            }
        }
    }
}

/// Hub → end of the first path → (partner end) → back to the hub along the
/// last visited path.
fn route(ctx: &Ctx<'_>, hub: Vertex, group: &[usize]) -> Vec<Vertex> {
    let first = ctx.path_from(group[0], hub);
    let mut r: Vec<Vertex> = first[..PATH_LEN].to_vec();
    let last = *group.last().expect("nonempty group");
    let back = ctx.path_from(last, hub);
    if group.len() > 1 {
        r.push(back[PATH_LEN - 1]);
    }
    r.extend(back[..PATH_LEN - 1].iter().rev());
    r
}

/// Up to `attackers` robbers take distinct undamaged targets, minimizing
/// total distance. Those next to a target other than the cop's vertex step
/// on together when there are at least two of them, since the cop can stop
/// at most one; a lone striker goes only if its target is safe.
/// Staged team members hold their vertex; everyone else stays cautious.
fn step_strike(ctx: &Ctx<'_>, attackers: usize, dests: &mut [Option<Vertex>]) {
    let v = &ctx.view;
    let g = ctx.g();
    let live: Vec<(usize, Vertex)> = ctx.state.live_robbers().collect();
    let targets = ctx.undamaged();
    if targets.is_empty() || live.is_empty() {
        return;
    }
    let mut team = assign(v, &live, &targets);
    team.truncate(attackers);
    let strikes = |&(_, p, t): &(usize, Vertex, Vertex)| t != v.cop && g.has_edge(p, t);
    let strikers: Vec<Vertex> = team.iter().filter(|m| strikes(m)).map(|m| m.2).collect();
    let go = strikers.len() >= 2 || (strikers.len() == 1 && v.safe(strikers[0]));
    for m @ &(r, p, t) in &team {
        dests[r] = Some(if go && strikes(m) {
            t
        } else if g.has_edge(p, t) || p == t {
            // Staged robbers of a team hold even when exposed, so that the
            // strike can be timed against a cop moving between targets.
            if team.len() >= 2 {
                p
            } else {
                v.idle(p)
            }
        } else {
            v.cautious_toward(p, t)
        });
    }
}

/// Least-total-distance matching of robbers to distinct targets, as large
/// as the smaller side. Sorted by cost, so truncating keeps the closest.
fn assign(v: &View<'_>, robbers: &[(usize, Vertex)], targets: &[Vertex]) -> Vec<(usize, Vertex, Vertex)> {
    // Match each element of the smaller side to a distinct one of the larger.
    let flip = robbers.len() > targets.len();
    let (small, large) = if flip {
        (targets.len(), robbers.len())
    } else {
        (robbers.len(), targets.len())
    };
    let cost = |i: usize, j: usize| {
        let (r, t) = if flip { (j, i) } else { (i, j) };
        v.d(robbers[r].1, targets[t])
    };
    fn rec(
        cost: &dyn Fn(usize, usize) -> usize,
        small: usize,
        large: usize,
        acc: usize,
        pick: &mut Vec<usize>,
        best: &mut Option<(usize, Vec<usize>)>,
    ) {
        if best.as_ref().is_some_and(|(c, _)| acc >= *c) {
            return;
        }
        if pick.len() == small {
            *best = Some((acc, pick.clone()));
            return;
        }
        let i = pick.len();
        for j in 0..large {
            if !pick.contains(&j) {
                pick.push(j);
                rec(cost, small, large, acc + cost(i, j), pick, best);
                pick.pop();
            }
        }
    }
    let mut best = None;
    rec(&cost, small, large, 0, &mut Vec::with_capacity(small), &mut best);
    let (_, pick) = best.expect("both sides nonempty");
    let mut team: Vec<(usize, Vertex, Vertex)> = pick
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let (r, t) = if flip { (j, i) } else { (i, j) };
            (robbers[r].0, robbers[r].1, targets[t])
        })
        .collect();
    team.sort_by_key(|&(r, p, t)| (v.d(p, t), r));
    team
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};

    #[test]
    fn routes_visit_targets_and_return() {
        let gen = generate(FamilySpec::G(4)).unwrap();
        let lm = gen.landmarks().unwrap();
        let dist = gen.graph.distance_matrix();
        let state = GameState::initial(&gen.graph, 1).unwrap();
        let cycles = lm.great_cycles();
        let ctx = Ctx {
            view: View::new(&gen.graph, &dist, lm.v2),
            state: &state,
            lm,
            cycles: &cycles,
        };
        let r = route(&ctx, lm.v1, &[0, 1]);
        assert_eq!(r.first(), Some(&lm.v1));
        assert_eq!(r.last(), Some(&lm.v1));
        assert!(r.contains(&lm.u(0)) && r.contains(&lm.u(1)));
        assert!(r.windows(2).all(|w| gen.graph.has_edge(w[0], w[1])));
        let single = route(&ctx, lm.v2, &[2]);
        assert_eq!(single.len(), 13);
        assert_eq!(single[6], lm.w(2));
        assert!(single.windows(2).all(|w| gen.graph.has_edge(w[0], w[1])));
    }

    #[test]
    fn covering_vertex_prefers_hubs() {
        let gen = generate(FamilySpec::Gprime(4)).unwrap();
        let lm = gen.landmarks().unwrap();
        let mut set: Vec<Vertex> = gen.graph.closed_neighborhood(lm.v2);
        set.pop();
        assert_eq!(covering_vertex(&gen.graph, lm, &set), (lm.v2, true));
        let w = lm.w(0);
        assert_eq!(covering_vertex(&gen.graph, lm, &[w, lm.paths[0][2]]), (w, true));
        assert!(!covering_vertex(&gen.graph, lm, &[lm.w(0), lm.u(0)]).1);
    }

    #[test]
    fn far_placement_uses_cycle() {
        let gen = generate(FamilySpec::Gprime(4)).unwrap();
        let dist = gen.graph.distance_matrix();
        let c = &gen.great_cycles().unwrap()[0];
        let p = place_far(&dist, 0, 3, Some(c));
        assert!(c.contains(p[0]) && c.contains(p[1]));
        assert!(p.iter().all(|&v| dist[0][v] >= 2));
    }
}
