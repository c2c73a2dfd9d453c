//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//! Run with `cargo test -p cops-damage --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{connected_graphs, depth_cap, random_connected_graph, Oracle};
use cops_damage::arena::{replay, run_match, run_suite, standard_suite, MatchOptions, Transcript};
use cops_damage::families::{generate, FamilySpec, GREAT_CYCLE_LEN};
use cops_damage::solver::{best_response_robbers, solve, Limits};
use cops_damage::strategies::{central_edge, CopPolicy, RobberTeamPolicy};
use cops_damage::verify::{find_claim, run_claim};
use cops_damage::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: pass flag and a one-line detail.
type Verdict = (bool, String);

fn value(g: &Graph, s: usize) -> usize {
    solve(g, s, &Limits::default()).expect("small instance solves").value
}

fn choose2(l: usize) -> usize {
    l * (l - 1) / 2
}

fn oracle_equivalence() -> Verdict {
    let mut cases = Vec::new();
    for n in 1..=6 {
        for g in connected_graphs(n) {
            cases.extend((1..=2).map(|s| (g.clone(), s)));
        }
    }
    for t in 1..=4 {
        let g = generate(FamilySpec::Star(t)).unwrap().graph;
        cases.extend((1..=3).map(|s| (g.clone(), s)));
    }
    let mut bad = Vec::new();
    for (g, s) in &cases {
        let d = depth_cap(g.n(), *s);
        let vals = Oracle::new(g, *s).values(&[d, d + 4]);
        let got = value(g, *s);
        if vals[0] != vals[1] || vals[0] != got {
            bad.push(format!("n={} s={s} edges={:?}: oracle {:?} solve {got}", g.n(), g.edges(), vals));
        }
    }
    match bad.first() {
        None => (true, format!("{} instances, solve == oracle at caps D and D+4", cases.len())),
        Some(b) => (false, format!("{} mismatches, first {b}", bad.len())),
    }
}

/// 50 seeded graphs; three robbers only up to seven vertices, since larger
/// three-robber solves take minutes each.
fn patrol_guarantee() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = Vec::new();
    for _ in 0..50 {
        let n = rng.gen_range(3..=10);
        let s = rng.gen_range(1..=if n <= 7 { 3 } else { 2 });
        let p = rng.gen_range(0.1..0.5);
        let g = random_connected_graph(&mut rng, n, p);
        let v = value(&g, s);
        let (a, b) = central_edge(&g).unwrap();
        let br = best_response_robbers(&g, s, &CopPolicy::Patrol(a, b), &Limits::default()).unwrap();
        if v > n - 2 || br.value > n - 2 {
            worst.push(format!("n={n} s={s} value={v} patrol={}", br.value));
        }
    }
    match worst.first() {
        None => (true, "50 graphs, value and patrol best response <= n-2".into()),
        Some(w) => (false, format!("{} violations, first {w}", worst.len())),
    }
}

/// Test set: every connected graph up to six vertices, stars up to eight
/// vertices and 30 seeded random graphs on seven or eight vertices.
fn save_three_with_two_robbers() -> Verdict {
    let mut set: Vec<Graph> = (1..=6).flat_map(connected_graphs).collect();
    set.extend((3..=7).map(|t| generate(FamilySpec::Star(t)).unwrap().graph));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..30 {
        let n = 7 + k % 2;
        let p = rng.gen_range(0.1..0.4);
        set.push(random_connected_graph(&mut rng, n, p));
    }
    let cases: Vec<&Graph> = set.iter().filter(|g| g.max_degree() >= 3).collect();
    let bad: Vec<String> = cases
        .iter()
        .filter_map(|g| {
            let v = value(g, 2);
            (v + 3 > g.n()).then(|| format!("n={} value={v} edges={:?}", g.n(), g.edges()))
        })
        .collect();
    match bad.first() {
        None => (true, format!("{} graphs with max degree >= 3, value <= n-3", cases.len())),
        Some(b) => (false, format!("{} violations, first {b}", bad.len())),
    }
}

fn star_lemma() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for (s, t) in [(2, 3), (2, 4), (3, 5)] {
        let g = generate(FamilySpec::Star(t)).unwrap().graph;
        let br = best_response_robbers(&g, s, &CopPolicy::Guard(0), &Limits::default()).unwrap();
        let center = br.ever_damaged.contains(&0);
        ok &= br.value <= choose2(s) && !center;
        parts.push(format!("(s={s},t={t}) damage {}{}", br.value, if center { " center damaged" } else { "" }));
    }
    (ok, parts.join(", "))
}

fn c14_exact() -> Verdict {
    let r = run_claim(&find_claim("c14-exact").unwrap(), None);
    (r.status.passed(), format!("{:?} {}", r.status, r.detail))
}

fn suite_min(spec: FamilySpec, s: usize, team: RobberTeamPolicy, bound: usize) -> Verdict {
    let gen = generate(spec).unwrap();
    let lm = gen.landmarks.as_ref();
    let suite = standard_suite(&gen.graph, lm);
    let (sum, _) = run_suite(&gen.graph, lm, s, &team, &suite, &MatchOptions::default()).unwrap();
    let nb_ok = sum.matches.iter().all(|m| m.neighborhood_ok == Some(true));
    let low: Vec<String> = sum
        .matches
        .iter()
        .filter(|m| m.damage < bound)
        .map(|m| format!("{}={}", m.cop_policy, m.damage))
        .collect();
    let detail = format!(
        "n={} {} matches, min damage {} (bound {bound}), neighborhood checks {}{}",
        gen.graph.n(),
        sum.matches.len(),
        sum.min_damage,
        if nb_ok { "ok" } else { "failed" },
        if low.is_empty() { String::new() } else { format!(", below: {}", low.join(" ")) }
    );
    (low.is_empty() && nb_ok, detail)
}

fn cycle_attacks() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in [FamilySpec::Gprime(4), FamilySpec::G(4)] {
        let gen = generate(spec).unwrap();
        let g = &gen.graph;
        let lm = gen.landmarks.as_ref().unwrap();
        let suite = standard_suite(g, Some(lm));
        let opts = MatchOptions::default();
        let (mut captures, mut incomplete, mut cycles) = (0, 0, 0);
        for c in lm.great_cycles() {
            cycles += 1;
            let (i, j) = c.path_indices;
            let team = RobberTeamPolicy::CycleAttack(i, j);
            let (_, ts) = run_suite(g, Some(lm), 3, &team, &suite, &opts).unwrap();
            captures += ts.iter().map(|t| t.robbers_caught).sum::<usize>();
            // A stationary cop on the middle of some other path.
            let off = (0..lm.path_count()).find(|&k| k != i && k != j).unwrap();
            let mid = lm.interior(off)[lm.interior(off).len() / 2];
            let t = run_match(g, Some(lm), 3, &CopPolicy::Stationary(mid), &team, &opts).unwrap();
            if !c.vertices.iter().all(|v| t.final_damaged.contains(v)) {
                incomplete += 1;
            }
        }
        ok &= captures == 0 && incomplete == 0;
        parts.push(format!(
            "{}({}): {cycles} cycles, {captures} captures, {incomplete} incomplete vs stationary",
            spec.name(),
            spec.param()
        ));
    }
    (ok, parts.join("; "))
}

/// Independent of the library: checks every vertex pair of the cycle.
fn chordless(g: &Graph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    let mut sorted = cycle.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len() == k
        && (0..k).all(|a| {
            (a + 1..k).all(|b| {
                let consecutive = b == a + 1 || (a == 0 && b == k - 1);
                g.edges().contains(&(cycle[a].min(cycle[b]), cycle[a].max(cycle[b]))) == consecutive
            })
        })
}

fn triangle_free(g: &Graph) -> bool {
    let n = g.n();
    (0..n).all(|a| {
        (a + 1..n).all(|b| !g.has_edge(a, b) || (b + 1..n).all(|c| !(g.has_edge(a, c) && g.has_edge(b, c))))
    })
}

fn structural_audits() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for l in 2..=8 {
        let gp = generate(FamilySpec::Gprime(l)).unwrap();
        let mut specs = vec![(gp, choose2(l))];
        if l % 2 == 0 {
            specs.push((generate(FamilySpec::G(l)).unwrap(), choose2(l) - l / 2));
        }
        for (gen, cycles_want) in specs {
            let g = &gen.graph;
            let lm = gen.landmarks.as_ref().unwrap();
            let name = format!("{}({l})", if lm.matched { "g" } else { "gprime" });
            let m_want = if lm.matched { 8 * l } else { 7 * l };
            if g.n() != 2 + 6 * l || g.edge_count() != m_want {
                bad.push(format!("{name}: n={} m={}", g.n(), g.edge_count()));
            }
            let cycles = lm.great_cycles();
            if cycles.len() != cycles_want {
                bad.push(format!("{name}: {} great cycles, want {cycles_want}", cycles.len()));
            }
            for c in &cycles {
                let hubs = c.vertices[0] == lm.v1 && c.vertices[7] == lm.v2;
                if c.len() != GREAT_CYCLE_LEN || !hubs || !chordless(g, &c.vertices) {
                    bad.push(format!("{name}: cycle {:?} not a chordless 14-cycle through both hubs", c.path_indices));
                }
            }
            if !lm.matched && !triangle_free(g) {
                bad.push(format!("{name}: has a triangle"));
            }
            checked += 1;
        }
    }
    match bad.first() {
        None => (true, format!("{checked} graphs audited")),
        Some(b) => (false, format!("{} problems, first {b}", bad.len())),
    }
}

fn determinism_and_replay() -> Verdict {
    let gp = generate(FamilySpec::Gprime(4)).unwrap();
    let star = generate(FamilySpec::Star(5)).unwrap();
    let rnd = random_connected_graph(&mut ChaCha8Rng::seed_from_u64(10), 7, 0.3);
    let cases = [
        (&gp.graph, gp.landmarks.as_ref(), 3, CopPolicy::RandomWalk(5), RobberTeamPolicy::ScriptGprime),
        (&gp.graph, gp.landmarks.as_ref(), 3, CopPolicy::Greedy, RobberTeamPolicy::CycleAttack(0, 2)),
        (&star.graph, None, 3, CopPolicy::Guard(0), RobberTeamPolicy::BestResponse(CopPolicy::Guard(0))),
        (&rnd, None, 2, CopPolicy::RandomWalk(1), RobberTeamPolicy::Cautious(vec![6, 0])),
        (&rnd, None, 2, CopPolicy::Optimal, RobberTeamPolicy::Optimal),
    ];
    let mut bad = Vec::new();
    for (k, (g, lm, s, cop, team)) in cases.iter().enumerate() {
        let opts = MatchOptions {
            seed: 77 + k as u64,
            ..MatchOptions::default()
        };
        let a = run_match(g, *lm, *s, cop, team, &opts).unwrap();
        let b = run_match(g, *lm, *s, cop, team, &opts).unwrap();
        if a.to_json() != b.to_json() {
            bad.push(format!("{cop} vs {team}: reruns differ"));
        }
        let parsed: Transcript = serde_json::from_str(&a.to_json()).unwrap();
        if let Err(e) = replay(&parsed) {
            bad.push(format!("{cop} vs {team}: replay failed: {e}"));
        }
    }
    match bad.first() {
        None => (true, format!("{} matches rerun byte-identically and replay cleanly", cases.len())),
        Some(b) => (false, b.clone()),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("solver equals depth-capped minimax", oracle_equivalence),
        ("edge patrol saves two vertices", patrol_guarantee),
        ("two robbers leave three vertices when max degree >= 3", save_three_with_two_robbers),
        ("guarded star damage bound", star_lemma),
        ("C14 with two robbers has value 12", c14_exact),
        ("gprime(4) script with three robbers", || {
            suite_min(FamilySpec::Gprime(4), 3, RobberTeamPolicy::ScriptGprime, 24)
        }),
        ("g(8) script with four robbers", || suite_min(FamilySpec::G(8), 4, RobberTeamPolicy::ScriptG, 48)),
        ("cycle attacks", cycle_attacks),
        ("structural audits", structural_audits),
        ("determinism and replay", determinism_and_replay),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!(
            "CRITERION {}: {} {name}: {detail} [{:.1}s]",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
