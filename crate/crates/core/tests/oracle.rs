mod common;

use common::{connected_graphs, depth_cap, Oracle};
use cops_damage::families::{generate, FamilySpec};
use cops_damage::solver::{best_response_robbers, solve, Limits};
use cops_damage::strategies::CopPolicy;
use cops_damage::Graph;

fn oracle(g: &Graph, s: usize) -> usize {
    let d = depth_cap(g.n(), s);
    let vals = Oracle::new(g, s).values(&[d, d + 4]);
    assert_eq!(vals[0], vals[1], "oracle not converged at cap {d}");
    vals[0]
}

#[test]
fn enumeration_counts() {
    let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 6, 21]);
}

#[test]
fn solver_matches_oracle_up_to_five_vertices() {
    for n in 1..=5 {
        for g in connected_graphs(n) {
            for s in 1..=2 {
                let want = oracle(&g, s);
                let got = solve(&g, s, &Limits::default()).unwrap().value;
                assert_eq!(got, want, "n={n} s={s} edges={:?}", g.edges());
            }
        }
    }
}

#[test]
fn solver_matches_oracle_on_small_stars() {
    for t in 1..=4 {
        let g = generate(FamilySpec::Star(t)).unwrap().graph;
        for s in 1..=3 {
            assert_eq!(solve(&g, s, &Limits::default()).unwrap().value, oracle(&g, s), "t={t} s={s}");
        }
    }
}

#[test]
fn known_small_values() {
    let value = |spec: FamilySpec, s: usize| solve(&generate(spec).unwrap().graph, s, &Limits::default()).unwrap().value;
    assert_eq!(value(FamilySpec::Path(2), 2), 0);
    assert_eq!(value(FamilySpec::Path(2), 5), 0);
    assert_eq!(value(FamilySpec::Star(3), 2), 1);
    let k4 = generate(FamilySpec::Complete(4)).unwrap().graph;
    assert_eq!(value(FamilySpec::Complete(4), 2), oracle(&k4, 2));
    assert_eq!(value(FamilySpec::Complete(4), 2), 1);
}

#[test]
fn shallow_caps_are_lower_bounds() {
    let g = generate(FamilySpec::Cycle(5)).unwrap().graph;
    let o = Oracle::new(&g, 2);
    let vals = o.values(&[0, 1, 2, 4, 8, 40, 44]);
    assert_eq!(vals[0], 0);
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(vals[5], solve(&g, 2, &Limits::default()).unwrap().value);
}

#[test]
fn best_response_at_least_game_value() {
    for g in connected_graphs(4) {
        let value = solve(&g, 2, &Limits::default()).unwrap().value;
        for cop in [CopPolicy::Guard(0), CopPolicy::Greedy, CopPolicy::Stationary(1)] {
            let br = best_response_robbers(&g, 2, &cop, &Limits::default()).unwrap();
            assert!(br.value >= value, "{cop} on {:?}", g.edges());
        }
    }
}
