mod common;

use common::random_connected_graph;
use cops_damage::arena::{replay, run_match, MatchOptions};
use cops_damage::rules::GameState;
use cops_damage::solver::{best_response_robbers, solve, Limits};
use cops_damage::strategies::{central_edge, CopPolicy, RobberTeamPolicy};
use cops_damage::Graph;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_connected_graph(&mut rng, n, 0.3)
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    Graph::new(g.n(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_play_keeps_progress_order(n in 2usize..9, s in 1usize..4, seed: u64) {
        let g = graph(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let state = GameState::initial(&g, s).unwrap();
        let state = state.place_cop(rng.gen_range(0..n)).unwrap();
        let placement: Vec<usize> = (0..s).map(|_| rng.gen_range(0..n)).collect();
        let (mut state, _) = state.place_robbers(&placement).unwrap();
        for _ in 0..4 * n {
            if state.is_settled() {
                break;
            }
            let before = state.class_key();
            let cop = *state.legal_cop_moves(&g).unwrap().choose(&mut rng).unwrap();
            let (after, ev) = state.apply_cop_move(&g, cop).unwrap();
            prop_assert!(ev.damaged.iter().all(|&v| !before.1.contains(v)));
            let mid = after.class_key();
            prop_assert!(mid.0 <= before.0);
            prop_assert!(mid.0 < before.0 || before.1.is_subset(&mid.1));
            if after.is_settled() {
                state = after;
                break;
            }
            let moves = after.legal_joint_robber_moves(&g).unwrap();
            let mv = moves.choose(&mut rng).unwrap();
            let (next, _) = after.apply_robber_move(&g, mv).unwrap();
            let end = next.class_key();
            prop_assert!(end.0 <= mid.0);
            prop_assert_eq!(&end.1, &mid.1);
            state = next;
        }
        prop_assert!(state.damaged().len() <= n);
    }

    #[test]
    fn matches_replay_and_repeat(n in 2usize..10, s in 1usize..4, seed: u64, walk: u64) {
        let g = graph(n, seed);
        let cops = [CopPolicy::RandomWalk(walk), CopPolicy::Greedy, CopPolicy::Guard(0)];
        let teams = [RobberTeamPolicy::Stationary, RobberTeamPolicy::Cautious((0..n).rev().collect())];
        for cop in &cops {
            for team in &teams {
                let opts = MatchOptions { seed: walk.rotate_left(7), ..MatchOptions::default() };
                let a = run_match(&g, None, s, cop, team, &opts).unwrap();
                let b = run_match(&g, None, s, cop, team, &opts).unwrap();
                prop_assert_eq!(a.to_json(), b.to_json());
                prop_assert!(replay(&a).is_ok());
                prop_assert_eq!(a.damage + a.saved, n);
            }
        }
    }

    #[test]
    fn tampered_transcripts_are_rejected(n in 3usize..8, seed: u64) {
        let g = graph(n, seed);
        let t = run_match(&g, None, 2, &CopPolicy::RandomWalk(seed), &RobberTeamPolicy::Stationary, &MatchOptions::default()).unwrap();
        if let Some(r) = t.rounds.iter().position(|r| !r.damaged.is_empty()) {
            let mut bad = t.clone();
            bad.rounds[r].damaged.clear();
            prop_assert!(replay(&bad).is_err());
        }
        let mut bad = t.clone();
        bad.final_damaged.push(n);
        prop_assert!(replay(&bad).is_err());
    }

    #[test]
    fn value_invariant_under_relabeling(n in 2usize..7, s in 1usize..3, seed: u64) {
        let g = graph(n, seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(!seed));
        let h = relabel(&g, &perm);
        let lim = Limits::default();
        prop_assert_eq!(solve(&g, s, &lim).unwrap().value, solve(&h, s, &lim).unwrap().value);
    }

    #[test]
    fn patrol_keeps_two_vertices(n in 2usize..8, s in 1usize..3, seed: u64) {
        let g = graph(n, seed);
        let lim = Limits::default();
        prop_assert!(solve(&g, s, &lim).unwrap().value <= n - 2);
        let (u, v) = central_edge(&g).unwrap();
        let br = best_response_robbers(&g, s, &CopPolicy::Patrol(u, v), &lim).unwrap();
        prop_assert!(br.value <= n - 2);
        prop_assert!(!br.ever_damaged.contains(&u) && !br.ever_damaged.contains(&v));
    }
}
