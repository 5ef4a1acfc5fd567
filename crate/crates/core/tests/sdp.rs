use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ugcsp_core::constructions::{complete_graph, cycle_graph, petersen, SimpleGraph};
use ugcsp_core::instances::{ratio, Normalization};
use ugcsp_core::sdp::{
    build_lc_relaxation, build_maxcut_sdp, gw_alpha, gw_objective, gw_symmetric_value,
    maxcut_brute, parse_sdpa, solve_sdp_lowrank, write_sdpa, WeightedGraph,
};
use ugcsp_core::{SolverOptions, WeightedCspInstance};

const TOL: f64 = 1e-4;
const PSD_TOL: f64 = 1e-9;

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> WeightedGraph {
    let n = rng.random_range(2..=max_n);
    let mut g = SimpleGraph::with_vertices(n, "v");
    let mut w = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.5) {
                g.add_edge(a, b).unwrap();
                w.push(ratio(rng.random_range(1..=4), 2));
            }
        }
    }
    WeightedGraph::new(g, w).unwrap()
}

/// Every bipartition, independently of the library's brute force.
fn naive_maxcut(g: &WeightedGraph) -> f64 {
    let n = g.n();
    (0..1u64 << n)
        .map(|s| {
            g.edges_f64()
                .filter(|&(a, b, _)| (s >> a & 1) != (s >> b & 1))
                .map(|(_, _, w)| w)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[test]
fn maxcut_relaxation_is_sound_and_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let opts = SolverOptions::default();
    for i in 0..25 {
        let g = random_graph(&mut rng, 8);
        let opt = naive_maxcut(&g);
        assert_eq!(maxcut_brute(&g).unwrap().0.to_f64().unwrap(), opt);
        let sol = solve_sdp_lowrank(&build_maxcut_sdp(&g), &opts, i).unwrap();
        assert!(sol.residual <= opts.tol, "residual {}", sol.residual);
        assert!(sol.min_eigenvalue() >= -PSD_TOL);
        assert!(sol.value >= opt - TOL, "sdp {} < opt {opt}", sol.value);
        // Goemans–Williamson sandwich.
        let sym = gw_symmetric_value(&sol, &g);
        assert!(gw_alpha() * sol.value <= sym + TOL);
        assert!(sym <= opt + TOL);
    }
}

#[test]
fn known_maxcut_values() {
    let opts = SolverOptions::default();
    // Odd cycle: n/2 (1 + cos π/n).
    for n in [3usize, 5, 7] {
        let g = WeightedGraph::unit(cycle_graph(n));
        let v = solve_sdp_lowrank(&build_maxcut_sdp(&g), &opts, 0).unwrap().value;
        let expect = n as f64 / 2.0 * (1.0 + (PI / n as f64).cos());
        assert!((v - expect).abs() <= TOL, "C_{n}: {v} vs {expect}");
    }
    // K_n: n²/4 for the vector relaxation.
    for n in [4usize, 6] {
        let g = WeightedGraph::unit(complete_graph(n, "k"));
        let v = solve_sdp_lowrank(&build_maxcut_sdp(&g), &opts, 0).unwrap().value;
        assert!((v - (n * n) as f64 / 4.0).abs() <= TOL);
    }
    // Petersen: 12.5 from its smallest adjacency eigenvalue −2.
    let g = WeightedGraph::unit(petersen());
    let v = solve_sdp_lowrank(&build_maxcut_sdp(&g), &opts, 0).unwrap().value;
    assert!((v - 12.5).abs() <= TOL, "{v}");
}

#[test]
fn gw_inequality_on_a_grid() {
    let alpha = gw_alpha();
    assert!((alpha - 0.87856).abs() < 1e-4);
    for i in 1..=100_000 {
        let theta = PI * i as f64 / 100_000.0;
        let slack = theta / PI - alpha * (1.0 - theta.cos()) / 2.0;
        assert!(slack >= -1e-12, "θ = {theta}: slack {slack}");
        assert!(gw_objective(theta) >= alpha - 1e-12);
    }
}

#[test]
fn solver_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let g = random_graph(&mut rng, 7);
    let opts = SolverOptions::default();
    let a = solve_sdp_lowrank(&build_maxcut_sdp(&g), &opts, 9).unwrap();
    let b = solve_sdp_lowrank(&build_maxcut_sdp(&g), &opts, 9).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());

    let c = small_csp(&mut rng);
    let inst = build_lc_relaxation(&c).unwrap();
    let a = solve_sdp_lowrank(&inst, &opts, 3).unwrap();
    let b = solve_sdp_lowrank(&inst, &opts, 3).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

fn small_csp(rng: &mut ChaCha8Rng) -> WeightedCspInstance {
    let mut c = WeightedCspInstance::new(2).unwrap();
    let n = rng.random_range(2..=3usize);
    for i in 0..n {
        c.add_variable(&format!("y{i}")).unwrap();
    }
    let mut sat = BTreeSet::new();
    for t in [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]] {
        if rng.random_bool(0.5) {
            sat.insert(t);
        }
    }
    let t = c.add_ctype("r", 2, sat).unwrap();
    for _ in 0..rng.random_range(1..=3) {
        let a = rng.random_range(0..n);
        let b = (a + 1) % n;
        c.add_application(t, vec![a, b], ratio(rng.random_range(1..=4), 4)).unwrap();
    }
    c.normalized(Normalization::Weight).0
}

fn naive_csp_opt(c: &WeightedCspInstance) -> f64 {
    let n = c.num_variables();
    (0..1u32 << n)
        .map(|s| {
            let a: Vec<u32> = (0..n).map(|i| s >> i & 1).collect();
            c.value(&a).to_f64().unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn lc_relaxation_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let opts = SolverOptions::default();
    for i in 0..8 {
        let c = small_csp(&mut rng);
        let sol = solve_sdp_lowrank(&build_lc_relaxation(&c).unwrap(), &opts, i).unwrap();
        assert!(sol.residual <= opts.tol * 10.0, "residual {}", sol.residual);
        assert!(sol.min_eigenvalue() >= -PSD_TOL);
        let opt = naive_csp_opt(&c);
        assert!(sol.value >= opt - TOL, "LC {} < opt {opt}", sol.value);
        assert!(sol.value <= c.total_weight().to_f64().unwrap() + TOL);
    }
}

#[test]
fn sdpa_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let opts = SolverOptions::default();
    for i in 0..5 {
        let g = random_graph(&mut rng, 6);
        let inst = build_maxcut_sdp(&g);
        let text = write_sdpa(&inst);
        let back = parse_sdpa(&text).unwrap();
        assert_eq!(write_sdpa(&back), text);
        let a = solve_sdp_lowrank(&inst, &opts, i).unwrap().value;
        let b = solve_sdp_lowrank(&back, &opts, i).unwrap().value;
        assert!((a - b).abs() <= TOL);
    }
    assert!(parse_sdpa("not an sdpa file").is_err());
}
