use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ugcsp_core::constructions::{petersen, SimpleGraph};
use ugcsp_core::game::{extend_along_path, steiner_tree};
use ugcsp_core::gf2::{random_subspace, span_of};
use ugcsp_core::{Gf2Subspace, Gf2Vector};

#[test]
fn path_extension_meets_every_edge_constraint() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut solvable, mut blocked) = (0, 0);
    for _ in 0..500 {
        let m = rng.random_range(2..=6u32);
        let len = rng.random_range(1..=6usize);
        let z: Vec<Gf2Subspace> = (0..len)
            .map(|_| random_subspace(m, rng.random_range(0..=m.min(3)), &mut rng).unwrap())
            .collect();
        let b: Vec<Gf2Vector> = (0..len).map(|_| Gf2Vector::random(m, &mut rng)).collect();
        let (s, t) = (Gf2Vector::random(m, &mut rng), Gf2Vector::random(m, &mut rng));

        let mut target = s + t;
        for &x in &b {
            target += x;
        }
        let all: Vec<Gf2Vector> = z.iter().flat_map(Gf2Subspace::basis).collect();
        let reachable = span_of(&all, m).unwrap().contains(target);

        match extend_along_path(s, t, &z, &b) {
            Ok(vals) => {
                assert!(reachable);
                assert_eq!(vals.len(), len + 1);
                assert_eq!((vals[0], vals[len]), (s, t));
                for i in 0..len {
                    assert!(z[i].contains(vals[i] + vals[i + 1] + b[i]), "edge {i}");
                }
                solvable += 1;
            }
            Err(_) => {
                assert!(!reachable);
                blocked += 1;
            }
        }
    }
    assert!(solvable > 0 && blocked > 0);
}

/// Fewest edges of a connected edge set touching every terminal.
fn naive_steiner_cost(g: &SimpleGraph, terminals: &[usize]) -> usize {
    let edges = g.edges();
    let mut best = usize::MAX;
    for mask in 0u32..1 << edges.len() {
        let k = mask.count_ones() as usize;
        if k >= best {
            continue;
        }
        let keep: Vec<usize> = (0..edges.len()).filter(|&e| mask >> e & 1 == 1).collect();
        let sub = g.edge_subgraph(&keep);
        let comp = sub.component_ids();
        let root = comp[terminals[0]];
        if terminals.iter().all(|&t| comp[t] == root)
            && keep.iter().all(|&e| comp[edges[e].0] == root)
        {
            best = k;
        }
    }
    best
}

#[test]
fn steiner_trees_are_minimal() {
    let g = petersen();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..25 {
        let k = rng.random_range(1..=5);
        let terminals: Vec<usize> = sample(&mut rng, g.n(), k).into_vec();
        let t = steiner_tree(&g, &terminals).unwrap();
        assert_eq!(t.cost(), naive_steiner_cost(&g, &terminals), "{terminals:?}");
        assert_eq!(t.edges.len() + 1, t.vertices.len());
        assert!(terminals.iter().all(|&x| t.contains(x)));
    }
}
