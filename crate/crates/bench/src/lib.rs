//! Fixed-seed inputs shared by the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ugcsp_core::constructions::{petersen, random_inapprox_pair, PairParams, RandomPair, SimpleGraph};
use ugcsp_core::instances::ratio;
use ugcsp_core::sdp::WeightedGraph;
use ugcsp_core::{Gf2Vector, GroupUgInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random single-difference instance on `n` vertices, edge probability 1/2.
pub fn random_group(n: usize, m: u32, seed: u64) -> GroupUgInstance {
    use rand::Rng;
    let mut r = rng(seed);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut u = GroupUgInstance::with_vertices(m, &names).expect("valid");
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(0.5) {
                u.add_bundle(a, b, &[Gf2Vector::random(m, &mut r)]).expect("valid");
            }
        }
    }
    u
}

pub fn petersen_pair(seed: u64) -> RandomPair {
    let params = PairParams {
        d: 3,
        ell: 2,
        m: 3,
        r: 3,
        k: 2,
        girth_override: true,
    };
    random_inapprox_pair(&params, &petersen(), &mut rng(seed)).expect("valid parameters")
}

/// G(n, 1/2) with unit weights.
pub fn random_graph(n: usize, seed: u64) -> WeightedGraph {
    use rand::Rng;
    let mut r = rng(seed);
    let mut g = SimpleGraph::with_vertices(n, "v");
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(0.5) {
                g.add_edge(a, b).expect("simple");
            }
        }
    }
    let w = vec![ratio(1, 1); g.edges().len()];
    WeightedGraph::new(g, w).expect("matching weights")
}
