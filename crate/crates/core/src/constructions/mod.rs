//! Builders for every instance family: the unsatisfiable complete-graph
//! instance, Klein-four pairs, the cops-and-robbers graph, random F_2^m
//! pairs with good-edge filtering, and the parameter calculator.

mod cops;
mod graph;
mod klein;
mod matching;
mod params;
mod random_pair;
mod unsat;

pub use cops::{cops_robbers_graph, robber_move, CopsRobbersGraph, RobberStrategy};
pub use graph::{complete_bipartite, complete_graph, cycle_graph, petersen, SimpleGraph};
pub use klein::{k4_example, klein_pair, klein_pair_bipartite, KleinColor, KleinPair};
pub use matching::matching_decomposition;
pub use params::{compute_params, d_inequality_holds, ParamSet, GUARD_BAND};
pub use random_pair::{
    good_edges, paths_through_edge, random_inapprox_pair, PairParams, PairSidecar, RandomPair,
    SidecarEdge,
};
pub use unsat::{unsat_complete_graph, unsat_size};
