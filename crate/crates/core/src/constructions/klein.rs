use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;
use crate::instances::GroupUgInstance;

use super::{matching_decomposition, SimpleGraph};

/// Nonzero elements of the Klein four-group, encoded in F_2^2 as
/// a = 01, b = 10, c = 11 (so a + b = c).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KleinColor {
    A,
    B,
    C,
}

impl KleinColor {
    pub const ALL: [KleinColor; 3] = [KleinColor::A, KleinColor::B, KleinColor::C];

    pub fn vector(self) -> Gf2Vector {
        let bits = match self {
            KleinColor::A => 0b01,
            KleinColor::B => 0b10,
            KleinColor::C => 0b11,
        };
        Gf2Vector::from_bits_masked(bits, 2)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

/// Base graph, edge marks m(e), and the two instances. Vertex indices of
/// `u1`/`u2` coincide with those of `graph`.
#[derive(Clone, Debug)]
pub struct KleinPair {
    pub graph: SimpleGraph,
    pub coloring: Vec<KleinColor>,
    pub star_edge: usize,
    pub u1: GroupUgInstance,
    pub u2: GroupUgInstance,
}

impl KleinPair {
    pub fn mark(&self, e: usize) -> Gf2Vector {
        self.coloring[e].vector()
    }

    /// Mark of the edge between `u` and `v`, if adjacent.
    pub fn mark_between(&self, u: usize, v: usize) -> Option<Gf2Vector> {
        self.graph.edge_id(u, v).map(|e| self.mark(e))
    }

    pub fn star(&self) -> (usize, usize) {
        self.graph.edges()[self.star_edge]
    }
}

/// U1 has bundle {0, m(e)} on every edge; U2 differs only on `star_edge`,
/// where the bundle is {b, c}.
pub fn klein_pair(h: &SimpleGraph, coloring: &[KleinColor], star_edge: usize) -> Result<KleinPair> {
    if h.regular_degree() != Some(3) {
        return Err(Error::Precondition("base graph must be 3-regular".into()));
    }
    let idx: Vec<usize> = coloring.iter().map(|c| c.index()).collect();
    matching_decomposition(h, Some(&idx))?;
    if star_edge >= h.edges().len() {
        return Err(Error::Precondition(format!("no edge #{star_edge}")));
    }
    if coloring[star_edge] != KleinColor::A {
        return Err(Error::Precondition("starred edge must have colour a".into()));
    }
    let zero = Gf2Vector::zero(2);
    let mut u1 = GroupUgInstance::with_vertices(2, h.names())?;
    let mut u2 = u1.clone();
    for (e, &(u, v)) in h.edges().iter().enumerate() {
        u1.add_bundle(u, v, &[zero, coloring[e].vector()])?;
        if e == star_edge {
            u2.add_bundle(u, v, &[KleinColor::B.vector(), KleinColor::C.vector()])?;
        } else {
            u2.add_bundle(u, v, &[zero, coloring[e].vector()])?;
        }
    }
    Ok(KleinPair {
        graph: h.clone(),
        coloring: coloring.to_vec(),
        star_edge,
        u1,
        u2,
    })
}

/// Colours a 3-regular bipartite graph from its matching decomposition
/// (matchings in order a, b, c) and stars the first a-edge.
pub fn klein_pair_bipartite(h: &SimpleGraph) -> Result<KleinPair> {
    let ms = matching_decomposition(h, None)?;
    if ms.len() != 3 {
        return Err(Error::Precondition("base graph must be 3-regular".into()));
    }
    let mut coloring = vec![KleinColor::A; h.edges().len()];
    for (c, m) in ms.iter().enumerate() {
        for &e in m {
            coloring[e] = KleinColor::from_index(c).expect("three classes");
        }
    }
    let star = *ms[0].iter().min().expect("nonempty matching");
    klein_pair(h, &coloring, star)
}

/// The fixed K_4 configuration: v1v2, v3v4 ↦ a; v1v3, v2v4 ↦ b; v1v4, v2v3 ↦ c;
/// starred edge {v3, v4}.
pub fn k4_example() -> KleinPair {
    let mut g = SimpleGraph::empty();
    for i in 1..=4 {
        g.add_vertex(&format!("v{i}")).expect("fresh");
    }
    use KleinColor::*;
    let spec = [
        (0, 1, A),
        (2, 3, A),
        (0, 2, B),
        (1, 3, B),
        (0, 3, C),
        (1, 2, C),
    ];
    let mut coloring = Vec::new();
    for (u, v, c) in spec {
        g.add_edge(u, v).expect("simple");
        coloring.push(c);
    }
    klein_pair(&g, &coloring, 1).expect("valid K_4 colouring")
}
