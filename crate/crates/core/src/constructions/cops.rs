use std::collections::VecDeque;

use crate::error::{Error, Result, Side};

use super::SimpleGraph;

/// k cycles of 2(k−1) vertices joined by two bridges per pair of cycles.
#[derive(Clone, Debug)]
pub struct CopsRobbersGraph {
    pub graph: SimpleGraph,
    /// Cycle index of every vertex.
    pub cycle_of: Vec<usize>,
    pub k: usize,
}

/// Cycle vertex `c{i}_{j}`: position j on cycle i. The t-th other cycle seen
/// from cycle i is reached through positions 2t and 2t+1.
pub fn cops_robbers_graph(k: usize) -> Result<CopsRobbersGraph> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k}, need k ≥ 2")));
    }
    let len = 2 * (k - 1);
    let mut g = SimpleGraph::empty();
    let mut cycle_of = Vec::with_capacity(k * len);
    for i in 0..k {
        for j in 0..len {
            g.add_vertex(&format!("c{i}_{j}"))?;
            cycle_of.push(i);
        }
    }
    let at = |i: usize, j: usize| i * len + j;
    for i in 0..k {
        for j in 0..len {
            let next = (j + 1) % len;
            if g.edge_id(at(i, j), at(i, next)).is_none() {
                g.add_edge(at(i, j), at(i, next))?;
            }
        }
    }
    // Slot of cycle j among the other cycles of i.
    let slot = |i: usize, j: usize| if j < i { j } else { j - 1 };
    for i in 0..k {
        for j in i + 1..k {
            let (t, s) = (slot(i, j), slot(j, i));
            g.add_edge(at(i, 2 * t), at(j, 2 * s + 1))?;
            g.add_edge(at(i, 2 * t + 1), at(j, 2 * s))?;
        }
    }
    Ok(CopsRobbersGraph { graph: g, cycle_of, k })
}

/// How the robber reacts to cop placements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RobberStrategy {
    /// Stay inside a cycle holding no cop, crossing a bridge when a cop
    /// enters. For graphs from [`cops_robbers_graph`].
    CycleRefuge { cycle_of: Vec<usize> },
    /// Stay on any edge with both endpoints free; otherwise move to the
    /// nearest such edge. Enough for K_4 against two cops.
    CopFreeEdge,
}

/// The robber's response to the cop set. Returns the empty path when the
/// robber stays; otherwise `p_0, p_1, …, p_{ℓ+1}` where `{p_0, p_1}` is the
/// current edge, `{p_ℓ, p_{ℓ+1}}` the new one, and `p_1..=p_{ℓ+1}` are free.
pub fn robber_move(
    h: &SimpleGraph,
    strategy: &RobberStrategy,
    cops: &[bool],
    robber: (usize, usize),
) -> Result<Vec<usize>> {
    let (x, y) = robber;
    if h.edge_id(x, y).is_none() {
        return Err(Error::violation(Side::Duplicator, "robber is not on an edge"));
    }
    if cops[x] && cops[y] {
        return Err(Error::violation(
            Side::Duplicator,
            format!("robber captured on {}-{}", h.name(x), h.name(y)),
        ));
    }
    let no_cops = !cops.iter().any(|&c| c);
    let both_free = !cops[x] && !cops[y];
    match strategy {
        RobberStrategy::CopFreeEdge => {
            if both_free {
                return Ok(Vec::new());
            }
            search(h, cops, robber, |_| true, |_, _| true)
        }
        RobberStrategy::CycleRefuge { cycle_of } => {
            let ncycles = cycle_of.iter().max().map_or(0, |&c| c + 1);
            let mut occupied = vec![false; ncycles];
            for (v, &c) in cops.iter().enumerate() {
                if c {
                    occupied[cycle_of[v]] = true;
                }
            }
            if no_cops || (both_free && !occupied[cycle_of[x]] && !occupied[cycle_of[y]]) {
                return Ok(Vec::new());
            }
            search(
                h,
                cops,
                robber,
                |v| !occupied[cycle_of[v]],
                |a, b| cycle_of[a] == cycle_of[b],
            )
        }
    }
}

/// Multi-source BFS from the free endpoints of the robber edge through free
/// vertices, to the first vertex `w` with `refuge(w)` that has a free
/// neighbour `z` with `same(w, z)`, off the path and not the far endpoint.
fn search(
    h: &SimpleGraph,
    cops: &[bool],
    robber: (usize, usize),
    refuge: impl Fn(usize) -> bool,
    same: impl Fn(usize, usize) -> bool,
) -> Result<Vec<usize>> {
    let (x, y) = robber;
    let n = h.n();
    let mut parent = vec![usize::MAX; n];
    let mut origin = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for (s, other) in [(x, y), (y, x)] {
        if !cops[s] {
            origin[s] = other;
            parent[s] = s;
            queue.push_back(s);
        }
    }
    let path_to = |w: usize, parent: &[usize]| {
        let mut p = vec![w];
        let mut cur = w;
        while parent[cur] != cur {
            cur = parent[cur];
            p.push(cur);
        }
        p.reverse();
        p
    };
    while let Some(w) = queue.pop_front() {
        if refuge(w) {
            let mut p = path_to(w, &parent);
            let p0 = origin[p[0]];
            let next = h.neighbors(w).iter().copied().find(|&z| {
                !cops[z] && same(w, z) && z != p0 && !p.contains(&z)
            });
            if let Some(z) = next {
                p.insert(0, p0);
                p.push(z);
                return Ok(p);
            }
        }
        for &z in h.neighbors(w) {
            if !cops[z] && parent[z] == usize::MAX {
                parent[z] = w;
                origin[z] = origin[w];
                queue.push_back(z);
            }
        }
    }
    Err(Error::violation(
        Side::Duplicator,
        format!("robber on {}-{} has no escape", h.name(x), h.name(y)),
    ))
}
