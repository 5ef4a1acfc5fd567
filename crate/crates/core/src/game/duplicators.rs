use crate::constructions::{robber_move, KleinPair, RobberStrategy};
use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;
use crate::instances::GroupUgInstance;

use super::{edge_consistent, violation, AssertLevel, Bijection, CheckRecord, Duplicator, GStarMap, GameView};

/// Always the all-zero g*-map; wins exactly when A = B.
#[derive(Clone, Debug, Default)]
pub struct IdentityDuplicator;

impl Duplicator for IdentityDuplicator {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn bijection(&mut self, view: &GameView<'_>) -> Result<Bijection> {
        Ok(Bijection::Shift(GStarMap::zero(view.a.num_vertices(), view.m())))
    }
}

/// The two-pebble strategy. With a pebble on (v0, g1) / (v0, g2):
/// g*(v0) = g1 + g2 and, for every neighbour v, g*(v) = g*(v0) + s where s
/// is the shift carrying v's U2-bundle onto its U1-bundle (when U1 is the
/// all-identity copy of U2, s is the U2 diff g3). Everything else is 0.
#[derive(Clone, Debug, Default)]
pub struct K2Duplicator {
    checks: Vec<CheckRecord>,
}

impl K2Duplicator {
    pub fn new() -> Self {
        Self::default()
    }
}

/// s with {y + s : y ∈ u2} = u1, if any.
fn bundle_shift(u1: &[Gf2Vector], u2: &[Gf2Vector]) -> Option<Gf2Vector> {
    if u1.len() != u2.len() || u1.is_empty() {
        return None;
    }
    u2.iter().map(|&y| u1[0] + y).find(|&s| {
        let mut moved: Vec<Gf2Vector> = u2.iter().map(|&y| y + s).collect();
        moved.sort();
        moved == u1
    })
}

fn require_simple(a: &GroupUgInstance, b: &GroupUgInstance) -> Result<()> {
    if !a.is_simple() || !b.is_simple() {
        return Err(Error::Precondition(
            "two-pebble strategy needs simple bases (one diff per edge)".into(),
        ));
    }
    Ok(())
}

impl Duplicator for K2Duplicator {
    fn name(&self) -> &'static str {
        "k2"
    }

    fn bijection(&mut self, view: &GameView<'_>) -> Result<Bijection> {
        let (a, b) = (view.a, view.b);
        require_simple(a, b)?;
        self.checks.clear();
        let mut g = GStarMap::zero(a.num_vertices(), view.m());
        let placed: Vec<_> = view.placed().copied().collect();
        match placed.as_slice() {
            [] => {}
            [p] => {
                let v0 = p.a.0;
                if p.b.0 != v0 {
                    return Err(violation("pebble pair on different base vertices"));
                }
                let g0 = p.a.1 + p.b.1;
                g.set(v0, g0);
                let adj = a.adjacency();
                for &v in &adj[v0] {
                    let s = match (a.bundle_between(v0, v), b.bundle_between(v0, v)) {
                        (Some(x), Some(y)) => bundle_shift(&x.diffs, &y.diffs),
                        _ => None,
                    };
                    g.set(v, s.map_or(Gf2Vector::zero(view.m()), |s| g0 + s));
                }
                if view.level >= AssertLevel::Edges {
                    let bad: Vec<usize> = adj[v0]
                        .iter()
                        .copied()
                        .filter(|&v| !edge_consistent(a, b, &g, v0, v))
                        .collect();
                    let ok = bad.is_empty();
                    let detail = (!ok).then(|| {
                        let names: Vec<&str> = bad.iter().map(|&v| a.vertex_name(v)).collect();
                        format!("inconsistent at {}: {}", a.vertex_name(v0), names.join(","))
                    });
                    self.checks.push(CheckRecord::new("pinned-edges", ok, detail.clone()));
                    if !ok {
                        return Err(violation(detail.unwrap_or_default()));
                    }
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "two-pebble strategy asked to answer with two pebbles down".into(),
                ))
            }
        }
        Ok(Bijection::Shift(g))
    }

    fn last_checks(&self) -> Vec<CheckRecord> {
        self.checks.clone()
    }
}

/// Robber-guided strategy on a Klein pair: cops are the pebbled base
/// vertices, the robber starts on the starred edge, and each robber move
/// along p_0 … p_{ℓ+1} adds m(e_j) to g*(p_j) for the interior vertices,
/// e_j being the edge at p_j off the path.
#[derive(Clone, Debug)]
pub struct CopsDuplicator {
    pair: KleinPair,
    strategy: RobberStrategy,
    robber: (usize, usize),
    gstar: GStarMap,
    checks: Vec<CheckRecord>,
}

impl CopsDuplicator {
    pub fn new(pair: KleinPair, strategy: RobberStrategy) -> Self {
        let robber = pair.star();
        let gstar = GStarMap::zero(pair.graph.n(), 2);
        CopsDuplicator {
            pair,
            strategy,
            robber,
            gstar,
            checks: Vec::new(),
        }
    }

    pub fn robber(&self) -> (usize, usize) {
        self.robber
    }

    pub fn gstar(&self) -> &GStarMap {
        &self.gstar
    }

    fn apply_path(&mut self, path: &[usize]) -> Result<()> {
        let h = &self.pair.graph;
        let l = path.len() - 2;
        for j in 1..=l {
            let (prev, at, next) = (path[j - 1], path[j], path[j + 1]);
            let off: Vec<usize> = h
                .neighbors(at)
                .iter()
                .copied()
                .filter(|&w| w != prev && w != next)
                .collect();
            let [w] = off[..] else {
                return Err(violation(format!("{} has no unique off-path edge", h.name(at))));
            };
            let mark = self.pair.mark_between(at, w).expect("adjacent");
            self.gstar.set(at, self.gstar.get(at) + mark);
        }
        self.robber = (path[l], path[l + 1]);
        Ok(())
    }

    /// Consistent on every edge but the robber's; disjoint there.
    fn audit(&mut self) -> Result<()> {
        let (u1, u2) = (&self.pair.u1, &self.pair.u2);
        let h = &self.pair.graph;
        let r = self.pair.graph.edge_id(self.robber.0, self.robber.1);
        let mut bad = Vec::new();
        for (e, &(u, v)) in h.edges().iter().enumerate() {
            if Some(e) != r && !edge_consistent(u1, u2, &self.gstar, u, v) {
                bad.push(format!("{}-{}", h.name(u), h.name(v)));
            }
        }
        let ok = bad.is_empty();
        self.checks.push(CheckRecord::new(
            "consistent-off-robber",
            ok,
            (!ok).then(|| bad.join(",")),
        ));
        let (x, y) = self.robber;
        let shift = self.gstar.get(x) + self.gstar.get(y);
        let d1 = &u1.bundle_between(x, y).expect("robber edge").diffs;
        let d2 = &u2.bundle_between(x, y).expect("robber edge").diffs;
        let disjoint = d2.iter().all(|&z| !d1.contains(&(z + shift)));
        self.checks.push(CheckRecord::new(
            "robber-edge-disjoint",
            disjoint,
            (!disjoint).then(|| format!("{}-{}", h.name(x), h.name(y))),
        ));
        if !ok || !disjoint {
            let failed: Vec<String> = self
                .checks
                .iter()
                .filter(|c| !c.ok)
                .map(|c| format!("{}: {}", c.name, c.detail.clone().unwrap_or_default()))
                .collect();
            return Err(violation(failed.join("; ")));
        }
        Ok(())
    }
}

impl Duplicator for CopsDuplicator {
    fn name(&self) -> &'static str {
        "cops"
    }

    fn bijection(&mut self, view: &GameView<'_>) -> Result<Bijection> {
        self.checks.clear();
        let n = self.pair.graph.n();
        if view.a.num_vertices() != n || view.m() != 2 {
            return Err(Error::Precondition("instances do not match the Klein pair".into()));
        }
        let mut cops = vec![false; n];
        for v in view.pebbled_vertices() {
            cops[v] = true;
        }
        let path = robber_move(&self.pair.graph, &self.strategy, &cops, self.robber)?;
        if !path.is_empty() {
            self.apply_path(&path)?;
        }
        if view.level >= AssertLevel::Edges {
            self.audit()?;
        }
        Ok(Bijection::Shift(self.gstar.clone()))
    }

    fn last_checks(&self) -> Vec<CheckRecord> {
        self.checks.clone()
    }
}
