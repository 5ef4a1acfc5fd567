use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::constructions::{RandomPair, SimpleGraph};
use crate::error::{Error, Result};
use crate::gf2::{coefficients_in_basis, Gf2Subspace, Gf2Vector};

use super::{violation, AssertLevel, Bijection, CheckRecord, Duplicator, GStarMap, GameView};

const INF: u64 = u64::MAX / 4;

/// A minimum Steiner tree: edges as `(u, v)` with `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTree {
    pub terminals: Vec<usize>,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl SteinerTree {
    pub fn cost(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&key(u, v)).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

#[inline]
fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// BFS distances and parents from every vertex.
#[derive(Clone, Debug)]
struct Metric {
    dist: Vec<Vec<usize>>,
    parent: Vec<Vec<usize>>,
}

impl Metric {
    fn new(g: &SimpleGraph) -> Self {
        let (dist, parent) = (0..g.n()).map(|s| g.bfs(s)).unzip();
        Metric { dist, parent }
    }

    fn d(&self, a: usize, b: usize) -> u64 {
        match self.dist[a][b] {
            usize::MAX => INF,
            d => d as u64,
        }
    }

    fn add_path(&self, a: usize, b: usize, edges: &mut BTreeSet<(usize, usize)>) {
        let mut x = b;
        while x != a {
            let p = self.parent[a][x];
            edges.insert(key(x, p));
            x = p;
        }
    }

    /// Dreyfus–Wagner over the terminal subsets; ties go to the lowest
    /// vertex index and the first split found.
    fn steiner(&self, terminals: &[usize]) -> Result<SteinerTree> {
        let mut t: Vec<usize> = terminals.to_vec();
        t.sort_unstable();
        t.dedup();
        let Some(&root) = t.last() else {
            return Err(Error::InvalidParameter("no terminals".into()));
        };
        if t.iter().any(|&x| self.d(root, x) >= INF) {
            return Err(Error::Precondition("terminals lie in different components".into()));
        }
        let rest = &t[..t.len() - 1];
        let kk = rest.len();
        if kk > 12 {
            return Err(Error::SizeLimit(format!("{} Steiner terminals", t.len())));
        }
        let mut edges = BTreeSet::new();
        if kk > 0 {
            let n = self.dist.len();
            let full = (1usize << kk) - 1;
            let mut dp = vec![vec![INF; n]; full + 1];
            let mut choice = vec![vec![(usize::MAX, 0usize); n]; full + 1];
            for (i, &ti) in rest.iter().enumerate() {
                for v in 0..n {
                    dp[1 << i][v] = self.d(ti, v);
                }
            }
            let mut inner = vec![(INF, 0usize); n];
            for mask in 1..=full {
                if mask.count_ones() < 2 {
                    continue;
                }
                let low = mask & mask.wrapping_neg();
                for (u, slot) in inner.iter_mut().enumerate() {
                    *slot = (INF, 0);
                    let mut sub = (mask - 1) & mask;
                    while sub > 0 {
                        if sub & low != 0 {
                            let c = dp[sub][u] + dp[mask ^ sub][u];
                            if c < slot.0 {
                                *slot = (c, sub);
                            }
                        }
                        sub = (sub - 1) & mask;
                    }
                }
                for v in 0..n {
                    for (u, &(c, sub)) in inner.iter().enumerate() {
                        let total = c + self.d(u, v);
                        if total < dp[mask][v] {
                            dp[mask][v] = total;
                            choice[mask][v] = (u, sub);
                        }
                    }
                }
            }
            let mut stack = vec![(full, root)];
            while let Some((mask, v)) = stack.pop() {
                if mask.count_ones() == 1 {
                    self.add_path(rest[mask.trailing_zeros() as usize], v, &mut edges);
                } else {
                    let (u, sub) = choice[mask][v];
                    self.add_path(u, v, &mut edges);
                    stack.push((sub, u));
                    stack.push((mask ^ sub, u));
                }
            }
        }
        let mut vertices: BTreeSet<usize> = t.iter().copied().collect();
        for &(a, b) in &edges {
            vertices.insert(a);
            vertices.insert(b);
        }
        debug_assert_eq!(edges.len() + 1, vertices.len(), "optimal union is a tree");
        Ok(SteinerTree {
            terminals: t,
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
        })
    }
}

/// Exact minimum Steiner tree of `terminals` in `g` (unit edge weights).
pub fn steiner_tree(g: &SimpleGraph, terminals: &[usize]) -> Result<SteinerTree> {
    Metric::new(g).steiner(terminals)
}

/// Values on v_0 … v_L of a path with `g(v_0) = g_start`, `g(v_L) = g_end`
/// and g(v_{i-1}) + g(v_i) ∈ b_i + Z_i on every edge. Needs
/// g_start + g_end + Σ b_i ∈ Σ Z_i (always true when the Z_i span).
pub fn extend_along_path(
    g_start: Gf2Vector,
    g_end: Gf2Vector,
    z: &[Gf2Subspace],
    b: &[Gf2Vector],
) -> Result<Vec<Gf2Vector>> {
    if z.len() != b.len() || z.is_empty() {
        return Err(Error::InvalidParameter("path needs matching, nonempty edge data".into()));
    }
    let mut target = g_start + g_end;
    for &x in b {
        target += x;
    }
    let bases: Vec<Vec<Gf2Vector>> = z.iter().map(Gf2Subspace::basis).collect();
    let flat: Vec<Gf2Vector> = bases.iter().flatten().copied().collect();
    let coeffs = if target.is_zero() {
        vec![false; flat.len()]
    } else {
        coefficients_in_basis(target, &flat)?
    };
    let mut out = Vec::with_capacity(z.len() + 1);
    out.push(g_start);
    let mut at = 0;
    for (i, basis) in bases.iter().enumerate() {
        let mut next = out[i] + b[i];
        for &v in basis {
            if coeffs[at] {
                next += v;
            }
            at += 1;
        }
        out.push(next);
    }
    debug_assert_eq!(out[z.len()], g_end);
    Ok(out)
}

/// Tree and g* values computed for one vertex in one round.
#[derive(Clone, Debug)]
struct TreeAssignment {
    tree: SteinerTree,
    values: BTreeMap<usize, Gf2Vector>,
}

/// Maximal stretch of new tree edges between two vertices of S.
#[derive(Clone, Debug)]
struct Segment {
    vertices: Vec<usize>,
}

impl Segment {
    fn len(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// The Steiner-tree strategy on a random pair restricted to good edges.
/// For every vertex u it spans u and the pebbled vertices of u's component
/// by a minimum tree T_i(u), keeps the previous tree's values where the two
/// meet, propagates through short segments by +b(e), and closes long
/// segments with [`extend_along_path`]. g*(u) is the value at u.
#[derive(Clone, Debug)]
pub struct TreeDuplicator {
    base: SimpleGraph,
    z: Vec<Gf2Subspace>,
    b: Vec<Gf2Vector>,
    r: usize,
    m: u32,
    metric: Metric,
    comp: Vec<usize>,
    current: Vec<TreeAssignment>,
    prev: HashMap<usize, TreeAssignment>,
    checks: Vec<CheckRecord>,
}

impl TreeDuplicator {
    pub fn new(pair: &RandomPair) -> Self {
        let good = pair.good_graph();
        TreeDuplicator {
            base: pair.base.clone(),
            z: pair.z.clone(),
            b: pair.b.clone(),
            r: pair.params.r as usize,
            m: pair.params.m,
            metric: Metric::new(&good),
            comp: good.component_ids(),
            current: Vec::new(),
            prev: HashMap::new(),
            checks: Vec::new(),
        }
    }

    fn edge_data(&self, u: usize, v: usize) -> (&Gf2Subspace, Gf2Vector) {
        let e = self.base.edge_id(u, v).expect("tree edges are base edges");
        (&self.z[e], self.b[e])
    }

    fn consistent(&self, values: &BTreeMap<usize, Gf2Vector>, u: usize, v: usize) -> bool {
        let (z, b) = self.edge_data(u, v);
        z.contains(values[&u] + values[&v] + b)
    }

    fn assign(&self, u: usize, pebbled: &[usize]) -> Result<(TreeAssignment, usize)> {
        let c = self.comp[u];
        let mut terms: Vec<usize> = pebbled.iter().copied().filter(|&p| self.comp[p] == c).collect();
        terms.push(u);
        let tree = self.metric.steiner(&terms)?;
        let prev = self.prev.get(&c);
        let in_prev = |v: usize| prev.is_some_and(|p| p.tree.contains(v));
        let mut values: BTreeMap<usize, Gf2Vector> = BTreeMap::new();
        if let Some(p) = prev {
            for &v in &tree.vertices {
                if let Some(&g) = p.values.get(&v) {
                    values.insert(v, g);
                }
            }
        }
        let in_s = |v: usize| {
            in_prev(v) || v == u || tree.neighbors(v).len() >= 3 || terms.contains(&v)
        };
        let new_edge = |a: usize, b: usize| !prev.is_some_and(|p| p.tree.has_edge(a, b));

        // Split the new edges into segments between S-vertices.
        let mut used = BTreeSet::new();
        let mut segments = Vec::new();
        for &s in tree.vertices.iter().filter(|&&v| in_s(v)) {
            for first in tree.neighbors(s) {
                if !new_edge(s, first) || used.contains(&key(s, first)) {
                    continue;
                }
                let mut path = vec![s, first];
                used.insert(key(s, first));
                while !in_s(*path.last().unwrap()) {
                    let (x, back) = (path[path.len() - 1], path[path.len() - 2]);
                    let next = tree
                        .neighbors(x)
                        .into_iter()
                        .find(|&y| y != back)
                        .expect("interior segment vertices have degree 2");
                    used.insert(key(x, next));
                    path.push(next);
                }
                segments.push(Segment { vertices: path });
            }
        }
        let (short, long): (Vec<Segment>, Vec<Segment>) =
            segments.into_iter().partition(|s| s.len() < self.r);

        // Short segments: propagate by +b, seeding the least vertex with 0.
        let f_edges: Vec<(usize, usize)> = short
            .iter()
            .flat_map(|s| s.vertices.windows(2).map(|w| key(w[0], w[1])))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let f_vertices: BTreeSet<usize> = f_edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        let anchors = self.max_anchors(&f_edges, &f_vertices, &values);
        loop {
            let step = f_edges.iter().find_map(|&(x, y)| {
                match (values.get(&x), values.get(&y)) {
                    (Some(&gx), None) => Some((y, gx + self.edge_data(x, y).1)),
                    (None, Some(&gy)) => Some((x, gy + self.edge_data(x, y).1)),
                    _ => None,
                }
            });
            if let Some((v, g)) = step {
                values.insert(v, g);
            } else if let Some(&v) = f_vertices.iter().find(|v| !values.contains_key(v)) {
                values.insert(v, Gf2Vector::zero(self.m));
            } else {
                break;
            }
        }

        // Long segments, in rounds: extend between two defined ends, walk
        // out from one, or seed the least endpoint with 0.
        let mut pending: Vec<&Segment> = long.iter().collect();
        while !pending.is_empty() {
            let pos = pending
                .iter()
                .position(|s| {
                    values.contains_key(&s.vertices[0]) || values.contains_key(s.vertices.last().unwrap())
                });
            let Some(pos) = pos else {
                let s = pending[0];
                let end = s.vertices[0].min(*s.vertices.last().unwrap());
                values.insert(end, Gf2Vector::zero(self.m));
                continue;
            };
            let seg = pending.remove(pos);
            let mut vs = seg.vertices.clone();
            if !values.contains_key(&vs[0]) {
                vs.reverse();
            }
            let last = *vs.last().unwrap();
            let (zs, bs): (Vec<Gf2Subspace>, Vec<Gf2Vector>) = vs
                .windows(2)
                .map(|w| {
                    let (z, b) = self.edge_data(w[0], w[1]);
                    (z.clone(), b)
                })
                .unzip();
            if let Some(&g_end) = values.get(&last) {
                let fill = extend_along_path(values[&vs[0]], g_end, &zs, &bs).map_err(|e| match e {
                    Error::NotInSpan => violation(format!(
                        "path {}…{} does not span F_2^{}",
                        self.base.name(vs[0]),
                        self.base.name(last),
                        self.m
                    )),
                    other => other,
                })?;
                for (&v, g) in vs.iter().zip(fill) {
                    values.insert(v, g);
                }
            } else {
                for (i, w) in vs.windows(2).enumerate() {
                    let g = values[&w[0]] + bs[i];
                    values.insert(w[1], g);
                }
            }
        }
        for &v in &tree.vertices {
            values.entry(v).or_insert_with(|| Gf2Vector::zero(self.m));
        }
        Ok((TreeAssignment { tree, values }, anchors))
    }

    /// Most previously-defined vertices in any component of the short
    /// segments' edges.
    fn max_anchors(
        &self,
        edges: &[(usize, usize)],
        vertices: &BTreeSet<usize>,
        defined: &BTreeMap<usize, Gf2Vector>,
    ) -> usize {
        let index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in edges {
            let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
            parent[ra] = rb;
        }
        let mut count: HashMap<usize, usize> = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if defined.contains_key(v) {
                *count.entry(find(&mut parent, i)).or_default() += 1;
            }
        }
        count.values().copied().max().unwrap_or(0)
    }
}

impl Duplicator for TreeDuplicator {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn bijection(&mut self, view: &GameView<'_>) -> Result<Bijection> {
        let n = self.base.n();
        if view.a.num_vertices() != n || view.m() != self.m {
            return Err(Error::Precondition("instances do not match the random pair".into()));
        }
        self.checks.clear();
        if let Some(p) = view.last_placed {
            if let Some(t) = self.current.get(p.a.0) {
                self.prev.insert(self.comp[p.a.0], t.clone());
            }
        }
        let pebbled = view.pebbled_vertices();
        let mut current = Vec::with_capacity(n);
        let mut g = GStarMap::zero(n, self.m);
        let mut bad_edges = Vec::new();
        let mut moved = Vec::new();
        let mut crowded = Vec::new();
        for u in 0..n {
            let (t, anchors) = self.assign(u, &pebbled)?;
            g.set(u, t.values[&u]);
            if view.level >= AssertLevel::Edges {
                for &(x, y) in &t.tree.edges {
                    if !self.consistent(&t.values, x, y) {
                        bad_edges.push(format!(
                            "{}-{} in T({})",
                            self.base.name(x),
                            self.base.name(y),
                            self.base.name(u)
                        ));
                    }
                }
            }
            if view.level >= AssertLevel::Full {
                for p in view.placed() {
                    if t.values.get(&p.a.0).is_some_and(|&v| v != p.a.1 + p.b.1) {
                        moved.push(format!("{} in T({})", self.base.name(p.a.0), self.base.name(u)));
                    }
                }
                if anchors > 1 {
                    crowded.push(self.base.name(u).to_string());
                }
            }
            current.push(t);
        }
        self.current = current;
        let mut record = |name: &str, level: AssertLevel, bad: Vec<String>| {
            if view.level >= level {
                let ok = bad.is_empty();
                self.checks.push(CheckRecord::new(name, ok, (!ok).then(|| bad.join(", "))));
            }
        };
        record("tree-edges-consistent", AssertLevel::Edges, bad_edges);
        record("pebbles-unchanged", AssertLevel::Full, moved);
        record("short-segments-single-anchor", AssertLevel::Full, crowded);
        if let Some(c) = self.checks.iter().find(|c| !c.ok) {
            return Err(violation(format!(
                "{}: {}",
                c.name,
                c.detail.clone().unwrap_or_default()
            )));
        }
        Ok(Bijection::Shift(g))
    }

    fn last_checks(&self) -> Vec<CheckRecord> {
        self.checks.clone()
    }
}
