use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Undirected simple graph with named vertices. Edges are stored as `(u, v)`
/// with `u < v` in insertion order; edge ids index that list.
#[derive(Clone, Debug)]
pub struct SimpleGraph {
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl PartialEq for SimpleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for SimpleGraph {}

#[inline]
fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl SimpleGraph {
    pub fn empty() -> Self {
        SimpleGraph {
            names: Vec::new(),
            name_index: HashMap::new(),
            adj: Vec::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
        }
    }

    /// `n` vertices named by `prefix` followed by 0..n.
    pub fn with_vertices(n: usize, prefix: &str) -> Self {
        let mut g = SimpleGraph::empty();
        for i in 0..n {
            g.add_vertex(&format!("{prefix}{i}")).expect("fresh name");
        }
        g
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidParameter(format!("bad vertex name `{name}`")));
        }
        if let Some(&i) = self.name_index.get(name) {
            return Ok(i);
        }
        self.names.push(name.to_string());
        self.name_index.insert(name.to_string(), self.names.len() - 1);
        self.adj.push(Vec::new());
        Ok(self.names.len() - 1)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<usize> {
        if u == v {
            return Err(Error::InvalidParameter(format!("self-loop at {}", self.names[u])));
        }
        if u >= self.n() || v >= self.n() {
            return Err(Error::InvalidParameter("edge endpoint out of range".into()));
        }
        let k = key(u, v);
        if self.edge_index.contains_key(&k) {
            return Err(Error::InvalidParameter(format!(
                "multi-edge {}-{}",
                self.names[u], self.names[v]
            )));
        }
        self.edges.push(k);
        self.edge_index.insert(k, self.edges.len() - 1);
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a].partition_point(|&x| x < b);
            self.adj[a].insert(pos, b);
        }
        Ok(self.edges.len() - 1)
    }

    pub fn add_edge_by_name(&mut self, u: &str, v: &str) -> Result<usize> {
        let u = self.add_vertex(u)?;
        let v = self.add_vertex(v)?;
        self.add_edge(u, v)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&key(u, v)).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Common degree, if the graph is regular (and nonempty).
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first()?.len();
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// A proper 2-colouring (side per vertex), if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n()];
        for s in 0..self.n() {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                let sx = side[x].expect("queued vertices are coloured");
                for &y in &self.adj[x] {
                    match side[y] {
                        None => {
                            side[y] = Some(!sx);
                            queue.push_back(y);
                        }
                        Some(sy) if sy == sx => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap_or(false)).collect())
    }

    /// Component id per vertex, numbered by smallest member.
    pub fn component_ids(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut next = 0;
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.component_ids().iter().all(|&c| c == 0)
    }

    /// BFS distances from `s` (usize::MAX when unreachable) and parents, with
    /// ties broken towards the smallest neighbour index.
    pub fn bfs(&self, s: usize) -> (Vec<usize>, Vec<usize>) {
        let mut dist = vec![usize::MAX; self.n()];
        let mut parent = vec![usize::MAX; self.n()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        (dist, parent)
    }

    /// Length of a shortest cycle; `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let mut best = usize::MAX;
        for s in 0..self.n() {
            let mut dist = vec![usize::MAX; self.n()];
            let mut parent = vec![usize::MAX; self.n()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if 2 * dist[x] >= best {
                    break;
                }
                for &y in &self.adj[x] {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent[y] = x;
                        queue.push_back(y);
                    } else if parent[x] != y {
                        best = best.min(dist[x] + dist[y] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    /// Subgraph on the same vertices keeping the listed edge ids.
    pub fn edge_subgraph(&self, keep: &[usize]) -> SimpleGraph {
        let mut g = SimpleGraph::empty();
        for n in &self.names {
            g.add_vertex(n).expect("valid name");
        }
        for &e in keep {
            let (u, v) = self.edges[e];
            g.add_edge(u, v).expect("simple subgraph");
        }
        g
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("graph\n");
        for n in &self.names {
            writeln!(s, "v {n}").unwrap();
        }
        for &(u, v) in &self.edges {
            writeln!(s, "e {} {}", self.names[u], self.names[v]).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<SimpleGraph> {
        let mut g = SimpleGraph::empty();
        let mut header = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            let wrap = |e: Error| match e {
                Error::InvalidParameter(msg) => Error::parse(i + 1, msg),
                other => other,
            };
            match toks.as_slice() {
                [] => {}
                ["graph"] if !header => header = true,
                _ if !header => return Err(Error::parse(i + 1, "expected `graph` header")),
                ["v", name] => {
                    g.add_vertex(name).map_err(wrap)?;
                }
                ["e", u, v] => {
                    g.add_edge_by_name(u, v).map_err(wrap)?;
                }
                _ => {
                    return Err(Error::parse(
                        i + 1,
                        format!("unrecognized record `{}`", toks.join(" ")),
                    ))
                }
            }
        }
        if !header {
            return Err(Error::parse(1, "empty graph file"));
        }
        Ok(g)
    }
}

pub fn complete_graph(n: usize, prefix: &str) -> SimpleGraph {
    let mut g = SimpleGraph::with_vertices(n, prefix);
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(i, j).expect("simple");
        }
    }
    g
}

pub fn cycle_graph(n: usize) -> SimpleGraph {
    let mut g = SimpleGraph::with_vertices(n, "c");
    for i in 0..n {
        let j = (i + 1) % n;
        if g.edge_id(i, j).is_none() && i != j {
            g.add_edge(i, j).expect("simple");
        }
    }
    g
}

pub fn complete_bipartite(a: usize, b: usize) -> SimpleGraph {
    let mut g = SimpleGraph::empty();
    for i in 0..a {
        g.add_vertex(&format!("l{i}")).unwrap();
    }
    for j in 0..b {
        g.add_vertex(&format!("r{j}")).unwrap();
    }
    for i in 0..a {
        for j in 0..b {
            g.add_edge(i, a + j).unwrap();
        }
    }
    g
}

/// The Petersen graph: outer 5-cycle o0..o4, inner pentagram i0..i4, spokes.
pub fn petersen() -> SimpleGraph {
    let mut g = SimpleGraph::empty();
    for i in 0..5 {
        g.add_vertex(&format!("o{i}")).unwrap();
    }
    for i in 0..5 {
        g.add_vertex(&format!("i{i}")).unwrap();
    }
    for i in 0..5 {
        g.add_edge(i, (i + 1) % 5).unwrap();
        g.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
        g.add_edge(i, 5 + i).unwrap();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn girth_examples() {
        assert_eq!(petersen().girth(), Some(5));
        assert_eq!(complete_graph(4, "v").girth(), Some(3));
        assert_eq!(cycle_graph(7).girth(), Some(7));
        assert_eq!(complete_bipartite(3, 3).girth(), Some(4));
        let mut path = SimpleGraph::with_vertices(4, "p");
        for i in 0..3 {
            path.add_edge(i, i + 1).unwrap();
        }
        assert_eq!(path.girth(), None);
    }

    #[test]
    fn structure_queries() {
        let p = petersen();
        assert_eq!(p.regular_degree(), Some(3));
        assert_eq!(p.edges().len(), 15);
        assert!(p.bipartition().is_none());
        assert!(p.is_connected());
        assert!(complete_bipartite(2, 3).bipartition().is_some());
    }

    #[test]
    fn rejects_loops_and_multi_edges() {
        let mut g = SimpleGraph::with_vertices(2, "x");
        assert!(g.add_edge(0, 0).is_err());
        g.add_edge(0, 1).unwrap();
        assert!(g.add_edge(1, 0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = petersen();
        assert_eq!(SimpleGraph::parse(&g.to_text()).unwrap(), g);
        assert!(SimpleGraph::parse("v a\n").is_err());
    }
}
