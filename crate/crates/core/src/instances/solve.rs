//! Exact solvers: vertex-cover brute force, the spanning-tree oracle,
//! complete-satisfiability propagation and plain CSP enumeration.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;

use super::{Evaluation, ExactRatio, GroupUgInstance, PermUgInstance, WeightedCspInstance};

/// Cap on enumeration work (leaves visited or tree/choice pairs evaluated).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_leaves: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_leaves: 1 << 28,
        }
    }
}

/// Optimum and a witness attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult<L> {
    pub eval: Evaluation,
    pub witness: Vec<L>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspOpt {
    pub value: ExactRatio,
    pub witness: Vec<u32>,
}

fn too_large(what: &str, need: u128, budget: Budget) -> Error {
    Error::SearchTooLarge(format!(
        "{what} needs ~{need} leaves, budget is {}",
        budget.max_leaves
    ))
}

// ---------------------------------------------------------------------------
// Group instances: enumerate labels on a vertex cover, then every remaining
// vertex independently takes its best label.

/// Exact minimum vertex cover of a graph given as neighbor bitmasks (n <= 64).
fn min_vertex_cover(adj: &[u64]) -> Vec<usize> {
    fn edges_in(adj: &[u64], alive: u64) -> (u32, u32) {
        let mut twice = 0;
        let mut maxdeg = 0;
        for v in 0..adj.len() {
            if (alive >> v) & 1 == 1 {
                let d = (adj[v] & alive).count_ones();
                twice += d;
                maxdeg = maxdeg.max(d);
            }
        }
        (twice / 2, maxdeg)
    }

    fn rec(adj: &[u64], alive: u64, cover: u64, best: &mut u64) {
        let (edges, maxdeg) = edges_in(adj, alive);
        if edges == 0 {
            if cover.count_ones() < best.count_ones() {
                *best = cover;
            }
            return;
        }
        if cover.count_ones() + edges.div_ceil(maxdeg) >= best.count_ones() {
            return;
        }
        // A degree-1 vertex: taking its neighbour is always safe.
        for v in 0..adj.len() {
            if (alive >> v) & 1 == 1 && (adj[v] & alive).count_ones() == 1 {
                let w = (adj[v] & alive).trailing_zeros() as usize;
                rec(adj, alive & !(1 << w), cover | (1 << w), best);
                return;
            }
        }
        let v = (0..adj.len())
            .filter(|&v| (alive >> v) & 1 == 1)
            .max_by_key(|&v| ((adj[v] & alive).count_ones(), std::cmp::Reverse(v)))
            .expect("some vertex has an edge");
        rec(adj, alive & !(1 << v), cover | (1 << v), best);
        let nb = adj[v] & alive;
        rec(adj, alive & !nb & !(1 << v), cover | nb, best);
    }

    let n = adj.len();
    assert!(n <= 64);
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = all;
    rec(adj, all, 0, &mut best);
    (0..n).filter(|&v| (best >> v) & 1 == 1).collect()
}

/// Greedy max-degree cover for components too big for the exact search.
fn greedy_vertex_cover(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut covered = vec![false; n];
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut cover = Vec::new();
    loop {
        let Some(v) = (0..n)
            .filter(|&v| !covered[v] && deg[v] > 0)
            .max_by_key(|&v| (deg[v], std::cmp::Reverse(v)))
        else {
            break;
        };
        covered[v] = true;
        cover.push(v);
        for &w in &adj[v] {
            if !covered[w] {
                deg[w] -= 1;
            }
        }
        deg[v] = 0;
    }
    cover.sort_unstable();
    cover
}

struct ComponentSearch<'a> {
    q: usize,
    m: u32,
    fix_root: bool,
    cover: Vec<usize>,
    indep: Vec<usize>,
    /// For cover vertex t: (earlier cover position s, diffs).
    back: Vec<Vec<(usize, &'a [Gf2Vector])>>,
    /// For cover vertex t: (independent position i, diffs).
    to_indep: Vec<Vec<(usize, &'a [Gf2Vector])>>,
    /// Cover-cover bundles not yet decided at depth t.
    rem_cc: Vec<u64>,
    /// indep_rem[t][i]: bundles from indep i to cover vertices at depth >= t.
    indep_rem: Vec<Vec<u32>>,
    score: Vec<u32>,
    labels: Vec<u64>,
    best: i64,
    best_cover: Vec<u64>,
    best_indep: Vec<u64>,
}

impl ComponentSearch<'_> {
    fn indep_max(&self, i: usize) -> (u32, u64) {
        let row = &self.score[i * self.q..(i + 1) * self.q];
        let mut best = (row[0], 0u64);
        for (x, &s) in row.iter().enumerate().skip(1) {
            if s > best.0 {
                best = (s, x as u64);
            }
        }
        best
    }

    fn rec(&mut self, t: usize, cover_sat: u64) {
        let mut free: u64 = 0;
        for i in 0..self.indep.len() {
            free += self.indep_max(i).0 as u64;
        }
        if t == self.cover.len() {
            let total = (cover_sat + free) as i64;
            if total > self.best {
                self.best = total;
                self.best_cover = self.labels.clone();
                self.best_indep = (0..self.indep.len()).map(|i| self.indep_max(i).1).collect();
            }
            return;
        }
        let optimistic = cover_sat
            + self.rem_cc[t]
            + free
            + self.indep_rem[t].iter().map(|&x| x as u64).sum::<u64>();
        if (optimistic as i64) <= self.best {
            return;
        }
        let range = if t == 0 && self.fix_root { 1 } else { self.q };
        for g in 0..range as u64 {
            let gv = Gf2Vector::from_bits_masked(g, self.m);
            let mut sat = 0;
            for &(s, diffs) in &self.back[t] {
                let d = Gf2Vector::from_bits_masked(g ^ self.labels[s], self.m);
                if diffs.binary_search(&d).is_ok() {
                    sat += 1;
                }
            }
            for k in 0..self.to_indep[t].len() {
                let (i, diffs) = self.to_indep[t][k];
                for &z in diffs {
                    self.score[i * self.q + (gv + z).bits() as usize] += 1;
                }
            }
            self.labels[t] = g;
            self.rec(t + 1, cover_sat + sat);
            for k in 0..self.to_indep[t].len() {
                let (i, diffs) = self.to_indep[t][k];
                for &z in diffs {
                    self.score[i * self.q + (gv + z).bits() as usize] -= 1;
                }
            }
        }
    }
}

/// Exact optimum of a group instance. Labels are enumerated only on a
/// minimum vertex cover of each component; every other vertex then picks its
/// best label independently. With `fix_root`, one cover vertex per component
/// is pinned to 0, which is sound because adding a constant to every label of
/// a component preserves all x_u + x_v.
pub fn brute_force_opt(
    inst: &GroupUgInstance,
    fix_root: bool,
    budget: Budget,
) -> Result<OptResult<Gf2Vector>> {
    let m = inst.m();
    if m > 24 {
        return Err(Error::SearchTooLarge(format!("group F_2^{m} too large")));
    }
    let q = 1usize << m;
    let adj = inst.adjacency();
    let comps = inst.components();

    let mut plans = Vec::new();
    let mut need: u128 = 0;
    for comp in &comps {
        let local: std::collections::HashMap<usize, usize> =
            comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ladj: Vec<Vec<usize>> = comp
            .iter()
            .map(|&v| adj[v].iter().map(|w| local[w]).collect())
            .collect();
        let cover_local = if comp.len() <= 64 {
            let masks: Vec<u64> = ladj
                .iter()
                .map(|ns| ns.iter().fold(0u64, |acc, &w| acc | (1 << w)))
                .collect();
            min_vertex_cover(&masks)
        } else {
            greedy_vertex_cover(&ladj)
        };
        let cover: Vec<usize> = cover_local.iter().map(|&i| comp[i]).collect();
        let free_choices = cover.len().saturating_sub(usize::from(fix_root));
        let leaves = (q as u128)
            .checked_pow(free_choices as u32)
            .unwrap_or(u128::MAX);
        need = need.saturating_add(leaves);
        plans.push((comp.clone(), cover));
    }
    if need > budget.max_leaves as u128 {
        return Err(too_large("vertex-cover enumeration", need, budget));
    }

    let zero = Gf2Vector::zero(m);
    let mut witness = vec![zero; inst.num_vertices()];
    let mut total = 0u64;
    for (comp, cover) in plans {
        if cover.is_empty() {
            continue;
        }
        let in_cover: std::collections::HashMap<usize, usize> =
            cover.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let indep: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|v| !in_cover.contains_key(v))
            .collect();
        let indep_pos: std::collections::HashMap<usize, usize> =
            indep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let c = cover.len();
        let mut back = vec![Vec::new(); c];
        let mut to_indep = vec![Vec::new(); c];
        let mut cc_at = vec![0u64; c];
        let mut indep_at = vec![vec![0u32; indep.len()]; c];
        for b in inst.bundles() {
            match (in_cover.get(&b.u), in_cover.get(&b.v)) {
                (Some(&s), Some(&t)) => {
                    let (s, t) = if s < t { (s, t) } else { (t, s) };
                    back[t].push((s, b.diffs.as_slice()));
                    cc_at[t] += 1;
                }
                (Some(&t), None) => {
                    let i = indep_pos[&b.v];
                    to_indep[t].push((i, b.diffs.as_slice()));
                    indep_at[t][i] += 1;
                }
                (None, Some(&t)) => {
                    let i = indep_pos[&b.u];
                    to_indep[t].push((i, b.diffs.as_slice()));
                    indep_at[t][i] += 1;
                }
                (None, None) => {
                    // Either both endpoints lie outside this component, or
                    // the cover is not a cover.
                    debug_assert!(!comp.contains(&b.u));
                }
            }
        }
        let mut rem_cc = vec![0u64; c + 1];
        let mut indep_rem = vec![vec![0u32; indep.len()]; c + 1];
        for t in (0..c).rev() {
            rem_cc[t] = rem_cc[t + 1] + cc_at[t];
            for i in 0..indep.len() {
                indep_rem[t][i] = indep_rem[t + 1][i] + indep_at[t][i];
            }
        }
        let mut search = ComponentSearch {
            q,
            m,
            fix_root,
            cover: cover.clone(),
            indep: indep.clone(),
            back,
            to_indep,
            rem_cc,
            indep_rem,
            score: vec![0; indep.len() * q],
            labels: vec![0; c],
            best: -1,
            best_cover: Vec::new(),
            best_indep: Vec::new(),
        };
        search.rec(0, 0);
        total += search.best as u64;
        for (t, &v) in cover.iter().enumerate() {
            witness[v] = Gf2Vector::from_bits_masked(search.best_cover[t], m);
        }
        for (i, &v) in indep.iter().enumerate() {
            witness[v] = Gf2Vector::from_bits_masked(search.best_indep[i], m);
        }
    }
    debug_assert_eq!(inst.count_satisfied(&witness), total);
    Ok(OptResult {
        eval: Evaluation::new(total, inst.constraint_count()),
        witness,
    })
}

// ---------------------------------------------------------------------------
// Spanning-tree oracle.

struct RollbackUf {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl RollbackUf {
    fn new(n: usize) -> Self {
        RollbackUf {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.history.push((a, b));
        true
    }

    fn undo(&mut self) {
        let (a, b) = self.history.pop().expect("nothing to undo");
        self.parent[b] = b;
        self.size[a] -= self.size[b];
    }
}

struct TreeSearch<'a> {
    inst: &'a GroupUgInstance,
    n: usize,
    budget: Budget,
    work: u64,
    chosen: Vec<usize>,
    best: Option<(u64, Vec<Gf2Vector>)>,
}

impl TreeSearch<'_> {
    fn rec(&mut self, e: usize, uf: &mut RollbackUf) -> Result<()> {
        let edges = self.inst.bundles();
        if self.chosen.len() + 1 == self.n {
            return self.evaluate_tree();
        }
        if edges.len() - e < self.n - 1 - self.chosen.len() {
            return Ok(());
        }
        let b = &edges[e];
        if uf.union(b.u, b.v) {
            self.chosen.push(e);
            self.rec(e + 1, uf)?;
            self.chosen.pop();
            uf.undo();
        }
        self.rec(e + 1, uf)
    }

    fn evaluate_tree(&mut self) -> Result<()> {
        let inst = self.inst;
        let edges = inst.bundles();
        let mut tadj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
        for &e in &self.chosen {
            tadj[edges[e].u].push((edges[e].v, e));
            tadj[edges[e].v].push((edges[e].u, e));
        }
        // BFS order from vertex 0: (vertex, parent, tree edge).
        let mut order = vec![(0usize, usize::MAX, usize::MAX)];
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let (x, _, _) = order[i];
            for &(y, e) in &tadj[x] {
                if !seen[y] {
                    seen[y] = true;
                    order.push((y, x, e));
                }
            }
            i += 1;
        }
        let radix: Vec<usize> = order[1..].iter().map(|&(_, _, e)| edges[e].diffs.len()).collect();
        let combos: u128 = radix.iter().map(|&r| r as u128).product();
        self.work = self.work.saturating_add(combos.min(u64::MAX as u128) as u64);
        if self.work > self.budget.max_leaves {
            return Err(Error::SearchTooLarge(format!(
                "spanning-tree enumeration exceeded {} evaluations",
                self.budget.max_leaves
            )));
        }
        let zero = Gf2Vector::zero(inst.m());
        let mut digits = vec![0usize; radix.len()];
        let mut labels = vec![zero; self.n];
        loop {
            for (k, &(y, x, e)) in order[1..].iter().enumerate() {
                labels[y] = labels[x] + edges[e].diffs[digits[k]];
            }
            let sat = inst.count_satisfied(&labels);
            if self.best.as_ref().is_none_or(|(b, _)| sat > *b) {
                self.best = Some((sat, labels.clone()));
            }
            // Next mixed-radix choice.
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return Ok(());
                }
                digits[k] += 1;
                if digits[k] < radix[k] {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }
}

/// Exact optimum of a connected group instance by enumerating spanning trees
/// and one diff per tree edge, rooting x_0 = 0 and propagating.
pub fn spanning_tree_opt(inst: &GroupUgInstance, budget: Budget) -> Result<OptResult<Gf2Vector>> {
    let n = inst.num_vertices();
    if !inst.is_connected() {
        return Err(Error::Precondition(
            "spanning-tree oracle needs a connected instance".into(),
        ));
    }
    if n <= 1 {
        return Ok(OptResult {
            eval: Evaluation::new(0, inst.constraint_count()),
            witness: vec![Gf2Vector::zero(inst.m()); n],
        });
    }
    let mut search = TreeSearch {
        inst,
        n,
        budget,
        work: 0,
        chosen: Vec::new(),
        best: None,
    };
    let mut uf = RollbackUf::new(n);
    search.rec(0, &mut uf)?;
    let (best, witness) = search.best.expect("connected graph has a spanning tree");
    Ok(OptResult {
        eval: Evaluation::new(best, inst.constraint_count()),
        witness,
    })
}

// ---------------------------------------------------------------------------
// Permutation instances.

/// Whether every constraint can hold at once: per component, try each root
/// label and propagate the forced labels.
pub fn propagate_complete_sat(inst: &PermUgInstance) -> (bool, Option<Vec<u32>>) {
    let n = inst.num_vertices();
    let q = inst.q();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in inst.constraints().iter().enumerate() {
        touching[c.u].push(i);
        if c.v != c.u {
            touching[c.v].push(i);
        }
    }
    let inverse: Vec<Vec<u32>> = inst
        .constraints()
        .iter()
        .map(|c| {
            let mut inv = vec![0; c.perm.len()];
            for (j, &p) in c.perm.iter().enumerate() {
                inv[p as usize] = j as u32;
            }
            inv
        })
        .collect();

    let mut labels: Vec<Option<u32>> = vec![None; n];
    let mut done = vec![false; n];
    for root in 0..n {
        if done[root] {
            continue;
        }
        let mut solved = None;
        for r in 0..q {
            let mut local: Vec<(usize, u32)> = vec![(root, r)];
            let mut trial: std::collections::HashMap<usize, u32> = [(root, r)].into();
            let mut i = 0;
            while i < local.len() {
                let (x, lx) = local[i];
                for &ci in &touching[x] {
                    let c = &inst.constraints()[ci];
                    let (y, ly) = if c.u == x {
                        (c.v, inverse[ci][lx as usize])
                    } else {
                        (c.u, c.perm[lx as usize])
                    };
                    if let std::collections::hash_map::Entry::Vacant(e) = trial.entry(y) {
                        e.insert(ly);
                        local.push((y, ly));
                    }
                }
                i += 1;
            }
            let ok = local.iter().all(|&(x, _)| {
                touching[x].iter().all(|&ci| {
                    let c = &inst.constraints()[ci];
                    trial[&c.u] == c.perm[trial[&c.v] as usize]
                })
            });
            if solved.is_none() {
                // Remember the component even if unsatisfiable.
                for &(x, _) in &local {
                    done[x] = true;
                }
            }
            if ok {
                solved = Some(local);
                break;
            }
        }
        match solved {
            Some(local) => {
                for (x, l) in local {
                    labels[x] = Some(l);
                }
            }
            None => return (false, None),
        }
    }
    (true, Some(labels.into_iter().map(|l| l.unwrap_or(0)).collect()))
}

fn odometer(labels: &mut [u32], q: u32) -> bool {
    for l in labels.iter_mut() {
        *l += 1;
        if *l < q {
            return true;
        }
        *l = 0;
    }
    false
}

fn check_space(q: u32, n: usize, budget: Budget, what: &str) -> Result<()> {
    let need = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if need > budget.max_leaves as u128 {
        return Err(too_large(what, need, budget));
    }
    Ok(())
}

/// Plain enumeration over [q]^V.
pub fn perm_brute_opt(inst: &PermUgInstance, budget: Budget) -> Result<OptResult<u32>> {
    check_space(inst.q(), inst.num_vertices(), budget, "permutation brute force")?;
    let mut labels = vec![0u32; inst.num_vertices()];
    let mut best = (inst.count_satisfied(&labels), labels.clone());
    while odometer(&mut labels, inst.q()) {
        let s = inst.count_satisfied(&labels);
        if s > best.0 {
            best = (s, labels.clone());
        }
    }
    Ok(OptResult {
        eval: Evaluation::new(best.0, inst.constraint_count()),
        witness: best.1,
    })
}

/// Exact maximum weighted value over [q]^V.
pub fn csp_brute_opt(inst: &WeightedCspInstance, budget: Budget) -> Result<CspOpt> {
    check_space(inst.q(), inst.num_variables(), budget, "CSP brute force")?;
    let mut labels = vec![0u32; inst.num_variables()];
    let mut best = CspOpt {
        value: inst.value(&labels),
        witness: labels.clone(),
    };
    while odometer(&mut labels, inst.q()) {
        let v = inst.value(&labels);
        if v > best.value {
            best = CspOpt {
                value: v,
                witness: labels.clone(),
            };
        }
    }
    if inst.applications().is_empty() {
        debug_assert!(best.value.is_zero());
    }
    Ok(best)
}
