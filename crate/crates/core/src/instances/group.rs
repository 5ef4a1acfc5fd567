use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;

use super::{Assignment, Evaluation};

/// All constraints x_u + x_v = z between one vertex pair. `u < v`, diffs
/// sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub u: usize,
    pub v: usize,
    pub diffs: Vec<Gf2Vector>,
}

impl Bundle {
    pub fn allows(&self, d: Gf2Vector) -> bool {
        self.diffs.binary_search(&d).is_ok()
    }
}

/// Group Unique Games over F_2^m. Each `(u, v, z)` triple is one constraint.
#[derive(Clone, Debug)]
pub struct GroupUgInstance {
    m: u32,
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    bundles: Vec<Bundle>,
    lookup: HashMap<(usize, usize), usize>,
}

impl PartialEq for GroupUgInstance {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.names == other.names && self.bundles == other.bundles
    }
}

impl Eq for GroupUgInstance {}

#[inline]
fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl GroupUgInstance {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > crate::gf2::MAX_DIM {
            return Err(Error::InvalidParameter(format!("group dimension {m}")));
        }
        Ok(GroupUgInstance {
            m,
            names: Vec::new(),
            name_index: HashMap::new(),
            bundles: Vec::new(),
            lookup: HashMap::new(),
        })
    }

    /// Instance on vertices named by `names`, no bundles yet.
    pub fn with_vertices<S: AsRef<str>>(m: u32, names: &[S]) -> Result<Self> {
        let mut inst = GroupUgInstance::new(m)?;
        for n in names {
            inst.add_vertex(n.as_ref())?;
        }
        Ok(inst)
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
        Ok(self.names.len() - 1)
    }

    /// Adds constraints x_u + x_v = z for each z; merges with an existing
    /// bundle on the same pair.
    pub fn add_bundle(&mut self, u: usize, v: usize, diffs: &[Gf2Vector]) -> Result<()> {
        if u == v {
            return Err(Error::InvalidParameter(format!(
                "self-loop bundle on `{}`",
                self.names.get(u).map(String::as_str).unwrap_or("?")
            )));
        }
        if u >= self.names.len() || v >= self.names.len() {
            return Err(Error::InvalidParameter("bundle endpoint out of range".into()));
        }
        if diffs.is_empty() {
            return Err(Error::InvalidParameter("empty bundle".into()));
        }
        if let Some(z) = diffs.iter().find(|z| z.dim() != self.m) {
            return Err(Error::InvalidParameter(format!(
                "diff of dimension {} in instance over F_2^{}",
                z.dim(),
                self.m
            )));
        }
        let k = key(u, v);
        let idx = match self.lookup.get(&k) {
            Some(&i) => i,
            None => {
                self.bundles.push(Bundle {
                    u: k.0,
                    v: k.1,
                    diffs: Vec::new(),
                });
                self.lookup.insert(k, self.bundles.len() - 1);
                self.bundles.len() - 1
            }
        };
        let b = &mut self.bundles[idx];
        b.diffs.extend_from_slice(diffs);
        b.diffs.sort();
        b.diffs.dedup();
        Ok(())
    }

    pub fn add_bundle_by_name(&mut self, u: &str, v: &str, diffs: &[Gf2Vector]) -> Result<()> {
        let u = self.add_vertex(u)?;
        let v = self.add_vertex(v)?;
        self.add_bundle(u, v, diffs)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle_between(&self, u: usize, v: usize) -> Option<&Bundle> {
        self.lookup.get(&key(u, v)).map(|&i| &self.bundles[i])
    }

    pub fn constraint_count(&self) -> u64 {
        self.bundles.iter().map(|b| b.diffs.len() as u64).sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.names.len()];
        for b in &self.bundles {
            adj[b.u].push(b.v);
            adj[b.v].push(b.u);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }

    /// Connected components of the constraint graph, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; adj.len()];
        let mut out = Vec::new();
        for s in 0..adj.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// True when every bundle holds a single constraint.
    pub fn is_simple(&self) -> bool {
        self.bundles.iter().all(|b| b.diffs.len() == 1)
    }

    /// Satisfied constraints under a total labelling (no checks).
    pub fn count_satisfied(&self, labels: &[Gf2Vector]) -> u64 {
        self.bundles
            .iter()
            .filter(|b| b.allows(labels[b.u] + labels[b.v]))
            .count() as u64
    }

    pub fn evaluate(&self, assignment: &Assignment<Gf2Vector>) -> Result<Evaluation> {
        let labels = assignment.require_total(&self.names)?;
        if let Some(l) = labels.iter().find(|l| l.dim() != self.m) {
            return Err(Error::InvalidParameter(format!(
                "label {l} has dimension {}, expected {}",
                l.dim(),
                self.m
            )));
        }
        Ok(Evaluation::new(
            self.count_satisfied(&labels),
            self.constraint_count(),
        ))
    }

    /// Same vertex set and m, every bundle replaced by `{0}`.
    pub fn identity_like(&self) -> GroupUgInstance {
        let mut out = GroupUgInstance::with_vertices(self.m, &self.names).expect("valid names");
        let zero = Gf2Vector::zero(self.m);
        for b in &self.bundles {
            out.add_bundle(b.u, b.v, &[zero]).expect("valid bundle");
        }
        out
    }

    /// Keeps only bundles whose pair satisfies `keep`; vertices are kept.
    pub fn restrict(&self, mut keep: impl FnMut(usize, usize) -> bool) -> GroupUgInstance {
        let mut out = GroupUgInstance::with_vertices(self.m, &self.names).expect("valid names");
        for b in &self.bundles {
            if keep(b.u, b.v) {
                out.add_bundle(b.u, b.v, &b.diffs).expect("valid bundle");
            }
        }
        out
    }
}

/// Size caps for materializing G(U).
#[derive(Clone, Copy, Debug)]
pub struct LiftLimits {
    pub max_vertices: u64,
    pub max_constraints: u64,
}

impl Default for LiftLimits {
    fn default() -> Self {
        LiftLimits {
            max_vertices: 1 << 12,
            max_constraints: 1 << 22,
        }
    }
}

/// Name of lifted vertex (v, g): `<v>@<hex g>`.
pub fn lifted_name(base: &GroupUgInstance, v: usize, g: Gf2Vector) -> String {
    format!("{}@{}", base.vertex_name(v), g.to_hex())
}

/// The label-lifted instance G(U): vertices (v, g), and for every base
/// constraint x_u + x_v = z and all g1, g2 the constraint
/// x_(u,g1) + x_(v,g2) = z + g1 + g2. Lifted vertex (v, g) gets index
/// v * 2^m + g.
pub fn label_lift(base: &GroupUgInstance, limits: LiftLimits) -> Result<GroupUgInstance> {
    let m = base.m();
    if m >= 32 {
        return Err(Error::SizeLimit(format!("m = {m} too large to lift")));
    }
    let q = 1u64 << m;
    let nv = base.num_vertices() as u64 * q;
    let nc = base.constraint_count() * q * q;
    if nv > limits.max_vertices || nc > limits.max_constraints {
        return Err(Error::SizeLimit(format!(
            "lift has {nv} vertices / {nc} constraints (caps {} / {})",
            limits.max_vertices, limits.max_constraints
        )));
    }
    let mut out = GroupUgInstance::new(m)?;
    for v in 0..base.num_vertices() {
        for g in Gf2Vector::all(m) {
            out.add_vertex(&lifted_name(base, v, g))?;
        }
    }
    let idx = |v: usize, g: Gf2Vector| v * q as usize + g.bits() as usize;
    let mut shifted = Vec::new();
    for b in base.bundles() {
        for g1 in Gf2Vector::all(m) {
            for g2 in Gf2Vector::all(m) {
                shifted.clear();
                shifted.extend(b.diffs.iter().map(|&z| z + g1 + g2));
                out.add_bundle(idx(b.u, g1), idx(b.v, g2), &shifted)?;
            }
        }
    }
    Ok(out)
}

/// The diff set G(U) carries between lifted vertices `a` and `b`, without
/// materializing the lift. Empty when the base has no bundle on the pair.
pub fn lifted_allowed_diffs(
    base: &GroupUgInstance,
    a: (usize, Gf2Vector),
    b: (usize, Gf2Vector),
) -> Vec<Gf2Vector> {
    match base.bundle_between(a.0, b.0) {
        Some(bundle) if a.0 != b.0 => {
            let shift = a.1 + b.1;
            let mut out: Vec<Gf2Vector> = bundle.diffs.iter().map(|&z| z + shift).collect();
            out.sort();
            out
        }
        _ => Vec::new(),
    }
}
