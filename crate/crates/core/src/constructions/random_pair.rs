use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{random_subspace, Gf2Subspace, Gf2Vector};
use crate::instances::GroupUgInstance;

use super::{ParamSet, SimpleGraph};

/// Parameters actually used to build a pair. Theorem-scale values come from
/// [`ParamSet`]; desk runs set them directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairParams {
    pub d: usize,
    pub ell: u32,
    pub m: u32,
    pub r: u32,
    /// Pebble count the girth bound (k+1)²r is computed for.
    pub k: usize,
    /// Accept base graphs with girth ≤ r (path counts then deviate).
    pub girth_override: bool,
}

impl PairParams {
    pub fn from_params(p: &ParamSet, k: usize) -> Result<Self> {
        let d = usize::try_from(p.d).map_err(|_| Error::InvalidParameter("d too large".into()))?;
        Ok(PairParams {
            d,
            ell: p.ell,
            m: p.m,
            r: p.r,
            k,
            girth_override: false,
        })
    }

    pub fn girth_required(&self) -> usize {
        (self.k + 1) * (self.k + 1) * self.r as usize
    }
}

/// Random F_2^m pair. Per edge e: Z(e) a uniform rank-ℓ subspace and b(e) a
/// uniform vector. Ũ1 carries Z(e), Ũ2 carries Z(e) + b(e); U1, U2 keep
/// only good edges (vertices are always kept).
#[derive(Clone, Debug)]
pub struct RandomPair {
    pub params: PairParams,
    pub base: SimpleGraph,
    pub z: Vec<Gf2Subspace>,
    pub b: Vec<Gf2Vector>,
    pub good: Vec<bool>,
    pub u1_full: GroupUgInstance,
    pub u2_full: GroupUgInstance,
    pub u1: GroupUgInstance,
    pub u2: GroupUgInstance,
    pub girth: Option<usize>,
}

impl RandomPair {
    pub fn girth_ok(&self) -> bool {
        self.girth.is_none_or(|g| g >= self.params.girth_required())
    }

    pub fn good_count(&self) -> usize {
        self.good.iter().filter(|&&g| g).count()
    }

    /// Sub-graph of good edges.
    pub fn good_graph(&self) -> SimpleGraph {
        let keep: Vec<usize> = (0..self.good.len()).filter(|&e| self.good[e]).collect();
        self.base.edge_subgraph(&keep)
    }

    pub fn sidecar(&self, seed: u64) -> PairSidecar {
        PairSidecar {
            params: self.params,
            seed,
            girth: self.girth,
            girth_required: self.params.girth_required(),
            vertices: self.base.names().to_vec(),
            edges: self
                .base
                .edges()
                .iter()
                .enumerate()
                .map(|(e, &(u, v))| SidecarEdge {
                    u: self.base.name(u).to_string(),
                    v: self.base.name(v).to_string(),
                    z: self.z[e].basis(),
                    b: self.b[e],
                    good: self.good[e],
                })
                .collect(),
        }
    }

    /// Rebuilds the pair recorded in a sidecar; the good/bad partition is
    /// recomputed and must agree with the recorded one.
    pub fn from_sidecar(s: &PairSidecar) -> Result<RandomPair> {
        let mut base = SimpleGraph::empty();
        for v in &s.vertices {
            base.add_vertex(v)?;
        }
        let mut z = Vec::new();
        let mut b = Vec::new();
        for e in &s.edges {
            base.add_edge_by_name(&e.u, &e.v)?;
            let sub = Gf2Subspace::span_of(&e.z, s.params.m)?;
            if sub.rank() != s.params.ell as usize || e.b.dim() != s.params.m {
                return Err(Error::InvalidParameter(format!(
                    "edge {}-{}: subspace rank or vector dimension mismatch",
                    e.u, e.v
                )));
            }
            z.push(sub);
            b.push(e.b);
        }
        let pair = assemble(s.params, base, z, b)?;
        let recorded: Vec<bool> = s.edges.iter().map(|e| e.good).collect();
        if recorded != pair.good {
            return Err(Error::InvalidParameter(
                "recorded good-edge partition disagrees with recomputation".into(),
            ));
        }
        Ok(pair)
    }
}

/// JSON record of a random pair: parameters, seed and per-edge data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSidecar {
    pub params: PairParams,
    pub seed: u64,
    pub girth: Option<usize>,
    pub girth_required: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<SidecarEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidecarEdge {
    pub u: String,
    pub v: String,
    pub z: Vec<Gf2Vector>,
    pub b: Gf2Vector,
    pub good: bool,
}

pub fn random_inapprox_pair<R: Rng + ?Sized>(
    params: &PairParams,
    base: &SimpleGraph,
    rng: &mut R,
) -> Result<RandomPair> {
    if params.ell > params.m {
        return Err(Error::InvalidParameter(format!(
            "ℓ = {} exceeds m = {}",
            params.ell, params.m
        )));
    }
    if base.regular_degree() != Some(params.d) {
        return Err(Error::Precondition(format!("base graph is not {}-regular", params.d)));
    }
    let mut z = Vec::with_capacity(base.edges().len());
    let mut b = Vec::with_capacity(base.edges().len());
    for _ in base.edges() {
        z.push(random_subspace(params.m, params.ell, rng)?);
        b.push(Gf2Vector::random(params.m, rng));
    }
    assemble(*params, base.clone(), z, b)
}

fn assemble(
    params: PairParams,
    base: SimpleGraph,
    z: Vec<Gf2Subspace>,
    b: Vec<Gf2Vector>,
) -> Result<RandomPair> {
    let girth = base.girth();
    let required = params.girth_required();
    if girth.is_some_and(|g| g < required) {
        log::warn!(
            "base girth {} is below (k+1)²r = {required}; Duplicator guarantees do not apply",
            girth.unwrap_or(0)
        );
    }
    if girth.is_some_and(|g| g <= params.r as usize) && !params.girth_override {
        return Err(Error::Precondition(format!(
            "girth {} ≤ r = {}; pass the girth override to continue",
            girth.unwrap_or(0),
            params.r
        )));
    }
    let good = good_edges(&base, &z, params.r as usize, params.m);
    let mut u1_full = GroupUgInstance::with_vertices(params.m, base.names())?;
    let mut u2_full = u1_full.clone();
    for (e, &(u, v)) in base.edges().iter().enumerate() {
        let elems = z[e].elements();
        let shifted: Vec<Gf2Vector> = elems.iter().map(|&x| x + b[e]).collect();
        u1_full.add_bundle(u, v, &elems)?;
        u2_full.add_bundle(u, v, &shifted)?;
    }
    let keep = |u: usize, v: usize| good[base.edge_id(u, v).expect("base edge")];
    let u1 = u1_full.restrict(keep);
    let u2 = u2_full.restrict(keep);
    Ok(RandomPair {
        params,
        base,
        z,
        b,
        good,
        u1_full,
        u2_full,
        u1,
        u2,
        girth,
    })
}

/// Calls `visit` with the edge ids of every simple path of `r` edges that
/// contains edge `e`, until it returns false. Paths are grown outward from
/// `e`: first a edges beyond its first endpoint, then r−1−a beyond the
/// second, so every path is produced once.
fn for_each_path(g: &SimpleGraph, e: usize, r: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if r == 0 {
        return;
    }
    let (u, v) = g.edges()[e];
    let mut on_path = vec![false; g.n()];
    on_path[u] = true;
    on_path[v] = true;
    let mut edges = vec![e];

    struct Walk<'a, F> {
        g: &'a SimpleGraph,
        on_path: Vec<bool>,
        edges: Vec<usize>,
        visit: F,
    }

    impl<F: FnMut(&[usize]) -> bool> Walk<'_, F> {
        // Returns false once the visitor asks to stop.
        fn grow(&mut self, left: usize, left_n: usize, right: usize, right_n: usize) -> bool {
            if left_n == 0 && right_n == 0 {
                return (self.visit)(&self.edges);
            }
            let (end, rest_left) = if left_n > 0 { (left, true) } else { (right, false) };
            for i in 0..self.g.neighbors(end).len() {
                let w = self.g.neighbors(end)[i];
                if self.on_path[w] {
                    continue;
                }
                self.on_path[w] = true;
                self.edges.push(self.g.edge_id(end, w).expect("adjacent"));
                let go_on = if rest_left {
                    self.grow(w, left_n - 1, right, right_n)
                } else {
                    self.grow(left, 0, w, right_n - 1)
                };
                self.edges.pop();
                self.on_path[w] = false;
                if !go_on {
                    return false;
                }
            }
            true
        }
    }

    let mut walk = Walk {
        g,
        on_path: std::mem::take(&mut on_path),
        edges: std::mem::take(&mut edges),
        visit: &mut visit,
    };
    for a in 0..r {
        if !walk.grow(u, a, v, r - 1 - a) {
            return;
        }
    }
}

/// All simple paths of `r` edges through `e`, as edge-id lists.
pub fn paths_through_edge(g: &SimpleGraph, e: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_path(g, e, r, |p| {
        out.push(p.to_vec());
        true
    });
    out
}

/// Edge e is good iff the subspaces along every simple r-edge path through
/// e together span F_2^m.
pub fn good_edges(base: &SimpleGraph, z: &[Gf2Subspace], r: usize, m: u32) -> Vec<bool> {
    (0..base.edges().len())
        .map(|e| {
            let mut good = true;
            for_each_path(base, e, r, |p| {
                let mut span = Gf2Subspace::zero(m).expect("valid dimension");
                'fill: for &f in p {
                    for x in z[f].basis() {
                        span.insert(x);
                        if span.is_full() {
                            break 'fill;
                        }
                    }
                }
                good = span.is_full();
                good
            });
            good
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::petersen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn desk(ell: u32, m: u32, r: u32) -> PairParams {
        PairParams {
            d: 3,
            ell,
            m,
            r,
            k: 2,
            girth_override: true,
        }
    }

    #[test]
    fn petersen_path_counts() {
        let p = petersen();
        for (r, want) in [(1, 1), (2, 4), (3, 12), (4, 32)] {
            for e in 0..p.edges().len() {
                let paths = paths_through_edge(&p, e, r);
                assert_eq!(paths.len(), want, "r = {r}");
                let mut sorted: Vec<Vec<usize>> = paths
                    .iter()
                    .map(|q| {
                        let mut q = q.clone();
                        q.sort();
                        q
                    })
                    .collect();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), want);
            }
        }
    }

    #[test]
    fn trivial_goodness() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let full = random_inapprox_pair(&desk(3, 3, 3), &petersen(), &mut rng).unwrap();
        assert!(full.good.iter().all(|&g| g));
        assert_eq!(full.u1, full.u1_full);
        let none = random_inapprox_pair(&desk(1, 4, 3), &petersen(), &mut rng).unwrap();
        assert!(none.good.iter().all(|&g| !g));
        assert_eq!(none.u1.constraint_count(), 0);
    }

    #[test]
    fn lowest_girth_needs_override() {
        let mut p = desk(2, 3, 5);
        p.girth_override = false;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            random_inapprox_pair(&p, &petersen(), &mut rng),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sidecar_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pair = random_inapprox_pair(&desk(2, 3, 3), &petersen(), &mut rng).unwrap();
        let s = pair.sidecar(3);
        let json = serde_json::to_string(&s).unwrap();
        let back: PairSidecar = serde_json::from_str(&json).unwrap();
        let again = RandomPair::from_sidecar(&back).unwrap();
        assert_eq!(again.u2_full, pair.u2_full);
        assert_eq!(again.good, pair.good);
    }
}
