use std::f64::consts::PI;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constructions::SimpleGraph;
use crate::error::{Error, Result};
use crate::instances::ExactRatio;

use super::{Block, BlockKind, SdpInstance, SdpSolution, Sense, SparseSym};

/// A graph with a rational weight per edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    pub graph: SimpleGraph,
    pub weights: Vec<ExactRatio>,
}

impl WeightedGraph {
    pub fn new(graph: SimpleGraph, weights: Vec<ExactRatio>) -> Result<Self> {
        if weights.len() != graph.edges().len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edges().len()
            )));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn unit(graph: SimpleGraph) -> Self {
        let weights = vec![ExactRatio::from_integer(1.into()); graph.edges().len()];
        WeightedGraph { graph, weights }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn total_weight(&self) -> ExactRatio {
        self.weights.iter().fold(ExactRatio::zero(), |a, w| a + w)
    }

    /// Edges with f64 weights.
    pub fn edges_f64(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.graph
            .edges()
            .iter()
            .zip(&self.weights)
            .map(|(&(u, v), w)| (u, v, w.to_f64().unwrap_or(f64::NAN)))
    }

    /// Weight of edges whose endpoints lie on different sides.
    pub fn cut_value(&self, side: &[bool]) -> ExactRatio {
        self.graph
            .edges()
            .iter()
            .zip(&self.weights)
            .filter(|(&(u, v), _)| side[u] != side[v])
            .fold(ExactRatio::zero(), |a, (_, w)| a + w)
    }
}

/// max ½ Σ w_ij (1 − X_ij) s.t. X_ii = 1: objective entries −w/4 (each
/// counts twice under the trace product) and constant Σw/2.
pub fn build_maxcut_sdp(g: &WeightedGraph) -> SdpInstance {
    let n = g.n();
    let mut inst = SdpInstance::new(vec![Block {
        kind: BlockKind::Psd,
        size: n,
    }]);
    let mut total = 0.0;
    for (u, v, w) in g.edges_f64() {
        inst.objective.add(0, u, v, -w / 4.0);
        total += w;
    }
    inst.constant = total / 2.0;
    for i in 0..n {
        let mut a = SparseSym::new();
        a.add(0, i, i, 1.0);
        inst.add_constraint(a, 1.0, Sense::Eq);
    }
    inst
}

/// Exact maximum cut and one optimal side assignment (vertex 0 on `false`).
pub fn maxcut_brute(g: &WeightedGraph) -> Result<(ExactRatio, Vec<bool>)> {
    let n = g.n();
    if n > 30 {
        return Err(Error::SearchTooLarge(format!("MaxCut brute force on {n} vertices")));
    }
    if n == 0 {
        return Ok((ExactRatio::zero(), Vec::new()));
    }
    let mut best = (ExactRatio::zero(), vec![false; n]);
    let mut side = vec![false; n];
    for mask in 0u64..1 << (n - 1) {
        for (i, s) in side.iter_mut().enumerate().skip(1) {
            *s = (mask >> (i - 1)) & 1 == 1;
        }
        let c = g.cut_value(&side);
        if c > best.0 {
            best = (c, side.clone());
        }
    }
    Ok(best)
}

/// 2θ / (π (1 − cos θ)).
pub fn gw_objective(theta: f64) -> f64 {
    2.0 * theta / (PI * (1.0 - theta.cos()))
}

/// α_GW = min over θ ∈ (0, π] of [`gw_objective`], by golden-section search
/// to 1e−9 in θ. The function is unimodal on the bracket [0.5, π].
pub fn gw_alpha() -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.5, PI);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (gw_objective(c), gw_objective(d));
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gw_objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gw_objective(d);
        }
    }
    gw_objective((a + b) / 2.0)
}

fn gram_entry(sol: &SdpSolution, i: usize, j: usize) -> f64 {
    sol.blocks[0].entry(i, j).clamp(-1.0, 1.0)
}

/// (α_GW / 2) Σ w_ij (1 − X_ij): the symmetric, cut-free GW estimate.
pub fn gw_symmetric_value(sol: &SdpSolution, g: &WeightedGraph) -> f64 {
    let alpha = gw_alpha();
    g.edges_f64()
        .map(|(u, v, w)| alpha / 2.0 * w * (1.0 - sol.blocks[0].entry(u, v)))
        .sum()
}

/// Σ w_ij arccos(X_ij) / π, the exact mean of hyperplane rounding.
pub fn expected_cut(sol: &SdpSolution, g: &WeightedGraph) -> f64 {
    g.edges_f64()
        .map(|(u, v, w)| w * gram_entry(sol, u, v).acos() / PI)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundingStats {
    pub mean: f64,
    /// Sample standard deviation of one trial.
    pub std: f64,
    pub trials: usize,
}

impl RoundingStats {
    pub fn std_error(&self) -> f64 {
        self.std / (self.trials as f64).sqrt()
    }
}

/// Cuts by the sign of ⟨h, v_i⟩ for Gaussian h, `trials` times.
pub fn hyperplane_round<R: Rng + ?Sized>(
    sol: &SdpSolution,
    g: &WeightedGraph,
    rng: &mut R,
    trials: usize,
) -> Result<RoundingStats> {
    let v = sol
        .factor()
        .ok_or_else(|| Error::InvalidParameter("solution has no PSD factor".into()))?;
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    let edges: Vec<(usize, usize, f64)> = g.edges_f64().collect();
    let mut samples = Vec::with_capacity(trials);
    let mut h = nalgebra::DVector::<f64>::zeros(v.nrows());
    for _ in 0..trials {
        h.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
        let side: Vec<bool> = (0..v.ncols()).map(|i| v.column(i).dot(&h) >= 0.0).collect();
        samples.push(
            edges
                .iter()
                .filter(|&&(a, b, _)| side[a] != side[b])
                .map(|e| e.2)
                .sum::<f64>(),
        );
    }
    let mean = samples.iter().sum::<f64>() / trials as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    Ok(RoundingStats {
        mean,
        std: var.sqrt(),
        trials,
    })
}
