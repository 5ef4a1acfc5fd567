//! SDP instances in block form, a low-rank (Burer–Monteiro) solver, the
//! MaxCut / Goemans–Williamson pipeline and the LC relaxation of a CSP.
//!
//! Inner products follow the trace convention ⟨A, X⟩ = Σ_ij A_ij X_ij;
//! sparse matrices store the upper triangle only, so an off-diagonal entry
//! counts twice.

mod lc;
mod maxcut;
mod sdpa;
mod solver;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

pub use lc::{build_lc_relaxation, gap_curve_estimate, GapEntry, GapTable, LC_SIZE_LIMIT};
pub use maxcut::{
    build_maxcut_sdp, expected_cut, gw_alpha, gw_objective, gw_symmetric_value, hyperplane_round,
    maxcut_brute, RoundingStats, WeightedGraph,
};
pub use sdpa::{parse_sdpa, write_sdpa};
pub use solver::{solve_sdp_lowrank, SolverOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    /// Dense PSD block, factored as VᵀV.
    Psd,
    /// Nonnegative diagonal block; off-diagonal entries are identically 0.
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub size: usize,
}

/// Upper-triangle entries `(block, i, j, value)` with `i <= j`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SparseSym {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at (i, j) and its mirror; repeated positions accumulate.
    pub fn add(&mut self, block: usize, i: usize, j: usize, value: f64) {
        let (i, j) = (i.min(j), i.max(j));
        match self
            .entries
            .iter_mut()
            .find(|e| (e.0, e.1, e.2) == (block, i, j))
        {
            Some(e) => e.3 += value,
            None => self.entries.push((block, i, j, value)),
        }
    }

    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Eq,
    Le,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub a: SparseSym,
    pub b: f64,
    pub sense: Sense,
}

/// Maximize ⟨C, X⟩ + constant subject to ⟨A_k, X⟩ (= or ≤) b_k, X ⪰ 0
/// block-diagonal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpInstance {
    pub blocks: Vec<Block>,
    pub objective: SparseSym,
    pub constant: f64,
    pub constraints: Vec<Constraint>,
}

impl SdpInstance {
    pub fn new(blocks: Vec<Block>) -> Self {
        SdpInstance {
            blocks,
            objective: SparseSym::new(),
            constant: 0.0,
            constraints: Vec::new(),
        }
    }

    /// Total matrix dimension.
    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn add_constraint(&mut self, a: SparseSym, b: f64, sense: Sense) {
        self.constraints.push(Constraint { a, b, sense });
    }

    pub fn validate(&self) -> Result<()> {
        let mats = std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.a));
        for m in mats {
            for &(blk, i, j, v) in m.entries() {
                let size = self
                    .blocks
                    .get(blk)
                    .ok_or_else(|| Error::InvalidParameter(format!("block {blk} out of range")))?
                    .size;
                if j >= size || i > j || !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({blk}, {i}, {j}) = {v} invalid for block size {size}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// One PSD block whose constraints are exactly X_ii = 1 for every i.
    pub fn is_maxcut_form(&self) -> bool {
        let [Block {
            kind: BlockKind::Psd,
            size,
        }] = self.blocks[..]
        else {
            return false;
        };
        let mut seen = vec![false; size];
        self.constraints.len() == size
            && self.constraints.iter().all(|c| match c.a.entries() {
                &[(0, i, j, v)] if i == j && v == 1.0 && c.b == 1.0 && c.sense == Sense::Eq => {
                    !std::mem::replace(&mut seen[i], true)
                }
                _ => false,
            })
    }
}

/// Values of one block at a solution.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockValue {
    /// Columns are the vectors v_i; X = VᵀV.
    Factor(DMatrix<f64>),
    Diagonal(Vec<f64>),
}

impl BlockValue {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            BlockValue::Factor(v) => v.column(i).dot(&v.column(j)),
            BlockValue::Diagonal(d) if i == j => d[i],
            BlockValue::Diagonal(_) => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub blocks: Vec<BlockValue>,
    /// ⟨C, X⟩ + constant.
    pub value: f64,
    /// Largest constraint violation.
    pub residual: f64,
    /// Best minus worst value over restarts.
    pub spread: f64,
    pub restarts: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpReport {
    pub value: f64,
    pub residual: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl SdpSolution {
    /// The factor of the first PSD block.
    pub fn factor(&self) -> Option<&DMatrix<f64>> {
        self.blocks.iter().find_map(|b| match b {
            BlockValue::Factor(v) => Some(v),
            BlockValue::Diagonal(_) => None,
        })
    }

    /// Gram matrix of the first PSD block.
    pub fn gram(&self) -> Option<DMatrix<f64>> {
        self.factor().map(|v| v.transpose() * v)
    }

    /// Smallest eigenvalue over the PSD blocks' Gram matrices and the
    /// diagonal blocks' entries.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| match b {
                BlockValue::Factor(v) => SymmetricEigen::new(v.transpose() * v).eigenvalues.min(),
                BlockValue::Diagonal(d) => d.iter().copied().fold(f64::INFINITY, f64::min),
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn report(&self) -> SdpReport {
        SdpReport {
            value: self.value,
            residual: self.residual,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

/// ⟨A, X⟩ at a solution.
pub fn inner(a: &SparseSym, blocks: &[BlockValue]) -> f64 {
    a.entries()
        .iter()
        .map(|&(blk, i, j, v)| {
            let x = blocks[blk].entry(i, j);
            if i == j {
                v * x
            } else {
                2.0 * v * x
            }
        })
        .sum()
}

/// Objective value and largest violation of `blocks` for `inst`.
pub fn evaluate(inst: &SdpInstance, blocks: &[BlockValue]) -> (f64, f64) {
    let value = inner(&inst.objective, blocks) + inst.constant;
    let residual = inst
        .constraints
        .iter()
        .map(|c| {
            let g = inner(&c.a, blocks) - c.b;
            match c.sense {
                Sense::Eq => g.abs(),
                Sense::Le => g.max(0.0),
            }
        })
        .fold(0.0, f64::max);
    (value, residual)
}
