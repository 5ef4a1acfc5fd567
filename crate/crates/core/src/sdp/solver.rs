use std::cell::RefCell;
use std::rc::Rc;

use argmin::core::{CostFunction, Executor, Gradient};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{evaluate, BlockKind, BlockValue, SdpInstance, SdpSolution, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Feasibility tolerance on the largest constraint violation.
    pub tol: f64,
    pub restarts: usize,
    /// Factor rank; by default ⌈√(2m)⌉ + 1 capped at the block size, with m
    /// the constraint count.
    pub rank: Option<usize>,
    /// Augmented-Lagrangian rounds.
    pub max_outer: usize,
    /// L-BFGS iterations per round.
    pub max_inner: u64,
    /// Coordinate sweeps for MaxCut-form instances.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            restarts: 5,
            rank: None,
            max_outer: 60,
            max_inner: 3000,
            max_sweeps: 20_000,
        }
    }
}

/// Coefficient on X_ij, with the off-diagonal factor 2 folded in.
#[derive(Clone, Copy, Debug)]
struct Term {
    blk: usize,
    i: usize,
    j: usize,
    coef: f64,
}

fn compile(inst: &SdpInstance, m: &super::SparseSym) -> Vec<Term> {
    m.entries()
        .iter()
        .filter(|&&(blk, i, j, _)| i == j || inst.blocks[blk].kind == BlockKind::Psd)
        .map(|&(blk, i, j, v)| Term {
            blk,
            i,
            j,
            coef: if i == j { v } else { 2.0 * v },
        })
        .collect()
}

/// Offsets of each block's variables in the flat parameter vector.
#[derive(Clone, Debug)]
struct Layout {
    kinds: Vec<BlockKind>,
    sizes: Vec<usize>,
    ranks: Vec<usize>,
    offsets: Vec<usize>,
    len: usize,
}

impl Layout {
    fn new(inst: &SdpInstance, rank: usize) -> Self {
        let mut offsets = Vec::new();
        let mut ranks = Vec::new();
        let mut len = 0;
        for b in &inst.blocks {
            offsets.push(len);
            let p = match b.kind {
                BlockKind::Psd => rank.min(b.size).max(1),
                BlockKind::Diagonal => 1,
            };
            ranks.push(p);
            len += p * b.size;
        }
        Layout {
            kinds: inst.blocks.iter().map(|b| b.kind).collect(),
            sizes: inst.blocks.iter().map(|b| b.size).collect(),
            ranks,
            offsets,
            len,
        }
    }

    #[inline]
    fn col(&self, blk: usize, i: usize) -> std::ops::Range<usize> {
        let p = self.ranks[blk];
        let start = self.offsets[blk] + i * p;
        start..start + p
    }

    /// X_ij of a term.
    #[inline]
    fn entry(&self, x: &[f64], t: &Term) -> f64 {
        match self.kinds[t.blk] {
            BlockKind::Psd => {
                let (a, b) = (self.col(t.blk, t.i), self.col(t.blk, t.j));
                x[a].iter().zip(&x[b]).map(|(u, v)| u * v).sum()
            }
            BlockKind::Diagonal => {
                let y = x[self.offsets[t.blk] + t.i];
                y * y
            }
        }
    }

    /// Adds `scale · ∂X_ij/∂x` for one term.
    #[inline]
    fn add_grad(&self, x: &[f64], t: &Term, scale: f64, grad: &mut [f64]) {
        let c = scale * t.coef;
        match self.kinds[t.blk] {
            BlockKind::Psd => {
                let (a, b) = (self.col(t.blk, t.i), self.col(t.blk, t.j));
                if t.i == t.j {
                    for k in a {
                        grad[k] += 2.0 * c * x[k];
                    }
                } else {
                    for (ka, kb) in a.zip(b) {
                        grad[ka] += c * x[kb];
                        grad[kb] += c * x[ka];
                    }
                }
            }
            BlockKind::Diagonal => {
                let k = self.offsets[t.blk] + t.i;
                grad[k] += 2.0 * c * x[k];
            }
        }
    }

    fn blocks(&self, x: &[f64]) -> Vec<BlockValue> {
        (0..self.kinds.len())
            .map(|blk| {
                let (p, s, o) = (self.ranks[blk], self.sizes[blk], self.offsets[blk]);
                match self.kinds[blk] {
                    BlockKind::Psd => BlockValue::Factor(DMatrix::from_column_slice(p, s, &x[o..o + p * s])),
                    BlockKind::Diagonal => BlockValue::Diagonal(x[o..o + s].iter().map(|y| y * y).collect()),
                }
            })
            .collect()
    }

    fn random<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for blk in 0..self.kinds.len() {
            match self.kinds[blk] {
                BlockKind::Psd => {
                    let scale = 1.0 / (self.ranks[blk] as f64).sqrt();
                    for i in 0..self.sizes[blk] {
                        for k in self.col(blk, i) {
                            x[k] *= scale;
                        }
                    }
                }
                BlockKind::Diagonal => {
                    let o = self.offsets[blk];
                    for k in o..o + self.sizes[blk] {
                        x[k] = 0.5 + 0.25 * x[k].tanh();
                    }
                }
            }
        }
        x
    }
}

struct Compiled {
    layout: Layout,
    objective: Vec<Term>,
    constraints: Vec<(Vec<Term>, f64, Sense)>,
}

impl Compiled {
    fn value_of(&self, x: &[f64], terms: &[Term]) -> f64 {
        terms.iter().map(|t| t.coef * self.layout.entry(x, t)).sum()
    }
}

/// L(x) = −⟨C, X⟩ + augmented-Lagrangian penalty.
struct Augmented {
    model: Rc<Compiled>,
    lambda: Vec<f64>,
    rho: f64,
    best: Rc<RefCell<(f64, Vec<f64>)>>,
    /// Remaining cost/gradient evaluations this round; line searches that
    /// stall would otherwise never return.
    evals: std::cell::Cell<u64>,
}

impl Augmented {
    fn charge(&self) -> std::result::Result<(), argmin::core::Error> {
        match self.evals.get() {
            0 => Err(argmin::core::Error::msg("evaluation budget exhausted")),
            n => {
                self.evals.set(n - 1);
                Ok(())
            }
        }
    }

    fn eval(&self, x: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let m = &self.model;
        let mut grad = if want_grad { vec![0.0; x.len()] } else { Vec::new() };
        let mut f = -m.value_of(x, &m.objective);
        if want_grad {
            for t in &m.objective {
                m.layout.add_grad(x, t, -1.0, &mut grad);
            }
        }
        for (k, (terms, b, sense)) in m.constraints.iter().enumerate() {
            let g = m.value_of(x, terms) - b;
            let (lam, rho) = (self.lambda[k], self.rho);
            let mult = match sense {
                Sense::Eq => {
                    f += lam * g + 0.5 * rho * g * g;
                    lam + rho * g
                }
                Sense::Le => {
                    let s = (lam + rho * g).max(0.0);
                    f += (s * s - lam * lam) / (2.0 * rho);
                    s
                }
            };
            if want_grad && mult != 0.0 {
                for t in terms {
                    m.layout.add_grad(x, t, mult, &mut grad);
                }
            }
        }
        (f, grad)
    }
}

impl CostFunction for Augmented {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        self.charge()?;
        let (f, _) = self.eval(x, false);
        if !f.is_finite() {
            return Err(argmin::core::Error::msg("non-finite augmented Lagrangian"));
        }
        let mut best = self.best.borrow_mut();
        if f < best.0 {
            *best = (f, x.clone());
        }
        Ok(f)
    }
}

impl Gradient for Augmented {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, x: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        self.charge()?;
        let g = self.eval(x, true).1;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(argmin::core::Error::msg("non-finite gradient"));
        }
        Ok(g)
    }
}

fn run_alm(model: &Rc<Compiled>, mut x: Vec<f64>, opts: &SolverOptions) -> Vec<f64> {
    let mut lambda = vec![0.0; model.constraints.len()];
    let mut rho = 10.0;
    let mut prev = f64::INFINITY;
    for _ in 0..opts.max_outer {
        let best = Rc::new(RefCell::new((f64::INFINITY, x.clone())));
        let problem = Augmented {
            model: Rc::clone(model),
            lambda: lambda.clone(),
            rho,
            best: Rc::clone(&best),
            evals: std::cell::Cell::new(20 * opts.max_inner),
        };
        let solver = LBFGS::new(MoreThuenteLineSearch::new(), 10)
            .with_tolerance_grad(1e-10)
            .and_then(|s| s.with_tolerance_cost(0.0))
            .expect("valid tolerances");
        let run = Executor::new(problem, solver)
            .configure(|s| s.param(x.clone()).max_iters(opts.max_inner))
            .run();
        x = match run {
            Ok(r) => r
                .state
                .best_param
                .clone()
                .unwrap_or_else(|| best.borrow().1.clone()),
            // A failed line search leaves the best point seen so far.
            Err(_) => best.borrow().1.clone(),
        };
        let mut residual: f64 = 0.0;
        for (k, (terms, b, sense)) in model.constraints.iter().enumerate() {
            let g = model.value_of(&x, terms) - b;
            match sense {
                Sense::Eq => {
                    lambda[k] += rho * g;
                    residual = residual.max(g.abs());
                }
                Sense::Le => {
                    lambda[k] = (lambda[k] + rho * g).max(0.0);
                    residual = residual.max(g.max(0.0));
                }
            }
        }
        if residual <= opts.tol * 0.1 {
            break;
        }
        if residual > 0.25 * prev {
            rho = (rho * 5.0).min(1e9);
        }
        prev = residual;
    }
    x
}

/// Block-coordinate ascent on unit vectors for max ⟨C, VᵀV⟩ s.t. ‖v_i‖ = 1.
fn run_mixing(inst: &SdpInstance, layout: &Layout, mut x: Vec<f64>, opts: &SolverOptions) -> Vec<f64> {
    let n = layout.sizes[0];
    let p = layout.ranks[0];
    let mut nbrs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(_, i, j, v) in inst.objective.entries() {
        if i != j {
            nbrs[i].push((j, v));
            nbrs[j].push((i, v));
        }
    }
    let normalize = |v: &mut [f64]| {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|a| *a /= norm);
        }
    };
    for i in 0..n {
        normalize(&mut x[i * p..(i + 1) * p]);
    }
    let objective = |x: &[f64]| -> f64 {
        nbrs.iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, c)| (i, j, c)))
            .map(|(i, j, c)| c * (0..p).map(|k| x[i * p + k] * x[j * p + k]).sum::<f64>())
            .sum()
    };
    let mut last = objective(&x);
    let mut g = vec![0.0; p];
    for _ in 0..opts.max_sweeps {
        for i in 0..n {
            g.iter_mut().for_each(|a| *a = 0.0);
            for &(j, c) in &nbrs[i] {
                for k in 0..p {
                    g[k] += c * x[j * p + k];
                }
            }
            let norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-300 {
                for k in 0..p {
                    x[i * p + k] = g[k] / norm;
                }
            }
        }
        let now = objective(&x);
        if (now - last).abs() <= 1e-14 * last.abs().max(1.0) {
            break;
        }
        last = now;
    }
    x
}

/// Low-rank solve with `opts.restarts` random starts seeded from `seed`.
/// Returns the best feasible restart; `spread` is the value range across
/// feasible restarts. No feasible restart → `Error::Convergence`.
pub fn solve_sdp_lowrank(inst: &SdpInstance, opts: &SolverOptions, seed: u64) -> Result<SdpSolution> {
    inst.validate()?;
    if opts.restarts == 0 || !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("need restarts ≥ 1 and tol > 0".into()));
    }
    let maxcut = inst.is_maxcut_form();
    let m = inst.constraints.len().max(1);
    let rank = opts.rank.unwrap_or_else(|| (2.0 * m as f64).sqrt().ceil() as usize + 1);
    let layout = Layout::new(inst, rank);
    let model = Rc::new(Compiled {
        layout: layout.clone(),
        objective: compile(inst, &inst.objective),
        constraints: inst
            .constraints
            .iter()
            .map(|c| (compile(inst, &c.a), c.b, c.sense))
            .collect(),
    });
    let mut runs: Vec<SdpSolution> = Vec::with_capacity(opts.restarts);
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let x0 = layout.random(&mut rng);
        let x = if maxcut {
            run_mixing(inst, &layout, x0, opts)
        } else {
            run_alm(&model, x0, opts)
        };
        let blocks = layout.blocks(&x);
        let (value, residual) = evaluate(inst, &blocks);
        log::debug!("restart {r}: value {value:.9}, residual {residual:.2e}");
        runs.push(SdpSolution {
            blocks,
            value,
            residual,
            spread: 0.0,
            restarts: opts.restarts,
            seed,
        });
    }
    let feasible: Vec<&SdpSolution> = runs
        .iter()
        .filter(|s| s.residual <= opts.tol && s.value.is_finite())
        .collect();
    let Some(best) = feasible
        .iter()
        .copied()
        .max_by(|a, b| a.value.total_cmp(&b.value))
    else {
        let best = runs
            .into_iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .expect("at least one restart");
        return Err(Error::Convergence { best: Box::new(best) });
    };
    let worst = feasible.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let mut out = best.clone();
    out.spread = best.value - worst;
    Ok(out)
}
