use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::solve::{csp_brute_opt, Budget};
use crate::instances::{Normalization, WeightedCspInstance};

use super::{solve_sdp_lowrank, Block, BlockKind, SdpInstance, Sense, SolverOptions, SparseSym};

/// Cap on the LC index set |V|·q + Σ_P q^{|V(P)|}.
pub const LC_SIZE_LIMIT: usize = 4096;

/// The LC relaxation. Block 0 is indexed by (i, a) ↦ i·q + a and holds
/// ⟨b_{i,a}, b_{j,b}⟩; block 1 is diagonal with one entry μ_P(f) per
/// constraint P and local assignment f of its distinct variables. For every
/// P, every i ≤ j in V(P) and labels a, b:
/// ⟨b_{i,a}, b_{j,b}⟩ = Σ_{f(i)=a, f(j)=b} μ_P(f); and Σ_f μ_P(f) = 1.
pub fn build_lc_relaxation(csp: &WeightedCspInstance) -> Result<SdpInstance> {
    let q = csp.q() as usize;
    let n = csp.num_variables();
    let locals: Vec<Vec<usize>> = csp
        .applications()
        .iter()
        .map(|a| {
            let mut seen = Vec::new();
            for &v in &a.vars {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
            seen
        })
        .collect();
    let mut size = n.saturating_mul(q);
    let mut offsets = Vec::with_capacity(locals.len());
    let mut mu = 0usize;
    for l in &locals {
        let count = u32::try_from(l.len())
            .ok()
            .and_then(|k| q.checked_pow(k))
            .unwrap_or(usize::MAX);
        offsets.push(mu);
        mu = mu.saturating_add(count);
        size = size.saturating_add(count);
    }
    if size > LC_SIZE_LIMIT {
        return Err(Error::SizeLimit(format!(
            "LC index set has {size} entries (limit {LC_SIZE_LIMIT})"
        )));
    }
    let mut inst = SdpInstance::new(vec![
        Block {
            kind: BlockKind::Psd,
            size: n * q,
        },
        Block {
            kind: BlockKind::Diagonal,
            size: mu,
        },
    ]);
    for (p, app) in csp.applications().iter().enumerate() {
        let vars = &locals[p];
        let k = vars.len();
        let w = app.weight.to_f64().unwrap_or(f64::NAN);
        let assignments: Vec<Vec<u32>> = (0..q.pow(k as u32))
            .map(|mut idx| {
                let mut f = vec![0u32; k];
                for t in (0..k).rev() {
                    f[t] = (idx % q) as u32;
                    idx /= q;
                }
                f
            })
            .collect();
        let label_of = |f: &[u32], v: usize| f[vars.iter().position(|&x| x == v).expect("local")];
        let mut norm = SparseSym::new();
        for (fi, f) in assignments.iter().enumerate() {
            let slot = offsets[p] + fi;
            norm.add(1, slot, slot, 1.0);
            let labels: Vec<u32> = app.vars.iter().map(|&v| label_of(f, v)).collect();
            if csp.ctypes()[app.ctype].sat.contains(&labels) {
                inst.objective.add(1, slot, slot, w);
            }
        }
        inst.add_constraint(norm, 1.0, Sense::Eq);
        for s in 0..k {
            for t in s..k {
                for a in 0..q as u32 {
                    for b in 0..q as u32 {
                        if s == t && b < a {
                            continue;
                        }
                        let (i, j) = (vars[s], vars[t]);
                        let (x, y) = (i * q + a as usize, j * q + b as usize);
                        let mut c = SparseSym::new();
                        c.add(0, x, y, if x == y { 1.0 } else { 0.5 });
                        for (fi, f) in assignments.iter().enumerate() {
                            if f[s] == a && f[t] == b {
                                let slot = offsets[p] + fi;
                                c.add(1, slot, slot, -1.0);
                            }
                        }
                        inst.add_constraint(c, 0.0, Sense::Eq);
                    }
                }
            }
        }
    }
    Ok(inst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapEntry {
    pub sdp: f64,
    pub opt: f64,
}

/// Points (sdp(I), opt(I)) sorted by sdp value, with the lookup
/// Θ(c) = max{opt(I) : sdp(I) < c} − η (−∞ when no entry qualifies).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapTable {
    pub eta: f64,
    pub entries: Vec<GapEntry>,
    /// (c, Θ(c)) at the requested grid points.
    pub grid: Vec<(f64, f64)>,
}

impl GapTable {
    pub fn new(mut entries: Vec<GapEntry>, eta: f64, grid: &[f64]) -> Self {
        entries.sort_by(|a, b| a.sdp.total_cmp(&b.sdp).then(a.opt.total_cmp(&b.opt)));
        let mut t = GapTable {
            eta,
            entries,
            grid: Vec::new(),
        };
        t.grid = grid.iter().map(|&c| (c, t.lookup(c))).collect();
        t
    }

    pub fn lookup(&self, c: f64) -> f64 {
        self.entries
            .iter()
            .take_while(|e| e.sdp < c)
            .map(|e| e.opt)
            .fold(f64::NEG_INFINITY, f64::max)
            - self.eta
    }
}

/// Normalizes each family member, solves its LC relaxation and brute-forces
/// its optimum, then tabulates the lookup on `grid`.
pub fn gap_curve_estimate(
    family: &[WeightedCspInstance],
    eta: f64,
    grid: &[f64],
    how: Normalization,
    opts: &SolverOptions,
    seed: u64,
) -> Result<GapTable> {
    let mut entries = Vec::with_capacity(family.len());
    for (i, inst) in family.iter().enumerate() {
        let (norm, _) = inst.normalized(how);
        let sdp = solve_sdp_lowrank(&build_lc_relaxation(&norm)?, opts, seed.wrapping_add(i as u64))?;
        let opt = csp_brute_opt(&norm, Budget::default())?;
        entries.push(GapEntry {
            sdp: sdp.value,
            opt: opt.value.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(GapTable::new(entries, eta, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ratio;
    use std::collections::BTreeSet;

    #[test]
    fn unary_constraint() {
        let mut c = WeightedCspInstance::new(2).unwrap();
        let x = c.add_variable("x").unwrap();
        let t = c.add_ctype("one", 1, [vec![1]].into_iter().collect()).unwrap();
        c.add_application(t, vec![x], ratio(3, 4)).unwrap();
        let lc = build_lc_relaxation(&c).unwrap();
        assert_eq!(lc.n(), 4);
        let sol = solve_sdp_lowrank(&lc, &SolverOptions::default(), 0).unwrap();
        assert!((sol.value - 0.75).abs() < 1e-5, "{}", sol.value);
        assert!(sol.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn even_cycle_is_fully_satisfiable() {
        let mut c = WeightedCspInstance::new(2).unwrap();
        let cut: BTreeSet<Vec<u32>> = [vec![0, 1], vec![1, 0]].into_iter().collect();
        let t = c.add_ctype("cut", 2, cut).unwrap();
        let vs: Vec<usize> = (0..4).map(|i| c.add_variable(&format!("x{i}")).unwrap()).collect();
        for i in 0..4 {
            c.add_application(t, vec![vs[i], vs[(i + 1) % 4]], ratio(1, 1)).unwrap();
        }
        let (norm, _) = c.normalized(Normalization::Weight);
        let sol = solve_sdp_lowrank(&build_lc_relaxation(&norm).unwrap(), &SolverOptions::default(), 3).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-4, "{}", sol.value);
    }

    #[test]
    fn singleton_table() {
        let t = GapTable::new(vec![GapEntry { sdp: 0.8, opt: 0.6 }], 0.01, &[0.5, 0.9]);
        assert_eq!(t.lookup(0.8), f64::NEG_INFINITY);
        assert!((t.lookup(0.81) - 0.59).abs() < 1e-15);
        assert_eq!(t.grid[0].1, f64::NEG_INFINITY);
    }
}
