use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf2::{Gf2Vector, MAX_DIM};
use crate::instances::{ExactRatio, GroupUgInstance};

/// Least integer n > max{1, 2/δ}.
pub fn unsat_size(delta: &ExactRatio) -> Result<usize> {
    if *delta <= ExactRatio::zero() || *delta >= ExactRatio::one() {
        return Err(Error::InvalidParameter(format!("δ = {delta} must lie in (0, 1)")));
    }
    let two = ExactRatio::from_integer(2.into());
    let t = std::cmp::max(ExactRatio::one(), two / delta);
    let n: num_bigint::BigInt = t.numer().div_floor(t.denom()) + 1;
    n.to_usize()
        .ok_or_else(|| Error::InvalidParameter(format!("δ = {delta} is too small")))
}

/// Complete graph K_n with a distinct standard-basis vector on every edge:
/// any cycle of constraints is unsatisfiable, so a spanning tree (n − 1
/// constraints) is the best possible.
pub fn unsat_complete_graph(delta: &ExactRatio) -> Result<GroupUgInstance> {
    let n = unsat_size(delta)?;
    let m = n * (n - 1) / 2;
    if m > MAX_DIM as usize {
        return Err(Error::InvalidParameter(format!(
            "δ = {delta} needs n = {n}, dimension {m} > {MAX_DIM}"
        )));
    }
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut inst = GroupUgInstance::with_vertices(m as u32, &names)?;
    let mut next = 0;
    for i in 0..n {
        for j in i + 1..n {
            inst.add_bundle(i, j, &[Gf2Vector::unit(next, m as u32)?])?;
            next += 1;
        }
    }
    Ok(inst)
}
