use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack subtracted before every ceiling and every `≥` test, so that a
/// quantity sitting exactly on an integer (up to float noise) is not pushed
/// one step up.
pub const GUARD_BAND: f64 = 1e-12;

/// Upper end of the upward scan for d.
const D_SCAN_LIMIT: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub d: u64,
    pub ell: u32,
    pub m: u32,
    pub r: u32,
    pub q: u128,
}

fn guarded_ceil(x: f64) -> f64 {
    (x - GUARD_BAND * x.abs().max(1.0)).ceil()
}

/// d ≥ (16/α²)(ln d + 2 + ln 2 − ln ε), with the guard band in favour of d.
pub fn d_inequality_holds(d: u64, alpha: f64, epsilon: f64) -> bool {
    let df = d as f64;
    let rhs = 16.0 / (alpha * alpha) * (df.ln() + 2.0 + 2f64.ln() - epsilon.ln());
    df >= rhs - GUARD_BAND * rhs.abs().max(1.0)
}

/// Smallest d ≥ 5 meeting both the d-inequality and d > 4/((1−2γ)α), then
/// ℓ, m, r, q from their ceiling formulas.
pub fn compute_params(alpha: f64, gamma: f64, epsilon: f64) -> Result<ParamSet> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("α = {alpha} outside (0, 1]")));
    }
    for (name, x) in [("γ", gamma), ("ε", epsilon)] {
        if !(x > 0.0 && x < 0.5) {
            return Err(Error::InvalidParameter(format!("{name} = {x} outside (0, 1/2)")));
        }
    }
    let strict = 4.0 / ((1.0 - 2.0 * gamma) * alpha);
    let mut d = 5u64;
    while !(d_inequality_holds(d, alpha, epsilon) && d as f64 > strict) {
        d += 1;
        if d > D_SCAN_LIMIT {
            return Err(Error::InvalidParameter(format!("no d below {D_SCAN_LIMIT} for α = {alpha}")));
        }
    }
    let df = d as f64;
    let ell = guarded_ceil(df.log2() + 2.0 * std::f64::consts::E.log2());
    let slack = (0.5 - gamma) * alpha - 2.0 / df;
    let m = guarded_ceil(ell - slack.log2());
    let r = guarded_ceil(m * 2f64.ln() - gamma.ln());
    if m > 127.0 {
        return Err(Error::InvalidParameter(format!("m = {m} overflows q")));
    }
    Ok(ParamSet {
        alpha,
        gamma,
        epsilon,
        d,
        ell: ell as u32,
        m: m as u32,
        r: r as u32,
        q: 1u128 << (m as u32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_alpha() {
        let p = compute_params(1.0, 0.25, 0.25).unwrap();
        assert_eq!((p.d, p.ell, p.m, p.r, p.q), (145, 11, 14, 12, 16384));
        assert!(!d_inequality_holds(144, 1.0, 0.25));
    }

    #[test]
    fn domain_checked() {
        assert!(compute_params(0.0, 0.25, 0.25).is_err());
        assert!(compute_params(1.0, 0.5, 0.25).is_err());
        assert!(compute_params(1.0, 0.25, 0.0).is_err());
    }

    #[test]
    fn d_monotone_in_alpha() {
        let ds: Vec<u64> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&a| compute_params(a, 0.25, 0.25).unwrap().d)
            .collect();
        assert!(ds.windows(2).all(|w| w[0] <= w[1]));
    }
}
