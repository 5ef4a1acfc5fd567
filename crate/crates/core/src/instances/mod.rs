//! UG / CSP instance model, exact evaluation and the label lift.

mod csp;
mod group;
pub mod io;
mod perm;
pub mod solve;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use csp::{Application, ConstraintType, Normalization, WeightedCspInstance};
pub use group::{label_lift, lifted_allowed_diffs, Bundle, GroupUgInstance, LiftLimits};
pub use perm::{PermConstraint, PermUgInstance};

/// Exact reduced rational with arbitrary-precision parts.
pub type ExactRatio = BigRational;

pub fn ratio(num: i64, den: i64) -> ExactRatio {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical `p/q` rendering (integers print without a denominator).
pub fn ratio_to_string(r: &ExactRatio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<ExactRatio> {
    let bad = || Error::InvalidParameter(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// A (possibly partial) labelling indexed by vertex position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<L> {
    labels: Vec<Option<L>>,
}

impl<L: Clone> Assignment<L> {
    pub fn empty(n: usize) -> Self {
        Assignment {
            labels: vec![None; n],
        }
    }

    pub fn total(labels: Vec<L>) -> Self {
        Assignment {
            labels: labels.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn set(&mut self, v: usize, label: L) {
        self.labels[v] = Some(label);
    }

    pub fn get(&self, v: usize) -> Option<&L> {
        self.labels.get(v).and_then(|l| l.as_ref())
    }

    /// Labels for every vertex, or the first missing vertex name.
    pub fn require_total(&self, names: &[String]) -> Result<Vec<L>> {
        names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                self.get(i)
                    .cloned()
                    .ok_or_else(|| Error::IncompleteAssignment(name.clone()))
            })
            .collect()
    }
}

/// Satisfied count over total constraints. Zero-constraint instances are
/// reported as fraction 1 with `vacuous` set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub satisfied: u64,
    pub total: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub fraction: ExactRatio,
    pub vacuous: bool,
}

impl Evaluation {
    pub fn new(satisfied: u64, total: u64) -> Self {
        if total == 0 {
            Evaluation {
                satisfied,
                total,
                fraction: ExactRatio::one(),
                vacuous: true,
            }
        } else {
            Evaluation {
                satisfied,
                total,
                fraction: BigRational::new(BigInt::from(satisfied), BigInt::from(total)),
                vacuous: false,
            }
        }
    }
}

pub(crate) fn ser_ratio<S: serde::Serializer>(
    r: &ExactRatio,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_to_string(r))
}
