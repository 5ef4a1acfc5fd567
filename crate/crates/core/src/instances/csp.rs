use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{Assignment, ExactRatio};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintType {
    pub id: String,
    pub arity: usize,
    pub sat: BTreeSet<Vec<u32>>,
}

/// One weighted use of a constraint type on a variable tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub ctype: usize,
    pub vars: Vec<usize>,
    pub weight: ExactRatio,
}

/// How `normalized` rescales weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// Divide by the sum of absolute weights.
    #[default]
    Weight,
    /// Divide by the number of applications.
    Count,
}

/// Weighted CSP over domain [q]. Repeated applications of the same type to
/// the same tuple are merged at load time by summing their weights.
#[derive(Clone, Debug)]
pub struct WeightedCspInstance {
    q: u32,
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    ctypes: Vec<ConstraintType>,
    applications: Vec<Application>,
    app_index: HashMap<(usize, Vec<usize>), usize>,
}

impl PartialEq for WeightedCspInstance {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
            && self.names == other.names
            && self.ctypes == other.ctypes
            && self.applications == other.applications
    }
}

impl Eq for WeightedCspInstance {}

impl WeightedCspInstance {
    pub fn new(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("domain must be nonempty".into()));
        }
        Ok(WeightedCspInstance {
            q,
            names: Vec::new(),
            name_index: HashMap::new(),
            ctypes: Vec::new(),
            applications: Vec::new(),
            app_index: HashMap::new(),
        })
    }

    pub fn add_variable(&mut self, name: &str) -> Result<usize> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidParameter(format!("bad variable name `{name}`")));
        }
        if let Some(&i) = self.name_index.get(name) {
            return Ok(i);
        }
        self.names.push(name.to_string());
        self.name_index.insert(name.to_string(), self.names.len() - 1);
        Ok(self.names.len() - 1)
    }

    pub fn add_ctype(&mut self, id: &str, arity: usize, sat: BTreeSet<Vec<u32>>) -> Result<usize> {
        if self.ctypes.iter().any(|c| c.id == id) {
            return Err(Error::InvalidParameter(format!("duplicate ctype `{id}`")));
        }
        if arity == 0 {
            return Err(Error::InvalidParameter("arity must be positive".into()));
        }
        for t in &sat {
            if t.len() != arity || t.iter().any(|&x| x >= self.q) {
                return Err(Error::InvalidParameter(format!(
                    "tuple {t:?} invalid for arity {arity}, q = {}",
                    self.q
                )));
            }
        }
        self.ctypes.push(ConstraintType {
            id: id.to_string(),
            arity,
            sat,
        });
        Ok(self.ctypes.len() - 1)
    }

    pub fn ctype_index(&self, id: &str) -> Option<usize> {
        self.ctypes.iter().position(|c| c.id == id)
    }

    pub fn add_application(&mut self, ctype: usize, vars: Vec<usize>, weight: ExactRatio) -> Result<()> {
        let ct = self
            .ctypes
            .get(ctype)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown ctype #{ctype}")))?;
        if vars.len() != ct.arity {
            return Err(Error::InvalidParameter(format!(
                "ctype `{}` has arity {}, got {} variables",
                ct.id,
                ct.arity,
                vars.len()
            )));
        }
        if vars.iter().any(|&v| v >= self.names.len()) {
            return Err(Error::InvalidParameter("variable out of range".into()));
        }
        match self.app_index.get(&(ctype, vars.clone())) {
            Some(&i) => {
                let w = &mut self.applications[i].weight;
                *w = &*w + weight;
            }
            None => {
                self.app_index
                    .insert((ctype, vars.clone()), self.applications.len());
                self.applications.push(Application {
                    ctype,
                    vars,
                    weight,
                });
            }
        }
        Ok(())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn ctypes(&self) -> &[ConstraintType] {
        &self.ctypes
    }

    pub fn applications(&self) -> &[Application] {
        &self.applications
    }

    /// Whether application `a` is satisfied by `labels`.
    #[inline]
    pub fn satisfied(&self, a: &Application, labels: &[u32]) -> bool {
        let tuple: Vec<u32> = a.vars.iter().map(|&v| labels[v]).collect();
        self.ctypes[a.ctype].sat.contains(&tuple)
    }

    pub fn value(&self, labels: &[u32]) -> ExactRatio {
        let mut total = ExactRatio::zero();
        for a in &self.applications {
            if self.satisfied(a, labels) {
                total += &a.weight;
            }
        }
        total
    }

    pub fn evaluate(&self, assignment: &Assignment<u32>) -> Result<ExactRatio> {
        let labels = assignment.require_total(&self.names)?;
        if let Some(l) = labels.iter().find(|&&l| l >= self.q) {
            return Err(Error::InvalidParameter(format!("label {l} outside [{}]", self.q)));
        }
        Ok(self.value(&labels))
    }

    pub fn total_weight(&self) -> ExactRatio {
        self.applications
            .iter()
            .fold(ExactRatio::zero(), |acc, a| acc + &a.weight)
    }

    pub fn abs_weight_sum(&self) -> ExactRatio {
        self.applications
            .iter()
            .fold(ExactRatio::zero(), |acc, a| acc + a.weight.abs())
    }

    /// Total weight lies in [-1, 1].
    pub fn is_normalized(&self) -> bool {
        self.total_weight().abs() <= ExactRatio::one()
    }

    /// Rescaled copy and the factor applied to every weight.
    pub fn normalized(&self, how: Normalization) -> (WeightedCspInstance, ExactRatio) {
        let scale = match how {
            Normalization::Weight => {
                let s = self.abs_weight_sum();
                if s.is_zero() {
                    ExactRatio::one()
                } else {
                    s.recip()
                }
            }
            Normalization::Count => {
                if self.applications.is_empty() {
                    ExactRatio::one()
                } else {
                    ExactRatio::new(BigInt::one(), BigInt::from(self.applications.len()))
                }
            }
        };
        let mut out = self.clone();
        for a in out.applications.iter_mut() {
            a.weight = &a.weight * &scale;
        }
        (out, scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ratio;

    fn cut_type() -> BTreeSet<Vec<u32>> {
        [vec![0, 1], vec![1, 0]].into_iter().collect()
    }

    #[test]
    fn duplicates_sum_weights() {
        let mut c = WeightedCspInstance::new(2).unwrap();
        let x = c.add_variable("x").unwrap();
        let y = c.add_variable("y").unwrap();
        let t = c.add_ctype("cut", 2, cut_type()).unwrap();
        c.add_application(t, vec![x, y], ratio(1, 3)).unwrap();
        c.add_application(t, vec![x, y], ratio(1, 6)).unwrap();
        assert_eq!(c.applications().len(), 1);
        assert_eq!(c.applications()[0].weight, ratio(1, 2));
        assert_eq!(c.value(&[0, 1]), ratio(1, 2));
        assert_eq!(c.value(&[1, 1]), ratio(0, 1));
    }

    #[test]
    fn normalization_modes() {
        let mut c = WeightedCspInstance::new(2).unwrap();
        let x = c.add_variable("x").unwrap();
        let y = c.add_variable("y").unwrap();
        let z = c.add_variable("z").unwrap();
        let t = c.add_ctype("cut", 2, cut_type()).unwrap();
        c.add_application(t, vec![x, y], ratio(3, 1)).unwrap();
        c.add_application(t, vec![y, z], ratio(-1, 1)).unwrap();
        assert!(!c.is_normalized());
        let (w, s) = c.normalized(Normalization::Weight);
        assert_eq!(s, ratio(1, 4));
        assert_eq!(w.total_weight(), ratio(1, 2));
        let (n, s) = c.normalized(Normalization::Count);
        assert_eq!(s, ratio(1, 2));
        assert_eq!(n.total_weight(), ratio(1, 1));
    }

    #[test]
    fn arity_checked() {
        let mut c = WeightedCspInstance::new(2).unwrap();
        let x = c.add_variable("x").unwrap();
        let t = c.add_ctype("cut", 2, cut_type()).unwrap();
        assert!(c.add_application(t, vec![x], ratio(1, 1)).is_err());
        assert!(c.add_ctype("bad", 1, [vec![2]].into_iter().collect()).is_err());
    }
}
