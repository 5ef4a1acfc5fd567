use std::collections::HashMap;

use crate::error::{Error, Result};

use super::{Assignment, Evaluation};

/// Holds under `a` iff `a(u) = perm[a(v)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermConstraint {
    pub u: usize,
    pub v: usize,
    pub perm: Vec<u32>,
}

impl PermConstraint {
    #[inline]
    pub fn holds(&self, labels: &[u32]) -> bool {
        labels[self.u] == self.perm[labels[self.v] as usize]
    }
}

/// UG(q) with explicit permutation constraints.
#[derive(Clone, Debug)]
pub struct PermUgInstance {
    q: u32,
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    constraints: Vec<PermConstraint>,
}

impl PartialEq for PermUgInstance {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.names == other.names && self.constraints == other.constraints
    }
}

impl Eq for PermUgInstance {}

impl PermUgInstance {
    pub fn new(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("label set must be nonempty".into()));
        }
        Ok(PermUgInstance {
            q,
            names: Vec::new(),
            name_index: HashMap::new(),
            constraints: Vec::new(),
        })
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

    pub fn add_constraint(&mut self, u: usize, v: usize, perm: Vec<u32>) -> Result<()> {
        if u >= self.names.len() || v >= self.names.len() {
            return Err(Error::InvalidParameter("constraint endpoint out of range".into()));
        }
        if perm.len() != self.q as usize {
            return Err(Error::InvalidParameter(format!(
                "permutation has {} entries, q = {}",
                perm.len(),
                self.q
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= self.q || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::InvalidParameter(format!(
                    "{perm:?} is not a permutation of [{}]",
                    self.q
                )));
            }
        }
        self.constraints.push(PermConstraint { u, v, perm });
        Ok(())
    }

    pub fn add_constraint_by_name(&mut self, u: &str, v: &str, perm: Vec<u32>) -> Result<()> {
        let u = self.add_vertex(u)?;
        let v = self.add_vertex(v)?;
        self.add_constraint(u, v, perm)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn constraints(&self) -> &[PermConstraint] {
        &self.constraints
    }

    pub fn constraint_count(&self) -> u64 {
        self.constraints.len() as u64
    }

    pub fn count_satisfied(&self, labels: &[u32]) -> u64 {
        self.constraints.iter().filter(|c| c.holds(labels)).count() as u64
    }

    pub fn evaluate(&self, assignment: &Assignment<u32>) -> Result<Evaluation> {
        let labels = assignment.require_total(&self.names)?;
        if let Some(l) = labels.iter().find(|&&l| l >= self.q) {
            return Err(Error::InvalidParameter(format!(
                "label {l} outside [{}]",
                self.q
            )));
        }
        Ok(Evaluation::new(
            self.count_satisfied(&labels),
            self.constraint_count(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ratio;

    /// Four vertices in a square, labels {0, 1}; one swap among identities
    /// makes the cycle inconsistent, so the best labelling misses one edge.
    #[test]
    fn square_with_one_twist_scores_three_of_four() {
        let mut p = PermUgInstance::new(2).unwrap();
        p.add_constraint_by_name("tl", "tr", vec![0, 1]).unwrap();
        p.add_constraint_by_name("tr", "br", vec![0, 1]).unwrap();
        p.add_constraint_by_name("bl", "tl", vec![0, 1]).unwrap();
        p.add_constraint_by_name("bl", "br", vec![1, 0]).unwrap();
        let e = p.evaluate(&Assignment::total(vec![0, 0, 0, 0])).unwrap();
        assert_eq!((e.satisfied, e.fraction), (3, ratio(3, 4)));
    }

    #[test]
    fn rejects_non_permutations() {
        let mut p = PermUgInstance::new(3).unwrap();
        assert!(p.add_constraint_by_name("a", "b", vec![0, 0, 1]).is_err());
        assert!(p.add_constraint_by_name("a", "b", vec![0, 1]).is_err());
        assert!(p.add_constraint_by_name("a", "b", vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn orientation_is_u_equals_perm_of_v() {
        let mut p = PermUgInstance::new(3).unwrap();
        p.add_constraint_by_name("u", "v", vec![1, 2, 0]).unwrap();
        assert_eq!(p.count_satisfied(&[1, 0]), 1);
        assert_eq!(p.count_satisfied(&[0, 1]), 0);
    }
}
