//! Vectors and subspaces of F_2^m, stored as machine words (m <= 64).

use std::fmt;
use std::ops::{Add, AddAssign};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_DIM: u32 = 64;

#[inline]
fn mask(dim: u32) -> u64 {
    if dim >= 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

fn check_dim(dim: u32) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {dim} outside 1..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// An element of F_2^m. Bit `i` is coordinate `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    bits: u64,
    dim: u32,
}

impl Gf2Vector {
    pub fn new(bits: u64, dim: u32) -> Result<Self> {
        check_dim(dim)?;
        if bits & !mask(dim) != 0 {
            return Err(Error::InvalidParameter(format!(
                "bits {bits:#x} exceed dimension {dim}"
            )));
        }
        Ok(Gf2Vector { bits, dim })
    }

    /// Caller guarantees `1 <= dim <= 64`; high bits are masked off.
    #[inline]
    pub fn from_bits_masked(bits: u64, dim: u32) -> Self {
        debug_assert!(dim >= 1 && dim <= MAX_DIM);
        Gf2Vector {
            bits: bits & mask(dim),
            dim,
        }
    }

    #[inline]
    pub fn zero(dim: u32) -> Self {
        Gf2Vector::from_bits_masked(0, dim)
    }

    /// Standard basis vector e_i.
    pub fn unit(i: u32, dim: u32) -> Result<Self> {
        if i >= dim {
            return Err(Error::InvalidParameter(format!(
                "coordinate {i} out of range for dimension {dim}"
            )));
        }
        Gf2Vector::new(1u64 << i, dim)
    }

    pub fn random<R: Rng + ?Sized>(dim: u32, rng: &mut R) -> Self {
        Gf2Vector::from_bits_masked(rng.random::<u64>(), dim)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Highest set coordinate, if any.
    #[inline]
    pub fn pivot(self) -> Option<u32> {
        if self.bits == 0 {
            None
        } else {
            Some(63 - self.bits.leading_zeros())
        }
    }

    #[inline]
    pub fn bit(self, i: u32) -> bool {
        i < self.dim && (self.bits >> i) & 1 == 1
    }

    /// Lowercase hex with ceil(m/4) digits, most significant coordinate first.
    pub fn to_hex(self) -> String {
        let digits = self.dim.div_ceil(4) as usize;
        format!("{:0width$x}", self.bits, width = digits)
    }

    pub fn from_hex(s: &str, dim: u32) -> Result<Self> {
        check_dim(dim)?;
        let s = s.trim();
        let s = s.strip_prefix("0x").unwrap_or(s);
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty hex vector".into()));
        }
        let bits = u64::from_str_radix(s, 16)
            .map_err(|e| Error::InvalidParameter(format!("bad hex vector `{s}`: {e}")))?;
        Gf2Vector::new(bits, dim)
    }

    /// Iterates all 2^m vectors in increasing bit order. Only sensible for small m.
    pub fn all(dim: u32) -> impl Iterator<Item = Gf2Vector> {
        assert!(dim >= 1 && dim < 64, "enumeration needs 1 <= m < 64");
        (0..(1u64 << dim)).map(move |b| Gf2Vector { bits: b, dim })
    }
}

impl Add for Gf2Vector {
    type Output = Gf2Vector;
    #[inline]
    fn add(self, rhs: Gf2Vector) -> Gf2Vector {
        debug_assert_eq!(self.dim, rhs.dim, "mixed dimensions");
        Gf2Vector {
            bits: self.bits ^ rhs.bits,
            dim: self.dim,
        }
    }
}

impl AddAssign for Gf2Vector {
    #[inline]
    fn add_assign(&mut self, rhs: Gf2Vector) {
        debug_assert_eq!(self.dim, rhs.dim, "mixed dimensions");
        self.bits ^= rhs.bits;
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.dim as usize)
    }
}

impl Serialize for Gf2Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}:{}", self.dim, self.to_hex()))
    }
}

impl<'de> Deserialize<'de> for Gf2Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (dim, hex) = s
            .split_once(':')
            .ok_or_else(|| serde::de::Error::custom("expected `<dim>:<hex>`"))?;
        let dim: u32 = dim.parse().map_err(serde::de::Error::custom)?;
        Gf2Vector::from_hex(hex, dim).map_err(serde::de::Error::custom)
    }
}

/// A subspace of F_2^m kept in reduced row-echelon form: basis sorted by
/// strictly decreasing pivot, and each pivot column is zero in every other row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Subspace {
    dim: u32,
    basis: Vec<u64>,
}

impl Gf2Subspace {
    pub fn zero(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Gf2Subspace {
            dim,
            basis: Vec::new(),
        })
    }

    pub fn full(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Gf2Subspace {
            dim,
            basis: (0..dim).rev().map(|i| 1u64 << i).collect(),
        })
    }

    pub fn span_of(vectors: &[Gf2Vector], dim: u32) -> Result<Self> {
        let mut s = Gf2Subspace::zero(dim)?;
        for &v in vectors {
            if v.dim() != dim {
                return Err(Error::InvalidParameter(format!(
                    "vector of dimension {} in span over F_2^{dim}",
                    v.dim()
                )));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim as usize
    }

    pub fn basis(&self) -> Vec<Gf2Vector> {
        self.basis
            .iter()
            .map(|&b| Gf2Vector::from_bits_masked(b, self.dim))
            .collect()
    }

    fn reduce_bits(&self, mut x: u64) -> u64 {
        for &b in &self.basis {
            let p = 63 - b.leading_zeros();
            if (x >> p) & 1 == 1 {
                x ^= b;
            }
        }
        x
    }

    pub fn contains(&self, v: Gf2Vector) -> bool {
        v.dim() == self.dim && self.reduce_bits(v.bits()) == 0
    }

    /// Adds `v` to the span. Returns true when the rank grew.
    pub fn insert(&mut self, v: Gf2Vector) -> bool {
        debug_assert_eq!(v.dim(), self.dim);
        let x = self.reduce_bits(v.bits());
        if x == 0 {
            return false;
        }
        let p = 63 - x.leading_zeros();
        for b in self.basis.iter_mut() {
            if (*b >> p) & 1 == 1 {
                *b ^= x;
            }
        }
        let at = self
            .basis
            .iter()
            .position(|&b| b.leading_zeros() > x.leading_zeros())
            .unwrap_or(self.basis.len());
        self.basis.insert(at, x);
        true
    }

    /// All 2^rank elements in increasing bit order.
    pub fn elements(&self) -> Vec<Gf2Vector> {
        assert!(self.rank() <= 24, "subspace too large to enumerate");
        let mut out = Vec::with_capacity(1 << self.rank());
        for mask in 0u64..(1u64 << self.rank()) {
            let mut x = 0u64;
            for (i, &b) in self.basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    x ^= b;
                }
            }
            out.push(Gf2Vector::from_bits_masked(x, self.dim));
        }
        out.sort();
        out
    }

    /// Comma-separated hex basis in RREF order.
    pub fn to_text(&self) -> String {
        self.basis()
            .iter()
            .map(|v| v.to_hex())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for Gf2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span[{}]/F2^{}", self.to_text(), self.dim)
    }
}

impl fmt::Display for Gf2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Uniform rank-`ell` subspace built the way the construction prescribes:
/// each new basis vector is drawn uniformly from the complement of the
/// current span (rejection sampling from all of F_2^m).
pub fn random_subspace<R: Rng + ?Sized>(m: u32, ell: u32, rng: &mut R) -> Result<Gf2Subspace> {
    check_dim(m)?;
    if ell > m {
        return Err(Error::InvalidParameter(format!(
            "rank {ell} exceeds ambient dimension {m}"
        )));
    }
    let mut s = Gf2Subspace::zero(m)?;
    while s.rank() < ell as usize {
        let v = Gf2Vector::random(m, rng);
        if !s.contains(v) {
            s.insert(v);
        }
    }
    Ok(s)
}

pub fn span_of(vectors: &[Gf2Vector], m: u32) -> Result<Gf2Subspace> {
    Gf2Subspace::span_of(vectors, m)
}

/// Coefficients c with XOR_{c_i = 1} basis_i = target. The basis need not be
/// independent; with an independent basis the answer is unique.
pub fn coefficients_in_basis(target: Gf2Vector, basis: &[Gf2Vector]) -> Result<Vec<bool>> {
    let words = basis.len().div_ceil(64).max(1);
    // Echelon rows: (vector bits, combination of original indices).
    let mut rows: Vec<(u64, Vec<u64>)> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        if b.dim() != target.dim() {
            return Err(Error::InvalidParameter("mixed dimensions".into()));
        }
        let mut x = b.bits();
        let mut combo = vec![0u64; words];
        combo[i / 64] |= 1 << (i % 64);
        for (rb, rc) in &rows {
            let p = 63 - rb.leading_zeros();
            if (x >> p) & 1 == 1 {
                x ^= rb;
                for (c, r) in combo.iter_mut().zip(rc) {
                    *c ^= r;
                }
            }
        }
        if x != 0 {
            let at = rows
                .iter()
                .position(|(rb, _)| rb.leading_zeros() > x.leading_zeros())
                .unwrap_or(rows.len());
            rows.insert(at, (x, combo));
        }
    }
    let mut x = target.bits();
    let mut combo = vec![0u64; words];
    for (rb, rc) in &rows {
        let p = 63 - rb.leading_zeros();
        if (x >> p) & 1 == 1 {
            x ^= rb;
            for (c, r) in combo.iter_mut().zip(rc) {
                *c ^= r;
            }
        }
    }
    if x != 0 {
        return Err(Error::NotInSpan);
    }
    Ok((0..basis.len())
        .map(|i| (combo[i / 64] >> (i % 64)) & 1 == 1)
        .collect())
}

/// Indices of a basis of span(vectors), chosen greedily left to right.
pub fn greedy_basis(vectors: &[Gf2Vector]) -> Vec<usize> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let mut s = Gf2Subspace {
        dim: first.dim(),
        basis: Vec::new(),
    };
    vectors
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| s.insert(v).then_some(i))
        .collect()
}
