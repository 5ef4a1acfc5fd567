//! The k-pebble bijective game on label-lifted instances G(U1), G(U2).
//!
//! Lifted structures stay virtual: an element is `(v, g)` and the relations
//! between two elements are read off [`lifted_allowed_diffs`]. Every
//! Duplicator here answers with a g*-map, f(v, g) = (v, g + g*(v)).

mod duplicators;
mod engine;
mod spoilers;
mod tree;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::gf2::Gf2Vector;
use crate::instances::{lifted_allowed_diffs, GroupUgInstance};

pub use duplicators::{CopsDuplicator, IdentityDuplicator, K2Duplicator};
pub use engine::{
    exhaustive_spoiler_search, play_game, CheckRecord, Outcome, RoundRecord, SearchOutcome,
    Transcript,
};
pub use spoilers::{RandomSpoiler, ScriptedSpoiler};
pub use tree::{extend_along_path, steiner_tree, SteinerTree, TreeDuplicator};

/// Element (v, g) of a lifted universe.
pub type LiftedVertex = (usize, Gf2Vector);

/// Pebble pair: `a` in G(U1), `b` in G(U2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PebblePair {
    pub a: LiftedVertex,
    pub b: LiftedVertex,
}

/// How much invariant checking strategies do each round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssertLevel {
    Off,
    /// Check the edges the strategy touched this round.
    #[default]
    Edges,
    /// Check every invariant the correctness argument relies on.
    Full,
}

impl std::str::FromStr for AssertLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(AssertLevel::Off),
            "edges" => Ok(AssertLevel::Edges),
            "full" => Ok(AssertLevel::Full),
            _ => Err(Error::InvalidParameter(format!("assert level `{s}`"))),
        }
    }
}

/// Shift per base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GStarMap {
    shifts: Vec<Gf2Vector>,
}

impl GStarMap {
    pub fn zero(n: usize, m: u32) -> Self {
        GStarMap {
            shifts: vec![Gf2Vector::zero(m); n],
        }
    }

    pub fn from_shifts(shifts: Vec<Gf2Vector>) -> Self {
        GStarMap { shifts }
    }

    pub fn get(&self, v: usize) -> Gf2Vector {
        self.shifts[v]
    }

    pub fn set(&mut self, v: usize, g: Gf2Vector) {
        self.shifts[v] = g;
    }

    pub fn shifts(&self) -> &[Gf2Vector] {
        &self.shifts
    }

    pub fn apply(&self, x: LiftedVertex) -> LiftedVertex {
        (x.0, x.1 + self.shifts[x.0])
    }

    /// Hex shift per vertex name.
    pub fn to_named(&self, names: &[String]) -> BTreeMap<String, String> {
        names
            .iter()
            .zip(&self.shifts)
            .map(|(n, g)| (n.clone(), g.to_hex()))
            .collect()
    }
}

/// A bijection between the lifted universes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bijection {
    Shift(GStarMap),
    /// Image of universe index v·2^m + g.
    Table(Vec<usize>),
}

impl Bijection {
    pub fn apply(&self, x: LiftedVertex) -> LiftedVertex {
        match self {
            Bijection::Shift(g) => g.apply(x),
            Bijection::Table(t) => {
                let m = x.1.dim();
                let y = t[universe_index(x)];
                (y >> m, Gf2Vector::from_bits_masked((y & ((1 << m) - 1)) as u64, m))
            }
        }
    }

    pub fn gstar(&self) -> Option<&GStarMap> {
        match self {
            Bijection::Shift(g) => Some(g),
            Bijection::Table(_) => None,
        }
    }
}

pub fn universe_index(x: LiftedVertex) -> usize {
    (x.0 << x.1.dim()) | x.1.bits() as usize
}

/// What a strategy sees when asked for a move.
#[derive(Clone, Copy, Debug)]
pub struct GameView<'a> {
    pub a: &'a GroupUgInstance,
    pub b: &'a GroupUgInstance,
    pub k: usize,
    /// 1-based round number.
    pub round: usize,
    /// Pebbles on the board (the current round's pebble already lifted).
    pub pebbles: &'a [Option<PebblePair>],
    /// Pair placed in the previous round (even if lifted again since).
    pub last_placed: Option<PebblePair>,
    pub level: AssertLevel,
}

impl GameView<'_> {
    pub fn m(&self) -> u32 {
        self.a.m()
    }

    pub fn placed(&self) -> impl Iterator<Item = &PebblePair> {
        self.pebbles.iter().flatten()
    }

    /// Base vertices carrying a pebble on the A side.
    pub fn pebbled_vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.placed().map(|p| p.a.0).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn universe_size(&self) -> usize {
        self.a.num_vertices() << self.a.m()
    }
}

pub trait Duplicator {
    fn name(&self) -> &'static str;

    /// The bijection for this round; must map every placed A-element to its
    /// B-partner. Invariant failures come back as `StrategyViolation`.
    fn bijection(&mut self, view: &GameView<'_>) -> Result<Bijection>;

    /// Invariant checks made by the last `bijection` call.
    fn last_checks(&self) -> Vec<CheckRecord> {
        Vec::new()
    }
}

pub trait Spoiler {
    /// Index of the pebble pair to pick up.
    fn pick_up(&mut self, view: &GameView<'_>) -> usize;

    /// A-side element to pebble; the B side is its image under `f`.
    fn place(&mut self, view: &GameView<'_>, f: &Bijection) -> LiftedVertex;
}

/// True iff the pebbled pairs form a partial isomorphism: equal elements
/// correspond and every pair of elements carries the same diff set on both
/// sides.
pub fn check_partial_isomorphism(a: &GroupUgInstance, b: &GroupUgInstance, pairs: &[PebblePair]) -> bool {
    first_mismatch(a, b, pairs).is_none()
}

/// The first pair of pebble positions witnessing a failure.
pub(crate) fn first_mismatch(
    a: &GroupUgInstance,
    b: &GroupUgInstance,
    pairs: &[PebblePair],
) -> Option<(usize, usize)> {
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (p, q) = (pairs[i], pairs[j]);
            if (p.a == q.a) != (p.b == q.b) {
                return Some((i, j));
            }
            if lifted_allowed_diffs(a, p.a, q.a) != lifted_allowed_diffs(b, p.b, q.b) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Under the shift map, base edge {u, v} looks the same in both lifts:
/// U2's diffs shifted by g*(u) + g*(v) equal U1's diffs.
pub fn edge_consistent(a: &GroupUgInstance, b: &GroupUgInstance, g: &GStarMap, u: usize, v: usize) -> bool {
    let shift = g.get(u) + g.get(v);
    match (a.bundle_between(u, v), b.bundle_between(u, v)) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            let mut shifted: Vec<Gf2Vector> = y.diffs.iter().map(|&z| z + shift).collect();
            shifted.sort();
            shifted == x.diffs
        }
        _ => false,
    }
}

pub(crate) fn require_same_shape(a: &GroupUgInstance, b: &GroupUgInstance) -> Result<()> {
    if a.m() != b.m() || a.num_vertices() != b.num_vertices() {
        return Err(Error::Precondition(
            "lifted universes differ in size (vertex count or m)".into(),
        ));
    }
    if a.m() > 24 {
        return Err(Error::SizeLimit(format!("m = {} too large for the game engine", a.m())));
    }
    Ok(())
}

pub(crate) fn violation(detail: impl Into<String>) -> Error {
    Error::violation(Side::Duplicator, detail)
}

/// Base-vertex display for diagnostics.
pub(crate) fn show(inst: &GroupUgInstance, x: LiftedVertex) -> String {
    format!("{}@{}", inst.vertex_name(x.0), x.1.to_hex())
}
