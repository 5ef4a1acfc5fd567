use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::instances::GroupUgInstance;

use super::{
    first_mismatch, require_same_shape, show, AssertLevel, Bijection, Duplicator, GameView,
    LiftedVertex, PebblePair, Spoiler,
};

/// One invariant evaluated during a round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, ok: bool, detail: Option<String>) -> Self {
        CheckRecord {
            name: name.to_string(),
            ok,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub picked: usize,
    /// Shift per vertex (hex), when the bijection is a g*-map.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gstar: Option<BTreeMap<String, String>>,
    /// `[a, b]` as `vertex@hex`; absent if the round aborted earlier.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placement: Option<[String; 2]>,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome {
    Survived { rounds: usize },
    SpoilerWins { round: usize, detail: String },
    Violation { round: usize, side: Side, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub k: usize,
    pub duplicator: String,
    pub rounds: Vec<RoundRecord>,
    pub outcome: Outcome,
}

impl Transcript {
    pub fn spoiler_won(&self) -> bool {
        matches!(self.outcome, Outcome::SpoilerWins { .. })
    }

    /// Turns a violation outcome into an error.
    pub fn check(&self) -> Result<()> {
        match &self.outcome {
            Outcome::Violation { side, detail, .. } => Err(Error::violation(*side, detail.clone())),
            _ => Ok(()),
        }
    }

    pub fn failed_checks(&self) -> usize {
        self.rounds
            .iter()
            .flat_map(|r| &r.checks)
            .filter(|c| !c.ok)
            .count()
    }
}

/// Bijection must be a permutation and must respect every placed pair.
fn validate_bijection(view: &GameView<'_>, f: &Bijection) -> std::result::Result<(), String> {
    if let Bijection::Table(t) = f {
        let n = view.universe_size();
        if t.len() != n {
            return Err(format!("table has {} entries, universe has {n}", t.len()));
        }
        let mut seen = vec![false; n];
        for &y in t {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err("table is not a permutation".into());
            }
        }
    }
    if let Bijection::Shift(g) = f {
        if g.shifts().len() != view.a.num_vertices() || g.shifts().iter().any(|s| s.dim() != view.m()) {
            return Err("g*-map has the wrong shape".into());
        }
    }
    for p in view.placed() {
        if f.apply(p.a) != p.b {
            return Err(format!(
                "bijection sends pebbled {} to {}, not {}",
                show(view.a, p.a),
                show(view.b, f.apply(p.a)),
                show(view.b, p.b)
            ));
        }
    }
    Ok(())
}

/// Plays up to `max_rounds` rounds. Each round Spoiler lifts a pebble pair,
/// Duplicator answers with a bijection (checked against the remaining
/// pairs), Spoiler places the pair on (x, f(x)), and the pebbled pairs are
/// tested for partial isomorphism.
pub fn play_game(
    a: &GroupUgInstance,
    b: &GroupUgInstance,
    k: usize,
    duplicator: &mut dyn Duplicator,
    spoiler: &mut dyn Spoiler,
    max_rounds: usize,
    level: AssertLevel,
) -> Result<Transcript> {
    require_same_shape(a, b)?;
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one pebble pair".into()));
    }
    let mut pebbles: Vec<Option<PebblePair>> = vec![None; k];
    let mut last_placed = None;
    let mut rounds = Vec::new();
    let dname = duplicator.name().to_string();
    let finish = |rounds, outcome| Transcript {
        k,
        duplicator: dname.clone(),
        rounds,
        outcome,
    };

    for round in 1..=max_rounds {
        let picked = spoiler.pick_up(&GameView {
            a,
            b,
            k,
            round,
            pebbles: &pebbles,
            last_placed,
            level,
        });
        if picked >= k {
            let outcome = Outcome::Violation {
                round,
                side: Side::Spoiler,
                detail: format!("picked pebble {picked} of {k}"),
            };
            return Ok(finish(rounds, outcome));
        }
        pebbles[picked] = None;
        let view = GameView {
            a,
            b,
            k,
            round,
            pebbles: &pebbles,
            last_placed,
            level,
        };
        let mut record = RoundRecord {
            round,
            picked,
            gstar: None,
            placement: None,
            checks: Vec::new(),
        };
        let f = match duplicator.bijection(&view) {
            Ok(f) => f,
            Err(Error::StrategyViolation { side, detail }) => {
                record.checks = duplicator.last_checks();
                rounds.push(record);
                return Ok(finish(rounds, Outcome::Violation { round, side, detail }));
            }
            Err(e) => return Err(e),
        };
        record.checks = duplicator.last_checks();
        record.gstar = f.gstar().map(|g| g.to_named(a.names()));
        if let Err(detail) = validate_bijection(&view, &f) {
            rounds.push(record);
            let outcome = Outcome::Violation {
                round,
                side: Side::Duplicator,
                detail,
            };
            return Ok(finish(rounds, outcome));
        }
        let x = spoiler.place(&view, &f);
        if x.0 >= a.num_vertices() || x.1.dim() != a.m() {
            rounds.push(record);
            let outcome = Outcome::Violation {
                round,
                side: Side::Spoiler,
                detail: "placement outside the universe".into(),
            };
            return Ok(finish(rounds, outcome));
        }
        let pair = PebblePair { a: x, b: f.apply(x) };
        pebbles[picked] = Some(pair);
        last_placed = Some(pair);
        record.placement = Some([show(a, pair.a), show(b, pair.b)]);
        rounds.push(record);

        let placed: Vec<PebblePair> = pebbles.iter().flatten().copied().collect();
        if let Some((i, j)) = first_mismatch(a, b, &placed) {
            let detail = format!(
                "pairs ({}, {}) and ({}, {}) differ",
                show(a, placed[i].a),
                show(b, placed[i].b),
                show(a, placed[j].a),
                show(b, placed[j].b)
            );
            return Ok(finish(rounds, Outcome::SpoilerWins { round, detail }));
        }
    }
    Ok(finish(rounds, Outcome::Survived { rounds: max_rounds }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Winning sequence of (pebble index, A-side element), if any.
    pub winning_line: Option<Vec<(usize, LiftedVertex)>>,
    /// Placements examined.
    pub nodes: u64,
}

struct Search<'a> {
    a: &'a GroupUgInstance,
    b: &'a GroupUgInstance,
    k: usize,
    level: AssertLevel,
    budget: u64,
    nodes: u64,
    line: Vec<(usize, LiftedVertex)>,
}

impl Search<'_> {
    fn run<D: Duplicator + Clone>(
        &mut self,
        dup: &D,
        pebbles: &mut Vec<Option<PebblePair>>,
        last_placed: Option<PebblePair>,
        round: usize,
        depth: usize,
    ) -> Result<bool> {
        if depth == 0 {
            return Ok(false);
        }
        // Unplaced pebbles are interchangeable: try only the first of them.
        let mut picks: Vec<usize> = (0..self.k).filter(|&i| pebbles[i].is_some()).collect();
        if let Some(free) = (0..self.k).find(|&i| pebbles[i].is_none()) {
            picks.push(free);
            picks.sort_unstable();
        }
        let universe: Vec<LiftedVertex> = (0..self.a.num_vertices())
            .flat_map(|v| crate::gf2::Gf2Vector::all(self.a.m()).map(move |g| (v, g)))
            .collect();
        for pick in picks {
            let saved = pebbles[pick].take();
            let mut d = dup.clone();
            let view = GameView {
                a: self.a,
                b: self.b,
                k: self.k,
                round,
                pebbles,
                last_placed,
                level: self.level,
            };
            let f = d.bijection(&view)?;
            if let Err(detail) = validate_bijection(&view, &f) {
                return Err(Error::violation(Side::Duplicator, detail));
            }
            for &x in &universe {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::SearchTooLarge(format!(
                        "exhaustive Spoiler search exceeded {} placements",
                        self.budget
                    )));
                }
                let pair = PebblePair { a: x, b: f.apply(x) };
                pebbles[pick] = Some(pair);
                self.line.push((pick, x));
                let placed: Vec<PebblePair> = pebbles.iter().flatten().copied().collect();
                if first_mismatch(self.a, self.b, &placed).is_some()
                    || self.run(&d, pebbles, Some(pair), round + 1, depth - 1)?
                {
                    return Ok(true);
                }
                self.line.pop();
            }
            pebbles[pick] = saved;
        }
        Ok(false)
    }
}

/// Searches every Spoiler line of up to `depth` placements against a
/// deterministic Duplicator (cloned at each branch).
pub fn exhaustive_spoiler_search<D: Duplicator + Clone>(
    a: &GroupUgInstance,
    b: &GroupUgInstance,
    k: usize,
    duplicator: &D,
    depth: usize,
    budget: u64,
    level: AssertLevel,
) -> Result<SearchOutcome> {
    require_same_shape(a, b)?;
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one pebble pair".into()));
    }
    let mut s = Search {
        a,
        b,
        k,
        level,
        budget,
        nodes: 0,
        line: Vec::new(),
    };
    let mut pebbles = vec![None; k];
    let found = s.run(duplicator, &mut pebbles, None, 1, depth)?;
    Ok(SearchOutcome {
        winning_line: found.then(|| s.line.clone()),
        nodes: s.nodes,
    })
}
