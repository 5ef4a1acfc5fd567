use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2::Gf2Vector;

use super::{Bijection, GameView, LiftedVertex, Spoiler};

/// Uniform pick-up and uniform placement over the A universe.
#[derive(Clone, Debug)]
pub struct RandomSpoiler {
    rng: ChaCha8Rng,
}

impl RandomSpoiler {
    pub fn new(seed: u64) -> Self {
        RandomSpoiler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Spoiler for RandomSpoiler {
    fn pick_up(&mut self, view: &GameView<'_>) -> usize {
        self.rng.random_range(0..view.k)
    }

    fn place(&mut self, view: &GameView<'_>, _f: &Bijection) -> LiftedVertex {
        let v = self.rng.random_range(0..view.a.num_vertices());
        (v, Gf2Vector::random(view.m(), &mut self.rng))
    }
}

/// Replays a fixed list of (pebble, A-element) moves, then repeats the last.
#[derive(Clone, Debug)]
pub struct ScriptedSpoiler {
    moves: Vec<(usize, LiftedVertex)>,
    next: usize,
}

impl ScriptedSpoiler {
    pub fn new(moves: Vec<(usize, LiftedVertex)>) -> Self {
        assert!(!moves.is_empty(), "empty script");
        ScriptedSpoiler { moves, next: 0 }
    }

    fn current(&self) -> (usize, LiftedVertex) {
        self.moves[self.next.min(self.moves.len() - 1)]
    }
}

impl Spoiler for ScriptedSpoiler {
    fn pick_up(&mut self, _view: &GameView<'_>) -> usize {
        self.current().0
    }

    fn place(&mut self, _view: &GameView<'_>, _f: &Bijection) -> LiftedVertex {
        let x = self.current().1;
        self.next += 1;
        x
    }
}
