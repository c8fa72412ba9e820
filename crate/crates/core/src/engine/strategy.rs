use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{GhostError, Language, Player, Solver, Utilities};

/// A player: picks the next symbol for `mover` at `prefix`.
pub trait Strategy<L: Language> {
    fn choose(&mut self, lang: &L, prefix: &[L::Symbol], mover: Player)
        -> Result<L::Symbol, GhostError>;
}

/// Plays the solver's principal move.
pub struct OptimalStrategy<L: Language> {
    solver: Solver<L>,
}

impl<L: Language> OptimalStrategy<L> {
    pub fn new() -> Self {
        Self { solver: Solver::new() }
    }

    pub fn with_solver(solver: Solver<L>) -> Self {
        Self { solver }
    }
}

impl<L: Language> Default for OptimalStrategy<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: Language> Strategy<L> for OptimalStrategy<L> {
    fn choose(&mut self, lang: &L, prefix: &[L::Symbol], _: Player) -> Result<L::Symbol, GhostError> {
        self.solver.best_move(lang, prefix)
    }
}

/// Always the smallest legal symbol.
#[derive(Debug, Default, Clone, Copy)]
pub struct FirstLegal;

impl<L: Language> Strategy<L> for FirstLegal {
    fn choose(&mut self, lang: &L, prefix: &[L::Symbol], _: Player) -> Result<L::Symbol, GhostError> {
        lang.legal_moves(prefix)?.into_iter().next().ok_or(GhostError::GameOver)
    }
}

/// Uniformly random legal symbol.
pub struct RandomStrategy<R> {
    rng: R,
}

impl<R: Rng> RandomStrategy<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<L: Language, R: Rng> Strategy<L> for RandomStrategy<R> {
    fn choose(&mut self, lang: &L, prefix: &[L::Symbol], _: Player) -> Result<L::Symbol, GhostError> {
        let moves = lang.legal_moves(prefix)?;
        moves.choose(&mut self.rng).cloned().ok_or(GhostError::GameOver)
    }
}

/// Replays a fixed list of symbols, one per own turn, without checking them.
pub struct ScriptedStrategy<S> {
    moves: VecDeque<S>,
}

impl<S> ScriptedStrategy<S> {
    pub fn new(moves: impl IntoIterator<Item = S>) -> Self {
        Self { moves: moves.into_iter().collect() }
    }
}

impl<L: Language> Strategy<L> for ScriptedStrategy<L::Symbol> {
    fn choose(&mut self, _: &L, _: &[L::Symbol], mover: Player) -> Result<L::Symbol, GhostError> {
        self.moves.pop_front().ok_or(GhostError::StrategyExhausted {
            player: mover,
            reason: "script ran out of moves".into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayOut<S> {
    /// Full word, including the starting prefix.
    pub word: Vec<S>,
    pub utilities: Utilities,
    /// Moves made during the play-out, in order.
    pub trace: Vec<(Player, S)>,
}

/// Alternate `first` and `second` from `prefix` until a word is complete.
pub fn play_out<L: Language>(
    lang: &L,
    prefix: &[L::Symbol],
    first: &mut dyn Strategy<L>,
    second: &mut dyn Strategy<L>,
) -> Result<PlayOut<L::Symbol>, GhostError> {
    let mut word = prefix.to_vec();
    let mut trace = Vec::new();
    loop {
        let legal = lang.legal_moves(&word)?;
        if legal.is_empty() {
            let utilities = lang
                .terminal_utilities(&word)?
                .ok_or_else(|| GhostError::InvalidPrefix(format!("{word:?}")))?;
            return Ok(PlayOut { word, utilities, trace });
        }
        let mover = Player::to_move(word.len());
        let strategy: &mut dyn Strategy<L> = match mover {
            Player::First => &mut *first,
            Player::Second => &mut *second,
        };
        let mv = strategy.choose(lang, &word, mover)?;
        if legal.binary_search(&mv).is_err() {
            return Err(GhostError::StrategyIllegalMove { player: mover, symbol: mv.to_string() });
        }
        trace.push((mover, mv.clone()));
        word.push(mv);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{TrieLanguage, WordEntry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> TrieLanguage {
        TrieLanguage::new(vec![
            WordEntry::new("ab", Utilities::new(1.0, -1.0)),
            WordEntry::new("ac", Utilities::new(-1.0, 1.0)),
            WordEntry::new("bcd", Utilities::new(0.0, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn first_legal_terminates() {
        let l = toy();
        let out = play_out(&l, &[], &mut FirstLegal, &mut FirstLegal).unwrap();
        assert_eq!(out.word, vec!['a', 'b']);
        assert_eq!(out.trace.len(), 2);
        assert_eq!(out.utilities, Utilities::new(1.0, -1.0));
    }

    #[test]
    fn illegal_script_names_the_player() {
        let l = toy();
        let err = play_out(
            &l,
            &[],
            &mut FirstLegal,
            &mut ScriptedStrategy::new(['z']),
        )
        .unwrap_err();
        assert_eq!(
            err,
            GhostError::StrategyIllegalMove { player: Player::Second, symbol: "z".into() }
        );
    }

    #[test]
    fn random_play_stays_legal() {
        let l = toy();
        let mut a = RandomStrategy::new(ChaCha8Rng::seed_from_u64(1));
        let mut b = RandomStrategy::new(ChaCha8Rng::seed_from_u64(2));
        for _ in 0..20 {
            let out = play_out(&l, &[], &mut a, &mut b).unwrap();
            assert!(["ab", "ac", "bcd"].contains(&out.word.iter().collect::<String>().as_str()));
        }
    }

    #[test]
    fn optimal_against_optimal_matches_solve() {
        let l = toy();
        let out = play_out(&l, &[], &mut OptimalStrategy::new(), &mut OptimalStrategy::new()).unwrap();
        let v = Solver::new().solve(&l, &[]).unwrap();
        assert_eq!(out.utilities, v.utilities());
    }
}
