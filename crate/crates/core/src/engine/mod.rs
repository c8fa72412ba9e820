//! Generic Utility Ghost engine.
//!
//! A game is described by a [`Language`]: a finite set of words over an
//! ordered alphabet, each complete word carrying a utility pair. Two players
//! alternately append symbols; every intermediate string must remain a prefix
//! of some word, and the game ends as soon as a complete word is spelled.
//!
//! [`Solver`] computes exact backward-induction values with an optional
//! transposition table keyed by the language's canonical state, and
//! [`play_out`] runs two [`Strategy`] implementations against each other.

use std::fmt;
use std::hash::Hash;

use thiserror::Error;

pub mod solver;
pub mod strategy;
pub mod trie;

pub use solver::{GameValue, Solver, SolverStats};
pub use strategy::{
    play_out, FirstLegal, OptimalStrategy, PlayOut, RandomStrategy, ScriptedStrategy, Strategy,
};
pub use trie::{english_spanish_language, parse_word_list, TrieLanguage, WordEntry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GhostError {
    #[error("not a prefix of any word in the language: {0}")]
    InvalidPrefix(String),
    #[error("{player} returned illegal move {symbol}")]
    StrategyIllegalMove { player: Player, symbol: String },
    #[error("{player} has no move to play: {reason}")]
    StrategyExhausted { player: Player, reason: String },
    #[error("game is already over")]
    GameOver,
    #[error("language has no words")]
    EmptyLanguage,
    #[error("alpha-beta pruning requires a constant-sum language")]
    NotConstantSum,
    #[error("word list line {line}: {message}")]
    WordList { line: usize, message: String },
}

/// The two seats of a game. `First` makes the opening move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    First,
    Second,
}

impl Player {
    /// Player to move after `plies` symbols have been played.
    pub fn to_move(plies: usize) -> Player {
        if plies % 2 == 0 {
            Player::First
        } else {
            Player::Second
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::First => 1,
            Player::Second => 2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.number())
    }
}

/// Terminal utilities of a complete word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utilities {
    pub u1: f64,
    pub u2: f64,
}

impl Utilities {
    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    pub fn of(&self, player: Player) -> f64 {
        match player {
            Player::First => self.u1,
            Player::Second => self.u2,
        }
    }
}

/// A player's utility, with forfeiture kept out of float arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Utility {
    /// The player spelled a string that starts no word.
    Loss,
    Finite(f64),
}

/// Judgement of an arbitrary string against a language.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    InProgress,
    Complete(Utilities),
    /// The player who appended the last symbol left the language.
    Forfeit { offender: Player },
}

impl Verdict {
    /// Utility awarded to `player`, if the game has ended for them.
    pub fn utility_for(&self, player: Player) -> Option<Utility> {
        match self {
            Verdict::InProgress => None,
            Verdict::Complete(u) => Some(Utility::Finite(u.of(player))),
            Verdict::Forfeit { offender } if *offender == player => Some(Utility::Loss),
            Verdict::Forfeit { .. } => None,
        }
    }
}

/// A finite language with terminal utilities.
///
/// Implementations reject strings that are not prefixes of any word with
/// [`GhostError::InvalidPrefix`]; accepted prefixes are never invalid.
pub trait Language {
    /// Alphabet symbol. `Ord` is the tie-break order used by the solver.
    type Symbol: Clone + Ord + Hash + fmt::Debug + fmt::Display;
    /// Canonical subgame identity: two prefixes with equal keys must have
    /// identical subgames (same mover, same continuation values).
    type Key: Clone + Eq + Hash;

    /// Symbols `s` such that `prefix + s` is still a prefix of some word,
    /// in ascending order. Empty exactly when `prefix` is a complete word.
    fn legal_moves(&self, prefix: &[Self::Symbol]) -> Result<Vec<Self::Symbol>, GhostError>;

    /// Utilities of a complete word; `None` for a valid non-terminal prefix.
    fn terminal_utilities(&self, prefix: &[Self::Symbol])
        -> Result<Option<Utilities>, GhostError>;

    fn state_key(&self, prefix: &[Self::Symbol]) -> Self::Key;

    /// `Some(c)` when `u1 + u2 == c` on every word.
    fn constant_sum(&self) -> Option<f64> {
        None
    }

    fn is_terminal(&self, prefix: &[Self::Symbol]) -> Result<bool, GhostError> {
        Ok(self.terminal_utilities(prefix)?.is_some())
    }
}

/// Legal continuations of `prefix`; thin wrapper kept for call-site symmetry
/// with [`Solver::solve`].
pub fn legal_moves<L: Language>(
    lang: &L,
    prefix: &[L::Symbol],
) -> Result<Vec<L::Symbol>, GhostError> {
    lang.legal_moves(prefix)
}

/// Judge any string, including ones that leave the language.
pub fn judge<L: Language>(lang: &L, string: &[L::Symbol]) -> Verdict {
    if string.is_empty() {
        return match lang.terminal_utilities(string) {
            Ok(Some(u)) => Verdict::Complete(u),
            _ => Verdict::InProgress,
        };
    }
    // Find the first symbol that leaves the language.
    for end in 1..=string.len() {
        let head = &string[..end - 1];
        let ok = match lang.legal_moves(head) {
            Ok(moves) => moves.binary_search(&string[end - 1]).is_ok(),
            Err(_) => false,
        };
        if !ok {
            return Verdict::Forfeit { offender: Player::to_move(end - 1) };
        }
    }
    match lang.terminal_utilities(string) {
        Ok(Some(u)) => Verdict::Complete(u),
        _ => Verdict::InProgress,
    }
}
