//! The `(j, m)`-balanced redistricting game.
//!
//! `2j(2m+1)` balls, half white and half black, are placed one per turn into
//! `2j` bins of capacity `2m+1`. Player 1 wins every bin holding at least
//! `m+1` white balls, player 2 the rest; `j` bins each is a tie.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Player;

pub mod audit;
mod search;
mod strategy;

pub use audit::{AuditReport, AuditRow, Snapshot};
pub use search::{
    best_response_value, exact_solve, state_space_estimate, BestResponse, ExactStrategy, ExactValue,
    DEFAULT_BUDGET,
};
pub use strategy::{
    mirror_move, non_wasted_white, play_balanced, select_s, table1_move, BallStrategy, BalancedPlayOut,
    FirstLegalBalls, MirrorStrategy, RandomBalls, Table1Strategy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BalancedError {
    #[error("j and m must be positive (got j = {j}, m = {m})")]
    InvalidConfig { j: usize, m: usize },
    #[error("bin {0} does not exist")]
    NoSuchBin(usize),
    #[error("bin {0} is full")]
    BinFull(usize),
    #[error("no {0} balls remain")]
    ColorExhausted(Color),
    #[error("all balls have been placed")]
    GameOver,
    #[error("balls remain to be placed")]
    GameNotOver,
    #[error("search needs about {estimate} states, over the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("{player} strategy returned an illegal move: {reason}")]
    IllegalStrategyMove { player: Player, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalancedConfig {
    pub j: usize,
    pub m: usize,
}

impl BalancedConfig {
    pub fn new(j: usize, m: usize) -> Result<Self, BalancedError> {
        if j == 0 || m == 0 {
            return Err(BalancedError::InvalidConfig { j, m });
        }
        Ok(Self { j, m })
    }

    /// Total balls.
    pub fn balls(&self) -> usize {
        2 * self.j * (2 * self.m + 1)
    }

    pub fn bins(&self) -> usize {
        2 * self.j
    }

    pub fn capacity(&self) -> u32 {
        (2 * self.m + 1) as u32
    }

    /// Balls of each colour.
    pub fn per_color(&self) -> u32 {
        (self.j * (2 * self.m + 1)) as u32
    }

    /// White balls needed to carry a bin.
    pub fn majority(&self) -> u32 {
        (self.m + 1) as u32
    }

    /// Rounds in a full game; each round is one P1 move then one P2 move.
    pub fn rounds(&self) -> usize {
        self.balls() / 2
    }

    /// Mirror label `(a, b)` of a bin: bins `0..j` are `(+1, b)`, bins
    /// `j..2j` are `(-1, b)`, with `b` counted from 1.
    pub fn label(&self, bin: usize) -> (i8, usize) {
        if bin < self.j {
            (1, bin + 1)
        } else {
            (-1, bin - self.j + 1)
        }
    }

    pub fn bin_with_label(&self, a: i8, b: usize) -> usize {
        assert!((1..=self.j).contains(&b));
        if a > 0 {
            b - 1
        } else {
            self.j + b - 1
        }
    }

    /// `(a, b) -> (-a, b)`.
    pub fn mirror_bin(&self, bin: usize) -> usize {
        (bin + self.j) % (2 * self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BallMove {
    pub bin: usize,
    pub color: Color,
}

impl BallMove {
    pub fn white(bin: usize) -> Self {
        Self { bin, color: Color::White }
    }

    pub fn black(bin: usize) -> Self {
        Self { bin, color: Color::Black }
    }
}

impl fmt::Display for BallMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in bin {}", self.color, self.bin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinState {
    pub white: u32,
    pub black: u32,
}

impl BinState {
    pub fn total(&self) -> u32 {
        self.white + self.black
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// More white than black among the balls currently in the bin. For a
    /// full bin this is the same as holding at least `m+1` white balls.
    pub fn is_majority_white(&self) -> bool {
        self.white > self.black
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalancedGameState {
    config: BalancedConfig,
    bins: Vec<BinState>,
    remaining_white: u32,
    remaining_black: u32,
}

impl BalancedGameState {
    pub fn new(config: BalancedConfig) -> Self {
        Self {
            config,
            bins: vec![BinState::default(); config.bins()],
            remaining_white: config.per_color(),
            remaining_black: config.per_color(),
        }
    }

    /// Build from bin contents; remaining counts follow from the totals.
    pub fn from_bins(config: BalancedConfig, bins: Vec<BinState>) -> Result<Self, BalancedError> {
        if bins.len() != config.bins() {
            return Err(BalancedError::NoSuchBin(bins.len()));
        }
        let white: u32 = bins.iter().map(|b| b.white).sum();
        let black: u32 = bins.iter().map(|b| b.black).sum();
        if let Some(i) = bins.iter().position(|b| b.total() > config.capacity()) {
            return Err(BalancedError::BinFull(i));
        }
        if white > config.per_color() {
            return Err(BalancedError::ColorExhausted(Color::White));
        }
        if black > config.per_color() {
            return Err(BalancedError::ColorExhausted(Color::Black));
        }
        Ok(Self {
            config,
            bins,
            remaining_white: config.per_color() - white,
            remaining_black: config.per_color() - black,
        })
    }

    pub fn config(&self) -> BalancedConfig {
        self.config
    }

    pub fn bins(&self) -> &[BinState] {
        &self.bins
    }

    pub fn remaining_white(&self) -> u32 {
        self.remaining_white
    }

    pub fn remaining_black(&self) -> u32 {
        self.remaining_black
    }

    pub fn remaining(&self, color: Color) -> u32 {
        match color {
            Color::White => self.remaining_white,
            Color::Black => self.remaining_black,
        }
    }

    pub fn placed(&self) -> usize {
        self.config.balls() - (self.remaining_white + self.remaining_black) as usize
    }

    pub fn mover(&self) -> Player {
        Player::to_move(self.placed())
    }

    /// 1-based round of the next move.
    pub fn round(&self) -> usize {
        self.placed() / 2 + 1
    }

    pub fn is_over(&self) -> bool {
        self.remaining_white + self.remaining_black == 0
    }

    pub fn check_move(&self, mv: BallMove) -> Result<(), BalancedError> {
        if self.is_over() {
            return Err(BalancedError::GameOver);
        }
        let bin = self.bins.get(mv.bin).ok_or(BalancedError::NoSuchBin(mv.bin))?;
        if bin.total() >= self.config.capacity() {
            return Err(BalancedError::BinFull(mv.bin));
        }
        if self.remaining(mv.color) == 0 {
            return Err(BalancedError::ColorExhausted(mv.color));
        }
        Ok(())
    }

    pub fn apply_move(&self, mv: BallMove) -> Result<Self, BalancedError> {
        self.check_move(mv)?;
        let mut next = self.clone();
        let bin = &mut next.bins[mv.bin];
        match mv.color {
            Color::White => {
                bin.white += 1;
                next.remaining_white -= 1;
            }
            Color::Black => {
                bin.black += 1;
                next.remaining_black -= 1;
            }
        }
        Ok(next)
    }

    /// Undo a ball; used to recover the position before the last move.
    pub(crate) fn without(&self, mv: BallMove) -> Self {
        let mut prev = self.clone();
        let bin = &mut prev.bins[mv.bin];
        match mv.color {
            Color::White => {
                bin.white -= 1;
                prev.remaining_white += 1;
            }
            Color::Black => {
                bin.black -= 1;
                prev.remaining_black += 1;
            }
        }
        prev
    }

    /// Legal moves, white before black, bins ascending.
    pub fn legal_moves(&self) -> Vec<BallMove> {
        let mut out = Vec::new();
        for color in [Color::White, Color::Black] {
            if self.remaining(color) == 0 {
                continue;
            }
            for (i, b) in self.bins.iter().enumerate() {
                if b.total() < self.config.capacity() {
                    out.push(BallMove { bin: i, color });
                }
            }
        }
        out
    }

    /// Bins carried by player 1 and player 2 at the end of the game.
    pub fn score(&self) -> Result<(usize, usize), BalancedError> {
        if !self.is_over() {
            return Err(BalancedError::GameNotOver);
        }
        let p1 = self.bins.iter().filter(|b| b.white >= self.config.majority()).count();
        Ok((p1, self.config.bins() - p1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(j: usize, m: usize) -> BalancedConfig {
        BalancedConfig::new(j, m).unwrap()
    }

    #[test]
    fn derived_sizes() {
        let c = cfg(2, 3);
        assert_eq!((c.balls(), c.bins(), c.capacity(), c.per_color()), (28, 4, 7, 14));
        assert!(BalancedConfig::new(0, 1).is_err());
    }

    #[test]
    fn labels_and_mirrors() {
        let c = cfg(3, 1);
        assert_eq!(c.label(2), (1, 3));
        assert_eq!(c.label(5), (-1, 3));
        assert_eq!(c.mirror_bin(c.bin_with_label(1, 3)), c.bin_with_label(-1, 3));
        assert_eq!(c.mirror_bin(c.bin_with_label(-1, 1)), c.bin_with_label(1, 1));
    }

    #[test]
    fn first_white_ball() {
        let c = cfg(1, 1);
        let s = BalancedGameState::new(c).apply_move(BallMove::white(c.bin_with_label(1, 1))).unwrap();
        assert_eq!(s.remaining_white(), 2);
        assert_eq!(s.bins()[0].white, 1);
        assert_eq!(s.mover(), Player::Second);
    }

    #[test]
    fn full_bins_and_exhausted_colours() {
        let c = cfg(1, 1);
        let mut s = BalancedGameState::new(c);
        for color in [Color::White, Color::Black, Color::White] {
            s = s.apply_move(BallMove { bin: 0, color }).unwrap();
        }
        assert_eq!(s.apply_move(BallMove::black(0)), Err(BalancedError::BinFull(0)));
        let s = s.apply_move(BallMove::white(1)).unwrap();
        assert_eq!(s.apply_move(BallMove::white(1)), Err(BalancedError::ColorExhausted(Color::White)));
        assert_eq!(s.apply_move(BallMove::black(7)), Err(BalancedError::NoSuchBin(7)));
    }

    #[test]
    fn last_ball_ends_the_game() {
        let c = cfg(1, 1);
        // bins (2w, 1b) and (1w, 2b)
        let moves = [
            BallMove::white(0),
            BallMove::black(1),
            BallMove::white(0),
            BallMove::black(1),
            BallMove::white(1),
            BallMove::black(0),
        ];
        let mut s = BalancedGameState::new(c);
        for mv in moves {
            assert!(s.score().is_err());
            s = s.apply_move(mv).unwrap();
        }
        assert!(s.is_over());
        assert_eq!(s.score().unwrap(), (1, 1));
        assert_eq!(s.apply_move(BallMove::white(0)), Err(BalancedError::GameOver));
    }

    #[test]
    fn every_bin_white_needs_more_white_than_exists() {
        let c = cfg(2, 2);
        let bins = vec![BinState { white: 3, black: 2 }; 4];
        assert_eq!(BalancedGameState::from_bins(c, bins), Err(BalancedError::ColorExhausted(Color::White)));
        // The most P1 can carry with equal colour counts is 2k - 1 bins.
        let mut bins = vec![BinState { white: 3, black: 2 }; 3];
        bins.push(BinState { white: 1, black: 4 });
        let s = BalancedGameState::from_bins(c, bins).unwrap();
        assert_eq!(s.score().unwrap(), (3, 1));
    }

    #[test]
    fn conservation_holds() {
        let c = cfg(2, 1);
        let mut s = BalancedGameState::new(c);
        for (i, mv) in [BallMove::white(3), BallMove::black(0), BallMove::black(3)].into_iter().enumerate() {
            s = s.apply_move(mv).unwrap();
            let w: u32 = s.bins().iter().map(|b| b.white).sum();
            let b: u32 = s.bins().iter().map(|b| b.black).sum();
            assert_eq!(w + s.remaining_white(), c.per_color());
            assert_eq!(b + s.remaining_black(), c.per_color());
            assert_eq!(s.placed(), i + 1);
        }
    }
}
