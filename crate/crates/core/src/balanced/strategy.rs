use rand::seq::IndexedRandom;
use rand::Rng;

use super::audit::{self, AuditReport, AuditRow};
use super::{BalancedConfig, BalancedError, BalancedGameState, BallMove, Color};
use crate::engine::Player;

/// A player in the balanced game.
///
/// Strategies used with [`super::best_response_value`] must be functions of
/// `(state, last_opponent)` alone.
pub trait BallStrategy {
    fn choose(&mut self, state: &BalancedGameState, last_opponent: Option<BallMove>) -> BallMove;
}

/// The `j` selected bins before a move: the (up to `j`) majority-white bins
/// with the most white balls, padded with the bins holding the fewest balls.
/// Ties go to the lower index. Returned in ascending index order.
pub fn select_s(state: &BalancedGameState) -> Vec<usize> {
    let j = state.config().j;
    let bins = state.bins();
    let mut chosen = vec![false; bins.len()];
    let mut picked = 0;
    while picked < j {
        // Best remaining majority-white bin, else emptiest remaining bin.
        let mut best: Option<usize> = None;
        for (i, b) in bins.iter().enumerate() {
            if chosen[i] || !b.is_majority_white() {
                continue;
            }
            if best.is_none_or(|k| b.white > bins[k].white) {
                best = Some(i);
            }
        }
        if best.is_none() {
            for (i, b) in bins.iter().enumerate() {
                if chosen[i] {
                    continue;
                }
                if best.is_none_or(|k| b.total() < bins[k].total()) {
                    best = Some(i);
                }
            }
        }
        chosen[best.expect("2j bins always cover j picks")] = true;
        picked += 1;
    }
    chosen.iter().enumerate().filter(|(_, c)| **c).map(|(i, _)| i).collect()
}

/// White balls in the selected bins that count towards a majority, at most
/// `m+1` per bin.
pub fn non_wasted_white(state: &BalancedGameState) -> u32 {
    let cap = state.config().majority();
    select_s(state).iter().map(|&i| state.bins()[i].white.min(cap)).sum()
}

/// P2's reply: the opposite colour in the mirrored bin.
pub fn mirror_move(config: &BalancedConfig, p1_last: BallMove) -> BallMove {
    BallMove { bin: config.mirror_bin(p1_last.bin), color: p1_last.color.opposite() }
}

/// White into the fullest selected bin still short of `m+1` whites.
fn default_move(state: &BalancedGameState, selected: &[usize]) -> Option<BallMove> {
    let cfg = state.config();
    let bins = state.bins();
    let mut best: Option<usize> = None;
    for &i in selected {
        let b = bins[i];
        if b.white >= cfg.majority() || b.total() >= cfg.capacity() {
            continue;
        }
        if best.is_none_or(|k| b.total() > bins[k].total()) {
            best = Some(i);
        }
    }
    best.map(BallMove::white)
}

fn fallback(state: &BalancedGameState) -> BallMove {
    *state.legal_moves().first().expect("fallback requested in a finished game")
}

/// Player 1's selected-set strategy.
pub fn table1_move(state: &BalancedGameState, p2_last: Option<BallMove>) -> BallMove {
    let cfg = state.config();
    let selected = select_s(state);
    let short = selected.iter().any(|&i| state.bins()[i].white < cfg.majority());
    if !short || state.remaining_white() == 0 {
        return fallback(state);
    }
    let default = || default_move(state, &selected).unwrap_or_else(|| fallback(state));
    let last = match p2_last {
        Some(mv) if state.round() > 1 => mv,
        _ => return default(),
    };
    if last.color == Color::White {
        return default();
    }

    let b = last.bin;
    let bin = state.bins()[b];
    let empty_selected = selected.iter().copied().find(|&i| state.bins()[i].is_empty());
    if bin.total() == 1 {
        if let Some(e) = empty_selected {
            return BallMove::white(e);
        }
    }
    let before_p2 = state.without(last);
    if select_s(&before_p2).contains(&b) && bin.white < cfg.majority() && bin.total() < cfg.capacity() {
        return BallMove::white(b);
    }
    default()
}

pub struct Table1Strategy;

impl BallStrategy for Table1Strategy {
    fn choose(&mut self, state: &BalancedGameState, last_opponent: Option<BallMove>) -> BallMove {
        table1_move(state, last_opponent)
    }
}

pub struct MirrorStrategy;

impl BallStrategy for MirrorStrategy {
    fn choose(&mut self, state: &BalancedGameState, last_opponent: Option<BallMove>) -> BallMove {
        let last = last_opponent.expect("mirror strategy only moves second");
        let mv = mirror_move(&state.config(), last);
        debug_assert!(state.check_move(mv).is_ok(), "mirror reply {mv} illegal in {state:?}");
        mv
    }
}

pub struct FirstLegalBalls;

impl BallStrategy for FirstLegalBalls {
    fn choose(&mut self, state: &BalancedGameState, _: Option<BallMove>) -> BallMove {
        fallback(state)
    }
}

pub struct RandomBalls<R> {
    rng: R,
}

impl<R: Rng> RandomBalls<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<R: Rng> BallStrategy for RandomBalls<R> {
    fn choose(&mut self, state: &BalancedGameState, _: Option<BallMove>) -> BallMove {
        *state.legal_moves().choose(&mut self.rng).expect("no legal move in a live game")
    }
}

#[derive(Debug, Clone)]
pub struct BalancedPlayOut {
    pub final_state: BalancedGameState,
    pub score: (usize, usize),
    pub moves: Vec<(Player, BallMove)>,
    pub audit: AuditReport,
}

/// Play a full game, auditing every position before each move.
pub fn play_balanced(
    config: BalancedConfig,
    p1: &mut dyn BallStrategy,
    p2: &mut dyn BallStrategy,
) -> Result<BalancedPlayOut, BalancedError> {
    let mut state = BalancedGameState::new(config);
    let mut moves: Vec<(Player, BallMove)> = Vec::with_capacity(config.balls());
    let mut rows: Vec<AuditRow> = Vec::with_capacity(config.balls());
    let mut last: Option<BallMove> = None;
    while !state.is_over() {
        let mover = state.mover();
        let mv = match mover {
            Player::First => p1.choose(&state, last),
            Player::Second => p2.choose(&state, last),
        };
        let next = state.apply_move(mv).map_err(|e| BalancedError::IllegalStrategyMove {
            player: mover,
            reason: format!("{mv}: {e}"),
        })?;
        rows.push(AuditRow::new(&state, mover, mv));
        moves.push((mover, mv));
        last = Some(mv);
        state = next;
    }
    let score = state.score()?;
    let audit = audit::check_play(&rows, &moves, &state);
    Ok(BalancedPlayOut { final_state: state, score, moves, audit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balanced::BinState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(j: usize, m: usize) -> BalancedConfig {
        BalancedConfig::new(j, m).unwrap()
    }

    fn state(j: usize, m: usize, bins: &[(u32, u32)]) -> BalancedGameState {
        BalancedGameState::from_bins(cfg(j, m), bins.iter().map(|&(white, black)| BinState { white, black }).collect())
            .unwrap()
    }

    #[test]
    fn fresh_selection_is_the_first_bins() {
        assert_eq!(select_s(&BalancedGameState::new(cfg(3, 2))), vec![0, 1, 2]);
    }

    #[test]
    fn selection_prefers_most_white() {
        let s = state(2, 2, &[(3, 0), (2, 0), (0, 0), (0, 0)]);
        assert_eq!(select_s(&s), vec![0, 1]);
    }

    #[test]
    fn selection_pads_with_emptiest() {
        // One majority-white bin; the others hold 5, 1 and 2 balls.
        let s = state(2, 3, &[(2, 0), (1, 4), (0, 1), (1, 1)]);
        assert_eq!(select_s(&s), vec![0, 2]);
    }

    #[test]
    fn f_caps_each_bin() {
        assert_eq!(non_wasted_white(&BalancedGameState::new(cfg(2, 2))), 0);
        let m = 3;
        let s = state(1, m, &[(m as u32 + 3, 0), (0, 0)]);
        assert_eq!(non_wasted_white(&s), m as u32 + 1);
    }

    #[test]
    fn mirror_replies() {
        let c = cfg(3, 2);
        let mv = mirror_move(&c, BallMove::white(c.bin_with_label(1, 3)));
        assert_eq!(mv, BallMove::black(c.bin_with_label(-1, 3)));
        let mv = mirror_move(&c, BallMove::black(c.bin_with_label(-1, 1)));
        assert_eq!(mv, BallMove::white(c.bin_with_label(1, 1)));
    }

    #[test]
    fn table1_opens_in_bin_zero() {
        for (j, m) in [(1, 1), (2, 5), (3, 2)] {
            assert_eq!(table1_move(&BalancedGameState::new(cfg(j, m)), None), BallMove::white(0));
        }
    }

    #[test]
    fn table1_answers_a_lone_black_with_an_empty_selected_bin() {
        let c = cfg(2, 3);
        // Round 1: P1 white in 0; P2 black into empty bin 3, outside S = {0, 1}.
        let s = BalancedGameState::new(c)
            .apply_move(BallMove::white(0))
            .unwrap()
            .apply_move(BallMove::black(3))
            .unwrap();
        assert_eq!(select_s(&s), vec![0, 1]);
        assert_eq!(table1_move(&s, Some(BallMove::black(3))), BallMove::white(1));
    }

    #[test]
    fn table1_restores_a_tied_selected_bin() {
        let c = cfg(2, 3);
        // Before P2's move bin 0 holds 2W 1B and is selected; P2 ties it.
        let before = state(2, 3, &[(2, 1), (1, 0), (0, 1), (1, 0)]);
        assert!(select_s(&before).contains(&0));
        let s = before.apply_move(BallMove::black(0)).unwrap();
        assert_eq!(s.bins()[0], BinState { white: 2, black: 2 });
        assert_eq!(table1_move(&s, Some(BallMove::black(0))), BallMove::white(0));
        let _ = c;
    }

    #[test]
    fn table1_plays_white_while_white_remains() {
        let c = cfg(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let out = play_balanced(c, &mut Table1Strategy, &mut RandomBalls::new(&mut rng)).unwrap();
            let mut s = BalancedGameState::new(c);
            for (p, mv) in &out.moves {
                if *p == Player::First && s.remaining_white() > 0 {
                    assert_eq!(mv.color, Color::White);
                }
                s = s.apply_move(*mv).unwrap();
            }
        }
    }

    #[test]
    fn mirror_forces_ties_against_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (j, m) in [(1, 1), (2, 2), (3, 1)] {
            for _ in 0..30 {
                let out = play_balanced(cfg(j, m), &mut RandomBalls::new(&mut rng), &mut MirrorStrategy).unwrap();
                assert_eq!(out.score, (j, j));
                assert_eq!(out.audit.mirror_violations().count(), 0);
            }
        }
    }
}
