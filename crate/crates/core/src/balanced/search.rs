use std::collections::HashMap;

use super::audit::{self, AuditReport};
use super::{BalancedConfig, BalancedError, BalancedGameState, BallMove, BallStrategy, BinState, Color};
use crate::engine::Player;

/// Default cap on memoized states.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

/// Upper bound on the number of positions a search may memoize.
///
/// Positions are multisets of bin contents when `labeled` is false and
/// sequences of them otherwise.
pub fn state_space_estimate(config: BalancedConfig, labeled: bool) -> u128 {
    let cap = config.capacity() as u128;
    let per_bin = (cap + 1) * (cap + 2) / 2;
    let k = config.bins() as u32;
    if labeled {
        per_bin.saturating_pow(k)
    } else {
        // C(per_bin + k - 1, k)
        let mut c: u128 = 1;
        for i in 0..k as u128 {
            c = c.saturating_mul(per_bin + i) / (i + 1);
        }
        c
    }
}

fn check_budget(config: BalancedConfig, labeled: bool, budget: u128) -> Result<(), BalancedError> {
    let estimate = state_space_estimate(config, labeled);
    if estimate > budget {
        return Err(BalancedError::BudgetExceeded { estimate, budget });
    }
    Ok(())
}

fn canonical(state: &BalancedGameState) -> Vec<BinState> {
    let mut bins = state.bins().to_vec();
    bins.sort_unstable();
    bins
}

fn p1_bins(state: &BalancedGameState) -> u8 {
    state.score().expect("terminal").0 as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactValue {
    /// Bins P1 carries under optimal play by both sides.
    pub p1_bins: usize,
    pub states: usize,
}

/// Minimax over unlabeled positions: bins are interchangeable once nobody
/// tracks their labels.
struct Minimax {
    memo: HashMap<Vec<BinState>, u8>,
    budget: u128,
}

impl Minimax {
    fn value(&mut self, state: &BalancedGameState) -> Result<u8, BalancedError> {
        if state.is_over() {
            return Ok(p1_bins(state));
        }
        let key = canonical(state);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let cfg = state.config();
        let maximizing = state.mover() == Player::First;
        let target = if maximizing { cfg.bins() as u8 } else { 0 };
        let mut best: Option<u8> = None;
        for mv in distinct_moves(state) {
            let v = self.value(&state.apply_move(mv)?)?;
            if best.is_none_or(|b| if maximizing { v > b } else { v < b }) {
                best = Some(v);
            }
            if v == target {
                break;
            }
        }
        let best = best.expect("a live game has a legal move");
        self.memo.insert(key, best);
        if self.memo.len() as u128 > self.budget {
            return Err(BalancedError::BudgetExceeded { estimate: self.memo.len() as u128, budget: self.budget });
        }
        Ok(best)
    }
}

/// Legal moves up to bin symmetry: one representative per distinct content.
fn distinct_moves(state: &BalancedGameState) -> Vec<BallMove> {
    let mut seen: Vec<(Color, BinState)> = Vec::new();
    state
        .legal_moves()
        .into_iter()
        .filter(|mv| {
            let key = (mv.color, state.bins()[mv.bin]);
            if seen.contains(&key) {
                false
            } else {
                seen.push(key);
                true
            }
        })
        .collect()
}

/// Value of the game under optimal play by both players.
pub fn exact_solve(config: BalancedConfig, budget: u128) -> Result<ExactValue, BalancedError> {
    check_budget(config, false, budget)?;
    let mut search = Minimax { memo: HashMap::new(), budget };
    let v = search.value(&BalancedGameState::new(config))?;
    Ok(ExactValue { p1_bins: v as usize, states: search.memo.len() })
}

/// Optimal play for either seat, lowest (colour, bin) among equal moves.
pub struct ExactStrategy {
    search: Minimax,
}

impl ExactStrategy {
    pub fn new(config: BalancedConfig, budget: u128) -> Result<Self, BalancedError> {
        check_budget(config, false, budget)?;
        Ok(Self { search: Minimax { memo: HashMap::new(), budget } })
    }
}

impl BallStrategy for ExactStrategy {
    fn choose(&mut self, state: &BalancedGameState, _: Option<BallMove>) -> BallMove {
        let maximizing = state.mover() == Player::First;
        let mut best: Option<(u8, BallMove)> = None;
        for mv in state.legal_moves() {
            let v = self.search.value(&state.apply_move(mv).expect("legal")).expect("budget checked upfront");
            if best.is_none_or(|(b, _)| if maximizing { v > b } else { v < b }) {
                best = Some((v, mv));
            }
        }
        best.expect("a live game has a legal move").1
    }
}

#[derive(Debug, Clone)]
pub struct BestResponse {
    pub free_player: Player,
    /// Most bins the free player can guarantee against the fixed strategy.
    pub free_bins: usize,
    pub fixed_bins: usize,
    /// Free-player positions memoized.
    pub states: usize,
    /// Invariant checks on every edge of the search tree. Rows are empty.
    pub audit: AuditReport,
    /// One best-response play-out.
    pub line: Vec<(Player, BallMove)>,
}

struct Responder<'a> {
    fixed: &'a mut dyn BallStrategy,
    fixed_player: Player,
    memo: HashMap<Vec<BinState>, u8>,
    audit: AuditReport,
    budget: u128,
}

impl Responder<'_> {
    fn free_bins(&self, end: &BalancedGameState) -> u8 {
        let (p1, p2) = end.score().expect("terminal");
        match self.fixed_player {
            Player::First => p2 as u8,
            Player::Second => p1 as u8,
        }
    }

    /// Fixed player's reply, validated.
    fn reply(&mut self, state: &BalancedGameState, last: BallMove) -> Result<(BallMove, BalancedGameState), BalancedError> {
        let mv = self.fixed.choose(state, Some(last));
        let next = state.apply_move(mv).map_err(|e| BalancedError::IllegalStrategyMove {
            player: self.fixed_player,
            reason: format!("{mv}: {e}"),
        })?;
        Ok((mv, next))
    }

    /// Audits for the edge `state --free--> mid --fixed--> next`.
    fn audit_edge(&mut self, state: &BalancedGameState, mid: &BalancedGameState, next: &BalancedGameState, blacks: usize) {
        match self.fixed_player {
            Player::First => audit::check_f_round(state, mid, next, blacks, &mut self.audit),
            Player::Second => audit::check_mirror(next, &mut self.audit),
        }
        if next.is_over() {
            audit::check_final(next, &mut self.audit);
        }
    }

    /// Children of a free-player position: `(free move, fixed reply, result)`.
    fn children(
        &mut self,
        state: &BalancedGameState,
        blacks: usize,
    ) -> Result<Vec<(BallMove, Option<BallMove>, BalancedGameState, usize)>, BalancedError> {
        let mut out = Vec::new();
        for mv in state.legal_moves() {
            let mid = state.apply_move(mv)?;
            let blacks = blacks + usize::from(mv.color == Color::Black && self.fixed_player == Player::First);
            if mid.is_over() {
                audit::check_final(&mid, &mut self.audit);
                out.push((mv, None, mid, blacks));
                continue;
            }
            let (reply, next) = self.reply(&mid, mv)?;
            self.audit_edge(state, &mid, &next, blacks);
            out.push((mv, Some(reply), next, blacks));
        }
        Ok(out)
    }

    fn value(&mut self, state: &BalancedGameState, blacks: usize) -> Result<u8, BalancedError> {
        if state.is_over() {
            return Ok(self.free_bins(state));
        }
        if let Some(&v) = self.memo.get(state.bins()) {
            return Ok(v);
        }
        let mut best = 0;
        for (_, _, next, blacks) in self.children(state, blacks)? {
            best = best.max(self.value(&next, blacks)?);
        }
        self.memo.insert(state.bins().to_vec(), best);
        if self.memo.len() as u128 > self.budget {
            return Err(BalancedError::BudgetExceeded { estimate: self.memo.len() as u128, budget: self.budget });
        }
        Ok(best)
    }
}

/// Exact best response to a fixed strategy.
///
/// The fixed strategy must depend only on the position and the opponent's
/// last move, since positions are memoized. Searches every edge so that the
/// audits cover the whole reachable tree.
pub fn best_response_value(
    config: BalancedConfig,
    fixed: &mut dyn BallStrategy,
    fixed_player: Player,
    budget: u128,
) -> Result<BestResponse, BalancedError> {
    check_budget(config, true, budget)?;
    let mut r = Responder { fixed, fixed_player, memo: HashMap::new(), audit: AuditReport::default(), budget };
    let mut state = BalancedGameState::new(config);
    let mut line = Vec::new();
    if fixed_player == Player::First {
        let mv = r.fixed.choose(&state, None);
        state = state.apply_move(mv).map_err(|e| BalancedError::IllegalStrategyMove {
            player: Player::First,
            reason: format!("{mv}: {e}"),
        })?;
        line.push((Player::First, mv));
    }
    let root = state.clone();
    let free_bins = r.value(&root, 0)?;

    // Replay one optimal line through the memo.
    let free_player = fixed_player.other();
    let mut blacks = 0;
    while !state.is_over() {
        let mut chosen = None;
        for (mv, reply, next, b) in r.children(&state, blacks)? {
            if r.value(&next, b)? == free_bins {
                chosen = Some((mv, reply, next, b));
                break;
            }
        }
        let (mv, reply, next, b) = chosen.expect("memo value is attained by some child");
        line.push((free_player, mv));
        if let Some(reply) = reply {
            line.push((fixed_player, reply));
        }
        state = next;
        blacks = b;
    }
    Ok(BestResponse {
        free_player,
        free_bins: free_bins as usize,
        fixed_bins: config.bins() - free_bins as usize,
        states: r.memo.len(),
        audit: r.audit,
        line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balanced::{MirrorStrategy, Table1Strategy};

    #[test]
    fn estimates() {
        let c = BalancedConfig::new(1, 1).unwrap();
        // Capacity 3 gives 10 contents per bin.
        assert_eq!(state_space_estimate(c, true), 100);
        assert_eq!(state_space_estimate(c, false), 55);
    }

    #[test]
    fn budget_is_enforced() {
        let c = BalancedConfig::new(3, 5).unwrap();
        assert!(matches!(exact_solve(c, 1000), Err(BalancedError::BudgetExceeded { budget: 1000, .. })));
    }

    #[test]
    fn tiny_game_is_a_tie() {
        let v = exact_solve(BalancedConfig::new(1, 1).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.p1_bins, 1);
    }

    #[test]
    fn mirror_holds_p1_to_j() {
        let c = BalancedConfig::new(1, 2).unwrap();
        let br = best_response_value(c, &mut MirrorStrategy, Player::Second, DEFAULT_BUDGET).unwrap();
        assert_eq!(br.free_bins, 1);
        assert_eq!(br.audit.mirror_violations().count(), 0);
        assert_eq!(br.line.len(), c.balls());
    }

    #[test]
    fn table1_line_is_consistent() {
        let c = BalancedConfig::new(1, 2).unwrap();
        let br = best_response_value(c, &mut Table1Strategy, Player::First, DEFAULT_BUDGET).unwrap();
        let mut s = BalancedGameState::new(c);
        for (p, mv) in &br.line {
            assert_eq!(s.mover(), *p);
            s = s.apply_move(*mv).unwrap();
        }
        assert_eq!(s.score().unwrap().1, br.free_bins);
    }
}
