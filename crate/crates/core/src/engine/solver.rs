use std::collections::HashMap;

use super::{GhostError, Language, Player, Utilities};

/// Backward-induction value of a prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct GameValue<S> {
    pub u1: f64,
    pub u2: f64,
    /// Move chosen by the player to move; `None` at a complete word.
    pub principal_move: Option<S>,
}

impl<S> GameValue<S> {
    pub fn utilities(&self) -> Utilities {
        Utilities::new(self.u1, self.u2)
    }

    pub fn of(&self, player: Player) -> f64 {
        self.utilities().of(player)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub nodes: u64,
    pub table_hits: u64,
    pub table_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Exact,
    Lower,
    Upper,
}

/// Exact solver.
///
/// The mover maximises its own utility; ties go to the continuation that
/// minimises the opponent's utility, then to the smallest symbol. The
/// transposition table stores values only, so principal moves are always
/// recomputed from children and never depend on which prefix filled a slot.
#[derive(Debug)]
pub struct Solver<L: Language> {
    table: Option<HashMap<L::Key, Utilities>>,
    bounds: HashMap<L::Key, (f64, Bound)>,
    alpha_beta: Option<f64>,
    stats: SolverStats,
}

impl<L: Language> Default for Solver<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: Language> Solver<L> {
    /// Full-width search with memoisation.
    pub fn new() -> Self {
        Self {
            table: Some(HashMap::new()),
            bounds: HashMap::new(),
            alpha_beta: None,
            stats: SolverStats::default(),
        }
    }

    /// Full-width search without a transposition table.
    pub fn without_memo() -> Self {
        Self {
            table: None,
            ..Self::new()
        }
    }

    /// Alpha-beta search over `u1`; only sound for constant-sum languages.
    pub fn alpha_beta(lang: &L) -> Result<Self, GhostError> {
        let c = lang.constant_sum().ok_or(GhostError::NotConstantSum)?;
        Ok(Self {
            table: None,
            bounds: HashMap::new(),
            alpha_beta: Some(c),
            stats: SolverStats::default(),
        })
    }

    pub fn stats(&self) -> SolverStats {
        SolverStats {
            table_size: self.table.as_ref().map_or(self.bounds.len(), HashMap::len),
            ..self.stats
        }
    }

    pub fn solve(&mut self, lang: &L, prefix: &[L::Symbol]) -> Result<GameValue<L::Symbol>, GhostError> {
        let moves = lang.legal_moves(prefix)?;
        if moves.is_empty() {
            let u = terminal(lang, prefix)?;
            return Ok(GameValue { u1: u.u1, u2: u.u2, principal_move: None });
        }
        let mut path = prefix.to_vec();
        let (mv, u) = match self.alpha_beta {
            Some(c) => self.root_alpha_beta(lang, &mut path, moves, c)?,
            None => self.best_child(lang, &mut path, moves)?,
        };
        Ok(GameValue { u1: u.u1, u2: u.u2, principal_move: Some(mv) })
    }

    pub fn best_move(&mut self, lang: &L, prefix: &[L::Symbol]) -> Result<L::Symbol, GhostError> {
        self.solve(lang, prefix)?.principal_move.ok_or(GhostError::GameOver)
    }

    /// Moves of optimal play from `prefix` to the end of the game.
    pub fn principal_variation(
        &mut self,
        lang: &L,
        prefix: &[L::Symbol],
    ) -> Result<Vec<(Player, L::Symbol)>, GhostError> {
        let mut path = prefix.to_vec();
        let mut line = Vec::new();
        while let Some(mv) = self.solve(lang, &path)?.principal_move {
            line.push((Player::to_move(path.len()), mv.clone()));
            path.push(mv);
        }
        Ok(line)
    }

    fn best_child(
        &mut self,
        lang: &L,
        path: &mut Vec<L::Symbol>,
        moves: Vec<L::Symbol>,
    ) -> Result<(L::Symbol, Utilities), GhostError> {
        let mover = Player::to_move(path.len());
        let mut best: Option<(L::Symbol, Utilities)> = None;
        for mv in moves {
            path.push(mv.clone());
            let child = self.value(lang, path);
            path.pop();
            let child = child?;
            if best.as_ref().is_none_or(|(_, b)| prefers(mover, &child, b)) {
                best = Some((mv, child));
            }
        }
        Ok(best.expect("non-terminal prefix has at least one move"))
    }

    fn value(&mut self, lang: &L, path: &mut Vec<L::Symbol>) -> Result<Utilities, GhostError> {
        self.stats.nodes += 1;
        let key = self.table.as_ref().map(|_| lang.state_key(path));
        if let (Some(table), Some(key)) = (self.table.as_ref(), key.as_ref()) {
            if let Some(u) = table.get(key) {
                self.stats.table_hits += 1;
                return Ok(*u);
            }
        }
        let moves = lang.legal_moves(path)?;
        let u = if moves.is_empty() {
            terminal(lang, path)?
        } else {
            self.best_child(lang, path, moves)?.1
        };
        if let (Some(table), Some(key)) = (self.table.as_mut(), key) {
            table.insert(key, u);
        }
        Ok(u)
    }

    fn root_alpha_beta(
        &mut self,
        lang: &L,
        path: &mut Vec<L::Symbol>,
        moves: Vec<L::Symbol>,
        sum: f64,
    ) -> Result<(L::Symbol, Utilities), GhostError> {
        let maximizing = Player::to_move(path.len()) == Player::First;
        let mut best: Option<(L::Symbol, f64)> = None;
        for mv in moves {
            // A child that cannot beat the incumbent fails low and is skipped,
            // so the first of several equal children is kept.
            let (alpha, beta) = match (&best, maximizing) {
                (None, _) => (f64::NEG_INFINITY, f64::INFINITY),
                (Some((_, b)), true) => (*b, f64::INFINITY),
                (Some((_, b)), false) => (f64::NEG_INFINITY, *b),
            };
            path.push(mv.clone());
            let v = self.search(lang, path, alpha, beta);
            path.pop();
            let v = v?;
            let better = match &best {
                None => true,
                Some((_, b)) => (maximizing && v > *b) || (!maximizing && v < *b),
            };
            if better {
                best = Some((mv, v));
            }
        }
        let (mv, u1) = best.expect("non-terminal prefix has at least one move");
        Ok((mv, Utilities::new(u1, sum - u1)))
    }

    /// Fail-soft alpha-beta on `u1`.
    fn search(
        &mut self,
        lang: &L,
        path: &mut Vec<L::Symbol>,
        mut alpha: f64,
        mut beta: f64,
    ) -> Result<f64, GhostError> {
        self.stats.nodes += 1;
        let moves = lang.legal_moves(path)?;
        if moves.is_empty() {
            return Ok(terminal(lang, path)?.u1);
        }
        let key = lang.state_key(path);
        if let Some(&(v, bound)) = self.bounds.get(&key) {
            self.stats.table_hits += 1;
            match bound {
                Bound::Exact => return Ok(v),
                Bound::Lower if v >= beta => return Ok(v),
                Bound::Upper if v <= alpha => return Ok(v),
                _ => {}
            }
        }
        let (alpha0, beta0) = (alpha, beta);
        let maximizing = Player::to_move(path.len()) == Player::First;
        let mut v = if maximizing { f64::NEG_INFINITY } else { f64::INFINITY };
        for mv in moves {
            path.push(mv);
            let child = self.search(lang, path, alpha, beta);
            path.pop();
            let child = child?;
            if maximizing {
                v = v.max(child);
                alpha = alpha.max(v);
            } else {
                v = v.min(child);
                beta = beta.min(v);
            }
            if alpha >= beta {
                break;
            }
        }
        let bound = if v <= alpha0 {
            Bound::Upper
        } else if v >= beta0 {
            Bound::Lower
        } else {
            Bound::Exact
        };
        self.bounds.insert(key, (v, bound));
        Ok(v)
    }
}

fn terminal<L: Language>(lang: &L, prefix: &[L::Symbol]) -> Result<Utilities, GhostError> {
    lang.terminal_utilities(prefix)?
        .ok_or_else(|| GhostError::InvalidPrefix(format!("{prefix:?} has no moves but is not a word")))
}

/// Does `mover` strictly prefer `a` to `b`?
fn prefers(mover: Player, a: &Utilities, b: &Utilities) -> bool {
    let (own_a, own_b) = (a.of(mover), b.of(mover));
    let (opp_a, opp_b) = (a.of(mover.other()), b.of(mover.other()));
    own_a > own_b || (own_a == own_b && opp_a < opp_b)
}
