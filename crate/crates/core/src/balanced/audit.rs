//! Lemma instrumentation for the balanced game.
//!
//! Everything here is recomputed from bin contents, deliberately without
//! calling into the strategy code: the audit exists to catch bugs in it.

use std::fmt;

use serde::Serialize;

use super::{BalancedConfig, BalancedGameState, BallMove, Color};
use crate::engine::Player;

/// Derived quantities of a position, taken immediately before a move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    /// Non-wasted white balls in the selected set.
    pub f: u32,
    /// Majority-white bins.
    pub l: usize,
    /// Empty bins.
    pub e: usize,
    /// Empty bins inside the selected set.
    pub a: usize,
    /// Empty bins outside it.
    pub b: usize,
    /// White balls in majority-white bins.
    pub w: u32,
    /// Most white balls in any selected bin.
    pub w1: u32,
    pub selected: Vec<usize>,
}

impl Snapshot {
    pub fn of(state: &BalancedGameState) -> Self {
        let cfg = state.config();
        let bins = state.bins();
        let majority: Vec<usize> = (0..bins.len()).filter(|&i| bins[i].white > bins[i].black).collect();

        // Majority-white bins by white count descending, then every other
        // bin by total ascending; stable sorts keep the lower index first.
        let mut whites = majority.clone();
        whites.sort_by_key(|&i| std::cmp::Reverse(bins[i].white));
        let mut rest: Vec<usize> = (0..bins.len()).filter(|i| !majority.contains(i)).collect();
        rest.sort_by_key(|&i| bins[i].total());
        let mut selected: Vec<usize> = whites.into_iter().chain(rest).take(cfg.j).collect();
        selected.sort_unstable();

        let empty = |i: &usize| bins[*i].white + bins[*i].black == 0;
        let e = (0..bins.len()).filter(empty).count();
        let a = selected.iter().filter(|i| empty(i)).count();
        Snapshot {
            f: selected.iter().map(|&i| bins[i].white.min(cfg.m as u32 + 1)).sum(),
            l: majority.len(),
            e,
            a,
            b: e - a,
            w: majority.iter().map(|&i| bins[i].white).sum(),
            w1: selected.iter().map(|&i| bins[i].white).max().unwrap_or(0),
            selected,
        }
    }

    /// Some selected bin is still short of a white majority.
    pub fn short(&self, state: &BalancedGameState) -> bool {
        let need = state.config().m as u32 + 1;
        self.selected.iter().any(|&i| state.bins()[i].white < need)
    }
}

/// One CSV line: the move made and the position it was made from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub round: usize,
    pub mover: u8,
    pub bin: usize,
    pub color: &'static str,
    pub f: u32,
    pub l: usize,
    pub e: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "W")]
    pub w: u32,
    pub w1: u32,
}

impl AuditRow {
    pub fn new(before: &BalancedGameState, mover: Player, mv: BallMove) -> Self {
        let s = Snapshot::of(before);
        AuditRow {
            round: before.round(),
            mover: mover.number(),
            bin: mv.bin,
            color: match mv.color {
                Color::White => "white",
                Color::Black => "black",
            },
            f: s.f,
            l: s.l,
            e: s.e,
            a: s.a,
            b: s.b,
            w: s.w,
            w1: s.w1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `f(r+1) < f(r)`.
    FDecreased { round: usize, before: u32, after: u32 },
    /// Strict-increase hypothesis held in round `round` but f grew by less than one.
    NotStrict { round: usize, before: u32, after: u32 },
    /// Early-game bound failed for `f(round)`.
    EarlyBound { round: usize, f: u32, bound: f64 },
    /// Mirror invariant (i) or (ii) failed after P2's move in `round`.
    Mirror { round: usize, detail: String },
    /// `f` reached `j(m+1)` but P1 carried fewer than `j` bins.
    Sufficiency { f: u32, p1_bins: usize },
}

impl Violation {
    pub fn is_mirror(&self) -> bool {
        matches!(self, Violation::Mirror { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FDecreased { round, before, after } => {
                write!(f, "round {round}: f fell from {before} to {after}")
            }
            Violation::NotStrict { round, before, after } => {
                write!(f, "round {round}: f went from {before} to {after}, expected a strict increase")
            }
            Violation::EarlyBound { round, f: v, bound } => {
                write!(f, "round {round}: f = {v} below early-game bound {bound:.3}")
            }
            Violation::Mirror { round, detail } => write!(f, "round {round}: {detail}"),
            Violation::Sufficiency { f: v, p1_bins } => {
                write!(f, "final f = {v} but P1 carried only {p1_bins} bins")
            }
        }
    }
}

/// Rows of a play-out plus every invariant that failed.
///
/// The f checks describe P1 following the selected-set strategy and the
/// mirror checks describe P2 mirroring; with other strategies they are
/// merely informative.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub violations: Vec<Violation>,
    /// Individual invariant evaluations performed.
    pub checks: usize,
}

impl AuditReport {
    pub fn f_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.is_mirror())
    }

    pub fn mirror_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.is_mirror())
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Right-hand side of the early-game bound, `(1 + (j-1)/(2j-1))(r-j) + 1`.
pub fn early_bound(j: usize, r: usize) -> f64 {
    let j = j as f64;
    (1.0 + (j - 1.0) / (2.0 * j - 1.0)) * (r as f64 - j) + 1.0
}

/// Checks on one round of P1 play, positions taken before P2's turn.
///
/// `prev` is the position before P2's move in round `r`, `p1_turn` the one
/// before P1's move in round `r+1`, and `next` the one before P2's move in
/// round `r+1`. `p2_blacks` counts P2's black balls in rounds `1..=r`.
pub fn check_f_round(
    prev: &BalancedGameState,
    p1_turn: &BalancedGameState,
    next: &BalancedGameState,
    p2_blacks: usize,
    report: &mut AuditReport,
) {
    let round = next.round();
    let before = Snapshot::of(prev).f;
    let after = Snapshot::of(next).f;
    report.checks += 1;
    if after < before {
        report.violations.push(Violation::FDecreased { round, before, after });
    }
    let p1 = Snapshot::of(p1_turn);
    if p1.short(p1_turn) && p1_turn.remaining_white() > 0 {
        report.checks += 1;
        if after < before + 1 {
            report.violations.push(Violation::NotStrict { round, before, after });
        }
    }
    check_early(next, p2_blacks, report);
}

/// Early-game bound at a position before P2's move in round `r+1`.
pub fn check_early(next: &BalancedGameState, p2_blacks: usize, report: &mut AuditReport) {
    let cfg = next.config();
    let r = next.round() - 1;
    if r > 2 * cfg.j && cfg.m > 2 * r && p2_blacks <= cfg.j {
        report.checks += 1;
        let f = Snapshot::of(next).f;
        let bound = early_bound(cfg.j, r);
        if (f as f64) < bound - 1e-9 {
            report.violations.push(Violation::EarlyBound { round: next.round(), f, bound });
        }
    }
}

/// Mirror invariants after P2's move.
pub fn check_mirror(after_p2: &BalancedGameState, report: &mut AuditReport) {
    let cfg: BalancedConfig = after_p2.config();
    let round = after_p2.round() - 1;
    report.checks += 1;
    if after_p2.remaining_white() != after_p2.remaining_black() {
        report.violations.push(Violation::Mirror {
            round,
            detail: format!(
                "{} white remain but {} black",
                after_p2.remaining_white(),
                after_p2.remaining_black()
            ),
        });
    }
    let bins = after_p2.bins();
    for i in 0..cfg.j {
        let (p, q) = (bins[i], bins[i + cfg.j]);
        report.checks += 1;
        if p.white != q.black || p.black != q.white {
            report.violations.push(Violation::Mirror {
                round,
                detail: format!("bin {i} holds {}w {}b, its mirror {}w {}b", p.white, p.black, q.white, q.black),
            });
        }
    }
}

/// Final-position check: `f = j(m+1)` forces at least `j` P1 bins.
pub fn check_final(end: &BalancedGameState, report: &mut AuditReport) {
    let cfg = end.config();
    let f = Snapshot::of(end).f;
    let p1_bins = end.bins().iter().filter(|b| b.white as usize > cfg.m).count();
    report.checks += 1;
    if f as usize == cfg.j * (cfg.m + 1) && p1_bins < cfg.j {
        report.violations.push(Violation::Sufficiency { f, p1_bins });
    }
}

/// Run every check over a finished play-out.
pub(crate) fn check_play(
    rows: &[AuditRow],
    moves: &[(Player, BallMove)],
    end: &BalancedGameState,
) -> AuditReport {
    let mut report = AuditReport { rows: rows.to_vec(), ..AuditReport::default() };
    let mut state = BalancedGameState::new(end.config());
    // Positions before each P2 move, and before each P1 move.
    let mut p2_turns = Vec::new();
    let mut p1_turns = Vec::new();
    let mut p2_blacks = vec![0usize];
    for &(player, mv) in moves {
        match player {
            Player::First => p1_turns.push(state.clone()),
            Player::Second => p2_turns.push(state.clone()),
        }
        state = state.apply_move(mv).expect("recorded moves were legal");
        if player == Player::Second {
            let blacks = p2_blacks.last().unwrap() + usize::from(mv.color == Color::Black);
            p2_blacks.push(blacks);
            check_mirror(&state, &mut report);
        }
    }
    for r in 1..p2_turns.len() {
        // p2_turns[r] is round r+1; p1_turns[r] precedes it.
        check_f_round(&p2_turns[r - 1], &p1_turns[r], &p2_turns[r], p2_blacks[r], &mut report);
    }
    check_final(end, &mut report);
    report
}
