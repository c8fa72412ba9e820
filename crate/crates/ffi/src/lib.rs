//! C ABI over the utility-ghost library.
//!
//! Objects are opaque handles: create them with `*_new`, `*_parse` or
//! `*_load` and release them with the matching `*_free`. Fallible calls
//! return a [`GhostStatus`]; [`ghost_last_error`] copies the message of the
//! most recent failure on the calling thread. Districts and bins are
//! zero-based. Nothing unwinds across the boundary: a panic becomes
//! `GHOST_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use utility_ghost::balanced::{
    self, mirror_move, table1_move, BalancedConfig, BalancedError, BalancedGameState, BallMove, Color,
};
use utility_ghost::district::{
    enumerate_maps, ingest_state, parse_state, seats, Assign, DistrictError, DistrictLanguage, Districting, Party,
    StateInstance,
};
use utility_ghost::engine::{GhostError, Language, Solver};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInstance = 4,
    NoAdmissibleMap = 5,
    IllegalMove = 6,
    GameOver = 7,
    GameNotOver = 8,
    BudgetExceeded = 9,
    InvalidArgument = 10,
    Io = 11,
    Panic = 12,
}

pub const GHOST_PARTY_A: u32 = 0;
pub const GHOST_PARTY_B: u32 = 1;
pub const GHOST_COLOR_WHITE: u32 = 0;
pub const GHOST_COLOR_BLACK: u32 = 1;

/// "Put atom `atom` in district `district`."
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhostAssign {
    pub atom: usize,
    pub district: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GhostSeats {
    pub seats_a: usize,
    pub seats_b: usize,
    pub ties: usize,
}

/// One ball; `color` is `GHOST_COLOR_WHITE` or `GHOST_COLOR_BLACK`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhostBallMove {
    pub bin: usize,
    pub color: u32,
}

/// A parsed state instance with its admissible maps.
pub struct GhostInstance {
    instance: StateInstance,
    maps: Vec<Districting>,
}

/// A redistricting game in progress.
pub struct GhostGame {
    lang: DistrictLanguage,
    prefix: Vec<Assign>,
    solver: Solver<DistrictLanguage>,
}

/// A (j, m)-balanced balls-and-bins game in progress.
pub struct GhostBalanced {
    state: BalancedGameState,
    last: Option<BallMove>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

type Failure = (GhostStatus, String);

fn run(f: impl FnOnce() -> Result<(), Failure>) -> GhostStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return GhostStatus::Ok,
        Ok(Err(e)) => e,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (GhostStatus::Panic, msg)
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

fn null(what: &str) -> Failure {
    (GhostStatus::NullPointer, format!("{what} is null"))
}

fn district_err(e: DistrictError) -> Failure {
    let status = match e {
        DistrictError::Parse { .. } => GhostStatus::Parse,
        DistrictError::NoAdmissibleMap => GhostStatus::NoAdmissibleMap,
        DistrictError::Io(_) => GhostStatus::Io,
        DistrictError::Validation(_) | DistrictError::TooLarge(_) => GhostStatus::InvalidInstance,
    };
    (status, e.to_string())
}

fn ghost_err(e: GhostError) -> Failure {
    let status = match e {
        GhostError::GameOver => GhostStatus::GameOver,
        GhostError::InvalidPrefix(_) => GhostStatus::IllegalMove,
        _ => GhostStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn balanced_err(e: BalancedError) -> Failure {
    let status = match e {
        BalancedError::GameOver => GhostStatus::GameOver,
        BalancedError::GameNotOver => GhostStatus::GameNotOver,
        BalancedError::BudgetExceeded { .. } => GhostStatus::BudgetExceeded,
        BalancedError::InvalidConfig { .. } => GhostStatus::InvalidArgument,
        _ => GhostStatus::IllegalMove,
    };
    (status, e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (GhostStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn party(p: u32) -> Result<Party, Failure> {
    match p {
        GHOST_PARTY_A => Ok(Party::A),
        GHOST_PARTY_B => Ok(Party::B),
        _ => Err((GhostStatus::InvalidArgument, format!("party {p} is not GHOST_PARTY_A or GHOST_PARTY_B"))),
    }
}

fn color(c: u32) -> Result<Color, Failure> {
    match c {
        GHOST_COLOR_WHITE => Ok(Color::White),
        GHOST_COLOR_BLACK => Ok(Color::Black),
        _ => Err((GhostStatus::InvalidArgument, format!("colour {c} is not white or black"))),
    }
}

fn ball(mv: BallMove) -> GhostBallMove {
    let color = match mv.color {
        Color::White => GHOST_COLOR_WHITE,
        Color::Black => GHOST_COLOR_BLACK,
    };
    GhostBallMove { bin: mv.bin, color }
}

fn seat_struct(s: utility_ghost::district::SeatCount) -> GhostSeats {
    GhostSeats { seats_a: s.seats_a, seats_b: s.seats_b, ties: s.ties }
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ghost_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

fn new_instance(instance: StateInstance, dest: &mut *mut GhostInstance) -> Result<(), Failure> {
    let maps = enumerate_maps(&instance.graph, &instance.constraints).map_err(district_err)?;
    *dest = Box::into_raw(Box::new(GhostInstance { instance, maps }));
    Ok(())
}

/// Parse an instance from text in the state-file format and enumerate its maps.
///
/// # Safety
/// `text` must be a NUL-terminated string; `dest` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_instance_parse(text: *const c_char, dest: *mut *mut GhostInstance) -> GhostStatus {
    run(|| {
        let dest = out(dest, "dest")?;
        let inst = parse_state(str_arg(text, "text")?).map_err(district_err)?;
        new_instance(inst, dest)
    })
}

/// Load an instance from a `.state` file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `dest` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_instance_load(path: *const c_char, dest: *mut *mut GhostInstance) -> GhostStatus {
    run(|| {
        let dest = out(dest, "dest")?;
        let inst = ingest_state(str_arg(path, "path")?).map_err(district_err)?;
        new_instance(inst, dest)
    })
}

/// # Safety
/// `inst` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ghost_instance_free(inst: *mut GhostInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of atoms; 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_instance_num_atoms(inst: *const GhostInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.instance.graph.len())
}

/// Number of admissible maps, up to relabelling; 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_instance_num_maps(inst: *const GhostInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.maps.len())
}

/// Seats of map `index` (enumeration order).
///
/// # Safety
/// `inst` must be a live handle; `seats_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_instance_map_seats(
    inst: *const GhostInstance,
    index: usize,
    seats_out: *mut GhostSeats,
) -> GhostStatus {
    run(|| {
        let inst = get(inst, "inst")?;
        let dest = out(seats_out, "seats_out")?;
        let map = inst
            .maps
            .get(index)
            .ok_or_else(|| (GhostStatus::InvalidArgument, format!("map {index} of {}", inst.maps.len())))?;
        *dest = seat_struct(seats(map, inst.instance.graph.atoms()));
        Ok(())
    })
}

/// Start a game on `inst`; `first_party` is `GHOST_PARTY_A` or `GHOST_PARTY_B`.
/// The game keeps its own copy of everything it needs.
///
/// # Safety
/// `inst` must be a live handle; `dest` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_new(
    inst: *const GhostInstance,
    first_party: u32,
    dest: *mut *mut GhostGame,
) -> GhostStatus {
    run(|| {
        let inst = get(inst, "inst")?;
        let dest = out(dest, "dest")?;
        let p = party(first_party)?;
        let lang =
            DistrictLanguage::new(&inst.maps, inst.instance.graph.atoms(), inst.instance.constraints.k, p);
        *dest = Box::into_raw(Box::new(GhostGame { lang, prefix: Vec::new(), solver: Solver::new() }));
        Ok(())
    })
}

/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_free(game: *mut GhostGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Moves played so far.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_moves_played(game: *const GhostGame) -> usize {
    game.as_ref().map_or(0, |g| g.prefix.len())
}

/// Whether every atom has a district. False for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_is_over(game: *const GhostGame) -> bool {
    game.as_ref().is_some_and(|g| g.prefix.len() == g.lang.num_atoms())
}

/// Play a move for whoever is to move. Illegal moves return
/// `GHOST_STATUS_ILLEGAL_MOVE` and leave the game unchanged.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_play(game: *mut GhostGame, atom: usize, district: usize) -> GhostStatus {
    run(|| {
        let g = out(game, "game")?;
        if g.prefix.len() == g.lang.num_atoms() {
            return Err((GhostStatus::GameOver, "every atom is assigned".into()));
        }
        let mv = Assign::new(atom, district);
        if let Some(reason) = g.lang.explain(&g.prefix, mv).map_err(ghost_err)? {
            return Err((GhostStatus::IllegalMove, format!("{mv}: {reason}")));
        }
        g.prefix.push(mv);
        Ok(())
    })
}

/// Legal moves: writes up to `cap` into `buf` and the total into `count`.
///
/// # Safety
/// `game` must be a live handle; `buf` must hold `cap` entries (may be null
/// when `cap` is 0); `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_legal_moves(
    game: *const GhostGame,
    buf: *mut GhostAssign,
    cap: usize,
    count: *mut usize,
) -> GhostStatus {
    run(|| {
        let g = get(game, "game")?;
        let count = out(count, "count")?;
        let moves = g.lang.legal_moves(&g.prefix).map_err(ghost_err)?;
        *count = moves.len();
        if cap > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            for (i, m) in moves.iter().take(cap).enumerate() {
                *buf.add(i) = GhostAssign { atom: m.atom, district: m.district };
            }
        }
        Ok(())
    })
}

/// Optimal move for the player to move.
///
/// # Safety
/// `game` must be a live handle; `mv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_best_move(game: *mut GhostGame, mv: *mut GhostAssign) -> GhostStatus {
    run(|| {
        let g = out(game, "game")?;
        let dest = out(mv, "mv")?;
        let m = g.solver.best_move(&g.lang, &g.prefix).map_err(ghost_err)?;
        *dest = GhostAssign { atom: m.atom, district: m.district };
        Ok(())
    })
}

/// Seats of player 1's and player 2's parties under optimal play from here.
///
/// # Safety
/// `game` must be a live handle; `u1` and `u2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_value(game: *mut GhostGame, u1: *mut f64, u2: *mut f64) -> GhostStatus {
    run(|| {
        let g = out(game, "game")?;
        let (u1, u2) = (out(u1, "u1")?, out(u2, "u2")?);
        let v = g.solver.solve(&g.lang, &g.prefix).map_err(ghost_err)?;
        (*u1, *u2) = (v.u1, v.u2);
        Ok(())
    })
}

/// Final seats; `GHOST_STATUS_GAME_NOT_OVER` until every atom is placed.
///
/// # Safety
/// `game` must be a live handle; `seats_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_game_seats(game: *const GhostGame, seats_out: *mut GhostSeats) -> GhostStatus {
    run(|| {
        let g = get(game, "game")?;
        let dest = out(seats_out, "seats_out")?;
        if g.prefix.len() < g.lang.num_atoms() {
            return Err((GhostStatus::GameNotOver, format!("{} of {} atoms placed", g.prefix.len(), g.lang.num_atoms())));
        }
        *dest = seat_struct(g.lang.word_seats(&g.prefix).map_err(ghost_err)?);
        Ok(())
    })
}

/// New (j, m)-balanced game: 2j bins of 2m+1 slots, j(2m+1) balls of each colour.
///
/// # Safety
/// `dest` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_new(j: usize, m: usize, dest: *mut *mut GhostBalanced) -> GhostStatus {
    run(|| {
        let dest = out(dest, "dest")?;
        let config = BalancedConfig::new(j, m).map_err(balanced_err)?;
        *dest = Box::into_raw(Box::new(GhostBalanced { state: BalancedGameState::new(config), last: None }));
        Ok(())
    })
}

/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_free(game: *mut GhostBalanced) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Place a ball for whoever is to move.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_play(game: *mut GhostBalanced, mv: GhostBallMove) -> GhostStatus {
    run(|| {
        let g = out(game, "game")?;
        let m = BallMove { bin: mv.bin, color: color(mv.color)? };
        g.state = g.state.apply_move(m).map_err(balanced_err)?;
        g.last = Some(m);
        Ok(())
    })
}

/// Player 2's mirror reply to player 1's last ball.
///
/// # Safety
/// `game` must be a live handle; `mv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_mirror_move(game: *const GhostBalanced, mv: *mut GhostBallMove) -> GhostStatus {
    run(|| {
        let g = get(game, "game")?;
        let dest = out(mv, "mv")?;
        match (g.state.mover(), g.last) {
            (utility_ghost::engine::Player::Second, Some(last)) => {
                *dest = ball(mirror_move(&g.state.config(), last));
                Ok(())
            }
            _ => Err((GhostStatus::InvalidArgument, "mirroring answers player 1's ball".into())),
        }
    })
}

/// Player 1's selected-set move for the current position.
///
/// # Safety
/// `game` must be a live handle; `mv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_table1_move(game: *const GhostBalanced, mv: *mut GhostBallMove) -> GhostStatus {
    run(|| {
        let g = get(game, "game")?;
        let dest = out(mv, "mv")?;
        if g.state.is_over() {
            return Err((GhostStatus::GameOver, "every ball is placed".into()));
        }
        if g.state.mover() != utility_ghost::engine::Player::First {
            return Err((GhostStatus::InvalidArgument, "it is player 2's turn".into()));
        }
        *dest = ball(table1_move(&g.state, g.last));
        Ok(())
    })
}

/// Whether every ball is placed. False for a null handle.
///
/// # Safety
/// `game` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_is_over(game: *const GhostBalanced) -> bool {
    game.as_ref().is_some_and(|g| g.state.is_over())
}

/// Bins carried by each player once the game is over.
///
/// # Safety
/// `game` must be a live handle; `p1` and `p2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_score(game: *const GhostBalanced, p1: *mut usize, p2: *mut usize) -> GhostStatus {
    run(|| {
        let g = get(game, "game")?;
        let (p1, p2) = (out(p1, "p1")?, out(p2, "p2")?);
        (*p1, *p2) = g.state.score().map_err(balanced_err)?;
        Ok(())
    })
}

/// Bins player 1 carries under optimal play by both sides. Fails with
/// `GHOST_STATUS_BUDGET_EXCEEDED` when the state space is too large.
///
/// # Safety
/// `p1_bins` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ghost_balanced_exact_value(j: usize, m: usize, p1_bins: *mut usize) -> GhostStatus {
    run(|| {
        let dest = out(p1_bins, "p1_bins")?;
        let config = BalancedConfig::new(j, m).map_err(balanced_err)?;
        *dest = balanced::exact_solve(config, balanced::DEFAULT_BUDGET).map_err(balanced_err)?.p1_bins;
        Ok(())
    })
}
