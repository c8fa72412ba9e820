#ifndef UTILITY_GHOST_H
#define UTILITY_GHOST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GHOST_PARTY_A 0

#define GHOST_PARTY_B 1

#define GHOST_COLOR_WHITE 0

#define GHOST_COLOR_BLACK 1

typedef enum GhostStatus {
  GHOST_STATUS_OK = 0,
  GHOST_STATUS_NULL_POINTER = 1,
  GHOST_STATUS_INVALID_UTF8 = 2,
  GHOST_STATUS_PARSE = 3,
  GHOST_STATUS_INVALID_INSTANCE = 4,
  GHOST_STATUS_NO_ADMISSIBLE_MAP = 5,
  GHOST_STATUS_ILLEGAL_MOVE = 6,
  GHOST_STATUS_GAME_OVER = 7,
  GHOST_STATUS_GAME_NOT_OVER = 8,
  GHOST_STATUS_BUDGET_EXCEEDED = 9,
  GHOST_STATUS_INVALID_ARGUMENT = 10,
  GHOST_STATUS_IO = 11,
  GHOST_STATUS_PANIC = 12,
} GhostStatus;

/**
 * A (j, m)-balanced balls-and-bins game in progress.
 */
typedef struct GhostBalanced GhostBalanced;

/**
 * A redistricting game in progress.
 */
typedef struct GhostGame GhostGame;

/**
 * A parsed state instance with its admissible maps.
 */
typedef struct GhostInstance GhostInstance;

typedef struct GhostSeats {
  size_t seats_a;
  size_t seats_b;
  size_t ties;
} GhostSeats;

/**
 * "Put atom `atom` in district `district`."
 */
typedef struct GhostAssign {
  size_t atom;
  size_t district;
} GhostAssign;

/**
 * One ball; `color` is `GHOST_COLOR_WHITE` or `GHOST_COLOR_BLACK`.
 */
typedef struct GhostBallMove {
  size_t bin;
  uint32_t color;
} GhostBallMove;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message into `buf` (NUL-terminated, truncated to
 * `len - 1` bytes). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ghost_last_error(char *buf, size_t len);

/**
 * Parse an instance from text in the state-file format and enumerate its maps.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `dest` must be writable.
 */
enum GhostStatus ghost_instance_parse(const char *text, struct GhostInstance **dest);

/**
 * Load an instance from a `.state` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `dest` must be writable.
 */
enum GhostStatus ghost_instance_load(const char *path, struct GhostInstance **dest);

/**
 * # Safety
 * `inst` must be null or a handle from this library, not yet freed.
 */
void ghost_instance_free(struct GhostInstance *inst);

/**
 * Number of atoms; 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t ghost_instance_num_atoms(const struct GhostInstance *inst);

/**
 * Number of admissible maps, up to relabelling; 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t ghost_instance_num_maps(const struct GhostInstance *inst);

/**
 * Seats of map `index` (enumeration order).
 *
 * # Safety
 * `inst` must be a live handle; `seats_out` must be writable.
 */
enum GhostStatus ghost_instance_map_seats(const struct GhostInstance *inst,
                                          size_t index,
                                          struct GhostSeats *seats_out);

/**
 * Start a game on `inst`; `first_party` is `GHOST_PARTY_A` or `GHOST_PARTY_B`.
 * The game keeps its own copy of everything it needs.
 *
 * # Safety
 * `inst` must be a live handle; `dest` must be writable.
 */
enum GhostStatus ghost_game_new(const struct GhostInstance *inst,
                                uint32_t first_party,
                                struct GhostGame **dest);

/**
 * # Safety
 * `game` must be null or a live handle.
 */
void ghost_game_free(struct GhostGame *game);

/**
 * Moves played so far.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t ghost_game_moves_played(const struct GhostGame *game);

/**
 * Whether every atom has a district. False for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
bool ghost_game_is_over(const struct GhostGame *game);

/**
 * Play a move for whoever is to move. Illegal moves return
 * `GHOST_STATUS_ILLEGAL_MOVE` and leave the game unchanged.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum GhostStatus ghost_game_play(struct GhostGame *game, size_t atom, size_t district);

/**
 * Legal moves: writes up to `cap` into `buf` and the total into `count`.
 *
 * # Safety
 * `game` must be a live handle; `buf` must hold `cap` entries (may be null
 * when `cap` is 0); `count` must be writable.
 */
enum GhostStatus ghost_game_legal_moves(const struct GhostGame *game,
                                        struct GhostAssign *buf,
                                        size_t cap,
                                        size_t *count);

/**
 * Optimal move for the player to move.
 *
 * # Safety
 * `game` must be a live handle; `mv` must be writable.
 */
enum GhostStatus ghost_game_best_move(struct GhostGame *game, struct GhostAssign *mv);

/**
 * Seats of player 1's and player 2's parties under optimal play from here.
 *
 * # Safety
 * `game` must be a live handle; `u1` and `u2` must be writable.
 */
enum GhostStatus ghost_game_value(struct GhostGame *game, double *u1, double *u2);

/**
 * Final seats; `GHOST_STATUS_GAME_NOT_OVER` until every atom is placed.
 *
 * # Safety
 * `game` must be a live handle; `seats_out` must be writable.
 */
enum GhostStatus ghost_game_seats(const struct GhostGame *game, struct GhostSeats *seats_out);

/**
 * New (j, m)-balanced game: 2j bins of 2m+1 slots, j(2m+1) balls of each colour.
 *
 * # Safety
 * `dest` must be writable.
 */
enum GhostStatus ghost_balanced_new(size_t j, size_t m, struct GhostBalanced **dest);

/**
 * # Safety
 * `game` must be null or a live handle.
 */
void ghost_balanced_free(struct GhostBalanced *game);

/**
 * Place a ball for whoever is to move.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum GhostStatus ghost_balanced_play(struct GhostBalanced *game, struct GhostBallMove mv);

/**
 * Player 2's mirror reply to player 1's last ball.
 *
 * # Safety
 * `game` must be a live handle; `mv` must be writable.
 */
enum GhostStatus ghost_balanced_mirror_move(const struct GhostBalanced *game,
                                            struct GhostBallMove *mv);

/**
 * Player 1's selected-set move for the current position.
 *
 * # Safety
 * `game` must be a live handle; `mv` must be writable.
 */
enum GhostStatus ghost_balanced_table1_move(const struct GhostBalanced *game,
                                            struct GhostBallMove *mv);

/**
 * Whether every ball is placed. False for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
bool ghost_balanced_is_over(const struct GhostBalanced *game);

/**
 * Bins carried by each player once the game is over.
 *
 * # Safety
 * `game` must be a live handle; `p1` and `p2` must be writable.
 */
enum GhostStatus ghost_balanced_score(const struct GhostBalanced *game, size_t *p1, size_t *p2);

/**
 * Bins player 1 carries under optimal play by both sides. Fails with
 * `GHOST_STATUS_BUDGET_EXCEEDED` when the state space is too large.
 *
 * # Safety
 * `p1_bins` must be writable.
 */
enum GhostStatus ghost_balanced_exact_value(size_t j, size_t m, size_t *p1_bins);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UTILITY_GHOST_H */
