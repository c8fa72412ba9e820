//! Utility Ghost: a turn-based redistricting protocol in which two partisan
//! players alternately assign atoms (counties, precincts, voters) to
//! districts, every partial assignment staying completable to an admissible
//! map.
//!
//! * [`engine`]: generic Utility Ghost over finite languages, exact solver.
//! * [`district`]: state graphs, admissible-map enumeration, seat counts and
//!   the redistricting language.
//! * [`balanced`]: the balls-and-bins game with equal vote counts, its
//!   mirror and selected-set strategies, audits and exact search.
//! * [`experiments`]: decomino votes-seats curves and the New Hampshire study.
//! * [`service`]: HTTP play service.

pub mod district;
pub mod balanced;
pub mod engine;
pub mod experiments;
pub mod service;
