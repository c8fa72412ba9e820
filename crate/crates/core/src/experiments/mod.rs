//! Votes–seats experiments on the decomino state and the New Hampshire case
//! study, including the two-district I-cut-you-freeze comparison.

use thiserror::Error;

use crate::district::{seats, Atom, DistrictError, DistrictLanguage, Districting, Party, SeatCount};
use crate::district::Assign;
use crate::engine::{GhostError, Solver};

mod fig1;
mod nh;

pub use fig1::{
    check_sampled, draw_outcome, lookup, run_decomino, unanimous_votes, write_records, Condition, DrawOutcome,
    ExperimentRecord, Mode, Statistic,
};
pub use nh::{run_nh, vote_shares, NhReport};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    District(#[from] DistrictError),
    #[error(transparent)]
    Ghost(#[from] GhostError),
    #[error("I-cut-you-freeze is only implemented for two districts, got {0}")]
    NotTwoDistricts(usize),
    #[error("{0}")]
    Io(String),
}

/// Result of optimal Utility Ghost play from the empty prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostOutcome {
    pub first_party: Party,
    pub word: Vec<Assign>,
    pub map: Districting,
    pub seats: SeatCount,
}

pub fn ghost_outcome(maps: &[Districting], atoms: &[Atom], first_party: Party) -> Result<GhostOutcome, ExperimentError> {
    let k = maps.first().ok_or(DistrictError::NoAdmissibleMap)?.num_districts();
    let lang = DistrictLanguage::new(maps, atoms, k, first_party);
    let word: Vec<Assign> = Solver::new().principal_variation(&lang, &[])?.into_iter().map(|(_, mv)| mv).collect();
    let mut assignment = vec![0; atoms.len()];
    for a in &word {
        assignment[a.atom] = a.district;
    }
    let map = Districting::from_assignment(&assignment);
    let seats = seats(&map, atoms);
    Ok(GhostOutcome { first_party, word, map, seats })
}

/// With two districts the first player simply picks the map; the second has
/// no say. Ties go to the earlier map in enumeration order.
pub fn icyf_k2(maps: &[Districting], atoms: &[Atom], first_party: Party) -> Result<Districting, ExperimentError> {
    let first = maps.first().ok_or(DistrictError::NoAdmissibleMap)?;
    if let Some(m) = maps.iter().find(|m| m.num_districts() != 2) {
        return Err(ExperimentError::NotTwoDistricts(m.num_districts()));
    }
    let mut best = first;
    for m in &maps[1..] {
        if seats(m, atoms).of(first_party) > seats(best, atoms).of(first_party) {
            best = m;
        }
    }
    Ok(best.clone())
}
