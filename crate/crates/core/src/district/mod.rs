//! State graphs, admissible districtings and the redistricting language.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod enumerate;
mod format;
mod graph;
mod language;

pub use enumerate::{enumerate_maps, is_admissible};
pub use format::{ingest_state, parse_state, StateInstance};
pub use graph::{Atom, StateGraph};
pub use language::{Assign, DistrictLanguage, IllegalReason};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistrictError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("no districting satisfies the constraints")]
    NoAdmissibleMap,
    #[error("{0} atoms exceeds the 64-atom enumeration limit")]
    TooLarge(usize),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Balance {
    /// Every district has exactly `n / k` atoms.
    ExactSize,
    /// Largest minus smallest district population is strictly below
    /// `tolerance` times the total population.
    PopulationDeviation { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub k: usize,
    pub balance: Balance,
    pub contiguity: bool,
}

impl Constraints {
    pub fn validate(&self, n: usize) -> Result<(), DistrictError> {
        if self.k == 0 {
            return Err(DistrictError::Validation("k must be at least 1".into()));
        }
        if self.k > n {
            return Err(DistrictError::Validation(format!("k = {} exceeds {n} atoms", self.k)));
        }
        match self.balance {
            Balance::ExactSize if n % self.k != 0 => Err(DistrictError::Validation(format!(
                "exact-size balance needs k = {} to divide n = {n}",
                self.k
            ))),
            Balance::PopulationDeviation { tolerance } if !(tolerance > 0.0 && tolerance <= 1.0) => {
                Err(DistrictError::Validation(format!("tolerance {tolerance} outside (0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

/// A complete assignment of atoms to districts, labelled canonically:
/// districts are numbered in order of their smallest atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Districting {
    assignment: Vec<usize>,
}

impl Districting {
    /// Canonicalise an arbitrary labelling.
    pub fn from_assignment(assignment: &[usize]) -> Self {
        let mut relabel: Vec<Option<usize>> = Vec::new();
        let mut next = 0;
        let assignment = assignment
            .iter()
            .map(|&d| {
                if relabel.len() <= d {
                    relabel.resize(d + 1, None);
                }
                *relabel[d].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Self { assignment }
    }

    pub fn from_parts(n: usize, parts: &[Vec<usize>]) -> Self {
        let mut assignment = vec![0; n];
        for (d, part) in parts.iter().enumerate() {
            for &a in part {
                assignment[a] = d;
            }
        }
        Self::from_assignment(&assignment)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn district_of(&self, atom: usize) -> usize {
        self.assignment[atom]
    }

    pub fn num_districts(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// Districts as sorted atom lists, ordered by smallest atom.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.num_districts()];
        for (a, &d) in self.assignment.iter().enumerate() {
            parts[d].push(a);
        }
        parts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SeatCount {
    pub seats_a: usize,
    pub seats_b: usize,
    pub ties: usize,
}

impl SeatCount {
    pub fn of(&self, party: Party) -> usize {
        match party {
            Party::A => self.seats_a,
            Party::B => self.seats_b,
        }
    }
}

/// Districts carried by each party; a district with equal votes counts for neither.
pub fn seats(map: &Districting, atoms: &[Atom]) -> SeatCount {
    let k = map.num_districts();
    let mut totals = vec![(0u64, 0u64); k];
    for (a, &d) in map.assignment().iter().enumerate() {
        totals[d].0 += atoms[a].votes_a;
        totals[d].1 += atoms[a].votes_b;
    }
    let mut sc = SeatCount::default();
    for (va, vb) in totals {
        match va.cmp(&vb) {
            std::cmp::Ordering::Greater => sc.seats_a += 1,
            std::cmp::Ordering::Less => sc.seats_b += 1,
            std::cmp::Ordering::Equal => sc.ties += 1,
        }
    }
    sc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(id: usize, a: u64, b: u64) -> Atom {
        Atom::new(id, format!("c{id}"), 1, a, b)
    }

    #[test]
    fn canonical_labels_follow_first_appearance() {
        let d = Districting::from_assignment(&[1, 1, 0, 2, 0]);
        assert_eq!(d.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(d.parts(), vec![vec![0, 1], vec![2, 4], vec![3]]);
        assert_eq!(Districting::from_parts(5, &d.parts()), d);
    }

    #[test]
    fn strict_majorities_and_ties() {
        let atoms: Vec<Atom> = (0..10)
            .map(|i| if [0, 1, 2, 5].contains(&i) { atom(i, 1, 0) } else { atom(i, 0, 1) })
            .collect();
        // 3A+2B | 1A+4B
        let map = Districting::from_assignment(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert_eq!(seats(&map, &atoms), SeatCount { seats_a: 1, seats_b: 1, ties: 0 });

        let tied = vec![atom(0, 1, 0), atom(1, 0, 1)];
        let map = Districting::from_assignment(&[0, 0]);
        assert_eq!(seats(&map, &tied), SeatCount { seats_a: 0, seats_b: 0, ties: 1 });
    }

    #[test]
    fn all_a_sweeps() {
        let atoms: Vec<Atom> = (0..6).map(|i| atom(i, 3, 1)).collect();
        let map = Districting::from_assignment(&[0, 1, 2, 0, 1, 2]);
        assert_eq!(seats(&map, &atoms).seats_a, 3);
    }

    #[test]
    fn constraint_validation() {
        let c = Constraints { k: 3, balance: Balance::ExactSize, contiguity: true };
        assert!(c.validate(10).is_err());
        assert!(c.validate(9).is_ok());
        let c = Constraints { k: 2, balance: Balance::PopulationDeviation { tolerance: 0.0 }, contiguity: true };
        assert!(c.validate(10).is_err());
        let c = Constraints { k: 0, balance: Balance::ExactSize, contiguity: true };
        assert!(c.validate(10).is_err());
    }
}
