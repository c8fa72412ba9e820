use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{seats, Atom, Districting, Party, SeatCount};
use crate::engine::{GhostError, Language, Utilities};

/// "Assign atom `atom` to district `district`."
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assign {
    pub atom: usize,
    pub district: usize,
}

impl Assign {
    pub fn new(atom: usize, district: usize) -> Self {
        Self { atom, district }
    }
}

impl fmt::Display for Assign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.atom, self.district)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IllegalReason {
    AtomOutOfRange,
    DistrictOutOfRange,
    AtomTaken,
    NoAdmissibleCompletion,
}

impl fmt::Display for IllegalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IllegalReason::AtomOutOfRange => "atom out of range",
            IllegalReason::DistrictOutOfRange => "district out of range",
            IllegalReason::AtomTaken => "atom taken",
            IllegalReason::NoAdmissibleCompletion => "no admissible completion",
        })
    }
}

/// Redistricting as a Utility Ghost language.
///
/// Words are orderings of `(atom, district)` assignments that realise one of
/// the labelled admissible maps; a prefix is legal iff some labelled map
/// agrees with every assignment in it. Player 1 scores the seats of
/// `first_party`, player 2 those of the other party.
#[derive(Debug, Clone)]
pub struct DistrictLanguage {
    n: usize,
    k: usize,
    /// District of each atom in each labelled map.
    labeled: Vec<Vec<u8>>,
    labeled_seats: Vec<SeatCount>,
    /// `support[atom * k + district]`: bitset of labelled maps putting the
    /// atom in that district.
    support: Vec<Vec<u64>>,
    words: usize,
    first_party: Party,
    label_symmetric: bool,
    constant_sum: Option<f64>,
}

impl DistrictLanguage {
    /// Expand unlabeled maps into all `k!` labellings. Panics if `maps` is empty
    /// or a map does not have exactly `k` districts over `atoms`.
    pub fn new(maps: &[Districting], atoms: &[Atom], k: usize, first_party: Party) -> Self {
        assert!(!maps.is_empty(), "language needs at least one admissible map");
        assert!(k <= u8::MAX as usize);
        let n = atoms.len();
        let perms = permutations(k);
        let mut labeled = Vec::with_capacity(maps.len() * perms.len());
        let mut labeled_seats = Vec::with_capacity(labeled.capacity());
        for map in maps {
            assert_eq!(map.assignment().len(), n);
            assert_eq!(map.num_districts(), k);
            let sc = seats(map, atoms);
            for perm in &perms {
                labeled.push(map.assignment().iter().map(|&d| perm[d] as u8).collect::<Vec<u8>>());
                labeled_seats.push(sc);
            }
        }
        let words_len = labeled.len().div_ceil(64);
        let mut support = vec![vec![0u64; words_len]; n * k];
        for (i, map) in labeled.iter().enumerate() {
            for (a, &d) in map.iter().enumerate() {
                support[a * k + d as usize][i / 64] |= 1 << (i % 64);
            }
        }
        let sums: BTreeSet<usize> = labeled_seats.iter().map(|s| s.seats_a + s.seats_b).collect();
        let constant_sum = (sums.len() == 1).then(|| *sums.iter().next().unwrap() as f64);
        Self {
            n,
            k,
            labeled,
            labeled_seats,
            support,
            words: words_len,
            first_party,
            label_symmetric: true,
            constant_sum,
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.n
    }

    pub fn num_districts(&self) -> usize {
        self.k
    }

    pub fn first_party(&self) -> Party {
        self.first_party
    }

    pub fn labeled_maps(&self) -> usize {
        self.labeled.len()
    }

    /// Turn off label canonicalisation in transposition keys.
    pub fn without_label_symmetry(mut self) -> Self {
        self.label_symmetric = false;
        self
    }

    /// District per atom, `None` where unassigned. Errors on duplicates or
    /// out-of-range symbols.
    pub fn partial(&self, prefix: &[Assign]) -> Result<Vec<Option<usize>>, (usize, IllegalReason)> {
        let mut partial = vec![None; self.n];
        for (i, s) in prefix.iter().enumerate() {
            if s.atom >= self.n {
                return Err((i, IllegalReason::AtomOutOfRange));
            }
            if s.district >= self.k {
                return Err((i, IllegalReason::DistrictOutOfRange));
            }
            if partial[s.atom].is_some() {
                return Err((i, IllegalReason::AtomTaken));
            }
            partial[s.atom] = Some(s.district);
        }
        Ok(partial)
    }

    /// Bitset of labelled maps consistent with the partial assignment.
    fn consistent(&self, partial: &[Option<usize>]) -> Vec<u64> {
        let mut live = vec![u64::MAX; self.words];
        let tail = self.labeled.len() % 64;
        if tail != 0 {
            live[self.words - 1] = (1u64 << tail) - 1;
        }
        for (a, d) in partial.iter().enumerate() {
            if let Some(d) = d {
                for (w, s) in live.iter_mut().zip(&self.support[a * self.k + d]) {
                    *w &= s;
                }
            }
        }
        live
    }

    fn first_live(live: &[u64]) -> Option<usize> {
        live.iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn check(&self, prefix: &[Assign]) -> Result<(Vec<Option<usize>>, Vec<u64>), GhostError> {
        let partial = self
            .partial(prefix)
            .map_err(|(i, why)| GhostError::InvalidPrefix(format!("symbol {} {}: {why}", i, prefix[i])))?;
        let live = self.consistent(&partial);
        if live.iter().all(|&w| w == 0) {
            return Err(GhostError::InvalidPrefix(format!(
                "{}: {}",
                show(prefix),
                IllegalReason::NoAdmissibleCompletion
            )));
        }
        Ok((partial, live))
    }

    /// An admissible labelled map extending `prefix` (the legality certificate).
    pub fn completion(&self, prefix: &[Assign]) -> Result<Vec<usize>, GhostError> {
        let (_, live) = self.check(prefix)?;
        let i = Self::first_live(&live).expect("checked non-empty");
        Ok(self.labeled[i].iter().map(|&d| d as usize).collect())
    }

    /// Why `mv` cannot follow the legal prefix `prefix`, or `None` if it can.
    pub fn explain(&self, prefix: &[Assign], mv: Assign) -> Result<Option<IllegalReason>, GhostError> {
        let (partial, live) = self.check(prefix)?;
        if mv.atom >= self.n {
            return Ok(Some(IllegalReason::AtomOutOfRange));
        }
        if mv.district >= self.k {
            return Ok(Some(IllegalReason::DistrictOutOfRange));
        }
        if partial[mv.atom].is_some() {
            return Ok(Some(IllegalReason::AtomTaken));
        }
        let hit = live
            .iter()
            .zip(&self.support[mv.atom * self.k + mv.district])
            .any(|(a, b)| a & b != 0);
        Ok((!hit).then_some(IllegalReason::NoAdmissibleCompletion))
    }

    /// Seat count of the map a complete word realises.
    pub fn word_seats(&self, word: &[Assign]) -> Result<SeatCount, GhostError> {
        let (partial, live) = self.check(word)?;
        if partial.iter().any(Option::is_none) {
            return Err(GhostError::InvalidPrefix(format!("{} is not a complete word", show(word))));
        }
        Ok(self.labeled_seats[Self::first_live(&live).unwrap()])
    }

    fn utilities_of(&self, sc: &SeatCount) -> Utilities {
        Utilities::new(sc.of(self.first_party) as f64, sc.of(self.first_party.other()) as f64)
    }
}

impl Language for DistrictLanguage {
    type Symbol = Assign;
    type Key = Vec<u8>;

    fn legal_moves(&self, prefix: &[Assign]) -> Result<Vec<Assign>, GhostError> {
        let (partial, live) = self.check(prefix)?;
        let mut moves = Vec::new();
        for (a, d) in partial.iter().enumerate() {
            if d.is_some() {
                continue;
            }
            for district in 0..self.k {
                let hit = live
                    .iter()
                    .zip(&self.support[a * self.k + district])
                    .any(|(x, y)| x & y != 0);
                if hit {
                    moves.push(Assign::new(a, district));
                }
            }
        }
        Ok(moves)
    }

    fn terminal_utilities(&self, prefix: &[Assign]) -> Result<Option<Utilities>, GhostError> {
        let (partial, live) = self.check(prefix)?;
        if partial.iter().any(Option::is_none) {
            return Ok(None);
        }
        let i = Self::first_live(&live).unwrap();
        Ok(Some(self.utilities_of(&self.labeled_seats[i])))
    }

    /// Partial assignment as a set (move order dropped), with district labels
    /// renamed by first appearance when label symmetry is on.
    fn state_key(&self, prefix: &[Assign]) -> Vec<u8> {
        let mut key = vec![u8::MAX; self.n];
        for s in prefix {
            key[s.atom] = s.district as u8;
        }
        if self.label_symmetric {
            let mut rename = vec![u8::MAX; self.k];
            let mut next = 0u8;
            for d in key.iter_mut().filter(|d| **d != u8::MAX) {
                let r = &mut rename[*d as usize];
                if *r == u8::MAX {
                    *r = next;
                    next += 1;
                }
                *d = *r;
            }
        }
        key
    }

    fn constant_sum(&self) -> Option<f64> {
        self.constant_sum
    }
}

fn show(prefix: &[Assign]) -> String {
    let items: Vec<String> = prefix.iter().map(Assign::to_string).collect();
    format!("[{}]", items.join(" "))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if current.len() == used.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                current.push(i);
                go(current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}
