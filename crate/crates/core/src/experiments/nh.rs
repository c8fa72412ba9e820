use std::fmt;

use super::{ghost_outcome, icyf_k2, ExperimentError, GhostOutcome};
use crate::district::{enumerate_maps, seats, Districting, Party, SeatCount, StateGraph, StateInstance};

/// Statewide percentages of all votes cast for A and for B.
pub fn vote_shares(graph: &StateGraph) -> (f64, f64) {
    let (mut a, mut b, mut other) = (0u64, 0u64, 0u64);
    for atom in graph.atoms() {
        a += atom.votes_a;
        b += atom.votes_b;
        other += atom.votes_other;
    }
    let total = (a + b + other) as f64;
    (100.0 * a as f64 / total, 100.0 * b as f64 / total)
}

#[derive(Debug, Clone)]
pub struct NhReport {
    pub name: String,
    /// Display names of A and B.
    pub parties: [String; 2],
    pub maps: Vec<(Districting, SeatCount)>,
    /// Optimal play with A first, then with B first.
    pub ghost: [GhostOutcome; 2],
    /// The first player's pick under I-cut-you-freeze, A first then B first.
    pub icyf: [(Party, Districting, SeatCount); 2],
    pub shares: (f64, f64),
    atom_names: Vec<String>,
}

impl NhReport {
    pub fn party_name(&self, p: Party) -> &str {
        match p {
            Party::A => &self.parties[0],
            Party::B => &self.parties[1],
        }
    }

    /// Index of `map` in [`Self::maps`].
    pub fn map_index(&self, map: &Districting) -> Option<usize> {
        self.maps.iter().position(|(m, _)| m == map)
    }

    fn show_map(&self, map: &Districting) -> String {
        map.parts()
            .iter()
            .map(|p| format!("{{{}}}", p.iter().map(|&i| self.atom_names[i].as_str()).collect::<Vec<_>>().join(", ")))
            .collect::<Vec<_>>()
            .join(" | ")
    }

    fn show_seats(&self, s: &SeatCount) -> String {
        format!("{} {} – {} {}", self.parties[0], s.seats_a, s.seats_b, self.parties[1])
    }
}

impl fmt::Display for NhReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(
            f,
            "statewide share: {} {:.2}%, {} {:.2}%",
            self.parties[0], self.shares.0, self.parties[1], self.shares.1
        )?;
        writeln!(f, "\nadmissible maps: {}", self.maps.len())?;
        for (i, (m, s)) in self.maps.iter().enumerate() {
            writeln!(f, "  map {i}: {}  ->  {}", self.show_map(m), self.show_seats(s))?;
        }
        writeln!(f, "\nUtility Ghost, optimal play:")?;
        for g in &self.ghost {
            let idx = self.map_index(&g.map).map_or("?".into(), |i| i.to_string());
            writeln!(f, "  {} first: map {idx}  ->  {}", self.party_name(g.first_party), self.show_seats(&g.seats))?;
        }
        writeln!(f, "\nI-cut-you-freeze (k = 2):")?;
        for (p, m, s) in &self.icyf {
            let idx = self.map_index(m).map_or("?".into(), |i| i.to_string());
            writeln!(f, "  {} first: map {idx}  ->  {}", self.party_name(*p), self.show_seats(s))?;
        }
        Ok(())
    }
}

pub fn run_nh(instance: &StateInstance) -> Result<NhReport, ExperimentError> {
    let atoms = instance.graph.atoms();
    let maps = enumerate_maps(&instance.graph, &instance.constraints)?;
    let scored = maps.iter().map(|m| (m.clone(), seats(m, atoms))).collect();
    let ghost = [ghost_outcome(&maps, atoms, Party::A)?, ghost_outcome(&maps, atoms, Party::B)?];
    let icyf = [Party::A, Party::B].map(|p| icyf_k2(&maps, atoms, p).map(|m| (p, m.clone(), seats(&m, atoms))));
    let [a, b] = icyf;
    Ok(NhReport {
        name: instance.name.clone(),
        parties: instance.parties.clone(),
        maps: scored,
        ghost,
        icyf: [a?, b?],
        shares: vote_shares(&instance.graph),
        atom_names: atoms.iter().map(|a| a.name.clone()).collect(),
    })
}
