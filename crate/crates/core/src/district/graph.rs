use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::DistrictError;

/// An indivisible unit of the state (county, precinct, voter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: usize,
    pub name: String,
    pub population: u64,
    pub votes_a: u64,
    pub votes_b: u64,
    /// Votes for anyone else; only used for vote shares.
    #[serde(default)]
    pub votes_other: u64,
    #[serde(default)]
    pub coords: Option<(f64, f64)>,
}

impl Atom {
    pub fn new(id: usize, name: impl Into<String>, population: u64, votes_a: u64, votes_b: u64) -> Self {
        Self {
            id,
            name: name.into(),
            population,
            votes_a,
            votes_b,
            votes_other: 0,
            coords: None,
        }
    }
}

/// Atoms plus a symmetric, loop-free adjacency relation; connected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateGraph {
    atoms: Vec<Atom>,
    adjacency: Vec<Vec<usize>>,
}

impl StateGraph {
    /// Build from undirected edges.
    pub fn new(atoms: Vec<Atom>, edges: &[(usize, usize)]) -> Result<Self, DistrictError> {
        let arcs: Vec<(usize, usize)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        Self::from_arcs(atoms, &arcs)
    }

    /// Build from directed arcs, which must come in reciprocal pairs.
    pub fn from_arcs(atoms: Vec<Atom>, arcs: &[(usize, usize)]) -> Result<Self, DistrictError> {
        let n = atoms.len();
        if n == 0 {
            return Err(DistrictError::Validation("state has no atoms".into()));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if atom.id != i {
                return Err(DistrictError::Validation(format!(
                    "atom ids must be dense and ordered: position {i} holds id {}",
                    atom.id
                )));
            }
        }
        let mut sets = vec![BTreeSet::new(); n];
        for &(a, b) in arcs {
            if a >= n || b >= n {
                return Err(DistrictError::Validation(format!("edge {a}-{b} references a missing atom")));
            }
            if a == b {
                return Err(DistrictError::Validation(format!("self-loop on atom {a}")));
            }
            sets[a].insert(b);
        }
        for (a, set) in sets.iter().enumerate() {
            if let Some(&b) = set.iter().find(|&&b| !sets[b].contains(&a)) {
                return Err(DistrictError::Validation(format!(
                    "adjacency is not symmetric: {a} lists {b} but {b} does not list {a}"
                )));
            }
        }
        let graph = Self {
            atoms,
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        };
        if !graph.is_connected(graph.full_mask()?) {
            return Err(DistrictError::Validation("state graph is not connected".into()));
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn neighbors(&self, atom: usize) -> &[usize] {
        &self.adjacency[atom]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    pub fn total_population(&self) -> u64 {
        self.atoms.iter().map(|a| a.population).sum()
    }

    pub fn atom_by_name(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    /// Copy with every atom's A and B votes exchanged.
    pub fn color_swapped(&self) -> Self {
        let mut g = self.clone();
        for a in &mut g.atoms {
            std::mem::swap(&mut a.votes_a, &mut a.votes_b);
        }
        g
    }

    /// Same graph with replaced vote counts `(votes_a, votes_b)` per atom.
    pub fn with_votes(&self, votes: &[(u64, u64)]) -> Self {
        let mut g = self.clone();
        for (a, &(va, vb)) in g.atoms.iter_mut().zip(votes) {
            a.votes_a = va;
            a.votes_b = vb;
        }
        g
    }

    pub(crate) fn full_mask(&self) -> Result<u64, DistrictError> {
        match self.len() {
            n if n > 64 => Err(DistrictError::TooLarge(n)),
            64 => Ok(u64::MAX),
            n => Ok((1u64 << n) - 1),
        }
    }

    pub(crate) fn neighbor_mask(&self, atom: usize) -> u64 {
        self.adjacency[atom].iter().fold(0, |m, &b| m | (1 << b))
    }

    /// Whether the atoms in `mask` induce a connected subgraph.
    pub(crate) fn is_connected(&self, mask: u64) -> bool {
        if mask == 0 {
            return false;
        }
        let start = mask.trailing_zeros() as usize;
        let mut seen = 1u64 << start;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let fresh = self.neighbor_mask(v) & mask & !seen;
            seen |= fresh;
            let mut bits = fresh;
            while bits != 0 {
                stack.push(bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        seen == mask
    }

    pub(crate) fn population_of(&self, mask: u64) -> u64 {
        let mut bits = mask;
        let mut total = 0;
        while bits != 0 {
            total += self.atoms[bits.trailing_zeros() as usize].population;
            bits &= bits - 1;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(n: usize) -> Vec<Atom> {
        (0..n).map(|i| Atom::new(i, format!("a{i}"), 1, 0, 0)).collect()
    }

    #[test]
    fn path_graph() {
        let g = StateGraph::new(atoms(3), &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert!(g.is_connected(0b011));
        assert!(!g.is_connected(0b101));
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(
            StateGraph::new(atoms(3), &[(0, 1)]),
            Err(DistrictError::Validation(m)) if m.contains("not connected")
        ));
        assert!(matches!(
            StateGraph::from_arcs(atoms(2), &[(0, 1)]),
            Err(DistrictError::Validation(m)) if m.contains("not symmetric")
        ));
        assert!(StateGraph::new(atoms(2), &[(0, 0), (0, 1)]).is_err());
        assert!(StateGraph::new(atoms(2), &[(0, 5)]).is_err());
        let mut bad = atoms(2);
        bad[1].id = 7;
        assert!(StateGraph::new(bad, &[(0, 1)]).is_err());
    }
}
