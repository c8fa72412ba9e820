use super::{Balance, Constraints, DistrictError, Districting, StateGraph};

/// All admissible districtings, up to relabelling of districts.
///
/// Parts are grown one at a time, each rooted at the smallest unassigned
/// atom, so every unlabeled partition is produced exactly once. Output is
/// sorted by the district lists, which puts the part containing atom 0 first.
pub fn enumerate_maps(graph: &StateGraph, constraints: &Constraints) -> Result<Vec<Districting>, DistrictError> {
    let n = graph.len();
    constraints.validate(n)?;
    let full = graph.full_mask()?;
    let mut search = Search::new(graph, constraints);
    let mut parts = Vec::with_capacity(constraints.k);
    search.split(full, &mut parts);

    let mut maps: Vec<(Vec<Vec<usize>>, Districting)> = search
        .found
        .into_iter()
        .map(|masks| {
            let parts: Vec<Vec<usize>> = masks.iter().map(|&m| mask_atoms(m)).collect();
            let d = Districting::from_parts(n, &parts);
            (d.parts(), d)
        })
        .collect();
    maps.sort();
    if maps.is_empty() {
        return Err(DistrictError::NoAdmissibleMap);
    }
    Ok(maps.into_iter().map(|(_, d)| d).collect())
}

/// Check a single districting against the constraints.
pub fn is_admissible(graph: &StateGraph, constraints: &Constraints, map: &Districting) -> bool {
    let n = graph.len();
    if map.assignment().len() != n || map.num_districts() != constraints.k {
        return false;
    }
    let masks: Vec<u64> = map
        .parts()
        .iter()
        .map(|p| p.iter().fold(0u64, |m, &a| m | (1 << a)))
        .collect();
    if constraints.contiguity && !masks.iter().all(|&m| graph.is_connected(m)) {
        return false;
    }
    balanced(graph, constraints, &masks)
}

fn balanced(graph: &StateGraph, constraints: &Constraints, parts: &[u64]) -> bool {
    let n = graph.len();
    match constraints.balance {
        Balance::ExactSize => parts.iter().all(|m| m.count_ones() as usize * constraints.k == n),
        Balance::PopulationDeviation { tolerance } => {
            let pops: Vec<u64> = parts.iter().map(|&m| graph.population_of(m)).collect();
            let spread = pops.iter().max().unwrap() - pops.iter().min().unwrap();
            (spread as f64) < tolerance * graph.total_population() as f64
        }
    }
}

fn mask_atoms(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

struct Search<'a> {
    graph: &'a StateGraph,
    constraints: &'a Constraints,
    /// Inclusive population bounds any single part must respect.
    min_pop: f64,
    max_pop: f64,
    found: Vec<Vec<u64>>,
}

impl<'a> Search<'a> {
    fn new(graph: &'a StateGraph, constraints: &'a Constraints) -> Self {
        let (min_pop, max_pop) = match constraints.balance {
            Balance::ExactSize => (0.0, f64::INFINITY),
            Balance::PopulationDeviation { tolerance } => {
                // With spread < d and k parts summing to T, each part lies in
                // (T/k - d, T/k + d).
                let total = graph.total_population() as f64;
                let ideal = total / constraints.k as f64;
                let d = tolerance * total;
                (ideal - d, ideal + d)
            }
        };
        Self { graph, constraints, min_pop, max_pop, found: Vec::new() }
    }

    fn part_size(&self) -> Option<usize> {
        match self.constraints.balance {
            Balance::ExactSize => Some(self.graph.len() / self.constraints.k),
            Balance::PopulationDeviation { .. } => None,
        }
    }

    fn split(&mut self, unassigned: u64, parts: &mut Vec<u64>) {
        let k = self.constraints.k;
        if parts.len() + 1 == k {
            if self.constraints.contiguity && !self.graph.is_connected(unassigned) {
                return;
            }
            parts.push(unassigned);
            if balanced(self.graph, self.constraints, parts) {
                self.found.push(parts.clone());
            }
            parts.pop();
            return;
        }
        let root = unassigned.trailing_zeros() as usize;
        let mut candidates = Vec::new();
        self.rooted_parts(root, unassigned, &mut candidates);
        for part in candidates {
            let rest = unassigned & !part;
            if rest == 0 || !self.remainder_feasible(rest, k - parts.len() - 1) {
                continue;
            }
            parts.push(part);
            self.split(rest, parts);
            parts.pop();
        }
    }

    /// Cheap necessary conditions on what is left after placing a part.
    fn remainder_feasible(&self, rest: u64, parts_left: usize) -> bool {
        if (rest.count_ones() as usize) < parts_left {
            return false;
        }
        if let Some(size) = self.part_size() {
            if rest.count_ones() as usize != size * parts_left {
                return false;
            }
            if self.constraints.contiguity {
                // Every component of the remainder has to hold whole districts.
                let mut left = rest;
                while left != 0 {
                    let comp = self.component(left.trailing_zeros() as usize, rest);
                    if comp.count_ones() as usize % size != 0 {
                        return false;
                    }
                    left &= !comp;
                }
            }
        }
        true
    }

    fn component(&self, start: usize, within: u64) -> u64 {
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.graph.neighbor_mask(v) & within & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen
    }

    fn part_ok(&self, part: u64) -> bool {
        match self.part_size() {
            Some(size) => part.count_ones() as usize == size,
            None => {
                let pop = self.graph.population_of(part) as f64;
                pop > self.min_pop && pop < self.max_pop
            }
        }
    }

    /// Can `part` still grow into an acceptable part?
    fn may_grow(&self, part: u64) -> bool {
        match self.part_size() {
            Some(size) => (part.count_ones() as usize) < size,
            None => (self.graph.population_of(part) as f64) < self.max_pop,
        }
    }

    /// Candidate parts containing `root`, drawn from `allowed`.
    fn rooted_parts(&self, root: usize, allowed: u64, out: &mut Vec<u64>) {
        let root_bit = 1u64 << root;
        if self.constraints.contiguity {
            let ext = self.graph.neighbor_mask(root) & allowed;
            self.extend(root_bit, ext, root_bit | self.graph.neighbor_mask(root), allowed, out);
        } else {
            // Every subset of the other allowed atoms, joined with the root.
            let others = allowed & !root_bit;
            let mut sub = others;
            loop {
                let part = sub | root_bit;
                if self.part_ok(part) {
                    out.push(part);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & others;
            }
        }
    }

    /// Connected-set enumeration: each connected superset of `part` that
    /// only adds atoms reachable through `ext` is visited exactly once.
    /// `closed` is `part` plus its neighbourhood.
    fn extend(&self, part: u64, mut ext: u64, closed: u64, allowed: u64, out: &mut Vec<u64>) {
        if self.part_ok(part) {
            out.push(part);
        }
        if !self.may_grow(part) {
            return;
        }
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let nw = self.graph.neighbor_mask(w);
            let exclusive = nw & allowed & !closed;
            self.extend(part | (1 << w), ext | exclusive, closed | nw, allowed, out);
        }
    }
}
